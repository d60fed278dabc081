//! Step-response metrics on the fused-estimate columns of a trace.
//!
//! The setpoint is recovered per row as `estimate + error`. The first change
//! of the setpoint on an axis is its step event; the response is measured
//! from that row until the next setpoint change on the same axis (or the end
//! of the trace). With `y` the response normalized so that 0 is the old
//! setpoint and 1 the new one:
//!
//! - rise time: first time `y >= 0.9`
//! - overshoot: `(max y - 1) * 100`, floored at 0
//! - settling time: last time `|y - 1| > 0.02`, or 0 if never
//! - steady-state error: mean `setpoint - estimate` over the last 10% of the window
//!
//! All times are relative to the step event.

use std::fmt;

use super::run::TraceRow;
use crate::error::{Error, Result};
use crate::scalar::{wrap_degrees, Axis};

/// Setpoint changes smaller than this (degrees) are not step events; CSV
/// rounding of the estimate and error columns stays well below it.
const STEP_THRESHOLD: f64 = 1e-3;
const SETTLING_BAND: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisMetrics {
    pub axis: Axis,
    pub step_time: f64,
    pub step_from: f64,
    pub step_to: f64,
    /// `None` if the response never reached 90% of the step.
    pub rise_time: Option<f64>,
    pub overshoot_pct: f64,
    pub settling_time: f64,
    pub steady_state_error: f64,
}

impl AxisMetrics {
    pub fn step_size(&self) -> f64 {
        wrap_degrees(self.step_to - self.step_from)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    /// One entry per axis that has a step, in roll, pitch, yaw order.
    pub axes: Vec<AxisMetrics>,
}

impl Metrics {
    pub fn axis(&self, axis: Axis) -> Option<&AxisMetrics> {
        self.axes.iter().find(|m| m.axis == axis)
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "axis   step_t  from     to       rise_s   overshoot_%  settling_s  ss_error"
        )?;
        for m in &self.axes {
            let rise = m
                .rise_time
                .map_or_else(|| "-".to_owned(), |r| format!("{r:.3}"));
            writeln!(
                f,
                "{:<6} {:<7.3} {:<8.3} {:<8.3} {:<8} {:<12.3} {:<11.3} {:.4}",
                m.axis.name(),
                m.step_time,
                m.step_from,
                m.step_to,
                rise,
                m.overshoot_pct,
                m.settling_time,
                m.steady_state_error
            )?;
        }
        Ok(())
    }
}

pub fn report_metrics(rows: &[TraceRow]) -> Result<Metrics> {
    let setpoints: Vec<_> = rows.iter().map(TraceRow::setpoint).collect();
    let mut axes = Vec::new();
    for axis in Axis::ALL {
        let changes: Vec<usize> = (1..rows.len())
            .filter(|&k| {
                wrap_degrees(setpoints[k][axis] - setpoints[k - 1][axis]).abs() > STEP_THRESHOLD
            })
            .collect();
        let Some(&start) = changes.first() else {
            continue;
        };
        let end = changes.get(1).copied().unwrap_or(rows.len());
        axes.push(axis_metrics(
            axis,
            &rows[start..end],
            setpoints[start - 1][axis],
            setpoints[start][axis],
        ));
    }
    if axes.is_empty() {
        return Err(Error::NoStepEvent);
    }
    Ok(Metrics { axes })
}

fn axis_metrics(axis: Axis, window: &[TraceRow], from: f64, to: f64) -> AxisMetrics {
    let step = wrap_degrees(to - from);
    let t0 = window[0].t;
    // normalized response, unwrapped around the new setpoint
    let y: Vec<f64> = window
        .iter()
        .map(|r| (step + wrap_degrees(r.estimate[axis] - to)) / step)
        .collect();

    let rise_time = y
        .iter()
        .zip(window)
        .find(|(y, _)| **y >= 0.9)
        .map(|(_, r)| r.t - t0);
    let peak = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let overshoot_pct = ((peak - 1.0) * 100.0).max(0.0);
    let settling_time = y
        .iter()
        .zip(window)
        .rev()
        .find(|(y, _)| (**y - 1.0).abs() > SETTLING_BAND)
        .map_or(0.0, |(_, r)| r.t - t0);

    let tail = (window.len() / 10).max(1);
    let steady_state_error = window[window.len() - tail..]
        .iter()
        .map(|r| wrap_degrees(to - r.estimate[axis]))
        .sum::<f64>()
        / tail as f64;

    AxisMetrics {
        axis,
        step_time: t0,
        step_from: from,
        step_to: to,
        rise_time,
        overshoot_pct,
        settling_time,
        steady_state_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Vec3;

    const DT: f64 = 0.01;

    /// Rows with setpoint `sp(t)` on roll and estimate `est(t)`.
    fn trace(n: usize, sp: impl Fn(f64) -> f64, est: impl Fn(f64) -> f64) -> Vec<TraceRow> {
        (0..n)
            .map(|k| {
                let t = k as f64 * DT;
                let e = est(t);
                TraceRow {
                    t,
                    estimate: Vec3::new(e, 0.0, 0.0),
                    error: Vec3::new(wrap_degrees(sp(t) - e), 0.0, 0.0),
                    ..Default::default()
                }
            })
            .collect()
    }

    fn step_at(ts: f64, size: f64) -> impl Fn(f64) -> f64 {
        move |t| if t >= ts - 1e-12 { size } else { 0.0 }
    }

    #[test]
    fn perfect_tracking() {
        let rows = trace(500, step_at(1.0, 10.0), step_at(1.0, 10.0));
        let m = report_metrics(&rows).unwrap();
        let r = m.axis(Axis::Roll).unwrap();
        assert_eq!(r.overshoot_pct, 0.0);
        assert_eq!(r.settling_time, 0.0);
        assert_eq!(r.rise_time, Some(0.0));
        assert!((r.step_time - 1.0).abs() < 1e-12);
        assert_eq!(r.steady_state_error, 0.0);
        assert!(m.axis(Axis::Pitch).is_none());
    }

    #[test]
    fn first_order_rise_time() {
        let tau = 0.4;
        let ts = 0.5;
        let rows = trace(1000, step_at(ts, 1.0), |t| {
            if t < ts - 1e-12 {
                0.0
            } else {
                1.0 - (-(t - ts) / tau).exp()
            }
        });
        let r = *report_metrics(&rows).unwrap().axis(Axis::Roll).unwrap();
        let expected = tau * 10f64.ln();
        assert!(
            (r.rise_time.unwrap() - expected).abs() <= DT,
            "{:?}",
            r.rise_time
        );
        assert_eq!(r.overshoot_pct, 0.0);
        let settle = tau * 50f64.ln();
        assert!(
            (r.settling_time - settle).abs() <= DT,
            "{}",
            r.settling_time
        );
    }

    #[test]
    fn overshoot_of_constructed_peak() {
        // rises to 1.25× the step, then returns
        let rows = trace(600, step_at(1.0, 20.0), |t| {
            if t < 1.0 - 1e-12 {
                0.0
            } else if t < 2.0 {
                25.0
            } else {
                20.0
            }
        });
        let r = *report_metrics(&rows).unwrap().axis(Axis::Roll).unwrap();
        assert!((r.overshoot_pct - 25.0).abs() < 1e-9);
        assert!((r.settling_time - 0.99).abs() < 1e-9);
    }

    #[test]
    fn step_across_the_seam() {
        // 0 -> 180 with the estimate overshooting to -179
        let rows = trace(400, step_at(1.0, 180.0), |t| {
            if t < 1.0 - 1e-12 {
                0.0
            } else if t < 2.0 {
                90.0
            } else if t < 3.0 {
                -179.0
            } else {
                180.0
            }
        });
        let r = *report_metrics(&rows).unwrap().axis(Axis::Roll).unwrap();
        assert!((r.step_size() - 180.0).abs() < 1e-9);
        assert!((r.overshoot_pct - 100.0 / 180.0).abs() < 1e-9);
        assert!((r.rise_time.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_step_is_an_error() {
        let rows = trace(100, |_| 5.0, |_| 4.0);
        assert!(matches!(report_metrics(&rows), Err(Error::NoStepEvent)));
        assert!(matches!(report_metrics(&[]), Err(Error::NoStepEvent)));
    }

    #[test]
    fn display_lists_axes() {
        let rows = trace(300, step_at(1.0, 10.0), step_at(1.5, 10.0));
        let text = report_metrics(&rows).unwrap().to_string();
        assert!(text.lines().nth(1).unwrap().starts_with("roll"));
    }
}
