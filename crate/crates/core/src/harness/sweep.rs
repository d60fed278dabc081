//! Readings taken at each hold of an open-loop sweep, mirroring the
//! accelerometer / gyroscope / complementary filter columns of a static
//! angle table.

use std::fmt;

use super::run::{gyro_only_track, TraceRow};
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::scalar::{wrap_degrees, Axis};

/// The angles held during the bundled sweeps, degrees.
pub const SWEEP_ANGLES: [f64; 5] = [30.0, 60.0, 90.0, 120.0, 160.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub commanded: f64,
    pub t: f64,
    pub true_angle: f64,
    pub accel_angle: f64,
    /// Raw gyro rate at the reading, deg/s.
    pub gyro_rate: f64,
    pub fused: f64,
    /// Attitude from integrating the gyro alone since the start.
    pub gyro_only: f64,
}

impl SweepPoint {
    pub fn fused_error(&self) -> f64 {
        wrap_degrees(self.fused - self.true_angle)
    }

    pub fn gyro_only_error(&self) -> f64 {
        wrap_degrees(self.gyro_only - self.true_angle)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn max_abs_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.fused_error().abs())
            .fold(0.0, f64::max)
    }

    pub fn mean_abs_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.fused_error().abs())
            .sum::<f64>()
            / self.points.len().max(1) as f64
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.axis.name();
        writeln!(
            f,
            "angle_deg  accel_{a:<8} gyro_{a:<9} filter_{a:<7} gyro_only  true"
        )?;
        for p in &self.points {
            writeln!(
                f,
                "{:<10.0} {:<14.2} {:<14.2} {:<14.2} {:<10.2} {:.2}",
                p.commanded, p.accel_angle, p.gyro_rate, p.fused, p.gyro_only, p.true_angle
            )?;
        }
        write!(
            f,
            "max |filter - true| = {:.2} deg, mean = {:.2} deg",
            self.max_abs_error(),
            self.mean_abs_error()
        )
    }
}

/// Takes one reading per schedule entry, `settle_time` seconds after the
/// slew toward it has finished.
pub fn sweep_report(s: &Scenario, rows: &[TraceRow], axis: Axis) -> Result<SweepReport> {
    let gyro_only = gyro_only_track(s, rows);
    let mut prev = s.initial_attitude[axis];
    let mut points = Vec::with_capacity(s.schedule.len());
    for (i, entry) in s.schedule.iter().enumerate() {
        let target = entry.setpoint.as_vec3()[axis];
        let slew_time = wrap_degrees(target - prev).abs() / s.sweep.slew_rate;
        let at = entry.t + slew_time + s.sweep.settle_time;
        let index = (at / s.dt - 1e-9).ceil() as usize;
        let limit = s.schedule.get(i + 1).map_or(rows.len(), |next| {
            ((next.t / s.dt - 1e-9).ceil() as usize).min(rows.len())
        });
        if index >= limit {
            return Err(Error::param(
                format!("schedule[{i}]"),
                format!("hold ends before the reading at t = {at:.3} s"),
            ));
        }
        let row = &rows[index];
        points.push(SweepPoint {
            commanded: target,
            t: row.t,
            true_angle: row.true_attitude[axis],
            accel_angle: row.acc_angle[axis],
            gyro_rate: row.gyro[axis],
            fused: row.estimate[axis],
            gyro_only: gyro_only[index][axis],
        });
        prev = target;
    }
    Ok(SweepReport { axis, points })
}
