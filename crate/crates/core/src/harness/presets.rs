//! Bundled scenarios.
//!
//! Step magnitudes and timings are simulator choices: a 10° step one second
//! into a 20 s run, plus a 180° yaw turn. Sweeps hold each angle of
//! [`SWEEP_ANGLES`] for 6 s.

use super::scenario::{Mode, Scenario, ScheduleEntry};
use super::sweep::SWEEP_ANGLES;
use crate::error::{Error, Result};
use crate::imu::PitchExtraction;
use crate::pid::Setpoint;
use crate::scalar::{Axis, Vec3};

pub const STEP_TIME: f64 = 1.0;
pub const STEP_DURATION: f64 = 20.0;
pub const SWEEP_HOLD: f64 = 6.0;

pub const NAMES: [&str; 9] = [
    "hover",
    "step-roll",
    "step-pitch",
    "step-yaw",
    "yaw-180",
    "disturbance-roll",
    "sweep-roll",
    "sweep-pitch",
    "sweep-yaw",
];

fn on_axis(axis: Axis, degrees: f64) -> Setpoint<f64> {
    let mut v = Vec3::zero();
    v[axis] = degrees;
    Setpoint::new(v.x, v.y, v.z)
}

/// Closed-loop step of `degrees` on one axis at [`STEP_TIME`].
pub fn step_response(axis: Axis, degrees: f64) -> Scenario {
    Scenario {
        name: format!("step-{axis}"),
        duration: STEP_DURATION,
        schedule: vec![ScheduleEntry {
            t: STEP_TIME,
            setpoint: on_axis(axis, degrees),
        }],
        ..Default::default()
    }
}

/// Open-loop sweep of one axis through [`SWEEP_ANGLES`].
pub fn sweep(axis: Axis) -> Scenario {
    let schedule = SWEEP_ANGLES
        .iter()
        .enumerate()
        .map(|(i, &a)| ScheduleEntry {
            t: i as f64 * SWEEP_HOLD,
            setpoint: on_axis(axis, a),
        })
        .collect();
    Scenario {
        name: format!("sweep-{axis}"),
        mode: Mode::OpenLoopSweep,
        duration: SWEEP_HOLD * SWEEP_ANGLES.len() as f64,
        schedule,
        pitch_extraction: if axis == Axis::Pitch {
            PitchExtraction::Planar
        } else {
            PitchExtraction::Aerospace
        },
        ..Default::default()
    }
}

pub fn bundled(name: &str) -> Result<Scenario> {
    let s = match name {
        "hover" => Scenario {
            name: "hover".into(),
            ..Default::default()
        },
        "step-roll" => step_response(Axis::Roll, 10.0),
        "step-pitch" => step_response(Axis::Pitch, 10.0),
        "step-yaw" => step_response(Axis::Yaw, 10.0),
        "yaw-180" => Scenario {
            name: "yaw-180".into(),
            ..step_response(Axis::Yaw, 180.0)
        },
        "disturbance-roll" => {
            let mut s = step_response(Axis::Roll, 10.0);
            s.name = "disturbance-roll".into();
            s.plant.disturbance_torque = Vec3::new(0.01, 0.0, 0.0);
            s
        }
        "sweep-roll" => sweep(Axis::Roll),
        "sweep-pitch" => sweep(Axis::Pitch),
        "sweep-yaw" => sweep(Axis::Yaw),
        other => return Err(Error::UnknownScenario(other.to_owned())),
    };
    Ok(s)
}

pub fn all() -> Vec<Scenario> {
    NAMES
        .iter()
        .map(|n| bundled(n).expect("bundled name"))
        .collect()
}
