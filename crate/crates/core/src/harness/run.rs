use super::scenario::{Mode, Scenario};
use crate::error::{Error, Result};
use crate::fusion::{complementary_update_all, AttitudeEstimate};
use crate::imu::{accel_to_angle, Imu, ImuSample, TiltAxis};
use crate::mixer::{mix, ActuatorCommand};
use crate::pid::{compute_error, PidState};
use crate::plant::{step_dynamics, RigidBodyState};
use crate::scalar::{wrap_degrees, Axis, Vec3};

/// One control step of a run. Angles in degrees, rates in deg/s, PWM in µs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub true_attitude: Vec3<f64>,
    /// Raw gyro reading, before polarity correction.
    pub gyro: Vec3<f64>,
    /// Accelerometer-derived angles (yaw from the reference heading).
    pub acc_angle: Vec3<f64>,
    pub estimate: Vec3<f64>,
    /// Setpoint minus estimate, wrapped.
    pub error: Vec3<f64>,
    pub pid: Vec3<f64>,
    /// Front-left, front-right, tail.
    pub pwm: [f64; 3],
    pub servo: f64,
}

impl TraceRow {
    pub const COLUMNS: [&'static str; 23] = [
        "t",
        "true_roll",
        "true_pitch",
        "true_yaw",
        "gyro_x",
        "gyro_y",
        "gyro_z",
        "acc_roll",
        "acc_pitch",
        "acc_yaw",
        "est_roll",
        "est_pitch",
        "est_yaw",
        "err_roll",
        "err_pitch",
        "err_yaw",
        "pid_roll",
        "pid_pitch",
        "pid_yaw",
        "pwm_fl",
        "pwm_fr",
        "pwm_tail",
        "servo_deg",
    ];

    pub fn to_fields(&self) -> [f64; 23] {
        let v = |v: Vec3<f64>| v.to_array();
        let mut out = [0.0; 23];
        out[0] = self.t;
        out[1..4].copy_from_slice(&v(self.true_attitude));
        out[4..7].copy_from_slice(&v(self.gyro));
        out[7..10].copy_from_slice(&v(self.acc_angle));
        out[10..13].copy_from_slice(&v(self.estimate));
        out[13..16].copy_from_slice(&v(self.error));
        out[16..19].copy_from_slice(&v(self.pid));
        out[19..22].copy_from_slice(&self.pwm);
        out[22] = self.servo;
        out
    }

    pub fn from_fields(f: &[f64; 23]) -> Self {
        let v = |i: usize| Vec3::new(f[i], f[i + 1], f[i + 2]);
        Self {
            t: f[0],
            true_attitude: v(1),
            gyro: v(4),
            acc_angle: v(7),
            estimate: v(10),
            error: v(13),
            pid: v(16),
            pwm: [f[19], f[20], f[21]],
            servo: f[22],
        }
    }

    /// Setpoint reconstructed from the estimate and the error.
    pub fn setpoint(&self) -> Vec3<f64> {
        (self.estimate + self.error).map(wrap_degrees)
    }

    pub fn is_finite(&self) -> bool {
        self.to_fields().iter().all(|v| v.is_finite())
    }
}

/// Pipeline stage within one control step, reported to a probe in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Sample,
    Fuse,
    Error,
    Pid,
    Mix,
    Plant,
}

/// Observer of the loop; receives `(step, stage)` in execution order.
pub trait LoopProbe {
    fn on_stage(&mut self, step: usize, stage: Stage);
}

impl LoopProbe for () {
    fn on_stage(&mut self, _: usize, _: Stage) {}
}

impl<F: FnMut(usize, Stage)> LoopProbe for F {
    fn on_stage(&mut self, step: usize, stage: Stage) {
        self(step, stage)
    }
}

/// Runs a scenario and returns one row per control step.
pub fn run_scenario(s: &Scenario) -> Result<Vec<TraceRow>> {
    run_scenario_with_probe(s, &mut ())
}

pub fn run_scenario_with_probe(s: &Scenario, probe: &mut impl LoopProbe) -> Result<Vec<TraceRow>> {
    s.validate()?;
    let mut sim = Simulation::new(s)?;
    let steps = s.step_count();
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let row = sim.step(k, probe).map_err(|e| Error::Aborted {
            step: k,
            source: Box::new(e),
        })?;
        if !row.is_finite() {
            return Err(Error::Aborted {
                step: k,
                source: Box::new(Error::InvalidSample("non-finite value in trace row")),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

struct Simulation<'a> {
    s: &'a Scenario,
    imu: Imu<f64>,
    plant: RigidBodyState<f64>,
    estimate: AttitudeEstimate<f64>,
    pid: [PidState<f64>; 3],
}

impl<'a> Simulation<'a> {
    fn new(s: &'a Scenario) -> Result<Self> {
        Ok(Self {
            s,
            imu: Imu::new(s.noise)?,
            plant: RigidBodyState::trimmed(s.initial_attitude, s.throttle, &s.plant),
            estimate: AttitudeEstimate::new(s.initial_attitude, 0.0),
            pid: [PidState::new(s.pid); 3],
        })
    }

    fn step(&mut self, k: usize, probe: &mut impl LoopProbe) -> Result<TraceRow> {
        let s = self.s;
        let t = k as f64 * s.dt;
        let target = s.setpoint_at(t).as_vec3();

        if s.mode == Mode::OpenLoopSweep && k > 0 {
            self.slew_toward(target);
        }
        self.plant.t = t;

        let sample = self.imu.sample(&self.plant)?;
        probe.on_stage(k, Stage::Sample);

        let acc_angle = self.reference_angles(&sample)?;
        let rate = self.imu.corrected_rate(sample.gyro);
        self.estimate =
            complementary_update_all(&self.estimate, rate, acc_angle, &s.filter_config())?;
        probe.on_stage(k, Stage::Fuse);

        let est = self.estimate.angle;
        let error = target.zip_with(est, compute_error);
        probe.on_stage(k, Stage::Error);

        let (pid, cmd) = match s.mode {
            Mode::ClosedLoop => {
                let mut out = Vec3::zero();
                for axis in Axis::ALL {
                    let i = axis.index();
                    let (o, next) = self.pid[i].step(s.gains.get(axis), error[axis], s.dt)?;
                    self.pid[i] = next;
                    out[axis] = o.output;
                }
                probe.on_stage(k, Stage::Pid);
                let cmd = mix(s.throttle, out.x, out.y, out.z, &s.mixer)?;
                probe.on_stage(k, Stage::Mix);
                (out, cmd)
            }
            Mode::OpenLoopSweep => (Vec3::zero(), mix(s.throttle, 0.0, 0.0, 0.0, &s.mixer)?),
        };

        let row = TraceRow {
            t,
            true_attitude: self.plant.attitude,
            gyro: sample.gyro,
            acc_angle,
            estimate: est,
            error,
            pid,
            pwm: [cmd.pwm_front_left, cmd.pwm_front_right, cmd.pwm_tail],
            servo: cmd.servo_angle,
        };

        if s.mode == Mode::ClosedLoop {
            self.advance_plant(&cmd)?;
            probe.on_stage(k, Stage::Plant);
        }
        Ok(row)
    }

    fn reference_angles(&self, sample: &ImuSample<f64>) -> Result<Vec3<f64>> {
        Ok(Vec3::new(
            accel_to_angle(sample.accel, TiltAxis::Roll)?,
            self.s.pitch_extraction.angle(sample.accel)?,
            sample.yaw_ref,
        ))
    }

    fn advance_plant(&mut self, cmd: &ActuatorCommand<f64>) -> Result<()> {
        self.plant = step_dynamics(&self.plant, cmd, &self.s.plant, self.s.dt)?;
        Ok(())
    }

    /// Moves the held attitude toward `target` at the sweep slew rate. The
    /// body rate is the one that produced this step's motion, matching what
    /// the gyro integrates over the interval.
    fn slew_toward(&mut self, target: Vec3<f64>) {
        let max_step = self.s.sweep.slew_rate * self.s.dt;
        let delta = target.zip_with(self.plant.attitude, |goal, now| {
            wrap_degrees(goal - now).clamp(-max_step, max_step)
        });
        self.plant.body_rate = delta * (1.0 / self.s.dt);
        self.plant.attitude = (self.plant.attitude + delta).map(wrap_degrees);
    }
}

/// Attitude obtained by integrating the polarity-corrected gyro alone from
/// the initial attitude, one entry per row.
pub fn gyro_only_track(s: &Scenario, rows: &[TraceRow]) -> Vec<Vec3<f64>> {
    let polarity = s.noise.gyro_polarity;
    let mut angle = s.initial_attitude;
    rows.iter()
        .map(|r| {
            let rate = r.gyro.zip_with(polarity, |g, p| g * p);
            angle = (angle + rate * s.dt).map(wrap_degrees);
            angle
        })
        .collect()
}
