use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::FilterConfig;
use crate::imu::{PitchExtraction, SensorNoiseConfig};
use crate::mixer::MixerConfig;
use crate::pid::{PidGains, PidLimits, Setpoint};
use crate::plant::PlantConfig;
use crate::scalar::{Axis, Vec3};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Sensors, filter, PID, mixer and plant in closed loop.
    #[default]
    ClosedLoop,
    /// The airframe is slewed through the scheduled attitudes; only sensing
    /// and fusion run.
    OpenLoopSweep,
}

/// Setpoint taking effect at time `t`. Written as `[t, roll, pitch, yaw]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct ScheduleEntry {
    pub t: f64,
    pub setpoint: Setpoint<f64>,
}

impl From<[f64; 4]> for ScheduleEntry {
    fn from([t, roll, pitch, yaw]: [f64; 4]) -> Self {
        Self {
            t,
            setpoint: Setpoint::new(roll, pitch, yaw),
        }
    }
}

impl From<ScheduleEntry> for [f64; 4] {
    fn from(e: ScheduleEntry) -> Self {
        [e.t, e.setpoint.roll, e.setpoint.pitch, e.setpoint.yaw]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSettings {
    pub alpha: f64,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            alpha: FilterConfig::<f64>::default().alpha,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxisGains {
    pub roll: PidGains<f64>,
    pub pitch: PidGains<f64>,
    pub yaw: PidGains<f64>,
}

impl AxisGains {
    pub fn get(&self, axis: Axis) -> &PidGains<f64> {
        match axis {
            Axis::Roll => &self.roll,
            Axis::Pitch => &self.pitch,
            Axis::Yaw => &self.yaw,
        }
    }

    pub fn get_mut(&mut self, axis: Axis) -> &mut PidGains<f64> {
        match axis {
            Axis::Roll => &mut self.roll,
            Axis::Pitch => &mut self.pitch,
            Axis::Yaw => &mut self.yaw,
        }
    }
}

/// Open-loop sweep protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    /// Slew rate toward each scheduled attitude, deg/s.
    pub slew_rate: f64,
    /// Hold time after the slew before a reading is taken, s.
    pub settle_time: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            slew_rate: 60.0,
            settle_time: 2.0,
        }
    }
}

/// A complete, validated run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub name: String,
    pub mode: Mode,
    /// Simulated time, s.
    pub duration: f64,
    /// Control and sample period, s.
    pub dt: f64,
    /// Collective pulse width, µs.
    pub throttle: f64,
    pub initial_attitude: Vec3<f64>,
    pub schedule: Vec<ScheduleEntry>,
    pub pitch_extraction: PitchExtraction,
    pub noise: SensorNoiseConfig<f64>,
    pub filter: FilterSettings,
    pub gains: AxisGains,
    pub pid: PidLimits<f64>,
    pub mixer: MixerConfig<f64>,
    pub plant: PlantConfig<f64>,
    pub sweep: SweepSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "default".to_owned(),
            mode: Mode::default(),
            duration: 20.0,
            dt: FilterConfig::<f64>::default().dt,
            throttle: 1500.0,
            initial_attitude: Vec3::zero(),
            schedule: Vec::new(),
            pitch_extraction: PitchExtraction::default(),
            noise: SensorNoiseConfig::default(),
            filter: FilterSettings::default(),
            gains: AxisGains::default(),
            pid: PidLimits::default(),
            mixer: MixerConfig::default(),
            plant: PlantConfig::default(),
            sweep: SweepSettings::default(),
        }
    }
}

fn prefixed(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => Error::InvalidParameter {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

impl Scenario {
    pub fn filter_config(&self) -> FilterConfig<f64> {
        FilterConfig {
            alpha: self.filter.alpha,
            dt: self.dt,
        }
    }

    /// Number of control steps: `floor(duration / dt)`, with a relative
    /// tolerance of 1e-9 so that e.g. 0.3 / 0.1 counts 3 steps.
    pub fn step_count(&self) -> usize {
        let ratio = self.duration / self.dt;
        (ratio * (1.0 + 1e-9)).floor() as usize
    }

    /// Setpoint in force at time `t`: the last schedule entry with
    /// `entry.t <= t`, or zero before the first entry.
    pub fn setpoint_at(&self, t: f64) -> Setpoint<f64> {
        self.schedule
            .iter()
            .take_while(|e| e.t <= t + 1e-9 * self.dt)
            .last()
            .map(|e| e.setpoint)
            .unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::param("duration", "must be finite and > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt <= self.duration) {
            return Err(Error::param("dt", "must be finite, > 0 and <= duration"));
        }
        self.mixer.validate().map_err(|e| prefixed("mixer", e))?;
        if !(self.throttle >= self.mixer.pwm_min && self.throttle <= self.mixer.pwm_max) {
            return Err(Error::param(
                "throttle",
                format!(
                    "must lie in [{}, {}]",
                    self.mixer.pwm_min, self.mixer.pwm_max
                ),
            ));
        }
        if !self.initial_attitude.is_finite() {
            return Err(Error::param("initial_attitude", "must be finite"));
        }
        let mut last_t = 0.0;
        for (i, entry) in self.schedule.iter().enumerate() {
            let field = format!("schedule[{i}]");
            if !(entry.t.is_finite() && entry.t >= last_t && entry.t <= self.duration) {
                return Err(Error::param(
                    field,
                    "time must be non-decreasing and within [0, duration]",
                ));
            }
            entry.setpoint.validate().map_err(|e| prefixed(&field, e))?;
            last_t = entry.t;
        }
        self.noise.validate().map_err(|e| prefixed("noise", e))?;
        if !(self.filter.alpha >= 0.0 && self.filter.alpha <= 1.0) {
            return Err(Error::param("filter.alpha", "must be in [0, 1]"));
        }
        for axis in Axis::ALL {
            self.gains
                .get(axis)
                .validate()
                .map_err(|e| prefixed(&format!("gains.{axis}"), e))?;
        }
        self.pid.validate().map_err(|e| prefixed("pid", e))?;
        self.plant.validate().map_err(|e| prefixed("plant", e))?;
        if !(self.sweep.slew_rate.is_finite() && self.sweep.slew_rate > 0.0) {
            return Err(Error::param("sweep.slew_rate", "must be finite and > 0"));
        }
        if !(self.sweep.settle_time.is_finite() && self.sweep.settle_time >= 0.0) {
            return Err(Error::param("sweep.settle_time", "must be finite and >= 0"));
        }
        Ok(())
    }
}
