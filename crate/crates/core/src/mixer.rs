//! Throttle + PID outputs to tricopter actuator commands.
//!
//! The front pair differs by the roll output, the tail opposes the front pair
//! for pitch, and yaw is carried only by the tail servo tilt:
//!
//! ```text
//! front_left  = throttle + roll - pitch_gain_front * pitch
//! front_right = throttle - roll - pitch_gain_front * pitch
//! tail        = throttle + pitch_gain_tail * pitch
//! servo       = servo_gain * yaw
//! ```
//!
//! Every channel is then clamped on its own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixerConfig<T: Scalar> {
    pub pitch_gain_front: T,
    pub pitch_gain_tail: T,
    /// Servo degrees per PID output unit.
    pub servo_gain: T,
    pub pwm_min: T,
    pub pwm_max: T,
    /// Symmetric servo travel limit, degrees.
    pub servo_limit: T,
}

impl<T: Scalar> Default for MixerConfig<T> {
    fn default() -> Self {
        Self {
            pitch_gain_front: T::lit(0.5),
            pitch_gain_tail: T::lit(1.0),
            servo_gain: T::lit(0.1),
            pwm_min: T::lit(1000.0),
            pwm_max: T::lit(2000.0),
            servo_limit: T::lit(45.0),
        }
    }
}

impl<T: Scalar> MixerConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pitch_gain_front", self.pitch_gain_front),
            ("pitch_gain_tail", self.pitch_gain_tail),
            ("servo_gain", self.servo_gain),
            ("pwm_min", self.pwm_min),
            ("pwm_max", self.pwm_max),
            ("servo_limit", self.servo_limit),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.pwm_min >= self.pwm_max {
            return Err(Error::param("pwm_min", "must be below pwm_max"));
        }
        if self.servo_limit < T::zero() {
            return Err(Error::param("servo_limit", "must be >= 0"));
        }
        Ok(())
    }
}

/// Pulse widths in µs and tail servo tilt in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActuatorCommand<T: Scalar> {
    pub pwm_front_left: T,
    pub pwm_front_right: T,
    pub pwm_tail: T,
    pub servo_angle: T,
}

impl<T: Scalar> ActuatorCommand<T> {
    /// Clamps every PWM channel to `[pwm_min, pwm_max]` and the servo to
    /// `±servo_limit`.
    pub fn saturate(self, cfg: &MixerConfig<T>) -> Self {
        let pwm = |v: T| v.max(cfg.pwm_min).min(cfg.pwm_max);
        Self {
            pwm_front_left: pwm(self.pwm_front_left),
            pwm_front_right: pwm(self.pwm_front_right),
            pwm_tail: pwm(self.pwm_tail),
            servo_angle: self.servo_angle.max(-cfg.servo_limit).min(cfg.servo_limit),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pwm_front_left.is_finite()
            && self.pwm_front_right.is_finite()
            && self.pwm_tail.is_finite()
            && self.servo_angle.is_finite()
    }
}

pub fn mix<T: Scalar>(
    throttle: T,
    roll_out: T,
    pitch_out: T,
    yaw_out: T,
    cfg: &MixerConfig<T>,
) -> Result<ActuatorCommand<T>> {
    if !(throttle >= cfg.pwm_min && throttle <= cfg.pwm_max) {
        return Err(Error::InvalidThrottle {
            throttle: throttle.to_f64().unwrap_or(f64::NAN),
            min: cfg.pwm_min.to_f64().unwrap_or(f64::NAN),
            max: cfg.pwm_max.to_f64().unwrap_or(f64::NAN),
        });
    }
    let front_pitch = cfg.pitch_gain_front * pitch_out;
    let raw = ActuatorCommand {
        pwm_front_left: throttle + roll_out - front_pitch,
        pwm_front_right: throttle - roll_out - front_pitch,
        pwm_tail: throttle + cfg.pitch_gain_tail * pitch_out,
        servo_angle: cfg.servo_gain * yaw_out,
    };
    Ok(raw.saturate(cfg))
}

/// Maps a normalized command in [0, 1] linearly onto `[pwm_min, pwm_max]`.
pub fn pwm_encode<T: Scalar>(normalized: T, cfg: &MixerConfig<T>) -> Result<T> {
    if !(normalized >= T::zero() && normalized <= T::one()) {
        return Err(Error::OutOfRange {
            value: normalized.to_f64().unwrap_or(f64::NAN),
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(cfg.pwm_min + normalized * (cfg.pwm_max - cfg.pwm_min))
}
