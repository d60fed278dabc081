//! Discrete per-axis PID on the angular error.
//!
//! Rectangular integration (`integral += e * dt`) with a clamp that keeps
//! `|ki * integral| <= i_limit`, backward-difference derivative on the error
//! (zero on the first call after construction or reset) and a symmetric
//! output clamp. Output units are PWM microsecond offsets, fed to the mixer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{wrap_degrees, Scalar, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidGains<T: Scalar> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
}

impl<T: Scalar> Default for PidGains<T> {
    /// The flight-tested gains 1.41 / 0.91 / 1.31.
    fn default() -> Self {
        Self {
            kp: T::lit(1.41),
            ki: T::lit(0.91),
            kd: T::lit(1.31),
        }
    }
}

impl<T: Scalar> PidGains<T> {
    pub fn new(kp: T, ki: T, kd: T) -> Result<Self> {
        let g = Self { kp, ki, kd };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::param(name, "must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Output limits shared by the three axis controllers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidLimits<T: Scalar> {
    /// Bound on `|ki * integral|`.
    pub i_limit: T,
    /// Bound on the total output.
    pub out_limit: T,
}

impl<T: Scalar> Default for PidLimits<T> {
    fn default() -> Self {
        Self {
            i_limit: T::lit(250.0),
            out_limit: T::lit(400.0),
        }
    }
}

impl<T: Scalar> PidLimits<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("i_limit", self.i_limit), ("out_limit", self.out_limit)] {
            if !(v >= T::zero()) {
                return Err(Error::param(name, "must be >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PidState<T: Scalar> {
    /// Accumulated error, degree-seconds.
    pub integral: T,
    pub prev_error: T,
    pub initialized: bool,
    pub i_limit: T,
    pub out_limit: T,
}

impl<T: Scalar> Default for PidState<T> {
    fn default() -> Self {
        Self::new(PidLimits::default())
    }
}

/// Result of one controller update, with the individual terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PidOutput<T: Scalar> {
    pub output: T,
    pub p: T,
    pub i: T,
    pub d: T,
}

impl<T: Scalar> PidState<T> {
    pub fn new(limits: PidLimits<T>) -> Self {
        Self {
            integral: T::zero(),
            prev_error: T::zero(),
            initialized: false,
            i_limit: limits.i_limit,
            out_limit: limits.out_limit,
        }
    }

    /// Clears the accumulators, keeping the limits.
    pub fn reset(&self) -> Self {
        Self::new(PidLimits {
            i_limit: self.i_limit,
            out_limit: self.out_limit,
        })
    }

    /// Computes the control output for `error` and returns it with the
    /// successor state. `self` is left untouched, also on error.
    pub fn step(&self, gains: &PidGains<T>, error: T, dt: T) -> Result<(PidOutput<T>, Self)> {
        if !error.is_finite() {
            return Err(Error::InvalidErrorInput(format!("{error:?}")));
        }
        if !(dt.is_finite() && dt > T::zero()) {
            return Err(Error::param("dt", "must be finite and > 0"));
        }

        let p = gains.kp * error;

        let mut integral = self.integral + error * dt;
        if gains.ki > T::zero() {
            let bound = self.i_limit / gains.ki;
            integral = integral.max(-bound).min(bound);
        }
        let i = gains.ki * integral;

        let prev = if self.initialized {
            self.prev_error
        } else {
            error
        };
        let d = gains.kd * (error - prev) / dt;

        let output = (p + i + d).max(-self.out_limit).min(self.out_limit);
        let next = Self {
            integral,
            prev_error: error,
            initialized: true,
            ..*self
        };
        Ok((PidOutput { output, p, i, d }, next))
    }
}

/// Commanded attitude, degrees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Setpoint<T: Scalar> {
    pub roll: T,
    pub pitch: T,
    pub yaw: T,
}

impl<T: Scalar> Setpoint<T> {
    pub fn new(roll: T, pitch: T, yaw: T) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn as_vec3(&self) -> Vec3<T> {
        Vec3::new(self.roll, self.pitch, self.yaw)
    }

    pub fn validate(&self) -> Result<()> {
        let half = T::lit(180.0);
        for (name, v) in [
            ("roll", self.roll),
            ("pitch", self.pitch),
            ("yaw", self.yaw),
        ] {
            if !(v.is_finite() && v > -half && v <= half) {
                return Err(Error::param(name, "must be finite and in (-180, 180]"));
            }
        }
        Ok(())
    }
}

/// Shortest signed angular difference `setpoint - measured`, in (-180, 180].
pub fn compute_error<T: Scalar>(setpoint: T, measured: T) -> T {
    wrap_degrees(setpoint - measured)
}
