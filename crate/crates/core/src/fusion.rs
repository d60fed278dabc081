//! Per-axis complementary filter.
//!
//! Each update integrates the gyro rate over one sample period and pulls the
//! prediction toward the accelerometer angle:
//!
//! ```text
//! angle = alpha * (angle + rate * dt) + (1 - alpha) * acc_angle
//! ```
//!
//! The high-pass half (gyro integration) tracks fast motion, the low-pass half
//! (accelerometer blend) removes slow drift. The update is literally the
//! composition [`lowpass_blend`] ∘ [`integrate_gyro`].
//!
//! Blending works on the signed angular difference, so an estimate at 179°
//! and an accelerometer reading of -179° are 2° apart and not 358°.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imu::{accel_to_angle, ImuSample, TiltAxis};
use crate::scalar::{wrap_degrees, Axis, Scalar, Vec3};

/// Fused attitude in degrees per axis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AttitudeEstimate<T: Scalar> {
    pub angle: Vec3<T>,
    pub t: T,
}

impl<T: Scalar> AttitudeEstimate<T> {
    pub fn new(angle: Vec3<T>, t: T) -> Self {
        Self {
            angle: angle.map(wrap_degrees),
            t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig<T: Scalar> {
    /// Weight of the gyro prediction, in [0, 1].
    pub alpha: T,
    /// Sample period in seconds.
    pub dt: T,
}

impl<T: Scalar> Default for FilterConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.93),
            dt: T::lit(0.01),
        }
    }
}

impl<T: Scalar> FilterConfig<T> {
    pub fn new(alpha: T, dt: T) -> Result<Self> {
        let cfg = Self { alpha, dt };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero() && self.alpha <= T::one()) {
            return Err(Error::param("alpha", "must be in [0, 1]"));
        }
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::param("dt", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Steady-state estimate offset under a constant gyro bias `bias` with a
    /// truthful accelerometer: `alpha * bias * dt / (1 - alpha)`.
    pub fn bias_offset(&self, bias: T) -> T {
        self.alpha * bias * self.dt / (T::one() - self.alpha)
    }
}

/// `angle + rate * dt`, wrapped.
pub fn integrate_gyro<T: Scalar>(angle: T, rate: T, dt: T) -> T {
    debug_assert!(dt > T::zero());
    wrap_degrees(angle + rate * dt)
}

/// Moves `angle` a fraction `beta` of the way toward `acc_angle`, wrapped.
pub fn lowpass_blend<T: Scalar>(angle: T, acc_angle: T, beta: T) -> T {
    debug_assert!(beta >= T::zero() && beta <= T::one());
    wrap_degrees(angle + beta * wrap_degrees(acc_angle - angle))
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidSample(
            "non-finite gyro rate or accelerometer angle",
        ))
    }
}

fn fuse<T: Scalar>(angle: T, rate: T, acc_angle: T, cfg: &FilterConfig<T>) -> T {
    lowpass_blend(
        integrate_gyro(angle, rate, cfg.dt),
        acc_angle,
        T::one() - cfg.alpha,
    )
}

/// Updates one axis of `est`; the other axes are carried over. Time advances
/// by `cfg.dt`.
pub fn complementary_update<T: Scalar>(
    est: &AttitudeEstimate<T>,
    gyro_rate: T,
    acc_angle: T,
    cfg: &FilterConfig<T>,
    axis: Axis,
) -> Result<AttitudeEstimate<T>> {
    check_finite(&[gyro_rate, acc_angle, est.angle[axis]])?;
    let mut next = *est;
    next.angle[axis] = fuse(est.angle[axis], gyro_rate, acc_angle, cfg);
    next.t = est.t + cfg.dt;
    Ok(next)
}

/// Updates all three axes at once; time advances by `cfg.dt` once.
pub fn complementary_update_all<T: Scalar>(
    est: &AttitudeEstimate<T>,
    gyro_rate: Vec3<T>,
    acc_angle: Vec3<T>,
    cfg: &FilterConfig<T>,
) -> Result<AttitudeEstimate<T>> {
    check_finite(&gyro_rate.to_array())?;
    check_finite(&acc_angle.to_array())?;
    check_finite(&est.angle.to_array())?;
    Ok(AttitudeEstimate {
        angle: Vec3::new(
            fuse(est.angle.x, gyro_rate.x, acc_angle.x, cfg),
            fuse(est.angle.y, gyro_rate.y, acc_angle.y, cfg),
            fuse(est.angle.z, gyro_rate.z, acc_angle.z, cfg),
        ),
        t: est.t + cfg.dt,
    })
}

/// Accelerometer-side angles for one sample: roll and pitch from the gravity
/// vector, yaw from the sample's reference heading.
pub fn reference_angles<T: Scalar>(sample: &ImuSample<T>) -> Result<Vec3<T>> {
    Ok(Vec3::new(
        accel_to_angle(sample.accel, TiltAxis::Roll)?,
        accel_to_angle(sample.accel, TiltAxis::Pitch)?,
        sample.yaw_ref,
    ))
}

/// Runs the filter over a uniformly sampled sequence. Element `k` of the
/// result is the estimate after consuming sample `k`.
///
/// Timestamps must increase, and consecutive samples must be `cfg.dt` apart
/// within 10%.
pub fn batch_estimate<T: Scalar>(
    samples: &[ImuSample<T>],
    cfg: &FilterConfig<T>,
    initial: AttitudeEstimate<T>,
) -> Result<Vec<AttitudeEstimate<T>>> {
    cfg.validate()?;
    let tolerance = cfg.dt * T::lit(0.1);
    let mut out = Vec::with_capacity(samples.len());
    let mut est = initial;
    for (index, pair) in samples.windows(2).enumerate() {
        let spacing = pair[1].t - pair[0].t;
        if !(spacing > T::zero()) {
            return Err(Error::NonMonotonicInput {
                index: index + 1,
                reason: format!("timestamp {} does not follow {}", pair[1].t, pair[0].t),
            });
        }
        if (spacing - cfg.dt).abs() > tolerance {
            return Err(Error::NonMonotonicInput {
                index: index + 1,
                reason: format!("irregular spacing {spacing} (expected {})", cfg.dt),
            });
        }
    }
    for sample in samples {
        est = complementary_update_all(&est, sample.gyro, reference_angles(sample)?, cfg)?;
        out.push(est);
    }
    Ok(out)
}
