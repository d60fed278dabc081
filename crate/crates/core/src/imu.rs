//! Behavioural gyroscope and accelerometer.
//!
//! The gyro reports the true body rate, flipped by the mounting polarity,
//! plus a constant bias and white noise. Integrating it alone drifts by
//! `bias * T`. The accelerometer reports gravity resolved into body axes,
//! a sinusoidal vibration along the thrust axis (body z) and white noise, so
//! the tilt it implies is noisy but drift free.
//!
//! Yaw is not observable from gravity. A reference heading sensor (true yaw
//! plus white noise of the same angular size as the accelerometer noise
//! seen by a level inclinometer) stands in for it so the yaw channel can run
//! through the same filter. It is a modelling stand-in, not physics.
//!
//! # Noise streams
//!
//! Each configuration owns three ChaCha8 streams keyed by the seed: the
//! 32-byte key holds `seed` as little-endian `u64` in bytes 0..8 and zeros
//! elsewhere; stream id 0 feeds the gyro, 1 the accelerometer and 2 the
//! heading reference. A Gaussian draw consumes two `u64` words `w1, w2`:
//!
//! ```text
//! u1 = ((w1 >> 11) + 1) * 2^-53      in (0, 1]
//! u2 = (w2 >> 11) * 2^-53            in [0, 1)
//! z  = sqrt(-2 ln u1) * cos(2π u2)
//! ```
//!
//! Draws happen on every call whatever the sigma, so the stream position only
//! depends on the call index.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::RigidBodyState;
use crate::scalar::{wrap_degrees, Scalar, Vec3};

/// One timestamped IMU reading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuSample<T: Scalar> {
    pub t: T,
    /// Angular rate, deg/s.
    pub gyro: Vec3<T>,
    /// Specific force, g.
    pub accel: Vec3<T>,
    /// Reference heading standing in for the unobservable yaw, degrees.
    pub yaw_ref: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorNoiseConfig<T: Scalar> {
    /// deg/s per axis.
    pub gyro_bias: Vec3<T>,
    /// deg/s.
    pub gyro_white_sigma: T,
    /// Mounting sign per gyro axis, each +1 or -1.
    pub gyro_polarity: Vec3<T>,
    /// g, along body z.
    pub vibration_amp: T,
    /// Hz.
    pub vibration_freq: T,
    /// g, per axis.
    pub accel_white_sigma: T,
    pub seed: u64,
}

impl<T: Scalar> Default for SensorNoiseConfig<T> {
    fn default() -> Self {
        Self {
            gyro_bias: Vec3::splat(T::lit(0.5)),
            gyro_white_sigma: T::lit(0.05),
            gyro_polarity: Vec3::splat(T::one()),
            vibration_amp: T::lit(0.1),
            vibration_freq: T::lit(30.0),
            accel_white_sigma: T::lit(0.002),
            seed: 1,
        }
    }
}

impl<T: Scalar> SensorNoiseConfig<T> {
    /// Every noise source disabled, positive polarity.
    pub fn noiseless() -> Self {
        Self {
            gyro_bias: Vec3::zero(),
            gyro_white_sigma: T::zero(),
            gyro_polarity: Vec3::splat(T::one()),
            vibration_amp: T::zero(),
            vibration_freq: T::zero(),
            accel_white_sigma: T::zero(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gyro_white_sigma", self.gyro_white_sigma),
            ("vibration_amp", self.vibration_amp),
            ("vibration_freq", self.vibration_freq),
            ("accel_white_sigma", self.accel_white_sigma),
        ] {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(Error::param(name, "must be finite and >= 0"));
            }
        }
        if !self.gyro_bias.is_finite() {
            return Err(Error::param("gyro_bias", "must be finite"));
        }
        for p in self.gyro_polarity.to_array() {
            if p != T::one() && p != -T::one() {
                return Err(Error::param("gyro_polarity", "each entry must be +1 or -1"));
            }
        }
        Ok(())
    }
}

/// Seeded Gaussian source, see the module docs for the exact algorithm.
#[derive(Clone, Debug)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    fn scaled<T: Scalar>(&mut self, sigma: T) -> T {
        sigma * T::lit(self.gaussian())
    }
}

/// Specific force of gravity in body axes for a (roll, pitch, yaw) attitude
/// in degrees, z-y-x Euler order: `(-sin θ, sin φ cos θ, cos φ cos θ)`.
pub fn gravity_in_body<T: Scalar>(attitude: Vec3<T>) -> Vec3<T> {
    let (sr, cr) = attitude.x.to_radians().sin_cos();
    let (sp, cp) = attitude.y.to_radians().sin_cos();
    Vec3::new(-sp, sr * cp, cr * cp)
}

/// Axis recoverable from an accelerometer reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TiltAxis {
    Roll,
    Pitch,
}

/// Tilt in degrees implied by a gravity reading:
/// roll = atan2(a_y, a_z), pitch = atan2(-a_x, sqrt(a_y² + a_z²)).
pub fn accel_to_angle<T: Scalar>(accel: Vec3<T>, axis: TiltAxis) -> Result<T> {
    if !accel.is_finite() {
        return Err(Error::InvalidSample("non-finite accelerometer reading"));
    }
    if accel.norm() == T::zero() {
        return Err(Error::IndeterminateInclination);
    }
    let rad = match axis {
        TiltAxis::Roll => accel.y.atan2(accel.z),
        TiltAxis::Pitch => (-accel.x).atan2((accel.y * accel.y + accel.z * accel.z).sqrt()),
    };
    Ok(wrap_degrees(rad.to_degrees()))
}

/// How the pitch channel is read from the accelerometer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchExtraction {
    /// `atan2(-a_x, sqrt(a_y² + a_z²))`, limited to [-90°, 90°].
    #[default]
    Aerospace,
    /// `atan2(-a_x, a_z)`: full circle, exact only for rotations about the
    /// pitch axis alone. Used for single-axis pitch sweeps past 90°.
    Planar,
}

impl PitchExtraction {
    pub fn angle<T: Scalar>(self, accel: Vec3<T>) -> Result<T> {
        match self {
            PitchExtraction::Aerospace => accel_to_angle(accel, TiltAxis::Pitch),
            PitchExtraction::Planar => {
                if !accel.is_finite() {
                    return Err(Error::InvalidSample("non-finite accelerometer reading"));
                }
                if accel.x == T::zero() && accel.z == T::zero() {
                    return Err(Error::IndeterminateInclination);
                }
                Ok(wrap_degrees((-accel.x).atan2(accel.z).to_degrees()))
            }
        }
    }
}

/// Stateful sensor pair: configuration plus the three noise streams.
#[derive(Clone, Debug)]
pub struct Imu<T: Scalar> {
    cfg: SensorNoiseConfig<T>,
    gyro_noise: NoiseStream,
    accel_noise: NoiseStream,
    heading_noise: NoiseStream,
    last_t: Option<T>,
}

impl<T: Scalar> Imu<T> {
    pub fn new(cfg: SensorNoiseConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            gyro_noise: NoiseStream::new(cfg.seed, 0),
            accel_noise: NoiseStream::new(cfg.seed, 1),
            heading_noise: NoiseStream::new(cfg.seed, 2),
            last_t: None,
        })
    }

    pub fn config(&self) -> &SensorNoiseConfig<T> {
        &self.cfg
    }

    /// Raw gyro reading, deg/s.
    pub fn sample_gyro(&mut self, state: &RigidBodyState<T>) -> Vec3<T> {
        let sigma = self.cfg.gyro_white_sigma;
        let noise = Vec3::new(
            self.gyro_noise.scaled(sigma),
            self.gyro_noise.scaled(sigma),
            self.gyro_noise.scaled(sigma),
        );
        state
            .body_rate
            .zip_with(self.cfg.gyro_polarity, |r, p| r * p)
            + self.cfg.gyro_bias
            + noise
    }

    /// Raw accelerometer reading at time `t`, g.
    pub fn sample_accel(&mut self, state: &RigidBodyState<T>, t: T) -> Vec3<T> {
        let sigma = self.cfg.accel_white_sigma;
        let noise = Vec3::new(
            self.accel_noise.scaled(sigma),
            self.accel_noise.scaled(sigma),
            self.accel_noise.scaled(sigma),
        );
        let phase = T::TAU() * self.cfg.vibration_freq * t;
        let vibration = Vec3::new(T::zero(), T::zero(), self.cfg.vibration_amp * phase.sin());
        gravity_in_body(state.attitude) + vibration + noise
    }

    /// Reference heading standing in for the yaw channel, degrees.
    pub fn sample_yaw_reference(&mut self, state: &RigidBodyState<T>) -> T {
        let sigma = self.cfg.accel_white_sigma.atan().to_degrees();
        wrap_degrees(state.attitude.z + self.heading_noise.scaled(sigma))
    }

    /// Gyro rate corrected for the mounting polarity.
    pub fn corrected_rate(&self, raw: Vec3<T>) -> Vec3<T> {
        raw.zip_with(self.cfg.gyro_polarity, |r, p| r * p)
    }

    /// Samples every sensor at `state.t`, which must be strictly later than
    /// the previous call.
    pub fn sample(&mut self, state: &RigidBodyState<T>) -> Result<ImuSample<T>> {
        if !(state.t >= T::zero()) {
            return Err(Error::InvalidSample("negative or non-finite timestamp"));
        }
        if let Some(last) = self.last_t {
            if !(state.t > last) {
                return Err(Error::NonMonotonicInput {
                    index: 0,
                    reason: format!("sample time {} not after {}", state.t, last),
                });
            }
        }
        self.last_t = Some(state.t);
        Ok(ImuSample {
            t: state.t,
            gyro: self.sample_gyro(state),
            accel: self.sample_accel(state, state.t),
            yaw_ref: self.sample_yaw_reference(state),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn state(attitude: Vec3<f64>, rate: Vec3<f64>) -> RigidBodyState<f64> {
        RigidBodyState {
            body_rate: rate,
            ..RigidBodyState::at_rest(attitude)
        }
    }

    fn quiet() -> Imu<f64> {
        Imu::new(SensorNoiseConfig::noiseless()).unwrap()
    }

    /// Rotates world-up into body axes with explicit matrices, R = Rz·Ry·Rx.
    fn gravity_oracle(roll: f64, pitch: f64, yaw: f64) -> [f64; 3] {
        let (r, p, y) = (roll.to_radians(), pitch.to_radians(), yaw.to_radians());
        let rx = [
            [1.0, 0.0, 0.0],
            [0.0, r.cos(), -r.sin()],
            [0.0, r.sin(), r.cos()],
        ];
        let ry = [
            [p.cos(), 0.0, p.sin()],
            [0.0, 1.0, 0.0],
            [-p.sin(), 0.0, p.cos()],
        ];
        let rz = [
            [y.cos(), -y.sin(), 0.0],
            [y.sin(), y.cos(), 0.0],
            [0.0, 0.0, 1.0],
        ];
        let mul = |a: [[f64; 3]; 3], b: [[f64; 3]; 3]| {
            let mut c = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            c
        };
        let rot = mul(rz, mul(ry, rx));
        // body = Rᵀ · (0, 0, 1): the third row of R
        [rot[2][0], rot[2][1], rot[2][2]]
    }

    #[test]
    fn stationary_gyro_reads_zero() {
        let g = quiet().sample_gyro(&state(Vec3::zero(), Vec3::zero()));
        assert_eq!(g.to_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn gyro_bias_is_additive() {
        let cfg = SensorNoiseConfig {
            gyro_bias: Vec3::new(0.5, 0.0, 0.0),
            ..SensorNoiseConfig::noiseless()
        };
        let g = Imu::new(cfg)
            .unwrap()
            .sample_gyro(&state(Vec3::zero(), Vec3::new(10.0, 0.0, 0.0)));
        assert_eq!(g.to_array(), [10.5, 0.0, 0.0]);
    }

    #[test]
    fn gyro_polarity_flips_rate_only() {
        let cfg = SensorNoiseConfig {
            gyro_bias: Vec3::new(0.5, 0.0, 0.0),
            gyro_polarity: Vec3::new(-1.0, 1.0, 1.0),
            ..SensorNoiseConfig::noiseless()
        };
        let mut imu = Imu::new(cfg).unwrap();
        let g = imu.sample_gyro(&state(Vec3::zero(), Vec3::new(10.0, 2.0, 0.0)));
        assert_eq!(g.to_array(), [-9.5, 2.0, 0.0]);
        assert_eq!(imu.corrected_rate(g).x, 9.5);
    }

    #[test]
    fn bias_integrates_to_drift() {
        let cfg = SensorNoiseConfig {
            gyro_bias: Vec3::splat(0.5),
            ..SensorNoiseConfig::noiseless()
        };
        let mut imu = Imu::new(cfg).unwrap();
        let s = state(Vec3::zero(), Vec3::zero());
        let drift: f64 = (0..6000).map(|_| imu.sample_gyro(&s).x * 0.01).sum();
        assert_abs_diff_eq!(drift, 30.0, epsilon = 1e-6);
    }

    #[test]
    fn level_accel_reads_one_g() {
        let a = quiet().sample_accel(&state(Vec3::zero(), Vec3::zero()), 0.37);
        assert_eq!(a.to_array(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn rolled_accel_matches_rotation_oracle() {
        let a = quiet().sample_accel(&state(Vec3::new(30.0, 0.0, 0.0), Vec3::zero()), 0.0);
        let o = gravity_oracle(30.0, 0.0, 0.0);
        assert_abs_diff_eq!(a.x, o[0], epsilon = 1e-12);
        assert_abs_diff_eq!(a.y, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.z, 0.8660254037844387, epsilon = 1e-12);
        for (r, p, y) in [
            (10.0, 20.0, 30.0),
            (-70.0, 45.0, 170.0),
            (150.0, -80.0, -20.0),
        ] {
            let g = gravity_in_body(Vec3::new(r, p, y)).to_array();
            let o = gravity_oracle(r, p, y);
            for i in 0..3 {
                assert_abs_diff_eq!(g[i], o[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn vibration_peak_on_z() {
        let cfg = SensorNoiseConfig {
            vibration_amp: 0.2,
            vibration_freq: 5.0,
            ..SensorNoiseConfig::noiseless()
        };
        // sin(2π·5·0.05) = 1
        let a = Imu::new(cfg)
            .unwrap()
            .sample_accel(&state(Vec3::zero(), Vec3::zero()), 0.05);
        assert_abs_diff_eq!(a.z, 1.2, epsilon = 1e-12);
        assert_eq!(a.x, 0.0);
        assert_eq!(a.y, 0.0);
    }

    #[test]
    #[allow(clippy::approx_constant)] // the four-digit inputs are the point
    fn tilt_examples() {
        assert_eq!(
            accel_to_angle(Vec3::new(0.0, 0.0, 1.0), TiltAxis::Roll).unwrap(),
            0.0
        );
        assert_abs_diff_eq!(
            accel_to_angle(Vec3::new(0.0, 0.5, 0.8660254037844387), TiltAxis::Roll).unwrap(),
            30.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            accel_to_angle(Vec3::new(-0.7071, 0.0, 0.7071), TiltAxis::Pitch).unwrap(),
            45.0,
            epsilon = 1e-9
        );
        assert!(matches!(
            accel_to_angle(Vec3::<f64>::zero(), TiltAxis::Roll),
            Err(Error::IndeterminateInclination)
        ));
        assert_eq!(
            accel_to_angle(Vec3::new(0.0, -0.0, -1.0), TiltAxis::Roll).unwrap(),
            180.0
        );
    }

    #[test]
    fn planar_pitch_covers_full_circle() {
        for p in [30.0, 90.0, 120.0, 160.0, -135.0] {
            let g = gravity_in_body(Vec3::new(0.0, p, 0.0));
            assert_abs_diff_eq!(PitchExtraction::Planar.angle(g).unwrap(), p, epsilon = 1e-9);
        }
        // the aerospace form folds past 90°
        let g = gravity_in_body(Vec3::new(0.0, 120.0, 0.0));
        assert_abs_diff_eq!(
            PitchExtraction::Aerospace.angle(g).unwrap(),
            60.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn identical_seeds_identical_streams() {
        let cfg = SensorNoiseConfig::<f64>::default();
        let run = |cfg| {
            let mut imu = Imu::new(cfg).unwrap();
            (0..500)
                .map(|k| {
                    let s = RigidBodyState {
                        t: k as f64 * 0.01,
                        ..state(Vec3::new(5.0, -3.0, 40.0), Vec3::new(1.0, 2.0, 3.0))
                    };
                    imu.sample(&s).unwrap()
                })
                .collect::<Vec<_>>()
        };
        let a = run(cfg);
        let b = run(cfg);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(
                x.gyro.to_array().map(f64::to_bits),
                y.gyro.to_array().map(f64::to_bits)
            );
            assert_eq!(
                x.accel.to_array().map(f64::to_bits),
                y.accel.to_array().map(f64::to_bits)
            );
            assert_eq!(x.yaw_ref.to_bits(), y.yaw_ref.to_bits());
        }
        let c = run(SensorNoiseConfig { seed: 2, ..cfg });
        assert_ne!(a[10].gyro, c[10].gyro);
    }

    #[test]
    fn gaussian_moments() {
        let mut n = NoiseStream::new(7, 0);
        let draws: Vec<f64> = (0..20000).map(|_| n.gaussian()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.03, "{mean}");
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn sample_requires_increasing_time() {
        let mut imu = quiet();
        let s = state(Vec3::zero(), Vec3::zero());
        imu.sample(&RigidBodyState { t: 0.0, ..s }).unwrap();
        assert!(imu.sample(&RigidBodyState { t: 0.0, ..s }).is_err());
        assert!(imu.sample(&RigidBodyState { t: 0.01, ..s }).is_ok());
        assert!(quiet().sample(&RigidBodyState { t: -1.0, ..s }).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = SensorNoiseConfig {
            vibration_amp: -0.1,
            ..SensorNoiseConfig::<f64>::default()
        };
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("vibration_amp"));
        let bad = SensorNoiseConfig {
            gyro_polarity: Vec3::new(1.0, 0.5, 1.0),
            ..SensorNoiseConfig::<f64>::default()
        };
        assert!(Imu::new(bad).is_err());
    }

    fn roll_variance(amp: f64) -> f64 {
        let cfg = SensorNoiseConfig {
            vibration_amp: amp,
            vibration_freq: 7.0,
            ..SensorNoiseConfig::noiseless()
        };
        let mut imu = Imu::new(cfg).unwrap();
        let s = state(Vec3::new(30.0, 10.0, 0.0), Vec3::zero());
        let angles: Vec<f64> = (0..1000)
            .map(|k| accel_to_angle(imu.sample_accel(&s, k as f64 * 0.01), TiltAxis::Roll).unwrap())
            .collect();
        let mean = angles.iter().sum::<f64>() / angles.len() as f64;
        angles.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / angles.len() as f64
    }

    #[test]
    fn vibration_raises_inclinometer_variance() {
        let amps = [0.0, 0.05, 0.1, 0.2, 0.4];
        let vars: Vec<f64> = amps.iter().map(|&a| roll_variance(a)).collect();
        assert!(vars[0] < 1e-20);
        for w in vars.windows(2) {
            assert!(w[1] > w[0], "{vars:?}");
        }
    }

    proptest! {
        #[test]
        fn noiseless_round_trip(roll in -89.9f64..89.9, pitch in -89.9f64..89.9, yaw in -179.0f64..180.0) {
            let s = state(Vec3::new(roll, pitch, yaw), Vec3::zero());
            let a = quiet().sample_accel(&s, 0.0);
            prop_assert!((accel_to_angle(a, TiltAxis::Roll).unwrap() - roll).abs() < 1e-9);
            prop_assert!((accel_to_angle(a, TiltAxis::Pitch).unwrap() - pitch).abs() < 1e-9);
        }

        #[test]
        fn tilt_in_half_open_range(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
            prop_assume!(x != 0.0 || y != 0.0 || z != 0.0);
            for axis in [TiltAxis::Roll, TiltAxis::Pitch] {
                let a = accel_to_angle(Vec3::new(x, y, z), axis).unwrap();
                prop_assert!(a > -180.0 && a <= 180.0);
            }
        }
    }
}
