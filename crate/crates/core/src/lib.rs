//! Software-in-the-loop attitude control for a tricopter.
//!
//! The loop runs, every sample period:
//!
//! 1. [`imu`]: gyro, accelerometer and reference heading sampled from the
//!    simulated airframe,
//! 2. [`fusion`]: complementary filter per axis,
//! 3. [`pid`]: error against the setpoint and per-axis PID,
//! 4. [`mixer`]: throttle ± PID outputs to rotor PWM and tail servo tilt,
//! 5. [`plant`]: rotational dynamics with motor and servo lag.
//!
//! [`harness`] drives scripted scenarios through that loop and writes CSV
//! traces.
//!
//! The models are generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix them to `f64`, the precision the harness runs in.

pub mod error;
pub mod fusion;
pub mod harness;
pub mod imu;
pub mod mixer;
pub mod pid;
pub mod plant;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{wrap_degrees, Axis, Scalar, Vec3};

pub type ImuSample = imu::ImuSample<f64>;
pub type SensorNoiseConfig = imu::SensorNoiseConfig<f64>;
pub type Imu = imu::Imu<f64>;
pub type AttitudeEstimate = fusion::AttitudeEstimate<f64>;
pub type FilterConfig = fusion::FilterConfig<f64>;
pub type PidGains = pid::PidGains<f64>;
pub type PidLimits = pid::PidLimits<f64>;
pub type PidState = pid::PidState<f64>;
pub type Setpoint = pid::Setpoint<f64>;
pub type ActuatorCommand = mixer::ActuatorCommand<f64>;
pub type MixerConfig = mixer::MixerConfig<f64>;
pub type RigidBodyState = plant::RigidBodyState<f64>;
pub type PlantConfig = plant::PlantConfig<f64>;

pub type Vec3f = Vec3<f32>;
pub type AttitudeEstimateF32 = fusion::AttitudeEstimate<f32>;
pub type FilterConfigF32 = fusion::FilterConfig<f32>;
pub type PidStateF32 = pid::PidState<f32>;
pub type PidGainsF32 = pid::PidGains<f32>;
