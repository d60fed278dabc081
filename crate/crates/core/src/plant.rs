//! Decoupled rotational dynamics of a Y-frame tricopter.
//!
//! Two front rotors sit at ±60° from the nose on arms of length `arm_length`,
//! the tail rotor sits on the rear boom at the same distance. Body axes are x
//! forward, y left, z up. Thrust differentials produce roll and pitch torque,
//! tilting the tail rotor with the servo produces yaw torque. Axes do not
//! couple and there is no translation.
//!
//! Integration is semi-implicit Euler: actuators advance through their
//! first-order lags, torques are evaluated on the new actuator state, then
//! `rate += acc * dt` followed by `attitude += rate * dt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixer::ActuatorCommand;
use crate::scalar::{wrap_degrees, Scalar, Vec3};

/// Index of each rotor in [`RigidBodyState::motor_thrust`].
pub const FRONT_LEFT: usize = 0;
pub const FRONT_RIGHT: usize = 1;
pub const TAIL: usize = 2;

/// Ground truth of the simulated airframe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidBodyState<T: Scalar> {
    /// Attitude in degrees, wrapped to (-180, 180].
    pub attitude: Vec3<T>,
    /// Body rates in deg/s.
    pub body_rate: Vec3<T>,
    /// Rotor thrusts in newtons: front-left, front-right, tail.
    pub motor_thrust: [T; 3],
    /// Tail servo tilt actually reached, degrees.
    pub servo_angle_actual: T,
    pub t: T,
}

impl<T: Scalar> RigidBodyState<T> {
    /// At rest with the motors stopped.
    pub fn at_rest(attitude: Vec3<T>) -> Self {
        Self {
            attitude: attitude.map(wrap_degrees),
            body_rate: Vec3::zero(),
            motor_thrust: [T::zero(); 3],
            servo_angle_actual: T::zero(),
            t: T::zero(),
        }
    }

    /// At rest with every rotor already spun up to the thrust of `throttle`.
    pub fn trimmed(attitude: Vec3<T>, throttle: T, cfg: &PlantConfig<T>) -> Self {
        let thrust = cfg.thrust_for(throttle);
        Self {
            motor_thrust: [thrust; 3],
            ..Self::at_rest(attitude)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.attitude.is_finite()
            && self.body_rate.is_finite()
            && self.motor_thrust.iter().all(|f| f.is_finite())
            && self.servo_angle_actual.is_finite()
            && self.t.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantConfig<T: Scalar> {
    /// Principal moments of inertia (Ixx, Iyy, Izz), kg·m².
    pub inertia: Vec3<T>,
    /// Distance from the centre to every rotor, m.
    pub arm_length: T,
    /// Thrust per microsecond of pulse above `pwm_min`, N/µs.
    pub thrust_coeff: T,
    /// Pulse width producing zero thrust, µs.
    pub pwm_min: T,
    /// Motor time constant, s.
    pub motor_tau: T,
    /// Servo time constant, s.
    pub servo_tau: T,
    /// Constant external torque per axis, N·m.
    pub disturbance_torque: Vec3<T>,
}

impl<T: Scalar> Default for PlantConfig<T> {
    fn default() -> Self {
        Self {
            inertia: Vec3::new(T::lit(0.02), T::lit(0.02), T::lit(0.04)),
            arm_length: T::lit(0.3),
            thrust_coeff: T::lit(0.006),
            pwm_min: T::lit(1000.0),
            motor_tau: T::lit(0.05),
            servo_tau: T::lit(0.1),
            disturbance_torque: Vec3::zero(),
        }
    }
}

impl<T: Scalar> PlantConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("inertia[0]", self.inertia.x),
            ("inertia[1]", self.inertia.y),
            ("inertia[2]", self.inertia.z),
            ("motor_tau", self.motor_tau),
            ("servo_tau", self.servo_tau),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::param(name, "must be finite and > 0"));
            }
        }
        if !(self.arm_length.is_finite() && self.arm_length > T::zero()) {
            return Err(Error::param("arm_length", "must be finite and > 0"));
        }
        if !(self.thrust_coeff.is_finite() && self.thrust_coeff >= T::zero()) {
            return Err(Error::param("thrust_coeff", "must be finite and >= 0"));
        }
        if !self.pwm_min.is_finite() {
            return Err(Error::param("pwm_min", "must be finite"));
        }
        if !self.disturbance_torque.is_finite() {
            return Err(Error::param("disturbance_torque", "must be finite"));
        }
        Ok(())
    }

    /// Steady-state thrust for a pulse width, never negative.
    pub fn thrust_for(&self, pwm: T) -> T {
        (self.thrust_coeff * (pwm - self.pwm_min)).max(T::zero())
    }
}

/// One step of the first-order lag: `current + (target - current)(1 - e^(-dt/tau))`.
fn first_order<T: Scalar>(current: T, target: T, tau: T, dt: T) -> T {
    current + (target - current) * (T::one() - (-dt / tau).exp())
}

/// Advances one rotor's thrust toward the steady-state value of `commanded_pwm`.
pub fn motor_lag<T: Scalar>(current_thrust: T, commanded_pwm: T, cfg: &PlantConfig<T>, dt: T) -> T {
    debug_assert!(dt > T::zero());
    first_order(
        current_thrust,
        cfg.thrust_for(commanded_pwm),
        cfg.motor_tau,
        dt,
    )
}

pub fn servo_lag<T: Scalar>(current: T, commanded: T, cfg: &PlantConfig<T>, dt: T) -> T {
    debug_assert!(dt > T::zero());
    first_order(current, commanded, cfg.servo_tau, dt)
}

/// Body torque (N·m) produced by the current actuator state plus the
/// configured disturbance.
pub fn body_torque<T: Scalar>(state: &RigidBodyState<T>, cfg: &PlantConfig<T>) -> Vec3<T> {
    let [fl, fr, tail] = state.motor_thrust;
    let arm = cfg.arm_length;
    let half = T::lit(0.5);
    let lateral = arm * T::lit(60.0).to_radians().sin();
    let roll = lateral * (fl - fr);
    let pitch = arm * tail - arm * half * (fl + fr);
    let yaw = arm * tail * state.servo_angle_actual.to_radians().sin();
    Vec3::new(roll, pitch, yaw) + cfg.disturbance_torque
}

/// Advances the airframe by `dt` under the (already saturated) command.
pub fn step_dynamics<T: Scalar>(
    state: &RigidBodyState<T>,
    cmd: &ActuatorCommand<T>,
    cfg: &PlantConfig<T>,
    dt: T,
) -> Result<RigidBodyState<T>> {
    if !(dt.is_finite() && dt > T::zero()) {
        return Err(Error::PlantStateCorrupt("time step must be finite and > 0"));
    }
    if !state.is_finite() {
        return Err(Error::PlantStateCorrupt("non-finite state"));
    }
    if !cmd.is_finite() {
        return Err(Error::PlantStateCorrupt("non-finite actuator command"));
    }

    let pwm = [cmd.pwm_front_left, cmd.pwm_front_right, cmd.pwm_tail];
    let mut next = *state;
    for (thrust, pwm) in next.motor_thrust.iter_mut().zip(pwm) {
        *thrust = motor_lag(*thrust, pwm, cfg, dt);
    }
    next.servo_angle_actual = servo_lag(state.servo_angle_actual, cmd.servo_angle, cfg, dt);

    let torque = body_torque(&next, cfg);
    let accel_deg = torque.zip_with(cfg.inertia, |tau, i| (tau / i).to_degrees());
    next.body_rate = state.body_rate + accel_deg * dt;
    next.attitude = (state.attitude + next.body_rate * dt).map(wrap_degrees);
    next.t = state.t + dt;

    if !next.is_finite() {
        return Err(Error::PlantStateCorrupt("non-finite result"));
    }
    Ok(next)
}
