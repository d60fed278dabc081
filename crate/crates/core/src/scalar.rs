//! Scalar abstraction and small fixed-size vector used by every model.

use std::fmt::{Debug, Display};
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::{Deserialize, Serialize};

/// Floating point type the models are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle in degrees into (-180, 180].
pub fn wrap_degrees<T: Scalar>(angle: T) -> T {
    let full = T::lit(360.0);
    let half = T::lit(180.0);
    let mut r = angle % full;
    if r > half {
        r = r - full;
    } else if r <= -half {
        r = r + full;
    }
    r
}

/// Body axis. Roll is about x, pitch about y, yaw about z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Roll,
    Pitch,
    Yaw,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Roll, Axis::Pitch, Axis::Yaw];

    pub fn index(self) -> usize {
        match self {
            Axis::Roll => 0,
            Axis::Pitch => 1,
            Axis::Yaw => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::Roll => "roll",
            Axis::Pitch => "pitch",
            Axis::Yaw => "yaw",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "roll" | "x" => Ok(Axis::Roll),
            "pitch" | "y" => Ok(Axis::Pitch),
            "yaw" | "z" => Ok(Axis::Yaw),
            other => Err(format!(
                "unknown axis `{other}` (expected roll, pitch or yaw)"
            )),
        }
    }
}

impl Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Three components, one per body axis (x = roll, y = pitch, z = yaw).
///
/// Serialized as a plain `[x, y, z]` array.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 3]", into = "[T; 3]")]
pub struct Vec3<T: Copy> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Copy> From<[T; 3]> for Vec3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T: Copy> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Copy> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub const fn splat(v: T) -> Self {
        Self { x: v, y: v, z: v }
    }

    pub fn map<U: Copy>(self, mut f: impl FnMut(T) -> U) -> Vec3<U> {
        Vec3::new(f(self.x), f(self.y), f(self.z))
    }

    pub fn zip_with<U: Copy, V: Copy>(
        self,
        other: Vec3<U>,
        mut f: impl FnMut(T, U) -> V,
    ) -> Vec3<V> {
        Vec3::new(f(self.x, other.x), f(self.y, other.y), f(self.z, other.z))
    }

    pub fn to_array(self) -> [T; 3] {
        self.into()
    }
}

impl<T: Scalar> Vec3<T> {
    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    pub fn norm(self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Copy> Index<Axis> for Vec3<T> {
    type Output = T;

    fn index(&self, axis: Axis) -> &T {
        match axis {
            Axis::Roll => &self.x,
            Axis::Pitch => &self.y,
            Axis::Yaw => &self.z,
        }
    }
}

impl<T: Copy> IndexMut<Axis> for Vec3<T> {
    fn index_mut(&mut self, axis: Axis) -> &mut T {
        match axis {
            Axis::Roll => &mut self.x,
            Axis::Pitch => &mut self.y,
            Axis::Yaw => &mut self.z,
        }
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.map(|a| a * rhs)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}
