//! Quaternion algebra on ℍ and the U(1) moment-map structure.
//!
//! A quaternion `h = w + x i + y j + z k` carries three complex structures
//! given by left multiplication with `i`, `j` and `k`. The Kähler form used
//! throughout the crate is `ω_ℍ(v, w) = ⟨i·v, w⟩`, where `⟨,⟩` is the
//! Euclidean pairing on ℝ⁴, and the moment map is `μ(h) = ½ h̄ i h`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Sign of the fundamental vector field `L_ζ(h) = s·(ic)·h`.
///
/// With `ω_ℍ(v, w) = ⟨i v, w⟩` the identity `ω_ℍ(L_ζ h, v) = −c·Re(h̄ v)`
/// holds exactly for `s = +1`.
pub const FUNDAMENTAL_FIELD_SIGN: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// `cos θ + i sin θ`, the U(1) element `exp(iθ)` inside ℍ.
    pub fn exp_i(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on ℝ⁴, equal to `Re(p̄ q)`.
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn max_abs(self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl Mul for Quaternion {
    type Output = Self;

    /// Hamilton product.
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;

    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Add for Quaternion {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

/// One of the three complex structures on ℍ, acting by left multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    I,
    J,
    K,
}

impl Axis {
    pub fn unit(self) -> Quaternion {
        match self {
            Axis::I => Quaternion::I,
            Axis::J => Quaternion::J,
            Axis::K => Quaternion::K,
        }
    }
}

pub fn cstruct(axis: Axis, v: Quaternion) -> Quaternion {
    axis.unit() * v
}

/// Value of μ in ℝ³⊗iℝ, stored as the coefficients of `i`, `j`, `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MomentValue {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(m1: f64, m2: f64, m3: f64) -> Self {
        Self { m1, m2, m3 }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.m1 * s, self.m2 * s, self.m3 * s)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.m1 * o.m1 + self.m2 * o.m2 + self.m3 * o.m3
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(self) -> f64 {
        self.m1.abs().max(self.m2.abs()).max(self.m3.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }

    /// The purely imaginary quaternion `m1 i + m2 j + m3 k`.
    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(0.0, self.m1, self.m2, self.m3)
    }
}

impl Add for MomentValue {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.m1 + o.m1, self.m2 + o.m2, self.m3 + o.m3)
    }
}

impl Sub for MomentValue {
    type Output = Self;

    fn sub(self, o: Self) -> Self {
        Self::new(self.m1 - o.m1, self.m2 - o.m2, self.m3 - o.m3)
    }
}

impl Neg for MomentValue {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.m1, -self.m2, -self.m3)
    }
}

impl AddAssign for MomentValue {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// `μ(h) = ½ h̄ i h`, expanded in closed form.
pub fn moment_map(h: Quaternion) -> MomentValue {
    let Quaternion { w, x, y, z } = h;
    MomentValue::new(
        0.5 * (w * w + x * x - y * y - z * z),
        x * y - w * z,
        x * z + w * y,
    )
}

/// Derivative of μ at `h` along `v`. μ is quadratic, so this is exact.
pub fn moment_diff(h: Quaternion, v: Quaternion) -> MomentValue {
    let Quaternion { w, x, y, z } = h;
    let Quaternion {
        w: dw,
        x: dx,
        y: dy,
        z: dz,
    } = v;
    MomentValue::new(
        w * dw + x * dx - y * dy - z * dz,
        dx * y + x * dy - dw * z - w * dz,
        dx * z + x * dz + dw * y + w * dy,
    )
}

/// Gradients of the three components of μ with respect to `(w, x, y, z)`.
pub fn moment_gradients(h: Quaternion) -> [Quaternion; 3] {
    let Quaternion { w, x, y, z } = h;
    [
        Quaternion::new(w, x, -y, -z),
        Quaternion::new(-z, y, x, -w),
        Quaternion::new(y, z, w, x),
    ]
}

/// `ω_ℍ(v, w) = ⟨i·v, w⟩`.
pub fn kahler_pairing(v: Quaternion, w: Quaternion) -> f64 {
    (Quaternion::I * v).dot(w)
}

/// Tangent vector at `h` generated by `ζ = ic`.
pub fn fundamental_field(c: f64, h: Quaternion) -> Quaternion {
    (Quaternion::I * h).scale(FUNDAMENTAL_FIELD_SIGN * c)
}

/// The scalar pairing `⟨δμ(h)(v), ic⟩ = (c/2)(v̄ h + h̄ v) = c·Re(h̄ v)`.
pub fn moment_pairing_scalar(c: f64, h: Quaternion, v: Quaternion) -> f64 {
    c * h.dot(v)
}
