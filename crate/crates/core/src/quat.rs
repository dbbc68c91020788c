//! Quaternion values, the Pauli-matrix embedding into `M_2(C)` and the
//! transcendental functions `exp`, `sin`, `cos`.
//!
//! The closed forms below agree with the matrix power series evaluated on the
//! embedded quaternion (see [`series_oracle`]). With `rho = |imag(q)|` and unit
//! imaginary direction `u`:
//!
//! ```text
//! exp(q) = e^w (cos rho + sin rho * u)
//! sin(q) = sin w cosh rho + cos w sinh rho * u
//! cos(q) = cos w cosh rho - sin w sinh rho * u
//! ```
//!
//! Note the minus sign in `cos`: it is what the series produces, mirroring
//! `cos(a + ib) = cos a cosh b - i sin a sinh b` for complex arguments.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
// redundant when std is linked into the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Below this argument the `x -> sinh(x)/x` and `x -> sin(x)/x` factors switch
/// to their Taylor expansions.
pub const SMALL_ARG: f64 = 1e-4;

/// Maximum entry deviation tolerated by [`unembed`].
pub const TOL_EMBED: f64 = 1e-10;

/// `sinh(v) / v`, exact at `v = 0`.
#[inline]
pub fn sinhc(v: f64) -> f64 {
    if v.abs() < SMALL_ARG {
        let v2 = v * v;
        1.0 + v2 / 6.0 * (1.0 + v2 / 20.0 * (1.0 + v2 / 42.0))
    } else {
        v.sinh() / v
    }
}

/// `sin(v) / v`, exact at `v = 0`.
#[inline]
pub fn sinc(v: f64) -> f64 {
    if v.abs() < SMALL_ARG {
        let v2 = v * v;
        1.0 - v2 / 6.0 * (1.0 - v2 / 20.0 * (1.0 - v2 / 42.0))
    } else {
        v.sin() / v
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
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

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Length of the imaginary part, `sqrt(x^2 + y^2 + z^2)`.
    pub fn imag_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    fn with_imag_scaled(real: f64, imag_factor: f64, q: Self) -> Self {
        Self::new(real, imag_factor * q.x, imag_factor * q.y, imag_factor * q.z)
    }

    pub fn exp(self) -> Self {
        let rho = self.imag_norm();
        let ew = self.w.exp();
        Self::with_imag_scaled(ew * rho.cos(), ew * sinc(rho), self)
    }

    pub fn sin(self) -> Self {
        let rho = self.imag_norm();
        let (sw, cw) = self.w.sin_cos();
        Self::with_imag_scaled(sw * rho.cosh(), cw * sinhc(rho), self)
    }

    pub fn cos(self) -> Self {
        let rho = self.imag_norm();
        let (sw, cw) = self.w.sin_cos();
        Self::with_imag_scaled(cw * rho.cosh(), -sw * sinhc(rho), self)
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.w - other.w)
            .abs()
            .max((self.x - other.x).abs())
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

/// Hamilton product (`i^2 = j^2 = k^2 = ijk = -1`).
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let (a, b) = (self, r);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

pub fn quat_exp(q: Quaternion) -> Quaternion {
    q.exp()
}

pub fn quat_sin(q: Quaternion) -> Quaternion {
    q.sin()
}

pub fn quat_cos(q: Quaternion) -> Quaternion {
    q.cos()
}

/// Row-major complex 2x2 matrix `((a, b), (c, d))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex2x2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Complex2x2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn zero() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(zero, zero, zero, zero)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Largest deviation from the membership conditions `a = conj(d)`,
    /// `b = -conj(c)`.
    pub fn membership_deviation(&self) -> f64 {
        let e1 = (self.a - self.d.conj()).norm();
        let e2 = (self.b + self.c.conj()).norm();
        e1.max(e2)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a - other.a)
            .norm()
            .max((self.b - other.b).norm())
            .max((self.c - other.c).norm())
            .max((self.d - other.d).norm())
    }
}

impl Add for Complex2x2 {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self::new(self.a + r.a, self.b + r.b, self.c + r.c, self.d + r.d)
    }
}

impl Mul for Complex2x2 {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.a * r.a + self.b * r.c,
            self.a * r.b + self.b * r.d,
            self.c * r.a + self.d * r.c,
            self.c * r.b + self.d * r.d,
        )
    }
}

/// `1 -> I`, `i -> -i sigma_x`, `j -> -i sigma_y`, `k -> -i sigma_z`.
pub fn embed(q: Quaternion) -> Complex2x2 {
    Complex2x2::new(
        Complex64::new(q.w, -q.z),
        Complex64::new(-q.y, -q.x),
        Complex64::new(q.y, -q.x),
        Complex64::new(q.w, q.z),
    )
}

/// Inverse of [`embed`]. Entries are averaged over their paired positions,
/// which is exact on the image of the embedding.
pub fn unembed(m: &Complex2x2) -> Result<Quaternion> {
    let deviation = m.membership_deviation();
    if !(deviation <= TOL_EMBED) {
        return Err(Error::NotInM { deviation });
    }
    Ok(Quaternion::new(
        0.5 * (m.a.re + m.d.re),
        -0.5 * (m.b.im + m.c.im),
        0.5 * (m.c.re - m.b.re),
        0.5 * (m.d.im - m.a.im),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesFn {
    Exp,
    Sin,
    Cos,
}

/// Partial sum of the matrix power series of `func` on `embed(q)`, mapped
/// back to a quaternion. `terms` counts nonzero series terms, so for `Sin`
/// the highest power is `2 * terms - 1`.
///
/// For `|q| <= 4` thirty terms leave a truncation error below `4^30 / 30!`
/// (about `4e-15`).
pub fn series_oracle(q: Quaternion, func: SeriesFn, terms: usize) -> Result<Quaternion> {
    if terms == 0 {
        return Err(Error::InvalidArgument("series needs at least one term"));
    }
    let a = embed(q);
    let a2 = a * a;
    let (mut term, mut sum) = match func {
        SeriesFn::Exp | SeriesFn::Cos => (Complex2x2::identity(), Complex2x2::identity()),
        SeriesFn::Sin => (a, a),
    };
    for n in 1..terms {
        term = match func {
            SeriesFn::Exp => (term * a).scale(1.0 / n as f64),
            SeriesFn::Sin => {
                let k = 2 * n as u64;
                (term * a2).scale(-1.0 / ((k * (k + 1)) as f64))
            }
            SeriesFn::Cos => {
                let k = 2 * n as u64;
                (term * a2).scale(-1.0 / (((k - 1) * k) as f64))
            }
        };
        sum = sum + term;
    }
    unembed(&sum)
}
