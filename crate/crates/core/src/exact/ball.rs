//! Complex balls: an arbitrary-precision complex midpoint with an error radius.
//!
//! The radius is an `f64` upper bound propagated through every operation.
//! Rounding of the midpoint is accounted for by adding one unit in the last
//! place of the result; radius arithmetic is inflated slightly to stay an
//! upper bound under `f64` rounding.

use std::fmt;

use rug::float::Round;
use rug::{Complex, Float, Rational};

use super::Field;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

const INFLATE: f64 = 1.0 + 4.0 * f64::EPSILON;

#[derive(Clone, Debug)]
pub struct Ball {
    mid: Complex,
    rad: f64,
}

fn abs_upper(z: &Complex) -> f64 {
    let re = z.real().to_f64_round(Round::Up).abs();
    let im = z.imag().to_f64_round(Round::Up).abs();
    (re + im) * INFLATE
}

fn ulp(z: &Complex) -> f64 {
    let prec = z.prec().0 as i32;
    abs_upper(z) * 2f64.powi(1 - prec)
}

impl Ball {
    pub fn new(mid: Complex, rad: f64) -> Self {
        Ball { mid, rad }
    }

    pub fn exact(mid: Complex) -> Self {
        Ball { mid, rad: 0.0 }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Ball::exact(Complex::with_val(prec, (re, im)))
    }

    pub fn from_parts(re: &Rational, im: &Rational, prec: u32) -> Self {
        let mid = Complex::with_val(prec, (Float::with_val(prec, re), Float::with_val(prec, im)));
        let rad = ulp(&mid);
        Ball { mid, rad }
    }

    pub fn mid(&self) -> &Complex {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec().0
    }

    pub fn real(&self) -> &Float {
        self.mid.real()
    }

    pub fn imag(&self) -> &Float {
        self.mid.imag()
    }

    /// Upper bound on `|self|` over the whole ball.
    pub fn abs_upper(&self) -> f64 {
        abs_upper(&self.mid) + self.rad
    }

    /// Lower bound on `|self|` over the whole ball (zero if the ball contains zero).
    pub fn abs_lower(&self) -> f64 {
        let re = self.mid.real().to_f64().abs();
        let im = self.mid.imag().to_f64().abs();
        let m = re.hypot(im) * (1.0 - 4.0 * f64::EPSILON);
        (m - self.rad).max(0.0)
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0.0
    }

    /// Midpoint modulus as an `f64`.
    pub fn abs_f64(&self) -> f64 {
        let re = self.mid.real().to_f64();
        let im = self.mid.imag().to_f64();
        re.hypot(im)
    }

    pub fn with_radius(mut self, extra: f64) -> Self {
        self.rad = (self.rad + extra) * INFLATE;
        self
    }

    /// Principal branch of the logarithm.
    pub fn ln(&self) -> Option<Ball> {
        let lower = self.abs_lower();
        if lower == 0.0 {
            return None;
        }
        let mid = Complex::with_val(self.prec(), self.mid.ln_ref());
        // |log(z + e) - log z| <= |e| / (|z| - |e|) away from the branch cut.
        let rad = (self.rad / lower + ulp(&mid)) * INFLATE;
        Some(Ball { mid, rad })
    }

    pub fn sqrt(&self) -> Option<Ball> {
        let lower = self.abs_lower();
        if lower == 0.0 {
            return None;
        }
        let mid = Complex::with_val(self.prec(), self.mid.sqrt_ref());
        let rad = (self.rad / lower.sqrt() + ulp(&mid)) * INFLATE;
        Some(Ball { mid, rad })
    }

    /// Midpoint distance, as an `f64`.
    pub fn dist(&self, other: &Ball) -> f64 {
        self.sub(other).abs_f64()
    }

    /// Lexicographic comparison of midpoints by (real, imaginary).
    pub fn cmp_mid(&self, other: &Ball) -> std::cmp::Ordering {
        self.mid
            .real()
            .partial_cmp(other.mid.real())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                self.mid
                    .imag()
                    .partial_cmp(other.mid.imag())
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let re = self.mid.real().to_string_radix(10, Some(digits));
        let im = self.mid.imag();
        if im.is_zero() && self.rad == 0.0 {
            return re;
        }
        let im_str = im.to_string_radix(10, Some(digits));
        if let Some(abs) = im_str.strip_prefix('-') {
            format!("{re} - {abs}i")
        } else {
            format!("{re} + {im_str}i")
        }
    }
}

impl Ball {
    /// Real part with an error bound covering the radius and the imaginary part.
    pub fn real_with_bound(&self, digits: usize) -> String {
        let re = self.mid.real().to_string_radix(10, Some(digits));
        let im = self.mid.imag().to_f64().abs();
        format!("{re} +/- {:.3e}", self.rad + im)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} +/- {:.3e}", self.to_decimal(30), self.rad)
    }
}

impl Field for Ball {
    type Ctx = u32;

    fn context(&self) -> u32 {
        self.prec()
    }

    fn zero(prec: &u32) -> Self {
        Ball::exact(Complex::new(*prec))
    }

    fn one(prec: &u32) -> Self {
        Ball::exact(Complex::with_val(*prec, 1))
    }

    fn from_rational(q: &Rational, prec: &u32) -> Self {
        let re = Float::with_val(*prec, q);
        let mid = Complex::with_val(*prec, (re, 0));
        let rad = if *q.denom() == 1 && q.numer().significant_bits() <= *prec {
            0.0
        } else {
            ulp(&mid)
        };
        Ball { mid, rad }
    }

    fn from_int(n: i64, prec: &u32) -> Self {
        Ball::exact(Complex::with_val(*prec, n))
    }

    fn add(&self, rhs: &Self) -> Self {
        let mid = Complex::with_val(self.prec(), &self.mid + &rhs.mid);
        let rad = (self.rad + rhs.rad + ulp(&mid)) * INFLATE;
        Ball { mid, rad }
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mid = Complex::with_val(self.prec(), &self.mid - &rhs.mid);
        let rad = (self.rad + rhs.rad + ulp(&mid)) * INFLATE;
        Ball { mid, rad }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mid = Complex::with_val(self.prec(), &self.mid * &rhs.mid);
        let rad = if self.rad == 0.0 && rhs.rad == 0.0 {
            ulp(&mid)
        } else {
            abs_upper(&self.mid) * rhs.rad + abs_upper(&rhs.mid) * self.rad + self.rad * rhs.rad + ulp(&mid)
        };
        Ball { mid, rad: rad * INFLATE }
    }

    fn neg(&self) -> Self {
        Ball { mid: Complex::with_val(self.prec(), -&self.mid), rad: self.rad }
    }

    fn inv(&self) -> Option<Self> {
        let lower = self.abs_lower();
        if lower == 0.0 {
            return None;
        }
        let mid = Complex::with_val(self.prec(), self.mid.recip_ref());
        let m = self.abs_f64();
        let rad = (self.rad / (m * lower) + ulp(&mid)) * INFLATE;
        Some(Ball { mid, rad })
    }

    fn is_zero(&self) -> bool {
        self.rad == 0.0 && self.mid.real().is_zero() && self.mid.imag().is_zero()
    }

    fn is_one(&self) -> bool {
        self.rad == 0.0 && *self.mid.real() == 1 && self.mid.imag().is_zero()
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        if *q.denom() == 1 {
            let mid = Complex::with_val(self.prec(), &self.mid * q.numer());
            let rad = (self.rad * q.numer().to_f64().abs() + ulp(&mid)) * INFLATE;
            return Ball { mid, rad };
        }
        self.mul(&Ball::from_rational(q, &self.prec()))
    }

    fn div_int(&self, n: i64) -> Self {
        let mid = Complex::with_val(self.prec(), &self.mid / n);
        let rad = (self.rad / (n as f64).abs() + ulp(&mid)) * INFLATE;
        Ball { mid, rad }
    }
}
