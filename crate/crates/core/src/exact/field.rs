//! Coefficient fields for formal series.
//!
//! Two fields are used: exact [`Rational`]s for the closed-form and residue
//! routes, and complex [`Ball`](super::Ball)s for the numeric recursion.

use std::fmt::Debug;

use rug::Rational;

/// Arithmetic a series coefficient must support.
///
/// Constructors take a context so that fields carrying a working precision
/// can produce constants at the right precision.
pub trait Field: Clone + Debug + Send + Sync {
    type Ctx: Clone + Debug + PartialEq + Send + Sync;

    fn context(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(q: &Rational, ctx: &Self::Ctx) -> Self;

    fn from_int(n: i64, ctx: &Self::Ctx) -> Self {
        Self::from_rational(&Rational::from(n), ctx)
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    /// Multiplicative inverse, or `None` when the value is (or may be) zero.
    fn inv(&self) -> Option<Self>;

    /// True only when the value is exactly zero.
    fn is_zero(&self) -> bool;

    /// True only when the value is exactly one.
    fn is_one(&self) -> bool;

    fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q, &self.context()))
    }

    fn div_int(&self, n: i64) -> Self {
        self.mul_rational(&Rational::from((1, n)))
    }
}

impl Field for Rational {
    type Ctx = ();

    fn context(&self) -> Self::Ctx {}

    fn zero(_: &()) -> Self {
        Rational::new()
    }

    fn one(_: &()) -> Self {
        Rational::from(1)
    }

    fn from_rational(q: &Rational, _: &()) -> Self {
        q.clone()
    }

    fn add(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }

    fn neg(&self) -> Self {
        Rational::from(-self)
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.clone().recip())
        }
    }

    fn is_zero(&self) -> bool {
        *self.numer() == 0
    }

    fn is_one(&self) -> bool {
        *self.numer() == 1 && *self.denom() == 1
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        Rational::from(self * q)
    }
}
