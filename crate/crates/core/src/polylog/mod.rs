//! Polylogarithms of non-positive integer order as exact rational functions.

mod poly;
mod ratfun;

use std::sync::Mutex;

pub use poly::Poly;
pub use ratfun::RationalFunction;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, LaurentBlock, TruncatedSeries};

/// `Li_{-n}` realized as a rational function of `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegPolylog {
    order: u32,
    realization: RationalFunction,
}

impl NegPolylog {
    /// `n` such that this is `Li_{-n}`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn realization(&self) -> &RationalFunction {
        &self.realization
    }

    /// `Li_{-n}(c·z)` as a rational function of `z`.
    pub fn at_scaled(&self, c: &Rational) -> RationalFunction {
        if *c == 0 {
            return RationalFunction::zero();
        }
        self.realization.scale_argument(c)
    }

    pub fn eval(&self, z: &Rational) -> Result<Rational> {
        self.realization.eval(z)
    }
}

static REALIZATIONS: Mutex<Vec<NegPolylog>> = Mutex::new(Vec::new());

/// Rational-function realization of `Li_{-n}`, built by `Li_{-n} = z d/dz Li_{-n+1}`
/// from `Li_0 = z/(1-z)`. Realizations are cached.
pub fn li_neg_rational(n: u32) -> NegPolylog {
    let mut cache = REALIZATIONS.lock().unwrap_or_else(|e| e.into_inner());
    if cache.is_empty() {
        // z/(1-z) = -z/(z-1)
        let li0 = RationalFunction::pole(Rational::from(-1), Rational::from(1), 1).mul_z();
        cache.push(NegPolylog { order: 0, realization: li0 });
    }
    while cache.len() <= n as usize {
        let prev = cache.last().unwrap();
        let next = NegPolylog { order: prev.order + 1, realization: prev.realization.theta() };
        cache.push(next);
    }
    cache[n as usize].clone()
}

/// Exact value of `Li_{-n}(z)`.
pub fn li_neg(n: u32, z: &Rational) -> Result<Rational> {
    if *z == 1 {
        return Err(Error::Pole(format!("Li_{{-{n}}} has a pole at z = 1")));
    }
    li_neg_rational(n).eval(z)
}

/// Expansion of `Li_{-n}(e^μ)` in `μ`, through `μ^T`:
/// `n!/(-μ)^{n+1} - Σ_{k=0}^{T} B_{k+n+1} μ^k / (k! (k+n+1))`.
pub fn li_neg_at_exp(n: u32, truncation: usize) -> LaurentBlock<Rational> {
    let pole = n as usize + 1;
    let mut coeffs = vec![Rational::new(); pole + truncation + 1];
    let lead = Rational::from(factorial(n));
    coeffs[0] = if pole.is_multiple_of(2) { lead } else { -lead };
    for k in 0..=truncation {
        let den = factorial(k as u32) * Integer::from(k + pole);
        coeffs[pole + k] = -bernoulli(k + pole) / den;
    }
    let t = coeffs.len() - 1;
    LaurentBlock::new(-(pole as i64), TruncatedSeries::from_rationals(&coeffs, t))
}

/// `log(1 + c·t)` as a rational series.
pub fn log_one_plus(c: &Rational, truncation: usize) -> TruncatedSeries<Rational> {
    let mut pw = Rational::from(1);
    TruncatedSeries::from_fn(truncation, &(), |k| {
        if k == 0 {
            return Rational::new();
        }
        pw *= c;
        let v = Rational::from(&pw / Integer::from(k));
        if k % 2 == 0 {
            -v
        } else {
            v
        }
    })
}
