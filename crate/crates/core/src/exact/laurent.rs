//! Truncated Laurent series `Σ_{k ≥ v} c_k t^k + O(t^N)`.

use rug::Rational;

use super::{Field, TruncatedSeries};
use crate::error::{Error, Result};

/// A Laurent block: `t^valuation · series(t)`.
///
/// The stored series may have leading zeros; [`LaurentBlock::pole_order`] and
/// [`LaurentBlock::leading`] look past them. The block is known up to (but
/// excluding) `t^{precision()}`.
#[derive(Clone, Debug)]
pub struct LaurentBlock<F: Field> {
    valuation: i64,
    series: TruncatedSeries<F>,
}

impl<F: Field> LaurentBlock<F> {
    pub fn new(valuation: i64, series: TruncatedSeries<F>) -> Self {
        LaurentBlock { valuation, series }
    }

    pub fn from_series(series: TruncatedSeries<F>) -> Self {
        Self::new(0, series)
    }

    /// Builds from principal coefficients (ordered `t^{-p} .. t^{-1}`) and a regular part.
    pub fn from_parts(principal: Vec<F>, regular: TruncatedSeries<F>) -> Self {
        let p = principal.len();
        let ctx = regular.ctx().clone();
        let mut coeffs = principal;
        coeffs.extend(regular.coeffs().iter().cloned());
        let t = coeffs.len() - 1;
        Self::new(-(p as i64), TruncatedSeries::from_coeffs(coeffs, t, &ctx))
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn series(&self) -> &TruncatedSeries<F> {
        &self.series
    }

    pub fn ctx(&self) -> &F::Ctx {
        self.series.ctx()
    }

    /// Exponent of the first unknown term.
    pub fn precision(&self) -> i64 {
        self.valuation + self.series.truncation() as i64 + 1
    }

    /// Coefficient of `t^k`; `None` if `k` is at or past the precision.
    pub fn coeff(&self, k: i64) -> Option<F> {
        if k >= self.precision() {
            return None;
        }
        if k < self.valuation {
            return Some(F::zero(self.ctx()));
        }
        Some(self.series.coeffs()[(k - self.valuation) as usize].clone())
    }

    /// Exponent of the first nonzero coefficient, if any is known.
    pub fn leading(&self) -> Option<i64> {
        self.series.valuation().map(|k| self.valuation + k as i64)
    }

    pub fn pole_order(&self) -> usize {
        match self.leading() {
            Some(k) if k < 0 => (-k) as usize,
            _ => 0,
        }
    }

    pub fn residue(&self) -> Result<F> {
        self.coeff(-1)
            .ok_or_else(|| Error::MalformedSeries("residue requested beyond the known precision".into()))
    }

    /// Coefficients of `t^{-p} .. t^{-1}` with `p` the pole order.
    pub fn principal_part(&self) -> Vec<F> {
        let p = self.pole_order() as i64;
        (-p..0).map(|k| self.coeff(k).expect("principal part lies below precision")).collect()
    }

    /// The nonnegative-power part; empty (`None`) if the precision does not reach `t^0`.
    pub fn regular_part(&self) -> Option<TruncatedSeries<F>> {
        let n = self.precision();
        if n <= 0 {
            return None;
        }
        let ctx = self.ctx().clone();
        Some(TruncatedSeries::from_fn(n as usize - 1, &ctx, |k| self.coeff(k as i64).unwrap()))
    }

    /// Drops leading exact zeros so that the valuation is the true order.
    pub fn normalized(&self) -> Self {
        match self.series.valuation() {
            Some(0) | None => self.clone(),
            Some(k) => {
                let t = self.series.truncation() - k;
                let ctx = self.ctx().clone();
                let series = TruncatedSeries::from_fn(t, &ctx, |i| self.series.coeffs()[i + k].clone());
                Self::new(self.valuation + k as i64, series)
            }
        }
    }

    /// Re-truncates so that the block is known below `t^n` only.
    pub fn truncate_at(&self, n: i64) -> Self {
        if n >= self.precision() {
            return self.clone();
        }
        if n <= self.valuation {
            return Self::new(n - 1, TruncatedSeries::zero(0, self.ctx()));
        }
        Self::new(self.valuation, self.series.truncate((n - self.valuation - 1) as usize))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let v = self.valuation.min(rhs.valuation);
        let n = self.precision().min(rhs.precision());
        if n <= v {
            return Self::new(n - 1, TruncatedSeries::zero(0, self.ctx()));
        }
        let ctx = self.ctx().clone();
        let series = TruncatedSeries::from_fn((n - v - 1) as usize, &ctx, |k| {
            let e = v + k as i64;
            self.coeff(e).unwrap().add(&rhs.coeff(e).unwrap())
        });
        Self::new(v, series)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.valuation, self.series.neg())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(self.valuation + rhs.valuation, self.series.mul(&rhs.series))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.valuation, self.series.scale(c))
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        Self::new(self.valuation, self.series.scale_rational(q))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.valuation + k, self.series.clone())
    }

    /// Multiplicative inverse; the leading coefficient must be an exact nonzero.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.normalized();
        if n.series.valuation() != Some(0) {
            return Err(Error::MalformedSeries("inverse of a Laurent block with no known nonzero term".into()));
        }
        Ok(Self::new(-n.valuation, n.series.inverse()?))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    /// Termwise `d/dt`.
    pub fn derivative(&self) -> Self {
        let ctx = self.ctx().clone();
        let t = self.series.truncation();
        let series = TruncatedSeries::from_fn(t, &ctx, |k| {
            self.series.coeffs()[k].mul(&F::from_int(self.valuation + k as i64, &ctx))
        });
        Self::new(self.valuation - 1, series)
    }
}
