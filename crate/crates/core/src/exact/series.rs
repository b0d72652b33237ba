//! Truncated formal power series over a pluggable [`Field`].
//!
//! A series of truncation `T` stores the coefficients of `t^0 .. t^T` and
//! stands for `Σ c_k t^k + O(t^{T+1})`. Binary operations work at the
//! smaller of the two truncations; nothing is ever read past index `T`.

use rug::Rational;

use super::Field;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TruncatedSeries<F: Field> {
    coeffs: Vec<F>,
    ctx: F::Ctx,
}

impl<F: Field> TruncatedSeries<F> {
    /// Builds a series from `coeffs`, padded with zeros (or cut) to truncation `t`.
    pub fn from_coeffs(mut coeffs: Vec<F>, truncation: usize, ctx: &F::Ctx) -> Self {
        coeffs.resize(truncation + 1, F::zero(ctx));
        TruncatedSeries { coeffs, ctx: ctx.clone() }
    }

    pub fn zero(truncation: usize, ctx: &F::Ctx) -> Self {
        Self::from_coeffs(Vec::new(), truncation, ctx)
    }

    pub fn one(truncation: usize, ctx: &F::Ctx) -> Self {
        Self::constant(F::one(ctx), truncation)
    }

    pub fn constant(c: F, truncation: usize) -> Self {
        let ctx = c.context();
        Self::from_coeffs(vec![c], truncation, &ctx)
    }

    /// The series `t`.
    pub fn variable(truncation: usize, ctx: &F::Ctx) -> Self {
        let mut s = Self::zero(truncation, ctx);
        if truncation >= 1 {
            s.coeffs[1] = F::one(ctx);
        }
        s
    }

    /// The series `c · t^k`.
    pub fn monomial(c: F, k: usize, truncation: usize) -> Self {
        let ctx = c.context();
        let mut s = Self::zero(truncation, &ctx);
        if k <= truncation {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds `Σ f(k) t^k` for `k = 0..=truncation`.
    pub fn from_fn(truncation: usize, ctx: &F::Ctx, f: impl FnMut(usize) -> F) -> Self {
        let coeffs = (0..=truncation).map(f).collect();
        TruncatedSeries { coeffs, ctx: ctx.clone() }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `t^k`; `None` beyond the truncation.
    pub fn coeff(&self, k: usize) -> Option<&F> {
        self.coeffs.get(k)
    }

    pub fn constant_term(&self) -> &F {
        &self.coeffs[0]
    }

    pub fn set_coeff(&mut self, k: usize, c: F) {
        if k < self.coeffs.len() {
            self.coeffs[k] = c;
        }
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let t = truncation.min(self.truncation());
        TruncatedSeries { coeffs: self.coeffs[..=t].to_vec(), ctx: self.ctx.clone() }
    }

    /// Index of the first coefficient that is not exactly zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let t = self.truncation().min(rhs.truncation());
        Self::from_fn(t, &self.ctx, |k| self.coeffs[k].add(&rhs.coeffs[k]))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let t = self.truncation().min(rhs.truncation());
        Self::from_fn(t, &self.ctx, |k| self.coeffs[k].sub(&rhs.coeffs[k]))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.truncation(), &self.ctx, |k| self.coeffs[k].neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_fn(self.truncation(), &self.ctx, |k| self.coeffs[k].mul(c))
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        Self::from_fn(self.truncation(), &self.ctx, |k| self.coeffs[k].mul_rational(q))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let t = self.truncation().min(rhs.truncation());
        let mut out = vec![F::zero(&self.ctx); t + 1];
        for (i, a) in self.coeffs.iter().take(t + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(t + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        TruncatedSeries { coeffs: out, ctx: self.ctx.clone() }
    }

    /// Multiplies by `t^k`, keeping the truncation.
    pub fn shift_up(&self, k: usize) -> Self {
        Self::from_fn(self.truncation(), &self.ctx, |i| {
            if i >= k {
                self.coeffs[i - k].clone()
            } else {
                F::zero(&self.ctx)
            }
        })
    }

    /// Divides by `t^k`; the first `k` coefficients must be exactly zero.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.truncation() {
            return Err(Error::MalformedSeries(format!(
                "cannot divide a series of truncation {} by t^{k}",
                self.truncation()
            )));
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::MalformedSeries(format!("series is not divisible by t^{k}")));
        }
        Ok(TruncatedSeries { coeffs: self.coeffs[k..].to_vec(), ctx: self.ctx.clone() })
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let c0_inv = self.coeffs[0]
            .inv()
            .ok_or_else(|| Error::MalformedSeries("inverse of a series with zero constant term".into()))?;
        let t = self.truncation();
        let mut out: Vec<F> = Vec::with_capacity(t + 1);
        out.push(c0_inv.clone());
        for n in 1..=t {
            let mut acc = F::zero(&self.ctx);
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&out[n - k]));
            }
            out.push(acc.mul(&c0_inv).neg());
        }
        Ok(TruncatedSeries { coeffs: out, ctx: self.ctx.clone() })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }

    /// `self(inner(t))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::MalformedSeries("composition with an inner series of nonzero constant term".into()));
        }
        let t = self.truncation().min(inner.truncation());
        let inner = inner.truncate(t);
        let mut acc = Self::constant(self.coeffs[t].clone(), t);
        for k in (0..t).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Compositional inverse `r` with `self(r(t)) = t + O(t^{T+1})`.
    ///
    /// Requires zero constant term and an invertible linear coefficient.
    /// Uses Lagrange inversion: `[t^k] r = (1/k) [w^{k-1}] (w / s(w))^k`.
    pub fn reversion(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::MalformedSeries("reversion needs zero constant term".into()));
        }
        let t = self.truncation();
        if t == 0 {
            return Ok(Self::zero(0, &self.ctx));
        }
        if self.coeffs[1].inv().is_none() {
            return Err(Error::MalformedSeries("reversion needs an invertible linear coefficient".into()));
        }
        // s(w)/w, truncated so that its k-th power is known to w^{t-1}.
        let quotient = self.shift_down(1)?.truncate(t - 1);
        let phi = quotient.inverse()?;
        let mut out = Self::zero(t, &self.ctx);
        let mut power = Self::one(t - 1, &self.ctx);
        for k in 1..=t {
            power = power.mul(&phi);
            out.coeffs[k] = power.coeffs[k - 1].div_int(k as i64);
        }
        Ok(out)
    }

    pub fn derivative(&self) -> Self {
        let t = self.truncation();
        if t == 0 {
            return Self::zero(0, &self.ctx);
        }
        Self::from_fn(t - 1, &self.ctx, |k| self.coeffs[k + 1].mul(&F::from_int(k as i64 + 1, &self.ctx)))
    }

    /// Termwise antiderivative with zero constant term; truncation grows by one.
    pub fn integrate(&self) -> Self {
        let t = self.truncation();
        Self::from_fn(t + 1, &self.ctx, |k| {
            if k == 0 {
                F::zero(&self.ctx)
            } else {
                self.coeffs[k - 1].div_int(k as i64)
            }
        })
    }

    /// `exp(self)`; the constant term must be exactly zero.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::MalformedSeries("exp needs zero constant term".into()));
        }
        let t = self.truncation();
        let mut out: Vec<F> = Vec::with_capacity(t + 1);
        out.push(F::one(&self.ctx));
        for n in 1..=t {
            let mut acc = F::zero(&self.ctx);
            for k in 1..=n {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&out[n - k]).mul(&F::from_int(k as i64, &self.ctx)));
            }
            out.push(acc.div_int(n as i64));
        }
        Ok(TruncatedSeries { coeffs: out, ctx: self.ctx.clone() })
    }

    /// `log(self)`; the constant term must be exactly one.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::MalformedSeries("log needs unit constant term".into()));
        }
        let t = self.truncation();
        if t == 0 {
            return Ok(Self::zero(0, &self.ctx));
        }
        let quotient = self.derivative().mul(&self.truncate(t - 1).inverse()?);
        Ok(quotient.integrate())
    }

    /// `self^a` for rational `a`, defined through `exp(a log self)`.
    pub fn pow_rational(&self, a: &Rational) -> Result<Self> {
        self.log()?.scale_rational(a).exp()
    }

    pub fn pow_uint(&self, n: u32) -> Self {
        let mut result = Self::one(self.truncation(), &self.ctx);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

impl TruncatedSeries<Rational> {
    /// Coefficient-wise exact equality at the common truncation.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let t = self.truncation().min(other.truncation());
        self.coeffs[..=t] == other.coeffs[..=t]
    }

    pub fn from_rationals(coeffs: &[Rational], truncation: usize) -> Self {
        Self::from_coeffs(coeffs.to_vec(), truncation, &())
    }

    /// The exponential series `e^t`.
    pub fn exp_series(truncation: usize) -> Self {
        let mut fact = rug::Integer::from(1);
        Self::from_fn(truncation, &(), |k| {
            if k > 0 {
                fact *= k as u32;
            }
            Rational::from((rug::Integer::from(1), fact.clone()))
        })
    }
}
