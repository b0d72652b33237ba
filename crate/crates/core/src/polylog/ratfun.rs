//! Rational functions whose poles are rational points.
//!
//! Every denominator met in this crate splits into linear factors over the
//! rationals (`z`, `z - 1/α_i`, `z - 1/β_j`), so the denominator is stored as
//! a multiset of roots. Reduction is then exact and cheap: cancel `z - a`
//! from the numerator while it vanishes at `a`.

use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

use super::Poly;
use crate::error::{Error, Result};
use crate::exact::{Ball, Field, LaurentBlock, TruncatedSeries};

/// `numer(z) / ∏_a (z - a)^{m_a}`, always reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    numer: Poly,
    poles: BTreeMap<Rational, u32>,
}

impl RationalFunction {
    /// Builds and reduces `numer / ∏ (z - a)^m`.
    pub fn new(numer: Poly, poles: BTreeMap<Rational, u32>) -> Self {
        let mut numer = numer;
        let mut poles = poles;
        if numer.is_zero() {
            poles.clear();
        }
        for (a, m) in poles.iter_mut() {
            while *m > 0 {
                match numer.div_linear(a) {
                    Some(q) => {
                        numer = q;
                        *m -= 1;
                    }
                    None => break,
                }
            }
        }
        poles.retain(|_, m| *m > 0);
        RationalFunction { numer, poles }
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction { numer: p, poles: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    /// `c / (z - a)^m`.
    pub fn pole(c: Rational, a: Rational, m: u32) -> Self {
        Self::new(Poly::constant(c), BTreeMap::from([(a, m)]))
    }

    pub fn numerator(&self) -> &Poly {
        &self.numer
    }

    /// Expanded monic denominator.
    pub fn denominator(&self) -> Poly {
        self.poles.iter().fold(Poly::one(), |acc, (a, &m)| acc.mul(&Poly::linear(a).pow(m)))
    }

    /// Finite poles with their orders.
    pub fn poles(&self) -> &BTreeMap<Rational, u32> {
        &self.poles
    }

    pub fn pole_order_at(&self, a: &Rational) -> u32 {
        self.poles.get(a).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    fn lift(&self, poles: &BTreeMap<Rational, u32>) -> Poly {
        let mut n = self.numer.clone();
        for (a, &m) in poles {
            let extra = m - self.pole_order_at(a);
            if extra > 0 {
                n = n.mul(&Poly::linear(a).pow(extra));
            }
        }
        n
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut poles = self.poles.clone();
        for (a, &m) in &rhs.poles {
            let e = poles.entry(a.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let numer = self.lift(&poles).add(&rhs.lift(&poles));
        Self::new(numer, poles)
    }

    pub fn neg(&self) -> Self {
        RationalFunction { numer: self.numer.neg(), poles: self.poles.clone() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut poles = self.poles.clone();
        for (a, &m) in &rhs.poles {
            *poles.entry(a.clone()).or_insert(0) += m;
        }
        Self::new(self.numer.mul(&rhs.numer), poles)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.numer.scale(c), self.poles.clone())
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        // (N ∏(z-a)^{-m})' over ∏(z-a)^{m+1}
        let base = self.denominator_radical();
        let mut numer = self.numer.derivative().mul(&base);
        for (a, &m) in &self.poles {
            let others = base.divrem(&Poly::linear(a)).0;
            numer = numer.sub(&self.numer.mul(&others).scale(&Rational::from(m)));
        }
        let poles = self.poles.iter().map(|(a, &m)| (a.clone(), m + 1)).collect();
        Self::new(numer, poles)
    }

    fn denominator_radical(&self) -> Poly {
        self.poles.keys().fold(Poly::one(), |acc, a| acc.mul(&Poly::linear(a)))
    }

    /// `z · d/dz`.
    pub fn theta(&self) -> Self {
        self.derivative().mul(&Self::from_poly(Poly::z()))
    }

    pub fn mul_z(&self) -> Self {
        self.mul(&Self::from_poly(Poly::z()))
    }

    pub fn div_z(&self) -> Self {
        self.mul(&Self::pole(Rational::from(1), Rational::new(), 1))
    }

    /// `f(c·z)` for `c ≠ 0`.
    pub fn scale_argument(&self, c: &Rational) -> Self {
        assert!(*c != 0, "scale_argument by zero");
        // (c z - a)^m = c^m (z - a/c)^m
        let mut numer = self.numer.scale_argument(c);
        let mut poles = BTreeMap::new();
        for (a, &m) in &self.poles {
            let c_m = rug::ops::Pow::pow(c.clone(), m);
            numer = numer.scale(&c_m.recip());
            poles.insert(Rational::from(a / c), m);
        }
        Self::new(numer, poles)
    }

    pub fn eval(&self, z: &Rational) -> Result<Rational> {
        if self.poles.contains_key(z) {
            return Err(Error::Pole(format!("evaluation at the pole z = {z}")));
        }
        let mut v = self.numer.eval(z);
        for (a, &m) in &self.poles {
            let d = rug::ops::Pow::pow(Rational::from(z - a), m);
            v /= d;
        }
        Ok(v)
    }

    pub fn eval_ball(&self, z: &Ball) -> Result<Ball> {
        let prec = z.prec();
        let mut v = self.numer.eval_ball(z);
        for (a, &m) in &self.poles {
            let d = z.sub(&Ball::from_rational(a, &prec));
            let inv = d.inv().ok_or_else(|| Error::Pole(format!("evaluation within error of the pole z = {a}")))?;
            for _ in 0..m {
                v = v.mul(&inv);
            }
        }
        Ok(v)
    }

    /// Laurent expansion in `t = z - p`, known below `t^{precision}`.
    pub fn laurent_at(&self, p: &Rational, precision: i64) -> LaurentBlock<Rational> {
        let m = self.pole_order_at(p) as i64;
        let len = precision + m;
        if len <= 0 {
            return LaurentBlock::new(precision - 1, TruncatedSeries::zero(0, &()));
        }
        let t = (len - 1) as usize;
        let shifted = self.numer.taylor_shift(p);
        let mut s = TruncatedSeries::from_rationals(shifted.coeffs(), t);
        for (a, &k) in &self.poles {
            if a == p {
                continue;
            }
            // (p - a + t)^{-k}
            let lin = TruncatedSeries::from_rationals(&[Rational::from(p - a), Rational::from(1)], t);
            let inv = lin.inverse().expect("distinct pole");
            s = s.mul(&inv.pow_uint(k));
        }
        LaurentBlock::new(-m, s)
    }

    /// `f(p + t)` as a ball series for a point `p` away from every pole.
    pub fn expand_ball(&self, p: &Ball, truncation: usize) -> Result<TruncatedSeries<Ball>> {
        let prec = p.prec();
        let mut s = self.numer.taylor_shift_ball(p, truncation);
        for (a, &k) in &self.poles {
            let d = p.sub(&Ball::from_rational(a, &prec));
            let lin = TruncatedSeries::from_coeffs(vec![d, Ball::one(&prec)], truncation, &prec);
            let inv = lin
                .inverse()
                .map_err(|_| Error::Pole(format!("expansion point within error of the pole z = {a}")))?;
            s = s.mul(&inv.pow_uint(k));
        }
        Ok(s)
    }

    pub fn residue_at(&self, a: &Rational) -> Rational {
        if !self.poles.contains_key(a) {
            return Rational::new();
        }
        self.laurent_at(a, 0).coeff(-1).unwrap()
    }

    /// Residue of `f(z) dz` at infinity.
    pub fn residue_at_infinity(&self) -> Rational {
        // f = q + r/D with deg r < deg D; only r/D contributes, via -lc(r) when deg r = deg D - 1.
        let d = self.denominator();
        let (_, r) = self.numer.divrem(&d);
        match (r.degree(), d.degree()) {
            (Some(dr), Some(dd)) if dr + 1 == dd => Rational::from(-&r.leading()),
            _ => Rational::new(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poles.is_empty() {
            return write!(f, "{}", self.numer);
        }
        write!(f, "({}) / ({})", self.numer, self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn reduction_cancels_common_roots() {
        // (z^2 - 1)/(z - 1) = z + 1
        let f = RationalFunction::new(
            Poly::new(vec![q(-1, 1), q(0, 1), q(1, 1)]),
            BTreeMap::from([(q(1, 1), 1)]),
        );
        assert!(f.poles().is_empty());
        assert_eq!(f.numerator(), &Poly::new(vec![q(1, 1), q(1, 1)]));
    }

    #[test]
    fn sum_of_partial_fractions_has_zero_total_residue() {
        let f = RationalFunction::pole(q(3, 1), q(1, 2), 2).add(&RationalFunction::pole(q(-2, 1), q(5, 1), 1));
        let total: Rational = f.poles().keys().map(|a| f.residue_at(a)).sum::<Rational>() + f.residue_at_infinity();
        assert_eq!(total, 0);
        assert_eq!(f.residue_at(&q(5, 1)), -2);
        assert_eq!(f.residue_at_infinity(), 2);
    }

    #[test]
    fn derivative_against_difference_quotient_oracle() {
        let f = RationalFunction::pole(q(1, 1), q(1, 1), 2).mul_z();
        let d = f.derivative();
        // exact oracle: d/dz z/(z-1)^2 = -(z+1)/(z-1)^3
        for x in [q(3, 1), q(-1, 2), q(7, 5)] {
            let cube: Rational = rug::ops::Pow::pow(Rational::from(&x - 1), 3u32);
            let want = -(x.clone() + 1u32) / cube;
            assert_eq!(d.eval(&x).unwrap(), want);
        }
    }

    #[test]
    fn laurent_matches_partial_fraction() {
        let f = RationalFunction::pole(q(2, 1), q(1, 1), 3).add(&RationalFunction::pole(q(1, 1), q(0, 1), 1));
        let l = f.laurent_at(&q(1, 1), 3);
        assert_eq!(l.coeff(-3).unwrap(), 2);
        assert_eq!(l.coeff(-2).unwrap(), 0);
        // 1/(1+t) = 1 - t + t^2
        assert_eq!(l.coeff(0).unwrap(), 1);
        assert_eq!(l.coeff(1).unwrap(), -1);
        assert_eq!(l.coeff(2).unwrap(), 1);
        assert!(l.coeff(3).is_none());
    }

    #[test]
    fn scaled_argument() {
        let f = RationalFunction::pole(q(1, 1), q(1, 1), 1).mul_z(); // z/(z-1)
        let g = f.scale_argument(&q(1, 2));
        for x in [q(3, 1), q(-5, 7)] {
            assert_eq!(g.eval(&x).unwrap(), f.eval(&(x.clone() / 2)).unwrap());
        }
        assert!(g.eval(&q(2, 1)).is_err());
    }
}
