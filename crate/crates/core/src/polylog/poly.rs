//! Dense univariate polynomials with rational coefficients.

use std::fmt;

use rug::{Complex, Rational};

use crate::exact::{Ball, Field, TruncatedSeries};

/// `Σ c_k z^k`, coefficients stored low to high with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::from(1))
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Poly::new(vec![Rational::new(), Rational::from(1)])
    }

    /// `z - a`.
    pub fn linear(a: &Rational) -> Self {
        Poly::new(vec![Rational::from(-a), Rational::from(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| Rational::from(x * c)).collect())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| Rational::from(c * k as u32)).collect())
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    pub fn eval_ball(&self, z: &Ball) -> Ball {
        let prec = z.prec();
        let mut acc = Ball::zero(&prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&Ball::from_rational(c, &prec));
        }
        acc
    }

    /// Division with remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); n - dd];
        for k in (0..n - dd).rev() {
            let c = Rational::from(&r[k + dd] * &lead_inv);
            if c != 0 {
                for (i, di) in d.coeffs.iter().enumerate() {
                    r[k + i] -= Rational::from(&c * di);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Exact quotient by `z - a`, or `None` if `a` is not a root.
    pub fn div_linear(&self, a: &Rational) -> Option<Poly> {
        let (q, r) = self.divrem(&Poly::linear(a));
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// `p(c·z)`.
    pub fn scale_argument(&self, c: &Rational) -> Poly {
        let mut pw = Rational::from(1);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for x in &self.coeffs {
            out.push(Rational::from(x * &pw));
            pw *= c;
        }
        Poly::new(out)
    }

    /// Coefficients of `p(a + t)` in `t`.
    pub fn taylor_shift(&self, a: &Rational) -> Poly {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let add = Rational::from(&c[k + 1] * a);
                c[k] += add;
            }
        }
        Poly::new(c)
    }

    /// `p(a + t)` as a truncated series over balls.
    pub fn taylor_shift_ball(&self, a: &Ball, truncation: usize) -> TruncatedSeries<Ball> {
        let prec = a.prec();
        let mut c: Vec<Ball> = self.coeffs.iter().map(|x| Ball::from_rational(x, &prec)).collect();
        let n = c.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let add = c[k + 1].mul(a);
                c[k] = c[k].add(&add);
            }
        }
        TruncatedSeries::from_coeffs(c, truncation, &prec)
    }

    /// Coefficients as `f64`, low to high.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Value and first derivative at a complex point, by Horner.
    pub fn eval_with_derivative(&self, z: &Complex) -> (Complex, Complex) {
        let prec = z.prec();
        let mut p = Complex::new(prec);
        let mut dp = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            dp *= z;
            dp += &p;
            p *= z;
            p += c;
        }
        (p, dp)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, abs == 1) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => f.write_str("z")?,
                (1, false) => write!(f, "{abs}*z")?,
                (_, true) => write!(f, "z^{k}")?,
                (_, false) => write!(f, "{abs}*z^{k}")?,
            }
        }
        Ok(())
    }
}
