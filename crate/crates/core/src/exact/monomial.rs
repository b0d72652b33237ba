//! Monomials in named Kähler variables, e.g. `Q1^2*Q3`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent vector over variable names. Zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    exps: BTreeMap<String, i64>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(name: &str) -> Self {
        Monomial::one().with(name, 1)
    }

    fn with(mut self, name: &str, e: i64) -> Self {
        let entry = self.exps.entry(name.to_string()).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.exps.remove(name);
        }
        self
    }

    pub fn from_exponents<I: IntoIterator<Item = (String, i64)>>(it: I) -> Self {
        it.into_iter().fold(Monomial::one(), |m, (k, e)| m.with(&k, e))
    }

    pub fn exponents(&self) -> &BTreeMap<String, i64> {
        &self.exps
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.exps.get(name).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> i64 {
        self.exps.values().sum()
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        rhs.exps.iter().fold(self.clone(), |m, (k, &e)| m.with(k, e))
    }

    pub fn inv(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|(k, &e)| (k.clone(), -e)).collect() }
    }

    pub fn div(&self, rhs: &Monomial) -> Monomial {
        self.mul(&rhs.inv())
    }

    pub fn pow(&self, n: i64) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial { exps: self.exps.iter().map(|(k, &e)| (k.clone(), e * n)).collect() }
    }

    /// Representative of `{m, 1/m}` whose first nonzero exponent (in name order) is positive.
    pub fn normalize_ratio(&self) -> Monomial {
        match self.exps.values().next() {
            Some(&e) if e < 0 => self.inv(),
            _ => self.clone(),
        }
    }

    /// Evaluates at the given variable values.
    pub fn eval(&self, values: &BTreeMap<String, rug::Rational>) -> Result<rug::Rational> {
        let mut acc = rug::Rational::from(1);
        for (k, &e) in &self.exps {
            let v = values
                .get(k)
                .ok_or_else(|| Error::Invalid(format!("no value assigned to Kähler variable {k}")))?;
            if *v == 0 && e < 0 {
                return Err(Error::Pole(format!("{k} = 0 raised to {e}")));
            }
            let p = rug::ops::Pow::pow(v.clone(), e.unsigned_abs() as u32);
            acc *= if e < 0 { p.recip() } else { p };
        }
        Ok(acc)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(k, &e)| if e == 1 { k.clone() } else { format!("{k}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "1" {
            return Ok(Monomial::one());
        }
        let mut m = Monomial::one();
        for factor in t.split('*') {
            let factor = factor.trim();
            let (name, e) = match factor.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
                    (n.trim(), e)
                }
                None => (factor, 1),
            };
            let valid = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Parse(format!("bad variable name {name:?} in {s:?}")));
            }
            m = m.with(name, e);
        }
        Ok(m)
    }
}
