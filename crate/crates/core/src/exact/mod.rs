//! Exact and ball arithmetic, formal series, Bernoulli numbers and monomials.

mod ball;
mod bernoulli;
mod field;
mod laurent;
mod monomial;
mod series;

pub use ball::{Ball, DEFAULT_PRECISION};
pub use bernoulli::{bernoulli, inv_s_squared_coeff, s_inverse_series};
pub use field::Field;
pub use laurent::LaurentBlock;
pub use monomial::Monomial;
pub use rug::{Integer, Rational};
pub use series::TruncatedSeries;

use crate::error::{Error, Result};

/// Parses a rational from its text form `p/q` or `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: Integer = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: Integer = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::from((n, d)))
    } else {
        let n: Integer = t.parse().map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
        Ok(Rational::from(n))
    }
}

/// `n!` as an integer.
pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}
