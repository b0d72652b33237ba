//! Bernoulli numbers and the `1/S(ħ)` expansion.

use std::sync::Mutex;

use rug::{Integer, Rational};

use super::series::TruncatedSeries;
use super::factorial;

static CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Akiyama–Tanigawa, which yields `B_1 = +1/2`; the sign is fixed by the caller.
fn akiyama_tanigawa(m: usize) -> Rational {
    let mut a: Vec<Rational> = (0..=m).map(|j| Rational::from((1, j as u64 + 1))).collect();
    for k in 1..=m {
        for j in 0..=(m - k) {
            let diff = Rational::from(&a[j] - &a[j + 1]);
            a[j] = diff * Integer::from(j + 1);
        }
    }
    a.swap_remove(0)
}

/// The Bernoulli number `B_m` with the convention `B_1 = -1/2`.
///
/// Values are cached behind a mutex, so concurrent callers see one sequence.
pub fn bernoulli(m: usize) -> Rational {
    if m == 1 {
        return Rational::from((-1, 2));
    }
    if m % 2 == 1 {
        return Rational::new();
    }
    let mut cache = CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if cache.len() <= m {
        for k in cache.len()..=m {
            let b = if k % 2 == 1 && k > 1 { Rational::new() } else { akiyama_tanigawa(k) };
            cache.push(b);
        }
    }
    cache[m].clone()
}

/// The ħ-series of `1/S(ħ)` with `S(t) = (e^{t/2} - e^{-t/2})/t`, to order `T`.
pub fn s_inverse_series(truncation: usize) -> TruncatedSeries<Rational> {
    // S(t) = Σ_k (t/2)^{2k} / (2k+1)!
    let s = TruncatedSeries::from_fn(truncation, &(), |k| {
        if k % 2 == 1 {
            return Rational::new();
        }
        let den = factorial(k as u32 + 1) * (Integer::from(1) << k as u32);
        Rational::from((Integer::from(1), den))
    });
    s.inverse().expect("S(0) = 1")
}

/// `[ħ^{2g}] 1/S(ħ)^2 = -B_{2g} / ((2g-2)! · 2g)` for `g ≥ 1`, and 1 for `g = 0`.
pub fn inv_s_squared_coeff(g: usize) -> Rational {
    if g == 0 {
        return Rational::from(1);
    }
    let den = factorial(2 * g as u32 - 2) * Integer::from(2 * g);
    -bernoulli(2 * g) / den
}
