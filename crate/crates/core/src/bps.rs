//! GV signs, 5D BPS index tables, and the DT/GV product formula for the
//! partition function, with an exact bridge back to the free energies.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::exact::{bernoulli, s_inverse_series, Monomial};
use crate::free_energy::{closed_form_terms, constant_map_term, kappa, li_pairs};
use crate::polylog::li_neg_rational;
use crate::strip::{Param, StripGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChargeKind {
    D0Tower,
    D2Bound,
    D2barBound,
}

impl ChargeKind {
    pub fn name(self) -> &'static str {
        match self {
            ChargeKind::D0Tower => "D0",
            ChargeKind::D2Bound => "D2",
            ChargeKind::D2barBound => "D2bar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShiftSign {
    Plus,
    Minus,
}

/// A tower of charges: `nD0`, `D2_ρ - kD0` or `D2bar_ρ - kD0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChargeClass {
    pub kind: ChargeKind,
    pub curve_class: Monomial,
    pub shift: ShiftSign,
}

impl ChargeClass {
    pub fn d0_tower() -> Self {
        ChargeClass { kind: ChargeKind::D0Tower, curve_class: Monomial::one(), shift: ShiftSign::Plus }
    }

    pub fn d2(kind: ChargeKind, class: &Monomial) -> Self {
        ChargeClass { kind, curve_class: class.normalize_ratio(), shift: ShiftSign::Minus }
    }
}

impl fmt::Display for ChargeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChargeKind::D0Tower => f.write_str("nD0"),
            kind => {
                let sep = if self.shift == ShiftSign::Minus { '-' } else { '+' };
                write!(f, "{}_{}{}kD0", kind.name(), self.curve_class, sep)
            }
        }
    }
}

/// `Ω(γ)` per charge tower.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OmegaTable {
    entries: BTreeMap<ChargeClass, i64>,
}

/// One machine-readable table row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaRecord {
    pub charge: &'static str,
    pub monomial: String,
    pub omega: i64,
}

impl OmegaTable {
    pub fn get(&self, c: &ChargeClass) -> Option<i64> {
        self.entries.get(c).copied()
    }

    pub fn entries(&self) -> &BTreeMap<ChargeClass, i64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn d0(&self) -> i64 {
        self.entries[&ChargeClass::d0_tower()]
    }

    pub fn records(&self) -> Vec<OmegaRecord> {
        self.entries
            .iter()
            .map(|(c, &omega)| OmegaRecord { charge: c.kind.name(), monomial: c.curve_class.to_string(), omega })
            .collect()
    }

    /// Lines like `Omega(D2_Q-kD0) = 1`.
    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().map(|(c, v)| format!("Omega({c}) = {v}")).collect()
    }
}

fn param_monomial(geom: &StripGeometry, p: Param) -> Result<Monomial> {
    let k = geom
        .kahler()
        .ok_or_else(|| Error::Invalid("a Kähler map is required for BPS data".into()))?;
    match p {
        Param::Alpha(i) => k.alphas.get(i - 1).cloned(),
        Param::Beta(0) => Some(Monomial::one()),
        Param::Beta(j) => k.betas.get(j - 1).cloned(),
    }
    .ok_or_else(|| Error::Invalid(format!("no Kähler label for {p}")))
}

/// Normalized ratio monomial of each polylogarithm pair with its GV sign.
pub fn gv_signs(geom: &StripGeometry) -> Result<BTreeMap<Monomial, i32>> {
    let mut out: BTreeMap<Monomial, (i32, (Param, Param))> = BTreeMap::new();
    for ((a, b), _, sign) in li_pairs(geom) {
        let ratio = param_monomial(geom, a)?.div(&param_monomial(geom, b)?).normalize_ratio();
        if ratio.is_one() {
            return Err(Error::Invalid(format!("{a} and {b} carry the same Kähler label")));
        }
        if let Some((_, prev)) = out.get(&ratio) {
            return Err(Error::Ambiguous(format!(
                "pairs ({}, {}) and ({a}, {b}) both give the ratio {ratio}",
                prev.0, prev.1
            )));
        }
        out.insert(ratio, (sign, (a, b)));
    }
    Ok(out.into_iter().map(|(m, (s, _))| (m, s)).collect())
}

pub fn omega_table(geom: &StripGeometry) -> Result<OmegaTable> {
    let signs = gv_signs(geom)?;
    let mut entries = BTreeMap::new();
    entries.insert(ChargeClass::d0_tower(), -geom.euler_characteristic());
    for (m, s) in signs {
        entries.insert(ChargeClass::d2(ChargeKind::D2Bound, &m), s as i64);
        entries.insert(ChargeClass::d2(ChargeKind::D2barBound, &m), s as i64);
    }
    Ok(OmegaTable { entries })
}

/// Truncated series in `q` with Laurent-polynomial coefficients in Kähler monomials.
///
/// Terms beyond `q^{q_order}` or of monomial degree above `degree` are dropped; this
/// is honest under multiplication as long as no stored monomial has negative degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<(u32, Monomial), Rational>,
    q_order: u32,
    degree: i64,
}

impl QSeries {
    pub fn zero(q_order: u32, degree: i64) -> Self {
        QSeries { terms: BTreeMap::new(), q_order, degree }
    }

    pub fn one(q_order: u32, degree: i64) -> Self {
        let mut s = Self::zero(q_order, degree);
        s.add_term(0, Monomial::one(), Rational::from(1));
        s
    }

    pub fn q_order(&self) -> u32 {
        self.q_order
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<(u32, Monomial), Rational> {
        &self.terms
    }

    pub fn coeff(&self, qpow: u32, m: &Monomial) -> Rational {
        self.terms.get(&(qpow, m.clone())).cloned().unwrap_or_default()
    }

    /// Adds `c q^qpow m`, dropping it if it lies beyond either truncation.
    pub fn add_term(&mut self, qpow: u32, m: Monomial, c: Rational) {
        if qpow > self.q_order || m.degree() > self.degree || c == 0 {
            return;
        }
        let key = (qpow, m);
        let v = self.terms.entry(key.clone()).or_default();
        *v += c;
        if *v == 0 {
            self.terms.remove(&key);
        }
    }

    fn like(&self, other: &Self) -> Self {
        Self::zero(self.q_order.min(other.q_order), self.degree.min(other.degree))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.like(rhs);
        for ((q, m), c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.add_term(*q, m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.q_order, self.degree);
        for ((q, m), v) in &self.terms {
            out.add_term(*q, m.clone(), Rational::from(v * c));
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.like(rhs);
        for ((q1, m1), c1) in &self.terms {
            for ((q2, m2), c2) in &rhs.terms {
                if q1 + q2 <= out.q_order {
                    out.add_term(q1 + q2, m1.mul(m2), Rational::from(c1 * c2));
                }
            }
        }
        out
    }

    fn constant(&self) -> Rational {
        self.coeff(0, &Monomial::one())
    }

    fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&(0, Monomial::one()));
        out
    }

    fn has_q_free_nonconstant(&self) -> bool {
        self.terms.keys().any(|(q, m)| *q == 0 && !m.is_one())
    }

    /// `exp` of a series with no `q^0` part.
    pub fn exp(&self) -> Result<Self> {
        if self.constant() != 0 || self.has_q_free_nonconstant() {
            return Err(Error::MalformedSeries("exp needs a series vanishing at q = 0".into()));
        }
        let mut out = Self::one(self.q_order, self.degree);
        let mut pw = Self::one(self.q_order, self.degree);
        for k in 1..=self.q_order {
            pw = pw.mul(self).scale(&Rational::from((1, k)));
            out = out.add(&pw);
        }
        Ok(out)
    }

    /// `log` of a series equal to 1 at `q = 0`.
    pub fn log(&self) -> Result<Self> {
        if self.constant() != 1 || self.has_q_free_nonconstant() {
            return Err(Error::MalformedSeries("log needs a series equal to 1 at q = 0".into()));
        }
        let x = self.without_constant();
        let mut out = Self::zero(self.q_order, self.degree);
        let mut pw = Self::one(self.q_order, self.degree);
        for k in 1..=self.q_order {
            pw = pw.mul(&x);
            let c = Rational::from((if k % 2 == 1 { 1 } else { -1 }, k));
            out = out.add(&pw.scale(&c));
        }
        Ok(out)
    }

    /// `(qpow, monomial, coefficient)` in sorted order.
    pub fn triples(&self) -> Vec<(u32, String, Rational)> {
        self.terms.iter().map(|((q, m), c)| (*q, m.to_string(), c.clone())).collect()
    }
}

/// `log Z = Σ_ρ σ_ρ Σ_n n log(1 - ρ q^n) - (χ/2) Σ_n n log(1 - q^n)`.
pub fn z_product_log_series(geom: &StripGeometry, q_order: u32, degree: i64) -> Result<QSeries> {
    if q_order < 1 || degree < 1 {
        return Err(Error::Invalid("q-order and degree must be at least 1".into()));
    }
    let signs = if geom.alphas().is_empty() && geom.betas().is_empty() {
        BTreeMap::new()
    } else {
        gv_signs(geom)?
    };
    for m in signs.keys() {
        if m.degree() < 1 {
            return Err(Error::Unsupported(format!(
                "curve class {m} has degree {} and gives no grading for the degree truncation",
                m.degree()
            )));
        }
    }
    let mut out = QSeries::zero(q_order, degree);
    // n log(1 - ρ q^n) = -Σ_k n ρ^k q^{nk} / k, so [ρ^k q^m] = -m/k^2 when k | m.
    let term = |m: u32, k: u32| -Rational::from((m, k * k));
    for (rho, s) in &signs {
        for k in 1..=q_order {
            if rho.degree() * k as i64 > degree {
                break;
            }
            for m in (k..=q_order).step_by(k as usize) {
                out.add_term(m, rho.pow(k as i64), term(m, k) * *s);
            }
        }
    }
    let half_chi = Rational::from((geom.euler_characteristic(), 2));
    for m in 1..=q_order {
        for k in (1..=m).filter(|k| m % k == 0) {
            out.add_term(m, Monomial::one(), -term(m, k) * half_chi.clone());
        }
    }
    Ok(out)
}

pub const CHAMBER_CAVEAT: &str =
    "formal coefficients only: which chamber they describe depends on convergence conditions on the Kähler parameters, which are not modelled";

/// Coefficients of `Z` restricted to non-negative Kähler exponents.
#[derive(Clone, Debug)]
pub struct DtReading {
    pub coefficients: BTreeMap<(Monomial, u32), Rational>,
    pub caveat: &'static str,
}

pub fn dt_read(geom: &StripGeometry, q_order: u32, degree: i64) -> Result<DtReading> {
    let z = z_product_log_series(geom, q_order, degree)?.exp()?;
    let coefficients = z
        .terms()
        .iter()
        .filter(|((_, m), _)| m.exponents().values().all(|&e| e >= 0))
        .map(|((q, m), c)| ((m.clone(), *q), c.clone()))
        .collect();
    Ok(DtReading { coefficients, caveat: CHAMBER_CAVEAT })
}

/// One channel of the product/free-energy comparison.
#[derive(Clone, Debug)]
pub struct ChannelCheck {
    pub label: String,
    pub sign: Rational,
    pub product_side: Rational,
    pub free_energy_side: Rational,
}

impl ChannelCheck {
    pub fn agrees(&self) -> bool {
        self.product_side == self.free_energy_side
    }
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub d: u32,
    pub g: usize,
    pub channels: Vec<ChannelCheck>,
    /// The ζ-regularized diagonal sum against the constant-map term.
    pub diagonal_total: ChannelCheck,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.channels.iter().all(ChannelCheck::agrees) && self.diagonal_total.agrees()
    }

    pub fn failures(&self) -> Vec<String> {
        self.channels
            .iter()
            .chain(std::iter::once(&self.diagonal_total))
            .filter(|c| !c.agrees())
            .map(|c| format!("{}: product {} vs free energy {}", c.label, c.product_side, c.free_energy_side))
            .collect()
    }
}

/// `[ħ^{2g-2}]` of `Σ_n n q^{dn} = 1/(4 sinh^2(dħ/2))`, from `(1/S(x))^2 / x^2` at `x = dħ`.
fn sinh_channel_coefficient(d: u32, g: usize) -> Rational {
    let inv_s = s_inverse_series(2 * g);
    let sq = inv_s.mul(&inv_s);
    let c = sq.coeff(2 * g).cloned().unwrap_or_default();
    c * Integer::from(d).pow(2 * g as u32 - 2)
}

/// `[z^d] Li_{3-2g}(z)` from the Taylor expansion of its rational realization.
fn li_coefficient(g: usize, d: u32) -> Rational {
    let li = li_neg_rational(2 * g as u32 - 3);
    li.realization()
        .laurent_at(&Rational::new(), d as i64 + 1)
        .coeff(d as i64)
        .expect("expansion carries the requested order")
}

/// Compares the degree-`d` term of each channel of `log Z` at `q = e^ħ` with the
/// matching polylogarithm coefficient of `F_g`.
pub fn coefficient_crosscheck(geom: &StripGeometry, d: u32, g: usize) -> Result<CrosscheckReport> {
    if d < 1 || g < 2 {
        return Err(Error::Invalid("cross-check needs d >= 1 and g >= 2".into()));
    }
    let terms = closed_form_terms(g, geom)?;
    let k = kappa(g);
    let b2g = bernoulli(2 * g);
    let li_d = li_coefficient(g, d);
    let sinh = sinh_channel_coefficient(d, g);
    // Degree-d part of σ Σ_n n log(1 - ρ^... q^n) is -σ/d Σ_n n q^{dn}.
    let product = |sign: &Rational| -Rational::from(sign * &sinh) / d;

    // Free-energy side grouped into channels: by Kähler ratio when labels exist,
    // otherwise one channel per parameter pair.
    let mut fe: BTreeMap<String, (Rational, Rational)> = BTreeMap::new();
    for t in &terms.li_terms {
        let label = match geom.kahler() {
            Some(_) => param_monomial(geom, t.pair.0)?.div(&param_monomial(geom, t.pair.1)?).normalize_ratio().to_string(),
            None => format!("{}/{}", t.pair.0, t.pair.1),
        };
        let coeff = Rational::from(&b2g * &li_d) * t.sign / k.clone();
        let e = fe.entry(label).or_insert((Rational::new(), Rational::new()));
        e.0 += t.sign;
        e.1 += coeff;
    }
    if geom.kahler().is_some() {
        let signs = gv_signs(geom)?;
        if signs.len() != fe.len() {
            return Err(Error::Ambiguous("Kähler ratios merge distinct polylogarithm pairs".into()));
        }
    }
    let mut channels: Vec<ChannelCheck> = fe
        .into_iter()
        .map(|(label, (sign, fe_side))| ChannelCheck {
            product_side: product(&sign),
            free_energy_side: fe_side,
            label,
            sign,
        })
        .collect();

    // Diagonal channel: σ = -χ/2, read against the constant-map term through
    // Σ_d d^{2g-3} = ζ(3-2g) = -B_{2g-2}/(2g-2).
    let chi = geom.euler_characteristic();
    let diag_sign = Rational::from((-chi, 2));
    let zeta = -bernoulli(2 * g - 2) / Integer::from(2 * g - 2);
    let constant = constant_map_term(g, chi);
    let per_unit = Rational::from(&constant / &zeta);
    channels.push(ChannelCheck {
        label: "diagonal".into(),
        sign: diag_sign.clone(),
        product_side: product(&diag_sign),
        free_energy_side: per_unit.clone() * Integer::from(d).pow(2 * g as u32 - 3),
    });
    let product_unit = -Rational::from(&diag_sign * &sinh_channel_coefficient(1, g));
    let diagonal_total = ChannelCheck {
        label: "diagonal total".into(),
        sign: diag_sign,
        product_side: product_unit * zeta,
        free_energy_side: constant,
    };
    Ok(CrosscheckReport { d, g, channels, diagonal_total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::KahlerMap;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn m(s: &str) -> Monomial {
        s.parse().unwrap()
    }

    fn kahler(alphas: &[&str], betas: &[&str]) -> KahlerMap {
        KahlerMap { alphas: alphas.iter().map(|s| m(s)).collect(), betas: betas.iter().map(|s| m(s)).collect() }
    }

    fn conifold() -> StripGeometry {
        StripGeometry::new(vec![q(1, 2)], vec![], 0).with_kahler(kahler(&["Q"], &[]))
    }

    fn one_beta() -> StripGeometry {
        StripGeometry::new(vec![], vec![q(1, 2)], 0).with_kahler(kahler(&[], &["Q"]))
    }

    fn spp() -> StripGeometry {
        StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0).with_kahler(kahler(&["Q^-1", "mu"], &[]))
    }

    fn c3z3() -> StripGeometry {
        StripGeometry::new(vec![], vec![q(1, 2), q(1, 3)], 0).with_kahler(kahler(&[], &["Q1", "Q1*Q2"]))
    }

    fn six() -> StripGeometry {
        StripGeometry::new(vec![q(1, 2), q(1, 5)], vec![q(1, 3)], 0)
            .with_kahler(kahler(&["Q1", "Q1*Q2*Q3"], &["Q1*Q2"]))
    }

    fn signs(pairs: &[(&str, i32)]) -> BTreeMap<Monomial, i32> {
        pairs.iter().map(|(s, v)| (m(s), *v)).collect()
    }

    #[test]
    fn gv_sign_examples() {
        assert_eq!(gv_signs(&conifold()).unwrap(), signs(&[("Q", 1)]));
        assert_eq!(gv_signs(&spp()).unwrap(), signs(&[("Q*mu", -1), ("Q", 1), ("mu", 1)]));
        assert_eq!(gv_signs(&c3z3()).unwrap(), signs(&[("Q1", -1), ("Q2", -1), ("Q1*Q2", -1)]));
    }

    #[test]
    fn gv_signs_need_labels_and_detect_ambiguity() {
        assert!(matches!(gv_signs(&StripGeometry::new(vec![q(1, 2)], vec![], 0)), Err(Error::Invalid(_))));
        // α_1/β_0 = Q and α_2/α_1 = Q collide.
        let amb = StripGeometry::new(vec![q(1, 2), q(1, 4)], vec![], 0).with_kahler(kahler(&["Q", "Q^2"], &[]));
        assert!(matches!(gv_signs(&amb), Err(Error::Ambiguous(_))));
    }

    #[test]
    fn omega_table_examples() {
        let t = omega_table(&conifold()).unwrap();
        assert_eq!(t.d0(), -2);
        assert_eq!(t.get(&ChargeClass::d2(ChargeKind::D2Bound, &m("Q"))), Some(1));
        assert_eq!(t.get(&ChargeClass::d2(ChargeKind::D2barBound, &m("Q"))), Some(1));
        assert_eq!(omega_table(&spp()).unwrap().d0(), -3);
        let six = omega_table(&six()).unwrap();
        assert_eq!(six.len(), 13);
        assert_eq!(six.d0(), -4);
        for (c, v) in [("Q1", 1), ("Q2", 1), ("Q3", 1), ("Q1*Q2*Q3", 1), ("Q2*Q3", -1), ("Q1*Q2", -1)] {
            for kind in [ChargeKind::D2Bound, ChargeKind::D2barBound] {
                assert_eq!(six.get(&ChargeClass::d2(kind, &m(c))), Some(v), "{c}");
            }
        }
        assert!(omega_table(&one_beta()).unwrap().lines().contains(&"Omega(D2_Q-kD0) = -1".to_string()));
    }

    #[test]
    fn d2_and_d2bar_agree() {
        for geom in [conifold(), one_beta(), spp(), c3z3(), six()] {
            let t = omega_table(&geom).unwrap();
            for (c, v) in t.entries() {
                if c.kind == ChargeKind::D2Bound {
                    let bar = ChargeClass { kind: ChargeKind::D2barBound, ..c.clone() };
                    assert_eq!(t.get(&bar), Some(*v));
                }
            }
            assert_eq!(t.d0(), -(1 + geom.r() as i64 + geom.s() as i64));
        }
    }

    #[test]
    fn conifold_log_series() {
        let s = z_product_log_series(&conifold(), 6, 3).unwrap();
        // [Q] log Z = Σ_n n (-q^n)
        for n in 1..=6u32 {
            assert_eq!(s.coeff(n, &m("Q")), -Rational::from(n));
        }
        assert_eq!(s.coeff(2, &m("Q^2")), q(-1, 2));
    }

    /// `(1 - c x)^e` expanded with generalized binomial coefficients, `x` placed at `q^step ρ`.
    fn binomial_factor(rho: &Monomial, step: u32, c: Rational, e: Rational, n: u32, d: i64) -> QSeries {
        let mut out = QSeries::zero(n, d);
        let mut coef = Rational::from(1);
        let mut k = 0u32;
        while k * step <= n {
            out.add_term(k * step, rho.pow(k as i64), coef.clone() * Rational::from(-&c).pow(k as i32));
            coef = coef * (e.clone() - k) / (k + 1);
            k += 1;
        }
        out
    }

    fn product_oracle(factors: &[(Monomial, Rational)], n: u32, d: i64) -> QSeries {
        // Π_k Π_factors (1 - ρ q^k)^{e k}
        let mut z = QSeries::one(n, d);
        for k in 1..=n {
            for (rho, e) in factors {
                z = z.mul(&binomial_factor(rho, k, Rational::from(1), e.clone() * k, n, d));
            }
        }
        z
    }

    #[test]
    fn spp_product_matches_display() {
        let (n, d) = (5, 3);
        let factors = [
            (m("Q"), q(1, 1)),
            (m("mu"), q(1, 1)),
            (Monomial::one(), q(-3, 2)),
            (m("Q*mu"), q(-1, 1)),
        ];
        let oracle = product_oracle(&factors, n, d);
        let z = z_product_log_series(&spp(), n, d).unwrap().exp().unwrap();
        assert_eq!(z, oracle);
    }

    #[test]
    fn pure_d0_part_matches_macmahon_power() {
        for geom in [conifold(), spp(), six()] {
            let chi = geom.euler_characteristic();
            let oracle = product_oracle(&[(Monomial::one(), q(-chi, 2))], 6, 0).log().unwrap();
            let s = z_product_log_series(&geom, 6, 2).unwrap();
            for n in 1..=6 {
                assert_eq!(s.coeff(n, &Monomial::one()), oracle.coeff(n, &Monomial::one()));
            }
        }
    }

    #[test]
    fn exp_log_round_trip() {
        for geom in [conifold(), spp(), c3z3(), six()] {
            let s = z_product_log_series(&geom, 5, 3).unwrap();
            assert_eq!(s.exp().unwrap().log().unwrap(), s);
        }
    }

    #[test]
    fn dt_read_conifold() {
        let r = dt_read(&conifold(), 4, 2).unwrap();
        // Q^0: M(q)^{-1}... with χ = 2 the tower is Π(1 - q^n)^{-n} = 1 + q + 3q^2 + 6q^3 + 13q^4.
        let want = [1, 1, 3, 6, 13];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(r.coefficients[&(Monomial::one(), n as u32)], Rational::from(*w));
        }
        // Q q: -1 from (1 - Q q)
        assert_eq!(r.coefficients[&(m("Q"), 1)], Rational::from(-1));
        assert!(r.caveat.contains("chamber"));
    }

    #[test]
    fn crosscheck_examples() {
        let r = coefficient_crosscheck(&conifold(), 1, 2).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        let q_chan = r.channels.iter().find(|c| c.label == "Q").unwrap();
        assert_eq!(q_chan.product_side, q(-1, 240));
        let r2 = coefficient_crosscheck(&conifold(), 2, 2).unwrap();
        assert_eq!(r2.channels.iter().find(|c| c.label == "Q").unwrap().product_side, q(-1, 120));
    }

    #[test]
    fn crosscheck_grid() {
        let plain = [
            StripGeometry::new(vec![], vec![], 1),
            StripGeometry::new(vec![q(1, 2)], vec![], 0),
        ];
        for geom in [conifold(), one_beta(), spp(), c3z3(), six()].iter().chain(plain.iter()) {
            for d in 1..=6 {
                for g in 2..=5 {
                    let r = coefficient_crosscheck(geom, d, g).unwrap();
                    assert!(r.passed(), "d={d} g={g}: {:?}", r.failures());
                }
            }
        }
    }

    #[test]
    fn records_are_sorted_and_stable() {
        let t = omega_table(&spp()).unwrap();
        let lines: BTreeSet<String> = t.lines().into_iter().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(t.records(), omega_table(&spp()).unwrap().records());
    }

    #[test]
    fn inverting_a_lone_label_is_absorbed() {
        let inv = StripGeometry::new(vec![q(1, 2)], vec![], 0).with_kahler(kahler(&["Q^-1"], &[]));
        assert_eq!(gv_signs(&inv).unwrap(), gv_signs(&conifold()).unwrap());
        let inv = StripGeometry::new(vec![], vec![q(1, 2)], 0).with_kahler(kahler(&[], &["Q^-1"]));
        assert_eq!(gv_signs(&inv).unwrap(), gv_signs(&one_beta()).unwrap());
    }

    proptest! {
        #[test]
        fn gv_signs_invariant_under_permutation(perm in Just(()).prop_perturb(|_, mut rng| {
            let mut v = vec![0usize, 1, 2];
            for i in (1..v.len()).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                v.swap(i, j);
            }
            v
        }), beta_swap in any::<bool>()) {
            // Three α's and two β's, relabeled in any order.
            let alphas = [(q(1, 2), "Q1"), (q(1, 5), "Q1*Q2*Q3"), (q(1, 7), "Q1*Q2*Q3*Q4")];
            let mut betas = vec![(q(1, 3), "Q1*Q2"), (q(1, 11), "Q1*Q2*Q3*Q4*Q5")];
            let build = |a: &[(Rational, &str)], b: &[(Rational, &str)]| {
                StripGeometry::new(a.iter().map(|x| x.0.clone()).collect(), b.iter().map(|x| x.0.clone()).collect(), 0)
                    .with_kahler(KahlerMap { alphas: a.iter().map(|x| m(x.1)).collect(), betas: b.iter().map(|x| m(x.1)).collect() })
            };
            let base = gv_signs(&build(&alphas, &betas)).unwrap();
            let permuted: Vec<_> = perm.iter().map(|&i| alphas[i].clone()).collect();
            if beta_swap {
                betas.swap(0, 1);
            }
            prop_assert_eq!(gv_signs(&build(&permuted, &betas)).unwrap(), base);
        }
    }
}
