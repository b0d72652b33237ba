//! The genus-g free energy by exact routes: the closed formula and the residue
//! formula on the dual side, together with the polylogarithm residue lemmas the
//! latter reduces to.

use rug::{Integer, Rational};

use crate::dual::{omega_dual, omega_dual_primitive, s_coefficient};
use crate::error::{Error, Result};
use crate::exact::{bernoulli, factorial, inv_s_squared_coeff, LaurentBlock, TruncatedSeries};
use crate::polylog::{li_neg, li_neg_at_exp, li_neg_rational, log_one_plus, RationalFunction};
use crate::strip::{Param, StripGeometry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Route {
    Closed,
    Residue,
    Tr,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Closed => "closed",
            Route::Residue => "residue",
            Route::Tr => "tr",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeEnergyValue {
    pub genus: usize,
    pub value: Rational,
    pub route: Route,
}

/// One polylogarithm term `sign · B_{2g} Li_{3-2g}(ratio) / (2g (2g-2)!)` of the closed formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiTerm {
    pub pair: (Param, Param),
    pub ratio: Rational,
    pub sign: i32,
    pub value: Rational,
}

/// The closed formula split into its constant-map term and its polylogarithm terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormTerms {
    pub constant: Rational,
    pub li_terms: Vec<LiTerm>,
}

impl ClosedFormTerms {
    pub fn total(&self) -> Rational {
        self.li_terms.iter().fold(self.constant.clone(), |acc, t| acc + &t.value)
    }
}

fn require_genus(g: usize) -> Result<()> {
    if g < 2 {
        return Err(Error::Unsupported(format!("F_{g} is outside the computed range g >= 2")));
    }
    Ok(())
}

/// `2g (2g-2)!`.
pub fn kappa(g: usize) -> Integer {
    factorial(2 * g as u32 - 2) * Integer::from(2 * g)
}

/// `-(χ/2) B_{2g} B_{2g-2} / (2g (2-2g) (2g-2)!)` for Euler characteristic `χ`.
pub fn constant_map_term(g: usize, chi: i64) -> Rational {
    let num = bernoulli(2 * g) * bernoulli(2 * g - 2) * Integer::from(chi);
    let den = kappa(g) * Integer::from(2 - 2 * g as i64) * Integer::from(2);
    -num / den
}

/// Sign and parameter pairs of the polylogarithm terms: same-side pairs carry
/// `-1`, α-with-β pairs `+1`. `β_0 = 1` is included.
pub fn li_pairs(geom: &StripGeometry) -> Vec<((Param, Param), Rational, i32)> {
    let mut out = Vec::new();
    let alphas = geom.alphas();
    let betas = geom.all_betas();
    for i in 0..alphas.len() {
        for j in i + 1..alphas.len() {
            out.push(((Param::Alpha(i + 1), Param::Alpha(j + 1)), Rational::from(&alphas[i] / &alphas[j]), -1));
        }
    }
    for i in 0..betas.len() {
        for j in i + 1..betas.len() {
            out.push(((Param::Beta(i), Param::Beta(j)), Rational::from(&betas[i] / &betas[j]), -1));
        }
    }
    for (i, a) in alphas.iter().enumerate() {
        for (j, b) in betas.iter().enumerate() {
            out.push(((Param::Alpha(i + 1), Param::Beta(j)), Rational::from(a / b), 1));
        }
    }
    out
}

pub fn closed_form_terms(g: usize, geom: &StripGeometry) -> Result<ClosedFormTerms> {
    require_genus(g)?;
    let k = kappa(g);
    let b2g = bernoulli(2 * g);
    let constant = constant_map_term(g, geom.euler_characteristic());
    let li_terms = li_pairs(geom)
        .into_iter()
        .map(|(pair, ratio, sign)| {
            let li = li_neg(2 * g as u32 - 3, &ratio)
                .map_err(|_| Error::Degenerate(format!("{} = {} makes a ratio equal to 1", pair.0, pair.1)))?;
            let value = Rational::from(&b2g * &li) * sign / k.clone();
            Ok(LiTerm { pair, ratio, sign, value })
        })
        .collect::<Result<_>>()?;
    Ok(ClosedFormTerms { constant, li_terms })
}

/// `F_g` from the closed formula.
pub fn fg_closed(g: usize, geom: &StripGeometry) -> Result<Rational> {
    Ok(closed_form_terms(g, geom)?.total())
}

/// `p` for each residue point `1/β_j`, `1/α_i`.
fn residue_points(geom: &StripGeometry) -> Result<Vec<(Param, Rational)>> {
    let mut pts: Vec<(Param, Rational)> = Vec::new();
    for (label, v) in geom.params() {
        if v == 0 {
            return Err(Error::Degenerate(format!("{label} = 0 has no residue point")));
        }
        let p = v.recip();
        if let Some((other, _)) = pts.iter().find(|(_, q)| *q == p) {
            return Err(Error::Degenerate(format!("residue points of {other} and {label} coincide")));
        }
        pts.push((label, p));
    }
    Ok(pts)
}

/// Working precision for local expansions: pole orders are at most 2g, the
/// margin guards against off-by-one slips rather than instability.
fn expansion_order(g: usize) -> i64 {
    2 * g as i64 + 8
}

/// The residue at `q → p` of `log(q/p) · [∫ω∨_{g,1} - ½ Σ ω∨_{g1,1} ω∨_{g2,1}/(dx dy)] · dx`.
pub fn point_residue(g: usize, geom: &StripGeometry, p: &Rational) -> Result<Rational> {
    require_genus(g)?;
    let prec = expansion_order(g);
    let primitive = omega_dual_primitive(g, geom)?;
    let dx = geom.dx_dz();
    let linear = primitive.mul(&dx);
    let quad = quadratic_term(g, geom)?;
    let integrand = linear.sub(&quad.scale(&Rational::from((1, 2))));
    let local = integrand.laurent_at(p, prec);
    let log = LaurentBlock::from_series(log_one_plus(&p.clone().recip(), (prec + 2 * g as i64 + 2) as usize));
    local.mul(&log).residue()
}

/// `Σ_{g1+g2=g, gi>0} ω∨_{g1,1} ω∨_{g2,1} / (dx dy) · dx`, as the coefficient of `dz`.
///
/// Dividing by `dx` and multiplying back by `dx` cancels, so only the division by
/// `dy = dz/z` is carried out.
pub fn quadratic_term(g: usize, geom: &StripGeometry) -> Result<RationalFunction> {
    let mut acc = RationalFunction::zero();
    for g1 in 1..g {
        let w1 = omega_dual(g1, geom)?;
        let w2 = omega_dual(g - g1, geom)?;
        acc = acc.add(&w1.one_form().mul(w2.one_form()));
    }
    Ok(acc.mul_z())
}

/// `F_g` from the residue formula, by exact local expansion at every `1/α_i`, `1/β_j`.
pub fn fg_residue(g: usize, geom: &StripGeometry) -> Result<Rational> {
    require_genus(g)?;
    let mut total = Rational::new();
    for (_, p) in residue_points(geom)? {
        total += point_residue(g, geom, &p)?;
    }
    Ok(total / Integer::from(2 - 2 * g as i64))
}

/// `Res_{q→1} log(q) dq Li_{2-2g}(q) / (aq - 1)`, by local expansion in `t = q - 1`.
pub fn residue_lemma_linear(a: &Rational, g: usize) -> Result<Rational> {
    require_genus(g)?;
    if *a == 1 {
        return Err(Error::Pole("a = 1 is the diagonal case; use residue_lemma_log_at_one".into()));
    }
    if *a == 0 {
        return Err(Error::Invalid("a = 0".into()));
    }
    let prec = expansion_order(g);
    let t = (prec + 2 * g as i64) as usize;
    // 1/(a(1+t) - 1) = 1/((a-1) + a t)
    let lin = TruncatedSeries::from_rationals(&[Rational::from(a - 1u32), a.clone()], t);
    let factor = LaurentBlock::from_series(lin.inverse()?);
    log_li_residue(g, factor, t)
}

/// `Res_{q→1} log(q) dq Li_{2-2g}(q) / (q - 1)`.
pub fn residue_lemma_log_at_one(g: usize) -> Result<Rational> {
    require_genus(g)?;
    let t = (expansion_order(g) + 2 * g as i64) as usize;
    let factor = LaurentBlock::new(-1, TruncatedSeries::one(t, &()));
    log_li_residue(g, factor, t)
}

fn log_li_residue(g: usize, factor: LaurentBlock<Rational>, t: usize) -> Result<Rational> {
    let li = li_neg_rational(2 * g as u32 - 2).realization().laurent_at(&Rational::from(1), expansion_order(g));
    let log = LaurentBlock::from_series(log_one_plus(&Rational::from(1), t));
    log.mul(&factor).mul(&li).residue()
}

/// `Res_{μ→0} μ dμ Li_{1-2g1}(e^μ) Li_{1-2g2}(e^μ)` from the `e^μ` expansions.
pub fn residue_quadratic_diag(g1: usize, g2: usize) -> Result<Rational> {
    if g1 == 0 || g2 == 0 {
        return Err(Error::Unsupported("g1, g2 must be positive".into()));
    }
    let t = 2 * (g1 + g2) + 4;
    let a = li_neg_at_exp(2 * g1 as u32 - 1, t);
    let b = li_neg_at_exp(2 * g2 as u32 - 1, t);
    a.mul(&b).shift(1).residue()
}

/// `Res_{μ→0} μ dμ Li_{1-2g1}(e^μ) Li_{1-2g2}(a e^μ)` for `a ≠ 1`.
///
/// `Li_{1-2g2}(a e^μ)` is regular at `μ = 0`; it is expanded exactly by composing
/// its Taylor series at `z = 1` with `e^μ - 1`.
pub fn residue_quadratic_mixed(a: &Rational, g1: usize, g2: usize) -> Result<Rational> {
    if g1 == 0 || g2 == 0 {
        return Err(Error::Unsupported("g1, g2 must be positive".into()));
    }
    if *a == 1 || *a == 0 {
        return Err(Error::Invalid(format!("a = {a} is excluded")));
    }
    let t = 2 * (g1 + g2) + 4;
    let diag = li_neg_at_exp(2 * g1 as u32 - 1, t);
    let shifted = li_neg_rational(2 * g2 as u32 - 1).at_scaled(a);
    let taylor = shifted.laurent_at(&Rational::from(1), t as i64 + 1).regular_part().expect("regular at 1");
    let em1 = TruncatedSeries::exp_series(t).sub(&TruncatedSeries::one(t, &()));
    let regular = taylor.truncate(t).compose(&em1)?;
    diag.mul(&LaurentBlock::from_series(regular)).shift(1).residue()
}

/// One lemma evaluation next to its closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub lemma: &'static str,
    pub args: String,
    pub computed: Rational,
    pub expected: Rational,
}

impl LemmaCheck {
    pub fn holds(&self) -> bool {
        self.computed == self.expected
    }
}

/// Arguments used by the standard lemma grid.
pub fn lemma_arguments() -> Vec<Rational> {
    [(2, 1), (1, 2), (-3, 1), (5, 7)].iter().map(|&p| Rational::from(p)).collect()
}

/// The four residue lemmas over `g, g1, g2 ≤ g_max` and [`lemma_arguments`], each
/// beside its closed form:
/// `(2g-2) Li_{3-2g}(a)/a`, `-B_{2g-2}`, `-B_{2g1+2g2-2}` and `(2g1-1) Li_{3-2g1-2g2}(a)`.
pub fn lemma_grid(g_max: usize) -> Result<Vec<LemmaCheck>> {
    let mut out = Vec::new();
    for g in 2..=g_max {
        for a in lemma_arguments() {
            let expected = li_neg(2 * g as u32 - 3, &a)? * Integer::from(2 * g - 2) / &a;
            let computed = residue_lemma_linear(&a, g)?;
            out.push(LemmaCheck { lemma: "linear", args: format!("a={a}, g={g}"), computed, expected });
        }
        out.push(LemmaCheck {
            lemma: "log_at_one",
            args: format!("g={g}"),
            computed: residue_lemma_log_at_one(g)?,
            expected: -bernoulli(2 * g - 2),
        });
    }
    for g1 in 1..=g_max {
        for g2 in 1..=g_max {
            out.push(LemmaCheck {
                lemma: "quadratic_diag",
                args: format!("g1={g1}, g2={g2}"),
                computed: residue_quadratic_diag(g1, g2)?,
                expected: -bernoulli(2 * g1 + 2 * g2 - 2),
            });
            for a in lemma_arguments() {
                let expected = li_neg(2 * (g1 + g2) as u32 - 3, &a)? * Integer::from(2 * g1 - 1);
                out.push(LemmaCheck {
                    lemma: "quadratic_mixed",
                    args: format!("a={a}, g1={g1}, g2={g2}"),
                    computed: residue_quadratic_mixed(&a, g1, g2)?,
                    expected,
                });
            }
        }
    }
    Ok(out)
}

/// The per-point residue assembled from the four lemmas.
///
/// For `p = 1/β_j` it equals
/// `½ [ħ^{2g}](1/S²) (B_{2g-2} - (2g-2) Σ_{i≠j} Li_{3-2g}(β_i/β_j) + (2g-2) Σ_i Li_{3-2g}(α_i/β_j))`,
/// and for `p = 1/α_j` the same with α and β exchanged.
pub fn residue_at_point_aggregate(g: usize, geom: &StripGeometry, point: Param) -> Result<Rational> {
    require_genus(g)?;
    let c = geom.param_value(point);
    if c == 0 {
        return Err(Error::Degenerate(format!("{point} = 0")));
    }
    // L = Σ ε_e Li(e z) with ε = +1 on α, -1 on β.
    let eps = |p: Param| if matches!(p, Param::Alpha(_)) { 1i64 } else { -1 };
    let others: Vec<(i64, Rational)> = geom
        .params()
        .into_iter()
        .filter(|(p, _)| *p != point)
        .map(|(p, v)| (eps(p), v / &c))
        .collect();
    let ec = eps(point);

    // Linear part: -s_{2g} ε_c Σ_e ε_e Res log u du a_e/(a_e u - 1) Li_{2-2g}(u).
    let mut lin = residue_lemma_log_at_one(g)? * ec;
    for (e, a) in &others {
        lin += residue_lemma_linear(a, g)? * a * e;
    }
    let linear = -s_coefficient(g) * ec * lin;

    // Quadratic part: -½ Σ s_{g1} s_{g2} Σ_{e,e'} ε_e ε_e' Res μ dμ Li(a_e e^μ) Li(a_e' e^μ).
    let mut quad = Rational::new();
    for g1 in 1..g {
        let g2 = g - g1;
        let mut r = residue_quadratic_diag(g1, g2)?;
        for (e, a) in &others {
            r += residue_quadratic_mixed(a, g1, g2)? * ec * e;
            r += residue_quadratic_mixed(a, g2, g1)? * ec * e;
        }
        quad += s_coefficient(g1) * s_coefficient(g2) * r;
    }
    Ok(linear - quad / 2)
}

/// The same per-point residue from its summarized closed form.
pub fn residue_at_point_formula(g: usize, geom: &StripGeometry, point: Param) -> Result<Rational> {
    require_genus(g)?;
    let c = geom.param_value(point);
    let mut acc = bernoulli(2 * g - 2);
    for (p, v) in geom.params() {
        if p == point {
            continue;
        }
        let same = matches!(p, Param::Alpha(_)) == matches!(point, Param::Alpha(_));
        let li = li_neg(2 * g as u32 - 3, &(v / &c))?;
        let w = li * Integer::from(2 * g - 2);
        if same {
            acc -= w;
        } else {
            acc += w;
        }
    }
    Ok(inv_s_squared_coeff(g) * acc / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn geometries() -> Vec<StripGeometry> {
        vec![
            StripGeometry::new(vec![], vec![], 1),
            StripGeometry::new(vec![q(1, 2)], vec![], 0),
            StripGeometry::new(vec![], vec![q(1, 2)], 0),
            StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0),
            StripGeometry::new(vec![q(1, 2), q(1, 5)], vec![q(1, 3)], 0),
        ]
    }

    #[test]
    fn closed_examples() {
        assert_eq!(fg_closed(2, &StripGeometry::new(vec![], vec![], 1)).unwrap(), q(-1, 5760));
        assert_eq!(fg_closed(2, &StripGeometry::new(vec![q(1, 2)], vec![], 0)).unwrap(), q(-5, 576));
        assert!(fg_closed(1, &StripGeometry::new(vec![], vec![], 1)).is_err());
    }

    #[test]
    fn one_beta_family_matches_printed_formula() {
        // F_g = -B_{2g}B_{2g-2}/(2g(2g-2)(2g-2)!) - B_{2g} Li_{3-2g}(Q)/(2g(2g-2)!), with the
        // constant term taken with the (2-2g) of the general formula.
        for g in 2..=6usize {
            let geom = StripGeometry::new(vec![], vec![q(1, 2)], 0);
            let k = kappa(g);
            let want = constant_map_term(g, 2) - bernoulli(2 * g) * li_neg(2 * g as u32 - 3, &q(1, 2)).unwrap() / k;
            assert_eq!(fg_closed(g, &geom).unwrap(), want);
        }
    }

    #[test]
    fn routes_agree_and_ignore_framing() {
        for geom in geometries() {
            for g in 2..=5 {
                let c = fg_closed(g, &geom).unwrap();
                assert_eq!(fg_residue(g, &geom).unwrap(), c, "g = {g}, {geom:?}");
            }
        }
        let con0 = StripGeometry::new(vec![q(1, 2)], vec![], 0);
        let con3 = StripGeometry::new(vec![q(1, 2)], vec![], 3);
        assert_eq!(fg_residue(3, &con0).unwrap(), fg_residue(3, &con3).unwrap());
    }

    #[test]
    fn lemma_examples() {
        assert_eq!(residue_lemma_linear(&q(2, 1), 2).unwrap(), 2);
        assert_eq!(residue_lemma_linear(&q(1, 2), 2).unwrap(), 8);
        let want = li_neg(3, &q(-3, 1)).unwrap() * 4 / q(-3, 1);
        assert_eq!(residue_lemma_linear(&q(-3, 1), 3).unwrap(), want);
        assert!(matches!(residue_lemma_linear(&q(1, 1), 3), Err(Error::Pole(_))));
        assert_eq!(residue_lemma_log_at_one(2).unwrap(), q(-1, 6));
        assert_eq!(residue_lemma_log_at_one(3).unwrap(), q(1, 30));
        assert_eq!(residue_lemma_log_at_one(6).unwrap(), q(-5, 66));
        assert_eq!(residue_quadratic_diag(1, 1).unwrap(), q(-1, 6));
        assert_eq!(residue_quadratic_diag(1, 2).unwrap(), q(1, 30));
        assert_eq!(residue_quadratic_diag(2, 2).unwrap(), q(-1, 42));
        assert_eq!(residue_quadratic_mixed(&q(2, 1), 1, 1).unwrap(), 2);
        assert_eq!(residue_quadratic_mixed(&q(1, 2), 2, 1).unwrap(), li_neg(3, &q(1, 2)).unwrap() * 3);
        assert_eq!(residue_quadratic_mixed(&q(5, 7), 1, 2).unwrap(), li_neg(3, &q(5, 7)).unwrap());
    }

    #[test]
    fn lemma_grid_holds() {
        let grid = lemma_grid(4).unwrap();
        assert_eq!(grid.len(), 3 * 5 + 16 * 5);
        assert!(grid.iter().all(LemmaCheck::holds));
    }

    #[test]
    fn aggregates_assemble_the_closed_formula() {
        for geom in geometries() {
            for g in 2..=5 {
                let mut sum = Rational::new();
                for (p, v) in geom.params() {
                    let agg = residue_at_point_aggregate(g, &geom, p).unwrap();
                    assert_eq!(agg, residue_at_point_formula(g, &geom, p).unwrap());
                    assert_eq!(agg, point_residue(g, &geom, &v.recip()).unwrap());
                    sum += agg;
                }
                assert_eq!(sum / Integer::from(2 - 2 * g as i64), fg_closed(g, &geom).unwrap());
            }
        }
        // Conifold at p = 1: ½ [ħ^4](1/S²) (B_2 + 2 Li_{-1}(1/2)).
        let con = StripGeometry::new(vec![q(1, 2)], vec![], 0);
        let want = inv_s_squared_coeff(2) * (q(1, 6) + q(4, 1)) / 2;
        assert_eq!(residue_at_point_aggregate(2, &con, Param::Beta(0)).unwrap(), want);
        let c3 = StripGeometry::new(vec![], vec![], 1);
        for g in 2..=5 {
            let want = inv_s_squared_coeff(g) * bernoulli(2 * g - 2) / 2;
            assert_eq!(residue_at_point_aggregate(g, &c3, Param::Beta(0)).unwrap(), want);
        }
    }

    #[test]
    fn zero_ratio_limit_leaves_constant_term() {
        // Evaluating every Li at argument 0 leaves the Euler-characteristic term.
        for geom in geometries() {
            for g in 2..=5 {
                let terms = closed_form_terms(g, &geom).unwrap();
                let chi = geom.euler_characteristic();
                let base = -(bernoulli(2 * g) * bernoulli(2 * g - 2)) * chi
                    / (kappa(g) * Integer::from(2 - 2 * g as i64) * 2u32);
                assert_eq!(terms.constant, base);
                let li0 = li_neg(2 * g as u32 - 3, &Rational::new()).unwrap();
                assert_eq!(li0, 0);
            }
        }
    }

    fn arb_param() -> impl Strategy<Value = Rational> {
        (-12i64..13, 1i64..8).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn symmetries_of_both_routes(
            a in proptest::collection::vec(arb_param(), 0..3),
            b in proptest::collection::vec(arb_param(), 0..2),
            f in -2i64..4,
            g in 2usize..4,
        ) {
            let geom = StripGeometry::new(a.clone(), b.clone(), f);
            prop_assume!(geom.validate_at(96).is_ok());
            let c = fg_closed(g, &geom).unwrap();
            prop_assert_eq!(fg_residue(g, &geom).unwrap(), c.clone());
            let mut ar = a.clone();
            ar.reverse();
            let mut br = b.clone();
            br.reverse();
            let perm = StripGeometry::new(ar, br, f);
            prop_assert_eq!(fg_closed(g, &perm).unwrap(), c.clone());
            prop_assert_eq!(fg_residue(g, &perm).unwrap(), c.clone());
            // Inverting every ratio orientation leaves the odd-order Li terms unchanged.
            let terms = closed_form_terms(g, &geom).unwrap();
            let inverted = terms.li_terms.iter().fold(terms.constant.clone(), |acc, t| {
                let li = li_neg(2 * g as u32 - 3, &Rational::from(t.ratio.recip_ref())).unwrap();
                acc + bernoulli(2 * g) * li * t.sign / kappa(g)
            });
            prop_assert_eq!(inverted, c);
        }

        #[test]
        fn linear_lemma_closed_form(n in -20i64..20, d in 1i64..9, g in 2usize..7) {
            let a = q(n, d);
            prop_assume!(a != 0 && a != 1);
            let r = residue_lemma_linear(&a, g).unwrap();
            prop_assert_eq!(r * &a / Integer::from(2 * g - 2), li_neg(2 * g as u32 - 3, &a).unwrap());
        }
    }
}
