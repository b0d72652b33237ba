//! The x–y dual correlators `ω∨_{g,1} = s_{2g} (Σ_i Li_{1-2g}(α_i z) - Σ_j Li_{1-2g}(β_j z)) dz/z`
//! with `s_{2g} = [ħ^{2g}] 1/S(ħ)`.
//!
//! Dual correlators with `n ≥ 2` vanish identically and are not represented.

use rug::Rational;

use crate::error::{Error, Result};
use crate::exact::s_inverse_series;
use crate::polylog::{li_neg_rational, RationalFunction};
use crate::strip::StripGeometry;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCorrelator {
    genus: usize,
    prefactor: Rational,
    combination: RationalFunction,
    one_form: RationalFunction,
}

impl DualCorrelator {
    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `s_{2g} = [ħ^{2g}] 1/S(ħ)`.
    pub fn prefactor(&self) -> &Rational {
        &self.prefactor
    }

    /// `Σ_i Li_{1-2g}(α_i z) - Σ_j Li_{1-2g}(β_j z)`, without the prefactor.
    pub fn combination(&self) -> &RationalFunction {
        &self.combination
    }

    /// The coefficient of `dz`.
    pub fn one_form(&self) -> &RationalFunction {
        &self.one_form
    }
}

/// `[ħ^{2g}] 1/S(ħ)`.
pub fn s_coefficient(g: usize) -> Rational {
    s_inverse_series(2 * g).coeffs()[2 * g].clone()
}

/// `Σ_i Li_{-n}(α_i z) - Σ_{j=0}^{s} Li_{-n}(β_j z)`.
pub fn li_combination(n: u32, geom: &StripGeometry) -> RationalFunction {
    let li = li_neg_rational(n);
    let mut acc = RationalFunction::zero();
    for a in geom.alphas() {
        acc = acc.add(&li.at_scaled(a));
    }
    for b in geom.all_betas() {
        acc = acc.sub(&li.at_scaled(&b));
    }
    acc
}

pub fn omega_dual(g: usize, geom: &StripGeometry) -> Result<DualCorrelator> {
    if g == 0 {
        return Err(Error::Unsupported("the genus-zero dual correlator x dy is not represented".into()));
    }
    let prefactor = s_coefficient(g);
    let combination = li_combination(2 * g as u32 - 1, geom);
    let one_form = combination.div_z().scale(&prefactor);
    Ok(DualCorrelator { genus: g, prefactor, combination, one_form })
}

/// `s_{2g} (Σ_i Li_{2-2g}(α_i z) - Σ_j Li_{2-2g}(β_j z))`, a primitive of `ω∨_{g,1}`.
pub fn omega_dual_primitive(g: usize, geom: &StripGeometry) -> Result<RationalFunction> {
    if g == 0 {
        return Err(Error::Unsupported("genus zero".into()));
    }
    Ok(li_combination(2 * g as u32 - 2, geom).scale(&s_coefficient(g)))
}

/// `F_g∨`: the dual free energy sums over ramification points of `y`, and
/// `dy = dz/z` has none, so the sum is empty.
pub fn dual_free_energy(g: usize, geom: &StripGeometry) -> Result<Rational> {
    if g < 2 {
        return Err(Error::Unsupported("dual free energy needs g >= 2".into()));
    }
    let ram_y = geom.dy_dz().numerator().degree().unwrap_or(0);
    Ok((0..ram_y).map(|_| Rational::new()).sum())
}
