//! The strip mirror curve
//! `x = log(∏_{j=0}^{s}(1-β_j z) / ∏_{i=1}^{r}(1-α_i z)) - (1+f) log(-z)`, `y = log z`,
//! with `β_0 = 1`.
//!
//! `x` is multivalued, so only `dx`, `e^x` and local series of differences of
//! `x` are exposed.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use rug::{Complex, Float, Rational};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, Ball, Monomial, TruncatedSeries};
use crate::polylog::{Poly, RationalFunction};

/// Kähler-monomial labels for each parameter; `β_0` is always the empty monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KahlerMap {
    pub alphas: Vec<Monomial>,
    pub betas: Vec<Monomial>,
}

/// Which side a parameter sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Alpha(usize),
    /// `Beta(0)` is the implicit `β_0 = 1`.
    Beta(usize),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Alpha(i) => write!(f, "alpha_{i}"),
            Param::Beta(j) => write!(f, "beta_{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripGeometry {
    alphas: Vec<Rational>,
    betas: Vec<Rational>,
    framing: i64,
    kahler: Option<KahlerMap>,
}

/// One violated standing assumption.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    ZeroParameter(Param),
    Collision(Param, Param),
    ForbiddenFraming { framing: i64, reason: &'static str },
    NonSimpleRamification(String),
    RootFinder(String),
    KahlerMismatch(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::ZeroParameter(p) => write!(f, "parameter {p} is zero"),
            Issue::Collision(a, b) => write!(f, "parameter collision: {a} = {b}"),
            Issue::ForbiddenFraming { framing, reason } => write!(f, "forbidden framing f = {framing} ({reason})"),
            Issue::NonSimpleRamification(s) => write!(f, "non-simple ramification: {s}"),
            Issue::RootFinder(s) => write!(f, "root finder: {s}"),
            Issue::KahlerMismatch(s) => write!(f, "Kähler map: {s}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            return Ok(());
        }
        let msg: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        Err(Error::Invalid(msg.join("; ")))
    }
}

/// A logarithmic singular point of a curve function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VitalPoint {
    Finite(Rational),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Log poles of `y` not shared by `dx`.
    XFunction,
    /// Log poles of `x` not shared by `dy`.
    YFunction,
}

impl StripGeometry {
    /// Builds a geometry without validating it; see [`StripGeometry::validate`].
    pub fn new(alphas: Vec<Rational>, betas: Vec<Rational>, framing: i64) -> Self {
        StripGeometry { alphas, betas, framing, kahler: None }
    }

    /// Builds a geometry and fails with every violated assumption listed.
    pub fn checked(alphas: Vec<Rational>, betas: Vec<Rational>, framing: i64) -> Result<Self> {
        let g = Self::new(alphas, betas, framing);
        g.validate().into_result()?;
        Ok(g)
    }

    pub fn with_kahler(mut self, map: KahlerMap) -> Self {
        self.kahler = Some(map);
        self
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    /// `β_1 .. β_s` as given.
    pub fn betas(&self) -> &[Rational] {
        &self.betas
    }

    /// `β_0 = 1, β_1, .., β_s`.
    pub fn all_betas(&self) -> Vec<Rational> {
        std::iter::once(Rational::from(1)).chain(self.betas.iter().cloned()).collect()
    }

    pub fn framing(&self) -> i64 {
        self.framing
    }

    pub fn kahler(&self) -> Option<&KahlerMap> {
        self.kahler.as_ref()
    }

    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    pub fn s(&self) -> usize {
        self.betas.len()
    }

    /// `1 + r + s`.
    pub fn euler_characteristic(&self) -> i64 {
        1 + self.r() as i64 + self.s() as i64
    }

    /// Every parameter with its label, `β_0` included.
    pub fn params(&self) -> Vec<(Param, Rational)> {
        let mut out: Vec<(Param, Rational)> =
            self.alphas.iter().enumerate().map(|(i, a)| (Param::Alpha(i + 1), a.clone())).collect();
        out.extend(self.all_betas().into_iter().enumerate().map(|(j, b)| (Param::Beta(j), b)));
        out
    }

    pub fn param_value(&self, p: Param) -> Rational {
        match p {
            Param::Alpha(i) => self.alphas[i - 1].clone(),
            Param::Beta(0) => Rational::from(1),
            Param::Beta(j) => self.betas[j - 1].clone(),
        }
    }

    /// Checks every standing assumption, reporting each violation.
    pub fn validate(&self) -> ValidationReport {
        self.validate_at(crate::exact::DEFAULT_PRECISION)
    }

    pub fn validate_at(&self, precision: u32) -> ValidationReport {
        let mut issues = Vec::new();
        let params = self.params();
        for (p, v) in &params {
            if *v == 0 {
                issues.push(Issue::ZeroParameter(*p));
            }
        }
        for (i, (p, v)) in params.iter().enumerate() {
            for (q, w) in &params[i + 1..] {
                if v == w && *v != 0 {
                    issues.push(Issue::Collision(*p, *q));
                }
            }
        }
        let f = self.framing;
        if f == -1 {
            issues.push(Issue::ForbiddenFraming { framing: f, reason: "f = -1" });
        }
        if f == self.s() as i64 - self.r() as i64 {
            issues.push(Issue::ForbiddenFraming { framing: f, reason: "f = s - r" });
        }
        if let Some(k) = &self.kahler {
            if k.alphas.len() != self.r() || k.betas.len() != self.s() {
                issues.push(Issue::KahlerMismatch("label count differs from parameter count".into()));
            }
        }
        if issues.is_empty() {
            if let Err(e) = self.ramification_points(precision) {
                issues.push(match e {
                    Error::Degenerate(s) => Issue::NonSimpleRamification(s),
                    other => Issue::RootFinder(other.to_string()),
                });
            }
        }
        ValidationReport { issues }
    }

    /// `dx/dz = Σ_j -β_j/(1-β_j z) + Σ_i α_i/(1-α_i z) - (1+f)/z`.
    pub fn dx_dz(&self) -> RationalFunction {
        let one = Rational::from(1);
        let mut acc = RationalFunction::pole(Rational::from(-(1 + self.framing)), Rational::new(), 1);
        for b in self.all_betas() {
            if b != 0 {
                acc = acc.add(&RationalFunction::pole(one.clone(), b.recip(), 1));
            }
        }
        for a in &self.alphas {
            if *a != 0 {
                acc = acc.add(&RationalFunction::pole(Rational::from(-1), a.clone().recip(), 1));
            }
        }
        acc
    }

    /// `dy/dz = 1/z`.
    pub fn dy_dz(&self) -> RationalFunction {
        RationalFunction::pole(Rational::from(1), Rational::new(), 1)
    }

    /// `e^{x(z)} = ∏_{j=0}^{s}(1-β_j z) / (∏_i(1-α_i z) · (-z)^{1+f})`.
    pub fn exp_x(&self, z: &Rational) -> Result<Rational> {
        if *z == 0 {
            return Err(Error::Pole("z = 0".into()));
        }
        let mut num = Rational::from(1);
        for b in self.all_betas() {
            num *= Rational::from(1) - b * z;
        }
        let mut den = Rational::from(1);
        for a in &self.alphas {
            let d = Rational::from(1) - Rational::from(a * z);
            if d == 0 {
                return Err(Error::Pole(format!("z = 1/alpha = {z}")));
            }
            den *= d;
        }
        den *= pow_i(&Rational::from(-z), 1 + self.framing);
        Ok(num / den)
    }

    /// Evaluates the mirror curve `A(e^x, e^y)` at the parametrized point `z`; it is
    /// identically zero.
    pub fn implicit_identity_check(&self, z: &Rational) -> Result<Rational> {
        let ex = self.exp_x(z)?;
        if ex == 0 {
            return Err(Error::Pole(format!("e^x vanishes at z = {z}")));
        }
        let ey = z.clone();
        let mut first = Rational::from(1) - ey.clone();
        for b in &self.betas {
            first *= Rational::from(1) - Rational::from(b * &ey);
        }
        let mut second = ex * pow_i(&ey, 1 + self.framing);
        if self.framing.rem_euclid(2) == 1 {
            second = -second;
        }
        for a in &self.alphas {
            second *= Rational::from(1) - Rational::from(a * &ey);
        }
        Ok(first + second)
    }

    /// Roots of the numerator of `dx/dz`, polished to `precision` bits and sorted by
    /// (real, imaginary) part.
    pub fn ramification_points(&self, precision: u32) -> Result<Vec<Ball>> {
        let dx = self.dx_dz();
        let num = dx.numerator().clone();
        let deg = match num.degree() {
            None => return Err(Error::Degenerate("dx vanishes identically".into())),
            Some(0) => return Ok(Vec::new()),
            Some(d) => d,
        };
        let estimates = companion_roots(&num);
        let tol_exp = precision as i32 / 4;
        let work = precision + 32;
        let mut roots = Vec::with_capacity(deg);
        for (re, im) in estimates {
            roots.push(newton_polish(&num, re, im, work, precision)?);
        }
        let tol = 2f64.powi(-tol_exp);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if roots[i].dist(&roots[j]) <= tol {
                    return Err(Error::Degenerate(format!(
                        "ramification points {} and {} coincide within tolerance",
                        roots[i].to_decimal(12),
                        roots[j].to_decimal(12)
                    )));
                }
            }
            let x2 = dx_second_at_root(&dx, &roots[i])?;
            if x2.abs_upper() <= tol {
                return Err(Error::Degenerate(format!("x'' vanishes at {}", roots[i].to_decimal(12))));
            }
        }
        let key_tol = 2f64.powi(-(precision as i32) / 2);
        roots.sort_by(|a, b| {
            let dr = Float::with_val(work, a.real() - b.real());
            if dr.clone().abs() > key_tol {
                dr.partial_cmp(&0).unwrap_or(std::cmp::Ordering::Equal)
            } else {
                a.imag().partial_cmp(b.imag()).unwrap_or(std::cmp::Ordering::Equal)
            }
        });
        Ok(roots)
    }

    /// Log-vital points: log poles of one curve function that the other's
    /// differential does not share.
    pub fn log_vital_points(&self, side: Side) -> Vec<VitalPoint> {
        match side {
            Side::XFunction => {
                // y = log z has log poles at 0 and ∞; dx has a pole at 0 unless
                // f = -1 and at ∞ unless e^x has degree s - r - f = 0 there.
                let mut out = Vec::new();
                if self.framing == -1 {
                    out.push(VitalPoint::Finite(Rational::new()));
                }
                if self.framing == self.s() as i64 - self.r() as i64 {
                    out.push(VitalPoint::Infinity);
                }
                out
            }
            Side::YFunction => {
                let mut out = vec![VitalPoint::Finite(Rational::from(1))];
                out.extend(self.alphas.iter().map(|a| VitalPoint::Finite(a.clone().recip())));
                out.extend(self.betas.iter().map(|b| VitalPoint::Finite(b.clone().recip())));
                out
            }
        }
    }

    /// `x(p + t) - x(p)` as a ball series, for `p` away from the poles of `dx`.
    pub fn x_difference_series(&self, p: &Ball, truncation: usize) -> Result<TruncatedSeries<Ball>> {
        let dx = self.dx_dz().expand_ball(p, truncation.saturating_sub(1))?;
        Ok(dx.integrate())
    }

    /// Parses the TOML geometry format.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: GeometryConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.into_geometry()
    }
}

fn pow_i(x: &Rational, e: i64) -> Rational {
    let p: Rational = rug::ops::Pow::pow(x.clone(), e.unsigned_abs() as u32);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn companion_roots(p: &Poly) -> Vec<(f64, f64)> {
    let c = p.to_f64();
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

fn newton_polish(p: &Poly, re: f64, im: f64, work: u32, precision: u32) -> Result<Ball> {
    let mut z = Complex::with_val(work, (re, im));
    let target = Float::with_val(work, Float::i_exp(1, -(precision as i32) - 8));
    let mut converged = false;
    for _ in 0..400 {
        let (v, dv) = p.eval_with_derivative(&z);
        if dv.real().is_zero() && dv.imag().is_zero() {
            break;
        }
        let step = Complex::with_val(work, &v / &dv);
        z -= &step;
        let size = Float::with_val(work, step.abs_ref());
        let scale = Float::with_val(work, z.abs_ref()).max(&Float::with_val(work, 1));
        if size <= Float::with_val(work, &target * &scale) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Precision(format!("Newton iteration from ({re}, {im}) did not converge")));
    }
    // A disc of radius deg·|p/p'| about z contains a root.
    let (v, dv) = p.eval_with_derivative(&z);
    let deg = p.degree().unwrap_or(1) as f64;
    let ratio = Complex::with_val(work, &v / &dv);
    let bound = Float::with_val(53, ratio.abs_ref()).to_f64() * deg;
    let mid = Complex::with_val(precision, &z);
    let drift = Float::with_val(53, Complex::with_val(work, &z - &mid).abs_ref()).to_f64();
    Ok(Ball::new(mid, 0.0).with_radius(bound + drift))
}

fn dx_second_at_root(dx: &RationalFunction, rho: &Ball) -> Result<Ball> {
    // At a root of the numerator N of x' = N/D, x'' = N'/D.
    let quotient = RationalFunction::new(dx.numerator().derivative(), dx.poles().clone());
    quotient.eval_ball(rho)
}

/// On-disk geometry description.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub alphas: Vec<String>,
    #[serde(default)]
    pub betas: Vec<String>,
    pub framing: i64,
    #[serde(default)]
    pub kahler_variables: Vec<String>,
    #[serde(default)]
    pub kahler_values: BTreeMap<String, String>,
}

impl GeometryConfig {
    pub fn into_geometry(self) -> Result<StripGeometry> {
        let values: BTreeMap<String, Rational> = self
            .kahler_values
            .iter()
            .map(|(k, v)| parse_rational(v).map(|r| (k.clone(), r)))
            .collect::<Result<_>>()?;
        let entries: Vec<&String> = self.alphas.iter().chain(self.betas.iter()).collect();
        let numeric: Vec<Option<Rational>> = entries.iter().map(|s| parse_rational(s).ok()).collect();
        let all_numeric = numeric.iter().all(Option::is_some);
        if all_numeric {
            let vals: Vec<Rational> = numeric.into_iter().map(Option::unwrap).collect();
            let (a, b) = vals.split_at(self.alphas.len());
            return Ok(StripGeometry::new(a.to_vec(), b.to_vec(), self.framing));
        }
        if numeric.iter().any(Option::is_some) {
            return Err(Error::Parse("parameters mix rational literals and Kähler monomials".into()));
        }
        let monos: Vec<Monomial> = entries.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        for m in &monos {
            for name in m.exponents().keys() {
                if !self.kahler_variables.contains(name) {
                    return Err(Error::Parse(format!("monomial uses undeclared variable {name}")));
                }
            }
        }
        let vals: Vec<Rational> = monos.iter().map(|m| m.eval(&values)).collect::<Result<_>>()?;
        let (a, b) = vals.split_at(self.alphas.len());
        let (ma, mb) = monos.split_at(self.alphas.len());
        Ok(StripGeometry::new(a.to_vec(), b.to_vec(), self.framing)
            .with_kahler(KahlerMap { alphas: ma.to_vec(), betas: mb.to_vec() }))
    }
}
