//! Direct topological recursion on the strip curve at high precision.
//!
//! Every stable correlator `ω_{g,n}` is a finite sum of products of the forms
//! `dz/(z - p_a)^k` with `p_a` a ramification point and `k ≥ 2`, so it is stored
//! as a tensor of ball coefficients over keys `[(a_1, k_1), …, (a_n, k_n)]`.
//! The recursion kernel and integrand are expanded in `t = q - p_i` at each
//! ramification point; the Bergman kernel is the genus-zero
//! `dz_1 dz_2 / (z_1 - z_2)^2`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rug::Rational;

use crate::error::{Error, Result};
use crate::exact::{Ball, Field, LaurentBlock, TruncatedSeries, DEFAULT_PRECISION};
use crate::strip::{Side, StripGeometry};

/// One slot of a basis key: `(ramification index, pole order)`.
pub type Slot = (usize, usize);
pub type Key = Vec<Slot>;

type Local = LaurentBlock<Ball>;

#[derive(Clone, Debug)]
pub struct TrConfig {
    /// Working precision in bits.
    pub precision: u32,
    /// Absolute order of the local expansions; defaults to `4(3g + n) + 8`.
    pub truncation: Option<usize>,
    /// Largest `2g + n - 2` the recursion may reach.
    pub budget: usize,
    /// Recompute at doubled truncation and compare.
    pub check_doubling: bool,
}

impl Default for TrConfig {
    fn default() -> Self {
        TrConfig { precision: DEFAULT_PRECISION, truncation: None, budget: 5, check_doubling: true }
    }
}

impl TrConfig {
    pub fn with_precision(precision: u32) -> Self {
        TrConfig { precision, ..TrConfig::default() }
    }

    fn truncation_for(&self, g: usize, n: usize) -> usize {
        self.truncation.unwrap_or(4 * (3 * g + n) + 8)
    }

    fn tolerance(&self) -> f64 {
        2f64.powi(-(self.precision as i32) / 2)
    }
}

/// The local involution `σ_i` at a ramification point, `σ(t) = -t + a_2 t^2 + …`.
#[derive(Clone, Debug)]
pub struct DeckSeries {
    pub index: usize,
    pub sigma: TruncatedSeries<Ball>,
}

/// `1/(z_1 - z_2)^2`, the coefficient of `dz_1 dz_2` in the Bergman kernel.
pub fn bergman(z1: &Ball, z2: &Ball) -> Result<Ball> {
    let d = z1.sub(z2);
    let inv = d.inv().ok_or_else(|| Error::Pole("Bergman kernel at coincident points".into()))?;
    Ok(inv.mul(&inv))
}

/// Expansion data at one ramification point.
#[derive(Debug)]
pub struct LocalFrame {
    pub index: usize,
    pub center: Ball,
    pub truncation: usize,
    pub precision: u32,
    dx: TruncatedSeries<Ball>,
    u: TruncatedSeries<Ball>,
    sigma: TruncatedSeries<Ball>,
    dsigma: TruncatedSeries<Ball>,
    /// `1 / ((y(q) - y(σ(q))) x'(q))`.
    w: Local,
    /// `½ (t^m - σ^m) w`, indexed by `m - 1`.
    kernel: Vec<Local>,
    /// `σ^m`, indexed by `m`.
    sigma_pows: Vec<TruncatedSeries<Ball>>,
    cache: Mutex<HashMap<(usize, usize, bool), Arc<Local>>>,
}

fn exact_zero(prec: u32) -> Ball {
    Ball::zero(&prec)
}

fn log_one_plus_ball(inv_p: &Ball, truncation: usize) -> TruncatedSeries<Ball> {
    let prec = inv_p.prec();
    let mut pw = Ball::one(&prec);
    TruncatedSeries::from_fn(truncation, &prec, |k| {
        if k == 0 {
            return exact_zero(prec);
        }
        pw = pw.mul(inv_p);
        let v = pw.div_int(k as i64);
        if k % 2 == 0 {
            v.neg()
        } else {
            v
        }
    })
}

impl LocalFrame {
    fn build(geom: &StripGeometry, index: usize, center: Ball, truncation: usize) -> Result<Self> {
        let prec = center.prec();
        let n = truncation;
        // x'(p + t) to t^{n+1}, with the vanishing constant term made exact.
        let mut dx = geom.dx_dz().expand_ball(&center, n + 1)?;
        dx.set_coeff(0, exact_zero(prec));
        let u = dx.integrate();
        // u = c2 t^2 (1 + v); w = t sqrt(1 + v); σ = w^{-1}(-w).
        let c2 = u.coeffs()[2].clone();
        let c2_inv = c2.inv().ok_or_else(|| Error::Degenerate(format!("x'' vanishes at ramification point {index}")))?;
        let mut ratio = u.shift_down(2)?.scale(&c2_inv);
        ratio.set_coeff(0, Ball::one(&prec));
        let root = ratio.pow_rational(&Rational::from((1, 2)))?;
        let w = root.shift_up(1).truncate(n);
        let w_inv = w.reversion()?;
        let sigma = w_inv.compose(&w.neg())?;
        let dsigma = sigma.derivative();

        // Δy = log(1 + t/p) - log(1 + σ/p).
        let inv_p = center
            .inv()
            .ok_or_else(|| Error::Degenerate(format!("ramification point {index} at z = 0")))?;
        let l = log_one_plus_ball(&inv_p, n);
        let dy = l.sub(&l.compose(&sigma)?);
        let denom = LaurentBlock::from_series(dy.shift_down(1)?)
            .shift(1)
            .mul(&LaurentBlock::from_series(dx.truncate(n).shift_down(1)?).shift(1));
        let w_block = denom.inverse()?;

        let mut sigma_pows = vec![TruncatedSeries::one(n, &prec)];
        for m in 1..=n {
            let next = sigma_pows[m - 1].mul(&sigma);
            sigma_pows.push(next);
        }
        let half = Rational::from((1, 2));
        let mut kernel = Vec::with_capacity(n);
        for m in 1..=n {
            let diff = TruncatedSeries::monomial(Ball::one(&prec), m, n).sub(&sigma_pows[m]);
            let lead = diff.shift_down(m).map_err(|_| Error::Precision("deck series lost its order".into()));
            let block = match lead {
                Ok(s) => LaurentBlock::new(m as i64, s),
                Err(_) => LaurentBlock::from_series(diff),
            };
            kernel.push(block.mul(&w_block).scale_rational(&half));
        }
        Ok(LocalFrame {
            index,
            center,
            truncation: n,
            precision: prec,
            dx,
            u,
            sigma,
            dsigma,
            w: w_block,
            kernel,
            sigma_pows,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn deck(&self) -> DeckSeries {
        DeckSeries { index: self.index, sigma: self.sigma.clone() }
    }

    /// `x(p + t) - x(p)`.
    pub fn x_difference(&self) -> &TruncatedSeries<Ball> {
        &self.u
    }

    /// `x'(p + t)`.
    pub fn dx(&self) -> &TruncatedSeries<Ball> {
        &self.dx
    }

    pub fn kernel_inverse_difference(&self) -> &Local {
        &self.w
    }

    /// `dz/(z - p_a)^k` pulled back to `q = p + t` (or `q = p + σ(t)`), as a coefficient of `dt`.
    fn basis(&self, points: &[Ball], a: usize, k: usize, at_sigma: bool) -> Arc<Local> {
        let key = (a, k, at_sigma);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let prec = self.precision;
        let n = self.truncation;
        let value = if a == self.index {
            if at_sigma {
                let s = LaurentBlock::new(1, self.sigma.shift_down(1).expect("σ(0) = 0"));
                let inv = s.inverse().expect("σ'(0) = -1");
                let mut acc = LaurentBlock::from_series(self.dsigma.clone());
                for _ in 0..k {
                    acc = acc.mul(&inv);
                }
                acc
            } else {
                LaurentBlock::new(-(k as i64), TruncatedSeries::one(n + k, &prec))
            }
        } else {
            let d = self.center.sub(&points[a]);
            let lin = TruncatedSeries::from_coeffs(vec![d, Ball::one(&prec)], n, &prec);
            let inv = lin.inverse().expect("distinct ramification points").pow_uint(k as u32);
            if at_sigma {
                let composed = inv.compose(&self.sigma).expect("σ(0) = 0");
                LaurentBlock::from_series(composed.mul(&self.dsigma))
            } else {
                LaurentBlock::from_series(inv)
            }
        };
        let value = Arc::new(value);
        self.cache.lock().unwrap().insert(key, value.clone());
        value
    }

    /// `B(z_j, q)` (or at `σ(q)`) as `Σ_m (m+1) t^m dz_j/(z_j - p)^{m+2}`, keyed by the spectator slot.
    fn bergman_spectator(&self, at_sigma: bool) -> Vec<(Slot, Local)> {
        let prec = self.precision;
        let n = self.truncation;
        (0..n)
            .map(|m| {
                let c = Ball::from_int(m as i64 + 1, &prec);
                let series = if at_sigma {
                    self.sigma_pows[m].mul(&self.dsigma).scale(&c)
                } else {
                    TruncatedSeries::monomial(c, m, n)
                };
                ((self.index, m + 2), LaurentBlock::from_series(series))
            })
            .collect()
    }

    /// `B(q, σ(q)) = σ'(t) / (t - σ(t))^2` as a coefficient of `dt^2`.
    fn bergman_deck(&self) -> Result<Local> {
        let prec = self.precision;
        let diff = TruncatedSeries::variable(self.truncation, &prec).sub(&self.sigma);
        let d = LaurentBlock::new(1, diff.shift_down(1)?);
        let inv = d.inverse()?;
        Ok(inv.mul(&inv).mul(&LaurentBlock::from_series(self.dsigma.clone())))
    }

    /// `Φ(p + t) - Φ(p)` for `dΦ = y dx`, with the principal `log p`.
    pub fn phi(&self) -> Result<TruncatedSeries<Ball>> {
        let log_p = self.center.ln().ok_or_else(|| Error::Degenerate("log of a ramification point at 0".into()))?;
        let inv_p = self.center.inv().expect("nonzero center");
        let y = log_one_plus_ball(&inv_p, self.truncation);
        let y = y.add(&TruncatedSeries::constant(log_p, self.truncation));
        Ok(y.mul(&self.dx.truncate(self.truncation)).integrate())
    }
}

fn pole_bound(factor: &[(Key, Local)]) -> usize {
    factor.iter().map(|(_, l)| (-l.valuation()).max(0) as usize).max().unwrap_or(0)
}

/// `Σ_j a_j b_{-1-j}`, the residue of a product, checking that every needed coefficient is known.
fn residue_of_product(a: &Local, b: &Local) -> Result<Ball> {
    let prec = a.series().ctx().to_owned();
    let lo = a.valuation();
    let hi = -1 - b.valuation();
    let mut acc = Ball::zero(&prec);
    for j in lo..=hi {
        let x = a.coeff(j).ok_or_else(|| Error::Budget("local expansion truncated too early".into()))?;
        if x.is_zero() {
            continue;
        }
        let y = b.coeff(-1 - j).ok_or_else(|| Error::Budget("local expansion truncated too early".into()))?;
        acc = acc.add(&x.mul(&y));
    }
    Ok(acc)
}

/// A stable correlator `ω_{g,n}` as a tensor over pole bases.
#[derive(Clone, Debug)]
pub struct Correlator {
    pub g: usize,
    pub n: usize,
    points: Vec<Ball>,
    terms: BTreeMap<Key, Ball>,
}

impl Correlator {
    pub fn terms(&self) -> &BTreeMap<Key, Ball> {
        &self.terms
    }

    pub fn points(&self) -> &[Ball] {
        &self.points
    }

    /// Coefficient of `dz_1 ⋯ dz_n` at the given points.
    pub fn eval(&self, zs: &[Ball]) -> Result<Ball> {
        if zs.len() != self.n {
            return Err(Error::Invalid(format!("ω_{{{},{}}} takes {} points", self.g, self.n, self.n)));
        }
        let prec = zs[0].prec();
        let mut inv: Vec<Vec<Ball>> = Vec::with_capacity(zs.len());
        for z in zs {
            let row = self
                .points
                .iter()
                .map(|p| z.sub(p).inv().ok_or_else(|| Error::Pole("evaluation at a ramification point".into())))
                .collect::<Result<Vec<_>>>()?;
            inv.push(row);
        }
        let mut acc = Ball::zero(&prec);
        for (key, c) in &self.terms {
            let mut term = c.clone();
            for (slot, &(a, k)) in key.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&inv[slot][a]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Residue in slot `slot` at ramification point `a`, as a tensor in the other slots:
    /// the sum of the `k = 1` coefficients, which the pole basis never produces.
    pub fn residue_in_slot(&self, slot: usize, a: usize) -> BTreeMap<Key, Ball> {
        let mut out: BTreeMap<Key, Ball> = BTreeMap::new();
        for (key, c) in &self.terms {
            if key[slot] == (a, 1) {
                let mut rest = key.clone();
                rest.remove(slot);
                let prec = c.prec();
                let e = out.entry(rest).or_insert_with(|| Ball::zero(&prec));
                *e = e.add(c);
            }
        }
        out
    }

    /// Largest pole order over all slots.
    pub fn max_pole_order(&self) -> usize {
        self.terms.keys().flat_map(|k| k.iter().map(|s| s.1)).max().unwrap_or(0)
    }

    /// Largest coefficient distance between the tensor and its image under swapping two slots.
    pub fn swap_asymmetry(&self, s1: usize, s2: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for (key, c) in &self.terms {
            let mut k2 = key.clone();
            k2.swap(s1, s2);
            let d = match self.terms.get(&k2) {
                Some(c2) => c.dist(c2),
                None => c.abs_f64(),
            };
            worst = worst.max(d);
        }
        worst
    }
}

/// Topological recursion on one geometry with memoized correlators.
pub struct TrSession {
    geom: StripGeometry,
    config: TrConfig,
    points: Vec<Ball>,
    frames: Vec<LocalFrame>,
    memo: Mutex<HashMap<(usize, usize), Arc<Correlator>>>,
}

impl TrSession {
    /// Prepares frames at every ramification point with the given truncation.
    pub fn new(geom: &StripGeometry, config: TrConfig, truncation: usize) -> Result<Self> {
        geom.validate_at(config.precision).into_result()?;
        // Plain TR applies only when x has no log-vital points.
        if !geom.log_vital_points(Side::XFunction).is_empty() {
            return Err(Error::Unsupported("log-vital points on the x side; Log-TR would be needed".into()));
        }
        let points = geom.ramification_points(config.precision)?;
        Self::with_points(geom, config, truncation, points)
    }

    /// Like [`TrSession::new`] with the ramification points supplied in a chosen order.
    pub fn with_points(geom: &StripGeometry, config: TrConfig, truncation: usize, points: Vec<Ball>) -> Result<Self> {
        let frames = std::thread::scope(|scope| {
            let handles: Vec<_> = points
                .iter()
                .enumerate()
                .map(|(i, p)| scope.spawn(move || LocalFrame::build(geom, i, p.clone(), truncation)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("frame thread")).collect::<Result<Vec<_>>>()
        })?;
        Ok(TrSession { geom: geom.clone(), config, points, frames, memo: Mutex::new(HashMap::new()) })
    }

    pub fn geometry(&self) -> &StripGeometry {
        &self.geom
    }

    pub fn points(&self) -> &[Ball] {
        &self.points
    }

    pub fn frames(&self) -> &[LocalFrame] {
        &self.frames
    }

    pub fn deck(&self, i: usize) -> DeckSeries {
        self.frames[i].deck()
    }

    /// `ω_{g,n}` for `2g + n - 2 > 0`.
    pub fn omega(&self, g: usize, n: usize) -> Result<Arc<Correlator>> {
        if n == 0 || 2 * g + n < 3 {
            return Err(Error::Unsupported(format!("ω_{{{g},{n}}} is not a stable correlator")));
        }
        if 2 * g + n - 2 > self.config.budget {
            return Err(Error::Budget(format!(
                "ω_{{{g},{n}}} has 2g+n-2 = {} beyond the budget {}",
                2 * g + n - 2,
                self.config.budget
            )));
        }
        if let Some(c) = self.memo.lock().unwrap().get(&(g, n)) {
            return Ok(c.clone());
        }
        let c = Arc::new(self.compute(g, n)?);
        Ok(self.memo.lock().unwrap().entry((g, n)).or_insert(c).clone())
    }

    /// Local factor of `ω_{g', |I'|+1}(I', q)` (or at `σ(q)`) keyed by spectator slots.
    fn local_factor(&self, frame: &LocalFrame, g: usize, nspec: usize, at_sigma: bool) -> Result<Vec<(Key, Local)>> {
        if g == 0 && nspec == 1 {
            return Ok(frame.bergman_spectator(at_sigma).into_iter().map(|(s, l)| (vec![s], l)).collect());
        }
        let corr = self.omega(g, nspec + 1)?;
        let mut grouped: BTreeMap<Key, Local> = BTreeMap::new();
        for (key, c) in corr.terms() {
            let (a, k) = key[0];
            let b = frame.basis(&self.points, a, k, at_sigma);
            let term = b.scale(c);
            let rest = key[1..].to_vec();
            match grouped.get_mut(&rest) {
                Some(acc) => *acc = acc.add(&term),
                None => {
                    grouped.insert(rest, term);
                }
            }
        }
        Ok(grouped.into_iter().collect())
    }

    /// `ω_{g-1, n+2}(I, q, σ(q))` keyed by the spectator slots of `I`.
    fn diagonal_factor(&self, frame: &LocalFrame, g: usize, nspec: usize) -> Result<Vec<(Key, Local)>> {
        if g == 0 && nspec == 0 {
            return Ok(vec![(Vec::new(), frame.bergman_deck()?)]);
        }
        let corr = self.omega(g, nspec + 2)?;
        // Group by (rest, first slot) and fold the second slot into one σ-side series.
        let mut inner: BTreeMap<(Key, Slot), Local> = BTreeMap::new();
        for (key, c) in corr.terms() {
            let (b, kb) = key[1];
            let term = frame.basis(&self.points, b, kb, true).scale(c);
            let idx = (key[2..].to_vec(), key[0]);
            match inner.get_mut(&idx) {
                Some(acc) => *acc = acc.add(&term),
                None => {
                    inner.insert(idx, term);
                }
            }
        }
        let mut out: BTreeMap<Key, Local> = BTreeMap::new();
        for ((rest, (a, ka)), s) in inner {
            let term = frame.basis(&self.points, a, ka, false).mul(&s);
            match out.get_mut(&rest) {
                Some(acc) => *acc = acc.add(&term),
                None => {
                    out.insert(rest, term);
                }
            }
        }
        Ok(out.into_iter().collect())
    }

    /// The recursion integrand at one frame, keyed by spectator slots over `I = {0..n}`.
    fn integrand(&self, frame: &LocalFrame, g: usize, n: usize) -> Result<BTreeMap<Key, Local>> {
        let mut total: BTreeMap<Key, Local> = BTreeMap::new();
        let mut add = |key: Key, l: Local| match total.get_mut(&key) {
            Some(acc) => *acc = acc.add(&l),
            None => {
                total.insert(key, l);
            }
        };
        if g >= 1 {
            for (key, l) in self.diagonal_factor(frame, g - 1, n)? {
                add(key, l);
            }
        }
        for g1 in 0..=g {
            let g2 = g - g1;
            for mask in 0u32..(1 << n) {
                let n1 = mask.count_ones() as usize;
                let n2 = n - n1;
                if (g1 == 0 && n1 == 0) || (g2 == 0 && n2 == 0) {
                    continue;
                }
                let mut f1 = self.local_factor(frame, g1, n1, false)?;
                let mut f2 = self.local_factor(frame, g2, n2, true)?;
                // A Bergman spectator term t^m can only reach the residue while m stays
                // below the pole order of its partner.
                if g1 == 0 && n1 == 1 {
                    let bound = pole_bound(&f2);
                    f1.retain(|(k, _)| k[0].1 - 2 <= bound);
                }
                if g2 == 0 && n2 == 1 {
                    let bound = pole_bound(&f1);
                    f2.retain(|(k, _)| k[0].1 - 2 <= bound);
                }
                for (k1, l1) in &f1 {
                    for (k2, l2) in &f2 {
                        let mut key = Vec::with_capacity(n);
                        let (mut i1, mut i2) = (0, 0);
                        for j in 0..n {
                            if mask & (1 << j) != 0 {
                                key.push(k1[i1]);
                                i1 += 1;
                            } else {
                                key.push(k2[i2]);
                                i2 += 1;
                            }
                        }
                        add(key, l1.mul(l2));
                    }
                }
            }
        }
        Ok(total)
    }

    fn compute(&self, g: usize, n1: usize) -> Result<Correlator> {
        let n = n1 - 1;
        // Make sure every dependency is memoized before fanning out over frames.
        if g >= 1 && !(g == 1 && n == 0) {
            self.omega(g - 1, n + 2)?;
        }
        for g1 in 0..=g {
            for k in 0..=n {
                if 2 * g1 + k + 1 >= 3 && (g1, k) != (g, n) {
                    self.omega(g1, k + 1)?;
                }
            }
        }
        let parts: Vec<Result<BTreeMap<Key, Ball>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .frames
                .iter()
                .map(|frame| scope.spawn(move || self.recurse_at(frame, g, n)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("recursion thread")).collect()
        });
        let mut terms = BTreeMap::new();
        for p in parts {
            terms.extend(p?);
        }
        Ok(Correlator { g, n: n1, points: self.points.clone(), terms })
    }

    fn recurse_at(&self, frame: &LocalFrame, g: usize, n: usize) -> Result<BTreeMap<Key, Ball>> {
        let integrand = self.integrand(frame, g, n)?;
        let mut out = BTreeMap::new();
        for (spec, l) in integrand {
            let pole = (-l.valuation()).max(0) as usize;
            for m in 1..=(pole + 1).min(frame.kernel.len()) {
                let r = residue_of_product(&frame.kernel[m - 1], &l)?;
                if r.is_zero() {
                    continue;
                }
                let mut key = Vec::with_capacity(n + 1);
                key.push((frame.index, m + 1));
                key.extend(spec.iter().copied());
                out.insert(key, r);
            }
        }
        Ok(out)
    }

    /// `F_g = (1/(2-2g)) Σ_i Res_{q→p_i} ω_{g,1}(q) Φ(q)`, with `shift` added to `Φ` at every point.
    pub fn free_energy_with_shift(&self, g: usize, shift: &Ball) -> Result<Ball> {
        if g < 2 {
            return Err(Error::Unsupported("free energy needs g >= 2".into()));
        }
        let w = self.omega(g, 1)?;
        let prec = self.config.precision;
        let mut acc = Ball::zero(&prec);
        for frame in &self.frames {
            let phi = frame.phi()?.add(&TruncatedSeries::constant(shift.clone(), frame.truncation));
            for (key, c) in w.terms() {
                let (a, k) = key[0];
                if a != frame.index {
                    continue;
                }
                let coeff = phi
                    .coeff(k - 1)
                    .ok_or_else(|| Error::Budget("Φ expansion truncated too early".into()))?;
                acc = acc.add(&c.mul(coeff));
            }
        }
        Ok(acc.div_int(2 - 2 * g as i64))
    }

    pub fn free_energy(&self, g: usize) -> Result<Ball> {
        self.free_energy_with_shift(g, &Ball::zero(&self.config.precision))
    }

    /// Per-point `Res_{q→p_i} (x(q) - x(p_i)) ω_{g,1}(q)`; these vanish, which is why the
    /// branch of `log p_i` in `Φ` cannot matter.
    pub fn x_weighted_residues(&self, g: usize) -> Result<Vec<Ball>> {
        let w = self.omega(g, 1)?;
        let prec = self.config.precision;
        Ok(self
            .frames
            .iter()
            .map(|frame| {
                let mut acc = Ball::zero(&prec);
                for (key, c) in w.terms() {
                    let (a, k) = key[0];
                    if a == frame.index {
                        if let Some(x) = frame.u.coeff(k - 1) {
                            acc = acc.add(&c.mul(x));
                        }
                    }
                }
                acc
            })
            .collect())
    }
}

/// The deck series at ramification point `i`.
pub fn deck(geom: &StripGeometry, i: usize, truncation: usize, precision: u32) -> Result<DeckSeries> {
    let points = geom.ramification_points(precision)?;
    let p = points
        .get(i)
        .ok_or_else(|| Error::Invalid(format!("no ramification point with index {i}")))?;
    let frame = LocalFrame::build(geom, i, p.clone(), truncation)?;
    let d = frame.deck();
    let inv = d.sigma.compose(&d.sigma)?;
    let id = TruncatedSeries::variable(truncation, &precision);
    let tol = 2f64.powi(-(precision as i32) / 2);
    let worst = inv.sub(&id).coeffs().iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::Precision(format!("deck involution defect {worst:e} at point {i}")));
    }
    Ok(d)
}

/// `ω_{g,n}` on a fresh session.
pub fn omega(g: usize, n: usize, geom: &StripGeometry, config: &TrConfig) -> Result<Arc<Correlator>> {
    let session = TrSession::new(geom, config.clone(), config.truncation_for(g, n))?;
    session.omega(g, n)
}

/// `F_g` by topological recursion, with the order-doubling check when configured.
pub fn tr_free_energy_with(g: usize, geom: &StripGeometry, config: &TrConfig) -> Result<Ball> {
    let t = config.truncation_for(g, 1);
    let f = TrSession::new(geom, config.clone(), t)?.free_energy(g)?;
    if config.check_doubling {
        let f2 = TrSession::new(geom, config.clone(), 2 * t)?.free_energy(g)?;
        let scale = f.abs_f64().max(f64::MIN_POSITIVE);
        let drift = f.dist(&f2) / scale;
        if drift > config.tolerance() {
            return Err(Error::Precision(format!("order doubling moved F_{g} by {drift:e} (relative)")));
        }
    }
    Ok(f)
}

/// `F_g` by topological recursion at `precision` bits with default settings.
pub fn tr_free_energy(g: usize, geom: &StripGeometry, precision: u32) -> Result<Ball> {
    tr_free_energy_with(g, geom, &TrConfig::with_precision(precision))
}

/// Deterministic sample points from a Halton sequence, kept at least `min_dist`
/// away from every listed pole.
pub fn sample_points(count: usize, seed: u64, poles: &[Ball], min_dist: f64, precision: u32) -> Vec<Ball> {
    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    let mut out = Vec::with_capacity(count);
    let mut i = seed + 1;
    while out.len() < count {
        let re = -3.0 + 6.0 * radical_inverse(i, 2);
        let im = -3.0 + 6.0 * radical_inverse(i, 3);
        i += 1;
        let z = Ball::from_f64(re, im, precision);
        if poles.iter().all(|p| z.dist(p) > min_dist) {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn conifold() -> StripGeometry {
        StripGeometry::new(vec![q(1, 2)], vec![], 0)
    }

    fn cfg(p: u32) -> TrConfig {
        TrConfig { precision: p, truncation: None, budget: 5, check_doubling: false }
    }

    #[test]
    fn bergman_basics() {
        let a = Ball::from_f64(0.5, 1.0, 128);
        let b = Ball::from_f64(-2.0, 0.25, 128);
        assert!(bergman(&a, &b).unwrap().dist(&bergman(&b, &a).unwrap()) < 1e-35);
        let z = Ball::from_f64(3.0, 0.0, 128);
        let v = bergman(&Ball::zero(&128), &z).unwrap();
        assert!((v.real().to_f64() - 1.0 / 9.0).abs() < 1e-30);
        assert!(bergman(&z, &z).is_err());
    }

    #[test]
    fn deck_contracts() {
        let p = 256;
        for geom in [conifold(), StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0)] {
            for i in 0..geom.ramification_points(p).unwrap().len() {
                let t = 20;
                let d = deck(&geom, i, t, p).unwrap();
                assert!(d.sigma.coeffs()[0].is_zero());
                assert!((d.sigma.coeffs()[1].real().to_f64() + 1.0).abs() < 1e-60);
                let pt = geom.ramification_points(p).unwrap()[i].clone();
                let u = geom.x_difference_series(&pt, t + 1).unwrap();
                let mut u = u;
                u.set_coeff(1, Ball::zero(&p));
                let moved = u.compose(&d.sigma).unwrap().sub(&u.truncate(t));
                let worst = moved.coeffs().iter().map(|c| c.abs_f64()).fold(0.0, f64::max);
                assert!(worst < 2f64.powi(-(p as i32) / 2), "x-invariance defect {worst:e}");
            }
        }
    }

    #[test]
    fn conifold_deck_second_coefficient() {
        // c2 (σ^2 - t^2) + c3 (σ^3 - t^3) = O(t^4) with σ = -t + a2 t^2 gives a2 = -c3/c2.
        let p = 256;
        let geom = conifold();
        let pts = geom.ramification_points(p).unwrap();
        let i = pts.iter().position(|z| z.imag().to_f64() > 0.0).unwrap();
        assert!((pts[i].real().to_f64() - 1.0).abs() < 1e-60);
        let d = deck(&geom, i, 8, p).unwrap();
        let u = geom.x_difference_series(&pts[i], 4).unwrap();
        let a2 = u.coeffs()[3].mul(&u.coeffs()[2].inv().unwrap()).neg();
        assert!(d.sigma.coeffs()[2].dist(&a2) < 1e-60);
    }

    #[test]
    fn omega_03_matches_closed_form() {
        // With K = ½∫_{σq}^q B / (ω_{0,1}(q) - ω_{0,1}(σq)), a leading-order local computation
        // (x ~ c t^2, y ~ t/p) gives ω_{0,3} = -Σ_i p_i / x''(p_i) · Π_j dz_j/(z_j - p_i)^2.
        let geom = StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0);
        let s = TrSession::new(&geom, cfg(192), 20).unwrap();
        let w = s.omega(0, 3).unwrap();
        for (i, frame) in s.frames().iter().enumerate() {
            let x2 = frame.dx().coeffs()[1].clone();
            let want = frame.center.mul(&x2.inv().unwrap()).neg();
            let got = w.terms().get(&vec![(i, 2), (i, 2), (i, 2)]).unwrap();
            assert!(got.dist(&want) < 1e-40, "{got} vs {want}");
        }
        let others: f64 = w
            .terms()
            .iter()
            .filter(|(k, _)| k.iter().any(|s| s.1 != 2) || k.iter().any(|s| s.0 != k[0].0))
            .map(|(_, c)| c.abs_f64())
            .fold(0.0, f64::max);
        assert!(others < 1e-40);
    }

    #[test]
    fn symmetry_and_residue_freeness() {
        let geom = conifold();
        let s = TrSession::new(&geom, cfg(192), 24).unwrap();
        let tol = 1e-40;
        for (g, n) in [(0, 3), (0, 4), (1, 1), (1, 2), (2, 1)] {
            let w = s.omega(g, n).unwrap();
            for a in 0..n {
                for b in a + 1..n {
                    assert!(w.swap_asymmetry(a, b) < tol, "ω_{g},{n} slots {a},{b}");
                }
                for i in 0..s.points().len() {
                    assert!(w.residue_in_slot(a, i).values().all(|c| c.abs_f64() < tol));
                }
            }
        }
        let w = s.omega(0, 3).unwrap();
        let pts = sample_points(6, 7, s.points(), 0.3, 192);
        let v = w.eval(&pts[0..3]).unwrap();
        let v2 = w.eval(&[pts[2].clone(), pts[0].clone(), pts[1].clone()]).unwrap();
        assert!(v.dist(&v2) < tol);
    }

    #[test]
    fn conifold_genus_two() {
        let geom = conifold();
        let f = tr_free_energy_with(2, &geom, &cfg(256)).unwrap();
        let want = -5.0 / 576.0;
        assert!((f.real().to_f64() - want).abs() < 1e-15, "{f}");
        assert!(f.imag().to_f64().abs() < 1e-30);
    }

    #[test]
    fn phi_shift_and_log_branch_are_immaterial() {
        let geom = StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0);
        let s = TrSession::new(&geom, cfg(256), 36).unwrap();
        let f = s.free_energy(2).unwrap();
        let f_shift = s.free_energy_with_shift(2, &Ball::from_f64(1.75, -0.5, 256)).unwrap();
        assert!(f.dist(&f_shift) < 1e-60);
        for r in s.x_weighted_residues(2).unwrap() {
            assert!(r.abs_f64() < 1e-60, "{r}");
        }
    }

    #[test]
    fn ramification_order_is_immaterial() {
        let geom = StripGeometry::new(vec![q(2, 1), q(1, 3)], vec![], 0);
        let s = TrSession::new(&geom, cfg(192), 36).unwrap();
        let mut pts = s.points().to_vec();
        pts.reverse();
        let r = TrSession::with_points(&geom, cfg(192), 36, pts).unwrap();
        assert!(s.free_energy(2).unwrap().dist(&r.free_energy(2).unwrap()) < 1e-45);
    }

    #[test]
    fn bergman_difference_starts_at_first_order() {
        // ½∫_{σq}^q B(z, ·) = ½ Σ_m (t^m - σ^m) dz/(z-p)^{m+1}; the m = 1 numerator is 2t + O(t^2)
        // and no m = 0 term exists.
        let s = TrSession::new(&conifold(), cfg(128), 16).unwrap();
        for frame in s.frames() {
            let k1 = &frame.kernel[0];
            let numer = k1.mul(&frame.kernel_inverse_difference().inverse().unwrap());
            assert_eq!(numer.valuation(), 1);
            assert!(numer.coeff(1).unwrap().dist(&Ball::one(&128)) < 1e-30);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let geom = conifold();
        let c = TrConfig { budget: 2, ..cfg(128) };
        let s = TrSession::new(&geom, c, 20).unwrap();
        assert!(matches!(s.omega(2, 1), Err(Error::Budget(_))));
        assert!(s.omega(1, 1).is_ok());
    }
}
