use serde_json::json;
use stripfe_core::bps::{coefficient_crosscheck, omega_table, z_product_log_series};
use stripfe_core::free_energy::{fg_closed, fg_residue, lemma_grid};
use stripfe_core::trcore::{sample_points, tr_free_energy_with, TrConfig, TrSession};
use stripfe_core::{Ball, Error, Field, Rational, Result};

use crate::config::RunConfig;
use crate::output::Emitter;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget(_) | Error::Precision(_) => EXIT_BUDGET,
        Error::Invalid(_) | Error::Parse(_) | Error::Degenerate(_) | Error::Ambiguous(_) => EXIT_VALIDATION,
        _ => 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RouteArg {
    Closed,
    Residue,
    Tr,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lemmas,
    Routes,
    Product,
    Tr,
}

fn tr_tolerance(precision: u32) -> f64 {
    2f64.powi(-(precision as i32) / 4)
}

fn relative_error(tr: &Ball, exact: &Rational) -> f64 {
    let e = Ball::from_rational(exact, &tr.prec());
    tr.dist(&e) / e.abs_f64().max(f64::MIN_POSITIVE)
}

pub fn validate(cfg: &RunConfig, em: &mut Emitter) -> u8 {
    let report = cfg.geometry.validate_at(cfg.precision);
    if report.is_ok() {
        em.record_as(&[("valid", json!(true)), ("issue", json!(""))], "ok");
        return 0;
    }
    for issue in &report.issues {
        em.record_as(&[("valid", json!(false)), ("issue", json!(issue.to_string()))], format!("invalid: {issue}"));
    }
    EXIT_VALIDATION
}

pub fn free_energy(cfg: &RunConfig, route: RouteArg, em: &mut Emitter) -> Result<u8> {
    if cfg.g_max < 2 {
        return Err(Error::Invalid("--g-max must be at least 2".into()));
    }
    cfg.geometry.validate_at(cfg.precision).into_result()?;
    let gs: Vec<usize> = (2..=cfg.g_max).collect();
    let want_exact = matches!(route, RouteArg::Closed | RouteArg::Residue | RouteArg::All);
    let want_tr = matches!(route, RouteArg::Tr | RouteArg::All);

    let tr_config = TrConfig::with_precision(cfg.precision);
    let tr_values: Vec<Option<Result<Ball>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = gs
            .iter()
            .map(|&g| {
                let tc = tr_config.clone();
                scope.spawn(move || want_tr.then(|| tr_free_energy_with(g, &cfg.geometry, &tc)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread")).collect()
    });

    let mut code = 0;
    for (g, tr) in gs.iter().copied().zip(tr_values) {
        let closed = if want_exact || want_tr { Some(fg_closed(g, &cfg.geometry)?) } else { None };
        if matches!(route, RouteArg::Closed | RouteArg::All) {
            let v = closed.as_ref().expect("closed computed");
            em.record(&[("g", json!(g)), ("route", json!("closed")), ("value", json!(v.to_string()))]);
        }
        let mut residue = None;
        if matches!(route, RouteArg::Residue | RouteArg::All) {
            let v = fg_residue(g, &cfg.geometry)?;
            em.record(&[("g", json!(g)), ("route", json!("residue")), ("value", json!(v.to_string()))]);
            residue = Some(v);
        }
        let mut tr_err = None;
        if let Some(tr) = tr {
            let v = tr?;
            em.record(&[("g", json!(g)), ("route", json!("tr")), ("value", json!(v.real_with_bound(40)))]);
            tr_err = Some(relative_error(&v, closed.as_ref().expect("closed computed")));
        }
        if route == RouteArg::All {
            let exact_ok = residue.as_ref() == closed.as_ref();
            let err = tr_err.expect("tr computed");
            let tr_ok = err < tr_tolerance(cfg.precision);
            if !(exact_ok && tr_ok) {
                code = EXIT_MISMATCH;
            }
            let verdict = format!(
                "closed=residue {}; tr relative error {:.3e} {}",
                if exact_ok { "ok" } else { "MISMATCH" },
                err,
                if tr_ok { "ok" } else { "MISMATCH" }
            );
            em.record(&[("g", json!(g)), ("route", json!("verdict")), ("value", json!(verdict))]);
        } else if let Some(err) = tr_err {
            if err >= tr_tolerance(cfg.precision) {
                code = EXIT_MISMATCH;
            }
        }
    }
    Ok(code)
}

pub fn bps_table(cfg: &RunConfig, em: &mut Emitter) -> Result<u8> {
    cfg.geometry.validate().into_result()?;
    let table = omega_table(&cfg.geometry)?;
    for (rec, line) in table.records().into_iter().zip(table.lines()) {
        em.record_as(
            &[("charge", json!(rec.charge)), ("monomial", json!(rec.monomial)), ("omega", json!(rec.omega))],
            line,
        );
    }
    Ok(0)
}

pub fn z_series(cfg: &RunConfig, log: bool, em: &mut Emitter) -> Result<u8> {
    cfg.geometry.validate().into_result()?;
    let s = z_product_log_series(&cfg.geometry, cfg.q_order, cfg.degree)?;
    let s = if log { s } else { s.exp()? };
    for (q, m, c) in s.triples() {
        em.record(&[("qpow", json!(q)), ("monomial", json!(m)), ("coeff", json!(c.to_string()))]);
    }
    Ok(0)
}

struct SuiteResult {
    checks: usize,
    first_failure: Option<String>,
}

impl SuiteResult {
    fn new() -> Self {
        SuiteResult { checks: 0, first_failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }
}

pub fn verify(cfg: &RunConfig, suite: Suite, em: &mut Emitter) -> Result<u8> {
    let geom = &cfg.geometry;
    let mut r = SuiteResult::new();
    match suite {
        Suite::Lemmas => {
            for c in lemma_grid(6)? {
                r.check(c.holds(), || format!("{} ({}): {} != {}", c.lemma, c.args, c.computed, c.expected));
            }
        }
        Suite::Routes => {
            geom.validate().into_result()?;
            for g in 2..=cfg.g_max.max(2) {
                let (c, s) = (fg_closed(g, geom)?, fg_residue(g, geom)?);
                r.check(c == s, || format!("g={g}: closed {c} != residue {s}"));
            }
        }
        Suite::Product => {
            geom.validate().into_result()?;
            for d in 1..=6 {
                for g in 2..=5 {
                    let rep = coefficient_crosscheck(geom, d, g)?;
                    r.check(rep.passed(), || format!("d={d}, g={g}: {}", rep.failures().join("; ")));
                }
            }
        }
        Suite::Tr => {
            let tol = tr_tolerance(cfg.precision);
            let tc = TrConfig::with_precision(cfg.precision);
            for g in 2..=cfg.g_max.clamp(2, 3) {
                let v = tr_free_energy_with(g, geom, &tc)?;
                let c = fg_closed(g, geom)?;
                let err = relative_error(&v, &c);
                r.check(err < tol, || format!("g={g}: tr {} vs closed {c}, relative error {err:.3e}", v.real_with_bound(30)));
            }
            let session = TrSession::new(geom, tc, 36)?;
            let f = session.free_energy(2)?;
            let shifted = session.free_energy_with_shift(2, &Ball::from_f64(1.5, -0.25, cfg.precision))?;
            r.check(f.dist(&shifted) < tol * f.abs_f64(), || "F_2 moved when a constant was added to Φ".into());
            for (i, res) in session.x_weighted_residues(2)?.iter().enumerate() {
                r.check(res.abs_f64() < tol, || format!("Res (x - x(p)) ω_(2,1) at point {i} is {res}"));
            }
            let w = session.omega(0, 3)?;
            let pts = sample_points(3, cfg.seed, session.points(), 0.25, cfg.precision);
            let a = w.eval(&pts)?;
            let b = w.eval(&[pts[1].clone(), pts[2].clone(), pts[0].clone()])?;
            r.check(a.dist(&b) < tol * a.abs_f64().max(1.0), || "ω_(0,3) is not symmetric at sample points".into());
            for frame in session.frames() {
                let d = frame.deck();
                let twice = d.sigma.compose(&d.sigma)?;
                let worst = (0..=frame.truncation)
                    .map(|k| {
                        let c = twice.coeffs()[k].clone();
                        if k == 1 { c.sub(&Ball::one(&cfg.precision)).abs_f64() } else { c.abs_f64() }
                    })
                    .fold(0.0, f64::max);
                r.check(worst < tol, || format!("deck involution defect {worst:.3e} at point {}", frame.index));
            }
        }
    }
    let name = format!("{suite:?}").to_lowercase();
    let passed = r.first_failure.is_none();
    let text = match &r.first_failure {
        None => format!("{name}: {} checks passed", r.checks),
        Some(f) => format!("{name}: FAILED over {} checks; first counterexample: {f}", r.checks),
    };
    em.record_as(
        &[
            ("suite", json!(name)),
            ("checks", json!(r.checks)),
            ("passed", json!(passed)),
            ("first_failure", json!(r.first_failure.clone().unwrap_or_default())),
        ],
        text,
    );
    Ok(if passed { 0 } else { EXIT_MISMATCH })
}
