use std::collections::BTreeMap;
use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const SPP: &str = r#"
alphas = ["Q^-1", "mu"]
framing = 0
kahler_variables = ["Q", "mu"]
[kahler_values]
Q = "2"
mu = "1/3"
"#;

const CONIFOLD: &str = r#"
alphas = ["Q"]
framing = 0
kahler_variables = ["Q"]
[kahler_values]
Q = "1/2"
"#;

fn config(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], cfg: &NamedTempFile) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stripfe"));
    cmd.env_remove("STRIPFE_PRECISION").arg(args[0]).arg(cfg.path()).args(&args[1..]);
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn validate_accepts_spp() {
    let o = run(&["validate"], &config(SPP));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ok\n");
}

#[test]
fn validate_rejects_forbidden_framing() {
    // r = 1, s = 0 so s - r = -1
    let o = run(&["validate"], &config("alphas = [\"1/2\"]\nframing = -1\n"));
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("framing"), "{out}");
    assert!(out.contains("s - r"), "{out}");
}

#[test]
fn validate_rejects_collision() {
    let o = run(&["validate"], &config("alphas = [\"1/2\", \"1/2\"]\nframing = 0\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("collision"));
}

#[test]
fn parse_errors_exit_two() {
    let o = run(&["validate"], &config("alphas = [\"one half\"]\n"));
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate"], &config("alphas = [\"1/2\"]\n[run]\nbogus = 1\n"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn low_precision_is_rejected() {
    let o = run(&["validate", "--precision", "32"], &config(SPP));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conifold_closed_genus_two() {
    let o = run(&["free-energy", "--g-max", "2", "--route", "closed"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2, closed, -5/576\n");
}

#[test]
fn closed_and_residue_values_are_identical() {
    let cfg = config(SPP);
    let values = |route: &str| -> Vec<(u64, String)> {
        let o = run(&["free-energy", "--g-max", "5", "--route", route, "--format", "records"], &cfg);
        assert_eq!(o.status.code(), Some(0));
        records(&o)
            .into_iter()
            .map(|r| {
                assert_eq!(r["route"], route);
                (r["g"].as_u64().unwrap(), r["value"].as_str().unwrap().to_string())
            })
            .collect()
    };
    let closed = values("closed");
    assert_eq!(closed.len(), 4);
    assert_eq!(closed, values("residue"));
}

#[test]
fn g_max_below_two_is_rejected() {
    let o = run(&["free-energy", "--g-max", "1"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spp_bps_table() {
    let o = run(&["bps-table"], &config(SPP));
    assert_eq!(o.status.code(), Some(0));
    let expected = [
        "Omega(nD0) = -3",
        "Omega(D2_Q-kD0) = 1",
        "Omega(D2_Q*mu-kD0) = -1",
        "Omega(D2_mu-kD0) = 1",
        "Omega(D2bar_Q-kD0) = 1",
        "Omega(D2bar_Q*mu-kD0) = -1",
        "Omega(D2bar_mu-kD0) = 1",
    ];
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), expected);
}

#[test]
fn bps_table_needs_kahler_map() {
    let o = run(&["bps-table"], &config("alphas = [\"1/2\"]\nframing = 0\n"));
    assert_eq!(o.status.code(), Some(2));
}

/// Expands prod_n (1 - Q q^n)^n / (1 - q^n)^n with integer arithmetic.
fn conifold_product(q_order: usize, degree: usize) -> BTreeMap<(usize, usize), i64> {
    let mut z = vec![vec![0i64; degree + 1]; q_order + 1];
    z[0][0] = 1;
    let times = |z: &mut Vec<Vec<i64>>, qa: usize, qd: usize, c: i64| {
        let old = z.clone();
        for a in 0..=q_order {
            for d in 0..=degree {
                if a >= qa && d >= qd {
                    z[a][d] += c * old[a - qa][d - qd];
                }
            }
        }
    };
    for n in 1..=q_order {
        for _ in 0..n {
            times(&mut z, n, 1, -1);
            // 1/(1 - q^n) = 1 + q^n + q^2n + ...
            for a in n..=q_order {
                for d in 0..=degree {
                    z[a][d] += z[a - n][d];
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (a, row) in z.iter().enumerate() {
        for (d, &c) in row.iter().enumerate() {
            if c != 0 {
                out.insert((a, d), c);
            }
        }
    }
    out
}

#[test]
fn conifold_z_series_matches_direct_expansion() {
    let o = run(&["z-series", "--q-order", "3", "--degree", "2", "--format", "records"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(0));
    let got: BTreeMap<(usize, usize), i64> = records(&o)
        .into_iter()
        .map(|r| {
            let m = r["monomial"].as_str().unwrap();
            let d = match m {
                "1" => 0,
                "Q" => 1,
                _ => m.strip_prefix("Q^").unwrap().parse().unwrap(),
            };
            let c = r["coeff"].as_str().unwrap().parse().unwrap();
            ((r["qpow"].as_u64().unwrap() as usize, d), c)
        })
        .collect();
    assert_eq!(got, conifold_product(3, 2));
}

#[test]
fn verify_lemmas_passes() {
    let o = run(&["verify", "--suite", "lemmas"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("lemmas: "));
}

#[test]
fn verify_routes_and_product_pass() {
    let cfg = config(SPP);
    for suite in ["routes", "product"] {
        let o = run(&["verify", "--suite", suite, "--format", "records"], &cfg);
        assert_eq!(o.status.code(), Some(0));
        let r = &records(&o)[0];
        assert_eq!(r["passed"], true);
        assert!(r["checks"].as_u64().unwrap() > 0);
    }
}

#[test]
fn tr_route_reports_error_bound_and_agrees() {
    let o = run(&["free-energy", "--g-max", "2", "--route", "all", "--precision", "128"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("2, tr, -8.68055555") && lines[2].contains("+/-"), "{out}");
    assert!(lines[3].starts_with("2, verdict, closed=residue ok; tr relative error"), "{out}");
    assert!(lines[3].ends_with(" ok"), "{out}");
}

#[test]
fn tr_budget_failure_exits_four() {
    // the numeric route caps 2g + n - 2 at 5
    let o = run(&["free-energy", "--g-max", "4", "--route", "tr", "--precision", "64"], &config(CONIFOLD));
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn precision_comes_from_environment() {
    let cfg = config(CONIFOLD);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stripfe"));
    let o = cmd.env("STRIPFE_PRECISION", "40").arg("validate").arg(cfg.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn records_are_deterministic() {
    let cfg = config(SPP);
    let args = ["z-series", "--q-order", "3", "--degree", "2", "--format", "records", "--seed", "7"];
    let a = run(&args, &cfg);
    let b = run(&args, &cfg);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}
