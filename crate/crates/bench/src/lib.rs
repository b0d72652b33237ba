//! Fixture geometries shared by the benchmarks.

use stripfe_core::StripGeometry;

const CONIFOLD: &str = r#"
alphas = ["Q"]
framing = 0
kahler_variables = ["Q"]
[kahler_values]
Q = "1/2"
"#;

const SPP: &str = r#"
alphas = ["Q^-1", "mu"]
framing = 0
kahler_variables = ["Q", "mu"]
[kahler_values]
Q = "1/2"
mu = "1/3"
"#;

const SIX_PUNCTURED: &str = r#"
alphas = ["Q1", "Q1*Q2*Q3"]
betas = ["Q1*Q2"]
framing = 0
kahler_variables = ["Q1", "Q2", "Q3"]
[kahler_values]
Q1 = "1/2"
Q2 = "2/3"
Q3 = "3/5"
"#;

fn load(text: &str) -> StripGeometry {
    StripGeometry::from_toml(text).expect("fixture geometry")
}

pub fn conifold() -> StripGeometry {
    load(CONIFOLD)
}

pub fn spp() -> StripGeometry {
    load(SPP)
}

pub fn six_punctured() -> StripGeometry {
    load(SIX_PUNCTURED)
}

pub fn all() -> Vec<(&'static str, StripGeometry)> {
    vec![("conifold", conifold()), ("spp", spp()), ("six_punctured", six_punctured())]
}
