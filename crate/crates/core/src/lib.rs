//! Free energies, BPS index tables and partition-function series for
//! strip-geometry mirror curves.
//!
//! The genus-g free energy `F_g` is available through three independent
//! routes: an exact closed formula ([`free_energy::fg_closed`]), an exact
//! residue computation on the x–y dual side ([`free_energy::fg_residue`]) and
//! a high-precision topological recursion ([`trcore::tr_free_energy`]).

pub mod bps;
pub mod dual;
pub mod error;
pub mod exact;
pub mod free_energy;
pub mod polylog;
pub mod strip;
pub mod trcore;

pub use error::{Error, Result};
pub use exact::{bernoulli, s_inverse_series, Ball, Field, Integer, LaurentBlock, Monomial, Rational, TruncatedSeries};
pub use free_energy::{fg_closed, fg_residue};
pub use polylog::{li_neg, li_neg_rational, NegPolylog, Poly, RationalFunction};
pub use strip::StripGeometry;
pub use trcore::{tr_free_energy, TrConfig};
