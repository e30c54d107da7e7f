//! Exact symbolic calculus for elliptic current algebras, their vacuum
//! modules, and the associated vertex structure.
//!
//! The layers, bottom to top:
//!
//! - [`scalar`] / [`series`]: Gaussian-rational scalars and truncated
//!   formal Laurent series with per-value precision caps.
//! - [`lie`]: finite-dimensional base Lie algebras by structure
//!   constants, with validators.
//! - [`current`]: the current-type algebras H(f), K(l), K(g,p), hat-g_p
//!   and check-g_p, with closed-form mode brackets, a delta-expansion
//!   oracle, the dR reduction, derivations, and the filtration.
//! - [`vacuum`]: PBW induced modules with exact normal-ordering.
//! - [`vertex`]: operator series, locality, residue n-th products, and
//!   the state-field maps.
//! - [`suites`] / [`report`] / [`cli`]: deterministic verification
//!   suites and the command-line front end.
//!
//! The companion guide in `book/` walks through each layer with runnable
//! examples; its code blocks double as the doc-tests below.

pub mod cli;
pub mod current;
pub mod error;
pub mod lie;
pub mod parse;
pub mod report;
pub mod scalar;
pub mod series;
pub mod suites;
pub mod vacuum;
pub mod vertex;

pub use error::{VfError, VfResult};

// The guide's code blocks run as doc-tests so the book can never drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/lie-algebras.md")]
    mod lie_algebras {}
    #[doc = include_str!("../../../book/src/current-algebras.md")]
    mod current_algebras {}
    #[doc = include_str!("../../../book/src/vacuum-modules.md")]
    mod vacuum_modules {}
    #[doc = include_str!("../../../book/src/vertex-calculus.md")]
    mod vertex_calculus {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli_guide {}
}
