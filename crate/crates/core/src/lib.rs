//! Dual algebraic laminations of free group actions on ℝ-trees, computed on
//! depth-bounded factor languages.
//!
//! The crate is organized bottom-up: reduced words and rays over a basis,
//! automorphisms and cancellation bounds, exact and approximate tree models,
//! laminary languages built from short elements or from rays, and the limit
//! map `Q` on boundary points.

pub mod basischange;
pub mod error;
pub mod freewords;
pub mod laminations;
pub mod limittrees;
pub mod numeric;
pub mod qmap;
pub mod treemodels;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
