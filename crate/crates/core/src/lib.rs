//! Traces and `C(X)`-centralizing states on crossed products `C(X) ⋊ G` of
//! finite dynamical systems.
//!
//! A state on the crossed product whose centralizer contains `C(X)` is the
//! same thing as a probability measure `ν` on `X` together with a field of
//! states `ψ_x` on the group algebras of the stabilizers `G_x`. This crate
//! builds functionals from such data (and from the abelian and `ℤ`-specific
//! variants of it), checks every defining condition numerically, inverts the
//! correspondence, and compares the extremal traces against an independent
//! block decomposition of the finite-dimensional algebra.
//!
//! The value table of a functional `t` is indexed by basis monomials:
//! `t(x, g) = t(δ_x u_g)`.

pub mod algebra;
pub mod analyze;
pub mod corpus;
pub mod dynamics;
mod error;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod states;
pub mod tracebuild;
pub mod zsystems;

pub use error::{Error, Result};
pub use linalg::C64;

/// Numerical tolerances shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Equality tolerance for exact identities (traciality, invariance, round trips).
    pub tol: f64,
    /// Lower bound accepted for minimal eigenvalues of Gram/Toeplitz matrices.
    pub psd_tol: f64,
    /// Relative threshold below which eigen/singular values count as zero.
    pub rank_tol: f64,
    /// Residuals in `(tol, warn_tol)` are reported as warnings, not failures, where allowed.
    pub warn_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            psd_tol: 1e-9,
            rank_tol: 1e-9,
            warn_tol: 1e-6,
        }
    }
}
