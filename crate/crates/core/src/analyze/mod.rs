//! Verification of the defining conditions, the inverse decomposition, the
//! GNS machinery, and the independent block-decomposition oracle.

mod checks;
mod decompose;
mod extremal;
mod gns;
mod oracle;
mod twisted;

pub use checks::{
    alpha_invariance_check, check_centralizer_contains_functions, check_traciality, escalarpr_check,
    gram_psd_margin, induced_construction_check, run_state_checks, run_trace_checks, support_condition_check,
    CheckReport, InducedConstruction, Residual,
};
pub use decompose::{decompose_to_field, lcent_gram, DecompositionReport, FieldDecomposition};
pub use extremal::{convex_decompose, enumerate_extremal, extremal_dimension_sum};
pub use gns::{gns, gns_of, monomial_generators, reconstruct_via_gns, GnsRepresentation, TensorAlgebra};
pub use oracle::{oracle_block_decomposition, oracle_traces, Block, BlockDecomposition, DEFAULT_SEED};
pub use twisted::{twisted_pullback_residual, twisted_quotient_trace, TwistedAlgebra};
