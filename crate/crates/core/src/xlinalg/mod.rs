//! Exact linear algebra over the rationals.

mod circuits;
mod classify;
mod matrix;
mod rank;

pub use circuits::{
    min_circuit_below, min_circuit_below_with_budget, strong_rank, strong_rank_with_budget,
    subsets_up_to, CircuitReport, Side, DEFAULT_SUBSET_BUDGET,
};
pub use classify::{
    border_symmetric, classify_rows, classify_singular, classify_singular_with_budget,
    degree_threshold, Normality, RowClassification, RowQuality, SingularClassification,
};
pub use matrix::ExactMatrix;
pub use rank::{
    combine_columns, in_column_span, kernel_basis, normalize_first_nonzero, null_combination,
    rank, rank_bareiss, rank_of_vectors, support_size,
};
