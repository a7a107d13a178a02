//! Exact linear algebra over the two-element field and formed spaces.

mod bits;
mod space;
mod unipotent;

pub use bits::{BitMatrix, BitVector};
pub use space::{quadratic_vanishes_on, FormedSpace, Subspace};
pub use unipotent::{
    dickson_invariant, epsilon_invariant, epsilon_invariant_exhaustive, is_unipotent, jordan_blocks,
    jordan_type_of_unipotent, kernel_of_power, preserves_forms, sp_label_of, span_elements, transvection,
};
