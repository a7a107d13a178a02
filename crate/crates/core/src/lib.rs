//! Unipotent conjugacy classes of symplectic and split even orthogonal groups
//! in characteristic 2.
//!
//! The crate is organised bottom-up:
//!
//! - [`partitions`]: conjugation, multiplicities, dominance;
//! - [`class_labels`]: labels `(c, ε)`, the closure order, the elliptic map `Φ`;
//! - [`gf2`]: bit-packed linear algebra, formed spaces, class invariants of matrices;
//! - [`flags`]: isotropic flags and the flag pair attached to a cycle type;
//! - [`harness`]: exhaustive enumeration of the isometries carrying one flag of
//!   the pair to the other, over the two-element field, and the checks built on it.
//!
//! With the default `parallel` feature the harness spreads its search over a
//! rayon pool; without it everything runs on the calling thread. Reports are
//! identical either way.

pub mod class_labels;
pub mod error;
pub mod flags;
pub mod gf2;
pub mod harness;
pub mod partitions;

pub use class_labels::{
    closure_leq, enumerate_cycle_types, enumerate_sp_labels, hasse_diagram, phi_of_elliptic, CycleType, FormKind,
    HasseDiagram, SpLabel,
};
pub use error::{Error, Result};
pub use partitions::{enumerate_partitions, Partition};
