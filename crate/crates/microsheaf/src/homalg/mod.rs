//! Exact rational linear algebra and bounded cochain complexes.

mod complex;
mod matrix;

pub use complex::{ChainMap, CochainComplex, Cohomology, CohomologyGroup, ComplexJson};
pub use matrix::{parse_q, q, q_frac, sign, Matrix, Rref, Q};
