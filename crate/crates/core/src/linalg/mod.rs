//! Exact linear algebra over F2 (packed rows) and over the integers.

mod bitrow;
mod f2;
mod z;

pub use bitrow::{BitRow, Ones};
pub use f2::{rref_f2, MatrixF2, Reducer, Rref, SparseF2};
pub use z::{invariant_factors, mod2, smith_normal_form, MatrixZ, Snf};
