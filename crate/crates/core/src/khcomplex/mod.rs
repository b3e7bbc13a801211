//! Cube of resolutions, Khovanov complexes, the basepoint action and homology.

mod basepoint;
mod chainmap;
mod complex;
mod cube;
mod homology;

pub use basepoint::{
    basepoint_independence, commutes_with_x, quotient_complex, reduced_map, reduced_complex, shumakovitch_report, verify_shumakovitch, x_action, CheckRecord,
    ShumakovitchReport,
};
pub use chainmap::{induced_homology_map, ChainMap, HomologyMap};
pub use complex::{build_complex, ChainComplex, Gen, Ring};
pub use cube::{resolve, Cube, Resolution};
pub use homology::{
    homology, homology_z, AbelianGroup, BigradedDims, BigradedGroups, DimRecord, FactorRecord, HomBlock, HomologyF2,
};
