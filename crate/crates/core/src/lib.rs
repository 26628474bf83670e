//! Post-processing toolkit for point defects in diamond.

// `!(x > y)` is used on purpose where NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod element;
pub mod lattice;
pub mod numeric;
pub mod units;
pub mod grid;
pub mod symmetry;
pub mod optics;
pub mod zfs;
pub mod corrections;
pub mod thermo;
pub mod embed;
pub mod io;
