//! Exact algorithms for torsion points on split tori over p-adic fields.

pub mod arith;
pub mod boxall;
pub mod coset_lattice;
pub mod cyclo_exact;
pub mod error;
pub mod finite_field;
pub mod galois_poly;
pub mod intmat;
pub mod local_field;
pub mod scan;
mod serde_int;
pub mod special_fibre;
pub mod torus_geom;
pub mod verify;

pub use error::{Error, Result};
