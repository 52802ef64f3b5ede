//! Exact computations for r-minimal rank-metric codes over GF(q^m)/GF(q):
//! rank supports, generalized rank weights, cutting r-blocking sets, evasive
//! subspaces, counting formulas and certificate-producing exhaustive search.

pub mod combinatorics;
pub mod error;
pub mod field_tower;
pub mod geometry;
pub mod linalg;
pub mod minimality;
pub mod rank_metric;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use field_tower::{FieldTower, Gf};
pub use linalg::Subspace;
