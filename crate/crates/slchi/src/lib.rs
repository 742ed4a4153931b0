//! Exact finite computations for congruence subgroups of `SL_2` over
//! finite chain rings and rings of integers of quadratic fields.

pub mod chain_ring;
pub mod counting;
pub mod cusp_global;
pub mod error;
pub mod finite_group;
pub mod par;
pub mod quad_field;
pub mod rat;
pub mod sl2_local;
pub mod slope;
pub mod subgroup;

pub use chain_ring::{Coset, El, Presentation, Ring, RingSpec};
pub use error::{Error, Result};
