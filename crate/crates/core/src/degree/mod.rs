//! Left and right degrees of irreducible morphisms in a knitted component,
//! and the structural results built on them.

mod analysis;
mod finite;
mod search;

pub use analysis::*;
pub use finite::*;
pub use search::{
    degree, left_degree, right_degree, universe, verify_witness, DegreeReport, Outcome, Side, SumMap, Witness,
};
