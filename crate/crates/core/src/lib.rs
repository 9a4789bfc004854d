//! Exact enumeration of cuspidal and nodal curve counts on toric surfaces via
//! lattice paths in the Newton polygon.

pub mod count;
pub mod factors;
pub mod families;
pub mod lattice;
pub mod multiplicity;
pub mod oracle;
pub mod output;
pub mod path;
pub mod problem;
pub mod subdivision;
