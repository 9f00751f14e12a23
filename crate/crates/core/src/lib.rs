//! Exact combinatorial machinery for coarse geometry on finite systems:
//! growth functions of concrete groups, coarse-space primitives and
//! dimension-witness checkers, orbit partitions of unity, simplicial sorting,
//! large-scale packing certificates, and allosteric wreath-product towers.

pub mod allosteric;
pub mod coarse;
pub mod covers;
pub mod dynamics;
pub mod error;
pub mod groups;
pub mod lsp;
pub mod ltc;
pub mod rational;
pub mod report;
pub mod simplicial;

pub use error::{Error, Result};
pub use groups::{BallTable, GroupElement, GroupKind, GroupSpec};
pub use report::{Check, Report};
