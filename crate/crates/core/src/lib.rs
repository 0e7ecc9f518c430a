//! Exact computations behind cohomology-growth bounds for congruence covers of
//! `U(N-1,1)` arithmetic manifolds.

pub mod arith;
pub mod cohomology;
pub mod error;
pub mod fixed_vectors;
pub mod groups;
pub mod report;
pub mod residue;
pub mod shapes;

pub use error::{Error, Result};
pub use residue::{DefiningParameter, ExtensionKind, ExtensionModel, PrimePower, ResidueRing, RingElem, Valuation};
pub use groups::{Composition, ResidueMatrix, ValuationConstraint};
pub use shapes::{DesignatedShape, Exponent, Pair, Shape};
pub use cohomology::CohRep;
pub use fixed_vectors::{Cocharacter, HoweDatum};
pub use report::{Level, ReportDocument};
