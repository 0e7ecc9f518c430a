//! `GL_m` over `Z/p^n`: orders, congruence and parabolic indices, valuation
//! constrained subgroups, and enumeration oracles for all of them.

pub mod agreement;
pub mod constraint;
pub mod enumerate;
pub mod index;
pub mod matrix;
pub mod orbit;

pub use constraint::{Composition, ValuationConstraint};
pub use index::{
    congruence_index, constrained_subgroup_order, double_coset_count, gaussian_binomial, gaussian_multinomial,
    gl_order, parabolic_index, CongruenceIndex,
};
pub use matrix::ResidueMatrix;
pub use orbit::{orbit_count, DisjointSets};
