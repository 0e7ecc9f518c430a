//! Uniform bounds on fixed vectors under principal congruence subgroups of
//! `GL_2` and `GL_3` over a `p`-adic field.

pub mod gl2;
pub mod gl3;
pub mod howe;

pub use gl2::{ramified_orbits, supercuspidal_bound, unramified_orbits, OrbitCheck, SupercuspidalBound};
pub use gl3::{
    klambda_constraint, lambda_candidates, verify_double_coset_lemmas, Cocharacter, DoubleCosetReport, HoweCase,
    HoweDatum, MaximalCompact, Normalization,
};
pub use howe::{gl3_case_bound, gl3_uniform_bound, howe_dimension, Gl3Case, UniformBound};
