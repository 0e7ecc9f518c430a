//! Headline bounds, the verification suite, and their serialized forms.

pub mod bound;
pub mod cache;
pub mod document;
pub mod suite;

pub use bound::{volume_comparison, theorem_bound, volume_exponent, BoundReport, Level};
pub use cache::{Cache, CacheStatus};
pub use document::{Format, ReportDocument};
pub use suite::{run_verification_suite, Budget, Scope, SuiteReport, SuiteStatus};
