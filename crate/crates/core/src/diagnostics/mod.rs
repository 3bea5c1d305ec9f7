//! Floating-point diagnostics on computed integrals: coefficient growth,
//! parameter scans and trajectory conservation.

pub mod conserve;
pub mod growth;
pub mod scan;

pub use conserve::{conservation_probe, default_direction, ConservationProbe, ProbeSummary};
pub use growth::{classify_norms, degree_norms, growth_analyze, growth_analyze_at, GrowthClass, GrowthReport};
pub use scan::{scan, GridSpec, PointOutcome, ScanPoint, ScanResult};
