//! Default numerical thresholds.

/// Relative singular-value cutoff for numerical rank and null spaces.
pub const RANK: f64 = 1e-9;
/// Operator-norm threshold for verdicts and verification residuals.
pub const RESIDUAL: f64 = 1e-8;
/// A span is accepted as multiplication-closed below this projection residual.
pub const CLOSURE: f64 = 1e-7;
/// Trace-preservation and isometry threshold.
pub const TP: f64 = 1e-9;
/// Eigenvalue gap separating spectral clusters.
pub const SPECTRAL_GAP: f64 = 1e-6;
/// Kraus elements and products at or below this Frobenius norm are dropped.
pub const ZERO_KRAUS: f64 = 1e-12;
/// Canonical error directions with weight at or below this are never populated.
pub const CANONICAL_WEIGHT: f64 = 1e-10;
/// Retry budget for seeded structure sampling.
pub const MAX_RETRIES: usize = 8;
