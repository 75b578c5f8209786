//! Tolerance table shared by every module.

/// Structural checks: Hermiticity, PSD, POVM completeness, normalization.
pub const STRUCTURAL: f64 = 1e-10;

/// Floating-point arithmetic identities.
pub const ARITHMETIC: f64 = 1e-12;

/// Hermiticity of density matrices.
pub const HERMITIAN: f64 = 1e-12;

/// Trace of density matrices.
pub const TRACE: f64 = 1e-12;

/// Unit-vector check for hidden-variable settings.
pub const UNIT_NORM: f64 = 1e-9;

/// CHSH values up to 2√2 + this are clamped to 2√2; larger values are rejected.
pub const TSIRELSON_SLACK: f64 = 1e-9;

/// Default relative margin a witness must exceed its cap by to be certified.
pub const CERTIFY_MARGIN: f64 = 1e-12;

/// Step tolerance for threshold bisection.
pub const BISECTION: f64 = 1e-12;

/// Rounding allowance on an input CHSH value, in units of `S · ε_mach`.
/// The cap is re-evaluated at `S` lowered by this much before certifying,
/// since `γ` is steep near Tsirelson.
pub const CHSH_ROUNDING_ULPS: f64 = 16.0;
