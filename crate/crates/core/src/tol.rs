//! Comparison tolerances used by the exact (atom) tier.
//!
//! Region predicates such as `y - u (e^{-x} - 1) < 0` are evaluated in floating
//! point. A value whose magnitude is below `BOUNDARY_REL` times the magnitude of
//! the terms that produced it is treated as lying exactly on the boundary.

/// Relative tolerance for boundary predicates and threshold comparisons.
pub const BOUNDARY_REL: f64 = 1e-12;

/// `a` and `b` agree to within `BOUNDARY_REL` relative to their magnitudes.
pub fn approx_eq(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= BOUNDARY_REL * (a.abs() + b.abs()).max(f64::MIN_POSITIVE)
}

/// Snap `value` to zero when it is negligible next to `scale`.
pub fn snap(value: f64, scale: f64) -> f64 {
    if value.abs() <= BOUNDARY_REL * scale.abs() {
        0.0
    } else {
        value
    }
}

/// `value >= 0` allowing for rounding relative to `scale` (floored at 1).
pub fn nonneg(value: f64, scale: f64) -> bool {
    value >= -BOUNDARY_REL * scale.abs().max(1.0)
}
