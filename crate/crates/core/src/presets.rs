//! Named drivers used throughout the tests, the CLI and the acceptance suite.

use crate::levy_model::{JumpAtom, LevyMeasure2D, LevyTriplet2D};

/// `(ξ_t, η_t) = (B_t + ct, -B_t + (1/2 - c)t)`.
pub fn continuous_example(c: f64) -> LevyTriplet2D {
    LevyTriplet2D::new([c, 0.5 - c], [[1.0, -1.0], [-1.0, 1.0]], LevyMeasure2D::default())
        .expect("continuous example is a valid triplet")
}

/// `(ξ_t, η_t) = (-ct + N_t, 2ct - N_t)` with `N` a Poisson process of rate `λ`.
///
/// The single jump `(1, -1)` lies on the unit circle, outside the open unit
/// disk, so the truncated drift equals the plain drift.
pub fn jump_example(c: f64, lambda: f64) -> LevyTriplet2D {
    let atom = JumpAtom::new(1.0, -1.0, lambda).expect("positive rate");
    LevyTriplet2D::new([-c, 2.0 * c], [[0.0; 2]; 2], LevyMeasure2D::Atoms(vec![atom]))
        .expect("jump example is a valid triplet")
}

/// `ξ_t = at`, `η` a standard Brownian motion with drift `b`.
pub fn drift_brownian(a: f64, b: f64) -> LevyTriplet2D {
    LevyTriplet2D::new([a, b], [[0.0, 0.0], [0.0, 1.0]], LevyMeasure2D::default())
        .expect("valid triplet")
}

/// Independent Brownian motions with the given variances.
pub fn independent_brownian(s_xi: f64, s_eta: f64) -> LevyTriplet2D {
    LevyTriplet2D::new([0.0, 0.0], [[s_xi, 0.0], [0.0, s_eta]], LevyMeasure2D::default())
        .expect("valid triplet")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::w_transform;

    #[test]
    fn continuous_w_is_the_negated_brownian() {
        // W = -B + (1/2 - c)t, so η = W exactly.
        let t = continuous_example(0.3);
        let w = w_transform(&t).unwrap();
        assert!((w.gamma_tilde[1] - t.gamma_tilde[1]).abs() < 1e-15);
    }
}
