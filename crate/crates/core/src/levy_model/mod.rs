//! Characteristic triplets of the bivariate driver `(ξ, η)` and of the
//! one-dimensional processes derived from it.
//!
//! Two truncation conventions coexist and are never mixed: bivariate drifts
//! `γ̃` compensate jumps inside the Euclidean unit ball `x² + y² < 1`, while
//! one-dimensional drifts `γ` compensate jumps with `|v| < 1`.

pub mod density;
mod region;
mod transforms;

use serde::{Deserialize, Serialize};

use crate::error::{GouError, Result};
use crate::tol;

pub use density::{DensityFamily, DensitySpec, Integral, YMap};
pub use region::{Cond, Rel};
pub use transforms::{
    d_eta, drift_vector, l_process, marginal_eta, marginal_xi, mean_at_one, s_process, scale_eta,
    w_transform,
};

/// One atom of a finite Lévy measure: jumps `(x, y)` arriving at `rate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtom")]
pub struct JumpAtom {
    pub x: f64,
    pub y: f64,
    pub rate: f64,
}

#[derive(Deserialize)]
struct RawAtom {
    x: f64,
    y: f64,
    rate: f64,
}

impl TryFrom<RawAtom> for JumpAtom {
    type Error = GouError;
    fn try_from(r: RawAtom) -> Result<Self> {
        JumpAtom::new(r.x, r.y, r.rate)
    }
}

impl JumpAtom {
    pub fn new(x: f64, y: f64, rate: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(GouError::InvalidModel("jump coordinates must be finite".into()));
        }
        if x == 0.0 && y == 0.0 {
            return Err(GouError::InvalidModel("a jump atom cannot sit at the origin".into()));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(GouError::InvalidModel(format!("atom rate must be positive and finite, got {rate}")));
        }
        Ok(JumpAtom { x, y, rate })
    }

    /// The jump `e^{-x} - 1` of the process `W` with `e^{-ξ} = ε(W)`.
    pub fn w(&self) -> f64 {
        (-self.x).exp_m1()
    }
}

/// Jump measure of `(ξ, η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyMeasure2D {
    Atoms(Vec<JumpAtom>),
    Density(DensitySpec),
}

impl Default for LevyMeasure2D {
    fn default() -> Self {
        LevyMeasure2D::Atoms(Vec::new())
    }
}

impl LevyMeasure2D {
    pub fn atoms(&self) -> Option<&[JumpAtom]> {
        match self {
            LevyMeasure2D::Atoms(a) => Some(a),
            LevyMeasure2D::Density(_) => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, LevyMeasure2D::Atoms(_))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, LevyMeasure2D::Atoms(a) if a.is_empty())
    }

    /// `∫_R g dΠ` over the region `R` given as a conjunction of conditions.
    pub fn integrate(&self, region: &[Cond], g: &dyn Fn(f64, f64) -> f64) -> Result<Integral> {
        match self {
            LevyMeasure2D::Atoms(atoms) => {
                let sum = atoms
                    .iter()
                    .filter(|a| region.iter().all(|c| c.holds(a.x, a.y)))
                    .map(|a| g(a.x, a.y) * a.rate)
                    .sum();
                Ok(Integral::finite(sum, 0.0))
            }
            LevyMeasure2D::Density(spec) => {
                let set = |x: f64| region::y_set(region, x);
                spec.integrate(&set, &|_| Vec::new(), g)
            }
        }
    }

    pub fn mass(&self, region: &[Cond]) -> Result<Integral> {
        self.integrate(region, &|_, _| 1.0)
    }

    fn validate(&self) -> Result<()> {
        match self {
            LevyMeasure2D::Atoms(atoms) => {
                for a in atoms {
                    JumpAtom::new(a.x, a.y, a.rate)?;
                }
                Ok(())
            }
            LevyMeasure2D::Density(spec) => spec.validate(),
        }
    }
}

/// The triplet `((γ̃_ξ, γ̃_η), Σ, Π)` in the unit-ball convention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriplet")]
pub struct LevyTriplet2D {
    pub gamma_tilde: [f64; 2],
    pub sigma: [[f64; 2]; 2],
    #[serde(default)]
    pub jumps: LevyMeasure2D,
}

#[derive(Deserialize)]
struct RawTriplet {
    gamma_tilde: [f64; 2],
    sigma: [[f64; 2]; 2],
    #[serde(default)]
    jumps: LevyMeasure2D,
}

impl TryFrom<RawTriplet> for LevyTriplet2D {
    type Error = GouError;
    fn try_from(r: RawTriplet) -> Result<Self> {
        LevyTriplet2D::new(r.gamma_tilde, r.sigma, r.jumps)
    }
}

impl LevyTriplet2D {
    pub fn new(gamma_tilde: [f64; 2], sigma: [[f64; 2]; 2], jumps: LevyMeasure2D) -> Result<Self> {
        if !gamma_tilde.iter().all(|g| g.is_finite()) {
            return Err(GouError::InvalidModel("gamma_tilde must be finite".into()));
        }
        if !sigma.iter().flatten().all(|s| s.is_finite()) {
            return Err(GouError::InvalidModel("sigma must be finite".into()));
        }
        let [[a, b], [c, d]] = sigma;
        if !tol::approx_eq(b, c) {
            return Err(GouError::InvalidModel("sigma must be symmetric".into()));
        }
        // Positive semidefinite: nonnegative diagonal and determinant.
        if a < 0.0 || d < 0.0 || a * d - b * c < -tol::BOUNDARY_REL * (a * d).max(b * c).abs() {
            return Err(GouError::InvalidModel("sigma must be positive semidefinite".into()));
        }
        jumps.validate()?;
        Ok(LevyTriplet2D {
            gamma_tilde,
            sigma: [[a, b], [b, d]],
            jumps,
        })
    }

    pub fn zero() -> Self {
        LevyTriplet2D {
            gamma_tilde: [0.0, 0.0],
            sigma: [[0.0; 2]; 2],
            jumps: LevyMeasure2D::default(),
        }
    }

    pub fn sigma_xi2(&self) -> f64 {
        self.sigma[0][0]
    }

    pub fn sigma_eta2(&self) -> f64 {
        self.sigma[1][1]
    }

    pub fn sigma_xi_eta(&self) -> f64 {
        self.sigma[0][1]
    }

    pub fn sigma_is_zero(&self) -> bool {
        self.sigma.iter().flatten().all(|s| *s == 0.0)
    }

    /// Rebuilds a triplet from the one-dimensional drifts `(γ_ξ, γ_η)` and the
    /// joint measure by inverting the truncation correction.
    ///
    /// Each `γ̃` is nudged by a few ulps so that recomputing the marginals
    /// reproduces the given drift exactly whenever that is representable.
    pub fn from_marginal_gammas(gamma: [f64; 2], sigma: [[f64; 2]; 2], jumps: LevyMeasure2D) -> Result<Self> {
        let corr = transforms::conversion_corrections(&jumps)?;
        let mut gt = [0.0; 2];
        for i in 0..2 {
            let c = corr[i];
            let mut g = gamma[i] - c;
            for _ in 0..8 {
                let back = g + c;
                if back == gamma[i] {
                    break;
                }
                g = if back < gamma[i] { g.next_up() } else { g.next_down() };
            }
            gt[i] = g;
        }
        LevyTriplet2D::new(gt, sigma, jumps)
    }
}

/// A jump atom of a one-dimensional Lévy measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom1D {
    pub value: f64,
    pub rate: f64,
}

/// Which coordinate of a (mapped) planar density a one-dimensional measure projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure1D {
    Atoms(Vec<Atom1D>),
    Projected { spec: DensitySpec, coord: Coord },
}

impl Measure1D {
    /// `∫ g dΠ` over values `v` satisfying every relation in `region`.
    pub fn integrate(&self, region: &[Cond1D], g: &dyn Fn(f64) -> f64) -> Result<Integral> {
        match self {
            Measure1D::Atoms(atoms) => {
                let sum = atoms
                    .iter()
                    .filter(|a| region.iter().all(|c| c.holds(a.value)))
                    .map(|a| g(a.value) * a.rate)
                    .sum();
                Ok(Integral::finite(sum, 0.0))
            }
            Measure1D::Projected { spec, coord } => {
                if *coord == Coord::First && spec.is_line() {
                    return Ok(Integral::ZERO);
                }
                let conds: Vec<Cond> = region.iter().map(|c| c.lift(*coord)).collect();
                let m = LevyMeasure2D::Density(spec.clone());
                match coord {
                    Coord::First => m.integrate(&conds, &|x, _| g(x)),
                    Coord::Second => m.integrate(&conds, &|_, y| g(y)),
                }
            }
        }
    }

    pub fn mass(&self, region: &[Cond1D]) -> Result<Integral> {
        self.integrate(region, &|_| 1.0)
    }

    pub fn atoms(&self) -> Option<&[Atom1D]> {
        match self {
            Measure1D::Atoms(a) => Some(a),
            Measure1D::Projected { .. } => None,
        }
    }
}

/// Conditions on the value `v` of a one-dimensional jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cond1D {
    V(Rel),
    AbsLt1,
}

impl Cond1D {
    pub fn holds(&self, v: f64) -> bool {
        match self {
            Cond1D::V(r) => r.holds(v),
            Cond1D::AbsLt1 => v.abs() < 1.0,
        }
    }

    fn lift(&self, coord: Coord) -> Cond {
        match (self, coord) {
            (Cond1D::V(r), Coord::First) => Cond::X(*r),
            (Cond1D::V(r), Coord::Second) => Cond::Y(*r),
            (Cond1D::AbsLt1, Coord::First) => Cond::XAbsLt1,
            (Cond1D::AbsLt1, Coord::Second) => Cond::YAbsLt1,
        }
    }
}

/// One-dimensional triplet `(γ, σ², Π)` in the interval convention `|v| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalTriplet {
    pub gamma: f64,
    pub sigma2: f64,
    pub jumps: Measure1D,
}

impl MarginalTriplet {
    pub fn new(gamma: f64, sigma2: f64, jumps: Measure1D) -> Result<Self> {
        if !gamma.is_finite() || !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(GouError::InvalidModel("marginal needs finite gamma and sigma2 >= 0".into()));
        }
        Ok(MarginalTriplet { gamma, sigma2, jumps })
    }
}

/// `y - u (e^{-x} - 1)`, snapped to zero when it vanishes to rounding.
pub fn s_jump(x: f64, y: f64, u: f64) -> f64 {
    if u == 0.0 {
        return y;
    }
    let uw = u * (-x).exp_m1();
    tol::snap(y - uw, y.abs() + uw.abs())
}

/// `Σ` has the form `[[1, -u], [-u, u²]] σ_ξ²` (to rounding), i.e. `η - uW`
/// has no Gaussian part.
pub fn covariance_rank1_at(sigma: &[[f64; 2]; 2], u: f64) -> bool {
    let (s11, s12, s22) = (sigma[0][0], sigma[0][1], sigma[1][1]);
    tol::approx_eq(s12, -u * s11) && tol::approx_eq(s22, u * u * s11)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_validation() {
        assert!(JumpAtom::new(0.0, 0.0, 1.0).is_err());
        assert!(JumpAtom::new(1.0, 0.0, 0.0).is_err());
        assert!(JumpAtom::new(1.0, 0.0, f64::INFINITY).is_err());
        assert!(JumpAtom::new(0.0, -1.0, 2.0).is_ok());
    }

    #[test]
    fn triplet_json_round_trip() {
        let t = LevyTriplet2D::new(
            [0.5, -1.0],
            [[1.0, -2.0], [-2.0, 4.0]],
            LevyMeasure2D::Atoms(vec![JumpAtom::new(1.0, -1.0, 2.0).unwrap()]),
        )
        .unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains(r#""jumps":{"atoms":[{"x":1.0,"y":-1.0,"rate":2.0}]}"#), "{s}");
        let back: LevyTriplet2D = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn rejects_indefinite_sigma() {
        let err = serde_json::from_str::<LevyTriplet2D>(
            r#"{"gamma_tilde":[0,0],"sigma":[[1,2],[2,1]],"jumps":{"atoms":[]}}"#,
        );
        assert!(err.is_err());
        let err = serde_json::from_str::<LevyTriplet2D>(
            r#"{"gamma_tilde":[0,0],"sigma":[[0,0],[0,0]],"jumps":{"atoms":[{"x":0,"y":0,"rate":1}]}}"#,
        );
        assert!(err.is_err());
    }

    #[test]
    fn s_jump_snaps_at_threshold() {
        let (x, y) = (1.0f64, -1.0);
        let theta = y / (-x).exp_m1();
        assert_eq!(s_jump(x, y, theta), 0.0);
        assert!(s_jump(x, y, theta * (1.0 - 1e-9)) < 0.0);
        assert!(s_jump(x, y, 2.0) > 0.0);
    }

    #[test]
    fn rank1_covariance() {
        let s = [[2.0, -3.0], [-3.0, 4.5]];
        assert!(covariance_rank1_at(&s, 1.5));
        assert!(!covariance_rank1_at(&s, 1.4));
        assert!(covariance_rank1_at(&[[0.0; 2]; 2], 7.0));
        assert!(!covariance_rank1_at(&[[1.0, 0.0], [0.0, 1.0]], 1.0));
    }
}
