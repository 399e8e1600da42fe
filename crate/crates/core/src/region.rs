//! Quadrant regions, the moving sets `A_i^u = {z ∈ A_i : y - u(e^{-x} - 1) < 0}`,
//! the thresholds `θ₁…θ₄`, and the drift inequality as a function of `u`.
//!
//! Quadrants are taken half-open along the `x`-axis so that, together with
//! the axis `x = 0`, they cover `ℝ² \ {0}` without ambiguity at `y = 0`:
//!
//! ```text
//! A_1 = {x ≥ 0, y ≥ 0}   A_2 = {x ≥ 0, y < 0}
//! A_3 = {x ≤ 0, y < 0}   A_4 = {x ≤ 0, y ≥ 0}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{GouError, Result};
use crate::extended::{ExtendedReal, NegInf, PosInf};
use crate::interval::{Interval, IntervalSet};
use crate::levy_model::{
    s_jump, Cond, DensitySpec, Integral, LevyMeasure2D, LevyTriplet2D, Rel,
};
use crate::tol;

/// Quadrant index `1..=4`.
pub type Quadrant = u8;

pub fn quadrant_conds(i: Quadrant) -> [Cond; 2] {
    match i {
        1 => [Cond::X(Rel::Ge), Cond::Y(Rel::Ge)],
        2 => [Cond::X(Rel::Ge), Cond::Y(Rel::Lt)],
        3 => [Cond::X(Rel::Le), Cond::Y(Rel::Lt)],
        4 => [Cond::X(Rel::Le), Cond::Y(Rel::Ge)],
        _ => panic!("quadrant index must be 1..=4, got {i}"),
    }
}

/// `Π(A_i)`.
pub fn quadrant_mass(m: &LevyMeasure2D, i: Quadrant) -> Result<Integral> {
    m.mass(&quadrant_conds(i))
}

/// `Π(A_i^u)`.
pub fn region_mass(m: &LevyMeasure2D, i: Quadrant, u: f64) -> Result<ExtendedReal> {
    let [a, b] = quadrant_conds(i);
    let r = m.mass(&[a, b, Cond::S { u, rel: Rel::Lt }])?;
    Ok(r.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaBounds {
    pub theta1: ExtendedReal,
    pub theta2: ExtendedReal,
    pub theta3: ExtendedReal,
    pub theta4: ExtendedReal,
}

impl ThetaBounds {
    pub fn get(&self, i: Quadrant) -> ExtendedReal {
        match i {
            1 => self.theta1,
            2 => self.theta2,
            3 => self.theta3,
            4 => self.theta4,
            _ => panic!("quadrant index must be 1..=4"),
        }
    }
}

/// Per-atom threshold `y / (e^{-x} - 1)` for `x ≠ 0`: the value of `u` at
/// which the jump of `η - uW` changes sign.
pub fn atom_threshold(x: f64, y: f64) -> f64 {
    y / (-x).exp_m1()
}

pub fn thetas(m: &LevyMeasure2D) -> Result<ThetaBounds> {
    match m {
        LevyMeasure2D::Atoms(atoms) => {
            let mut t = ThetaBounds {
                theta1: NegInf,
                theta2: ExtendedReal::ZERO,
                theta3: ExtendedReal::ZERO,
                theta4: PosInf,
            };
            for a in atoms {
                if a.x == 0.0 {
                    // Pure η-jumps: a negative one is in A_2^u and A_3^u for every u.
                    if a.y < 0.0 {
                        t.theta2 = PosInf;
                        t.theta3 = NegInf;
                    }
                    continue;
                }
                let th = ExtendedReal::new(atom_threshold(a.x, a.y));
                match (a.x > 0.0, a.y >= 0.0) {
                    (true, true) => t.theta1 = t.theta1.max(th),
                    (true, false) => t.theta2 = t.theta2.max(th),
                    (false, false) => t.theta3 = t.theta3.min(th),
                    (false, true) => t.theta4 = t.theta4.min(th),
                }
            }
            Ok(t)
        }
        LevyMeasure2D::Density(spec) => density_thetas(spec),
    }
}

/// Thresholds of a density measure from its support: the suprema/infima of
/// the per-point threshold over the (mapped) support box.
fn density_thetas(spec: &DensitySpec) -> Result<ThetaBounds> {
    let (x0, x1) = spec.x_range();
    let mut t = ThetaBounds {
        theta1: NegInf,
        theta2: ExtendedReal::ZERO,
        theta3: ExtendedReal::ZERO,
        theta4: PosInf,
    };
    if spec.is_line() {
        let (lo, _) = spec.target_y_range(0.0);
        if lo < 0.0 && spec.map.a != 0.0 {
            t.theta2 = PosInf;
            t.theta3 = NegInf;
        }
        return Ok(t);
    }
    if spec.map.a == 0.0 {
        return Err(GouError::NotSupported("thresholds of a measure carried by a curve".into()));
    }
    let yr = |x: f64| spec.target_y_range(x);
    // Right half-plane: A_1 (y >= 0) and A_2 (y < 0).
    if x1 > 0.0 {
        let xa = x0.max(0.0);
        let (lo0, hi0) = yr(xa);
        // θ₂: sup of y_min(x)/w(x) where y_min(x) < 0.
        let f2 = |x: f64| {
            let (lo, _) = yr(x);
            if lo < 0.0 {
                lo / (-x).exp_m1()
            } else {
                f64::NEG_INFINITY
            }
        };
        let s2 = if xa == 0.0 && lo0 < 0.0 { f64::INFINITY } else { extremum(&f2, xa, x1, true) };
        if s2 > 0.0 {
            t.theta2 = ExtendedReal::new(s2);
        }
        // θ₁: sup of max(0, y_min)/w where y_max > 0.
        let f1 = |x: f64| {
            let (lo, hi) = yr(x);
            if hi > 0.0 {
                lo.max(0.0) / (-x).exp_m1()
            } else {
                f64::NEG_INFINITY
            }
        };
        let mut s1 = extremum(&f1, xa, x1, true);
        if xa == 0.0 && hi0 > 0.0 && lo0 <= 0.0 {
            s1 = s1.max(0.0);
        }
        t.theta1 = ExtendedReal::new(s1);
    }
    if x0 < 0.0 {
        let xb = x1.min(0.0);
        let (lo0, hi0) = yr(xb);
        let f3 = |x: f64| {
            let (lo, _) = yr(x);
            if lo < 0.0 {
                lo / (-x).exp_m1()
            } else {
                f64::INFINITY
            }
        };
        let s3 = if xb == 0.0 && lo0 < 0.0 { f64::NEG_INFINITY } else { extremum(&f3, x0, xb, false) };
        if s3 < 0.0 {
            t.theta3 = ExtendedReal::new(s3);
        }
        let f4 = |x: f64| {
            let (lo, hi) = yr(x);
            if hi > 0.0 {
                lo.max(0.0) / (-x).exp_m1()
            } else {
                f64::INFINITY
            }
        };
        let mut s4 = extremum(&f4, x0, xb, false);
        if xb == 0.0 && hi0 > 0.0 && lo0 <= 0.0 {
            s4 = s4.min(0.0);
        }
        t.theta4 = ExtendedReal::new(s4);
    }
    Ok(t)
}

/// Sup (or inf) of `f` over the open interval `(a, b)` by dense sampling and
/// golden-section refinement around the best sample.
fn extremum(f: &dyn Fn(f64) -> f64, a: f64, b: f64, sup: bool) -> f64 {
    const N: usize = 2000;
    let better = |p: f64, q: f64| if sup { p > q } else { p < q };
    let pick = |p: f64, q: f64| if better(p, q) { p } else { q };
    let h = (b - a) / N as f64;
    let mut best_i = 1;
    let mut best = if sup { f64::NEG_INFINITY } else { f64::INFINITY };
    let safe = |x: f64| if x == 0.0 { if sup { f64::NEG_INFINITY } else { f64::INFINITY } } else { f(x) };
    for i in 0..=N {
        let v = safe(a + h * i as f64);
        if better(v, best) {
            best = v;
            best_i = i;
        }
    }
    if !best.is_finite() {
        return best;
    }
    let lo = a + h * best_i.saturating_sub(1) as f64;
    let hi = (a + h * (best_i + 1) as f64).min(b);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut l, mut r) = (lo, hi);
    for _ in 0..80 {
        let m1 = r - g * (r - l);
        let m2 = l + g * (r - l);
        if better(safe(m1), safe(m2)) {
            r = m2;
        } else {
            l = m1;
        }
    }
    pick(pick(best, safe(0.5 * (l + r))), pick(safe(lo), safe(hi)))
}

/// Scale of the drift inequality's terms at `u`, for tolerant sign tests.
pub fn drift_scale(t: &LevyTriplet2D, u: f64) -> f64 {
    let base = t.gamma_tilde[1].abs() + (u * t.gamma_tilde[0]).abs() + (0.5 * u * t.sigma_xi2()).abs();
    let jumps = match &t.jumps {
        LevyMeasure2D::Atoms(atoms) => atoms
            .iter()
            .filter(|a| Cond::DISK.holds(a.x, a.y))
            .map(|a| (u * a.x).abs().max(a.y.abs()) * a.rate)
            .sum(),
        LevyMeasure2D::Density(_) => 0.0,
    };
    base + jumps
}

/// Left-hand side of the drift inequality,
/// `γ̃_η + uγ̃_ξ - ½uσ_ξ² - ∫_{x²+y²<1, y-u(e^{-x}-1)≥0} (ux + y) dΠ`.
///
/// The integral is over `{s ≥ 0}` rather than `{s > 0}`: wherever the jumps of
/// `η - uW` are nonnegative this makes the expression equal the drift of
/// `η - uW`, including atoms that land exactly on `s = 0`.
pub fn drift_lhs(t: &LevyTriplet2D, u: f64) -> Result<ExtendedReal> {
    Ok(drift_lhs_integral(t, u)?.value)
}

/// [`drift_lhs`] together with the quadrature error bound (zero for atoms).
pub fn drift_lhs_integral(t: &LevyTriplet2D, u: f64) -> Result<Integral> {
    let base = t.gamma_tilde[1] + u * t.gamma_tilde[0] - 0.5 * u * t.sigma_xi2();
    let i = t.jumps.integrate(&[Cond::DISK, Cond::S { u, rel: Rel::Ge }], &|x, y| u * x + y)?;
    Ok(Integral {
        value: ExtendedReal::new(base).checked_sub(i.value)?,
        abs_err: i.abs_err,
    })
}

/// An affine function `intercept + slope·u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub slope: f64,
    pub intercept: f64,
}

impl Affine {
    pub fn eval(&self, u: f64) -> f64 {
        self.intercept + self.slope * u
    }
}

/// Piecewise-affine function of `u` with explicit values at the breakpoints.
///
/// `pieces[k]` applies on `(breakpoints[k-1], breakpoints[k])`, with the first
/// and last pieces unbounded; `at_breaks[k]` is the value at `breakpoints[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearFn {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Affine>,
    pub at_breaks: Vec<f64>,
}

impl PiecewiseLinearFn {
    pub fn eval(&self, u: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b < u);
        if k < self.breakpoints.len() && self.breakpoints[k] == u {
            self.at_breaks[k]
        } else {
            self.pieces[k].eval(u)
        }
    }

    /// Left and right limits at breakpoint `k`.
    pub fn limits(&self, k: usize) -> (f64, f64) {
        let b = self.breakpoints[k];
        (self.pieces[k].eval(b), self.pieces[k + 1].eval(b))
    }

    /// `{u : f(u) ≥ 0}` as a union of intervals (exact roots of each piece).
    pub fn nonneg_set(&self) -> IntervalSet {
        let mut parts = Vec::new();
        let n = self.breakpoints.len();
        for (k, p) in self.pieces.iter().enumerate() {
            let lo = if k == 0 { f64::NEG_INFINITY } else { self.breakpoints[k - 1] };
            let hi = if k == n { f64::INFINITY } else { self.breakpoints[k] };
            let piece = Interval::open(lo, hi);
            let half = if p.slope == 0.0 {
                if p.intercept >= 0.0 {
                    Interval::everything()
                } else {
                    continue;
                }
            } else {
                let r = -p.intercept / p.slope;
                if p.slope > 0.0 {
                    Interval::new(r, f64::INFINITY, true, false)
                } else {
                    Interval::new(f64::NEG_INFINITY, r, false, true)
                }
            };
            parts.push(piece.intersect(&half));
        }
        for (b, v) in self.breakpoints.iter().zip(&self.at_breaks) {
            if *v >= 0.0 {
                parts.push(Interval::point(*b));
            }
        }
        IntervalSet::from_parts(parts)
    }
}

/// Exact piecewise-affine form of [`drift_lhs`] for atom measures.
pub fn drift_lhs_piecewise(t: &LevyTriplet2D) -> Result<PiecewiseLinearFn> {
    let atoms = t
        .jumps
        .atoms()
        .ok_or_else(|| GouError::NotSupported("piecewise drift needs an atom measure".into()))?;
    let disk: Vec<_> = atoms.iter().filter(|a| Cond::DISK.holds(a.x, a.y)).collect();
    let mut breaks: Vec<f64> = disk
        .iter()
        .filter(|a| a.x != 0.0)
        .map(|a| atom_threshold(a.x, a.y))
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let slope0 = t.gamma_tilde[0] - 0.5 * t.sigma_xi2();
    let intercept0 = t.gamma_tilde[1];
    // Included atoms at `u`: those with s ≥ 0. Evaluated with the same exact
    // sign logic as drift_lhs, but membership is decided from the threshold.
    let affine_for = |included: &dyn Fn(&crate::levy_model::JumpAtom) -> bool| {
        let (mut sx, mut sy) = (0.0, 0.0);
        for a in &disk {
            if included(a) {
                sx += a.x * a.rate;
                sy += a.y * a.rate;
            }
        }
        Affine {
            slope: slope0 - sx,
            intercept: intercept0 - sy,
        }
    };
    let member = |a: &crate::levy_model::JumpAtom, u: f64, at_break: bool| -> bool {
        if a.x == 0.0 {
            return a.y >= 0.0;
        }
        let th = atom_threshold(a.x, a.y);
        if at_break && th == u {
            return true;
        }
        if a.x > 0.0 {
            u > th
        } else {
            u < th
        }
    };
    let mut pieces = Vec::with_capacity(breaks.len() + 1);
    for k in 0..=breaks.len() {
        // A representative interior point of piece k.
        let u = match (k, breaks.len()) {
            (_, 0) => 0.0,
            (0, _) => breaks[0] - 1.0,
            (k, n) if k == n => breaks[n - 1] + 1.0,
            (k, _) => 0.5 * (breaks[k - 1] + breaks[k]),
        };
        pieces.push(affine_for(&|a| member(a, u, false)));
    }
    let at_breaks = breaks
        .iter()
        .map(|&b| affine_for(&|a| member(a, b, true)).eval(b))
        .collect();
    Ok(PiecewiseLinearFn {
        breakpoints: breaks,
        pieces,
        at_breaks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variation {
    Finite,
    Infinite,
    Undetermined,
}

/// Whether `∫_{s ∈ (0,1)} s dΠ` is finite, with `s = y - u(e^{-x} - 1)`.
pub fn small_jump_variation(t: &LevyTriplet2D, u: f64) -> Variation {
    if t.jumps.is_atomic() {
        return Variation::Finite;
    }
    let region = [Cond::S { u, rel: Rel::Gt }, Cond::SAbsLt1 { u, inside: true }];
    match t.jumps.integrate(&region, &|x, y| s_jump(x, y, u)) {
        Ok(i) if i.value.is_finite() => Variation::Finite,
        Ok(_) => Variation::Infinite,
        Err(_) => Variation::Undetermined,
    }
}

/// `u` lies in `[lo, hi]`, with ends compared at the boundary tolerance.
pub fn in_closed_tol(u: f64, lo: ExtendedReal, hi: ExtendedReal) -> bool {
    let above = match lo {
        NegInf => true,
        PosInf => false,
        ExtendedReal::Finite(l) => u >= l || tol::approx_eq(u, l),
    };
    let below = match hi {
        PosInf => true,
        NegInf => false,
        ExtendedReal::Finite(h) => u <= h || tol::approx_eq(u, h),
    };
    above && below
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::{DensityFamily, JumpAtom};

    fn atoms(v: &[(f64, f64, f64)]) -> LevyMeasure2D {
        LevyMeasure2D::Atoms(v.iter().map(|&(x, y, r)| JumpAtom::new(x, y, r).unwrap()).collect())
    }

    const E: f64 = std::f64::consts::E;

    #[test]
    fn jump_example_region_mass() {
        let m = atoms(&[(1.0, -1.0, 2.5)]);
        let th = E / (E - 1.0);
        for u in [-3.0, 0.0, 1.0, th * (1.0 - 1e-9)] {
            assert_eq!(region_mass(&m, 2, u).unwrap(), 2.5, "u={u}");
        }
        for u in [th, th * (1.0 + 1e-9), 2.0, 10.0] {
            assert_eq!(region_mass(&m, 2, u).unwrap(), 0.0, "u={u}");
        }
        let pure = atoms(&[(0.0, -1.0, 0.3)]);
        for u in [0.0, 1.0, 1e6] {
            assert_eq!(region_mass(&pure, 2, u).unwrap(), 0.3);
        }
        for i in 1..=4 {
            assert_eq!(region_mass(&atoms(&[]), i, 0.7).unwrap(), 0.0);
        }
    }

    #[test]
    fn theta_examples() {
        let t = thetas(&atoms(&[(1.0, -1.0, 1.0)])).unwrap();
        assert!((t.theta2.to_f64() - E / (E - 1.0)).abs() < 1e-12);
        let t = thetas(&atoms(&[])).unwrap();
        assert_eq!((t.theta1, t.theta2, t.theta3, t.theta4), (NegInf, ExtendedReal::ZERO, ExtendedReal::ZERO, PosInf));
        let t = thetas(&atoms(&[(1.0, -1.0, 1.0), (-1.0, 2.0, 1.0)])).unwrap();
        assert!((t.theta2.to_f64() - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!((t.theta4.to_f64() - 2.0 / (E - 1.0)).abs() < 1e-12);
        assert!(t.theta2 > t.theta4);
    }

    #[test]
    fn drift_lhs_examples() {
        let c = 0.37;
        let ce = LevyTriplet2D::new([c, 0.5 - c], [[1.0, -1.0], [-1.0, 1.0]], LevyMeasure2D::default()).unwrap();
        assert_eq!(drift_lhs(&ce, 1.0).unwrap(), 0.0);
        let je = LevyTriplet2D::new([-c, 2.0 * c], [[0.0; 2]; 2], atoms(&[(1.0, -1.0, 1.0)])).unwrap();
        for u in [-1.0, 0.0, 1.5, 2.0, 3.0] {
            let v = drift_lhs(&je, u).unwrap().to_f64();
            assert!((v - (2.0 * c - c * u)).abs() < 1e-15);
        }
        // Driftless subordinator-like η: γ̃_η equals its small positive jumps.
        let sub = LevyTriplet2D::new([0.0, 0.3 * 2.0], [[0.0; 2]; 2], atoms(&[(0.0, 0.3, 2.0)])).unwrap();
        assert_eq!(drift_lhs(&sub, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn piecewise_examples() {
        let t = LevyTriplet2D::new([0.4, -0.1], [[0.5, 0.0], [0.0, 0.0]], LevyMeasure2D::default()).unwrap();
        let p = drift_lhs_piecewise(&t).unwrap();
        assert!(p.breakpoints.is_empty());
        assert_eq!(p.pieces, vec![Affine { slope: 0.4 - 0.25, intercept: -0.1 }]);

        let t = LevyTriplet2D::new([0.2, 0.1], [[0.0; 2]; 2], atoms(&[(0.1, -0.05, 1.0)])).unwrap();
        let p = drift_lhs_piecewise(&t).unwrap();
        assert_eq!(p.breakpoints.len(), 1);
        assert!((p.breakpoints[0] - 0.525_41).abs() < 1e-5, "{:?}", p.breakpoints);
        let b = p.breakpoints[0];
        for u in [b - 0.1, b - 1e-6, b, b + 1e-6, b + 0.2] {
            assert!((p.eval(u) - drift_lhs(&t, u).unwrap().to_f64()).abs() < 1e-12, "u={u}");
        }

        let c = 0.8;
        let je = LevyTriplet2D::new([-c, 2.0 * c], [[0.0; 2]; 2], atoms(&[(1.0, -1.0, 1.0)])).unwrap();
        let p = drift_lhs_piecewise(&je).unwrap();
        assert!(p.breakpoints.is_empty());
        assert_eq!(p.pieces[0], Affine { slope: -c, intercept: 2.0 * c });
        let set = p.nonneg_set();
        assert_eq!(set.parts(), &[Interval::new(f64::NEG_INFINITY, 2.0, false, true)]);
    }

    #[test]
    fn small_jump_variation_cases() {
        let t = LevyTriplet2D::new([0.0, 0.0], [[0.0; 2]; 2], atoms(&[(0.1, 0.2, 1.0)])).unwrap();
        assert_eq!(small_jump_variation(&t, 0.3), Variation::Finite);
        let spec = DensitySpec::new(DensityFamily::EtaPower { scale: 1.0, alpha: 2.0 }, [0.0, 0.0, 0.0, 1.0], 1e-9).unwrap();
        let t = LevyTriplet2D::new([0.0, 0.0], [[0.0; 2]; 2], LevyMeasure2D::Density(spec)).unwrap();
        for u in [-1.0, 0.0, 2.5] {
            assert_eq!(small_jump_variation(&t, u), Variation::Infinite);
        }
        assert_eq!(small_jump_variation(&LevyTriplet2D::zero(), 1.0), Variation::Finite);
    }

    #[test]
    fn density_thetas_match_atom_discretisation() {
        // Uniform box in the right half-plane, partly below the axis.
        let spec = DensitySpec::new(DensityFamily::UniformBox { mass: 1.0 }, [0.5, 1.5, -1.0, 2.0], 1e-10).unwrap();
        let t = thetas(&LevyMeasure2D::Density(spec)).unwrap();
        // sup of |y|/(1-e^{-x}) for y ≥ -1 is at x = 0.5, y = -1.
        let th2 = 1.0 / (1.0 - (-0.5f64).exp());
        assert!((t.theta2.to_f64() - th2).abs() < 1e-9, "{t:?}");
        assert_eq!(t.theta1, 0.0);
        assert_eq!((t.theta3, t.theta4), (ExtendedReal::ZERO, PosInf));
        // The region mass drops to zero exactly at θ₂.
        let m = LevyMeasure2D::Density(DensitySpec::new(DensityFamily::UniformBox { mass: 1.0 }, [0.5, 1.5, -1.0, 2.0], 1e-10).unwrap());
        assert!(region_mass(&m, 2, th2 * 0.95).unwrap() > 0.0);
        assert_eq!(region_mass(&m, 2, th2 * 1.01).unwrap(), 0.0);
    }
}
