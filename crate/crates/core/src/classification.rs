//! Exact deciders: subordinator tests for `η - uW`, the no-ruin threshold,
//! the lower-bound function `δ`, and the convergence, stationarity and
//! degeneracy side conditions.

use serde::{Deserialize, Serialize};

use crate::error::{GouError, Result};
use crate::extended::{ExtendedReal, NegInf, PosInf};
use crate::interval::{ClosedInterval, Interval, IntervalSet};
use crate::levy_model::{
    self, covariance_rank1_at, Cond, Cond1D, Integral, LevyMeasure2D, LevyTriplet2D,
    MarginalTriplet, Rel,
};
use crate::region::{self, ThetaBounds};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailingCondition {
    Gaussian,
    NegativeJumps,
    Drift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorCertificate {
    pub verdict: Verdict,
    pub gaussian_ok: bool,
    pub negative_jumps_mass: ExtendedReal,
    pub drift_d: ExtendedReal,
    pub failing_condition: Option<FailingCondition>,
}

impl SubordinatorCertificate {
    fn assemble(gaussian_ok: bool, negative: Decided, drift: Decided, neg_mass: ExtendedReal, d: ExtendedReal) -> Self {
        let failing = if !gaussian_ok {
            Some(FailingCondition::Gaussian)
        } else if negative == Decided::No {
            Some(FailingCondition::NegativeJumps)
        } else if drift == Decided::No {
            Some(FailingCondition::Drift)
        } else {
            None
        };
        let verdict = if failing.is_some() {
            Verdict::No
        } else if negative == Decided::Unsure || drift == Decided::Unsure {
            Verdict::Undetermined
        } else {
            Verdict::Yes
        };
        SubordinatorCertificate {
            verdict,
            gaussian_ok,
            negative_jumps_mass: neg_mass,
            drift_d: d,
            failing_condition: failing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decided {
    Yes,
    No,
    Unsure,
}

/// Sign test `value ≥ 0` at the boundary tolerance, or `Unsure` when a
/// quadrature error bound straddles zero.
fn drift_sign(value: ExtendedReal, abs_err: f64, scale: f64) -> (Decided, ExtendedReal) {
    match value {
        NegInf => (Decided::No, value),
        PosInf => (Decided::Yes, value),
        ExtendedReal::Finite(v) => {
            if abs_err > 0.0 && v.abs() <= abs_err {
                return (Decided::Unsure, value);
            }
            if tol::nonneg(v, scale) {
                (Decided::Yes, ExtendedReal::new(v.max(0.0)))
            } else {
                (Decided::No, value)
            }
        }
    }
}

fn mass_sign(i: Integral) -> Decided {
    if i.value == 0.0 {
        Decided::Yes
    } else if i.value.finite().is_some_and(|v| v <= i.abs_err) {
        Decided::Unsure
    } else {
        Decided::No
    }
}

/// Subordinator test of a one-dimensional triplet: no Gaussian part, no
/// negative jumps, and `d = γ - ∫_{(0,1)} v Π(dv) ≥ 0`.
pub fn is_subordinator_1d(m: &MarginalTriplet) -> Result<SubordinatorCertificate> {
    let gaussian_ok = m.sigma2 == 0.0;
    let neg = m.jumps.mass(&[Cond1D::V(Rel::Lt)])?;
    let small = m.jumps.integrate(&[Cond1D::V(Rel::Gt), Cond1D::AbsLt1], &|v| v)?;
    let d = ExtendedReal::new(m.gamma).checked_sub(small.value)?;
    let scale = m.gamma.abs() + small.value.finite().unwrap_or(0.0).abs();
    let (drift, d) = drift_sign(d, small.abs_err, scale);
    Ok(SubordinatorCertificate::assemble(gaussian_ok, mass_sign(neg), drift, neg.value, d))
}

/// Inputs of the region test that do not depend on `u`.
#[derive(Debug, Clone, Copy)]
struct RegionData {
    thetas: ThetaBounds,
    a2_empty: Decided,
    a3_empty: Decided,
}

impl RegionData {
    fn new(m: &LevyMeasure2D) -> Result<Self> {
        Ok(RegionData {
            thetas: region::thetas(m)?,
            a2_empty: mass_sign(region::quadrant_mass(m, 2)?),
            a3_empty: mass_sign(region::quadrant_mass(m, 3)?),
        })
    }

    fn unsure(&self) -> bool {
        self.a2_empty == Decided::Unsure || self.a3_empty == Decided::Unsure
    }

    /// The admissible `u` from the three alternative region conditions.
    fn set(&self) -> IntervalSet {
        let t = &self.thetas;
        let closed = |lo: ExtendedReal, hi: ExtendedReal| {
            IntervalSet::from_interval(Interval::closed(lo.to_f64(), hi.to_f64()))
        };
        let mut s = IntervalSet::empty();
        let (e2, e3) = (self.a2_empty == Decided::Yes, self.a3_empty == Decided::Yes);
        if e3 {
            s = s.union(&closed(t.theta2, t.theta4));
        }
        if e2 {
            s = s.union(&closed(t.theta1, t.theta3));
        }
        if e2 && e3 {
            s = s.union(&closed(t.theta1, t.theta4));
        }
        s
    }

    fn contains(&self, u: f64) -> bool {
        let t = &self.thetas;
        let (e2, e3) = (self.a2_empty == Decided::Yes, self.a3_empty == Decided::Yes);
        (e3 && region::in_closed_tol(u, t.theta2, t.theta4))
            || (e2 && region::in_closed_tol(u, t.theta1, t.theta3))
            || (e2 && e3 && region::in_closed_tol(u, t.theta1, t.theta4))
    }
}

/// Subordinator test of `η - uW` from the triplet of `(ξ, η)` alone: the
/// rank-one covariance form, one of the three region conditions on `θ₁…θ₄`,
/// and the drift inequality.
pub fn is_subordinator_s(t: &LevyTriplet2D, u: f64) -> Result<SubordinatorCertificate> {
    let rd = RegionData::new(&t.jumps)?;
    subordinator_s_with(t, u, &rd)
}

fn subordinator_s_with(t: &LevyTriplet2D, u: f64, rd: &RegionData) -> Result<SubordinatorCertificate> {
    let gaussian_ok = covariance_rank1_at(&t.sigma, u);
    let (negative, neg_mass) = if rd.contains(u) {
        (if rd.unsure() { Decided::Unsure } else { Decided::Yes }, ExtendedReal::ZERO)
    } else {
        let mass = t.jumps.mass(&[Cond::S { u, rel: Rel::Lt }])?;
        let sign = if rd.unsure() { Decided::Unsure } else { Decided::No };
        (sign, mass.value)
    };
    let lhs = region::drift_lhs_integral(t, u)?;
    let (drift, d) = drift_sign(lhs.value, lhs.abs_err, region::drift_scale(t, u));
    Ok(SubordinatorCertificate::assemble(gaussian_ok, negative, drift, neg_mass, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    SigmaPositive,
    SigmaZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decision {
    NoRuinFrom { u_star: f64 },
    RuinEverywhere,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuinReport {
    pub decision: Decision,
    pub thetas: ThetaBounds,
    pub feasible_u: Vec<ClosedInterval>,
    pub branch: Branch,
    /// Certificate of `η - u*W` when a threshold exists.
    pub certificate: Option<SubordinatorCertificate>,
    /// `max{θ₂, inf{u > 0 : drift inequality holds}}` computed literally.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// The set `{u : η - uW is a subordinator}` as a union of closed intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    pub set: IntervalSet,
    pub warnings: Vec<String>,
}

impl FeasibleSet {
    pub fn intervals(&self) -> Vec<ClosedInterval> {
        self.set.parts().iter().map(ClosedInterval::from).collect()
    }

    /// `δ(z) = sup(F ∩ (-∞, z])`.
    pub fn delta(&self, z: f64) -> ExtendedReal {
        let cut = self.set.intersect_interval(&Interval::new(f64::NEG_INFINITY, z, false, true));
        match cut.sup() {
            Some(s) => ExtendedReal::new(s),
            None => NegInf,
        }
    }
}

pub fn feasible_u_set(t: &LevyTriplet2D) -> Result<FeasibleSet> {
    let rd = RegionData::new(&t.jumps)?;
    feasible_with(t, &rd)
}

fn feasible_with(t: &LevyTriplet2D, rd: &RegionData) -> Result<FeasibleSet> {
    let mut warnings = Vec::new();
    if rd.unsure() {
        return Err(GouError::undetermined("quadrant masses are within tolerance of zero", 0.0));
    }
    let s11 = t.sigma_xi2();
    if !t.sigma_is_zero() {
        // Covariance rigidity: at most the single candidate u₀ = -σ_ξη/σ_ξ².
        if s11 == 0.0 {
            return Ok(FeasibleSet { set: IntervalSet::empty(), warnings });
        }
        let u0 = -t.sigma_xi_eta() / s11;
        if !covariance_rank1_at(&t.sigma, u0) {
            return Ok(FeasibleSet { set: IntervalSet::empty(), warnings });
        }
        let cert = subordinator_s_with(t, u0, rd)?;
        let set = match cert.verdict {
            Verdict::Yes => IntervalSet::from_interval(Interval::point(u0)),
            Verdict::No => IntervalSet::empty(),
            Verdict::Undetermined => {
                return Err(GouError::undetermined("drift inequality at the covariance point", 0.0))
            }
        };
        return Ok(FeasibleSet { set, warnings });
    }
    let r = rd.set();
    let mut parts: Vec<Interval> = match &t.jumps {
        LevyMeasure2D::Atoms(_) => {
            let d = region::drift_lhs_piecewise(t)?.nonneg_set();
            r.intersect(&d).parts().to_vec()
        }
        LevyMeasure2D::Density(_) => density_drift_parts(t, &r)?,
    };
    // Region endpoints where the drift inequality holds only to rounding.
    for p in r.parts() {
        for e in [p.lo, p.hi] {
            if e.is_finite()
                && !parts.iter().any(|q| q.contains(e))
                && subordinator_s_with(t, e, rd)?.verdict == Verdict::Yes
            {
                parts.push(Interval::point(e));
            }
        }
    }
    let mut set = IntervalSet::from_parts(parts);
    set = merge_close(&set);
    if !set.is_closed() {
        warnings.push("feasible set was not closed; reporting its closure".into());
        set = set.closure();
    }
    Ok(FeasibleSet { set, warnings })
}

/// Joins parts separated by a gap below the boundary tolerance.
fn merge_close(s: &IntervalSet) -> IntervalSet {
    let mut out: Vec<Interval> = Vec::new();
    for p in s.parts() {
        if let Some(last) = out.last_mut() {
            if tol::approx_eq(last.hi, p.lo) {
                last.hi = p.hi;
                last.hi_closed = p.hi_closed;
                continue;
            }
        }
        out.push(*p);
    }
    IntervalSet::from_parts(out)
}

/// On each region part the drift inequality is affine in `u` (all jumps of
/// `η - uW` are nonnegative there), so two evaluations determine it.
fn density_drift_parts(t: &LevyTriplet2D, r: &IntervalSet) -> Result<Vec<Interval>> {
    let mut out = Vec::new();
    for p in r.parts() {
        let (u1, u2) = match (p.lo.is_finite(), p.hi.is_finite()) {
            (true, true) if p.lo == p.hi => (p.lo, p.lo),
            (true, true) => (p.lo, p.hi),
            (true, false) => (p.lo, p.lo + 1.0),
            (false, true) => (p.hi - 1.0, p.hi),
            (false, false) => (0.0, 1.0),
        };
        let l1 = region::drift_lhs_integral(t, u1)?;
        let l2 = region::drift_lhs_integral(t, u2)?;
        let (Some(v1), Some(v2)) = (l1.value.finite(), l2.value.finite()) else {
            if l1.value == NegInf || l2.value == NegInf {
                continue;
            }
            return Err(GouError::undetermined("drift inequality is infinite", f64::INFINITY));
        };
        let err = l1.abs_err.max(l2.abs_err);
        if u1 == u2 {
            if v1.abs() <= err {
                return Err(GouError::undetermined("drift inequality within quadrature error", err));
            }
            if v1 >= 0.0 {
                out.push(*p);
            }
            continue;
        }
        let slope = (v2 - v1) / (u2 - u1);
        let half = if slope.abs() <= 2.0 * err / (u2 - u1) {
            if v1.abs() <= err {
                return Err(GouError::undetermined("drift inequality within quadrature error", err));
            }
            if v1 >= 0.0 {
                Interval::everything()
            } else {
                continue;
            }
        } else {
            let root = u1 - v1 / slope;
            if slope > 0.0 {
                Interval::new(root, f64::INFINITY, true, false)
            } else {
                Interval::new(f64::NEG_INFINITY, root, false, true)
            }
        };
        let c = p.intersect(&half);
        if !c.is_empty() {
            out.push(c);
        }
    }
    Ok(out)
}

/// Lower-bound function `δ(z) = sup{u ≤ z : η - uW is a subordinator}`.
pub fn delta(t: &LevyTriplet2D, z: f64) -> Result<ExtendedReal> {
    Ok(feasible_u_set(t)?.delta(z))
}

/// Decides whether `ψ(z) = 0` for large `z`, and from which threshold.
pub fn no_ruin_threshold(t: &LevyTriplet2D) -> Result<RuinReport> {
    let rd = RegionData::new(&t.jumps)?;
    let branch = if t.sigma_xi2() > 0.0 { Branch::SigmaPositive } else { Branch::SigmaZero };
    let fs = match feasible_with(t, &rd) {
        Ok(f) => f,
        Err(e) if e.is_undetermined() => {
            return Ok(RuinReport {
                decision: Decision::Undetermined,
                thetas: rd.thetas,
                feasible_u: Vec::new(),
                branch,
                certificate: None,
                u_prime: None,
                warnings: vec![e.to_string()],
            })
        }
        Err(e) => return Err(e),
    };
    let mut warnings = fs.warnings.clone();
    let nonneg = fs.set.intersect_interval(&Interval::new(0.0, f64::INFINITY, true, false));
    let (decision, certificate) = match nonneg.inf() {
        None => (Decision::RuinEverywhere, None),
        Some(lo) => {
            let u_star = lo.max(0.0);
            (Decision::NoRuinFrom { u_star }, Some(subordinator_s_with(t, u_star, &rd)?))
        }
    };
    let mut u_prime = None;
    if branch == Branch::SigmaZero && t.sigma_is_zero() && t.jumps.is_atomic() {
        // The literal form max{θ₂, inf{u > 0 : drift inequality}}.
        let d = region::drift_lhs_piecewise(t)?.nonneg_set();
        let pos = d.intersect_interval(&Interval::new(0.0, f64::INFINITY, false, false));
        if let Some(inf) = pos.inf() {
            let up = rd.thetas.theta2.max(ExtendedReal::new(inf));
            if let Some(up) = up.finite() {
                u_prime = Some(up);
                match decision {
                    Decision::NoRuinFrom { u_star } if !tol::approx_eq(up, u_star) => warnings.push(format!(
                        "literal threshold u' = {up} differs from the feasible-set threshold {u_star}"
                    )),
                    Decision::RuinEverywhere => {
                        warnings.push(format!("literal threshold u' = {up} is not in the feasible set"))
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(RuinReport {
        decision,
        thetas: rd.thetas,
        feasible_u: fs.intervals(),
        branch,
        certificate,
        u_prime,
        warnings,
    })
}

/// The explicit finite-variation classification in terms of the drift
/// vector: `Π(A_3) = 0`, `θ₂ ≤ θ₄`, and one of
///
/// * `d_ξ = 0` and `d_η ≥ 0` (threshold `θ₂`),
/// * `d_ξ > 0` and `-d_η/d_ξ ≤ θ₄` (threshold `max{θ₂, -d_η/d_ξ}`),
/// * `d_ξ < 0`, `d_η ≥ 0` and `-d_η/d_ξ ≥ θ₂` (threshold `θ₂`).
pub fn finite_variation_decision(t: &LevyTriplet2D) -> Result<Decision> {
    let [dx, dy] = levy_model::drift_vector(t)?;
    let th = region::thetas(&t.jumps)?;
    if region::quadrant_mass(&t.jumps, 3)?.value != 0.0 || th.theta2 > th.theta4 {
        return Ok(Decision::RuinEverywhere);
    }
    let scale = t.gamma_tilde[0].abs()
        + t.jumps
            .integrate(&[Cond::DISK], &|x, _| x.abs())?
            .value
            .finite()
            .unwrap_or(0.0);
    let dx = tol::snap(dx, scale);
    let theta2 = th.theta2.to_f64();
    let ratio = |dy: f64, dx: f64| -dy / dx;
    let threshold = if dx == 0.0 {
        (tol::nonneg(dy, dy.abs())).then_some(theta2)
    } else if dx > 0.0 {
        let r = ratio(dy, dx);
        (region::in_closed_tol(r, NegInf, th.theta4) || r <= 0.0).then(|| theta2.max(r))
    } else {
        let r = ratio(dy, dx);
        (dy >= 0.0 && region::in_closed_tol(r, th.theta2, PosInf)).then_some(theta2)
    };
    Ok(match threshold {
        Some(u) if u.is_finite() => Decision::NoRuinFrom { u_star: u },
        _ => Decision::RuinEverywhere,
    })
}

/// Whether `Z_t` converges a.s.: decided by the sign of `E[ξ₁]` when the mean
/// exists (the `η`-tail condition always holds for the measures supported here).
pub fn z_infinity_converges(t: &LevyTriplet2D) -> Result<Verdict> {
    let x_tail = t.jumps.integrate(&[Cond::NOT_DISK], &|x, _| x)?;
    let abs_tail = t.jumps.integrate(&[Cond::NOT_DISK], &|x, _| x.abs())?;
    if !abs_tail.value.is_finite() {
        return Ok(Verdict::Undetermined);
    }
    let mean = t.gamma_tilde[0] + x_tail.value.to_f64();
    let err = x_tail.abs_err;
    Ok(if err > 0.0 && mean.abs() <= err {
        Verdict::Undetermined
    } else if mean > 0.0 {
        Verdict::Yes
    } else {
        Verdict::No
    })
}

/// Whether a strictly stationary version of `V` exists: convergence of the
/// integral of `(-ξ, L)`.
pub fn is_stationary_possible(t: &LevyTriplet2D) -> Result<Verdict> {
    if !t.jumps.is_atomic() {
        return Ok(Verdict::Undetermined);
    }
    let l = levy_model::l_process(t)?;
    let flipped_atoms = l
        .jumps
        .atoms()
        .expect("l_process keeps atoms")
        .iter()
        .map(|a| levy_model::JumpAtom { x: -a.x, ..*a })
        .collect();
    let [[s11, s12], [_, s22]] = l.sigma;
    let flipped = LevyTriplet2D::new(
        [-l.gamma_tilde[0], l.gamma_tilde[1]],
        [[s11, -s12], [-s12, s22]],
        LevyMeasure2D::Atoms(flipped_atoms),
    )?;
    z_infinity_converges(&flipped)
}

/// `Some(k)` with `k ≠ 0` iff `η = -kW`, in which case `Z_∞ = k` a.s.
pub fn is_degenerate(t: &LevyTriplet2D) -> Result<Option<f64>> {
    let s11 = t.sigma_xi2();
    let w = levy_model::w_transform(t)?;
    let u = if s11 > 0.0 {
        -t.sigma_xi_eta() / s11
    } else if let Some(atoms) = t.jumps.atoms() {
        match atoms.iter().find(|a| a.x != 0.0) {
            Some(a) => region::atom_threshold(a.x, a.y),
            None if atoms.is_empty() && w.gamma_tilde[1] != 0.0 => t.gamma_tilde[1] / w.gamma_tilde[1],
            None => return Ok(None),
        }
    } else {
        return Ok(None);
    };
    if !u.is_finite() || u == 0.0 {
        return Ok(None);
    }
    let m = levy_model::s_process(t, u)?;
    if m.sigma2 != 0.0 {
        return Ok(None);
    }
    let nonzero = m.jumps.mass(&[Cond1D::V(Rel::Lt)])?.value.to_f64() + m.jumps.mass(&[Cond1D::V(Rel::Gt)])?.value.to_f64();
    if nonzero != 0.0 {
        return Ok(None);
    }
    let mut scale = t.gamma_tilde[1].abs() + (u * w.gamma_tilde[1]).abs();
    if let Some(atoms) = t.jumps.atoms() {
        scale += atoms.iter().map(|a| (a.y.abs() + (u * a.w()).abs()) * a.rate).sum::<f64>();
    }
    if tol::snap(m.gamma, scale) != 0.0 {
        return Ok(None);
    }
    Ok(Some(-u))
}
