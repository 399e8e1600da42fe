//! Triplet-to-triplet transforms: marginals, the W-transform, `η - uW`, the
//! stationarity process `L`, drift vectors, means and rescaling of `η`.

use crate::error::{GouError, Result};
use crate::extended::ExtendedReal;
use crate::levy_model::density::{Integral, YMap};
use crate::levy_model::region::Rel;
use crate::levy_model::{
    covariance_rank1_at, s_jump, Atom1D, Cond, Cond1D, Coord, JumpAtom, LevyMeasure2D,
    LevyTriplet2D, MarginalTriplet, Measure1D,
};

fn finite(i: Integral, what: &str) -> Result<f64> {
    i.value
        .finite()
        .ok_or_else(|| GouError::undetermined(format!("{what} diverged"), f64::INFINITY))
}

/// Corrections `∫_{|x|<1, x²+y²≥1} x dΠ` and `∫_{|y|<1, x²+y²≥1} y dΠ` that
/// turn ball-convention drifts into interval-convention drifts.
pub(crate) fn conversion_corrections(m: &LevyMeasure2D) -> Result<[f64; 2]> {
    let cx = m.integrate(&[Cond::XAbsLt1, Cond::NOT_DISK], &|x, _| x)?;
    let cy = m.integrate(&[Cond::YAbsLt1, Cond::NOT_DISK], &|_, y| y)?;
    Ok([finite(cx, "x correction")?, finite(cy, "y correction")?])
}

pub fn marginal_xi(t: &LevyTriplet2D) -> Result<MarginalTriplet> {
    let [cx, _] = conversion_corrections(&t.jumps)?;
    let jumps = match &t.jumps {
        LevyMeasure2D::Atoms(atoms) => Measure1D::Atoms(
            atoms
                .iter()
                .filter(|a| a.x != 0.0)
                .map(|a| Atom1D { value: a.x, rate: a.rate })
                .collect(),
        ),
        LevyMeasure2D::Density(spec) => Measure1D::Projected {
            spec: spec.clone(),
            coord: Coord::First,
        },
    };
    MarginalTriplet::new(t.gamma_tilde[0] + cx, t.sigma_xi2(), jumps)
}

pub fn marginal_eta(t: &LevyTriplet2D) -> Result<MarginalTriplet> {
    let [_, cy] = conversion_corrections(&t.jumps)?;
    let jumps = match &t.jumps {
        LevyMeasure2D::Atoms(atoms) => Measure1D::Atoms(
            atoms
                .iter()
                .filter(|a| a.y != 0.0)
                .map(|a| Atom1D { value: a.y, rate: a.rate })
                .collect(),
        ),
        LevyMeasure2D::Density(spec) => Measure1D::Projected {
            spec: spec.clone(),
            coord: Coord::Second,
        },
    };
    MarginalTriplet::new(t.gamma_tilde[1] + cy, t.sigma_eta2(), jumps)
}

/// Triplet of `(ξ, W)` where `e^{-ξ} = ε(W)`.
///
/// `W` has Brownian part `-B_ξ`, jumps `e^{-Δξ} - 1`, and its drift obeys
/// `γ̃'_ξ + γ̃_W = ½σ_ξ² + ∫_{x²+w²<1} (x + w) dΠ_ξ`.
pub fn w_transform(t: &LevyTriplet2D) -> Result<LevyTriplet2D> {
    let gamma_xi = marginal_xi(t)?.gamma;
    let m = &t.jumps;
    let out_x = m.integrate(&[Cond::XAbsLt1, Cond::WDisk { inside: false }], &|x, _| x)?;
    let gt_xi = gamma_xi - finite(out_x, "W re-truncation")?;
    let in_sum = m.integrate(&[Cond::WDisk { inside: true }], &|x, _| x + (-x).exp_m1())?;
    let s2 = t.sigma_xi2();
    let gt_w = 0.5 * s2 + finite(in_sum, "W drift")? - gt_xi;
    let jumps = match m {
        LevyMeasure2D::Atoms(atoms) => LevyMeasure2D::Atoms(
            atoms
                .iter()
                .filter(|a| a.x != 0.0)
                .map(|a| JumpAtom { x: a.x, y: a.w(), rate: a.rate })
                .collect(),
        ),
        LevyMeasure2D::Density(spec) => LevyMeasure2D::Density(spec.with_map(YMap { a: 0.0, c: 1.0 })),
    };
    Ok(LevyTriplet2D {
        gamma_tilde: [gt_xi, gt_w],
        sigma: [[s2, -s2], [-s2, s2]],
        jumps,
    })
}

/// Gaussian variance of `η - uW`: `σ_η² + 2uσ_ξη + u²σ_ξ²`, exactly zero when
/// `Σ` has the rank-one form for this `u`.
fn s_variance(sigma: &[[f64; 2]; 2], u: f64) -> f64 {
    let (s11, s12, s22) = (sigma[0][0], sigma[0][1], sigma[1][1]);
    if u == 0.0 || s11 == 0.0 {
        return s22;
    }
    if covariance_rank1_at(sigma, u) {
        return 0.0;
    }
    // Completed square; positive whenever the rank-one test fails.
    let u0 = -s12 / s11;
    let det = (s11 * s22 - s12 * s12).max(0.0);
    let d = u - u0;
    s11 * d * d + det / s11
}

/// One-dimensional triplet of `S^{(u)} = η - uW`.
pub fn s_process(t: &LevyTriplet2D, u: f64) -> Result<MarginalTriplet> {
    if !u.is_finite() {
        return Err(GouError::InvalidModel("u must be finite".into()));
    }
    let w = w_transform(t)?;
    let gt_w = w.gamma_tilde[1];
    let base = if u == 0.0 { t.gamma_tilde[1] } else { t.gamma_tilde[1] - u * gt_w };
    let (correction, jumps) = match &t.jumps {
        LevyMeasure2D::Atoms(atoms) => {
            let mut corr = 0.0;
            let mut out = Vec::new();
            for a in atoms {
                let s = s_jump(a.x, a.y, u);
                if s != 0.0 {
                    out.push(Atom1D { value: s, rate: a.rate });
                }
                let mut term = 0.0;
                if s.abs() < 1.0 {
                    term += s;
                }
                if Cond::DISK.holds(a.x, a.y) {
                    term -= a.y;
                }
                if u != 0.0 && super::region::in_w_disk(a.x) {
                    term += u * a.w();
                }
                corr += term * a.rate;
            }
            (corr, Measure1D::Atoms(out))
        }
        LevyMeasure2D::Density(spec) => {
            // The integrand s·1{|s|<1} − y·1_disk + u·w·1_wdisk vanishes where all
            // three indicators hold, so only the seven remaining cells contribute.
            let mut corr = Integral::ZERO;
            for cell in 0..7u8 {
                let (i1, i2, i3) = (cell & 1 != 0, cell & 2 != 0, cell & 4 != 0);
                let region = [
                    Cond::SAbsLt1 { u, inside: i1 },
                    Cond::Disk { k: 1.0, inside: i2 },
                    Cond::WDisk { inside: i3 },
                ];
                let g = |x: f64, y: f64| {
                    let wv = (-x).exp_m1();
                    let mut v = 0.0;
                    if i1 {
                        v += y - u * wv;
                    }
                    if i2 {
                        v -= y;
                    }
                    if i3 {
                        v += u * wv;
                    }
                    v
                };
                corr = corr.checked_add(t.jumps.integrate(&region, &g)?)?;
            }
            let map = YMap { a: 1.0, c: -u };
            (
                finite(corr, "S drift")?,
                Measure1D::Projected {
                    spec: spec.with_map(map),
                    coord: Coord::Second,
                },
            )
        }
    };
    MarginalTriplet::new(base + correction, s_variance(&t.sigma, u), jumps)
}

/// Triplet of `(ξ, L)` with `L_t = η_t + Σ_{s≤t} (e^{-Δξ_s} - 1)Δη_s - t·Cov(B_ξ, B_η)`.
pub fn l_process(t: &LevyTriplet2D) -> Result<LevyTriplet2D> {
    let atoms = t
        .jumps
        .atoms()
        .ok_or_else(|| GouError::undetermined("the L-process is only built for atom measures", f64::INFINITY))?;
    let mut gx = t.gamma_tilde[0];
    let mut gl = t.gamma_tilde[1] - t.sigma_xi_eta();
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms {
        if Cond::DISK.holds(a.x, a.y) {
            gx -= a.x * a.rate;
            gl -= a.y * a.rate;
        }
        let yl = a.y * (-a.x).exp();
        if Cond::DISK.holds(a.x, yl) {
            gx += a.x * a.rate;
            gl += yl * a.rate;
        }
        if a.x != 0.0 || yl != 0.0 {
            out.push(JumpAtom { x: a.x, y: yl, rate: a.rate });
        }
    }
    Ok(LevyTriplet2D {
        gamma_tilde: [gx, gl],
        sigma: t.sigma,
        jumps: LevyMeasure2D::Atoms(out),
    })
}

/// Drift vector `(d_ξ, d_η) = γ̃ - ∫_{|z|<1} z dΠ` of a finite-variation driver.
pub fn drift_vector(t: &LevyTriplet2D) -> Result<[f64; 2]> {
    if !t.sigma_is_zero() {
        return Err(GouError::NotFiniteVariation("the Gaussian part is nonzero".into()));
    }
    let m = &t.jumps;
    if !m.is_atomic() {
        let abs = m.integrate(&[Cond::DISK], &|x, y| x.abs() + y.abs())?;
        if !abs.value.is_finite() {
            return Err(GouError::NotFiniteVariation("small jumps are not absolutely summable".into()));
        }
    }
    let ix = finite(m.integrate(&[Cond::DISK], &|x, _| x)?, "x small jumps")?;
    let iy = finite(m.integrate(&[Cond::DISK], &|_, y| y)?, "y small jumps")?;
    Ok([t.gamma_tilde[0] - ix, t.gamma_tilde[1] - iy])
}

/// `d = γ - ∫_{(0,1)} v Π(dv)` of a measure without negative jumps.
pub fn d_eta(m: &MarginalTriplet) -> Result<ExtendedReal> {
    let neg = m.jumps.mass(&[Cond1D::V(Rel::Lt)])?;
    if neg.value > 0.0 {
        return Err(GouError::NotApplicable("the measure has negative jumps".into()));
    }
    let small = m.jumps.integrate(&[Cond1D::V(Rel::Gt), Cond1D::AbsLt1], &|v| v)?;
    ExtendedReal::new(m.gamma).checked_sub(small.value)
}

/// `E[(ξ₁, η₁)] = γ̃ + ∫_{|z|≥1} z dΠ`.
pub fn mean_at_one(t: &LevyTriplet2D) -> Result<[ExtendedReal; 2]> {
    let m = &t.jumps;
    let bx = m.integrate(&[Cond::NOT_DISK], &|x, _| x)?;
    let by = m.integrate(&[Cond::NOT_DISK], &|_, y| y)?;
    Ok([
        ExtendedReal::new(t.gamma_tilde[0]).checked_add(bx.value)?,
        ExtendedReal::new(t.gamma_tilde[1]).checked_add(by.value)?,
    ])
}

/// Exact triplet of `(ξ, kη)`, with the ball truncation recomputed.
pub fn scale_eta(t: &LevyTriplet2D, k: f64) -> Result<LevyTriplet2D> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(GouError::InvalidModel(format!("scale factor must be positive, got {k}")));
    }
    let [[s11, s12], [_, s22]] = t.sigma;
    let sigma = [[s11, k * s12], [k * s12, k * k * s22]];
    let mut g = [t.gamma_tilde[0], k * t.gamma_tilde[1]];
    if k == 1.0 {
        return LevyTriplet2D::new(g, sigma, t.jumps.clone());
    }
    let jumps = match &t.jumps {
        LevyMeasure2D::Atoms(atoms) => LevyMeasure2D::Atoms(
            atoms
                .iter()
                .map(|a| JumpAtom { x: a.x, y: k * a.y, rate: a.rate })
                .collect(),
        ),
        LevyMeasure2D::Density(spec) => LevyMeasure2D::Density(spec.with_map(YMap { a: k, c: 0.0 })),
    };
    // Jumps entering / leaving the unit ball when η is stretched.
    let old = |inside| Cond::Disk { k, inside };
    let gained = [Cond::DISK, old(false)];
    let lost = [Cond::NOT_DISK, old(true)];
    for (i, pick) in [(0usize, 0usize), (1, 1)] {
        let f = move |x: f64, y: f64| if pick == 0 { x } else { y };
        let plus = finite(jumps.integrate(&gained, &f)?, "rescaling correction")?;
        let minus = finite(jumps.integrate(&lost, &f)?, "rescaling correction")?;
        g[i] += plus - minus;
    }
    LevyTriplet2D::new(g, sigma, jumps)
}
