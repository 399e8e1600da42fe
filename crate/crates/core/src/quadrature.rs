//! Adaptive Gauss–Kronrod quadrature on bounded intervals, plus a dyadic-shell
//! integrator for integrands that may be singular at the origin.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{GouError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl QuadConfig {
    pub fn new(abs_tol: f64) -> Self {
        QuadConfig {
            abs_tol,
            max_intervals: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub abs_err: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad {
        value: 0.0,
        abs_err: 0.0,
    };
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        Quad {
            value: self.value + o.value,
            abs_err: self.abs_err + o.abs_err,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Quad {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Quad {
        value: kron * h,
        abs_err: ((kron - gauss) * h).abs(),
    }
}

struct Panel {
    a: f64,
    b: f64,
    q: Quad,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.q.abs_err == o.q.abs_err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.q.abs_err.total_cmp(&o.q.abs_err)
    }
}

/// Integrates `f` over `[a, b]`, bisecting the worst panel until the summed
/// error estimate drops below `cfg.abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<Quad> {
    if a == b {
        return Ok(Quad::ZERO);
    }
    if a > b {
        let q = integrate(f, b, a, cfg)?;
        return Ok(Quad {
            value: -q.value,
            abs_err: q.abs_err,
        });
    }
    let first = gk15(&mut f, a, b);
    if !first.value.is_finite() {
        return Err(GouError::undetermined("non-finite integrand", f64::INFINITY));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, q: first });
    let mut total = first;
    while total.abs_err > cfg.abs_tol.max(1e-13 * total.value.abs()) {
        if heap.len() >= cfg.max_intervals {
            return Err(GouError::undetermined(
                "quadrature did not reach tolerance",
                total.abs_err,
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(GouError::undetermined(
                "quadrature panel underflow",
                total.abs_err,
            ));
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total.value += left.value + right.value - worst.q.value;
        total.abs_err += left.abs_err + right.abs_err - worst.q.abs_err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            q: left,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            q: right,
        });
    }
    // Recompute the sum to shed accumulated cancellation from the incremental updates.
    let (value, abs_err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.q.value, e + p.q.abs_err));
    Ok(Quad { value, abs_err })
}

/// Result of an integral that may diverge at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improper {
    Finite(Quad),
    /// Diverges to `sign · ∞`.
    Divergent { sign: f64 },
}

const MAX_SHELLS: usize = 400;

/// Integrates `f` over `(0, h]`, treating `0` as a possible singularity.
///
/// The interval is split into dyadic shells `[h 2^{-k-1}, h 2^{-k}]`. Once the
/// ratio of consecutive shell contributions stabilises, the remaining tail is
/// summed as a geometric series; a ratio at or above one means divergence.
pub fn integrate_from_zero<F: FnMut(f64) -> f64>(
    mut f: F,
    h: f64,
    cfg: QuadConfig,
) -> Result<Improper> {
    assert!(h > 0.0);
    let shell_cfg = QuadConfig {
        abs_tol: cfg.abs_tol / 64.0,
        ..cfg
    };
    let mut total = Quad::ZERO;
    let mut prev: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut hi = h;
    for _ in 0..MAX_SHELLS {
        let lo = 0.5 * hi;
        let shell = integrate(&mut f, lo, hi, shell_cfg)?;
        total = total + shell;
        if shell.value == 0.0 && prev.is_some_and(|p| p == 0.0) {
            return Ok(Improper::Finite(total));
        }
        if let Some(p) = prev {
            if p != 0.0 && shell.value.signum() == p.signum() {
                let ratio = shell.value / p;
                if let Some(r0) = prev_ratio {
                    if (ratio - r0).abs() < 1e-6 {
                        if ratio >= 1.0 - 1e-9 {
                            return Ok(Improper::Divergent {
                                sign: shell.value.signum(),
                            });
                        }
                        let tail = shell.value * ratio / (1.0 - ratio);
                        if tail.abs() <= cfg.abs_tol {
                            total.value += tail;
                            total.abs_err += 1e-6 * tail.abs() / (1.0 - ratio);
                            return Ok(Improper::Finite(total));
                        }
                    }
                }
                prev_ratio = Some(ratio);
            } else {
                prev_ratio = None;
            }
        }
        if shell.value.abs() < cfg.abs_tol * 1e-3 && lo < 1e-30 {
            return Ok(Improper::Finite(total));
        }
        prev = Some(shell.value);
        hi = lo;
        if !total.value.is_finite() {
            return Ok(Improper::Divergent {
                sign: total.value.signum(),
            });
        }
    }
    Err(GouError::undetermined(
        "improper integral did not settle",
        prev.unwrap_or(f64::INFINITY).abs(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_smooth_functions() {
        let cfg = QuadConfig::new(1e-12);
        let q = integrate(|x| x * x, 0.0, 3.0, cfg).unwrap();
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = integrate(f64::sin, 0.0, std::f64::consts::PI, cfg).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| x, 2.0, 1.0, cfg).unwrap();
        assert!((q.value + 1.5).abs() < 1e-12);
    }

    #[test]
    fn discontinuous_integrand_converges_by_bisection() {
        let cfg = QuadConfig::new(1e-9);
        let q = integrate(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, cfg).unwrap();
        assert!((q.value - 0.3).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn improper_convergent_and_divergent() {
        let cfg = QuadConfig::new(1e-10);
        // ∫_0^1 y^{-1/2} dy = 2
        match integrate_from_zero(|y| y.powf(-0.5), 1.0, cfg).unwrap() {
            Improper::Finite(q) => assert!((q.value - 2.0).abs() < 1e-8, "{q:?}"),
            d => panic!("{d:?}"),
        }
        // ∫_0^1 y · y^{-2} dy = ∞
        assert_eq!(
            integrate_from_zero(|y| y * y.powi(-2), 1.0, cfg).unwrap(),
            Improper::Divergent { sign: 1.0 }
        );
        // ∫_0^1 y^{-1.5} dy = ∞
        assert!(matches!(
            integrate_from_zero(|y| y.powf(-1.5), 1.0, cfg).unwrap(),
            Improper::Divergent { .. }
        ));
        // smooth integrand
        match integrate_from_zero(|y| y * y, 2.0, cfg).unwrap() {
            Improper::Finite(q) => assert!((q.value - 8.0 / 3.0).abs() < 1e-9),
            d => panic!("{d:?}"),
        }
    }
}
