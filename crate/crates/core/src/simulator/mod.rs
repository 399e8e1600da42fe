//! Jump-adapted path generation for `(ξ, η)`, the integral
//! `Z_t = ∫₀ᵗ e^{-ξ_{s-}} dη_s`, the process `V_t = e^{ξ_t}(z + Z_t)`, and
//! first-passage detection.
//!
//! Two engines are provided. Drivers without a Gaussian part are simulated
//! event by event with no discretisation error: between jumps `ξ` and `η`
//! are linear and `Z`, `V` have closed forms. Drivers with a Gaussian part
//! use a uniform grid into which the exact jump times are merged; only the
//! continuous contribution to `Z` is a left-point Itô sum.

mod driver;
pub mod rng;

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{GouError, Result};
use crate::levy_model::LevyTriplet2D;
use crate::presets;

pub use driver::Driver;
pub use rng::{aux_rng, path_rng, PathRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_eps: Option<f64>,
}

impl PathConfig {
    pub fn new(horizon: f64, step: f64, seed: u64) -> Result<Self> {
        let c = PathConfig {
            horizon,
            step,
            seed,
            truncation_eps: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(GouError::InvalidModel("horizon must be positive and finite".into()));
        }
        if !(self.step > 0.0 && self.step <= self.horizon) {
            return Err(GouError::InvalidModel("step must lie in (0, horizon]".into()));
        }
        if let Some(e) = self.truncation_eps {
            if !(e > 0.0 && e.is_finite()) {
                return Err(GouError::InvalidModel("truncation_eps must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Values just before a jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftLimit {
    pub index: usize,
    pub xi: f64,
    pub eta: f64,
}

/// A sampled path of `(ξ, η)` on the union of the grid and the jump times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPath {
    pub times: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub jump_flags: Vec<bool>,
    pub left_limits: Vec<LeftLimit>,
}

impl PairPath {
    /// A path without jumps from given samples.
    pub fn continuous(times: Vec<f64>, xi: Vec<f64>, eta: Vec<f64>) -> Self {
        let n = times.len();
        assert!(xi.len() == n && eta.len() == n, "samples must align with times");
        PairPath {
            times,
            xi,
            eta,
            jump_flags: vec![false; n],
            left_limits: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(ξ, η)` just before index `k` (equal to the values there unless `k` is a jump).
    fn left_iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut next = self.left_limits.iter().peekable();
        (0..self.len()).map(move |k| match next.peek() {
            Some(l) if l.index == k => {
                let l = next.next().unwrap();
                (l.xi, l.eta)
            }
            _ => (self.xi[k], self.eta[k]),
        })
    }

    fn push(&mut self, t: f64, xi: f64, eta: f64, left: Option<(f64, f64)>) {
        if let Some((xl, el)) = left {
            self.left_limits.push(LeftLimit {
                index: self.times.len(),
                xi: xl,
                eta: el,
            });
        }
        self.times.push(t);
        self.xi.push(xi);
        self.eta.push(eta);
        self.jump_flags.push(left.is_some());
    }
}

/// A full path: the pair, `Z`, and `V` for one starting capital.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub pair: PairPath,
    pub z_start: f64,
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    /// The event-driven engine produced it (no discretisation error).
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPassage {
    pub hit: bool,
    pub time: f64,
    pub v_at_hit: f64,
    /// Ruin by continuous motion rather than a jump; `v_at_hit` is then 0.
    #[serde(default)]
    pub continuous_crossing: bool,
}

impl FirstPassage {
    pub const NONE: FirstPassage = FirstPassage {
        hit: false,
        time: f64::NAN,
        v_at_hit: f64::NAN,
        continuous_crossing: false,
    };

    fn continuous(time: f64) -> Self {
        FirstPassage {
            hit: true,
            time,
            v_at_hit: 0.0,
            continuous_crossing: true,
        }
    }

    fn jump(time: f64, v: f64) -> Self {
        FirstPassage {
            hit: true,
            time,
            v_at_hit: v,
            continuous_crossing: false,
        }
    }
}

/// Everything the estimators need from one path, for several starting values.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSummary {
    /// `Z_T`.
    pub z_final: f64,
    /// One entry per starting value, in input order.
    pub passages: Vec<FirstPassage>,
    /// Running infimum of `V` over the sampled points, per starting value.
    pub min_v: Vec<f64>,
    /// `Z` at the last sampled time not after [`SummaryOptions::checkpoint`].
    pub z_checkpoint: Option<f64>,
    pub n_jumps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SummaryOptions {
    pub track_min_v: bool,
    pub checkpoint: Option<f64>,
    pub scheme: ZScheme,
}

/// Discretisation of the continuous part of `Z` on the grid engine.
///
/// `Decomposed { u }` writes `η = S + uW` with `e^{-ξ} = ε(W)`, so that
/// `Z_t = u(e^{-ξ_t} - 1) + ∫₀ᵗ e^{-ξ_{s-}} dS_s` and only the integral
/// against `S` is a left-point sum. Any `u` gives a consistent scheme; at
/// `u = -σ_ξη/σ_ξ²` the Brownian part of `S` is smallest, and when `S` is a
/// subordinator the computed `V` never falls below `u`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZScheme {
    #[default]
    LeftPoint,
    Decomposed { u: f64 },
}

impl ZScheme {
    fn u(self) -> f64 {
        match self {
            ZScheme::LeftPoint => 0.0,
            ZScheme::Decomposed { u } => u,
        }
    }

    /// `Decomposed` at `u = -σ_ξη/σ_ξ²` when `ξ` has a Gaussian part.
    pub fn auto(t: &LevyTriplet2D) -> ZScheme {
        let s11 = t.sigma_xi2();
        if s11 > 0.0 {
            ZScheme::Decomposed { u: -t.sigma_xi_eta() / s11 }
        } else {
            ZScheme::LeftPoint
        }
    }
}

/// `(e^{x} - 1)/x`, continuous at 0.
fn expm1_ratio(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.exp_m1() / x
    }
}

/// A compiled driver together with its path configuration.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub driver: Driver,
    pub cfg: PathConfig,
}

impl Simulator {
    pub fn new(t: &LevyTriplet2D, cfg: PathConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Simulator {
            driver: Driver::new(t, cfg.truncation_eps)?,
            cfg,
        })
    }

    /// The event-driven engine is used (the step is ignored).
    pub fn is_exact(&self) -> bool {
        self.driver.sigma_is_zero()
    }

    /// Jump-adapted grid walk; `visit` sees every cell in time order. Without
    /// `grid` the cells run from jump to jump.
    fn walk<R: Rng>(&self, rng: &mut R, grid: bool, visit: &mut dyn FnMut(&mut R, Cell)) {
        let d = &self.driver;
        let (h, step) = (self.cfg.horizon, self.cfg.step);
        // ξ_t = a t + X_t with X the Brownian and jump parts, so pure drift is exact.
        let (mut bx, mut by) = (0.0, 0.0);
        let mut t = 0.0;
        let mut k: u64 = 1;
        let mut next_jump = d.interarrival(rng);
        loop {
            let tg = if grid { (k as f64 * step).min(h) } else { h };
            let jumping = next_jump < tg;
            let t1 = if jumping { next_jump } else { tg };
            let dt = t1 - t;
            if d.has_brownian() {
                let (dx, dy) = d.brownian(rng, dt);
                bx += dx;
                by += dy;
            }
            let left = (d.drift[0] * t1 + bx, d.drift[1] * t1 + by);
            let mut cell = Cell {
                t0: t,
                t1,
                left,
                right: left,
                jump: None,
            };
            if jumping {
                let (x, y) = d.sample_jump(rng);
                bx += x;
                by += y;
                cell.right = (d.drift[0] * t1 + bx, d.drift[1] * t1 + by);
                cell.jump = Some((x, y));
                next_jump = t1 + d.interarrival(rng);
            } else {
                k += 1;
            }
            visit(rng, cell);
            t = t1;
            if !jumping && tg >= h {
                break;
            }
        }
    }

    /// Samples `(ξ, η)` for path `index`.
    pub fn pair(&self, index: u64) -> PairPath {
        let mut rng = path_rng(self.cfg.seed, index);
        let mut p = PairPath::continuous(vec![0.0], vec![0.0], vec![0.0]);
        let grid = !self.is_exact();
        self.walk(&mut rng, grid, &mut |_, c| {
            let left = c.jump.map(|_| c.left);
            p.push(c.t1, c.right.0, c.right.1, left);
        });
        p
    }

    /// Path `index` with `Z` and `V` for starting value `z`.
    pub fn path(&self, index: u64, z: f64) -> Path {
        self.path_with(index, z, ZScheme::LeftPoint)
    }

    /// [`Simulator::path`] with a chosen scheme for the grid engine.
    pub fn path_with(&self, index: u64, z: f64, scheme: ZScheme) -> Path {
        let pair = self.pair(index);
        let zs = if self.is_exact() {
            exact_z(&pair, self.driver.drift)
        } else {
            compute_z_with(&pair, scheme, self.driver.sigma[0][0])
        };
        let v = compute_v(&pair, &zs, z);
        Path {
            pair,
            z_start: z,
            z: zs,
            v,
            exact: self.is_exact(),
        }
    }

    /// Streams path `index` without storing it and reports first passage for
    /// every starting value in `zs`.
    ///
    /// On the grid engine a Brownian-bridge minimum is drawn for every cell
    /// in which `η` has a Gaussian part, so crossings between grid points are
    /// not missed. Those draws come from an auxiliary stream: the path is the
    /// one [`Simulator::pair`] returns, whatever `zs` and `opts` are.
    pub fn summary(&self, index: u64, zs: &[f64], opts: SummaryOptions) -> PathSummary {
        let mut rng = path_rng(self.cfg.seed, index);
        if self.is_exact() {
            self.summary_exact(&mut rng, zs, opts)
        } else {
            let mut aux = aux_rng(self.cfg.seed, index);
            self.summary_grid(&mut rng, &mut aux, zs, opts)
        }
    }

    fn summary_grid(&self, rng: &mut PathRng, aux: &mut PathRng, zs: &[f64], opts: SummaryOptions) -> PathSummary {
        let s22 = self.driver.sigma[1][1];
        let s11 = self.driver.sigma[0][0];
        let u = opts.scheme.u();
        let mut passages: Vec<FirstPassage> = zs
            .iter()
            .map(|&z| if z < 0.0 { FirstPassage::jump(0.0, z) } else { FirstPassage::NONE })
            .collect();
        let mut open = passages.iter().filter(|p| !p.hit).count();
        let mut min_v = zs.to_vec();
        // Z = u(e^{-ξ} - 1) + r, with r the discretised part.
        let (mut r, mut zi, mut xi_prev, mut eta_prev, mut e) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 1.0f64);
        let mut n_jumps = 0;
        let mut z_check = opts.checkpoint.map(|_| 0.0);
        self.walk(rng, true, &mut |_, c| {
            let dt = c.t1 - c.t0;
            let mut ds = c.left.1 - eta_prev;
            if u != 0.0 {
                ds -= u * (-(c.left.0 - xi_prev) + 0.5 * s11 * dt);
            }
            let r_left = r + e * ds;
            let el = (-c.left.0).exp();
            let z_left = u * (el - 1.0) + r_left;
            // Lowest value of Z inside the cell.
            let z_low = if s22 > 0.0 {
                let var = e * e * s22 * dt;
                let ex: f64 = Exp1.sample(aux);
                let d = z_left - zi;
                0.5 * (zi + z_left - (d * d + 2.0 * var * ex).sqrt())
            } else {
                z_left.min(zi)
            };
            let (mut r_new, mut z_new, mut er) = (r_left, z_left, el);
            if let Some((x, y)) = c.jump {
                n_jumps += 1;
                r_new = r_left + el * (y - u * (-x).exp_m1());
                er = (-c.right.0).exp();
                z_new = u * (er - 1.0) + r_new;
            }
            if open > 0 {
                for (p, &z) in passages.iter_mut().zip(zs) {
                    if p.hit {
                        continue;
                    }
                    if z + z_low < 0.0 {
                        *p = FirstPassage::continuous(c.t1);
                    } else if z + z_new < 0.0 {
                        *p = FirstPassage::jump(c.t1, u + (z - u + r_new) / er);
                    } else {
                        continue;
                    }
                    open -= 1;
                }
            }
            if opts.track_min_v {
                for (m, &z) in min_v.iter_mut().zip(zs) {
                    let vl = u + (z - u + r_left) / el;
                    let vr = u + (z - u + r_new) / er;
                    *m = m.min(vl).min(vr);
                }
            }
            r = r_new;
            zi = z_new;
            e = er;
            if opts.checkpoint.is_some_and(|cp| c.t1 <= cp) {
                z_check = Some(zi);
            }
            xi_prev = c.right.0;
            eta_prev = c.right.1;
        });
        PathSummary {
            z_final: zi,
            passages,
            min_v,
            z_checkpoint: z_check,
            n_jumps,
        }
    }

    fn summary_exact(&self, rng: &mut PathRng, zs: &[f64], opts: SummaryOptions) -> PathSummary {
        let [a, b] = self.driver.drift;
        let mut passages: Vec<FirstPassage> = zs
            .iter()
            .map(|&z| if z < 0.0 { FirstPassage::jump(0.0, z) } else { FirstPassage::NONE })
            .collect();
        let mut v = zs.to_vec();
        let mut min_v = zs.to_vec();
        let (mut zi, mut xi) = (0.0f64, 0.0f64);
        let mut n_jumps = 0;
        let mut z_check = opts.checkpoint.map(|_| 0.0);
        self.walk(rng, false, &mut |_, c| {
            let h = c.t1 - c.t0;
            if let Some(cp) = opts.checkpoint.filter(|&cp| c.t0 < cp && cp < c.t1) {
                let s = cp - c.t0;
                z_check = Some(zi + b * (-xi).exp() * s * expm1_ratio(-a * s));
            }
            zi += b * (-xi).exp() * h * expm1_ratio(-a * h);
            let growth = (a * h).exp();
            let drift_part = b * h * expm1_ratio(a * h);
            for ((p, vz), m) in passages.iter_mut().zip(v.iter_mut()).zip(min_v.iter_mut()) {
                if !p.hit && *vz >= 0.0 && b < 0.0 {
                    if let Some(s) = drift_crossing(*vz, a, b) {
                        if s <= h {
                            *p = FirstPassage::continuous(c.t0 + s);
                        }
                    }
                }
                *vz = *vz * growth + drift_part;
                if let Some((x, y)) = c.jump {
                    *vz = x.exp() * (*vz + y);
                    if !p.hit && *vz < 0.0 {
                        *p = FirstPassage::jump(c.t1, *vz);
                    }
                }
                if opts.track_min_v {
                    *m = m.min(*vz);
                }
            }
            xi = c.left.0;
            if let Some((_, y)) = c.jump {
                n_jumps += 1;
                zi += (-xi).exp() * y;
                xi = c.right.0;
            }
            if opts.checkpoint.is_some_and(|cp| c.t1 <= cp) {
                z_check = Some(zi);
            }
        });
        PathSummary {
            z_final: zi,
            passages,
            min_v,
            z_checkpoint: z_check,
            n_jumps,
        }
    }
}

/// One step of the walk.
#[derive(Debug, Clone, Copy)]
struct Cell {
    t0: f64,
    t1: f64,
    /// `(ξ, η)` at `t1` before a jump.
    left: (f64, f64),
    /// `(ξ, η)` at `t1` after a jump.
    right: (f64, f64),
    jump: Option<(f64, f64)>,
}

/// Time at which `v(s) = v₀e^{as} + b(e^{as} - 1)/a` reaches 0, if it does.
fn drift_crossing(v0: f64, a: f64, b: f64) -> Option<f64> {
    if v0 == 0.0 {
        return Some(0.0);
    }
    if a == 0.0 {
        return Some(-v0 / b);
    }
    let r = a * v0 / b;
    (r > -1.0).then(|| -r.ln_1p() / a).filter(|s| *s >= 0.0)
}

/// Left-point Itô sum for the continuous part of `Z` plus the exact
/// contribution `e^{-ξ_{t-}} Δη_t` of every jump.
pub fn compute_z(p: &PairPath) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len());
    let mut zi = 0.0;
    out.push(zi);
    for (k, (xl, el)) in p.left_iter().enumerate().skip(1) {
        zi += (-p.xi[k - 1]).exp() * (el - p.eta[k - 1]);
        if p.jump_flags[k] {
            zi += (-xl).exp() * (p.eta[k] - el);
        }
        out.push(zi);
    }
    out
}

/// [`compute_z`] under a chosen scheme; `sigma_xi2` is the Gaussian variance of `ξ`.
pub fn compute_z_with(p: &PairPath, scheme: ZScheme, sigma_xi2: f64) -> Vec<f64> {
    let u = scheme.u();
    if u == 0.0 {
        return compute_z(p);
    }
    let mut out = Vec::with_capacity(p.len());
    let mut r = 0.0;
    out.push(0.0);
    for (k, (xl, el)) in p.left_iter().enumerate().skip(1) {
        let dt = p.times[k] - p.times[k - 1];
        let dw = -(xl - p.xi[k - 1]) + 0.5 * sigma_xi2 * dt;
        r += (-p.xi[k - 1]).exp() * (el - p.eta[k - 1] - u * dw);
        if p.jump_flags[k] {
            r += (-xl).exp() * (p.eta[k] - el - u * (-(p.xi[k] - xl)).exp_m1());
        }
        out.push(u * (-p.xi[k]).exp_m1() + r);
    }
    out
}

/// `Z` in closed form on a path without Gaussian part, where `ξ` and `η` are
/// linear with slopes `drift` between jumps.
fn exact_z(p: &PairPath, drift: [f64; 2]) -> Vec<f64> {
    let [a, b] = drift;
    let mut out = Vec::with_capacity(p.len());
    let mut zi = 0.0;
    out.push(zi);
    for (k, (xl, el)) in p.left_iter().enumerate().skip(1) {
        let h = p.times[k] - p.times[k - 1];
        zi += b * (-p.xi[k - 1]).exp() * h * expm1_ratio(-a * h);
        if p.jump_flags[k] {
            zi += (-xl).exp() * (p.eta[k] - el);
        }
        out.push(zi);
    }
    out
}

/// `V = e^{ξ}(z + Z)` pointwise.
pub fn compute_v(p: &PairPath, zs: &[f64], z: f64) -> Vec<f64> {
    p.xi.iter().zip(zs).map(|(&x, &zi)| x.exp() * (z + zi)).collect()
}

/// First index with `V < 0`. A hit at a non-jump index is reported with the
/// first grid value below zero (the true crossing lies in the preceding cell).
pub fn first_passage(p: &Path) -> FirstPassage {
    match p.v.iter().position(|&v| v < 0.0) {
        None => FirstPassage::NONE,
        Some(k) => FirstPassage {
            hit: true,
            time: p.pair.times[k],
            v_at_hit: p.v[k],
            continuous_crossing: !p.pair.jump_flags[k],
        },
    }
}

/// `Z_t = e^{-(B_t + ct)} - 1` for the continuous example driven by `B`.
pub fn closed_form_continuous_example(c: f64, times: &[f64], b: &[f64]) -> Vec<f64> {
    times.iter().zip(b).map(|(&t, &bt)| (-(bt + c * t)).exp_m1()).collect()
}

/// The jump example simulated event by event.
pub fn simulate_jump_example(c: f64, lambda: f64, cfg: PathConfig, z: f64) -> Result<Path> {
    Ok(Simulator::new(&presets::jump_example(c, lambda), cfg)?.path(0, z))
}

/// `ε(W)` along an atom-tier path, with `W` built from the same draws: its
/// Gaussian part is minus that of `ξ`, its jumps are `e^{-Δξ} - 1`, and its
/// drift makes `e^{-ξ} = ε(W)` hold. Evaluated by the Doléans-Dade product
/// `ε(W)_t = e^{W_t - ½σ²t} ∏ (1 + ΔW_s) e^{-ΔW_s}`.
pub fn simulate_stochastic_exponential(t: &LevyTriplet2D, p: &PairPath) -> Result<Vec<f64>> {
    if !t.jumps.is_atomic() {
        return Err(GouError::NotSupported("stochastic exponential needs an atom-tier driver".into()));
    }
    let s2 = t.sigma_xi2();
    let mut out = Vec::with_capacity(p.len());
    let (mut jump_sum_xi, mut jump_sum_w, mut log_prod) = (0.0, 0.0, 0.0);
    for (k, (xl, _)) in p.left_iter().enumerate() {
        if p.jump_flags[k] {
            let dxi = p.xi[k] - xl;
            let dw = (-dxi).exp_m1();
            jump_sum_xi += dxi;
            jump_sum_w += dw;
            log_prod += dw.ln_1p() - dw;
        }
        let time = p.times[k];
        let w = -(p.xi[k] - jump_sum_xi) + 0.5 * s2 * time + jump_sum_w;
        out.push((w - 0.5 * s2 * time + log_prod).exp());
    }
    Ok(out)
}

/// CSV with header `time,xi,eta,Z,V,jump`.
pub fn write_csv<W: Write>(p: &Path, mut w: W) -> std::io::Result<()> {
    writeln!(w, "time,xi,eta,Z,V,jump")?;
    for k in 0..p.pair.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.pair.times[k],
            p.pair.xi[k],
            p.pair.eta[k],
            p.z[k],
            p.v[k],
            u8::from(p.pair.jump_flags[k])
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::{JumpAtom, LevyMeasure2D};

    fn cfg(h: f64, step: f64) -> PathConfig {
        PathConfig::new(h, step, 11).unwrap()
    }

    #[test]
    fn zero_and_drift_paths() {
        let p = Simulator::new(&LevyTriplet2D::zero(), cfg(1.0, 0.25)).unwrap().path(0, 1.0);
        assert!(p.pair.xi.iter().chain(&p.pair.eta).chain(&p.z).all(|&v| v == 0.0));
        let t = LevyTriplet2D::new([0.3, -0.7], [[0.0; 2]; 2], LevyMeasure2D::default()).unwrap();
        let p = Simulator::new(&t, cfg(2.0, 0.1)).unwrap().pair(0);
        for k in 0..p.len() {
            assert_eq!(p.xi[k], 0.3 * p.times[k]);
            assert_eq!(p.eta[k], -0.7 * p.times[k]);
        }
    }

    #[test]
    fn grid_covers_horizon() {
        let t = crate::presets::continuous_example(0.0);
        let p = Simulator::new(&t, cfg(1.0, 0.3)).unwrap().pair(0);
        assert_eq!(p.times, vec![0.0, 0.3, 0.6, 0.8999999999999999, 1.0]);
    }

    #[test]
    fn drift_z_is_exact() {
        let t = LevyTriplet2D::new([0.0, 1.5], [[0.0, 0.0], [0.0, 0.0]], LevyMeasure2D::default()).unwrap();
        let p = Simulator::new(&t, cfg(3.0, 0.5)).unwrap().path(0, 0.0);
        for k in 0..p.z.len() {
            assert!((p.z[k] - 1.5 * p.pair.times[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn single_jump_adds_y() {
        let atom = JumpAtom::new(0.4, -0.3, 1.0).unwrap();
        let t = LevyTriplet2D::new([0.4, -0.3], [[0.0; 2]; 2], LevyMeasure2D::Atoms(vec![atom])).unwrap();
        // Drift cancels the compensator, so ξ ≡ 0 before the first jump.
        let sim = Simulator::new(&t, cfg(50.0, 1.0)).unwrap();
        assert_eq!(sim.driver.drift, [0.0, 0.0]);
        let p = sim.path(0, 1.0);
        let k = p.pair.jump_flags.iter().position(|&j| j).unwrap();
        assert!((p.z[k] - -0.3).abs() < 1e-15);
    }

    #[test]
    fn v_identity_and_jump_identity_hold() {
        let t = LevyTriplet2D::new(
            [0.1, 0.2],
            [[0.5, 0.1], [0.1, 0.3]],
            LevyMeasure2D::Atoms(vec![JumpAtom::new(0.7, -0.4, 2.0).unwrap(), JumpAtom::new(-0.2, 0.5, 1.0).unwrap()]),
        )
        .unwrap();
        let p = Simulator::new(&t, cfg(5.0, 0.01)).unwrap().path(3, 0.8);
        assert_eq!(p.z[0], 0.0);
        let mut jumps = 0;
        for (k, (xl, el)) in p.pair.left_iter().enumerate() {
            let v = p.pair.xi[k].exp() * (0.8 + p.z[k]);
            assert!((p.v[k] - v).abs() <= 1e-9 * v.abs().max(1e-300));
            if p.pair.jump_flags[k] {
                jumps += 1;
                // V just before the jump, from the left limits.
                let zl = p.z[k] - (-xl).exp() * (p.pair.eta[k] - el);
                let vm = xl.exp() * (0.8 + zl);
                let (dx, dy) = (p.pair.xi[k] - xl, p.pair.eta[k] - el);
                let dv = dx.exp_m1() * vm + dx.exp() * dy;
                assert!((p.v[k] - vm - dv).abs() < 1e-9 * (1.0 + p.v[k].abs()));
            }
        }
        assert!(jumps > 5);
    }

    #[test]
    fn deterministic_per_seed_and_index() {
        let t = crate::presets::jump_example(1.0, 1.0);
        let sim = Simulator::new(&t, cfg(30.0, 0.1)).unwrap();
        assert_eq!(sim.path(4, 0.5), sim.path(4, 0.5));
        assert_ne!(sim.pair(4), sim.pair(5));
    }

    #[test]
    fn jump_example_without_arrivals() {
        // Rate so small that no arrival occurs on [0, T].
        let (c, h, z) = (1.0, 3.0, 0.4);
        let p = simulate_jump_example(c, 1e-12, cfg(h, 0.1), z).unwrap();
        assert!(p.pair.jump_flags.iter().all(|&j| !j));
        let want = (-c * h).exp() * z + 2.0 * (1.0 - (-c * h).exp());
        assert!((p.v.last().unwrap() - want).abs() < 1e-14);
        // Numeric check of the segment formula: V_T = e^{-cT}(z + 2c∫₀ᵀ e^{cs} ds).
        let n = 200_000;
        let integral: f64 = (0..n).map(|i| (c * (i as f64 + 0.5) * h / n as f64).exp()).sum::<f64>() * h / n as f64;
        assert!(((-c * h).exp() * (z + 2.0 * c * integral) - want).abs() < 1e-9);
    }

    #[test]
    fn jump_example_first_jump_from_zero() {
        let (c, lam) = (1.0, 1.0);
        for idx in 0..20 {
            let sim = Simulator::new(&crate::presets::jump_example(c, lam), cfg(100.0, 1.0)).unwrap();
            let p = sim.path(idx, 0.0);
            let k = p.pair.jump_flags.iter().position(|&j| j).unwrap();
            let tau = p.pair.times[k];
            let vm = 2.0 * (1.0 - (-c * tau).exp());
            let e = std::f64::consts::E;
            assert!((p.v[k] - (vm + (e - 1.0) * vm - e)).abs() < 1e-12);
        }
    }

    #[test]
    fn summary_matches_stored_path_on_exact_engine() {
        let sim = Simulator::new(&crate::presets::jump_example(1.0, 1.0), cfg(40.0, 1.0)).unwrap();
        for idx in 0..30 {
            let s = sim.summary(idx, &[0.3, 1.0], SummaryOptions { track_min_v: true, ..Default::default() });
            let p = sim.path(idx, 0.3);
            assert!((s.z_final - p.z.last().unwrap()).abs() < 1e-9 * (1.0 + s.z_final.abs()));
            let fp = first_passage(&p);
            assert_eq!(fp.hit, s.passages[0].hit);
            if fp.hit && !s.passages[0].continuous_crossing {
                assert_eq!(fp.time, s.passages[0].time);
            }
        }
    }

    #[test]
    fn continuous_example_v_stays_near_one() {
        let c = 0.2;
        let sim = Simulator::new(&crate::presets::continuous_example(c), cfg(1.0, 1e-4)).unwrap();
        let p = sim.path(0, 1.0);
        let err = p.v.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(err < 0.05, "{err}");
    }

    #[test]
    fn decomposed_scheme_is_exact_on_the_continuous_example() {
        let c = 0.4;
        let sim = Simulator::new(&crate::presets::continuous_example(c), cfg(2.0, 0.05)).unwrap();
        let p = sim.path_with(2, 1.0, ZScheme::Decomposed { u: 1.0 });
        for k in 0..p.z.len() {
            assert!((p.z[k] - (-p.pair.xi[k]).exp_m1()).abs() < 1e-12);
        }
        let s = sim.summary(2, &[1.0], SummaryOptions { track_min_v: true, checkpoint: None, scheme: ZScheme::Decomposed { u: 1.0 } });
        assert!((s.min_v[0] - 1.0).abs() < 1e-12);
        assert!((s.z_final - p.z.last().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn schemes_agree_as_the_step_shrinks() {
        let t = LevyTriplet2D::new(
            [0.3, 0.1],
            [[0.4, 0.1], [0.1, 0.6]],
            LevyMeasure2D::Atoms(vec![JumpAtom::new(0.5, -0.3, 1.0).unwrap()]),
        )
        .unwrap();
        let sim = Simulator::new(&t, cfg(1.0, 1e-5)).unwrap();
        let p = sim.pair(0);
        let a = compute_z(&p);
        let b = compute_z_with(&p, ZScheme::Decomposed { u: 0.7 }, 0.4);
        assert!((a.last().unwrap() - b.last().unwrap()).abs() < 0.02);
        let s = sim.summary(0, &[], SummaryOptions { scheme: ZScheme::Decomposed { u: 0.7 }, ..Default::default() });
        assert!((s.z_final - b.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn stochastic_exponential_matches() {
        let t = LevyTriplet2D::new(
            [0.2, 0.0],
            [[0.7, 0.0], [0.0, 0.0]],
            LevyMeasure2D::Atoms(vec![JumpAtom::new(1.0, 0.0, 0.8).unwrap(), JumpAtom::new(-0.5, 1.0, 0.4).unwrap()]),
        )
        .unwrap();
        let p = Simulator::new(&t, cfg(5.0, 0.01)).unwrap().pair(1);
        let n = p.jump_flags.iter().filter(|&&j| j).count();
        assert!(n > 0 && n <= 10, "{n}");
        let e = simulate_stochastic_exponential(&t, &p).unwrap();
        for (x, ek) in p.xi.iter().zip(&e) {
            assert!(((-x).exp() - ek).abs() <= 1e-8);
        }
        let drift = LevyTriplet2D::new([0.4, 0.0], [[0.0; 2]; 2], LevyMeasure2D::default()).unwrap();
        let p = Simulator::new(&drift, cfg(2.0, 0.5)).unwrap().pair(0);
        let e = simulate_stochastic_exponential(&drift, &p).unwrap();
        for (ek, t) in e.iter().zip(&p.times) {
            assert!((ek - (-0.4 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_examples() {
        let times = [0.0, 0.5, 1.0];
        assert_eq!(closed_form_continuous_example(0.0, &times, &[0.0; 3]), vec![0.0; 3]);
        let c = 0.3;
        let b = -std::f64::consts::LN_2 - c * 1.0;
        let z = closed_form_continuous_example(c, &[1.0], &[b]);
        assert!((z[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn drift_crossing_cases() {
        let s = drift_crossing(1.0, 0.0, -2.0).unwrap();
        assert_eq!(s, 0.5);
        let (v0, a, b) = (1.0, 0.5, -2.0);
        let s = drift_crossing(v0, a, b).unwrap();
        let v = v0 * (a * s).exp() + b * (a * s).exp_m1() / a;
        assert!(v.abs() < 1e-14);
        // V grows away from zero.
        assert_eq!(drift_crossing(1.0, 2.0, -1.0), None);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = simulate_jump_example(1.0, 1.0, cfg(3.0, 1.0), 1.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&p, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("time,xi,eta,Z,V,jump\n"));
        assert_eq!(s.lines().count(), p.pair.len() + 1);
    }
}
