//! The acceptance criteria, runnable from `gou validate` and the
//! `acceptance` test target.
//!
//! Each criterion is split into a measurement and a pure judgement of the
//! measured values, so the judgements can be exercised on perturbed inputs.

use std::f64::consts::E;
use std::time::Instant;

use gou_core::classification::{self, Decision, Verdict};
use gou_core::corpus;
use gou_core::estimation::{self, RuinEstimate, StrongOrderReport, Theorem3Record};
use gou_core::levy_model::{s_process, scale_eta};
use gou_core::region;
use gou_core::simulator::path_rng;
use gou_core::{presets, ClosedInterval, EstimateWithCI, ExtendedReal, McConfig};
use serde::{Deserialize, Serialize};

use crate::commands;
use crate::spec::{Preset, ProcessSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Exact classification criteria (1-4 and 9).
    Exact,
    /// Monte Carlo criteria (5-8).
    Mc,
    All,
}

impl Suite {
    pub fn ids(self) -> &'static [u8] {
        match self {
            Suite::Exact => &[1, 2, 3, 4, 9],
            Suite::Mc => &[5, 6, 7, 8],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub seed: u64,
    /// Multiplier on Monte Carlo path counts. Anything other than 1 is a
    /// smoke run, not an acceptance run.
    pub scale: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 1, scale: 1.0 }
    }
}

impl RunOptions {
    fn paths(&self, n: usize) -> usize {
        ((n as f64 * self.scale).round() as usize).max(100)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub within_time: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub limit_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub options: RunOptions,
    pub passed: bool,
    pub results: Vec<CriterionResult>,
}

pub const NAMES: [&str; 9] = [
    "continuous example threshold",
    "jump example threshold",
    "region test vs direct subordinator test",
    "lower-bound function laws",
    "P(Z_T < 0) for independent Brownian eta",
    "ruin formula closed-form case",
    "strong order of the Z discretisation",
    "no-ruin certification by simulation",
    "scaling invariance of the threshold",
];

pub const LIMITS_S: [f64; 9] = [1.0, 1.0, 30.0, 30.0, 60.0, 300.0, 120.0, 120.0, 10.0];

pub fn run(id: u8, opts: &RunOptions) -> CriterionResult {
    assert!((1..=9).contains(&id), "criteria are numbered 1 to 9");
    let start = Instant::now();
    let j = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(opts),
        4 => c4(opts),
        5 => c5(opts),
        6 => c6(opts),
        7 => c7(opts),
        8 => c8(opts),
        _ => c9(opts),
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    let limit_s = LIMITS_S[id as usize - 1];
    let within_time = elapsed_s <= limit_s;
    CriterionResult {
        id,
        name: NAMES[id as usize - 1].into(),
        passed: j.passed && within_time,
        within_time,
        detail: j.detail,
        elapsed_s,
        limit_s,
    }
}

pub fn run_suite(suite: Suite, opts: &RunOptions) -> ValidationReport {
    let results: Vec<CriterionResult> = suite.ids().iter().map(|&id| run(id, opts)).collect();
    ValidationReport {
        suite,
        options: *opts,
        passed: results.iter().all(|r| r.passed),
        results,
    }
}

/// One line per criterion. Timings are left out so that equal seeds give
/// equal tables.
pub fn render_table(r: &ValidationReport) -> String {
    let mut s = String::new();
    for c in &r.results {
        let status = match (c.passed, c.within_time) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (time limit)",
        };
        s.push_str(&format!("{:>2}  {:<4}  {:<42} {}\n", c.id, status, c.name, c.detail));
    }
    let n_pass = r.results.iter().filter(|c| c.passed).count();
    s.push_str(&format!("{n_pass}/{} criteria passed\n", r.results.len()));
    s
}

fn judged(passed: bool, detail: String) -> Judgement {
    Judgement { passed, detail }
}

fn err(e: impl std::fmt::Display) -> Judgement {
    judged(false, format!("error: {e}"))
}

// 1

pub fn judge_1(d: Decision) -> Judgement {
    judged(d == Decision::NoRuinFrom { u_star: 1.0 }, format!("decision {d:?}"))
}

fn c1() -> Judgement {
    match commands::check(&ProcessSpec::Preset(Preset::ContinuousExample { c: 0.0 }), &[]) {
        Ok(out) => judge_1(out.report.decision),
        Err(e) => err(e),
    }
}

// 2

pub fn judge_2(theta2: ExtendedReal, feasible: &[ClosedInterval]) -> Judgement {
    let target = E / (E - 1.0);
    let th_ok = theta2.finite().is_some_and(|v| (v - target).abs() <= 1e-12);
    let set_ok = match feasible {
        [iv] => match (iv.lo.finite(), iv.hi.finite()) {
            (Some(lo), Some(hi)) => (lo - target).abs() <= 1e-12 && (hi - 2.0).abs() <= 1e-12,
            _ => false,
        },
        _ => false,
    };
    let set: Vec<String> = feasible.iter().map(|iv| format!("[{}, {}]", iv.lo, iv.hi)).collect();
    judged(th_ok && set_ok, format!("theta2 = {theta2}, feasible u = {}", set.join(" u ")))
}

fn c2() -> Judgement {
    let t = presets::jump_example(1.0, 1.0);
    let th = match region::thetas(&t.jumps) {
        Ok(th) => th,
        Err(e) => return err(e),
    };
    match classification::feasible_u_set(&t) {
        Ok(fs) => judge_2(th.theta2, &fs.intervals()),
        Err(e) => err(e),
    }
}

// 3

pub const CORPUS_SIZE: usize = 1000;
pub const U_PER_TRIPLET: usize = 50;

pub fn judge_3(agree: usize, total: usize, undetermined: usize) -> Judgement {
    judged(
        total == CORPUS_SIZE * U_PER_TRIPLET && agree == total,
        format!("{agree}/{total} verdicts agree ({undetermined} undetermined on both sides)"),
    )
}

fn c3(opts: &RunOptions) -> Judgement {
    let (mut agree, mut total, mut und) = (0, 0, 0);
    for (i, t) in corpus::corpus(opts.seed, CORPUS_SIZE).iter().enumerate() {
        let mut rng = path_rng(opts.seed, i as u64);
        for u in corpus::u_grid(&mut rng, t, U_PER_TRIPLET) {
            total += 1;
            let a = classification::is_subordinator_s(t, u).map(|c| c.verdict);
            let b = s_process(t, u).and_then(|m| classification::is_subordinator_1d(&m)).map(|c| c.verdict);
            if let (Ok(a), Ok(b)) = (a, b) {
                if a == b {
                    agree += 1;
                    und += usize::from(a == Verdict::Undetermined);
                }
            }
        }
    }
    judge_3(agree, total, und)
}

// 4

pub const Z_GRID: usize = 21;

/// A 21-point grid spanning every finite threshold and feasible endpoint of
/// the instance with one unit of margin.
pub fn z_grid(anchors: &[f64]) -> Vec<f64> {
    let lo = anchors.iter().cloned().fold(0.0, f64::min) - 1.0;
    let hi = anchors.iter().cloned().fold(0.0, f64::max) + 1.0;
    (0..Z_GRID).map(|i| lo + (hi - lo) * i as f64 / (Z_GRID - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeltaViolations {
    pub above_z: usize,
    pub non_monotone: usize,
    pub not_idempotent: usize,
    pub finite: usize,
}

/// Checks `δ(z) ≤ z`, monotonicity and `δ(δ(z)) = δ(z)` on an increasing grid.
pub fn delta_violations(grid: &[f64], delta: impl Fn(f64) -> ExtendedReal) -> DeltaViolations {
    let mut v = DeltaViolations::default();
    let mut prev: Option<ExtendedReal> = None;
    for &z in grid {
        let d = delta(z);
        if d > ExtendedReal::new(z) {
            v.above_z += 1;
        }
        if prev.is_some_and(|p| p > d) {
            v.non_monotone += 1;
        }
        if let Some(df) = d.finite() {
            v.finite += 1;
            if delta(df) != d {
                v.not_idempotent += 1;
            }
        }
        prev = Some(d);
    }
    v
}

pub fn judge_4(v: DeltaViolations, points: usize, errors: usize) -> Judgement {
    let bad = v.above_z + v.non_monotone + v.not_idempotent + errors;
    judged(
        bad == 0 && points == CORPUS_SIZE * Z_GRID,
        format!(
            "{points} z-points ({} finite delta): {} above z, {} non-monotone, {} not idempotent, {errors} errors",
            v.finite, v.above_z, v.non_monotone, v.not_idempotent
        ),
    )
}

fn c4(opts: &RunOptions) -> Judgement {
    let mut total = DeltaViolations::default();
    let (mut points, mut errors) = (0, 0);
    for t in corpus::corpus(opts.seed, CORPUS_SIZE) {
        let fs = match classification::feasible_u_set(&t) {
            Ok(fs) => fs,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        let mut anchors: Vec<f64> = Vec::new();
        if let Ok(th) = region::thetas(&t.jumps) {
            anchors.extend([th.theta1, th.theta2, th.theta3, th.theta4].iter().filter_map(|v| v.finite()));
        }
        for iv in fs.intervals() {
            anchors.extend(iv.lo.finite());
            anchors.extend(iv.hi.finite());
        }
        let grid = z_grid(&anchors);
        let v = delta_violations(&grid, |z| fs.delta(z));
        points += grid.len();
        total.above_z += v.above_z;
        total.non_monotone += v.non_monotone;
        total.not_idempotent += v.not_idempotent;
        total.finite += v.finite;
    }
    judge_4(total, points, errors)
}

// 5

pub fn judge_5(e: &EstimateWithCI) -> Judgement {
    let tol = 3.0 * (0.25 / e.n_paths as f64).sqrt();
    let dev = (e.point - 0.5).abs();
    judged(dev <= tol, format!("estimate {:.5} over {} paths, |p - 0.5| = {dev:.5} (tolerance {tol:.5})", e.point, e.n_paths))
}

fn c5(opts: &RunOptions) -> Judgement {
    let run = || {
        let cfg = McConfig::new(1.0, 0.01, opts.seed, opts.paths(100_000))?;
        estimation::estimate_negative_prob(&presets::drift_brownian(0.0, 0.0), &cfg)
    };
    match run() {
        Ok(e) => judge_5(&e),
        Err(e) => err(e),
    }
}

// 6

pub const C6_Z: [f64; 3] = [0.0, 0.5, 1.0];
/// Rounded values of `2Φ(-z√2)` at the three starting values.
pub const C6_PUBLISHED: [f64; 3] = [1.0, 0.4795, 0.1573];

/// `ψ(z) = 2Φ(-z√2) = erfc(z)` for `ξ_t = t` and `η` a standard Brownian motion.
pub fn ruin_oracle_drift_brownian(z: f64) -> f64 {
    statrs::function::erf::erfc(z)
}

pub fn judge_6(records: &[Theorem3Record]) -> Judgement {
    let mut ok = records.len() == C6_Z.len();
    let mut parts = Vec::new();
    for r in records {
        let oracle = ruin_oracle_drift_brownian(r.z);
        let lhs_ok = r.lhs.contains(oracle);
        let rhs_ok = r.rhs.as_ref().is_some_and(|e| e.contains(oracle));
        ok &= lhs_ok && rhs_ok;
        let rhs = match &r.rhs {
            Some(e) => format!("{:.4} [{:.4}, {:.4}]", e.point, e.ci_low, e.ci_high),
            None => format!("none ({})", r.rhs_undetermined.as_deref().unwrap_or("refused")),
        };
        parts.push(format!(
            "z={}: oracle {oracle:.4} lhs {:.4} [{:.4}, {:.4}] rhs {rhs}",
            r.z, r.lhs.point, r.lhs.ci_low, r.lhs.ci_high
        ));
    }
    judged(ok, parts.join("; "))
}

fn c6(opts: &RunOptions) -> Judgement {
    let run = || {
        let cfg = McConfig::new(20.0, 1e-3, opts.seed, opts.paths(100_000))?;
        estimation::theorem3_validate_batch(&presets::drift_brownian(1.0, 0.0), &C6_Z, &cfg)
    };
    match run() {
        Ok(r) => judge_6(&r),
        Err(e) => err(e),
    }
}

// 7

pub fn c7_steps() -> Vec<f64> {
    (4..=10).map(|k| 2f64.powi(-k)).collect()
}

pub fn judge_7(r: &StrongOrderReport) -> Judgement {
    let order_ok = (0.4..=0.7).contains(&r.order);
    let margin_ok = r.min_margin > 0.0;
    judged(
        order_ok && margin_ok,
        format!(
            "fitted order {:.3}, rmse {:.4} .. {:.4}, min of Z + 1 + 10 step by step: [{}]",
            r.order,
            r.rmse.first().copied().unwrap_or(f64::NAN),
            r.rmse.last().copied().unwrap_or(f64::NAN),
            r.margins.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn c7(opts: &RunOptions) -> Judgement {
    let n = ((1000.0 * opts.scale).round() as usize).max(10);
    match estimation::strong_order_continuous(0.0, &c7_steps(), n, opts.seed) {
        Ok(r) => judge_7(&r),
        Err(e) => err(e),
    }
}

// 8

pub fn judge_8(high: &RuinEstimate, low: &RuinEstimate) -> Judgement {
    let ok = high.exact && low.exact && high.estimate.n_events == 0 && low.estimate.ci_low > 0.0;
    judged(
        ok,
        format!(
            "z={}: {} ruined of {}; z={}: estimate {:.4} [{:.4}, {:.4}]; event-driven {}",
            high.z,
            high.estimate.n_events,
            high.estimate.n_paths,
            low.z,
            low.estimate.point,
            low.estimate.ci_low,
            low.estimate.ci_high,
            high.exact && low.exact
        ),
    )
}

fn c8(opts: &RunOptions) -> Judgement {
    let run = || {
        // The step is unused by the event-driven engine.
        let cfg = McConfig::new(1000.0, 1.0, opts.seed, opts.paths(10_000))?;
        estimation::estimate_ruin_batch(&presets::jump_example(1.0, 1.0), &[1.7, 0.5], &cfg)
    };
    match run() {
        Ok(r) => judge_8(&r[0], &r[1]),
        Err(e) => err(e),
    }
}

// 9

pub const C9_SIZE: usize = 100;
pub const C9_K: [f64; 3] = [0.5, 2.0, 10.0];

/// Whether `scaled` is the decision `base` scaled by `k`.
pub fn scaled_decision_matches(base: Decision, scaled: Decision, k: f64) -> bool {
    match (base, scaled) {
        (Decision::NoRuinFrom { u_star: a }, Decision::NoRuinFrom { u_star: b }) => {
            let target = k * a;
            (b - target).abs() <= 1e-10 * target.abs().max(b.abs())
        }
        (Decision::RuinEverywhere, Decision::RuinEverywhere) => true,
        _ => false,
    }
}

pub fn judge_9(matches: usize, total: usize, thresholds: usize) -> Judgement {
    judged(
        total == C9_SIZE * C9_K.len() && matches == total,
        format!("{matches}/{total} scaled decisions match ({thresholds} with a finite threshold)"),
    )
}

fn c9(opts: &RunOptions) -> Judgement {
    let (mut matches, mut total, mut finite) = (0, 0, 0);
    for t in corpus::corpus(opts.seed.wrapping_add(9), C9_SIZE) {
        let base = classification::no_ruin_threshold(&t).map(|r| r.decision);
        for k in C9_K {
            total += 1;
            let scaled = scale_eta(&t, k).and_then(|s| classification::no_ruin_threshold(&s)).map(|r| r.decision);
            if let (Ok(b), Ok(s)) = (&base, scaled) {
                let b = *b;
                if scaled_decision_matches(b, s, k) {
                    matches += 1;
                    finite += usize::from(matches!(b, Decision::NoRuinFrom { .. }));
                }
            }
        }
    }
    judge_9(matches, total, finite)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_matches_published_values() {
        for (z, p) in C6_Z.iter().zip(C6_PUBLISHED) {
            assert!((ruin_oracle_drift_brownian(*z) - p).abs() < 5e-5, "z={z}");
        }
        // 2Φ(-z√2) through the normal CDF directly.
        use statrs::distribution::{ContinuousCDF, Normal};
        let n = Normal::new(0.0, 1.0).unwrap();
        let z = 0.7f64;
        assert!((2.0 * n.cdf(-z * 2f64.sqrt()) - ruin_oracle_drift_brownian(z)).abs() < 1e-14);
    }

    #[test]
    fn judgements_reject_perturbed_values() {
        assert!(judge_1(Decision::NoRuinFrom { u_star: 1.0 }).passed);
        assert!(!judge_1(Decision::NoRuinFrom { u_star: 1.0 + 1e-15 }).passed);

        let target = E / (E - 1.0);
        let iv = |lo: f64, hi: f64| ClosedInterval { lo: ExtendedReal::new(lo), hi: ExtendedReal::new(hi) };
        assert!(judge_2(ExtendedReal::new(target), &[iv(target, 2.0)]).passed);
        assert!(!judge_2(ExtendedReal::new(target * (1.0 + 1e-9)), &[iv(target, 2.0)]).passed);
        assert!(!judge_2(ExtendedReal::new(target), &[iv(target, 2.0 + 1e-9)]).passed);
        assert!(!judge_2(ExtendedReal::new(target), &[iv(target, 2.0), iv(3.0, 4.0)]).passed);

        assert!(!judge_3(49_999, 50_000, 0).passed);
        let mut v = DeltaViolations::default();
        assert!(judge_4(v, CORPUS_SIZE * Z_GRID, 0).passed);
        v.not_idempotent = 1;
        assert!(!judge_4(v, CORPUS_SIZE * Z_GRID, 0).passed);

        let e = EstimateWithCI::wilson(50_500, 100_000);
        assert!(!judge_5(&e).passed);
        assert!(judge_5(&EstimateWithCI::wilson(50_400, 100_000)).passed);

        let report = StrongOrderReport {
            steps: c7_steps(),
            rmse: vec![0.1; 7],
            order: 0.8,
            min_margin: 0.1,
            margins: vec![0.1; 7],
        };
        assert!(!judge_7(&report).passed);

        assert!(!scaled_decision_matches(
            Decision::NoRuinFrom { u_star: 1.0 },
            Decision::NoRuinFrom { u_star: 2.0 + 1e-8 },
            2.0
        ));
        assert!(scaled_decision_matches(Decision::NoRuinFrom { u_star: 0.0 }, Decision::NoRuinFrom { u_star: 0.0 }, 2.0));
    }

    #[test]
    fn delta_law_checker_catches_each_law() {
        let grid: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let v = delta_violations(&grid, |z| ExtendedReal::new(z + 0.5));
        assert_eq!(v.above_z, 5);
        let v = delta_violations(&grid, |z| ExtendedReal::new(if z > 2.0 { 0.0 } else { z.min(1.0) }));
        assert_eq!(v.non_monotone, 1);
        let v = delta_violations(&grid, |z| ExtendedReal::new((z - 1.0).max(0.0)));
        assert!(v.not_idempotent > 0);
    }

    #[test]
    fn z_grid_spans_anchors() {
        let g = z_grid(&[-2.0, 3.5]);
        assert_eq!(g.len(), Z_GRID);
        assert_eq!(g[0], -3.0);
        assert_eq!(g[20], 4.5);
    }

    #[test]
    fn exact_suite_passes() {
        let r = run_suite(Suite::Exact, &RunOptions::default());
        assert!(r.passed, "{}", render_table(&r));
    }
}
