//! Monte Carlo estimators with 95% intervals: finite-horizon ruin
//! probability, `P(Z_T < 0)`, the empirical law of `Z_∞`, the two sides of
//! the ruin formula `ψ(z) = G(-z) / E[G(-V_{T_z}) | T_z < ∞]`, and the
//! empirical lower bound of `V`.
//!
//! Paths are generated in parallel, each from its own `(seed, index)` stream,
//! and collected in index order, so results depend only on the seed and the
//! number of paths. `GOU_THREADS` caps the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{self, Verdict};
use crate::error::{GouError, Result};
use crate::levy_model::LevyTriplet2D;
use crate::simulator::{
    closed_form_continuous_example, compute_z, path_rng, FirstPassage, PairPath, PathConfig,
    PathSummary, Simulator, SummaryOptions, ZScheme,
};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Refuse the ruin-formula right-hand side below this many ruined paths.
pub const MIN_RUIN_EVENTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_paths: usize,
    pub n_events: usize,
}

impl EstimateWithCI {
    /// Wilson score interval for `k` events in `n` trials.
    pub fn wilson(k: usize, n: usize) -> Self {
        assert!(n > 0 && k <= n, "wilson needs 0 <= k <= n, n > 0");
        let (kf, nf) = (k as f64, n as f64);
        let p = kf / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let center = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
        EstimateWithCI {
            point: p,
            ci_low: (center - half).max(0.0).min(p),
            ci_high: (center + half).min(1.0).max(p),
            n_paths: n,
            n_events: k,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.ci_low <= v && v <= self.ci_high
    }

    pub fn overlaps(&self, lo: f64, hi: f64) -> bool {
        self.ci_low <= hi && lo <= self.ci_high
    }

    /// Standard error implied by the interval width.
    pub fn std_err(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z95)
    }
}

/// Right-continuous empirical distribution function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        assert!(samples.iter().all(|v| !v.is_nan()), "samples must not be NaN");
        samples.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Kolmogorov-Smirnov distance to a continuous distribution function.
    pub fn ks_to(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Two-sample Kolmogorov-Smirnov distance.
    pub fn ks_distance(&self, other: &EmpiricalCdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }
}

/// Sample size and path configuration of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    #[serde(flatten)]
    pub path: PathConfig,
    pub n_paths: usize,
}

impl McConfig {
    pub fn new(horizon: f64, step: f64, seed: u64, n_paths: usize) -> Result<Self> {
        if n_paths == 0 {
            return Err(GouError::InvalidModel("need at least one path".into()));
        }
        Ok(McConfig {
            path: PathConfig::new(horizon, step, seed)?,
            n_paths,
        })
    }
}

/// Worker count from `GOU_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("GOU_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// `f(0), …, f(n-1)` evaluated in parallel and returned in index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    let run = || (0..n as u64).into_par_iter().map(&f).collect();
    match thread_cap() {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

/// Pairwise summation, independent of how the values were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Runs all paths. Unless the caller picked a decomposition, the grid engine
/// uses [`ZScheme::auto`].
fn summaries(t: &LevyTriplet2D, zs: &[f64], cfg: &McConfig, mut opts: SummaryOptions) -> Result<Vec<PathSummary>> {
    let sim = Simulator::new(t, cfg.path)?;
    if opts.scheme == ZScheme::LeftPoint {
        opts.scheme = ZScheme::auto(t);
    }
    Ok(par_map(cfg.n_paths, |i| sim.summary(i, zs, opts)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuinEstimate {
    pub z: f64,
    pub horizon: f64,
    pub estimate: EstimateWithCI,
    /// Event-driven simulation (no discretisation error).
    pub exact: bool,
    /// Fraction of surviving paths with `z + Z_T` within 0.01 of zero, reported
    /// when `Z_t` converges: a gauge of ruin still to come after the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    pub caveat: String,
}

const CAVEAT: &str = "finite-horizon estimate: estimates psi(z) from below";

/// Ruin before the horizon for each starting value, on common paths.
pub fn estimate_ruin_batch(t: &LevyTriplet2D, zs: &[f64], cfg: &McConfig) -> Result<Vec<RuinEstimate>> {
    let sums = summaries(t, zs, cfg, SummaryOptions::default())?;
    let exact = Simulator::new(t, cfg.path)?.is_exact();
    let converges = classification::z_infinity_converges(t)? == Verdict::Yes;
    Ok(zs
        .iter()
        .enumerate()
        .map(|(j, &z)| {
            let hits = sums.iter().filter(|s| s.passages[j].hit).count();
            let tail_fraction = converges.then(|| {
                let near = sums
                    .iter()
                    .filter(|s| !s.passages[j].hit && (z + s.z_final).abs() < 0.01)
                    .count();
                near as f64 / sums.len() as f64
            });
            RuinEstimate {
                z,
                horizon: cfg.path.horizon,
                estimate: EstimateWithCI::wilson(hits, sums.len()),
                exact,
                tail_fraction,
                caveat: CAVEAT.into(),
            }
        })
        .collect())
}

pub fn estimate_ruin(t: &LevyTriplet2D, z: f64, cfg: &McConfig) -> Result<RuinEstimate> {
    Ok(estimate_ruin_batch(t, &[z], cfg)?.remove(0))
}

/// Fraction of paths with `Z_T < 0`.
pub fn estimate_negative_prob(t: &LevyTriplet2D, cfg: &McConfig) -> Result<EstimateWithCI> {
    let sums = summaries(t, &[], cfg, SummaryOptions::default())?;
    let k = sums.iter().filter(|s| s.z_final < 0.0).count();
    Ok(EstimateWithCI::wilson(k, sums.len()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZinfEstimate {
    pub horizon: f64,
    pub cdf: EmpiricalCdf,
    /// KS distance between the empirical laws of `Z_T` and `Z_{T/2}`.
    pub ks_half_horizon: f64,
}

fn require_convergence(t: &LevyTriplet2D) -> Result<()> {
    match classification::z_infinity_converges(t)? {
        Verdict::Yes => Ok(()),
        Verdict::No => Err(GouError::Precondition("Z_inf does not converge for this spec".into())),
        Verdict::Undetermined => Err(GouError::Precondition(
            "convergence of Z_inf could not be decided for this spec".into(),
        )),
    }
}

fn zinf_from(sums: &[PathSummary], horizon: f64) -> ZinfEstimate {
    let cdf = EmpiricalCdf::new(sums.iter().map(|s| s.z_final).collect());
    let half = EmpiricalCdf::new(sums.iter().map(|s| s.z_checkpoint.unwrap_or(0.0)).collect());
    ZinfEstimate {
        horizon,
        ks_half_horizon: cdf.ks_distance(&half),
        cdf,
    }
}

/// Empirical law of `Z_T` as a proxy for the law of `Z_∞`.
pub fn estimate_zinf_cdf(t: &LevyTriplet2D, cfg: &McConfig) -> Result<ZinfEstimate> {
    require_convergence(t)?;
    let opts = SummaryOptions {
        checkpoint: Some(cfg.path.horizon / 2.0),
        ..Default::default()
    };
    Ok(zinf_from(&summaries(t, &[], cfg, opts)?, cfg.path.horizon))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Record {
    pub z: f64,
    /// Direct finite-horizon ruin estimate.
    pub lhs: EstimateWithCI,
    /// `Ĝ(-z) / mean Ĝ(-V_{T_z})` over ruined paths, when enough paths ruin.
    pub rhs: Option<EstimateWithCI>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_undetermined: Option<String>,
    /// `Ĝ(-z)`, a lower bound for the ruin probability.
    pub g_minus_z: f64,
    pub consistent: bool,
    pub ks_half_horizon: f64,
    pub n_events: usize,
}

/// Dvoretzky-Kiefer-Wolfowitz 95% band half-width for `n` samples.
pub fn dkw_band(n: usize) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt()
}

fn theorem3_record(z: f64, j: usize, sums: &[PathSummary], g: &EmpiricalCdf, ks: f64) -> Theorem3Record {
    let n = sums.len();
    let ruined: Vec<&FirstPassage> = sums.iter().map(|s| &s.passages[j]).filter(|p| p.hit).collect();
    let lhs = EstimateWithCI::wilson(ruined.len(), n);
    let num = g.eval(-z);
    let band = dkw_band(n);
    let m = ruined.len();
    let (rhs, why, den) = if m < MIN_RUIN_EVENTS {
        (None, Some(format!("only {m} ruined paths (need {MIN_RUIN_EVENTS})")), 0.0)
    } else {
        // Continuous crossings have V_{T_z} = 0 exactly.
        let vals: Vec<f64> = ruined
            .iter()
            .map(|p| g.eval(if p.continuous_crossing { 0.0 } else { -p.v_at_hit }))
            .collect();
        let den = pairwise_sum(&vals) / m as f64;
        let dev: Vec<f64> = vals.iter().map(|v| (v - den) * (v - den)).collect();
        let s2 = if m > 1 { pairwise_sum(&dev) / (m - 1) as f64 } else { 0.0 };
        if den <= 0.0 {
            (None, Some("denominator estimate is zero".into()), 0.0)
        } else {
            let r = num / den;
            let var_num = num * (1.0 - num) / n as f64;
            let var_den = s2 / m as f64 + den * (1.0 - den) / n as f64;
            let (lo, hi) = if num > 0.0 {
                let se = r * (var_num / (num * num) + var_den / (den * den)).sqrt();
                ((r - Z95 * se).max(0.0), r + Z95 * se)
            } else {
                (0.0, EstimateWithCI::wilson(0, n).ci_high / den)
            };
            let est = EstimateWithCI {
                point: r,
                ci_low: lo.min(r),
                ci_high: hi.max(r),
                n_paths: n,
                n_events: m,
            };
            (Some(est), None, den)
        }
    };
    let consistent = match &rhs {
        Some(r) => {
            // Widen by the uniform sampling error of Ĝ in numerator and denominator.
            let wide_lo = ((num - band).max(0.0) / (den + band)).min(r.ci_low);
            let wide_hi = if den > band { ((num + band) / (den - band)).max(r.ci_high) } else { f64::INFINITY };
            lhs.overlaps(wide_lo, wide_hi)
        }
        // Only the lower bound ψ ≥ G(-z) can be checked.
        None => lhs.ci_high >= num - band,
    };
    Theorem3Record {
        z,
        lhs,
        rhs,
        rhs_undetermined: why,
        g_minus_z: num,
        consistent,
        ks_half_horizon: ks,
        n_events: m,
    }
}

/// Both sides of the ruin formula for several starting values on common paths.
pub fn theorem3_validate_batch(t: &LevyTriplet2D, zs: &[f64], cfg: &McConfig) -> Result<Vec<Theorem3Record>> {
    require_convergence(t)?;
    let opts = SummaryOptions {
        checkpoint: Some(cfg.path.horizon / 2.0),
        ..Default::default()
    };
    let sums = summaries(t, zs, cfg, opts)?;
    let zinf = zinf_from(&sums, cfg.path.horizon);
    Ok(zs
        .iter()
        .enumerate()
        .map(|(j, &z)| theorem3_record(z, j, &sums, &zinf.cdf, zinf.ks_half_horizon))
        .collect())
}

pub fn theorem3_validate(t: &LevyTriplet2D, z: f64, cfg: &McConfig) -> Result<Theorem3Record> {
    Ok(theorem3_validate_batch(t, &[z], cfg)?.remove(0))
}

/// Smallest value of `V` seen over all sampled points of all paths.
///
/// When `δ(z)` is finite the grid engine decomposes `η = S + δ(z)W`, which
/// leaves only the subordinator `S` to be discretised.
pub fn empirical_lower_bound(t: &LevyTriplet2D, z: f64, cfg: &McConfig) -> Result<f64> {
    let scheme = match classification::delta(t, z) {
        Ok(d) => d.finite().map_or(ZScheme::auto(t), |u| ZScheme::Decomposed { u }),
        Err(_) => ZScheme::auto(t),
    };
    let opts = SummaryOptions {
        track_min_v: true,
        scheme,
        ..Default::default()
    };
    let sums = summaries(t, &[z], cfg, opts)?;
    Ok(sums.iter().map(|s| s.min_v[0]).fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongOrderReport {
    pub steps: Vec<f64>,
    pub rmse: Vec<f64>,
    /// Least-squares slope of `log rmse` against `log step`.
    pub order: f64,
    /// Smallest `Z + 1 + 10·step` seen on any grid point of any path.
    pub min_margin: f64,
    /// The same minimum for each step separately.
    pub margins: Vec<f64>,
}

/// RMSE at `T = 1` of the left-point `Z` against the closed form
/// `e^{-(B_t + ct)} - 1` of the continuous example. Every step must divide
/// the finest one's grid: each path draws one Brownian motion on the finest
/// grid and the coarser grids observe it.
pub fn strong_order_continuous(c: f64, steps: &[f64], n_paths: usize, seed: u64) -> Result<StrongOrderReport> {
    let finest = steps.iter().cloned().fold(f64::INFINITY, f64::min);
    let n_fine = (1.0 / finest).round() as usize;
    let strides: Vec<usize> = steps
        .iter()
        .map(|&h| {
            let s = (h / finest).round() as usize;
            if s == 0 || !n_fine.is_multiple_of(s) || ((s as f64) * finest - h).abs() > 1e-12 {
                Err(GouError::InvalidModel(format!("step {h} is not a multiple of {finest} dividing 1")))
            } else {
                Ok(s)
            }
        })
        .collect::<Result<_>>()?;
    let per_path: Vec<(Vec<f64>, Vec<f64>)> = par_map(n_paths, |i| {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = path_rng(seed, i);
        let sd = finest.sqrt();
        let mut b = Vec::with_capacity(n_fine + 1);
        b.push(0.0);
        let mut acc = 0.0;
        for _ in 0..n_fine {
            let n: f64 = StandardNormal.sample(&mut rng);
            acc += sd * n;
            b.push(acc);
        }
        let mut sq = Vec::with_capacity(strides.len());
        let mut margin = Vec::with_capacity(strides.len());
        for (&s, &h) in strides.iter().zip(steps) {
            let idx: Vec<usize> = (0..=n_fine).step_by(s).collect();
            let times: Vec<f64> = idx.iter().map(|&k| k as f64 * finest).collect();
            let bb: Vec<f64> = idx.iter().map(|&k| b[k]).collect();
            let xi = times.iter().zip(&bb).map(|(t, b)| b + c * t).collect();
            let eta = times.iter().zip(&bb).map(|(t, b)| -b + (0.5 - c) * t).collect();
            let p = PairPath::continuous(times.clone(), xi, eta);
            let z = compute_z(&p);
            let exact = closed_form_continuous_example(c, &times, &bb);
            let e = z.last().unwrap() - exact.last().unwrap();
            sq.push(e * e);
            margin.push(z.iter().map(|&v| v + 1.0 + 10.0 * h).fold(f64::INFINITY, f64::min));
        }
        (sq, margin)
    });
    let rmse: Vec<f64> = (0..steps.len())
        .map(|j| {
            let v: Vec<f64> = per_path.iter().map(|(sq, _)| sq[j]).collect();
            (pairwise_sum(&v) / n_paths as f64).sqrt()
        })
        .collect();
    let margins: Vec<f64> = (0..steps.len())
        .map(|j| per_path.iter().map(|(_, m)| m[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = rmse.iter().map(|r| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(StrongOrderReport {
        steps: steps.to_vec(),
        rmse,
        order: sxy / sxx,
        min_margin: margins.iter().cloned().fold(f64::INFINITY, f64::min),
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::{LevyMeasure2D, JumpAtom};
    use crate::presets;

    #[test]
    fn strong_order_of_left_point_sum() {
        let steps: Vec<f64> = (4..=9).map(|k| 2f64.powi(-k)).collect();
        let r = strong_order_continuous(0.3, &steps, 300, 5).unwrap();
        assert!((0.35..=0.75).contains(&r.order), "{r:?}");
        assert!(r.rmse.windows(2).all(|w| w[1] < w[0]), "{r:?}");
        assert_eq!(r.margins.len(), steps.len());
        assert!(strong_order_continuous(0.0, &[0.25, 0.3], 10, 1).is_err());
    }

    #[test]
    fn wilson_edges() {
        let e = EstimateWithCI::wilson(0, 100);
        assert_eq!((e.point, e.ci_low), (0.0, 0.0));
        assert!(e.ci_high > 0.0 && e.ci_high < 0.05);
        let e = EstimateWithCI::wilson(100, 100);
        assert_eq!((e.point, e.ci_high), (1.0, 1.0));
        let e = EstimateWithCI::wilson(50, 100);
        assert!(e.ci_low < 0.5 && 0.5 < e.ci_high);
        // Textbook value: 0.4038 to 0.5962.
        assert!((e.ci_low - 0.4038).abs() < 1e-4 && (e.ci_high - 0.5962).abs() < 1e-4);
    }

    #[test]
    fn empirical_cdf_basics() {
        let g = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(g.eval(0.9), 0.0);
        assert_eq!(g.eval(1.0), 0.25);
        assert_eq!(g.eval(2.0), 0.75);
        assert_eq!(g.eval(5.0), 1.0);
        assert_eq!(g.ks_distance(&g), 0.0);
        let h = EmpiricalCdf::new(vec![10.0, 11.0]);
        assert_eq!(g.ks_distance(&h), 1.0);
        let u = EmpiricalCdf::new((0..100).map(|i| (i as f64 + 0.5) / 100.0).collect());
        assert!(u.ks_to(|x| x.clamp(0.0, 1.0)) <= 0.005 + 1e-12);
    }

    #[test]
    fn pairwise_sum_matches() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    fn mc(h: f64, step: f64, n: usize) -> McConfig {
        McConfig::new(h, step, 9, n).unwrap()
    }

    #[test]
    fn subordinator_eta_never_ruins() {
        let t = LevyTriplet2D::new(
            [0.3, 0.5],
            [[0.2, 0.0], [0.0, 0.0]],
            LevyMeasure2D::Atoms(vec![JumpAtom::new(-0.5, 0.4, 1.0).unwrap()]),
        )
        .unwrap();
        let r = estimate_ruin(&t, 0.0, &mc(10.0, 0.01, 500)).unwrap();
        assert_eq!((r.estimate.point, r.estimate.n_events), (0.0, 0));
        assert_eq!(estimate_negative_prob(&t, &mc(5.0, 0.01, 300)).unwrap().n_events, 0);
    }

    #[test]
    fn jump_example_ruin() {
        let t = presets::jump_example(1.0, 1.0);
        let cfg = mc(200.0, 1.0, 2000);
        let r = estimate_ruin_batch(&t, &[0.5, 2.0], &cfg).unwrap();
        assert!(r[0].estimate.ci_low > 0.0);
        assert_eq!(r[1].estimate.n_events, 0);
        assert!(r[0].exact);
        let np = estimate_negative_prob(&t, &mc(5.0, 1.0, 3000)).unwrap();
        assert!(np.ci_low > 0.0);
    }

    #[test]
    fn ruin_is_monotone_in_z_on_common_paths() {
        let t = LevyTriplet2D::new([0.2, 0.1], [[0.3, 0.1], [0.1, 0.5]], LevyMeasure2D::default()).unwrap();
        let zs: Vec<f64> = (0..8).map(|i| 0.25 * i as f64).collect();
        let r = estimate_ruin_batch(&t, &zs, &mc(5.0, 0.01, 400)).unwrap();
        for w in r.windows(2) {
            assert!(w[0].estimate.n_events >= w[1].estimate.n_events);
        }
    }

    #[test]
    fn zinf_laws() {
        // ξ = t, η = b t: Z_∞ = b.
        let t = LevyTriplet2D::new([1.0, 0.7], [[0.0; 2]; 2], LevyMeasure2D::default()).unwrap();
        let z = estimate_zinf_cdf(&t, &mc(40.0, 1.0, 10)).unwrap();
        assert!(z.cdf.samples().iter().all(|v| (v - 0.7).abs() < 1e-12));
        // Degenerate η = -kW: Z_t = k(1 - e^{-ξ_t}) → k.
        let (a, k) = (0.5, 2.0);
        let t = LevyTriplet2D::new([a, -k * (0.5 - a)], [[1.0, k], [k, k * k]], LevyMeasure2D::default()).unwrap();
        assert_eq!(classification::is_degenerate(&t).unwrap(), Some(k));
        let z = estimate_zinf_cdf(&t, &mc(60.0, 0.01, 50)).unwrap();
        assert!(z.cdf.samples().iter().all(|v| (v - k).abs() < 0.05), "{:?}", &z.cdf.samples()[..3]);
        let bad = presets::drift_brownian(-1.0, 0.0);
        assert!(matches!(estimate_zinf_cdf(&bad, &mc(1.0, 0.1, 5)), Err(GouError::Precondition(_))));
    }

    #[test]
    fn lower_bounds() {
        let je = presets::jump_example(1.0, 1.0);
        let lb = empirical_lower_bound(&je, 2.0, &mc(100.0, 1.0, 200)).unwrap();
        assert!(lb >= 2.0 - 1e-9, "{lb}");
        let ce = presets::continuous_example(0.3);
        let lb = empirical_lower_bound(&ce, 1.0, &mc(1.0, 1e-3, 100)).unwrap();
        assert!(lb >= 1.0 - 10.0 * 1e-3, "{lb}");
        let ind = presets::independent_brownian(1.0, 1.0);
        let lb = empirical_lower_bound(&ind, 0.0, &mc(1000.0, 0.1, 20)).unwrap();
        assert!(lb < -10.0, "{lb}");
    }

    #[test]
    fn theorem3_far_from_ruin_is_trivially_consistent() {
        let t = presets::drift_brownian(1.0, 0.0);
        let r = theorem3_validate(&t, 5.0, &mc(10.0, 0.01, 500)).unwrap();
        assert_eq!(r.lhs.n_events, 0);
        assert!(r.rhs.is_none() && r.consistent);
    }
}
