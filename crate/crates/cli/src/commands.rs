//! The `check`, `simulate` and `estimate` commands as library functions
//! returning the JSON documents the binary prints.

use std::fs;
use std::path::{Path, PathBuf};

use gou_core::classification::{self, Decision, RuinReport};
use gou_core::estimation::{self, RuinEstimate, Theorem3Record};
use gou_core::simulator::{write_csv, ZScheme};
use gou_core::{EstimateWithCI, ExtendedReal, McConfig, PathConfig, Simulator};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::hash::blob_hash;
use crate::spec::ProcessSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaPoint {
    pub z: f64,
    pub delta: ExtendedReal,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutput {
    pub spec: ProcessSpec,
    /// `u*` of a `no_ruin_from` decision.
    pub threshold: Option<f64>,
    #[serde(flatten)]
    pub report: RuinReport,
    pub delta_at: Vec<DeltaPoint>,
}

impl CheckOutput {
    pub fn exit_code(&self) -> i32 {
        match self.report.decision {
            Decision::Undetermined => crate::error::EXIT_UNDETERMINED,
            _ => crate::error::EXIT_OK,
        }
    }
}

pub fn check(spec: &ProcessSpec, delta_at: &[f64]) -> Result<CheckOutput, CliError> {
    let t = spec.triplet();
    let report = classification::no_ruin_threshold(&t)?;
    let delta_at = if delta_at.is_empty() {
        Vec::new()
    } else {
        let fs = classification::feasible_u_set(&t)?;
        delta_at.iter().map(|&z| DeltaPoint { z, delta: fs.delta(z) }).collect()
    };
    let threshold = match report.decision {
        Decision::NoRuinFrom { u_star } => Some(u_star),
        _ => None,
    };
    Ok(CheckOutput {
        spec: spec.clone(),
        threshold,
        report,
        delta_at,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    pub z: f64,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub spec: ProcessSpec,
    pub config: SimulateArgs,
    /// `event_driven` or `grid`.
    pub engine: String,
    pub step_used: bool,
    pub z_scheme: ZScheme,
    pub notes: Vec<String>,
    pub files: Vec<FileEntry>,
    /// Blob hash of the `"<sha256> <name>\n"` listing of all files.
    pub content_hash: String,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn path_file_name(i: usize) -> String {
    format!("path_{i:04}.csv")
}

pub fn simulate(spec: &ProcessSpec, args: SimulateArgs, out: &Path) -> Result<Manifest, CliError> {
    if args.paths == 0 {
        return Err(CliError::Input("--paths must be at least 1".into()));
    }
    let t = spec.triplet();
    let cfg = PathConfig {
        truncation_eps: args.truncation_eps,
        ..PathConfig::new(args.horizon, args.step, args.seed)?
    };
    let sim = Simulator::new(&t, cfg)?;
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;
    let exact = sim.is_exact();
    let scheme = if exact { ZScheme::LeftPoint } else { ZScheme::auto(&t) };
    let mut notes = Vec::new();
    if exact {
        notes.push("no Gaussian part: paths are simulated event by event without discretisation; --step is ignored".into());
    } else {
        notes.push(format!("jump-adapted grid with step {}", args.step));
    }
    let mut files = Vec::with_capacity(args.paths);
    for i in 0..args.paths {
        let p = sim.path_with(i as u64, args.z, scheme);
        let mut buf = Vec::new();
        write_csv(&p, &mut buf)?;
        let name = path_file_name(i);
        write_file(&out.join(&name), &buf)?;
        files.push(FileEntry {
            name,
            rows: p.pair.len(),
            sha256: blob_hash(&buf),
        });
    }
    let listing: String = files.iter().map(|f| format!("{} {}\n", f.sha256, f.name)).collect();
    let manifest = Manifest {
        spec: spec.clone(),
        config: args,
        engine: if exact { "event_driven" } else { "grid" }.into(),
        step_used: !exact,
        z_scheme: scheme,
        notes,
        files,
        content_hash: blob_hash(listing.as_bytes()),
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serialises");
    write_file(&out.join(MANIFEST_NAME), &json)?;
    Ok(manifest)
}

fn write_file(p: &PathBuf, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(p, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum What {
    Ruin,
    Negprob,
    Zinf,
    Theorem3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantile {
    pub p: f64,
    pub q: f64,
}

/// Summary of the empirical law of `Z_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZinfSummary {
    pub horizon: f64,
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub quantiles: Vec<Quantile>,
    pub ks_half_horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "what", content = "result", rename_all = "snake_case")]
pub enum EstimateResult {
    Ruin(Vec<RuinEstimate>),
    Negprob(EstimateWithCI),
    Zinf(ZinfSummary),
    Theorem3(Vec<Theorem3Record>),
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateOutput {
    pub spec: ProcessSpec,
    pub config: McConfig,
    #[serde(flatten)]
    pub result: EstimateResult,
}

const QUANTILE_PS: [f64; 9] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

pub fn estimate(spec: &ProcessSpec, what: What, zs: &[f64], cfg: McConfig) -> Result<EstimateOutput, CliError> {
    let t = spec.triplet();
    let need_z = || {
        if zs.is_empty() {
            Err(CliError::Input(format!("--what {} needs at least one --z", what_name(what))))
        } else {
            Ok(())
        }
    };
    let result = match what {
        What::Ruin => {
            need_z()?;
            EstimateResult::Ruin(estimation::estimate_ruin_batch(&t, zs, &cfg)?)
        }
        What::Negprob => EstimateResult::Negprob(estimation::estimate_negative_prob(&t, &cfg)?),
        What::Zinf => {
            let z = estimation::estimate_zinf_cdf(&t, &cfg)?;
            let s = z.cdf.samples();
            let n = s.len();
            let mean = estimation::pairwise_sum(s) / n as f64;
            let dev: Vec<f64> = s.iter().map(|v| (v - mean) * (v - mean)).collect();
            let var = if n > 1 { estimation::pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
            let quantiles = QUANTILE_PS
                .iter()
                .map(|&p| {
                    let k = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
                    Quantile { p, q: s[k] }
                })
                .collect();
            EstimateResult::Zinf(ZinfSummary {
                horizon: z.horizon,
                n,
                mean,
                std_dev: var.sqrt(),
                quantiles,
                ks_half_horizon: z.ks_half_horizon,
            })
        }
        What::Theorem3 => {
            need_z()?;
            EstimateResult::Theorem3(estimation::theorem3_validate_batch(&t, zs, &cfg)?)
        }
    };
    Ok(EstimateOutput {
        spec: spec.clone(),
        config: cfg,
        result,
    })
}

fn what_name(w: What) -> &'static str {
    match w {
        What::Ruin => "ruin",
        What::Negprob => "negprob",
        What::Zinf => "zinf",
        What::Theorem3 => "theorem3",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Preset;

    #[test]
    fn check_presets() {
        let s = ProcessSpec::Preset(Preset::ContinuousExample { c: 0.0 });
        let out = check(&s, &[0.5, 1.0, 3.0]).unwrap();
        assert_eq!(out.report.decision, Decision::NoRuinFrom { u_star: 1.0 });
        assert_eq!(out.threshold, Some(1.0));
        assert_eq!(out.delta_at[0].delta, ExtendedReal::NegInf);
        assert_eq!(out.delta_at[2].delta, ExtendedReal::new(1.0));

        let s = ProcessSpec::Preset(Preset::JumpExample { c: 1.0, lambda: 1.0 });
        let out = check(&s, &[]).unwrap();
        let e = std::f64::consts::E;
        assert!((out.threshold.unwrap() - e / (e - 1.0)).abs() < 1e-12);
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn full_rank_sigma_is_ruin_everywhere() {
        let s = ProcessSpec::from_json(r#"{"gamma_tilde":[0,1],"sigma":[[1,0],[0,1]]}"#).unwrap();
        assert_eq!(check(&s, &[]).unwrap().report.decision, Decision::RuinEverywhere);
    }

    #[test]
    fn estimate_needs_z_and_convergence() {
        let s = ProcessSpec::Preset(Preset::JumpExample { c: 1.0, lambda: 1.0 });
        let cfg = McConfig::new(1.0, 0.1, 1, 10).unwrap();
        assert_eq!(estimate(&s, What::Ruin, &[], cfg).unwrap_err().exit_code(), 1);
        let s = ProcessSpec::from_json(r#"{"gamma_tilde":[0,0],"sigma":[[0,0],[0,1]]}"#).unwrap();
        let e = estimate(&s, What::Zinf, &[], cfg).unwrap_err();
        assert!(e.to_string().contains("Z_inf does not converge"), "{e}");
    }
}
