//! Process specs: a named preset or an inline triplet document.
//!
//! ```json
//! {"preset": "jump_example", "c": 1, "lambda": 1}
//! {"gamma_tilde": [0, 1], "sigma": [[1, 0], [0, 1]], "jumps": {"atoms": []}}
//! ```

use std::io::Read;
use std::path::Path;

use gou_core::{presets, LevyTriplet2D};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    /// `(B_t + ct, -B_t + (1/2 - c)t)`.
    ContinuousExample { c: f64 },
    /// `(-ct + N_t, 2ct - N_t)` with `N` Poisson of rate `lambda`.
    JumpExample { c: f64, lambda: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProcessSpec {
    Preset(Preset),
    Inline(LevyTriplet2D),
}

fn located<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let at = if path == "." { "spec root".to_string() } else { format!("`{path}`") };
        CliError::Input(format!("invalid process spec at {at}: {}", e.inner()))
    })
}

impl ProcessSpec {
    pub fn from_json(text: &str) -> Result<ProcessSpec, CliError> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("process spec is not valid JSON: {e}")))?;
        if !v.is_object() {
            return Err(CliError::Input("process spec must be a JSON object".into()));
        }
        if v.get("preset").is_some() {
            let p: Preset = located(v)?;
            // Surface invalid preset parameters as input errors, not panics.
            match p {
                Preset::JumpExample { lambda, .. } if !(lambda > 0.0 && lambda.is_finite()) => {
                    return Err(CliError::Input(format!(
                        "invalid process spec at `lambda`: rate must be positive and finite, got {lambda}"
                    )))
                }
                _ => {}
            }
            Ok(ProcessSpec::Preset(p))
        } else {
            Ok(ProcessSpec::Inline(located(v)?))
        }
    }

    /// Reads a spec from a file path, `-` for standard input, or an inline
    /// JSON document.
    pub fn load(arg: &str) -> Result<ProcessSpec, CliError> {
        let text = if arg == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        } else if arg.trim_start().starts_with('{') {
            arg.to_string()
        } else {
            std::fs::read_to_string(Path::new(arg))
                .map_err(|e| CliError::Input(format!("cannot read spec file {arg}: {e}")))?
        };
        ProcessSpec::from_json(&text)
    }

    pub fn triplet(&self) -> LevyTriplet2D {
        match self {
            ProcessSpec::Preset(Preset::ContinuousExample { c }) => presets::continuous_example(*c),
            ProcessSpec::Preset(Preset::JumpExample { c, lambda }) => presets::jump_example(*c, *lambda),
            ProcessSpec::Inline(t) => t.clone(),
        }
    }
}
