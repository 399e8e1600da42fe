//! The simulable form of a triplet: plain drift, Cholesky factor of `Σ`, and
//! a compound-Poisson jump source.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{GouError, Result};
use crate::levy_model::{Cond, DensitySpec, LevyMeasure2D, LevyTriplet2D};

#[derive(Debug, Clone)]
enum JumpSource {
    None,
    Atoms { cumulative: Vec<f64>, jumps: Vec<(f64, f64)> },
    Density { spec: DensitySpec, eps: f64 },
}

#[derive(Debug, Clone)]
pub struct Driver {
    /// Drift of the continuous part once small jumps are compensated.
    pub drift: [f64; 2],
    pub sigma: [[f64; 2]; 2],
    chol: [[f64; 2]; 2],
    pub total_rate: f64,
    source: JumpSource,
}

/// Lower-triangular `L` with `LLᵀ = Σ`, also for singular `Σ`.
fn cholesky(s: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let l00 = s[0][0].max(0.0).sqrt();
    let l10 = if l00 > 0.0 { s[1][0] / l00 } else { 0.0 };
    let l11 = (s[1][1] - l10 * l10).max(0.0).sqrt();
    [[l00, 0.0], [l10, l11]]
}

impl Driver {
    /// Compiles `t`. Density-tier measures need a truncation level: jumps with
    /// `|z| < eps` are dropped and their compensator folded into the drift.
    pub fn new(t: &LevyTriplet2D, truncation_eps: Option<f64>) -> Result<Driver> {
        let [gx, gy] = t.gamma_tilde;
        let (drift, total_rate, source) = match &t.jumps {
            LevyMeasure2D::Atoms(atoms) if atoms.is_empty() => ([gx, gy], 0.0, JumpSource::None),
            LevyMeasure2D::Atoms(atoms) => {
                let (mut cx, mut cy) = (0.0, 0.0);
                let mut cumulative = Vec::with_capacity(atoms.len());
                let mut acc = 0.0;
                for a in atoms {
                    if Cond::DISK.holds(a.x, a.y) {
                        cx += a.x * a.rate;
                        cy += a.y * a.rate;
                    }
                    acc += a.rate;
                    cumulative.push(acc);
                }
                let jumps = atoms.iter().map(|a| (a.x, a.y)).collect();
                ([gx - cx, gy - cy], acc, JumpSource::Atoms { cumulative, jumps })
            }
            LevyMeasure2D::Density(spec) => {
                let eps = truncation_eps.ok_or_else(|| {
                    GouError::NotSupported("density-tier jumps need truncation_eps to be simulated".into())
                })?;
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(GouError::InvalidModel("truncation_eps must be positive".into()));
                }
                let big = [Cond::Ball { r: eps, inside: false }];
                let rate = t.jumps.mass(&big)?.value.finite().ok_or_else(|| {
                    GouError::NotSupported("jump mass above the truncation level is infinite".into())
                })?;
                let mid = [Cond::DISK, Cond::Ball { r: eps, inside: false }];
                let cx = t.jumps.integrate(&mid, &|x, _| x)?.value.to_f64();
                let cy = t.jumps.integrate(&mid, &|_, y| y)?.value.to_f64();
                let source = if rate > 0.0 {
                    JumpSource::Density { spec: spec.clone(), eps }
                } else {
                    JumpSource::None
                };
                ([gx - cx, gy - cy], rate, source)
            }
        };
        Ok(Driver {
            drift,
            sigma: t.sigma,
            chol: cholesky(&t.sigma),
            total_rate,
            source,
        })
    }

    pub fn sigma_is_zero(&self) -> bool {
        self.sigma.iter().flatten().all(|&v| v == 0.0)
    }

    pub(crate) fn has_brownian(&self) -> bool {
        !self.sigma_is_zero()
    }

    /// Waiting time to the next jump.
    pub(crate) fn interarrival<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.total_rate > 0.0 {
            let e: f64 = Exp1.sample(rng);
            e / self.total_rate
        } else {
            f64::INFINITY
        }
    }

    pub(crate) fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match &self.source {
            JumpSource::None => unreachable!("no jumps to sample"),
            JumpSource::Atoms { cumulative, jumps } => {
                if jumps.len() == 1 {
                    return jumps[0];
                }
                let u = rng.random::<f64>() * self.total_rate;
                let i = cumulative.partition_point(|&c| c <= u).min(jumps.len() - 1);
                jumps[i]
            }
            JumpSource::Density { spec, eps } => {
                spec.sample_jump(rng, *eps).expect("positive mass above the truncation level")
            }
        }
    }

    /// Brownian increment over a cell of length `dt`.
    pub(crate) fn brownian<R: Rng + ?Sized>(&self, rng: &mut R, dt: f64) -> (f64, f64) {
        let sd = dt.sqrt();
        let l = &self.chol;
        let n1: f64 = if l[0][0] != 0.0 || l[1][0] != 0.0 { StandardNormal.sample(rng) } else { 0.0 };
        let n2: f64 = if l[1][1] != 0.0 { StandardNormal.sample(rng) } else { 0.0 };
        (sd * l[0][0] * n1, sd * (l[1][0] * n1 + l[1][1] * n2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn compensation_only_inside_the_disk() {
        let d = Driver::new(&presets::jump_example(1.0, 1.0), None).unwrap();
        assert_eq!(d.drift, [-1.0, 2.0]);
        let t = LevyTriplet2D::new(
            [0.0, 0.0],
            [[0.0; 2]; 2],
            LevyMeasure2D::Atoms(vec![crate::levy_model::JumpAtom::new(0.5, 0.2, 2.0).unwrap()]),
        )
        .unwrap();
        assert_eq!(Driver::new(&t, None).unwrap().drift, [-1.0, -0.4]);
    }

    #[test]
    fn singular_cholesky() {
        let l = cholesky(&[[1.0, -1.0], [-1.0, 1.0]]);
        assert_eq!(l, [[1.0, 0.0], [-1.0, 0.0]]);
        let l = cholesky(&[[0.0, 0.0], [0.0, 4.0]]);
        assert_eq!(l, [[0.0, 0.0], [0.0, 2.0]]);
    }
}
