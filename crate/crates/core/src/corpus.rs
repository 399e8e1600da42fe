//! Random atom-tier triplets for property tests and the acceptance harness.
//!
//! The generator deliberately produces boundary cases: lattice coordinates,
//! atoms sharing a threshold `y / (e^{-x} - 1)`, atoms on the axes, empty
//! quadrants, and drifts tuned so the drift inequality is tight at a
//! threshold.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::levy_model::{JumpAtom, LevyMeasure2D, LevyTriplet2D};
use crate::region;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaKind {
    Zero,
    RankOne,
    Full,
}

pub const MAX_ATOMS: usize = 8;

fn coord<R: Rng>(rng: &mut R, span: f64) -> f64 {
    if rng.random_bool(0.4) {
        let steps = (span / 0.25) as i32;
        0.25 * rng.random_range(-steps..=steps) as f64
    } else {
        rng.random_range(-span..span)
    }
}

/// Allowed sign patterns of the atoms: which of the quadrant interiors and
/// axes may carry mass.
fn allowed(shape: u8, x: f64, y: f64) -> bool {
    match shape {
        // Π(A₂) = Π(A₃) = 0.
        0 => y >= 0.0,
        // Π(A₃) = 0.
        1 => !(x <= 0.0 && y < 0.0),
        // Π(A₂) = 0.
        2 => !(x >= 0.0 && y < 0.0),
        _ => true,
    }
}

fn random_atoms<R: Rng>(rng: &mut R) -> Vec<JumpAtom> {
    let shape = rng.random_range(0..4u8);
    let n = rng.random_range(0..=MAX_ATOMS);
    let mut out: Vec<JumpAtom> = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 200 {
        tries += 1;
        let mut x = coord(rng, 2.0);
        let mut y = coord(rng, 3.0);
        if rng.random_bool(0.1) {
            x = 0.0;
        }
        // Reuse the threshold of an earlier atom.
        if !out.is_empty() && x != 0.0 && rng.random_bool(0.25) {
            let a = out.choose(rng).unwrap();
            if a.x != 0.0 {
                y = region::atom_threshold(a.x, a.y) * (-x).exp_m1();
            }
        }
        if (x == 0.0 && y == 0.0) || !allowed(shape, x, y) {
            continue;
        }
        let rate = if rng.random_bool(0.3) { 1.0 } else { rng.random_range(0.05..3.0) };
        out.push(JumpAtom::new(x, y, rate).expect("generated atom is valid"));
    }
    out
}

/// A random triplet with at most [`MAX_ATOMS`] atoms and a Gaussian part of
/// the given kind.
pub fn random_triplet<R: Rng>(rng: &mut R, kind: SigmaKind) -> LevyTriplet2D {
    let atoms = random_atoms(rng);
    let sigma = match kind {
        SigmaKind::Zero => [[0.0; 2]; 2],
        SigmaKind::RankOne => {
            let s = rng.random_range(0.1..2.0);
            let v = coord(rng, 2.0);
            [[s, -v * s], [-v * s, v * v * s]]
        }
        SigmaKind::Full => {
            let (a, d): (f64, f64) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
            let b = rng.random_range(-0.9..0.9) * (a * d).sqrt();
            [[a, b], [b, d]]
        }
    };
    let gx = coord(rng, 2.0);
    let mut t = LevyTriplet2D::new([gx, 0.0], sigma, LevyMeasure2D::Atoms(atoms)).expect("valid triplet");
    // Choose γ̃_η so the drift inequality is tight at some relevant u, or random.
    let gy = if rng.random_bool(0.4) {
        let th = region::thetas(&t.jumps).expect("atom thetas");
        let mut cands: Vec<f64> = [th.theta1, th.theta2, th.theta3, th.theta4]
            .iter()
            .filter_map(|v| v.finite())
            .collect();
        if sigma[0][0] > 0.0 {
            cands.push(-sigma[0][1] / sigma[0][0]);
        }
        match cands.choose(rng) {
            Some(&u) => {
                let lhs = region::drift_lhs(&t, u).expect("atom drift").to_f64();
                -lhs
            }
            None => coord(rng, 3.0),
        }
    } else {
        coord(rng, 3.0)
    };
    t.gamma_tilde[1] = gy;
    t
}

/// Kind of the `i`-th corpus member: the three Gaussian forms in rotation.
pub fn kind_for(i: usize) -> SigmaKind {
    [SigmaKind::Zero, SigmaKind::RankOne, SigmaKind::Full][i % 3]
}

/// A reproducible corpus of `n` triplets.
pub fn corpus(seed: u64, n: usize) -> Vec<LevyTriplet2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| random_triplet(&mut rng, kind_for(i))).collect()
}

/// `n` test points for `u`: every finite threshold, every atom threshold, the
/// covariance point, their immediate neighbours, and random fill.
pub fn u_grid<R: Rng>(rng: &mut R, t: &LevyTriplet2D, n: usize) -> Vec<f64> {
    let mut special = vec![0.0];
    if let Ok(th) = region::thetas(&t.jumps) {
        special.extend([th.theta1, th.theta2, th.theta3, th.theta4].iter().filter_map(|v| v.finite()));
    }
    for a in t.jumps.atoms().unwrap_or(&[]) {
        if a.x != 0.0 {
            special.push(region::atom_threshold(a.x, a.y));
        }
    }
    if t.sigma_xi2() > 0.0 {
        special.push(-t.sigma_xi_eta() / t.sigma_xi2());
    }
    special.sort_by(f64::total_cmp);
    special.dedup();
    let mut out = Vec::with_capacity(n);
    for &u in &special {
        for v in [u, u + 1e-3, u - 1e-3] {
            if out.len() < n {
                out.push(v);
            }
        }
    }
    while out.len() < n {
        out.push(rng.random_range(-5.0..5.0));
    }
    out
}
