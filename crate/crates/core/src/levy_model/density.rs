//! Density-tier Lévy measures: a named density on a bounded box, optionally
//! pushed forward by a map of the form `(x, y) ↦ (x, a·y + c·(e^{-x} - 1))`.
//!
//! Shipped families (source coordinates `(x, y)`, box `[x0, x1] × [y0, y1]`):
//!
//! | kind          | params                        | density                                    |
//! |---------------|-------------------------------|--------------------------------------------|
//! | `uniform_box` | `mass`                        | `mass / ((x1-x0)(y1-y0))` on the box       |
//! | `exp_tails`   | `scale`, `rate_x`, `rate_y`   | `scale · exp(-rate_x|x| - rate_y|y|)`      |
//! | `eta_power`   | `scale`, `alpha`              | `scale · |y|^{-alpha}` on the line `x = 0` |
//!
//! `eta_power` describes pure η-jumps and needs `x0 = x1 = 0`; with
//! `alpha >= 1` and a y-range touching zero it has infinite activity.

use std::cell::RefCell;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GouError, Result};
use crate::extended::ExtendedReal;
use crate::interval::IntervalSet;
use crate::quadrature::{self, Improper, Quad, QuadConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DensityFamily {
    UniformBox { mass: f64 },
    ExpTails { scale: f64, rate_x: f64, rate_y: f64 },
    EtaPower { scale: f64, alpha: f64 },
}

/// Pushforward `y' = a·y + c·(e^{-x} - 1)`; the x-coordinate is unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YMap {
    pub a: f64,
    pub c: f64,
}

impl Default for YMap {
    fn default() -> Self {
        YMap { a: 1.0, c: 0.0 }
    }
}

impl YMap {
    pub fn is_identity(&self) -> bool {
        *self == YMap::default()
    }

    pub fn apply(&self, x: f64, y: f64) -> f64 {
        if self.c == 0.0 {
            self.a * y
        } else {
            self.a * y + self.c * (-x).exp_m1()
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: YMap) -> YMap {
        YMap {
            a: other.a * self.a,
            c: other.a * self.c + other.c,
        }
    }
}

/// Value of an integral over a density-tier measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: ExtendedReal,
    pub abs_err: f64,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: ExtendedReal::ZERO,
        abs_err: 0.0,
    };

    pub fn finite(value: f64, abs_err: f64) -> Self {
        Integral {
            value: ExtendedReal::new(value),
            abs_err,
        }
    }

    pub fn checked_add(self, o: Integral) -> Result<Integral> {
        Ok(Integral {
            value: self.value.checked_add(o.value)?,
            abs_err: self.abs_err + o.abs_err,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    #[serde(flatten)]
    pub family: DensityFamily,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub tol: f64,
    #[serde(default, skip_serializing_if = "YMap::is_identity")]
    pub map: YMap,
}

impl DensitySpec {
    pub fn new(family: DensityFamily, bbox: [f64; 4], tol: f64) -> Result<Self> {
        let spec = DensitySpec {
            family,
            bbox,
            tol,
            map: YMap::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.bbox;
        if !self.bbox.iter().all(|v| v.is_finite()) || x0 > x1 || y0 >= y1 {
            return Err(GouError::InvalidModel(format!("bad density box {:?}", self.bbox)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(GouError::InvalidModel("density tol must be positive".into()));
        }
        if !(self.map.a.is_finite() && self.map.c.is_finite()) {
            return Err(GouError::InvalidModel("density map must be finite".into()));
        }
        match self.family {
            DensityFamily::UniformBox { mass } => {
                if !(mass > 0.0 && mass.is_finite()) || x0 >= x1 {
                    return Err(GouError::InvalidModel(
                        "uniform_box needs mass > 0 and a box of positive area".into(),
                    ));
                }
            }
            DensityFamily::ExpTails {
                scale,
                rate_x,
                rate_y,
            } => {
                if !(scale > 0.0 && rate_x >= 0.0 && rate_y >= 0.0) || x0 >= x1 {
                    return Err(GouError::InvalidModel(
                        "exp_tails needs scale > 0, rates >= 0 and a box of positive area".into(),
                    ));
                }
            }
            DensityFamily::EtaPower { scale, alpha } => {
                if x0 != 0.0 || x1 != 0.0 {
                    return Err(GouError::InvalidModel(
                        "eta_power lives on the line x = 0; use box [0, 0, y0, y1]".into(),
                    ));
                }
                if scale.is_nan() || scale <= 0.0 {
                    return Err(GouError::InvalidModel("eta_power needs scale > 0".into()));
                }
                // ∫ min(y², 1) |y|^{-alpha} dy < ∞ near the origin iff alpha < 3.
                if y0 <= 0.0 && y1 >= 0.0 && alpha >= 3.0 {
                    return Err(GouError::InvalidModel(
                        "eta_power with alpha >= 3 violates the Lévy integrability condition".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn with_map(&self, next: YMap) -> DensitySpec {
        DensitySpec {
            map: self.map.then(next),
            ..self.clone()
        }
    }

    pub fn quad_config(&self) -> QuadConfig {
        QuadConfig::new(self.tol)
    }

    pub fn is_line(&self) -> bool {
        matches!(self.family, DensityFamily::EtaPower { .. })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.bbox[0], self.bbox[1])
    }

    /// Source density at `(x, y)` for plane families.
    fn plane_density(&self, x: f64, y: f64) -> f64 {
        let [x0, x1, y0, y1] = self.bbox;
        match self.family {
            DensityFamily::UniformBox { mass } => mass / ((x1 - x0) * (y1 - y0)),
            DensityFamily::ExpTails {
                scale,
                rate_x,
                rate_y,
            } => scale * (-rate_x * x.abs() - rate_y * y.abs()).exp(),
            DensityFamily::EtaPower { .. } => unreachable!("line family has no planar density"),
        }
    }

    /// `∫_{y0}^{y1} f(x, y) dy` in closed form.
    fn plane_y_marginal(&self, x: f64) -> f64 {
        let [x0, x1, y0, y1] = self.bbox;
        match self.family {
            DensityFamily::UniformBox { mass } => mass / (x1 - x0),
            DensityFamily::ExpTails {
                scale,
                rate_x,
                rate_y,
            } => scale * (-rate_x * x.abs()).exp() * exp_abs_integral(rate_y, y0, y1),
            DensityFamily::EtaPower { .. } => unreachable!(),
        }
    }

    fn line_density(&self, y: f64) -> f64 {
        match self.family {
            DensityFamily::EtaPower { scale, alpha } => scale * y.abs().powf(-alpha),
            _ => unreachable!(),
        }
    }

    /// Range of the target y-coordinate over the source box at abscissa `x`.
    pub fn target_y_range(&self, x: f64) -> (f64, f64) {
        let [_, _, y0, y1] = self.bbox;
        let a = self.map.apply(x, y0);
        let b = self.map.apply(x, y1);
        (a.min(b), a.max(b))
    }

    /// Largest possible density value on the box, used by the rejection sampler.
    fn plane_density_max(&self) -> f64 {
        let [x0, x1, y0, y1] = self.bbox;
        let nearest = |lo: f64, hi: f64| if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
        self.plane_density(nearest(x0, x1), nearest(y0, y1))
    }

    /// Integrates `g` over the part of the (target) measure selected by `region`.
    ///
    /// `region(x)` gives the admissible target y-values at abscissa `x`;
    /// `breaks(x)` lists extra y-values where `g` is discontinuous.
    pub fn integrate(
        &self,
        region: &dyn Fn(f64) -> IntervalSet,
        breaks: &dyn Fn(f64) -> Vec<f64>,
        g: &dyn Fn(f64, f64) -> f64,
    ) -> Result<Integral> {
        if self.is_line() {
            self.integrate_line(region, breaks, g)
        } else {
            self.integrate_plane(region, breaks, g)
        }
    }

    fn source_pieces(&self, x: f64, region: &IntervalSet, breaks: &[f64]) -> Vec<(f64, f64)> {
        let [_, _, y0, y1] = self.bbox;
        let YMap { a, c } = self.map;
        let shift = if c == 0.0 { 0.0 } else { c * (-x).exp_m1() };
        let to_source = |t: f64| (t - shift) / a;
        let mut cuts: Vec<f64> = breaks
            .iter()
            .map(|&b| to_source(b))
            .filter(|s| *s > y0 && *s < y1)
            .collect();
        if self.is_line() && y0 < 0.0 && y1 > 0.0 {
            cuts.push(0.0);
        }
        cuts.sort_by(f64::total_cmp);
        let mut pieces = Vec::new();
        for part in region.parts() {
            let (mut lo, mut hi) = (to_source(part.lo), to_source(part.hi));
            if lo > hi {
                std::mem::swap(&mut lo, &mut hi);
            }
            let lo = lo.max(y0);
            let hi = hi.min(y1);
            if lo >= hi {
                continue;
            }
            let mut start = lo;
            for &cut in cuts.iter().filter(|&&c| c > lo && c < hi) {
                pieces.push((start, cut));
                start = cut;
            }
            pieces.push((start, hi));
        }
        pieces
    }

    fn integrate_plane(
        &self,
        region: &dyn Fn(f64) -> IntervalSet,
        breaks: &dyn Fn(f64) -> Vec<f64>,
        g: &dyn Fn(f64, f64) -> f64,
    ) -> Result<Integral> {
        let [x0, x1, _, _] = self.bbox;
        let YMap { a, c } = self.map;
        let cfg = self.quad_config();
        let inner_cfg = QuadConfig::new(self.tol / (4.0 * (x1 - x0).max(1.0)));
        let failure: RefCell<Option<GouError>> = RefCell::new(None);
        let inner = |x: f64| -> f64 {
            let set = region(x);
            if set.is_empty() {
                return 0.0;
            }
            if a == 0.0 {
                let yt = self.map.apply(x, 0.0);
                if x == 0.0 && yt == 0.0 {
                    return 0.0;
                }
                if set.contains(yt) {
                    return g(x, yt) * self.plane_y_marginal(x);
                }
                return 0.0;
            }
            let shift = if c == 0.0 { 0.0 } else { c * (-x).exp_m1() };
            let mut total = 0.0;
            for (lo, hi) in self.source_pieces(x, &set, &breaks(x)) {
                let f = |y: f64| self.plane_density(x, y) * g(x, a * y + shift);
                match quadrature::integrate(f, lo, hi, inner_cfg) {
                    Ok(q) => total += q.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                    }
                }
            }
            total
        };
        let mut cuts = vec![x0];
        for b in [-1.0, 0.0, 1.0] {
            if b > x0 && b < x1 {
                cuts.push(b);
            }
        }
        cuts.push(x1);
        let mut sum = Quad::ZERO;
        for win in cuts.windows(2) {
            sum = sum + quadrature::integrate(inner, win[0], win[1], cfg)?;
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        if sum.abs_err > self.tol.max(1e-13 * sum.value.abs()) {
            return Err(GouError::undetermined("density integral above tolerance", sum.abs_err));
        }
        Ok(Integral::finite(sum.value, sum.abs_err))
    }

    fn integrate_line(
        &self,
        region: &dyn Fn(f64) -> IntervalSet,
        breaks: &dyn Fn(f64) -> Vec<f64>,
        g: &dyn Fn(f64, f64) -> f64,
    ) -> Result<Integral> {
        let a = self.map.a;
        if a == 0.0 {
            // Every jump maps to the origin, which carries no mass.
            return Ok(Integral::ZERO);
        }
        let set = region(0.0);
        let cfg = self.quad_config();
        let mut total = Integral::ZERO;
        for (lo, hi) in self.source_pieces(0.0, &set, &breaks(0.0)) {
            let f = |y: f64| self.line_density(y) * g(0.0, a * y);
            let part = if lo == 0.0 {
                improper_to_integral(quadrature::integrate_from_zero(f, hi, cfg)?)
            } else if hi == 0.0 {
                improper_to_integral(quadrature::integrate_from_zero(|t| f(-t), -lo, cfg)?)
            } else {
                let q = quadrature::integrate(f, lo, hi, cfg)?;
                Integral::finite(q.value, q.abs_err)
            };
            total = total.checked_add(part)?;
        }
        Ok(total)
    }

    /// Rejection sampler for target jumps with Euclidean norm at least `eps`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R, eps: f64) -> Result<(f64, f64)> {
        let [x0, x1, y0, y1] = self.bbox;
        const MAX_TRIES: usize = 1_000_000;
        match self.family {
            DensityFamily::EtaPower { alpha, .. } => {
                let a = self.map.a.abs();
                let cut = eps / a;
                // Candidate pieces of |y| >= cut on each side of zero.
                let mut pieces = Vec::new();
                if y1 > 0.0 && y1 > cut.max(y0) {
                    pieces.push((cut.max(y0), y1, 1.0));
                }
                if y0 < 0.0 && -y0 > cut.max(-y1) {
                    pieces.push((cut.max(-y1), -y0, -1.0));
                }
                let masses: Vec<f64> = pieces.iter().map(|&(l, h, _)| power_mass(alpha, l, h)).collect();
                let total: f64 = masses.iter().sum();
                if pieces.is_empty() || total <= 0.0 {
                    return Err(GouError::Precondition("no jumps above the truncation level".into()));
                }
                let mut pick = rng.random::<f64>() * total;
                let mut idx = 0;
                while idx + 1 < masses.len() && pick > masses[idx] {
                    pick -= masses[idx];
                    idx += 1;
                }
                let (l, h, sign) = pieces[idx];
                let mag = power_inverse_cdf(alpha, l, h, rng.random::<f64>());
                Ok((0.0, self.map.a * sign * mag))
            }
            _ => {
                let fmax = self.plane_density_max();
                for _ in 0..MAX_TRIES {
                    let x = x0 + (x1 - x0) * rng.random::<f64>();
                    let y = y0 + (y1 - y0) * rng.random::<f64>();
                    if rng.random::<f64>() * fmax > self.plane_density(x, y) {
                        continue;
                    }
                    let yt = self.map.apply(x, y);
                    if x * x + yt * yt >= eps * eps {
                        return Ok((x, yt));
                    }
                }
                Err(GouError::undetermined("rejection sampler exhausted", MAX_TRIES as f64))
            }
        }
    }
}

fn improper_to_integral(r: Improper) -> Integral {
    match r {
        Improper::Finite(q) => Integral::finite(q.value, q.abs_err),
        Improper::Divergent { sign } => Integral {
            value: if sign >= 0.0 {
                ExtendedReal::PosInf
            } else {
                ExtendedReal::NegInf
            },
            abs_err: 0.0,
        },
    }
}

/// `∫_{y0}^{y1} e^{-r|y|} dy`.
fn exp_abs_integral(r: f64, y0: f64, y1: f64) -> f64 {
    let prim = |y: f64| {
        if r == 0.0 {
            y
        } else {
            y.signum() * (-(-r * y.abs()).exp_m1()) / r
        }
    };
    prim(y1) - prim(y0)
}

/// `∫_l^h t^{-alpha} dt` for `0 < l < h`.
fn power_mass(alpha: f64, l: f64, h: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        (h / l).ln()
    } else {
        (h.powf(1.0 - alpha) - l.powf(1.0 - alpha)) / (1.0 - alpha)
    }
}

fn power_inverse_cdf(alpha: f64, l: f64, h: f64, u: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        l * (h / l).powf(u)
    } else {
        let p = 1.0 - alpha;
        (l.powf(p) + u * (h.powf(p) - l.powf(p))).powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn all(_: f64) -> IntervalSet {
        IntervalSet::everything()
    }
    fn none(_: f64) -> Vec<f64> {
        Vec::new()
    }

    #[test]
    fn uniform_box_total_mass_and_first_moment() {
        let d = DensitySpec::new(DensityFamily::UniformBox { mass: 2.0 }, [0.5, 1.5, -1.0, 3.0], 1e-10).unwrap();
        let m = d.integrate(&all, &none, &|_, _| 1.0).unwrap();
        assert!((m.value.to_f64() - 2.0).abs() < 1e-9);
        let mx = d.integrate(&all, &none, &|x, _| x).unwrap();
        assert!((mx.value.to_f64() - 2.0).abs() < 1e-9);
        let my = d.integrate(&all, &none, &|_, y| y).unwrap();
        assert!((my.value.to_f64() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn half_plane_region_mass() {
        // Mass of {y < 0} for a uniform box on [0,1]x[-1,1] is half the total.
        let d = DensitySpec::new(DensityFamily::UniformBox { mass: 1.0 }, [0.0, 1.0, -1.0, 1.0], 1e-10).unwrap();
        let neg = |_: f64| IntervalSet::from_interval(Interval::open(f64::NEG_INFINITY, 0.0));
        let m = d.integrate(&neg, &none, &|_, _| 1.0).unwrap();
        assert!((m.value.to_f64() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn exp_tails_mass_matches_closed_form() {
        let d = DensitySpec::new(
            DensityFamily::ExpTails { scale: 1.5, rate_x: 2.0, rate_y: 1.0 },
            [-1.0, 1.0, -2.0, 2.0],
            1e-10,
        )
        .unwrap();
        let m = d.integrate(&all, &none, &|_, _| 1.0).unwrap().value.to_f64();
        let exact = 1.5 * exp_abs_integral(2.0, -1.0, 1.0) * exp_abs_integral(1.0, -2.0, 2.0);
        assert!((m - exact).abs() < 1e-9, "{m} vs {exact}");
    }

    #[test]
    fn eta_power_divergence_matches_analytic() {
        // ∫_0^1 y · y^{-2} dy diverges; ∫_0^1 y² · y^{-2} dy = 1.
        let d = DensitySpec::new(DensityFamily::EtaPower { scale: 1.0, alpha: 2.0 }, [0.0, 0.0, 0.0, 1.0], 1e-10).unwrap();
        let first = d.integrate(&all, &none, &|_, y| y).unwrap();
        assert_eq!(first.value, ExtendedReal::PosInf);
        let second = d.integrate(&all, &none, &|_, y| y * y).unwrap();
        assert!((second.value.to_f64() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pushforward_to_w_curve_collapses_y() {
        let d = DensitySpec::new(DensityFamily::UniformBox { mass: 1.0 }, [0.0, 1.0, -1.0, 1.0], 1e-10).unwrap();
        let w = d.with_map(YMap { a: 0.0, c: 1.0 });
        // ∫ (e^{-x} - 1) dx over [0,1] with unit mass.
        let got = w.integrate(&all, &none, &|_, y| y).unwrap().value.to_f64();
        let exact = (1.0 - (-1.0f64).exp()) - 1.0;
        assert!((got - exact).abs() < 1e-9, "{got} vs {exact}");
    }

    #[test]
    fn json_shape() {
        let d = DensitySpec::new(DensityFamily::UniformBox { mass: 1.0 }, [0.0, 1.0, -1.0, 1.0], 1e-8).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["kind"], "uniform_box");
        assert_eq!(v["params"]["mass"], 1.0);
        assert_eq!(v["box"][3], 1.0);
        let back: DensitySpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
