//! A small language of planar regions used to integrate against Lévy measures.
//!
//! Each condition can be evaluated at a single point (atom tier) or turned into
//! the set of admissible `y` at a fixed `x` (density tier).

use crate::interval::{Interval, IntervalSet};

use super::s_jump;

/// Relation of a quantity to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Rel::Lt => v < 0.0,
            Rel::Le => v <= 0.0,
            Rel::Gt => v > 0.0,
            Rel::Ge => v >= 0.0,
        }
    }

    /// `{t : t - shift ⋈ 0}`.
    fn set(self, shift: f64) -> Interval {
        let (n, p) = (f64::NEG_INFINITY, f64::INFINITY);
        match self {
            Rel::Lt => Interval::new(n, shift, false, false),
            Rel::Le => Interval::new(n, shift, false, true),
            Rel::Gt => Interval::new(shift, p, false, false),
            Rel::Ge => Interval::new(shift, p, true, false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cond {
    X(Rel),
    Y(Rel),
    XAbsLt1,
    YAbsLt1,
    /// `x² + (y/k)² < 1` when `inside`, its complement otherwise.
    Disk { k: f64, inside: bool },
    /// `x² + y² < r²` when `inside`, its complement otherwise.
    Ball { r: f64, inside: bool },
    /// `x² + (e^{-x} - 1)² < 1` when `inside`, its complement otherwise.
    WDisk { inside: bool },
    /// `y - u (e^{-x} - 1) ⋈ 0`.
    S { u: f64, rel: Rel },
    /// `|y - u (e^{-x} - 1)| < 1` when `inside`, its complement otherwise.
    SAbsLt1 { u: f64, inside: bool },
}

impl Cond {
    pub const DISK: Cond = Cond::Disk { k: 1.0, inside: true };
    pub const NOT_DISK: Cond = Cond::Disk { k: 1.0, inside: false };

    pub fn holds(&self, x: f64, y: f64) -> bool {
        match *self {
            Cond::X(r) => r.holds(x),
            Cond::Y(r) => r.holds(y),
            Cond::XAbsLt1 => x.abs() < 1.0,
            Cond::YAbsLt1 => y.abs() < 1.0,
            Cond::Disk { k, inside } => {
                let yk = y / k;
                (x * x + yk * yk < 1.0) == inside
            }
            Cond::Ball { r, inside } => (x * x + y * y < r * r) == inside,
            Cond::WDisk { inside } => in_w_disk(x) == inside,
            Cond::S { u, rel } => rel.holds(s_jump(x, y, u)),
            Cond::SAbsLt1 { u, inside } => (s_jump(x, y, u).abs() < 1.0) == inside,
        }
    }

    fn y_set(&self, x: f64) -> IntervalSet {
        let all = IntervalSet::everything;
        let none = IntervalSet::empty;
        match *self {
            Cond::X(r) => {
                if r.holds(x) {
                    all()
                } else {
                    none()
                }
            }
            Cond::XAbsLt1 => {
                if x.abs() < 1.0 {
                    all()
                } else {
                    none()
                }
            }
            Cond::WDisk { inside } => {
                if in_w_disk(x) == inside {
                    all()
                } else {
                    none()
                }
            }
            Cond::Y(r) => IntervalSet::from_interval(r.set(0.0)),
            Cond::YAbsLt1 => IntervalSet::from_interval(Interval::open(-1.0, 1.0)),
            Cond::Disk { k, inside } => disk_y_set(k.abs() * (1.0 - x * x).max(0.0).sqrt(), 1.0 - x * x > 0.0, inside),
            Cond::Ball { r, inside } => disk_y_set((r * r - x * x).max(0.0).sqrt(), r * r - x * x > 0.0, inside),
            Cond::S { u, rel } => IntervalSet::from_interval(rel.set(u * (-x).exp_m1())),
            Cond::SAbsLt1 { u, inside } => {
                let c = u * (-x).exp_m1();
                if inside {
                    IntervalSet::from_interval(Interval::open(c - 1.0, c + 1.0))
                } else {
                    IntervalSet::from_parts(vec![
                        Interval::new(f64::NEG_INFINITY, c - 1.0, false, true),
                        Interval::new(c + 1.0, f64::INFINITY, true, false),
                    ])
                }
            }
        }
    }
}

/// `y`-section of an origin-centred ellipse of half-height `r` at a fixed `x`.
fn disk_y_set(r: f64, hit: bool, inside: bool) -> IntervalSet {
    match (hit, inside) {
        (false, true) => IntervalSet::empty(),
        (false, false) => IntervalSet::everything(),
        (true, true) => IntervalSet::from_interval(Interval::open(-r, r)),
        (true, false) => IntervalSet::from_parts(vec![
            Interval::new(f64::NEG_INFINITY, -r, false, true),
            Interval::new(r, f64::INFINITY, true, false),
        ]),
    }
}

pub(crate) fn in_w_disk(x: f64) -> bool {
    let w = (-x).exp_m1();
    x * x + w * w < 1.0
}

/// Admissible `y` at abscissa `x` for a conjunction of conditions.
pub(crate) fn y_set(region: &[Cond], x: f64) -> IntervalSet {
    let mut set = IntervalSet::everything();
    for c in region {
        set = set.intersect(&c.y_set(x));
        if set.is_empty() {
            break;
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_and_point_forms_agree() {
        let conds = [
            Cond::X(Rel::Gt),
            Cond::Y(Rel::Le),
            Cond::DISK,
            Cond::NOT_DISK,
            Cond::WDisk { inside: true },
            Cond::S { u: 1.3, rel: Rel::Lt },
            Cond::S { u: -0.4, rel: Rel::Ge },
            Cond::SAbsLt1 { u: 2.0, inside: true },
            Cond::SAbsLt1 { u: -1.0, inside: false },
            Cond::Disk { k: 3.0, inside: true },
            Cond::Ball { r: 0.3, inside: false },
            Cond::Ball { r: 1.7, inside: true },
        ];
        let mut k = 0u64;
        for i in -20..=20 {
            for j in -20..=20 {
                // Off-lattice points so no sample lands on a boundary.
                k += 1;
                let x = i as f64 * 0.093 + 1e-3 * (k % 7) as f64;
                let y = j as f64 * 0.11 + 1e-3 * (k % 5) as f64;
                for c in &conds {
                    assert_eq!(c.holds(x, y), c.y_set(x).contains(y), "{c:?} at ({x}, {y})");
                }
            }
        }
    }
}
