//! Unions of real intervals with explicit endpoint closedness.

use serde::{Deserialize, Serialize};

use crate::extended::ExtendedReal;

/// An interval of the real line. Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn point(x: f64) -> Self {
        Interval::closed(x, x)
    }

    pub fn everything() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > o.lo {
            (self.lo, self.lo_closed)
        } else if o.lo > self.lo {
            (o.lo, o.lo_closed)
        } else {
            (self.lo, self.lo_closed && o.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < o.hi {
            (self.hi, self.hi_closed)
        } else if o.hi < self.hi {
            (o.hi, o.hi_closed)
        } else {
            (self.hi, self.hi_closed && o.hi_closed)
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    pub fn is_closed(&self) -> bool {
        (self.lo_closed || self.lo == f64::NEG_INFINITY) && (self.hi_closed || self.hi == f64::INFINITY)
    }

    /// The topological closure.
    pub fn closure(&self) -> Interval {
        Interval::new(self.lo, self.hi, true, true)
    }
}

/// A finite union of disjoint intervals kept in increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalSet::from_parts(vec![iv])
    }

    pub fn everything() -> Self {
        IntervalSet::from_interval(Interval::everything())
    }

    /// Builds a normalised set from arbitrary (possibly overlapping) parts.
    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.retain(|p| !p.is_empty());
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            if let Some(last) = merged.last_mut() {
                let touches = p.lo < last.hi || (p.lo == last.hi && (p.lo_closed || last.hi_closed));
                if touches {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    } else if p.hi == last.hi {
                        last.hi_closed |= p.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(p);
        }
        IntervalSet { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn intersect(&self, o: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &o.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        IntervalSet::from_parts(out)
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalSet {
        self.intersect(&IntervalSet::from_interval(*iv))
    }

    pub fn union(&self, o: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&o.parts);
        IntervalSet::from_parts(parts)
    }

    pub fn sup(&self) -> Option<f64> {
        self.parts.last().map(|p| p.hi)
    }

    pub fn inf(&self) -> Option<f64> {
        self.parts.first().map(|p| p.lo)
    }

    pub fn is_closed(&self) -> bool {
        self.parts.iter().all(Interval::is_closed)
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().map(Interval::closure).collect())
    }
}

/// Serialised form of a closed interval `[lo, hi]` with possibly infinite ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedInterval {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
}

impl From<&Interval> for ClosedInterval {
    fn from(iv: &Interval) -> Self {
        ClosedInterval {
            lo: ExtendedReal::new(iv.lo),
            hi: ExtendedReal::new(iv.hi),
        }
    }
}
