//! Boxes over named attribute lines and unions of boxes.
//!
//! An atom `x=b` is the half-line `(-inf, b]`, its complement `(b, +inf)`.
//! A conjunction of literals is therefore a product of half-open intervals
//! `(lo, hi]`, and any expression is a finite union of such boxes.

use std::collections::BTreeMap;

use crate::expr::{AttributeId, Level};

/// `(lo, hi]` with `None` standing for the infinite end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Interval {
    pub lo: Option<Level>,
    pub hi: Option<Level>,
}

/// `lo <= hi` where a missing `lo` is -inf and a missing `hi` is +inf.
fn lo_le_hi(lo: Option<Level>, hi: Option<Level>) -> bool {
    match (lo, hi) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    }
}

/// Larger of two lower bounds (`None` is -inf).
fn max_lo(a: Option<Level>, b: Option<Level>) -> Option<Level> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Smaller of two upper bounds (`None` is +inf).
fn min_hi(a: Option<Level>, b: Option<Level>) -> Option<Level> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Smaller of two lower bounds, or larger of two upper bounds: the
/// infinite end wins.
fn outer(a: Option<Level>, b: Option<Level>, pick: fn(Level, Level) -> Level) -> Option<Level> {
    Some(pick(a?, b?))
}

impl Interval {
    pub const FULL: Interval = Interval { lo: None, hi: None };

    pub fn at_most(level: Level) -> Self {
        Interval {
            lo: None,
            hi: Some(level),
        }
    }

    pub fn greater_than(level: Level) -> Self {
        Interval {
            lo: Some(level),
            hi: None,
        }
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn is_empty(&self) -> bool {
        matches!((self.lo, self.hi), (Some(l), Some(h)) if l >= h)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: max_lo(self.lo, other.lo),
            hi: min_hi(self.hi, other.hi),
        }
    }

    /// The union, when it is itself an interval (overlapping or adjacent).
    pub fn union(&self, other: &Interval) -> Option<Interval> {
        if lo_le_hi(self.lo, other.hi) && lo_le_hi(other.lo, self.hi) {
            Some(Interval {
                lo: outer(self.lo, other.lo, Level::min),
                hi: outer(self.hi, other.hi, Level::max),
            })
        } else {
            None
        }
    }

    pub fn contains(&self, other: &Interval) -> bool {
        let lo_ok = match (self.lo, other.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let hi_ok = match (self.hi, other.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        lo_ok && hi_ok
    }
}

/// A nonempty box. Attributes without an entry are unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Term(BTreeMap<AttributeId, Interval>);

impl Term {
    pub fn single(attribute: &AttributeId, interval: Interval) -> Self {
        let mut map = BTreeMap::new();
        if !interval.is_full() {
            map.insert(attribute.clone(), interval);
        }
        Term(map)
    }

    pub fn intervals(&self) -> impl Iterator<Item = (&AttributeId, &Interval)> {
        self.0.iter()
    }

    pub fn get(&self, attribute: &AttributeId) -> Interval {
        self.0.get(attribute).copied().unwrap_or(Interval::FULL)
    }

    pub fn intersect(&self, other: &Term) -> Option<Term> {
        let mut out = self.0.clone();
        for (attr, iv) in &other.0 {
            let merged = match out.get(attr) {
                Some(mine) => mine.intersect(iv),
                None => *iv,
            };
            if merged.is_empty() {
                return None;
            }
            out.insert(attr.clone(), merged);
        }
        Some(Term(out))
    }

    /// `self ⊇ other`.
    pub fn subsumes(&self, other: &Term) -> bool {
        self.0
            .iter()
            .all(|(attr, iv)| iv.contains(&other.get(attr)))
    }

    /// Consensus on `attribute`: the union of both intervals on that
    /// attribute times the intersection on all others. The result always
    /// lies inside `self ∪ other`.
    fn consensus(&self, other: &Term, attribute: &AttributeId) -> Option<Term> {
        let joined = self.get(attribute).union(&other.get(attribute))?;
        let mut rest_a = self.clone();
        rest_a.0.remove(attribute);
        let mut rest_b = other.clone();
        rest_b.0.remove(attribute);
        let mut out = rest_a.intersect(&rest_b)?;
        if !joined.is_full() {
            out.0.insert(attribute.clone(), joined);
        }
        Some(out)
    }
}

/// A union of boxes, kept free of duplicates and of boxes contained in
/// other boxes, in sorted order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub(crate) struct Dnf(Vec<Term>);

impl Dnf {
    pub fn bottom() -> Self {
        Dnf(Vec::new())
    }

    pub fn top() -> Self {
        Dnf(vec![Term::default()])
    }

    pub fn literal(attribute: &AttributeId, interval: Interval) -> Self {
        Dnf(vec![Term::single(attribute, interval)])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut d = Dnf(terms);
        d.absorb();
        d
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_bottom(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(mut self, other: Dnf) -> Dnf {
        self.0.extend(other.0);
        self.absorb();
        self
    }

    pub fn intersect(&self, other: &Dnf) -> Dnf {
        let terms = self
            .0
            .iter()
            .flat_map(|a| other.0.iter().filter_map(move |b| a.intersect(b)))
            .collect();
        Dnf::from_terms(terms)
    }

    fn absorb(&mut self) {
        self.0.sort();
        self.0.dedup();
        let terms = std::mem::take(&mut self.0);
        let kept: Vec<Term> = terms
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                !terms
                    .iter()
                    .enumerate()
                    .any(|(j, u)| j != *i && u.subsumes(t))
            })
            .map(|(_, t)| t.clone())
            .collect();
        self.0 = kept;
    }

    /// Add consensus terms until no new box appears, then drop absorbed
    /// boxes. The surviving terms are exactly the maximal boxes of the
    /// union.
    pub fn close_under_consensus(&mut self) {
        loop {
            let mut added = Vec::new();
            for i in 0..self.0.len() {
                for j in (i + 1)..self.0.len() {
                    let (a, b) = (&self.0[i], &self.0[j]);
                    let mut attrs: Vec<&AttributeId> = a.0.keys().chain(b.0.keys()).collect();
                    attrs.sort();
                    attrs.dedup();
                    for attr in attrs {
                        let Some(c) = a.consensus(b, attr) else {
                            continue;
                        };
                        let known = self.0.iter().chain(added.iter()).any(|t| t.subsumes(&c));
                        if !known {
                            added.push(c);
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            self.0.extend(added);
            self.absorb();
        }
    }
}
