//! Preference expressions: atoms `x=b` (the domain of prospects between the
//! attribute minimum and level `b`), combined with conjunction (domain
//! intersection), disjunction (domain union) and complement.
//!
//! [`simplify`] maps every expression to a canonical representative: a
//! disjunction of conjunctive terms in which every term is a maximal box of
//! the expression's domain. Two expressions with the same domain over the
//! real-valued attribute lines therefore simplify to structurally identical
//! trees, which is what [`canonical_equal`] compares.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::boxes::{Dnf, Interval, Term};

/// Name of an attribute. Expressions refer to attributes by name; an
/// [`AttributeSpace`](crate::domain::AttributeSpace) assigns positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeId(Arc<str>);

impl AttributeId {
    /// Panics if `name` is empty.
    pub fn new(name: &str) -> Self {
        assert!(!name.is_empty(), "attribute name must be nonempty");
        AttributeId(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AttributeId {
    fn from(s: &str) -> Self {
        AttributeId::new(s)
    }
}

/// A finite attribute level with a total order and exact equality.
#[derive(Clone, Copy)]
pub struct Level(f64);

impl Level {
    /// Panics on NaN or infinite values. `-0.0` is stored as `0.0`.
    pub fn new(value: f64) -> Self {
        assert!(
            value.is_finite(),
            "attribute level must be finite, got {value}"
        );
        Level(if value == 0.0 { 0.0 } else { value })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Level {}

impl Hash for Level {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state);
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Level {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `attribute = level`: the lower interval of prospects up to `level`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub attribute: AttributeId,
    pub level: Level,
}

impl Atom {
    pub fn new(attribute: impl Into<AttributeId>, level: f64) -> Self {
        Atom {
            attribute: attribute.into(),
            level: Level::new(level),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PreferenceExpr {
    Atom(Atom),
    Complement(Box<PreferenceExpr>),
    Conjunction(Vec<PreferenceExpr>),
    Disjunction(Vec<PreferenceExpr>),
    /// The full domain, `x=b ∨ ~x=b`.
    Top,
    /// The empty domain, `x=b · ~x=b`.
    Bottom,
}

impl PreferenceExpr {
    pub fn atom(attribute: &str, level: f64) -> Self {
        PreferenceExpr::Atom(Atom::new(attribute, level))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: PreferenceExpr) -> Self {
        PreferenceExpr::Complement(Box::new(e))
    }

    pub fn and(children: impl IntoIterator<Item = PreferenceExpr>) -> Self {
        PreferenceExpr::Conjunction(children.into_iter().collect())
    }

    pub fn or(children: impl IntoIterator<Item = PreferenceExpr>) -> Self {
        PreferenceExpr::Disjunction(children.into_iter().collect())
    }

    /// Every atom in the tree, in left-to-right order.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            PreferenceExpr::Atom(a) => out.push(a),
            PreferenceExpr::Complement(c) => c.collect_atoms(out),
            PreferenceExpr::Conjunction(cs) | PreferenceExpr::Disjunction(cs) => {
                cs.iter().for_each(|c| c.collect_atoms(out))
            }
            PreferenceExpr::Top | PreferenceExpr::Bottom => {}
        }
    }

    pub fn literal_count(&self) -> usize {
        self.atoms().len()
    }

    pub fn depth(&self) -> usize {
        match self {
            PreferenceExpr::Atom(_) | PreferenceExpr::Top | PreferenceExpr::Bottom => 1,
            PreferenceExpr::Complement(c) => 1 + c.depth(),
            PreferenceExpr::Conjunction(cs) | PreferenceExpr::Disjunction(cs) => {
                1 + cs.iter().map(PreferenceExpr::depth).max().unwrap_or(0)
            }
        }
    }

    /// Sort key: the (attribute, level, kind) triples of the literals in
    /// order, kind 0 for a positive literal and 1 for a complemented one.
    fn literal_keys(&self) -> Vec<(&AttributeId, Level, u8)> {
        let mut keys = Vec::new();
        self.push_keys(&mut keys);
        keys
    }

    fn push_keys<'a>(&'a self, keys: &mut Vec<(&'a AttributeId, Level, u8)>) {
        match self {
            PreferenceExpr::Atom(a) => keys.push((&a.attribute, a.level, 0)),
            PreferenceExpr::Complement(c) => match c.as_ref() {
                PreferenceExpr::Atom(a) => keys.push((&a.attribute, a.level, 1)),
                other => other.push_keys(keys),
            },
            PreferenceExpr::Conjunction(cs) | PreferenceExpr::Disjunction(cs) => {
                cs.iter().for_each(|c| c.push_keys(keys))
            }
            PreferenceExpr::Top | PreferenceExpr::Bottom => {}
        }
    }
}

impl fmt::Display for PreferenceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::format(self))
    }
}

/// Push complements down to the atoms with De Morgan's laws and remove
/// double complements. Structure is otherwise preserved.
pub fn to_nnf(e: &PreferenceExpr) -> PreferenceExpr {
    use PreferenceExpr::*;
    match e {
        Atom(_) | Top | Bottom => e.clone(),
        Conjunction(cs) => Conjunction(cs.iter().map(to_nnf).collect()),
        Disjunction(cs) => Disjunction(cs.iter().map(to_nnf).collect()),
        Complement(inner) => match inner.as_ref() {
            Atom(_) => e.clone(),
            Top => Bottom,
            Bottom => Top,
            Complement(x) => to_nnf(x),
            Conjunction(cs) => Disjunction(cs.iter().map(|c| to_nnf(&negate(c))).collect()),
            Disjunction(cs) => Conjunction(cs.iter().map(|c| to_nnf(&negate(c))).collect()),
        },
    }
}

fn negate(e: &PreferenceExpr) -> PreferenceExpr {
    PreferenceExpr::Complement(Box::new(e.clone()))
}

/// Canonical form: negation normal form, distributed to a disjunction of
/// conjunctive terms, same-attribute literals merged, absorbed terms
/// removed, and closed under consensus so that each remaining term is a
/// maximal box of the domain. Children are sorted by (attribute, level,
/// kind).
pub fn simplify(e: &PreferenceExpr) -> PreferenceExpr {
    normal_form(e).to_expr()
}

/// Structural comparison of canonical forms.
pub fn canonical_equal(a: &PreferenceExpr, b: &PreferenceExpr) -> bool {
    simplify(a) == simplify(b)
}

pub(crate) fn normal_form(e: &PreferenceExpr) -> Dnf {
    let mut dnf = dnf_of(&to_nnf(e));
    dnf.close_under_consensus();
    dnf
}

fn dnf_of(e: &PreferenceExpr) -> Dnf {
    use PreferenceExpr::*;
    match e {
        Atom(a) => Dnf::literal(&a.attribute, Interval::at_most(a.level)),
        Complement(inner) => match inner.as_ref() {
            Atom(a) => Dnf::literal(&a.attribute, Interval::greater_than(a.level)),
            other => dnf_of(&to_nnf(&negate(other))),
        },
        Top => Dnf::top(),
        Bottom => Dnf::bottom(),
        Disjunction(cs) => {
            let mut acc = Dnf::bottom();
            for c in cs {
                acc = acc.union(dnf_of(c));
            }
            acc
        }
        Conjunction(cs) => {
            let mut acc = Dnf::top();
            for c in cs {
                if acc.is_bottom() {
                    break;
                }
                acc = acc.intersect(&dnf_of(c));
            }
            acc
        }
    }
}

impl Dnf {
    pub(crate) fn to_expr(&self) -> PreferenceExpr {
        let mut terms: Vec<PreferenceExpr> = self.terms().iter().map(term_to_expr).collect();
        match terms.len() {
            0 => PreferenceExpr::Bottom,
            1 => terms.pop().unwrap(),
            _ => {
                terms.sort_by(|a, b| a.literal_keys().cmp(&b.literal_keys()));
                PreferenceExpr::Disjunction(terms)
            }
        }
    }
}

fn term_to_expr(term: &Term) -> PreferenceExpr {
    let mut literals = Vec::new();
    // BTreeMap iteration is already in attribute order; within an attribute
    // the lower bound is strictly smaller than the upper bound.
    for (attribute, interval) in term.intervals() {
        if let Some(lo) = interval.lo {
            literals.push(PreferenceExpr::Complement(Box::new(PreferenceExpr::Atom(
                Atom {
                    attribute: attribute.clone(),
                    level: lo,
                },
            ))));
        }
        if let Some(hi) = interval.hi {
            literals.push(PreferenceExpr::Atom(Atom {
                attribute: attribute.clone(),
                level: hi,
            }));
        }
    }
    match literals.len() {
        0 => PreferenceExpr::Top,
        1 => literals.pop().unwrap(),
        _ => PreferenceExpr::Conjunction(literals),
    }
}
