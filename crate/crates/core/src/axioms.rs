//! Numerical checks of candidate combination rules against the
//! associativity and complementarity equations.
//!
//! These verify given functions; they do not search for solutions.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::engine::{Evaluator, UtilityModel};
use crate::error::Result;
use crate::expr::PreferenceExpr;

/// Candidate conjunction rule `F(u, v)` on the unit square.
pub struct BinaryCombiner {
    pub name: String,
    f: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl BinaryCombiner {
    pub fn new(name: &str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        BinaryCombiner {
            name: name.to_string(),
            f: Box::new(f),
        }
    }

    pub fn product() -> Self {
        Self::new("product", |x, y| x * y)
    }

    /// `x + y - xy`, the disjunction of independent utilities.
    pub fn probabilistic_sum() -> Self {
        Self::new("probabilistic sum", |x, y| x + y - x * y)
    }

    pub fn mean() -> Self {
        Self::new("arithmetic mean", |x, y| (x + y) / 2.0)
    }

    pub fn apply(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }
}

/// Candidate complement regrade `S(u)` on the unit interval.
pub struct UnaryRegrade {
    pub name: String,
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl UnaryRegrade {
    pub fn new(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        UnaryRegrade {
            name: name.to_string(),
            f: Box::new(f),
        }
    }

    pub fn complement() -> Self {
        Self::new("1 - u", |u| 1.0 - u)
    }

    pub fn identity() -> Self {
        Self::new("u", |u| u)
    }

    pub fn reciprocal() -> Self {
        Self::new("1 / u", |u| 1.0 / u)
    }

    pub fn apply(&self, u: f64) -> f64 {
        (self.f)(u)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssociativityViolation {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// `F(x, F(y, z))`
    pub right_nested: f64,
    /// `F(F(x, y), z)`
    pub left_nested: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssociativityReport {
    pub passed: bool,
    pub samples: usize,
    pub max_deviation: f64,
    /// Lexicographically smallest violating triple.
    pub counterexample: Option<AssociativityViolation>,
}

/// Checks `F(x, F(y, z)) = F(F(x, y), z)` at the eight corners of the unit
/// cube and at `trials` uniform random triples.
pub fn check_associativity(
    f: &BinaryCombiner,
    trials: usize,
    tol: f64,
    seed: u64,
) -> AssociativityReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let corners = (0..8u8).map(|b| {
        let bit = |k: u8| f64::from((b >> k) & 1);
        (bit(2), bit(1), bit(0))
    });
    let random = (0..trials).map(|_| (rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()));
    let triples: Vec<(f64, f64, f64)> = corners.chain(random).collect();

    let mut max_deviation: f64 = 0.0;
    let mut counterexample: Option<AssociativityViolation> = None;
    for &(x, y, z) in &triples {
        let right_nested = f.apply(x, f.apply(y, z));
        let left_nested = f.apply(f.apply(x, y), z);
        let deviation = (right_nested - left_nested).abs();
        let deviation = if deviation.is_nan() {
            f64::INFINITY
        } else {
            deviation
        };
        max_deviation = max_deviation.max(deviation);
        let violated = deviation > tol;
        if violated {
            let candidate = AssociativityViolation {
                x,
                y,
                z,
                right_nested,
                left_nested,
            };
            let smaller = counterexample.is_none_or(|c| {
                (x.total_cmp(&c.x))
                    .then(y.total_cmp(&c.y))
                    .then(z.total_cmp(&c.z))
                    .is_lt()
            });
            if smaller {
                counterexample = Some(candidate);
            }
        }
    }
    AssociativityReport {
        passed: counterexample.is_none(),
        samples: triples.len(),
        max_deviation,
        counterexample,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NotMonotone,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplementarityReport {
    pub passed: bool,
    pub samples: usize,
    /// `(u, S(u))` pairs with `S(u)` outside `[0, 1]`.
    pub range_violations: Vec<(f64, f64)>,
    pub monotonicity: Monotonicity,
    pub max_involution_error: f64,
    pub involution_counterexample: Option<f64>,
    /// `S(u) = u` on every sample: complement and utility coincide.
    pub trivial: bool,
}

/// Checks that `S` maps `[0, 1]` into itself, is monotone on the samples,
/// and is an involution: `|S(S(u)) - u| <= tol`. Samples are the quarter
/// points of the unit interval plus `trials` uniform draws.
pub fn check_complementarity(
    s: &UnaryRegrade,
    trials: usize,
    tol: f64,
    seed: u64,
) -> ComplementarityReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut samples: Vec<f64> = vec![0.0, 0.25, 0.5, 0.75, 1.0];
    samples.extend((0..trials).map(|_| rng.gen::<f64>()));

    let mut range_violations = Vec::new();
    let mut max_involution_error: f64 = 0.0;
    let mut involution_counterexample = None;
    let mut trivial = true;
    let mut pairs = Vec::with_capacity(samples.len());
    for &u in &samples {
        let su = s.apply(u);
        if !(0.0..=1.0).contains(&su) {
            range_violations.push((u, su));
        }
        trivial &= su == u;
        let err = (s.apply(su) - u).abs();
        let err = if err.is_nan() { f64::INFINITY } else { err };
        max_involution_error = max_involution_error.max(err);
        if err > tol {
            involution_counterexample.get_or_insert(u);
        }
        pairs.push((u, su));
    }

    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut up, mut down) = (false, false);
    for w in pairs.windows(2) {
        let d = w[1].1 - w[0].1;
        if d > 0.0 {
            up = true;
        } else if d < 0.0 {
            down = true;
        } else if d.is_nan() {
            up = true;
            down = true;
        }
    }
    let monotonicity = match (up, down) {
        (true, true) => Monotonicity::NotMonotone,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
    };

    ComplementarityReport {
        passed: range_violations.is_empty()
            && monotonicity != Monotonicity::NotMonotone
            && involution_counterexample.is_none(),
        samples: samples.len(),
        range_violations,
        monotonicity,
        max_involution_error,
        involution_counterexample,
        trivial,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplementRuleReport {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Checks `U(e) = S(U(~e))` through the evaluator for each expression.
pub fn check_complement_rule(
    s: &UnaryRegrade,
    model: &UtilityModel,
    exprs: &[PreferenceExpr],
    tol: f64,
) -> Result<ComplementRuleReport> {
    let mut ev = Evaluator::new(model);
    let mut max_deviation: f64 = 0.0;
    for e in exprs {
        let u = ev.eval(e)?;
        let uc = ev.eval(&PreferenceExpr::not(e.clone()))?;
        max_deviation = max_deviation.max((u - s.apply(uc)).abs());
    }
    Ok(ComplementRuleReport {
        passed: max_deviation <= tol,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_probabilistic_sum_are_associative() {
        let r = check_associativity(&BinaryCombiner::product(), 10_000, 1e-12, 1);
        assert!(r.passed);
        assert_eq!(r.samples, 10_008);
        let r = check_associativity(&BinaryCombiner::probabilistic_sum(), 10_000, 1e-12, 1);
        assert!(r.passed, "{:?}", r.counterexample);
    }

    #[test]
    fn mean_fails_at_origin_corner() {
        let r = check_associativity(&BinaryCombiner::mean(), 1000, 1e-12, 42);
        assert!(!r.passed);
        let c = r.counterexample.unwrap();
        assert_eq!((c.x, c.y, c.z), (0.0, 0.0, 1.0));
        assert_eq!(c.right_nested, 0.25);
        assert_eq!(c.left_nested, 0.5);
    }

    #[test]
    fn counterexample_is_reproducible() {
        let f = BinaryCombiner::new("x^2 y", |x, y| x * x * y);
        let a = check_associativity(&f, 500, 1e-12, 9);
        let b = check_associativity(&f, 500, 1e-12, 9);
        assert_eq!(a, b);
        assert!(!a.passed);
    }

    #[test]
    fn one_minus_u_is_an_involution() {
        let r = check_complementarity(&UnaryRegrade::complement(), 10_000, 1e-15, 5);
        assert!(r.passed);
        assert!(!r.trivial);
        assert_eq!(r.monotonicity, Monotonicity::Decreasing);
        let s = UnaryRegrade::complement();
        assert!((s.apply(s.apply(0.3)) - 0.3).abs() <= 1e-15);
    }

    #[test]
    fn identity_is_flagged_trivial() {
        let r = check_complementarity(&UnaryRegrade::identity(), 100, 1e-15, 5);
        assert!(r.passed);
        assert!(r.trivial);
        assert_eq!(r.monotonicity, Monotonicity::Increasing);
    }

    #[test]
    fn reciprocal_leaves_the_unit_interval() {
        let r = check_complementarity(&UnaryRegrade::reciprocal(), 100, 1e-15, 5);
        assert!(!r.passed);
        assert!(r.range_violations.contains(&(0.5, 2.0)));
    }

    #[test]
    fn non_monotone_regrade_fails() {
        let s = UnaryRegrade::new("tent", |u| 1.0 - (2.0 * u - 1.0).abs());
        let r = check_complementarity(&s, 100, 1e-12, 5);
        assert_eq!(r.monotonicity, Monotonicity::NotMonotone);
        assert!(!r.passed);
    }
}
