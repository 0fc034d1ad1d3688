//! Utility of preference expressions under an attribute-dominance model.
//!
//! The joint utility `U(x, y, ...)` is the utility of the conjunction of
//! atoms at those levels; unmentioned attributes sit at their maximum. Every
//! other expression is reduced to that by three rules:
//!
//! * complement: `U(~A) = 1 - U(A)`
//! * disjunction: `U(A ∨ B) = U(A) + U(B) - U(A·B)`
//! * negative literal in a conjunction: `U(C·~x=b) = U(C) - U(C·x=b)`
//!
//! Conditionals are ratios `U(A·B) / U(B)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::boxes::{Dnf, Term};
use crate::curves::UtilityCurve;
use crate::domain::{finite_differences, AttributeSpace};
use crate::error::{Error, Result};
use crate::expr::{normal_form, Atom, PreferenceExpr};

/// Upper bound on atoms per evaluated expression.
pub const MAX_LITERALS: usize = 64;

/// Default tolerance for [`check_utility_independence`].
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum JointUtility {
    /// One curve per attribute, in space order.
    Product(Vec<UtilityCurve>),
    /// One value per grid point, row-major with the last attribute fastest.
    Table(Vec<f64>),
}

/// A joint utility over an attribute space, tagged with the state of
/// preference it was assessed under. Updating the state of preference means
/// building a new model.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityModel {
    space: Arc<AttributeSpace>,
    joint: JointUtility,
    context: String,
}

impl UtilityModel {
    /// Checks shape only (curve count and ranges, table length). Use
    /// [`validate_model`] for the utility invariants.
    pub fn new(space: Arc<AttributeSpace>, joint: JointUtility, context: &str) -> Result<Self> {
        match &joint {
            JointUtility::Product(curves) => {
                if curves.len() != space.dims() {
                    return Err(Error::MalformedModel(format!(
                        "{} curves for {} attributes",
                        curves.len(),
                        space.dims()
                    )));
                }
                for (curve, grid) in curves.iter().zip(space.attributes()) {
                    if curve.min() != grid.min() || curve.max() != grid.max() {
                        return Err(Error::InvalidCurve(format!(
                            "curve range [{}, {}] does not match levels [{}, {}] of `{}`",
                            curve.min(),
                            curve.max(),
                            grid.min(),
                            grid.max(),
                            grid.id
                        )));
                    }
                }
            }
            JointUtility::Table(values) => {
                if values.len() != space.cell_count() {
                    return Err(Error::MalformedModel(format!(
                        "table has {} values, grid has {} points",
                        values.len(),
                        space.cell_count()
                    )));
                }
            }
        }
        Ok(UtilityModel {
            space,
            joint,
            context: context.to_string(),
        })
    }

    pub fn space(&self) -> &Arc<AttributeSpace> {
        &self.space
    }

    pub fn joint(&self) -> &JointUtility {
        &self.joint
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn with_context(mut self, context: &str) -> Self {
        self.context = context.to_string();
        self
    }

    /// Joint utility at one level per attribute (space order).
    pub fn joint_utility(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.space.dims() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates, space has {} attributes",
                point.len(),
                self.space.dims()
            )));
        }
        match &self.joint {
            JointUtility::Product(curves) => {
                let mut u = 1.0;
                for ((curve, grid), &level) in curves.iter().zip(self.space.attributes()).zip(point)
                {
                    if !(level >= grid.min() && level <= grid.max()) {
                        return Err(Error::OutOfRange {
                            attribute: grid.id.name().to_string(),
                            level,
                            min: grid.min(),
                            max: grid.max(),
                        });
                    }
                    u *= curve.eval(level)?;
                }
                Ok(u)
            }
            JointUtility::Table(values) => {
                let coords = point
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| self.space.level_index(i, l))
                    .collect::<Result<Vec<_>>>()?;
                Ok(values[self.space.flat_index(&coords)])
            }
        }
    }

    /// Joint utility at every grid point, row-major.
    pub fn grid_values(&self) -> Result<Vec<f64>> {
        match &self.joint {
            JointUtility::Table(values) => Ok(values.clone()),
            JointUtility::Product(_) => (0..self.space.cell_count())
                .map(|i| self.joint_utility(&self.space.point(&self.space.coords(i))))
                .collect(),
        }
    }

    /// The same model as a table over its grid.
    pub fn tabulate(&self) -> Result<UtilityModel> {
        Ok(UtilityModel {
            space: self.space.clone(),
            joint: JointUtility::Table(self.grid_values()?),
            context: self.context.clone(),
        })
    }
}

/// Evaluator with a memo table keyed on canonical unions of boxes. One
/// evaluator serves one model; the memo is not shared between evaluators.
pub struct Evaluator<'m> {
    model: &'m UtilityModel,
    memo: HashMap<Dnf, f64>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m UtilityModel) -> Self {
        Evaluator {
            model,
            memo: HashMap::new(),
        }
    }

    pub fn eval(&mut self, e: &PreferenceExpr) -> Result<f64> {
        let literals = e.literal_count();
        if literals > MAX_LITERALS {
            return Err(Error::TooLarge(literals));
        }
        self.eval_inner(e)
    }

    fn eval_inner(&mut self, e: &PreferenceExpr) -> Result<f64> {
        if let PreferenceExpr::Complement(inner) = e {
            return Ok(1.0 - self.eval_inner(inner)?);
        }
        let dnf = normal_form(e);
        self.union(&dnf)
    }

    /// `U(T1 ∨ R) = U(T1) + U(R) - U(T1·R)` over the terms of a union.
    fn union(&mut self, dnf: &Dnf) -> Result<f64> {
        let terms = dnf.terms();
        match terms.len() {
            0 => return Ok(0.0),
            1 => return self.term(&terms[0]),
            _ => {}
        }
        if let Some(&u) = self.memo.get(dnf) {
            return Ok(u);
        }
        let (first, rest) = terms.split_first().unwrap();
        let rest_dnf = Dnf::from_terms(rest.to_vec());
        let overlap = Dnf::from_terms(rest.iter().filter_map(|t| t.intersect(first)).collect());
        let u = self.term(first)? + self.union(&rest_dnf)? - self.union(&overlap)?;
        self.memo.insert(dnf.clone(), u);
        Ok(u)
    }

    /// Utility of a conjunction of literals. Every lower bound `~x=lo` is
    /// expanded as `U(C) - U(C·x=lo)`, which amounts to an alternating sum of
    /// the joint utility over the corners of the box.
    fn term(&mut self, term: &Term) -> Result<f64> {
        let space = self.model.space();
        let mut upper: Vec<f64> = space.attributes().iter().map(|g| g.max()).collect();
        let mut lowers: Vec<(usize, f64)> = Vec::new();
        let mut constrained = false;
        for (attribute, interval) in term.intervals() {
            let idx = space.index_of(attribute.name())?;
            constrained = true;
            if let Some(hi) = interval.hi {
                upper[idx] = hi.value();
            }
            if let Some(lo) = interval.lo {
                lowers.push((idx, lo.value()));
            }
        }
        if !constrained {
            return Ok(1.0);
        }
        let mut total = 0.0;
        let mut point = upper.clone();
        for mask in 0u32..(1u32 << lowers.len()) {
            point.copy_from_slice(&upper);
            for (bit, &(idx, lo)) in lowers.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    point[idx] = lo;
                }
            }
            let u = self.model.joint_utility(&point)?;
            if mask.count_ones() % 2 == 0 {
                total += u;
            } else {
                total -= u;
            }
        }
        Ok(total)
    }
}

pub fn eval_utility(e: &PreferenceExpr, model: &UtilityModel) -> Result<f64> {
    Evaluator::new(model).eval(e)
}

/// `U(a | given) = U(a·given) / U(given)`.
pub fn conditional_utility(
    a: &PreferenceExpr,
    given: &PreferenceExpr,
    model: &UtilityModel,
) -> Result<f64> {
    let mut ev = Evaluator::new(model);
    let denominator = ev.eval(given)?;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::UndefinedConditional(denominator));
    }
    let numerator = ev.eval(&PreferenceExpr::and([a.clone(), given.clone()]))?;
    Ok(numerator / denominator)
}

/// `U(Y | X) = U(Y) U(X | Y) / U(X)`.
pub fn bayes_update(u_y: f64, u_x_given_y: f64, u_x: f64) -> Result<f64> {
    for (name, v) in [("U(Y)", u_y), ("U(X|Y)", u_x_given_y), ("U(X)", u_x)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {v} is outside [0, 1]"
            )));
        }
    }
    if u_x == 0.0 {
        return Err(Error::UndefinedConditional(u_x));
    }
    Ok(u_y * u_x_given_y / u_x)
}

/// `U(y ∨ x | z) = [U(y·z) + U(x·z) - U(y·x·z)] / U(z)`.
pub fn disjunction_given(y: &Atom, x: &Atom, z: &Atom, model: &UtilityModel) -> Result<f64> {
    let (y, x, z) = (
        PreferenceExpr::Atom(y.clone()),
        PreferenceExpr::Atom(x.clone()),
        PreferenceExpr::Atom(z.clone()),
    );
    let mut ev = Evaluator::new(model);
    let uz = ev.eval(&z)?;
    if uz.is_nan() || uz <= 0.0 {
        return Err(Error::UndefinedConditional(uz));
    }
    let yz = ev.eval(&PreferenceExpr::and([y.clone(), z.clone()]))?;
    let xz = ev.eval(&PreferenceExpr::and([x.clone(), z.clone()]))?;
    let yxz = ev.eval(&PreferenceExpr::and([y, x, z]))?;
    Ok((yz + xz - yxz) / uz)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub independent: bool,
    /// Largest `|U(a | b) - U(a)|` over the grid.
    pub max_deviation: f64,
    /// Levels of the conditioning attribute skipped for having zero utility.
    pub skipped: Vec<f64>,
}

/// Whether the conditional utility of `a` given each level of `b` equals the
/// marginal utility of `a`, within `tol`.
pub fn check_utility_independence(
    model: &UtilityModel,
    a: &str,
    b: &str,
    tol: f64,
) -> Result<IndependenceReport> {
    let space = model.space();
    let a_levels = &space.attribute(space.index_of(a)?).levels;
    let b_levels = &space.attribute(space.index_of(b)?).levels;
    let mut ev = Evaluator::new(model);
    let mut max_deviation: f64 = 0.0;
    let mut skipped = Vec::new();
    let marginals = a_levels
        .iter()
        .map(|&la| ev.eval(&PreferenceExpr::atom(a, la)))
        .collect::<Result<Vec<_>>>()?;
    for &lb in b_levels {
        let given = PreferenceExpr::atom(b, lb);
        let ub = ev.eval(&given)?;
        if ub.is_nan() || ub <= 0.0 {
            skipped.push(lb);
            continue;
        }
        for (&la, &marginal) in a_levels.iter().zip(&marginals) {
            let joint = ev.eval(&PreferenceExpr::and([
                PreferenceExpr::atom(a, la),
                given.clone(),
            ]))?;
            max_deviation = max_deviation.max((joint / ub - marginal).abs());
        }
    }
    Ok(IndependenceReport {
        independent: max_deviation <= tol,
        max_deviation,
        skipped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    NonFinite,
    Corner,
    MinimumSlice,
    Decreasing,
    NegativeMass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics(Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Warning)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Diagnostic> {
        self.0
    }

    fn push(&mut self, severity: Severity, kind: DiagnosticKind, message: String) {
        self.0.push(Diagnostic {
            severity,
            kind,
            message,
        });
    }
}

/// Check corner normalization, zero minimum slices and coordinate-wise
/// monotonicity on the grid; warn about negative Möbius masses.
pub fn validate_model(model: &UtilityModel) -> Diagnostics {
    let mut diags = Diagnostics::default();
    let space = model.space();
    let values = match model.grid_values() {
        Ok(v) => v,
        Err(e) => {
            diags.push(Severity::Error, DiagnosticKind::NonFinite, e.to_string());
            return diags;
        }
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        diags.push(
            Severity::Error,
            DiagnosticKind::NonFinite,
            format!("non-finite utility at {:?}", space.point(&space.coords(i))),
        );
        return diags;
    }

    let all_min = values[0];
    let all_max = values[values.len() - 1];
    if all_min != 0.0 {
        diags.push(
            Severity::Error,
            DiagnosticKind::Corner,
            format!("utility at the all-minimum point is {all_min}, expected 0"),
        );
    }
    if all_max != 1.0 {
        diags.push(
            Severity::Error,
            DiagnosticKind::Corner,
            format!("utility at the all-maximum point is {all_max}, expected 1"),
        );
    }

    for (attr, grid) in space.attributes().iter().enumerate() {
        let stride = space.stride(attr);
        let n = grid.levels.len();
        let mut nonzero = Vec::new();
        let mut decreasing = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let c = (i / stride) % n;
            if c == 0 && v != 0.0 {
                nonzero.push(i);
            }
            if c > 0 && v < values[i - stride] {
                decreasing.push(i);
            }
        }
        if let Some(&first) = nonzero.first() {
            diags.push(
                Severity::Error,
                DiagnosticKind::MinimumSlice,
                format!(
                    "utility is nonzero at {} grid point(s) with `{}` at its minimum, first at {:?}",
                    nonzero.len(),
                    grid.id,
                    space.point(&space.coords(first))
                ),
            );
        }
        if let Some(&first) = decreasing.first() {
            diags.push(
                Severity::Error,
                DiagnosticKind::Decreasing,
                format!(
                    "utility decreases in `{}` at {} grid point(s), first at {:?}",
                    grid.id,
                    decreasing.len(),
                    space.point(&space.coords(first))
                ),
            );
        }
    }

    let masses = finite_differences(space, values);
    let negative = masses.iter().filter(|&&m| m < 0.0).count();
    if negative > 0 {
        let worst = masses.iter().cloned().fold(f64::INFINITY, f64::min);
        diags.push(
            Severity::Warning,
            DiagnosticKind::NegativeMass,
            format!("{negative} cell(s) have negative Möbius mass (smallest {worst})"),
        );
    }
    diags
}
