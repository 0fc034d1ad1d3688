//! Finite-grid set semantics for preference expressions.
//!
//! Every attribute carries a strictly increasing list of levels and the
//! grid has one cell per combination of levels. An atom `x=b` covers the
//! cells whose `x` index is at most the index of `b`; the other connectives
//! act as set operations on cells. Utility measures come from Möbius
//! masses: the finite differences of the joint utility, one per cell, so
//! that the mass of a lower-orthant rectangle equals the joint utility at
//! its top corner.

use std::fmt;
use std::sync::Arc;

use crate::engine::{validate_model, UtilityModel};
use crate::error::{Error, Result};
use crate::expr::{AttributeId, PreferenceExpr};

/// Oracle grids larger than this are rejected.
pub const MAX_CELLS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeGrid {
    pub id: AttributeId,
    pub levels: Vec<f64>,
}

impl AttributeGrid {
    pub fn min(&self) -> f64 {
        self.levels[0]
    }

    pub fn max(&self) -> f64 {
        *self.levels.last().unwrap()
    }
}

/// Ordered attributes with their level grids.
#[derive(Clone, Debug, PartialEq)]
pub struct AttributeSpace {
    attributes: Vec<AttributeGrid>,
    // Row-major, last attribute fastest.
    strides: Vec<usize>,
    cells: usize,
}

impl AttributeSpace {
    pub fn new<S: AsRef<str>>(attributes: Vec<(S, Vec<f64>)>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::InvalidSpace("no attributes".into()));
        }
        let mut grids: Vec<AttributeGrid> = Vec::with_capacity(attributes.len());
        for (name, levels) in attributes {
            let name = name.as_ref();
            if name.is_empty() {
                return Err(Error::InvalidSpace("empty attribute name".into()));
            }
            if grids.iter().any(|g| g.id.name() == name) {
                return Err(Error::InvalidSpace(format!("duplicate attribute `{name}`")));
            }
            if levels.len() < 2 {
                return Err(Error::InvalidSpace(format!(
                    "attribute `{name}` needs at least 2 levels"
                )));
            }
            if levels.iter().any(|l| !l.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "attribute `{name}` has a non-finite level"
                )));
            }
            if levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSpace(format!(
                    "levels of attribute `{name}` are not strictly increasing"
                )));
            }
            grids.push(AttributeGrid {
                id: AttributeId::new(name),
                levels,
            });
        }
        let mut cells: usize = 1;
        for g in &grids {
            cells = cells
                .checked_mul(g.levels.len())
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| Error::InvalidSpace(format!("grid exceeds {MAX_CELLS} cells")))?;
        }
        let mut strides = vec![1; grids.len()];
        for i in (0..grids.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * grids[i + 1].levels.len();
        }
        Ok(AttributeSpace {
            attributes: grids,
            strides,
            cells,
        })
    }

    pub fn attributes(&self) -> &[AttributeGrid] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &AttributeGrid {
        &self.attributes[index]
    }

    pub fn dims(&self) -> usize {
        self.attributes.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|g| g.id.name() == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Position of `level` in the grid of attribute `attr`.
    pub fn level_index(&self, attr: usize, level: f64) -> Result<usize> {
        let grid = &self.attributes[attr];
        grid.levels
            .iter()
            .position(|&l| l == level)
            .ok_or_else(|| Error::OffGrid {
                attribute: grid.id.name().to_string(),
                level,
            })
    }

    pub(crate) fn stride(&self, attr: usize) -> usize {
        self.strides[attr]
    }

    pub fn flat_index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn coords(&self, flat: usize) -> Vec<usize> {
        self.attributes
            .iter()
            .zip(&self.strides)
            .map(|(g, s)| (flat / s) % g.levels.len())
            .collect()
    }

    fn coord(&self, flat: usize, attr: usize) -> usize {
        (flat / self.strides[attr]) % self.attributes[attr].levels.len()
    }

    /// The levels at grid position `coords`.
    pub fn point(&self, coords: &[usize]) -> Vec<f64> {
        coords
            .iter()
            .zip(&self.attributes)
            .map(|(&c, g)| g.levels[c])
            .collect()
    }
}

/// A set of grid cells of one space.
#[derive(Clone, PartialEq)]
pub struct DomainSet {
    space: Arc<AttributeSpace>,
    cells: Vec<bool>,
}

impl fmt::Debug for DomainSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.cells()).finish()
    }
}

impl DomainSet {
    pub fn full(space: &Arc<AttributeSpace>) -> Self {
        DomainSet {
            space: space.clone(),
            cells: vec![true; space.cell_count()],
        }
    }

    pub fn empty(space: &Arc<AttributeSpace>) -> Self {
        DomainSet {
            space: space.clone(),
            cells: vec![false; space.cell_count()],
        }
    }

    pub fn space(&self) -> &Arc<AttributeSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    pub fn contains(&self, coords: &[usize]) -> bool {
        self.cells[self.space.flat_index(coords)]
    }

    pub fn insert(&mut self, coords: &[usize]) {
        let i = self.space.flat_index(coords);
        self.cells[i] = true;
    }

    /// Index tuples of member cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| self.space.coords(i))
    }

    pub fn complement(&self) -> DomainSet {
        DomainSet {
            space: self.space.clone(),
            cells: self.cells.iter().map(|c| !c).collect(),
        }
    }

    pub fn intersection(&self, other: &DomainSet) -> Result<DomainSet> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn union(&self, other: &DomainSet) -> Result<DomainSet> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn is_subset(&self, other: &DomainSet) -> Result<bool> {
        same_space(&self.space, &other.space)?;
        Ok(self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b))
    }

    pub fn is_disjoint(&self, other: &DomainSet) -> Result<bool> {
        same_space(&self.space, &other.space)?;
        Ok(self
            .cells
            .iter()
            .zip(&other.cells)
            .all(|(&a, &b)| !(a && b)))
    }

    fn zip_with(&self, other: &DomainSet, op: impl Fn(bool, bool) -> bool) -> Result<DomainSet> {
        same_space(&self.space, &other.space)?;
        Ok(DomainSet {
            space: self.space.clone(),
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }
}

fn same_space(a: &Arc<AttributeSpace>, b: &Arc<AttributeSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// The set of grid cells covered by `e`.
pub fn eval_domain(e: &PreferenceExpr, space: &Arc<AttributeSpace>) -> Result<DomainSet> {
    match e {
        PreferenceExpr::Top => Ok(DomainSet::full(space)),
        PreferenceExpr::Bottom => Ok(DomainSet::empty(space)),
        PreferenceExpr::Atom(atom) => {
            let attr = space.index_of(atom.attribute.name())?;
            let bound = space.level_index(attr, atom.level.value())?;
            Ok(DomainSet {
                space: space.clone(),
                cells: (0..space.cell_count())
                    .map(|i| space.coord(i, attr) <= bound)
                    .collect(),
            })
        }
        PreferenceExpr::Complement(inner) => Ok(eval_domain(inner, space)?.complement()),
        PreferenceExpr::Conjunction(cs) => {
            let mut acc = DomainSet::full(space);
            for c in cs {
                acc = acc.intersection(&eval_domain(c, space)?)?;
            }
            Ok(acc)
        }
        PreferenceExpr::Disjunction(cs) => {
            let mut acc = DomainSet::empty(space);
            for c in cs {
                acc = acc.union(&eval_domain(c, space)?)?;
            }
            Ok(acc)
        }
    }
}

pub fn domains_equal(a: &DomainSet, b: &DomainSet) -> Result<bool> {
    same_space(&a.space, &b.space)?;
    Ok(a.cells == b.cells)
}

/// Signed utility increment per grid cell.
#[derive(Clone, Debug)]
pub struct MassFunction {
    space: Arc<AttributeSpace>,
    masses: Vec<f64>,
}

impl MassFunction {
    pub fn space(&self) -> &Arc<AttributeSpace> {
        &self.space
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, coords: &[usize]) -> f64 {
        self.masses[self.space.flat_index(coords)]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn has_negative_mass(&self) -> bool {
        self.masses.iter().any(|&m| m < 0.0)
    }
}

/// Finite differences of the tabulated joint utility along every axis, with
/// indices below zero contributing nothing.
pub(crate) fn finite_differences(space: &AttributeSpace, mut values: Vec<f64>) -> Vec<f64> {
    for attr in 0..space.dims() {
        let stride = space.stride(attr);
        // Descending so that the neighbour below still holds its
        // undifferenced value.
        for i in (0..values.len()).rev() {
            if space.coord(i, attr) > 0 {
                values[i] -= values[i - stride];
            }
        }
    }
    values
}

/// Möbius masses of a validated model.
pub fn mobius_masses(model: &UtilityModel) -> Result<MassFunction> {
    let diagnostics = validate_model(model);
    if diagnostics.has_errors() {
        return Err(Error::InvalidModel(diagnostics.into_vec()));
    }
    for w in diagnostics.warnings() {
        log::warn!("{w}");
    }
    let space = model.space().clone();
    let masses = finite_differences(&space, model.grid_values()?);
    Ok(MassFunction { space, masses })
}

/// Sum of the masses of the cells in `d`.
pub fn measure(d: &DomainSet, m: &MassFunction) -> Result<f64> {
    same_space(&d.space, &m.space)?;
    Ok(d.cells
        .iter()
        .zip(&m.masses)
        .filter(|(&c, _)| c)
        .map(|(_, &w)| w)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{product_model, UtilityCurve};
    use crate::engine::{JointUtility, UtilityModel};
    use PreferenceExpr as E;

    fn line(n: usize) -> Arc<AttributeSpace> {
        Arc::new(AttributeSpace::new(vec![("x", (0..n).map(|i| i as f64).collect())]).unwrap())
    }

    fn square(n: usize) -> Arc<AttributeSpace> {
        let levels: Vec<f64> = (0..n).map(|i| i as f64).collect();
        Arc::new(AttributeSpace::new(vec![("x", levels.clone()), ("y", levels)]).unwrap())
    }

    fn members(d: &DomainSet) -> Vec<Vec<usize>> {
        d.cells().collect()
    }

    #[test]
    fn atom_is_closed_lower_interval() {
        let s = line(5);
        let d = eval_domain(&E::atom("x", 2.0), &s).unwrap();
        assert_eq!(members(&d), vec![vec![0], vec![1], vec![2]]);
        let c = eval_domain(&E::not(E::atom("x", 2.0)), &s).unwrap();
        assert_eq!(members(&c), vec![vec![3], vec![4]]);
    }

    #[test]
    fn conjunction_is_rectangle() {
        let s = square(5);
        let d = eval_domain(&E::and([E::atom("x", 2.0), E::atom("y", 3.0)]), &s).unwrap();
        assert_eq!(d.len(), 12);
        for cell in d.cells() {
            assert!(cell[0] <= 2 && cell[1] <= 3);
        }
    }

    #[test]
    fn disjunction_is_l_shape() {
        let s = square(5);
        let d = eval_domain(&E::or([E::atom("x", 2.0), E::atom("y", 3.0)]), &s).unwrap();
        // Counted cell by cell.
        let mut count = 0;
        for i in 0..5 {
            for j in 0..5 {
                if i <= 2 || j <= 3 {
                    count += 1;
                    assert!(d.contains(&[i, j]));
                }
            }
        }
        assert_eq!(count, 23);
        assert_eq!(d.len(), 23);
    }

    #[test]
    fn constants() {
        let s = square(3);
        assert_eq!(eval_domain(&E::Top, &s).unwrap().len(), 9);
        assert!(eval_domain(&E::Bottom, &s).unwrap().is_empty());
    }

    #[test]
    fn errors_for_unknown_or_off_grid_atoms() {
        let s = square(3);
        assert!(matches!(
            eval_domain(&E::atom("z", 1.0), &s),
            Err(Error::UnknownAttribute(_))
        ));
        assert!(matches!(
            eval_domain(&E::atom("x", 1.5), &s),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn domain_equality() {
        let s = square(5);
        let ev = |e: &E| eval_domain(e, &s).unwrap();
        let x2 = E::atom("x", 2.0);
        let y3 = E::atom("y", 3.0);
        let lhs = ev(&E::not(E::and([x2.clone(), y3.clone()])));
        let rhs = ev(&E::or([E::not(x2.clone()), E::not(y3.clone())]));
        assert!(domains_equal(&lhs, &rhs).unwrap());
        let absorbed = ev(&E::or([E::and([x2.clone(), y3]), x2.clone()]));
        assert!(domains_equal(&absorbed, &ev(&x2)).unwrap());
        assert!(!domains_equal(&ev(&x2), &ev(&E::atom("x", 3.0))).unwrap());
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = DomainSet::full(&square(3));
        let b = DomainSet::full(&square(4));
        assert!(matches!(domains_equal(&a, &b), Err(Error::SpaceMismatch)));
        let m = MassFunction {
            space: square(4),
            masses: vec![0.0; 16],
        };
        assert!(matches!(measure(&a, &m), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn one_dimensional_masses_are_first_differences() {
        let s = Arc::new(AttributeSpace::new(vec![("x", vec![0.0, 1.0, 2.0])]).unwrap());
        let model = UtilityModel::new(s, JointUtility::Table(vec![0.0, 0.5, 1.0]), "t").unwrap();
        let m = mobius_masses(&model).unwrap();
        assert_eq!(m.masses(), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn product_masses_factor() {
        let s = Arc::new(
            AttributeSpace::new(vec![
                ("x", vec![0.0, 1.0, 3.0, 4.0]),
                ("y", vec![0.0, 2.0, 5.0]),
            ])
            .unwrap(),
        );
        let cx = UtilityCurve::exponential(0.3, 0.0, 4.0).unwrap();
        let cy = UtilityCurve::power(2.0, 0.0, 5.0).unwrap();
        let model = product_model(vec![cx.clone(), cy.clone()], s.clone(), "p").unwrap();
        let m = mobius_masses(&model).unwrap();
        let dx: Vec<f64> = first_diffs(&s.attribute(0).levels, &cx);
        let dy: Vec<f64> = first_diffs(&s.attribute(1).levels, &cy);
        for (i, a) in dx.iter().enumerate() {
            for (j, b) in dy.iter().enumerate() {
                assert!((m.mass(&[i, j]) - a * b).abs() < 1e-15);
            }
        }
        assert!((m.total() - 1.0).abs() < 1e-12);
    }

    fn first_diffs(levels: &[f64], c: &UtilityCurve) -> Vec<f64> {
        let v: Vec<f64> = levels.iter().map(|&l| c.eval(l).unwrap()).collect();
        (0..v.len())
            .map(|i| if i == 0 { v[0] } else { v[i] - v[i - 1] })
            .collect()
    }

    #[test]
    fn rectangle_measure_is_joint_utility() {
        let s = square(4);
        let cx = UtilityCurve::exponential(0.7, 0.0, 3.0).unwrap();
        let cy = UtilityCurve::linear(0.0, 3.0).unwrap();
        let model = product_model(vec![cx, cy], s.clone(), "p").unwrap();
        let m = mobius_masses(&model).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let rect = E::and([E::atom("x", i as f64), E::atom("y", j as f64)]);
                let got = measure(&eval_domain(&rect, &s).unwrap(), &m).unwrap();
                let want = model.joint_utility(&[i as f64, j as f64]).unwrap();
                assert!((got - want).abs() < 1e-14, "{i},{j}: {got} vs {want}");
            }
        }
        assert!((measure(&DomainSet::full(&s), &m).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(measure(&DomainSet::empty(&s), &m).unwrap(), 0.0);
    }

    #[test]
    fn invalid_model_has_no_masses() {
        let s = line(3);
        let model = UtilityModel::new(s, JointUtility::Table(vec![0.1, 0.5, 1.0]), "t").unwrap();
        assert!(matches!(mobius_masses(&model), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn space_validation() {
        assert!(AttributeSpace::new(vec![("x", vec![0.0])]).is_err());
        assert!(AttributeSpace::new(vec![("x", vec![1.0, 0.0])]).is_err());
        assert!(AttributeSpace::new(vec![("x", vec![0.0, 1.0]), ("x", vec![0.0, 1.0])]).is_err());
        assert!(AttributeSpace::new::<&str>(vec![]).is_err());
        let big: Vec<f64> = (0..1001).map(|i| i as f64).collect();
        assert!(AttributeSpace::new(vec![("x", big.clone()), ("y", big)]).is_err());
    }
}
