//! Random spaces, atoms, expressions and models for the property suites.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;

use crate::curves::{product_model, UtilityCurve};
use crate::domain::AttributeSpace;
use crate::engine::{JointUtility, UtilityModel};
use crate::error::Result;
use crate::expr::{Atom, PreferenceExpr};

const ATTRIBUTE_NAMES: [&str; 8] = ["x", "y", "z", "w", "v", "u", "t", "s"];

/// `attrs` attributes (at most 8) with `levels` distinct levels each, drawn
/// from multiples of 0.5 so that every level is exact in binary.
pub fn random_space<R: Rng + ?Sized>(
    rng: &mut R,
    attrs: usize,
    levels: usize,
) -> Result<AttributeSpace> {
    let attrs = attrs.clamp(1, ATTRIBUTE_NAMES.len());
    let levels = levels.max(2);
    let grids = ATTRIBUTE_NAMES[..attrs]
        .iter()
        .map(|&name| {
            let mut picks: Vec<usize> = sample(rng, 4 * levels, levels).into_vec();
            picks.sort_unstable();
            (name, picks.into_iter().map(|p| p as f64 * 0.5).collect())
        })
        .collect();
    AttributeSpace::new(grids)
}

pub fn random_atom<R: Rng + ?Sized>(rng: &mut R, space: &AttributeSpace) -> Atom {
    let grid = &space.attributes()[rng.gen_range(0..space.dims())];
    let level = grid.levels[rng.gen_range(0..grid.levels.len())];
    Atom::new(grid.id.clone(), level)
}

/// A random expression over grid atoms of `space` with depth at most
/// `max_depth` (an atom has depth 1). Internal nodes are binary, so the
/// expression has at most `2^(max_depth - 1)` atoms.
pub fn random_expr<R: Rng + ?Sized>(
    rng: &mut R,
    space: &AttributeSpace,
    max_depth: usize,
) -> PreferenceExpr {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..40) {
            0 => PreferenceExpr::Top,
            1 => PreferenceExpr::Bottom,
            _ => PreferenceExpr::Atom(random_atom(rng, space)),
        };
    }
    let d = max_depth - 1;
    match rng.gen_range(0..5) {
        0 => PreferenceExpr::not(random_expr(rng, space, d)),
        1 | 2 => PreferenceExpr::and([random_expr(rng, space, d), random_expr(rng, space, d)]),
        _ => PreferenceExpr::or([random_expr(rng, space, d), random_expr(rng, space, d)]),
    }
}

/// A product model with random curve families on `space`.
pub fn random_product_model<R: Rng + ?Sized>(
    rng: &mut R,
    space: Arc<AttributeSpace>,
) -> Result<UtilityModel> {
    let curves = space
        .attributes()
        .iter()
        .map(|g| match rng.gen_range(0..3) {
            0 => UtilityCurve::exponential(
                rng.gen_range(-2.0..2.0) / (g.max() - g.min()),
                g.min(),
                g.max(),
            ),
            1 => UtilityCurve::linear(g.min(), g.max()),
            _ => UtilityCurve::power(rng.gen_range(0.3..3.0), g.min(), g.max()),
        })
        .collect::<Result<Vec<_>>>()?;
    product_model(curves, space, "random-product")
}

/// A table model built from random nonnegative Möbius masses on every cell
/// off the minimum slices, normalized to total 1. The result is valid and
/// totally monotone.
pub fn random_table_model<R: Rng + ?Sized>(
    rng: &mut R,
    space: Arc<AttributeSpace>,
) -> Result<UtilityModel> {
    let n = space.cell_count();
    let mut masses: Vec<f64> = (0..n)
        .map(|i| {
            let coords = space.coords(i);
            if coords.contains(&0) {
                0.0
            } else {
                rng.gen_range(0.0..1.0)
            }
        })
        .collect();
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    // Cumulative sums along every axis turn masses into joint utilities.
    for attr in 0..space.dims() {
        let stride = space.stride(attr);
        let len = space.attribute(attr).levels.len();
        for i in 0..n {
            if !(i / stride).is_multiple_of(len) {
                masses[i] += masses[i - stride];
            }
        }
    }
    // Pin the corner exactly; summation order leaves it a few ulps off.
    masses[n - 1] = 1.0;
    let values = masses.iter().map(|v| v.min(1.0)).collect();
    UtilityModel::new(space, JointUtility::Table(values), "random-table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::validate_model;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn generated_models_are_valid() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let space = Arc::new(random_space(&mut rng, 3, 4).unwrap());
            let t = random_table_model(&mut rng, space.clone()).unwrap();
            assert!(!validate_model(&t).has_errors(), "{:?}", validate_model(&t));
            let p = random_product_model(&mut rng, space).unwrap();
            assert!(validate_model(&p).is_empty());
        }
    }

    #[test]
    fn expression_depth_is_bounded() {
        let mut rng = StdRng::seed_from_u64(11);
        let space = random_space(&mut rng, 3, 6).unwrap();
        for _ in 0..200 {
            let e = random_expr(&mut rng, &space, 6);
            assert!(e.depth() <= 6);
            assert!(e.literal_count() <= 32);
        }
    }
}
