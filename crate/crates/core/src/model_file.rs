//! JSON model files and CSV grid export.
//!
//! ```json
//! {
//!   "attributes": [
//!     {"name": "x", "levels": [0, 1, 2], "curve": {"family": "exponential", "params": [0.1]}},
//!     {"name": "y", "levels": [0, 5, 10], "curve": {"family": "linear", "params": []}}
//!   ],
//!   "joint": {"type": "product"}
//! }
//! ```
//!
//! A table joint lists one value per grid point, row-major in attribute
//! order with the last attribute varying fastest:
//! `{"type": "table", "values": [...]}`.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curves::{CurveFamily, UtilityCurve};
use crate::domain::AttributeSpace;
use crate::engine::{validate_model, JointUtility, UtilityModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    pub attributes: Vec<AttributeEntry>,
    pub joint: JointEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeEntry {
    pub name: String,
    pub levels: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum JointEntry {
    Product,
    Table { values: Vec<f64> },
}

impl CurveEntry {
    fn to_curve(&self, min: f64, max: f64) -> Result<UtilityCurve> {
        let want = |n: usize| -> Result<()> {
            if self.params.len() == n {
                Ok(())
            } else {
                Err(Error::MalformedModel(format!(
                    "curve family `{}` takes {n} parameter(s), got {}",
                    self.family,
                    self.params.len()
                )))
            }
        };
        let family = match self.family.as_str() {
            "exponential" => {
                want(1)?;
                CurveFamily::Exponential {
                    gamma: self.params[0],
                }
            }
            "linear" => {
                want(0)?;
                CurveFamily::Linear
            }
            "power" => {
                want(1)?;
                CurveFamily::Power {
                    exponent: self.params[0],
                }
            }
            other => {
                return Err(Error::MalformedModel(format!(
                    "unknown curve family `{other}`"
                )))
            }
        };
        UtilityCurve::new(family, min, max)
    }

    fn from_curve(c: &UtilityCurve) -> Self {
        let (family, params) = match c.family() {
            CurveFamily::Exponential { gamma } => ("exponential", vec![gamma]),
            CurveFamily::Linear => ("linear", vec![]),
            CurveFamily::Power { exponent } => ("power", vec![exponent]),
        };
        CurveEntry {
            family: family.to_string(),
            params,
        }
    }
}

impl ModelFile {
    /// Builds the model without validating its utility invariants.
    pub fn to_model(&self) -> Result<UtilityModel> {
        let space = AttributeSpace::new(
            self.attributes
                .iter()
                .map(|a| (a.name.as_str(), a.levels.clone()))
                .collect(),
        )
        .map_err(|e| Error::MalformedModel(e.to_string()))?;
        let space = Arc::new(space);
        let joint = match &self.joint {
            JointEntry::Product => {
                let curves = self
                    .attributes
                    .iter()
                    .zip(space.attributes())
                    .map(|(entry, grid)| {
                        entry
                            .curve
                            .as_ref()
                            .ok_or_else(|| {
                                Error::MalformedModel(format!(
                                    "product model needs a curve for attribute `{}`",
                                    entry.name
                                ))
                            })?
                            .to_curve(grid.min(), grid.max())
                    })
                    .collect::<Result<Vec<_>>>()?;
                JointUtility::Product(curves)
            }
            JointEntry::Table { values } => JointUtility::Table(values.clone()),
        };
        UtilityModel::new(space, joint, self.context.as_deref().unwrap_or(""))
    }

    pub fn from_model(model: &UtilityModel) -> Self {
        let curves: Vec<Option<CurveEntry>> = match model.joint() {
            JointUtility::Product(cs) => {
                cs.iter().map(|c| Some(CurveEntry::from_curve(c))).collect()
            }
            JointUtility::Table(_) => vec![None; model.space().dims()],
        };
        ModelFile {
            context: (!model.context().is_empty()).then(|| model.context().to_string()),
            attributes: model
                .space()
                .attributes()
                .iter()
                .zip(curves)
                .map(|(g, curve)| AttributeEntry {
                    name: g.id.name().to_string(),
                    levels: g.levels.clone(),
                    curve,
                })
                .collect(),
            joint: match model.joint() {
                JointUtility::Product(_) => JointEntry::Product,
                JointUtility::Table(values) => JointEntry::Table {
                    values: values.clone(),
                },
            },
        }
    }
}

/// Parse and validate a model document.
pub fn parse_model(text: &str, origin: &str) -> Result<UtilityModel> {
    let file: ModelFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_string(),
        source,
    })?;
    let model = file.to_model()?;
    let diagnostics = validate_model(&model);
    if diagnostics.has_errors() {
        return Err(Error::InvalidModel(diagnostics.into_vec()));
    }
    for w in diagnostics.warnings() {
        log::warn!("{origin}: {w}");
    }
    Ok(model)
}

pub fn load_model(path: &Path) -> Result<UtilityModel> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text, &path.display().to_string())
}

pub fn model_to_json(model: &UtilityModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes")
}

/// `%.{digits}g`-style rendering: `digits` significant digits, trailing
/// zeros removed, scientific notation outside `[1e-5, 10^digits)`.
pub fn format_significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value == 0.0 {
            "0".to_string()
        } else {
            value.to_string()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exponent) = sci.split_once('e').unwrap();
    let exponent: i32 = exponent.parse().unwrap();
    if exponent < -5 || exponent >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exponent)
    } else {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header of attribute names plus `utility`, then one row per grid point in
/// lexicographic order, 12 significant digits, `\n` line endings.
pub fn export_grid_csv(model: &UtilityModel) -> Result<String> {
    let space = model.space();
    let values = model.grid_values()?;
    let mut out = String::new();
    for g in space.attributes() {
        out.push_str(g.id.name());
        out.push(',');
    }
    out.push_str("utility\n");
    for (i, v) in values.iter().enumerate() {
        for level in space.point(&space.coords(i)) {
            write!(out, "{},", format_significant(level, 12)).unwrap();
        }
        writeln!(out, "{}", format_significant(*v, 12)).unwrap();
    }
    Ok(out)
}

/// Reads a grid CSV back as a table model (not validated).
pub fn import_grid_csv(text: &str, context: &str) -> Result<UtilityModel> {
    let bad = |msg: String| Error::MalformedModel(msg);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("empty CSV".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    if header.len() < 2 || header.last() != Some(&"utility") {
        return Err(bad(
            "header must list attributes followed by `utility`".into()
        ));
    }
    let dims = header.len() - 1;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", n + 2)))?;
        if row.len() != header.len() {
            return Err(bad(format!(
                "row {} has {} fields, expected {}",
                n + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); dims];
    for row in &rows {
        for (d, &l) in row[..dims].iter().enumerate() {
            if !levels[d].contains(&l) {
                levels[d].push(l);
            }
        }
    }
    for l in &mut levels {
        l.sort_by(f64::total_cmp);
    }
    let space = AttributeSpace::new(header[..dims].iter().copied().zip(levels).collect())?;
    if rows.len() != space.cell_count() {
        return Err(bad(format!(
            "{} rows for a grid of {} points",
            rows.len(),
            space.cell_count()
        )));
    }
    let mut values = vec![f64::NAN; space.cell_count()];
    for row in &rows {
        let coords = (0..dims)
            .map(|d| space.level_index(d, row[d]))
            .collect::<Result<Vec<_>>>()?;
        let i = space.flat_index(&coords);
        if !values[i].is_nan() {
            return Err(bad(format!("duplicate grid point {:?}", &row[..dims])));
        }
        values[i] = row[dims];
    }
    UtilityModel::new(Arc::new(space), JointUtility::Table(values), context)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRODUCT: &str = r#"{
        "attributes": [
            {"name": "x", "levels": [0, 1, 2, 3], "curve": {"family": "exponential", "params": [0.5]}},
            {"name": "y", "levels": [0, 2, 4], "curve": {"family": "exponential", "params": [0.2]}}
        ],
        "joint": {"type": "product"}
    }"#;

    #[test]
    fn product_file_loads() {
        let m = parse_model(PRODUCT, "inline").unwrap();
        assert_eq!(m.space().dims(), 2);
        assert!(matches!(m.joint(), JointUtility::Product(_)));
    }

    #[test]
    fn table_with_bad_corner_is_rejected() {
        let text = r#"{"attributes": [{"name": "x", "levels": [0, 1]}, {"name": "y", "levels": [0, 1]}],
                       "joint": {"type": "table", "values": [0.1, 0.0, 0.0, 1.0]}}"#;
        assert!(matches!(
            parse_model(text, "inline"),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn unsorted_levels_are_rejected() {
        let text = r#"{"attributes": [{"name": "x", "levels": [0, 2, 1]}],
                       "joint": {"type": "table", "values": [0, 0.5, 1]}}"#;
        assert!(matches!(
            parse_model(text, "inline"),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn schema_violations() {
        let missing_curve =
            r#"{"attributes": [{"name": "x", "levels": [0, 1]}], "joint": {"type": "product"}}"#;
        assert!(matches!(
            parse_model(missing_curve, "m"),
            Err(Error::MalformedModel(_))
        ));
        let unknown_field = r#"{"attributes": [], "joint": {"type": "product"}, "extra": 1}"#;
        assert!(matches!(
            parse_model(unknown_field, "m"),
            Err(Error::Json { .. })
        ));
        let bad_family = r#"{"attributes": [{"name": "x", "levels": [0, 1], "curve": {"family": "log", "params": []}}],
                             "joint": {"type": "product"}}"#;
        assert!(matches!(
            parse_model(bad_family, "m"),
            Err(Error::MalformedModel(_))
        ));
        let wrong_len = r#"{"attributes": [{"name": "x", "levels": [0, 1]}], "joint": {"type": "table", "values": [0]}}"#;
        assert!(matches!(
            parse_model(wrong_len, "m"),
            Err(Error::MalformedModel(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = parse_model(PRODUCT, "inline").unwrap();
        let again = parse_model(&model_to_json(&m), "again").unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(0.8, 12), "0.8");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(format_significant(123456.0, 12), "123456");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(-0.25, 12), "-0.25");
        assert_eq!(format_significant(1e15, 12), "1e15");
    }

    #[test]
    fn csv_layout() {
        let text = r#"{"attributes": [{"name": "x", "levels": [0, 1]}, {"name": "y", "levels": [0, 1, 2]}],
                       "joint": {"type": "table", "values": [0, 0, 0, 0, 0.25, 1]}}"#;
        let m = parse_model(text, "m").unwrap();
        let csv = export_grid_csv(&m).unwrap();
        assert_eq!(
            csv,
            "x,y,utility\n0,0,0\n0,1,0\n0,2,0\n1,0,0\n1,1,0.25\n1,2,1\n"
        );
        let back = import_grid_csv(&csv, "csv").unwrap();
        assert_eq!(back.grid_values().unwrap(), m.grid_values().unwrap());
    }

    #[test]
    fn csv_import_errors() {
        assert!(import_grid_csv("", "c").is_err());
        assert!(import_grid_csv("x,u\n0,0\n1,1\n", "c").is_err());
        assert!(import_grid_csv("x,utility\n0,0\n0,1\n", "c").is_err());
        assert!(import_grid_csv("x,y,utility\n0,0,0\n1,1,1\n", "c").is_err());
    }
}
