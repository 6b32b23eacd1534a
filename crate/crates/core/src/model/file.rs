//! Model definition files: a TOML schema carrying `{m, n, drift coefficients,
//! diffusion coefficients, boundary policies, initial state}`.
//!
//! Rows, columns and components are 1-based in files. Entries that are not
//! listed default to zero polynomials (drift/diffusion) or to no boundary.
//! Unknown keys are rejected.
//!
//! ```toml
//! m = 1
//! n = 1
//! initial = [0.9331]
//!
//! [[drift]]
//! row = 1
//! terms = [
//!     { exponents = [0], coeff = 0.0535 },
//!     { exponents = [1], coeff = -0.0899 },
//!     { exponents = [2], coeff = 0.0349 },
//! ]
//!
//! [[diffusion]]
//! row = 1
//! col = 1
//! form = "poly"            # poly | sqrt_poly | sqrt_abs_poly
//! terms = [
//!     { exponents = [0], coeff = -0.410 },
//!     { exponents = [1], coeff = 0.919 },
//!     { exponents = [2], coeff = -0.505 },
//! ]
//!
//! [[boundary]]
//! component = 1
//! policy = "reflect"       # none | reflect | clamp
//! lo = 0.0
//! hi = 1.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Polynomial, PolynomialMap, Term};

use super::{BoundaryPolicy, DiffusionExpr, DiffusionMap, ItoModel};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    m: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial: Option<Vec<f64>>,
    #[serde(default)]
    drift: Vec<DriftEntry>,
    #[serde(default)]
    diffusion: Vec<DiffusionEntry>,
    #[serde(default)]
    boundary: Vec<BoundaryEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriftEntry {
    row: usize,
    terms: Vec<TermEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffusionEntry {
    row: usize,
    col: usize,
    #[serde(default = "default_form")]
    form: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<Vec<f64>>,
    terms: Vec<TermEntry>,
}

fn default_form() -> String {
    "poly".to_owned()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    exponents: Vec<u32>,
    coeff: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryEntry {
    component: usize,
    policy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
}

/// Parses a model from TOML text.
pub fn model_from_toml(text: &str) -> Result<ItoModel> {
    let raw: ModelFile =
        toml::from_str(text).map_err(|e| Error::parse(0, format!("model file: {e}")))?;
    raw_to_model(raw)
}

/// Reads a model definition file.
pub fn read_model(path: &Path) -> Result<ItoModel> {
    let text = std::fs::read_to_string(path)?;
    model_from_toml(&text)
}

/// Serializes a model to TOML text.
pub fn model_to_toml(model: &ItoModel) -> String {
    let raw = model_to_raw(model);
    toml::to_string(&raw).expect("model serialization cannot fail")
}

/// Writes a model definition file.
pub fn write_model(model: &ItoModel, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_toml(model))?;
    Ok(())
}

fn parse_terms(m: usize, terms: Vec<TermEntry>) -> Result<Polynomial> {
    Polynomial::new(
        m,
        terms
            .into_iter()
            .map(|t| Term::new(t.exponents, t.coeff))
            .collect(),
    )
}

fn raw_to_model(raw: ModelFile) -> Result<ItoModel> {
    let (m, n) = (raw.m, raw.n);
    if m == 0 || n == 0 {
        return Err(Error::invalid("m/n", "dimensions must be at least 1"));
    }

    let mut drift: Vec<Polynomial> = (0..m).map(|_| Polynomial::zero(m)).collect();
    let mut seen = vec![false; m];
    for e in raw.drift {
        if e.row == 0 || e.row > m {
            return Err(Error::invalid("drift.row", format!("row {} out of 1..={m}", e.row)));
        }
        if std::mem::replace(&mut seen[e.row - 1], true) {
            return Err(Error::invalid("drift.row", format!("row {} listed twice", e.row)));
        }
        drift[e.row - 1] = parse_terms(m, e.terms)?;
    }
    let drift = PolynomialMap::new(m, m, 1, drift)?;

    let mut diffusion: Vec<DiffusionExpr> = (0..m * n)
        .map(|_| DiffusionExpr::Poly(Polynomial::zero(m)))
        .collect();
    let mut seen = vec![false; m * n];
    for e in raw.diffusion {
        if e.row == 0 || e.row > m || e.col == 0 || e.col > n {
            return Err(Error::invalid(
                "diffusion.row/col",
                format!("entry ({}, {}) out of ({m}, {n})", e.row, e.col),
            ));
        }
        let idx = (e.row - 1) * n + (e.col - 1);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::invalid(
                "diffusion.row/col",
                format!("entry ({}, {}) listed twice", e.row, e.col),
            ));
        }
        let poly = parse_terms(m, e.terms)?;
        diffusion[idx] = match e.form.as_str() {
            "poly" => {
                if e.center.is_some() {
                    return Err(Error::invalid("diffusion.center", "only valid for sqrt_abs_poly"));
                }
                DiffusionExpr::Poly(poly)
            }
            "sqrt_poly" => {
                if e.center.is_some() {
                    return Err(Error::invalid("diffusion.center", "only valid for sqrt_abs_poly"));
                }
                DiffusionExpr::SqrtPoly(poly)
            }
            "sqrt_abs_poly" => DiffusionExpr::SqrtAbsPoly {
                poly,
                center: e
                    .center
                    .ok_or_else(|| Error::invalid("diffusion.center", "required for sqrt_abs_poly"))?,
            },
            other => {
                return Err(Error::invalid(
                    "diffusion.form",
                    format!("unknown form {other:?} (expected poly, sqrt_poly or sqrt_abs_poly)"),
                ))
            }
        };
    }
    let diffusion = DiffusionMap::new(m, m, n, diffusion)?;

    let mut boundary = vec![BoundaryPolicy::None; m];
    let mut seen = vec![false; m];
    for e in raw.boundary {
        if e.component == 0 || e.component > m {
            return Err(Error::invalid(
                "boundary.component",
                format!("component {} out of 1..={m}", e.component),
            ));
        }
        if std::mem::replace(&mut seen[e.component - 1], true) {
            return Err(Error::invalid(
                "boundary.component",
                format!("component {} listed twice", e.component),
            ));
        }
        let lo = e.lo.unwrap_or(f64::NEG_INFINITY);
        let hi = e.hi.unwrap_or(f64::INFINITY);
        boundary[e.component - 1] = match e.policy.as_str() {
            "none" => BoundaryPolicy::None,
            "reflect" => BoundaryPolicy::Reflect { lo, hi },
            "clamp" => BoundaryPolicy::Clamp { lo, hi },
            other => {
                return Err(Error::invalid(
                    "boundary.policy",
                    format!("unknown policy {other:?} (expected none, reflect or clamp)"),
                ))
            }
        };
    }

    let initial = raw.initial.unwrap_or_else(|| vec![0.0; m]);
    ItoModel::new(drift, diffusion, boundary, initial)
}

fn terms_to_raw(p: &Polynomial) -> Vec<TermEntry> {
    p.terms()
        .iter()
        .map(|t| TermEntry {
            exponents: t.exponents.clone(),
            coeff: t.coeff,
        })
        .collect()
}

fn model_to_raw(model: &ItoModel) -> ModelFile {
    let m = model.state_dim();
    let n = model.wiener_dim();
    let drift = (0..m)
        .map(|i| DriftEntry {
            row: i + 1,
            terms: terms_to_raw(model.drift().entry(i, 0)),
        })
        .collect();
    let diffusion = (0..m)
        .flat_map(|i| {
            (0..n).map(move |j| {
                let (form, center, poly) = match model.diffusion().entry(i, j) {
                    DiffusionExpr::Poly(p) => ("poly", None, p),
                    DiffusionExpr::SqrtPoly(p) => ("sqrt_poly", None, p),
                    DiffusionExpr::SqrtAbsPoly { poly, center } => {
                        ("sqrt_abs_poly", Some(center.clone()), poly)
                    }
                };
                DiffusionEntry {
                    row: i + 1,
                    col: j + 1,
                    form: form.to_owned(),
                    center,
                    terms: terms_to_raw(poly),
                }
            })
        })
        .collect();
    let boundary = model
        .boundary()
        .iter()
        .enumerate()
        .filter_map(|(i, b)| {
            let (policy, lo, hi) = match *b {
                BoundaryPolicy::None => return None,
                BoundaryPolicy::Reflect { lo, hi } => ("reflect", lo, hi),
                BoundaryPolicy::Clamp { lo, hi } => ("clamp", lo, hi),
            };
            Some(BoundaryEntry {
                component: i + 1,
                policy: policy.to_owned(),
                lo: Some(lo),
                hi: Some(hi),
            })
        })
        .collect();
    ModelFile {
        m,
        n,
        initial: Some(model.initial().to_vec()),
        drift,
        diffusion,
        boundary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_preset, wind_model, DistributionPreset, PresetKind};

    #[test]
    fn wind_model_roundtrip() {
        let m = wind_model();
        let text = model_to_toml(&m);
        let back = model_from_toml(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn preset_roundtrip_preserves_sqrt_forms() {
        for kind in [
            PresetKind::Gaussian,
            PresetKind::Beta,
            PresetKind::Gamma,
            PresetKind::Laplace,
        ] {
            let m = make_preset(&DistributionPreset::new(kind, 2.0, 3.0).unwrap());
            let back = model_from_toml(&model_to_toml(&m)).unwrap();
            assert_eq!(m, back, "{}", kind.name());
            for x in [0.1, 0.4, 0.9] {
                assert_eq!(
                    m.eval_diffusion(&[x]).unwrap(),
                    back.eval_diffusion(&[x]).unwrap()
                );
            }
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "m = 1\nn = 1\nbogus = 3\n";
        assert!(model_from_toml(text).is_err());
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let text = r#"
m = 1
n = 1
[[drift]]
row = 1
terms = []
[[drift]]
row = 1
terms = []
"#;
        assert!(model_from_toml(text).is_err());
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let text = r#"
m = 1
n = 1
[[diffusion]]
row = 2
col = 1
terms = []
"#;
        assert!(model_from_toml(text).is_err());
    }

    #[test]
    fn missing_entries_default_to_zero_and_none() {
        let m = model_from_toml("m = 2\nn = 2\n").unwrap();
        assert_eq!(m.eval_drift(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(m.eval_diffusion(&[1.0, 2.0]).unwrap(), vec![0.0; 4]);
        assert_eq!(m.boundary(), &[BoundaryPolicy::None, BoundaryPolicy::None]);
        assert_eq!(m.initial(), &[0.0, 0.0]);
    }

    #[test]
    fn boundary_parsing() {
        let text = r#"
m = 1
n = 1
[[boundary]]
component = 1
policy = "clamp"
lo = 1e-9
"#;
        let m = model_from_toml(text).unwrap();
        assert_eq!(
            m.boundary()[0],
            BoundaryPolicy::Clamp {
                lo: 1e-9,
                hi: f64::INFINITY
            }
        );
        let bad = r#"
m = 1
n = 1
[[boundary]]
component = 1
policy = "bounce"
"#;
        assert!(model_from_toml(bad).is_err());
    }

    #[test]
    fn file_roundtrip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.toml");
        let m = wind_model();
        write_model(&m, &path).unwrap();
        assert_eq!(read_model(&path).unwrap(), m);
    }
}
