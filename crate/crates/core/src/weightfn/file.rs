//! Weight-spec files: a JSON document with `breakpoints`, `pieces`, `m`,
//! `M` and `regularity`. Reals are written with 17 significant digits so
//! that a write/read cycle is bit-exact.

use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Map, Number, Value};
use sha2::{Digest, Sha256};

use super::{Piece, PieceKind, Regularity, Weight, WeightSpec};
use crate::fmt::real17;
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    #[serde(default)]
    breakpoints: Vec<f64>,
    pieces: Vec<FilePiece>,
    m: f64,
    #[serde(rename = "M")]
    big_m: f64,
    regularity: FileRegularity,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePiece {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    coeffs: Option<Vec<f64>>,
    #[serde(default)]
    samples: Option<Vec<(f64, f64)>>,
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRegularity {
    class: String,
    #[serde(rename = "R", default)]
    r: Option<f64>,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    norm: Option<f64>,
}

fn num(x: f64) -> Value {
    Value::Number(Number::from_str(&real17(x)).expect("finite reals format as JSON numbers"))
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn spec_value(spec: &WeightSpec) -> Value {
    let pieces: Vec<Value> = spec
        .pieces
        .iter()
        .map(|p| {
            let mut obj = Map::new();
            let (kind, key, data) = match &p.kind {
                PieceKind::Polynomial { coeffs } => ("polynomial", "coeffs", nums(coeffs)),
                PieceKind::ReciprocalPolynomial { coeffs } => ("reciprocal-polynomial", "coeffs", nums(coeffs)),
                PieceKind::Tabulated { samples } => (
                    "tabulated",
                    "samples",
                    Value::Array(
                        samples
                            .iter()
                            .map(|&(t, v)| Value::Array(vec![num(t), num(v)]))
                            .collect(),
                    ),
                ),
            };
            obj.insert("type".into(), Value::String(kind.into()));
            obj.insert(key.into(), data);
            obj.insert("lo".into(), num(p.lo));
            obj.insert("hi".into(), num(p.hi));
            Value::Object(obj)
        })
        .collect();
    let regularity = match spec.regularity {
        Regularity::Lipschitz { r } => json!({ "class": "lipschitz", "R": num(r) }),
        Regularity::Sobolev { p, derivative_norm } => {
            json!({ "class": "sobolev", "p": num(p), "norm": num(derivative_norm) })
        }
        Regularity::PiecewiseAbsCont => json!({ "class": "piecewise-abs-cont" }),
    };
    json!({
        "breakpoints": nums(&spec.breakpoints),
        "pieces": pieces,
        "m": num(spec.lower),
        "M": num(spec.upper),
        "regularity": regularity,
    })
}

/// Serializes a spec; keys are sorted, so the output is canonical.
pub fn to_json(spec: &WeightSpec) -> String {
    let mut s = serde_json::to_string_pretty(&spec_value(spec)).expect("values serialize");
    s.push('\n');
    s
}

/// Parses a spec without validating it.
pub fn from_json(text: &str) -> Result<WeightSpec> {
    let file: FileSpec = serde_json::from_str(text)?;
    let mut pieces = Vec::with_capacity(file.pieces.len());
    for (i, p) in file.pieces.into_iter().enumerate() {
        let missing = |what: &str| Error::Structural {
            index: i,
            reason: format!("piece of type {:?} needs `{what}`", p.kind),
        };
        let piece = match p.kind.as_str() {
            "polynomial" => Piece::polynomial(p.coeffs.clone().ok_or_else(|| missing("coeffs"))?, p.lo, p.hi),
            "reciprocal-polynomial" => {
                Piece::reciprocal(p.coeffs.clone().ok_or_else(|| missing("coeffs"))?, p.lo, p.hi)
            }
            "tabulated" => Piece::tabulated(p.samples.clone().ok_or_else(|| missing("samples"))?, p.lo, p.hi),
            other => {
                return Err(Error::Structural {
                    index: i,
                    reason: format!("unknown piece type {other:?}"),
                })
            }
        };
        pieces.push(piece);
    }
    let reg = file.regularity;
    let field = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::Format(format!("regularity {:?} needs `{name}`", reg.class)))
    };
    let regularity = match reg.class.as_str() {
        "lipschitz" => Regularity::Lipschitz { r: field(reg.r, "R")? },
        "sobolev" => Regularity::Sobolev {
            p: field(reg.p, "p")?,
            derivative_norm: field(reg.norm, "norm")?,
        },
        "piecewise-abs-cont" => Regularity::PiecewiseAbsCont,
        other => return Err(Error::Format(format!("unknown regularity class {other:?}"))),
    };
    Ok(WeightSpec {
        pieces,
        breakpoints: file.breakpoints,
        regularity,
        lower: file.m,
        upper: file.big_m,
    })
}

/// Reads and validates a spec file.
pub fn read_file(path: impl AsRef<Path>) -> Result<Weight> {
    let text = std::fs::read_to_string(path)?;
    Weight::new(from_json(&text)?)
}

pub fn write_file(spec: &WeightSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(spec))?;
    Ok(())
}

/// Hex SHA-256 of the canonical serialization.
pub fn digest(spec: &WeightSpec) -> String {
    hex::encode(Sha256::digest(to_json(spec).as_bytes()))
}
