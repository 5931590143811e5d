//! JSON domain files.
//!
//! ```json
//! {"dim": 2, "kind": "hpolytope", "constraints": [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]}
//! {"dim": 2, "kind": "ball", "center": [0, 0], "radius": 1}
//! {"dim": 2, "kind": "affine_image", "inner": {...}, "matrix": [[2, 0], [0, 1]], "translation": [0, 0]}
//! {"dim": 2, "kind": "intersection", "parts": [{...}, {...}], "witness": [0, 0]}
//! ```
//!
//! Constraint rows `[c_1, ..., c_n, s]` mean `⟨c, x⟩ < s`. Validation happens while
//! parsing, so every rejection carries the line and column of the offending object.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{AffineMap, ConvexDomain, EuclideanBall, HPolytope};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(try_from = "f64")]
struct PositiveF64(f64);

impl TryFrom<f64> for PositiveF64 {
    type Error = String;
    fn try_from(v: f64) -> std::result::Result<Self, String> {
        if v.is_finite() && v > 0.0 {
            Ok(PositiveF64(v))
        } else {
            Err(format!("radius must be positive, got {v}"))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "Vec<f64>")]
struct ConstraintRow(Vec<f64>);

impl TryFrom<Vec<f64>> for ConstraintRow {
    type Error = String;
    fn try_from(v: Vec<f64>) -> std::result::Result<Self, String> {
        if v.len() < 2 {
            return Err(format!("constraint row needs at least 2 entries, got {}", v.len()));
        }
        if v[..v.len() - 1].iter().all(|c| *c == 0.0) {
            return Err("constraint row has a zero normal".into());
        }
        Ok(ConstraintRow(v))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Hpolytope,
    Ball,
    AffineImage,
    Intersection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    dim: usize,
    kind: Kind,
    #[serde(default)]
    constraints: Option<Vec<ConstraintRow>>,
    #[serde(default)]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    witness: Option<Vec<f64>>,
    #[serde(default)]
    center: Option<Vec<f64>>,
    #[serde(default)]
    radius: Option<PositiveF64>,
    #[serde(default)]
    inner: Option<Box<DomainSpec>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    translation: Option<Vec<f64>>,
    #[serde(default)]
    parts: Option<Vec<DomainSpec>>,
}

/// A parsed and validated domain.
#[derive(Debug, Clone, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct DomainSpec(pub ConvexDomain);

fn point(v: Vec<f64>, dim: usize, what: &str) -> std::result::Result<Point, String> {
    if v.len() != dim {
        return Err(format!("{what} has {} coordinates, expected {dim}", v.len()));
    }
    Ok(Point::from_vec(v))
}

fn forbid(present: bool, field: &str, kind: &str) -> std::result::Result<(), String> {
    if present {
        Err(format!("field \"{field}\" is not allowed for kind \"{kind}\""))
    } else {
        Ok(())
    }
}

impl TryFrom<RawDomain> for DomainSpec {
    type Error = String;

    fn try_from(r: RawDomain) -> std::result::Result<Self, String> {
        let dim = r.dim;
        if dim == 0 {
            return Err("dim must be at least 1".into());
        }
        let check_inner_dim = |d: &ConvexDomain| {
            if d.dim() != dim {
                Err(format!("nested domain has dim {}, expected {dim}", d.dim()))
            } else {
                Ok(())
            }
        };
        let domain = match r.kind {
            Kind::Hpolytope => {
                for (present, f) in [
                    (r.center.is_some(), "center"),
                    (r.radius.is_some(), "radius"),
                    (r.inner.is_some(), "inner"),
                    (r.matrix.is_some(), "matrix"),
                    (r.translation.is_some(), "translation"),
                    (r.parts.is_some(), "parts"),
                ] {
                    forbid(present, f, "hpolytope")?;
                }
                let rows = r.constraints.ok_or("hpolytope needs \"constraints\"")?;
                if rows.is_empty() {
                    return Err("hpolytope needs at least one constraint".into());
                }
                for (j, row) in rows.iter().enumerate() {
                    if row.0.len() != dim + 1 {
                        return Err(format!(
                            "constraint {j} has {} entries, expected dim + 1 = {}",
                            row.0.len(),
                            dim + 1
                        ));
                    }
                }
                let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.0).collect();
                let witness = r.witness.map(|w| point(w, dim, "witness")).transpose()?;
                let vertices = r
                    .vertices
                    .map(|vs| {
                        vs.into_iter()
                            .enumerate()
                            .map(|(i, v)| point(v, dim, &format!("vertex {i}")))
                            .collect::<std::result::Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                ConvexDomain::Polytope(
                    HPolytope::from_rows(&rows, witness, vertices).map_err(|e| e.to_string())?,
                )
            }
            Kind::Ball => {
                for (present, f) in [
                    (r.constraints.is_some(), "constraints"),
                    (r.vertices.is_some(), "vertices"),
                    (r.witness.is_some(), "witness"),
                    (r.inner.is_some(), "inner"),
                    (r.matrix.is_some(), "matrix"),
                    (r.translation.is_some(), "translation"),
                    (r.parts.is_some(), "parts"),
                ] {
                    forbid(present, f, "ball")?;
                }
                let center = point(r.center.ok_or("ball needs \"center\"")?, dim, "center")?;
                let radius = r.radius.ok_or("ball needs \"radius\"")?.0;
                ConvexDomain::Ball(EuclideanBall::new(center, radius).map_err(|e| e.to_string())?)
            }
            Kind::AffineImage => {
                for (present, f) in [
                    (r.constraints.is_some(), "constraints"),
                    (r.vertices.is_some(), "vertices"),
                    (r.witness.is_some(), "witness"),
                    (r.center.is_some(), "center"),
                    (r.radius.is_some(), "radius"),
                    (r.parts.is_some(), "parts"),
                ] {
                    forbid(present, f, "affine_image")?;
                }
                let inner = r.inner.ok_or("affine_image needs \"inner\"")?.0;
                check_inner_dim(&inner)?;
                let rows = r.matrix.ok_or("affine_image needs \"matrix\"")?;
                if rows.len() != dim || rows.iter().any(|row| row.len() != dim) {
                    return Err(format!("matrix must be {dim} x {dim}"));
                }
                let m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
                let tr = match r.translation {
                    Some(t) => point(t, dim, "translation")?,
                    None => DVector::zeros(dim),
                };
                let map = AffineMap::new(m, tr).map_err(|e| e.to_string())?;
                inner.affine_image(&map).map_err(|e| e.to_string())?
            }
            Kind::Intersection => {
                for (present, f) in [
                    (r.constraints.is_some(), "constraints"),
                    (r.vertices.is_some(), "vertices"),
                    (r.center.is_some(), "center"),
                    (r.radius.is_some(), "radius"),
                    (r.inner.is_some(), "inner"),
                    (r.matrix.is_some(), "matrix"),
                    (r.translation.is_some(), "translation"),
                ] {
                    forbid(present, f, "intersection")?;
                }
                let parts: Vec<ConvexDomain> = r
                    .parts
                    .ok_or("intersection needs \"parts\"")?
                    .into_iter()
                    .map(|p| p.0)
                    .collect();
                for p in &parts {
                    check_inner_dim(p)?;
                }
                let witness = r.witness.map(|w| point(w, dim, "witness")).transpose()?;
                ConvexDomain::intersection(parts, witness).map_err(|e| e.to_string())?
            }
        };
        Ok(DomainSpec(domain))
    }
}

/// Parses a domain from JSON text.
///
/// Problems inside nested objects are reported by the JSON reader with their position;
/// problems with the top-level object itself are anchored at its closing brace.
pub fn parse_domain(text: &str) -> Result<ConvexDomain> {
    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<RawDomain>();
    let raw = match stream.next() {
        Some(Ok(raw)) => raw,
        Some(Err(e)) => return Err(Error::Parse(e.to_string())),
        None => return Err(Error::Parse("empty domain file".into())),
    };
    let end = stream.byte_offset();
    if !text[end..].trim().is_empty() {
        let (line, col) = line_col(text, end + (text[end..].len() - text[end..].trim_start().len()));
        return Err(Error::Parse(format!("trailing characters at line {line} column {col}")));
    }
    DomainSpec::try_from(raw).map(|s| s.0).map_err(|msg| {
        let (line, col) = line_col(text, end);
        Error::Parse(format!("{msg} at line {line} column {col}"))
    })
}

/// 1-based line and column of the character ending at byte `offset`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1);
    (line, col)
}

pub fn load_domain(path: &Path) -> Result<ConvexDomain> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_domain(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn vec_json(v: &DVector<f64>) -> Value {
    Value::from(v.iter().copied().collect::<Vec<f64>>())
}

/// Serializes a domain back into the file format. Polytopes are written with their
/// unit-normal constraints, witness and (if known) vertices.
pub fn domain_to_json(d: &ConvexDomain) -> Value {
    let dim = d.dim();
    match d {
        ConvexDomain::Polytope(p) => {
            let mut v = json!({
                "dim": dim,
                "kind": "hpolytope",
                "constraints": p.rows(),
                "witness": vec_json(p.witness()),
            });
            if let Some(vs) = p.vertices() {
                v["vertices"] = Value::from(vs.iter().map(vec_json).collect::<Vec<_>>());
            }
            v
        }
        ConvexDomain::Ball(b) => json!({
            "dim": dim,
            "kind": "ball",
            "center": vec_json(b.center()),
            "radius": b.radius(),
        }),
        ConvexDomain::Affine(a) => {
            let m = a.map.matrix();
            let rows: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| m[(i, j)]).collect()).collect();
            json!({
                "dim": dim,
                "kind": "affine_image",
                "inner": domain_to_json(&a.inner),
                "matrix": rows,
                "translation": vec_json(a.map.translation()),
            })
        }
        ConvexDomain::Intersection(i) => json!({
            "dim": dim,
            "kind": "intersection",
            "parts": i.parts.iter().map(domain_to_json).collect::<Vec<_>>(),
            "witness": vec_json(&i.base),
        }),
    }
}

/// Summary used by reports: kind and dimension.
#[derive(Debug, Clone, Serialize)]
pub struct DomainSummary {
    pub kind: &'static str,
    pub dim: usize,
}

impl From<&ConvexDomain> for DomainSummary {
    fn from(d: &ConvexDomain) -> Self {
        let kind = match d {
            ConvexDomain::Polytope(_) => "hpolytope",
            ConvexDomain::Ball(_) => "ball",
            ConvexDomain::Affine(_) => "affine_image",
            ConvexDomain::Intersection(_) => "intersection",
        };
        DomainSummary { kind, dim: d.dim() }
    }
}
