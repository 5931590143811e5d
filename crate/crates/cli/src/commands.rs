use std::fmt::Write;
use std::path::Path;

use funk_core::balls::{backward_ball, forward_ball, sphere_sample_tagged};
use funk_core::convex::file::load_domain;
use funk_core::convex::{ConvexDomain, HPolytope, Hit};
use funk_core::geodesy::{common_face, verify_geodesic_with, verify_hilbert_geodesic};
use funk_core::metric::{funk_with_hit, hilbert, max_symmetrized, reverse_funk, Ambient, RelativeFunk};
use funk_core::projection::{foot_certificate_with, nearest_on_convex, nearest_on_segment};
use funk_core::tangent::{finite_difference_check, fit_order, tangent_norm};
use funk_core::Point;
use serde_json::{json, Value};

use crate::output::{num, point, round_sig};
use crate::{CliError, Ctx, Format, Metric};

fn domain(path: &Path) -> Result<ConvexDomain, CliError> {
    Ok(load_domain(path)?)
}

fn polytope(path: &Path) -> Result<HPolytope, CliError> {
    domain(path)?
        .as_polytope()
        .ok_or_else(|| CliError::Validation(format!("{} is not a polytope", path.display())))
}

fn json_point(p: &Point) -> Value {
    Value::from(p.iter().map(|c| round_sig(*c)).collect::<Vec<_>>())
}

fn hit_text(label: &str, hit: &Option<Hit>) -> String {
    match hit {
        Some(Hit::Finite { point: p, .. }) => format!("hit {label} {}", point(p)),
        Some(Hit::AtInfinity { direction }) => format!("hit {label} at infinity along {}", point(direction)),
        None => format!("hit {label} none"),
    }
}

fn hit_json(label: &str, hit: &Option<Hit>) -> Value {
    match hit {
        Some(Hit::Finite { point: p, .. }) => json!({"ray": label, "point": json_point(p)}),
        Some(Hit::AtInfinity { direction }) => json!({"ray": label, "direction": json_point(direction)}),
        None => json!({"ray": label}),
    }
}

pub fn dist(ctx: &Ctx, file: &Path, metric: Metric, x: &Point, y: &Point, within: Option<&Path>) -> Result<(), CliError> {
    let omega = domain(file)?;
    let forward = || funk_with_hit(&omega, x, y);
    let backward = || funk_with_hit(&omega, y, x);
    let (value, hits) = match metric {
        Metric::Funk => {
            let (d, h) = forward()?;
            (d.value(), vec![("x->y", h)])
        }
        Metric::Rfunk => (reverse_funk(&omega, x, y)?.value(), vec![("y->x", backward()?.1)]),
        Metric::Hilbert => (
            hilbert(&omega, x, y)?.value(),
            vec![("x->y", forward()?.1), ("y->x", backward()?.1)],
        ),
        Metric::Maxsym => (
            max_symmetrized(&omega, x, y)?.value(),
            vec![("x->y", forward()?.1), ("y->x", backward()?.1)],
        ),
        Metric::Relfunk => {
            let u = within.map(domain).transpose()?;
            let ambient = match &u {
                Some(u) => Ambient::Domain(u),
                None => Ambient::AffinePatch,
            };
            let d = RelativeFunk::new(&omega, ambient)?.distance(x, y)?;
            let mut hits = vec![("x->y", forward()?.1)];
            if let Some(u) = &u {
                hits.push(("y->x in U", funk_with_hit(u, y, x)?.1));
            }
            (d.value(), hits)
        }
    };
    let text = match ctx.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("{}\n", num(value));
            for (label, h) in &hits {
                writeln!(s, "{}", hit_text(label, h)).unwrap();
            }
            s
        }
        Format::Json => {
            let v = json!({
                "seed": ctx.seed,
                "metric": metric.name(),
                "value": round_sig(value),
                "hits": hits.iter().map(|(l, h)| hit_json(l, h)).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        other => return Err(CliError::Validation(format!("dist cannot write {}", other.name()))),
    };
    ctx.emit(&text)
}

pub fn ball(ctx: &Ctx, file: &Path, x: &Point, rho: f64, backward: bool, k: usize) -> Result<(), CliError> {
    let omega = domain(file)?;
    let b = if backward { backward_ball(&omega, x, rho)? } else { forward_ball(&omega, x, rho)? };
    let samples = sphere_sample_tagged(&b, k, ctx.seed)?;
    let text = match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = format!("# seed={}\n", ctx.seed);
            let cols: Vec<String> = (1..=omega.dim()).map(|i| format!("x{i}")).collect();
            writeln!(s, "{},on_level_set", cols.join(",")).unwrap();
            for sp in &samples {
                writeln!(s, "{},{}", point(&sp.point), sp.on_level_set).unwrap();
            }
            s
        }
        Format::Svg => crate::svg::ball_picture(&omega, b.realized(), x, &samples)?,
        Format::Json => {
            let v = json!({
                "seed": ctx.seed,
                "orientation": if backward { "backward" } else { "forward" },
                "center": json_point(x),
                "radius": round_sig(rho),
                "factor": round_sig(b.factor()),
                "samples": samples.iter().map(|sp| json!({"point": json_point(&sp.point), "on_level_set": sp.on_level_set})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Format::Text => return Err(CliError::Validation("ball writes csv, svg or json".into())),
    };
    ctx.emit(&text)
}

pub fn geodesic_verify(ctx: &Ctx, file: &Path, metric: Metric, line: &[Point]) -> Result<(), CliError> {
    let omega = domain(file)?;
    let (ok, defect) = match metric {
        Metric::Funk => verify_geodesic_with(&omega, line, &ctx.tol)?,
        Metric::Hilbert => verify_hilbert_geodesic(&omega, line, &ctx.tol)?,
        other => return Err(CliError::Validation(format!("geodesic verify supports funk and hilbert, not {}", other.name()))),
    };
    let face = match (&omega, metric) {
        (ConvexDomain::Polytope(p), Metric::Funk) => common_face(p, line, &ctx.tol)?,
        _ => None,
    };
    let text = match ctx.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("geodesic {ok}\ndefect {}\n", num(defect));
            if let Some(f) = &face {
                let f: Vec<String> = f.iter().map(usize::to_string).collect();
                writeln!(s, "common_face {}", f.join(",")).unwrap();
            }
            s
        }
        Format::Json => {
            let v = json!({"seed": ctx.seed, "metric": metric.name(), "geodesic": ok, "defect": round_sig(defect), "common_face": face});
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        other => return Err(CliError::Validation(format!("geodesic verify cannot write {}", other.name()))),
    };
    ctx.emit(&text)?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Failure(format!("not a geodesic (defect {})", num(defect))))
    }
}

pub enum Target<'a> {
    Segment(&'a Point, &'a Point),
    Set(&'a Path),
}

pub fn project(ctx: &Ctx, file: &Path, x: &Point, target: Target<'_>) -> Result<(), CliError> {
    let (foot, certified) = match target {
        Target::Segment(p, q) => (nearest_on_segment(&domain(file)?, x, (p, q))?, None),
        Target::Set(path) => {
            let poly = polytope(file)?;
            let a = polytope(path)?;
            let foot = nearest_on_convex(&poly, x, &a)?;
            let ok = foot_certificate_with(&poly.clone().into(), x, &foot.point, &a, &ctx.tol)?;
            (foot, Some(ok))
        }
    };
    let text = match ctx.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("foot {}\ndistance {}\n", point(&foot.point), num(foot.distance.value()));
            if let Some(t) = foot.parameter {
                writeln!(s, "parameter {}", num(t)).unwrap();
            }
            if let Some((lo, hi)) = foot.plateau {
                writeln!(s, "plateau {} {}", num(lo), num(hi)).unwrap();
            }
            if let Some(c) = certified {
                writeln!(s, "certified {c}").unwrap();
            }
            s
        }
        Format::Json => {
            let v = json!({
                "seed": ctx.seed,
                "foot": json_point(&foot.point),
                "distance": round_sig(foot.distance.value()),
                "parameter": foot.parameter.map(round_sig),
                "plateau": foot.plateau.map(|(a, b)| [round_sig(a), round_sig(b)]),
                "certified": certified,
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        other => return Err(CliError::Validation(format!("project cannot write {}", other.name()))),
    };
    ctx.emit(&text)?;
    match certified {
        Some(false) => Err(CliError::Failure("foot failed its certificate".into())),
        _ => Ok(()),
    }
}

pub fn tangent(ctx: &Ctx, file: &Path, p: &Point, v: &Point, steps: &[f64]) -> Result<(), CliError> {
    let omega = domain(file)?;
    let norm = tangent_norm(&omega, p, v)?;
    let rows = if steps.is_empty() {
        vec![]
    } else {
        finite_difference_check(&omega, p, &Point::zeros(p.len()), v, steps)?
    };
    let fit = fit_order(&rows);
    let text = match ctx.format.unwrap_or(Format::Text) {
        Format::Text => {
            let mut s = format!("norm {}\n", num(norm));
            for r in &rows {
                writeln!(s, "t {} quotient {} error {}", num(r.t), num(r.quotient), num(r.error)).unwrap();
            }
            if let Some(f) = fit {
                writeln!(s, "order {}", num(f.order)).unwrap();
            }
            s
        }
        Format::Json => {
            let v = json!({
                "seed": ctx.seed,
                "norm": round_sig(norm),
                "rows": rows.iter().map(|r| json!({"t": r.t, "quotient": round_sig(r.quotient), "error": round_sig(r.error)})).collect::<Vec<_>>(),
                "order": fit.map(|f| round_sig(f.order)),
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        other => return Err(CliError::Validation(format!("tangent cannot write {}", other.name()))),
    };
    ctx.emit(&text)
}
