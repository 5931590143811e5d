//! Plain SVG 1.1 for planar domains: 1 unit = 100 px, y axis pointing up.

use std::f64::consts::TAU;
use std::fmt::Write;

use funk_core::balls::SpherePoint;
use funk_core::convex::{ConvexDomain, Hit};
use funk_core::Point;

use crate::output::num;
use crate::CliError;

pub const PX_PER_UNIT: f64 = 100.0;
pub const CURVE_SAMPLES: usize = 256;
const PAD: f64 = 0.1;

/// Boundary polygon: exact vertices for polytopes, otherwise rays cast from the base
/// point at equally spaced angles.
pub fn outline(domain: &ConvexDomain) -> Result<Vec<Point>, CliError> {
    if domain.dim() != 2 {
        return Err(CliError::Validation(format!("svg needs a planar domain, got dimension {}", domain.dim())));
    }
    if let Some(poly) = domain.as_polytope() {
        if poly.is_bounded()? {
            return Ok(poly.polygon_vertices()?);
        }
        return Err(CliError::Validation("svg needs a bounded domain".into()));
    }
    let base = domain.base_point();
    (0..CURVE_SAMPLES)
        .map(|i| {
            let a = TAU * i as f64 / CURVE_SAMPLES as f64;
            let target = base + Point::from_vec(vec![a.cos(), a.sin()]);
            match domain.ray_boundary(base, &target)? {
                Hit::Finite { point, .. } => Ok(point),
                Hit::AtInfinity { .. } => Err(CliError::Validation("svg needs a bounded domain".into())),
            }
        })
        .collect()
}

struct Frame {
    min_x: f64,
    max_y: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn around(points: &[Point]) -> Frame {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        Frame {
            min_x: lo[0] - PAD,
            max_y: hi[1] + PAD,
            width: (hi[0] - lo[0] + 2.0 * PAD) * PX_PER_UNIT,
            height: (hi[1] - lo[1] + 2.0 * PAD) * PX_PER_UNIT,
        }
    }

    fn x(&self, p: &Point) -> String {
        num((p[0] - self.min_x) * PX_PER_UNIT)
    }

    fn y(&self, p: &Point) -> String {
        num((self.max_y - p[1]) * PX_PER_UNIT)
    }

    fn points(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|p| format!("{},{}", self.x(p), self.y(p)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The domain outline, the realized ball outline, the center and the sphere samples.
pub fn ball_picture(domain: &ConvexDomain, ball: &ConvexDomain, center: &Point, samples: &[SpherePoint]) -> Result<String, CliError> {
    let omega = outline(domain)?;
    let realized = outline(ball)?;
    let frame = Frame::around(&omega);
    let mut s = String::new();
    let w = num(frame.width);
    let h = num(frame.height);
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(s, r#"  <polygon class="domain" points="{}" fill="none" stroke="black" stroke-width="1"/>"#, frame.points(&omega)).unwrap();
    writeln!(s, r##"  <polygon class="ball" points="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##, frame.points(&realized)).unwrap();
    writeln!(s, r#"  <circle class="center" cx="{}" cy="{}" r="2.5" fill="black"/>"#, frame.x(center), frame.y(center)).unwrap();
    for sp in samples {
        let fill = if sp.on_level_set { "#d62728" } else { "#999999" };
        writeln!(
            s,
            r#"  <circle class="sample" cx="{}" cy="{}" r="1.5" fill="{fill}"/>"#,
            frame.x(&sp.point),
            frame.y(&sp.point)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}
