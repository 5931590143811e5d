//! The tangent norm of the Funk metric: the Minkowski functional of `Ω - p`.

use serde::Serialize;

use crate::convex::{ConvexDomain, HPolytope};
use crate::error::{check_dim, check_finite};
use crate::metric::funk;
use crate::{Error, Point, Result};

/// Smallest step accepted by [`finite_difference_check`].
pub const MIN_STEP: f64 = 1e-5;

/// The weak Minkowski norm at an interior point; its closed unit ball is `closure(Ω) - p`.
#[derive(Debug, Clone, Copy)]
pub struct TangentNorm<'a> {
    domain: &'a ConvexDomain,
    base: &'a Point,
}

impl<'a> TangentNorm<'a> {
    pub fn new(domain: &'a ConvexDomain, base: &'a Point) -> Result<Self> {
        check_dim(domain.dim(), base.len())?;
        check_finite(base)?;
        let m = domain.margin(base);
        if m <= 0.0 {
            return Err(Error::NotInterior { margin: m });
        }
        Ok(TangentNorm { domain, base })
    }

    pub fn base(&self) -> &Point {
        self.base
    }

    /// `1 / t*` with `t* = sup { t : p + t v ∈ Ω }`, and 0 along recession directions.
    pub fn eval(&self, v: &Point) -> Result<f64> {
        check_dim(self.domain.dim(), v.len())?;
        check_finite(v)?;
        if v.iter().all(|c| *c == 0.0) {
            return Ok(0.0);
        }
        Ok(match self.domain.cast(self.base, v) {
            Some(t) => 1.0 / t,
            None => 0.0,
        })
    }

    /// `Φ_p(x, y)`, the norm of `y - x`.
    pub fn between(&self, x: &Point, y: &Point) -> Result<f64> {
        self.eval(&(y - x))
    }
}

pub fn tangent_norm(domain: &ConvexDomain, p: &Point, v: &Point) -> Result<f64> {
    TangentNorm::new(domain, p)?.eval(v)
}

/// The same norm on a polytope as a supremum over the constraint functionals:
/// `max(0, max_j ⟨c_j, v⟩ / slack_j(p))`.
pub fn polytope_tangent_sup(poly: &HPolytope, p: &Point, v: &Point) -> Result<f64> {
    check_dim(poly.dim(), p.len())?;
    check_dim(poly.dim(), v.len())?;
    let mut best = 0.0f64;
    for j in 0..poly.num_constraints() {
        let s = poly.slack(j, p);
        if s <= 0.0 {
            return Err(Error::NotInterior { margin: s });
        }
        best = best.max(poly.normals()[j].dot(v) / s);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub t: f64,
    /// `F(p + t x, p + t y) / t`.
    pub quotient: f64,
    /// `|quotient - Φ_p(x, y)|`.
    pub error: f64,
    /// Rounding level of `quotient`: storing `p + t x` and `p + t y` moves each by up
    /// to one ulp per coordinate, which `F` turns into `Φ_p` of that shift.
    pub noise: f64,
}

/// Difference quotients of the Funk distance at scale `t` against the tangent norm.
pub fn finite_difference_check(
    domain: &ConvexDomain,
    p: &Point,
    x: &Point,
    y: &Point,
    t_list: &[f64],
) -> Result<Vec<DifferenceRow>> {
    let norm = TangentNorm::new(domain, p)?;
    let target = norm.between(x, y)?;
    let n = p.len();
    let mut unit_cost = 0.0;
    for i in 0..n {
        let e = Point::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
        unit_cost += norm.eval(&e)?.max(norm.eval(&-e)?);
    }
    let scale = x.amax().max(y.amax());
    t_list
        .iter()
        .map(|&t| {
            if !(t.is_finite() && t >= MIN_STEP) {
                return Err(Error::InvalidArgument(format!("step {t} is below {MIN_STEP:e}")));
            }
            let quotient = funk(domain, &(p + x * t), &(p + y * t))?.value() / t;
            Ok(DifferenceRow {
                t,
                quotient,
                error: (quotient - target).abs(),
                noise: f64::EPSILON * (p.amax() + t * scale) * unit_cost / t,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    /// Least-squares slope of `log error` against `log t`.
    pub order: f64,
    /// Smallest `C` with `error(t) <= C t` on the rows.
    pub constant: f64,
}

/// Rows whose error is within this factor of their noise are left out of the fit.
pub const NOISE_MARGIN: f64 = 4.0;

/// Empirical convergence order. `None` when fewer than two rows carry an error above
/// rounding level, in which case there is nothing to fit.
pub fn fit_order(rows: &[DifferenceRow]) -> Option<OrderFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 1e-14 && r.error > NOISE_MARGIN * r.noise)
        .map(|r| (r.t.ln(), r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let constant = rows.iter().map(|r| r.error / r.t).fold(0.0, f64::max);
    Some(OrderFit {
        order: sxy / sxx,
        constant,
    })
}
