//! Nearest points ("feet") of convex sets in the Funk metric, their optimality
//! certificates, and perpendicularity of rays to hyperplane sections.

use nalgebra::DVector;
use serde::Serialize;

use crate::convex::{ConvexDomain, HPolytope, Hit, LinearForm};
use crate::error::{check_dim, check_finite};
use crate::lp::{LinearProgram, LpOutcome};
use crate::metric::{funk, funk_with_hit, polytope_containment, WeakDistance};
use crate::search::{bisect_last_true, golden_section};
use crate::{Error, Point, Result, Tolerances};

/// A nearest point `y` of a set `A` as seen from `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Foot {
    pub point: Point,
    pub distance: WeakDistance,
    /// Affine form vanishing at `point`, negative at `x` and nonnegative on `A`, whose
    /// level sets are parallel to a support hyperplane of the domain at the exit point
    /// of `x → point`. Absent when the distance is 0.
    pub certificate: Option<LinearForm>,
    /// Segment parameter of the foot (segment searches only).
    pub parameter: Option<f64>,
    /// Parameter interval on which the minimum is attained (segment searches only).
    pub plateau: Option<(f64, f64)>,
}

/// Bisection record of [`nearest_on_convex_traced`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionTrace {
    /// `(infeasible, feasible)` radius bracket after each step.
    pub brackets: Vec<(f64, f64)>,
    /// Minimal radius from a single linear program, for cross-checking.
    pub exact_rho: f64,
}

fn check_interior(domain: &ConvexDomain, x: &Point) -> Result<()> {
    check_dim(domain.dim(), x.len())?;
    check_finite(x)?;
    let m = domain.margin(x);
    if m <= 0.0 {
        return Err(Error::NotInterior { margin: m });
    }
    Ok(())
}

/// `h - h(y)` for the supporting functional `h` at the exit point of `x → y`.
fn separating_form(domain: &ConvexDomain, hit: &Hit, y: &Point) -> Result<Option<LinearForm>> {
    match hit {
        Hit::Finite { point, .. } => {
            let h = domain.supporting_functional(point)?;
            let level = h.eval(y);
            Ok(Some(LinearForm::new(h.coeffs, h.offset - level)))
        }
        Hit::AtInfinity { .. } => Ok(None),
    }
}

/// Parameter of `x` on the segment `[p, q]`, if it lies there.
fn parameter_on_segment(x: &Point, p: &Point, q: &Point) -> Option<f64> {
    let w = q - p;
    let ww = w.norm_squared();
    let s = (x - p).dot(&w) / ww;
    if !(0.0..=1.0).contains(&s) {
        return None;
    }
    let off = (x - p - &w * s).norm();
    (off <= Tolerances::DEFAULT.eps_line * ww.sqrt()).then_some(s)
}

/// Minimizes `F(x, ·)` over the segment `[p, q]`.
///
/// `s ↦ F(x, p + s (q - p))` is convex, so a golden-section pass locates the minimum and
/// the sign of its one-sided slope (read off the supporting functional at the exit
/// point) pins down the minimizing interval. When that interval has positive length the
/// midpoint is returned.
pub fn nearest_on_segment(domain: &ConvexDomain, x: &Point, seg: (&Point, &Point)) -> Result<Foot> {
    let (p, q) = seg;
    check_interior(domain, x)?;
    check_interior(domain, p)?;
    check_interior(domain, q)?;
    let w = q - p;
    if w.norm() <= Tolerances::DEFAULT.eps_pt {
        return Err(Error::CoincidentPoints);
    }
    if let Some(s) = parameter_on_segment(x, p, q) {
        return Ok(Foot {
            point: x.clone(),
            distance: WeakDistance::ZERO,
            certificate: None,
            parameter: Some(s),
            plateau: Some((s, s)),
        });
    }
    let at = |s: f64| p + &w * s;
    let value = |s: f64| funk(domain, x, &at(s)).map(|d| d.value()).unwrap_or(f64::INFINITY);
    let coarse = golden_section(value, 0.0, 1.0, 1e-6);

    // right derivative of the convex profile, up to a positive factor: the largest
    // ⟨n, w⟩ / ⟨n, a - x⟩ over outward normals n at the exit point a
    let tight = Tolerances {
        eps_face: 1e-12,
        ..Tolerances::DEFAULT
    };
    let slope = |s: f64| -> f64 {
        let y = at(s);
        let a = match funk_with_hit(domain, x, &y) {
            Ok((d, Some(Hit::Finite { point, .. }))) if d.value() > 0.0 => point,
            _ => return 0.0,
        };
        let ax = &a - x;
        let mut gens = domain.normal_cone(&a, &tight).map(|c| c.generators).unwrap_or_default();
        if gens.is_empty() {
            if let Ok(h) = domain.supporting_functional(&a) {
                gens.push(h.coeffs);
            }
        }
        let v = gens
            .iter()
            .map(|n| n.dot(&w) / n.dot(&ax))
            .fold(f64::NEG_INFINITY, f64::max);
        if !v.is_finite() || v.abs() <= 1e-12 * w.norm() / ax.norm() {
            0.0
        } else {
            v
        }
    };
    let tol = 1e-13;
    let lo = bisect_last_true(|s| slope(s) < 0.0, 0.0, 1.0, tol);
    let hi = bisect_last_true(|s| slope(s) <= 0.0, 0.0, 1.0, tol).max(lo);
    let mut s = 0.5 * (lo + hi);
    // the polish can only be fooled by a failed cast; fall back to the coarse minimum
    if value(s) > coarse.value + 1e-9 {
        s = coarse.x;
    }
    let point = at(s);
    let (distance, hit) = funk_with_hit(domain, x, &point)?;
    let certificate = match hit {
        Some(h) if distance.value() > 0.0 => separating_form(domain, &h, &point)?,
        _ => None,
    };
    Ok(Foot {
        point,
        distance,
        certificate,
        parameter: Some(s),
        plateau: Some((lo, hi)),
    })
}

/// Constraint rows `(a, b)` meaning `a·y <= b` of the closed forward ball of Funk
/// radius `-log(1 - lambda)` around `x`.
fn forward_ball_rows(domain: &HPolytope, x: &Point, lambda: f64) -> Vec<(Vec<f64>, f64)> {
    domain
        .normals()
        .iter()
        .zip(domain.offsets())
        .map(|(c, s)| {
            let cx = c.dot(x);
            (c.as_slice().to_vec(), cx + lambda * (s - cx))
        })
        .collect()
}

/// Smallest uniform violation `τ` with which `B⁺(x, ρ) ∩ closure(A)` is satisfiable,
/// and a point attaining it. Nonpositive `τ` means the intersection is nonempty.
fn phase_one(domain: &HPolytope, x: &Point, a_set: &HPolytope, rho: f64) -> Result<(f64, Point)> {
    let n = domain.dim();
    let lambda = -(-rho).exp_m1();
    let mut lp = LinearProgram::new(n + 1);
    let mut cost = vec![0.0; n + 1];
    cost[n] = 1.0;
    lp.set_objective(&cost);
    let mut add = |a: &[f64], b: f64| {
        let mut row = a.to_vec();
        row.push(-1.0);
        lp.add_le(&row, b);
    };
    for (a, b) in forward_ball_rows(domain, x, lambda) {
        add(&a, b);
    }
    for (c, r) in a_set.normals().iter().zip(a_set.offsets()) {
        add(c.as_slice(), *r);
    }
    let mut floor = vec![0.0; n + 1];
    floor[n] = -1.0;
    lp.add_le(&floor, 1.0);
    match lp.minimize()? {
        LpOutcome::Optimal { x: sol, value } => Ok((value, DVector::from_column_slice(&sol[..n]))),
        _ => Err(Error::Lp("phase-one problem has no optimum".into())),
    }
}

/// `min λ` such that `y` lies in the homothet of `Ω` with ratio `λ` about `x` and in
/// `closure(A)`.
fn exact_lambda(domain: &HPolytope, x: &Point, a_set: &HPolytope) -> Result<(f64, Point)> {
    let n = domain.dim();
    let mut lp = LinearProgram::new(n + 1);
    let mut cost = vec![0.0; n + 1];
    cost[n] = 1.0;
    lp.set_objective(&cost);
    for (c, s) in domain.normals().iter().zip(domain.offsets()) {
        let cx = c.dot(x);
        let mut row = c.as_slice().to_vec();
        row.push(-(s - cx));
        lp.add_le(&row, cx);
    }
    for (c, r) in a_set.normals().iter().zip(a_set.offsets()) {
        let mut row = c.as_slice().to_vec();
        row.push(0.0);
        lp.add_le(&row, *r);
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lp.add_le(&cap, 1.0);
    lp.set_nonneg(n);
    match lp.minimize()? {
        LpOutcome::Optimal { x: sol, value } => Ok((value, DVector::from_column_slice(&sol[..n]))),
        _ => Err(Error::Lp("minimal-ratio problem has no optimum".into())),
    }
}

const FEASIBLE_SLACK: f64 = 1e-13;
const RHO_WIDTH: f64 = 1e-11;

/// Nearest point of the polytope `A ⊆ closure(Ω)` from `x`, by bisection on the radius
/// of the forward ball around `x`. Each step is one linear feasibility problem, since
/// forward balls of a polytope are polytopes.
pub fn nearest_on_convex(domain: &HPolytope, x: &Point, a_set: &HPolytope) -> Result<Foot> {
    nearest_on_convex_traced(domain, x, a_set).map(|(f, _)| f)
}

pub fn nearest_on_convex_traced(domain: &HPolytope, x: &Point, a_set: &HPolytope) -> Result<(Foot, ProjectionTrace)> {
    check_dim(domain.dim(), a_set.dim())?;
    let omega = ConvexDomain::Polytope(domain.clone());
    check_interior(&omega, x)?;
    polytope_containment(a_set, domain)?;
    let tol = Tolerances::DEFAULT;
    if a_set.margin(x) >= -tol.eps_geom * (1.0 + x.amax()) {
        let foot = Foot {
            point: x.clone(),
            distance: WeakDistance::ZERO,
            certificate: None,
            parameter: None,
            plateau: None,
        };
        return Ok((
            foot,
            ProjectionTrace {
                brackets: vec![],
                exact_rho: 0.0,
            },
        ));
    }
    let feasible = |rho: f64| -> Result<Option<Point>> {
        let (tau, y) = phase_one(domain, x, a_set, rho)?;
        Ok((tau <= FEASIBLE_SLACK).then_some(y))
    };
    let mut brackets = Vec::new();
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = loop {
        if let Some(y) = feasible(hi)? {
            break y;
        }
        lo = hi;
        hi *= 2.0;
        brackets.push((lo, hi));
        if hi > 1e3 {
            return Err(Error::Lp("no forward ball meets the target set".into()));
        }
    };
    brackets.push((lo, hi));
    while hi - lo > RHO_WIDTH {
        let mid = 0.5 * (lo + hi);
        match feasible(mid)? {
            Some(y) => {
                hi = mid;
                best = y;
            }
            None => lo = mid,
        }
        brackets.push((lo, hi));
    }
    let (lambda, _) = exact_lambda(domain, x, a_set)?;
    let exact_rho = -(-lambda).ln_1p();
    let (distance, hit) = funk_with_hit(&omega, x, &best)?;
    let certificate = match hit {
        Some(h) if distance.value() > 0.0 => separating_form(&omega, &h, &best)?,
        _ => None,
    };
    Ok((
        Foot {
            point: best,
            distance,
            certificate,
            parameter: None,
            plateau: None,
        },
        ProjectionTrace { brackets, exact_rho },
    ))
}

/// Checks that `y ∈ closure(A)` is a nearest point from `x`: either `F(x, y) = 0`, or
/// some supporting functional `h` of `Ω` at the exit point of `x → y` attains its
/// minimum over `A` at `y`. The second condition is decided exactly, as a linear
/// feasibility problem between the normal cone of `Ω` at the exit point and the normal
/// cone of `A` at `y`.
pub fn foot_certificate(domain: &ConvexDomain, x: &Point, y: &Point, a_set: &HPolytope) -> Result<bool> {
    foot_certificate_with(domain, x, y, a_set, &Tolerances::DEFAULT)
}

pub fn foot_certificate_with(
    domain: &ConvexDomain,
    x: &Point,
    y: &Point,
    a_set: &HPolytope,
    tol: &Tolerances,
) -> Result<bool> {
    check_dim(domain.dim(), a_set.dim())?;
    check_dim(domain.dim(), y.len())?;
    let m = a_set.margin(y);
    if m < -tol.eps_geom * (1.0 + y.amax()) {
        return Err(Error::InvalidArgument(format!("candidate foot lies outside the target set (margin {m:e})")));
    }
    let (distance, hit) = funk_with_hit(domain, x, y)?;
    let a = match hit {
        Some(Hit::Finite { point, .. }) if distance.value() > 0.0 => point,
        _ => return Ok(true),
    };
    let generators = domain.normal_cone(&a, tol)?.generators;
    let active: Vec<&DVector<f64>> = (0..a_set.num_constraints())
        .filter(|&i| a_set.slack(i, y) <= tol.eps_face * (1.0 + a_set.offsets()[i].abs()))
        .map(|i| &a_set.normals()[i])
        .collect();
    if generators.is_empty() {
        return Ok(false);
    }
    Ok(cone_residual(&generators, &active)? <= tol.eps_face)
}

/// `min ‖Σ μ g + Σ ν ψ‖_∞` over `μ, ν ≥ 0` with `Σ μ = 1`.
fn cone_residual(generators: &[DVector<f64>], active: &[&DVector<f64>]) -> Result<f64> {
    let n = generators[0].len();
    let k = generators.len();
    let vars = k + active.len() + 1;
    let e = vars - 1;
    let mut lp = LinearProgram::new(vars);
    let mut cost = vec![0.0; vars];
    cost[e] = 1.0;
    lp.set_objective(&cost);
    for r in 0..n {
        let mut row: Vec<f64> = generators.iter().chain(active.iter().copied()).map(|g| g[r]).collect();
        row.push(-1.0);
        lp.add_le(&row, 0.0);
        let mut neg: Vec<f64> = row[..vars - 1].iter().map(|v| -v).collect();
        neg.push(-1.0);
        lp.add_le(&neg, 0.0);
    }
    let mut norm = vec![0.0; vars];
    norm[..k].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(&norm, 1.0);
    for i in 0..vars {
        lp.set_nonneg(i);
    }
    match lp.minimize()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => Err(Error::Lp("normal-cone residual problem has no optimum".into())),
    }
}

/// True when the ray from `ray_from` to the boundary point `boundary_hit` is
/// perpendicular to the section of the domain by the hyperplane `plane = 0`, that is,
/// when the hyperplane is parallel to some support hyperplane at `boundary_hit`.
pub fn is_perpendicular(domain: &ConvexDomain, ray_from: &Point, boundary_hit: &Point, plane: &LinearForm) -> Result<bool> {
    is_perpendicular_with(domain, ray_from, boundary_hit, plane, &Tolerances::DEFAULT)
}

pub fn is_perpendicular_with(
    domain: &ConvexDomain,
    ray_from: &Point,
    boundary_hit: &Point,
    plane: &LinearForm,
    tol: &Tolerances,
) -> Result<bool> {
    check_dim(domain.dim(), plane.coeffs.len())?;
    check_interior(domain, ray_from)?;
    let cn = plane.coeffs.norm();
    if !(cn > 0.0) {
        return Err(Error::InvalidArgument("hyperplane with zero normal".into()));
    }
    let off = plane.eval(ray_from) / cn;
    if off.abs() > tol.eps_geom * (1.0 + ray_from.amax()) {
        return Err(Error::InvalidArgument(format!(
            "hyperplane does not pass through the ray origin (offset {off:e})"
        )));
    }
    let generators = domain.normal_cone(boundary_hit, tol)?.generators;
    if generators.is_empty() {
        return Ok(false);
    }
    let unit = &plane.coeffs / cn;
    for sign in [1.0, -1.0] {
        if distance_to_cone(&generators, &(&unit * sign))? <= tol.eps_para {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `min ‖Σ μ g - c‖_∞` over `μ ≥ 0`.
fn distance_to_cone(generators: &[DVector<f64>], c: &DVector<f64>) -> Result<f64> {
    let n = c.len();
    let k = generators.len();
    let mut lp = LinearProgram::new(k + 1);
    let mut cost = vec![0.0; k + 1];
    cost[k] = 1.0;
    lp.set_objective(&cost);
    for r in 0..n {
        let mut row: Vec<f64> = generators.iter().map(|g| g[r]).collect();
        row.push(-1.0);
        lp.add_le(&row, c[r]);
        let mut neg: Vec<f64> = generators.iter().map(|g| -g[r]).collect();
        neg.push(-1.0);
        lp.add_le(&neg, -c[r]);
    }
    for i in 0..=k {
        lp.set_nonneg(i);
    }
    match lp.minimize()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => Err(Error::Lp("cone distance problem has no optimum".into())),
    }
}
