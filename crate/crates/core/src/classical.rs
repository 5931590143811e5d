//! Division ratios, the Menelaus and Ceva products, cross ratios, and a numerical
//! replay of the perspectivity argument for the Funk triangle inequality.

use nalgebra::{Vector3, DVector};
use rand::Rng;
use serde::Serialize;

use crate::convex::{ConvexDomain, Hit};
use crate::error::{check_dim, check_finite};
use crate::{Error, Point, Result, Tolerances};

/// Signed division ratio `t` with `P = t B + (1 - t) A`. Negative exactly when `A` lies
/// between `B` and `P`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SignedRatio(f64);

impl SignedRatio {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_points(points: &[&Point]) -> Result<()> {
    let n = points[0].len();
    for p in points {
        check_dim(n, p.len())?;
        check_finite(p)?;
    }
    Ok(())
}

pub fn division_ratio(a: &Point, b: &Point, p: &Point) -> Result<SignedRatio> {
    division_ratio_with(a, b, p, &Tolerances::DEFAULT)
}

pub fn division_ratio_with(a: &Point, b: &Point, p: &Point, tol: &Tolerances) -> Result<SignedRatio> {
    check_points(&[a, b, p])?;
    let w = b - a;
    let ww = w.norm_squared();
    if ww.sqrt() <= tol.eps_pt {
        return Err(Error::CoincidentPoints);
    }
    let t = (p - a).dot(&w) / ww;
    let off = (p - a - &w * t).norm() / ww.sqrt();
    if off > tol.eps_line {
        return Err(Error::NotCollinear(off));
    }
    Ok(SignedRatio(t))
}

/// Area of a triangle in any dimension.
fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    let u = b - a;
    let v = c - a;
    let g = u.norm_squared() * v.norm_squared() - u.dot(&v).powi(2);
    0.5 * g.max(0.0).sqrt()
}

fn check_triangle(a: &Point, b: &Point, c: &Point, tol: &Tolerances) -> Result<()> {
    let diam2 = (b - a).norm_squared().max((c - a).norm_squared()).max((c - b).norm_squared());
    if triangle_area(a, b, c) <= tol.eps_area * diam2 {
        return Err(Error::DegenerateTriangle);
    }
    Ok(())
}

/// `(A'B / A'C) · (B'C / B'A) · (C'A / C'B)` for `A'` on line `BC`, `B'` on line `CA`,
/// `C'` on line `AB`, written as `Π (λ - 1) / λ` with `A' = λ B + (1 - λ) C`,
/// `B' = μ C + (1 - μ) A`, `C' = ν A + (1 - ν) B`.
///
/// The side points are collinear exactly when the product is `+1`.
pub fn menelaus_product(a: &Point, b: &Point, c: &Point, a1: &Point, b1: &Point, c1: &Point) -> Result<f64> {
    side_product(a, b, c, a1, b1, c1, &Tolerances::DEFAULT)
}

/// The same product as [`menelaus_product`]; the cevians `AA'`, `BB'`, `CC'` are
/// concurrent or parallel exactly when it equals `-1`.
pub fn ceva_product(a: &Point, b: &Point, c: &Point, a1: &Point, b1: &Point, c1: &Point) -> Result<f64> {
    side_product(a, b, c, a1, b1, c1, &Tolerances::DEFAULT)
}

pub fn side_product(
    a: &Point,
    b: &Point,
    c: &Point,
    a1: &Point,
    b1: &Point,
    c1: &Point,
    tol: &Tolerances,
) -> Result<f64> {
    check_points(&[a, b, c, a1, b1, c1])?;
    check_triangle(a, b, c, tol)?;
    let lambda = division_ratio_with(c, b, a1, tol)?.value();
    let mu = division_ratio_with(a, c, b1, tol)?.value();
    let nu = division_ratio_with(b, a, c1, tol)?.value();
    let mut product = 1.0;
    for (r, name) in [(lambda, "A' = C"), (mu, "B' = A"), (nu, "C' = B")] {
        if r.abs() <= tol.eps_pt {
            return Err(Error::InvalidArgument(format!("side point coincides with a vertex ({name})")));
        }
        product *= (r - 1.0) / r;
    }
    Ok(product)
}

/// `(|y - b| / |x - b|) · (|x - a| / |y - a|)` for four collinear points.
pub fn cross_ratio(b: &Point, x: &Point, y: &Point, a: &Point) -> Result<f64> {
    cross_ratio_with(b, x, y, a, &Tolerances::DEFAULT)
}

pub fn cross_ratio_with(b: &Point, x: &Point, y: &Point, a: &Point, tol: &Tolerances) -> Result<f64> {
    check_points(&[b, x, y, a])?;
    let pts = [b, x, y, a];
    let (i, j) = farthest_pair(&pts);
    let origin = pts[i];
    let span = pts[j] - origin;
    let len = span.norm();
    if len <= tol.eps_pt {
        return Err(Error::CoincidentPoints);
    }
    let u = span / len;
    let mut s = [0.0; 4];
    for (k, p) in pts.iter().enumerate() {
        let d = *p - origin;
        s[k] = d.dot(&u);
        let off = (d - &u * s[k]).norm() / len;
        if off > tol.eps_line {
            return Err(Error::NotCollinear(off));
        }
    }
    let [sb, sx, sy, sa] = s;
    if (sx - sb).abs() <= tol.eps_pt || (sy - sa).abs() <= tol.eps_pt {
        return Err(Error::CoincidentPoints);
    }
    Ok(((sy - sb) / (sx - sb)).abs() * ((sx - sa) / (sy - sa)).abs())
}

fn farthest_pair(pts: &[&Point]) -> (usize, usize) {
    let mut best = (0, 1, -1.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (pts[j] - pts[i]).norm();
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

fn homog(p: &Point) -> Vector3<f64> {
    Vector3::new(p[0], p[1], 1.0)
}

fn dehomog(v: &Vector3<f64>) -> Option<Point> {
    let scale = v.abs().max();
    if v[2].abs() <= 1e-14 * scale {
        return None;
    }
    Some(DVector::from_vec(vec![v[0] / v[2], v[1] / v[2]]))
}

/// Meeting point of the lines `p1 p2` and `q1 q2` in the plane, `None` when parallel.
pub fn line_intersection(p1: &Point, p2: &Point, q1: &Point, q2: &Point) -> Option<Point> {
    dehomog(&homog(p1).cross(&homog(p2)).cross(&homog(q1).cross(&homog(q2))))
}

/// Every quantity of the perspectivity argument for the Funk triangle inequality at a
/// non-collinear triple `x, y, z` of a planar domain.
///
/// `a` and `b` are where the line `xy` leaves the domain beyond `y` and behind `x`;
/// `c` and `d` likewise for the line `yz`; `e` is where the ray `x → z` leaves. The
/// point `p` where the lines `ac` and `bd` meet (possibly at infinity) projects the
/// line `xy` onto the line `xz`, sending `a, b, y` to `a', b', y'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReplay {
    /// `cross_ratio(b, x, y, a)` against `cross_ratio(b', x, y', a')`, relative.
    pub first_perspectivity: f64,
    /// `cross_ratio(d, y, z, c)` against `cross_ratio(b', y', z, a')`, relative.
    pub second_perspectivity: f64,
    /// Menelaus product of `d, b', b` on the sides of the triangle `x y z`.
    pub menelaus: f64,
    /// `(|x - a| / |y - a|) · (|y - c| / |z - c|)`, that is `exp(F(x, y) + F(y, z))`.
    pub chained: f64,
    /// `|x - a'| / |z - a'|`.
    pub through_a_prime: f64,
    /// `|x - e| / |z - e|`, that is `exp(F(x, z))`.
    pub direct: f64,
    /// `|a' - e|`; the inequality `through_a_prime >= direct` is an equality iff this is 0.
    pub gap: f64,
}

/// `(p - q) / (1 + |p|)`: cross ratios blow up as a point nears the boundary.
fn relative(p: f64, q: f64) -> f64 {
    (p - q) / (1.0 + p.abs())
}

fn finite_hit(domain: &ConvexDomain, from: &Point, to: &Point) -> Result<Point> {
    match domain.ray_boundary(from, to)? {
        Hit::Finite { point, .. } => Ok(point),
        Hit::AtInfinity { .. } => Err(Error::HitAtInfinity),
    }
}

pub fn appendix_replay(domain: &ConvexDomain, x: &Point, y: &Point, z: &Point) -> Result<AppendixReplay> {
    if domain.dim() != 2 {
        return Err(Error::InvalidArgument("the replay is planar".into()));
    }
    check_triangle(x, y, z, &Tolerances::DEFAULT)?;
    let a = finite_hit(domain, x, y)?;
    let b = finite_hit(domain, y, x)?;
    let c = finite_hit(domain, y, z)?;
    let d = finite_hit(domain, z, y)?;
    let e = finite_hit(domain, x, z)?;
    let p = homog(&a).cross(&homog(&c)).cross(&homog(&b).cross(&homog(&d)));
    let xz = homog(x).cross(&homog(z));
    let project = |q: &Point| -> Result<Point> {
        let line = if p.norm() == 0.0 { Vector3::zeros() } else { p.cross(&homog(q)) };
        dehomog(&line.cross(&xz)).ok_or(Error::DegenerateTriangle)
    };
    let a1 = line_intersection(&a, &c, x, z).ok_or(Error::DegenerateTriangle)?;
    let b1 = line_intersection(&b, &d, x, z).ok_or(Error::DegenerateTriangle)?;
    let y1 = project(y)?;
    let ratio = |u: &Point, v: &Point, w: &Point| (u - w).norm() / (v - w).norm();
    Ok(AppendixReplay {
        first_perspectivity: relative(cross_ratio(&b, x, y, &a)?, cross_ratio(&b1, x, &y1, &a1)?),
        second_perspectivity: relative(cross_ratio(&d, y, z, &c)?, cross_ratio(&b1, &y1, z, &a1)?),
        menelaus: menelaus_product(x, y, z, &d, &b1, &b)?,
        chained: ratio(x, y, &a) * ratio(y, z, &c),
        through_a_prime: ratio(x, z, &a1),
        direct: ratio(x, z, &e),
        gap: (&a1 - &e).norm(),
    })
}

fn random_triangle<R: Rng + ?Sized>(rng: &mut R) -> [Point; 3] {
    loop {
        let t: [Point; 3] = std::array::from_fn(|_| DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0)));
        let diam2 = (&t[1] - &t[0])
            .norm_squared()
            .max((&t[2] - &t[0]).norm_squared())
            .max((&t[2] - &t[1]).norm_squared());
        if triangle_area(&t[0], &t[1], &t[2]) > 0.05 * diam2 {
            return t;
        }
    }
}

/// A random triangle and the three points where a random line crosses its side lines.
pub fn random_transversal<R: Rng + ?Sized>(rng: &mut R) -> ([Point; 3], [Point; 3]) {
    loop {
        let [a, b, c] = random_triangle(rng);
        let p = DVector::from_fn(2, |_, _| rng.random_range(-1.5..1.5));
        let q = DVector::from_fn(2, |_, _| rng.random_range(-1.5..1.5));
        let hits = (
            line_intersection(&p, &q, &b, &c),
            line_intersection(&p, &q, &a, &c),
            line_intersection(&p, &q, &a, &b),
        );
        if let (Some(a1), Some(b1), Some(c1)) = hits {
            let far = [&a1, &b1, &c1].iter().any(|v| v.amax() > 50.0);
            let near_vertex = (&a1 - &c).norm() < 1e-3 || (&b1 - &a).norm() < 1e-3 || (&c1 - &b).norm() < 1e-3;
            if !far && !near_vertex {
                return ([a, b, c], [a1, b1, c1]);
            }
        }
    }
}

/// A random triangle and the feet of its three cevians through a random point, which
/// may lie outside the triangle.
pub fn random_cevians<R: Rng + ?Sized>(rng: &mut R) -> ([Point; 3], [Point; 3]) {
    loop {
        let [a, b, c] = random_triangle(rng);
        let p = DVector::from_fn(2, |_, _| rng.random_range(-1.5..1.5));
        let feet = (
            line_intersection(&a, &p, &b, &c),
            line_intersection(&b, &p, &a, &c),
            line_intersection(&c, &p, &a, &b),
        );
        if let (Some(a1), Some(b1), Some(c1)) = feet {
            let far = [&a1, &b1, &c1].iter().any(|v| v.amax() > 50.0);
            let near_vertex = (&a1 - &c).norm() < 1e-3 || (&b1 - &a).norm() < 1e-3 || (&c1 - &b).norm() < 1e-3;
            let near_p = [&a, &b, &c].iter().any(|v| (*v - &p).norm() < 1e-2);
            if !far && !near_vertex && !near_p {
                return ([a, b, c], [a1, b1, c1]);
            }
        }
    }
}
