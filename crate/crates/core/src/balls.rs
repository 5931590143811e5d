//! Forward and backward metric balls.
//!
//! The forward ball `B⁺(x, ρ) = { y : F(x, y) < ρ }` is the image of the domain under the
//! homothety of center `x` and factor `1 - e^{-ρ}`. The backward ball
//! `B⁻(x, ρ) = { y : F(y, x) < ρ }` is the domain intersected with the image of the
//! domain under the homothety of center `x` and factor `-(e^ρ - 1)`. Both are built as
//! [`ConvexDomain`]s so every metric query works on them as well.

use nalgebra::DVector;
use serde::Serialize;

use crate::convex::{AffineMap, ConvexDomain, Hit, HPolytope};
use crate::error::{check_dim, check_finite};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Debug, Clone)]
pub struct MetricBall {
    center: Point,
    radius: f64,
    orientation: Orientation,
    realized: ConvexDomain,
    ambient: ConvexDomain,
}

impl MetricBall {
    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The ball as a convex domain in its own right.
    pub fn realized(&self) -> &ConvexDomain {
        &self.realized
    }

    pub fn ambient(&self) -> &ConvexDomain {
        &self.ambient
    }

    /// Homothety factor: `1 - e^{-ρ}` forward, `-(e^ρ - 1)` backward.
    pub fn factor(&self) -> f64 {
        match self.orientation {
            Orientation::Forward => -(-self.radius).exp_m1(),
            Orientation::Backward => -self.radius.exp_m1(),
        }
    }

    /// Signed membership margin of `y` in the ball.
    pub fn contains(&self, y: &Point) -> Result<f64> {
        self.realized.contains(y)
    }
}

fn check_center(domain: &ConvexDomain, x: &Point, rho: f64) -> Result<()> {
    let m = domain.contains(x)?;
    if m <= 0.0 {
        return Err(Error::NotInterior { margin: m });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {rho}")));
    }
    Ok(())
}

/// `{ y : F(x, y) < ρ }`.
pub fn forward_ball(domain: &ConvexDomain, x: &Point, rho: f64) -> Result<MetricBall> {
    check_center(domain, x, rho)?;
    let lambda = -(-rho).exp_m1();
    Ok(MetricBall {
        center: x.clone(),
        radius: rho,
        orientation: Orientation::Forward,
        realized: domain.homothety(x, lambda)?,
        ambient: domain.clone(),
    })
}

/// `{ y : F(y, x) < ρ }`.
pub fn backward_ball(domain: &ConvexDomain, x: &Point, rho: f64) -> Result<MetricBall> {
    check_center(domain, x, rho)?;
    let reflected = domain.homothety(x, -rho.exp_m1())?;
    let realized = ConvexDomain::intersection(vec![domain.clone(), reflected], Some(x.clone()))?;
    Ok(MetricBall {
        center: x.clone(),
        radius: rho,
        orientation: Orientation::Backward,
        realized,
        ambient: domain.clone(),
    })
}

/// A boundary sample of a metric ball.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    pub point: Point,
    /// False for backward-ball points that lie on the domain boundary, where the reverse
    /// distance to the center is below the radius.
    pub on_level_set: bool,
}

/// `k` quasi-uniform unit directions: equally spaced angles in the plane, a Halton
/// sequence pushed through Box–Muller in higher dimensions. `seed` shifts the Halton
/// index so different seeds give different but reproducible sets.
pub fn sphere_directions(dim: usize, k: usize, seed: u64) -> Vec<DVector<f64>> {
    if dim == 1 {
        return (0..k)
            .map(|i| DVector::from_element(1, if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
    }
    if dim == 2 {
        return (0..k)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                DVector::from_column_slice(&[th.cos(), th.sin()])
            })
            .collect();
    }
    let pairs = dim.div_ceil(2);
    let bases: Vec<u64> = PRIMES[..2 * pairs].to_vec();
    let offset = seed % 100_000;
    (0..k as u64)
        .map(|i| {
            let idx = i + 1 + offset;
            let mut coords = Vec::with_capacity(2 * pairs);
            for p in 0..pairs {
                let u1 = radical_inverse(idx, bases[2 * p]).max(1e-12);
                let u2 = radical_inverse(idx, bases[2 * p + 1]);
                let r = (-2.0 * u1.ln()).sqrt();
                let th = std::f64::consts::TAU * u2;
                coords.push(r * th.cos());
                coords.push(r * th.sin());
            }
            coords.truncate(dim);
            let v = DVector::from_vec(coords);
            let n = v.norm();
            if n > 1e-12 {
                v / n
            } else {
                let mut e = DVector::zeros(dim);
                e[0] = 1.0;
                e
            }
        })
        .collect()
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Boundary points of the ball along [`sphere_directions`], tagged with whether they
/// lie on the metric sphere proper.
pub fn sphere_sample_tagged(ball: &MetricBall, k: usize, seed: u64) -> Result<Vec<SpherePoint>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples, got {k}")));
    }
    let dim = ball.center.len();
    if dim > PRIMES.len() {
        return Err(Error::InvalidArgument(format!("sphere sampling supports dim <= {}", PRIMES.len())));
    }
    let eps = crate::Tolerances::DEFAULT.eps_face;
    sphere_directions(dim, k, seed)
        .into_iter()
        .map(|d| match ball.realized.hit_along(&ball.center, &d) {
            Hit::Finite { point, .. } => {
                let on_level_set = match ball.orientation {
                    Orientation::Forward => true,
                    Orientation::Backward => ball.ambient.margin(&point) > eps,
                };
                Ok(SpherePoint { point, on_level_set })
            }
            Hit::AtInfinity { .. } => Err(Error::HitAtInfinity),
        })
        .collect()
}

/// `k` boundary points of the ball, cast from its center.
pub fn sphere_sample(ball: &MetricBall, k: usize, seed: u64) -> Result<Vec<Point>> {
    Ok(sphere_sample_tagged(ball, k, seed)?
        .into_iter()
        .map(|s| s.point)
        .collect())
}

/// Euclidean distances from `x` to the boundary of a bounded polytope: `lambda_x` is the
/// nearest facet distance, `big_lambda_x` the farthest vertex distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichConstants {
    pub lambda_x: f64,
    pub big_lambda_x: f64,
}

impl SandwichConstants {
    /// Radii `(inner, outer)` of the Euclidean balls around the forward ball of radius `ρ`.
    pub fn forward_radii(&self, rho: f64) -> (f64, f64) {
        let f = -(-rho).exp_m1();
        (f * self.lambda_x, f * self.big_lambda_x)
    }

    /// Radii around the backward ball, valid for `ρ <= log 2`.
    pub fn backward_radii(&self, rho: f64) -> (f64, f64) {
        let f = rho.exp_m1();
        (f * self.lambda_x, f * self.big_lambda_x)
    }
}

fn vertices_of(poly: &HPolytope) -> Result<&[Point]> {
    poly.vertices()
        .ok_or_else(|| Error::InvalidArgument("polytope has no vertex list".into()))
}

pub fn sandwich(poly: &HPolytope, x: &Point) -> Result<SandwichConstants> {
    check_dim(poly.dim(), x.len())?;
    check_finite(x)?;
    let vs = vertices_of(poly)?;
    if !poly.is_bounded()? {
        return Err(Error::InvalidDomain("sandwich constants need a bounded polytope".into()));
    }
    let lambda_x = poly.margin(x);
    if lambda_x <= 0.0 {
        return Err(Error::NotInterior { margin: lambda_x });
    }
    let big_lambda_x = vs.iter().map(|v| (v - x).norm()).fold(0.0f64, f64::max);
    Ok(SandwichConstants {
        lambda_x,
        big_lambda_x,
    })
}

/// Vertex diameter of a polytope with a vertex list.
pub fn vertex_diameter(poly: &HPolytope) -> Result<f64> {
    let vs = vertices_of(poly)?;
    let mut d = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    Ok(d)
}

/// Upper bound `log(δ / λ_x)` on `F(y, x)` over all `y`, from the vertex diameter `δ`.
pub fn reverse_funk_bound(poly: &HPolytope, x: &Point) -> Result<f64> {
    let s = sandwich(poly, x)?;
    Ok((vertex_diameter(poly)? / s.lambda_x).ln())
}

/// The map `y ↦ c + s (y - x₁)` carrying the first forward ball onto the second; a pure
/// translation when the radii agree.
pub fn ball_similarity(from: &MetricBall, to: &MetricBall) -> Result<AffineMap> {
    if from.orientation != Orientation::Forward || to.orientation != Orientation::Forward {
        return Err(Error::InvalidArgument("similarity is defined for forward balls".into()));
    }
    check_dim(from.center.len(), to.center.len())?;
    let (l1, l2) = (from.factor(), to.factor());
    let s = l2 / l1;
    let n = from.center.len();
    // u = x1 + (y - x1)/l1 and z = x2 + l2 (u - x2)
    let shift = &to.center + (&from.center - &to.center) * l2 - &from.center * s;
    AffineMap::new(nalgebra::DMatrix::identity(n, n) * s, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::funk;
    use nalgebra::dvector;

    fn square() -> ConvexDomain {
        HPolytope::cube(2, 1.0).unwrap().into()
    }

    #[test]
    fn forward_ball_of_square_is_half_square() {
        let b = forward_ball(&square(), &dvector![0.0, 0.0], 2f64.ln()).unwrap();
        assert!((b.factor() - 0.5).abs() < 1e-15);
        let pts = sphere_sample(&b, 4, 0).unwrap();
        let want = [dvector![0.5, 0.0], dvector![0.0, 0.5], dvector![-0.5, 0.0], dvector![0.0, -0.5]];
        for (p, w) in pts.iter().zip(&want) {
            assert!((p - w).norm() < 1e-15, "{p}");
        }
    }

    #[test]
    fn forward_ball_of_unit_ball_matches_closed_form() {
        let x0 = dvector![0.3, -0.2];
        let rho = 0.8;
        let b = forward_ball(&ConvexDomain::unit_ball(2), &x0, rho).unwrap();
        let c = &x0 * (-rho).exp();
        let r = 1.0 - (-rho).exp();
        for p in sphere_sample(&b, 64, 0).unwrap() {
            assert!(((&p - &c).norm() - r).abs() < 1e-9);
            assert!((funk(b.ambient(), &x0, &p).unwrap().value() - rho).abs() < 1e-8);
        }
    }

    #[test]
    fn tiny_forward_ball_shrinks() {
        let b = forward_ball(&square(), &dvector![0.2, 0.1], 1e-6).unwrap();
        for p in sphere_sample(&b, 8, 0).unwrap() {
            assert!((p - dvector![0.2, 0.1]).norm() < 2e-6);
        }
    }

    #[test]
    fn backward_ball_examples() {
        let sq = square();
        let b = backward_ball(&sq, &dvector![0.0, 0.0], 2f64.ln()).unwrap();
        // the reflected unit homothet is the square itself
        for y in [dvector![0.99, 0.99], dvector![-0.5, 0.9], dvector![0.0, 0.0]] {
            assert!(b.contains(&y).unwrap() > 0.0);
        }
        let big = backward_ball(&sq, &dvector![0.3, -0.4], 10.0).unwrap();
        for y in [dvector![0.999, 0.999], dvector![-0.999, 0.999], dvector![0.999, -0.999]] {
            assert!(big.contains(&y).unwrap() > 0.0);
        }
        let small = backward_ball(&sq, &dvector![0.3, -0.4], 1e-6).unwrap();
        for p in sphere_sample(&small, 8, 0).unwrap() {
            assert!((p - dvector![0.3, -0.4]).norm() < 2e-6);
        }
    }

    #[test]
    fn backward_sphere_points_on_level_set() {
        let sq = square();
        let x = dvector![0.4, 0.1];
        let rho = 0.5;
        let b = backward_ball(&sq, &x, rho).unwrap();
        let mut certified = 0;
        for s in sphere_sample_tagged(&b, 50, 0).unwrap() {
            if s.on_level_set {
                certified += 1;
                let r = funk(&sq, &s.point, &x).unwrap().value();
                assert!((r - rho).abs() < 1e-8);
            } else {
                assert!(sq.contains(&s.point).unwrap().abs() < 1e-7);
            }
        }
        assert!(certified > 0);
    }

    #[test]
    fn sandwich_examples() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let s = sandwich(&sq, &dvector![0.0, 0.0]).unwrap();
        assert_eq!((s.lambda_x, s.big_lambda_x), (1.0, 2f64.sqrt()));
        let s = sandwich(&sq, &dvector![0.5, 0.0]).unwrap();
        assert_eq!(s.lambda_x, 0.5);
        assert!((s.big_lambda_x - (1.5f64 * 1.5 + 1.0).sqrt()).abs() < 1e-15);

        let hex = HPolytope::regular_polygon(6, &dvector![0.0, 0.0], 1.0).unwrap();
        let s = sandwich(&hex, &dvector![0.0, 0.0]).unwrap();
        assert!((s.lambda_x - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((s.big_lambda_x - 1.0).abs() < 1e-12);

        assert!(sandwich(&HPolytope::orthant(2).unwrap(), &dvector![1.0, 1.0]).is_err());
    }

    #[test]
    fn sphere_sample_minimum() {
        let b = forward_ball(&square(), &dvector![0.0, 0.0], 1.0).unwrap();
        assert!(sphere_sample(&b, 2, 0).is_err());
        let pts = sphere_sample(&b, 3, 0).unwrap();
        assert!((&pts[0] - &pts[1]).norm() > 0.1 && (&pts[1] - &pts[2]).norm() > 0.1);
    }

    #[test]
    fn halton_directions_are_unit_and_distinct() {
        let ds = sphere_directions(4, 50, 7);
        for d in &ds {
            assert!((d.norm() - 1.0).abs() < 1e-12);
        }
        assert!((&ds[0] - &ds[1]).norm() > 1e-3);
        assert_eq!(ds, sphere_directions(4, 50, 7));
        assert_ne!(ds, sphere_directions(4, 50, 8));
    }

    #[test]
    fn similarity_maps_sphere_onto_sphere() {
        let sq = square();
        let b1 = forward_ball(&sq, &dvector![0.2, 0.1], 0.4).unwrap();
        let b2 = forward_ball(&sq, &dvector![-0.3, 0.5], 1.1).unwrap();
        let m = ball_similarity(&b1, &b2).unwrap();
        for p in sphere_sample(&b1, 32, 0).unwrap() {
            assert!(b2.contains(&m.apply(&p)).unwrap().abs() < 1e-12);
        }
    }

    mod properties {
        use super::super::*;
        use crate::metric::{funk, reverse_funk};
        use crate::sampling::{random_polytope, sample_interior};
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn domain(rng: &mut ChaCha8Rng) -> ConvexDomain {
            let dim = rng.random_range(2..=3);
            if rng.random_bool(0.3) {
                ConvexDomain::unit_ball(dim)
            } else {
                random_polytope(rng, dim).into()
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn forward_sphere_is_a_level_set(seed in any::<u64>(), rho in 0.01f64..4.0) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let x = sample_interior(&mut r, &dom);
                let b = forward_ball(&dom, &x, rho).unwrap();
                for p in sphere_sample(&b, 24, seed).unwrap() {
                    prop_assert!((funk(&dom, &x, &p).unwrap().value() - rho).abs() <= 1e-8);
                }
            }

            #[test]
            fn similarity_carries_spheres(seed in any::<u64>(), r1 in 0.05f64..3.0, r2 in 0.05f64..3.0) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let b1 = forward_ball(&dom, &sample_interior(&mut r, &dom), r1).unwrap();
                let b2 = forward_ball(&dom, &sample_interior(&mut r, &dom), r2).unwrap();
                let m = ball_similarity(&b1, &b2).unwrap();
                for p in sphere_sample(&b1, 24, seed).unwrap() {
                    prop_assert!(b2.contains(&m.apply(&p)).unwrap().abs() <= 1e-8);
                }
            }

            #[test]
            fn euclidean_sandwich(seed in any::<u64>(), rho in 0.01f64..4.0, back in 0.01f64..=std::f64::consts::LN_2) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dim = r.random_range(2..=3);
                let poly = random_polytope(&mut r, dim);
                let dom: ConvexDomain = poly.clone().into();
                let x = sample_interior(&mut r, &dom);
                let s = sandwich(&poly, &x).unwrap();
                prop_assert!(0.0 < s.lambda_x && s.lambda_x <= s.big_lambda_x);
                let (lo, hi) = s.forward_radii(rho);
                for p in sphere_sample(&forward_ball(&dom, &x, rho).unwrap(), 24, seed).unwrap() {
                    let d = (&p - &x).norm();
                    prop_assert!(lo - 1e-9 <= d && d <= hi + 1e-9);
                }
                let (lo, hi) = s.backward_radii(back);
                for sp in sphere_sample_tagged(&backward_ball(&dom, &x, back).unwrap(), 24, seed).unwrap() {
                    if sp.on_level_set {
                        prop_assert!((reverse_funk(&dom, &x, &sp.point).unwrap().value() - back).abs() <= 1e-8);
                        let d = (&sp.point - &x).norm();
                        prop_assert!(lo - 1e-9 <= d && d <= hi + 1e-9);
                    }
                }
            }

            #[test]
            fn forward_balls_are_convex(seed in any::<u64>(), rho in 0.01f64..4.0) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let x = sample_interior(&mut r, &dom);
                let b = forward_ball(&dom, &x, rho).unwrap();
                let pts = sphere_sample(&b, 16, seed).unwrap();
                for (i, p) in pts.iter().enumerate() {
                    for q in &pts[i + 1..] {
                        let mid = (p + q) * 0.5;
                        prop_assert!(b.contains(&mid).unwrap() >= -1e-12);
                        prop_assert!(funk(&dom, &x, &mid).unwrap().value() <= rho + 1e-9);
                    }
                }
            }
        }
    }
}
