//! Seeded random instances: interior points, directions, polytopes and maps.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::convex::{AffineMap, ConvexDomain, HPolytope, ProjectiveMap};
use crate::Point;

/// Fraction of the chord kept when sampling, so points stay off the boundary.
const CHORD_SHRINK: f64 = 0.98;
/// Step used along recession directions of unbounded domains.
const UNBOUNDED_STEP: f64 = 5.0;

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Interior point from a few hit-and-run steps started at the base point.
pub fn sample_interior<R: Rng + ?Sized>(rng: &mut R, domain: &ConvexDomain) -> Point {
    let mut x = domain.base_point().clone();
    for _ in 0..4 {
        let d = random_direction(rng, domain.dim());
        let hi = domain.cast(&x, &d).unwrap_or(UNBOUNDED_STEP);
        let lo = domain.cast(&x, &(-&d)).unwrap_or(UNBOUNDED_STEP);
        let s = rng.random_range(-lo * CHORD_SHRINK..hi * CHORD_SHRINK);
        let next = &x + &d * s;
        if domain.margin(&next) > 0.0 {
            x = next;
        }
    }
    x
}

/// Random bounded polytope around the origin with a known vertex list. The origin is
/// interior with slack at least 0.3 on every facet.
pub fn random_polytope<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HPolytope {
    loop {
        let k = rng.random_range(dim + 2..=2 * dim + 4);
        let normals: Vec<DVector<f64>> = (0..k).map(|_| random_direction(rng, dim)).collect();
        let offsets: Vec<f64> = (0..k).map(|_| rng.random_range(0.3..1.5)).collect();
        let Ok(p) = HPolytope::new(normals, offsets, Some(Point::zeros(dim)), None) else {
            continue;
        };
        let Ok(vs) = p.enumerate_vertices() else { continue };
        // keep only facet-defining rows so images of the vertex list stay consistent
        let (normals, offsets): (Vec<_>, Vec<_>) = (0..p.num_constraints())
            .filter(|&j| vs.iter().any(|v| p.slack(j, v).abs() <= 1e-9 * (1.0 + v.amax())))
            .map(|j| (p.normals()[j].clone(), p.offsets()[j]))
            .unzip();
        if let Ok(p) = HPolytope::new(normals, offsets, Some(Point::zeros(dim)), Some(vs)) {
            return p;
        }
    }
}

/// Random affine map with condition number at most 20.
pub fn random_affine_map<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> AffineMap {
    loop {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.5..1.5));
        let sv = m.singular_values();
        if sv.min() <= 0.0 || sv.max() / sv.min() > 20.0 {
            continue;
        }
        let t = DVector::from_fn(dim, |_, _| rng.random_range(-2.0..2.0));
        if let Ok(map) = AffineMap::new(m, t) {
            return map;
        }
    }
}

/// Random projective map whose denominator stays positive on the closure of `poly`.
pub fn random_projective_image<R: Rng + ?Sized>(rng: &mut R, poly: &HPolytope) -> (ProjectiveMap, HPolytope) {
    let n = poly.dim();
    loop {
        let mut m = DMatrix::identity(n + 1, n + 1);
        for i in 0..n {
            for j in 0..=n {
                m[(i, j)] += rng.random_range(-0.5..0.5);
            }
        }
        for j in 0..n {
            m[(n, j)] = rng.random_range(-0.6..0.6);
        }
        let Ok(p) = ProjectiveMap::new(m) else { continue };
        if let Ok(img) = p.image_of_polytope(poly) {
            return (p, img);
        }
    }
}
