use funk_core::balls::{
    backward_ball, ball_similarity, forward_ball, reverse_funk_bound, sandwich, sphere_sample, sphere_sample_tagged,
};
use funk_core::classical::{appendix_replay, ceva_product, cross_ratio, menelaus_product, random_cevians, random_transversal};
use funk_core::convex::{ConvexDomain, EuclideanBall, HPolytope, Hit, ProjectivePoint, ProjectiveMap};
use funk_core::geodesy::{
    common_face, cone_member_with, hilbert_two_face, triangle_report_with, verify_geodesic_with, verify_hilbert_geodesic,
    FaceCone, TriangleReport,
};
use funk_core::metric::{
    distance_from_ratio, funk, funk_polytope_closed_form, funk_unit_ball_closed_form, hilbert, orthant_log_distance,
    orthant_log_map, ratio_from_distances, reverse_funk,
};
use funk_core::projection::{foot_certificate_with, nearest_on_convex, nearest_on_convex_traced, nearest_on_segment};
use funk_core::sampling::{random_affine_map, random_direction, random_polytope, random_projective_image, sample_interior};
use funk_core::tangent::{finite_difference_check, fit_order, polytope_tangent_sup, tangent_norm};
use funk_core::{Point, Tolerances};
use nalgebra::{dvector, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::Outcome;

/// Triangle equality threshold shared by the alignment checks.
const EQ: f64 = 1e-9;
/// How many samples reuse one random polytope.
const PER_DOMAIN: usize = 20;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

fn f(dom: &ConvexDomain, x: &Point, y: &Point) -> f64 {
    funk(dom, x, y).unwrap().value()
}

fn polytope(r: &mut ChaCha8Rng, dims: std::ops::RangeInclusive<usize>) -> HPolytope {
    let dim = r.random_range(dims);
    random_polytope(r, dim)
}

/// Random polytope or unit ball, renewed every `PER_DOMAIN` calls.
struct Domains {
    current: Option<ConvexDomain>,
    used: usize,
    dims: std::ops::RangeInclusive<usize>,
    ball_share: f64,
}

impl Domains {
    fn new(dims: std::ops::RangeInclusive<usize>, ball_share: f64) -> Self {
        Domains { current: None, used: 0, dims, ball_share }
    }

    fn next(&mut self, r: &mut ChaCha8Rng) -> ConvexDomain {
        if self.current.is_none() || self.used.is_multiple_of(PER_DOMAIN) {
            let dim = r.random_range(self.dims.clone());
            self.current = Some(if r.random_bool(self.ball_share) {
                ConvexDomain::unit_ball(dim)
            } else {
                random_polytope(r, dim).into()
            });
        }
        self.used += 1;
        self.current.clone().unwrap()
    }
}

fn square() -> HPolytope {
    HPolytope::cube(2, 1.0).unwrap()
}

fn finite(hit: Hit) -> Option<Point> {
    match hit {
        Hit::Finite { point, .. } => Some(point),
        Hit::AtInfinity { .. } => None,
    }
}

// convex-core

pub fn ray_cast_consistency(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = 0.0f64;
    let mut worst_t = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let hit = dom.ray_boundary(&x, &y).unwrap();
        let (Some(t), Some(p)) = (hit.t(), hit.point()) else { continue };
        worst = worst.max(dom.contains(p).unwrap().abs());
        // the hit sits at x + t (y - x)
        let expect = &x + (&y - &x) * t;
        worst_t = worst_t.max((&expect - p).norm() / (1.0 + p.norm()));
    }
    Outcome::at_most(n, worst, tol.eps_bd)
        .and(Outcome::at_most(n, worst_t, 1e-12))
        .with(format!("max boundary margin at the hit; parametrization error {worst_t:.2e}"))
}

pub fn hit_monotone_in_offsets(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut poly = polytope(r, 2..=4);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=4);
        }
        let dom: ConvexDomain = poly.clone().into();
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let j = r.random_range(0..poly.num_constraints());
        let mut offsets = poly.offsets().to_vec();
        offsets[j] -= r.random_range(0.01..0.9) * poly.slack(j, &x);
        let tight: ConvexDomain = HPolytope::new(poly.normals().to_vec(), offsets, Some(x.clone()), None).unwrap().into();
        let t0 = dom.ray_boundary(&x, &y).unwrap().t().unwrap();
        let t1 = tight.ray_boundary(&x, &y).unwrap().t().unwrap();
        if t1 > t0 + 1e-12 {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with("tightening one constraint never moves the exit point outward")
}

pub fn affine_equivariance(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let map = random_affine_map(r, dom.dim());
        let img = dom.affine_image(&map).unwrap();
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let a = dom.ray_boundary(&x, &y).unwrap();
        let b = img.ray_boundary(&map.apply(&x), &map.apply(&y)).unwrap();
        let expected = map.apply(a.point().unwrap());
        worst = worst.max((b.point().unwrap() - &expected).norm() / (1.0 + expected.norm()));
    }
    Outcome::at_most(n, worst, 1e-8)
}

pub fn supporting_functional_validity(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let a = dom.ray_boundary(&x, &y).unwrap().point().unwrap().clone();
        let h = dom.supporting_functional(&a).unwrap();
        worst = worst.max((h.eval(&a) - 1.0).abs());
        for _ in 0..5 {
            let z = sample_interior(r, &dom);
            worst = worst.max(h.eval(&z) - 1.0);
        }
    }
    Outcome::at_most(n, worst, tol.eps_bd).with("h(a) = 1 at the hit and h < 1 on interior samples")
}

pub fn intersection_hit_is_min(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = r.random_range(2..=3);
        let p1: ConvexDomain = random_polytope(r, dim).into();
        let c = Point::from_fn(dim, |_, _| r.random_range(-0.2..0.2));
        let p2 = ConvexDomain::Ball(EuclideanBall::new(c, r.random_range(0.4..1.2)).unwrap());
        let both = ConvexDomain::intersection(vec![p1.clone(), p2.clone()], None).unwrap();
        let x = sample_interior(r, &both);
        let y = sample_interior(r, &both);
        let t = both.ray_boundary(&x, &y).unwrap().t().unwrap();
        let t1 = p1.ray_boundary(&x, &y).unwrap().t().unwrap();
        let t2 = p2.ray_boundary(&x, &y).unwrap().t().unwrap();
        worst = worst.max(rel_err(t, t1.min(t2)));
    }
    Outcome::at_most(n, worst, 1e-8)
}

// metric-engine

pub fn closed_form_polytope(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    let mut poly = polytope(r, 2..=5);
    for i in 0..n {
        if i % 100 == 0 {
            poly = polytope(r, 2..=5);
        }
        let dom: ConvexDomain = poly.clone().into();
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        worst = worst.max(rel_err(f(&dom, &x, &y), funk_polytope_closed_form(&poly, &x, &y).unwrap().value()));
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn closed_form_ball(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..n {
        let dom = ConvexDomain::unit_ball(2 + i % 4);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        worst = worst.max(rel_err(f(&dom, &x, &y), funk_unit_ball_closed_form(&x, &y).unwrap().value()));
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn triangle_inequality(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=5, 0.2);
    let mut negative = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let z = sample_interior(r, &dom);
        let (fxy, fyz, fxz) = (f(&dom, &x, &y), f(&dom, &y, &z), f(&dom, &x, &z));
        if fxy < 0.0 || fyz < 0.0 || fxz < 0.0 {
            negative += 1;
        }
        worst = worst.max(fxz - fxy - fyz);
    }
    Outcome::at_most(n, worst, 1e-12)
        .and(Outcome::none_bad(n, negative))
        .with(format!("max F(x,z) - F(x,y) - F(y,z); {negative} negative values"))
}

pub fn projectivity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=5, 0.2);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let w = &x + (&y - &x) * r.random_range(0.0..=1.0);
        worst = worst.max((f(&dom, &x, &y) - f(&dom, &x, &w) - f(&dom, &w, &y)).abs());
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn separation(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let hp: ConvexDomain = HPolytope::half_space(dvector![0.0, -1.0], 0.0, Some(dvector![0.0, 1.0])).unwrap().into();
    let mut bad = 0;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        if (&x - &y).norm() > 1e-6 && f(&dom, &x, &y) <= 0.0 {
            bad += 1;
        }
        // in a half-plane, moving parallel to or away from the edge costs nothing
        let p = dvector![r.random_range(-5.0..5.0), r.random_range(0.01..5.0)];
        let q = &p + dvector![r.random_range(-5.0..5.0), r.random_range(0.0..5.0)];
        if f(&hp, &p, &q) != 0.0 {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with("bounded domains separate points; half-plane pairs moving away from the edge are at distance 0")
}

pub fn monotonicity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut poly = polytope(r, 2..=3);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=3);
        }
        let big: ConvexDomain = poly.clone().into();
        let c = sample_interior(r, &big);
        let small: ConvexDomain = poly.homothety(&c, r.random_range(0.3..0.95)).into();
        let x = sample_interior(r, &small);
        let y = sample_interior(r, &small);
        if f(&small, &x, &y) < f(&big, &x, &y) - 1e-12 {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with("a smaller domain never gives a smaller distance")
}

pub fn intersection_law(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dim = r.random_range(2..=3);
        let p: ConvexDomain = random_polytope(r, dim).into();
        let c = DVector::from_fn(dim, |_, _| r.random_range(-0.2..0.2));
        let b = ConvexDomain::Ball(EuclideanBall::new(c, r.random_range(0.4..1.2)).unwrap());
        let both = ConvexDomain::intersection(vec![p.clone(), b.clone()], None).unwrap();
        let x = sample_interior(r, &both);
        let y = sample_interior(r, &both);
        worst = worst.max((f(&both, &x, &y) - f(&p, &x, &y).max(f(&b, &x, &y))).abs());
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn slice_restriction(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < n {
        let poly = random_polytope(r, 3);
        let dom: ConvexDomain = poly.clone().into();
        let o = sample_interior(r, &dom);
        let u = random_direction(r, 3);
        let w = random_direction(r, 3);
        let v = &w - &u * u.dot(&w);
        if v.norm() <= 1e-3 {
            continue;
        }
        let v = v.normalize();
        let (mut normals, mut offsets) = (Vec::new(), Vec::new());
        for (nrm, s) in poly.normals().iter().zip(poly.offsets()) {
            let row = dvector![nrm.dot(&u), nrm.dot(&v)];
            if row.norm() > 1e-12 {
                normals.push(row);
                offsets.push(s - nrm.dot(&o));
            }
        }
        let slice: ConvexDomain = HPolytope::new(normals, offsets, Some(Point::zeros(2)), None).unwrap().into();
        let embed = |q: &Point| &o + &u * q[0] + &v * q[1];
        for _ in 0..PER_DOMAIN.min(n - done) {
            let p = sample_interior(r, &slice);
            let q = sample_interior(r, &slice);
            worst = worst.max((f(&slice, &p, &q) - f(&dom, &embed(&p), &embed(&q))).abs());
            done += 1;
        }
    }
    Outcome::at_most(n, worst, 1e-9).with("planar slices of 3-D polytopes")
}

pub fn affine_invariance(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let map = random_affine_map(r, dom.dim());
        let img = dom.affine_image(&map).unwrap();
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        worst = worst.max(rel_err(f(&img, &map.apply(&x), &map.apply(&y)), f(&dom, &x, &y)));
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn hilbert_projective_invariance(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    let mut poly = polytope(r, 2..=4);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=4);
        }
        let dom: ConvexDomain = poly.clone().into();
        let (map, img) = random_projective_image(r, &poly);
        let img: ConvexDomain = img.into();
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let h = hilbert(&dom, &x, &y).unwrap().value();
        let hi = hilbert(&img, &map.apply(&x).unwrap(), &map.apply(&y).unwrap()).unwrap().value();
        worst = worst.max(rel_err(hi, h));
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn hilbert_symmetry(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=5, 0.3);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let h = hilbert(&dom, &x, &y).unwrap().value();
        let sum = 0.5 * (f(&dom, &x, &y) + reverse_funk(&dom, &x, &y).unwrap().value());
        worst = worst
            .max((h - hilbert(&dom, &y, &x).unwrap().value()).abs())
            .max((h - sum).abs());
    }
    Outcome::at_most(n, worst, 1e-12).with("H(x,y) = H(y,x) = (F(x,y) + F(y,x)) / 2")
}

pub fn reverse_funk_bounded(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut poly = polytope(r, 2..=4);
    let mut dom: ConvexDomain = poly.clone().into();
    let mut x = sample_interior(r, &dom);
    let mut bound = reverse_funk_bound(&poly, &x).unwrap();
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=4);
            dom = poly.clone().into();
            x = sample_interior(r, &dom);
            bound = reverse_funk_bound(&poly, &x).unwrap();
        }
        let y = sample_interior(r, &dom);
        if reverse_funk(&dom, &x, &y).unwrap().value() > bound + 1e-9 {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with("reverse Funk distance stays below log(1 + diam / dist(x, boundary))")
}

pub fn backward_cauchy_tail(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    const K: usize = 1000;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let poly = random_polytope(r, 2);
        let dom: ConvexDomain = poly.into();
        let c = sample_interior(r, &dom);
        let d = random_direction(r, 2);
        let a = finite(dom.ray_boundary(&c, &(&c + &d)).unwrap()).unwrap();
        let b = finite(dom.ray_boundary(&c, &(&c - &d)).unwrap()).unwrap();
        let x = |k: f64| &b + (&a - &b) / k;
        let xk = x(K as f64);
        let mut ms: Vec<f64> = (K..K + 200).map(|m| m as f64).collect();
        ms.extend((1..=40).map(|j| K as f64 * 2f64.powi(j)));
        let sup = ms
            .iter()
            .filter_map(|&m| funk(&dom, &x(m), &xk).ok())
            .map(|v| v.value())
            .fold(0.0, f64::max);
        worst = worst.max(sup);
    }
    Outcome::at_most(n, worst, 1e-3).with(format!(
        "sup over m >= {K} of F(x_m, x_{K}) on chords x_k = b + (a - b) / k; the limit is -log(1 - 1/{K}) = {:.7e}",
        -(-1.0 / K as f64).ln_1p()
    ))
}

pub fn division_ratio_round_trip(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let Some(t_exit) = dom.ray_boundary(&x, &y).unwrap().t() else { continue };
        let z = &x + (&y - &x) * (r.random_range(0.0..0.98) * t_exit);
        let fxy = funk(&dom, &x, &y).unwrap();
        let fxz = funk(&dom, &x, &z).unwrap();
        let t = ratio_from_distances(fxy, fxz).unwrap();
        worst = worst.max((distance_from_ratio(fxy, t).unwrap().value() - fxz.value()).abs());
    }
    Outcome::at_most(n, worst, 1e-10)
}

pub fn orthant_isometry(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..n {
        let dim = 2 + i % 3;
        let orthant: ConvexDomain = HPolytope::orthant(dim).unwrap().into();
        let sample = |r: &mut ChaCha8Rng| DVector::from_fn(dim, |_, _| 10f64.powf(r.random_range(-3.0..3.0)));
        let x = sample(r);
        let y = sample(r);
        let b = orthant_log_distance(&orthant_log_map(&x).unwrap(), &orthant_log_map(&y).unwrap()).unwrap().value();
        worst = worst.max(rel_err(f(&orthant, &x, &y), b));
    }
    Outcome::at_most(n, worst, 1e-12).with("positive orthant against max_i log(x_i / y_i)")
}

// ball-geometry

pub fn homothety_exactness(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=3, 0.3);
    let mut worst = 0.0f64;
    let mut shape = 0.0f64;
    for i in 0..n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let rho = r.random_range(0.01..4.0);
        let b = forward_ball(&dom, &x, rho).unwrap();
        for p in sphere_sample(&b, 16, i as u64).unwrap() {
            worst = worst.max((f(&dom, &x, &p) - rho).abs());
        }
        // unit ball: center e^{-rho} x, radius 1 - e^{-rho}
        if let (ConvexDomain::Ball(_), ConvexDomain::Ball(real)) = (&dom, b.realized()) {
            shape = shape
                .max((real.center() - &x * (-rho).exp()).amax())
                .max((real.radius() + (-rho).exp_m1()).abs());
        }
    }
    Outcome::at_most(n, worst, 1e-8)
        .and(Outcome::at_most(n, shape, 1e-9))
        .with(format!("max |F(x, p) - rho| on sphere samples; unit-ball center and radius error {shape:.2e}"))
}

pub fn ball_similarity_check(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=3, 0.3);
    let mut worst = 0.0f64;
    for i in 0..n {
        let dom = doms.next(r);
        let b1 = forward_ball(&dom, &sample_interior(r, &dom), r.random_range(0.05..3.0)).unwrap();
        let b2 = forward_ball(&dom, &sample_interior(r, &dom), r.random_range(0.05..3.0)).unwrap();
        let m = ball_similarity(&b1, &b2).unwrap();
        for p in sphere_sample(&b1, 16, i as u64).unwrap() {
            worst = worst.max(b2.contains(&m.apply(&p)).unwrap().abs());
        }
    }
    Outcome::at_most(n, worst, 1e-8).with("sphere of one forward ball mapped onto another")
}

pub fn sandwich_forward(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut checked = 0;
    for i in 0..n {
        let poly = polytope(r, 2..=3);
        let dom: ConvexDomain = poly.clone().into();
        let x = sample_interior(r, &dom);
        let s = sandwich(&poly, &x).unwrap();
        let rho = r.random_range(0.01..4.0);
        let (lo, hi) = s.forward_radii(rho);
        for p in sphere_sample(&forward_ball(&dom, &x, rho).unwrap(), 24, i as u64).unwrap() {
            let d = (&p - &x).norm();
            checked += 1;
            if d < lo - 1e-9 || d > hi + 1e-9 {
                bad += 1;
            }
        }
    }
    Outcome::none_bad(n, bad).with(format!("{checked} sphere points against the Euclidean radii"))
}

pub fn sandwich_backward(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut checked = 0;
    for i in 0..n {
        let poly = polytope(r, 2..=3);
        let dom: ConvexDomain = poly.clone().into();
        let x = sample_interior(r, &dom);
        let s = sandwich(&poly, &x).unwrap();
        let rho = r.random_range(0.01..=std::f64::consts::LN_2);
        let (lo, hi) = s.backward_radii(rho);
        for sp in sphere_sample_tagged(&backward_ball(&dom, &x, rho).unwrap(), 24, i as u64).unwrap() {
            if !sp.on_level_set {
                continue;
            }
            let d = (&sp.point - &x).norm();
            checked += 1;
            if d < lo - 1e-9 || d > hi + 1e-9 || (reverse_funk(&dom, &x, &sp.point).unwrap().value() - rho).abs() > 1e-8 {
                bad += 1;
            }
        }
    }
    Outcome::none_bad(n, bad).with(format!("{checked} backward sphere points, radii up to log 2"))
}

pub fn forward_ball_convexity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=3, 0.3);
    let mut bad = 0;
    let mut pairs = 0;
    let mut seed = 0u64;
    while pairs < n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let rho = r.random_range(0.01..4.0);
        let b = forward_ball(&dom, &x, rho).unwrap();
        let pts = sphere_sample(&b, 12, seed).unwrap();
        seed += 1;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                let mid = (p + q) * 0.5;
                pairs += 1;
                if b.contains(&mid).unwrap() < -1e-12 || f(&dom, &x, &mid) > rho + 1e-9 {
                    bad += 1;
                }
            }
        }
    }
    Outcome::none_bad(pairs, bad).with("midpoints of sphere samples stay in the ball")
}

// geodesy

fn near_corner(hits: &[ProjectivePoint]) -> bool {
    hits.iter().any(|h| {
        let v = h.homogeneous();
        v[0].abs().min(v[1].abs()) >= (1.0 - 1e-4) * v[2].abs()
    })
}

/// Defects too close to the equality threshold to classify either way.
fn ambiguous(rep: &TriangleReport) -> bool {
    rep.defect > EQ && rep.defect <= 1e-7
}

fn square_point(r: &mut ChaCha8Rng) -> Point {
    dvector![r.random_range(-0.95..0.95), r.random_range(-0.95..0.95)]
}

pub fn alignment_square(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let sq: ConvexDomain = square().into();
    let (mut bad, mut skipped, mut equal) = (0, 0, 0);
    for _ in 0..n {
        let x = square_point(r);
        let y = square_point(r);
        // a third of the triples continue towards the exit point of x -> y
        let z = if r.random_bool(0.33) {
            let a = finite(sq.ray_boundary(&x, &y).unwrap()).unwrap();
            let on_edge = if a[0].abs() > a[1].abs() {
                dvector![a[0].signum(), r.random_range(-0.95..0.95)]
            } else {
                dvector![r.random_range(-0.95..0.95), a[1].signum()]
            };
            &y + (&on_edge - &y) * r.random_range(0.05..0.95)
        } else {
            square_point(r)
        };
        if (&x - &y).norm() < 1e-6 || (&y - &z).norm() < 1e-6 || (&x - &z).norm() < 1e-6 {
            skipped += 1;
            continue;
        }
        let rep = triangle_report_with(&sq, &x, &y, &z, tol).unwrap();
        if near_corner(&rep.hits) || ambiguous(&rep) {
            skipped += 1;
            continue;
        }
        if rep.defect <= EQ {
            equal += 1;
        }
        if rep.defect < -1e-12 || (rep.defect <= EQ) != rep.aligned {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!("{equal} equalities; {skipped} triples near a corner or the threshold skipped"))
}

pub fn alignment_ball(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let mut bad = 0;
    for i in 0..n {
        let ball = ConvexDomain::unit_ball(2 + i % 2);
        let x = sample_interior(r, &ball);
        let z = sample_interior(r, &ball);
        if (&x - &z).norm() < 1e-3 {
            continue;
        }
        // collinear and in order: equality with coincident exit points
        let y = &x + (&z - &x) * r.random_range(0.05..0.95);
        let on = triangle_report_with(&ball, &x, &y, &z, tol).unwrap();
        if !(on.defect <= EQ && on.aligned) {
            bad += 1;
        }
        // generic triple: strict inequality, exit points not aligned; w near the line xz
        // has a defect of second order in its offset and is redrawn
        let u = (&z - &x).normalize();
        let w = loop {
            let w = sample_interior(r, &ball);
            let d = &w - &x;
            if (&d - &u * d.dot(&u)).norm() >= 1e-3 {
                break w;
            }
        };
        let off = triangle_report_with(&ball, &x, &w, &z, tol).unwrap();
        if off.defect <= EQ || off.aligned {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with("collinear triples are equalities, generic triples are strict")
}

pub fn same_edge_triples(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let sq: ConvexDomain = square().into();
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = dvector![r.random_range(-0.9..0.5), r.random_range(-0.9..0.9)];
        let a1 = dvector![1.0, r.random_range(-0.9..0.9)];
        let a2 = dvector![1.0, r.random_range(-0.9..0.9)];
        let y = &x + (&a1 - &x) * r.random_range(0.1..0.9);
        let z = &y + (&a2 - &y) * r.random_range(0.1..0.9);
        let rep = triangle_report_with(&sq, &x, &y, &z, tol).unwrap();
        worst = worst.max(rep.defect);
        if !(rep.defect <= EQ && rep.aligned) {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!("square triples exiting through one edge, max defect {worst:.2e}"))
}

pub fn perturbation_breaks_equality(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let mut bad = 0;
    let mut min_defect = f64::INFINITY;
    let mut done = 0;
    while done < n {
        let ball = ConvexDomain::unit_ball(2 + done % 2);
        let x = sample_interior(r, &ball);
        let z = sample_interior(r, &ball);
        if (&x - &z).norm() < 0.1 {
            continue;
        }
        let y = &x + (&z - &x) * r.random_range(0.05..0.95);
        let d = &z - &x;
        let w = random_direction(r, ball.dim());
        let off = &w - &d * (d.dot(&w) / d.norm_squared());
        if off.norm() < 1e-3 {
            continue;
        }
        let bent = &y + off.normalize() * 1e-2;
        if ball.contains(&bent).unwrap() <= 0.0 {
            continue;
        }
        let rep = triangle_report_with(&ball, &x, &bent, &z, tol).unwrap();
        min_defect = min_defect.min(rep.defect);
        if rep.defect <= 1e-6 || rep.aligned {
            bad += 1;
        }
        done += 1;
    }
    Outcome::none_bad(n, bad).with(format!("middle point moved 1e-2 off the chord; min defect {min_defect:.2e}"))
}

/// Exit point of `from -> to` when it lies on exactly one facet, clear of lower faces.
fn facet_hit(poly: &HPolytope, dom: &ConvexDomain, from: &Point, to: &Point) -> Option<(Point, usize)> {
    let a = finite(dom.ray_boundary(from, to).ok()?)?;
    let face = poly.active_face(&a, 1e-5).ok()?;
    (face.len() == 1).then(|| (a, face[0]))
}

/// A polyline `x, y, z` whose chords exit through one facet, or a random one.
fn polyline(r: &mut ChaCha8Rng, poly: &HPolytope, dom: &ConvexDomain) -> Option<[Point; 3]> {
    let x = sample_interior(r, dom);
    let toward = sample_interior(r, dom);
    if r.random_bool(0.5) {
        let (a1, j) = facet_hit(poly, dom, &x, &toward)?;
        let nrm = &poly.normals()[j];
        let w = random_direction(r, poly.dim());
        let tangent = &w - nrm * (nrm.dot(&w) / nrm.norm_squared());
        if tangent.norm() < 1e-3 {
            return None;
        }
        let mut a2 = &a1 + tangent.normalize() * r.random_range(0.01..0.5);
        while dom.contains(&a2).ok()? < -1e-12 {
            a2 = (&a1 + &a2) * 0.5;
        }
        let y = &x + (&a1 - &x) * r.random_range(0.1..0.9);
        let z = &y + (&a2 - &y) * r.random_range(0.1..0.9);
        Some([x, y, z])
    } else {
        Some([x, toward, sample_interior(r, dom)])
    }
}

pub fn geodesic_dichotomy(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let (mut bad, mut geodesics, mut skipped) = (0, 0, 0);
    let mut poly = polytope(r, 2..=3);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=3);
        }
        let dom: ConvexDomain = poly.clone().into();
        let Some(line) = polyline(r, &poly, &dom) else {
            skipped += 1;
            continue;
        };
        let clear = facet_hit(&poly, &dom, &line[0], &line[1]).is_some() && facet_hit(&poly, &dom, &line[1], &line[2]).is_some();
        let (ok, defect) = verify_geodesic_with(&dom, &line, tol).unwrap();
        if !clear || (defect > tol.eps_geo && defect <= 1e-7) {
            skipped += 1;
            continue;
        }
        let shared = common_face(&poly, &line, tol).unwrap().is_some_and(|c| !c.is_empty());
        geodesics += ok as usize;
        if ok != shared {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!(
        "geodesic iff both chords exit through a common facet; {geodesics} geodesics, {skipped} skipped near lower faces"
    ))
}

pub fn cone_criterion(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let (mut bad, mut members, mut skipped) = (0, 0, 0);
    let mut poly = polytope(r, 2..=3);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=3);
        }
        let dom: ConvexDomain = poly.clone().into();
        let Some([x, y, z]) = polyline(r, &poly, &dom) else {
            skipped += 1;
            continue;
        };
        let (Some((_, j)), Some(_)) = (facet_hit(&poly, &dom, &x, &y), facet_hit(&poly, &dom, &y, &z)) else {
            skipped += 1;
            continue;
        };
        let (ok, defect) = verify_geodesic_with(&dom, &[x.clone(), y.clone(), z.clone()], tol).unwrap();
        if defect > tol.eps_geo && defect <= 1e-7 {
            skipped += 1;
            continue;
        }
        // the direction x -> y is in its own cone, and z continues a geodesic iff
        // z - y lies in the cone of the facet hit by x -> y
        let own = cone_member_with(&poly, &FaceCone { base: x.clone(), face: vec![j] }, &(&y - &x), tol).unwrap();
        let cone = FaceCone { base: y.clone(), face: vec![j] };
        let member = cone_member_with(&poly, &cone, &(&z - &y), tol).unwrap();
        members += member as usize;
        if !own || member != ok {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!("{members} continuations in the cone, {skipped} skipped near lower faces"))
}

pub fn hilbert_two_face_check(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let sq_poly = square();
    let sq: ConvexDomain = sq_poly.clone().into();
    let (mut bad, mut skipped, mut geodesics) = (0, 0, 0);
    for _ in 0..n {
        let x = square_point(r);
        let z = square_point(r);
        let d = &z - &x;
        if d.norm() < 0.05 {
            skipped += 1;
            continue;
        }
        let y = (&x + &z) * 0.5 + dvector![-d[1], d[0]] * r.random_range(-0.3..0.3);
        if sq.contains(&y).unwrap() <= 1e-6 {
            skipped += 1;
            continue;
        }
        let fwd = triangle_report_with(&sq, &x, &y, &z, tol).unwrap();
        let bwd = triangle_report_with(&sq, &z, &y, &x, tol).unwrap();
        if near_corner(&fwd.hits) || near_corner(&bwd.hits) || ambiguous(&fwd) || ambiguous(&bwd) {
            skipped += 1;
            continue;
        }
        let line = [x, y, z];
        let ok = verify_hilbert_geodesic(&sq, &line, tol).unwrap().0;
        geodesics += ok as usize;
        if ok != hilbert_two_face(&sq_poly, &line, tol).unwrap() {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!("{geodesics} Hilbert geodesics in the square; {skipped} skipped"))
}

// projection

/// Minimum of `F(x, p + s (q - p))` over `s in [0, 1]`: a dense grid, then ternary
/// search around the best grid point.
fn brute_foot(dom: &ConvexDomain, x: &Point, p: &Point, q: &Point) -> (f64, f64) {
    const GRID: usize = 2000;
    let value = |s: f64| f(dom, x, &(p + (q - p) * s));
    let best = (0..=GRID).min_by(|&i, &j| value(i as f64 / GRID as f64).total_cmp(&value(j as f64 / GRID as f64))).unwrap();
    let (mut lo, mut hi) = (best.saturating_sub(1) as f64 / GRID as f64, ((best + 1).min(GRID)) as f64 / GRID as f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if value(m1) <= value(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let s = 0.5 * (lo + hi);
    (s, value(s))
}

pub fn definition_consistency(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst_pos = 0.0f64;
    let mut worst_val = 0.0f64;
    for i in 0..n {
        let ball = ConvexDomain::unit_ball(2);
        let x = sample_interior(r, &ball);
        let p = sample_interior(r, &ball);
        let q = sample_interior(r, &ball);
        let foot = nearest_on_segment(&ball, &x, (&p, &q)).unwrap();
        let (s, _) = brute_foot(&ball, &x, &p, &q);
        worst_pos = worst_pos.max((&foot.point - (&p + (&q - &p) * s)).norm());

        // polygons can have plateaus, so only the distance is compared
        let poly: ConvexDomain = if i % 2 == 0 { square().into() } else { random_polytope(r, 2).into() };
        let x = sample_interior(r, &poly);
        let p = sample_interior(r, &poly);
        let q = sample_interior(r, &poly);
        let foot = nearest_on_segment(&poly, &x, (&p, &q)).unwrap();
        let (_, v) = brute_foot(&poly, &x, &p, &q);
        worst_val = worst_val.max((foot.distance.value() - v).abs());
    }
    Outcome::at_most(n, worst_pos, 1e-6)
        .and(Outcome::at_most(n, worst_val, 1e-9))
        .with(format!("disk foot position error against a brute-force scan; polygon distance error {worst_val:.2e}"))
}

pub fn uniqueness_restarts(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let ball = ConvexDomain::unit_ball(r.random_range(2..=3));
        let x = sample_interior(r, &ball);
        let p = sample_interior(r, &ball);
        let q = sample_interior(r, &ball);
        if (&p - &q).norm() < 1e-3 {
            continue;
        }
        let base = nearest_on_segment(&ball, &x, (&p, &q)).unwrap();
        let s0 = base.parameter.unwrap();
        let at = |s: f64| &p + (&q - &p) * s;
        for _ in 0..10 {
            let (u0, u1) = (r.random_range(0.0..=s0), r.random_range(s0..=1.0));
            if u1 - u0 < 1e-6 {
                continue;
            }
            let (e0, e1) = if r.random_bool(0.5) { (at(u0), at(u1)) } else { (at(u1), at(u0)) };
            let foot = nearest_on_segment(&ball, &x, (&e0, &e1)).unwrap();
            worst = worst.max((&foot.point - &base.point).norm());
        }
    }
    Outcome::at_most(n, worst, 1e-8).with("feet on sub-segments containing the foot, in either orientation")
}

pub fn non_uniqueness_witness(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let sq = square();
    let dom: ConvexDomain = sq.clone().into();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = square_point(r);
        let lambda = r.random_range(0.05..0.95);
        let level = x[0] + lambda * (1.0 - x[0]);
        let target = HPolytope::from_rows(
            &[vec![-1.0, 0.0, -level], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, -1.0, 1.0]],
            None,
            None,
        )
        .unwrap();
        let rho = -(-lambda).ln_1p();
        let foot = nearest_on_convex(&sq, &x, &target).unwrap();
        // the ball of radius rho touches the target along a whole segment
        let (lo, hi) = (x[1] + lambda * (-1.0 - x[1]), x[1] + lambda * (1.0 - x[1]));
        let f_lo = f(&dom, &x, &dvector![level, 0.9 * lo + 0.1 * hi]);
        let f_hi = f(&dom, &x, &dvector![level, 0.1 * lo + 0.9 * hi]);
        worst = worst
            .max((foot.distance.value() - rho).abs())
            .max((f_lo - rho).abs())
            .max((f_hi - rho).abs());
    }
    Outcome::at_most(n, worst, 1e-9).with("two distinct feet on the square at the optimal distance")
}

pub fn monotone_bracketing(r: &mut ChaCha8Rng, n: usize, tol: &Tolerances) -> Outcome {
    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..n {
        let poly = polytope(r, 2..=3);
        let dom: ConvexDomain = poly.clone().into();
        let z = sample_interior(r, &dom);
        let target = poly.homothety(&z, r.random_range(0.1..0.6));
        let x = sample_interior(r, &dom);
        let (foot, trace) = nearest_on_convex_traced(&poly, &x, &target).unwrap();
        let b = &trace.brackets;
        let doubling = b.windows(2).take_while(|w| w[1].1 > w[0].1).count();
        let mut ok = b.windows(2).all(|w| w[0].0 < w[0].1 && w[1].0 >= w[0].0)
            && b[doubling.min(b.len())..].windows(2).all(|w| w[1].1 <= w[0].1);
        if let Some(&(lo, hi)) = b.last() {
            ok &= lo - 1e-9 <= trace.exact_rho && trace.exact_rho <= hi + 1e-9;
        }
        ok &= foot_certificate_with(&dom, &x, &foot.point, &target, tol).unwrap();
        worst = worst.max((foot.distance.value() - trace.exact_rho).abs());
        bad += !ok as usize;
    }
    Outcome::none_bad(n, bad)
        .and(Outcome::at_most(n, worst, 1e-9))
        .with(format!("brackets nested and certified feet; distance against the exact radius {worst:.2e}"))
}

// finsler-tangent

pub fn unit_ball_identity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    const BAND: f64 = 1e-7;
    let (mut bad, mut compared) = (0, 0);
    for i in 0..n {
        let dom = ConvexDomain::unit_ball(2 + i % 3);
        let p = sample_interior(r, &dom);
        let v = random_direction(r, dom.dim()) * r.random_range(0.0..2.0);
        let phi = tangent_norm(&dom, &p, &v).unwrap();
        if (phi - 1.0).abs() <= BAND {
            continue;
        }
        compared += 1;
        if (phi <= 1.0) != ((&p + &v).norm() <= 1.0) {
            bad += 1;
        }
    }
    Outcome::none_bad(n, bad).with(format!("norm at most 1 iff p + v in the closed domain, {compared} compared"))
}

pub fn tangent_homogeneity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let dom = doms.next(r);
        let p = sample_interior(r, &dom);
        let v = random_direction(r, dom.dim()) * r.random_range(0.1..2.0);
        let c = r.random_range(0.0..10.0);
        let a = tangent_norm(&dom, &p, &(&v * c)).unwrap();
        let b = c * tangent_norm(&dom, &p, &v).unwrap();
        worst = worst.max(rel_err(a, b));
    }
    Outcome::at_most(n, worst, 1e-12)
}

pub fn tangent_subadditivity(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut doms = Domains::new(2..=4, 0.3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let dom = doms.next(r);
        let p = sample_interior(r, &dom);
        let u = random_direction(r, dom.dim()) * r.random_range(0.0..2.0);
        let v = random_direction(r, dom.dim()) * r.random_range(0.0..2.0);
        let phi = |w: &Point| tangent_norm(&dom, &p, w).unwrap();
        worst = worst.max(phi(&(&u + &v)) - phi(&u) - phi(&v));
    }
    Outcome::at_most(n, worst, 1e-12).with("max of norm(u + v) - norm(u) - norm(v)")
}

pub fn convergence_order(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let grid = [1e-3, 1e-4, 1e-5];
    let mut worst = f64::INFINITY;
    let (mut fitted, mut low) = (0, 0);
    for i in 0..n {
        let dom: ConvexDomain = if i % 2 == 0 {
            ConvexDomain::unit_ball(2 + i % 3)
        } else {
            random_polytope(r, 2 + i % 3).into()
        };
        let p = sample_interior(r, &dom);
        let m = dom.contains(&p).unwrap();
        let x = random_direction(r, dom.dim()) * (r.random_range(0.0..2.0) * m);
        let y = random_direction(r, dom.dim()) * (r.random_range(0.5..2.0) * m);
        let rows = finite_difference_check(&dom, &p, &x, &y, &grid).unwrap();
        if let Some(fit) = fit_order(&rows) {
            fitted += 1;
            low += (fit.order < 0.9) as usize;
            worst = worst.min(fit.order);
        }
    }
    Outcome::at_least(n, worst, 0.9).with(format!(
        "minimum fitted order of the difference quotient error on steps 1e-3..1e-5; {fitted} fits above rounding noise, \
         {low} below the limit"
    ))
}

pub fn polytope_sup(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    let mut poly = polytope(r, 2..=4);
    for i in 0..n {
        if i % PER_DOMAIN == 0 {
            poly = polytope(r, 2..=4);
        }
        let dom: ConvexDomain = poly.clone().into();
        let p = sample_interior(r, &dom);
        let v = random_direction(r, poly.dim()) * r.random_range(0.0..3.0);
        let a = tangent_norm(&dom, &p, &v).unwrap();
        worst = worst.max(rel_err(a, polytope_tangent_sup(&poly, &p, &v).unwrap()));
    }
    Outcome::at_most(n, worst, 1e-9).with("ray-cast norm against the max over constraint functionals")
}

// classical-oracles

pub fn menelaus(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let hand = menelaus_product(
        &dvector![0.0, 0.0],
        &dvector![1.0, 0.0],
        &dvector![0.0, 1.0],
        &dvector![1.5, -0.5],
        &dvector![0.0, 0.25],
        &dvector![0.5, 0.0],
    )
    .unwrap();
    let mut worst = (hand - 1.0).abs();
    for _ in 0..n {
        let ([a, b, c], [a1, b1, c1]) = random_transversal(r);
        worst = worst.max((menelaus_product(&a, &b, &c, &a1, &b1, &c1).unwrap() - 1.0).abs());
    }
    Outcome::at_most(n, worst, 1e-9).with(format!("max |M - 1| on transversals; hand instance gives {hand}"))
}

pub fn menelaus_off_line(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut away = 0;
    let mut done = 0;
    while done < n {
        let ([a, b, c], _) = random_transversal(r);
        // independent points on the three side lines, clear of the vertices
        let mut side = |p: &Point, q: &Point| loop {
            let u: f64 = r.random_range(-1.0..2.0);
            if u.abs() > 0.05 && (u - 1.0).abs() > 0.05 {
                return p + (q - p) * u;
            }
        };
        let (a1, b1, c1) = (side(&b, &c), side(&c, &a), side(&a, &b));
        let (u, v) = (&b1 - &a1, &c1 - &a1);
        // regenerate the measure-zero collinear case
        if (u[0] * v[1] - u[1] * v[0]).abs() <= 1e-12 * u.norm() * v.norm() {
            continue;
        }
        done += 1;
        if menelaus_product(&a, &b, &c, &a1, &b1, &c1).is_ok_and(|m| (m - 1.0).abs() > 1e-4) {
            away += 1;
        }
    }
    let share = away as f64 / n as f64;
    Outcome::at_least(n, share, 0.99).with("share of non-collinear side points with |M - 1| > 1e-4")
}

pub fn ceva(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..n {
        let ([a, b, c], [a1, b1, c1]) = random_cevians(r);
        worst = worst.max((ceva_product(&a, &b, &c, &a1, &b1, &c1).unwrap() + 1.0).abs());
    }
    Outcome::at_most(n, worst, 1e-9).with("max |C + 1| on concurrent cevians")
}

pub fn cross_ratio_invariance(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < n {
        let o = dvector![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
        let d = random_direction(r, 2);
        let mut s: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..1.0)).collect();
        s.sort_by(f64::total_cmp);
        if s.windows(2).any(|w| w[1] - w[0] < 0.05) {
            continue;
        }
        let pts: Vec<Point> = s.iter().map(|t| &o + &d * *t).collect();
        let mut m = DMatrix::<f64>::identity(3, 3);
        for v in m.iter_mut() {
            *v += r.random_range(-0.4..0.4);
        }
        let Ok(map) = ProjectiveMap::new(m) else { continue };
        if pts.iter().any(|p| map.denominator(p) < 0.2) {
            continue;
        }
        let img: Vec<Point> = pts.iter().map(|p| map.apply(p).unwrap()).collect();
        let before = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let Ok(after) = cross_ratio(&img[0], &img[1], &img[2], &img[3]) else { continue };
        worst = worst.max(rel_err(after, before));
        done += 1;
    }
    Outcome::at_most(n, worst, 1e-9)
}

pub fn appendix_chain(r: &mut ChaCha8Rng, n: usize, _: &Tolerances) -> Outcome {
    let (mut below, mut done, mut failed) = (0, 0, 0);
    let mut chain = 0.0f64;
    // Menelaus, first and second perspectivity; reported, not gated
    let mut residual = [0.0f64; 3];
    let mut doms = Domains::new(2..=2, 0.5);
    while done < n {
        let dom = doms.next(r);
        let x = sample_interior(r, &dom);
        let y = sample_interior(r, &dom);
        let z = sample_interior(r, &dom);
        let Ok(rep) = appendix_replay(&dom, &x, &y, &z) else {
            failed += 1;
            if failed > n {
                break;
            }
            continue;
        };
        done += 1;
        chain = chain.max(rel_err(rep.chained, rep.through_a_prime));
        let res = [(rep.menelaus - 1.0).abs(), rep.first_perspectivity.abs(), rep.second_perspectivity.abs()];
        for (w, v) in residual.iter_mut().zip(res) {
            *w = w.max(v);
        }
        if rep.through_a_prime < rep.direct * (1.0 - 1e-12) || rep.chained < rep.direct * (1.0 - 1e-12) {
            below += 1;
        }
    }
    Outcome::none_bad(done, below)
        .and(Outcome::at_most(done, chain, 1e-9))
        .and(Outcome::at_least(done, done as f64, n as f64))
        .with(format!(
            "final inequality |x-a'|/|z-a'| >= |x-e|/|z-e| within 1e-12; chained ratio against the a' ratio {chain:.2e}; \
             residuals Menelaus {:.2e}, perspectivities {:.2e} and {:.2e}; {failed} degenerate triangles redrawn",
            residual[0], residual[1], residual[2]
        ))
}
