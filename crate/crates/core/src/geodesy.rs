//! Triangle equality, face cones and geodesic tests.
//!
//! Equality `F(x, y) + F(y, z) = F(x, z)` holds exactly when the three exit points
//! `a(x, y)`, `a(y, z)`, `a(x, z)` lie in a common proper face of the boundary (points at
//! infinity included). For non-collinear triples that is the same as the three exit
//! points being aligned in projective space, which is tested through the singular
//! values of their stacked homogeneous coordinates. When two exit points coincide the
//! triple is collinear and alignment alone says nothing, so all three must coincide.

use nalgebra::DMatrix;

use crate::convex::{ConvexDomain, Hit, HPolytope, ProjectivePoint};
use crate::error::{check_dim, check_finite};
use crate::lp::{LinearProgram, LpOutcome};
use crate::metric::{funk, funk_with_hit, hilbert};
use crate::{Error, Point, Result, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleReport {
    /// `F(x, y) + F(y, z) - F(x, z)`.
    pub defect: f64,
    /// `a(x, y)`, `a(y, z)`, `a(x, z)` in homogeneous coordinates.
    pub hits: [ProjectivePoint; 3],
    pub aligned: bool,
}

/// Ratio `σ_k / σ_1` of the singular values (descending, 1-based `k`) of the stacked
/// homogeneous coordinates; 0 when there are fewer than `k` singular values.
fn singular_ratio(points: &[&ProjectivePoint], k: usize) -> f64 {
    let m = points[0].homogeneous().len();
    let mat = DMatrix::from_fn(points.len(), m, |i, j| points[i].homogeneous()[j]);
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv.len() < k || sv[0] == 0.0 {
        return 0.0;
    }
    sv[k - 1] / sv[0]
}

/// Face-alignment test for three exit points.
pub fn hits_aligned(hits: &[ProjectivePoint; 3], eps_rank: f64) -> bool {
    let [a, b, c] = hits;
    let coincide = |p: &ProjectivePoint, q: &ProjectivePoint| singular_ratio(&[p, q], 2) <= eps_rank;
    if coincide(a, b) || coincide(b, c) || coincide(a, c) {
        singular_ratio(&[a, b, c], 2) <= eps_rank
    } else if hits.iter().any(|h| h.is_at_infinity()) {
        singular_ratio(&[a, b, c], 3) <= eps_rank
    } else {
        flatness(a, b, c) <= eps_rank
    }
}

/// Twice the triangle area over the squared longest side. Unlike the homogeneous rank gap
/// this does not shrink with the size of the triangle.
fn flatness(a: &ProjectivePoint, b: &ProjectivePoint, c: &ProjectivePoint) -> f64 {
    let affine = |p: &ProjectivePoint| {
        let h = p.homogeneous();
        let n = h.len() - 1;
        h.rows(0, n) / h[n]
    };
    let (a, b, c) = (affine(a), affine(b), affine(c));
    let (u, v) = (&b - &a, &c - &a);
    let longest = u.norm_squared().max(v.norm_squared()).max((&c - &b).norm_squared());
    let gram = u.norm_squared() * v.norm_squared() - u.dot(&v).powi(2);
    gram.max(0.0).sqrt() / longest
}

pub fn triangle_report(domain: &ConvexDomain, x: &Point, y: &Point, z: &Point) -> Result<TriangleReport> {
    triangle_report_with(domain, x, y, z, &Tolerances::DEFAULT)
}

pub fn triangle_report_with(
    domain: &ConvexDomain,
    x: &Point,
    y: &Point,
    z: &Point,
    tol: &Tolerances,
) -> Result<TriangleReport> {
    let (fxy, hxy) = funk_with_hit(domain, x, y)?;
    let (fyz, hyz) = funk_with_hit(domain, y, z)?;
    let (fxz, hxz) = funk_with_hit(domain, x, z)?;
    let defect = fxy.value() + fyz.value() - fxz.value();
    let proj = |h: &Hit| h.to_projective();
    let (hits, aligned) = match (hxy, hyz, hxz) {
        (Some(a), Some(b), Some(c)) => {
            let hits = [proj(&a), proj(&b), proj(&c)];
            let aligned = hits_aligned(&hits, tol.eps_rank);
            (hits, aligned)
        }
        // x = y: the chain degenerates to the single chord x → z
        (None, Some(_), Some(c)) | (Some(_), None, Some(c)) => {
            let p = proj(&c);
            ([p.clone(), p.clone(), p], true)
        }
        // x = z: equality needs both directions to vanish
        (Some(a), Some(b), None) => {
            let aligned = !a.is_finite() && !b.is_finite();
            let (pa, pb) = (proj(&a), proj(&b));
            ([pa.clone(), pb, pa], aligned)
        }
        _ => return Err(Error::CoincidentPoints),
    };
    Ok(TriangleReport { defect, hits, aligned })
}

/// The cone of directions at `base` whose rays meet the face cut out by `face`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceCone {
    pub base: Point,
    pub face: Vec<usize>,
}

fn check_face(poly: &HPolytope, face: &[usize]) -> Result<()> {
    let m = poly.num_constraints();
    if face.is_empty() || face.iter().any(|&j| j >= m) {
        return Err(Error::InvalidArgument(format!("face indices {face:?} are invalid")));
    }
    let n = poly.dim();
    let mut lp = LinearProgram::new(n);
    for (j, row) in poly.rows().iter().enumerate() {
        if face.contains(&j) {
            lp.add_eq(&row[..n], row[n]);
        } else {
            lp.add_le(&row[..n], row[n]);
        }
    }
    match lp.minimize()? {
        LpOutcome::Infeasible => Err(Error::InvalidArgument(format!("face {face:?} is empty"))),
        _ => Ok(()),
    }
}

pub fn cone_member(poly: &HPolytope, cone: &FaceCone, v: &nalgebra::DVector<f64>) -> Result<bool> {
    cone_member_with(poly, cone, v, &Tolerances::DEFAULT)
}

pub fn cone_member_with(
    poly: &HPolytope,
    cone: &FaceCone,
    v: &nalgebra::DVector<f64>,
    tol: &Tolerances,
) -> Result<bool> {
    check_dim(poly.dim(), cone.base.len())?;
    check_dim(poly.dim(), v.len())?;
    check_finite(v)?;
    check_face(poly, &cone.face)?;
    let domain = ConvexDomain::Polytope(poly.clone());
    let m = domain.contains(&cone.base)?;
    if m <= 0.0 {
        return Err(Error::NotInterior { margin: m });
    }
    if v.norm() <= tol.eps_pt {
        return Ok(true);
    }
    Ok(match domain.hit_along(&cone.base, v) {
        Hit::Finite { point, .. } => {
            let active = poly.active_face(&point, tol.eps_face).unwrap_or_default();
            cone.face.iter().all(|j| active.contains(j))
        }
        Hit::AtInfinity { direction } => cone
            .face
            .iter()
            .all(|&j| poly.normals()[j].dot(&direction).abs() <= tol.eps_face),
    })
}

fn check_polyline(polyline: &[Point]) -> Result<()> {
    if polyline.len() < 2 {
        return Err(Error::InvalidArgument("a polyline needs at least two points".into()));
    }
    Ok(())
}

/// Endpoint additivity: `Σ F(p_i, p_{i+1}) - F(p_0, p_k)`, geodesic when at most `eps_geo`.
pub fn verify_geodesic(domain: &ConvexDomain, polyline: &[Point]) -> Result<(bool, f64)> {
    verify_geodesic_with(domain, polyline, &Tolerances::DEFAULT)
}

pub fn verify_geodesic_with(domain: &ConvexDomain, polyline: &[Point], tol: &Tolerances) -> Result<(bool, f64)> {
    check_polyline(polyline)?;
    let mut sum = 0.0;
    for w in polyline.windows(2) {
        sum += funk(domain, &w[0], &w[1])?.value();
    }
    let defect = sum - funk(domain, &polyline[0], &polyline[polyline.len() - 1])?.value();
    Ok((defect <= tol.eps_geo, defect))
}

/// Same test for the Hilbert metric.
pub fn verify_hilbert_geodesic(domain: &ConvexDomain, polyline: &[Point], tol: &Tolerances) -> Result<(bool, f64)> {
    check_polyline(polyline)?;
    let mut sum = 0.0;
    for w in polyline.windows(2) {
        sum += hilbert(domain, &w[0], &w[1])?.value();
    }
    let defect = sum - hilbert(domain, &polyline[0], &polyline[polyline.len() - 1])?.value();
    Ok((defect <= tol.eps_geo, defect))
}

/// Constraints active at the exit point of every chord `p_i → p_{i+1}`, intersected.
/// `None` when some chord is degenerate or exits at infinity.
pub fn common_face(poly: &HPolytope, polyline: &[Point], tol: &Tolerances) -> Result<Option<Vec<usize>>> {
    check_polyline(polyline)?;
    let domain = ConvexDomain::Polytope(poly.clone());
    let mut common: Option<Vec<usize>> = None;
    for w in polyline.windows(2) {
        let (_, hit) = funk_with_hit(&domain, &w[0], &w[1])?;
        let Some(Hit::Finite { point, .. }) = hit else {
            return Ok(None);
        };
        let active = poly.active_face(&point, tol.eps_face).unwrap_or_default();
        common = Some(match common {
            None => active,
            Some(c) => c.into_iter().filter(|j| active.contains(j)).collect(),
        });
    }
    Ok(common)
}

/// Both the forward chords and the reversed chords of the polyline exit through a
/// common face each.
pub fn hilbert_two_face(poly: &HPolytope, polyline: &[Point], tol: &Tolerances) -> Result<bool> {
    let forward = common_face(poly, polyline, tol)?;
    let reversed: Vec<Point> = polyline.iter().rev().cloned().collect();
    let backward = common_face(poly, &reversed, tol)?;
    Ok(matches!((forward, backward), (Some(f), Some(b)) if !f.is_empty() && !b.is_empty()))
}

/// True when the exit point `a(x, z)` is exposed, which makes `[x, z]` the only geodesic.
pub fn unique_geodesic_pair(domain: &ConvexDomain, x: &Point, z: &Point) -> Result<bool> {
    unique_geodesic_pair_with(domain, x, z, &Tolerances::DEFAULT)
}

pub fn unique_geodesic_pair_with(domain: &ConvexDomain, x: &Point, z: &Point, tol: &Tolerances) -> Result<bool> {
    let (d, hit) = funk_with_hit(domain, x, z)?;
    let hit = hit.ok_or(Error::CoincidentPoints)?;
    let Hit::Finite { point, .. } = hit else {
        return Err(Error::HitAtInfinity);
    };
    if d.value() <= 0.0 {
        return Err(Error::InvalidArgument("F(x, z) must be positive".into()));
    }
    domain.is_exposed(&point, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn square() -> ConvexDomain {
        HPolytope::cube(2, 1.0).unwrap().into()
    }

    #[test]
    fn collinear_between_is_equality() {
        let r = triangle_report(&square(), &dvector![-0.5, 0.1], &dvector![0.0, 0.2], &dvector![0.5, 0.3]).unwrap();
        assert!(r.defect.abs() <= 1e-12);
        assert!(r.aligned);
        assert!((r.hits[0].homogeneous() - r.hits[2].homogeneous()).norm() < 1e-12);
    }

    #[test]
    fn same_edge_triple_in_square() {
        // every exit point lands on the edge x1 = 1
        let (x, y, z) = (dvector![-0.5, 0.5], dvector![0.0, 0.6], dvector![0.5, 0.5]);
        let r = triangle_report(&square(), &x, &y, &z).unwrap();
        assert!(r.defect.abs() <= 1e-9, "{}", r.defect);
        assert!(r.aligned);
    }

    #[test]
    fn ball_generic_triple_is_strict() {
        let ball = ConvexDomain::unit_ball(2);
        let r = triangle_report(&ball, &dvector![-0.3, 0.1], &dvector![0.2, 0.4], &dvector![0.4, -0.2]).unwrap();
        assert!(r.defect > 1e-3);
        assert!(!r.aligned);
    }

    #[test]
    fn collinear_beyond_is_not_aligned() {
        // y beyond z: a(y, z) is the far endpoint, the triple is collinear but strict
        let r = triangle_report(&square(), &dvector![0.0, 0.0], &dvector![0.5, 0.0], &dvector![0.25, 0.0]).unwrap();
        assert!(r.defect > 0.1);
        assert!(!r.aligned);
    }

    #[test]
    fn parallel_rays_in_half_plane() {
        let hp: ConvexDomain = HPolytope::half_space(dvector![0.0, -1.0], 0.0, Some(dvector![0.0, 1.0]))
            .unwrap()
            .into();
        let r = triangle_report(&hp, &dvector![0.0, 1.0], &dvector![1.0, 1.0], &dvector![3.0, 1.0]).unwrap();
        assert_eq!(r.defect, 0.0);
        assert!(r.aligned);
        // going back and forth along a boundary-parallel line costs nothing either
        let r = triangle_report(&hp, &dvector![0.0, 1.0], &dvector![2.0, 1.0], &dvector![1.0, 1.0]).unwrap();
        assert_eq!(r.defect, 0.0);
        assert!(r.aligned);
    }

    #[test]
    fn cone_member_examples() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let cone = FaceCone { base: dvector![0.0, 0.0], face: vec![0] };
        assert!(cone_member(&sq, &cone, &dvector![1.0, 0.0]).unwrap());
        assert!(!cone_member(&sq, &cone, &dvector![-1.0, 0.0]).unwrap());
        assert!(cone_member(&sq, &cone, &dvector![0.0, 0.0]).unwrap());
        assert!(cone_member(&sq, &cone, &dvector![1.0, 0.99]).unwrap());
        let bad = FaceCone { base: dvector![0.0, 0.0], face: vec![0, 1] };
        assert!(cone_member(&sq, &bad, &dvector![1.0, 0.0]).is_err());
        let bad = FaceCone { base: dvector![0.0, 0.0], face: vec![9] };
        assert!(cone_member(&sq, &bad, &dvector![1.0, 0.0]).is_err());
    }

    #[test]
    fn verify_geodesic_examples() {
        let sq = square();
        let straight = vec![dvector![-0.6, -0.2], dvector![-0.1, 0.0], dvector![0.4, 0.2], dvector![0.65, 0.3]];
        let (ok, defect) = verify_geodesic(&sq, &straight).unwrap();
        assert!(ok && defect.abs() <= 1e-12);

        let bent = vec![dvector![-0.5, 0.5], dvector![0.0, 0.6], dvector![0.5, 0.5]];
        assert!(verify_geodesic(&sq, &bent).unwrap().0);
        let face = common_face(sq.as_polytope().as_ref().unwrap(), &bent, &Tolerances::DEFAULT).unwrap();
        assert_eq!(face, Some(vec![0]));

        let ball = ConvexDomain::unit_ball(2);
        let (ok, defect) = verify_geodesic(&ball, &bent).unwrap();
        assert!(!ok && defect > 0.0);
    }

    #[test]
    fn unique_geodesic_examples() {
        let ball = ConvexDomain::unit_ball(2);
        assert!(unique_geodesic_pair(&ball, &dvector![0.1, 0.0], &dvector![0.3, 0.4]).unwrap());
        let sq = square();
        assert!(!unique_geodesic_pair(&sq, &dvector![0.0, 0.0], &dvector![0.5, 0.2]).unwrap());
        assert!(unique_geodesic_pair(&sq, &dvector![0.0, 0.0], &dvector![0.5, 0.5]).unwrap());
        let hp: ConvexDomain = HPolytope::half_space(dvector![0.0, -1.0], 0.0, Some(dvector![0.0, 1.0]))
            .unwrap()
            .into();
        assert_eq!(
            unique_geodesic_pair(&hp, &dvector![0.0, 1.0], &dvector![1.0, 2.0]),
            Err(Error::HitAtInfinity)
        );
    }

    #[test]
    fn hilbert_two_face_in_square() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let dom = ConvexDomain::Polytope(sq.clone());
        let tol = Tolerances::DEFAULT;
        // forward chords exit through x1 = 1, backward chords through x1 = -1
        let line = vec![dvector![-0.5, 0.0], dvector![0.0, 0.05], dvector![0.5, 0.0]];
        assert!(hilbert_two_face(&sq, &line, &tol).unwrap());
        assert!(verify_hilbert_geodesic(&dom, &line, &tol).unwrap().0);
        // a bend whose backward chords exit through different edges
        let bent = vec![dvector![-0.5, 0.0], dvector![0.0, 0.6], dvector![0.5, 0.0]];
        assert!(!hilbert_two_face(&sq, &bent, &tol).unwrap());
        assert!(!verify_hilbert_geodesic(&dom, &bent, &tol).unwrap().0);
    }

    mod properties {
        use super::super::*;
        use crate::sampling::{random_direction, random_polytope, sample_interior};
        use nalgebra::dvector;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        const EQ: f64 = 1e-9;

        fn near_corner(hits: &[ProjectivePoint]) -> bool {
            hits.iter().any(|h| {
                let v = h.homogeneous();
                v[0].abs().min(v[1].abs()) >= (1.0 - 1e-4) * v[2].abs()
            })
        }

        fn square_point() -> impl Strategy<Value = Point> {
            (-0.95f64..0.95, -0.95f64..0.95).prop_map(|(a, b)| dvector![a, b])
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(256))]

            #[test]
            fn square_equality_iff_alignment(x in square_point(), y in square_point(), z in square_point()) {
                let sq: ConvexDomain = HPolytope::cube(2, 1.0).unwrap().into();
                prop_assume!((&x - &y).norm() > 1e-6 && (&y - &z).norm() > 1e-6 && (&x - &z).norm() > 1e-6);
                let rep = triangle_report(&sq, &x, &y, &z).unwrap();
                prop_assume!(!near_corner(&rep.hits));
                prop_assert!(rep.defect >= -1e-12);
                prop_assert_eq!(rep.defect <= EQ, rep.aligned, "defect {:e}", rep.defect);
            }

            #[test]
            fn ball_equality_iff_alignment(seed in any::<u64>(), s in 0.05f64..0.95) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let ball = ConvexDomain::unit_ball(r.random_range(2..=3));
                let x = sample_interior(&mut r, &ball);
                let z = sample_interior(&mut r, &ball);
                prop_assume!((&x - &z).norm() > 0.1);
                let y = &x + (&z - &x) * s;
                let on = triangle_report(&ball, &x, &y, &z).unwrap();
                prop_assert!(on.defect <= EQ && on.aligned);
                let d = &z - &x;
                let w = random_direction(&mut r, ball.dim());
                let off = &w - &d * (d.dot(&w) / d.norm_squared());
                prop_assume!(off.norm() > 1e-3);
                let bent = &y + off.normalize() * 1e-2;
                prop_assume!(ball.contains(&bent).unwrap() > 0.0);
                let rep = triangle_report(&ball, &x, &bent, &z).unwrap();
                prop_assert!(rep.defect > 1e-6 && !rep.aligned, "defect {:e}", rep.defect);
            }

            #[test]
            fn ball_rejects_bent_polylines(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let ball = ConvexDomain::unit_ball(2);
                let pts: Vec<Point> = (0..3).map(|_| sample_interior(&mut r, &ball)).collect();
                let (a, b) = (&pts[1] - &pts[0], &pts[2] - &pts[1]);
                let sin = (a[0] * b[1] - a[1] * b[0]).abs() / (a.norm() * b.norm());
                prop_assume!(sin > 1e-2);
                prop_assert!(!verify_geodesic(&ball, &pts).unwrap().0);
            }

            #[test]
            fn face_aligned_polylines_are_geodesics(seed in any::<u64>(), s in 0.1f64..0.9, u in 0.1f64..0.9) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dim = r.random_range(2..=3);
                let poly = random_polytope(&mut r, dim);
                let dom: ConvexDomain = poly.clone().into();
                let tol = Tolerances::DEFAULT;
                let x = sample_interior(&mut r, &dom);
                let toward = sample_interior(&mut r, &dom);
                prop_assume!((&toward - &x).norm() > 1e-3);
                let a1 = dom.ray_boundary(&x, &toward).unwrap().point().unwrap().clone();
                let face = poly.active_face(&a1, tol.eps_face).unwrap();
                prop_assume!(face.len() == 1);
                let n = &poly.normals()[face[0]];
                let w = random_direction(&mut r, dim);
                let tangent = &w - n * n.dot(&w);
                prop_assume!(tangent.norm() > 1e-3);
                // slide along the facet, staying inside it
                let mut a2 = &a1 + tangent.normalize() * r.random_range(0.01..0.5);
                while poly.margin(&a2) < -1e-12 {
                    a2 = (&a1 + &a2) * 0.5;
                }
                prop_assume!((&a2 - &a1).norm() > 1e-4);
                let y = &x + (&a1 - &x) * s;
                let z = &y + (&a2 - &y) * u;
                let line = vec![x, y, z];
                let (ok, defect) = verify_geodesic(&dom, &line).unwrap();
                prop_assert!(ok, "defect {defect:e}");
                let common = common_face(&poly, &line, &tol).unwrap().unwrap();
                prop_assert!(common.contains(&face[0]));
            }

            #[test]
            fn geodesic_polylines_share_a_face(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let sq = HPolytope::cube(2, 1.0).unwrap();
                let dom: ConvexDomain = sq.clone().into();
                let x = sample_interior(&mut r, &dom);
                let y = sample_interior(&mut r, &dom);
                let z = &y + (&y - &x) * r.random_range(0.0..0.5) + random_direction(&mut r, 2) * 0.05;
                prop_assume!(dom.contains(&z).unwrap() > 1e-6 && (&z - &y).norm() > 1e-6);
                let line = vec![x, y, z];
                let tol = Tolerances::DEFAULT;
                let rep = triangle_report(&dom, &line[0], &line[1], &line[2]).unwrap();
                prop_assume!(!near_corner(&rep.hits));
                if verify_geodesic(&dom, &line).unwrap().0 {
                    prop_assert!(!common_face(&sq, &line, &tol).unwrap().unwrap_or_default().is_empty());
                }
            }

            #[test]
            fn hilbert_geodesic_iff_two_faces(x in square_point(), z in square_point(), bend in -0.3f64..0.3) {
                let sq = HPolytope::cube(2, 1.0).unwrap();
                let dom: ConvexDomain = sq.clone().into();
                let d = &z - &x;
                prop_assume!(d.norm() > 0.05);
                let y = (&x + &z) * 0.5 + dvector![-d[1], d[0]] * bend;
                prop_assume!(dom.contains(&y).unwrap() > 1e-6);
                let line = vec![x.clone(), y.clone(), z.clone()];
                let fwd = triangle_report(&dom, &x, &y, &z).unwrap();
                let bwd = triangle_report(&dom, &z, &y, &x).unwrap();
                prop_assume!(!near_corner(&fwd.hits) && !near_corner(&bwd.hits));
                prop_assume!([fwd.defect, bwd.defect].iter().all(|&e| e <= EQ || e > 1e-7));
                let tol = Tolerances::DEFAULT;
                prop_assert_eq!(verify_hilbert_geodesic(&dom, &line, &tol).unwrap().0, hilbert_two_face(&sq, &line, &tol).unwrap());
            }
        }
    }
}
