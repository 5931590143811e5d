//! Convex domains and the boundary queries every metric is built on.
//!
//! A [`ConvexDomain`] is a proper open convex subset of `R^n` in one of four shapes: an
//! intersection of open half-spaces, a Euclidean ball, an invertible affine image of
//! another domain, or a finite intersection of domains. All of them answer the same
//! questions: signed membership margin, where a ray leaves the domain, and which linear
//! forms support the domain at a boundary point.

mod affine;
pub mod file;
mod polytope;
mod projective;

pub use affine::AffineMap;
pub use polytope::HPolytope;
pub use projective::ProjectiveMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, check_finite};
use crate::{Error, Point, Result, Tolerances};

/// An affine functional `x ↦ ⟨coeffs, x⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coeffs: DVector<f64>,
    pub offset: f64,
}

impl LinearForm {
    pub fn new(coeffs: DVector<f64>, offset: f64) -> Self {
        LinearForm { coeffs, offset }
    }

    pub fn eval(&self, x: &Point) -> f64 {
        self.coeffs.dot(x) + self.offset
    }

    /// The linear part applied to a vector.
    pub fn linear(&self, v: &DVector<f64>) -> f64 {
        self.coeffs.dot(v)
    }
}

/// Where a ray leaves a domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Hit {
    /// `point = x + t (y - x)` lies on the boundary, with `t >= 1` for interior `y`.
    Finite { point: Point, t: f64 },
    /// The ray never leaves; `direction` is its unit recession direction.
    AtInfinity { direction: DVector<f64> },
}

impl Hit {
    pub fn is_finite(&self) -> bool {
        matches!(self, Hit::Finite { .. })
    }

    pub fn point(&self) -> Option<&Point> {
        match self {
            Hit::Finite { point, .. } => Some(point),
            Hit::AtInfinity { .. } => None,
        }
    }

    pub fn t(&self) -> Option<f64> {
        match self {
            Hit::Finite { t, .. } => Some(*t),
            Hit::AtInfinity { .. } => None,
        }
    }

    pub fn to_projective(&self) -> ProjectivePoint {
        match self {
            Hit::Finite { point, .. } => ProjectivePoint::finite(point),
            Hit::AtInfinity { direction } => ProjectivePoint::at_infinity(direction),
        }
    }
}

/// Homogeneous coordinates in `RP^n`, normalized to unit length. A zero last coordinate
/// marks a point on the hyperplane at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectivePoint(DVector<f64>);

impl ProjectivePoint {
    pub fn finite(p: &Point) -> Self {
        let mut h = p.clone().insert_row(p.len(), 1.0);
        h.normalize_mut();
        ProjectivePoint(h)
    }

    pub fn at_infinity(direction: &DVector<f64>) -> Self {
        let mut h = direction.clone().insert_row(direction.len(), 0.0);
        h.normalize_mut();
        ProjectivePoint(h)
    }

    pub fn homogeneous(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn is_at_infinity(&self) -> bool {
        self.0[self.0.len() - 1] == 0.0
    }

    /// Ratio of smallest to largest singular value of the stacked coordinates. Points
    /// lie on a common projective subspace of dimension `k - 2` when this vanishes.
    pub fn relative_rank_gap(points: &[ProjectivePoint]) -> f64 {
        let k = points.len();
        let m = points[0].0.len();
        let mat = DMatrix::from_fn(k, m, |i, j| points[i].0[j]);
        let sv = mat.singular_values();
        let max = sv.max();
        if max == 0.0 || k > m {
            return 0.0;
        }
        sv.min() / max
    }
}

/// Free-function form of [`Hit::to_projective`].
pub fn to_projective(hit: &Hit) -> ProjectivePoint {
    hit.to_projective()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanBall {
    center: Point,
    radius: f64,
}

impl EuclideanBall {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_finite(&center)?;
        if center.is_empty() {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!("radius must be positive, got {radius}")));
        }
        Ok(EuclideanBall { center, radius })
    }

    pub fn unit(dim: usize) -> Self {
        EuclideanBall {
            center: Point::zeros(dim),
            radius: 1.0,
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn cast(&self, x: &Point, d: &DVector<f64>) -> Option<f64> {
        // |x + t d - c|^2 = r^2, positive root, written to avoid cancellation
        let w = x - &self.center;
        let a = d.norm_squared();
        let b = w.dot(d);
        let c = w.norm_squared() - self.radius * self.radius;
        let disc = (b * b - a * c).max(0.0).sqrt();
        if b > 0.0 {
            Some(-c / (b + disc))
        } else {
            Some((disc - b) / a)
        }
    }
}

/// An affine image `{ A u + τ : u ∈ inner }`, evaluated lazily by pulling points back.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineImage {
    inner: Box<ConvexDomain>,
    map: AffineMap,
    inverse: AffineMap,
    base: Point,
}

impl AffineImage {
    pub fn inner(&self) -> &ConvexDomain {
        &self.inner
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    parts: Vec<ConvexDomain>,
    base: Point,
}

impl Intersection {
    pub fn parts(&self) -> &[ConvexDomain] {
        &self.parts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexDomain {
    Polytope(HPolytope),
    Ball(EuclideanBall),
    Affine(AffineImage),
    Intersection(Intersection),
}

impl From<HPolytope> for ConvexDomain {
    fn from(p: HPolytope) -> Self {
        ConvexDomain::Polytope(p)
    }
}

impl From<EuclideanBall> for ConvexDomain {
    fn from(b: EuclideanBall) -> Self {
        ConvexDomain::Ball(b)
    }
}

/// Generators of the outward normal cone at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCone {
    /// Unit outward normals; the cone is their nonnegative span.
    pub generators: Vec<DVector<f64>>,
    /// True when some active piece is strictly convex (a ball), which makes the
    /// point exposed regardless of the generators.
    pub strict: bool,
}

impl ConvexDomain {
    pub fn unit_ball(dim: usize) -> Self {
        ConvexDomain::Ball(EuclideanBall::unit(dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Polytope(p) => p.dim(),
            ConvexDomain::Ball(b) => b.center.len(),
            ConvexDomain::Affine(a) => a.base.len(),
            ConvexDomain::Intersection(i) => i.base.len(),
        }
    }

    /// Interior reference point: the polytope witness, the ball center, or the image or
    /// common point of the children. Supporting functionals vanish here.
    pub fn base_point(&self) -> &Point {
        match self {
            ConvexDomain::Polytope(p) => p.witness(),
            ConvexDomain::Ball(b) => &b.center,
            ConvexDomain::Affine(a) => &a.base,
            ConvexDomain::Intersection(i) => &i.base,
        }
    }

    /// Lazy affine image of this domain.
    pub fn affine_image(&self, map: &AffineMap) -> Result<ConvexDomain> {
        check_dim(self.dim(), map.dim())?;
        let inverse = map.inverse()?;
        let base = map.apply(self.base_point());
        Ok(ConvexDomain::Affine(AffineImage {
            inner: Box::new(self.clone()),
            map: map.clone(),
            inverse,
            base,
        }))
    }

    /// Intersection of domains sharing an interior point. Without a witness, the
    /// children's base points and their average are tried, then a linear program when
    /// every child is polyhedral.
    pub fn intersection(parts: Vec<ConvexDomain>, witness: Option<Point>) -> Result<ConvexDomain> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidDomain("intersection needs at least one part".into()));
        };
        let dim = first.dim();
        for p in &parts {
            check_dim(dim, p.dim())?;
        }
        let margin = |x: &Point| parts.iter().map(|p| p.margin(x)).fold(f64::INFINITY, f64::min);
        let tol = Tolerances::DEFAULT.eps_bd;
        let base = match witness {
            Some(w) => {
                check_dim(dim, w.len())?;
                check_finite(&w)?;
                let m = margin(&w);
                if m <= tol {
                    return Err(Error::InvalidDomain(format!(
                        "intersection witness is not interior (margin {m:e})"
                    )));
                }
                w
            }
            None => {
                let mut candidates: Vec<Point> = parts.iter().map(|p| p.base_point().clone()).collect();
                let avg = candidates.iter().fold(Point::zeros(dim), |acc, p| acc + p) / candidates.len() as f64;
                candidates.push(avg);
                if let Some(poly) = Self::merge_polytopes(&parts) {
                    candidates.push(poly.witness().clone());
                }
                let best = candidates
                    .into_iter()
                    .map(|c| (margin(&c), c))
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .unwrap();
                if best.0 <= tol {
                    return Err(Error::InvalidDomain(
                        "could not find an interior point of the intersection; supply a witness".into(),
                    ));
                }
                best.1
            }
        };
        Ok(ConvexDomain::Intersection(Intersection { parts, base }))
    }

    fn merge_polytopes(parts: &[ConvexDomain]) -> Option<HPolytope> {
        let polys: Option<Vec<HPolytope>> = parts.iter().map(|p| p.as_polytope()).collect();
        let polys = polys?;
        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        for p in &polys {
            normals.extend(p.normals().iter().cloned());
            offsets.extend(p.offsets().iter().copied());
        }
        HPolytope::new(normals, offsets, None, None).ok()
    }

    /// Flattens polyhedral domains (polytopes, their affine images and intersections of
    /// those) into one explicit [`HPolytope`].
    pub fn as_polytope(&self) -> Option<HPolytope> {
        match self {
            ConvexDomain::Polytope(p) => Some(p.clone()),
            ConvexDomain::Ball(_) => None,
            ConvexDomain::Affine(a) => a.inner.as_polytope()?.affine_image(&a.map).ok(),
            ConvexDomain::Intersection(i) => {
                let polys: Option<Vec<HPolytope>> = i.parts.iter().map(|p| p.as_polytope()).collect();
                let polys = polys?;
                let mut normals = Vec::new();
                let mut offsets = Vec::new();
                for p in &polys {
                    normals.extend(p.normals().iter().cloned());
                    offsets.extend(p.offsets().iter().copied());
                }
                HPolytope::new(normals, offsets, Some(i.base.clone()), None).ok()
            }
        }
    }

    /// Signed margin without input validation.
    pub(crate) fn margin(&self, x: &Point) -> f64 {
        match self {
            ConvexDomain::Polytope(p) => p.margin(x),
            ConvexDomain::Ball(b) => b.radius - (x - &b.center).norm(),
            ConvexDomain::Affine(a) => a.map.min_singular_value() * a.inner.margin(&a.inverse.apply(x)),
            ConvexDomain::Intersection(i) => {
                i.parts.iter().map(|p| p.margin(x)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Signed membership margin: positive exactly on the interior.
    ///
    /// For polytopes this is the smallest constraint slack (constraints are stored with
    /// unit normals, so it is the distance to the nearest facet hyperplane), for balls
    /// `r - |x - c|`, for intersections the minimum over the parts, and for affine images
    /// the pulled-back margin scaled by the smallest singular value of the map.
    pub fn contains(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        Ok(self.margin(x))
    }

    /// Exit parameter of the ray `x + t d`, `t >= 0`; `None` when the ray stays inside.
    pub(crate) fn cast(&self, x: &Point, d: &DVector<f64>) -> Option<f64> {
        match self {
            ConvexDomain::Polytope(p) => p.cast(x, d),
            ConvexDomain::Ball(b) => b.cast(x, d),
            ConvexDomain::Affine(a) => {
                let u = a.inverse.apply(x);
                let e = a.inverse.apply_linear(d);
                a.inner.cast(&u, &e)
            }
            ConvexDomain::Intersection(i) => i
                .parts
                .iter()
                .filter_map(|p| p.cast(x, d))
                .min_by(f64::total_cmp),
        }
    }

    /// Where the ray from `x` through `y` leaves the domain.
    pub fn ray_boundary(&self, x: &Point, y: &Point) -> Result<Hit> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        check_finite(x)?;
        check_finite(y)?;
        let m = self.margin(x);
        if m <= 0.0 {
            return Err(Error::NotInterior { margin: m });
        }
        let d = y - x;
        if d.norm() <= Tolerances::DEFAULT.eps_pt {
            return Err(Error::CoincidentPoints);
        }
        Ok(self.hit_along(x, &d))
    }

    /// Same as [`ray_boundary`](Self::ray_boundary) with the direction given directly.
    pub(crate) fn hit_along(&self, x: &Point, d: &DVector<f64>) -> Hit {
        match self.cast(x, d) {
            Some(t) => Hit::Finite {
                point: x + d * t,
                t,
            },
            None => Hit::AtInfinity {
                direction: d.normalize(),
            },
        }
    }

    fn boundary_tolerance(a: &Point) -> f64 {
        Tolerances::DEFAULT.eps_bd * a.amax().max(1.0)
    }

    fn check_on_boundary(&self, a: &Point) -> Result<()> {
        check_dim(self.dim(), a.len())?;
        check_finite(a)?;
        let m = self.margin(a);
        if m.abs() > Self::boundary_tolerance(a) {
            return Err(Error::NotOnBoundary { margin: m });
        }
        Ok(())
    }

    /// A supporting functional at the boundary point `a`: `h(a) = 1`, `h < 1` on the
    /// domain, and `h` vanishes at [`base_point`](Self::base_point).
    ///
    /// Polytopes use the most active constraint, lowest index on ties.
    pub fn supporting_functional(&self, a: &Point) -> Result<LinearForm> {
        self.check_on_boundary(a)?;
        Ok(self.support_unchecked(a))
    }

    fn support_unchecked(&self, a: &Point) -> LinearForm {
        match self {
            ConvexDomain::Polytope(p) => p.support_at(a),
            ConvexDomain::Ball(b) => {
                let n = a - &b.center;
                let coeffs = &n / (b.radius * n.norm());
                let offset = -coeffs.dot(&b.center);
                LinearForm::new(coeffs, offset)
            }
            ConvexDomain::Affine(img) => {
                let inner = img.inner.support_unchecked(&img.inverse.apply(a));
                // h(z) = h_in(A^{-1}(z - τ))
                let coeffs = img.inverse.matrix().transpose() * &inner.coeffs;
                let offset = inner.offset + inner.coeffs.dot(img.inverse.translation());
                LinearForm::new(coeffs, offset)
            }
            ConvexDomain::Intersection(i) => {
                let tol = Self::boundary_tolerance(a);
                let (_, part) = i
                    .parts
                    .iter()
                    .map(|p| (p.margin(a), p))
                    .filter(|(m, _)| *m <= tol)
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .expect("boundary point of an intersection lies on some part");
                let h = part.support_unchecked(a);
                // renormalize so it vanishes at this intersection's base point
                let hp = h.eval(&i.base);
                let scale = 1.0 / (1.0 - hp);
                LinearForm::new(h.coeffs * scale, (h.offset - hp) * scale)
            }
        }
    }

    /// Outward normal cone at the boundary point `a`.
    pub fn normal_cone(&self, a: &Point, tol: &Tolerances) -> Result<NormalCone> {
        self.check_on_boundary(a)?;
        Ok(self.normal_cone_unchecked(a, tol))
    }

    fn normal_cone_unchecked(&self, a: &Point, tol: &Tolerances) -> NormalCone {
        match self {
            ConvexDomain::Polytope(p) => NormalCone {
                generators: p
                    .active_indices(a, tol.eps_face)
                    .into_iter()
                    .map(|j| p.normals()[j].clone())
                    .collect(),
                strict: false,
            },
            ConvexDomain::Ball(b) => {
                let active = (b.radius - (a - &b.center).norm()).abs() <= tol.eps_face;
                NormalCone {
                    generators: if active { vec![(a - &b.center).normalize()] } else { vec![] },
                    strict: active,
                }
            }
            ConvexDomain::Affine(img) => {
                let inner = img.inner.normal_cone_unchecked(&img.inverse.apply(a), tol);
                let lt = img.inverse.matrix().transpose();
                NormalCone {
                    generators: inner.generators.iter().map(|g| (&lt * g).normalize()).collect(),
                    strict: inner.strict,
                }
            }
            ConvexDomain::Intersection(i) => {
                let mut cone = NormalCone {
                    generators: vec![],
                    strict: false,
                };
                for p in &i.parts {
                    let m = p.margin(a);
                    if m.abs() <= tol.eps_face {
                        let c = p.normal_cone_unchecked(a, tol);
                        cone.generators.extend(c.generators);
                        cone.strict |= c.strict;
                    }
                }
                cone
            }
        }
    }

    /// Image under the homothety `y = center + factor (u - center)`. A negative factor
    /// composes the dilation with the point reflection through `center`.
    pub fn homothety(&self, center: &Point, factor: f64) -> Result<ConvexDomain> {
        check_dim(self.dim(), center.len())?;
        check_finite(center)?;
        if !(factor.is_finite() && factor != 0.0) {
            return Err(Error::InvalidArgument(format!("homothety factor {factor}")));
        }
        Ok(match self {
            ConvexDomain::Polytope(p) => ConvexDomain::Polytope(p.homothety(center, factor)),
            ConvexDomain::Ball(b) => ConvexDomain::Ball(EuclideanBall {
                center: center + (&b.center - center) * factor,
                radius: b.radius * factor.abs(),
            }),
            ConvexDomain::Affine(img) => {
                let inner = img.inner.homothety(&img.inverse.apply(center), factor)?;
                let base = img.map.apply(inner.base_point());
                ConvexDomain::Affine(AffineImage {
                    inner: Box::new(inner),
                    map: img.map.clone(),
                    inverse: img.inverse.clone(),
                    base,
                })
            }
            ConvexDomain::Intersection(i) => {
                let parts = i
                    .parts
                    .iter()
                    .map(|p| p.homothety(center, factor))
                    .collect::<Result<Vec<_>>>()?;
                ConvexDomain::Intersection(Intersection {
                    parts,
                    base: center + (&i.base - center) * factor,
                })
            }
        })
    }

    /// True when `a` is an exposed boundary point: some supporting hyperplane meets the
    /// closure only at `a`.
    pub fn is_exposed(&self, a: &Point, tol: &Tolerances) -> Result<bool> {
        let cone = self.normal_cone(a, tol)?;
        if cone.strict {
            return Ok(true);
        }
        if cone.generators.is_empty() {
            return Ok(false);
        }
        let n = self.dim();
        let mat = DMatrix::from_fn(cone.generators.len(), n, |i, j| cone.generators[i][j]);
        Ok(mat.rank(1e-9) == n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn square() -> ConvexDomain {
        HPolytope::cube(2, 1.0).unwrap().into()
    }

    fn half_plane() -> ConvexDomain {
        HPolytope::new(vec![dvector![0.0, -1.0]], vec![0.0], Some(dvector![0.0, 1.0]), None)
            .unwrap()
            .into()
    }

    #[test]
    fn contains_examples() {
        assert_eq!(square().contains(&dvector![0.0, 0.0]).unwrap(), 1.0);
        let ball = ConvexDomain::unit_ball(2);
        assert_eq!(ball.contains(&dvector![1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(ball.contains(&dvector![2.0, 0.0]).unwrap(), -1.0);
        assert!(matches!(
            ball.contains(&dvector![1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ray_boundary_examples() {
        let hit = square().ray_boundary(&dvector![0.0, 0.0], &dvector![0.5, 0.0]).unwrap();
        assert_eq!(hit, Hit::Finite { point: dvector![1.0, 0.0], t: 2.0 });

        let hit = half_plane().ray_boundary(&dvector![0.0, 1.0], &dvector![1.0, 1.0]).unwrap();
        assert_eq!(hit, Hit::AtInfinity { direction: dvector![1.0, 0.0] });

        let hit = ConvexDomain::unit_ball(2)
            .ray_boundary(&dvector![0.0, 0.0], &dvector![0.0, 0.5])
            .unwrap();
        assert_eq!(hit, Hit::Finite { point: dvector![0.0, 1.0], t: 2.0 });
    }

    #[test]
    fn ray_boundary_errors() {
        let s = square();
        assert!(matches!(
            s.ray_boundary(&dvector![2.0, 0.0], &dvector![0.0, 0.0]),
            Err(Error::NotInterior { .. })
        ));
        assert_eq!(
            s.ray_boundary(&dvector![0.1, 0.0], &dvector![0.1, 0.0]),
            Err(Error::CoincidentPoints)
        );
    }

    #[test]
    fn near_parallel_ray_is_at_infinity() {
        let hit = half_plane()
            .ray_boundary(&dvector![0.0, 1.0], &dvector![1.0, 1.0 - 1e-14])
            .unwrap();
        assert!(!hit.is_finite());
    }

    #[test]
    fn supporting_functional_examples() {
        let s = square();
        let h = s.supporting_functional(&dvector![1.0, 0.0]).unwrap();
        assert_eq!(h, LinearForm::new(dvector![1.0, 0.0], 0.0));
        let h = s.supporting_functional(&dvector![1.0, 1.0]).unwrap();
        assert_eq!(h, LinearForm::new(dvector![1.0, 0.0], 0.0));

        let h = ConvexDomain::unit_ball(2).supporting_functional(&dvector![0.0, 1.0]).unwrap();
        assert_eq!(h, LinearForm::new(dvector![0.0, 1.0], 0.0));

        assert!(matches!(
            s.supporting_functional(&dvector![0.5, 0.0]),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn supporting_functional_of_intersection_vanishes_at_base() {
        let shifted = ConvexDomain::Ball(EuclideanBall::new(dvector![0.5, 0.0], 1.0).unwrap());
        let dom = ConvexDomain::intersection(vec![square(), shifted], None).unwrap();
        let base = dom.base_point().clone();
        let hit = dom.ray_boundary(&base, &(&base + dvector![0.3, 0.7])).unwrap();
        let a = hit.point().unwrap();
        let h = dom.supporting_functional(a).unwrap();
        assert!(h.eval(&base).abs() < 1e-14);
        assert!((h.eval(a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn to_projective_examples() {
        let p = ProjectivePoint::finite(&dvector![1.0, 0.0]);
        let s = 1.0 / 2f64.sqrt();
        assert!((p.homogeneous() - dvector![s, 0.0, s]).norm() < 1e-15);
        let p = ProjectivePoint::at_infinity(&dvector![1.0, 0.0]);
        assert_eq!(p.homogeneous(), &dvector![1.0, 0.0, 0.0]);
        assert!(p.is_at_infinity());
        let p = ProjectivePoint::finite(&dvector![0.0, 0.0]);
        assert_eq!(p.homogeneous(), &dvector![0.0, 0.0, 1.0]);
    }

    #[test]
    fn affine_image_examples() {
        let s = square();
        let id = AffineMap::identity(2);
        let img = s.affine_image(&id).unwrap();
        let x = dvector![0.1, -0.3];
        let y = dvector![0.7, 0.2];
        assert_eq!(img.contains(&x).unwrap(), s.contains(&x).unwrap());
        assert_eq!(img.ray_boundary(&x, &y).unwrap(), s.ray_boundary(&x, &y).unwrap());

        let scale = AffineMap::new(DMatrix::identity(2, 2) * 2.0, Point::zeros(2)).unwrap();
        let big = ConvexDomain::unit_ball(2).affine_image(&scale).unwrap();
        assert!((big.contains(&dvector![1.5, 0.0]).unwrap() - 0.5).abs() < 1e-15);

        let (c, sn) = (std::f64::consts::FRAC_PI_4.cos(), std::f64::consts::FRAC_PI_4.sin());
        let rot = AffineMap::new(DMatrix::from_row_slice(2, 2, &[c, -sn, sn, c]), Point::zeros(2)).unwrap();
        let turned = s.affine_image(&rot).unwrap();
        let axis = rot.apply_linear(&dvector![0.5, 0.0]);
        let hit = turned.ray_boundary(&Point::zeros(2), &axis).unwrap();
        assert!((hit.point().unwrap() - rot.apply(&dvector![1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn singular_map_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(AffineMap::new(m, Point::zeros(2)), Err(Error::SingularMap(_))));
    }

    #[test]
    fn intersection_hit_is_min_of_parts() {
        let a = square();
        let b = ConvexDomain::Ball(EuclideanBall::new(dvector![0.3, 0.0], 0.9).unwrap());
        let both = ConvexDomain::intersection(vec![a.clone(), b.clone()], None).unwrap();
        let x = dvector![0.1, 0.1];
        for y in [dvector![0.4, 0.5], dvector![-0.4, 0.2], dvector![0.1, -0.6]] {
            let t = both.ray_boundary(&x, &y).unwrap().t().unwrap();
            let ta = a.ray_boundary(&x, &y).unwrap().t().unwrap();
            let tb = b.ray_boundary(&x, &y).unwrap().t().unwrap();
            assert!((t - ta.min(tb)).abs() < 1e-12);
        }
    }

    #[test]
    fn homothety_and_reflection_of_square() {
        let s = square();
        let h = s.homothety(&Point::zeros(2), 0.5).unwrap();
        assert!((h.contains(&dvector![0.5, 0.0]).unwrap()).abs() < 1e-15);
        let r = s.homothety(&dvector![0.5, 0.0], -1.0).unwrap();
        // reflection through (0.5, 0) maps (-1, y) to (2, y)
        assert!(r.contains(&dvector![1.9, 0.0]).unwrap() > 0.0);
        assert!(r.contains(&dvector![-0.1, 0.0]).unwrap() < 0.0);
    }

    #[test]
    fn exposedness() {
        let s = square();
        let tol = Tolerances::DEFAULT;
        assert!(!s.is_exposed(&dvector![1.0, 0.3], &tol).unwrap());
        assert!(s.is_exposed(&dvector![1.0, 1.0], &tol).unwrap());
        assert!(ConvexDomain::unit_ball(3).is_exposed(&dvector![0.0, 0.0, 1.0], &tol).unwrap());
    }

    mod properties {
        use super::super::*;
        use crate::sampling::{random_affine_map, random_polytope, sample_interior};
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn domain(rng: &mut ChaCha8Rng) -> ConvexDomain {
            let dim = rng.random_range(2..=4);
            if rng.random_bool(0.3) {
                let c = Point::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
                ConvexDomain::Ball(EuclideanBall::new(c, rng.random_range(0.5..2.0)).unwrap())
            } else {
                random_polytope(rng, dim).into()
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn hit_lies_on_boundary(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let x = sample_interior(&mut r, &dom);
                let y = sample_interior(&mut r, &dom);
                prop_assume!((&x - &y).norm() > 1e-9);
                let hit = dom.ray_boundary(&x, &y).unwrap();
                let m = dom.contains(hit.point().unwrap()).unwrap();
                prop_assert!(m.abs() <= 1e-9, "margin {m:e}");
            }

            #[test]
            fn tighter_offsets_hit_sooner(seed in any::<u64>(), frac in 0.01f64..0.9) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dim = r.random_range(2..=4);
                let poly = random_polytope(&mut r, dim);
                let dom: ConvexDomain = poly.clone().into();
                let x = sample_interior(&mut r, &dom);
                let y = sample_interior(&mut r, &dom);
                prop_assume!((&x - &y).norm() > 1e-9);
                let j = r.random_range(0..poly.num_constraints());
                let mut offsets = poly.offsets().to_vec();
                offsets[j] -= frac * poly.slack(j, &x);
                let tight: ConvexDomain = HPolytope::new(poly.normals().to_vec(), offsets, Some(x.clone()), None).unwrap().into();
                let t0 = dom.ray_boundary(&x, &y).unwrap().t().unwrap();
                let t1 = tight.ray_boundary(&x, &y).unwrap().t().unwrap();
                prop_assert!(t1 <= t0 + 1e-12, "{t1} > {t0}");
            }

            #[test]
            fn hits_follow_affine_maps(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let map = random_affine_map(&mut r, dom.dim());
                let img = dom.affine_image(&map).unwrap();
                let x = sample_interior(&mut r, &dom);
                let y = sample_interior(&mut r, &dom);
                prop_assume!((&x - &y).norm() > 1e-9);
                let a = dom.ray_boundary(&x, &y).unwrap();
                let b = img.ray_boundary(&map.apply(&x), &map.apply(&y)).unwrap();
                let expected = map.apply(a.point().unwrap());
                prop_assert!((b.point().unwrap() - &expected).norm() <= 1e-8 * (1.0 + expected.norm()));
            }

            #[test]
            fn supporting_functional_bounds_the_domain(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dom = domain(&mut r);
                let x = sample_interior(&mut r, &dom);
                let y = sample_interior(&mut r, &dom);
                prop_assume!((&x - &y).norm() > 1e-9);
                let a = dom.ray_boundary(&x, &y).unwrap().point().unwrap().clone();
                let h = dom.supporting_functional(&a).unwrap();
                prop_assert!((h.eval(&a) - 1.0).abs() <= 1e-9);
                for _ in 0..100 {
                    let z = sample_interior(&mut r, &dom);
                    prop_assert!(h.eval(&z) < 1.0 + 1e-9);
                }
            }

            #[test]
            fn intersection_hit_is_first_part_hit(seed in any::<u64>()) {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                let dim = r.random_range(2..=3);
                let p1: ConvexDomain = random_polytope(&mut r, dim).into();
                let c = Point::from_fn(dim, |_, _| r.random_range(-0.2..0.2));
                let p2 = ConvexDomain::Ball(EuclideanBall::new(c, r.random_range(0.4..1.2)).unwrap());
                let both = ConvexDomain::intersection(vec![p1.clone(), p2.clone()], None).unwrap();
                let x = sample_interior(&mut r, &both);
                let y = sample_interior(&mut r, &both);
                prop_assume!((&x - &y).norm() > 1e-9);
                let t = both.ray_boundary(&x, &y).unwrap().t().unwrap();
                let t1 = p1.ray_boundary(&x, &y).unwrap().t().unwrap();
                let t2 = p2.ray_boundary(&x, &y).unwrap().t().unwrap();
                prop_assert!((t - t1.min(t2)).abs() <= 1e-8 * (1.0 + t));
            }
        }
    }
}
