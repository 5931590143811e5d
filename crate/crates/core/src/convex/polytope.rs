use nalgebra::{DMatrix, DVector};

use super::{AffineMap, LinearForm};
use crate::error::{check_dim, check_finite};
use crate::lp::{LinearProgram, LpOutcome};
use crate::{Error, Point, Result, Tolerances};

/// Upper bound on the inscribed radius used when searching for a default witness, so
/// the program stays bounded on unbounded polyhedra.
const CHEBYSHEV_CAP: f64 = 1e3;

/// Open polyhedron `{ x : ⟨φ_j, x⟩ < s_j for all j }`.
///
/// Normals are rescaled to unit length on construction, so slacks are Euclidean
/// distances to the facet hyperplanes.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
    witness: Point,
    vertices: Option<Vec<Point>>,
}

impl HPolytope {
    /// Builds the polytope and checks it has interior. Without a witness the center of
    /// the largest inscribed ball (capped in radius) is used.
    pub fn new(
        normals: Vec<DVector<f64>>,
        offsets: Vec<f64>,
        witness: Option<Point>,
        vertices: Option<Vec<Point>>,
    ) -> Result<Self> {
        if normals.is_empty() {
            return Err(Error::InvalidDomain("polytope needs at least one constraint".into()));
        }
        if normals.len() != offsets.len() {
            return Err(Error::InvalidDomain("normals and offsets differ in length".into()));
        }
        let dim = normals[0].len();
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        let mut unit = Vec::with_capacity(normals.len());
        let mut offs = Vec::with_capacity(normals.len());
        for (j, (c, s)) in normals.into_iter().zip(offsets).enumerate() {
            check_dim(dim, c.len())?;
            if !c.iter().all(|v| v.is_finite()) || !s.is_finite() {
                return Err(Error::InvalidDomain(format!("constraint {j} is not finite")));
            }
            let norm = c.norm();
            if norm <= Tolerances::DEFAULT.eps_dir {
                return Err(Error::InvalidDomain(format!("constraint {j} has a zero normal")));
            }
            unit.push(c / norm);
            offs.push(s / norm);
        }
        let mut poly = HPolytope {
            normals: unit,
            offsets: offs,
            witness: Point::zeros(dim),
            vertices: None,
        };
        poly.witness = match witness {
            Some(w) => {
                check_dim(dim, w.len())?;
                check_finite(&w)?;
                let m = poly.margin(&w);
                if m <= Tolerances::DEFAULT.eps_bd {
                    return Err(Error::InvalidDomain(format!(
                        "witness is not interior (margin {m:e})"
                    )));
                }
                w
            }
            None => poly.chebyshev_center()?,
        };
        if let Some(vs) = vertices {
            poly.check_vertices(&vs)?;
            poly.vertices = Some(vs);
        }
        Ok(poly)
    }

    /// Builds from rows `[c_1, ..., c_n, s]` meaning `⟨c, x⟩ < s`.
    pub fn from_rows(rows: &[Vec<f64>], witness: Option<Point>, vertices: Option<Vec<Point>>) -> Result<Self> {
        let mut normals = Vec::with_capacity(rows.len());
        let mut offsets = Vec::with_capacity(rows.len());
        for (j, r) in rows.iter().enumerate() {
            if r.len() < 2 {
                return Err(Error::InvalidDomain(format!("constraint row {j} is too short")));
            }
            let n = r.len() - 1;
            normals.push(DVector::from_column_slice(&r[..n]));
            offsets.push(r[n]);
        }
        Self::new(normals, offsets, witness, vertices)
    }

    /// The cube `(-h, h)^dim`, constraints ordered `+e_1, -e_1, +e_2, -e_2, ...`.
    pub fn cube(dim: usize, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidDomain(format!("half-width must be positive, got {h}")));
        }
        let mut normals = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut c = DVector::zeros(dim);
                c[i] = sign;
                normals.push(c);
            }
        }
        let offsets = vec![h; 2 * dim];
        let vertices = (0..1usize << dim)
            .map(|mask| Point::from_fn(dim, |i, _| if mask >> i & 1 == 1 { h } else { -h }))
            .collect();
        Self::new(normals, offsets, Some(Point::zeros(dim)), Some(vertices))
    }

    /// Convex polygon from vertices in counter-clockwise order.
    pub fn from_polygon(vertices: &[Point]) -> Result<Self> {
        if vertices.len() < 3 || vertices.iter().any(|v| v.len() != 2) {
            return Err(Error::InvalidDomain("polygon needs at least three planar vertices".into()));
        }
        let k = vertices.len();
        let mut normals = Vec::with_capacity(k);
        let mut offsets = Vec::with_capacity(k);
        for i in 0..k {
            let (p, q) = (&vertices[i], &vertices[(i + 1) % k]);
            let e = q - p;
            let n = DVector::from_column_slice(&[e[1], -e[0]]);
            offsets.push(n.dot(p));
            normals.push(n);
        }
        let centroid = vertices.iter().fold(Point::zeros(2), |a, v| a + v) / k as f64;
        Self::new(normals, offsets, Some(centroid), Some(vertices.to_vec()))
    }

    /// Regular `k`-gon centered at `center` with the given circumradius, first vertex on
    /// the positive first axis.
    pub fn regular_polygon(k: usize, center: &Point, circumradius: f64) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidDomain("a polygon needs at least three sides".into()));
        }
        let vs: Vec<Point> = (0..k)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                center + DVector::from_column_slice(&[th.cos(), th.sin()]) * circumradius
            })
            .collect();
        Self::from_polygon(&vs)
    }

    /// The positive orthant `{ x_i > 0 }`.
    pub fn orthant(dim: usize) -> Result<Self> {
        let normals = (0..dim)
            .map(|i| {
                let mut c = DVector::zeros(dim);
                c[i] = -1.0;
                c
            })
            .collect();
        Self::new(normals, vec![0.0; dim], Some(Point::from_element(dim, 1.0)), None)
    }

    /// The open half-space `⟨normal, x⟩ < offset`.
    pub fn half_space(normal: DVector<f64>, offset: f64, witness: Option<Point>) -> Result<Self> {
        Self::new(vec![normal], vec![offset], witness, None)
    }

    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[DVector<f64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn witness(&self) -> &Point {
        &self.witness
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        self.vertices.as_deref()
    }

    /// Constraint `j` as the pair `(φ_j, s_j)`.
    pub fn constraint(&self, j: usize) -> (LinearForm, f64) {
        (LinearForm::new(self.normals[j].clone(), 0.0), self.offsets[j])
    }

    pub fn slack(&self, j: usize, x: &Point) -> f64 {
        self.offsets[j] - self.normals[j].dot(x)
    }

    pub(crate) fn margin(&self, x: &Point) -> f64 {
        (0..self.normals.len())
            .map(|j| self.slack(j, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn cast(&self, x: &Point, d: &DVector<f64>) -> Option<f64> {
        let thresh = Tolerances::DEFAULT.eps_dir * d.norm();
        let mut best: Option<f64> = None;
        for (j, c) in self.normals.iter().enumerate() {
            let rate = c.dot(d);
            if rate > thresh {
                let t = self.slack(j, x) / rate;
                best = Some(best.map_or(t, |b| b.min(t)));
            }
        }
        best
    }

    pub(crate) fn active_indices(&self, a: &Point, eps_face: f64) -> Vec<usize> {
        (0..self.normals.len())
            .filter(|&j| self.slack(j, a).abs() <= eps_face)
            .collect()
    }

    /// Indices of constraints active at `a`, i.e. `|φ_j(a) - s_j| <= eps_face`.
    pub fn active_face(&self, a: &Point, eps_face: f64) -> Result<Vec<usize>> {
        check_dim(self.dim(), a.len())?;
        check_finite(a)?;
        let face = self.active_indices(a, eps_face);
        if face.is_empty() {
            return Err(Error::NotOnBoundary { margin: self.margin(a) });
        }
        Ok(face)
    }

    /// Supporting functional recentered at the witness, from the most active constraint.
    pub(crate) fn support_at(&self, a: &Point) -> LinearForm {
        let w = &self.witness;
        let activation = |j: usize| self.normals[j].dot(&(a - w)) / self.slack(j, w);
        let best = (0..self.normals.len()).map(activation).fold(f64::NEG_INFINITY, f64::max);
        let j = (0..self.normals.len())
            .find(|&j| activation(j) >= best - Tolerances::DEFAULT.eps_face)
            .unwrap();
        let s = self.slack(j, w);
        LinearForm::new(&self.normals[j] / s, -self.normals[j].dot(w) / s)
    }

    fn chebyshev_center(&self) -> Result<Point> {
        let n = self.dim();
        let mut lp = LinearProgram::new(n + 1);
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        lp.set_objective(&obj);
        for (c, s) in self.normals.iter().zip(&self.offsets) {
            let mut row: Vec<f64> = c.iter().copied().collect();
            row.push(1.0);
            lp.add_le(&row, *s);
        }
        let mut cap = vec![0.0; n + 1];
        cap[n] = 1.0;
        lp.add_le(&cap, CHEBYSHEV_CAP);
        match lp.maximize()? {
            LpOutcome::Optimal { x, value } if value > Tolerances::DEFAULT.eps_bd => {
                Ok(Point::from_column_slice(&x[..n]))
            }
            _ => Err(Error::InvalidDomain("polytope has empty interior".into())),
        }
    }

    fn check_vertices(&self, vs: &[Point]) -> Result<()> {
        let eps = Tolerances::DEFAULT.eps_face;
        for (i, v) in vs.iter().enumerate() {
            check_dim(self.dim(), v.len())?;
            check_finite(v)?;
            let slacks: Vec<f64> = (0..self.normals.len()).map(|j| self.slack(j, v)).collect();
            let scale = 1.0 + v.amax();
            if slacks.iter().any(|&s| s < -eps * scale) {
                return Err(Error::InvalidDomain(format!("vertex {i} violates a constraint")));
            }
            if !slacks.iter().any(|&s| s.abs() <= eps * scale) {
                return Err(Error::InvalidDomain(format!("vertex {i} is not on the boundary")));
            }
        }
        for j in 0..self.normals.len() {
            let touches = vs
                .iter()
                .any(|v| self.slack(j, v).abs() <= eps * (1.0 + v.amax()));
            if !touches {
                return Err(Error::InvalidDomain(format!(
                    "constraint {j} is not supported by any listed vertex"
                )));
            }
        }
        Ok(())
    }

    /// True when the closure is compact: the recession cone `{ d : φ_j(d) <= 0 }` is `{0}`.
    pub fn is_bounded(&self) -> Result<bool> {
        let n = self.dim();
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut lp = LinearProgram::new(n);
                let mut obj = vec![0.0; n];
                obj[i] = sign;
                lp.set_objective(&obj);
                for c in &self.normals {
                    lp.add_le(c.as_slice(), 0.0);
                }
                for k in 0..n {
                    let mut e = vec![0.0; n];
                    e[k] = 1.0;
                    lp.add_le(&e, 1.0);
                    e[k] = -1.0;
                    lp.add_le(&e, 1.0);
                }
                match lp.maximize()? {
                    LpOutcome::Optimal { value, .. } if value <= 1e-9 => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }

    /// Enumerates vertices by solving every `n`-subset of constraint hyperplanes. Meant
    /// for the small bounded instances used in tests and reports.
    pub fn enumerate_vertices(&self) -> Result<Vec<Point>> {
        if !self.is_bounded()? {
            return Err(Error::InvalidDomain("unbounded polytope has no vertex description".into()));
        }
        let n = self.dim();
        let m = self.normals.len();
        let mut out: Vec<Point> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a = DMatrix::from_fn(n, n, |r, c| self.normals[idx[r]][c]);
            let b = DVector::from_fn(n, |r, _| self.offsets[idx[r]]);
            if let Some(v) = a.lu().solve(&b) {
                let scale = 1.0 + v.amax();
                if v.iter().all(|c| c.is_finite())
                    && self.margin(&v) >= -1e-9 * scale
                    && !out.iter().any(|u| (u - &v).amax() <= 1e-9 * scale)
                {
                    out.push(v);
                }
            }
            // next combination in lexicographic order
            let mut k = n;
            while k > 0 && idx[k - 1] == m - n + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for i in k..n {
                idx[i] = idx[i - 1] + 1;
            }
        }
        Ok(out)
    }

    /// Same polytope with an explicit vertex list computed by enumeration.
    pub fn with_enumerated_vertices(mut self) -> Result<Self> {
        let vs = self.enumerate_vertices()?;
        self.vertices = Some(vs);
        Ok(self)
    }

    /// Vertices of a planar polytope in counter-clockwise order.
    pub fn polygon_vertices(&self) -> Result<Vec<Point>> {
        if self.dim() != 2 {
            return Err(Error::InvalidArgument("polygon vertices need dimension 2".into()));
        }
        let mut vs = match &self.vertices {
            Some(v) => v.clone(),
            None => self.enumerate_vertices()?,
        };
        let c = vs.iter().fold(Point::zeros(2), |a, v| a + v) / vs.len() as f64;
        vs.sort_by(|p, q| {
            let ap = (p[1] - c[1]).atan2(p[0] - c[0]);
            let aq = (q[1] - c[1]).atan2(q[0] - c[0]);
            ap.total_cmp(&aq)
        });
        Ok(vs)
    }

    /// Image under `y = center + factor (u - center)`; `factor` may be negative.
    pub fn homothety(&self, center: &Point, factor: f64) -> HPolytope {
        let map_point = |u: &Point| center + (u - center) * factor;
        let mut normals = Vec::with_capacity(self.normals.len());
        let mut offsets = Vec::with_capacity(self.normals.len());
        for (c, s) in self.normals.iter().zip(&self.offsets) {
            let pc = c.dot(center);
            let bound = pc + factor * (s - pc);
            if factor > 0.0 {
                normals.push(c.clone());
                offsets.push(bound);
            } else {
                normals.push(-c);
                offsets.push(-bound);
            }
        }
        HPolytope {
            normals,
            offsets,
            witness: map_point(&self.witness),
            vertices: self.vertices.as_ref().map(|vs| vs.iter().map(map_point).collect()),
        }
    }

    /// Explicit image under an invertible affine map.
    pub fn affine_image(&self, map: &AffineMap) -> Result<HPolytope> {
        check_dim(self.dim(), map.dim())?;
        let inv = map.inverse()?;
        let lt = inv.matrix().transpose();
        let mut normals = Vec::with_capacity(self.normals.len());
        let mut offsets = Vec::with_capacity(self.normals.len());
        for (c, s) in self.normals.iter().zip(&self.offsets) {
            // ⟨c, A^{-1}(y - τ)⟩ < s
            let g = &lt * c;
            let norm = g.norm();
            offsets.push((s + g.dot(map.translation())) / norm);
            normals.push(g / norm);
        }
        Ok(HPolytope {
            normals,
            offsets,
            witness: map.apply(&self.witness),
            vertices: self.vertices.as_ref().map(|vs| vs.iter().map(|v| map.apply(v)).collect()),
        })
    }

    /// Rows `[c_1, ..., c_n, s]` of the stored (unit-normal) constraints.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(c, s)| c.iter().copied().chain(std::iter::once(*s)).collect())
            .collect()
    }
}
