use nalgebra::{DMatrix, DVector};

use super::HPolytope;
use crate::error::{check_dim, check_finite};
use crate::lp::{LinearProgram, LpOutcome};
use crate::{Error, Point, Result};

/// Projective transformation `x ↦ (M x + b) / (⟨c, x⟩ + d)` stored as the
/// `(n+1) × (n+1)` homogeneous matrix `[[M, b], [cᵀ, d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl ProjectiveMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let m = matrix.nrows();
        if m < 2 || matrix.ncols() != m {
            return Err(Error::InvalidArgument("projective matrix must be square, size >= 2".into()));
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sv = matrix.singular_values();
        let smax = sv.max();
        let rel: f64 = sv.iter().map(|s| s / smax).product();
        if !(rel > crate::Tolerances::DEFAULT.eps_det) {
            return Err(Error::SingularMap(rel));
        }
        let inverse = matrix.clone().try_inverse().ok_or(Error::SingularMap(0.0))?;
        Ok(ProjectiveMap { matrix, inverse })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Denominator `⟨c, x⟩ + d` at `x`.
    pub fn denominator(&self, x: &Point) -> f64 {
        let n = self.dim();
        (0..n).map(|j| self.matrix[(n, j)] * x[j]).sum::<f64>() + self.matrix[(n, n)]
    }

    /// Image of a point; errors when the point is sent to infinity.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        let h = &self.matrix * x.clone().insert_row(x.len(), 1.0);
        let w = h[self.dim()];
        if w.abs() <= f64::EPSILON * h.amax() {
            return Err(Error::HitAtInfinity);
        }
        Ok(h.rows(0, self.dim()) / w)
    }

    /// Image of a bounded polytope whose closure stays in the region where the
    /// denominator is positive; that keeps the image inside the affine patch.
    pub fn image_of_polytope(&self, poly: &HPolytope) -> Result<HPolytope> {
        let n = poly.dim();
        check_dim(self.dim(), n)?;
        if !poly.is_bounded()? {
            return Err(Error::InvalidDomain("projective image needs a bounded polytope".into()));
        }
        // min of the denominator over the closure
        let mut lp = LinearProgram::new(n);
        let c: Vec<f64> = (0..n).map(|j| self.matrix[(n, j)]).collect();
        lp.set_objective(&c);
        for row in poly.rows() {
            lp.add_le(&row[..n], row[n]);
        }
        let min_den = match lp.minimize()? {
            LpOutcome::Optimal { value, .. } => value + self.matrix[(n, n)],
            _ => return Err(Error::Lp("denominator program did not solve".into())),
        };
        if min_den <= 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "map sends part of the domain to or past infinity (min denominator {min_den:e})"
            )));
        }
        let mut normals = Vec::with_capacity(poly.num_constraints());
        let mut offsets = Vec::with_capacity(poly.num_constraints());
        for row in poly.rows() {
            // (φ, -s) · P^{-1} Y < 0 with Y = (y, 1)
            let psi = DVector::from_iterator(n + 1, row[..n].iter().copied().chain([-row[n]]));
            let pulled = self.inverse.transpose() * psi;
            normals.push(pulled.rows(0, n).into_owned());
            offsets.push(-pulled[n]);
        }
        let witness = self.apply(poly.witness())?;
        let vertices = match poly.vertices() {
            Some(vs) => Some(vs.iter().map(|v| self.apply(v)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        HPolytope::new(normals, offsets, Some(witness), vertices)
    }
}
