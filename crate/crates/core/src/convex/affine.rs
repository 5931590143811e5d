use nalgebra::{DMatrix, DVector};

use crate::error::check_finite;
use crate::{Error, Point, Result, Tolerances};

/// `x ↦ A x + τ` with `A` invertible.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    translation: DVector<f64>,
    sigma_min: f64,
}

impl AffineMap {
    /// Rejects maps whose determinant, relative to `σ_max^n`, is at most `eps_det`.
    pub fn new(matrix: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::InvalidArgument("affine matrix must be square and nonempty".into()));
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: translation.len(),
            });
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        check_finite(&translation)?;
        let sv = matrix.singular_values();
        let smax = sv.max();
        let rel = if smax > 0.0 {
            sv.iter().map(|s| s / smax).product::<f64>()
        } else {
            0.0
        };
        if rel <= Tolerances::DEFAULT.eps_det {
            return Err(Error::SingularMap(rel));
        }
        Ok(AffineMap {
            matrix,
            translation,
            sigma_min: sv.min(),
        })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            matrix: DMatrix::identity(n, n),
            translation: DVector::zeros(n),
            sigma_min: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn min_singular_value(&self) -> f64 {
        self.sigma_min
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.matrix * x + &self.translation
    }

    pub fn apply_linear(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMap(0.0))?;
        let translation = -(&inv * &self.translation);
        let sigma_min = 1.0 / self.matrix.singular_values().max();
        Ok(AffineMap {
            matrix: inv,
            translation,
            sigma_min,
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        AffineMap::new(&self.matrix * &other.matrix, self.apply(&other.translation))
    }
}
