//! Numerical tolerances shared across the crate.
//!
//! The defaults are tuned for double precision on domains of unit scale. Operations
//! that classify (alignment, face activation, parallelism) have `_with` variants that
//! take an explicit [`Tolerances`]; everything else uses [`Tolerances::DEFAULT`].

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Boundary membership.
    pub eps_bd: f64,
    /// Ray-direction denominator classification (parallel vs. crossing).
    pub eps_dir: f64,
    /// Face activation of a constraint.
    pub eps_face: f64,
    /// Geometric point comparisons.
    pub eps_geom: f64,
    /// Relative determinant below which an affine map counts as singular.
    pub eps_det: f64,
    /// Euclidean distance below which two points coincide.
    pub eps_pt: f64,
    /// Relative singular value below which homogeneous hits count as aligned.
    pub eps_rank: f64,
    /// Additivity defect below which a polyline counts as a geodesic.
    pub eps_geo: f64,
    /// Normalized-coefficient distance for parallel hyperplanes.
    pub eps_para: f64,
    /// Relative off-line distance for collinearity.
    pub eps_line: f64,
    /// Relative area below which a triangle is degenerate.
    pub eps_area: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        eps_bd: 1e-9,
        eps_dir: 1e-12,
        eps_face: 1e-7,
        eps_geom: 1e-8,
        eps_det: 1e-12,
        eps_pt: 1e-13,
        eps_rank: 1e-7,
        eps_geo: 1e-9,
        eps_para: 1e-9,
        eps_line: 1e-9,
        eps_area: 1e-12,
    };

    pub const KEYS: [&'static str; 11] = [
        "eps_bd", "eps_dir", "eps_face", "eps_geom", "eps_det", "eps_pt", "eps_rank", "eps_geo",
        "eps_para", "eps_line", "eps_area",
    ];

    /// Overrides one tolerance by name. Values below machine epsilon are rejected.
    pub fn set(&mut self, key: &str, value: f64) -> crate::Result<()> {
        if !(value.is_finite() && value >= f64::EPSILON) {
            return Err(crate::Error::InvalidArgument(format!(
                "tolerance {key}={value:e} must be finite and at least machine epsilon"
            )));
        }
        let slot = match key {
            "eps_bd" => &mut self.eps_bd,
            "eps_dir" => &mut self.eps_dir,
            "eps_face" => &mut self.eps_face,
            "eps_geom" => &mut self.eps_geom,
            "eps_det" => &mut self.eps_det,
            "eps_pt" => &mut self.eps_pt,
            "eps_rank" => &mut self.eps_rank,
            "eps_geo" => &mut self.eps_geo,
            "eps_para" => &mut self.eps_para,
            "eps_line" => &mut self.eps_line,
            "eps_area" => &mut self.eps_area,
            _ => {
                return Err(crate::Error::InvalidArgument(format!(
                    "unknown tolerance key {key:?}"
                )))
            }
        };
        *slot = value;
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Distances below this are reported as exactly zero.
pub const ZERO_CLAMP: f64 = 1e-14;
