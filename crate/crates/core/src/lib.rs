//! Weak metrics on proper convex domains.
//!
//! This crate computes the Funk metric `F(x, y) = log(|x - a| / |y - a|)`, where `a` is
//! the point at which the ray from `x` through `y` leaves the domain, together with its
//! reverse, its two symmetrizations (Hilbert and max) and the relative Funk metric of a
//! domain inside a larger one. Around the metric sit the geometric pieces that make it
//! useful: forward and backward balls, triangle-equality and geodesic tests, nearest
//! points ("feet"), and the infinitesimal tangent norm.
//!
//! Every distance is ultimately computed from a ray cast against the domain boundary
//! ([`convex::ConvexDomain::ray_boundary`]). The closed forms for polytopes and for the Euclidean unit
//! ball are provided separately so the two routes can check each other.
//!
//! ```
//! use funk_core::convex::{ConvexDomain, HPolytope};
//! use funk_core::metric::funk;
//! use nalgebra::dvector;
//!
//! let square = ConvexDomain::from(HPolytope::cube(2, 1.0).unwrap());
//! let d = funk(&square, &dvector![0.0, 0.0], &dvector![0.5, 0.0]).unwrap();
//! assert!((d.value() - 2f64.ln()).abs() < 1e-12);
//! ```

pub mod balls;
pub mod classical;
pub mod convex;
pub mod error;
pub mod geodesy;
pub mod lp;
pub mod metric;
pub mod projection;
pub mod sampling;
pub mod search;
pub mod tangent;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Points and directions are plain column vectors.
pub type Point = nalgebra::DVector<f64>;
