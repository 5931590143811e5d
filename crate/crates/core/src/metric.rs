//! The Funk metric and its relatives.
//!
//! All distances go through [`funk`], which reads the exit parameter `t` of the ray from
//! `x` through `y` and returns `log(t / (t - 1))`. When the ray never leaves the domain
//! the distance is 0, which is what makes these weak metrics: distinct points can be at
//! distance zero, and `F(x, y) != F(y, x)` in general.

use std::fmt;

use serde::Serialize;

use crate::convex::{ConvexDomain, Hit, HPolytope};
use crate::error::{check_dim, check_finite};
use crate::lp::{LinearProgram, LpOutcome};
use crate::sampling::sample_interior;
use crate::tolerances::ZERO_CLAMP;
use crate::{Error, Point, Result, Tolerances};

/// Nonnegative, possibly asymmetric, possibly non-separating distance value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct WeakDistance(f64);

impl WeakDistance {
    pub const ZERO: WeakDistance = WeakDistance(0.0);

    /// Rejects negative or non-finite values; values below `1e-14` become exactly 0.
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!("distance must be finite and >= 0, got {v}")));
        }
        Ok(Self::clamped(v))
    }

    pub(crate) fn clamped(v: f64) -> Self {
        if v < ZERO_CLAMP {
            WeakDistance(0.0)
        } else {
            WeakDistance(v)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<WeakDistance> for f64 {
    fn from(d: WeakDistance) -> f64 {
        d.0
    }
}

impl fmt::Display for WeakDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_interior(domain: &ConvexDomain, x: &Point) -> Result<()> {
    check_dim(domain.dim(), x.len())?;
    check_finite(x)?;
    let m = domain.margin(x);
    if m <= 0.0 {
        return Err(Error::NotInterior { margin: m });
    }
    Ok(())
}

/// Funk distance together with the boundary hit it was read from. `None` when the
/// points coincide and no ray was cast.
///
/// The ray is cast from `y`, so `F = log(1 + 1/s)` with `s = |y - a| / |y - x|` read off
/// directly; going through the parameter from `x` loses digits when `y` is near `a`.
pub fn funk_with_hit(domain: &ConvexDomain, x: &Point, y: &Point) -> Result<(WeakDistance, Option<Hit>)> {
    check_interior(domain, x)?;
    check_interior(domain, y)?;
    let d = y - x;
    if d.norm() <= Tolerances::DEFAULT.eps_pt {
        return Ok((WeakDistance::ZERO, None));
    }
    let hit = match domain.hit_along(y, &d) {
        Hit::Finite { point, t: s } => {
            if !(s > 0.0) {
                return Err(Error::NotInterior { margin: 0.0 });
            }
            let value = WeakDistance::clamped((1.0 / s).ln_1p());
            return Ok((value, Some(Hit::Finite { point, t: 1.0 + s })));
        }
        h => h,
    };
    Ok((WeakDistance::ZERO, Some(hit)))
}

/// `F(x, y) = log(|x - a| / |y - a|)` with `a` the exit point of the ray `x → y`.
pub fn funk(domain: &ConvexDomain, x: &Point, y: &Point) -> Result<WeakDistance> {
    funk_with_hit(domain, x, y).map(|(d, _)| d)
}

/// `F(y, x)`.
pub fn reverse_funk(domain: &ConvexDomain, x: &Point, y: &Point) -> Result<WeakDistance> {
    funk(domain, y, x)
}

/// `(F(x, y) + F(y, x)) / 2`.
pub fn hilbert(domain: &ConvexDomain, x: &Point, y: &Point) -> Result<WeakDistance> {
    let a = funk(domain, x, y)?.value();
    let b = funk(domain, y, x)?.value();
    Ok(WeakDistance::clamped(0.5 * (a + b)))
}

/// `max(F(x, y), F(y, x))`.
pub fn max_symmetrized(domain: &ConvexDomain, x: &Point, y: &Point) -> Result<WeakDistance> {
    let a = funk(domain, x, y)?;
    let b = funk(domain, y, x)?;
    Ok(if a.0 >= b.0 { a } else { b })
}

/// The englobing set of a relative Funk metric.
#[derive(Debug, Clone, Copy)]
pub enum Ambient<'a> {
    /// The whole affine patch; its boundary is at infinity in every direction.
    AffinePatch,
    Domain(&'a ConvexDomain),
}

/// Relative Funk metric of `Ω` inside `U`, with the containment checked once.
#[derive(Debug, Clone)]
pub struct RelativeFunk<'a> {
    omega: &'a ConvexDomain,
    ambient: Ambient<'a>,
}

/// Number of boundary probes when containment cannot be decided by linear programming.
const CONTAINMENT_SAMPLES: usize = 1000;

/// Checks `closure(Ω) ⊆ closure(U)`. Polyhedral pairs with bounded `Ω` are decided
/// exactly (maximize each constraint of `U` over `Ω`); other pairs by probing boundary
/// points of `Ω` along a fixed set of rays plus interior samples.
pub fn check_containment(omega: &ConvexDomain, u: &ConvexDomain) -> Result<()> {
    check_dim(omega.dim(), u.dim())?;
    let tol = Tolerances::DEFAULT.eps_bd;
    if let (Some(po), Some(pu)) = (omega.as_polytope(), u.as_polytope()) {
        if po.is_bounded()? {
            return polytope_containment(&po, &pu);
        }
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let base = omega.base_point().clone();
    for _ in 0..CONTAINMENT_SAMPLES {
        let d = crate::sampling::random_direction(&mut rng, omega.dim());
        let probe = match omega.cast(&base, &d) {
            Some(t) => &base + &d * t,
            None => sample_interior(&mut rng, omega),
        };
        let m = u.margin(&probe);
        if m < -tol * (1.0 + probe.amax()) {
            return Err(Error::Containment(format!(
                "point of the inner domain lies outside the ambient one (margin {m:e})"
            )));
        }
    }
    Ok(())
}

pub(crate) fn polytope_containment(inner: &HPolytope, outer: &HPolytope) -> Result<()> {
    let n = inner.dim();
    for (j, (c, s)) in outer.normals().iter().zip(outer.offsets()).enumerate() {
        let mut lp = LinearProgram::new(n);
        lp.set_objective(c.as_slice());
        for row in inner.rows() {
            lp.add_le(&row[..n], row[n]);
        }
        match lp.maximize()? {
            LpOutcome::Optimal { value, .. } if value <= s + Tolerances::DEFAULT.eps_bd * (1.0 + s.abs()) => {}
            LpOutcome::Optimal { value, .. } => {
                return Err(Error::Containment(format!(
                    "constraint {j} of the ambient domain is exceeded by {:e}",
                    value - s
                )))
            }
            _ => return Err(Error::Containment(format!("constraint {j} is unbounded on the inner domain"))),
        }
    }
    Ok(())
}

impl<'a> RelativeFunk<'a> {
    pub fn new(omega: &'a ConvexDomain, ambient: Ambient<'a>) -> Result<Self> {
        if let Ambient::Domain(u) = ambient {
            check_containment(omega, u)?;
        }
        Ok(RelativeFunk { omega, ambient })
    }

    /// `log(|y - ω| / |x - ω| · |x - a| / |y - a|)` with `a` the exit point of `x → y`
    /// from `Ω` and `ω` the exit point of `y → x` from `U`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<WeakDistance> {
        let forward = funk(self.omega, x, y)?.value();
        let back = match self.ambient {
            Ambient::AffinePatch => 0.0,
            Ambient::Domain(u) => funk(u, y, x)?.value(),
        };
        Ok(WeakDistance::clamped(forward + back))
    }
}

/// One-shot relative Funk distance; validates containment on every call.
pub fn relative_funk(omega: &ConvexDomain, ambient: Ambient<'_>, x: &Point, y: &Point) -> Result<WeakDistance> {
    RelativeFunk::new(omega, ambient)?.distance(x, y)
}

/// `max(0, max_j log(slack_j(x) / slack_j(y)))`.
pub fn funk_polytope_closed_form(poly: &HPolytope, x: &Point, y: &Point) -> Result<WeakDistance> {
    for p in [x, y] {
        check_dim(poly.dim(), p.len())?;
        check_finite(p)?;
        let m = poly.margin(p);
        if m <= 0.0 {
            return Err(Error::NotInterior { margin: m });
        }
    }
    let best = (0..poly.num_constraints())
        .map(|j| (poly.slack(j, x) / poly.slack(j, y)).ln())
        .fold(0.0f64, f64::max);
    Ok(WeakDistance::clamped(best))
}

/// Closed form on the open Euclidean unit ball.
///
/// With `d = y - x` and `r = |d|² - |x ∧ y|²`, the value is
/// `log((√r + |x|² - ⟨x,y⟩) / (√r - |y|² + ⟨x,y⟩))`. Numerator and denominator are
/// evaluated through the companion root of the defining quadratic when the direct
/// expression would cancel.
pub fn funk_unit_ball_closed_form(x: &Point, y: &Point) -> Result<WeakDistance> {
    check_dim(x.len(), y.len())?;
    check_finite(x)?;
    check_finite(y)?;
    let (xx, yy, xy) = (x.norm_squared(), y.norm_squared(), x.dot(y));
    for n2 in [xx, yy] {
        if n2 >= 1.0 {
            return Err(Error::NotInterior { margin: 1.0 - n2.sqrt() });
        }
    }
    let d = y - x;
    let dd = d.norm_squared();
    if dd.sqrt() <= Tolerances::DEFAULT.eps_pt {
        return Ok(WeakDistance::ZERO);
    }
    let wedge = xx * yy - xy * xy;
    let mut r = dd - wedge;
    if r < 0.0 {
        if r < -1e-12 * (1.0 + dd) {
            return Err(Error::InvalidArgument(format!("negative radicand {r:e}")));
        }
        r = 0.0;
    }
    let sq = r.sqrt();
    let xd = xy - xx;
    let yd = yy - xy;
    let num = if xd > 0.0 { dd * (1.0 - xx) / (xd + sq) } else { sq - xd };
    let den = if yd > 0.0 { dd * (1.0 - yy) / (yd + sq) } else { sq - yd };
    Ok(WeakDistance::clamped((num / den).ln()))
}

/// An open interval `(b, a)` with `b < a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment1D {
    b: f64,
    a: f64,
}

impl Segment1D {
    pub fn new(b: f64, a: f64) -> Result<Self> {
        if !(b.is_finite() && a.is_finite() && b < a) {
            return Err(Error::InvalidDomain(format!("need b < a, got ({b}, {a})")));
        }
        Ok(Segment1D { b, a })
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.b, self.a)
    }
}

/// Funk distance on an interval: the ray `x → y` exits at `a` when `y > x` and at `b`
/// otherwise.
pub fn funk_1d(seg: &Segment1D, x: f64, y: f64) -> Result<WeakDistance> {
    for p in [x, y] {
        if !(seg.b < p && p < seg.a) {
            return Err(Error::NotInterior {
                margin: (p - seg.b).min(seg.a - p),
            });
        }
    }
    let v = if y > x {
        ((seg.a - x) / (seg.a - y)).ln()
    } else if y < x {
        ((x - seg.b) / (y - seg.b)).ln()
    } else {
        0.0
    };
    Ok(WeakDistance::clamped(v))
}

/// Position of `z` on the ray `x → y` as a multiple of `y - x`, recovered from the two
/// distances `F(x, y)` and `F(x, z)`.
pub fn ratio_from_distances(fxy: WeakDistance, fxz: WeakDistance) -> Result<f64> {
    let (a, b) = (fxy.0, fxz.0);
    if a <= 0.0 {
        return Err(Error::InvalidArgument("F(x, y) must be positive".into()));
    }
    // e^a (e^b - 1) / (e^b (e^a - 1))
    Ok(b.exp_m1() / a.exp_m1() * (a - b).exp())
}

/// Inverse of [`ratio_from_distances`]: `F(x, z)` for `z = x + t (y - x)`.
pub fn distance_from_ratio(fxy: WeakDistance, t: f64) -> Result<WeakDistance> {
    let a = fxy.0;
    if a <= 0.0 {
        return Err(Error::InvalidArgument("F(x, y) must be positive".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let arg = a.exp() - t * a.exp_m1();
    if arg <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "ratio {t} places the point on or beyond the boundary"
        )));
    }
    let v = a - arg.ln();
    if v < -1e-12 {
        return Err(Error::InvalidArgument(format!("ratio {t} is negative")));
    }
    Ok(WeakDistance::clamped(v.max(0.0)))
}

/// Componentwise logarithm, an isometry from the positive orthant with its Funk metric
/// onto `R^n` with [`orthant_log_distance`].
pub fn orthant_log_map(x: &Point) -> Result<Point> {
    check_finite(x)?;
    if let Some(m) = x.iter().copied().find(|&v| v <= 0.0) {
        return Err(Error::NotInterior { margin: m });
    }
    Ok(x.map(f64::ln))
}

/// `max_i max(0, u_i - v_i)`.
pub fn orthant_log_distance(u: &Point, v: &Point) -> Result<WeakDistance> {
    check_dim(u.len(), v.len())?;
    let m = u.iter().zip(v.iter()).map(|(a, b)| a - b).fold(0.0f64, f64::max);
    Ok(WeakDistance::clamped(m))
}
