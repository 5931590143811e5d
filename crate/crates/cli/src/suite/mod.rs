//! Named batteries of seeded checks and their JSON report.

mod checks;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use funk_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::round_sig;
use crate::{CliError, Ctx};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// What one check measured against its limit.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub samples: usize,
    pub measured: f64,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Outcome {
    pub fn at_most(samples: usize, measured: f64, limit: f64) -> Self {
        Outcome {
            samples,
            measured,
            relation: Relation::AtMost,
            limit,
            passed: measured <= limit,
            detail: String::new(),
        }
    }

    pub fn at_least(samples: usize, measured: f64, limit: f64) -> Self {
        Outcome {
            relation: Relation::AtLeast,
            passed: measured >= limit,
            ..Outcome::at_most(samples, measured, limit)
        }
    }

    /// Passes when no sample was bad.
    pub fn none_bad(samples: usize, bad: usize) -> Self {
        Outcome::at_most(samples, bad as f64, 0.0)
    }

    pub fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Both must pass; the first one's numbers are kept.
    pub fn and(mut self, other: Outcome) -> Self {
        if !other.passed {
            let note = format!(
                "sub-check measured {} against {}",
                round_sig(other.measured),
                round_sig(other.limit)
            );
            self.detail = if self.detail.is_empty() { note } else { format!("{}; {note}", self.detail) };
        }
        self.passed &= other.passed;
        self
    }
}

type CheckFn = fn(&mut ChaCha8Rng, usize, &Tolerances) -> Outcome;

pub struct Check {
    pub name: &'static str,
    pub samples: usize,
    pub run: CheckFn,
}

const fn check(name: &'static str, samples: usize, run: CheckFn) -> Check {
    Check { name, samples, run }
}

pub const SUITES: [&str; 11] = [
    "convex-core",
    "metric-engine",
    "oracle-closedform",
    "ball-geometry",
    "geodesy",
    "triangle",
    "projection",
    "finsler-tangent",
    "classical-oracles",
    "appendix",
    "all",
];

fn suite(name: &str) -> Option<Vec<Check>> {
    use checks::*;
    Some(match name {
        "convex-core" => vec![
            check("ray-cast-consistency", 2000, ray_cast_consistency),
            check("hit-monotone-in-offsets", 2000, hit_monotone_in_offsets),
            check("affine-equivariance", 2000, affine_equivariance),
            check("supporting-functional-validity", 10_000, supporting_functional_validity),
            check("intersection-hit-is-min", 2000, intersection_hit_is_min),
        ],
        "metric-engine" => vec![
            check("closed-form-polytope", 10_000, closed_form_polytope),
            check("closed-form-ball", 10_000, closed_form_ball),
            check("nonnegativity-and-triangle", 100_000, triangle_inequality),
            check("projectivity", 10_000, projectivity),
            check("separation", 10_000, separation),
            check("monotonicity", 5000, monotonicity),
            check("intersection-law", 5000, intersection_law),
            check("slice-restriction", 2000, slice_restriction),
            check("affine-invariance", 1000, affine_invariance),
            check("hilbert-projective-invariance", 1000, hilbert_projective_invariance),
            check("hilbert-symmetry", 10_000, hilbert_symmetry),
            check("reverse-funk-bound", 10_000, reverse_funk_bounded),
            check("backward-cauchy-tail", 1000, backward_cauchy_tail),
            check("division-ratio-round-trip", 10_000, division_ratio_round_trip),
            check("orthant-isometry", 10_000, orthant_isometry),
        ],
        "oracle-closedform" => vec![
            check("closed-form-polytope", 10_000, closed_form_polytope),
            check("closed-form-ball", 10_000, closed_form_ball),
        ],
        "ball-geometry" => vec![
            check("homothety-exactness", 1000, homothety_exactness),
            check("ball-similarity", 200, ball_similarity_check),
            check("sandwich-forward", 100, sandwich_forward),
            check("sandwich-backward", 100, sandwich_backward),
            check("forward-ball-convexity", 10_000, forward_ball_convexity),
        ],
        "geodesy" => vec![
            check("equality-iff-alignment-square", 10_000, alignment_square),
            check("equality-iff-alignment-ball", 10_000, alignment_ball),
            check("same-edge-triples", 1000, same_edge_triples),
            check("perturbation-breaks-equality", 1000, perturbation_breaks_equality),
            check("geodesic-dichotomy", 1000, geodesic_dichotomy),
            check("cone-criterion", 500, cone_criterion),
            check("hilbert-two-face", 2000, hilbert_two_face_check),
        ],
        "triangle" => vec![
            check("same-edge-triples", 1000, same_edge_triples),
            check("equality-iff-alignment-square", 50_000, alignment_square),
            check("equality-iff-alignment-ball", 50_000, alignment_ball),
        ],
        "projection" => vec![
            check("definition-consistency", 50, definition_consistency),
            check("uniqueness-strictly-convex", 100, uniqueness_restarts),
            check("non-uniqueness-witness", 100, non_uniqueness_witness),
            check("monotone-bracketing", 100, monotone_bracketing),
        ],
        "finsler-tangent" => vec![
            check("unit-ball-identity", 10_000, unit_ball_identity),
            check("positive-homogeneity", 10_000, tangent_homogeneity),
            check("subadditivity", 10_000, tangent_subadditivity),
            check("convergence-order", 200, convergence_order),
            check("polytope-sup-identity", 10_000, polytope_sup),
        ],
        "classical-oracles" | "appendix" => vec![
            check("menelaus", 1000, menelaus),
            check("menelaus-off-line", 1000, menelaus_off_line),
            check("ceva", 1000, ceva),
            check("cross-ratio-invariance", 1000, cross_ratio_invariance),
            check("appendix-replay", 1000, appendix_chain),
        ],
        "all" => {
            let mut all = Vec::new();
            for s in ["convex-core", "metric-engine", "ball-geometry", "geodesy", "projection", "finsler-tangent", "classical-oracles"] {
                all.extend(suite(s).unwrap());
            }
            all
        }
        _ => return None,
    })
}

/// FNV-1a, so every check draws from its own stream regardless of suite or order.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn run_check(c: &Check, seed: u64, samples: Option<usize>, tol: &Tolerances) -> Outcome {
    let n = samples.unwrap_or(c.samples).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(c.name));
    catch_unwind(AssertUnwindSafe(|| (c.run)(&mut rng, n, tol))).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Outcome {
            passed: false,
            ..Outcome::at_most(n, f64::NAN, 0.0).with(format!("panicked: {msg}"))
        }
    })
}

#[derive(Serialize)]
struct CheckReport<'a> {
    name: &'a str,
    #[serde(flatten)]
    outcome: Outcome,
}

pub fn run(ctx: &Ctx, name: &str, samples: Option<usize>) -> Result<(), CliError> {
    let checks = suite(name).ok_or_else(|| {
        CliError::Validation(format!("unknown suite {name:?}; known suites: {}", SUITES.join(", ")))
    })?;
    let start = Instant::now();
    let results: Vec<CheckReport> = checks
        .par_iter()
        .map(|c| {
            let mut outcome = run_check(c, ctx.seed, samples, &ctx.tol);
            outcome.measured = round_sig(outcome.measured);
            outcome.limit = round_sig(outcome.limit);
            CheckReport { name: c.name, outcome }
        })
        .collect();
    let wall = start.elapsed().as_secs_f64();
    let passed = results.iter().all(|r| r.outcome.passed);
    let failed: Vec<&str> = results.iter().filter(|r| !r.outcome.passed).map(|r| r.name).collect();
    let body = json!({
        "suite": name,
        "seed": ctx.seed,
        "tolerances": ctx.tol,
        "checks": results,
        "passed": passed,
    });
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    // the only line that differs between runs with the same seed
    let run_info = format!(
        "  \"run_info\": {{\"timestamp_unix\": {timestamp}, \"wall_time_s\": {}}},\n",
        round_sig(wall)
    );
    let pretty = serde_json::to_string_pretty(&body).unwrap();
    let report = format!("{{\n{run_info}{}\n", &pretty[2..]);
    ctx.emit(&report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failure(format!("suite {name}: failed {}", failed.join(", "))))
    }
}
