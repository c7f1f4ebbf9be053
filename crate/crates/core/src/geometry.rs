//! Level-set measure estimation by integral geometry.
//!
//! On the ball, the (d−1)-measure of a level set equals the Crofton constant
//! times the mean crossing count over random chords (uniform direction,
//! offset uniform on the orthogonal disc). On the sphere, great circles drawn
//! from the span of two independent Gaussian vectors play the role of the
//! chords. Probes are independent, run in parallel with per-probe seeds, and
//! are reduced in probe order.

use rand::Rng;

use crate::bounds::{crofton_constant, CroftonDomain};
use crate::crossings::{
    crossings_along_great_circle, crossings_along_line, CircleCrossings, LineRestriction,
};
use crate::exec::replicate_map;
use crate::rng::{mix64, rng_from_seed};
use crate::simulate::{
    sample_field, uniform_sphere_point, Field, FieldHandle, FieldSpec, SphereField, Trajectory,
};
use crate::stats::{estimate_mean, estimate_pth_moment, MomentEstimate};

/// Probe budget and counting parameters for a Crofton estimate.
#[derive(Debug, Clone, Copy)]
pub struct CroftonPlan {
    pub n_probes: usize,
    pub seed: u64,
    /// Scan step forwarded to the crossing counter.
    pub base_step: f64,
    pub refine_tol: f64,
}

impl CroftonPlan {
    pub fn new(n_probes: usize, seed: u64) -> CroftonPlan {
        CroftonPlan {
            n_probes,
            seed,
            base_step: 0.01,
            refine_tol: 1e-9,
        }
    }
}

/// A measure estimate with per-probe counts and exclusion diagnostics.
#[derive(Debug, Clone)]
pub struct CroftonEstimate {
    pub estimate: MomentEstimate,
    /// Raw crossing counts of the included probes, in probe order.
    pub counts: Vec<usize>,
    /// Probes whose restriction sat identically on the level (excluded).
    pub degenerate_probes: usize,
    /// Probes whose counter raised the undercount flag (still included).
    pub undercount_probes: usize,
}

enum ProbeOutcome {
    Count(usize, bool),
    Degenerate,
}

/// `H_{d−1}` of the level set `{X = u}` inside the ball of radius `radius`:
/// the Crofton constant times the mean chord crossing count.
pub fn estimate_level_measure_ball(
    field: &dyn Field,
    u: f64,
    radius: f64,
    plan: &CroftonPlan,
) -> CroftonEstimate {
    let d = field.dim();
    let constant = crofton_constant(CroftonDomain::Ball {
        dim: d as u32,
        radius,
    })
    .expect("ball dimension >= 2");

    let outcomes = replicate_map(plan.n_probes, plan.seed, |_i, seed| {
        let mut rng = rng_from_seed(seed);
        let dir = uniform_sphere_point(&mut rng, d);
        // Uniform point on v⊥ ∩ D_radius: uniform direction inside v⊥ times
        // radius·U^{1/(d−1)}.
        let perp = orthogonal_direction(&mut rng, &dir);
        let r = radius * rng.random::<f64>().powf(1.0 / (d as f64 - 1.0));
        let offset: Vec<f64> = perp.iter().map(|x| x * r).collect();
        if chord_is_degenerate(field, &offset, &dir, radius, u) {
            return ProbeOutcome::Degenerate;
        }
        let cc = crossings_along_line(
            field,
            &dir,
            &offset,
            radius,
            u,
            plan.base_step,
            plan.refine_tol,
        )
        .expect("offset sampled inside the ball");
        ProbeOutcome::Count(cc.count, cc.undercount_flag)
    });

    finish(outcomes, constant, plan.seed)
}

/// `H_{d−1}` of `{X = u}` on the sphere `S^d` by great-circle sampling: per
/// probe, the span of two independent Gaussian vectors, orthonormalized.
pub fn estimate_level_measure_sphere(
    field: &dyn SphereField,
    u: f64,
    plan: &CroftonPlan,
) -> CroftonEstimate {
    let d = field.ambient_dim() - 1;
    let constant =
        crofton_constant(CroftonDomain::Sphere { dim: d as u32 }).expect("sphere dimension >= 2");

    let outcomes = replicate_map(plan.n_probes, plan.seed, |_i, seed| {
        let mut rng = rng_from_seed(seed);
        let (e1, e2) = random_plane(&mut rng, d + 1);
        match crossings_along_great_circle(field, &e1, &e2, u, plan.base_step, plan.refine_tol)
            .expect("orthonormalized pair")
        {
            CircleCrossings::Degenerate => ProbeOutcome::Degenerate,
            CircleCrossings::Counted(cc) => ProbeOutcome::Count(cc.count, cc.undercount_flag),
        }
    });

    finish(outcomes, constant, plan.seed)
}

fn finish(outcomes: Vec<ProbeOutcome>, constant: f64, seed: u64) -> CroftonEstimate {
    let mut values = Vec::with_capacity(outcomes.len());
    let mut counts = Vec::with_capacity(outcomes.len());
    let mut degenerate = 0;
    let mut undercounted = 0;
    for o in outcomes {
        match o {
            ProbeOutcome::Count(c, flag) => {
                values.push(constant * c as f64);
                counts.push(c);
                if flag {
                    undercounted += 1;
                }
            }
            ProbeOutcome::Degenerate => degenerate += 1,
        }
    }
    assert!(!values.is_empty(), "all probes degenerate");
    CroftonEstimate {
        estimate: estimate_mean(&values, mix64(seed, 0x0b07)),
        counts,
        degenerate_probes: degenerate,
        undercount_probes: undercounted,
    }
}

/// Uniform unit vector in the hyperplane orthogonal to `dir`.
fn orthogonal_direction(rng: &mut rand_chacha::ChaCha8Rng, dir: &[f64]) -> Vec<f64> {
    loop {
        let g = uniform_sphere_point(rng, dir.len());
        let proj: f64 = g.iter().zip(dir).map(|(a, b)| a * b).sum();
        let mut p: Vec<f64> = g.iter().zip(dir).map(|(a, b)| a - proj * b).collect();
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            p.iter_mut().for_each(|x| *x /= norm);
            return p;
        }
    }
}

/// Orthonormal basis of the span of two Gaussian vectors; near-collinear
/// draws (residual below 1e-8) are rejected and redrawn.
fn random_plane(rng: &mut rand_chacha::ChaCha8Rng, ambient: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let e1 = uniform_sphere_point(rng, ambient);
        let g2 = uniform_sphere_point(rng, ambient);
        let proj: f64 = g2.iter().zip(&e1).map(|(a, b)| a * b).sum();
        let mut e2: Vec<f64> = g2.iter().zip(&e1).map(|(a, b)| a - proj * b).collect();
        let norm = e2.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            e2.iter_mut().for_each(|x| *x /= norm);
            return (e1, e2);
        }
    }
}

/// Zero-variance detection along the chord: a probe lying inside the level
/// set would otherwise produce an unbounded count.
fn chord_is_degenerate(
    field: &dyn Field,
    offset: &[f64],
    dir: &[f64],
    radius: f64,
    u: f64,
) -> bool {
    let dist_sq: f64 = offset.iter().map(|x| x * x).sum();
    let half = (radius * radius - dist_sq).max(0.0).sqrt();
    let path = LineRestriction {
        field,
        base: offset.to_vec(),
        dir: dir.to_vec(),
    };
    (0..16).all(|i| {
        let t = -half + (i as f64 + 0.5) * (2.0 * half / 16.0);
        (path.eval(0, t) - u).abs() < 1e-12
    })
}

/// Outer Monte Carlo over field realizations with an inner Crofton estimate
/// per realization.
#[derive(Debug, Clone)]
pub struct MeasureMomentEstimate {
    /// Empirical p-th moment of the per-field measure estimates.
    pub moment: MomentEstimate,
    /// `c^p · mean(count^p)` pooled over all probes of all fields: the
    /// Jensen-direction quantity the moment bounds control.
    pub jensen_proxy: f64,
    /// Set when an inner estimate had relative std error above 10%.
    pub inner_noise_warning: bool,
    pub degenerate_probes: usize,
}

/// Empirical `p`-th moment of the level-set measure of a random field.
pub fn estimate_measure_pth_moment(
    spec: &FieldSpec,
    u: f64,
    p: u32,
    n_fields: usize,
    plan: &CroftonPlan,
) -> MeasureMomentEstimate {
    struct PerField {
        estimate: f64,
        rel_err_high: bool,
        count_pow_sum: f64,
        included: usize,
        degenerate: usize,
        constant: f64,
    }

    let per_field = replicate_map(n_fields, plan.seed, |_i, field_seed| {
        let inner_plan = CroftonPlan {
            seed: mix64(field_seed, 0x9afe),
            ..*plan
        };
        let handle = sample_field(spec, field_seed);
        let (est, constant) = match &handle {
            FieldHandle::Ball { field, dim, radius } => {
                let c = crofton_constant(CroftonDomain::Ball {
                    dim: *dim,
                    radius: *radius,
                })
                .unwrap();
                (
                    estimate_level_measure_ball(field.as_ref(), u, *radius, &inner_plan),
                    c,
                )
            }
            FieldHandle::Sphere { field, dim } => {
                let c = crofton_constant(CroftonDomain::Sphere { dim: *dim }).unwrap();
                (
                    estimate_level_measure_sphere(field.as_ref(), u, &inner_plan),
                    c,
                )
            }
        };
        let mean = est.estimate.point_estimate;
        PerField {
            estimate: mean,
            rel_err_high: mean != 0.0 && est.estimate.std_error / mean.abs() > 0.1,
            count_pow_sum: est
                .counts
                .iter()
                .map(|&c| (c as f64).powi(p as i32))
                .sum(),
            included: est.counts.len(),
            degenerate: est.degenerate_probes,
            constant,
        }
    });

    let estimates: Vec<f64> = per_field.iter().map(|f| f.estimate).collect();
    let moment = estimate_pth_moment(&estimates, p, mix64(plan.seed, 0x3141));
    let total_pow: f64 = per_field.iter().map(|f| f.count_pow_sum).sum();
    let total_included: usize = per_field.iter().map(|f| f.included).sum();
    let constant = per_field.first().map(|f| f.constant).unwrap_or(1.0);
    MeasureMomentEstimate {
        moment,
        jensen_proxy: constant.powi(p as i32) * total_pow / total_included.max(1) as f64,
        inner_noise_warning: per_field.iter().any(|f| f.rel_err_high),
        degenerate_probes: per_field.iter().map(|f| f.degenerate).sum(),
    }
}
