//! Numerical verification of the smoothed-counter limit: the expectation of
//! the windowed counter `N_u^δ = (1/2δ)∫|X'|·1{|X−u|<=δ}` converges to the
//! expected crossing count as `δ` shrinks, with the stationary Gaussian
//! closed form as an independent oracle where it applies.

use serde::Serialize;

use crate::crossings::{count_crossings, kac_counter};
use crate::diagnostics::DiagnosticsError;
use crate::exec::replicate_map;
use crate::rng::mix64;
use crate::simulate::{draw_trajectory, ProcessSpec};
use crate::stats::{estimate_mean, MomentEstimate};

/// Default δ ladder.
pub const DEFAULT_DELTAS: [f64; 5] = [0.5, 0.2, 0.1, 0.05, 0.02];

/// Counting and quadrature parameters for the verification runs.
#[derive(Debug, Clone, Copy)]
pub struct KacParams {
    pub interval: (f64, f64),
    pub base_step: f64,
    pub refine_tol: f64,
    /// Quadrature step as a fraction of δ (default 1/8).
    pub quad_step_fraction: f64,
}

impl Default for KacParams {
    fn default() -> Self {
        KacParams {
            interval: (0.0, 2.0 * std::f64::consts::PI),
            base_step: 0.01,
            refine_tol: 1e-9,
            quad_step_fraction: 0.125,
        }
    }
}

/// Per-δ means of the smoothed counter next to the crossing mean and, for
/// spectral Gaussian specs, the closed-form expectation.
#[derive(Debug, Clone, Serialize)]
pub struct KacRiceReport {
    pub deltas: Vec<f64>,
    pub kac_estimates: Vec<MomentEstimate>,
    pub crossing_estimate: MomentEstimate,
    pub closed_form: Option<f64>,
    pub r_profile: Option<Vec<(f64, MomentEstimate)>>,
}

/// Stationary Gaussian expected crossing count over an interval:
/// `(|I|/π)·sqrt(λ2/λ0)·exp(−u²/(2λ0))`.
pub fn rice_closed_form_gaussian(
    lambda0: f64,
    lambda2: f64,
    u: f64,
    interval_length: f64,
) -> f64 {
    assert!(lambda0 > 0.0 && lambda2 > 0.0);
    interval_length / std::f64::consts::PI * (lambda2 / lambda0).sqrt()
        * (-u * u / (2.0 * lambda0)).exp()
}

/// Runs the counter ladder: per replicate, the crossing count and every
/// `N_u^δ` come from the same path.
pub fn verify_kac_rice(
    spec: &ProcessSpec,
    u: f64,
    deltas: &[f64],
    n_replicates: usize,
    seed: u64,
    params: &KacParams,
) -> Result<KacRiceReport, DiagnosticsError> {
    assert!(
        deltas.windows(2).all(|w| w[1] < w[0]),
        "deltas must be strictly decreasing"
    );
    let rows = replicate_map(n_replicates, seed, |_i, rep_seed| {
        draw_trajectory(spec, params.interval, 1, rep_seed).map(|traj| {
            let count = count_crossings(
                traj.as_ref(),
                params.interval,
                u,
                params.base_step,
                params.refine_tol,
            )
            .count as f64;
            let kacs: Vec<f64> = deltas
                .iter()
                .map(|&delta| {
                    kac_counter(
                        traj.as_ref(),
                        params.interval,
                        u,
                        delta,
                        delta * params.quad_step_fraction,
                    )
                })
                .collect();
            (count, kacs)
        })
    });
    let rows = rows
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(DiagnosticsError::from)?;

    let counts: Vec<f64> = rows.iter().map(|(c, _)| *c).collect();
    let kac_estimates = (0..deltas.len())
        .map(|j| {
            let col: Vec<f64> = rows.iter().map(|(_, kacs)| kacs[j]).collect();
            estimate_mean(&col, mix64(seed, 0x4ac0 + j as u64))
        })
        .collect();
    let closed_form = match (spec.lambda0(), spec.lambda2()) {
        (Some(l0), Some(l2)) if matches!(spec, ProcessSpec::SpectralGaussian { .. }) => Some(
            rice_closed_form_gaussian(l0, l2, u, params.interval.1 - params.interval.0),
        ),
        _ => None,
    };
    Ok(KacRiceReport {
        deltas: deltas.to_vec(),
        kac_estimates,
        crossing_estimate: estimate_mean(&counts, mix64(seed, 0x5eed)),
        closed_form,
        r_profile: None,
    })
}

/// Level profile of the windowed counter around `u`, plus the window-average
/// comparison against the crossing mean.
#[derive(Debug, Clone, Serialize)]
pub struct RProfile {
    /// `(level, windowed-counter mean at that level)`.
    pub levels: Vec<(f64, MomentEstimate)>,
    /// Mean of the level means: a midpoint-rule value of
    /// `(1/2ε)∫_{u−ε}^{u+ε} R(v) dv`.
    pub window_average: f64,
    pub crossing_estimate: MomentEstimate,
}

/// Estimates `R(v)` on `n_levels` midpoints of `(u−ε, u+ε)` by the δ-window
/// counter at each level; requires `δ <= ε/(2·n_levels)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_r_profile(
    spec: &ProcessSpec,
    u: f64,
    epsilon: f64,
    n_levels: usize,
    delta: f64,
    n_replicates: usize,
    seed: u64,
    params: &KacParams,
) -> Result<RProfile, DiagnosticsError> {
    assert!(n_levels >= 1 && epsilon > 0.0);
    assert!(
        delta <= epsilon / (2.0 * n_levels as f64) + 1e-15,
        "delta must resolve the level spacing"
    );
    let level_step = 2.0 * epsilon / n_levels as f64;
    let levels: Vec<f64> = (0..n_levels)
        .map(|j| u - epsilon + (j as f64 + 0.5) * level_step)
        .collect();

    let rows = replicate_map(n_replicates, seed, |_i, rep_seed| {
        draw_trajectory(spec, params.interval, 1, rep_seed).map(|traj| {
            let count = count_crossings(
                traj.as_ref(),
                params.interval,
                u,
                params.base_step,
                params.refine_tol,
            )
            .count as f64;
            let per_level: Vec<f64> = levels
                .iter()
                .map(|&v| {
                    kac_counter(
                        traj.as_ref(),
                        params.interval,
                        v,
                        delta,
                        delta * params.quad_step_fraction,
                    )
                })
                .collect();
            (count, per_level)
        })
    });
    let rows = rows
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(DiagnosticsError::from)?;

    let counts: Vec<f64> = rows.iter().map(|(c, _)| *c).collect();
    let level_estimates: Vec<(f64, MomentEstimate)> = levels
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let col: Vec<f64> = rows.iter().map(|(_, ks)| ks[j]).collect();
            (v, estimate_mean(&col, mix64(seed, 0x9000 + j as u64)))
        })
        .collect();
    let window_average = level_estimates
        .iter()
        .map(|(_, e)| e.point_estimate)
        .sum::<f64>()
        / n_levels as f64;
    Ok(RProfile {
        levels: level_estimates,
        window_average,
        crossing_estimate: estimate_mean(&counts, mix64(seed, 0x5eed)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{moment_bound_interval, BoundParams, MomentOrder};
    use crate::simulate::{rayleigh_moment, OmegaLaw};

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        assert!((rice_closed_form_gaussian(1.0, 1.0, 0.0, TWO_PI) - 2.0).abs() < 1e-14);
        assert!((rice_closed_form_gaussian(1.0, 4.0, 0.0, TWO_PI) - 4.0).abs() < 1e-14);
        // Monotone decay in |u|.
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let v = rice_closed_form_gaussian(1.0, 1.0, i as f64 * 0.5, TWO_PI);
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn single_atom_counter_ladder() {
        let spec = ProcessSpec::SpectralGaussian {
            atoms: vec![(1.0, 1.0)],
        };
        let report = verify_kac_rice(
            &spec,
            0.0,
            &[0.5, 0.1, 0.02],
            800,
            31,
            &KacParams::default(),
        )
        .unwrap();
        assert_eq!(report.closed_form, Some(rice_closed_form_gaussian(1.0, 1.0, 0.0, TWO_PI)));
        // Crossing count is exactly 2 for every realization.
        assert_eq!(report.crossing_estimate.point_estimate, 2.0);
        assert_eq!(report.crossing_estimate.std_error, 0.0);
        // The smallest δ is essentially exact.
        let last = report.kac_estimates.last().unwrap();
        assert!(
            (last.point_estimate - 2.0).abs() < 3.0 * last.ci_width().max(1e-4),
            "kac at smallest delta: {last:?}"
        );
    }

    #[test]
    fn monotone_stabilization_across_deltas() {
        // |kac(δ) − crossing mean| nonincreasing (up to one CI width) on the
        // shipped stochastic specs.
        let specs = [
            ProcessSpec::SpectralGaussian {
                atoms: vec![(1.0, 1.0)],
            },
            ProcessSpec::SineCosine {
                omega: OmegaLaw::Fixed { value: 1.0 },
            },
            ProcessSpec::ChiSquare {
                n: 2,
                atoms: vec![(1.0, 1.0)],
            },
        ];
        for (si, spec) in specs.iter().enumerate() {
            let u = if matches!(spec, ProcessSpec::ChiSquare { .. }) {
                1.0
            } else {
                0.0
            };
            let report = verify_kac_rice(
                spec,
                u,
                &DEFAULT_DELTAS,
                400,
                1000 + si as u64,
                &KacParams::default(),
            )
            .unwrap();
            let target = report.crossing_estimate.point_estimate;
            let mut last_gap = f64::INFINITY;
            for est in &report.kac_estimates {
                let gap = (est.point_estimate - target).abs();
                assert!(
                    gap <= last_gap + est.ci_width(),
                    "spec {si}: gap {gap} after {last_gap}"
                );
                last_gap = gap;
            }
            // Final δ agrees within 3 CI widths.
            let last = report.kac_estimates.last().unwrap();
            assert!(
                (last.point_estimate - target).abs() <= 3.0 * last.ci_width().max(1e-3),
                "spec {si}: {} vs {target}",
                last.point_estimate
            );
        }
    }

    #[test]
    fn uniform_integrability_proxy_stays_below_moment_bound() {
        // Second moment of the windowed counter stays below the explicit
        // bound for (k=4, h=0, m=3, p=2) on the single-atom Gaussian:
        // |X''''|_inf <= amplitude, so D_3 is the third Rayleigh moment, and
        // the marginal density is standard normal (bound 1/sqrt(2π)).
        let params = BoundParams {
            k: 4,
            h: 0,
            m: MomentOrder::Finite(3),
            p: 2,
            c: 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            d_m: rayleigh_moment(3),
            domain_size: TWO_PI,
            alpha: None,
        };
        let bound = moment_bound_interval(&params, 1e-8).unwrap();

        let spec = ProcessSpec::SpectralGaussian {
            atoms: vec![(1.0, 1.0)],
        };
        let kac_params = KacParams::default();
        for &delta in &[0.5, 0.1, 0.02] {
            let rows = replicate_map(400, 77, |_i, rep_seed| {
                let traj = draw_trajectory(&spec, kac_params.interval, 1, rep_seed).unwrap();
                kac_counter(
                    traj.as_ref(),
                    kac_params.interval,
                    0.0,
                    delta,
                    delta * kac_params.quad_step_fraction,
                )
            });
            let second: f64 = rows.iter().map(|k| k * k).sum::<f64>() / rows.len() as f64;
            assert!(
                second <= bound,
                "delta {delta}: E[(N^δ)²] = {second} above bound {bound}"
            );
        }
    }

    #[test]
    fn r_profile_single_atom_matches_closed_form_per_level() {
        let spec = ProcessSpec::SpectralGaussian {
            atoms: vec![(1.0, 1.0)],
        };
        let profile = estimate_r_profile(
            &spec,
            0.0,
            0.5,
            5,
            0.05,
            2000,
            271,
            &KacParams::default(),
        )
        .unwrap();
        for (v, est) in &profile.levels {
            let expect = rice_closed_form_gaussian(1.0, 1.0, *v, TWO_PI);
            assert!(
                (est.point_estimate - expect).abs() < 3.0 * est.ci_width().max(0.02),
                "level {v}: {} vs {expect}",
                est.point_estimate
            );
        }
        // Window average against the crossing mean: the ε-window bias of the
        // Gaussian factor stays within a few CI widths at ε = 0.5.
        let gap = (profile.window_average - profile.crossing_estimate.point_estimate).abs();
        let width = profile.levels[0].1.ci_width().max(0.02);
        assert!(gap <= 3.0 * width, "gap {gap}, width {width}");
    }

    #[test]
    fn r_profile_requires_delta_resolving_levels() {
        let spec = ProcessSpec::SpectralGaussian {
            atoms: vec![(1.0, 1.0)],
        };
        let res = std::panic::catch_unwind(|| {
            estimate_r_profile(&spec, 0.0, 0.5, 5, 0.2, 10, 1, &KacParams::default())
        });
        assert!(res.is_err());
    }
}
