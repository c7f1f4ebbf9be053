//! Empirical moment estimates with bootstrap confidence intervals.

use rand::Rng;
use serde::Serialize;

use crate::rng::rng_from_seed;

/// Number of bootstrap resamples behind every confidence interval.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// An empirical moment with its replicate count, standard error and a 95%
/// percentile-bootstrap confidence interval.
#[derive(Debug, Clone, Serialize)]
pub struct MomentEstimate {
    pub point_estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Replicate count.
    pub n: usize,
    /// Moment order (1 for plain means).
    pub p: u32,
}

impl MomentEstimate {
    /// Half the CI never excludes the point estimate by construction.
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// Mean of `values` with standard error and bootstrap CI (`p = 1`).
pub fn estimate_mean(values: &[f64], seed: u64) -> MomentEstimate {
    estimate_transformed(values, 1, seed, |x| x)
}

/// Empirical `p`-th moment: mean of `x^p` over the replicates.
pub fn estimate_pth_moment(values: &[f64], p: u32, seed: u64) -> MomentEstimate {
    estimate_transformed(values, p, seed, |x| x.powi(p as i32))
}

fn estimate_transformed<F: Fn(f64) -> f64>(
    values: &[f64],
    p: u32,
    seed: u64,
    transform: F,
) -> MomentEstimate {
    let n = values.len();
    assert!(n > 0, "empty sample");
    let xs: Vec<f64> = values.iter().map(|&v| transform(v)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let std_error = if n < 2 {
        0.0
    } else {
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };

    let (ci_low, ci_high) = bootstrap_ci(&xs, mean, seed);
    MomentEstimate {
        point_estimate: mean,
        std_error,
        ci_low,
        ci_high,
        n,
        p,
    }
}

/// 95% percentile bootstrap for the mean of `xs`, deterministic for a fixed
/// seed. Degenerate samples collapse to a zero-width interval at the mean.
fn bootstrap_ci(xs: &[f64], mean: f64, seed: u64) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (mean, mean);
    }
    let mut rng = rng_from_seed(seed);
    let mut means = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut acc = 0.0;
        for _ in 0..n {
            let idx = rng.random_range(0..n);
            acc += xs[idx];
        }
        means.push(acc / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).expect("non-finite bootstrap mean"));
    let lo_idx = ((BOOTSTRAP_RESAMPLES - 1) as f64 * 0.025).floor() as usize;
    let hi_idx = ((BOOTSTRAP_RESAMPLES - 1) as f64 * 0.975).ceil() as usize;
    // Percentile intervals can exclude the full-sample mean on tiny samples;
    // widen so the invariant ci_low <= point <= ci_high always holds.
    (means[lo_idx].min(mean), means[hi_idx].max(mean))
}
