//! Impulse (mark) distributions for shot noise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Shipped impulse families. Every family exposes the closed-form quantities
/// the hypothesis checks need: `E|β|`, `E β`, a density bound when one
/// exists, and `E(1/|β|)` when finite.
#[derive(Debug, Clone, PartialEq)]
pub enum ImpulseLaw {
    Constant { value: f64 },
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    Rayleigh { sigma: f64 },
}

impl ImpulseLaw {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            ImpulseLaw::Constant { value } => *value,
            ImpulseLaw::Normal { mean, std } => {
                mean + std * rng.sample::<f64, _>(StandardNormal)
            }
            ImpulseLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            ImpulseLaw::Exponential { rate } => -(1.0 - rng.random::<f64>()).ln() / rate,
            ImpulseLaw::Rayleigh { sigma } => {
                sigma * (-2.0 * (1.0 - rng.random::<f64>()).ln()).sqrt()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ImpulseLaw::Constant { value } => *value,
            ImpulseLaw::Normal { mean, .. } => *mean,
            ImpulseLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
            ImpulseLaw::Exponential { rate } => 1.0 / rate,
            ImpulseLaw::Rayleigh { sigma } => sigma * (std::f64::consts::PI / 2.0).sqrt(),
        }
    }

    pub fn mean_abs(&self) -> f64 {
        match self {
            ImpulseLaw::Constant { value } => value.abs(),
            ImpulseLaw::Normal { mean, std } => {
                // folded normal mean
                let m = *mean;
                let s = *std;
                if s == 0.0 {
                    return m.abs();
                }
                let z = m / s;
                s * (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * z * z).exp()
                    + m * erf(z / std::f64::consts::SQRT_2)
            }
            ImpulseLaw::Uniform { lo, hi } => {
                if *lo >= 0.0 {
                    0.5 * (lo + hi)
                } else if *hi <= 0.0 {
                    -0.5 * (lo + hi)
                } else {
                    0.5 * (hi * hi + lo * lo) / (hi - lo)
                }
            }
            ImpulseLaw::Exponential { rate } => 1.0 / rate,
            ImpulseLaw::Rayleigh { sigma } => sigma * (std::f64::consts::PI / 2.0).sqrt(),
        }
    }

    /// Uniform bound on the density, when the law has one.
    pub fn density_bound(&self) -> Option<f64> {
        match self {
            ImpulseLaw::Constant { .. } => None,
            ImpulseLaw::Normal { std, .. } => {
                (*std > 0.0).then(|| 1.0 / (std * (2.0 * std::f64::consts::PI).sqrt()))
            }
            ImpulseLaw::Uniform { lo, hi } => (hi > lo).then(|| 1.0 / (hi - lo)),
            ImpulseLaw::Exponential { rate } => Some(*rate),
            ImpulseLaw::Rayleigh { sigma } => Some((-0.5f64).exp() / sigma),
        }
    }

    /// `E(1/|β|)` in closed form; `None` marks a divergent expectation.
    pub fn mean_recip_abs(&self) -> Option<f64> {
        match self {
            ImpulseLaw::Constant { value } => (*value != 0.0).then(|| 1.0 / value.abs()),
            ImpulseLaw::Normal { .. } => None, // density positive at 0
            ImpulseLaw::Uniform { lo, hi } => {
                if *lo > 0.0 {
                    Some((hi.ln() - lo.ln()) / (hi - lo))
                } else if *hi < 0.0 {
                    Some(((-lo).ln() - (-hi).ln()) / (hi - lo))
                } else {
                    None
                }
            }
            ImpulseLaw::Exponential { .. } => None, // ∫ e^{-rate x}/x diverges at 0
            ImpulseLaw::Rayleigh { sigma } => {
                Some((std::f64::consts::PI / 2.0).sqrt() / sigma)
            }
        }
    }
}

/// Error function via Abramowitz–Stegun 7.1.26 (|eps| < 1.5e-7), enough for
/// the folded-normal mean used in truncation certificates.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn closed_forms_match_monte_carlo() {
        let laws = [
            ImpulseLaw::Constant { value: -2.5 },
            ImpulseLaw::Normal { mean: 1.0, std: 0.5 },
            ImpulseLaw::Uniform { lo: -1.0, hi: 3.0 },
            ImpulseLaw::Exponential { rate: 2.0 },
            ImpulseLaw::Rayleigh { sigma: 1.3 },
        ];
        let n = 200_000;
        for law in &laws {
            let mut rng = rng_from_seed(41);
            let mut sum = 0.0;
            let mut sum_abs = 0.0;
            for _ in 0..n {
                let b = law.sample(&mut rng);
                sum += b;
                sum_abs += b.abs();
            }
            let mean = sum / n as f64;
            let mean_abs = sum_abs / n as f64;
            assert!(
                (mean - law.mean()).abs() < 0.02 * (1.0 + law.mean().abs()),
                "{law:?} mean {mean} vs {}",
                law.mean()
            );
            assert!(
                (mean_abs - law.mean_abs()).abs() < 0.02 * (1.0 + law.mean_abs()),
                "{law:?} mean_abs {mean_abs} vs {}",
                law.mean_abs()
            );
        }
    }

    #[test]
    fn recip_abs_closed_forms() {
        let u = ImpulseLaw::Uniform { lo: 1.0, hi: 2.0 };
        assert!((u.mean_recip_abs().unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(ImpulseLaw::Normal { mean: 0.0, std: 1.0 }.mean_recip_abs().is_none());
        assert!(ImpulseLaw::Exponential { rate: 1.0 }.mean_recip_abs().is_none());
        let r = ImpulseLaw::Rayleigh { sigma: 2.0 };
        // E(1/X) = sqrt(pi/2)/sigma for Rayleigh.
        assert!((r.mean_recip_abs().unwrap() - (std::f64::consts::PI / 2.0).sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn erf_reference_points() {
        assert!((erf(0.0)).abs() < 1e-8);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 3e-7);
        assert!((erf(-2.0) + 0.9953222650189527).abs() < 3e-7);
    }
}
