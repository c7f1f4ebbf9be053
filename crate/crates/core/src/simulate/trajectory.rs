//! Realized paths with pointwise derivative evaluation.
//!
//! Counting and quadrature need to evaluate a realization anywhere, not just
//! on a preset grid, so every sampler returns a trajectory object; grid views
//! ([`super::PathSample`]) are derived from it.

use super::kernel::Kernel;

/// A realized path evaluable at arbitrary points with derivatives up to
/// `max_order`. Order 0 is the path itself.
pub trait Trajectory: Sync + Send {
    fn max_order(&self) -> u32;
    fn eval(&self, order: u32, t: f64) -> f64;

    fn value(&self, t: f64) -> f64 {
        self.eval(0, t)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.eval(1, t)
    }
}

/// `amplitude · cos(omega·t − theta)`, the normalized sine-cosine process.
#[derive(Debug, Clone)]
pub struct SineCosineTrajectory {
    pub omega: f64,
    pub theta: f64,
    pub amplitude: f64,
}

impl Trajectory for SineCosineTrajectory {
    fn max_order(&self) -> u32 {
        u32::MAX
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        self.amplitude
            * self.omega.powi(order as i32)
            * (self.omega * t - self.theta + order as f64 * std::f64::consts::FRAC_PI_2).cos()
    }
}

/// One realized spectral atom: `sigma·(xi·cos(freq·t) + eta·sin(freq·t))`.
#[derive(Debug, Clone)]
pub struct RealizedAtom {
    pub sigma: f64,
    pub freq: f64,
    pub xi: f64,
    pub eta: f64,
}

/// Finite spectral mixture: an exact, infinitely differentiable stationary
/// Gaussian realization.
#[derive(Debug, Clone)]
pub struct SpectralTrajectory {
    pub atoms: Vec<RealizedAtom>,
}

impl Trajectory for SpectralTrajectory {
    fn max_order(&self) -> u32 {
        u32::MAX
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        let shift = order as f64 * std::f64::consts::FRAC_PI_2;
        self.atoms
            .iter()
            .map(|a| {
                a.sigma
                    * a.freq.powi(order as i32)
                    * (a.xi * (a.freq * t + shift).cos() + a.eta * (a.freq * t + shift).sin())
            })
            .sum()
    }
}

/// Sum of squares of independent spectral realizations. Derivatives via
/// Leibniz: `Y^(r) = Σ_i Σ_j C(r,j)·X_i^(j)·X_i^(r−j)`.
#[derive(Debug, Clone)]
pub struct ChiSquareTrajectory {
    pub coordinates: Vec<SpectralTrajectory>,
}

impl Trajectory for ChiSquareTrajectory {
    fn max_order(&self) -> u32 {
        u32::MAX
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        let r = order as usize;
        let mut acc = 0.0;
        for x in &self.coordinates {
            let derivs: Vec<f64> = (0..=r).map(|j| x.eval(j as u32, t)).collect();
            let mut binom = 1.0;
            for j in 0..=r {
                acc += binom * derivs[j] * derivs[r - j];
                binom *= (r - j) as f64 / (j + 1) as f64;
            }
        }
        acc
    }
}

/// Finite Poisson sum `Σ β_i g(t − τ_i)` over a padded window.
#[derive(Debug, Clone)]
pub struct ShotNoiseTrajectory {
    pub kernel: Kernel,
    /// `(impulse, location)` pairs inside the padded window.
    pub points: Vec<(f64, f64)>,
    /// Certified sup-norm bound on the error from dropping points outside the
    /// window, maximized over the orders requested at sampling time.
    pub truncation_error: f64,
}

impl Trajectory for ShotNoiseTrajectory {
    fn max_order(&self) -> u32 {
        self.kernel.smoothness()
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        self.points
            .iter()
            .map(|&(beta, tau)| beta * self.kernel.eval(order, t - tau))
            .sum()
    }
}

/// Polynomial path (test corpus): coefficients in increasing degree.
#[derive(Debug, Clone)]
pub struct PolynomialTrajectory {
    pub coeffs: Vec<f64>,
}

impl PolynomialTrajectory {
    /// `leading · Π (t − r_i)`.
    pub fn from_roots(leading: f64, roots: &[f64]) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        PolynomialTrajectory { coeffs }
    }
}

impl Trajectory for PolynomialTrajectory {
    fn max_order(&self) -> u32 {
        u32::MAX
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        let r = order as usize;
        let mut acc = 0.0;
        for (deg, &c) in self.coeffs.iter().enumerate().skip(r) {
            let falling: f64 = (0..r).map(|j| (deg - j) as f64).product();
            acc += c * falling * t.powi((deg - r) as i32);
        }
        acc
    }
}

/// Ad-hoc path from value/derivative closures (test corpus).
pub struct FnTrajectory<F, G>
where
    F: Fn(f64) -> f64 + Sync + Send,
    G: Fn(f64) -> f64 + Sync + Send,
{
    pub f: F,
    pub df: G,
}

impl<F, G> Trajectory for FnTrajectory<F, G>
where
    F: Fn(f64) -> f64 + Sync + Send,
    G: Fn(f64) -> f64 + Sync + Send,
{
    fn max_order(&self) -> u32 {
        1
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        match order {
            0 => (self.f)(t),
            1 => (self.df)(t),
            _ => panic!("FnTrajectory exposes orders 0 and 1 only"),
        }
    }
}
