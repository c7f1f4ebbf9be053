//! Euler–Maruyama paths and their mollifier regularization.
//!
//! The diffusion is simulated on a fine grid over `[0, T]`; the regularized
//! path is the discrete convolution with the bump `Ψ` (midpoint rule at the
//! Euler step), so evaluation needs `t ∈ [burn_in, T − 1]` with
//! `burn_in >= 1`. Derivatives convolve with `Ψ^(j)` instead.

use rand::Rng;
use rand_distr::StandardNormal;

use super::bump::bump_derivatives;
use super::trajectory::Trajectory;
use crate::rng::rng_from_seed;

/// Drift families with the regularity the simulation needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    Zero,
    Const { value: f64 },
    /// `b(x) = −rate·x`.
    MeanRevert { rate: f64 },
    /// `b(x) = scale·tanh(x)`: bounded drift.
    BoundedTanh { scale: f64 },
}

impl Drift {
    pub fn eval(&self, _s: f64, x: f64) -> f64 {
        match self {
            Drift::Zero => 0.0,
            Drift::Const { value } => *value,
            Drift::MeanRevert { rate } => -rate * x,
            Drift::BoundedTanh { scale } => scale * x.tanh(),
        }
    }
}

/// Volatility families, strictly positive and smooth.
#[derive(Debug, Clone, PartialEq)]
pub enum Volatility {
    Const { value: f64 },
    /// `σ(x) = scale·sqrt(1 + x²)`: smooth with linear growth.
    SmoothGrowth { scale: f64 },
}

impl Volatility {
    pub fn eval(&self, _s: f64, x: f64) -> f64 {
        match self {
            Volatility::Const { value } => *value,
            Volatility::SmoothGrowth { scale } => scale * (1.0 + x * x).sqrt(),
        }
    }
}

/// An Euler–Maruyama realization on a uniform fine grid.
#[derive(Debug, Clone)]
pub struct EulerPath {
    pub step: f64,
    /// Values at `0, step, 2·step, …, T`.
    pub values: Vec<f64>,
}

impl EulerPath {
    pub fn simulate(
        drift: &Drift,
        vol: &Volatility,
        x0: f64,
        horizon: f64,
        step: f64,
        seed: u64,
    ) -> EulerPath {
        let n = (horizon / step).round() as usize;
        let mut rng = rng_from_seed(seed);
        let mut values = Vec::with_capacity(n + 1);
        let mut x = x0;
        values.push(x);
        let sqrt_dt = step.sqrt();
        for k in 0..n {
            let s = k as f64 * step;
            let z: f64 = rng.sample(StandardNormal);
            x += drift.eval(s, x) * step + vol.eval(s, x) * sqrt_dt * z;
            values.push(x);
        }
        EulerPath { step, values }
    }

    /// Linear interpolation between grid nodes.
    pub fn at(&self, t: f64) -> f64 {
        let pos = t / self.step;
        let idx = pos.floor() as isize;
        let idx = idx.clamp(0, self.values.len() as isize - 2) as usize;
        let frac = (pos - idx as f64).clamp(0.0, 1.0);
        self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The mollified path `X_Ψ = Ψ * X` with derivative access.
pub struct SmoothedDiffusion {
    pub path: EulerPath,
    /// Midpoint quadrature nodes of the bump support `(−1, 1)`.
    nodes: Vec<f64>,
    /// `weights[j][i] = Ψ^(j)(s_i)·ds` with the order-0 row renormalized to
    /// sum exactly to one (so constants are preserved exactly).
    weights: Vec<Vec<f64>>,
    max_order: u32,
    /// Valid evaluation window `[burn_in, horizon − 1]`.
    pub window: (f64, f64),
}

impl SmoothedDiffusion {
    pub fn new(path: EulerPath, burn_in: f64, horizon: f64, max_order: u32) -> SmoothedDiffusion {
        let n_nodes = (2.0 / path.step).round().max(8.0) as usize;
        let ds = 2.0 / n_nodes as f64;
        let mut nodes = Vec::with_capacity(n_nodes);
        let mut raw: Vec<Vec<f64>> = vec![Vec::with_capacity(n_nodes); max_order as usize + 1];
        for i in 0..n_nodes {
            let s = -1.0 + (i as f64 + 0.5) * ds;
            nodes.push(s);
            let d = bump_derivatives(s, max_order as usize);
            for (j, row) in raw.iter_mut().enumerate() {
                row.push(d[j] * ds);
            }
        }
        // Renormalize order 0 so the discrete kernel has unit mass.
        let mass: f64 = raw[0].iter().sum();
        for w in raw[0].iter_mut() {
            *w /= mass;
        }
        SmoothedDiffusion {
            path,
            nodes,
            weights: raw,
            max_order,
            window: (burn_in, horizon - 1.0),
        }
    }

    /// Discrete `∫|Ψ^(j)|`: the sup-norm transfer constant of order `j`.
    pub fn abs_weight_sum(&self, order: u32) -> f64 {
        self.weights[order as usize].iter().map(|w| w.abs()).sum()
    }
}

impl Trajectory for SmoothedDiffusion {
    fn max_order(&self) -> u32 {
        self.max_order
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        let w = &self.weights[order as usize];
        let mut acc = 0.0;
        for (s, wi) in self.nodes.iter().zip(w) {
            acc += wi * self.path.at(t - s);
        }
        acc
    }
}
