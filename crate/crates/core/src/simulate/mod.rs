//! Samplers for every shipped process and field family.
//!
//! Every sampler is a pure function of `(spec, seed)`; replicate-level
//! parallelism derives per-replicate seeds with [`crate::rng::mix64`] and
//! reduces in replicate order, so runs are reproducible bit for bit.

pub mod bump;
pub mod diffusion;
pub mod field;
pub mod impulse;
pub mod kernel;
pub mod trajectory;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::bounds::{ball_volume_coeff, gamma_half, sphere_surface};
use crate::rng::rng_from_seed;
pub use diffusion::{Drift, EulerPath, SmoothedDiffusion, Volatility};
pub use field::{
    DeterministicBallField, DeterministicField, DeterministicSphereField, Field, RadialKernel,
    ShotNoiseBallField, SphereField, SphereKernel, SphereShotNoiseField,
};
pub use impulse::ImpulseLaw;
pub use kernel::Kernel;
pub use trajectory::{
    ChiSquareTrajectory, RealizedAtom, ShotNoiseTrajectory, SineCosineTrajectory,
    SpectralTrajectory, Trajectory,
};

/// Law of the random frequency in the conditional sine-cosine process.
///
/// The Pareto family has density `shape·ω^(−shape−1)` on `[1, ∞)`, which has
/// finite moments strictly below `shape`: taking `shape = M + 1` gives the
/// case where the count's maximal finite moment is `M`.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaLaw {
    Fixed { value: f64 },
    Pareto { shape: f64 },
    /// Pareto conditioned to `[1, max]`; every moment is finite and closed-form.
    ParetoTruncated { shape: f64, max: f64 },
}

impl OmegaLaw {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            OmegaLaw::Fixed { value } => *value,
            OmegaLaw::Pareto { shape } => (1.0 - rng.random::<f64>()).powf(-1.0 / shape),
            OmegaLaw::ParetoTruncated { shape, max } => {
                let tail = 1.0 - max.powf(-shape);
                (1.0 - rng.random::<f64>() * tail).powf(-1.0 / shape)
            }
        }
    }

    /// `E ω^r` in closed form; `None` when infinite.
    pub fn moment(&self, r: f64) -> Option<f64> {
        match self {
            OmegaLaw::Fixed { value } => Some(value.powf(r)),
            OmegaLaw::Pareto { shape } => (r < *shape).then(|| shape / (shape - r)),
            OmegaLaw::ParetoTruncated { shape, max } => {
                let tail = 1.0 - max.powf(-shape);
                if (r - shape).abs() < 1e-12 {
                    Some(shape * max.ln() / tail)
                } else {
                    Some(shape / (shape - r) * (1.0 - max.powf(r - shape)) / tail)
                }
            }
        }
    }
}

/// `E A^m` for `A` Rayleigh(1) (the amplitude `sqrt(ξ1² + ξ2²)`):
/// `2^{m/2}·Γ(1 + m/2)`.
pub fn rayleigh_moment(m: u32) -> f64 {
    2f64.powf(m as f64 / 2.0) * gamma_half(m + 2)
}

/// Declarative description of a simulable process on an interval.
#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    SineCosine {
        omega: OmegaLaw,
    },
    /// Finite spectral mixture with atoms `(σ² weight, frequency)`.
    SpectralGaussian {
        atoms: Vec<(f64, f64)>,
    },
    ChiSquare {
        n: u32,
        atoms: Vec<(f64, f64)>,
    },
    ShotNoise1D {
        lambda: f64,
        kernel: Kernel,
        impulse: ImpulseLaw,
        /// Window padding; `None` picks the smallest pad whose certified
        /// truncation error is below `1e-8·λ·E|β|`.
        window_pad: Option<f64>,
    },
    RegularizedDiffusion {
        drift: Drift,
        vol: Volatility,
        horizon: f64,
        euler_step: f64,
        burn_in: f64,
        x0: f64,
    },
}

impl ProcessSpec {
    /// Variance of the marginal for spectral mixtures (`λ0 = Σ σ²`).
    pub fn lambda0(&self) -> Option<f64> {
        match self {
            ProcessSpec::SpectralGaussian { atoms } | ProcessSpec::ChiSquare { atoms, .. } => {
                Some(atoms.iter().map(|(s2, _)| s2).sum())
            }
            _ => None,
        }
    }

    /// Second spectral moment (`λ2 = Σ σ²·freq²`).
    pub fn lambda2(&self) -> Option<f64> {
        match self {
            ProcessSpec::SpectralGaussian { atoms } | ProcessSpec::ChiSquare { atoms, .. } => {
                Some(atoms.iter().map(|(s2, f)| s2 * f * f).sum())
            }
            _ => None,
        }
    }
}

/// Declarative description of a simulable field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    ShotNoiseBall {
        dim: u32,
        radius: f64,
        lambda: f64,
        kernel: RadialKernel,
        impulse: ImpulseLaw,
        pad: Option<f64>,
    },
    SphereShotNoise {
        dim: u32,
        lambda: f64,
        kernel: SphereKernel,
        impulse: ImpulseLaw,
    },
    DeterministicBall {
        dim: u32,
        radius: f64,
        field: DeterministicField,
    },
    DeterministicSphere {
        dim: u32,
        field: DeterministicField,
    },
}

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("kernel envelope is not integrable at derivative order {order}")]
    NonIntegrableEnvelope { order: u32 },
    #[error("requested derivative order {requested} exceeds the construction's order {max}")]
    OrderUnsupported { requested: u32, max: u32 },
    #[error("grid [{lo}, {hi}] outside the valid window [{win_lo}, {win_hi}]")]
    GridOutsideWindow {
        lo: f64,
        hi: f64,
        win_lo: f64,
        win_hi: f64,
    },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

/// Uniform evaluation grid with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, n: usize) -> Grid {
        assert!(n >= 2 && end > start, "grid needs n >= 2 and end > start");
        Grid { start, end, n }
    }
    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.n - 1) as f64
    }
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step()
    }
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }
}

/// A realized trajectory sampled on a grid with derivatives up to a requested
/// order; `derivatives[0]` are the values.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub grid: Grid,
    pub derivatives: Vec<Vec<f64>>,
    pub seed: u64,
    /// Certified sup-norm bound on the window-truncation error (0 for exact
    /// constructions).
    pub truncation_error: f64,
}

impl PathSample {
    pub fn from_trajectory(
        traj: &dyn Trajectory,
        grid: &Grid,
        order: u32,
        seed: u64,
        truncation_error: f64,
    ) -> PathSample {
        let derivatives = (0..=order)
            .map(|j| grid.points().map(|t| traj.eval(j, t)).collect())
            .collect();
        PathSample {
            grid: *grid,
            derivatives,
            seed,
            truncation_error,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.derivatives[0]
    }

    pub fn order(&self) -> u32 {
        (self.derivatives.len() - 1) as u32
    }
}

/// Direct Poisson sampling: Knuth's product method below mean 30, recursive
/// halving above (sum of independent halves), exact and reproducible.
pub fn sample_poisson(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < 30.0 {
        let l = (-mean).exp();
        let mut k = 0u64;
        let mut p = 1.0;
        loop {
            p *= rng.random::<f64>();
            if p <= l {
                return k;
            }
            k += 1;
        }
    }
    sample_poisson(rng, mean / 2.0) + sample_poisson(rng, mean / 2.0)
}

/// Draws the conditional sine-cosine realization `ξ1 sin ωt + ξ2 cos ωt`
/// in amplitude-phase form `A cos(ωt − θ)`.
pub fn draw_sine_cosine(law: &OmegaLaw, seed: u64) -> SineCosineTrajectory {
    let mut rng = rng_from_seed(seed);
    let omega = law.sample(&mut rng);
    let xi1: f64 = rng.sample(StandardNormal);
    let xi2: f64 = rng.sample(StandardNormal);
    SineCosineTrajectory {
        omega,
        theta: xi1.atan2(xi2),
        amplitude: xi1.hypot(xi2),
    }
}

/// A sine-cosine path sample together with its realized parameters.
#[derive(Debug, Clone)]
pub struct SineCosineSample {
    pub path: PathSample,
    pub omega: f64,
    pub theta: f64,
    pub amplitude: f64,
}

pub fn sample_sine_cosine(law: &OmegaLaw, seed: u64, grid: &Grid, order: u32) -> SineCosineSample {
    let traj = draw_sine_cosine(law, seed);
    SineCosineSample {
        path: PathSample::from_trajectory(&traj, grid, order, seed, 0.0),
        omega: traj.omega,
        theta: traj.theta,
        amplitude: traj.amplitude,
    }
}

/// Exact number of zeros of `cos(ωt − θ)` on `[0, 2π]`: the lattice count
/// `#{ j : (θ + π/2 + jπ)/ω ∈ [0, 2π] }`.
pub fn exact_zero_count_sine_cosine(omega: f64, theta: f64) -> u64 {
    use std::f64::consts::PI;
    assert!(omega > 0.0);
    let j_min = ((-theta - PI / 2.0) / PI).ceil() as i64;
    let j_max = ((2.0 * PI * omega - theta - PI / 2.0) / PI).floor() as i64;
    (j_max - j_min + 1).max(0) as u64
}

pub fn draw_spectral(atoms: &[(f64, f64)], seed: u64) -> SpectralTrajectory {
    let mut rng = rng_from_seed(seed);
    let atoms = atoms
        .iter()
        .map(|&(sigma2, freq)| RealizedAtom {
            sigma: sigma2.sqrt(),
            freq,
            xi: rng.sample(StandardNormal),
            eta: rng.sample(StandardNormal),
        })
        .collect();
    SpectralTrajectory { atoms }
}

pub fn sample_spectral_gaussian(
    atoms: &[(f64, f64)],
    seed: u64,
    grid: &Grid,
    order: u32,
) -> (PathSample, SpectralTrajectory) {
    let traj = draw_spectral(atoms, seed);
    let sample = PathSample::from_trajectory(&traj, grid, order, seed, 0.0);
    (sample, traj)
}

pub fn draw_chi_square(n: u32, atoms: &[(f64, f64)], seed: u64) -> ChiSquareTrajectory {
    let coordinates = (0..n)
        .map(|i| draw_spectral(atoms, crate::rng::mix64(seed, i as u64)))
        .collect();
    ChiSquareTrajectory { coordinates }
}

pub fn sample_chi_square(
    n: u32,
    atoms: &[(f64, f64)],
    seed: u64,
    grid: &Grid,
    order: u32,
) -> (PathSample, ChiSquareTrajectory) {
    let traj = draw_chi_square(n, atoms, seed);
    let sample = PathSample::from_trajectory(&traj, grid, order, seed, 0.0);
    (sample, traj)
}

/// Smallest pad (among doublings of 1) whose certified truncation error is
/// below `1e-8·λ·E|β|`.
fn auto_pad_1d(kernel: &Kernel, lambda: f64, mean_abs: f64, max_order: u32) -> Option<f64> {
    let target = 1e-8 * lambda * mean_abs;
    let mut pad = 1.0;
    while pad <= 128.0 {
        match truncation_bound_1d(kernel, lambda, mean_abs, pad, max_order) {
            Some(err) if err < target => return Some(pad),
            Some(_) => pad *= 2.0,
            None => return None,
        }
    }
    Some(128.0)
}

/// Certified bound on the expected sup-norm contribution of the dropped
/// points on both sides of the padded window, maximized over orders `0..=r`.
fn truncation_bound_1d(
    kernel: &Kernel,
    lambda: f64,
    mean_abs: f64,
    pad: f64,
    max_order: u32,
) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..=max_order {
        let tail = kernel.envelope_tail_integral(j, pad)?;
        worst = worst.max(2.0 * lambda * mean_abs * tail);
    }
    Some(worst)
}

#[allow(clippy::too_many_arguments)]
pub fn draw_shot_noise_1d(
    lambda: f64,
    kernel: &Kernel,
    impulse: &ImpulseLaw,
    window_pad: Option<f64>,
    interval: (f64, f64),
    max_order: u32,
    seed: u64,
) -> Result<ShotNoiseTrajectory, SimulateError> {
    if max_order > kernel.smoothness() {
        return Err(SimulateError::OrderUnsupported {
            requested: max_order,
            max: kernel.smoothness(),
        });
    }
    let mean_abs = impulse.mean_abs();
    let pad = match window_pad {
        Some(pad) => pad,
        None => auto_pad_1d(kernel, lambda, mean_abs, max_order)
            .ok_or(SimulateError::NonIntegrableEnvelope { order: max_order })?,
    };
    let truncation_error = truncation_bound_1d(kernel, lambda, mean_abs, pad, max_order)
        .ok_or(SimulateError::NonIntegrableEnvelope { order: max_order })?;

    let (lo, hi) = interval;
    let window = hi - lo + 2.0 * pad;
    let mut rng = rng_from_seed(seed);
    let count = sample_poisson(&mut rng, lambda * window);
    let points = (0..count)
        .map(|_| {
            let tau = lo - pad + window * rng.random::<f64>();
            let beta = impulse.sample(&mut rng);
            (beta, tau)
        })
        .collect();
    Ok(ShotNoiseTrajectory {
        kernel: kernel.clone(),
        points,
        truncation_error,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn sample_shot_noise_1d(
    lambda: f64,
    kernel: &Kernel,
    impulse: &ImpulseLaw,
    window_pad: Option<f64>,
    interval: (f64, f64),
    grid: &Grid,
    order: u32,
    seed: u64,
) -> Result<(PathSample, ShotNoiseTrajectory), SimulateError> {
    let traj = draw_shot_noise_1d(lambda, kernel, impulse, window_pad, interval, order, seed)?;
    let sample = PathSample::from_trajectory(&traj, grid, order, seed, traj.truncation_error);
    Ok((sample, traj))
}

#[allow(clippy::too_many_arguments)]
pub fn draw_regularized_diffusion(
    drift: &Drift,
    vol: &Volatility,
    horizon: f64,
    euler_step: f64,
    burn_in: f64,
    x0: f64,
    max_order: u32,
    seed: u64,
) -> Result<SmoothedDiffusion, SimulateError> {
    if burn_in < 1.0 {
        return Err(SimulateError::InvalidSpec(
            "burn_in must be >= 1 (bump support clearance)".into(),
        ));
    }
    if horizon - 1.0 <= burn_in {
        return Err(SimulateError::InvalidSpec(
            "horizon must exceed burn_in + 1".into(),
        ));
    }
    let path = EulerPath::simulate(drift, vol, x0, horizon, euler_step, seed);
    Ok(SmoothedDiffusion::new(path, burn_in, horizon, max_order))
}

#[allow(clippy::too_many_arguments)]
pub fn sample_regularized_diffusion(
    drift: &Drift,
    vol: &Volatility,
    horizon: f64,
    euler_step: f64,
    burn_in: f64,
    x0: f64,
    grid: &Grid,
    order: u32,
    seed: u64,
) -> Result<PathSample, SimulateError> {
    let smooth =
        draw_regularized_diffusion(drift, vol, horizon, euler_step, burn_in, x0, order, seed)?;
    let (win_lo, win_hi) = smooth.window;
    if grid.start < win_lo - 1e-12 || grid.end > win_hi + 1e-12 {
        return Err(SimulateError::GridOutsideWindow {
            lo: grid.start,
            hi: grid.end,
            win_lo,
            win_hi,
        });
    }
    Ok(PathSample::from_trajectory(&smooth, grid, order, seed, 0.0))
}

/// Draws a boxed trajectory for any path spec; `interval` feeds the
/// window-based constructions and is ignored by the exact analytic ones.
pub fn draw_trajectory(
    spec: &ProcessSpec,
    interval: (f64, f64),
    max_order: u32,
    seed: u64,
) -> Result<Box<dyn Trajectory>, SimulateError> {
    match spec {
        ProcessSpec::SineCosine { omega } => Ok(Box::new(draw_sine_cosine(omega, seed))),
        ProcessSpec::SpectralGaussian { atoms } => Ok(Box::new(draw_spectral(atoms, seed))),
        ProcessSpec::ChiSquare { n, atoms } => Ok(Box::new(draw_chi_square(*n, atoms, seed))),
        ProcessSpec::ShotNoise1D {
            lambda,
            kernel,
            impulse,
            window_pad,
        } => Ok(Box::new(draw_shot_noise_1d(
            *lambda, kernel, impulse, *window_pad, interval, max_order, seed,
        )?)),
        ProcessSpec::RegularizedDiffusion {
            drift,
            vol,
            horizon,
            euler_step,
            burn_in,
            x0,
        } => {
            let smooth = draw_regularized_diffusion(
                drift, vol, *horizon, *euler_step, *burn_in, *x0, max_order, seed,
            )?;
            let (win_lo, win_hi) = smooth.window;
            if interval.0 < win_lo - 1e-12 || interval.1 > win_hi + 1e-12 {
                return Err(SimulateError::GridOutsideWindow {
                    lo: interval.0,
                    hi: interval.1,
                    win_lo,
                    win_hi,
                });
            }
            Ok(Box::new(smooth))
        }
    }
}

/// Uniform point on the unit sphere of `R^ambient_dim` via a normalized
/// Gaussian vector.
pub fn uniform_sphere_point(rng: &mut ChaCha8Rng, ambient_dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..ambient_dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn auto_pad_ball(kernel: &RadialKernel, d: u32, a: f64, lambda: f64, mean_abs: f64) -> (f64, f64) {
    let target = 1e-8 * lambda * mean_abs;
    // Unit steps first (the window volume grows like pad^d), then doublings.
    let mut pad = 1.0;
    loop {
        let err = truncation_bound_ball(kernel, d, a, lambda, mean_abs, pad);
        if err < target || pad >= 64.0 {
            return (pad, err);
        }
        pad = if pad < 16.0 { pad + 1.0 } else { pad * 2.0 };
    }
}

/// Expected contribution of points beyond the padded ball: bounded by
/// `λ·E|β|·d·k_d·∫_pad^∞ e^{−s^{2q}}(s+a)^{d−1} ds`, with the integrand
/// dominated by `e^{−c·s}(s+a)^{d−1}`, `c = pad^{2q−1}` (valid for `pad >= 1`).
fn truncation_bound_ball(
    kernel: &RadialKernel,
    d: u32,
    a: f64,
    lambda: f64,
    mean_abs: f64,
    pad: f64,
) -> f64 {
    let c = pad.powi(2 * kernel.q as i32 - 1);
    let mut integral = 0.0;
    let mut binom = 1.0;
    for i in 0..d {
        integral += binom * a.powi((d - 1 - i) as i32) * poly_exp_tail_int(i, c, pad);
        binom *= (d - 1 - i) as f64 / (i + 1) as f64;
    }
    lambda * mean_abs * d as f64 * ball_volume_coeff(d) * integral
}

/// `∫_a^∞ s^deg e^{-c s} ds` in closed form.
fn poly_exp_tail_int(deg: u32, c: f64, a: f64) -> f64 {
    let mut acc = 0.0;
    let mut falling = 1.0;
    for i in 0..=deg {
        acc += falling * a.powi((deg - i) as i32) / c.powi(i as i32 + 1);
        falling *= (deg - i) as f64;
    }
    acc * (-c * a).exp()
}

pub fn sample_ball_field(
    dim: u32,
    radius: f64,
    lambda: f64,
    kernel: &RadialKernel,
    impulse: &ImpulseLaw,
    pad: Option<f64>,
    seed: u64,
) -> ShotNoiseBallField {
    let mean_abs = impulse.mean_abs();
    let (pad, truncation_error) = match pad {
        Some(p) => (
            p,
            truncation_bound_ball(kernel, dim, radius, lambda, mean_abs, p),
        ),
        None => auto_pad_ball(kernel, dim, radius, lambda, mean_abs),
    };
    let r_window = radius + pad;
    let mean = lambda * ball_volume_coeff(dim) * r_window.powi(dim as i32);
    let mut rng = rng_from_seed(seed);
    let count = sample_poisson(&mut rng, mean);
    let points = (0..count)
        .map(|_| {
            let dir = uniform_sphere_point(&mut rng, dim as usize);
            let r = r_window * rng.random::<f64>().powf(1.0 / dim as f64);
            let center: Vec<f64> = dir.into_iter().map(|x| x * r).collect();
            (impulse.sample(&mut rng), center)
        })
        .collect();
    ShotNoiseBallField {
        dim: dim as usize,
        kernel: *kernel,
        points,
        truncation_error,
    }
}

/// A realized field together with its domain.
pub enum FieldHandle {
    Ball {
        field: Box<dyn Field>,
        dim: u32,
        radius: f64,
    },
    Sphere {
        field: Box<dyn SphereField>,
        dim: u32,
    },
}

/// Realizes a field spec into an evaluable handle.
pub fn sample_field(spec: &FieldSpec, seed: u64) -> FieldHandle {
    match spec {
        FieldSpec::ShotNoiseBall {
            dim,
            radius,
            lambda,
            kernel,
            impulse,
            pad,
        } => FieldHandle::Ball {
            field: Box::new(sample_ball_field(
                *dim, *radius, *lambda, kernel, impulse, *pad, seed,
            )),
            dim: *dim,
            radius: *radius,
        },
        FieldSpec::SphereShotNoise {
            dim,
            lambda,
            kernel,
            impulse,
        } => FieldHandle::Sphere {
            field: Box::new(sample_sphere_field(*dim, *lambda, kernel, impulse, seed)),
            dim: *dim,
        },
        FieldSpec::DeterministicBall { dim, radius, field } => FieldHandle::Ball {
            field: Box::new(DeterministicBallField {
                dim: *dim as usize,
                field: field.clone(),
            }),
            dim: *dim,
            radius: *radius,
        },
        FieldSpec::DeterministicSphere { dim, field } => FieldHandle::Sphere {
            field: Box::new(DeterministicSphereField {
                dim: *dim as usize,
                field: field.clone(),
            }),
            dim: *dim,
        },
    }
}

pub fn sample_sphere_field(
    dim: u32,
    lambda: f64,
    kernel: &SphereKernel,
    impulse: &ImpulseLaw,
    seed: u64,
) -> SphereShotNoiseField {
    let mean = lambda * sphere_surface(dim);
    let mut rng = rng_from_seed(seed);
    let count = sample_poisson(&mut rng, mean);
    let points = (0..count)
        .map(|_| {
            let p = uniform_sphere_point(&mut rng, dim as usize + 1);
            (impulse.sample(&mut rng), p)
        })
        .collect();
    SphereShotNoiseField {
        dim: dim as usize,
        kernel: *kernel,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::mix64;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn sine_cosine_fixed_is_cosine_and_seed_deterministic() {
        let law = OmegaLaw::Fixed { value: 1.0 };
        let grid = Grid::new(0.0, TWO_PI, 101);
        let a = sample_sine_cosine(&law, 7, &grid, 2);
        let b = sample_sine_cosine(&law, 7, &grid, 2);
        assert_eq!(a.path.derivatives, b.path.derivatives);
        assert_eq!(a.omega, 1.0);

        for (i, t) in grid.points().enumerate() {
            let expect = a.amplitude * (t - a.theta).cos();
            assert!((a.path.values()[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_cosine_derivative_sup_norm_bound() {
        // |X^(j)|_inf <= ω^j·A on any grid.
        let law = OmegaLaw::Pareto { shape: 4.0 };
        let grid = Grid::new(0.0, TWO_PI, 257);
        for seed in 0..50 {
            let s = sample_sine_cosine(&law, seed, &grid, 3);
            for j in 0..=3usize {
                let bound = s.omega.powi(j as i32) * s.amplitude;
                for v in &s.path.derivatives[j] {
                    assert!(v.abs() <= bound * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn exact_zero_count_examples() {
        assert_eq!(exact_zero_count_sine_cosine(1.0, 0.0), 2);
        assert_eq!(exact_zero_count_sine_cosine(2.5, 0.0), 5);
        assert_eq!(exact_zero_count_sine_cosine(0.2, 0.0), 0);
        assert!((5.0f64 - 2.0 * 2.5).abs() <= 2.0);
        assert!((0.0f64 - 2.0 * 0.2).abs() <= 2.0);
    }

    #[test]
    fn zero_count_within_two_of_twice_omega_every_replicate() {
        let law = OmegaLaw::Pareto { shape: 4.0 };
        for i in 0..10_000u64 {
            let traj = draw_sine_cosine(&law, mix64(314, i));
            let n0 = exact_zero_count_sine_cosine(traj.omega, traj.theta) as f64;
            assert!(
                (n0 - 2.0 * traj.omega).abs() <= 2.0 + 1e-9,
                "replicate {i}: N0={n0}, omega={}",
                traj.omega
            );
        }
    }

    #[test]
    fn exact_zero_count_brute_force_cross_check() {
        // Independent oracle: enumerate roots t = (θ + π/2 + jπ)/ω directly.
        let law = OmegaLaw::Pareto { shape: 3.0 };
        for i in 0..500u64 {
            let traj = draw_sine_cosine(&law, mix64(77, i));
            let mut brute = 0u64;
            let mut j = -2i64;
            loop {
                let t = (traj.theta
                    + std::f64::consts::FRAC_PI_2
                    + j as f64 * std::f64::consts::PI)
                    / traj.omega;
                if t > TWO_PI {
                    break;
                }
                if t >= 0.0 {
                    brute += 1;
                }
                j += 1;
            }
            assert_eq!(
                brute,
                exact_zero_count_sine_cosine(traj.omega, traj.theta),
                "omega={} theta={}",
                traj.omega,
                traj.theta
            );
        }
    }

    #[test]
    fn spectral_moments_match_monte_carlo() {
        let atoms = [(0.6, 1.0), (0.4, 3.0)];
        let lambda0: f64 = 1.0;
        let lambda2: f64 = 0.6 + 0.4 * 9.0;
        let n = 10_000;
        let (mut sx, mut sxx, mut sd, mut sdd, mut s4) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let traj = draw_spectral(&atoms, mix64(2024, i));
            let x = traj.eval(0, 0.0);
            let dx = traj.eval(1, 0.0);
            sx += x;
            sxx += x * x;
            sd += dx;
            sdd += dx * dx;
            s4 += x.powi(4);
        }
        let nf = n as f64;
        let var = sxx / nf - (sx / nf).powi(2);
        let se_var = (2.0 * lambda0 * lambda0 / nf).sqrt();
        assert!((var - lambda0).abs() < 5.0 * se_var, "var {var}");
        let dvar = sdd / nf - (sd / nf).powi(2);
        let se_dvar = (2.0 * lambda2 * lambda2 / nf).sqrt();
        assert!((dvar - lambda2).abs() < 5.0 * se_dvar, "dvar {dvar}");
        // Normality check through the kurtosis: E X^4 / λ0² = 3 ± 5 SE.
        let kurt = s4 / nf / (lambda0 * lambda0);
        let se_kurt = (96.0f64 / nf).sqrt();
        assert!((kurt - 3.0).abs() < 5.0 * se_kurt, "kurtosis {kurt}");
    }

    #[test]
    fn chi_square_nonnegative_and_mean_n() {
        let atoms = [(1.0, 1.0)];
        let n_rep = 8000;
        let dims = 3u32;
        let mut sum = 0.0;
        for i in 0..n_rep {
            let traj = draw_chi_square(dims, &atoms, mix64(5150, i));
            let y = traj.eval(0, 0.4);
            assert!(y >= 0.0);
            sum += y;
        }
        let mean = sum / n_rep as f64;
        let se = (2.0 * dims as f64 / n_rep as f64).sqrt();
        assert!((mean - dims as f64).abs() < 5.0 * se, "mean {mean}");
    }

    #[test]
    fn chi_square_conditional_derivative_variance() {
        // Var(Y'(0) | Y(0) = y) = 4·λ2·y, checked by binned regression
        // through the origin.
        let atoms = [(1.0, 1.0)];
        let lambda2 = 1.0;
        let n_rep = 40_000;
        let mut pairs = Vec::with_capacity(n_rep as usize);
        for i in 0..n_rep {
            let traj = draw_chi_square(2, &atoms, mix64(606, i));
            pairs.push((traj.eval(0, 0.0), traj.eval(1, 0.0)));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let n_bins = 20;
        let per = pairs.len() / n_bins;
        let mut num = 0.0;
        let mut den = 0.0;
        for b in 0..n_bins {
            let chunk = &pairs[b * per..(b + 1) * per];
            let my: f64 = chunk.iter().map(|p| p.0).sum::<f64>() / per as f64;
            let mdy: f64 = chunk.iter().map(|p| p.1).sum::<f64>() / per as f64;
            let vdy: f64 =
                chunk.iter().map(|p| (p.1 - mdy) * (p.1 - mdy)).sum::<f64>() / (per - 1) as f64;
            num += my * vdy;
            den += my * my;
        }
        let slope = num / den;
        assert!(
            (slope - 4.0 * lambda2).abs() < 0.15 * 4.0 * lambda2,
            "slope {slope}"
        );
    }

    #[test]
    fn shot_noise_campbell_mean() {
        // E X(0) = λ·Eβ·∫g, with ∫g = sqrt(π) for the Gaussian bump.
        let lambda = 1.5;
        let kernel = Kernel::GaussianBump;
        let impulse = ImpulseLaw::Normal {
            mean: 1.0,
            std: 0.5,
        };
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let traj = draw_shot_noise_1d(
                lambda,
                &kernel,
                &impulse,
                None,
                (-1.0, 1.0),
                1,
                mix64(8080, i),
            )
            .unwrap();
            let v = traj.eval(0, 0.0);
            sum += v;
            sum_sq += v * v;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let expect = lambda * impulse.mean() * kernel.integral();
        let se = ((sum_sq / nf - mean * mean) / nf).sqrt();
        assert!(
            (mean - expect).abs() < 5.0 * se,
            "mean {mean} vs {expect} (se {se})"
        );
    }

    #[test]
    fn shot_noise_small_lambda_mostly_zero() {
        let lambda = 1e-4;
        let kernel = Kernel::GaussianBump;
        let impulse = ImpulseLaw::Constant { value: 1.0 };
        let mut zeros = 0;
        for i in 0..200 {
            let traj =
                draw_shot_noise_1d(lambda, &kernel, &impulse, Some(4.0), (0.0, 1.0), 0, i).unwrap();
            if traj.points.is_empty() {
                zeros += 1;
            }
        }
        assert!(zeros >= 198, "zeros {zeros}");
    }

    #[test]
    fn shot_noise_truncation_error_decreases_fast_in_pad() {
        let lambda = 2.0;
        let kernel = Kernel::GaussianBump;
        let impulse = ImpulseLaw::Constant { value: 1.0 };
        let err = |pad: f64| {
            draw_shot_noise_1d(lambda, &kernel, &impulse, Some(pad), (0.0, 1.0), 2, 1)
                .unwrap()
                .truncation_error
        };
        let e1 = err(1.5);
        let e2 = err(3.0);
        assert!(e2 <= e1 / 2.0, "e1 {e1}, e2 {e2}");
        assert!(e2 > 0.0);
    }

    #[test]
    fn shot_noise_nonintegrable_envelope_is_rejected() {
        let res = draw_shot_noise_1d(
            1.0,
            &Kernel::Reciprocal,
            &ImpulseLaw::Constant { value: 1.0 },
            None,
            (0.0, 1.0),
            0,
            3,
        );
        assert!(matches!(
            res,
            Err(SimulateError::NonIntegrableEnvelope { .. })
        ));
    }

    #[test]
    fn poisson_sampler_moments() {
        let mut rng = rng_from_seed(13);
        for &mean in &[0.5, 4.0, 25.0, 120.0] {
            let n = 20_000;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let k = sample_poisson(&mut rng, mean) as f64;
                sum += k;
                sum_sq += k * k;
            }
            let m = sum / n as f64;
            let v = sum_sq / n as f64 - m * m;
            let se = (mean / n as f64).sqrt();
            assert!((m - mean).abs() < 5.0 * se, "mean {m} vs {mean}");
            assert!((v - mean).abs() < 0.1 * mean + 5.0 * se, "var {v} vs {mean}");
        }
    }

    #[test]
    fn ball_field_mean_at_origin_matches_gaussian_integral() {
        // E X(0) = λ·Eβ·π^{d/2} for the radial Gaussian kernel.
        let d = 2u32;
        let lambda = 1.0;
        let impulse = ImpulseLaw::Constant { value: 1.0 };
        let kernel = RadialKernel { q: 1 };
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let f = sample_ball_field(d, 1.0, lambda, &kernel, &impulse, None, mix64(1999, i));
            let v = f.eval(&[0.0, 0.0]);
            sum += v;
            sum_sq += v * v;
        }
        let nf = n as f64;
        let mean = sum / nf;
        let expect = lambda * std::f64::consts::PI;
        let se = ((sum_sq / nf - mean * mean) / nf).sqrt();
        assert!(
            (mean - expect).abs() < 5.0 * se,
            "mean {mean} vs {expect} (se {se})"
        );
    }

    #[test]
    fn sphere_field_empty_realization_probability() {
        // N ~ Poisson(λ·H_2(S²)) = Poisson(4πλ); for tiny λ most draws are empty.
        let mut empties = 0;
        for i in 0..300 {
            let f = sample_sphere_field(
                2,
                1e-4,
                &SphereKernel { rate: 1.0 },
                &ImpulseLaw::Constant { value: 1.0 },
                i,
            );
            if f.points.is_empty() {
                empties += 1;
                assert_eq!(f.eval(&[0.0, 0.0, 1.0]), 0.0);
            }
        }
        assert!(empties >= 295);
    }

    #[test]
    fn omega_law_truncated_moments() {
        let law = OmegaLaw::ParetoTruncated {
            shape: 4.0,
            max: 10.0,
        };
        let mut rng = rng_from_seed(3331);
        let n = 200_000;
        let (mut s1, mut s3) = (0.0, 0.0);
        for _ in 0..n {
            let w = law.sample(&mut rng);
            assert!((1.0..=10.0).contains(&w));
            s1 += w;
            s3 += w.powi(3);
        }
        let m1 = law.moment(1.0).unwrap();
        let m3 = law.moment(3.0).unwrap();
        assert!((s1 / n as f64 - m1).abs() < 0.01 * m1);
        assert!((s3 / n as f64 - m3).abs() < 0.03 * m3);
        let open = OmegaLaw::Pareto { shape: 4.0 };
        assert!(open.moment(3.0).is_some());
        assert!(open.moment(4.0).is_none());
    }

    #[test]
    fn rayleigh_moments_closed_form() {
        assert!((rayleigh_moment(1) - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((rayleigh_moment(2) - 2.0).abs() < 1e-12);
        assert!((rayleigh_moment(3) - 3.0 * (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn regularized_diffusion_grid_window_enforced() {
        let res = sample_regularized_diffusion(
            &Drift::Zero,
            &Volatility::Const { value: 1.0 },
            4.0,
            0.01,
            1.0,
            0.0,
            &Grid::new(0.5, 2.0, 10),
            1,
            0,
        );
        assert!(matches!(res, Err(SimulateError::GridOutsideWindow { .. })));

        let ok = sample_regularized_diffusion(
            &Drift::Zero,
            &Volatility::Const { value: 1.0 },
            4.0,
            0.01,
            1.0,
            0.0,
            &Grid::new(1.0, 3.0, 10),
            1,
            0,
        );
        assert!(ok.is_ok());
    }
}
