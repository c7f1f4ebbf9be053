//! Random and deterministic fields on the ball and the sphere, with exact
//! restriction to lines and great circles.
//!
//! Restrictions are returned as truncated Taylor series, so crossing counters
//! get exact values and derivatives of the one-dimensional profile without
//! finite differences.

use crate::taylor;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Scalar field on (a ball of) `R^d`.
pub trait Field: Sync + Send {
    fn dim(&self) -> usize;
    fn eval(&self, t: &[f64]) -> f64;
    /// Taylor coefficients of `z ↦ f(base + z·dir)` at `z = 0`.
    fn line_taylor(&self, base: &[f64], dir: &[f64], order: usize) -> Vec<f64>;
    /// First derivative along the line; the series route is the default,
    /// concrete fields override with closed forms (hot path of the counters).
    fn line_derivative(&self, base: &[f64], dir: &[f64]) -> f64 {
        self.line_taylor(base, dir, 1)[1]
    }
}

/// Scalar field on the unit sphere `S^d ⊂ R^{d+1}`.
pub trait SphereField: Sync + Send {
    fn ambient_dim(&self) -> usize;
    fn eval(&self, t: &[f64]) -> f64;
    /// Taylor coefficients at `z = z0` of `z ↦ f(cos z·e1 + sin z·e2)` for an
    /// orthonormal pair: the arc-length restriction to a great circle.
    fn circle_taylor(&self, e1: &[f64], e2: &[f64], z0: f64, order: usize) -> Vec<f64>;
    /// First derivative along the great circle at `z0`; overridden with
    /// closed forms by the concrete fields.
    fn circle_derivative(&self, e1: &[f64], e2: &[f64], z0: f64) -> f64 {
        self.circle_taylor(e1, e2, z0, 1)[1]
    }
}

/// Directional derivative of order `order` at `point` along unit `dir`.
pub fn directional_derivative(field: &dyn Field, point: &[f64], dir: &[f64], order: u32) -> f64 {
    let series = field.line_taylor(point, dir, order as usize);
    taylor::derivatives(&series)[order as usize]
}

/// Directional derivative along the sphere; `dir` must be tangent at `point`.
pub fn sphere_directional_derivative(
    field: &dyn SphereField,
    point: &[f64],
    dir: &[f64],
    order: u32,
) -> Result<f64, NonTangentError> {
    let t = dot(point, dir);
    if t.abs() > 1e-9 {
        return Err(NonTangentError { inner: t });
    }
    let series = field.circle_taylor(point, dir, 0.0, order as usize);
    Ok(taylor::derivatives(&series)[order as usize])
}

#[derive(Debug, thiserror::Error)]
#[error("direction is not tangent to the sphere at the base point (<t, v> = {inner})")]
pub struct NonTangentError {
    pub inner: f64,
}

/// Closed-form test fields.
#[derive(Debug, Clone, PartialEq)]
pub enum DeterministicField {
    /// `t ↦ t[axis]`.
    Coordinate { axis: usize },
    /// `t ↦ <coeffs, t>`.
    LinearForm { coeffs: Vec<f64> },
    /// `t ↦ |t|^2 − offset`.
    RadiusSq { offset: f64 },
    Constant { value: f64 },
}

/// A deterministic field pinned to an ambient dimension.
#[derive(Debug, Clone)]
pub struct DeterministicBallField {
    pub dim: usize,
    pub field: DeterministicField,
}

impl Field for DeterministicBallField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: &[f64]) -> f64 {
        match &self.field {
            DeterministicField::Coordinate { axis } => t[*axis],
            DeterministicField::LinearForm { coeffs } => dot(coeffs, t),
            DeterministicField::RadiusSq { offset } => norm_sq(t) - offset,
            DeterministicField::Constant { value } => *value,
        }
    }
    fn line_taylor(&self, base: &[f64], dir: &[f64], order: usize) -> Vec<f64> {
        let mut c = vec![0.0; order + 1];
        match &self.field {
            DeterministicField::Coordinate { axis } => {
                c[0] = base[*axis];
                if order >= 1 {
                    c[1] = dir[*axis];
                }
            }
            DeterministicField::LinearForm { coeffs } => {
                c[0] = dot(coeffs, base);
                if order >= 1 {
                    c[1] = dot(coeffs, dir);
                }
            }
            DeterministicField::RadiusSq { offset } => {
                c[0] = norm_sq(base) - offset;
                if order >= 1 {
                    c[1] = 2.0 * dot(base, dir);
                }
                if order >= 2 {
                    c[2] = norm_sq(dir);
                }
            }
            DeterministicField::Constant { value } => c[0] = *value,
        }
        c
    }
    fn line_derivative(&self, base: &[f64], dir: &[f64]) -> f64 {
        match &self.field {
            DeterministicField::Coordinate { axis } => dir[*axis],
            DeterministicField::LinearForm { coeffs } => dot(coeffs, dir),
            DeterministicField::RadiusSq { .. } => 2.0 * dot(base, dir),
            DeterministicField::Constant { .. } => 0.0,
        }
    }
}

/// The same closed forms restricted to the unit sphere.
#[derive(Debug, Clone)]
pub struct DeterministicSphereField {
    /// Sphere dimension `d`; points live in `R^{d+1}`.
    pub dim: usize,
    pub field: DeterministicField,
}

impl SphereField for DeterministicSphereField {
    fn ambient_dim(&self) -> usize {
        self.dim + 1
    }
    fn eval(&self, t: &[f64]) -> f64 {
        match &self.field {
            DeterministicField::Coordinate { axis } => t[*axis],
            DeterministicField::LinearForm { coeffs } => dot(coeffs, t),
            DeterministicField::RadiusSq { offset } => 1.0 - offset,
            DeterministicField::Constant { value } => *value,
        }
    }
    fn circle_taylor(&self, e1: &[f64], e2: &[f64], z0: f64, order: usize) -> Vec<f64> {
        match &self.field {
            DeterministicField::Coordinate { axis } => {
                harmonic_series(e1[*axis], e2[*axis], z0, order)
            }
            DeterministicField::LinearForm { coeffs } => {
                harmonic_series(dot(coeffs, e1), dot(coeffs, e2), z0, order)
            }
            DeterministicField::RadiusSq { offset } => taylor::constant(1.0 - offset, order),
            DeterministicField::Constant { value } => taylor::constant(*value, order),
        }
    }
    fn circle_derivative(&self, e1: &[f64], e2: &[f64], z0: f64) -> f64 {
        match &self.field {
            DeterministicField::Coordinate { axis } => {
                -e1[*axis] * z0.sin() + e2[*axis] * z0.cos()
            }
            DeterministicField::LinearForm { coeffs } => {
                -dot(coeffs, e1) * z0.sin() + dot(coeffs, e2) * z0.cos()
            }
            _ => 0.0,
        }
    }
}

/// Series of `z ↦ A cos z + B sin z` at `z0`.
fn harmonic_series(a: f64, b: f64, z0: f64, order: usize) -> Vec<f64> {
    // A cos z + B sin z = R cos(z − phi), R = hypot(A, B), phi = atan2(B, A)
    let r = a.hypot(b);
    let phi = b.atan2(a);
    taylor::cos_affine(r, 1.0, z0 - phi, order)
}

/// Radial kernel `g(t) = exp(−|t|^{2q})` for fields on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    pub q: u32,
}

impl RadialKernel {
    /// Value as a function of the squared radius.
    pub fn eval_sq(&self, s: f64) -> f64 {
        (-s.powi(self.q as i32)).exp()
    }

    /// `∫_{R^d} g(t) dt = π^{d/2}` for `q = 1`; general `q` via the radial
    /// integral `surface(S^{d-1}) ∫_0^∞ e^{-r^{2q}} r^{d-1} dr`.
    pub fn integral(&self, d: u32) -> f64 {
        if self.q == 1 {
            return std::f64::consts::PI.powf(d as f64 / 2.0);
        }
        // Γ(d/(2q))·surface/(2q) with surface = 2π^{d/2}/Γ(d/2); evaluate the
        // radial part numerically (q >= 2 only appears in diagnostics).
        let surface = crate::bounds::sphere_surface(d - 1);
        let mut acc = 0.0;
        let step = 1e-4;
        let mut r: f64 = 0.5 * step;
        while r < 10.0 {
            acc += (-r.powi(2 * self.q as i32)).exp() * r.powi(d as i32 - 1) * step;
            r += step;
        }
        surface * acc
    }

    /// Contribution envelope: a point at distance `rho` from the evaluation
    /// region contributes at most `exp(−rho^{2q})` per unit impulse.
    pub fn envelope(&self, rho: f64) -> f64 {
        (-rho.max(0.0).powi(2 * self.q as i32)).exp()
    }
}

/// Shot noise on (a ball of) `R^d` with a radial kernel: `Σ β_i g(t − τ_i)`.
#[derive(Debug, Clone)]
pub struct ShotNoiseBallField {
    pub dim: usize,
    pub kernel: RadialKernel,
    /// `(impulse, center)` pairs inside the padded ball.
    pub points: Vec<(f64, Vec<f64>)>,
    /// Certified sup-norm bound over the evaluation ball for the dropped
    /// points outside the padded ball.
    pub truncation_error: f64,
}

impl Field for ShotNoiseBallField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, t: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|(beta, tau)| {
                let s: f64 = t.iter().zip(tau).map(|(a, b)| (a - b) * (a - b)).sum();
                beta * self.kernel.eval_sq(s)
            })
            .sum()
    }
    fn line_taylor(&self, base: &[f64], dir: &[f64], order: usize) -> Vec<f64> {
        let mut total = vec![0.0; order + 1];
        let mut diff = vec![0.0; self.dim];
        for (beta, tau) in &self.points {
            for i in 0..self.dim {
                diff[i] = base[i] - tau[i];
            }
            // |base + z dir − tau|^2 = c0 + 2 b z + |dir|^2 z^2
            let mut w = vec![0.0; order + 1];
            w[0] = norm_sq(&diff);
            if order >= 1 {
                w[1] = 2.0 * dot(&diff, dir);
            }
            if order >= 2 {
                w[2] = norm_sq(dir);
            }
            let s = taylor::powi(&w, self.kernel.q, order);
            let g = taylor::exp(&taylor::scale(&s, -1.0), order);
            for (tot, gi) in total.iter_mut().zip(&g) {
                *tot += beta * gi;
            }
        }
        total
    }
    fn line_derivative(&self, base: &[f64], dir: &[f64]) -> f64 {
        // d/dz exp(−w^q) = −q·w^{q−1}·w'·exp(−w^q), w = |base + z·dir − τ|².
        let q = self.kernel.q as i32;
        self.points
            .iter()
            .map(|(beta, tau)| {
                let mut w0 = 0.0;
                let mut w1 = 0.0;
                for i in 0..self.dim {
                    let diff = base[i] - tau[i];
                    w0 += diff * diff;
                    w1 += 2.0 * diff * dir[i];
                }
                -beta * q as f64 * w0.powi(q - 1) * w1 * (-w0.powi(q)).exp()
            })
            .sum()
    }
}

/// Kernel on squared geodesic distance for sphere shot noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereKernel {
    /// `g(s) = exp(−rate·s)`, smooth and strictly positive on `[0, π^2]`.
    pub rate: f64,
}

/// Shot noise on `S^d`: `Σ_{i<=N} β_i g(dist²(t, T_i))` with geodesic `dist`.
/// The empty realization (`N = 0`) is the zero field.
#[derive(Debug, Clone)]
pub struct SphereShotNoiseField {
    pub dim: usize,
    pub kernel: SphereKernel,
    /// `(impulse, unit point)` pairs.
    pub points: Vec<(f64, Vec<f64>)>,
}

impl SphereField for SphereShotNoiseField {
    fn ambient_dim(&self) -> usize {
        self.dim + 1
    }
    fn eval(&self, t: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|(beta, p)| {
                let w = dot(t, p).clamp(-1.0, 1.0);
                let theta = w.acos();
                beta * (-self.kernel.rate * theta * theta).exp()
            })
            .sum()
    }
    fn circle_taylor(&self, e1: &[f64], e2: &[f64], z0: f64, order: usize) -> Vec<f64> {
        let mut total = vec![0.0; order + 1];
        for (beta, p) in &self.points {
            let a = dot(e1, p);
            let b = dot(e2, p);
            // w(z) = <γ(z), p> = a cos z + b sin z
            let w = harmonic_series(a, b, z0, order);
            let theta = acos_series(&w, order);
            let dist_sq = taylor::mul(&theta, &theta, order);
            let g = taylor::exp(&taylor::scale(&dist_sq, -self.kernel.rate), order);
            for (tot, gi) in total.iter_mut().zip(&g) {
                *tot += beta * gi;
            }
        }
        total
    }
    fn circle_derivative(&self, e1: &[f64], e2: &[f64], z0: f64) -> f64 {
        // d/dz g(θ²) = g'(θ²)·2θ·(−w'/sqrt(1−w²)), w(z) = a cos z + b sin z.
        let (cz, sz) = (z0.cos(), z0.sin());
        self.points
            .iter()
            .map(|(beta, p)| {
                let a = dot(e1, p);
                let b = dot(e2, p);
                let w = (a * cz + b * sz).clamp(-1.0, 1.0);
                let w_prime = -a * sz + b * cz;
                let one_minus = (1.0 - w * w).max(1e-12);
                let theta = w.acos();
                let g_prime = -self.kernel.rate * (-self.kernel.rate * theta * theta).exp();
                beta * g_prime * 2.0 * theta * (-w_prime / one_minus.sqrt())
            })
            .sum()
    }
}

/// Series of `arccos(w(z))` from the series of `w`; integrates
/// `θ' = −w'/sqrt(1−w²)`. Near `|w| = 1` (evaluation point at or antipodal to
/// a kernel center) the derivative is singular; the argument of the square
/// root is floored, which only affects derivative orders at measure-zero
/// configurations.
fn acos_series(w: &[f64], order: usize) -> Vec<f64> {
    let theta0 = w[0].clamp(-1.0, 1.0).acos();
    if order == 0 {
        return vec![theta0];
    }
    let mut one_minus_w2 = taylor::scale(&taylor::mul(w, w, order), -1.0);
    one_minus_w2[0] += 1.0;
    if one_minus_w2[0] < 1e-12 {
        one_minus_w2[0] = 1e-12;
    }
    let inv_sqrt = taylor::pow_real(&one_minus_w2, -0.5, order);
    let w_prime: Vec<f64> = (1..=order).map(|n| w[n] * n as f64).collect();
    let theta_prime = taylor::scale(&taylor::mul(&w_prime, &inv_sqrt, order - 1), -1.0);
    taylor::integrate(&theta_prime, theta0, order)
}
