//! Shot-noise kernels with derivative evaluation and certified monotone
//! envelopes.
//!
//! A kernel exposes `eval(order, t)` for derivatives up to its declared
//! smoothness, a nonincreasing envelope dominating `|g^(j)(±t)|` for `t` at or
//! beyond a given distance, and a closed-form upper bound on the envelope's
//! tail integral. The envelope is what certifies window-truncation errors and
//! the summability of the inter-box suprema `d_{k,n}`.

use crate::taylor;

/// Shipped kernel families.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `g(t) = exp(-t^2)`, smooth on the whole line.
    GaussianBump,
    /// `g(t) = exp(-t)` for `t >= 0`, zero otherwise. Discontinuous at 0;
    /// derivatives are classical away from 0 and the envelope still applies.
    ExpOneSided,
    /// `g(t) = exp(-rate·|t|)`. Continuous, smooth away from 0.
    ExpSymmetric { rate: f64 },
    /// `g(t) = t^degree · exp(-rate·t)` for `t >= 0`: polynomial-times-
    /// exponential decay, `C^(degree-1)` at the origin.
    PolyExpOneSided { degree: u32, rate: f64 },
    /// `g(t) = 1/(1+|t|)`: harmonic decay, a non-integrable-envelope example.
    Reciprocal,
}

impl Kernel {
    /// Largest derivative order with classical evaluation everywhere the
    /// kernel is used (one-sided families are evaluated away from 0).
    pub fn smoothness(&self) -> u32 {
        match self {
            Kernel::GaussianBump => 32,
            Kernel::ExpOneSided => 32,
            Kernel::ExpSymmetric { .. } => 32,
            Kernel::PolyExpOneSided { degree, .. } => degree.saturating_sub(1),
            Kernel::Reciprocal => 0,
        }
    }

    /// `g^(order)(t)`.
    pub fn eval(&self, order: u32, t: f64) -> f64 {
        match self {
            Kernel::GaussianBump => gaussian_derivative(order, t),
            Kernel::ExpOneSided => {
                if t >= 0.0 {
                    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                    sign * (-t).exp()
                } else {
                    0.0
                }
            }
            Kernel::ExpSymmetric { rate } => {
                if t >= 0.0 {
                    (-rate).powi(order as i32) * (-rate * t).exp()
                } else {
                    rate.powi(order as i32) * (rate * t).exp()
                }
            }
            Kernel::PolyExpOneSided { degree, rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    // Leibniz on t^d · e^{-rate t}.
                    let d = *degree as i32;
                    let mut acc = 0.0;
                    let mut binom = 1.0;
                    for i in 0..=order.min(*degree) {
                        let ii = i as i32;
                        let falling: f64 = (0..ii).map(|j| (d - j) as f64).product();
                        acc += binom
                            * falling
                            * t.powi(d - ii)
                            * (-*rate).powi(order as i32 - ii)
                            * (-rate * t).exp();
                        binom *= (order - i) as f64 / (i + 1) as f64;
                    }
                    acc
                }
            }
            Kernel::Reciprocal => {
                assert_eq!(order, 0, "Reciprocal kernel exposes order 0 only");
                1.0 / (1.0 + t.abs())
            }
        }
    }

    /// Nonincreasing dominating function: `|g^(j)(t)| <= envelope(j, s)` for
    /// all `|t| >= s`.
    pub fn envelope(&self, order: u32, dist: f64) -> f64 {
        let s = dist.max(0.0);
        match self {
            Kernel::GaussianBump => {
                // |g^(j)(t)| = |H_j(t)|e^{-t^2} <= ψ(|t|) with
                // ψ(x) = S_j·max(1,x)^j·e^{-x^2}, S_j the sum of |Hermite
                // coefficients|. ψ decays on [0,1], may rise again up to
                // u = max(1, sqrt(j/2)), and decays beyond; its monotone hull
                // is max(ψ(s), ψ(u)) below u and ψ(s) after.
                let sj = hermite_abs_coeff_sum(order);
                let u = 1f64.max((order as f64 / 2.0).sqrt());
                let psi = |x: f64| sj * x.max(1.0).powi(order as i32) * (-x * x).exp();
                if s >= u {
                    psi(s)
                } else {
                    psi(s).max(psi(u))
                }
            }
            Kernel::ExpOneSided => (-s).exp(),
            Kernel::ExpSymmetric { rate } => rate.powi(order as i32) * (-rate * s).exp(),
            Kernel::PolyExpOneSided { degree, rate } => {
                // ψ(x) = C_j·max(1,x)^degree·e^{-rate x} with C_j the sum of
                // |Leibniz coefficients|; same hull shape as the Gaussian.
                let cj = poly_exp_coeff_sum(*degree, *rate, order);
                let u = 1f64.max(*degree as f64 / rate);
                let psi = |x: f64| cj * x.max(1.0).powi(*degree as i32) * (-rate * x).exp();
                if s >= u {
                    psi(s)
                } else {
                    psi(s).max(psi(u))
                }
            }
            Kernel::Reciprocal => 1.0 / (1.0 + s),
        }
    }

    /// Upper bound on `∫_from^∞ envelope(order, s) ds`; `None` when the tail
    /// is not integrable.
    pub fn envelope_tail_integral(&self, order: u32, from: f64) -> Option<f64> {
        let a = from.max(0.0);
        match self {
            Kernel::GaussianBump => {
                let sj = hermite_abs_coeff_sum(order);
                let u = 1f64.max((order as f64 / 2.0).sqrt());
                if a < u {
                    // flat bound up to u, then the decaying tail from u
                    let flat = (u - a) * self.envelope(order, a);
                    return Some(flat + sj * poly_exp_tail(order, u, u));
                }
                // For s >= a >= 1: s^j e^{-s^2} <= s^j e^{-a s}.
                Some(sj * poly_exp_tail(order, a, a))
            }
            Kernel::ExpOneSided => Some((-a).exp()),
            Kernel::ExpSymmetric { rate } => {
                Some(rate.powi(order as i32) / rate * (-rate * a).exp())
            }
            Kernel::PolyExpOneSided { degree, rate } => {
                let cj = poly_exp_coeff_sum(*degree, *rate, order);
                let u = 1f64.max(*degree as f64 / rate);
                if a < u {
                    let flat = (u - a) * self.envelope(order, a);
                    return Some(flat + cj * poly_exp_tail(*degree, *rate, u));
                }
                Some(cj * poly_exp_tail(*degree, *rate, a))
            }
            Kernel::Reciprocal => None,
        }
    }

    /// `∫_{-∞}^{∞} g(t) dt`, used by the Campbell-formula oracle.
    pub fn integral(&self) -> f64 {
        match self {
            Kernel::GaussianBump => std::f64::consts::PI.sqrt(),
            Kernel::ExpOneSided => 1.0,
            Kernel::ExpSymmetric { rate } => 2.0 / rate,
            Kernel::PolyExpOneSided { degree, rate } => {
                let fact: f64 = (1..=*degree as u64).map(|i| i as f64).product();
                fact / rate.powi(*degree as i32 + 1)
            }
            Kernel::Reciprocal => f64::INFINITY,
        }
    }

    /// Taylor coefficients of `z ↦ g(t0 + z)` up to `order` (used by exact
    /// shot-noise trajectory evaluation).
    pub fn taylor_at(&self, t0: f64, order: usize) -> Vec<f64> {
        match self {
            Kernel::GaussianBump => {
                // exp(-(t0+z)^2)
                let w = [t0 * t0, 2.0 * t0, 1.0];
                taylor::exp(&taylor::scale(&w, -1.0), order)
            }
            _ => {
                // Fall back to derivative values (exact closed forms above).
                let mut c = Vec::with_capacity(order + 1);
                let mut fact = 1.0;
                for j in 0..=order {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    c.push(self.eval(j as u32, t0) / fact);
                }
                c
            }
        }
    }
}

/// `d^j/dt^j exp(-t^2)` via the recursion
/// `f^(j+1) = -2t·f^(j) - 2j·f^(j-1)`.
fn gaussian_derivative(order: u32, t: f64) -> f64 {
    let f0 = (-t * t).exp();
    if order == 0 {
        return f0;
    }
    let mut prev = f0;
    let mut cur = -2.0 * t * f0;
    for j in 1..order {
        let next = -2.0 * t * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Sum of absolute Leibniz coefficients of `d^order/dt^order (t^deg e^{-rate t})`.
fn poly_exp_coeff_sum(deg: u32, rate: f64, order: u32) -> f64 {
    let d = deg as i32;
    let mut cj = 0.0;
    let mut binom = 1.0;
    for i in 0..=order.min(deg) {
        let falling: f64 = (0..i as i32).map(|j| (d - j) as f64).product();
        cj += binom * falling * rate.powi(order as i32 - i as i32);
        binom *= (order - i) as f64 / (i + 1) as f64;
    }
    cj
}

/// Sum of absolute coefficients of the physicists' Hermite polynomial `H_j`.
fn hermite_abs_coeff_sum(j: u32) -> f64 {
    // H_0 = 1, H_1 = 2t, H_{n+1} = 2t·H_n − 2n·H_{n−1}; the absolute sums
    // obey S_{n+1} <= 2 S_n + 2 n S_{n-1}.
    let mut prev = 1.0;
    let mut cur = 2.0;
    if j == 0 {
        return 1.0;
    }
    if j == 1 {
        return 2.0;
    }
    for n in 1..j {
        let next = 2.0 * cur + 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form upper bound on `∫_a^∞ s^deg e^{-c s} ds`
/// `= e^{-c a} Σ_{i=0..deg} deg!/(deg-i)! · a^(deg-i) / c^(i+1)`.
fn poly_exp_tail(deg: u32, c: f64, a: f64) -> f64 {
    let mut acc = 0.0;
    let mut falling = 1.0;
    for i in 0..=deg {
        acc += falling * a.powi((deg - i) as i32) / c.powi(i as i32 + 1);
        falling *= (deg - i) as f64;
    }
    acc * (-c * a).exp()
}
