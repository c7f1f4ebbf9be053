//! Feasibility conditions, series constants and explicit moment bounds.
//!
//! For a process with `C^k` paths, a moment bound `D_m` on the sup-norm of the
//! k-th derivative, and a joint density of `(X, X', …, X^(h))` bounded by `C`,
//! the p-th moment of the crossing count over an interval `I` is bounded by
//!
//! ```text
//! (k-1)^p + D_m·E + C·|I|^((h+1)(k-h/2))·D
//! ```
//!
//! where `E` and `D` are convergent series depending on a free parameter
//! `alpha` in the open window `(p/m, k - h/2 - (1+p)/(1+h))`. The window is
//! nonempty exactly when
//!
//! ```text
//! p < (k - h/2 - 1/(1+h)) · (1/m + 1/(1+h))^{-1}
//! ```
//!
//! which this module checks in exact integer arithmetic. The ball and sphere
//! variants multiply by a power of the Crofton constant and replace `|I|` by
//! the maximal chord (`2a`) or great-circle length (`2π`).
//!
//! The feasibility test only needs the joint density to be bounded on a
//! neighborhood of the target level; the explicit constants additionally
//! assume the same bound uniformly over all levels. With only the local
//! bound, [`feasible_p_max`] remains the (qualitative) finiteness criterion
//! and the number produced by the `moment_bound_*` functions is not a
//! certified constant.

use std::f64::consts::PI;

use thiserror::Error;

/// Hard cap on series terms before reporting a budget failure.
pub const MAX_SERIES_TERMS: usize = 10_000_000;

/// Moment order of the k-th derivative bound; the limit case is kept as an
/// explicit flag rather than a sentinel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    Finite(u32),
    Infinite,
}

impl MomentOrder {
    pub fn is_finite(self) -> bool {
        matches!(self, MomentOrder::Finite(_))
    }
}

impl std::fmt::Display for MomentOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentOrder::Finite(m) => write!(f, "{m}"),
            MomentOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Parameter tuple feeding the interval bound and its ball/sphere variants.
#[derive(Debug, Clone)]
pub struct BoundParams {
    /// Path smoothness order, `k >= 2`.
    pub k: u32,
    /// Number of derivatives entering the joint density, `0 <= h <= k`.
    pub h: u32,
    /// Moment order of the k-th derivative bound.
    pub m: MomentOrder,
    /// Target moment order, `p >= 1`.
    pub p: u32,
    /// Uniform bound on the joint density.
    pub c: f64,
    /// Bound on `E(|X^(k)|_inf^m)`.
    pub d_m: f64,
    /// `|I|` for intervals, the radius `a` for balls; ignored on the sphere.
    pub domain_size: f64,
    /// Free series parameter; when absent the midpoint of the window is used.
    pub alpha: Option<f64>,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), BoundsError> {
        validate_khm(self.k, self.h, self.m)?;
        if self.p < 1 {
            return Err(BoundsError::InvalidParam("p must be >= 1".into()));
        }
        if self.c.is_nan() || self.c < 0.0 {
            return Err(BoundsError::InvalidParam("C must be >= 0".into()));
        }
        if self.d_m.is_nan() || self.d_m < 0.0 {
            return Err(BoundsError::InvalidParam("D_m must be >= 0".into()));
        }
        if self.domain_size.is_nan() || self.domain_size <= 0.0 {
            return Err(BoundsError::InvalidParam("domain size must be > 0".into()));
        }
        Ok(())
    }
}

/// A certified partial sum: the true series value lies in
/// `[value, value + tail_bound]`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("no feasible p: the moment condition fails already at p = 1 for (k={k}, h={h}, m={m})")]
    NoFeasibleP { k: u32, h: u32, m: MomentOrder },
    #[error(
        "empty alpha window for (k={k}, h={h}, m={m}, p={p}): requires p/m < alpha < k - h/2 - (1+p)/(1+h), i.e. ({lo}, {hi})"
    )]
    EmptyAlphaWindow {
        k: u32,
        h: u32,
        m: MomentOrder,
        p: u32,
        lo: f64,
        hi: f64,
    },
    #[error("alpha = {alpha} outside the open window ({lo}, {hi})")]
    AlphaOutsideWindow { alpha: f64, lo: f64, hi: f64 },
    #[error("series diverges: term exponent {exponent} requires sum exponent > {needed}")]
    Divergent { exponent: f64, needed: f64 },
    #[error("series tail bound {tail:e} still above tol {tol:e} after {terms} terms")]
    Budget { tail: f64, tol: f64, terms: usize },
    #[error("explicit bound requires a finite moment order m")]
    InfiniteM,
}

fn validate_khm(k: u32, h: u32, m: MomentOrder) -> Result<(), BoundsError> {
    if k < 2 {
        return Err(BoundsError::InvalidParam("k must be >= 2".into()));
    }
    if h > k {
        return Err(BoundsError::InvalidParam("h must satisfy 0 <= h <= k".into()));
    }
    if let MomentOrder::Finite(m) = m {
        if m < 1 {
            return Err(BoundsError::InvalidParam("m must be >= 1".into()));
        }
    }
    Ok(())
}

/// Exact integer test of the moment condition for a given `p`.
///
/// Finite `m`: `p < m·((1+h)(2k−h) − 2) / (2(m+h+1))`, cross-multiplied.
/// Infinite `m` (limit form `p < (k − h/2)(h+1) − 1`): `2p + 2 < (1+h)(2k−h)`.
pub fn p_is_feasible(k: u32, h: u32, m: MomentOrder, p: u32) -> bool {
    let (k, h, p) = (k as u128, h as u128, p as u128);
    let core = (1 + h) * (2 * k - h); // always >= 2 for k >= 2, h <= k
    match m {
        MomentOrder::Finite(m) => {
            let m = m as u128;
            2 * p * (m + h + 1) < m * (core - 2)
        }
        MomentOrder::Infinite => 2 * p + 2 < core,
    }
}

/// Largest integer `p >= 1` satisfying the moment condition, or `None`.
pub fn feasible_p_max(k: u32, h: u32, m: MomentOrder) -> Result<Option<u32>, BoundsError> {
    validate_khm(k, h, m)?;
    if !p_is_feasible(k, h, m, 1) {
        return Ok(None);
    }
    // p_max is bounded by the infinite-m form, (2k-h)(1+h)/2 - 1.
    let cap = ((2 * k as u64 - h as u64) * (1 + h as u64)) / 2;
    let mut best = 1u32;
    for p in 2..=cap as u32 {
        if p_is_feasible(k, h, m, p) {
            best = p;
        } else {
            break;
        }
    }
    Ok(Some(best))
}

/// Open admissible window for the series parameter `alpha`.
///
/// Emptiness is decided in integer arithmetic (the same test as
/// [`p_is_feasible`]); the returned endpoints are the floating-point
/// `(p/m, k − h/2 − (1+p)/(1+h))`.
pub fn alpha_interval(k: u32, h: u32, m: MomentOrder, p: u32) -> Result<(f64, f64), BoundsError> {
    validate_khm(k, h, m)?;
    if p < 1 {
        return Err(BoundsError::InvalidParam("p must be >= 1".into()));
    }
    let lo = match m {
        MomentOrder::Finite(mv) => p as f64 / mv as f64,
        MomentOrder::Infinite => 0.0,
    };
    let hi = k as f64 - h as f64 / 2.0 - (1.0 + p as f64) / (1.0 + h as f64);
    if !p_is_feasible(k, h, m, p) {
        return Err(BoundsError::EmptyAlphaWindow { k, h, m, p, lo, hi });
    }
    Ok((lo, hi))
}

fn resolve_alpha(params: &BoundParams) -> Result<f64, BoundsError> {
    let (lo, hi) = alpha_interval(params.k, params.h, params.m, params.p)?;
    match params.alpha {
        Some(alpha) => {
            if alpha <= lo || alpha >= hi {
                Err(BoundsError::AlphaOutsideWindow { alpha, lo, hi })
            } else {
                Ok(alpha)
            }
        }
        None => Ok(0.5 * (lo + hi)),
    }
}

/// Certified bracket for the remainder `Σ_{a>A} (a+1)^(p-1) a^(-s)` of a
/// decreasing-term series with `s > p`.
///
/// Lower: `(x+1)^(p-1) >= x^(p-1)` and integral comparison from `A+1` give
/// `(A+1)^(p-s)/(s-p)`. Upper: `(x+1)^(p-1) <= (1+1/A)^(p-1)·x^(p-1)` for
/// `x >= A` gives `(1+1/A)^(p-1)·A^(p-s)/(s-p)`.
fn remainder_bracket(a: f64, p: f64, s: f64) -> (f64, f64) {
    let lower = (a + 1.0).powf(p - s) / (s - p);
    let upper = (1.0 + 1.0 / a).powf(p - 1.0) * a.powf(p - s) / (s - p);
    (lower, upper)
}

/// Sums `prefactor · Σ_{a>=1} (a+1)^(p-1) · a^(-s)` with an
/// integral-bracketed remainder: the reported value is the partial sum plus
/// the certified lower remainder bound, and the true series value lies in
/// `[value, value + tail_bound]` with `tail_bound` the bracket width.
/// Terms are added until `tail_bound <= tol`. Requires `s > p`, which is
/// exactly the convergence condition `s - (p-1) > 1`.
fn certified_series(prefactor: f64, p: u32, s: f64, tol: f64) -> Result<SeriesValue, BoundsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(BoundsError::InvalidParam("tol must be > 0".into()));
    }
    let pf = p as f64;
    if s <= pf {
        return Err(BoundsError::Divergent {
            exponent: -s,
            needed: pf,
        });
    }
    let mut sum = 0.0;
    let mut a = 1usize;
    loop {
        let af = a as f64;
        sum += (af + 1.0).powi(p as i32 - 1) * af.powf(-s);
        let (lower, upper) = remainder_bracket(af, pf, s);
        let tail = prefactor * (upper - lower);
        if tail <= tol {
            return Ok(SeriesValue {
                value: prefactor * (sum + lower),
                tail_bound: tail,
                terms_used: a,
            });
        }
        if a >= MAX_SERIES_TERMS {
            return Err(BoundsError::Budget {
                tail,
                tol,
                terms: a,
            });
        }
        a += 1;
    }
}

/// `E = p(k−1)^(p−1) Σ_{a>=1} (a+1)^(p−1) a^(−m·alpha)`, certified to `tol`.
pub fn series_e(alpha: f64, k: u32, m: u32, p: u32, tol: f64) -> Result<SeriesValue, BoundsError> {
    if k < 2 || m < 1 || p < 1 {
        return Err(BoundsError::InvalidParam(
            "series E requires k >= 2, m >= 1, p >= 1".into(),
        ));
    }
    let prefactor = p as f64 * ((k - 1) as f64).powi(p as i32 - 1);
    certified_series(prefactor, p, m as f64 * alpha, tol)
}

/// `D = 2^((h+1)(1+h/2−k)) / (k!·(k−h)!) Σ_{a>=1} (a+1)^(p−1) a^(1−(h+1)(k−h/2−alpha))`,
/// certified to `tol`.
pub fn series_d(alpha: f64, k: u32, h: u32, p: u32, tol: f64) -> Result<SeriesValue, BoundsError> {
    validate_khm(k, h, MomentOrder::Infinite)?;
    if p < 1 {
        return Err(BoundsError::InvalidParam("p must be >= 1".into()));
    }
    let hf = h as f64;
    let kf = k as f64;
    let prefactor =
        2f64.powf((hf + 1.0) * (1.0 + hf / 2.0 - kf)) / (factorial(k) * factorial(k - h));
    // term exponent is 1 − (h+1)(k − h/2 − alpha) = −s
    let s = (hf + 1.0) * (kf - hf / 2.0 - alpha) - 1.0;
    certified_series(prefactor, p, s, tol)
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

/// The three-term assembly shared by the interval, ball and sphere bounds.
fn assemble(params: &BoundParams, effective_length: f64, tol: f64) -> Result<f64, BoundsError> {
    params.validate()?;
    let m = match params.m {
        MomentOrder::Finite(m) => m,
        MomentOrder::Infinite => return Err(BoundsError::InfiniteM),
    };
    let alpha = resolve_alpha(params)?;
    let e = series_e(alpha, params.k, m, params.p, tol)?;
    let d = series_d(alpha, params.k, params.h, params.p, tol)?;
    let kf = (params.k - 1) as f64;
    let exponent = (params.h as f64 + 1.0) * (params.k as f64 - params.h as f64 / 2.0);
    Ok(kf.powi(params.p as i32)
        + params.d_m * (e.value + e.tail_bound)
        + params.c * effective_length.powf(exponent) * (d.value + d.tail_bound))
}

/// Upper bound on `E(N_u^p)` over an interval of length `params.domain_size`.
pub fn moment_bound_interval(params: &BoundParams, tol: f64) -> Result<f64, BoundsError> {
    assemble(params, params.domain_size, tol)
}

/// Domain of a Crofton constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CroftonDomain {
    /// Closed ball of radius `radius` in dimension `dim >= 2`.
    Ball { dim: u32, radius: f64 },
    /// Unit sphere `S^dim` embedded in dimension `dim + 1`, `dim >= 2`.
    Sphere { dim: u32 },
}

/// `c_{d−1}(a) = π^{d/2}/Γ(d/2)·a^{d−1}` for the ball; `β = π^{d/2}/Γ(d/2)`
/// for the sphere. Gamma is evaluated in closed form at (half-)integers.
pub fn crofton_constant(domain: CroftonDomain) -> Result<f64, BoundsError> {
    match domain {
        CroftonDomain::Ball { dim, radius } => {
            if dim < 2 {
                return Err(BoundsError::InvalidParam("ball dimension must be >= 2".into()));
            }
            if radius.is_nan() || radius <= 0.0 {
                return Err(BoundsError::InvalidParam("ball radius must be > 0".into()));
            }
            Ok(PI.powf(dim as f64 / 2.0) / gamma_half(dim) * radius.powi(dim as i32 - 1))
        }
        CroftonDomain::Sphere { dim } => {
            if dim < 2 {
                return Err(BoundsError::InvalidParam(
                    "sphere dimension must be >= 2".into(),
                ));
            }
            Ok(PI.powf(dim as f64 / 2.0) / gamma_half(dim))
        }
    }
}

/// `Γ(n/2)` for integer `n >= 1` by the closed forms
/// `Γ(q) = (q-1)!` and `Γ(q + 1/2) = (2q)!/(4^q q!)·√π`.
pub fn gamma_half(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        factorial(n / 2 - 1)
    } else {
        let q = (n - 1) / 2;
        factorial(2 * q) / (4f64.powi(q as i32) * factorial(q)) * PI.sqrt()
    }
}

/// Volume coefficient of the d-ball: `vol(B_r) = k_d·r^d`.
pub fn ball_volume_coeff(d: u32) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d + 2)
}

/// Surface measure of the unit sphere `S^d` in `R^{d+1}`.
pub fn sphere_surface(d: u32) -> f64 {
    2.0 * PI.powf((d as f64 + 1.0) / 2.0) / gamma_half(d + 1)
}

/// Upper bound on the p-th moment of the level-set measure on the ball `D_a`:
/// the interval bound with `|I| = 2a`, scaled by `c_{d−1}(a)^p`.
pub fn moment_bound_ball(
    params: &BoundParams,
    d: u32,
    a: f64,
    tol: f64,
) -> Result<f64, BoundsError> {
    let c = crofton_constant(CroftonDomain::Ball { dim: d, radius: a })?;
    let inner = assemble(params, 2.0 * a, tol)?;
    Ok(c.powi(params.p as i32) * inner)
}

/// Upper bound on the p-th moment of the level-curve measure on `S^d`:
/// the interval bound with `|I| = 2π`, scaled by `β_{2,d+1}^p`.
pub fn moment_bound_sphere(params: &BoundParams, d: u32, tol: f64) -> Result<f64, BoundsError> {
    let beta = crofton_constant(CroftonDomain::Sphere { dim: d })?;
    let inner = assemble(params, 2.0 * PI, tol)?;
    Ok(beta.powi(params.p as i32) * inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI2_OVER_6: f64 = 1.6449340668482264;

    #[test]
    fn feasible_p_matches_large_m_table() {
        // h = k with unbounded m reproduces p_max = k(k+1)/2 - 2.
        for k in 2..=8u32 {
            let expect = k * (k + 1) / 2 - 2;
            let got = feasible_p_max(k, k, MomentOrder::Infinite).unwrap().unwrap();
            assert_eq!(got, expect, "k = {k}");
        }
        assert_eq!(feasible_p_max(2, 2, MomentOrder::Infinite).unwrap(), Some(1));
        assert_eq!(feasible_p_max(3, 3, MomentOrder::Infinite).unwrap(), Some(4));
        assert_eq!(feasible_p_max(4, 4, MomentOrder::Infinite).unwrap(), Some(8));
    }

    #[test]
    fn feasible_p_chi_square_and_h0() {
        // h = 1, unbounded m: p_max = 2k - 3.
        assert_eq!(feasible_p_max(3, 1, MomentOrder::Infinite).unwrap(), Some(3));
        assert_eq!(feasible_p_max(5, 1, MomentOrder::Infinite).unwrap(), Some(7));
        // h = 0, m = 1: p < (k-1)/2.
        assert_eq!(feasible_p_max(5, 0, MomentOrder::Finite(1)).unwrap(), Some(1));
        // h = 0, m = 1, k = 3: p < 1, nothing feasible.
        assert_eq!(feasible_p_max(3, 0, MomentOrder::Finite(1)).unwrap(), None);
    }

    #[test]
    fn feasible_p_monotone_in_k_and_m() {
        for h in 0..=2u32 {
            for m in [1u32, 2, 5] {
                let mut prev = 0u32;
                for k in (h.max(2))..=8 {
                    let cur = feasible_p_max(k, h, MomentOrder::Finite(m))
                        .unwrap()
                        .unwrap_or(0);
                    assert!(cur >= prev, "k-monotonicity at k={k} h={h} m={m}");
                    prev = cur;
                }
            }
        }
        for k in 2..=8u32 {
            for h in 0..=k {
                let mut prev = 0u32;
                for m in 1..=12u32 {
                    let cur = feasible_p_max(k, h, MomentOrder::Finite(m))
                        .unwrap()
                        .unwrap_or(0);
                    assert!(cur >= prev, "m-monotonicity at k={k} h={h} m={m}");
                    prev = cur;
                }
                let inf = feasible_p_max(k, h, MomentOrder::Infinite)
                    .unwrap()
                    .unwrap_or(0);
                assert!(inf >= prev);
            }
        }
    }

    #[test]
    fn alpha_window_examples() {
        let (lo, hi) = alpha_interval(4, 0, MomentOrder::Finite(2), 1).unwrap();
        assert_eq!((lo, hi), (0.5, 2.0));

        match alpha_interval(4, 0, MomentOrder::Finite(2), 2) {
            Err(BoundsError::EmptyAlphaWindow { lo, hi, .. }) => {
                assert_eq!((lo, hi), (1.0, 1.0));
            }
            other => panic!("expected empty window, got {other:?}"),
        }

        let (lo, hi) = alpha_interval(3, 3, MomentOrder::Finite(1_000_000), 4).unwrap();
        assert!((lo - 4e-6).abs() < 1e-18);
        assert!((hi - 0.25).abs() < 1e-12);
    }

    #[test]
    fn alpha_window_nonempty_iff_integer_condition_on_grid() {
        for k in 2..=8u32 {
            for h in 0..=k {
                for m in [
                    MomentOrder::Finite(1),
                    MomentOrder::Finite(2),
                    MomentOrder::Finite(3),
                    MomentOrder::Finite(7),
                    MomentOrder::Infinite,
                ] {
                    for p in 1..=40u32 {
                        let feasible = p_is_feasible(k, h, m, p);
                        let window = alpha_interval(k, h, m, p);
                        assert_eq!(
                            feasible,
                            window.is_ok(),
                            "mismatch at k={k} h={h} m={m} p={p}"
                        );
                        if let Ok((lo, hi)) = window {
                            assert!(lo < hi);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn series_e_zeta2_oracle() {
        // alpha=2, k=2, m=1, p=1 is the plain zeta(2) sum.
        let sv = series_e(2.0, 2, 1, 1, 1e-6).unwrap();
        assert!(sv.tail_bound <= 1e-6);
        assert!(
            PI2_OVER_6 >= sv.value && PI2_OVER_6 <= sv.value + sv.tail_bound,
            "certification failed: {} not in [{}, {}]",
            PI2_OVER_6,
            sv.value,
            sv.value + sv.tail_bound
        );
        assert!((sv.value - PI2_OVER_6).abs() < 1e-6);
    }

    #[test]
    fn series_e_zeta3_oracle() {
        let zeta3 = 1.2020569031595943;
        let sv = series_e(3.0, 2, 1, 1, 1e-8).unwrap();
        assert!(sv.tail_bound <= 1e-8);
        assert!(zeta3 >= sv.value && zeta3 <= sv.value + sv.tail_bound);
        assert!((sv.value - zeta3).abs() < 1e-8);
    }

    #[test]
    fn series_d_prefactor_and_value() {
        // k=3, h=0, p=1, alpha=0.5: prefactor 2^-2/36 = 1/144, exponent -1.5.
        let zeta_1_5 = 2.612375348685488;
        let sv = series_d(0.5, 3, 0, 1, 1e-6).unwrap();
        let expect = zeta_1_5 / 144.0;
        assert!(expect >= sv.value && expect <= sv.value + sv.tail_bound + 1e-15);
        assert!((sv.value - 0.018142).abs() < 5e-6);
    }

    #[test]
    fn series_certified_against_bruteforce_on_random_draws() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(1234);
        let mut checked = 0;
        while checked < 100 {
            let k = rng.random_range(2..=6u32);
            let h = rng.random_range(0..=k);
            let m = rng.random_range(1..=4u32);
            let p = rng.random_range(1..=3u32);
            let window = match alpha_interval(k, h, MomentOrder::Finite(m), p) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let u: f64 = rng.random();
            let alpha = window.0 + (0.2 + 0.6 * u) * (window.1 - window.0);
            let tol = 1e-4;
            for which in 0..2 {
                let sv = if which == 0 {
                    series_e(alpha, k, m, p, tol)
                } else {
                    series_d(alpha, k, h, p, tol)
                };
                let sv = match sv {
                    Ok(sv) => sv,
                    Err(BoundsError::Budget { .. }) => continue,
                    Err(e) => panic!("unexpected error {e}"),
                };
                // Brute-force oracle: same sum with 10x the terms.
                let (prefactor, s) = if which == 0 {
                    (
                        p as f64 * ((k - 1) as f64).powi(p as i32 - 1),
                        m as f64 * alpha,
                    )
                } else {
                    let (hf, kf) = (h as f64, k as f64);
                    (
                        2f64.powf((hf + 1.0) * (1.0 + hf / 2.0 - kf))
                            / (factorial(k) * factorial(k - h)),
                        (hf + 1.0) * (kf - hf / 2.0 - alpha) - 1.0,
                    )
                };
                // Brute-force oracle with 10x the terms, bracketing its own
                // remainder by the same integral comparison so the truth is
                // pinned to a much narrower interval than the certificate.
                let terms = (sv.terms_used * 10).clamp(1000, 2_000_000);
                let mut brute = 0.0;
                for a in 1..=terms {
                    let af = a as f64;
                    brute += (af + 1.0).powi(p as i32 - 1) * af.powf(-s);
                }
                let (lo_rem, hi_rem) = super::remainder_bracket(terms as f64, p as f64, s);
                let truth_lo = prefactor * (brute + lo_rem);
                let truth_hi = prefactor * (brute + hi_rem);
                assert!(
                    truth_lo >= sv.value - 1e-12 * (1.0 + sv.value.abs()),
                    "truth bracket below certificate (k={k} h={h} m={m} p={p} alpha={alpha})"
                );
                assert!(
                    truth_hi <= sv.value + sv.tail_bound + 1e-12,
                    "truth bracket [{truth_lo}, {truth_hi}] escapes certificate [{}, {}] (k={k} h={h} m={m} p={p} alpha={alpha})",
                    sv.value,
                    sv.value + sv.tail_bound
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn series_divergent_and_budget_errors() {
        assert!(matches!(
            series_e(0.9, 2, 1, 1, 1e-6),
            Err(BoundsError::Divergent { .. })
        ));
        // Convergent but hopeless tolerance within the term budget.
        assert!(matches!(
            series_e(1.01, 2, 1, 1, 1e-12),
            Err(BoundsError::Budget { .. })
        ));
    }

    #[test]
    fn interval_bound_reduces_to_first_term() {
        // (k=3, p=2) needs h >= 1 for feasibility; with C = D_m = 0 both
        // series terms vanish and the bound is exactly (k-1)^p.
        let params = BoundParams {
            k: 3,
            h: 1,
            m: MomentOrder::Finite(3),
            p: 2,
            c: 0.0,
            d_m: 0.0,
            domain_size: 1.0,
            alpha: None,
        };
        let b = moment_bound_interval(&params, 1e-8).unwrap();
        assert_eq!(b, 4.0);
    }

    #[test]
    fn interval_bound_assembles_from_series() {
        let params = BoundParams {
            k: 3,
            h: 0,
            m: MomentOrder::Finite(1),
            p: 1,
            c: 1.0,
            d_m: 1.0,
            domain_size: 1.0,
            alpha: Some(0.5),
        };
        // (k=3, h=0, m=1, p=1) has the empty window (1, 1): infeasible p.
        assert!(matches!(
            moment_bound_interval(&params, 1e-6),
            Err(BoundsError::EmptyAlphaWindow { .. })
        ));

        // Feasible variant: m = 2 opens the window to (0.5, 1).
        let params = BoundParams {
            m: MomentOrder::Finite(2),
            alpha: Some(0.75),
            ..params
        };
        let e = series_e(0.75, 3, 2, 1, 1e-9).unwrap();
        let d = series_d(0.75, 3, 0, 1, 1e-9).unwrap();
        let b = moment_bound_interval(&params, 1e-9).unwrap();
        let expect = 2.0 + (e.value + e.tail_bound) + (d.value + d.tail_bound);
        assert!((b - expect).abs() < 1e-12);
    }

    #[test]
    fn interval_bound_linear_in_c() {
        let mk = |c: f64| BoundParams {
            k: 3,
            h: 0,
            m: MomentOrder::Finite(2),
            p: 1,
            c,
            d_m: 0.0,
            domain_size: 2.0,
            alpha: None,
        };
        let b1 = moment_bound_interval(&mk(1.0), 1e-9).unwrap();
        let b2 = moment_bound_interval(&mk(2.0), 1e-9).unwrap();
        let base = moment_bound_interval(&mk(0.0), 1e-9).unwrap();
        assert!(((b2 - base) - 2.0 * (b1 - base)).abs() < 1e-10);
    }

    #[test]
    fn crofton_constants() {
        let c = crofton_constant(CroftonDomain::Ball { dim: 2, radius: 1.0 }).unwrap();
        assert!((c - PI).abs() < 1e-14);
        let c = crofton_constant(CroftonDomain::Ball { dim: 3, radius: 1.0 }).unwrap();
        assert!((c - 2.0 * PI).abs() < 1e-13);
        let c = crofton_constant(CroftonDomain::Sphere { dim: 2 }).unwrap();
        assert!((c - PI).abs() < 1e-14);
        // Half the boundary measure of the ball: c_{d-1}(a) = H_{d-1}(S^{d-1}_a)/2.
        for d in 2..=6u32 {
            let a = 1.7;
            let c = crofton_constant(CroftonDomain::Ball { dim: d, radius: a }).unwrap();
            let boundary = sphere_surface(d - 1) * a.powi(d as i32 - 1);
            assert!((c - boundary / 2.0).abs() < 1e-10 * boundary);
        }
    }

    #[test]
    fn ball_and_sphere_bounds_scale_the_interval_bound() {
        let params = BoundParams {
            k: 3,
            h: 0,
            m: MomentOrder::Finite(2),
            p: 1,
            c: 0.7,
            d_m: 1.3,
            domain_size: 2.0, // |I| = 2a with a = 1
            alpha: Some(0.75),
        };
        let interval = moment_bound_interval(&params, 1e-9).unwrap();
        let ball = moment_bound_ball(&params, 2, 1.0, 1e-9).unwrap();
        let c = crofton_constant(CroftonDomain::Ball { dim: 2, radius: 1.0 }).unwrap();
        assert!((ball - c * interval).abs() < 1e-10 * ball);

        let params_sphere = BoundParams {
            domain_size: 2.0 * PI,
            ..params.clone()
        };
        let interval = moment_bound_interval(&params_sphere, 1e-9).unwrap();
        let sphere = moment_bound_sphere(&params_sphere, 2, 1e-9).unwrap();
        assert!((sphere - PI * interval).abs() < 1e-10 * sphere);
    }

    #[test]
    fn ball_bound_trivial_cases() {
        let params = BoundParams {
            k: 3,
            h: 1,
            m: MomentOrder::Finite(3),
            p: 2,
            c: 0.0,
            d_m: 0.0,
            domain_size: 1.0,
            alpha: None,
        };
        let b = moment_bound_ball(&params, 2, 1.0, 1e-8).unwrap();
        assert!((b - PI * PI * 4.0).abs() < 1e-12);

        let params = BoundParams {
            k: 2,
            p: 1,
            ..params
        };
        let b = moment_bound_ball(&params, 3, 1.0, 1e-8).unwrap();
        assert!((b - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn infinite_m_rejected_for_explicit_bound() {
        let params = BoundParams {
            k: 3,
            h: 3,
            m: MomentOrder::Infinite,
            p: 2,
            c: 1.0,
            d_m: 1.0,
            domain_size: 1.0,
            alpha: None,
        };
        assert!(matches!(
            moment_bound_interval(&params, 1e-6),
            Err(BoundsError::InfiniteM)
        ));
    }
}
