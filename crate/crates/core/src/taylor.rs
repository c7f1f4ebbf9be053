//! Truncated Taylor-series arithmetic.
//!
//! A series is a coefficient vector `c` with `c[j] = f^(j)(x0)/j!`. Composing
//! elementary operations on these vectors yields exact derivatives of
//! composite functions (kernel restrictions to lines, the mollifier, geodesic
//! distances) without symbolic differentiation or finite differences.

/// Series of the constant function.
pub fn constant(value: f64, order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order + 1];
    c[0] = value;
    c
}

/// Cauchy product truncated at `order`.
pub fn mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order + 1];
    for i in 0..=order.min(a.len() - 1) {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..=(order - i).min(b.len() - 1) {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

pub fn add(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order + 1];
    for (i, ci) in c.iter_mut().enumerate() {
        *ci = a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0);
    }
    c
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Series of `exp(a)`. Uses the recurrence `n·b_n = Σ_{k=1..n} k·a_k·b_{n−k}`.
pub fn exp(a: &[f64], order: usize) -> Vec<f64> {
    let mut b = vec![0.0; order + 1];
    b[0] = a[0].exp();
    for n in 1..=order {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += k as f64 * a[k] * b[n - k];
        }
        b[n] = acc / n as f64;
    }
    b
}

/// Series of `1/a`; requires `a[0] != 0`.
pub fn recip(a: &[f64], order: usize) -> Vec<f64> {
    let mut b = vec![0.0; order + 1];
    b[0] = 1.0 / a[0];
    for n in 1..=order {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += a[k] * b[n - k];
        }
        b[n] = -acc / a[0];
    }
    b
}

/// Series of `a^q` for integer `q >= 1` by repeated squaring.
pub fn powi(a: &[f64], q: u32, order: usize) -> Vec<f64> {
    let mut result = constant(1.0, order);
    let mut base = a.to_vec();
    let mut q = q;
    while q > 0 {
        if q & 1 == 1 {
            result = mul(&result, &base, order);
        }
        q >>= 1;
        if q > 0 {
            base = mul(&base, &base, order);
        }
    }
    result
}

/// Series of `a^alpha` for real `alpha`; requires `a[0] > 0`.
///
/// Recurrence: `n·a_0·b_n = Σ_{k=1..n} (k(alpha+1) − n)·a_k·b_{n−k}`.
pub fn pow_real(a: &[f64], alpha: f64, order: usize) -> Vec<f64> {
    let mut b = vec![0.0; order + 1];
    b[0] = a[0].powf(alpha);
    for n in 1..=order {
        let mut acc = 0.0;
        for k in 1..=n.min(a.len() - 1) {
            acc += (k as f64 * (alpha + 1.0) - n as f64) * a[k] * b[n - k];
        }
        b[n] = acc / (n as f64 * a[0]);
    }
    b
}

/// Term-by-term antiderivative with constant term `f0`.
pub fn integrate(d: &[f64], f0: f64, order: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(order + 1);
    c.push(f0);
    for n in 1..=order {
        c.push(d.get(n - 1).copied().unwrap_or(0.0) / n as f64);
    }
    c
}

/// Converts Taylor coefficients to derivative values `f^(j)(x0) = c_j·j!`.
pub fn derivatives(c: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len());
    let mut fact = 1.0;
    for (j, cj) in c.iter().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        out.push(cj * fact);
    }
    out
}

/// Series of `cos(w0 + z)` scaled: coefficients of `z ↦ A·cos(omega·z + phase)`.
pub fn cos_affine(amplitude: f64, omega: f64, phase: f64, order: usize) -> Vec<f64> {
    let mut c = vec![0.0; order + 1];
    let mut fact = 1.0;
    let mut pow = 1.0;
    for (j, cj) in c.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
            pow *= omega;
        }
        // d^j/dz^j cos(omega z + phase) = omega^j cos(omega z + phase + j pi/2)
        *cj = amplitude * pow * (phase + j as f64 * std::f64::consts::FRAC_PI_2).cos() / fact;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{x} vs {y}");
        }
    }

    #[test]
    fn exp_of_quadratic_matches_gaussian_derivatives() {
        // f(z) = exp(-(z0 + z)^2) at z0 = 0.7; compare against the Hermite
        // recursion f^(j+1) = -2 z f^(j) - 2 j f^(j-1).
        let z0 = 0.7;
        let order = 8;
        let w = vec![z0 * z0, 2.0 * z0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let series = exp(&scale(&w, -1.0), order);
        let got = derivatives(&series);

        let mut expect = vec![0.0; order + 1];
        expect[0] = (-z0 * z0).exp();
        expect[1] = -2.0 * z0 * expect[0];
        for j in 1..order {
            expect[j + 1] = -2.0 * z0 * expect[j] - 2.0 * j as f64 * expect[j - 1];
        }
        assert_close(&got, &expect, 1e-12);
    }

    #[test]
    fn recip_times_original_is_one() {
        let a = vec![2.0, -1.0, 0.5, 0.25, -0.125];
        let inv = recip(&a, 4);
        let prod = mul(&a, &inv, 4);
        assert!((prod[0] - 1.0).abs() < 1e-14);
        for c in &prod[1..] {
            assert!(c.abs() < 1e-13);
        }
    }

    #[test]
    fn pow_real_matches_powi_for_integer_exponent() {
        let a = vec![1.5, 0.3, -0.2, 0.1];
        let via_real = pow_real(&a, 3.0, 6);
        let via_int = powi(&a, 3, 6);
        assert_close(&via_real, &via_int, 1e-12);
    }

    #[test]
    fn integrate_inverts_differentiation() {
        // d/dz of cos series, then integrate back.
        let c = cos_affine(2.0, 3.0, 0.4, 6);
        let d: Vec<f64> = (1..c.len()).map(|n| c[n] * n as f64).collect();
        let back = integrate(&d, c[0], 6);
        assert_close(&back, &c, 1e-14);
    }
}
