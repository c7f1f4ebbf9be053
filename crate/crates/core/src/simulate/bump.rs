//! The compactly supported mollifier `Ψ(x) = c·exp(−1/(1−x²))` on `(−1, 1)`.

use crate::taylor;

/// Normalizing constant: `1/∫_{-1}^{1} exp(−1/(1−x²)) dx`.
/// Frozen from a high-resolution quadrature (the density is analytic inside
/// the support and vanishes to all orders at ±1).
pub const BUMP_NORM: f64 = 1.0 / 0.443_993_816_168_385_6;

/// `Ψ^(j)(x)` for `j <= order`, via series arithmetic on
/// `−1/(1−x²)` composed with `exp`; identically zero outside `(−1, 1)`.
pub fn bump_derivatives(x: f64, order: usize) -> Vec<f64> {
    if x.abs() >= 1.0 {
        return vec![0.0; order + 1];
    }
    // u(z) = 1 − (x+z)² as a quadratic series
    let u = [1.0 - x * x, -2.0 * x, -1.0];
    let r = taylor::recip(&u, order);
    let arg = taylor::scale(&r, -1.0);
    let series = taylor::exp(&arg, order);
    taylor::derivatives(&taylor::scale(&series, BUMP_NORM))
}

/// `Ψ(x)`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        BUMP_NORM * (-1.0 / (1.0 - x * x)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_integral() {
        let n = 2_000_000;
        let step = 2.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * step;
            acc += bump(x) * step;
        }
        assert!((acc - 1.0).abs() < 1e-12, "integral {acc}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &x in &[-0.7, -0.2, 0.0, 0.4, 0.85] {
            let d = bump_derivatives(x, 3);
            assert!((d[0] - bump(x)).abs() < 1e-14);
            let h = 1e-6;
            let fd1 = (bump(x + h) - bump(x - h)) / (2.0 * h);
            assert!((d[1] - fd1).abs() < 1e-5 * (1.0 + fd1.abs()), "x={x}");
            let fd2 = (bump(x + h) - 2.0 * bump(x) + bump(x - h)) / (h * h);
            assert!((d[2] - fd2).abs() < 2e-3 * (1.0 + fd2.abs()), "x={x}");
        }
    }

    #[test]
    fn vanishes_flat_at_support_boundary() {
        let d = bump_derivatives(0.999, 4);
        for v in &d {
            assert!(v.abs() < 1e-100);
        }
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
    }
}
