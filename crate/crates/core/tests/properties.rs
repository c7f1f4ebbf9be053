//! Property tests over randomized inputs.

use proptest::prelude::*;

use levelcross::bounds::{alpha_interval, p_is_feasible, MomentOrder};
use levelcross::crossings::count_crossings;
use levelcross::simulate::trajectory::{PolynomialTrajectory, Trajectory};
use levelcross::taylor;

/// Negation of a trajectory, exposing the same two orders.
struct Negated<'a>(&'a PolynomialTrajectory);
impl Trajectory for Negated<'_> {
    fn max_order(&self) -> u32 {
        self.0.max_order()
    }
    fn eval(&self, order: u32, t: f64) -> f64 {
        -self.0.eval(order, t)
    }
}

proptest! {
    /// count(X, u) = count(−X, −u) for polynomial paths with scattered roots.
    #[test]
    fn crossing_count_negation_symmetry(
        roots in prop::collection::vec(-1.5f64..1.5, 1..5),
        leading in 0.2f64..3.0,
        u in -0.5f64..0.5,
    ) {
        let path = PolynomialTrajectory::from_roots(leading, &roots);
        let a = count_crossings(&path, (-2.0, 2.0), u, 0.01, 1e-10);
        let b = count_crossings(&Negated(&path), (-2.0, 2.0), -u, 0.01, 1e-10);
        prop_assert_eq!(a.count, b.count);
    }

    /// The float alpha window is nonempty exactly when the integer moment
    /// condition holds.
    #[test]
    fn alpha_window_agrees_with_integer_feasibility(
        k in 2u32..12,
        h_frac in 0.0f64..1.0,
        m in 1u32..40,
        p in 1u32..60,
    ) {
        let h = (h_frac * k as f64).floor() as u32;
        let m = MomentOrder::Finite(m);
        let feasible = p_is_feasible(k, h, m, p);
        let window = alpha_interval(k, h, m, p);
        prop_assert_eq!(feasible, window.is_ok());
        if let Ok((lo, hi)) = window {
            prop_assert!(lo < hi);
        }
    }

    /// Series-exp of a quadratic agrees with pointwise exponentiation on a
    /// neighborhood of the expansion point.
    #[test]
    fn taylor_exp_of_quadratic_matches_pointwise(
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        c2 in -1.0f64..1.0,
        dz in -0.2f64..0.2,
    ) {
        let series = taylor::exp(&[c0, c1, c2], 12);
        let horner: f64 = series.iter().rev().fold(0.0, |acc, c| acc * dz + c);
        let direct = (c0 + c1 * dz + c2 * dz * dz).exp();
        prop_assert!((horner - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    /// Refined roots really bracket sign changes and stay sorted.
    #[test]
    fn refined_roots_sorted_and_on_the_level(
        roots in prop::collection::vec(-1.3f64..1.3, 2..5),
        leading in 0.5f64..2.0,
    ) {
        let path = PolynomialTrajectory::from_roots(leading, &roots);
        let cc = count_crossings(&path, (-2.0, 2.0), 0.0, 0.005, 1e-11);
        for w in cc.refined_roots.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
        for r in &cc.refined_roots {
            prop_assert!(path.eval(0, *r).abs() < 1e-6, "value {} at {}", path.eval(0, *r), r);
        }
    }
}
