//! Centralized approximation: LP relaxation, randomized rounding,
//! constraint repair and coverage fix, plus the exact oracle and the
//! probability bound of the rounding.

mod exhaustive;
mod rounding;

pub use exhaustive::{
    exhaustive_opt, exhaustive_opt_with, feasible_sets, min_frame_length, ExactOptimum,
    ExhaustiveLimits,
};
pub use rounding::{
    app_schedule, app_schedule_from, coverage_fix, randomized_round, repair, CoverageFix,
    RoundingOutcome,
};

use crate::error::{domain, Result};

/// Lower bound on the probability that the rounded schedule is within
/// `1 - theta` of the optimum: `1 - exp(-(theta + dA/A)^2 * A / 2)`.
///
/// Requires `0 < theta < 1`, `-theta < delta_ratio < 1 - theta`, `a_hat > 0`.
pub fn theorem1_bound(theta: f64, delta_ratio: f64, a_hat: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(delta_ratio > -theta && delta_ratio < 1.0 - theta) {
        return Err(domain(format!(
            "delta ratio {delta_ratio} outside (-theta, 1 - theta) for theta = {theta}"
        )));
    }
    if !(a_hat > 0.0 && a_hat.is_finite()) {
        return Err(domain(format!(
            "LP throughput must be positive, got {a_hat}"
        )));
    }
    let s = theta + delta_ratio;
    Ok(-(-s * s * a_hat / 2.0).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_reference_value() {
        let b = theorem1_bound(0.5, 0.0, 20.0).unwrap();
        assert!((b - (1.0 - (-2.5f64).exp())).abs() < 1e-12);
        assert!((b - 0.917_915).abs() < 1e-6);
    }

    #[test]
    fn bound_vanishes_with_theta() {
        let b = theorem1_bound(1e-9, 0.0, 20.0).unwrap();
        assert!(b < 1e-15);
    }

    #[test]
    fn bound_grows_with_lp_value() {
        let mut prev = 0.0;
        for a in [1.0, 2.0, 5.0, 10.0, 40.0] {
            let b = theorem1_bound(0.3, 0.1, a).unwrap();
            assert!(b > prev && b < 1.0);
            prev = b;
        }
    }

    #[test]
    fn bound_rejects_bad_arguments() {
        assert!(theorem1_bound(0.0, 0.0, 1.0).is_err());
        assert!(theorem1_bound(1.0, 0.0, 1.0).is_err());
        assert!(theorem1_bound(0.5, -0.5, 1.0).is_err());
        assert!(theorem1_bound(0.5, 0.5, 1.0).is_err());
        assert!(theorem1_bound(0.5, 0.0, 0.0).is_err());
    }
}
