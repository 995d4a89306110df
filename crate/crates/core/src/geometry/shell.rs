use serde::Serialize;

use crate::analytic::{predictability, ConcurrenceSextet, Family};
use crate::angle::MixingAngle;

/// Observed range of Σ C² along a trajectory against the shell limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellBounds {
    pub family: Family,
    pub alpha: MixingAngle,
    pub lower: f64,
    pub upper: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub argmin_gt: f64,
    pub argmax_gt: f64,
    pub tolerance: f64,
    pub contained: bool,
}

impl ShellBounds {
    pub fn upper_gap(&self) -> f64 {
        self.upper - self.observed_max
    }

    pub fn lower_gap(&self) -> f64 {
        self.observed_min - self.lower
    }
}

/// (lower, upper) limits of Σ C².
///
/// ψ: C₀² ≤ Σ ≤ 1 + C₀²/2. φ: 0 ≤ Σ ≤ 1 + C₀²/2 ± P₀, with + below π/4.
pub fn shell_limits(family: Family, alpha: &MixingAngle) -> (f64, f64) {
    let c0 = alpha.c0();
    let base = 1.0 + c0 * c0 / 2.0;
    match family {
        Family::Psi => (c0 * c0, base),
        Family::Phi => {
            let p = predictability(family, alpha);
            (0.0, base + p.sign * p.p0)
        }
    }
}

pub fn shell_bounds(trace: &[ConcurrenceSextet], family: Family, alpha: &MixingAngle, tolerance: f64) -> ShellBounds {
    let (lower, upper) = shell_limits(family, alpha);
    let mut min = (f64::INFINITY, 0.0);
    let mut max = (f64::NEG_INFINITY, 0.0);
    for s in trace {
        let sum = s.sum_of_squares();
        if sum < min.0 {
            min = (sum, s.gt);
        }
        if sum > max.0 {
            max = (sum, s.gt);
        }
    }
    let contained = !trace.is_empty() && min.0 >= lower - tolerance && max.0 <= upper + tolerance;
    ShellBounds {
        family,
        alpha: *alpha,
        lower,
        upper,
        observed_min: min.0,
        observed_max: max.0,
        argmin_gt: min.1,
        argmax_gt: max.1,
        tolerance,
        contained,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::concurrences;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    fn trace(family: Family, alpha: &MixingAngle, n: usize) -> Vec<ConcurrenceSextet> {
        (0..n)
            .map(|j| concurrences(family, alpha, j as f64 * TAU / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn psi_bounds_attained_at_quarter_pi() {
        let alpha = MixingAngle::quarter_pi();
        let b = shell_bounds(&trace(Family::Psi, &alpha, 257), Family::Psi, &alpha, 1e-12);
        assert!(b.contained);
        assert_eq!(b.upper, 1.5);
        assert!(b.upper_gap().abs() <= 1e-12);
        assert!((b.argmax_gt - FRAC_PI_4).abs() < 1e-15);
        assert!(b.lower_gap().abs() <= 1e-12);
        assert_eq!(b.argmin_gt, 0.0);
    }

    #[test]
    fn psi_lower_bound_at_pi_over_six() {
        let alpha = MixingAngle::from_radians(PI / 6.0);
        let b = shell_bounds(&trace(Family::Psi, &alpha, 257), Family::Psi, &alpha, 1e-12);
        assert!((b.observed_min - 0.75).abs() <= 1e-12);
    }

    #[test]
    fn phi_bound_at_pi_over_six() {
        let alpha = MixingAngle::from_radians(PI / 6.0);
        let (_, upper) = shell_limits(Family::Phi, &alpha);
        assert!((upper - 1.875).abs() < 1e-15);
        let b = shell_bounds(&trace(Family::Phi, &alpha, 1025), Family::Phi, &alpha, 1e-9);
        assert!(b.contained);
    }

    #[test]
    fn phi_branch_switches_at_quarter_pi() {
        let (_, below) = shell_limits(Family::Phi, &MixingAngle::from_radians(0.5));
        let (_, above) = shell_limits(Family::Phi, &MixingAngle::from_radians(1.0));
        let c0 = (1.0f64).sin();
        assert!((below - (1.0 + c0 * c0 / 2.0 + (1.0f64).cos())).abs() < 1e-15);
        let c0 = (2.0f64).sin();
        assert!((above - (1.0 + c0 * c0 / 2.0 + (2.0f64).cos())).abs() < 1e-15);
    }

    #[test]
    fn violation_is_detected() {
        let alpha = MixingAngle::quarter_pi();
        let mut t = trace(Family::Psi, &alpha, 33);
        t[3].atoms = 2.0;
        assert!(!shell_bounds(&t, Family::Psi, &alpha, 1e-12).contained);
    }
}
