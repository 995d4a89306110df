use serde::Serialize;

use crate::analytic::{phi_unclamped, ConcurrenceSextet, Family};
use crate::angle::MixingAngle;
use crate::entanglement::QubitPair;

/// A sample is dead when the unclamped closed form is below −DEATH_THRESHOLD.
/// Isolated touches of zero are not deaths.
pub const DEATH_THRESHOLD: f64 = 1e-14;

const BISECTION_STEPS: usize = 200;

/// An interval opening this close to the first sample counts as initially dead.
/// A quadratic onset at zero pushes the detected edge out to about √DEATH_THRESHOLD.
const EDGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroInterval {
    pub start: f64,
    pub end: f64,
}

impl ZeroInterval {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, gt: f64) -> bool {
        self.start < gt && gt < self.end
    }
}

/// Intervals of gt on which a pair's concurrence is identically zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeathReport {
    pub pair: QubitPair,
    pub family: Family,
    pub alpha: MixingAngle,
    pub intervals: Vec<ZeroInterval>,
    /// Start of the first zero interval that begins after the initial instant.
    pub death_time: Option<f64>,
    /// End of that interval.
    pub birth_time: Option<f64>,
}

impl DeathReport {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// End of the first zero interval, including one that starts at gt = 0.
    pub fn first_birth(&self) -> Option<f64> {
        self.intervals.first().map(|iv| iv.end)
    }

    pub fn starts_dead(&self, gt0: f64) -> bool {
        self.intervals.first().is_some_and(|iv| iv.start <= gt0 + EDGE_TOL)
    }
}

fn unclamped(family: Family, alpha: &MixingAngle, slot: usize, gt: f64) -> f64 {
    match family {
        // the ψ closed forms carry no clamp
        Family::Psi => 1.0,
        Family::Phi => phi_unclamped(alpha, gt)[slot],
    }
}

/// Refines a dead/alive transition between `lo` and `hi`, where `dead(lo)`
/// differs from `dead(hi)`.
fn bisect(mut lo: f64, mut hi: f64, dead: impl Fn(f64) -> bool) -> f64 {
    let lo_dead = dead(lo);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dead(mid) == lo_dead {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zero intervals of `pair` over the sampled phases `gts` (ascending).
///
/// Transitions are bracketed on the samples and refined by bisection on the
/// sign of the unclamped closed form, so the samples must be dense enough
/// not to skip a whole interval.
pub fn detect_death_birth(family: Family, alpha: &MixingAngle, pair: QubitPair, gts: &[f64]) -> DeathReport {
    let slot = pair.position();
    let dead = |gt: f64| unclamped(family, alpha, slot, gt) < -DEATH_THRESHOLD;
    let mut intervals = Vec::new();
    let mut open: Option<f64> = None;
    let mut prev: Option<(f64, bool)> = None;
    for &gt in gts {
        let d = dead(gt);
        match prev {
            None if d => open = Some(gt),
            Some((pgt, pd)) if pd != d => {
                let edge = bisect(pgt, gt, dead);
                if d {
                    open = Some(edge);
                } else if let Some(start) = open.take() {
                    intervals.push(ZeroInterval { start, end: edge });
                }
            }
            _ => {}
        }
        prev = Some((gt, d));
    }
    if let (Some(start), Some((last, _))) = (open, prev) {
        intervals.push(ZeroInterval { start, end: last });
    }
    let first = gts.first().copied().unwrap_or(0.0);
    let genuine = intervals.iter().find(|iv| iv.start > first + EDGE_TOL);
    DeathReport {
        pair,
        family,
        alpha: *alpha,
        death_time: genuine.map(|iv| iv.start),
        birth_time: genuine.map(|iv| iv.end),
        intervals,
    }
}

/// Same as [`detect_death_birth`] but sampled on the phases of a trace.
pub fn death_report(trace: &[ConcurrenceSextet], pair: QubitPair) -> Option<DeathReport> {
    let first = trace.first()?;
    let gts: Vec<f64> = trace.iter().map(|s| s.gt).collect();
    Some(detect_death_birth(first.family, &first.alpha, pair, &gts))
}

/// Intervals on which every report's pair is dead at once.
pub fn common_death_window(reports: &[DeathReport]) -> Vec<ZeroInterval> {
    let mut acc: Option<Vec<ZeroInterval>> = None;
    for report in reports {
        acc = Some(match acc {
            None => report.intervals.clone(),
            Some(current) => {
                let mut out = Vec::new();
                for a in &current {
                    for b in &report.intervals {
                        let start = a.start.max(b.start);
                        let end = a.end.min(b.end);
                        if end > start {
                            out.push(ZeroInterval { start, end });
                        }
                    }
                }
                out
            }
        });
    }
    acc.unwrap_or_default()
}

/// Bisects α in `[lo, hi]` for the angle at which the death of C_AB and
/// the birth of C_ab happen at the same phase. Below it C_AB dies first.
pub fn locate_death_birth_coincidence(lo: f64, hi: f64, gts: &[f64], tol: f64) -> Option<f64> {
    let gap = |a: f64| -> Option<f64> {
        let alpha = MixingAngle::from_radians(a);
        let death = detect_death_birth(Family::Phi, &alpha, QubitPair::ATOMS, gts).death_time?;
        let birth = detect_death_birth(Family::Phi, &alpha, QubitPair::CAVITIES, gts).first_birth()?;
        Some(death - birth)
    };
    let (mut lo, mut hi) = (lo, hi);
    let (glo, ghi) = (gap(lo)?, gap(hi)?);
    if glo.signum() == ghi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::phi_concurrences;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize, max: f64) -> Vec<f64> {
        (0..n).map(|j| j as f64 * max / (n - 1) as f64).collect()
    }

    #[test]
    fn window_at_pi_over_nine() {
        let alpha = MixingAngle::from_radians(PI / 9.0);
        let gts = grid(2049, TAU);
        let reports: Vec<DeathReport> = [QubitPair::ATOMS, QubitPair::CAVITIES, QubitPair::CROSS_AB, QubitPair::CROSS_BA]
            .into_iter()
            .map(|p| detect_death_birth(Family::Phi, &alpha, p, &gts))
            .collect();
        let window = common_death_window(&reports);
        let t = alpha.tan().sqrt();
        let expected = t.acos() - t.asin();
        assert!((expected - 0.275533).abs() < 1e-6);
        assert!((window[0].length() - expected).abs() <= 1e-12, "{window:?}");
        assert!((window[0].start - t.asin()).abs() <= 1e-12);
        // two windows per half period
        assert_eq!(window.len(), 4);
        for iv in &window {
            let c = phi_concurrences(&alpha, 0.5 * (iv.start + iv.end));
            assert_eq!([c.atoms, c.cavities, c.cross_ab, c.cross_ba], [0.0; 4]);
            assert!(c.arm_a > 0.0);
        }
    }

    #[test]
    fn no_death_above_quarter_pi() {
        let alpha = MixingAngle::from_radians(3.0 * PI / 10.0);
        let gts = grid(1025, TAU);
        for pair in QubitPair::ALL {
            let r = detect_death_birth(Family::Phi, &alpha, pair, &gts);
            assert!(r.is_empty(), "{pair} {r:?}");
            assert_eq!(r.death_time, None);
        }
    }

    #[test]
    fn psi_family_never_dies() {
        let gts = grid(513, TAU);
        let r = detect_death_birth(Family::Psi, &MixingAngle::from_radians(0.2), QubitPair::ATOMS, &gts);
        assert!(r.is_empty());
    }

    #[test]
    fn threshold_angle_death_meets_birth() {
        let alpha = MixingAngle::atan_half();
        let gts = grid(1025, TAU);
        let ab = detect_death_birth(Family::Phi, &alpha, QubitPair::ATOMS, &gts);
        let cav = detect_death_birth(Family::Phi, &alpha, QubitPair::CAVITIES, &gts);
        assert!(cav.starts_dead(0.0));
        let death = ab.death_time.unwrap();
        let birth = cav.first_birth().unwrap();
        assert!((death - birth).abs() <= 1e-8, "{death} {birth}");
        assert!((death - PI / 4.0).abs() <= 1e-8);
    }

    #[test]
    fn coincidence_is_located() {
        let gts = grid(1025, PI);
        let a0 = locate_death_birth_coincidence(PI / 12.0, PI / 5.0, &gts, 1e-10).unwrap();
        assert!((a0 - 0.5f64.atan()).abs() <= 1e-6, "{a0}");
    }

    #[test]
    fn interval_intersection() {
        let mk = |v: &[(f64, f64)]| DeathReport {
            pair: QubitPair::ATOMS,
            family: Family::Phi,
            alpha: MixingAngle::zero(),
            intervals: v.iter().map(|&(start, end)| ZeroInterval { start, end }).collect(),
            death_time: None,
            birth_time: None,
        };
        let w = common_death_window(&[mk(&[(0.0, 2.0), (3.0, 5.0)]), mk(&[(1.0, 4.0)])]);
        assert_eq!(w, vec![ZeroInterval { start: 1.0, end: 2.0 }, ZeroInterval { start: 3.0, end: 4.0 }]);
        assert!(common_death_window(&[]).is_empty());
    }
}
