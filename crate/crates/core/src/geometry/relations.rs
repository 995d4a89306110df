use super::{Accumulator, RelationCheck, LINE_TOL, RELATION_TOL};
use crate::analytic::{phi_unclamped, ConcurrenceSextet, Family};
use crate::angle::MixingAngle;

/// A clamped concurrence takes part in a relation only where its unclamped
/// closed form exceeds this value.
pub const MASK_THRESHOLD: f64 = 1e-9;

/// Denominators below this make a relation undefined.
const DEGENERATE: f64 = 1e-12;

// sextet slots
const AB: usize = 0;
const AB_LOWER: usize = 1;
const AA: usize = 2;
const BB: usize = 3;
const CROSS: usize = 4;
const CROSS_T: usize = 5;

type Residual<'a> = Box<dyn Fn(&[f64; 6]) -> f64 + 'a>;

struct Relation<'a> {
    id: &'static str,
    tolerance: f64,
    degenerate: bool,
    /// Slots whose clamp must be inactive (φ family only).
    clamped: &'a [usize],
    residual: Residual<'a>,
}

fn run(
    relations: Vec<Relation<'_>>,
    trace: &[ConcurrenceSextet],
    alpha: &MixingAngle,
    masked: bool,
    tol_override: Option<f64>,
) -> Vec<RelationCheck> {
    let unclamped: Vec<Option<[f64; 6]>> = trace
        .iter()
        .map(|s| masked.then(|| phi_unclamped(alpha, s.gt)))
        .collect();
    let mut out: Vec<RelationCheck> = relations
        .into_iter()
        .map(|rel| {
            let tol = tol_override.unwrap_or(rel.tolerance);
            if rel.degenerate {
                return RelationCheck::skipped(rel.id, tol, trace.len());
            }
            let mut acc = Accumulator::new(rel.id, tol);
            for (s, raw) in trace.iter().zip(&unclamped) {
                let live = match raw {
                    Some(raw) => rel.clamped.iter().all(|&k| raw[k] > MASK_THRESHOLD),
                    None => true,
                };
                if live {
                    acc.push(s.gt, (rel.residual)(&s.values()));
                } else {
                    acc.skip();
                }
            }
            acc.finish()
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

fn max2(f: impl Fn(usize) -> f64, a: usize, b: usize) -> f64 {
    f(a).abs().max(f(b).abs())
}

/// Residuals of the ψ-family relations along a trajectory at fixed α.
///
/// Relations written for "AB(ab)" or "Ab(aB)" are checked with both
/// choices and report the larger residual.
pub fn psi_relation_residuals(
    trace: &[ConcurrenceSextet],
    alpha: &MixingAngle,
    tol_override: Option<f64>,
) -> Vec<RelationCheck> {
    let c0 = alpha.c0();
    let cs = alpha.cos_sq();
    let ss = alpha.sin_sq();
    let half = c0 / 2.0;
    let ellipse = move |x: f64, y: f64, y_scale: f64| {
        (x - half) * (x - half) / (half * half) + y * y / (y_scale * y_scale) - 1.0
    };
    let relations = vec![
        Relation {
            id: "psi.sum_line",
            tolerance: LINE_TOL,
            degenerate: false,
            clamped: &[],
            residual: Box::new(move |v| v[AB] + v[AB_LOWER] - c0),
        },
        Relation {
            id: "psi.cross_symmetry",
            tolerance: LINE_TOL,
            degenerate: false,
            clamped: &[],
            residual: Box::new(|v| v[CROSS] - v[CROSS_T]),
        },
        Relation {
            id: "psi.ratio_line",
            tolerance: LINE_TOL,
            degenerate: ss < DEGENERATE,
            clamped: &[],
            residual: Box::new(move |v| v[AA] * ss - v[BB] * cs),
        },
        Relation {
            id: "psi.ellipse_bb",
            tolerance: RELATION_TOL,
            degenerate: c0 < DEGENERATE || ss < DEGENERATE,
            clamped: &[],
            residual: Box::new(move |v| max2(|k| ellipse(v[k], v[BB], ss), AB, AB_LOWER)),
        },
        Relation {
            id: "psi.ellipse_aa",
            tolerance: RELATION_TOL,
            degenerate: c0 < DEGENERATE || cs < DEGENERATE,
            clamped: &[],
            residual: Box::new(move |v| max2(|k| ellipse(v[k], v[AA], cs), AB, AB_LOWER)),
        },
        Relation {
            id: "psi.circle",
            tolerance: RELATION_TOL,
            degenerate: false,
            clamped: &[],
            residual: Box::new(move |v| {
                let mut worst: f64 = 0.0;
                for x in [v[AB], v[AB_LOWER]] {
                    for z in [v[CROSS], v[CROSS_T]] {
                        worst = worst.max(((x - half) * (x - half) + z * z - half * half).abs());
                    }
                }
                worst
            }),
        },
        Relation {
            id: "psi.slope_aa",
            tolerance: RELATION_TOL,
            degenerate: cs < DEGENERATE,
            clamped: &[],
            residual: Box::new(move |v| max2(|k| v[k] - c0 / (2.0 * cs) * v[AA], CROSS_T, CROSS)),
        },
        Relation {
            id: "psi.slope_bb",
            tolerance: RELATION_TOL,
            degenerate: ss < DEGENERATE,
            clamped: &[],
            residual: Box::new(move |v| max2(|k| v[k] - c0 / (2.0 * ss) * v[BB], CROSS, CROSS_T)),
        },
        Relation {
            id: "psi.limit_semicircle",
            tolerance: LINE_TOL,
            degenerate: false,
            clamped: &[],
            // only an excess over C₀² counts
            residual: Box::new(move |v| {
                let mut worst: f64 = 0.0;
                for x in [v[AB], v[AB_LOWER]] {
                    for z in [v[CROSS_T], v[CROSS]] {
                        worst = worst.max(x * x + z * z - c0 * c0);
                    }
                }
                worst
            }),
        },
    ];
    run(relations, trace, alpha, false, tol_override)
}

/// Residuals of the φ-family relations, evaluated only where every clamped
/// concurrence taking part has an unclamped value above [`MASK_THRESHOLD`].
pub fn phi_relation_residuals(
    trace: &[ConcurrenceSextet],
    alpha: &MixingAngle,
    tol_override: Option<f64>,
) -> Vec<RelationCheck> {
    let c0 = alpha.c0();
    let k = alpha.cos_sq();
    let flat = c0 < DEGENERATE || k < DEGENERATE;
    let relations = vec![
        Relation {
            id: "phi.arm_symmetry",
            tolerance: LINE_TOL,
            degenerate: false,
            clamped: &[],
            residual: Box::new(|v| v[AA] - v[BB]),
        },
        Relation {
            id: "phi.cross_symmetry",
            tolerance: LINE_TOL,
            degenerate: false,
            clamped: &[],
            residual: Box::new(|v| v[CROSS] - v[CROSS_T]),
        },
        Relation {
            id: "phi.parabola_sum",
            tolerance: RELATION_TOL,
            degenerate: flat,
            clamped: &[AB, AB_LOWER],
            residual: Box::new(move |v| {
                let u = v[AB] - v[AB_LOWER];
                let w = v[AB] + v[AB_LOWER];
                u * u / (c0 * c0) + (c0 - w) / k - 1.0
            }),
        },
        Relation {
            id: "phi.ellipse_arm",
            tolerance: RELATION_TOL,
            degenerate: flat,
            clamped: &[AB, AB_LOWER],
            residual: Box::new(move |v| {
                let u = v[AB] - v[AB_LOWER];
                max2(|j| u * u / (c0 * c0) + v[j] * v[j] / (k * k) - 1.0, AA, BB)
            }),
        },
        Relation {
            id: "phi.parabola_arm",
            tolerance: RELATION_TOL,
            degenerate: k < DEGENERATE,
            clamped: &[AB, AB_LOWER],
            residual: Box::new(move |v| {
                let w = v[AB] + v[AB_LOWER];
                max2(|j| w - c0 + v[j] * v[j] / k, AA, BB)
            }),
        },
        Relation {
            id: "phi.parabola_cross",
            tolerance: RELATION_TOL,
            degenerate: k < DEGENERATE,
            clamped: &[CROSS, CROSS_T],
            residual: Box::new(move |v| {
                let mut worst: f64 = 0.0;
                for z in [v[CROSS], v[CROSS_T]] {
                    for y in [v[AA], v[BB]] {
                        let d = y - c0 / 2.0;
                        worst = worst.max((z + d * d / (2.0 * k) - c0 * c0 / (8.0 * k)).abs());
                    }
                }
                worst
            }),
        },
    ];
    run(relations, trace, alpha, true, tol_override)
}

pub fn relation_residuals(
    family: Family,
    trace: &[ConcurrenceSextet],
    alpha: &MixingAngle,
    tol_override: Option<f64>,
) -> Vec<RelationCheck> {
    match family {
        Family::Psi => psi_relation_residuals(trace, alpha, tol_override),
        Family::Phi => phi_relation_residuals(trace, alpha, tol_override),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{phi_concurrences, psi_concurrences};
    use crate::geometry::CheckStatus;
    use std::f64::consts::{PI, TAU};

    fn gts(n: usize) -> Vec<f64> {
        (0..n).map(|j| j as f64 * TAU / (n - 1) as f64).collect()
    }

    fn psi_trace(alpha: &MixingAngle) -> Vec<ConcurrenceSextet> {
        gts(257).into_iter().map(|gt| psi_concurrences(alpha, gt)).collect()
    }

    fn phi_trace(alpha: &MixingAngle) -> Vec<ConcurrenceSextet> {
        gts(1025).into_iter().map(|gt| phi_concurrences(alpha, gt)).collect()
    }

    fn find<'a>(checks: &'a [RelationCheck], id: &str) -> &'a RelationCheck {
        checks.iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn psi_relations_hold_at_quarter_pi() {
        let alpha = MixingAngle::quarter_pi();
        let checks = psi_relation_residuals(&psi_trace(&alpha), &alpha, None);
        assert_eq!(checks.len(), 9);
        assert!(checks.iter().all(|c| c.status == CheckStatus::Pass), "{checks:?}");
        assert!(find(&checks, "psi.sum_line").max_residual <= 1e-12);
        assert!(find(&checks, "psi.circle").max_residual <= 1e-12);
    }

    #[test]
    fn psi_relations_hold_on_grid() {
        for alpha in MixingAngle::uniform_grid(33) {
            for c in psi_relation_residuals(&psi_trace(&alpha), &alpha, None) {
                assert!(c.passed(), "{alpha} {c:?}");
            }
        }
    }

    #[test]
    fn psi_endpoints_skip_degenerate_relations() {
        let alpha = MixingAngle::zero();
        let checks = psi_relation_residuals(&psi_trace(&alpha), &alpha, None);
        for id in ["psi.ellipse_bb", "psi.ellipse_aa", "psi.ratio_line", "psi.slope_bb"] {
            assert_eq!(find(&checks, id).status, CheckStatus::SkippedDegenerate, "{id}");
        }
        assert_eq!(find(&checks, "psi.slope_aa").status, CheckStatus::Pass);
    }

    #[test]
    fn ids_are_sorted() {
        let alpha = MixingAngle::from_radians(PI / 6.0);
        let checks = phi_relation_residuals(&phi_trace(&alpha), &alpha, None);
        let ids: Vec<&str> = checks.iter().map(|c| c.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn phi_relations_without_sudden_death() {
        let alpha = MixingAngle::from_radians(3.0 * PI / 10.0);
        let trace = phi_trace(&alpha);
        for c in phi_relation_residuals(&trace, &alpha, None) {
            assert_eq!(c.status, CheckStatus::Pass, "{c:?}");
            assert!(c.max_residual <= 1e-10);
        }
    }

    #[test]
    fn phi_relations_masked_at_pi_over_six() {
        let alpha = MixingAngle::from_radians(PI / 6.0);
        let checks = phi_relation_residuals(&phi_trace(&alpha), &alpha, None);
        for c in &checks {
            assert!(c.passed(), "{c:?}");
        }
        let sum = find(&checks, "phi.parabola_sum");
        assert!(sum.evaluated > 0 && sum.evaluated < sum.total);
    }

    #[test]
    fn phi_mask_empties_below_threshold_angle() {
        // AB and ab are never alive together below atan(1/2)
        let alpha = MixingAngle::from_radians(PI / 9.0);
        let checks = phi_relation_residuals(&phi_trace(&alpha), &alpha, None);
        assert_eq!(find(&checks, "phi.parabola_sum").status, CheckStatus::Vacuous);
        assert_eq!(find(&checks, "phi.parabola_cross").status, CheckStatus::Pass);
    }

    #[test]
    fn forced_tolerance_fails() {
        let alpha = MixingAngle::from_radians(0.3);
        let checks = psi_relation_residuals(&psi_trace(&alpha), &alpha, Some(1e-20));
        assert!(checks.iter().any(|c| c.status == CheckStatus::Fail));
    }
}
