use serde::Serialize;

use super::{Accumulator, RelationCheck, MASK_THRESHOLD, RELATION_TOL};
use crate::analytic::{concurrences, phi_unclamped, Family};
use crate::angle::MixingAngle;
use crate::entanglement::QubitPair;
use crate::hilbert::Subsystem;

const DEGENERATE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub alpha: MixingAngle,
    pub gt: f64,
    pub values: [f64; 3],
}

/// Concurrences of one qubit with each of the other three, sampled over
/// (α, gt). Points are stored α-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceMesh {
    pub family: Family,
    pub qubit: Subsystem,
    /// Partner of the same kind, own arm, cross pair.
    pub pairs: [QubitPair; 3],
    pub alpha_count: usize,
    pub gt_count: usize,
    pub points: Vec<SurfacePoint>,
}

impl SurfaceMesh {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, alpha_index: usize, gt_index: usize) -> &SurfacePoint {
        &self.points[alpha_index * self.gt_count + gt_index]
    }
}

/// (partner, arm, cross) pairs of a qubit.
pub fn qubit_pairs(qubit: Subsystem) -> [QubitPair; 3] {
    match qubit {
        Subsystem::AtomA => [QubitPair::ATOMS, QubitPair::ARM_A, QubitPair::CROSS_AB],
        Subsystem::AtomB => [QubitPair::ATOMS, QubitPair::ARM_B, QubitPair::CROSS_BA],
        Subsystem::CavityA => [QubitPair::CAVITIES, QubitPair::ARM_A, QubitPair::CROSS_BA],
        Subsystem::CavityB => [QubitPair::CAVITIES, QubitPair::ARM_B, QubitPair::CROSS_AB],
    }
}

pub fn surface_sample(family: Family, qubit: Subsystem, alphas: &[MixingAngle], gts: &[f64]) -> SurfaceMesh {
    let pairs = qubit_pairs(qubit);
    let mut points = Vec::with_capacity(alphas.len() * gts.len());
    for alpha in alphas {
        for &gt in gts {
            let s = concurrences(family, alpha, gt);
            points.push(SurfacePoint {
                alpha: *alpha,
                gt,
                values: pairs.map(|p| s.get(p)),
            });
        }
    }
    SurfaceMesh {
        family,
        qubit,
        pairs,
        alpha_count: alphas.len(),
        gt_count: gts.len(),
        points,
    }
}

/// Resultant of a1 S² + b1 S + c1 and a2 S² + b2 S + c2.
fn resultant(p: [f64; 3], q: [f64; 3]) -> f64 {
    let [a1, b1, c1] = p;
    let [a2, b2, c2] = q;
    let ac = a1 * c2 - a2 * c1;
    ac * ac - (a1 * b2 - a2 * b1) * (b1 * c2 - b2 * c1)
}

/// Residuals of the three coordinate-plane relations of a surface, each
/// evaluated with the α of its point.
///
/// Checks are named `surface.<qubit>.<x>_<y>` after the plane's pairs.
pub fn projection_residuals(mesh: &SurfaceMesh, tol: Option<f64>) -> Vec<RelationCheck> {
    let tol = tol.unwrap_or(RELATION_TOL);
    let [partner, arm, cross] = mesh.pairs;
    let id = |x: QubitPair, y: QubitPair| format!("surface.{}.{}_{}", mesh.qubit.label(), x.label(), y.label());
    let mut planes = [
        Accumulator::new(&id(partner, arm), tol),
        Accumulator::new(&id(partner, cross), tol),
        Accumulator::new(&id(arm, cross), tol),
    ];
    let arm_is_a = arm == QubitPair::ARM_A;
    for p in &mesh.points {
        let [x, y, z] = p.values;
        let c0 = p.alpha.c0();
        let k = p.alpha.cos_sq();
        match mesh.family {
            Family::Psi => {
                let s = if arm_is_a { k } else { p.alpha.sin_sq() };
                let half = c0 / 2.0;
                if c0 < DEGENERATE || s < DEGENERATE {
                    planes[0].skip();
                    planes[2].skip();
                } else {
                    planes[0].push(p.gt, (x - half) * (x - half) / (half * half) + y * y / (s * s) - 1.0);
                    planes[2].push(p.gt, z - c0 / (2.0 * s) * y);
                }
                planes[1].push(p.gt, (x - half) * (x - half) + z * z - half * half);
            }
            Family::Phi => {
                let raw = phi_unclamped(&p.alpha, p.gt);
                let live = |q: QubitPair| raw[q.position()] > MASK_THRESHOLD;
                let flat = c0 < DEGENERATE || k < DEGENERATE;
                if !flat && live(QubitPair::ATOMS) && live(QubitPair::CAVITIES) {
                    let u = (2.0 * x + y * y / k - c0) / c0;
                    planes[0].push(p.gt, u * u + y * y / (k * k) - 1.0);
                } else {
                    planes[0].skip();
                }
                if !flat && live(partner) && live(cross) {
                    let d = 2.0 * (x - z) / c0 - 1.0;
                    planes[1].push(p.gt, resultant([2.0, 2.0 * d, d * d - 1.0], [k, -c0, 2.0 * z]));
                } else {
                    planes[1].skip();
                }
                if k >= DEGENERATE && live(cross) {
                    let d = y - c0 / 2.0;
                    planes[2].push(p.gt, z + d * d / (2.0 * k) - c0 * c0 / (8.0 * k));
                } else {
                    planes[2].skip();
                }
            }
        }
    }
    let mut out: Vec<RelationCheck> = planes.into_iter().map(Accumulator::finish).collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CheckStatus;
    use std::f64::consts::TAU;

    fn gts(n: usize) -> Vec<f64> {
        (0..n).map(|j| j as f64 * TAU / (n - 1) as f64).collect()
    }

    #[test]
    fn mesh_shape_and_order() {
        let alphas = MixingAngle::uniform_grid(9);
        let mesh = surface_sample(Family::Psi, Subsystem::AtomA, &alphas, &gts(17));
        assert_eq!(mesh.len(), 153);
        assert_eq!(mesh.point(2, 5).alpha, alphas[2]);
        assert_eq!(mesh.point(2, 5).gt, gts(17)[5]);
    }

    #[test]
    fn projections_hold_for_every_qubit() {
        let alphas = MixingAngle::uniform_grid(33);
        for family in [Family::Psi, Family::Phi] {
            for qubit in Subsystem::ALL {
                let mesh = surface_sample(family, qubit, &alphas, &gts(129));
                for check in projection_residuals(&mesh, None) {
                    assert_eq!(check.status, CheckStatus::Pass, "{family} {check:?}");
                }
            }
        }
    }

    #[test]
    fn resultant_vanishes_on_common_root() {
        // (S − 2)(S + 1) and (S − 2)(3S − 5)
        let p = [1.0, -1.0, -2.0];
        let q = [3.0, -11.0, 10.0];
        assert!(resultant(p, q).abs() < 1e-12);
        assert!(resultant(p, [1.0, 0.0, -9.0]).abs() > 1.0);
    }

    #[test]
    fn perturbed_surface_fails() {
        let alphas = MixingAngle::uniform_grid(9);
        let mut mesh = surface_sample(Family::Phi, Subsystem::CavityB, &alphas, &gts(33));
        mesh.points[100].values[2] += 1e-6;
        let checks = projection_residuals(&mesh, None);
        assert!(checks.iter().any(|c| c.status == CheckStatus::Fail));
    }

    #[test]
    fn psi_qubit_b_mirrors_qubit_a() {
        let alphas = MixingAngle::uniform_grid(17);
        let mirrored: Vec<MixingAngle> = alphas.iter().map(MixingAngle::complement).collect();
        let g = gts(65);
        let a = surface_sample(Family::Psi, Subsystem::AtomA, &alphas, &g);
        let b = surface_sample(Family::Psi, Subsystem::AtomB, &mirrored, &g);
        for (pa, pb) in a.points.iter().zip(&b.points) {
            for (va, vb) in pa.values.iter().zip(&pb.values) {
                assert!((va - vb).abs() <= 1e-12);
            }
        }
    }
}
