//! Geometric structure of the concurrence trajectories: implicit relations
//! between pairs of concurrences, conic parameters, shell bounds on the sum
//! of squares, sudden-death intervals and entanglement surfaces.
//!
//! Time is always the dimensionless phase `gt`.

mod conic;
mod death;
mod relations;
mod shell;
mod surface;

use serde::Serialize;

pub use conic::{
    phi_conic_parameters, psi_conic_parameters, ConicDescriptor, ConicGeometry, ConicKind,
    FormulaCheck, ImplicitConic,
};
pub use death::{
    common_death_window, death_report, detect_death_birth, locate_death_birth_coincidence,
    DeathReport, ZeroInterval, DEATH_THRESHOLD,
};
pub use relations::{phi_relation_residuals, psi_relation_residuals, relation_residuals, MASK_THRESHOLD};
pub use shell::{shell_bounds, shell_limits, ShellBounds};
pub use surface::{projection_residuals, qubit_pairs, surface_sample, SurfaceMesh, SurfacePoint};

/// Default tolerance for the implicit conic relations.
pub const RELATION_TOL: f64 = 1e-10;
/// Default tolerance for linear relations and exact bounds.
pub const LINE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// No trajectory point survived the mask.
    Vacuous,
    /// The relation is undefined at this α (a denominator vanishes).
    SkippedDegenerate,
}

/// Maximum residual of one implicit relation along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub id: String,
    pub max_residual: f64,
    pub worst_gt: Option<f64>,
    pub evaluated: usize,
    pub total: usize,
    pub tolerance: f64,
    pub status: CheckStatus,
}

impl RelationCheck {
    pub fn skipped(id: &str, tolerance: f64, total: usize) -> Self {
        Self {
            id: id.to_string(),
            max_residual: 0.0,
            worst_gt: None,
            evaluated: 0,
            total,
            tolerance,
            status: CheckStatus::SkippedDegenerate,
        }
    }

    /// Only an explicit failure counts as not passing.
    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// Running maximum of |residual| over the masked points of a trajectory.
pub(crate) struct Accumulator {
    id: String,
    tolerance: f64,
    total: usize,
    evaluated: usize,
    worst: f64,
    worst_gt: Option<f64>,
}

impl Accumulator {
    pub(crate) fn new(id: &str, tolerance: f64) -> Self {
        Self {
            id: id.to_string(),
            tolerance,
            total: 0,
            evaluated: 0,
            worst: 0.0,
            worst_gt: None,
        }
    }

    pub(crate) fn skip(&mut self) {
        self.total += 1;
    }

    pub(crate) fn push(&mut self, gt: f64, residual: f64) {
        self.total += 1;
        self.evaluated += 1;
        let r = if residual.is_nan() { f64::INFINITY } else { residual.abs() };
        if r > self.worst || self.worst_gt.is_none() {
            self.worst = r;
            self.worst_gt = Some(gt);
        }
    }

    pub(crate) fn finish(self) -> RelationCheck {
        let status = if self.evaluated == 0 {
            CheckStatus::Vacuous
        } else if self.worst <= self.tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        RelationCheck {
            id: self.id,
            max_residual: self.worst,
            worst_gt: self.worst_gt,
            evaluated: self.evaluated,
            total: self.total,
            tolerance: self.tolerance,
            status,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_statuses() {
        let empty = Accumulator::new("x", 1e-10);
        assert_eq!(empty.finish().status, CheckStatus::Vacuous);

        let mut acc = Accumulator::new("x", 1e-10);
        acc.push(0.1, 1e-12);
        acc.push(0.2, -5e-11);
        acc.skip();
        let check = acc.finish();
        assert_eq!(check.status, CheckStatus::Pass);
        assert_eq!((check.evaluated, check.total), (2, 3));
        assert_eq!(check.worst_gt, Some(0.2));

        let mut acc = Accumulator::new("x", 1e-10);
        acc.push(0.0, f64::NAN);
        assert_eq!(acc.finish().status, CheckStatus::Fail);
    }
}
