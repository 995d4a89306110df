//! Initial-state families as interchangeable strategies, and the numerical
//! oracle that evolves any of them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analytic::{
    concurrences, initial_state, phi_unclamped, ConcurrenceSextet, Family, PhiCoefficients,
    PsiCoefficients,
};
use crate::angle::MixingAngle;
use crate::entanglement::{sextet_from_state, EntanglementError};
use crate::geometry::{
    phi_conic_parameters, phi_relation_residuals, psi_conic_parameters, psi_relation_residuals,
    shell_limits, ConicDescriptor, RelationCheck,
};
use crate::hilbert::{build_hamiltonian, HilbertError, Ket, Operator, Propagator, SpaceConfig};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("unknown state family `{name}` (available: {available})")]
    Unknown { name: String, available: String },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

pub trait StateFamily: Send + Sync {
    fn family(&self) -> Family;

    fn name(&self) -> &'static str {
        self.family().name()
    }

    fn initial_state(&self, alpha: &MixingAngle, cfg: &SpaceConfig) -> Ket {
        initial_state(self.family(), alpha, cfg.photon_cutoff())
    }

    /// Closed-form state at phase `gt` on the space of `cfg`.
    fn state(&self, alpha: &MixingAngle, gt: f64, cfg: &SpaceConfig) -> Ket;

    fn concurrences(&self, alpha: &MixingAngle, gt: f64) -> ConcurrenceSextet {
        concurrences(self.family(), alpha, gt)
    }

    /// Concurrences before any max[0, ·] clamp.
    fn unclamped(&self, alpha: &MixingAngle, gt: f64) -> [f64; 6];

    fn relation_residuals(
        &self,
        trace: &[ConcurrenceSextet],
        alpha: &MixingAngle,
        tol: Option<f64>,
    ) -> Vec<RelationCheck>;

    fn conic_parameters(&self, alpha: &MixingAngle) -> Vec<ConicDescriptor>;

    fn shell_limits(&self, alpha: &MixingAngle) -> (f64, f64) {
        shell_limits(self.family(), alpha)
    }

    /// Whether any concurrence can vanish on a finite interval.
    fn has_sudden_death(&self) -> bool;
}

pub struct PsiFamily;

impl StateFamily for PsiFamily {
    fn family(&self) -> Family {
        Family::Psi
    }

    fn state(&self, alpha: &MixingAngle, gt: f64, cfg: &SpaceConfig) -> Ket {
        PsiCoefficients::at(alpha, gt).to_ket(cfg.photon_cutoff())
    }

    fn unclamped(&self, alpha: &MixingAngle, gt: f64) -> [f64; 6] {
        concurrences(Family::Psi, alpha, gt).values()
    }

    fn relation_residuals(
        &self,
        trace: &[ConcurrenceSextet],
        alpha: &MixingAngle,
        tol: Option<f64>,
    ) -> Vec<RelationCheck> {
        psi_relation_residuals(trace, alpha, tol)
    }

    fn conic_parameters(&self, alpha: &MixingAngle) -> Vec<ConicDescriptor> {
        psi_conic_parameters(alpha)
    }

    fn has_sudden_death(&self) -> bool {
        false
    }
}

pub struct PhiFamily;

impl StateFamily for PhiFamily {
    fn family(&self) -> Family {
        Family::Phi
    }

    fn state(&self, alpha: &MixingAngle, gt: f64, cfg: &SpaceConfig) -> Ket {
        let omega_t = cfg.omega() * gt / cfg.g();
        PhiCoefficients::at(alpha, gt, omega_t).to_ket(cfg.photon_cutoff())
    }

    fn unclamped(&self, alpha: &MixingAngle, gt: f64) -> [f64; 6] {
        phi_unclamped(alpha, gt)
    }

    fn relation_residuals(
        &self,
        trace: &[ConcurrenceSextet],
        alpha: &MixingAngle,
        tol: Option<f64>,
    ) -> Vec<RelationCheck> {
        phi_relation_residuals(trace, alpha, tol)
    }

    fn conic_parameters(&self, alpha: &MixingAngle) -> Vec<ConicDescriptor> {
        phi_conic_parameters(alpha)
    }

    fn has_sudden_death(&self) -> bool {
        true
    }
}

pub type FamilyFactory = fn() -> Box<dyn StateFamily>;

/// Name → constructor table for the available state families.
#[derive(Clone)]
pub struct FamilyRegistry {
    entries: BTreeMap<&'static str, FamilyFactory>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register("psi", || Box::new(PsiFamily));
        registry.register("phi", || Box::new(PhiFamily));
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: FamilyFactory) {
        self.entries.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn StateFamily>, FamilyError> {
        self.entries
            .get(name)
            .map(|factory| factory())
            .ok_or_else(|| FamilyError::Unknown {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Numerical evolution of a family's initial state followed by partial
/// traces and Wootters concurrences. Shares nothing with the closed forms
/// except the initial state.
pub struct Oracle {
    cfg: SpaceConfig,
    hamiltonian: Operator,
    propagator: Box<dyn Propagator>,
}

impl Oracle {
    pub fn new(cfg: SpaceConfig, propagator: Box<dyn Propagator>) -> Self {
        Self {
            hamiltonian: build_hamiltonian(&cfg),
            cfg,
            propagator,
        }
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.cfg
    }

    pub fn propagator_name(&self) -> &'static str {
        self.propagator.name()
    }

    pub fn evolve(&self, family: &dyn StateFamily, alpha: &MixingAngle, gt: f64) -> Result<Ket, FamilyError> {
        let psi0 = family.initial_state(alpha, &self.cfg);
        Ok(self.propagator.propagate(&self.hamiltonian, &psi0, gt / self.cfg.g())?)
    }

    pub fn sextet(&self, family: &dyn StateFamily, alpha: &MixingAngle, gt: f64) -> Result<ConcurrenceSextet, FamilyError> {
        let state = self.evolve(family, alpha, gt)?;
        Ok(sextet_from_state(&state, &self.cfg, family.family(), *alpha, gt)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::PropagatorRegistry;
    use std::f64::consts::PI;

    #[test]
    fn registry_lookup() {
        let registry = FamilyRegistry::builtin();
        assert_eq!(registry.names(), vec!["phi", "psi"]);
        assert_eq!(registry.create("phi").unwrap().family(), Family::Phi);
        let err = registry.create("chi").err().unwrap();
        assert!(err.to_string().contains("phi, psi"));
    }

    #[test]
    fn oracle_matches_closed_state() {
        let cfg = SpaceConfig::new(2, 1.3, 0.7).unwrap();
        let oracle = Oracle::new(cfg, PropagatorRegistry::builtin().create("expm", &cfg).unwrap());
        let alpha = MixingAngle::from_radians(PI / 7.0);
        for name in ["psi", "phi"] {
            let family = FamilyRegistry::builtin().create(name).unwrap();
            let gt = 1.1;
            let numeric = oracle.evolve(family.as_ref(), &alpha, gt).unwrap();
            let closed = family.state(&alpha, gt, &cfg);
            assert!(numeric.distance_up_to_phase(&closed).unwrap() < 1e-12, "{name}");
            let s = oracle.sextet(family.as_ref(), &alpha, gt).unwrap();
            assert!(s.max_abs_difference(&family.concurrences(&alpha, gt)) < 1e-10, "{name}");
        }
    }

    #[test]
    fn unclamped_agrees_where_positive() {
        let alpha = MixingAngle::from_radians(PI / 9.0);
        for j in 0..50 {
            let gt = j as f64 * 0.13;
            let raw = PhiFamily.unclamped(&alpha, gt);
            let clamped = PhiFamily.concurrences(&alpha, gt).values();
            for (r, c) in raw.iter().zip(clamped) {
                assert_eq!(r.max(0.0), c);
            }
        }
    }
}
