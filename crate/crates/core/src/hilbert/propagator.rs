//! Numerical solution of i dψ/dt = Hψ, independent of any closed form.
//!
//! Two strategies are registered by name:
//!
//! * `rk4`: classical fixed-step fourth-order Runge–Kutta, `ceil(200·g·t)` steps
//!   by default;
//! * `expm`: scaling-and-squaring Taylor evaluation of exp(−iHt) applied to ψ₀.
//!
//! Both refuse non-Hermitian generators and fail when the norm drifts by more
//! than [`NORM_DRIFT_LIMIT`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{HilbertError, Ket, Operator, SpaceConfig, C64};

/// Norm drift beyond which an integration is reported as failed.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

pub trait Propagator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Returns ψ(t) = exp(−iHt) ψ₀.
    fn propagate(&self, hamiltonian: &Operator, psi0: &Ket, t: f64) -> Result<Ket, HilbertError>;
}

/// Default RK4 step count for a run of duration `t` at coupling `g`.
pub fn default_steps(g: f64, t: f64) -> usize {
    ((200.0 * g * t.abs()).ceil() as usize).max(1)
}

fn check_inputs(hamiltonian: &Operator, psi0: &Ket) -> Result<(), HilbertError> {
    if !hamiltonian.is_hermitian() {
        return Err(HilbertError::NotHermitian(hamiltonian.hermitian_defect()));
    }
    if hamiltonian.dim() != psi0.dim() {
        return Err(HilbertError::DimensionMismatch {
            expected: hamiltonian.dim(),
            found: psi0.dim(),
        });
    }
    Ok(())
}

fn check_drift(initial_norm: f64, out: DVector<C64>) -> Result<Ket, HilbertError> {
    let ket = Ket::from_vector(out)?;
    let drift = (ket.norm() - initial_norm).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(HilbertError::IntegrationFailure {
            drift,
            limit: NORM_DRIFT_LIMIT,
        });
    }
    Ok(ket)
}

/// Fixed-step RK4 integration of the Schrödinger equation.
pub fn evolve_numeric(
    hamiltonian: &Operator,
    psi0: &Ket,
    t: f64,
    steps: usize,
) -> Result<Ket, HilbertError> {
    check_inputs(hamiltonian, psi0)?;
    let steps = steps.max(1);
    let dt = t / steps as f64;
    // dψ/dt = -i H ψ
    let generator = hamiltonian.matrix() * C64::new(0.0, -1.0);
    let mut psi = psi0.amplitudes().clone();
    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    let sixth = C64::new(dt / 6.0, 0.0);
    for _ in 0..steps {
        let k1 = &generator * &psi;
        let k2 = &generator * (&psi + &k1 * half);
        let k3 = &generator * (&psi + &k2 * half);
        let k4 = &generator * (&psi + &k3 * full);
        psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * sixth;
    }
    check_drift(psi0.norm(), psi)
}

fn norm_one(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by 2^-s until its 1-norm is at most 1/2, where the
/// series is summed until the next term drops below machine precision.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(2f64.powi(-squarings), 0.0);

    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if norm_one(&term) <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// RK4 propagator with a step density proportional to the coupling.
#[derive(Debug, Clone, Copy)]
pub struct Rk4 {
    pub steps_per_unit_time: f64,
}

impl Rk4 {
    pub fn for_config(cfg: &SpaceConfig) -> Self {
        Self {
            steps_per_unit_time: 200.0 * cfg.g(),
        }
    }
}

impl Propagator for Rk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn propagate(&self, hamiltonian: &Operator, psi0: &Ket, t: f64) -> Result<Ket, HilbertError> {
        let steps = ((self.steps_per_unit_time * t.abs()).ceil() as usize).max(1);
        evolve_numeric(hamiltonian, psi0, t, steps)
    }
}

/// exp(−iHt)ψ₀ through [`expm`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaledExponential;

impl Propagator for ScaledExponential {
    fn name(&self) -> &'static str {
        "expm"
    }

    fn propagate(&self, hamiltonian: &Operator, psi0: &Ket, t: f64) -> Result<Ket, HilbertError> {
        check_inputs(hamiltonian, psi0)?;
        let u = expm(&(hamiltonian.matrix() * C64::new(0.0, -t)));
        check_drift(psi0.norm(), u * psi0.amplitudes())
    }
}

pub type PropagatorFactory = fn(&SpaceConfig) -> Box<dyn Propagator>;

/// Name → constructor table for the available time evolvers.
#[derive(Clone)]
pub struct PropagatorRegistry {
    entries: BTreeMap<&'static str, PropagatorFactory>,
}

impl PropagatorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register("expm", |_| Box::new(ScaledExponential));
        registry.register("rk4", |cfg| Box::new(Rk4::for_config(cfg)));
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: PropagatorFactory) {
        self.entries.insert(name, factory);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn create(&self, name: &str, cfg: &SpaceConfig) -> Result<Box<dyn Propagator>, HilbertError> {
        self.entries
            .get(name)
            .map(|factory| factory(cfg))
            .ok_or_else(|| HilbertError::UnknownPropagator {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

impl Default for PropagatorRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_hamiltonian, excitation_number, BasisLabel, ZERO};

    fn psi_family_initial(cfg: &SpaceConfig, alpha: f64) -> Ket {
        Ket::from_terms(
            cfg,
            &[
                (BasisLabel::new(1, 0, 0, 0), C64::new(alpha.cos(), 0.0)),
                (BasisLabel::new(0, 1, 0, 0), C64::new(alpha.sin(), 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exponentials() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(0.0, -3.0),
            C64::new(1.5, 0.0),
            C64::new(-2.0, 7.0),
        ]));
        let e = expm(&d);
        for i in 0..3 {
            assert!((e[(i, i)] - d[(i, i)].exp()).norm() < 1e-13 * d[(i, i)].exp().norm().max(1.0));
        }
    }

    #[test]
    fn expm_rotation_generator() {
        // exp(θ [[0,-1],[1,0]]) is a rotation by θ
        let theta = 2.3;
        let m = DMatrix::from_row_slice(2, 2, &[ZERO, C64::new(-theta, 0.0), C64::new(theta, 0.0), ZERO]);
        let e = expm(&m);
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn uncoupled_evolution_only_adds_phases() {
        let cfg = SpaceConfig::new(1, 1.0, 1.0).unwrap();
        let mut h = build_hamiltonian(&SpaceConfig::new(1, 1.0, 1.0).unwrap());
        // strip the coupling: keep only the diagonal
        let diag = DMatrix::from_diagonal(&h.matrix().diagonal());
        h = Operator::new(diag).unwrap();
        for label in [BasisLabel::new(1, 0, 0, 0), BasisLabel::new(1, 1, 0, 1)] {
            let ket = Ket::basis(&cfg, label);
            let registry = PropagatorRegistry::builtin();
            for name in registry.names() {
                let p = registry.create(name, &cfg).unwrap();
                let out = p.propagate(&h, &ket, 3.7).unwrap();
                // RK4 is only held to its norm budget
                let tol = if name == "expm" { 1e-12 } else { 1e-9 };
                for (a, b) in out.populations().iter().zip(ket.populations()) {
                    assert!((a - b).abs() <= tol, "{name} {}", (a - b).abs());
                }
            }
        }
    }

    #[test]
    fn half_rabi_period_moves_excitation_into_cavities() {
        let cfg = SpaceConfig::new(1, 1.0, 1.0).unwrap();
        let h = build_hamiltonian(&cfg);
        let psi0 = psi_family_initial(&cfg, std::f64::consts::FRAC_PI_4);
        for name in ["rk4", "expm"] {
            let p = PropagatorRegistry::builtin().create(name, &cfg).unwrap();
            let out = p.propagate(&h, &psi0, std::f64::consts::FRAC_PI_2).unwrap();
            let pops = out.populations();
            assert!(pops[BasisLabel::new(1, 0, 0, 0).index(1)] <= 1e-8, "{name}");
            assert!(pops[BasisLabel::new(0, 1, 0, 0).index(1)] <= 1e-8, "{name}");
            let cavities = pops[BasisLabel::new(0, 0, 1, 0).index(1)] + pops[BasisLabel::new(0, 0, 0, 1).index(1)];
            assert!((cavities - 1.0).abs() <= 1e-8, "{name}");
        }
    }

    #[test]
    fn full_period_restores_magnitudes() {
        let cfg = SpaceConfig::new(1, 1.0, 1.0).unwrap();
        let h = build_hamiltonian(&cfg);
        let psi0 = psi_family_initial(&cfg, 0.4);
        for name in ["rk4", "expm"] {
            let p = PropagatorRegistry::builtin().create(name, &cfg).unwrap();
            let out = p.propagate(&h, &psi0, std::f64::consts::PI).unwrap();
            for i in 0..cfg.dim() {
                assert!((out.amplitude(i).norm() - psi0.amplitude(i).norm()).abs() <= 1e-8, "{name}");
            }
        }
    }

    #[test]
    fn rk4_conserves_norm_energy_and_excitations() {
        let cfg = SpaceConfig::new(2, 1.0, 1.0).unwrap();
        let h = build_hamiltonian(&cfg);
        let n_exc = excitation_number(&cfg);
        let psi0 = Ket::from_terms(
            &cfg,
            &[
                (BasisLabel::new(1, 1, 0, 0), C64::new(0.6, 0.0)),
                (BasisLabel::new(0, 0, 0, 0), C64::new(0.8, 0.0)),
            ],
        )
        .unwrap();
        let e0 = h.expectation(&psi0).unwrap().re;
        let n0 = n_exc.expectation(&psi0).unwrap().re;
        for t in [0.5, 2.0, 6.0] {
            let out = evolve_numeric(&h, &psi0, t, default_steps(cfg.g(), t)).unwrap();
            assert!((out.norm() - 1.0).abs() <= 1e-9);
            assert!((h.expectation(&out).unwrap().re - e0).abs() <= 1e-8 * e0.abs().max(1.0));
            assert!((n_exc.expectation(&out).unwrap().re - n0).abs() <= 1e-10);
        }
    }

    #[test]
    fn rejects_non_hermitian_generator() {
        let cfg = SpaceConfig::default();
        let mut m = build_hamiltonian(&cfg).into_matrix();
        m[(0, 1)] += C64::new(0.5, 0.0);
        let h = Operator::new(m).unwrap();
        let psi0 = Ket::basis(&cfg, BasisLabel::new(1, 0, 0, 0));
        assert!(matches!(
            ScaledExponential.propagate(&h, &psi0, 1.0),
            Err(HilbertError::NotHermitian(_))
        ));
    }

    #[test]
    fn coarse_rk4_reports_integration_failure() {
        let cfg = SpaceConfig::new(1, 5.0, 1.0).unwrap();
        let h = build_hamiltonian(&cfg);
        let psi0 = Ket::basis(&cfg, BasisLabel::new(1, 1, 0, 0));
        assert!(matches!(
            evolve_numeric(&h, &psi0, 50.0, 20),
            Err(HilbertError::IntegrationFailure { .. })
        ));
    }

    #[test]
    fn registry_lookup() {
        let registry = PropagatorRegistry::builtin();
        assert_eq!(registry.names(), vec!["expm", "rk4"]);
        let err = registry.create("leapfrog", &SpaceConfig::default()).err().unwrap();
        assert!(err.to_string().contains("expm, rk4"));
    }
}
