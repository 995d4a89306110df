//! Dense complex linear algebra on the truncated atom ⊗ atom ⊗ cavity ⊗ cavity space.
//!
//! Basis ordering is fixed: atom A, atom B, cavity a, cavity b, with atom A the
//! most significant digit. A basis ket |A B⟩|a b⟩ has index
//! `((A·2 + B)·(n+1) + a)·(n+1) + b` where `n` is the photon cutoff.
//!
//! ħ = 1 throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

mod propagator;

pub use propagator::{
    default_steps, evolve_numeric, expm, Propagator, PropagatorFactory, PropagatorRegistry, Rk4,
    ScaledExponential, NORM_DRIFT_LIMIT,
};

/// Complex amplitude type used for every state and operator.
pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Entrywise tolerance under which an operator is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("invalid space configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite amplitude or matrix entry")]
    NonFinite,
    #[error("operator is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),
    #[error("integration failed: norm drift {drift:e} exceeds {limit:e}")]
    IntegrationFailure { drift: f64, limit: f64 },
    #[error("unknown propagator '{name}' (available: {available})")]
    UnknownPropagator { name: String, available: String },
}

/// Model parameters and truncation of the cavity Fock spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    photon_cutoff: usize,
    omega: f64,
    g: f64,
}

impl SpaceConfig {
    pub fn new(photon_cutoff: usize, omega: f64, g: f64) -> Result<Self, HilbertError> {
        if photon_cutoff < 1 {
            return Err(HilbertError::InvalidConfig(
                "photon cutoff must be at least 1".into(),
            ));
        }
        if !g.is_finite() || g <= 0.0 {
            return Err(HilbertError::InvalidConfig(format!(
                "coupling g must be positive and finite, got {g}"
            )));
        }
        if !omega.is_finite() || omega < 0.0 {
            return Err(HilbertError::InvalidConfig(format!(
                "omega must be non-negative and finite, got {omega}"
            )));
        }
        Ok(Self {
            photon_cutoff,
            omega,
            g,
        })
    }

    pub fn photon_cutoff(&self) -> usize {
        self.photon_cutoff
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Number of Fock levels kept per cavity.
    pub fn levels(&self) -> usize {
        self.photon_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        4 * self.levels() * self.levels()
    }
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            photon_cutoff: 1,
            omega: 1.0,
            g: 1.0,
        }
    }
}

/// One of the four two-level (or truncated bosonic) subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subsystem {
    AtomA,
    AtomB,
    CavityA,
    CavityB,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [
        Subsystem::AtomA,
        Subsystem::AtomB,
        Subsystem::CavityA,
        Subsystem::CavityB,
    ];

    /// Position in the tensor-product ordering.
    pub fn slot(self) -> usize {
        match self {
            Subsystem::AtomA => 0,
            Subsystem::AtomB => 1,
            Subsystem::CavityA => 2,
            Subsystem::CavityB => 3,
        }
    }

    pub fn is_cavity(self) -> bool {
        matches!(self, Subsystem::CavityA | Subsystem::CavityB)
    }

    pub fn local_dim(self, photon_cutoff: usize) -> usize {
        if self.is_cavity() {
            photon_cutoff + 1
        } else {
            2
        }
    }

    /// Conventional one-letter label: `A`, `B` for atoms, `a`, `b` for cavities.
    pub fn label(self) -> &'static str {
        match self {
            Subsystem::AtomA => "A",
            Subsystem::AtomB => "B",
            Subsystem::CavityA => "a",
            Subsystem::CavityB => "b",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "A" => Some(Subsystem::AtomA),
            "B" => Some(Subsystem::AtomB),
            "a" => Some(Subsystem::CavityA),
            "b" => Some(Subsystem::CavityB),
            _ => None,
        }
    }
}

/// Occupation numbers of a product basis ket |A B⟩|a b⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub atom_a: u8,
    pub atom_b: u8,
    pub photons_a: usize,
    pub photons_b: usize,
}

impl BasisLabel {
    pub const fn new(atom_a: u8, atom_b: u8, photons_a: usize, photons_b: usize) -> Self {
        Self {
            atom_a,
            atom_b,
            photons_a,
            photons_b,
        }
    }

    pub fn index(&self, photon_cutoff: usize) -> usize {
        debug_assert!(self.atom_a < 2 && self.atom_b < 2);
        debug_assert!(self.photons_a <= photon_cutoff && self.photons_b <= photon_cutoff);
        let levels = photon_cutoff + 1;
        ((self.atom_a as usize * 2 + self.atom_b as usize) * levels + self.photons_a) * levels
            + self.photons_b
    }

    pub fn from_index(index: usize, photon_cutoff: usize) -> Self {
        let levels = photon_cutoff + 1;
        let photons_b = index % levels;
        let rest = index / levels;
        let photons_a = rest % levels;
        let atoms = rest / levels;
        debug_assert!(atoms < 4);
        Self {
            atom_a: (atoms / 2) as u8,
            atom_b: (atoms % 2) as u8,
            photons_a,
            photons_b,
        }
    }

    /// Occupation of one subsystem.
    pub fn occupation(&self, which: Subsystem) -> usize {
        match which {
            Subsystem::AtomA => self.atom_a as usize,
            Subsystem::AtomB => self.atom_b as usize,
            Subsystem::CavityA => self.photons_a,
            Subsystem::CavityB => self.photons_b,
        }
    }

    /// Total number of excitations (excited atoms plus photons).
    pub fn excitations(&self) -> usize {
        self.atom_a as usize + self.atom_b as usize + self.photons_a + self.photons_b
    }
}

fn all_finite<'a>(values: impl IntoIterator<Item = &'a C64>) -> bool {
    values.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// State vector over the composite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
}

impl Ket {
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self, HilbertError> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: DVector<C64>) -> Result<Self, HilbertError> {
        if !all_finite(amplitudes.iter()) {
            return Err(HilbertError::NonFinite);
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(cfg: &SpaceConfig, label: BasisLabel) -> Self {
        let mut amplitudes = DVector::from_element(cfg.dim(), ZERO);
        amplitudes[label.index(cfg.photon_cutoff())] = ONE;
        Self { amplitudes }
    }

    /// Builds a ket from a sparse list of (label, amplitude) pairs.
    pub fn from_terms(cfg: &SpaceConfig, terms: &[(BasisLabel, C64)]) -> Result<Self, HilbertError> {
        let mut amplitudes = DVector::from_element(cfg.dim(), ZERO);
        for (label, amp) in terms {
            amplitudes[label.index(cfg.photon_cutoff())] += *amp;
        }
        Self::from_vector(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Ket) -> Result<C64, HilbertError> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Largest entrywise distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Ket) -> Result<f64, HilbertError> {
        let overlap = other.inner(self)?;
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), HilbertError> {
    if expected != found {
        Err(HilbertError::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Dense square operator with a cached Hermiticity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, HilbertError> {
        if !matrix.is_square() {
            return Err(HilbertError::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if !all_finite(matrix.iter()) {
            return Err(HilbertError::NonFinite);
        }
        let hermitian = hermitian_defect(&matrix) <= HERMITIAN_TOL;
        Ok(Self { matrix, hermitian })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::from_element(dim, dim, ZERO),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.matrix)
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            hermitian: self.hermitian,
        }
    }

    /// Tensor product `self ⊗ other`; `self` is the more significant factor.
    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket, HilbertError> {
        check_dim(self.dim(), ket.dim())?;
        Ok(Ket {
            amplitudes: &self.matrix * &ket.amplitudes,
        })
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Self, HilbertError> {
        check_dim(self.dim(), other.dim())?;
        Self::new(&self.matrix * &other.matrix)
    }

    pub fn add(&self, other: &Operator) -> Result<Self, HilbertError> {
        check_dim(self.dim(), other.dim())?;
        Self::new(&self.matrix + &other.matrix)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let matrix = &self.matrix * factor;
        let hermitian = hermitian_defect(&matrix) <= HERMITIAN_TOL;
        Self { matrix, hermitian }
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Operator) -> Result<Self, HilbertError> {
        check_dim(self.dim(), other.dim())?;
        Self::new(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    /// ⟨ψ|self|ψ⟩
    pub fn expectation(&self, ket: &Ket) -> Result<C64, HilbertError> {
        let image = self.apply(ket)?;
        ket.inner(&image)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigen needs a square matrix");
    let h = faer::Mat::<C64>::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()));
    let eig = h
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigensolver converges on finite input");
    let values = eig.S().column_vector().iter().map(|z| z.re).collect();
    let u = eig.U();
    (values, DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let a = faer::Mat::<C64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    a.singular_values().expect("SVD converges on finite input")
}

/// Truncated bosonic annihilation operator on `cutoff + 1` Fock levels.
pub fn annihilation(photon_cutoff: usize) -> Operator {
    let levels = photon_cutoff + 1;
    let mut m = DMatrix::from_element(levels, levels, ZERO);
    for n in 1..levels {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Operator {
        matrix: m,
        hermitian: false,
    }
}

/// Atomic lowering operator |0⟩⟨1| (index 1 is the excited level).
pub fn sigma_minus() -> Operator {
    let mut m = DMatrix::from_element(2, 2, ZERO);
    m[(0, 1)] = ONE;
    Operator {
        matrix: m,
        hermitian: false,
    }
}

pub fn sigma_plus() -> Operator {
    sigma_minus().dagger()
}

/// |1⟩⟨1| − |0⟩⟨0|: the ground level contributes −1.
pub fn sigma_z() -> Operator {
    let mut m = DMatrix::from_element(2, 2, ZERO);
    m[(0, 0)] = -ONE;
    m[(1, 1)] = ONE;
    Operator {
        matrix: m,
        hermitian: true,
    }
}

/// Lifts a local operator on `which` to the full space.
pub fn embed(local: &Operator, which: Subsystem, photon_cutoff: usize) -> Result<Operator, HilbertError> {
    check_dim(which.local_dim(photon_cutoff), local.dim())?;
    let mut full = Operator::identity(1);
    for slot in Subsystem::ALL {
        let factor = if slot == which {
            local.clone()
        } else {
            Operator::identity(slot.local_dim(photon_cutoff))
        };
        full = full.kron(&factor);
    }
    Ok(full)
}

/// H = ω a†a + ω b†b + (ω/2)σz^A + (ω/2)σz^B + g(a†σ₋^A + aσ₊^A) + g(b†σ₋^B + bσ₊^B)
pub fn build_hamiltonian(cfg: &SpaceConfig) -> Operator {
    let n = cfg.photon_cutoff();
    let omega = C64::new(cfg.omega(), 0.0);
    let g = C64::new(cfg.g(), 0.0);
    let lift = |op: &Operator, which| embed(op, which, n).expect("local dimensions match");

    let a = lift(&annihilation(n), Subsystem::CavityA);
    let b = lift(&annihilation(n), Subsystem::CavityB);
    let sz_a = lift(&sigma_z(), Subsystem::AtomA);
    let sz_b = lift(&sigma_z(), Subsystem::AtomB);
    let sm_a = lift(&sigma_minus(), Subsystem::AtomA);
    let sm_b = lift(&sigma_minus(), Subsystem::AtomB);

    let field = a.dagger().matrix() * a.matrix() + b.dagger().matrix() * b.matrix();
    let atoms = sz_a.matrix() + sz_b.matrix();
    let coupling_a = a.dagger().matrix() * sm_a.matrix() + a.matrix() * sm_a.dagger().matrix();
    let coupling_b = b.dagger().matrix() * sm_b.matrix() + b.matrix() * sm_b.dagger().matrix();

    let h = field * omega + atoms * (omega * 0.5) + (coupling_a + coupling_b) * g;
    Operator::new(h).expect("Hamiltonian entries are finite")
}

/// Total excitation number a†a + b†b + (σz^A + 1)/2 + (σz^B + 1)/2 (diagonal).
pub fn excitation_number(cfg: &SpaceConfig) -> Operator {
    let n = cfg.photon_cutoff();
    let diag = DVector::from_iterator(
        cfg.dim(),
        (0..cfg.dim()).map(|i| C64::new(BasisLabel::from_index(i, n).excitations() as f64, 0.0)),
    );
    Operator {
        matrix: DMatrix::from_diagonal(&diag),
        hermitian: true,
    }
}
