//! Two-qubit reductions of the four-body state and the Wootters concurrence.
//!
//! A reduced state is kept together with a factor `F` such that ρ = F F†.
//! The square roots of the spin-flip eigenvalues are then the singular
//! values of Fᵀ (σy⊗σy) F, which avoids taking square roots of tiny,
//! noise-dominated eigenvalues.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{ConcurrenceSextet, Family};
use crate::angle::MixingAngle;
use crate::hilbert::{hermitian_eigen, singular_values, BasisLabel, HilbertError, Ket, SpaceConfig, Subsystem, C64};

pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const LEAK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum EntanglementError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("density matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0:e} below the positivity tolerance")]
    NotPositive(f64),
    #[error("pair {pair}: population {leaked:e} above Fock level 1, not a two-qubit state")]
    CavitySupport { pair: QubitPair, leaked: f64 },
    #[error("expected a 4x4 two-qubit matrix, found {0}x{0}")]
    NotTwoQubit(usize),
    #[error("state has zero weight on the two-qubit sector of {0}")]
    EmptyReduction(QubitPair),
}

/// An unordered pair of distinct subsystems, stored in canonical orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitPair {
    first: Subsystem,
    second: Subsystem,
}

impl QubitPair {
    pub const ATOMS: QubitPair = QubitPair::raw(Subsystem::AtomA, Subsystem::AtomB);
    pub const CAVITIES: QubitPair = QubitPair::raw(Subsystem::CavityA, Subsystem::CavityB);
    pub const ARM_A: QubitPair = QubitPair::raw(Subsystem::AtomA, Subsystem::CavityA);
    pub const ARM_B: QubitPair = QubitPair::raw(Subsystem::AtomB, Subsystem::CavityB);
    pub const CROSS_AB: QubitPair = QubitPair::raw(Subsystem::AtomA, Subsystem::CavityB);
    pub const CROSS_BA: QubitPair = QubitPair::raw(Subsystem::CavityA, Subsystem::AtomB);

    /// Sextet order: AB, ab, Aa, Bb, Ab, aB.
    pub const ALL: [QubitPair; 6] = [
        Self::ATOMS,
        Self::CAVITIES,
        Self::ARM_A,
        Self::ARM_B,
        Self::CROSS_AB,
        Self::CROSS_BA,
    ];

    const fn raw(first: Subsystem, second: Subsystem) -> Self {
        Self { first, second }
    }

    /// Returns `None` when both sides name the same subsystem.
    pub fn new(x: Subsystem, y: Subsystem) -> Option<Self> {
        Self::ALL.into_iter().find(|p| {
            (p.first == x && p.second == y) || (p.first == y && p.second == x)
        })
    }

    pub fn from_label(label: &str) -> Option<Self> {
        let mut chars = label.chars();
        let x = Subsystem::from_label(&chars.next()?.to_string())?;
        let y = Subsystem::from_label(&chars.next()?.to_string())?;
        if chars.next().is_some() {
            return None;
        }
        Self::new(x, y)
    }

    pub fn first(self) -> Subsystem {
        self.first
    }

    pub fn second(self) -> Subsystem {
        self.second
    }

    pub fn contains(self, s: Subsystem) -> bool {
        self.first == s || self.second == s
    }

    pub fn position(self) -> usize {
        Self::ALL.iter().position(|p| *p == self).expect("canonical pair")
    }

    pub fn label(self) -> String {
        format!("{}{}", self.first.label(), self.second.label())
    }

    /// The subsystems traced out, in basis order.
    pub fn rest(self) -> [Subsystem; 2] {
        let mut out = [Subsystem::AtomA; 2];
        let mut k = 0;
        for s in Subsystem::ALL {
            if !self.contains(s) {
                out[k] = s;
                k += 1;
            }
        }
        out
    }
}

impl fmt::Display for QubitPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first.label(), self.second.label())
    }
}

impl Serialize for QubitPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
    factor: Option<DMatrix<C64>>,
    pair: Option<QubitPair>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self, EntanglementError> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d == 0 {
            return Err(EntanglementError::NotTwoQubit(d));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(HilbertError::NonFinite.into());
        }
        let defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if defect > crate::hilbert::HERMITIAN_TOL {
            return Err(EntanglementError::NotHermitian(defect));
        }
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(EntanglementError::BadTrace(trace));
        }
        let lowest = hermitian_eigen(&matrix).0[0];
        if lowest < -PSD_TOL {
            return Err(EntanglementError::NotPositive(lowest));
        }
        Ok(Self { matrix, factor: None, pair: None })
    }

    /// ρ = F F†, with F already normalised so that ‖F‖_F = 1.
    fn from_factor(factor: DMatrix<C64>, pair: QubitPair) -> Self {
        let m = &factor * factor.adjoint();
        let matrix = (&m + m.adjoint()).scale(0.5);
        Self { matrix, factor: Some(factor), pair: Some(pair) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn pair(&self) -> Option<QubitPair> {
        self.pair
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = hermitian_eigen(&self.matrix).0;
        ev.reverse();
        ev
    }

    /// A factor F with ρ = F F†, taken from the reduction if available or
    /// from the eigendecomposition otherwise.
    pub fn gram_factor(&self) -> Result<DMatrix<C64>, EntanglementError> {
        if let Some(f) = &self.factor {
            return Ok(f.clone());
        }
        let (values, mut f) = hermitian_eigen(&self.matrix);
        for (j, &mu) in values.iter().enumerate() {
            if mu < -PSD_TOL {
                return Err(EntanglementError::NotPositive(mu));
            }
            let w = mu.max(0.0).sqrt();
            f.column_mut(j).scale_mut(w);
        }
        Ok(f)
    }

    /// (u₁ ⊗ u₂) ρ (u₁ ⊗ u₂)† for 2×2 unitaries.
    pub fn conjugate_by(&self, u1: &DMatrix<C64>, u2: &DMatrix<C64>) -> Result<Self, EntanglementError> {
        if self.dim() != 4 {
            return Err(EntanglementError::NotTwoQubit(self.dim()));
        }
        let u = u1.kronecker(u2);
        let matrix = &u * &self.matrix * u.adjoint();
        let matrix = (&matrix + matrix.adjoint()).scale(0.5);
        let factor = self.factor.as_ref().map(|f| &u * f);
        Ok(Self { matrix, factor, pair: self.pair })
    }
}

/// σy ⊗ σy in the computational basis; it happens to be real.
fn spin_flip() -> DMatrix<C64> {
    let mut s = DMatrix::<C64>::zeros(4, 4);
    s[(0, 3)] = C64::new(-1.0, 0.0);
    s[(1, 2)] = C64::new(1.0, 0.0);
    s[(2, 1)] = C64::new(1.0, 0.0);
    s[(3, 0)] = C64::new(-1.0, 0.0);
    s
}

/// Two-qubit state of `pair` obtained by tracing out the other two subsystems.
pub fn reduce(state: &Ket, pair: QubitPair, cfg: &SpaceConfig) -> Result<DensityMatrix, EntanglementError> {
    let n = cfg.photon_cutoff();
    if state.dim() != cfg.dim() {
        return Err(HilbertError::DimensionMismatch { expected: cfg.dim(), found: state.dim() }.into());
    }
    let [u, v] = pair.rest();
    let dv = v.local_dim(n);
    let cols = u.local_dim(n) * dv;
    let mut m = DMatrix::<C64>::zeros(4, cols);
    let mut leaked = 0.0;
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let label = BasisLabel::from_index(i, n);
        let ox = label.occupation(pair.first);
        let oy = label.occupation(pair.second);
        if ox > 1 || oy > 1 {
            leaked += amp.norm_sqr();
            continue;
        }
        let col = label.occupation(u) * dv + label.occupation(v);
        m[(ox * 2 + oy, col)] = *amp;
    }
    if leaked > LEAK_TOL {
        return Err(EntanglementError::CavitySupport { pair, leaked });
    }
    let weight = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if weight <= 0.0 {
        return Err(EntanglementError::EmptyReduction(pair));
    }
    m.scale_mut(1.0 / weight.sqrt());
    Ok(DensityMatrix::from_factor(compress(m), pair))
}

/// Replaces a wide 4×k factor by an equivalent 4×4 one (same F F†).
fn compress(m: DMatrix<C64>) -> DMatrix<C64> {
    if m.ncols() <= 4 {
        return m;
    }
    let qr = m.adjoint().qr();
    qr.r().adjoint()
}

/// Square roots of the spin-flip eigenvalues, descending.
pub fn spin_flip_roots(rho: &DensityMatrix) -> Result<Vec<f64>, EntanglementError> {
    if rho.dim() != 4 {
        return Err(EntanglementError::NotTwoQubit(rho.dim()));
    }
    let f = rho.gram_factor()?;
    let t = f.transpose() * spin_flip() * &f;
    let mut s = singular_values(&t);
    s.resize(4, 0.0);
    Ok(s)
}

/// C = max[0, √λ₁ − √λ₂ − √λ₃ − √λ₄].
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64, EntanglementError> {
    let s = spin_flip_roots(rho)?;
    Ok((s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0))
}

/// Eigenvalues of √ρ ρ̃ √ρ (equal to those of ρρ̃), descending.
pub fn spin_flip_eigenvalues(rho: &DensityMatrix) -> Result<Vec<f64>, EntanglementError> {
    if rho.dim() != 4 {
        return Err(EntanglementError::NotTwoQubit(rho.dim()));
    }
    let (values, vectors) = hermitian_eigen(rho.matrix());
    let mut root = DMatrix::<C64>::zeros(4, 4);
    for (j, &mu) in values.iter().enumerate() {
        if mu < -PSD_TOL {
            return Err(EntanglementError::NotPositive(mu));
        }
        let v = vectors.column(j);
        root += (v * v.adjoint()).scale(mu.max(0.0).sqrt());
    }
    let sf = spin_flip();
    let tilde = &sf * rho.matrix().conjugate() * &sf;
    let r = &root * tilde * &root;
    let r = (&r + r.adjoint()).scale(0.5);
    let mut ev = hermitian_eigen(&r).0;
    ev.reverse();
    Ok(ev)
}

/// Concurrences of all six pairs in sextet order.
pub fn pair_concurrences(state: &Ket, cfg: &SpaceConfig) -> Result<[f64; 6], EntanglementError> {
    let mut out = [0.0; 6];
    for (slot, pair) in out.iter_mut().zip(QubitPair::ALL) {
        *slot = wootters_concurrence(&reduce(state, pair, cfg)?)?;
    }
    Ok(out)
}

pub fn sextet_from_state(
    state: &Ket,
    cfg: &SpaceConfig,
    family: Family,
    alpha: MixingAngle,
    gt: f64,
) -> Result<ConcurrenceSextet, EntanglementError> {
    Ok(ConcurrenceSextet::from_values(family, alpha, gt, pair_concurrences(state, cfg)?))
}

/// A random element of U(2) built from uniformly drawn Euler angles and phase.
pub fn random_qubit_unitary<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<C64> {
    use std::f64::consts::{PI, TAU};
    // θ with density sin 2θ on [0, π/2] gives the Haar measure.
    let theta = rng.gen::<f64>().sqrt().asin();
    let psi = rng.gen_range(0.0..TAU);
    let chi = rng.gen_range(0.0..TAU);
    let phase = C64::from_polar(1.0, rng.gen_range(-PI..PI));
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            phase * C64::from_polar(c, psi),
            phase * C64::from_polar(s, chi),
            -phase * C64::from_polar(s, -chi),
            phase * C64::from_polar(c, -psi),
        ],
    )
}
