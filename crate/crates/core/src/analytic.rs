//! Closed-form states, pairwise concurrences and predictability for the two
//! initial-state families.
//!
//! * ψ family: (cos α |10⟩ + sin α |01⟩) ⊗ |00⟩, one excitation shared by the atoms.
//! * φ family: (cos α |11⟩ + sin α |00⟩) ⊗ |00⟩, zero or two excitations.
//!
//! Time enters only through the dimensionless phase `gt`; the φ family also
//! picks up the free phase `ωt` between its excitation sectors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angle::MixingAngle;
use crate::entanglement::QubitPair;
use crate::hilbert::{BasisLabel, Ket, SpaceConfig, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Psi,
    Phi,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Psi => "psi",
            Family::Phi => "phi",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psi" => Ok(Family::Psi),
            "phi" => Ok(Family::Phi),
            other => Err(format!("unknown family '{other}' (expected psi or phi)")),
        }
    }
}

fn cavity_config(photon_cutoff: usize) -> SpaceConfig {
    SpaceConfig::new(photon_cutoff.max(1), 0.0, 1.0).expect("cutoff >= 1 is valid")
}

/// Amplitudes of |10⟩|00⟩, |01⟩|00⟩, |00⟩|10⟩, |00⟩|01⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiCoefficients {
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
    pub x4: C64,
}

impl PsiCoefficients {
    pub fn at(alpha: &MixingAngle, gt: f64) -> Self {
        let (s, c) = gt.sin_cos();
        Self {
            x1: C64::new(alpha.cos() * c, 0.0),
            x2: C64::new(alpha.sin() * c, 0.0),
            x3: C64::new(0.0, -alpha.cos() * s),
            x4: C64::new(0.0, -alpha.sin() * s),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        [self.x1, self.x2, self.x3, self.x4].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_ket(&self, photon_cutoff: usize) -> Ket {
        Ket::from_terms(
            &cavity_config(photon_cutoff),
            &[
                (BasisLabel::new(1, 0, 0, 0), self.x1),
                (BasisLabel::new(0, 1, 0, 0), self.x2),
                (BasisLabel::new(0, 0, 1, 0), self.x3),
                (BasisLabel::new(0, 0, 0, 1), self.x4),
            ],
        )
        .expect("closed-form amplitudes are finite")
    }
}

/// Amplitudes of |11⟩|00⟩, |00⟩|00⟩, |10⟩|01⟩, |01⟩|10⟩, |00⟩|11⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiCoefficients {
    pub y1: C64,
    pub y2: C64,
    pub y3: C64,
    pub y4: C64,
    pub y5: C64,
}

impl PhiCoefficients {
    pub fn at(alpha: &MixingAngle, gt: f64, omega_t: f64) -> Self {
        let (s, c) = gt.sin_cos();
        let down = C64::from_polar(1.0, -omega_t);
        let up = C64::from_polar(1.0, omega_t);
        let minus_i = C64::new(0.0, -1.0);
        let cross = minus_i * down * (alpha.cos() * s * c);
        Self {
            y1: down * (alpha.cos() * c * c),
            y2: up * alpha.sin(),
            y3: cross,
            y4: cross,
            y5: -down * (alpha.cos() * s * s),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        [self.y1, self.y2, self.y3, self.y4, self.y5]
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn to_ket(&self, photon_cutoff: usize) -> Ket {
        Ket::from_terms(
            &cavity_config(photon_cutoff),
            &[
                (BasisLabel::new(1, 1, 0, 0), self.y1),
                (BasisLabel::new(0, 0, 0, 0), self.y2),
                (BasisLabel::new(1, 0, 0, 1), self.y3),
                (BasisLabel::new(0, 1, 1, 0), self.y4),
                (BasisLabel::new(0, 0, 1, 1), self.y5),
            ],
        )
        .expect("closed-form amplitudes are finite")
    }
}

/// Closed-form ψ-family state at photon cutoff 1.
pub fn psi_state(alpha: &MixingAngle, gt: f64) -> Ket {
    PsiCoefficients::at(alpha, gt).to_ket(1)
}

/// Closed-form φ-family state at photon cutoff 1.
pub fn phi_state(alpha: &MixingAngle, gt: f64, omega_t: f64) -> Ket {
    PhiCoefficients::at(alpha, gt, omega_t).to_ket(1)
}

/// Initial state of either family on a space with the given cutoff.
pub fn initial_state(family: Family, alpha: &MixingAngle, photon_cutoff: usize) -> Ket {
    match family {
        Family::Psi => PsiCoefficients::at(alpha, 0.0).to_ket(photon_cutoff),
        Family::Phi => PhiCoefficients::at(alpha, 0.0, 0.0).to_ket(photon_cutoff),
    }
}

/// The six pairwise concurrences at one (α, gt) point.
///
/// Field names follow the pair: `atoms` = AB, `cavities` = ab, `arm_a` = Aa,
/// `arm_b` = Bb, `cross_ab` = Ab (atom A, cavity b), `cross_ba` = aB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcurrenceSextet {
    pub family: Family,
    pub alpha: MixingAngle,
    pub gt: f64,
    pub atoms: f64,
    pub cavities: f64,
    pub arm_a: f64,
    pub arm_b: f64,
    pub cross_ab: f64,
    pub cross_ba: f64,
}

impl ConcurrenceSextet {
    /// Values in the order AB, ab, Aa, Bb, Ab, aB (see [`QubitPair::ALL`]).
    pub fn from_values(family: Family, alpha: MixingAngle, gt: f64, v: [f64; 6]) -> Self {
        Self {
            family,
            alpha,
            gt,
            atoms: v[0],
            cavities: v[1],
            arm_a: v[2],
            arm_b: v[3],
            cross_ab: v[4],
            cross_ba: v[5],
        }
    }

    pub fn values(&self) -> [f64; 6] {
        [
            self.atoms,
            self.cavities,
            self.arm_a,
            self.arm_b,
            self.cross_ab,
            self.cross_ba,
        ]
    }

    pub fn get(&self, pair: QubitPair) -> f64 {
        self.values()[pair.position()]
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values().iter().map(|c| c * c).sum()
    }

    pub fn max_abs_difference(&self, other: &ConcurrenceSextet) -> f64 {
        self.values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// ψ-family concurrences:
/// C_AB = C₀cos²(gt), C_ab = C₀sin²(gt), C_Aa = cos²α|sin 2gt|,
/// C_Ab = C_aB = |sin 2α sin gt cos gt|, C_Bb = sin²α|sin 2gt|.
pub fn psi_concurrences(alpha: &MixingAngle, gt: f64) -> ConcurrenceSextet {
    let (s, c) = gt.sin_cos();
    let s2 = (2.0 * gt).sin().abs();
    let c0 = alpha.c0();
    let cross = (alpha.sin_2a() * s * c).abs();
    ConcurrenceSextet::from_values(
        Family::Psi,
        *alpha,
        gt,
        [
            c0 * c * c,
            c0 * s * s,
            alpha.cos_sq() * s2,
            alpha.sin_sq() * s2,
            cross,
            cross,
        ],
    )
}

/// γ = ½ cos²α sin²(2gt), the term subtracted inside the φ-family clamps.
pub fn gamma(alpha: &MixingAngle, gt: f64) -> f64 {
    let s2 = (2.0 * gt).sin();
    0.5 * alpha.cos_sq() * s2 * s2
}

/// φ-family concurrences before the max[0, ·] clamp, in pair order.
pub fn phi_unclamped(alpha: &MixingAngle, gt: f64) -> [f64; 6] {
    let (s, c) = gt.sin_cos();
    let s2 = (2.0 * gt).sin().abs();
    let c0 = alpha.c0();
    let g = gamma(alpha, gt);
    let arm = alpha.cos_sq() * s2;
    let cross = 0.5 * c0 * s2 - g;
    [c0 * c * c - g, c0 * s * s - g, arm, arm, cross, cross]
}

/// φ-family concurrences: C_AB = max[0, C₀cos²(gt) − γ], C_ab = max[0, C₀sin²(gt) − γ],
/// C_Aa = C_Bb = cos²α|sin 2gt|, C_Ab = C_aB = max[0, ½C₀|sin 2gt| − γ].
pub fn phi_concurrences(alpha: &MixingAngle, gt: f64) -> ConcurrenceSextet {
    let raw = phi_unclamped(alpha, gt);
    ConcurrenceSextet::from_values(Family::Phi, *alpha, gt, raw.map(|v| v.max(0.0)))
}

pub fn concurrences(family: Family, alpha: &MixingAngle, gt: f64) -> ConcurrenceSextet {
    match family {
        Family::Psi => psi_concurrences(alpha, gt),
        Family::Phi => phi_concurrences(alpha, gt),
    }
}

/// Initial predictability P₀ = |tr(σz^A ρ₀)| = |cos 2α| for both families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Predictability {
    pub p0: f64,
    /// +1 below π/4 and −1 from π/4 on; selects the branch of the φ-family
    /// shell radius 1 + C₀²/2 ± P₀.
    pub sign: f64,
}

pub fn predictability(_family: Family, alpha: &MixingAngle) -> Predictability {
    Predictability {
        p0: alpha.cos_2a().abs(),
        sign: if alpha.is_below_quarter_pi() { 1.0 } else { -1.0 },
    }
}
