//! The mixing angle α of the initial atomic superposition.
//!
//! Every closed form depends on α only through cos α, sin α and their squares
//! and products. [`MixingAngle`] carries those values alongside the radians.
//! Angles of the form atan(p/q) with small integers (0, atan(1/3), atan(1/2),
//! π/4, π/2) are built from exact rationals so that quantities which vanish
//! at a branch point vanish exactly instead of at the square root of the
//! rounding error.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    radians: f64,
    cos: f64,
    sin: f64,
    cos_sq: f64,
    sin_sq: f64,
    sin_2a: f64,
    cos_2a: f64,
    /// α = atan(p/q) exactly, when known.
    ratio: Option<(u32, u32)>,
}

impl MixingAngle {
    pub fn from_radians(radians: f64) -> Self {
        let (sin, cos) = radians.sin_cos();
        let (sin_2a, cos_2a) = (2.0 * radians).sin_cos();
        Self {
            radians,
            cos,
            sin,
            cos_sq: cos * cos,
            sin_sq: sin * sin,
            sin_2a,
            cos_2a,
            ratio: None,
        }
    }

    /// α = atan(p/q) with p, q ≥ 0 not both zero.
    pub fn from_tan_ratio(p: u32, q: u32) -> Self {
        assert!(p > 0 || q > 0, "atan(0/0) is undefined");
        let g = gcd(p, q);
        let (p, q) = (p / g, q / g);
        let (pf, qf) = (p as f64, q as f64);
        let r2 = pf * pf + qf * qf;
        let r = r2.sqrt();
        Self {
            radians: pf.atan2(qf),
            cos: qf / r,
            sin: pf / r,
            cos_sq: qf * qf / r2,
            sin_sq: pf * pf / r2,
            sin_2a: 2.0 * pf * qf / r2,
            cos_2a: (qf * qf - pf * pf) / r2,
            ratio: Some((p, q)),
        }
    }

    pub fn zero() -> Self {
        Self::from_tan_ratio(0, 1)
    }

    pub fn quarter_pi() -> Self {
        Self::from_tan_ratio(1, 1)
    }

    pub fn half_pi() -> Self {
        Self::from_tan_ratio(1, 0)
    }

    /// atan(1/2): the angle where the death of one pair's entanglement meets the birth of another's.
    pub fn atan_half() -> Self {
        Self::from_tan_ratio(1, 2)
    }

    pub fn atan_third() -> Self {
        Self::from_tan_ratio(1, 3)
    }

    /// The five points where the case analysis of the closed forms branches.
    pub fn special_points() -> [Self; 5] {
        [
            Self::zero(),
            Self::atan_third(),
            Self::atan_half(),
            Self::quarter_pi(),
            Self::half_pi(),
        ]
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }
    pub fn cos(&self) -> f64 {
        self.cos
    }
    pub fn sin(&self) -> f64 {
        self.sin
    }
    pub fn cos_sq(&self) -> f64 {
        self.cos_sq
    }
    pub fn sin_sq(&self) -> f64 {
        self.sin_sq
    }
    pub fn sin_2a(&self) -> f64 {
        self.sin_2a
    }
    pub fn cos_2a(&self) -> f64 {
        self.cos_2a
    }
    pub fn exact_ratio(&self) -> Option<(u32, u32)> {
        self.ratio
    }

    /// Initial atom–atom concurrence C₀ = |sin 2α|.
    pub fn c0(&self) -> f64 {
        self.sin_2a.abs()
    }

    /// tan α (infinite at π/2).
    pub fn tan(&self) -> f64 {
        match self.ratio {
            Some((p, q)) => p as f64 / q as f64,
            None => self.sin / self.cos,
        }
    }

    /// π/2 − α, with cos and sin swapped exactly.
    pub fn complement(&self) -> Self {
        Self {
            radians: FRAC_PI_2 - self.radians,
            cos: self.sin,
            sin: self.cos,
            cos_sq: self.sin_sq,
            sin_sq: self.cos_sq,
            sin_2a: self.sin_2a,
            cos_2a: -self.cos_2a,
            ratio: self.ratio.map(|(p, q)| (q, p)),
        }
    }

    /// Orders α against atan(p/q), exactly when both sides are rational.
    pub fn cmp_tan_ratio(&self, p: u32, q: u32) -> Ordering {
        match self.ratio {
            Some((sp, sq)) => (sp as u64 * q as u64).cmp(&(p as u64 * sq as u64)),
            None => self
                .radians
                .partial_cmp(&(p as f64).atan2(q as f64))
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_below_quarter_pi(&self) -> bool {
        self.cmp_tan_ratio(1, 1) == Ordering::Less
    }

    /// True strictly inside (0, π/2).
    pub fn is_interior(&self) -> bool {
        self.cmp_tan_ratio(0, 1) == Ordering::Greater && self.cmp_tan_ratio(1, 0) == Ordering::Less
    }

    /// `count` evenly spaced angles over [0, π/2]. Nodes that land on 0, π/4
    /// or π/2 use the exact representation.
    pub fn uniform_grid(count: usize) -> Vec<Self> {
        match count {
            0 => Vec::new(),
            1 => vec![Self::zero()],
            _ => {
                let last = count - 1;
                (0..count)
                    .map(|k| {
                        if k == 0 {
                            Self::zero()
                        } else if k == last {
                            Self::half_pi()
                        } else if 2 * k == last {
                            Self::quarter_pi()
                        } else {
                            Self::from_radians(k as f64 * FRAC_PI_2 / last as f64)
                        }
                    })
                    .collect()
            }
        }
    }

    /// Merges `extra` into `grid`, sorted by angle, dropping near-duplicates
    /// (an exact representation wins over a floating one).
    pub fn merge_grid(grid: Vec<Self>, extra: &[Self]) -> Vec<Self> {
        let mut all: Vec<Self> = grid.into_iter().chain(extra.iter().copied()).collect();
        all.sort_by(|a, b| {
            a.radians
                .partial_cmp(&b.radians)
                .unwrap_or(Ordering::Equal)
                .then_with(|| b.ratio.is_some().cmp(&a.ratio.is_some()))
        });
        let mut out: Vec<Self> = Vec::with_capacity(all.len());
        for angle in all {
            match out.last() {
                Some(prev) if (prev.radians - angle.radians).abs() <= 1e-14 => {}
                _ => out.push(angle),
            }
        }
        out
    }
}

impl fmt::Display for MixingAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ratio {
            Some((0, _)) => write!(f, "0"),
            Some((_, 0)) => write!(f, "pi/2"),
            Some((1, 1)) => write!(f, "pi/4"),
            Some((p, q)) => write!(f, "atan({p}/{q})"),
            None => write!(f, "{}", self.radians),
        }
    }
}

impl Serialize for MixingAngle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.radians)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AngleParseError {
    #[error("cannot parse '{0}' as an angle expression")]
    Syntax(String),
    #[error("angle {0} lies outside [0, pi/2]")]
    OutOfRange(f64),
}

/// Parses a scalar expression: a decimal number, `pi`, `K*pi`, `pi/N`,
/// `K*pi/N`, `atan(P/Q)`, or `N/D`.
pub fn parse_scalar(expr: &str) -> Result<f64, AngleParseError> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || AngleParseError::Syntax(expr.to_string());
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = parse_atan(&s) {
        return Ok((p as f64).atan2(q as f64));
    }
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (numerator, denominator) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let numerator = if numerator == "pi" {
        PI
    } else if let Some(k) = numerator.strip_suffix("*pi") {
        k.parse::<f64>().map_err(|_| err())? * PI
    } else if let Some(k) = numerator.strip_suffix("pi") {
        k.parse::<f64>().map_err(|_| err())? * PI
    } else {
        numerator.parse::<f64>().map_err(|_| err())?
    };
    match denominator {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| err())?;
            if d == 0.0 {
                return Err(err());
            }
            Ok(numerator / d)
        }
        None => Ok(numerator),
    }
}

fn parse_atan(s: &str) -> Option<(u32, u32)> {
    let inner = s.strip_prefix("atan(")?.strip_suffix(')')?;
    let (p, q) = inner.split_once('/').unwrap_or((inner, "1"));
    let (p, q) = (p.parse::<u32>().ok()?, q.parse::<u32>().ok()?);
    if p == 0 && q == 0 {
        None
    } else {
        Some((p, q))
    }
}

/// Parses a mixing angle in [0, π/2]. `0`, `pi/4`, `pi/2` and `atan(P/Q)`
/// produce exact representations.
pub fn parse_angle(expr: &str) -> Result<MixingAngle, AngleParseError> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((p, q)) = parse_atan(&s) {
        return Ok(MixingAngle::from_tan_ratio(p, q));
    }
    match s.as_str() {
        "0" | "0.0" => return Ok(MixingAngle::zero()),
        "pi/4" | "1*pi/4" => return Ok(MixingAngle::quarter_pi()),
        "pi/2" | "1*pi/2" | "2*pi/4" => return Ok(MixingAngle::half_pi()),
        _ => {}
    }
    let radians = parse_scalar(&s)?;
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&radians) {
        return Err(AngleParseError::OutOfRange(radians));
    }
    if radians == FRAC_PI_4 {
        return Ok(MixingAngle::quarter_pi());
    }
    Ok(MixingAngle::from_radians(radians.min(FRAC_PI_2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_branch_points() {
        let q = MixingAngle::quarter_pi();
        assert_eq!(q.cos_2a(), 0.0);
        assert_eq!(q.c0(), 1.0);
        assert_eq!(q.cos_sq(), q.sin_sq());
        let h = MixingAngle::atan_half();
        assert_eq!(h.cos_sq(), 0.8);
        assert_eq!(h.c0(), 0.8);
        assert!((h.cos_2a() - 0.6).abs() <= 1e-16);
        assert_eq!(MixingAngle::half_pi().cos(), 0.0);
        assert_eq!(MixingAngle::zero().sin_2a(), 0.0);
    }

    #[test]
    fn floating_and_exact_agree() {
        for (p, q) in [(1, 3), (1, 2), (1, 1), (3, 7), (5, 2)] {
            let exact = MixingAngle::from_tan_ratio(p, q);
            let float = MixingAngle::from_radians(exact.radians());
            assert!((exact.cos_sq() - float.cos_sq()).abs() < 1e-15);
            assert!((exact.sin_2a() - float.sin_2a()).abs() < 1e-15);
            assert!((exact.cos_2a() - float.cos_2a()).abs() < 1e-15);
        }
    }

    #[test]
    fn complement_swaps_trig() {
        let a = MixingAngle::from_radians(0.3);
        let c = a.complement();
        assert_eq!(c.cos(), a.sin());
        assert_eq!(c.sin_sq(), a.cos_sq());
        assert_eq!(MixingAngle::atan_half().complement().exact_ratio(), Some((2, 1)));
    }

    #[test]
    fn ordering_against_branch_points() {
        assert_eq!(MixingAngle::atan_half().cmp_tan_ratio(1, 2), Ordering::Equal);
        assert_eq!(MixingAngle::from_radians(PI / 9.0).cmp_tan_ratio(1, 2), Ordering::Less);
        assert_eq!(MixingAngle::from_radians(PI / 5.0).cmp_tan_ratio(1, 2), Ordering::Greater);
        assert!(MixingAngle::from_radians(0.5).is_below_quarter_pi());
        assert!(!MixingAngle::quarter_pi().is_below_quarter_pi());
        assert!(!MixingAngle::zero().is_interior());
        assert!(!MixingAngle::half_pi().is_interior());
    }

    #[test]
    fn grid_uses_exact_nodes() {
        let grid = MixingAngle::uniform_grid(65);
        assert_eq!(grid.len(), 65);
        assert_eq!(grid[32].exact_ratio(), Some((1, 1)));
        assert_eq!(grid[64].exact_ratio(), Some((1, 0)));
        let merged = MixingAngle::merge_grid(grid, &MixingAngle::special_points());
        assert_eq!(merged.len(), 67);
        assert!(merged.windows(2).all(|w| w[0].radians() < w[1].radians()));
    }

    #[test]
    fn expressions() {
        assert_eq!(parse_scalar("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_scalar("pi/9").unwrap(), PI / 9.0);
        assert_eq!(parse_scalar("3*pi/10").unwrap(), 3.0 * PI / 10.0);
        assert_eq!(parse_scalar("0.25").unwrap(), 0.25);
        assert_eq!(parse_scalar("1/4").unwrap(), 0.25);
        assert!(parse_scalar("pie").is_err());
        assert_eq!(parse_angle("atan(1/2)").unwrap(), MixingAngle::atan_half());
        assert_eq!(parse_angle("pi/4").unwrap(), MixingAngle::quarter_pi());
        assert_eq!(parse_angle("0").unwrap(), MixingAngle::zero());
        assert!(matches!(parse_angle("pi"), Err(AngleParseError::OutOfRange(_))));
        assert_eq!(parse_angle("pi/6").unwrap().radians(), PI / 6.0);
    }
}
