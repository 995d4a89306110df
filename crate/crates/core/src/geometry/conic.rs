use serde::Serialize;

use crate::analytic::{predictability, Family};
use crate::angle::MixingAngle;

/// Tolerance for the formula-versus-geometric comparisons.
pub const FORMULA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConicKind {
    Line,
    Circle,
    Ellipse,
    Parabola,
    Hyperbola,
    Degenerate,
}

/// xx·x² + xy·xy + yy·y² + x·x + y·y + c = 0
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicitConic {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
    pub x: f64,
    pub y: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConicGeometry {
    pub kind: ConicKind,
    /// None for lines and degenerate conics.
    pub eccentricity: Option<f64>,
    pub center: Option<[f64; 2]>,
    /// (major, minor) for ellipses, (transverse, conjugate) for hyperbolas.
    pub semi_axes: Option<[f64; 2]>,
    /// Unit vector along the major axis, or along the opening of a parabola.
    pub axis: Option<[f64; 2]>,
    /// Centre-to-focus distance for central conics, vertex-to-focus for parabolas.
    pub focal_distance: Option<f64>,
    pub foci: Vec<[f64; 2]>,
    pub vertex: Option<[f64; 2]>,
    pub slope: Option<f64>,
}

impl ConicGeometry {
    fn empty(kind: ConicKind) -> Self {
        Self {
            kind,
            eccentricity: None,
            center: None,
            semi_axes: None,
            axis: None,
            focal_distance: None,
            foci: Vec::new(),
            vertex: None,
            slope: None,
        }
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl ImplicitConic {
    pub fn new(xx: f64, xy: f64, yy: f64, x: f64, y: f64, c: f64) -> Self {
        Self { xx, xy, yy, x, y, c }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.xx * x * x + self.xy * x * y + self.yy * y * y + self.x * x + self.y * y + self.c
    }

    /// Eigenvalues of the quadratic form, (smaller, larger), and the half gap
    /// between them computed without cancellation.
    fn quadratic_spectrum(&self) -> (f64, f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let half_gap = (0.5 * (self.xx - self.yy)).hypot(0.5 * self.xy);
        (mean - half_gap, mean + half_gap, half_gap)
    }

    /// Unit eigenvector of the quadratic form for eigenvalue `lambda`.
    fn eigenvector(&self, lambda: f64, fallback: [f64; 2]) -> [f64; 2] {
        let a = [0.5 * self.xy, lambda - self.xx];
        let b = [lambda - self.yy, 0.5 * self.xy];
        let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
        if na.max(nb) == 0.0 {
            fallback
        } else if na >= nb {
            unit(a)
        } else {
            unit(b)
        }
    }

    /// Kind, eccentricity, axes, foci and vertex from the coefficients alone.
    pub fn geometry(&self) -> ConicGeometry {
        let quad_scale = self.xx.abs().max(self.xy.abs()).max(self.yy.abs());
        let lin_scale = self.x.abs().max(self.y.abs());
        if quad_scale <= 1e-14 * lin_scale.max(self.c.abs()) {
            if lin_scale == 0.0 {
                return ConicGeometry::empty(ConicKind::Degenerate);
            }
            let mut g = ConicGeometry::empty(ConicKind::Line);
            g.slope = Some(if self.y == 0.0 { f64::INFINITY } else { -self.x / self.y });
            g.axis = Some(unit([-self.y, self.x]));
            return g;
        }
        let (lo, hi, half_gap) = self.quadratic_spectrum();
        let disc = self.xy * self.xy - 4.0 * self.xx * self.yy;
        if disc.abs() <= 1e-12 * quad_scale * quad_scale {
            return self.parabola(lo, hi);
        }
        // centre: ∇ = 0
        let det = 4.0 * self.xx * self.yy - self.xy * self.xy;
        let cx = (self.xy * self.y - 2.0 * self.yy * self.x) / det;
        let cy = (self.xy * self.x - 2.0 * self.xx * self.y) / det;
        let f0 = self.c + 0.5 * (self.x * cx + self.y * cy);
        if disc < 0.0 {
            self.ellipse([cx, cy], f0, lo, hi, half_gap)
        } else {
            self.hyperbola([cx, cy], f0, lo, hi)
        }
    }

    fn ellipse(&self, center: [f64; 2], f0: f64, lo: f64, hi: f64, half_gap: f64) -> ConicGeometry {
        // normalise to a positive-definite form
        let (lo, hi, f0) = if hi < 0.0 { (-hi, -lo, -f0) } else { (lo, hi, f0) };
        if f0 >= 0.0 {
            let mut g = ConicGeometry::empty(ConicKind::Degenerate);
            g.center = Some(center);
            return g;
        }
        let major = (-f0 / lo).sqrt();
        let minor = (-f0 / hi).sqrt();
        let eccentricity = (2.0 * half_gap / hi).sqrt();
        let focal = (-f0 * 2.0 * half_gap / (lo * hi)).sqrt();
        let sign = if self.xx + self.yy < 0.0 { -1.0 } else { 1.0 };
        let axis = self.eigenvector(sign * lo, [1.0, 0.0]);
        let kind = if eccentricity <= FORMULA_TOL {
            ConicKind::Circle
        } else {
            ConicKind::Ellipse
        };
        ConicGeometry {
            kind,
            eccentricity: Some(eccentricity),
            center: Some(center),
            semi_axes: Some([major, minor]),
            axis: Some(axis),
            focal_distance: Some(focal),
            foci: vec![
                [center[0] - focal * axis[0], center[1] - focal * axis[1]],
                [center[0] + focal * axis[0], center[1] + focal * axis[1]],
            ],
            vertex: None,
            slope: None,
        }
    }

    fn hyperbola(&self, center: [f64; 2], f0: f64, lo: f64, hi: f64) -> ConicGeometry {
        if f0 == 0.0 {
            let mut g = ConicGeometry::empty(ConicKind::Degenerate);
            g.center = Some(center);
            return g;
        }
        // the transverse eigenvalue has the sign opposite to f0
        let (lt, lc) = if lo * f0 < 0.0 { (lo, hi) } else { (hi, lo) };
        let a = (-f0 / lt).sqrt();
        let b = (f0 / lc).sqrt();
        let focal = a.hypot(b);
        let axis = self.eigenvector(lt, [1.0, 0.0]);
        ConicGeometry {
            kind: ConicKind::Hyperbola,
            eccentricity: Some(focal / a),
            center: Some(center),
            semi_axes: Some([a, b]),
            axis: Some(axis),
            focal_distance: Some(focal),
            foci: vec![
                [center[0] - focal * axis[0], center[1] - focal * axis[1]],
                [center[0] + focal * axis[0], center[1] + focal * axis[1]],
            ],
            vertex: None,
            slope: None,
        }
    }

    fn parabola(&self, lo: f64, hi: f64) -> ConicGeometry {
        let lambda = if hi.abs() >= lo.abs() { hi } else { lo };
        let zero = if hi.abs() >= lo.abs() { lo } else { hi };
        let eu = self.eigenvector(lambda, [1.0, 0.0]);
        let ev = self.eigenvector(zero, [-eu[1], eu[0]]);
        let d = dot([self.x, self.y], eu);
        let e = dot([self.x, self.y], ev);
        if e == 0.0 {
            // pair of parallel lines
            return ConicGeometry::empty(ConicKind::Degenerate);
        }
        // λ(u − u₀)² + e (v − v₀) = 0
        let u0 = -d / (2.0 * lambda);
        let v0 = (d * d / (4.0 * lambda) - self.c) / e;
        let p = -e / (4.0 * lambda);
        let vertex = [u0 * eu[0] + v0 * ev[0], u0 * eu[1] + v0 * ev[1]];
        let focus = [vertex[0] + p * ev[0], vertex[1] + p * ev[1]];
        let opening = if p >= 0.0 { ev } else { [-ev[0], -ev[1]] };
        ConicGeometry {
            kind: ConicKind::Parabola,
            eccentricity: Some(1.0),
            center: None,
            semi_axes: None,
            axis: Some(opening),
            focal_distance: Some(p.abs()),
            foci: vec![focus],
            vertex: Some(vertex),
            slope: None,
        }
    }
}

/// One closed-form quantity compared with the value extracted from
/// the implicit conic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub quantity: String,
    pub formula: f64,
    pub geometric: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub agrees: bool,
    /// A disagreement in a binding check is a hard failure; otherwise it is
    /// reported as a warning.
    pub binding: bool,
}

impl FormulaCheck {
    fn new(quantity: &str, formula: f64, geometric: f64, binding: bool) -> Self {
        let difference = (formula - geometric).abs();
        Self {
            quantity: quantity.to_string(),
            formula,
            geometric,
            difference,
            tolerance: FORMULA_TOL,
            agrees: difference <= FORMULA_TOL,
            binding,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConicDescriptor {
    pub id: String,
    pub family: Family,
    pub alpha: MixingAngle,
    /// Horizontal and vertical axis labels of the diagram.
    pub axes: [String; 2],
    pub conic: ImplicitConic,
    pub geometry: ConicGeometry,
    pub checks: Vec<FormulaCheck>,
}

impl ConicDescriptor {
    fn new(id: &str, family: Family, alpha: &MixingAngle, axes: [&str; 2], conic: ImplicitConic) -> Self {
        Self {
            id: id.to_string(),
            family,
            alpha: *alpha,
            axes: axes.map(str::to_string),
            conic,
            geometry: conic.geometry(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, quantity: &str, formula: f64, geometric: Option<f64>, binding: bool) {
        let g = geometric.unwrap_or(f64::NAN);
        self.checks.push(FormulaCheck::new(quantity, formula, g, binding));
    }

    pub fn check_named(&self, quantity: &str) -> Option<&FormulaCheck> {
        self.checks.iter().find(|c| c.quantity == quantity)
    }

    /// True unless a binding check disagrees.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.agrees || !c.binding)
    }
}

/// Ellipses, circle and slope lines of the ψ family, with the closed-form
/// eccentricity, focal distances and slopes as binding checks.
pub fn psi_conic_parameters(alpha: &MixingAngle) -> Vec<ConicDescriptor> {
    if !alpha.is_interior() {
        return Vec::new();
    }
    let c0 = alpha.c0();
    let cs = alpha.cos_sq();
    let ss = alpha.sin_sq();
    let p0 = predictability(Family::Psi, alpha).p0;
    let below = alpha.is_below_quarter_pi();
    let sgn = if below { 1.0 } else { -1.0 };
    let eps = (2.0 * p0 / (1.0 + p0)).sqrt();
    let ratio = (1.0 - p0) / (1.0 + p0);

    // (X − C₀/2)²/(C₀²/4) + Y²/s⁴ = 1
    let ellipse = |s2: f64| ImplicitConic::new(4.0 / (c0 * c0), 0.0, 1.0 / (s2 * s2), -4.0 / c0, 0.0, 0.0);

    let mut bb = ConicDescriptor::new("psi.ellipse_bb", Family::Psi, alpha, ["C_AB", "C_Bb"], ellipse(ss));
    bb.check("eccentricity", eps, bb.geometry.eccentricity, true);
    let fa = (p0 * (1.0 - sgn * p0) / 2.0).sqrt();
    bb.check("focal_distance", fa, bb.geometry.focal_distance, true);

    let mut aa = ConicDescriptor::new("psi.ellipse_aa", Family::Psi, alpha, ["C_AB", "C_Aa"], ellipse(cs));
    aa.check("eccentricity", eps, aa.geometry.eccentricity, true);
    let fb = (p0 * (1.0 + sgn * p0) / 2.0).sqrt();
    aa.check("focal_distance", fb, aa.geometry.focal_distance, true);

    let mut circle = ConicDescriptor::new(
        "psi.circle",
        Family::Psi,
        alpha,
        ["C_AB", "C_aB"],
        ImplicitConic::new(1.0, 0.0, 1.0, -c0, 0.0, 0.0),
    );
    circle.check("eccentricity", 0.0, circle.geometry.eccentricity, true);
    circle.check("radius", c0 / 2.0, circle.geometry.semi_axes.map(|a| a[0]), true);

    let mut line_a = ConicDescriptor::new(
        "psi.slope_aa",
        Family::Psi,
        alpha,
        ["C_Aa", "C_aB"],
        ImplicitConic::new(0.0, 0.0, 0.0, c0 / (2.0 * cs), -1.0, 0.0),
    );
    line_a.check("slope", ratio.powf(0.5 * sgn), line_a.geometry.slope, true);

    let mut line_b = ConicDescriptor::new(
        "psi.slope_bb",
        Family::Psi,
        alpha,
        ["C_Bb", "C_Ab"],
        ImplicitConic::new(0.0, 0.0, 0.0, c0 / (2.0 * ss), -1.0, 0.0),
    );
    line_b.check("slope", ratio.powf(-0.5 * sgn), line_b.geometry.slope, true);

    vec![bb, aa, circle, line_a, line_b]
}

/// Parabolas and ellipse of the φ family. Closed-form values are compared with
/// the extracted geometry as advisory checks.
///
/// Points on the two parabolas through (C_AB, C_ab) are compared in the
/// frame u = C_AB − C_ab, w = C_AB + C_ab.
pub fn phi_conic_parameters(alpha: &MixingAngle) -> Vec<ConicDescriptor> {
    if !alpha.is_interior() {
        return Vec::new();
    }
    let c0 = alpha.c0();
    let k = alpha.cos_sq();
    let p0 = predictability(Family::Phi, alpha).p0;
    let below = alpha.is_below_quarter_pi();
    let sgn = if below { 1.0 } else { -1.0 };

    // (C_AB − C_ab)²/C₀² + (C₀ − C_AB − C_ab)/k = 1 with x = C_ab, y = C_AB
    let t = 1.0 / (c0 * c0);
    let mut sum = ConicDescriptor::new(
        "phi.parabola_sum",
        Family::Phi,
        alpha,
        ["C_ab", "C_AB"],
        ImplicitConic::new(t, -2.0 * t, t, -1.0 / k, -1.0 / k, c0 / k - 1.0),
    );
    let to_uw = |p: [f64; 2]| [p[1] - p[0], p[1] + p[0]];
    let v = sum.geometry.vertex.map(to_uw);
    let f = sum.geometry.foci.first().copied().map(to_uw);
    sum.check("eccentricity", 1.0, sum.geometry.eccentricity, false);
    sum.check("vertex_u", 0.0, v.map(|p| p[0]), false);
    sum.check("vertex_w", c0 - (1.0 + sgn * p0) / 2.0, v.map(|p| p[1]), false);
    sum.check("focus_u", 0.0, f.map(|p| p[0]), false);
    sum.check("focus_w", c0 - sgn * p0, f.map(|p| p[1]), false);

    // (C_AB − C_ab)²/C₀² + C_Aa²/k² = 1
    let mut ellipse = ConicDescriptor::new(
        "phi.ellipse_arm",
        Family::Phi,
        alpha,
        ["C_AB-C_ab", "C_Aa"],
        ImplicitConic::new(1.0 / (c0 * c0), 0.0, 1.0 / (k * k), 0.0, 0.0, -1.0),
    );
    let (eps, focal) = match (alpha.cmp_tan_ratio(1, 2), below) {
        (std::cmp::Ordering::Less, _) => (
            ((5.0 * p0 - 3.0) / (1.0 + p0)).sqrt(),
            ((5.0 * p0 - 3.0) * (1.0 + p0)).sqrt() / 2.0,
        ),
        (_, true) => (
            ((3.0 - 5.0 * p0) / (4.0 * (1.0 - p0))).sqrt(),
            ((3.0 - 5.0 * p0) * (1.0 + p0)).sqrt() / 2.0,
        ),
        (_, false) => (
            ((3.0 + 5.0 * p0) / (4.0 * (1.0 + p0))).sqrt(),
            ((3.0 + 5.0 * p0) * (1.0 - p0)).sqrt() / 2.0,
        ),
    };
    ellipse.check("eccentricity", eps, ellipse.geometry.eccentricity, false);
    ellipse.check("focal_distance", focal, ellipse.geometry.focal_distance, false);

    // C_AB + C_ab = C₀ − C_Aa²/k with x = C_Aa, y = C_AB + C_ab
    let mut arm = ConicDescriptor::new(
        "phi.parabola_arm",
        Family::Phi,
        alpha,
        ["C_Aa", "C_AB+C_ab"],
        ImplicitConic::new(1.0 / k, 0.0, 0.0, 0.0, 1.0, -c0),
    );
    let v = arm.geometry.vertex;
    let f = arm.geometry.foci.first().copied();
    let root = (1.0 - p0 * p0).sqrt();
    arm.check("vertex_x", 0.0, v.map(|p| p[0]), false);
    arm.check("vertex_y", root, v.map(|p| p[1]), false);
    arm.check("focus_x", 0.0, f.map(|p| p[0]), false);
    arm.check("focus_y", (1.0 - p0).sqrt() - (1.0 + sgn * p0), f.map(|p| p[1]), false);

    // C_Ab + (C_Aa − C₀/2)²/(2k) = C₀²/(8k) with x = C_Aa, y = C_Ab
    let mut cross = ConicDescriptor::new(
        "phi.parabola_cross",
        Family::Phi,
        alpha,
        ["C_Aa", "C_Ab"],
        ImplicitConic::new(1.0 / (2.0 * k), 0.0, 0.0, -c0 / (2.0 * k), 1.0, 0.0),
    );
    let v = cross.geometry.vertex;
    let f = cross.geometry.foci.first().copied();
    cross.check("vertex_x", root / 2.0, v.map(|p| p[0]), false);
    cross.check("vertex_y", (1.0 - sgn * p0) / 2.0, v.map(|p| p[1]), false);
    cross.check("focus_x", root / 2.0, f.map(|p| p[0]), false);
    cross.check("focus_y", -sgn * p0 / 2.0, f.map(|p| p[1]), false);

    vec![sum, ellipse, arm, cross]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn descriptor<'a>(list: &'a [ConicDescriptor], id: &str) -> &'a ConicDescriptor {
        list.iter().find(|d| d.id == id).unwrap()
    }

    #[test]
    fn axis_aligned_ellipse() {
        // x²/9 + y²/4 = 1
        let g = ImplicitConic::new(1.0 / 9.0, 0.0, 0.25, 0.0, 0.0, -1.0).geometry();
        assert_eq!(g.kind, ConicKind::Ellipse);
        let [a, b] = g.semi_axes.unwrap();
        assert!(close(a, 3.0, 1e-14) && close(b, 2.0, 1e-14));
        assert!(close(g.eccentricity.unwrap(), 5f64.sqrt() / 3.0, 1e-15));
        assert!(close(g.focal_distance.unwrap(), 5f64.sqrt(), 1e-14));
        assert!(close(g.axis.unwrap()[0].abs(), 1.0, 1e-15));
    }

    #[test]
    fn rotated_shifted_ellipse() {
        // x²/9 + y²/4 = 1 rotated by θ and moved to (1, −2)
        let (th, cx, cy) = (0.7f64, 1.0, -2.0);
        let (s, c) = th.sin_cos();
        let (p, q) = (1.0 / 9.0, 0.25);
        let a = p * c * c + q * s * s;
        let b = 2.0 * (p - q) * s * c;
        let cc = p * s * s + q * c * c;
        let conic = ImplicitConic::new(
            a,
            b,
            cc,
            -2.0 * a * cx - b * cy,
            -2.0 * cc * cy - b * cx,
            a * cx * cx + b * cx * cy + cc * cy * cy - 1.0,
        );
        let g = conic.geometry();
        let center = g.center.unwrap();
        assert!(close(center[0], cx, 1e-12) && close(center[1], cy, 1e-12));
        let [major, minor] = g.semi_axes.unwrap();
        assert!(close(major, 3.0, 1e-12) && close(minor, 2.0, 1e-12));
        let axis = g.axis.unwrap();
        assert!(close((axis[1] / axis[0]).atan(), th, 1e-12));
        for focus in &g.foci {
            assert!(conic.eval(focus[0], focus[1]) < 0.0);
        }
    }

    #[test]
    fn parabola_vertex_and_focus() {
        // y = x²/4 + 1: vertex (0, 1), focus (0, 2)
        let g = ImplicitConic::new(0.25, 0.0, 0.0, 0.0, -1.0, 1.0).geometry();
        assert_eq!(g.kind, ConicKind::Parabola);
        let v = g.vertex.unwrap();
        let f = g.foci[0];
        assert!(close(v[0], 0.0, 1e-15) && close(v[1], 1.0, 1e-15));
        assert!(close(f[0], 0.0, 1e-15) && close(f[1], 2.0, 1e-15));
        assert_eq!(g.axis.unwrap(), [0.0, 1.0]);
    }

    #[test]
    fn rotated_parabola() {
        // v = u² in a frame rotated by 45°: u = (x − y)/√2, v = (x + y)/√2
        let r = 0.5f64.sqrt();
        let conic = ImplicitConic::new(0.5, -1.0, 0.5, -r, -r, 0.0);
        let g = conic.geometry();
        assert_eq!(g.kind, ConicKind::Parabola);
        let v = g.vertex.unwrap();
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        let f = g.foci[0];
        // focus at v = 1/4
        assert!(close(f[0], 0.25 * r, 1e-15) && close(f[1], 0.25 * r, 1e-15));
    }

    #[test]
    fn lines_and_hyperbolas() {
        let g = ImplicitConic::new(0.0, 0.0, 0.0, 2.0, -1.0, 0.0).geometry();
        assert_eq!(g.kind, ConicKind::Line);
        assert_eq!(g.slope, Some(2.0));
        let h = ImplicitConic::new(1.0, 0.0, -1.0, 0.0, 0.0, -1.0).geometry();
        assert_eq!(h.kind, ConicKind::Hyperbola);
        assert!(close(h.eccentricity.unwrap(), 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn psi_circles_at_quarter_pi() {
        let list = psi_conic_parameters(&MixingAngle::quarter_pi());
        for id in ["psi.ellipse_aa", "psi.ellipse_bb"] {
            let d = descriptor(&list, id);
            assert_eq!(d.geometry.kind, ConicKind::Circle);
            assert_eq!(d.geometry.eccentricity, Some(0.0));
            assert_eq!(d.check_named("focal_distance").unwrap().formula, 0.0);
            assert!(d.passed());
        }
    }

    #[test]
    fn psi_focus_ratio_at_pi_over_six() {
        let list = psi_conic_parameters(&MixingAngle::from_radians(PI / 6.0));
        let fa = descriptor(&list, "psi.ellipse_bb").check_named("focal_distance").unwrap();
        let fb = descriptor(&list, "psi.ellipse_aa").check_named("focal_distance").unwrap();
        assert!(close(fb.formula / fa.formula, 3f64.sqrt(), 1e-12));
        assert!(close(fb.geometric / fa.geometric, 3f64.sqrt(), 1e-12));
        let e = descriptor(&list, "psi.ellipse_bb").check_named("eccentricity").unwrap();
        assert!(close(e.formula, (2.0f64 / 3.0).sqrt(), 1e-12));
        assert!(e.difference <= 1e-12);
        let m = descriptor(&list, "psi.slope_aa").check_named("slope").unwrap();
        assert!(close(m.geometric, 1.0 / 3f64.sqrt(), 1e-12));
    }

    #[test]
    fn psi_two_routes_agree_on_grid() {
        for alpha in MixingAngle::merge_grid(MixingAngle::uniform_grid(65), &MixingAngle::special_points()) {
            for d in psi_conic_parameters(&alpha) {
                assert!(d.passed(), "{alpha} {d:?}");
            }
        }
    }

    #[test]
    fn phi_semicircle_at_threshold_angle() {
        let list = phi_conic_parameters(&MixingAngle::atan_half());
        let e = descriptor(&list, "phi.ellipse_arm");
        let f = e.check_named("focal_distance").unwrap();
        assert_eq!(f.formula, 0.0);
        assert!(f.geometric.abs() <= 1e-9);
        assert_eq!(e.geometry.kind, ConicKind::Circle);
        // the sum parabola's vertex sits at the origin
        let v = descriptor(&list, "phi.parabola_sum").check_named("vertex_w").unwrap();
        assert!(v.formula.abs() < 1e-15 && v.geometric.abs() < 1e-12);
    }

    #[test]
    fn phi_eccentricity_branches_match_geometry() {
        for alpha in MixingAngle::merge_grid(MixingAngle::uniform_grid(65), &MixingAngle::special_points()) {
            for d in phi_conic_parameters(&alpha) {
                if d.id == "phi.ellipse_arm" || d.id == "phi.parabola_sum" {
                    for c in &d.checks {
                        assert!(c.agrees, "{alpha} {} {c:?}", d.id);
                    }
                }
            }
        }
        let list = phi_conic_parameters(&MixingAngle::quarter_pi());
        let e = descriptor(&list, "phi.ellipse_arm").check_named("eccentricity").unwrap();
        assert!(close(e.formula, 0.75f64.sqrt(), 1e-15));
    }

    #[test]
    fn phi_parabola_points_report_known_differences() {
        let alpha = MixingAngle::from_radians(PI / 3.0);
        let list = phi_conic_parameters(&alpha);
        let arm = descriptor(&list, "phi.parabola_arm");
        assert!(arm.check_named("vertex_y").unwrap().agrees);
        let focus = arm.check_named("focus_y").unwrap();
        assert!(close(focus.geometric, alpha.c0() - alpha.cos_sq() / 4.0, 1e-14));
        assert!(!focus.agrees && !focus.binding);

        let cross = descriptor(&list, "phi.parabola_cross");
        let v = cross.check_named("vertex_y").unwrap();
        assert!(close(v.geometric, v.formula / 2.0, 1e-14));
        assert!(cross.check_named("focus_y").unwrap().agrees);
        assert!(cross.check_named("vertex_x").unwrap().agrees);
        assert!(cross.passed());
    }

    #[test]
    fn endpoints_produce_no_descriptors() {
        assert!(psi_conic_parameters(&MixingAngle::zero()).is_empty());
        assert!(phi_conic_parameters(&MixingAngle::half_pi()).is_empty());
    }
}
