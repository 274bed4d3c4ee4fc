//! Signed areas, the Abelian phase and the closed-form box areas.

use serde::Serialize;

use crate::connection::{
    abelian_curvature, connection_closed_form, printed_abelian_coefficient, ControlParam,
    ControlPoint, Couplings, SignConvention,
};
use crate::error::{Error, Result};

use super::path::{BoxCorners, ParameterPath};

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// ∫₀¹ f(s) ds by composite Gauss–Legendre.
fn integrate_unit(mut f: impl FnMut(f64) -> f64, panels: usize) -> f64 {
    let rule = gauss_legendre(16);
    let h = 1.0 / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        for &(x, w) in &rule {
            acc += w * h * f((k as f64 + x) * h);
        }
    }
    acc
}

/// Shoelace area of a closed path projected on `plane`; counterclockwise is positive.
pub fn signed_area(path: &ParameterPath, plane: (ControlParam, ControlParam)) -> Result<f64> {
    path.require_closed()?;
    if !path.lies_in_plane(plane) {
        return Err(Error::InvalidPath(format!(
            "path does not lie in the ({}, {}) plane",
            plane.0, plane.1
        )));
    }
    let mut twice = 0.0;
    for w in path.vertices.windows(2) {
        let (x0, y0) = (w[0].get(plane.0), w[0].get(plane.1));
        let (x1, y1) = (w[1].get(plane.0), w[1].get(plane.1));
        twice += x0 * y1 - x1 * y0;
    }
    Ok(0.5 * twice)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AbelianPhase {
    pub area: f64,
    /// −S₁/(16u²λB).
    pub gamma_paper: f64,
    /// ∮[A(E_x′)dE_x′ + A(E_y′)dE_y′] with the resolved connection.
    pub gamma_oracle_consistent: f64,
    /// Curvature of the resolved connection times the signed area.
    pub curvature_times_area: f64,
}

fn abelian_line_integral(path: &ParameterPath, couplings: &Couplings, m: usize) -> Result<f64> {
    let conv = SignConvention::RESOLVED;
    let mut total = 0.0;
    for (a, b) in path.segments() {
        let (dx, dy) = (b.ex - a.ex, b.ey - a.ey);
        let mut err = None;
        total += integrate_unit(
            |s| {
                let p = a.lerp(b, s);
                let ax = connection_closed_form(ControlParam::Ex, &p, couplings, m, m, &conv);
                let ay = connection_closed_form(ControlParam::Ey, &p, couplings, m, m, &conv);
                match (ax, ay) {
                    (Ok(ax), Ok(ay)) => ax.re * dx + ay.re * dy,
                    (Err(e), _) | (_, Err(e)) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            1,
        );
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(total)
}

/// Abelian phase of a closed loop in the (E_x′, E_y′) plane.
pub fn abelian_phase(path: &ParameterPath, couplings: &Couplings) -> Result<AbelianPhase> {
    let area = signed_area(path, (ControlParam::Ex, ControlParam::Ey))?;
    let v0 = path.vertices[0];
    let gamma_oracle_consistent = abelian_line_integral(path, couplings, 0)?;
    for m in [1, 4] {
        let other = abelian_line_integral(path, couplings, m)?;
        debug_assert!((other - gamma_oracle_consistent).abs() <= 1e-12 * (1.0 + other.abs()));
        if (other - gamma_oracle_consistent).abs() > 1e-12 * (1.0 + other.abs()) {
            return Err(Error::Convergence("Abelian phase depends on the diagonal index".into()));
        }
    }
    Ok(AbelianPhase {
        area,
        gamma_paper: printed_abelian_coefficient(v0.lambda, v0.b, couplings) * area,
        gamma_oracle_consistent,
        curvature_times_area: abelian_curvature(v0.lambda, v0.b, couplings, &SignConvention::RESOLVED)
            * area,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AreaFormula {
    S2,
    S3,
    S4,
}

impl std::str::FromStr for AreaFormula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S2" => Ok(AreaFormula::S2),
            "S3" => Ok(AreaFormula::S3),
            "S4" => Ok(AreaFormula::S4),
            _ => Err(Error::InvalidConfig(format!("unknown area formula '{s}'"))),
        }
    }
}

/// The printed closed forms for S₂, S₃ and S₄.
pub fn area_s_formula(c: &BoxCorners, which: AreaFormula) -> Result<f64> {
    for (name, v) in [("lambda1", c.lam1), ("lambda2", c.lam2), ("B1", c.b1), ("B2", c.b2)] {
        if !(v > 0.0) {
            return Err(Error::OutOfRange(format!("{name} must be positive, got {v}")));
        }
    }
    // Every printed form is a multiple of E_y2 − E_y1; keep that zero exact.
    if c.ey1 == c.ey2 {
        return Ok(0.0);
    }
    let (sl1, sl2, sb1, sb2) = (c.lam1.sqrt(), c.lam2.sqrt(), c.b1.sqrt(), c.b2.sqrt());
    let db = 1.0 / sb2 - 1.0 / sb1;
    let dl = 1.0 / sl2 - 1.0 / sl1;
    Ok(match which {
        AreaFormula::S2 => (c.ey2 / sl2 - c.ey1 / sl1) * db - (c.ey1 / sb2 - c.ey2 / sb1) * dl,
        AreaFormula::S3 => (c.ey2 / sl2 - c.ey1 / sl1) * db - c.ey2 * db * dl,
        AreaFormula::S4 => (c.ey1 / sl2 - c.ey2 / sl1) * db - c.ey1 * db * dl,
    })
}

/// S = ∮ (λB)^{−1/2} dE_y′ by quadrature along the path.
pub fn area_line_integral(path: &ParameterPath) -> Result<f64> {
    path.require_closed()?;
    let mut total = 0.0;
    for (a, b) in path.segments() {
        let dey = b.ey - a.ey;
        if dey == 0.0 {
            continue;
        }
        total += dey
            * integrate_unit(
                |s| {
                    let p: ControlPoint = a.lerp(b, s);
                    1.0 / (p.lambda * p.b).sqrt()
                },
                8,
            );
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AreaCheck {
    pub which: AreaFormula,
    pub line_integral: f64,
    pub formula: f64,
    pub deviation: f64,
    pub matches: bool,
}

pub const AREA_TOL: f64 = 1e-9;

/// Compares a printed area formula with the quadrature along `path`.
pub fn line_integral_area_check(
    path: &ParameterPath,
    corners: &BoxCorners,
    which: AreaFormula,
) -> Result<AreaCheck> {
    let line_integral = area_line_integral(path)?;
    let formula = area_s_formula(corners, which)?;
    let deviation = (line_integral - formula).abs();
    Ok(AreaCheck {
        which,
        line_integral,
        formula,
        deviation,
        matches: deviation <= AREA_TOL,
    })
}
