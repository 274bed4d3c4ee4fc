//! Sign-convention report: which signs the finite-difference connection
//! actually has, compared with the printed and adopted closed forms.

use std::fmt::Write as _;

use serde::Serialize;

use crate::connection::{
    abelian_curvature, connection_closed_form, printed_abelian_coefficient, window_matrix,
    ControlParam, ControlPoint, Couplings, MWindow, SignConvention,
};
use crate::error::Result;
use crate::linalg::{max_abs, max_abs_diff};
use crate::params::Sigma;

use super::berry::berry_connection_fd;
use super::grid::Grid2D;

#[derive(Debug, Clone, Serialize)]
pub struct ComponentSign {
    pub param: ControlParam,
    /// (k, ℓ) as m values.
    pub element: (usize, usize),
    pub finite_difference: [f64; 2],
    pub printed: [f64; 2],
    /// Re(FD/printed); ±1 up to the prefactor ratio.
    pub ratio_to_printed: f64,
    pub measured_sign: i8,
    pub adopted_sign: i8,
    pub agrees_with_adopted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub point: ControlPoint,
    pub n: usize,
    pub window: MWindow,
    pub components: Vec<ComponentSign>,
    /// Sign of the E_y′-coefficient of A(E_x′) over the E_x′-coefficient of A(E_y′).
    pub relative_sign_ex_ey_printed: i8,
    pub relative_sign_ex_ey_measured: i8,
    pub curvature_measured: f64,
    pub curvature_adopted: f64,
    pub printed_coefficient: f64,
    /// curvature_measured / printed_coefficient.
    pub curvature_ratio_to_printed: f64,
    pub factor_two_difference: bool,
    pub orientation_flip: bool,
    /// max|FD − closed form| / max|closed form| per parameter, adopted convention.
    pub relative_deviation: Vec<(ControlParam, f64)>,
    pub all_signs_agree: bool,
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

fn adopted_multiplier(param: ControlParam) -> f64 {
    let c = SignConvention::RESOLVED;
    match param {
        ControlParam::Ex => c.ex,
        ControlParam::Ey => c.ey,
        _ => c.off_diagonal,
    }
}

/// Measures every component at `point` (all four coordinates nonzero).
pub fn sign_report(point: &ControlPoint, n: usize, window: MWindow, grid: &Grid2D) -> Result<SignReport> {
    let nat = Couplings::NATURAL;
    let h = 1e-2;
    let mut components = Vec::new();
    let mut relative_deviation = Vec::new();
    let mut diag = [0.0; 2];
    for param in ControlParam::ALL {
        let fd = berry_connection_fd(param, point, h, n, window, Sigma::Plus, grid)?;
        let adopted = window_matrix(param, point, &nat, window, &SignConvention::RESOLVED)?;
        relative_deviation.push((param, max_abs_diff(&fd.matrix, &adopted) / max_abs(&adopted)));

        let (k, l) = match param {
            ControlParam::Ex | ControlParam::Ey => (window.lo, window.lo),
            _ => (window.lo + 1, window.lo),
        };
        let got = fd.matrix[(k - window.lo, l - window.lo)];
        let printed = connection_closed_form(param, point, &nat, k, l, &SignConvention::PRINTED)?;
        let ratio = (got / printed).re;
        if param == ControlParam::Ex {
            diag[0] = got.re / point.ey;
        } else if param == ControlParam::Ey {
            diag[1] = got.re / point.ex;
        }
        let adopted_sign = sign(adopted_multiplier(param));
        components.push(ComponentSign {
            param,
            element: (k, l),
            finite_difference: [got.re, got.im],
            printed: [printed.re, printed.im],
            ratio_to_printed: ratio,
            measured_sign: sign(ratio),
            adopted_sign,
            agrees_with_adopted: sign(ratio) == adopted_sign,
        });
    }

    // A(E_x′) and A(E_y′) are linear in E′, so a wide stencil is exact.
    let d = 0.2;
    let a_at = |param, p: ControlPoint| -> Result<f64> {
        let fd = berry_connection_fd(param, &p, h, n, window, Sigma::Plus, grid)?;
        Ok(fd.matrix[(0, 0)].re)
    };
    let curvature_measured = (a_at(ControlParam::Ey, point.with(ControlParam::Ex, point.ex + d))?
        - a_at(ControlParam::Ey, point.with(ControlParam::Ex, point.ex - d))?)
        / (2.0 * d)
        - (a_at(ControlParam::Ex, point.with(ControlParam::Ey, point.ey + d))?
            - a_at(ControlParam::Ex, point.with(ControlParam::Ey, point.ey - d))?)
            / (2.0 * d);
    let printed_coefficient = printed_abelian_coefficient(point.lambda, point.b, &nat);
    let ratio = curvature_measured / printed_coefficient;
    let all_signs_agree = components.iter().all(|c| c.agrees_with_adopted);
    Ok(SignReport {
        point: *point,
        n,
        window,
        components,
        relative_sign_ex_ey_printed: 1,
        relative_sign_ex_ey_measured: sign(diag[0] / diag[1]),
        curvature_measured,
        curvature_adopted: abelian_curvature(point.lambda, point.b, &nat, &SignConvention::RESOLVED),
        printed_coefficient,
        curvature_ratio_to_printed: ratio,
        factor_two_difference: (ratio.abs() - 2.0).abs() < 0.01,
        orientation_flip: ratio < 0.0,
        relative_deviation,
        all_signs_agree,
    })
}

impl SignReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.point;
        let _ = writeln!(s, "sign-convention report");
        let _ = writeln!(
            s,
            "point Ex'={} Ey'={} lambda={} B={}  n={}  window {}",
            p.ex, p.ey, p.lambda, p.b, self.n, self.window
        );
        for c in &self.components {
            let _ = writeln!(
                s,
                "  A({:6}) element ({},{})  fd = {:+.6e}{:+.6e}i  printed = {:+.6e}{:+.6e}i  ratio {:+.6}  sign {:+}  adopted {:+}  {}",
                c.param.name(),
                c.element.0,
                c.element.1,
                c.finite_difference[0],
                c.finite_difference[1],
                c.printed[0],
                c.printed[1],
                c.ratio_to_printed,
                c.measured_sign,
                c.adopted_sign,
                if c.agrees_with_adopted { "ok" } else { "MISMATCH" }
            );
        }
        let _ = writeln!(
            s,
            "relative sign of A(Ex')/A(Ey') coefficients: printed {:+}, measured {:+}",
            self.relative_sign_ex_ey_printed, self.relative_sign_ex_ey_measured
        );
        let _ = writeln!(
            s,
            "curvature: measured {:.8}  adopted {:.8}  printed coefficient -1/(16u^2 lambda B) = {:.8}",
            self.curvature_measured, self.curvature_adopted, self.printed_coefficient
        );
        let _ = writeln!(
            s,
            "measured / printed = {:+.6}  factor-2 difference: {}  orientation flip: {}",
            self.curvature_ratio_to_printed,
            if self.factor_two_difference { "YES" } else { "no" },
            if self.orientation_flip { "YES" } else { "no" }
        );
        for (param, dev) in &self.relative_deviation {
            let _ = writeln!(s, "  fd vs adopted closed form, {:6}: relative deviation {:.3e}", param.name(), dev);
        }
        let _ = writeln!(
            s,
            "adopted convention {}",
            if self.all_signs_agree { "CONFIRMED" } else { "CONTRADICTED" }
        );
        s
    }
}
