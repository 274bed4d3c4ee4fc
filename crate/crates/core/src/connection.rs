//! Mead-Berry connection over the control space (E_x′, E_y′, λ, B).
//!
//! Matrix elements are indexed by m = n + σℓ inside a fixed Landau level.
//! In that labelling the connection does not depend on n or σ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, CMatrix, C64};
use crate::params::PhysicalConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ControlParam {
    Ex,
    Ey,
    Lambda,
    B,
}

impl ControlParam {
    pub const ALL: [ControlParam; 4] = [
        ControlParam::Ex,
        ControlParam::Ey,
        ControlParam::Lambda,
        ControlParam::B,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ControlParam::Ex => "Ex",
            ControlParam::Ey => "Ey",
            ControlParam::Lambda => "lambda",
            ControlParam::B => "B",
        }
    }
}

impl fmt::Display for ControlParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ex" | "ex'" => Ok(ControlParam::Ex),
            "ey" | "ey'" => Ok(ControlParam::Ey),
            "lambda" | "lam" | "l" => Ok(ControlParam::Lambda),
            "b" => Ok(ControlParam::B),
            _ => Err(Error::InvalidConfig(format!("unknown control parameter '{s}'"))),
        }
    }
}

/// A point (E_x′, E_y′, λ, B) of control space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub ex: f64,
    pub ey: f64,
    pub lambda: f64,
    pub b: f64,
}

impl ControlPoint {
    pub fn new(ex: f64, ey: f64, lambda: f64, b: f64) -> Self {
        ControlPoint { ex, ey, lambda, b }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        ControlPoint::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.ex, self.ey, self.lambda, self.b]
    }

    pub fn get(&self, p: ControlParam) -> f64 {
        self.to_array()[p.index()]
    }

    pub fn with(self, p: ControlParam, value: f64) -> Self {
        let mut v = self.to_array();
        v[p.index()] = value;
        ControlPoint::from_array(v)
    }

    pub fn lerp(self, other: ControlPoint, t: f64) -> Self {
        let (a, b) = (self.to_array(), other.to_array());
        ControlPoint::from_array(std::array::from_fn(|i| a[i] + t * (b[i] - a[i])))
    }

    pub fn check_positive(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.b > 0.0) {
            return Err(Error::OutOfRange(format!(
                "lambda and B must be positive, got lambda = {}, B = {}",
                self.lambda, self.b
            )));
        }
        if !self.to_array().iter().all(|v| v.is_finite()) {
            return Err(Error::OutOfRange("non-finite control point".into()));
        }
        Ok(())
    }
}

/// The two couplings the connection depends on besides the control point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Couplings {
    pub alpha: f64,
    pub hbar: f64,
}

impl Couplings {
    pub const NATURAL: Couplings = Couplings { alpha: 1.0, hbar: 1.0 };

    pub fn of(config: &PhysicalConfig) -> Self {
        Couplings {
            alpha: config.alpha,
            hbar: config.hbar,
        }
    }

    /// u = √(ħ/(8α)).
    pub fn u(&self) -> f64 {
        (self.hbar / (8.0 * self.alpha)).sqrt()
    }

    pub fn l_m(&self, p: &ControlPoint) -> f64 {
        (self.hbar / (self.alpha * p.lambda * p.b)).sqrt()
    }

    /// ν at a control point.
    pub fn nu(&self, p: &ControlPoint) -> C64 {
        let k = -self.alpha * self.l_m(p) / (std::f64::consts::SQRT_2 * self.hbar);
        C64::new(k * p.ey, k * p.ex)
    }
}

/// Signs used when evaluating the connection, relative to the printed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignConvention {
    pub label: &'static str,
    /// Multiplier of the printed closed form A(E_x′) = −E_y′/(16u²λB).
    pub ex: f64,
    /// Multiplier of the printed closed form A(E_y′) = −E_x′/(16u²λB).
    pub ey: f64,
    /// Multiplier of the printed λ and B closed forms.
    pub off_diagonal: f64,
    /// Sign in front of the dilation term of the chain-rule form.
    pub chain_dilation: f64,
    /// λ/B prefactor 1/(8u) instead of the printed u.
    pub derived_prefactor: bool,
}

impl SignConvention {
    pub const PRINTED: SignConvention = SignConvention {
        label: "printed",
        ex: 1.0,
        ey: 1.0,
        off_diagonal: 1.0,
        chain_dilation: -1.0,
        derived_prefactor: false,
    };

    /// Signs measured by the finite-difference oracle.
    pub const RESOLVED: SignConvention = SignConvention {
        label: "resolved",
        ex: 1.0,
        ey: -1.0,
        off_diagonal: -1.0,
        chain_dilation: 1.0,
        derived_prefactor: true,
    };

    fn prefactor(&self, c: &Couplings) -> f64 {
        if self.derived_prefactor {
            1.0 / (8.0 * c.u())
        } else {
            c.u()
        }
    }
}

/// Inclusive m-range of a degenerate-subspace window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MWindow {
    pub lo: usize,
    pub hi: usize,
}

impl MWindow {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidBasis(format!("empty m-window {lo}..{hi}")));
        }
        Ok(MWindow { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl Default for MWindow {
    fn default() -> Self {
        MWindow { lo: 0, hi: 8 }
    }
}

impl fmt::Display for MWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for MWindow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidBasis(format!("window must look like lo..hi, got '{s}'"));
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        MWindow::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        )
    }
}

/// (∂ν_x/∂ξ, ∂ν_y/∂ξ) and (∂l_m/∂ξ)/l_m.
fn derivatives(param: ControlParam, p: &ControlPoint, c: &Couplings) -> ((f64, f64), f64) {
    let k = -c.alpha * c.l_m(p) / (std::f64::consts::SQRT_2 * c.hbar);
    let dlog_l = match param {
        ControlParam::Lambda => -0.5 / p.lambda,
        ControlParam::B => -0.5 / p.b,
        _ => 0.0,
    };
    let dnu = match param {
        ControlParam::Ex => (0.0, k),
        ControlParam::Ey => (k, 0.0),
        _ => (k * p.ey * dlog_l, k * p.ex * dlog_l),
    };
    (dnu, dlog_l)
}

fn kronecker(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Chain-rule form: −(ν_x∂ν_y − ν_y∂ν_x)δ + s·(∂l/l)(ν*√(m+1)δ_{k,m+1} + ν√m δ_{k,m−1}),
/// with s = `conv.chain_dilation`.
pub fn connection_general(
    param: ControlParam,
    point: &ControlPoint,
    couplings: &Couplings,
    k_m: usize,
    l_m: usize,
    conv: &SignConvention,
) -> Result<C64> {
    point.check_positive()?;
    let nu = couplings.nu(point);
    let ((dx, dy), dlog_l) = derivatives(param, point, couplings);
    let diag = -(nu.re * dy - nu.im * dx) * kronecker(k_m, l_m);
    let up = if k_m == l_m + 1 {
        nu.conj() * ((l_m + 1) as f64).sqrt()
    } else {
        C64::new(0.0, 0.0)
    };
    let down = if k_m + 1 == l_m {
        nu * (l_m as f64).sqrt()
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(C64::new(diag, 0.0) + (up + down) * (conv.chain_dilation * dlog_l))
}

/// Closed forms for the four parameters, under the given sign convention.
pub fn connection_closed_form(
    param: ControlParam,
    point: &ControlPoint,
    couplings: &Couplings,
    k_m: usize,
    l_m: usize,
    conv: &SignConvention,
) -> Result<C64> {
    point.check_positive()?;
    let ControlPoint { ex, ey, lambda, b } = *point;
    let u = couplings.u();
    let diag = kronecker(k_m, l_m) / (16.0 * u * u * lambda * b);
    let z = C64::new(0.0, 0.0);
    Ok(match param {
        ControlParam::Ex => C64::new(-conv.ex * ey * diag, 0.0),
        ControlParam::Ey => C64::new(-conv.ey * ex * diag, 0.0),
        ControlParam::Lambda | ControlParam::B => {
            let pre = -conv.off_diagonal * conv.prefactor(couplings)
                / if param == ControlParam::Lambda {
                    lambda.powf(1.5) * b.sqrt()
                } else {
                    lambda.sqrt() * b.powf(1.5)
                };
            if k_m == l_m + 1 {
                C64::new(ey, -ex) * (pre * ((l_m + 1) as f64).sqrt())
            } else if k_m + 1 == l_m {
                C64::new(ey, ex) * (pre * (l_m as f64).sqrt())
            } else {
                z
            }
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    /// Max |general − closed form| per parameter, ordered as [`ControlParam::ALL`].
    pub per_param: [f64; 4],
    pub max: f64,
}

pub fn chain_rule_consistency(
    point: &ControlPoint,
    couplings: &Couplings,
    window: MWindow,
    conv: &SignConvention,
) -> Result<ConsistencyReport> {
    let mut per_param = [0.0f64; 4];
    for param in ControlParam::ALL {
        for k in window.values() {
            for l in window.values() {
                let g = connection_general(param, point, couplings, k, l, conv)?;
                let f = connection_closed_form(param, point, couplings, k, l, conv)?;
                per_param[param.index()] = per_param[param.index()].max((g - f).norm());
            }
        }
    }
    let max = per_param.iter().cloned().fold(0.0, f64::max);
    Ok(ConsistencyReport { per_param, max })
}

#[derive(Debug, Clone)]
pub struct ConnectionMatrix {
    pub n: usize,
    pub window: MWindow,
    pub param: ControlParam,
    pub point: ControlPoint,
    pub entries: CMatrix,
}

impl ConnectionMatrix {
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }
}

/// Window matrix of one component built from the closed forms.
pub fn window_matrix(
    param: ControlParam,
    point: &ControlPoint,
    couplings: &Couplings,
    window: MWindow,
    conv: &SignConvention,
) -> Result<CMatrix> {
    point.check_positive()?;
    let d = window.len();
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in i.saturating_sub(1)..(i + 2).min(d) {
            m[(i, j)] =
                connection_closed_form(param, point, couplings, window.lo + i, window.lo + j, conv)?;
        }
    }
    Ok(m)
}

pub fn connection_matrix(
    param: ControlParam,
    point: &ControlPoint,
    couplings: &Couplings,
    n: usize,
    window: MWindow,
    conv: &SignConvention,
) -> Result<ConnectionMatrix> {
    Ok(ConnectionMatrix {
        n,
        window,
        param,
        point: *point,
        entries: window_matrix(param, point, couplings, window, conv)?,
    })
}

/// Σ_ξ A(ξ)·v_ξ for a tangent vector v, as one Hermitian window matrix.
pub fn contract_tangent(
    point: &ControlPoint,
    tangent: [f64; 4],
    couplings: &Couplings,
    window: MWindow,
    conv: &SignConvention,
) -> Result<CMatrix> {
    let d = window.len();
    let mut out = CMatrix::zeros(d, d);
    for param in ControlParam::ALL {
        let t = tangent[param.index()];
        if t != 0.0 {
            out += window_matrix(param, point, couplings, window, conv)? * C64::new(t, 0.0);
        }
    }
    Ok(out)
}

/// Real symmetric tridiagonal window matrix T with T_{m+1,m} = T_{m,m+1} = √(m+1).
pub fn ladder_window(window: MWindow) -> CMatrix {
    let d = window.len();
    let mut t = CMatrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        let v = C64::new(((window.lo + i + 1) as f64).sqrt(), 0.0);
        t[(i + 1, i)] = v;
        t[(i, i + 1)] = v;
    }
    t
}

/// F = ∂_{Ex′}A(E_y′) − ∂_{Ey′}A(E_x′), constant in the (E_x′, E_y′) plane.
pub fn abelian_curvature(lambda: f64, b: f64, couplings: &Couplings, conv: &SignConvention) -> f64 {
    let u = couplings.u();
    (conv.ex - conv.ey) / (16.0 * u * u * lambda * b)
}

/// The printed Abelian coefficient −1/(16u²λB).
pub fn printed_abelian_coefficient(lambda: f64, b: f64, couplings: &Couplings) -> f64 {
    let u = couplings.u();
    -1.0 / (16.0 * u * u * lambda * b)
}
