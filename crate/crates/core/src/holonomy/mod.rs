//! Closed paths, Abelian phases and path-ordered holonomies.
//!
//! Γ solves dΓ/ds = i A(ξ(s))·ξ′(s) Γ around the loop, so later steps multiply
//! on the left: Γ = U_{N−1} ⋯ U_1 U_0.

pub mod area;
pub mod path;

pub use area::{
    abelian_phase, area_line_integral, area_s_formula, line_integral_area_check, signed_area,
    AbelianPhase, AreaCheck, AreaFormula,
};
pub use path::{BoxCorners, ParameterPath, PathKind};

use log::debug;
use serde::Serialize;

use crate::connection::{contract_tangent, ladder_window, ControlPoint, Couplings, MWindow, SignConvention};
use crate::error::{Error, Result};
use crate::linalg::{
    c, distance_from_identity, exp_i_hermitian, max_abs_diff, unitarity_defect, CMatrix, C64, I,
};

pub const MIN_STEPS: usize = 16;
pub const DEFAULT_STEPS: usize = 1024;
pub const ADAPTIVE_TOL: f64 = 1e-7;
pub const STEP_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// One connection evaluation per step at its midpoint (second order).
    Midpoint,
    /// Two-point Gauss–Legendre Magnus expansion (fourth order).
    Magnus4,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Midpoint => "midpoint",
            Scheme::Magnus4 => "magnus4",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(Scheme::Midpoint),
            "magnus4" | "magnus" => Ok(Scheme::Magnus4),
            _ => Err(Error::InvalidConfig(format!("unknown scheme '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolonomyOptions {
    pub steps: usize,
    pub scheme: Scheme,
    pub convention: SignConvention,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        HolonomyOptions {
            steps: DEFAULT_STEPS,
            scheme: Scheme::Magnus4,
            convention: SignConvention::RESOLVED,
        }
    }
}

impl HolonomyOptions {
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyResult {
    #[serde(skip)]
    pub matrix: CMatrix,
    pub window: MWindow,
    pub steps: usize,
    pub unitarity_defect: f64,
    /// max |Γ(steps) − Γ(2·steps)|.
    pub convergence_estimate: f64,
    /// arg Γ for a 1×1 window.
    pub phase_angle: Option<f64>,
    pub scheme: Scheme,
}

impl HolonomyResult {
    pub fn distance_from_identity(&self) -> f64 {
        distance_from_identity(&self.matrix)
    }
}

struct Propagation {
    gamma: CMatrix,
    /// Σ of the first-order exponents, i.e. ∮A without ordering.
    first_order: CMatrix,
    steps: usize,
}

fn check_path(path: &ParameterPath) -> Result<()> {
    path.require_closed()?;
    for v in &path.vertices {
        v.check_positive()?;
    }
    Ok(())
}

fn steps_per_segment(path: &ParameterPath, steps: usize) -> usize {
    let nseg = path.segments().count().max(1);
    steps.div_ceil(nseg).max(1)
}

fn propagate(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
    mut observe: impl FnMut(usize, &CMatrix),
) -> Result<Propagation> {
    let d = window.len();
    let per = steps_per_segment(path, opts.steps);
    let h = 1.0 / per as f64;
    let offset = h * (3f64.sqrt() / 6.0);
    let mut gamma = CMatrix::identity(d, d);
    let mut first_order = CMatrix::zeros(d, d);
    let mut count = 0;
    for (a, b) in path.segments() {
        let tangent = {
            let (pa, pb) = (a.to_array(), b.to_array());
            std::array::from_fn(|i| pb[i] - pa[i])
        };
        let eval = |s: f64| -> Result<CMatrix> {
            let p: ControlPoint = a.lerp(b, s);
            contract_tangent(&p, tangent, couplings, window, &opts.convention)
        };
        for k in 0..per {
            let mid = (k as f64 + 0.5) * h;
            let (gen, first) = match opts.scheme {
                Scheme::Midpoint => {
                    let g = eval(mid)? * c(h, 0.0);
                    (g.clone(), g)
                }
                Scheme::Magnus4 => {
                    let a1 = eval(mid - offset)?;
                    let a2 = eval(mid + offset)?;
                    let first = (&a1 + &a2) * c(0.5 * h, 0.0);
                    let comm = &a1 * &a2 - &a2 * &a1;
                    let second = comm * (-I * (3f64.sqrt() / 12.0) * h * h);
                    (&first + second, first)
                }
            };
            gamma = exp_i_hermitian(&gen) * gamma;
            first_order += first;
            count += 1;
            observe(count, &gamma);
        }
    }
    Ok(Propagation {
        gamma,
        first_order,
        steps: count,
    })
}

fn finish(prop: Propagation, refined: &CMatrix, window: MWindow, scheme: Scheme) -> HolonomyResult {
    let phase_angle = (window.len() == 1).then(|| prop.gamma[(0, 0)].arg());
    HolonomyResult {
        unitarity_defect: unitarity_defect(&prop.gamma),
        convergence_estimate: max_abs_diff(&prop.gamma, refined),
        matrix: prop.gamma,
        window,
        steps: prop.steps,
        phase_angle,
        scheme,
    }
}

/// Path-ordered holonomy over the m-window of level `n`.
///
/// In the m-labelling the connection is the same for every level, so `n`
/// only enters through the window; it is kept for the record.
pub fn holonomy_path_ordered(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
) -> Result<HolonomyResult> {
    check_path(path)?;
    if opts.steps < MIN_STEPS {
        return Err(Error::InvalidConfig(format!(
            "steps must be at least {MIN_STEPS}, got {}",
            opts.steps
        )));
    }
    let coarse = propagate(path, couplings, window, opts, |_, _| {})?;
    let fine_opts = opts.with_steps(2 * coarse.steps);
    let fine = propagate(path, couplings, window, &fine_opts, |_, _| {})?;
    Ok(finish(coarse, &fine.gamma, window, opts.scheme))
}

/// Doubles the step count from `opts.steps` until the estimate is within `tol`.
pub fn holonomy_adaptive(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
    tol: f64,
) -> Result<HolonomyResult> {
    check_path(path)?;
    let mut steps = opts.steps.max(MIN_STEPS);
    let mut current = propagate(path, couplings, window, &opts.with_steps(steps), |_, _| {})?;
    loop {
        let next = propagate(path, couplings, window, &opts.with_steps(2 * current.steps), |_, _| {})?;
        let est = max_abs_diff(&current.gamma, &next.gamma);
        debug!("holonomy steps {} estimate {est:e}", current.steps);
        if est <= tol {
            return Ok(finish(current, &next.gamma, window, opts.scheme));
        }
        steps = next.steps;
        if steps > STEP_CAP {
            return Err(Error::Convergence(format!(
                "holonomy estimate {est:e} above {tol:e} at the step cap {STEP_CAP}"
            )));
        }
        current = next;
    }
}

/// (steps, convergence estimate) over successive doublings.
pub fn convergence_series(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
    levels: usize,
) -> Result<Vec<(usize, f64)>> {
    check_path(path)?;
    let mut out = Vec::with_capacity(levels);
    let mut current = propagate(path, couplings, window, opts, |_, _| {})?;
    for _ in 0..levels {
        let next = propagate(path, couplings, window, &opts.with_steps(2 * current.steps), |_, _| {})?;
        out.push((current.steps, max_abs_diff(&current.gamma, &next.gamma)));
        current = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PartialProduct {
    pub step: usize,
    pub unitarity_defect: f64,
    pub distance_from_identity: f64,
}

/// Diagnostics of every partial product along the loop.
pub fn partial_products(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
) -> Result<Vec<PartialProduct>> {
    check_path(path)?;
    let mut out = Vec::new();
    propagate(path, couplings, window, opts, |step, g| {
        out.push(PartialProduct {
            step,
            unitarity_defect: unitarity_defect(g),
            distance_from_identity: distance_from_identity(g),
        })
    })?;
    Ok(out)
}

/// Θ = 2u·S·T, the printed commuting-case angle.
pub fn gamma_offdiag_closed_form(s: f64, u: f64, window: MWindow) -> CMatrix {
    ladder_window(window) * c(2.0 * u * s, 0.0)
}

/// Θ = S·T/(4u) from the resolved connection; equals the printed angle when α = ħ.
pub fn commuting_angle(s: f64, couplings: &Couplings, window: MWindow) -> CMatrix {
    ladder_window(window) * c(s / (4.0 * couplings.u()), 0.0)
}

/// Closed-form holonomy exp(iΘ) of an E_x′ ≡ 0 loop, with S from quadrature.
pub fn commuting_holonomy(path: &ParameterPath, couplings: &Couplings, window: MWindow) -> Result<CMatrix> {
    if path.any_ex_nonzero() {
        return Err(Error::InvalidPath(
            "the commuting closed form needs E_x' = 0 along the path".into(),
        ));
    }
    let s = area_line_integral(path)?;
    Ok(exp_i_hermitian(&commuting_angle(s, couplings, window)))
}

#[derive(Debug, Clone, Serialize)]
pub struct FourParamHolonomy {
    pub result: HolonomyResult,
    /// max |Γ − exp(i∮A)| with the ordering dropped.
    pub commutation_diagnostic: f64,
    /// Spectral-norm-free size of the largest commutator of sampled generators.
    pub max_commutator: f64,
}

pub fn four_param_holonomy(
    path: &ParameterPath,
    couplings: &Couplings,
    window: MWindow,
    opts: &HolonomyOptions,
) -> Result<FourParamHolonomy> {
    let result = holonomy_path_ordered(path, couplings, window, opts)?;
    let prop = propagate(path, couplings, window, opts, |_, _| {})?;
    let unordered = exp_i_hermitian(&prop.first_order);
    let commutation_diagnostic = max_abs_diff(&result.matrix, &unordered);

    let mut gens = Vec::new();
    for (a, b) in path.segments() {
        let (pa, pb) = (a.to_array(), b.to_array());
        let t: [f64; 4] = std::array::from_fn(|i| pb[i] - pa[i]);
        gens.push(contract_tangent(&a.lerp(b, 0.5), t, couplings, window, &opts.convention)?);
    }
    let mut max_commutator: f64 = 0.0;
    for x in &gens {
        for y in &gens {
            max_commutator = max_commutator.max(crate::linalg::max_abs(&(x * y - y * x)));
        }
    }
    Ok(FourParamHolonomy {
        result,
        commutation_diagnostic,
        max_commutator,
    })
}

/// Row-major (re, im) pairs of a matrix, for serialisation.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn phase_of(z: C64) -> f64 {
    z.arg()
}
