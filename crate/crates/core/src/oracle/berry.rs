//! Finite-difference Berry connection and the Wilson-loop holonomy, both
//! built only from grid states and quadrature overlaps.
//!
//! The oracle runs in natural units (M = ħ = α = 1).

use crate::connection::{ControlParam, ControlPoint, Couplings, MWindow};
use crate::error::{Error, Result};
use crate::holonomy::{HolonomyResult, ParameterPath, Scheme};
use crate::linalg::{max_abs_diff, polar_unitary, unitarity_defect, CMatrix, C64, I};
use crate::params::Sigma;

use super::grid::{build_level_grid, displace_state_grid, Grid2D, WaveField};

/// Displaced window states ψ_m(ξ) = D(ν(ξ))|n, m; l(ξ)⟩ for m in the window.
pub fn window_states(
    point: &ControlPoint,
    n: usize,
    window: MWindow,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<Vec<WaveField>> {
    point.check_positive()?;
    let c = Couplings::NATURAL;
    let l = c.l_m(point);
    let nu = c.nu(point);
    build_level_grid(n, window.hi, l, sigma, grid)?
        .into_iter()
        .skip(window.lo)
        .map(|s| displace_state_grid(&s, nu, grid))
        .collect()
}

fn overlaps(a: &[WaveField], b: &[WaveField], grid: &Grid2D) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i].overlap(&b[j], grid))
}

#[derive(Debug, Clone)]
pub struct FdConnection {
    pub param: ControlParam,
    pub point: ControlPoint,
    pub window: MWindow,
    /// Richardson combination (4A(h/2) − A(h))/3.
    pub matrix: CMatrix,
    pub coarse: CMatrix,
    pub fine: CMatrix,
    /// max |A(h) − A(h/2)|, which scales as h².
    pub richardson_delta: f64,
}

fn central(
    param: ControlParam,
    point: &ControlPoint,
    h: f64,
    n: usize,
    window: MWindow,
    sigma: Sigma,
    grid: &Grid2D,
    here: &[WaveField],
) -> Result<CMatrix> {
    let x = point.get(param);
    let plus = window_states(&point.with(param, x + h), n, window, sigma, grid)?;
    let minus = window_states(&point.with(param, x - h), n, window, sigma, grid)?;
    let d = (overlaps(here, &plus, grid) - overlaps(here, &minus, grid)) / C64::new(2.0 * h, 0.0);
    Ok(d * I)
}

/// A_{kℓ} = i⟨ψ_k|∂_ξ ψ_ℓ⟩ by central differences over the window.
pub fn berry_connection_fd(
    param: ControlParam,
    point: &ControlPoint,
    h_step: f64,
    n: usize,
    window: MWindow,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<FdConnection> {
    if !(h_step > 0.0 && h_step.is_finite()) {
        return Err(Error::InvalidConfig(format!("finite-difference step must be positive, got {h_step}")));
    }
    point.with(param, point.get(param) - h_step).check_positive()?;
    let here = window_states(point, n, window, sigma, grid)?;
    let coarse = central(param, point, h_step, n, window, sigma, grid, &here)?;
    let fine = central(param, point, 0.5 * h_step, n, window, sigma, grid, &here)?;
    let matrix = (&fine * C64::new(4.0, 0.0) - &coarse) / C64::new(3.0, 0.0);
    Ok(FdConnection {
        param,
        point: *point,
        window,
        richardson_delta: max_abs_diff(&coarse, &fine),
        matrix,
        coarse,
        fine,
    })
}

/// One matrix element of [`berry_connection_fd`], labelled by m values.
pub fn berry_connection_fd_element(
    param: ControlParam,
    point: &ControlPoint,
    h_step: f64,
    n: usize,
    k_m: usize,
    l_m: usize,
    grid: &Grid2D,
) -> Result<C64> {
    let window = MWindow::new(k_m.min(l_m), k_m.max(l_m))?;
    let fd = berry_connection_fd(param, point, h_step, n, window, Sigma::Plus, grid)?;
    Ok(fd.matrix[(k_m - window.lo, l_m - window.lo)])
}

fn discretise(path: &ParameterPath, steps: usize) -> Vec<ControlPoint> {
    let nseg = path.segments().count().max(1);
    let per = steps.div_ceil(nseg).max(1);
    let mut pts = Vec::new();
    for (a, b) in path.segments() {
        for k in 0..per {
            pts.push(a.lerp(b, k as f64 / per as f64));
        }
    }
    pts.push(path.vertices[0]);
    pts
}

fn wilson_product(
    path: &ParameterPath,
    n: usize,
    window: MWindow,
    steps: usize,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<(CMatrix, usize)> {
    let pts = discretise(path, steps);
    let d = window.len();
    let mut product = CMatrix::identity(d, d);
    let mut prev = window_states(&pts[0], n, window, sigma, grid)?;
    let first = prev.clone();
    for (k, p) in pts.iter().enumerate().skip(1) {
        let next = if k + 1 == pts.len() {
            first.clone()
        } else {
            window_states(p, n, window, sigma, grid)?
        };
        product *= overlaps(&prev, &next, grid);
        prev = next;
    }
    Ok((polar_unitary(&product).adjoint(), pts.len() - 1))
}

/// Γ = polar(M₀M₁⋯M_{N−1})† with (M_k)_{ij} = ⟨ψ_i(ξ_k)|ψ_j(ξ_{k+1})⟩.
pub fn wilson_loop_oracle(
    path: &ParameterPath,
    n: usize,
    window: MWindow,
    steps: usize,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<HolonomyResult> {
    path.require_closed()?;
    if path.segments().count() == 0 {
        let d = window.len();
        return Ok(HolonomyResult {
            matrix: CMatrix::identity(d, d),
            window,
            steps: 0,
            unitarity_defect: 0.0,
            convergence_estimate: 0.0,
            phase_angle: (d == 1).then_some(0.0),
            scheme: Scheme::Midpoint,
        });
    }
    let (gamma, used) = wilson_product(path, n, window, steps, sigma, grid)?;
    let (refined, _) = wilson_product(path, n, window, 2 * used, sigma, grid)?;
    Ok(HolonomyResult {
        unitarity_defect: unitarity_defect(&gamma),
        convergence_estimate: max_abs_diff(&gamma, &refined),
        phase_angle: (window.len() == 1).then(|| gamma[(0, 0)].arg()),
        matrix: gamma,
        window,
        steps: used,
        scheme: Scheme::Midpoint,
    })
}
