//! Coordinate-grid wavefunctions with spectral derivatives.
//!
//! Units: ħ = M = 1. A state is described by its magnetic length l, so the
//! cyclotron frequency is 1/l². Arrays are row-major, index iy·N + ix.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, I};
use crate::params::Sigma;

pub const MIN_POINTS: usize = 64;
/// Largest boundary amplitude, relative to the peak, considered decayed.
pub const EDGE_TOL: f64 = 1e-10;

#[derive(Clone)]
pub struct Grid2D {
    pub points: usize,
    pub half_extent: f64,
    pub spacing: f64,
    pub coords: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid2D")
            .field("points", &self.points)
            .field("half_extent", &self.half_extent)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl Grid2D {
    pub fn new(points: usize, half_extent: f64) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(Error::Grid(format!("need at least {MIN_POINTS} points per axis, got {points}")));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(Error::Grid(format!("half extent must be positive, got {half_extent}")));
        }
        let spacing = 2.0 * half_extent / (points - 1) as f64;
        let coords = (0..points).map(|i| -half_extent + i as f64 * spacing).collect();
        let period = points as f64 * spacing;
        let wavenumbers = (0..points)
            .map(|j| {
                let j = j as isize;
                let n = points as isize;
                let jj = if j < n / 2 { j } else { j - n };
                2.0 * std::f64::consts::PI * jj as f64 / period
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Grid2D {
            points,
            half_extent,
            spacing,
            coords,
            wavenumbers,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// How many points `h ≤ l/4` and `L ≥ 6l + shift` leave to spare, as an error.
    pub fn check_adequate(&self, l_m: f64, shift: f64) -> Result<()> {
        if self.spacing > l_m / 4.0 {
            return Err(Error::Grid(format!(
                "spacing {:.4} exceeds l_m/4 = {:.4}",
                self.spacing,
                l_m / 4.0
            )));
        }
        if self.half_extent < 6.0 * l_m + shift {
            return Err(Error::Grid(format!(
                "half extent {:.3} below 6 l_m + shift = {:.3}",
                self.half_extent,
                6.0 * l_m + shift
            )));
        }
        Ok(())
    }

    pub fn x(&self, idx: usize) -> f64 {
        self.coords[idx % self.points]
    }

    pub fn y(&self, idx: usize) -> f64 {
        self.coords[idx / self.points]
    }

    pub fn from_fn(&self, f: impl Fn(f64, f64) -> C64) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.len());
        for &y in &self.coords {
            for &x in &self.coords {
                out.push(f(x, y));
            }
        }
        out
    }

    pub fn inner(&self, a: &[C64], b: &[C64]) -> C64 {
        let s: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        s * (self.spacing * self.spacing)
    }

    pub fn norm(&self, a: &[C64]) -> f64 {
        self.inner(a, a).re.sqrt()
    }

    /// Multiply each row (axis 0 = x) or column (axis 1 = y) in Fourier space.
    fn spectral_axis(&self, f: &[C64], axis: usize, mult: impl Fn(f64) -> C64) -> Vec<C64> {
        let n = self.points;
        let mut out = f.to_vec();
        let mut buf = vec![C64::new(0.0, 0.0); n];
        let factors: Vec<C64> = self.wavenumbers.iter().map(|&k| mult(k) / n as f64).collect();
        for line in 0..n {
            let at = |i: usize| if axis == 0 { line * n + i } else { i * n + line };
            for i in 0..n {
                buf[i] = out[at(i)];
            }
            self.forward.process(&mut buf);
            for (b, fac) in buf.iter_mut().zip(&factors) {
                *b *= fac;
            }
            self.inverse.process(&mut buf);
            for i in 0..n {
                out[at(i)] = buf[i];
            }
        }
        out
    }

    fn nyquist(&self, k: f64) -> bool {
        self.points % 2 == 0 && (k + self.wavenumbers[self.points / 2]).abs() < 1e-12 * k.abs().max(1.0)
    }

    pub fn dx(&self, f: &[C64]) -> Vec<C64> {
        self.spectral_axis(f, 0, |k| if self.nyquist(k) { C64::new(0.0, 0.0) } else { I * k })
    }

    pub fn dy(&self, f: &[C64]) -> Vec<C64> {
        self.spectral_axis(f, 1, |k| if self.nyquist(k) { C64::new(0.0, 0.0) } else { I * k })
    }

    /// f(r) ↦ f(r − a) by the Fourier shift theorem.
    pub fn translate(&self, f: &[C64], a: (f64, f64)) -> Vec<C64> {
        let sx = self.spectral_axis(f, 0, |k| (-I * k * a.0).exp());
        self.spectral_axis(&sx, 1, |k| (-I * k * a.1).exp())
    }

    /// Largest amplitude on the outermost ring of nodes.
    pub fn edge_amplitude(&self, f: &[C64]) -> f64 {
        let n = self.points;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for idx in [i, (n - 1) * n + i, i * n, i * n + n - 1] {
                m = m.max(f[idx].norm());
            }
        }
        m
    }
}

/// Grid wavefunction with its labels.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub values: Vec<C64>,
    pub n: usize,
    pub m: usize,
    pub nu: C64,
    pub l_m: f64,
    pub sigma: Sigma,
}

impl WaveField {
    pub fn norm(&self, grid: &Grid2D) -> f64 {
        grid.norm(&self.values)
    }

    pub fn overlap(&self, other: &WaveField, grid: &Grid2D) -> C64 {
        grid.inner(&self.values, &other.values)
    }

    /// Peak-relative amplitude on the boundary frame.
    pub fn edge_ratio(&self, grid: &Grid2D) -> f64 {
        let peak = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        grid.edge_amplitude(&self.values) / peak.max(f64::MIN_POSITIVE)
    }
}

fn scale(v: &mut [C64], s: f64) {
    for z in v {
        *z *= s;
    }
}

/// Gaussian ground state exp(−r²/(4l²)), renormalised on the grid.
pub fn psi00_grid(l_m: f64, sigma: Sigma, grid: &Grid2D) -> Result<WaveField> {
    if !(l_m > 0.0) {
        return Err(Error::Grid(format!("magnetic length must be positive, got {l_m}")));
    }
    grid.check_adequate(l_m, 0.0)?;
    let mut values = grid.from_fn(|x, y| C64::new((-(x * x + y * y) / (4.0 * l_m * l_m)).exp(), 0.0));
    let norm = grid.norm(&values);
    scale(&mut values, 1.0 / norm);
    Ok(WaveField {
        values,
        n: 0,
        m: 0,
        nu: C64::new(0.0, 0.0),
        l_m,
        sigma,
    })
}

/// Coordinate ladder operators for magnetic length l and orientation σ.
#[derive(Debug, Clone, Copy)]
pub struct GridLadders {
    pub l_m: f64,
    pub sigma: f64,
}

impl GridLadders {
    pub fn new(l_m: f64, sigma: Sigma) -> Self {
        GridLadders {
            l_m,
            sigma: sigma.value(),
        }
    }

    fn combine(
        &self,
        grid: &Grid2D,
        f: &[C64],
        cx: C64,
        cy: C64,
        pos: impl Fn(f64, f64) -> C64,
        pref: f64,
    ) -> Vec<C64> {
        let dx = grid.dx(f);
        let dy = grid.dy(f);
        (0..f.len())
            .map(|i| (cx * dx[i] + cy * dy[i] + pos(grid.x(i), grid.y(i)) * f[i]) * pref)
            .collect()
    }

    /// a₊ = (l/√2)[−i∂x − σ∂y + (ix + σy)/(2l²)].
    pub fn a_raise(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let (l, s) = (self.l_m, self.sigma);
        self.combine(grid, f, -I, C64::new(-s, 0.0), |x, y| C64::new(s * y, x) / (2.0 * l * l), l / 2f64.sqrt())
    }

    /// a₋ = (l/√2)[−i∂x + σ∂y + (−ix + σy)/(2l²)].
    pub fn a_lower(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let (l, s) = (self.l_m, self.sigma);
        self.combine(grid, f, -I, C64::new(s, 0.0), |x, y| C64::new(s * y, -x) / (2.0 * l * l), l / 2f64.sqrt())
    }

    /// b₋ (raises m) = (1/(√2 l))[(x + iσy)/2 − l²(∂x + iσ∂y)].
    pub fn b_raise(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let (l, s) = (self.l_m, self.sigma);
        self.combine(
            grid,
            f,
            C64::new(-l * l, 0.0),
            C64::new(0.0, -s * l * l),
            |x, y| C64::new(x, s * y) * 0.5,
            1.0 / (2f64.sqrt() * l),
        )
    }

    /// b₊ (lowers m) = (1/(√2 l))[(x − iσy)/2 + l²(∂x − iσ∂y)].
    pub fn b_lower(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let (l, s) = (self.l_m, self.sigma);
        self.combine(
            grid,
            f,
            C64::new(l * l, 0.0),
            C64::new(0.0, -s * l * l),
            |x, y| C64::new(x, -s * y) * 0.5,
            1.0 / (2f64.sqrt() * l),
        )
    }

    /// Ĥ = π²/2 with π_x = p_x + σy/(2l²), π_y = p_y − σx/(2l²).
    pub fn hamiltonian(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let (l, s) = (self.l_m, self.sigma);
        let k = s / (2.0 * l * l);
        let pi_x = |g: &[C64]| -> Vec<C64> {
            let d = grid.dx(g);
            (0..g.len()).map(|i| -I * d[i] + g[i] * (k * grid.y(i))).collect()
        };
        let pi_y = |g: &[C64]| -> Vec<C64> {
            let d = grid.dy(g);
            (0..g.len()).map(|i| -I * d[i] - g[i] * (k * grid.x(i))).collect()
        };
        let xx = pi_x(&pi_x(f));
        let yy = pi_y(&pi_y(f));
        xx.iter().zip(&yy).map(|(a, b)| (a + b) * 0.5).collect()
    }

    /// L̂z = −i(x∂y − y∂x).
    pub fn lz(&self, grid: &Grid2D, f: &[C64]) -> Vec<C64> {
        let dx = grid.dx(f);
        let dy = grid.dy(f);
        (0..f.len())
            .map(|i| -I * (dy[i] * grid.x(i) - dx[i] * grid.y(i)))
            .collect()
    }
}

/// a₊ⁿ|0,0⟩/√n! on the grid, the common start of every state of level n.
fn level_seed(n: usize, ladders: &GridLadders, grid: &Grid2D, ground: &WaveField) -> Vec<C64> {
    let mut v = ground.values.clone();
    for k in 1..=n {
        v = ladders.a_raise(grid, &v);
        scale(&mut v, 1.0 / (k as f64).sqrt());
    }
    v
}

/// Relative norm drift beyond which the grid is declared too coarse.
pub const NORM_DRIFT_TOL: f64 = 1e-6;

fn finish_state(
    mut values: Vec<C64>,
    n: usize,
    m: usize,
    l_m: f64,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<WaveField> {
    let norm = grid.norm(&values);
    if (norm - 1.0).abs() > NORM_DRIFT_TOL {
        return Err(Error::Grid(format!(
            "state ({n},{m}) drifted to norm {norm:.8}; refine the grid"
        )));
    }
    scale(&mut values, 1.0 / norm);
    Ok(WaveField {
        values,
        n,
        m,
        nu: C64::new(0.0, 0.0),
        l_m,
        sigma,
    })
}

/// a₊ⁿ b₋ᵐ|0,0⟩/√(n!m!) on the grid.
pub fn build_state_grid(n: usize, m: usize, l_m: f64, sigma: Sigma, grid: &Grid2D) -> Result<WaveField> {
    Ok(build_level_grid(n, m, l_m, sigma, grid)?.pop().expect("m+1 states"))
}

/// States (n, 0), …, (n, m_hi) sharing one ground state and one a₊ⁿ.
pub fn build_level_grid(
    n: usize,
    m_hi: usize,
    l_m: f64,
    sigma: Sigma,
    grid: &Grid2D,
) -> Result<Vec<WaveField>> {
    let ground = psi00_grid(l_m, sigma, grid)?;
    let ladders = GridLadders::new(l_m, sigma);
    let mut v = level_seed(n, &ladders, grid, &ground);
    let mut out = Vec::with_capacity(m_hi + 1);
    for m in 0..=m_hi {
        if m > 0 {
            v = ladders.b_raise(grid, &v);
            scale(&mut v, 1.0 / (m as f64).sqrt());
        }
        out.push(finish_state(v.clone(), n, m, l_m, sigma, grid)?);
    }
    Ok(out)
}

/// Grid form of D(ν): translation by a = √2 l(−ν_y, σν_x), then the phase
/// exp(i q·r) with q = (ν_x, σν_y)/(√2 l). The BCH phase −q·a/2 vanishes.
pub fn displacement_parts(nu: C64, l_m: f64, sigma: Sigma) -> ((f64, f64), (f64, f64)) {
    let s = sigma.value();
    let r2 = 2f64.sqrt();
    let q = (nu.re / (r2 * l_m), s * nu.im / (r2 * l_m));
    let a = (-r2 * l_m * nu.im, r2 * l_m * s * nu.re);
    (q, a)
}

pub fn displace_state_grid(state: &WaveField, nu: C64, grid: &Grid2D) -> Result<WaveField> {
    let (q, a) = displacement_parts(nu, state.l_m, state.sigma);
    let shift = a.0.hypot(a.1);
    grid.check_adequate(state.l_m, shift)?;
    let moved = grid.translate(&state.values, a);
    let values = moved
        .iter()
        .enumerate()
        .map(|(i, z)| z * (I * (q.0 * grid.x(i) + q.1 * grid.y(i))).exp())
        .collect();
    Ok(WaveField {
        values,
        nu: state.nu + nu,
        ..state.clone()
    })
}

/// Centroid ⟨r⟩ of |ψ|².
pub fn centroid(state: &WaveField, grid: &Grid2D) -> (f64, f64) {
    let (mut sx, mut sy, mut w) = (0.0, 0.0, 0.0);
    for (i, z) in state.values.iter().enumerate() {
        let p = z.norm_sqr();
        sx += p * grid.x(i);
        sy += p * grid.y(i);
        w += p;
    }
    (sx / w, sy / w)
}

pub fn expectation_h(state: &WaveField, grid: &Grid2D) -> f64 {
    let hv = GridLadders::new(state.l_m, state.sigma).hamiltonian(grid, &state.values);
    grid.inner(&state.values, &hv).re
}

pub fn expectation_lz(state: &WaveField, grid: &Grid2D) -> f64 {
    let lv = GridLadders::new(state.l_m, state.sigma).lz(grid, &state.values);
    grid.inner(&state.values, &lv).re
}

pub fn gram_matrix(states: &[WaveField], grid: &Grid2D) -> CMatrix {
    CMatrix::from_fn(states.len(), states.len(), |i, j| states[i].overlap(&states[j], grid))
}
