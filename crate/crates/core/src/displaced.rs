//! Displacement operator D(ν) = exp(ν a₊ − ν* a₋), displaced Fock states and
//! the displaced Hamiltonian.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{hamiltonian_matrix, ladder_a, FockBasis, Ladder, OperatorMatrix};
use crate::linalg::{c, expm, max_abs_diff, sub_block, CMatrix, CVector, C64};
use crate::params::{DerivedScales, PhysicalConfig};

/// Tolerance between the dense exponential and the normal-ordered product.
pub const NORMAL_ORDER_TOL: f64 = 1e-8;
/// Tolerance between the ladder form of Ĥ_ν and D Ĥ D†.
pub const CONJUGATION_TOL: f64 = 1e-7;

/// D(ν) together with the consistency diagnostics of its construction.
#[derive(Debug, Clone)]
pub struct Displacement {
    pub nu: C64,
    pub operator: OperatorMatrix,
    /// e^{−|ν|²/2} e^{ν a₊} e^{−ν* a₋} with exact (terminating) series.
    pub normal_ordered: CMatrix,
    /// Max deviation between the two routes on the interior block.
    pub normal_ordered_deviation: f64,
    /// Flat indices with n ≤ n_max/2.
    pub interior: Vec<usize>,
}

fn check_truncation(nu: C64, basis: &FockBasis) -> Result<()> {
    let nu_sq = nu.norm_sqr();
    let n_max = basis.n_max as f64;
    if nu_sq > n_max / 2.0 {
        return Err(Error::Truncation {
            nu_sq,
            limit: n_max / 2.0,
            n_max: basis.n_max,
        });
    }
    if nu_sq > n_max / 8.0 {
        warn!(
            "|nu|^2 = {nu_sq:.3} > n_max/8 = {:.3}: truncation may be unreliable",
            n_max / 8.0
        );
    }
    Ok(())
}

/// Σ_k X^k / k! for a nilpotent X; stops once a power vanishes.
fn exp_nilpotent(x: &CMatrix, max_power: usize) -> CMatrix {
    let dim = x.nrows();
    let mut acc = CMatrix::identity(dim, dim);
    let mut term = CMatrix::identity(dim, dim);
    for k in 1..=max_power {
        term = &term * x / c(k as f64, 0.0);
        if term.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            break;
        }
        acc += &term;
    }
    acc
}

pub fn generator(nu: C64, basis: &FockBasis) -> CMatrix {
    let ap = ladder_a(basis, Ladder::Raise).entries;
    let am = ladder_a(basis, Ladder::Lower).entries;
    ap * nu - am * nu.conj()
}

pub fn displacement_matrix(nu: C64, basis: &FockBasis) -> Result<Displacement> {
    check_truncation(nu, basis)?;
    let dense = expm(&generator(nu, basis));

    let ap = ladder_a(basis, Ladder::Raise).entries;
    let am = ladder_a(basis, Ladder::Lower).entries;
    let pref = (-0.5 * nu.norm_sqr()).exp();
    let normal_ordered = (exp_nilpotent(&(ap * nu), basis.n_max)
        * exp_nilpotent(&(am * -nu.conj()), basis.n_max))
    .scale(pref);

    let interior = basis.levels_up_to(basis.n_max / 2);
    let normal_ordered_deviation = max_abs_diff(
        &sub_block(&dense, &interior),
        &sub_block(&normal_ordered, &interior),
    );
    if normal_ordered_deviation > NORMAL_ORDER_TOL {
        warn!("dense and normal-ordered D(nu) differ by {normal_ordered_deviation:e} on the interior");
    }
    Ok(Displacement {
        nu,
        operator: OperatorMatrix::new(dense),
        normal_ordered,
        normal_ordered_deviation,
        interior,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DisplacedState {
    pub n: usize,
    pub m: usize,
    #[serde(skip)]
    pub nu: C64,
    #[serde(skip)]
    pub coefficients: CVector,
    /// |1 − ‖ψ‖|.
    pub norm_deficit: f64,
    /// Probability carried by the top retained level n = n_max.
    pub edge_weight: f64,
}

impl DisplacedState {
    /// ε_trunc: the larger of the norm deficit and the edge weight.
    pub fn truncation_estimate(&self) -> f64 {
        self.norm_deficit.max(self.edge_weight)
    }
}

pub fn displaced_state(n: usize, m: usize, nu: C64, basis: &FockBasis) -> Result<DisplacedState> {
    let unit = basis.unit_vector(n, m)?;
    let d = displacement_matrix(nu, basis)?;
    Ok(displaced_state_with(&d, basis, n, m, unit))
}

fn displaced_state_with(
    d: &Displacement,
    basis: &FockBasis,
    n: usize,
    m: usize,
    unit: CVector,
) -> DisplacedState {
    let margin = n as f64 + 4.0 * d.nu.norm() * (basis.n_max as f64).sqrt();
    if margin > basis.n_max as f64 {
        warn!("displaced state ({n},{m}) is close to the truncation edge");
    }
    let coefficients = d.operator.apply(&unit);
    let edge_weight = (0..=basis.m_max)
        .map(|mm| coefficients[basis.index(basis.n_max, mm).unwrap()].norm_sqr())
        .sum();
    DisplacedState {
        n,
        m,
        nu: d.nu,
        norm_deficit: (1.0 - coefficients.norm()).abs(),
        edge_weight,
        coefficients,
    }
}

/// All displaced basis states for one D(ν), reusing the exponential.
pub fn displaced_states(
    d: &Displacement,
    basis: &FockBasis,
    labels: &[(usize, usize)],
) -> Result<Vec<DisplacedState>> {
    labels
        .iter()
        .map(|&(n, m)| Ok(displaced_state_with(d, basis, n, m, basis.unit_vector(n, m)?)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct DisplacedHamiltonian {
    pub operator: OperatorMatrix,
    /// Deviation from D Ĥ D† on the interior block, when computed.
    pub conjugation_deviation: Option<f64>,
}

/// Ĥ_ν = ħ|ω|[(a₊ − ν*)(a₋ − ν) + ½] in ladder form.
pub fn displaced_hamiltonian_ladder(
    nu: C64,
    basis: &FockBasis,
    scales: &DerivedScales,
) -> OperatorMatrix {
    let dim = basis.dim();
    let id = CMatrix::identity(dim, dim);
    let ap = ladder_a(basis, Ladder::Raise).entries;
    let am = ladder_a(basis, Ladder::Lower).entries;
    let hw = scales.hbar * scales.omega;
    let shifted = (ap - &id * nu.conj()) * (am - &id * nu) + id.scale(0.5);
    OperatorMatrix {
        entries: shifted.scale(hw),
        hermitian_hint: true,
    }
}

/// Ladder-form Ĥ_ν, cross-checked against D(ν) Ĥ D†(ν) on the interior.
pub fn displaced_hamiltonian(
    nu: C64,
    basis: &FockBasis,
    scales: &DerivedScales,
) -> Result<DisplacedHamiltonian> {
    let operator = displaced_hamiltonian_ladder(nu, basis, scales);
    let d = displacement_matrix(nu, basis)?;
    let h = hamiltonian_matrix(basis, scales).entries;
    let conj = &d.operator.entries * h * d.operator.entries.adjoint();
    let dev = max_abs_diff(
        &sub_block(&conj, &d.interior),
        &sub_block(&operator.entries, &d.interior),
    );
    if dev > CONJUGATION_TOL * scales.hbar * scales.omega {
        warn!("displaced Hamiltonian differs from D H D^dagger by {dev:e} on the interior");
    }
    Ok(DisplacedHamiltonian {
        operator,
        conjugation_deviation: Some(dev),
    })
}

/// (δx, δy) = (2α l_m²/ħ)(E_x′, E_y′).
pub fn position_shift(config: &PhysicalConfig, scales: &DerivedScales) -> (f64, f64) {
    let k = 2.0 * config.alpha * scales.l_m * scales.l_m / config.hbar;
    (k * config.ex, k * config.ey)
}
