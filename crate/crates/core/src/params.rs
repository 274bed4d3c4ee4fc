//! Laboratory parameters, derived scales, regime screening and the
//! natural-unit map used by every numerical routine.
//!
//! The field gradient `lambda` is stored in V/m² (the field is
//! E = (λ/2)(x, y, 0), so λ is its divergence), even though it is often
//! called a charge density.

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::connection::ControlPoint;
use crate::error::{Error, Result};
use crate::linalg::C64;

/// CODATA reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Orientation sign σ = sgn(λB).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn from_sign(x: f64) -> Sigma {
        if x < 0.0 {
            Sigma::Minus
        } else {
            Sigma::Plus
        }
    }

    pub fn from_int(v: i64) -> Result<Sigma> {
        match v {
            1 => Ok(Sigma::Plus),
            -1 => Ok(Sigma::Minus),
            other => Err(Error::InvalidConfig(format!(
                "sigma must be +1 or -1, got {other}"
            ))),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sigma::Plus => 1.0,
            Sigma::Minus => -1.0,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }
}

/// Laboratory parameters of the induced-dipole Landau problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Particle mass M (kg).
    pub mass: f64,
    /// Polarizability α (F·m²).
    pub alpha: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Field gradient λ (V/m²).
    pub lambda: f64,
    /// Magnetic field B (T).
    pub b_field: f64,
    /// In-plane constant field components (V/m).
    pub ex: f64,
    pub ey: f64,
    /// Replaces sgn(λB) as the orientation sign when set.
    #[serde(default)]
    pub sigma_override: Option<Sigma>,
}

impl PhysicalConfig {
    pub fn new(mass: f64, alpha: f64, hbar: f64, lambda: f64, b_field: f64) -> Self {
        PhysicalConfig {
            mass,
            alpha,
            hbar,
            lambda,
            b_field,
            ex: 0.0,
            ey: 0.0,
            sigma_override: None,
        }
    }

    /// The dimensionless configuration M = α = ħ = λ = B = 1.
    pub fn unit() -> Self {
        PhysicalConfig::new(1.0, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn with_field(mut self, ex: f64, ey: f64) -> Self {
        self.ex = ex;
        self.ey = ey;
        self
    }

    pub fn with_point(mut self, p: ControlPoint) -> Self {
        self.ex = p.ex;
        self.ey = p.ey;
        self.lambda = p.lambda;
        self.b_field = p.b;
        self
    }

    pub fn point(&self) -> ControlPoint {
        ControlPoint::new(self.ex, self.ey, self.lambda, self.b_field)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("mass", self.mass), ("alpha", self.alpha), ("hbar", self.hbar)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("B", self.b_field),
            ("Ex", self.ex),
            ("Ey", self.ey),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if self.lambda * self.b_field == 0.0 {
            return Err(Error::InvalidConfig(
                "lambda*B = 0: no Landau quantization".into(),
            ));
        }
        Ok(())
    }

    pub fn sigma(&self) -> Sigma {
        self.sigma_override
            .unwrap_or_else(|| Sigma::from_sign(self.lambda * self.b_field))
    }

    /// Parses the key–value config file (TOML syntax, strict schema).
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_config()
    }
}

/// On-disk schema of the configuration file. Unknown keys are rejected.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub mass_kg: f64,
    pub alpha_Fm2: f64,
    #[serde(default)]
    pub hbar: Option<f64>,
    pub lambda_Vm2: f64,
    pub B_T: f64,
    #[serde(default)]
    pub Ex_Vm: f64,
    #[serde(default)]
    pub Ey_Vm: f64,
    #[serde(default)]
    pub sigma_override: Option<i64>,
}

impl ConfigFile {
    pub fn into_config(self) -> Result<PhysicalConfig> {
        let cfg = PhysicalConfig {
            mass: self.mass_kg,
            alpha: self.alpha_Fm2,
            hbar: self.hbar.unwrap_or(HBAR_SI),
            lambda: self.lambda_Vm2,
            b_field: self.B_T,
            ex: self.Ex_Vm,
            ey: self.Ey_Vm,
            sigma_override: self.sigma_override.map(Sigma::from_int).transpose()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Quantities derived from a [`PhysicalConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedScales {
    /// |ω| = α|λB|/M (rad/s).
    pub omega: f64,
    pub sigma: Sigma,
    /// Magnetic length √(ħ/(M|ω|)).
    pub l_m: f64,
    /// u = √(ħ/(8α)).
    pub u: f64,
    /// Dimensionless displacement ν = ν_x + iν_y.
    pub nu: C64,
    pub hbar: f64,
}

pub fn derive_scales(config: &PhysicalConfig) -> Result<DerivedScales> {
    config.validate()?;
    let omega = config.alpha * (config.lambda * config.b_field).abs() / config.mass;
    let l_m = (config.hbar / (config.mass * omega)).sqrt();
    Ok(DerivedScales {
        omega,
        sigma: config.sigma(),
        l_m,
        u: (config.hbar / (8.0 * config.alpha)).sqrt(),
        nu: nu_from_fields(config.alpha, config.hbar, l_m, config.ex, config.ey),
        hbar: config.hbar,
    })
}

/// ν_x = −(α l_m/(√2 ħ)) E_y′, ν_y = −(α l_m/(√2 ħ)) E_x′.
pub fn nu_from_fields(alpha: f64, hbar: f64, l_m: f64, ex: f64, ey: f64) -> C64 {
    let k = -alpha * l_m / (SQRT_2 * hbar);
    C64::new(k * ey, k * ex)
}

/// Magnetic length as a function of the control point (M cancels).
pub fn magnetic_length(alpha: f64, hbar: f64, lambda: f64, b: f64) -> f64 {
    (hbar / (alpha * (lambda * b).abs())).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeThresholds {
    pub mass_ratio: f64,
    /// Joules.
    pub dipole_energy: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            mass_ratio: 1e-6,
            dipole_energy: 1e-20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
}

/// Screening of the two terms dropped from the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    /// α·B²/M.
    pub mass_correction_ratio: f64,
    /// α·E²/2 with E = |E′|.
    pub dipole_energy: f64,
    pub verdict: Verdict,
}

/// Raw α·B² (kg) and α·E² (J).
pub fn screen_terms(alpha: f64, b: f64, e: f64) -> (f64, f64) {
    (alpha * b * b, alpha * e * e)
}

pub fn validate_regime(config: &PhysicalConfig) -> RegimeReport {
    validate_regime_with(config, RegimeThresholds::default())
}

pub fn validate_regime_with(config: &PhysicalConfig, t: RegimeThresholds) -> RegimeReport {
    let e_sq = config.ex * config.ex + config.ey * config.ey;
    let mass_correction_ratio = config.alpha * config.b_field * config.b_field / config.mass;
    let dipole_energy = 0.5 * config.alpha * e_sq;
    let verdict = if mass_correction_ratio < t.mass_ratio && dipole_energy < t.dipole_energy {
        Verdict::Pass
    } else {
        Verdict::Warn
    };
    RegimeReport {
        mass_correction_ratio,
        dipole_energy,
        verdict,
    }
}

/// Unit system in which M = ħ = α = 1 and l_m = |ω| = |λ| = |B| = 1 at the
/// reference configuration.
///
/// Each field is the size of one natural unit expressed in the input units.
/// The map keeps ν, ω·t, every Berry phase and every holonomy unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NaturalUnits {
    pub mass: f64,
    pub length: f64,
    pub time: f64,
    pub action: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub b_field: f64,
    pub e_field: f64,
}

impl NaturalUnits {
    pub fn for_config(config: &PhysicalConfig) -> Result<Self> {
        let s = derive_scales(config)?;
        let length = s.l_m;
        let time = 1.0 / s.omega;
        let action = config.mass * length * length / time;
        Ok(NaturalUnits {
            mass: config.mass,
            length,
            time,
            action,
            alpha: config.alpha,
            lambda: config.lambda.abs(),
            b_field: config.b_field.abs(),
            e_field: action / (config.alpha * length),
        })
    }

    pub fn point(&self, p: ControlPoint) -> ControlPoint {
        ControlPoint::new(
            p.ex / self.e_field,
            p.ey / self.e_field,
            p.lambda / self.lambda,
            p.b / self.b_field,
        )
    }

    pub fn point_back(&self, p: ControlPoint) -> ControlPoint {
        ControlPoint::new(
            p.ex * self.e_field,
            p.ey * self.e_field,
            p.lambda * self.lambda,
            p.b * self.b_field,
        )
    }

    pub fn apply(&self, config: &PhysicalConfig) -> PhysicalConfig {
        let p = self.point(config.point());
        PhysicalConfig {
            mass: config.mass / self.mass,
            alpha: config.alpha / self.alpha,
            hbar: config.hbar / self.action,
            lambda: p.lambda,
            b_field: p.b,
            ex: p.ex,
            ey: p.ey,
            sigma_override: config.sigma_override,
        }
    }
}

/// Equivalent configuration in natural units (see [`NaturalUnits`]).
pub fn nondimensionalize(config: &PhysicalConfig) -> Result<PhysicalConfig> {
    Ok(NaturalUnits::for_config(config)?.apply(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> PhysicalConfig {
        PhysicalConfig::new(1.0, 0.5, 1.0, 2.0, 1.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn derive_desk_scales() {
        let s = derive_scales(&desk()).unwrap();
        assert!((s.omega - 1.0).abs() < 1e-15);
        assert_eq!(s.sigma, Sigma::Plus);
        assert!((s.l_m - 1.0).abs() < 1e-15);
        assert!((s.u - 0.5).abs() < 1e-15);
        assert_eq!(s.nu, C64::new(0.0, 0.0));
    }

    #[test]
    fn negative_b_flips_sigma_only() {
        let mut cfg = desk();
        cfg.b_field = -1.0;
        let s = derive_scales(&cfg).unwrap();
        assert_eq!(s.sigma, Sigma::Minus);
        assert!((s.omega - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nu_from_ey() {
        let cfg = desk().with_field(0.0, 2f64.sqrt());
        let s = derive_scales(&cfg).unwrap();
        assert!((s.nu.re + 0.5).abs() < 1e-15);
        assert!(s.nu.im.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = desk();
        cfg.b_field = 0.0;
        assert!(derive_scales(&cfg).is_err());
        let mut cfg = desk();
        cfg.mass = -1.0;
        assert!(derive_scales(&cfg).is_err());
        let mut cfg = desk();
        cfg.alpha = 0.0;
        assert!(derive_scales(&cfg).is_err());
        let mut cfg = desk();
        cfg.hbar = 0.0;
        assert!(derive_scales(&cfg).is_err());
    }

    #[test]
    fn omega_scaling_by_factor_two() {
        let base = derive_scales(&desk()).unwrap().omega;
        let mut c = desk();
        c.alpha *= 2.0;
        assert!(rel(derive_scales(&c).unwrap().omega, 2.0 * base) < 1e-15);
        let mut c = desk();
        c.lambda *= 2.0;
        assert!(rel(derive_scales(&c).unwrap().omega, 2.0 * base) < 1e-15);
        let mut c = desk();
        c.b_field *= 2.0;
        assert!(rel(derive_scales(&c).unwrap().omega, 2.0 * base) < 1e-15);
        let mut c = desk();
        c.mass *= 2.0;
        assert!(rel(derive_scales(&c).unwrap().omega, 0.5 * base) < 1e-15);
    }

    #[test]
    fn regime_reproduces_order_of_magnitude_screening() {
        let (mass_term, energy_term) = screen_terms(1e-39, 10.0, 1e7);
        assert!(rel(mass_term, 1e-37) < 1e-12);
        assert!(rel(energy_term, 1e-25) < 1e-12);

        // Nucleon-scale mass: the correction is ~1e-10 of M.
        let cfg = PhysicalConfig::new(1.67e-27, 1e-39, HBAR_SI, 1e9, 10.0).with_field(1e7, 0.0);
        let r = validate_regime(&cfg);
        assert!(r.mass_correction_ratio < 1e-9 && r.mass_correction_ratio > 1e-11);
        assert!(rel(r.dipole_energy, 0.5e-25) < 1e-12);
        assert_eq!(r.verdict, Verdict::Pass);

        let zero = validate_regime(&PhysicalConfig::new(1.0, 1e-39, 1.0, 1.0, 1e-12));
        assert_eq!(zero.dipole_energy, 0.0);

        assert_eq!(validate_regime(&desk()).verdict, Verdict::Warn);
    }

    #[test]
    fn natural_units_preserve_nu_and_are_idempotent() {
        let si = PhysicalConfig::new(1.4e-25, 1e-39, HBAR_SI, 1e9, 10.0).with_field(3e3, -2e3);
        let nat = nondimensionalize(&si).unwrap();
        let s_si = derive_scales(&si).unwrap();
        let s_nat = derive_scales(&nat).unwrap();
        assert!((s_si.nu - s_nat.nu).norm() <= 1e-12 * s_si.nu.norm());
        assert!((s_nat.l_m - 1.0).abs() < 1e-12);
        assert!((s_nat.omega - 1.0).abs() < 1e-12);
        assert!((nat.hbar - 1.0).abs() < 1e-12 && (nat.alpha - 1.0).abs() < 1e-12);
        assert_eq!(s_nat.sigma, s_si.sigma);

        let again = nondimensionalize(&nat).unwrap();
        for (a, b) in [
            (again.mass, nat.mass),
            (again.alpha, nat.alpha),
            (again.hbar, nat.hbar),
            (again.lambda, nat.lambda),
            (again.b_field, nat.b_field),
            (again.ex, nat.ex),
            (again.ey, nat.ey),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn config_file_is_strict() {
        let ok = "mass_kg = 1.0\nalpha_Fm2 = 0.5\nhbar = 1.0\nlambda_Vm2 = 2.0\nB_T = 1.0\nEx_Vm = 0.0\nEy_Vm = 1.0\n";
        let cfg = PhysicalConfig::from_toml_str(ok).unwrap();
        assert_eq!(cfg.ey, 1.0);
        assert_eq!(cfg.sigma(), Sigma::Plus);

        let bad = format!("{ok}bogus_key = 3\n");
        let err = PhysicalConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("bogus_key"), "{err}");

        let default_hbar = "mass_kg = 1.0\nalpha_Fm2 = 1e-39\nlambda_Vm2 = 1e9\nB_T = 10\nsigma_override = -1\n";
        let cfg = PhysicalConfig::from_toml_str(default_hbar).unwrap();
        assert_eq!(cfg.hbar, HBAR_SI);
        assert_eq!(cfg.sigma(), Sigma::Minus);

        assert!(PhysicalConfig::from_toml_str(
            "mass_kg = 1.0\nalpha_Fm2 = 1\nlambda_Vm2 = 1\nB_T = 1\nsigma_override = 2\n"
        )
        .is_err());
    }
}
