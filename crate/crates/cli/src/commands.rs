use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dlh_core::connection::{chain_rule_consistency, connection_matrix};
use dlh_core::displaced::displaced_state;
use dlh_core::fock::{hamiltonian_matrix, lz_matrix};
use dlh_core::holonomy::{
    abelian_phase, area_line_integral, commuting_holonomy, four_param_holonomy, holonomy_adaptive,
    holonomy_path_ordered, matrix_rows, partial_products, AbelianPhase, BoxCorners, HolonomyOptions,
    HolonomyResult, ParameterPath, PathKind,
};
use dlh_core::linalg::{max_abs_diff, C64};
use dlh_core::oracle::{sign_report, wilson_loop_oracle, Grid2D};
use dlh_core::params::{nondimensionalize, validate_regime, NaturalUnits};
use dlh_core::{
    build_basis, derive_scales, ControlPoint, Couplings, MWindow, PhysicalConfig, SignConvention,
};
use serde_json::{json, Value};

use crate::args::{
    ConnectionArgs, ConventionArg, DisplaceArgs, HolonomyArgs, OracleArgs, PathArgs, PhaseArgs, PointArgs,
    SpectrumArgs,
};
use crate::output::{plot_data, write_atomic, Artifact, Cell, Format, Table};
use crate::NumericalFailure;

pub fn load_config(path: Option<&Path>) -> Result<PhysicalConfig> {
    match path {
        None => Ok(PhysicalConfig::unit()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok(PhysicalConfig::from_toml_str(&text).with_context(|| format!("in {}", p.display()))?)
        }
    }
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn derive(config: &PhysicalConfig) -> Result<Artifact> {
    let scales = derive_scales(config)?;
    let units = NaturalUnits::for_config(config)?;
    let regime = validate_regime(config);
    let natural = nondimensionalize(config)?;
    let json = json!({
        "config": config,
        "scales": {
            "omega": scales.omega,
            "sigma": scales.sigma.as_int(),
            "l_m": scales.l_m,
            "u": scales.u,
            "nu": pair(scales.nu),
            "hbar": scales.hbar,
        },
        "natural_units": units,
        "natural_config": natural,
        "regime": regime,
    });
    let mut t = Table::new(&["quantity", "value"]);
    let rows: [(&str, f64); 15] = [
        ("omega", scales.omega),
        ("sigma", scales.sigma.value()),
        ("l_m", scales.l_m),
        ("u", scales.u),
        ("nu_re", scales.nu.re),
        ("nu_im", scales.nu.im),
        ("hbar", scales.hbar),
        ("unit_length", units.length),
        ("unit_time", units.time),
        ("unit_action", units.action),
        ("unit_lambda", units.lambda),
        ("unit_b_field", units.b_field),
        ("unit_e_field", units.e_field),
        ("mass_correction_ratio", regime.mass_correction_ratio),
        ("dipole_energy", regime.dipole_energy),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v.into()]);
    }
    Ok(Artifact {
        json,
        table: Some(t),
        default_format: Format::Json,
    })
}

pub fn spectrum(config: &PhysicalConfig, args: &SpectrumArgs) -> Result<Artifact> {
    let scales = derive_scales(config)?;
    let basis = build_basis(args.n_max, args.m_max, config.sigma())?;
    let h = hamiltonian_matrix(&basis, &scales);
    let lz = lz_matrix(&basis, &scales);
    let hw = scales.hbar * scales.omega;
    let mut t = Table::new(&["n", "m", "l", "E_over_hw", "Lz_over_h"]);
    let mut levels = Vec::new();
    for (i, (n, m)) in basis.states().enumerate() {
        let e = h.entries[(i, i)].re / hw;
        let l = lz.entries[(i, i)].re / scales.hbar;
        t.push(vec![n.into(), m.into(), basis.ell(n, m).into(), e.into(), l.into()]);
        levels.push(json!({"n": n, "m": m, "l": basis.ell(n, m), "E_over_hw": e, "Lz_over_h": l}));
    }
    Ok(Artifact {
        json: json!({"hbar_omega": hw, "sigma": basis.sigma.as_int(), "states": levels}),
        table: Some(t),
        default_format: Format::Csv,
    })
}

pub fn displace(config: &PhysicalConfig, args: &DisplaceArgs) -> Result<Artifact> {
    let nu = match (args.nu_re, args.nu_im) {
        (None, None) => {
            let cfg = config.with_field(args.ex.unwrap_or(config.ex), args.ey.unwrap_or(config.ey));
            derive_scales(&cfg)?.nu
        }
        (re, im) => {
            if args.ex.is_some() || args.ey.is_some() {
                bail!("give either --nu-re/--nu-im or --Ex/--Ey, not both");
            }
            dlh_core::linalg::c(re.unwrap_or(0.0), im.unwrap_or(0.0))
        }
    };
    let basis = build_basis(args.n_max, args.m_max, config.sigma())?;
    let state = displaced_state(args.n, args.m, nu, &basis)?;
    let mut t = Table::new(&["n", "m", "re", "im", "norm_deficit"]);
    let mut coeffs = Vec::new();
    for (i, (n, m)) in basis.states().enumerate() {
        let z = state.coefficients[i];
        t.push(vec![n.into(), m.into(), z.re.into(), z.im.into(), state.norm_deficit.into()]);
        coeffs.push(json!({"n": n, "m": m, "re": z.re, "im": z.im}));
    }
    Ok(Artifact {
        json: json!({
            "n": args.n,
            "m": args.m,
            "nu": pair(nu),
            "n_max": basis.n_max,
            "m_max": basis.m_max,
            "norm_deficit": state.norm_deficit,
            "edge_weight": state.edge_weight,
            "truncation_estimate": state.truncation_estimate(),
            "coefficients": coeffs,
        }),
        table: Some(t),
        default_format: Format::Csv,
    })
}

fn resolve_point(p: &PointArgs, fallback: ControlPoint) -> ControlPoint {
    ControlPoint::new(
        p.ex.unwrap_or(fallback.ex),
        p.ey.unwrap_or(fallback.ey),
        p.lambda.unwrap_or(fallback.lambda),
        p.b.unwrap_or(fallback.b),
    )
}

fn convention(c: ConventionArg) -> SignConvention {
    match c {
        ConventionArg::Resolved => SignConvention::RESOLVED,
        ConventionArg::Printed => SignConvention::PRINTED,
    }
}

pub fn connection(config: &PhysicalConfig, args: &ConnectionArgs) -> Result<Artifact> {
    let point = resolve_point(&args.point, config.point());
    let conv = convention(args.convention);
    let cm = connection_matrix(args.param, &point, &Couplings::of(config), args.n, args.window, &conv)?;
    let mut t = Table::new(&["row", "col", "re", "im"]);
    let d = cm.entries.nrows();
    for i in 0..d {
        for j in 0..d {
            let z = cm.entries[(i, j)];
            t.push(vec![i.into(), j.into(), z.re.into(), z.im.into()]);
        }
    }
    Ok(Artifact {
        json: json!({
            "param": args.param.name(),
            "n": args.n,
            "window": args.window,
            "point": point,
            "convention": conv.label,
            "hermiticity_defect": cm.hermiticity_defect(),
            "matrix": matrix_rows(&cm.entries),
        }),
        table: Some(t),
        default_format: Format::Csv,
    })
}

/// Builds the loop in config units.
pub fn build_path(args: &PathArgs, config: &PhysicalConfig) -> Result<ParameterPath> {
    if let Some(file) = &args.vertices {
        if args.named.is_some_and(|k| k != PathKind::Custom) {
            bail!("--vertices cannot be combined with --named {}", args.named.unwrap());
        }
        let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
        return Ok(ParameterPath::parse_vertices(&text)?);
    }
    let kind = args
        .named
        .ok_or_else(|| anyhow!("a loop needs --named <kind> or --vertices <file>"))?;
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| anyhow!("--named {kind} needs --{flag}"));
    let ex1 = args.ex1.unwrap_or(config.ex);
    let ey1 = args.ey1.unwrap_or(config.ey);
    let lam1 = args.lam1.unwrap_or(config.lambda);
    let b1 = args.b1.unwrap_or(config.b_field);
    let corners = match kind {
        PathKind::C1Rectangle => BoxCorners::new(ey1, need(args.ey2, "Ey2")?, lam1, lam1, b1, b1)
            .with_ex(ex1, need(args.ex2, "Ex2")?),
        PathKind::Custom => bail!("--named custom needs --vertices <file>"),
        _ => BoxCorners::new(
            ey1,
            need(args.ey2, "Ey2")?,
            lam1,
            need(args.lam2, "lam2")?,
            b1,
            need(args.b2, "B2")?,
        )
        .with_ex(ex1, args.ex2.unwrap_or(ex1)),
    };
    Ok(ParameterPath::named(kind, &corners)?)
}

fn phase_json(p: &AbelianPhase) -> Value {
    json!({
        "area": p.area,
        "gamma_paper": p.gamma_paper,
        "gamma_oracle_consistent": p.gamma_oracle_consistent,
        "curvature_times_area": p.curvature_times_area,
    })
}

pub fn phase_values(path: &PathArgs, area: Option<f64>, config: &PhysicalConfig) -> Result<AbelianPhase> {
    let couplings = Couplings::of(config);
    match area {
        Some(s) => {
            let lam = path.lam1.unwrap_or(config.lambda);
            let b = path.b1.unwrap_or(config.b_field);
            ControlPoint::new(0.0, 0.0, lam, b).check_positive()?;
            let conv = SignConvention::RESOLVED;
            Ok(AbelianPhase {
                area: s,
                gamma_paper: dlh_core::connection::printed_abelian_coefficient(lam, b, &couplings) * s,
                gamma_oracle_consistent: dlh_core::connection::abelian_curvature(lam, b, &couplings, &conv) * s,
                curvature_times_area: dlh_core::connection::abelian_curvature(lam, b, &couplings, &conv) * s,
            })
        }
        None => Ok(abelian_phase(&build_path(path, config)?, &couplings)?),
    }
}

pub fn phase(config: &PhysicalConfig, args: &PhaseArgs) -> Result<Artifact> {
    let p = phase_values(&args.path, args.area, config)?;
    let mut t = Table::new(&["area", "gamma_paper", "gamma_oracle_consistent", "curvature_times_area"]);
    t.push(vec![
        p.area.into(),
        p.gamma_paper.into(),
        p.gamma_oracle_consistent.into(),
        p.curvature_times_area.into(),
    ]);
    let mut json = phase_json(&p);
    json["source"] = json!(if args.area.is_some() { "area" } else { "path" });
    Ok(Artifact {
        json,
        table: Some(t),
        default_format: Format::Json,
    })
}

pub struct HolonomyRun {
    pub path: ParameterPath,
    pub result: HolonomyResult,
    pub extra: Value,
}

pub fn natural_path(path: &ParameterPath, config: &PhysicalConfig) -> Result<ParameterPath> {
    let units = NaturalUnits::for_config(config)?;
    Ok(path.map_points(|p| units.point(p))?)
}

pub fn run_holonomy(
    path: &PathArgs,
    config: &PhysicalConfig,
    window: MWindow,
    opts: &HolonomyOptions,
    tol: Option<f64>,
) -> Result<HolonomyRun> {
    let nat = natural_path(&build_path(path, config)?, config)?;
    let couplings = Couplings::NATURAL;
    let mut extra = json!({});
    let result = if nat.kind == PathKind::FourParamBox {
        let fp = four_param_holonomy(&nat, &couplings, window, opts)?;
        extra["commutation_diagnostic"] = json!(fp.commutation_diagnostic);
        extra["max_commutator"] = json!(fp.max_commutator);
        fp.result
    } else if let Some(tol) = tol {
        holonomy_adaptive(&nat, &couplings, window, opts, tol)?
    } else {
        holonomy_path_ordered(&nat, &couplings, window, opts)?
    };
    if !nat.any_ex_nonzero() {
        let closed = commuting_holonomy(&nat, &couplings, window)?;
        extra["area_line_integral"] = json!(area_line_integral(&nat)?);
        extra["closed_form_deviation"] = json!(max_abs_diff(&closed, &result.matrix));
    }
    Ok(HolonomyRun {
        path: nat,
        result,
        extra,
    })
}

pub fn holonomy(config: &PhysicalConfig, args: &HolonomyArgs) -> Result<Artifact> {
    let opts = HolonomyOptions::default()
        .with_steps(args.steps)
        .with_scheme(args.scheme);
    if args.tol.is_some() && args.path.named == Some(PathKind::FourParamBox) {
        bail!("--tol is not supported for box4 loops");
    }
    let run = run_holonomy(&args.path, config, args.window, &opts, args.tol)?;
    if let Some(plot) = &args.emit_plot_data {
        let pp = partial_products(&run.path, &Couplings::NATURAL, args.window, &opts.with_steps(run.result.steps))?;
        let text = plot_data(
            ("step", "unitarity_defect"),
            pp.iter().map(|p| (p.step, p.unitarity_defect)),
        );
        write_atomic(plot, &text)?;
    }
    let r = &run.result;
    let mut json = json!({
        "kind": run.path.kind.name(),
        "window": r.window,
        "steps": r.steps,
        "scheme": r.scheme.to_string(),
        "matrix": matrix_rows(&r.matrix),
        "unitarity_defect": r.unitarity_defect,
        "convergence_estimate": r.convergence_estimate,
        "distance_from_identity": r.distance_from_identity(),
        "phase_angle": r.phase_angle,
        "vertices_natural": run.path.vertices,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut json, run.extra) {
        dst.extend(src);
    }
    let mut t = Table::new(&["kind", "steps", "unitarity_defect", "convergence_estimate", "distance_from_identity"]);
    t.push(vec![
        run.path.kind.name().into(),
        r.steps.into(),
        r.unitarity_defect.into(),
        r.convergence_estimate.into(),
        r.distance_from_identity().into(),
    ]);
    Ok(Artifact {
        json,
        table: Some(t),
        default_format: Format::Json,
    })
}

/// Tolerance on |Wilson − path-ordered| at the default oracle settings.
pub const WILSON_TOL: f64 = 1e-4;
pub const CHAIN_TOL: f64 = 1e-10;

pub struct OracleOutcome {
    pub artifact: Artifact,
    pub text: String,
    pub passed: bool,
}

pub fn oracle_check(args: &OracleArgs) -> Result<OracleOutcome> {
    let point = resolve_point(&args.point, ControlPoint::new(0.4, 0.7, 1.1, 0.9));
    let grid = Grid2D::new(args.grid, args.half_extent)?;
    let report = sign_report(&point, args.n, args.window, &grid)?;
    let chain = chain_rule_consistency(&point, &Couplings::NATURAL, args.window, &SignConvention::RESOLVED)?;

    let corners = BoxCorners::new(0.0, 0.5, 1.0, 1.5, 1.0, 1.3).with_ex(0.0, 0.5);
    let path = ParameterPath::named(PathKind::FourParamBox, &corners)?;
    let w = MWindow::new(0, 1)?;
    let wilson = wilson_loop_oracle(&path, 0, w, args.steps, dlh_core::Sigma::Plus, &grid)?;
    let reference = holonomy_path_ordered(
        &path,
        &Couplings::NATURAL,
        w,
        &HolonomyOptions::default().with_steps(args.steps.max(dlh_core::holonomy::MIN_STEPS)),
    )?;
    let wilson_dev = max_abs_diff(&wilson.matrix, &reference.matrix);

    let passed = report.all_signs_agree && chain.max <= CHAIN_TOL && wilson_dev <= WILSON_TOL;
    let mut text = report.to_text();
    text.push_str(&format!(
        "chain rule vs closed form: max deviation {:.3e} (tol {:.0e})\n",
        chain.max, CHAIN_TOL
    ));
    text.push_str(&format!(
        "Wilson loop vs path-ordered ({} steps, {} grid points): max deviation {:.3e} (tol {:.0e})\n",
        args.steps, args.grid, wilson_dev, WILSON_TOL
    ));
    text.push_str(if passed { "oracle check PASSED\n" } else { "oracle check FAILED\n" });

    let json = json!({
        "sign_report": report,
        "chain_rule": chain,
        "wilson_loop": {
            "corners": corners,
            "steps": args.steps,
            "grid_points": args.grid,
            "half_extent": args.half_extent,
            "deviation": wilson_dev,
            "tolerance": WILSON_TOL,
        },
        "passed": passed,
    });
    let mut t = Table::new(&["check", "value", "tolerance", "ok"]);
    let max_rel = report.relative_deviation.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    t.push(vec!["signs_agree".into(), Cell::from(report.all_signs_agree as i64), Cell::from(""), Cell::from(report.all_signs_agree as i64)]);
    t.push(vec!["fd_relative_deviation".into(), max_rel.into(), "".into(), Cell::from(1i64)]);
    t.push(vec!["chain_rule".into(), chain.max.into(), CHAIN_TOL.into(), Cell::from((chain.max <= CHAIN_TOL) as i64)]);
    t.push(vec!["wilson_loop".into(), wilson_dev.into(), WILSON_TOL.into(), Cell::from((wilson_dev <= WILSON_TOL) as i64)]);
    t.push(vec!["curvature_ratio_to_printed".into(), report.curvature_ratio_to_printed.into(), "".into(), Cell::from(1i64)]);
    Ok(OracleOutcome {
        artifact: Artifact {
            json,
            table: Some(t),
            default_format: Format::Json,
        },
        text,
        passed,
    })
}

/// Raised when oracle cross-checks disagree beyond their tolerances.
pub fn oracle_failure() -> anyhow::Error {
    anyhow::Error::new(NumericalFailure("oracle cross-checks failed".into()))
}
