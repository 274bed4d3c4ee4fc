//! Dimensionless outputs do not depend on the unit system.

use dlh_core::connection::{Couplings, MWindow};
use dlh_core::holonomy::{abelian_phase, holonomy_path_ordered, BoxCorners, HolonomyOptions, ParameterPath, PathKind};
use dlh_core::linalg::max_abs_diff;
use dlh_core::params::{NaturalUnits, PhysicalConfig};

fn lab() -> PhysicalConfig {
    // Order-one numbers that are far from natural units.
    PhysicalConfig::new(3.0, 0.2, 2.5, 7.0, 0.4)
}

#[test]
fn holonomy_is_unit_independent() {
    let cfg = lab();
    let units = NaturalUnits::for_config(&cfg).unwrap();
    let c = BoxCorners::new(0.0, 4.0, 5.0, 9.0, 0.3, 0.6).with_ex(0.0, 2.0);
    let w = MWindow::new(0, 2).unwrap();
    let opts = HolonomyOptions::default().with_steps(512);
    for kind in [PathKind::Abchefa, PathKind::FourParamBox] {
        let path = ParameterPath::named(kind, &c).unwrap();
        let in_lab = holonomy_path_ordered(&path, &Couplings::of(&cfg), w, &opts).unwrap();
        let natural = path.map_points(|p| units.point(p)).unwrap();
        let in_nat = holonomy_path_ordered(&natural, &Couplings::NATURAL, w, &opts).unwrap();
        assert!(max_abs_diff(&in_lab.matrix, &in_nat.matrix) < 1e-10, "{kind}");
    }
}

#[test]
fn abelian_phase_is_unit_independent() {
    let cfg = lab();
    let units = NaturalUnits::for_config(&cfg).unwrap();
    let path = ParameterPath::rectangle((0.5, 3.0), (-1.0, 2.0), cfg.lambda, cfg.b_field).unwrap();
    let a = abelian_phase(&path, &Couplings::of(&cfg)).unwrap();
    let b = abelian_phase(&path.map_points(|p| units.point(p)).unwrap(), &Couplings::NATURAL).unwrap();
    assert!((a.gamma_oracle_consistent - b.gamma_oracle_consistent).abs() < 1e-12);
    assert!((a.gamma_paper - b.gamma_paper).abs() < 1e-12);
}
