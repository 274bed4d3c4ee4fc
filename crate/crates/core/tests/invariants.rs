use proptest::prelude::*;

use dlh_core::connection::{
    chain_rule_consistency, connection_matrix, window_matrix, ControlParam, ControlPoint,
    Couplings, MWindow, SignConvention,
};
use dlh_core::displaced::displacement_matrix;
use dlh_core::fock::FockBasis;
use dlh_core::holonomy::{
    holonomy_path_ordered, line_integral_area_check, AreaFormula, BoxCorners, HolonomyOptions,
    ParameterPath, PathKind,
};
use dlh_core::linalg::{max_abs_diff, sub_block, C64};
use dlh_core::params::Sigma;

const NAT: Couplings = Couplings::NATURAL;

fn point() -> impl Strategy<Value = ControlPoint> {
    (-2.0..2.0f64, -2.0..2.0f64, 0.2..3.0f64, 0.2..3.0f64)
        .prop_map(|(ex, ey, l, b)| ControlPoint::new(ex, ey, l, b))
}

fn corners() -> impl Strategy<Value = BoxCorners> {
    (-1.0..1.0f64, -1.0..1.0f64, 0.5..3.0f64, 0.5..3.0f64, 0.5..3.0f64, 0.5..3.0f64)
        .prop_map(|(a, b, c, d, e, f)| BoxCorners::new(a, b, c, d, e, f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn connection_hermitian_and_consistent(p in point(), lo in 0usize..4, len in 1usize..6) {
        let w = MWindow::new(lo, lo + len - 1).unwrap();
        for param in ControlParam::ALL {
            let m = connection_matrix(param, &p, &NAT, 0, w, &SignConvention::RESOLVED).unwrap();
            prop_assert!(m.hermiticity_defect() <= 1e-12);
        }
        prop_assert!(chain_rule_consistency(&p, &NAT, w, &SignConvention::RESOLVED).unwrap().max <= 1e-10);
    }

    #[test]
    fn lambda_over_b_is_b_over_lambda(p in point()) {
        let w = MWindow::new(0, 5).unwrap();
        let al = window_matrix(ControlParam::Lambda, &p, &NAT, w, &SignConvention::RESOLVED).unwrap();
        let ab = window_matrix(ControlParam::B, &p, &NAT, w, &SignConvention::RESOLVED).unwrap();
        let scaled = &ab * C64::new(p.b / p.lambda, 0.0);
        prop_assert!(max_abs_diff(&al, &scaled) <= 1e-12 * (1.0 + dlh_core::linalg::max_abs(&al)));
    }

    #[test]
    fn displacement_adjoint_is_inverse(re in -0.5..0.5f64, im in -0.5..0.5f64) {
        let b = FockBasis::new(30, 1, Sigma::Plus);
        let nu = C64::new(re, im);
        let d = displacement_matrix(nu, &b).unwrap();
        let dm = displacement_matrix(-nu, &b).unwrap();
        prop_assert!(d.normal_ordered_deviation <= 1e-8);
        let dev = max_abs_diff(
            &sub_block(&d.operator.entries.adjoint(), &d.interior),
            &sub_block(&dm.operator.entries, &d.interior),
        );
        prop_assert!(dev <= 1e-8);
    }

    #[test]
    fn named_loops_match_printed_areas(c in corners()) {
        for (kind, which) in [
            (PathKind::Abchefa, AreaFormula::S2),
            (PathKind::Abchgfa, AreaFormula::S3),
            (PathKind::Adchefa, AreaFormula::S4),
        ] {
            let path = ParameterPath::named(kind, &c).unwrap();
            let chk = line_integral_area_check(&path, &c, which).unwrap();
            prop_assert!(chk.matches, "{:?}", chk);
        }
    }

    #[test]
    fn reversal_gives_adjoint(c in corners(), ex in 0.0..1.0f64) {
        let path = ParameterPath::four_param_box(&c.with_ex(0.0, ex)).unwrap();
        let opts = HolonomyOptions::default().with_steps(128);
        let w = MWindow::new(0, 2).unwrap();
        let f = holonomy_path_ordered(&path, &NAT, w, &opts).unwrap();
        let r = holonomy_path_ordered(&path.reversed(), &NAT, w, &opts).unwrap();
        prop_assert!(f.unitarity_defect <= 1e-8);
        prop_assert!(max_abs_diff(&r.matrix, &f.matrix.adjoint()) <= 1e-7);
    }
}
