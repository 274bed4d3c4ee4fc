//! Shared fixtures for the benchmarks.

use dlh_core::holonomy::{BoxCorners, ParameterPath, PathKind};
use dlh_core::oracle::Grid2D;
use dlh_core::{ControlPoint, MWindow};

/// Ex' = 0 cube used by the non-Abelian loops.
pub fn cube() -> BoxCorners {
    BoxCorners::new(0.0, 1.0, 1.0, 4.0, 1.0, 4.0)
}

/// Small four-parameter box that fits the default oracle grid.
pub fn small_box() -> BoxCorners {
    BoxCorners::new(0.0, 0.5, 1.0, 1.5, 1.0, 1.3).with_ex(0.0, 0.5)
}

pub fn loop_of(kind: PathKind, corners: &BoxCorners) -> ParameterPath {
    ParameterPath::named(kind, corners).expect("fixture loop is valid")
}

pub fn point() -> ControlPoint {
    ControlPoint::new(0.4, 0.7, 1.1, 0.9)
}

pub fn window(hi: usize) -> MWindow {
    MWindow::new(0, hi).expect("fixture window is valid")
}

pub fn grid(points: usize) -> Grid2D {
    Grid2D::new(points, 10.0).expect("fixture grid is valid")
}
