//! Independent ground truth built from coordinate-grid wavefunctions.

pub mod berry;
pub mod grid;
pub mod report;

pub use berry::{berry_connection_fd, berry_connection_fd_element, wilson_loop_oracle, window_states, FdConnection};
pub use grid::{
    build_level_grid, build_state_grid, centroid, displace_state_grid, displacement_parts, expectation_h,
    expectation_lz, gram_matrix, psi00_grid, Grid2D, GridLadders, WaveField,
};
pub use report::{sign_report, ComponentSign, SignReport};
