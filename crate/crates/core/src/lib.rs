//! Landau levels of a polarizable neutral particle, displaced Fock states and
//! the geometric phases picked up by adiabatic loops of the control fields.

pub mod connection;
pub mod displaced;
pub mod error;
pub mod fock;
pub mod holonomy;
pub mod linalg;
pub mod oracle;
pub mod params;

pub use connection::{ControlParam, ControlPoint, Couplings, MWindow, SignConvention};
pub use error::{Error, Result};
pub use fock::{build_basis, FockBasis, Ladder, OperatorMatrix};
pub use params::{derive_scales, DerivedScales, PhysicalConfig, Sigma};
