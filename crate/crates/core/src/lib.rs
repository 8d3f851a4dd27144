//! Steady-state single-photon absorption of subwavelength rings of
//! dipole-coupled emitters.
//!
//! Rates are in units of Γ₀ and lengths in units of λ₀.

pub mod bath;
pub mod closedform;
pub mod error;
pub mod greens;
pub mod model;
pub mod modes;
pub mod quadrature;
pub mod runner;
pub mod special;
pub mod steady;
pub mod table;

pub use error::{Error, Result, Violation};
pub use model::{
    BathSpec, DecoherenceSpec, Detuning, DriveSpec, InverseTemperature, Polarization, RingGeometry,
    SpectralDensity, Validate, GAMMA0, K0,
};
