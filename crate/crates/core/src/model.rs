//! Parameter types and unit conventions.
//!
//! Every rate is expressed in units of the single-emitter decay rate Γ₀ and
//! every length in units of the resonant wavelength λ₀, so Γ₀ = λ₀ = 1 and
//! k₀ = 2π throughout the crate.

use std::f64::consts::PI;

use crate::error::{check, Result, Violation};

/// Single-emitter spontaneous emission rate (the rate unit).
pub const GAMMA0: f64 = 1.0;

/// Resonant wavenumber k₀ = 2π/λ₀ with λ₀ = 1.
pub const K0: f64 = 2.0 * PI;

/// Types whose invariants can be checked independently of construction.
pub trait Validate {
    /// Every violated invariant, in field order.
    fn violations(&self) -> Vec<Violation>;

    fn validate(&self) -> Result<()> {
        check(self.violations())
    }
}

/// Dipole orientation. Only transverse dipoles (normal to the ring plane) are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarization {
    #[default]
    Transverse,
}

/// A regular N-gon of emitters in the z = 0 plane with nearest-neighbour spacing `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    n_emitters: usize,
    spacing: f64,
    polarization: Polarization,
}

impl RingGeometry {
    pub fn new(n_emitters: usize, spacing: f64) -> Result<Self> {
        let geometry = Self {
            n_emitters,
            spacing,
            polarization: Polarization::Transverse,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    /// Circumradius R = d / (2 sin(π/N)); zero for a single emitter.
    pub fn radius(&self) -> f64 {
        match self.n_emitters {
            0 | 1 => 0.0,
            n => self.spacing / (2.0 * (PI / n as f64).sin()),
        }
    }

    /// Vertex positions; vertex j sits at angle 2πj/N, so the first one is on +x.
    pub fn positions(&self) -> Vec<[f64; 3]> {
        let n = self.n_emitters;
        let r = self.radius();
        (0..n)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / n as f64;
                [r * phi.cos(), r * phi.sin(), 0.0]
            })
            .collect()
    }

    /// Tight-binding band coefficient J = 3Γ₀ / (2 k₀³ d³) of the Dicke-limit dispersion.
    pub fn dicke_coupling(&self) -> f64 {
        dicke_coupling(self.spacing)
    }
}

impl Validate for RingGeometry {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.n_emitters < 1 {
            v.push(Violation::new("n_emitters", "n_emitters ≥ 1"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            v.push(Violation::new("spacing", "spacing > 0"));
        }
        v
    }
}

/// J = 3Γ₀ / (2 k₀³ d³).
pub fn dicke_coupling(spacing: f64) -> f64 {
    3.0 * GAMMA0 / (2.0 * (K0 * spacing).powi(3))
}

/// Inverse bath temperature in units of 1/Γ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InverseTemperature {
    /// β ≥ 0; β = 0 is infinite temperature.
    Finite(f64),
    /// β → ∞ (zero temperature).
    Infinite,
}

impl InverseTemperature {
    /// Converts a dimensionless βJ into β in units of 1/Γ₀.
    pub fn from_beta_j(beta_j: f64, j: f64) -> Self {
        if beta_j.is_infinite() {
            InverseTemperature::Infinite
        } else {
            InverseTemperature::Finite(beta_j / j)
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            InverseTemperature::Finite(b) => b,
            InverseTemperature::Infinite => f64::INFINITY,
        }
    }
}

/// Phonon spectral density 𝒥(ω).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralDensity {
    /// 𝒥(ω) = f̄ ω.
    Ohmic { slope: f64 },
    /// 𝒥(ω) = 2 f ω_c ω / (ω² + ω_c²); Ohmic with f̄ = 2f/ω_c for ω ≪ ω_c.
    DrudeLorentz { strength: f64, cutoff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub density: SpectralDensity,
    pub beta: InverseTemperature,
}

impl BathSpec {
    pub fn ohmic(slope: f64, beta: InverseTemperature) -> Self {
        Self {
            density: SpectralDensity::Ohmic { slope },
            beta,
        }
    }

    /// Same bath with its coupling strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let density = match self.density {
            SpectralDensity::Ohmic { slope } => SpectralDensity::Ohmic {
                slope: slope * factor,
            },
            SpectralDensity::DrudeLorentz { strength, cutoff } => SpectralDensity::DrudeLorentz {
                strength: strength * factor,
                cutoff,
            },
        };
        Self {
            density,
            beta: self.beta,
        }
    }
}

impl Validate for BathSpec {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        match self.density {
            SpectralDensity::Ohmic { slope } => {
                if !(slope >= 0.0 && slope.is_finite()) {
                    v.push(Violation::new("coupling", "coupling ≥ 0"));
                }
            }
            SpectralDensity::DrudeLorentz { strength, cutoff } => {
                if !(strength >= 0.0 && strength.is_finite()) {
                    v.push(Violation::new("coupling", "coupling ≥ 0"));
                }
                if !(cutoff > 0.0 && cutoff.is_finite()) {
                    v.push(Violation::new("cutoff", "cutoff > 0"));
                }
            }
        }
        if let InverseTemperature::Finite(b) = self.beta {
            if !(b >= 0.0 && b.is_finite()) {
                v.push(Violation::new("inv_temperature", "inv_temperature ≥ 0"));
            }
        }
        v
    }
}

/// Non-radiative channels: trapping plus at most one dephasing model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecoherenceSpec {
    pub trap_rate: f64,
    pub local_dephasing: f64,
    pub bath: Option<BathSpec>,
}

impl Validate for DecoherenceSpec {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if !(self.trap_rate >= 0.0 && self.trap_rate.is_finite()) {
            v.push(Violation::new("trap_rate", "trap_rate ≥ 0"));
        }
        if !(self.local_dephasing >= 0.0 && self.local_dephasing.is_finite()) {
            v.push(Violation::new("local_dephasing", "local_dephasing ≥ 0"));
        }
        if let Some(bath) = &self.bath {
            v.extend(bath.violations());
            if self.local_dephasing > 0.0 {
                v.push(Violation::new("bath", "exclusive decoherence models"));
            }
        }
        v
    }
}

/// Detuning policy of a coherent drive.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Detuning {
    /// δ equals the shift of the mode with the largest radiative rate.
    #[default]
    ResonantWithBrightest,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec {
    CoherentPlaneWave { rabi: f64, detuning: Detuning },
    IncoherentSymmetric { intensity: f64, mean_photons: f64 },
}

/// Largest incoherent intensity accepted as "weak".
pub const MAX_WEAK_INTENSITY: f64 = 1e-2;

impl Validate for DriveSpec {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        match *self {
            DriveSpec::CoherentPlaneWave { rabi, detuning } => {
                if !(rabi > 0.0 && rabi.is_finite()) {
                    v.push(Violation::new("rabi", "rabi > 0"));
                }
                if let Detuning::Fixed(d) = detuning {
                    if !d.is_finite() {
                        v.push(Violation::new("detuning", "detuning finite"));
                    }
                }
            }
            DriveSpec::IncoherentSymmetric {
                intensity,
                mean_photons,
            } => {
                if !(intensity > 0.0 && intensity <= MAX_WEAK_INTENSITY) {
                    v.push(Violation::new("intensity", "0 < intensity ≤ 1e-2"));
                }
                if !(mean_photons > 0.0 && mean_photons.is_finite()) {
                    v.push(Violation::new("mean_photons", "mean_photons > 0"));
                }
            }
        }
        v
    }
}
