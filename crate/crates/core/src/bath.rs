//! Thermal phonon-bath transitions between collective modes.
//!
//! With an antisymmetric spectral density 𝒥(−ω) = −𝒥(ω) the Bose-weighted
//! rate n(ω_ba)𝒥(ω_ba) + (1 + n(ω_ab))𝒥(ω_ab) collapses to
//!
//! ```text
//! k_{a→b} = 2 𝒥(ω_ab) / (1 − e^{−β ω_ab}),   ω_ab = J̃_a − J̃_b
//! ```
//!
//! which is what [`transition_rate`] evaluates. Its ω → 0 limit 2𝒥'(0)/β is
//! also the rate of the diagonal term k_{m→m}: it moves no population but
//! damps the optical coherence of mode m, so it is part of the thermal
//! width Γ_m^th = Σ_{m'} k_{m→m'} (sum over every mode, m' = m included).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{BathSpec, InverseTemperature, SpectralDensity};
use crate::modes::ModeSpectrum;
use crate::special::bright_width_sum;

/// 𝒥(ω), antisymmetric in ω.
pub fn spectral_density(omega: f64, density: &SpectralDensity) -> f64 {
    density_slope(omega, density) * omega
}

/// 𝒥(ω)/ω, finite at ω = 0.
fn density_slope(omega: f64, density: &SpectralDensity) -> f64 {
    match *density {
        SpectralDensity::Ohmic { slope } => slope,
        SpectralDensity::DrudeLorentz { strength, cutoff } => {
            2.0 * strength * cutoff / (omega * omega + cutoff * cutoff)
        }
    }
}

/// ω / (1 − e^{−βω}) with its removable singularity and both tails handled.
fn bose_weight(omega: f64, beta: InverseTemperature) -> Result<f64> {
    match beta {
        InverseTemperature::Infinite => Ok(omega.max(0.0)),
        InverseTemperature::Finite(0.0) => Err(Error::InfiniteTemperatureRate),
        InverseTemperature::Finite(b) => {
            let x = b * omega;
            Ok(if x == 0.0 {
                1.0 / b
            } else if x > 0.0 {
                omega / -(-x).exp_m1()
            } else {
                // ω e^{x}/(e^{x} − 1) written without overflow for x ≪ 0
                -omega / (-x).exp_m1()
            })
        }
    }
}

/// Rate k for a transition releasing energy ω_ab = J̃_a − J̃_b into the bath.
pub fn transition_rate(omega_ab: f64, bath: &BathSpec) -> Result<f64> {
    Ok(2.0 * density_slope(omega_ab, &bath.density) * bose_weight(omega_ab, bath.beta)?)
}

/// Shifts closer than this (relative to the band scale) count as degenerate.
const DEGENERACY_TOL: f64 = 1e-12;

/// Mode-to-mode transition rates in canonical mode order.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    /// `rates[(a, b)]` = k_{a→b} for a ≠ b; zero diagonal.
    pub rates: DMatrix<f64>,
    /// k_{m→m}, identical for every mode.
    pub self_rate: f64,
    /// Γ_m^th = Σ_{b≠m} k_{m→b} + k_{m→m}.
    pub thermal_widths: Vec<f64>,
    /// Γ_B^th of the mode at `bright_position`.
    pub bright_width: f64,
    pub bright_position: usize,
}

impl RateMatrix {
    fn from_parts(rates: DMatrix<f64>, self_rate: f64, bright_position: usize) -> Self {
        let thermal_widths: Vec<f64> = rates.row_iter().map(|r| r.sum() + self_rate).collect();
        let bright_width = thermal_widths.get(bright_position).copied().unwrap_or(0.0);
        Self {
            rates,
            self_rate,
            thermal_widths,
            bright_width,
            bright_position,
        }
    }

    pub fn n(&self) -> usize {
        self.rates.nrows()
    }

    /// No thermal coupling at all.
    pub fn zero(n: usize) -> Self {
        Self::from_parts(DMatrix::zeros(n, n), 0.0, 0)
    }

    /// Pure local dephasing Γ_D written as uniform mode exchange k = Γ_D/N
    /// (including the diagonal term), so every Γ_m^th equals Γ_D.
    pub fn local_dephasing(n: usize, gamma_d: f64) -> Self {
        let k = if n == 0 { 0.0 } else { gamma_d / n as f64 };
        let mut rates = DMatrix::from_element(n, n, k);
        rates.fill_diagonal(0.0);
        Self::from_parts(rates, k, 0)
    }

    /// Every rate multiplied by `factor` (rates are linear in the bath coupling).
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(
            &self.rates * factor,
            self.self_rate * factor,
            self.bright_position,
        )
    }

    /// Generator W of the Pauli master equation dp/dt = W p.
    pub fn pauli_generator(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut w = self.rates.transpose();
        for m in 0..n {
            w[(m, m)] = -self.rates.row(m).sum();
        }
        w
    }
}

/// Thermal rates between the modes of `spectrum`.
pub fn rate_matrix(spectrum: &ModeSpectrum, bath: &BathSpec) -> Result<RateMatrix> {
    let n = spectrum.len();
    let scale = spectrum
        .shifts
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(s.abs()))
        .max(f64::MIN_POSITIVE);
    let mut rates = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut omega = spectrum.shifts[a] - spectrum.shifts[b];
            if omega.abs() <= DEGENERACY_TOL * scale {
                omega = 0.0;
            }
            rates[(a, b)] = transition_rate(omega, bath)?;
        }
    }
    let self_rate = transition_rate(0.0, bath)?;
    Ok(RateMatrix::from_parts(
        rates,
        self_rate,
        spectrum.bright_position(),
    ))
}

/// Zero-temperature thermal width of mode `m` on an N-site Dicke ring:
///
/// ```text
/// Γ_m^th / 2f̄J = cos(2πm/N) max{0, N − 2|m| − 1} + max{0, csc(π/N) sin(π(2|m|+1)/N)}
/// ```
pub fn zero_t_width_closed(m: i64, n: usize, fbar_j: f64) -> f64 {
    assert!(n >= 2, "closed form needs at least two emitters");
    let n_i = n as i64;
    let a = m.abs();
    // K modes lie strictly below m; with φ = π/N the bracket equals
    // sin(Kφ)/sin φ − K cos((K+1)φ), whose arguments stay small near the
    // band bottom where the two terms nearly cancel.
    let k = n_i - 2 * a - 1;
    if k <= 0 {
        return 0.0;
    }
    let phi = PI / n as f64;
    let edge = (PI * k.min(n_i - k) as f64 / n as f64).sin() / phi.sin();
    let band = k as f64 * (phi * (k + 1) as f64).cos();
    2.0 * fbar_j * (edge - band)
}

/// Continuum (large-N) estimate Γ_B^th = 2N f̄J Σ_n e^{−nβJ}[I₀(nβJ) − I₁(nβJ)].
pub fn bright_width_series(n: usize, beta_j: f64, fbar_j: f64, max_terms: usize) -> Result<f64> {
    Ok(2.0 * n as f64 * fbar_j * bright_width_sum(beta_j, max_terms)?.value)
}
