//! Free-space dipole-dipole couplings for transversely polarized emitters.
//!
//! For dipoles normal to the ring plane only the zz component of the
//! Green's tensor contributes:
//!
//! ```text
//! G_zz(r) = 3Γ₀ e^{ik₀r} (1 − ik₀r − k₀²r²) / (4 k₀³ r³)
//! ```
//!
//! with dispersive coupling J = Re G_zz and dissipative coupling Γ = −2 Im G_zz.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{dicke_coupling, RingGeometry, GAMMA0, K0};

/// Separations below this (in λ₀) are rejected instead of series-expanded.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Below this k₀r the imaginary part uses a series for sin x − x cos x.
const SERIES_SWITCH: f64 = 0.5;

/// sin x − x cos x, accurate for small x where the direct form cancels.
fn sin_minus_x_cos(x: f64) -> f64 {
    if x >= SERIES_SWITCH {
        return x.sin() - x * x.cos();
    }
    // Σ_{k≥1} (−1)^{k+1} 2k x^{2k+1} / (2k+1)!
    let x2 = x * x;
    let mut power = x * x2; // x^{2k+1}
    let mut factorial = 6.0; // (2k+1)!
    let mut sum = 0.0;
    for k in 1..=12 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * 2.0 * k as f64 * power / factorial;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        power *= x2;
        factorial *= ((2 * k + 2) * (2 * k + 3)) as f64;
    }
    sum
}

/// zz component of the free-space Green's tensor at separation `r` (λ₀ units).
pub fn green_zz(r: f64) -> Result<Complex64> {
    if !r.is_finite() || r < MIN_SEPARATION {
        return Err(Error::Domain(format!(
            "separation {r} must be ≥ {MIN_SEPARATION} λ₀"
        )));
    }
    let x = K0 * r;
    let (sin, cos) = x.sin_cos();
    let prefactor = 3.0 * GAMMA0 / (4.0 * x * x * x);
    // e^{ix}(1 − x² − ix) split into real and imaginary parts.
    let re = (1.0 - x * x) * cos + x * sin;
    let im = sin_minus_x_cos(x) - x * x * sin;
    Ok(Complex64::new(prefactor * re, prefactor * im))
}

/// Dispersive coupling J(r) = Re G_zz(r).
pub fn dispersive_coupling(r: f64) -> Result<f64> {
    green_zz(r).map(|g| g.re)
}

/// Dissipative coupling Γ(r) = −2 Im G_zz(r).
pub fn dissipative_coupling(r: f64) -> Result<f64> {
    green_zz(r).map(|g| -2.0 * g.im)
}

/// Pairwise couplings J_ij (zero diagonal) and Γ_ij (diagonal Γ₀).
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub dispersive: DMatrix<f64>,
    pub dissipative: DMatrix<f64>,
}

impl CouplingMatrices {
    pub fn n(&self) -> usize {
        self.dispersive.nrows()
    }

    /// Largest deviation of any row from the cyclic shift of the first row.
    pub fn circulant_deviation(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for m in [&self.dispersive, &self.dissipative] {
            for i in 0..n {
                for j in 0..n {
                    let shifted = m[(0, (j + n - i) % n)];
                    worst = worst.max((m[(i, j)] - shifted).abs());
                }
            }
        }
        worst
    }

    /// Idealized small-ring couplings: Γ_ij = Γ₀ for every pair and a
    /// nearest-neighbour hop J/2 with J = 3Γ₀/(2k₀³d³), so that the spin-wave
    /// shifts are J cos(2πm/N).
    pub fn dicke(n: usize, spacing: f64) -> Self {
        let hop = 0.5 * dicke_coupling(spacing);
        let mut dispersive = DMatrix::zeros(n, n);
        if n >= 2 {
            for j in 0..n {
                let k = (j + 1) % n;
                dispersive[(j, k)] += hop;
                dispersive[(k, j)] += hop;
            }
        }
        Self {
            dispersive,
            dissipative: DMatrix::from_element(n, n, GAMMA0),
        }
    }
}

/// Couplings between every pair of ring sites.
pub fn coupling_matrices(geometry: &RingGeometry) -> Result<CouplingMatrices> {
    let n = geometry.n_emitters();
    let positions = geometry.positions();
    let mut dispersive = DMatrix::zeros(n, n);
    let mut dissipative = DMatrix::from_element(n, n, 0.0);
    for i in 0..n {
        dissipative[(i, i)] = GAMMA0;
        for j in (i + 1)..n {
            let (a, b) = (positions[i], positions[j]);
            let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
            let g = green_zz(r)?;
            dispersive[(i, j)] = g.re;
            dispersive[(j, i)] = g.re;
            dissipative[(i, j)] = -2.0 * g.im;
            dissipative[(j, i)] = -2.0 * g.im;
        }
    }
    Ok(CouplingMatrices {
        dispersive,
        dissipative,
    })
}
