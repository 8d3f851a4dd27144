//! Spin-wave collective modes of a ring.
//!
//! A ring with N-fold rotational symmetry has circulant couplings, so its
//! single-excitation eigenmodes are the spin waves
//! |m⟩ = N^{-1/2} Σ_j e^{i2πmj/N} |j⟩ with shifts and rates given by the
//! discrete Fourier transforms of the coupling rows.
//!
//! Modes are stored in a fixed canonical order, `0, 1, −1, 2, −2, …`, with
//! the unpaired edge mode `N/2` last when N is even.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::CouplingMatrices;
use crate::model::{dicke_coupling, RingGeometry, GAMMA0, K0};

/// Largest imaginary residue of a Fourier transform accepted as round-off.
const IMAG_RESIDUE_TOL: f64 = 1e-10;
const CIRCULANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Perfectly dark subradiant modes, Γ̃_0 = NΓ₀.
    DickeIdeal,
    FiniteSize,
}

/// Canonical mode labels for an N-site ring.
pub fn mode_indices(n: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(0);
    let half = (n as i64 - 1) / 2;
    for m in 1..=half {
        out.push(m);
        out.push(-m);
    }
    if n.is_multiple_of(2) {
        out.push(n as i64 / 2);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub indices: Vec<i64>,
    /// Collective shifts J̃_m.
    pub shifts: Vec<f64>,
    /// Collective radiative rates Γ̃_m.
    pub rates: Vec<f64>,
    /// Label of the brightest mode.
    pub bright_index: i64,
    pub regime: Regime,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Position of label `m` in the canonical order.
    pub fn position(&self, m: i64) -> Option<usize> {
        self.indices.iter().position(|&x| x == m)
    }

    pub fn bright_position(&self) -> usize {
        self.position(self.bright_index)
            .expect("bright index belongs to the spectrum")
    }

    pub fn bright_shift(&self) -> f64 {
        self.shifts[self.bright_position()]
    }

    pub fn bright_rate(&self) -> f64 {
        self.rates[self.bright_position()]
    }
}

/// Σ_ℓ e^{i2πmℓ/N} row[ℓ], with the imaginary residue returned separately.
fn fourier(row: &[f64], m: i64) -> Complex64 {
    let n = row.len() as f64;
    row.iter()
        .enumerate()
        .map(|(l, &v)| Complex64::from_polar(v, 2.0 * PI * m as f64 * l as f64 / n))
        .sum()
}

/// Exact spin-wave spectrum of a finite ring from its full pairwise couplings.
pub fn spectrum_finite(
    geometry: &RingGeometry,
    couplings: &CouplingMatrices,
) -> Result<ModeSpectrum> {
    let n = geometry.n_emitters();
    if couplings.n() != n {
        return Err(Error::Domain(format!(
            "coupling matrices are {}x{} for a ring of {n}",
            couplings.n(),
            couplings.n()
        )));
    }
    let deviation = couplings.circulant_deviation();
    let scale = couplings
        .dispersive
        .amax()
        .max(couplings.dissipative.amax())
        .max(1.0);
    if deviation > CIRCULANT_TOL * scale {
        return Err(Error::NonCirculantInput { deviation });
    }
    let j_row: Vec<f64> = couplings.dispersive.row(0).iter().copied().collect();
    let g_row: Vec<f64> = couplings.dissipative.row(0).iter().copied().collect();
    let indices = mode_indices(n);
    let mut shifts = Vec::with_capacity(n);
    let mut rates = Vec::with_capacity(n);
    for &m in &indices {
        let jm = fourier(&j_row, m);
        let gm = fourier(&g_row, m);
        let residue = jm.im.abs().max(gm.im.abs());
        if residue > IMAG_RESIDUE_TOL * scale * n as f64 {
            return Err(Error::NonCirculantInput { deviation: residue });
        }
        shifts.push(jm.re);
        rates.push(gm.re);
    }
    let bright_index = argmax_mode(&indices, &rates);
    Ok(ModeSpectrum {
        indices,
        shifts,
        rates,
        bright_index,
        regime: Regime::FiniteSize,
    })
}

/// Idealized small-ring spectrum: J̃_m = J cos(2πm/N), one bright mode with NΓ₀.
pub fn spectrum_dicke(n: usize, spacing: f64) -> ModeSpectrum {
    let j = dicke_coupling(spacing);
    let indices = mode_indices(n);
    let shifts = indices
        .iter()
        .map(|&m| j * (2.0 * PI * m as f64 / n as f64).cos())
        .collect();
    let rates = indices
        .iter()
        .map(|&m| if m == 0 { n as f64 * GAMMA0 } else { 0.0 })
        .collect();
    ModeSpectrum {
        indices,
        shifts,
        rates,
        bright_index: 0,
        regime: Regime::DickeIdeal,
    }
}

/// Tie tolerance for rates that are equal up to round-off.
const TIE_TOL: f64 = 1e-12;

fn argmax_mode(indices: &[i64], rates: &[f64]) -> i64 {
    let max = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOL * max.abs().max(f64::MIN_POSITIVE);
    indices
        .iter()
        .zip(rates)
        .filter(|(_, &r)| max - r <= tol)
        .map(|(&m, _)| m)
        .min_by_key(|&m| (m.abs(), m < 0))
        .expect("nonempty spectrum")
}

/// Mode with the largest radiative rate; ties go to the smallest |m|, then m ≥ 0.
pub fn bright_mode(spectrum: &ModeSpectrum) -> i64 {
    argmax_mode(&spectrum.indices, &spectrum.rates)
}

/// Plane-wave drive projected onto the spin-wave modes, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProjection {
    pub amplitudes: Vec<Complex64>,
    pub reference_rabi: f64,
}

impl DriveProjection {
    /// A drive of uniform phase (ring much smaller than λ₀): only m = 0 is addressed.
    pub fn uniform(n: usize, rabi: f64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        if n > 0 {
            amplitudes[0] = Complex64::new((n as f64).sqrt() * rabi, 0.0);
        }
        Self {
            amplitudes,
            reference_rabi: rabi,
        }
    }

    pub fn total_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Ω_m = N^{-1/2} Σ_j e^{−i2πmj/N} Ω₀ e^{ik₀x_j} for a plane wave travelling along +x.
pub fn project_drive(geometry: &RingGeometry, rabi: f64) -> DriveProjection {
    let n = geometry.n_emitters();
    let positions = geometry.positions();
    let norm = 1.0 / (n as f64).sqrt();
    let amplitudes = mode_indices(n)
        .into_iter()
        .map(|m| {
            positions
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let phase = K0 * p[0] - 2.0 * PI * m as f64 * j as f64 / n as f64;
                    Complex64::from_polar(rabi * norm, phase)
                })
                .sum()
        })
        .collect();
    DriveProjection {
        amplitudes,
        reference_rabi: rabi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::coupling_matrices;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn finite(n: usize, d: f64) -> ModeSpectrum {
        let g = RingGeometry::new(n, d).unwrap();
        spectrum_finite(&g, &coupling_matrices(&g).unwrap()).unwrap()
    }

    #[test]
    fn canonical_order() {
        assert_eq!(mode_indices(1), vec![0]);
        assert_eq!(mode_indices(4), vec![0, 1, -1, 2]);
        assert_eq!(mode_indices(5), vec![0, 1, -1, 2, -2]);
    }

    #[test]
    fn dicke_square_band() {
        let s = spectrum_dicke(4, 0.1);
        let j = dicke_coupling(0.1);
        let ratios: Vec<f64> = s.shifts.iter().map(|x| x / j).collect();
        assert_relative_eq!(ratios[0], 1.0);
        assert!(ratios[1].abs() < 1e-15 && ratios[2].abs() < 1e-15);
        assert_relative_eq!(ratios[3], -1.0);
        assert_eq!(s.rates, vec![4.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn dicke_coupling_value() {
        // 3 / (2 (0.2π)³)
        assert_relative_eq!(dicke_coupling(0.1), 6.047_162_7, max_relative = 1e-8);
    }

    #[test]
    fn sum_rules_hold() {
        for n in [1, 2, 5, 10, 33] {
            for d in [0.05, 0.2, 0.7] {
                let s = finite(n, d);
                let total: f64 = s.rates.iter().sum();
                assert_relative_eq!(total, n as f64, max_relative = 1e-10);
                let shift_sum: f64 = s.shifts.iter().sum();
                let scale = s.shifts.iter().map(|x| x.abs()).fold(1.0, f64::max);
                assert!(shift_sum.abs() <= 1e-10 * n as f64 * scale, "{shift_sum}");
                assert!(s.rates.iter().all(|&r| r >= -1e-10));
            }
        }
    }

    #[test]
    fn degenerate_pairs() {
        let s = finite(11, 0.3);
        for m in 1..=5 {
            let (a, b) = (s.position(m).unwrap(), s.position(-m).unwrap());
            assert!((s.rates[a] - s.rates[b]).abs() <= 1e-12);
            assert!((s.shifts[a] - s.shifts[b]).abs() <= 1e-12 * s.shifts[a].abs().max(1.0));
        }
    }

    #[test]
    fn small_ring_approaches_dicke() {
        let s = finite(10, 0.01);
        assert!((s.rates[0] - 10.0).abs() / 10.0 < 0.02);
        assert!(s.rates[1..].iter().all(|&r| r <= 0.05));
        for n in 2..=20 {
            let s = finite(n, 0.005);
            assert!((s.rates[0] - n as f64).abs() / n as f64 <= 0.01, "n={n}");
        }
    }

    #[test]
    fn near_field_band_follows_static_dipole_sum() {
        let (n, d) = (10, 0.01);
        let s = finite(n, d);
        let chord = |r: usize| d * (PI * r as f64 / n as f64).sin() / (PI / n as f64).sin();
        for (k, &m) in s.indices.iter().enumerate() {
            let expected: f64 = (1..n)
                .map(|r| {
                    let x = K0 * chord(r);
                    3.0 / (4.0 * x.powi(3)) * (2.0 * PI * m as f64 * r as f64 / n as f64).cos()
                })
                .sum();
            let scale = 3.0 / (4.0 * (K0 * d).powi(3));
            assert!((s.shifts[k] - expected).abs() <= 0.03 * scale, "m={m}");
        }
    }

    #[test]
    fn intermediate_spacing_bright_rate_between_limits() {
        let s = finite(10, 0.2);
        let gb = s.bright_rate();
        assert!(gb > 1.0 && gb < 10.0, "{gb}");
    }

    #[test]
    fn bright_mode_rules() {
        assert_eq!(spectrum_dicke(7, 0.1).bright_index, 0);
        assert_eq!(bright_mode(&finite(10, 0.05)), 0);
        let tie = ModeSpectrum {
            indices: vec![0, 1, -1],
            shifts: vec![0.0; 3],
            rates: vec![0.5, 2.0, 2.0],
            bright_index: 0,
            regime: Regime::FiniteSize,
        };
        assert_eq!(bright_mode(&tie), 1);
    }

    #[test]
    fn non_circulant_input_is_rejected() {
        let g = RingGeometry::new(4, 0.2).unwrap();
        let mut c = coupling_matrices(&g).unwrap();
        c.dissipative[(0, 1)] += 0.1;
        c.dissipative[(1, 0)] += 0.1;
        assert!(matches!(
            spectrum_finite(&g, &c),
            Err(Error::NonCirculantInput { .. })
        ));
    }

    #[test]
    fn drive_projection_limits() {
        // d → 0: uniform phase, only the symmetric mode is driven.
        let p = project_drive(&RingGeometry::new(6, 1e-9).unwrap(), 1.0);
        assert_relative_eq!(p.amplitudes[0].norm(), 6f64.sqrt(), max_relative = 1e-9);
        assert!(p.amplitudes[1..].iter().all(|a| a.norm() < 1e-6));

        let p = project_drive(&RingGeometry::new(10, 0.2).unwrap(), 1.0);
        assert!(p.amplitudes[1].norm_sqr() > 1e-3);
        assert!(p.amplitudes[2].norm_sqr() > 1e-3);
    }

    proptest! {
        #[test]
        fn parseval(n in 1usize..40, d in 0.01f64..3.0, rabi in 0.01f64..2.0) {
            let p = project_drive(&RingGeometry::new(n, d).unwrap(), rabi);
            let expected = n as f64 * rabi * rabi;
            prop_assert!((p.total_power() - expected).abs() <= 1e-10 * expected);
        }

        #[test]
        fn bright_mode_is_scale_invariant(
            rates in proptest::collection::vec(0.0f64..5.0, 1..12),
            scale in 1e-3f64..1e3,
        ) {
            let indices = mode_indices(rates.len());
            let a = argmax_mode(&indices, &rates);
            let scaled: Vec<f64> = rates.iter().map(|r| r * scale).collect();
            prop_assert_eq!(a, argmax_mode(&indices, &scaled));
        }
    }
}
