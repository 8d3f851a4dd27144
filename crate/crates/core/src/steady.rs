//! Weak-drive steady states.
//!
//! With ρ_gg ≈ 1 the optical coherence of each mode is slaved to the drive
//! and the mode populations obey a linear balance
//!
//! ```text
//! Γ_m^tot ρ_mm − Σ_{m'} k_{m'→m} ρ_{m'm'} = s_m
//! s_m = 4|Ω_m|² Γ_m^tot / ((Γ_m^tot)² + 4(J̃_m − δ)²)
//! Γ_m^tot = Γ̃_m + Γ_T + Γ_m^th
//! ```
//!
//! The absorbed fraction of the incident flux is σ_abs/σ = Γ_T ρ_ee / 4|Ω₀|².

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bath::RateMatrix;
use crate::error::{check, Error, Result, Violation};
use crate::greens::CouplingMatrices;
use crate::model::{Detuning, DriveSpec, Validate, GAMMA0};
use crate::modes::{DriveProjection, ModeSpectrum, Regime};

/// Balance matrices with a larger condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e14;

/// Largest ring accepted by [`site_basis_oracle`].
pub const ORACLE_MAX_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// ρ_mm in canonical mode order (site order for single-site results).
    pub populations: Vec<f64>,
    /// ρ_ee = Σ_m ρ_mm.
    pub total_excited: f64,
    /// σ_abs/σ.
    pub absorbed_fraction: f64,
    /// σ_sc/σ; only defined for a single emitter or the Dicke bright mode.
    pub scattered_fraction: Option<f64>,
}

fn validate_rates(gamma_t: f64, gamma_d: Option<f64>) -> Result<()> {
    let mut v = Vec::new();
    if !(gamma_t >= 0.0 && gamma_t.is_finite()) {
        v.push(Violation::new("trap_rate", "trap_rate ≥ 0"));
    }
    if let Some(g) = gamma_d {
        if !(g >= 0.0 && g.is_finite()) {
            v.push(Violation::new("local_dephasing", "local_dephasing ≥ 0"));
        }
    }
    check(v)
}

fn validate_rabi(rabi: f64) -> Result<()> {
    DriveSpec::CoherentPlaneWave {
        rabi,
        detuning: Detuning::ResonantWithBrightest,
    }
    .validate()
}

/// Solution of the balance equations together with its condition estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceSolution {
    pub populations: Vec<f64>,
    pub condition: f64,
}

/// Solves (diag(Γ̃ + Γ_T + outflow) − Kᵀ) ρ = s.
///
/// Modes with no outflow and no inflow are decoupled and left empty; a mode
/// with no outflow that is fed by the pump or by transitions is a sink.
pub fn solve_balance(
    radiative: &[f64],
    gamma_t: f64,
    rates: &RateMatrix,
    pump: &[f64],
) -> Result<BalanceSolution> {
    let n = radiative.len();
    if rates.n() != n || pump.len() != n {
        return Err(Error::Domain(format!(
            "mode count mismatch: {n} rates, {} transitions, {} pump terms",
            rates.n(),
            pump.len()
        )));
    }
    let outflow: Vec<f64> = (0..n)
        .map(|m| radiative[m] + gamma_t + rates.rates.row(m).sum())
        .collect();
    let mut active = Vec::with_capacity(n);
    for m in 0..n {
        if outflow[m] > 0.0 {
            active.push(m);
            continue;
        }
        let fed = pump[m] > 0.0 || (0..n).any(|b| b != m && rates.rates[(b, m)] > 0.0);
        if fed {
            return Err(Error::DegenerateSink);
        }
    }

    let k = active.len();
    let mut a = DMatrix::zeros(k, k);
    let mut rhs = DVector::zeros(k);
    for (i, &m) in active.iter().enumerate() {
        a[(i, i)] = outflow[m];
        rhs[i] = pump[m];
        for (j, &b) in active.iter().enumerate() {
            if b != m {
                a[(i, j)] = -rates.rates[(b, m)];
            }
        }
    }

    let mut populations = vec![0.0; n];
    if k == 0 {
        return Ok(BalanceSolution {
            populations,
            condition: 1.0,
        });
    }
    let norm_a = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let lu = a.lu();
    // The balance matrix is a column diagonally dominant Z-matrix, so its
    // inverse is entrywise non-negative and ‖A⁻¹‖_∞ = max(A⁻¹·1).
    let probe = lu
        .solve(&DVector::from_element(k, 1.0))
        .ok_or(Error::SingularSystem {
            condition: f64::INFINITY,
        })?;
    let inv_norm = probe.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let condition = norm_a * inv_norm;
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu.solve(&rhs).ok_or(Error::SingularSystem { condition })?;
    for (i, &m) in active.iter().enumerate() {
        populations[m] = x[i];
    }
    Ok(BalanceSolution {
        populations,
        condition,
    })
}

fn finish(
    populations: Vec<f64>,
    gamma_t: f64,
    reference_rabi: f64,
    bright_scatter: Option<f64>,
) -> SteadyState {
    let total_excited: f64 = populations.iter().sum();
    let flux = 4.0 * reference_rabi * reference_rabi / GAMMA0;
    SteadyState {
        absorbed_fraction: gamma_t * total_excited / flux,
        scattered_fraction: bright_scatter.map(|p| p / flux),
        populations,
        total_excited,
    }
}

/// Resonant weak coherent drive of an N-emitter Dicke ring with local dephasing.
///
/// The bright mode holds a share (Γ_T + Γ_D/N)/(Γ_T + Γ_D) of the excitation
/// and each dark mode (Γ_D/N)/(Γ_T + Γ_D).
pub fn coherent_dicke_local(
    n: usize,
    rabi: f64,
    gamma_t: f64,
    gamma_d: f64,
) -> Result<SteadyState> {
    if n == 0 {
        return Err(Error::InvalidParameter(vec![Violation::new(
            "n_emitters",
            "n_emitters ≥ 1",
        )]));
    }
    validate_rates(gamma_t, Some(gamma_d))?;
    validate_rabi(rabi)?;
    let nf = n as f64;
    let ng = nf * GAMMA0;
    let total = ng + gamma_d + gamma_t;
    let drive = 4.0 * nf * rabi * rabi;
    let loss = gamma_d + gamma_t;
    let rho_ee = if loss == 0.0 {
        drive / (ng * ng)
    } else {
        drive / total * loss / (gamma_t * total + gamma_d * GAMMA0)
    };
    let (bright, dark) = if loss == 0.0 {
        (rho_ee, 0.0)
    } else {
        (
            rho_ee * (gamma_t + gamma_d / nf) / loss,
            rho_ee * (gamma_d / nf) / loss,
        )
    };
    let mut populations = vec![dark; n];
    populations[0] = bright;
    Ok(finish(populations, gamma_t, rabi, Some(ng * bright)))
}

/// Weak coherent drive of an arbitrary circulant ring with thermal mode mixing.
pub fn coherent_thermal(
    spectrum: &ModeSpectrum,
    rates: &RateMatrix,
    drive: &DriveProjection,
    gamma_t: f64,
    detuning: Detuning,
) -> Result<SteadyState> {
    validate_rates(gamma_t, None)?;
    validate_rabi(drive.reference_rabi)?;
    let n = spectrum.len();
    if drive.amplitudes.len() != n {
        return Err(Error::Domain(format!(
            "drive has {} amplitudes for {n} modes",
            drive.amplitudes.len()
        )));
    }
    let delta = match detuning {
        Detuning::ResonantWithBrightest => spectrum.bright_shift(),
        Detuning::Fixed(d) => d,
    };
    let mut pump = Vec::with_capacity(n);
    for m in 0..n {
        let width = spectrum.rates[m] + gamma_t + rates.thermal_widths[m];
        let power = drive.amplitudes[m].norm_sqr();
        let offset = spectrum.shifts[m] - delta;
        let s = if power == 0.0 {
            0.0
        } else if width == 0.0 {
            if offset == 0.0 {
                return Err(Error::DegenerateSink);
            }
            0.0
        } else {
            4.0 * power * width / (width * width + 4.0 * offset * offset)
        };
        pump.push(s);
    }
    let solution = solve_balance(&spectrum.rates, gamma_t, rates, &pump)?;
    let scatter = match spectrum.regime {
        Regime::DickeIdeal => {
            let b = spectrum.bright_position();
            Some(spectrum.rates[b] * solution.populations[b])
        }
        Regime::FiniteSize => None,
    };
    Ok(finish(
        solution.populations,
        gamma_t,
        drive.reference_rabi,
        scatter,
    ))
}

/// Weak incoherent (thermal-light) drive of the fully symmetric mode of a
/// Dicke ring: the pump 4N|Ω|²/Γ_B^tot is replaced by εNΓ₀n.
///
/// The returned `absorbed_fraction` is σ_abs^inc/σ = Γ_T ρ_ee / (εnNΓ₀).
pub fn incoherent_dicke(
    n: usize,
    intensity: f64,
    mean_photons: f64,
    gamma_t: f64,
    rates: &RateMatrix,
) -> Result<SteadyState> {
    let mut radiative = vec![0.0; n];
    if let Some(r) = radiative.first_mut() {
        *r = n as f64 * GAMMA0;
    }
    incoherent_with_rates(&radiative, intensity, mean_photons, gamma_t, rates)
}

/// Incoherent drive of the symmetric mode of a finite ring.
///
/// Experimental: the symmetric mode is pumped at εnΓ̃_0 even when it is not
/// the brightest mode, and the absorbed fraction is still normalized by εnNΓ₀.
pub fn incoherent_finite_experimental(
    spectrum: &ModeSpectrum,
    intensity: f64,
    mean_photons: f64,
    gamma_t: f64,
    rates: &RateMatrix,
) -> Result<SteadyState> {
    incoherent_with_rates(&spectrum.rates, intensity, mean_photons, gamma_t, rates)
}

fn incoherent_with_rates(
    radiative: &[f64],
    intensity: f64,
    mean_photons: f64,
    gamma_t: f64,
    rates: &RateMatrix,
) -> Result<SteadyState> {
    validate_rates(gamma_t, None)?;
    DriveSpec::IncoherentSymmetric {
        intensity,
        mean_photons,
    }
    .validate()?;
    let n = radiative.len();
    if n == 0 {
        return Err(Error::InvalidParameter(vec![Violation::new(
            "n_emitters",
            "n_emitters ≥ 1",
        )]));
    }
    let mut pump = vec![0.0; n];
    pump[0] = intensity * radiative[0] * mean_photons;
    let solution = solve_balance(radiative, gamma_t, rates, &pump)?;
    let total_excited: f64 = solution.populations.iter().sum();
    let incident = intensity * mean_photons * n as f64 * GAMMA0;
    Ok(SteadyState {
        absorbed_fraction: gamma_t * total_excited / incident,
        scattered_fraction: Some(radiative[0] * solution.populations[0] / incident),
        populations: solution.populations,
        total_excited,
    })
}

fn dense_solve(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Result<DVector<Complex64>> {
    let norm_1 = |m: &DMatrix<Complex64>| {
        m.column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let norm_a = norm_1(&a);
    let lu = a.lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = norm_a * norm_1(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    Ok(inverse * b)
}

/// Total excited population of a locally dephased ring, solved directly in
/// the site basis with no use of the spin-wave structure.
///
/// First the coherences c_j = ρ_jg from
/// (H − δ − i(Γ_D + Γ_T)/2) c = Ω, with H = J − iΓ/2; then the excited block
/// X from the vectorized equation
///
/// ```text
/// −i(H X − X H†) + Γ_D(diag X − X) − Γ_T X + i(Ω c† − c Ω†) = 0
/// ```
pub fn site_basis_oracle(
    couplings: &CouplingMatrices,
    gamma_t: f64,
    gamma_d: f64,
    rabi: &[Complex64],
    detuning: f64,
) -> Result<f64> {
    let n = couplings.n();
    if n > ORACLE_MAX_SITES {
        return Err(Error::Domain(format!(
            "site-basis oracle is limited to {ORACLE_MAX_SITES} sites, got {n}"
        )));
    }
    if rabi.len() != n {
        return Err(Error::Domain(format!(
            "{} drive amplitudes for {n} sites",
            rabi.len()
        )));
    }
    validate_rates(gamma_t, Some(gamma_d))?;
    let i = Complex64::i();
    let h = DMatrix::from_fn(n, n, |j, k| {
        let mut v = Complex64::new(
            couplings.dispersive[(j, k)],
            -0.5 * couplings.dissipative[(j, k)],
        );
        if j == k {
            v -= detuning;
        }
        v
    });

    let m = DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            h[(j, k)] - i * 0.5 * (gamma_d + gamma_t)
        } else {
            h[(j, k)]
        }
    });
    let omega = DVector::from_column_slice(rabi);
    let c = dense_solve(m, omega.clone())?;

    // Unknown X_pq sits at index p·n + q; row j·n + k holds equation (j, k).
    let idx = |p: usize, q: usize| p * n + q;
    let mut l = DMatrix::<Complex64>::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let row = idx(j, k);
            for p in 0..n {
                // −i H_jp X_pk
                l[(row, idx(p, k))] += -i * h[(j, p)];
                // +i X_jp (H†)_pk = +i X_jp conj(H_kp)
                l[(row, idx(j, p))] += i * h[(k, p)].conj();
            }
            l[(row, row)] -= gamma_d + gamma_t;
            if j == k {
                l[(row, row)] += gamma_d;
            }
        }
    }
    let source = DVector::from_fn(n * n, |r, _| {
        let (j, k) = (r / n, r % n);
        // −i(Ω_j c_k* − c_j Ω_k*)
        -i * (omega[j] * c[k].conj() - c[j] * omega[k].conj())
    });
    let x = dense_solve(l, source)?;
    let trace: Complex64 = (0..n).map(|j| x[idx(j, j)]).sum();
    Ok(trace.re)
}
