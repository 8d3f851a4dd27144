//! Analytic benchmarks: single-emitter cross sections, the locally dephased
//! Dicke ring, the zero-temperature thermal ring, independent-emitter ratios
//! and detuning-averaged cross sections.
//!
//! All cross sections are returned as fractions of the resonant
//! single-emitter scattering cross section σ.

use crate::bath::RateMatrix;
use crate::error::{check, Error, Result, Violation};
use crate::model::{Detuning, GAMMA0};
use crate::modes::{spectrum_dicke, DriveProjection};
use crate::quadrature::integrate_lorentzian_like;
use crate::steady::coherent_thermal;

fn nonnegative(field: &'static str, constraint: &'static str, x: f64, v: &mut Vec<Violation>) {
    if !(x >= 0.0 && x.is_finite()) {
        v.push(Violation::new(field, constraint));
    }
}

fn check_rates(n: usize, gamma_t: f64, dephasing: f64) -> Result<()> {
    let mut v = Vec::new();
    if n < 1 {
        v.push(Violation::new("n_emitters", "n_emitters ≥ 1"));
    }
    nonnegative("trap_rate", "trap_rate ≥ 0", gamma_t, &mut v);
    nonnegative("local_dephasing", "local_dephasing ≥ 0", dephasing, &mut v);
    check(v)
}

/// Weak-drive response of one emitter with radiative rate Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleAtom {
    /// ρ_ee / |Ω|² = 4 / ((Γ + Γ_D + Γ_T)(Γ + Γ_T)).
    pub excitation: f64,
    pub scattered: f64,
    pub absorbed: f64,
}

/// σ_sc/σ = Γ/(Γ+Γ_D+Γ_T) · Γ/(Γ+Γ_T) and σ_abs/σ = Γ/(Γ+Γ_D+Γ_T) · Γ_T/(Γ+Γ_T).
pub fn single_atom(gamma: f64, gamma_t: f64, gamma_d: f64) -> Result<SingleAtom> {
    let mut v = Vec::new();
    if !(gamma > 0.0 && gamma.is_finite()) {
        v.push(Violation::new("gamma", "gamma > 0"));
    }
    nonnegative("trap_rate", "trap_rate ≥ 0", gamma_t, &mut v);
    nonnegative("local_dephasing", "local_dephasing ≥ 0", gamma_d, &mut v);
    check(v)?;
    let excite = gamma / (gamma + gamma_d + gamma_t);
    let branch = gamma + gamma_t;
    Ok(SingleAtom {
        excitation: 4.0 / ((gamma + gamma_d + gamma_t) * branch),
        scattered: excite * gamma / branch,
        absorbed: excite * gamma_t / branch,
    })
}

/// σ_abs/σ of an N-emitter Dicke ring with local dephasing Γ_D:
///
/// ```text
/// NΓ₀/(NΓ₀ + Γ_D + Γ_T) · (Γ_D + Γ_T)/(NΓ₀ + Γ_D + Γ_T + Γ_DΓ₀/Γ_T)
/// ```
///
/// evaluated in a form that stays finite as Γ_T → 0 (where it vanishes).
pub fn local_dephasing_sigma(n: usize, gamma_t: f64, gamma_d: f64) -> Result<f64> {
    check_rates(n, gamma_t, gamma_d)?;
    let ng = n as f64 * GAMMA0;
    let total = ng + gamma_d + gamma_t;
    let loss = gamma_d + gamma_t;
    if loss == 0.0 {
        return Ok(0.0);
    }
    Ok(ng / total * loss * gamma_t / (gamma_t * total + gamma_d * GAMMA0))
}

/// Γ_T ≪ Γ_D: NΓ₀/(NΓ₀ + Γ_D + Γ_T) · Γ_T/(Γ₀ + Γ_T).
pub fn local_dephasing_weak_trap(n: usize, gamma_t: f64, gamma_d: f64) -> Result<f64> {
    check_rates(n, gamma_t, gamma_d)?;
    let ng = n as f64 * GAMMA0;
    Ok(ng / (ng + gamma_d + gamma_t) * gamma_t / (GAMMA0 + gamma_t))
}

/// Γ_D ≪ Γ_T (and the N → ∞ form): a single emitter of rate NΓ₀ whose
/// trapping rate is Γ_T + Γ_D.
pub fn local_dephasing_weak_dephasing(n: usize, gamma_t: f64, gamma_d: f64) -> Result<f64> {
    check_rates(n, gamma_t, gamma_d)?;
    let ng = n as f64 * GAMMA0;
    let total = ng + gamma_d + gamma_t;
    Ok(ng * (gamma_d + gamma_t) / (total * total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimumMethod {
    ClosedForm,
    GridRefine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumReport {
    /// Optimal parameter values by name.
    pub argmax: Vec<(String, f64)>,
    /// σ_abs/σ at the optimum.
    pub value: f64,
    pub method: OptimumMethod,
    /// The optimum lies on the edge of the admissible region.
    pub boundary: bool,
    /// The optimum is not isolated (a ridge of equal values).
    pub degenerate: bool,
}

impl OptimumReport {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.argmax.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// Dephasing rate maximizing [`local_dephasing_sigma`] at fixed N and Γ_T.
///
/// Γ_D^max = Γ₀√(N(N−1)Γ_T/(Γ_T+Γ₀)) − Γ_T, positive only while Γ_T < (N−1)Γ₀;
/// the interior maximum is (√((N−1)/N) + √((Γ₀+Γ_T)/Γ_T))^{−2}. Otherwise the
/// optimum sits at Γ_D = 0 and is flagged as a boundary optimum.
pub fn optimal_local_dephasing(n: usize, gamma_t: f64) -> Result<OptimumReport> {
    let mut v = Vec::new();
    if n < 1 {
        v.push(Violation::new("n_emitters", "n_emitters ≥ 1"));
    }
    if !(gamma_t > 0.0 && gamma_t.is_finite()) {
        v.push(Violation::new("trap_rate", "trap_rate > 0"));
    }
    check(v)?;
    let nf = n as f64;
    let stationary = GAMMA0 * (nf * (nf - 1.0) * gamma_t / (gamma_t + GAMMA0)).sqrt() - gamma_t;
    let (gamma_d, value, boundary) = if stationary > 0.0 {
        let value = (((nf - 1.0) / nf).sqrt() + ((GAMMA0 + gamma_t) / gamma_t).sqrt()).powi(-2);
        (stationary, value, false)
    } else {
        (0.0, local_dephasing_sigma(n, gamma_t, 0.0)?, true)
    };
    Ok(OptimumReport {
        argmax: vec![("gamma_d".to_string(), gamma_d)],
        value,
        method: OptimumMethod::ClosedForm,
        boundary,
        degenerate: false,
    })
}

/// Zero-temperature thermal ring, all quantities for unit |Ω|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTemperature {
    /// ρ_BB/|Ω|² = 4N/(NΓ₀ + Γ_T + Γ_B^th)².
    pub bright: f64,
    /// ρ_ee/|Ω|² = (Γ_B^th + Γ_T)/Γ_T · ρ_BB/|Ω|².
    pub excited: f64,
    /// NΓ₀(Γ_T + Γ_B^th)/(NΓ₀ + Γ_T + Γ_B^th)².
    pub absorbed: f64,
}

/// Closed form of the β → ∞ thermal ring with bright-mode thermal width Γ_B^th.
///
/// With no trap the dark modes collect population forever, which is
/// reported as [`Error::DegenerateSink`].
pub fn zero_t_thermal_sigma(n: usize, gamma_t: f64, gamma_bth: f64) -> Result<ZeroTemperature> {
    check_rates(n, gamma_t, gamma_bth)?;
    if gamma_t == 0.0 && gamma_bth > 0.0 {
        return Err(Error::DegenerateSink);
    }
    let ng = n as f64 * GAMMA0;
    let loss = gamma_t + gamma_bth;
    let total = ng + loss;
    let bright = 4.0 * n as f64 / (total * total);
    let excited = if gamma_t == 0.0 {
        bright
    } else {
        loss / gamma_t * bright
    };
    Ok(ZeroTemperature {
        bright,
        excited,
        absorbed: ng * loss / (total * total),
    })
}

/// σ_abs/(N σ_abs^{1at}) with the reference emitter at rate Γ₀, trap Γ_T and
/// dephasing `baseline_dephasing`.
pub fn independent_ratio(
    collective: f64,
    n: usize,
    gamma_t: f64,
    baseline_dephasing: f64,
) -> Result<f64> {
    if gamma_t.is_nan() || gamma_t <= 0.0 {
        return Err(Error::InvalidParameter(vec![Violation::new(
            "trap_rate",
            "trap_rate > 0",
        )]));
    }
    let reference = single_atom(GAMMA0, gamma_t, baseline_dephasing)?.absorbed;
    Ok(collective / (n as f64 * reference))
}

/// Independent-emitter ratio for local dephasing (reference has the same Γ_D).
pub fn local_independent_ratio(n: usize, gamma_t: f64, gamma_d: f64) -> Result<f64> {
    independent_ratio(
        local_dephasing_sigma(n, gamma_t, gamma_d)?,
        n,
        gamma_t,
        gamma_d,
    )
}

/// Independent-emitter ratio at zero temperature (reference dephasing Γ_B^th).
pub fn zero_t_independent_ratio(n: usize, gamma_t: f64, gamma_bth: f64) -> Result<f64> {
    independent_ratio(
        zero_t_thermal_sigma(n, gamma_t, gamma_bth)?.absorbed,
        n,
        gamma_t,
        gamma_bth,
    )
}

/// Large-N, Γ_T ≪ Γ₀ limit of the zero-temperature ratio with Γ_B^th = 2f̄JN:
/// (Γ₀/Γ_T)(2f̄J/(Γ₀ + 2f̄J))².
pub fn zero_t_ratio_limit(gamma_t: f64, fbar_j: f64) -> f64 {
    let g = 2.0 * fbar_j;
    GAMMA0 / gamma_t * (g / (GAMMA0 + g)).powi(2)
}

/// Cross sections integrated over the drive detuning, in units of σ·Γ₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningAverage {
    pub extinction: f64,
    pub absorption: f64,
}

/// ⟨σ_ext⟩ = (π/2)NΓ₀σ and ⟨σ_abs⟩ = (Γ_D+Γ_T)/(NΓ₀+Γ_D+Γ_T+Γ_DΓ₀/Γ_T) ⟨σ_ext⟩.
pub fn detuning_averaged(n: usize, gamma_t: f64, gamma_d: f64) -> Result<DetuningAverage> {
    check_rates(n, gamma_t, gamma_d)?;
    let ng = n as f64 * GAMMA0;
    let extinction = std::f64::consts::FRAC_PI_2 * ng;
    let loss = gamma_d + gamma_t;
    let share = if loss == 0.0 {
        0.0
    } else {
        loss * gamma_t / (gamma_t * (ng + loss) + gamma_d * GAMMA0)
    };
    Ok(DetuningAverage {
        extinction,
        absorption: share * extinction,
    })
}

/// Relative accuracy demanded of [`detuning_averaged_numeric`].
pub const DETUNING_QUADRATURE_TOL: f64 = 1e-6;

/// The same averages obtained by integrating the steady-state solution of a
/// locally dephased Dicke ring over the detuning from the bright mode.
pub fn detuning_averaged_numeric(n: usize, gamma_t: f64, gamma_d: f64) -> Result<DetuningAverage> {
    check_rates(n, gamma_t, gamma_d)?;
    let spectrum = spectrum_dicke(n, 0.01);
    let rates = RateMatrix::local_dephasing(n, gamma_d);
    let rabi = 1e-3;
    let drive = DriveProjection::uniform(n, rabi);
    let centre = spectrum.bright_shift();
    let width = n as f64 * GAMMA0 + gamma_d + gamma_t;
    let eval = |delta: f64| {
        coherent_thermal(
            &spectrum,
            &rates,
            &drive,
            gamma_t,
            Detuning::Fixed(centre + delta),
        )
        .map(|s| {
            (
                s.absorbed_fraction + s.scattered_fraction.unwrap_or(0.0),
                s.absorbed_fraction,
            )
        })
    };
    // Solver failures surface through the first evaluation.
    eval(0.0)?;
    let tol = 1e-3 * DETUNING_QUADRATURE_TOL;
    let pick = |which: usize| {
        integrate_lorentzian_like(
            |d| {
                let v = eval(d).unwrap_or((f64::NAN, f64::NAN));
                if which == 0 {
                    v.0
                } else {
                    v.1
                }
            },
            width,
            tol,
        )
    };
    let extinction = pick(0)?;
    let absorption = pick(1)?;
    if !extinction.is_finite() || !absorption.is_finite() {
        return Err(Error::QuadratureNotConverged { estimate: f64::NAN });
    }
    Ok(DetuningAverage {
        extinction,
        absorption,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_emitter_maximum() {
        let s = single_atom(1.0, 1.0, 0.0).unwrap();
        assert!((s.absorbed - 0.25).abs() <= 1e-12);
        assert_eq!(single_atom(1.0, 0.0, 2.0).unwrap().absorbed, 0.0);
        assert_eq!(single_atom(1.0, 0.0, 0.0).unwrap().scattered, 1.0);
        assert_relative_eq!(
            single_atom(1.0, 2.0, 3.0).unwrap().absorbed,
            1.0 / 9.0,
            max_relative = 1e-15
        );
        assert!(single_atom(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn local_examples() {
        assert_relative_eq!(
            local_dephasing_sigma(10, 1.0, 9.0).unwrap(),
            50.0 / 290.0,
            max_relative = 1e-15
        );
        for gd in [0.0, 0.5, 7.0] {
            assert_relative_eq!(
                local_dephasing_sigma(1, 0.3, gd).unwrap(),
                single_atom(1.0, 0.3, gd).unwrap().absorbed,
                max_relative = 1e-14
            );
        }
        assert_eq!(local_dephasing_sigma(5, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn local_limits() {
        let (n, gd) = (8, 50.0);
        let gt = 1e-6;
        let full = local_dephasing_sigma(n, gt, gd).unwrap();
        assert_relative_eq!(
            full,
            local_dephasing_weak_trap(n, gt, gd).unwrap(),
            max_relative = 1e-6
        );
        let one = single_atom(n as f64, gt, gd).unwrap().absorbed;
        assert_relative_eq!(full, n as f64 * one, max_relative = 1e-4);

        let (gt, gd) = (20.0, 1e-7);
        assert_relative_eq!(
            local_dephasing_sigma(n, gt, gd).unwrap(),
            local_dephasing_weak_dephasing(n, gt, gd).unwrap(),
            max_relative = 1e-7
        );
    }

    #[test]
    fn random_draws_respect_quarter_bound() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200_000 {
            let n = rng.random_range(1..=200);
            let gt = 10f64.powf(rng.random_range(-4.0..4.0));
            let gd = 10f64.powf(rng.random_range(-4.0..4.0));
            assert!(local_dephasing_sigma(n, gt, gd).unwrap() <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn optimum_examples() {
        let r = optimal_local_dephasing(10, 1.0).unwrap();
        assert_relative_eq!(
            r.param("gamma_d").unwrap(),
            45f64.sqrt() - 1.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            r.value,
            (0.9f64.sqrt() + 2f64.sqrt()).powi(-2),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            r.value,
            local_dephasing_sigma(10, 1.0, 45f64.sqrt() - 1.0).unwrap(),
            max_relative = 1e-13
        );
        assert!(!r.boundary);
        for gt in [1e-3, 1.0, 1e3] {
            let r = optimal_local_dephasing(1, gt).unwrap();
            assert_eq!(r.param("gamma_d"), Some(0.0));
            assert!(r.boundary);
        }
        assert_eq!(
            optimal_local_dephasing(2, 1.0).unwrap().param("gamma_d"),
            Some(0.0)
        );
    }

    #[test]
    fn zero_temperature_examples() {
        let z = zero_t_thermal_sigma(10, 0.1, 5.0).unwrap();
        assert_relative_eq!(z.absorbed, 10.0 / 15.1 * 5.1 / 15.1, max_relative = 1e-15);
        assert!((z.absorbed - 0.22368).abs() < 1e-5);
        assert_relative_eq!(z.excited * 0.1 / 4.0, z.absorbed, max_relative = 1e-14);
        let quarter = zero_t_thermal_sigma(10, 3.0, 7.0).unwrap().absorbed;
        assert_relative_eq!(quarter, 0.25, max_relative = 1e-15);
        assert_eq!(
            zero_t_thermal_sigma(4, 0.0, 1.0),
            Err(Error::DegenerateSink)
        );
    }

    #[test]
    fn zero_temperature_exchange_symmetry() {
        for (a, b) in [(0.1, 5.0), (1e-3, 40.0), (2.5, 2.5)] {
            let x = zero_t_thermal_sigma(10, a, b).unwrap().absorbed;
            let y = zero_t_thermal_sigma(10, b, a).unwrap().absorbed;
            assert_eq!(x, y);
        }
    }

    #[test]
    fn independent_ratios() {
        assert_relative_eq!(
            local_independent_ratio(10, 0.5, 1e9).unwrap(),
            1.0,
            max_relative = 1e-6
        );
        let (gt, fbar_j) = (1e-4, 3.0);
        let n = 1_000_000;
        let r = zero_t_independent_ratio(n, gt, 2.0 * fbar_j * n as f64).unwrap();
        assert_relative_eq!(r, zero_t_ratio_limit(gt, fbar_j), max_relative = 2e-4);
    }

    #[test]
    fn detuning_average_closed_forms() {
        let a = detuning_averaged(10, 2.0, 0.0).unwrap();
        assert_relative_eq!(
            a.absorption / a.extinction,
            2.0 / 12.0,
            max_relative = 1e-15
        );
        let b = detuning_averaged(10, 0.7, 13.0).unwrap();
        assert_eq!(a.extinction, b.extinction);
    }

    #[test]
    fn detuning_average_quadrature() {
        for (n, gt, gd) in [(10, 1.0, 9.0), (3, 0.02, 40.0)] {
            let exact = detuning_averaged(n, gt, gd).unwrap();
            let numeric = detuning_averaged_numeric(n, gt, gd).unwrap();
            assert_relative_eq!(numeric.extinction, exact.extinction, max_relative = 1e-6);
            assert_relative_eq!(numeric.absorption, exact.absorption, max_relative = 1e-6);
        }
    }
}
