//! Exponentially scaled modified Bessel functions of the first kind and the
//! bright-mode thermal-width series built on them.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Above this argument the asymptotic expansion replaces the power series.
const ASYMPTOTIC_SWITCH: f64 = 50.0;
const ASYMPTOTIC_TERMS: usize = 12;

/// Coefficients a_k(ν) of e^{-z} I_ν(z) ~ (2πz)^{-1/2} Σ (−1)^k a_k(ν) z^{-k}.
fn asymptotic_coefficients(nu: u32) -> [f64; ASYMPTOTIC_TERMS] {
    let mu = 4.0 * (nu * nu) as f64;
    let mut a = [0.0; ASYMPTOTIC_TERMS];
    a[0] = 1.0;
    for k in 1..ASYMPTOTIC_TERMS {
        let odd = (2 * k - 1) as f64;
        a[k] = a[k - 1] * (mu - odd * odd) / (8.0 * k as f64);
    }
    a
}

fn scaled_series(nu: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = half * half;
    let mut term = if nu == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum * (-z).exp()
}

fn scaled_asymptotic(nu: u32, z: f64) -> f64 {
    let a = asymptotic_coefficients(nu);
    let mut sum = 0.0;
    let mut zk = 1.0;
    for (k, ak) in a.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ak / zk;
        zk *= z;
    }
    sum / (2.0 * PI * z).sqrt()
}

fn scaled_bessel(nu: u32, z: f64) -> f64 {
    assert!(z >= 0.0, "argument must be non-negative");
    if z <= ASYMPTOTIC_SWITCH {
        scaled_series(nu, z)
    } else {
        scaled_asymptotic(nu, z)
    }
}

/// e^{-z} I₀(z) for z ≥ 0.
pub fn scaled_i0(z: f64) -> f64 {
    scaled_bessel(0, z)
}

/// e^{-z} I₁(z) for z ≥ 0.
pub fn scaled_i1(z: f64) -> f64 {
    scaled_bessel(1, z)
}

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (a + n)^{-s} by Euler–Maclaurin, for a ≳ 50.
fn hurwitz_zeta_large(s: f64, a: f64) -> f64 {
    // B_2, B_4, B_6, B_8 divided by (2j)!
    const B_OVER_FACT: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut sum = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let mut rising = s; // s (s+1) … (s+2j−2)
    let mut power = a.powf(-s - 1.0);
    for (j, b) in B_OVER_FACT.iter().enumerate() {
        sum += b * rising * power;
        let base = s + (2 * j + 1) as f64;
        rising *= base * (base + 1.0);
        power /= a * a;
    }
    sum
}

/// Result of summing the bright-mode width series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Terms summed explicitly before the analytic tail took over.
    pub terms: usize,
}

/// Minimum explicit terms so the Euler–Maclaurin tail starts at a ≥ 100.
const MIN_EXPLICIT_TERMS: usize = 100;

/// Σ_{n≥0} e^{−nx}[I₀(nx) − I₁(nx)] for x = βJ > 0.
///
/// Terms are summed explicitly until nx reaches the asymptotic regime; the
/// remainder, which decays as (nx)^{-3/2}, is added in closed form from the
/// large-argument expansion of each term and Hurwitz zeta tails.
pub fn bright_width_sum(beta_j: f64, max_terms: usize) -> Result<SeriesSum> {
    if beta_j.is_nan() || beta_j <= 0.0 {
        return Err(Error::Domain(format!("βJ = {beta_j} must be positive")));
    }
    if beta_j.is_infinite() {
        return Ok(SeriesSum {
            value: 1.0,
            terms: 1,
        });
    }
    let needed = (ASYMPTOTIC_SWITCH / beta_j).ceil();
    if needed > max_terms as f64 {
        return Err(Error::SlowConvergence { cap: max_terms });
    }
    let explicit = (needed as usize).max(MIN_EXPLICIT_TERMS);
    // n = 0 contributes I₀(0) − I₁(0) = 1.
    let mut value = 1.0;
    for n in 1..=explicit {
        let z = n as f64 * beta_j;
        value += scaled_i0(z) - scaled_i1(z);
    }

    let a0 = asymptotic_coefficients(0);
    let a1 = asymptotic_coefficients(1);
    let start = (explicit + 1) as f64;
    let mut tail = 0.0;
    for k in 1..ASYMPTOTIC_TERMS {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * (a0[k] - a1[k]);
        let s = k as f64 + 0.5;
        tail += c * beta_j.powf(-s) * hurwitz_zeta_large(s, start);
    }
    value += tail / (2.0 * PI).sqrt();
    Ok(SeriesSum {
        value,
        terms: explicit + 1,
    })
}
