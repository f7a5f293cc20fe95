use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LOG_FACTORIAL_TABLE: usize = 4096;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE);
        let mut acc = 0.0f64;
        table.push(0.0);
        for k in 1..LOG_FACTORIAL_TABLE {
            acc += (k as f64).ln();
            table.push(acc);
        }
        table
    })
}

/// `ln(n!)`. Tabulated by direct summation below 4096, Stirling series above.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) < LOG_FACTORIAL_TABLE {
        return log_factorial_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // ln Γ(x) with the first four Bernoulli corrections.
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln(n!)` for a signed argument; `None` for negative `n` (where `1/n!` vanishes).
pub(super) fn log_factorial_checked(n: i64) -> Option<f64> {
    (n >= 0).then(|| log_factorial(n as u64))
}

/// Legendre polynomial `P_L(x)` by the three-term (Bonnet) recurrence.
pub fn legendre_p(degree: u32, x: f64) -> f64 {
    match degree {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p_prev = 1.0;
            let mut p = x;
            for l in 1..degree {
                let lf = l as f64;
                let next = ((2.0 * lf + 1.0) * x * p - lf * p_prev) / (lf + 1.0);
                p_prev = p;
                p = next;
            }
            p
        }
    }
}

/// Normalized associated Legendre function
/// `sqrt((2L+1)/(4π) (L-M)!/(L+M)!) P_L^M(x)` for `0 <= M <= L`, including
/// the Condon–Shortley phase `(-1)^M`.
fn normalized_assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    // Seed \bar P_M^M, then climb in L at fixed M.
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * somx2;
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut pmmp1 = x * (2.0 * mf + 3.0).sqrt() * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        pll = a * (x * pmmp1 - b * pmm);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// Spherical harmonic `Y_L^M(θ, φ)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: i32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if l < 0 || m.abs() > l {
        return Err(Error::InvalidQuantumNumbers(format!(
            "spherical harmonic needs 0 <= |M| <= L, got L = {l}, M = {m}"
        )));
    }
    let mabs = m.unsigned_abs();
    let radial = normalized_assoc_legendre(l as u32, mabs, theta.cos());
    let positive = Complex64::from_polar(radial, mabs as f64 * phi);
    if m >= 0 {
        Ok(positive)
    } else {
        let sign = if mabs.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(positive.conj() * sign)
    }
}
