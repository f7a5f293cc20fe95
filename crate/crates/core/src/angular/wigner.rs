//! Wigner rotation matrices and 3-j symbols.
//!
//! Rotations use the active z-y-z convention
//! `D^j_{m'm}(α, β, γ) = <j m'| e^{-iαJz} e^{-iβJy} e^{-iγJz} |j m> = e^{-im'α} d^j_{m'm}(β) e^{-imγ}`,
//! and the small-d matrix is evaluated from the explicit factorial sum.

use num_complex::Complex64;

use super::halfint::HalfInt;
use super::special::{log_factorial, log_factorial_checked};
use crate::error::{Error, Result};

fn check_projection(j: HalfInt, m: HalfInt, what: &str) -> Result<()> {
    if j.twice() < 0 || m.abs() > j || !j.same_parity(m) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "{what}: need |m| <= j with j - m integer, got j = {j}, m = {m}"
        )));
    }
    Ok(())
}

/// Integer value of a half-integer expression that is known to be integral.
fn int(x: HalfInt) -> i64 {
    debug_assert!(x.is_integer());
    (x.twice() / 2) as i64
}

#[derive(Debug, Clone, Copy)]
struct DTerm {
    log_magnitude: f64,
    negative: bool,
    cos_pow: u32,
    sin_pow: u32,
}

/// One element `d^j_{m1 m2}(β)` as a polynomial in `cos(β/2)`, `sin(β/2)`.
///
/// Building it once and evaluating it at many angles avoids re-summing the
/// factorials; [`SmallD::eval`] works in log space, [`SmallD::eval_powers`]
/// uses precomputed half-angle powers for hot loops at modest `j`.
#[derive(Debug, Clone)]
pub struct SmallD {
    terms: Vec<DTerm>,
    coeffs: Vec<f64>,
}

impl SmallD {
    pub fn new(j: HalfInt, m1: HalfInt, m2: HalfInt) -> Result<Self> {
        check_projection(j, m1, "wigner d")?;
        check_projection(j, m2, "wigner d")?;
        let jpm1 = int(j + m1);
        let jmm1 = int(j - m1);
        let jpm2 = int(j + m2);
        let jmm2 = int(j - m2);
        let dm = int(m1 - m2);
        let log_prefactor = 0.5
            * (log_factorial(jpm1 as u64)
                + log_factorial(jmm1 as u64)
                + log_factorial(jpm2 as u64)
                + log_factorial(jmm2 as u64));
        let s_min = 0.max(-dm);
        let s_max = jpm2.min(jmm1);
        let two_j = j.twice() as i64;
        let mut terms = Vec::with_capacity((s_max - s_min + 1).max(0) as usize);
        for s in s_min..=s_max {
            let denom = log_factorial((jpm2 - s) as u64)
                + log_factorial(s as u64)
                + log_factorial((dm + s) as u64)
                + log_factorial((jmm1 - s) as u64);
            terms.push(DTerm {
                log_magnitude: log_prefactor - denom,
                negative: (dm + s).rem_euclid(2) == 1,
                cos_pow: (two_j - dm - 2 * s) as u32,
                sin_pow: (dm + 2 * s) as u32,
            });
        }
        let coeffs = terms
            .iter()
            .map(|t| {
                let c = t.log_magnitude.exp();
                if t.negative {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Ok(SmallD { terms, coeffs })
    }

    /// Log-space evaluation with explicit sign tracking.
    pub fn eval(&self, beta: f64) -> f64 {
        let c = (0.5 * beta).cos();
        let s = (0.5 * beta).sin();
        let (lc, ls) = (c.abs().ln(), s.abs().ln());
        let mut total = 0.0;
        for t in &self.terms {
            if (t.cos_pow > 0 && c == 0.0) || (t.sin_pow > 0 && s == 0.0) {
                continue;
            }
            let mut log = t.log_magnitude;
            if t.cos_pow > 0 {
                log += t.cos_pow as f64 * lc;
            }
            if t.sin_pow > 0 {
                log += t.sin_pow as f64 * ls;
            }
            let mut negative = t.negative;
            if c < 0.0 && t.cos_pow % 2 == 1 {
                negative = !negative;
            }
            if s < 0.0 && t.sin_pow % 2 == 1 {
                negative = !negative;
            }
            let v = log.exp();
            total += if negative { -v } else { v };
        }
        total
    }

    /// Evaluation from precomputed powers of `cos(β/2)` and `sin(β/2)`.
    pub fn eval_powers(&self, powers: &HalfAnglePowers) -> f64 {
        self.terms
            .iter()
            .zip(&self.coeffs)
            .map(|(t, c)| c * powers.cos[t.cos_pow as usize] * powers.sin[t.sin_pow as usize])
            .sum()
    }
}

/// `cos(β/2)^p` and `sin(β/2)^p` for `p = 0..=max_pow`.
#[derive(Debug, Clone)]
pub struct HalfAnglePowers {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl HalfAnglePowers {
    pub fn new(beta: f64, max_pow: usize) -> Self {
        let (s, c) = (0.5 * beta).sin_cos();
        let mut cos = Vec::with_capacity(max_pow + 1);
        let mut sin = Vec::with_capacity(max_pow + 1);
        let (mut pc, mut ps) = (1.0, 1.0);
        for _ in 0..=max_pow {
            cos.push(pc);
            sin.push(ps);
            pc *= c;
            ps *= s;
        }
        HalfAnglePowers { cos, sin }
    }
}

/// `d^j_{m k}(β)`.
pub fn wigner_small_d(j: HalfInt, m: HalfInt, k: HalfInt, beta: f64) -> Result<f64> {
    Ok(SmallD::new(j, m, k)?.eval(beta))
}

/// `D^j_{m k}(φ, θ, γ) = e^{-imφ} d^j_{mk}(θ) e^{-ikγ}`.
pub fn wigner_big_d(
    j: HalfInt,
    m: HalfInt,
    k: HalfInt,
    phi: f64,
    theta: f64,
    gamma: f64,
) -> Result<Complex64> {
    let d = wigner_small_d(j, m, k, theta)?;
    Ok(Complex64::from_polar(d, -(m.value() * phi + k.value() * gamma)))
}

/// Wigner 3-j symbol via the Racah formula, evaluated in log space.
///
/// Returns 0 when the triangle condition or `m1 + m2 + m3 = 0` fails.
pub fn three_j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> Result<f64> {
    check_projection(j1, m1, "3-j")?;
    check_projection(j2, m2, "3-j")?;
    check_projection(j3, m3, "3-j")?;
    if (m1 + m2 + m3).twice() != 0 {
        return Ok(0.0);
    }
    let jsum = j1 + j2 + j3;
    if !jsum.is_integer() {
        return Ok(0.0);
    }
    let a = int(j1 + j2 - j3);
    let b = int(j1 - j2 + j3);
    let c = int(-j1 + j2 + j3);
    if a < 0 || b < 0 || c < 0 {
        return Ok(0.0);
    }
    let log_triangle = log_factorial(a as u64) + log_factorial(b as u64) + log_factorial(c as u64)
        - log_factorial((int(jsum) + 1) as u64);
    let log_m = log_factorial(int(j1 + m1) as u64)
        + log_factorial(int(j1 - m1) as u64)
        + log_factorial(int(j2 + m2) as u64)
        + log_factorial(int(j2 - m2) as u64)
        + log_factorial(int(j3 + m3) as u64)
        + log_factorial(int(j3 - m3) as u64);
    let log_prefactor = 0.5 * (log_triangle + log_m);

    let t1 = int(j3 - j2 + m1);
    let t2 = int(j3 - j1 - m2);
    let t3 = a;
    let t4 = int(j1 - m1);
    let t5 = int(j2 + m2);
    let k_min = 0.max(-t1).max(-t2);
    let k_max = t3.min(t4).min(t5);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let denom = [k, t1 + k, t2 + k, t3 - k, t4 - k, t5 - k]
            .iter()
            .map(|&n| log_factorial_checked(n).expect("k range keeps factorials non-negative"))
            .sum::<f64>();
        let v = (log_prefactor - denom).exp();
        sum += if k % 2 == 0 { v } else { -v };
    }
    let phase = (j1 - j2 - m3).parity_sign()?;
    Ok(phase * sum)
}
