//! Encoding states in effective-coefficient form.
//!
//! An encoding state of `N` spins that is an eigenstate of `n·S` with
//! eigenvalue `m` is summarised by its effective coefficients
//! `Ã_j >= 0`, `j = |m|, |m|+1, ..., N/2`: the norm of its component in each
//! spin-`j` multiplet (all multiplicity copies of a multiplet collapse into
//! one coefficient). Only `m²` enters the fidelity, so negative `m` is mapped
//! to `|m|` everywhere.
//!
//! The fidelity
//! `F = 1/2 + 1/2 Σ μ_j Ã_j² + Σ Ã_{j-1} Ã_j ν_j` is a quadratic form in the
//! coefficients with
//! `μ_j = m²/(j(j+1))` (`μ_0 = 0`) and `ν_j = (j² - m²)/(j sqrt(4j² - 1))`.
//! The `ν_j` used here is the one that agrees with the direct integral of the
//! fidelity; see [`FidelityQuadraticForm`].

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::angular::{log_factorial, HalfInt};
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

/// Effective coefficients `Ã_j` of an encoding state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct EffectiveState {
    n_spins: u32,
    m: HalfInt,
    coeffs: Vec<f64>,
}

/// Wire form `{"N": int, "twice_m": int, "coeffs": [real]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct StateRecord {
    #[serde(rename = "N")]
    n: u32,
    twice_m: i32,
    coeffs: Vec<f64>,
}

impl TryFrom<StateRecord> for EffectiveState {
    type Error = Error;
    fn try_from(r: StateRecord) -> Result<Self> {
        EffectiveState::new(r.n, HalfInt::from_twice(r.twice_m), r.coeffs)
    }
}

impl From<EffectiveState> for StateRecord {
    fn from(s: EffectiveState) -> Self {
        StateRecord {
            n: s.n_spins,
            twice_m: s.m.twice(),
            coeffs: s.coeffs,
        }
    }
}

fn check_spin_projection(n_spins: u32, m: HalfInt) -> Result<HalfInt> {
    if n_spins == 0 {
        return Err(Error::InvalidState("need at least one spin".into()));
    }
    let total = HalfInt::from_twice(n_spins as i32);
    let m = m.abs();
    if m > total {
        return Err(Error::InvalidState(format!("|m| = {m} exceeds N/2 = {total}")));
    }
    if (n_spins as i32 - m.twice()) % 2 != 0 {
        return Err(Error::InvalidState(format!(
            "m = {m} has the wrong parity for N = {n_spins} (N/2 - m must be an integer)"
        )));
    }
    Ok(m)
}

impl EffectiveState {
    /// Validates and wraps raw coefficients for `j = |m|, ..., N/2`.
    ///
    /// Coefficients must be non-negative and of unit norm; they are never
    /// renormalised.
    pub fn new(n_spins: u32, m: HalfInt, coeffs: Vec<f64>) -> Result<Self> {
        let m = check_spin_projection(n_spins, m)?;
        let expected = ((n_spins as i32 - m.twice()) / 2 + 1) as usize;
        if coeffs.len() != expected {
            return Err(Error::InvalidState(format!(
                "expected {expected} coefficients for N = {n_spins}, m = {m}, got {}",
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(Error::InvalidState(format!(
                "coefficients must be finite and non-negative, found {c}"
            )));
        }
        let norm2: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "coefficients are not unit-norm: Σ Ã_j² = {norm2}"
            )));
        }
        Ok(EffectiveState { n_spins, m, coeffs })
    }

    pub fn n_spins(&self) -> u32 {
        self.n_spins
    }

    /// `J = N/2`.
    pub fn total_spin(&self) -> HalfInt {
        HalfInt::from_twice(self.n_spins as i32)
    }

    /// The (non-negative) eigenvalue `m`.
    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(j, Ã_j)` pairs, ascending in `j`.
    pub fn components(&self) -> impl Iterator<Item = (HalfInt, f64)> + '_ {
        self.m
            .ladder_to(self.total_spin())
            .zip(self.coeffs.iter().copied())
    }

    /// Largest `j` carrying a non-zero coefficient.
    pub fn max_spin(&self) -> HalfInt {
        self.components()
            .filter(|(_, a)| *a != 0.0)
            .map(|(j, _)| j)
            .last()
            .unwrap_or(self.m)
    }

    pub fn quadratic_form(&self) -> FidelityQuadraticForm {
        quadratic_form(self.total_spin(), self.m)
    }

    /// Short human-readable label, used in reports.
    pub fn descriptor(&self) -> String {
        format!("N={} m={}", self.n_spins, self.m)
    }
}

/// `Ã_j` of the product state with `N` spins and `S_z = m`.
///
/// `Ã_j = sqrt((2j+1)/(J+1+j)) sqrt((J-m)!(J+m)! / ((J-j)!(J+j)!))`,
/// evaluated in log space. The result is checked to be unit-norm, not forced.
pub fn product_state(n_spins: u32, m: HalfInt) -> Result<EffectiveState> {
    let m = check_spin_projection(n_spins, m)?;
    let total = HalfInt::from_twice(n_spins as i32);
    let twice_total = total.twice() as i64;
    let j_plus_m = (twice_total + m.twice() as i64) / 2;
    let j_minus_m = (twice_total - m.twice() as i64) / 2;
    let log_num = log_factorial(j_minus_m as u64) + log_factorial(j_plus_m as u64);
    let coeffs: Vec<f64> = m
        .ladder_to(total)
        .map(|j| {
            let jm = (twice_total - j.twice() as i64) / 2;
            let jp = (twice_total + j.twice() as i64) / 2;
            let ratio = (1.0 + 2.0 * j.value()) / (total.value() + 1.0 + j.value());
            let log_fact = log_num - log_factorial(jm as u64) - log_factorial(jp as u64);
            (0.5 * (ratio.ln() + log_fact)).exp()
        })
        .collect();
    EffectiveState::new(n_spins, m, coeffs)
}

/// Product state with minimal `|m|`: `0` for even `N`, `1/2` for odd `N`.
pub fn antiparallel_state(n_spins: u32) -> Result<EffectiveState> {
    product_state(n_spins, HalfInt::from_twice((n_spins % 2) as i32))
}

/// `N` parallel spins: `m = J = N/2` and a single coefficient `Ã_J = 1`.
pub fn parallel_state(n_spins: u32) -> Result<EffectiveState> {
    EffectiveState::new(n_spins, HalfInt::from_twice(n_spins as i32), vec![1.0])
}

/// Symmetric tridiagonal matrix whose quadratic form on unit vectors is the
/// maximal average fidelity.
///
/// Index `i` corresponds to `j = |m| + i`. Diagonal `1/2 + μ_j/2`,
/// off-diagonal `(i-1, i)` entry `ν_j/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityQuadraticForm {
    total_spin: HalfInt,
    m: HalfInt,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

/// `μ_j = m²/(j(j+1))`, with `μ_0 = 0`.
pub fn mu(j: HalfInt, m: HalfInt) -> f64 {
    if j.twice() == 0 {
        return 0.0;
    }
    let (j, m) = (j.value(), m.value());
    m * m / (j * (j + 1.0))
}

/// `ν_j = (j² - m²)/(j sqrt(4j² - 1))`, for `j > |m|`.
pub fn nu(j: HalfInt, m: HalfInt) -> f64 {
    let (j, m) = (j.value(), m.value());
    (j * j - m * m) / (j * (4.0 * j * j - 1.0).sqrt())
}

pub fn quadratic_form(total_spin: HalfInt, m: HalfInt) -> FidelityQuadraticForm {
    let m = m.abs();
    let js: Vec<HalfInt> = m.ladder_to(total_spin).collect();
    let diag = js.iter().map(|&j| 0.5 + 0.5 * mu(j, m)).collect();
    let offdiag = js.iter().skip(1).map(|&j| 0.5 * nu(j, m)).collect();
    FidelityQuadraticForm {
        total_spin,
        m,
        diag,
        offdiag,
    }
}

impl FidelityQuadraticForm {
    pub fn total_spin(&self) -> HalfInt {
        self.total_spin
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Entry `i` couples indices `i` and `i + 1`.
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `aᵀ M a`.
    pub fn evaluate(&self, a: &[f64]) -> f64 {
        assert_eq!(a.len(), self.dim(), "coefficient vector has the wrong length");
        let d: f64 = self.diag.iter().zip(a).map(|(d, x)| d * x * x).sum();
        let o: f64 = self
            .offdiag
            .iter()
            .enumerate()
            .map(|(i, e)| 2.0 * e * a[i] * a[i + 1])
            .sum();
        d + o
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                self.diag[r]
            } else if r + 1 == c {
                self.offdiag[r]
            } else if c + 1 == r {
                self.offdiag[c]
            } else {
                0.0
            }
        })
    }

    /// Largest eigenvalue and its unit eigenvector, sign-fixed to be
    /// non-negative.
    pub fn top_eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        const MAX_ITER: usize = 10_000;
        let eig = SymmetricEigen::try_new(self.to_matrix(), 1e-15, MAX_ITER).ok_or_else(|| {
            Error::EigenNotConverged(format!(
                "no convergence in {MAX_ITER} iterations for J = {}, m = {}",
                self.total_spin, self.m
            ))
        })?;
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        // Rayleigh quotient of the normalised vector; residual as a convergence check.
        let lambda = self.evaluate(&v);
        let residual = self.residual(&v, lambda);
        if residual > 1e-12 {
            return Err(Error::EigenNotConverged(format!(
                "eigen-residual {residual:e} above 1e-12"
            )));
        }
        Ok((lambda, v))
    }

    fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut mv = self.diag[i] * v[i];
                if i > 0 {
                    mv += self.offdiag[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    mv += self.offdiag[i] * v[i + 1];
                }
                (mv - lambda * v[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Best effective state for `N` spins at minimal `|m|`: the top eigenpair of
/// the fidelity form. Returns the state and its fidelity.
pub fn optimal_state(n_spins: u32) -> Result<(EffectiveState, f64)> {
    let m = HalfInt::from_twice((n_spins % 2) as i32);
    check_spin_projection(n_spins, m)?;
    let form = quadratic_form(HalfInt::from_twice(n_spins as i32), m);
    let (maf, mut v) = form.top_eigenpair()?;
    // The off-diagonals are positive, so the top eigenvector is strictly positive.
    if let Some(x) = v.iter().find(|x| **x <= 0.0) {
        return Err(Error::EigenNotConverged(format!(
            "top eigenvector has a non-positive entry {x:e}"
        )));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    Ok((EffectiveState::new(n_spins, m, v)?, maf))
}
