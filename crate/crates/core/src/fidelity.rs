//! Maximal average fidelity, information gain and large-`N` behaviour.
//!
//! Against an isotropic source and the covariant measurement seeded by
//! `|B̃> = Σ_j sqrt(2j+1) |j, m>`, the outcome density along the polar axis
//! is `p(x) = A(x)²` with
//! `A(x) = Σ_j sqrt(2j+1) Ã_j d^j_{mm}(arccos x)`, normalised so that
//! `∫ dx/2 p(x) = 1`. The fidelity is `∫ dx/2 (1+x)/2 p(x)` and the
//! information gain is `∫ dx/2 p(x) log₂ p(x)`, taken literally (no sign flip,
//! no prior-entropy subtraction).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::angular::{gauss_legendre, log_factorial, HalfInt, SmallD};
use crate::encoding::{antiparallel_state, optimal_state, parallel_state, EffectiveState};
use crate::error::{Error, Result};

/// Default Gauss–Legendre size for the information-gain integral.
pub const DEFAULT_INFO_NODES: usize = 512;
pub const MIN_INFO_NODES: usize = 200;
pub const INFO_CONVERGENCE_TOL: f64 = 1e-7;
const P_LOG_P_FLOOR: f64 = 1e-300;

/// Closed-form fidelity from the tridiagonal quadratic form.
pub fn maf_closed_form(state: &EffectiveState) -> f64 {
    state.quadratic_form().evaluate(state.coeffs())
}

/// `A(x)` for a state, with the `d^j_{mm}` polynomials built once.
pub struct Amplitude {
    terms: Vec<(f64, SmallD)>,
}

impl Amplitude {
    pub fn new(state: &EffectiveState) -> Self {
        let m = state.m();
        let terms = state
            .components()
            .filter(|(_, a)| *a != 0.0)
            .map(|(j, a)| {
                let weight = (2.0 * j.value() + 1.0).sqrt() * a;
                (weight, SmallD::new(j, m, m).expect("state quantum numbers are valid"))
            })
            .collect();
        Amplitude { terms }
    }

    pub fn at(&self, x: f64) -> f64 {
        let beta = x.clamp(-1.0, 1.0).acos();
        self.terms.iter().map(|(w, d)| w * d.eval(beta)).sum()
    }

    /// Outcome density `p(x) = A(x)²`.
    pub fn density(&self, x: f64) -> f64 {
        let a = self.at(x);
        a * a
    }
}

/// Fidelity by direct Gauss–Legendre integration of the outcome density.
///
/// The integrand is a polynomial of degree at most `2J + 1`; at least
/// `J + 2` nodes are required so the rule is exact.
pub fn maf_quadrature(state: &EffectiveState, nodes: usize) -> Result<f64> {
    let required = state.total_spin().ceil() as usize + 2;
    if nodes < required {
        return Err(Error::InsufficientNodes {
            required,
            given: nodes,
        });
    }
    let amp = Amplitude::new(state);
    let q = gauss_legendre(nodes);
    Ok(q.integrate(|x| 0.25 * (1.0 + x) * amp.density(x)))
}

/// Antiparallel fidelity for `N = 2n`, `m = 0`:
/// `1/2 + Σ_{j=1}^{n} n!²/((n-j)!(n+j)!) · j/sqrt((n+1)² - j²)`.
pub fn antiparallel_even_maf(half_n: u64) -> Result<f64> {
    if half_n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 (N = 2n spins)".into()));
    }
    let n = half_n;
    let log_n2 = 2.0 * log_factorial(n);
    let np1 = (n + 1) as f64;
    let sum: f64 = (1..=n)
        .map(|j| {
            let ratio = (log_n2 - log_factorial(n - j) - log_factorial(n + j)).exp();
            let jf = j as f64;
            ratio * jf / ((np1 - jf) * (np1 + jf)).sqrt()
        })
        .sum();
    Ok(0.5 + sum)
}

fn info_gain_at(amp: &Amplitude, nodes: usize) -> f64 {
    let q = gauss_legendre(nodes);
    let inv_ln2 = std::f64::consts::LOG2_E;
    q.integrate(|x| {
        let p = amp.density(x);
        if p <= P_LOG_P_FLOOR {
            0.0
        } else {
            0.5 * p * p.ln() * inv_ln2
        }
    })
}

/// Average information gain in bits, with a node-doubling convergence check.
pub fn info_gain(state: &EffectiveState, nodes: usize) -> Result<f64> {
    if nodes < MIN_INFO_NODES {
        return Err(Error::InsufficientNodes {
            required: MIN_INFO_NODES,
            given: nodes,
        });
    }
    let amp = Amplitude::new(state);
    let coarse = info_gain_at(&amp, nodes);
    let fine = info_gain_at(&amp, 2 * nodes);
    if (coarse - fine).abs() > INFO_CONVERGENCE_TOL {
        return Err(Error::NotConverged {
            coarse,
            fine,
            coarse_nodes: nodes,
            fine_nodes: 2 * nodes,
        });
    }
    Ok(fine)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoticOrder {
    /// `1 - 1/(2N)`.
    Leading,
    /// `(2N+1)/(2N+2)`, accurate to `O(1/N³)`.
    Next,
}

/// Large-`N` approximation of the antiparallel fidelity (even `N` only).
pub fn asymptotic_maf(n_spins: u64, order: AsymptoticOrder) -> Result<f64> {
    if n_spins < 2 || n_spins % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic formulas hold for even N >= 2, got N = {n_spins}"
        )));
    }
    let n = n_spins as f64;
    Ok(match order {
        AsymptoticOrder::Leading => 1.0 - 1.0 / (2.0 * n),
        AsymptoticOrder::Next => (2.0 * n + 1.0) / (2.0 * n + 2.0),
    })
}

/// Fidelities and information gains of the parallel, antiparallel and
/// optimal encodings for one `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    #[serde(rename = "N")]
    pub n_spins: u32,
    #[serde(rename = "F_P")]
    pub f_parallel: f64,
    #[serde(rename = "F_A")]
    pub f_antiparallel: f64,
    #[serde(rename = "F_O")]
    pub f_optimal: f64,
    #[serde(rename = "I_P")]
    pub i_parallel: f64,
    #[serde(rename = "I_A")]
    pub i_antiparallel: f64,
    #[serde(rename = "I_O")]
    pub i_optimal: f64,
}

impl FidelityReport {
    pub const CSV_HEADER: &'static str = "N,F_P,F_A,F_O,I_P,I_A,I_O";

    pub fn values(&self) -> [f64; 6] {
        [
            self.f_parallel,
            self.f_antiparallel,
            self.f_optimal,
            self.i_parallel,
            self.i_antiparallel,
            self.i_optimal,
        ]
    }
}

pub fn table_row(n_spins: u32) -> Result<FidelityReport> {
    table_row_with_nodes(n_spins, DEFAULT_INFO_NODES)
}

pub fn table_row_with_nodes(n_spins: u32, info_nodes: usize) -> Result<FidelityReport> {
    let parallel = parallel_state(n_spins)?;
    let antiparallel = antiparallel_state(n_spins)?;
    let (optimal, f_optimal) = optimal_state(n_spins)?;
    Ok(FidelityReport {
        n_spins,
        f_parallel: maf_closed_form(&parallel),
        f_antiparallel: maf_closed_form(&antiparallel),
        f_optimal,
        i_parallel: info_gain(&parallel, info_nodes)?,
        i_antiparallel: info_gain(&antiparallel, info_nodes)?,
        i_optimal: info_gain(&optimal, info_nodes)?,
    })
}

/// One CSV line per report under [`FidelityReport::CSV_HEADER`]. With
/// `decimals` set, values are rounded to that many places; otherwise they are
/// written in shortest round-trip form.
pub fn reports_to_csv(reports: &[FidelityReport], decimals: Option<usize>) -> String {
    let mut out = String::from(FidelityReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        write!(out, "{}", r.n_spins).unwrap();
        for v in r.values() {
            match decimals {
                Some(d) => write!(out, ",{v:.d$}").unwrap(),
                None => write!(out, ",{v}").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

/// `F` of a single-multiplet state `j = m = J`: `(2J+1)/(2J+2)`.
pub fn single_multiplet_maf(total_spin: HalfInt) -> f64 {
    let two_j = total_spin.twice() as f64;
    (two_j + 1.0) / (two_j + 2.0)
}
