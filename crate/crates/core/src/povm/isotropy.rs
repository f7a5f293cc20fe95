//! Isotropy tests for weighted direction sets.
//!
//! A set is isotropic up to spin `J` when its weighted multipoles
//! `z_L^M = sqrt(4π/(2L+1)) Σ_r c_r Y_L^{-M}(n_r)` vanish for
//! `L = 1..=2J`, `M = 0..=L`; equivalently, when the Wigner matrices are
//! orthogonal under the weighted sum for every `j, j' <= J`. All moments and
//! deviations are reported relative to the total weight `C`, so a tolerance
//! means the same thing for sets of any overall scale.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::set::WeightedDirectionSet;
use crate::angular::{spherical_harmonic, three_j, HalfInt, SmallD};
use crate::error::Result;

pub const DEFAULT_ISOTROPY_TOL: f64 = 1e-10;

/// Multipole moments `z_L^M / C` of a set and the isotropy verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleReport {
    pub j: HalfInt,
    pub moments: BTreeMap<(u32, u32), Complex64>,
    pub max_abs: f64,
    /// `(L, M)` of the largest moment.
    pub worst: (u32, u32),
    pub tolerance: f64,
    pub pass: bool,
}

/// Wire form `{"J2": int, "max_abs": real, "pass": bool, "worst": [L, M]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    #[serde(rename = "J2")]
    pub twice_j: i32,
    pub max_abs: f64,
    pub pass: bool,
    pub worst: [u32; 2],
}

impl MultipoleReport {
    pub fn record(&self) -> VerificationRecord {
        VerificationRecord {
            twice_j: self.j.twice(),
            max_abs: self.max_abs,
            pass: self.pass,
            worst: [self.worst.0, self.worst.1],
        }
    }
}

fn moments_with_tol(set: &WeightedDirectionSet, l_max: u32, tol: f64) -> MultipoleReport {
    let c_total = set.total_weight();
    let mut moments = BTreeMap::new();
    let mut max_abs = 0.0;
    let mut worst = (l_max.min(1), 0);
    for l in 1..=l_max {
        let scale = (4.0 * PI / (2.0 * l as f64 + 1.0)).sqrt() / c_total;
        for m in 0..=l {
            let sum: Complex64 = set
                .entries()
                .iter()
                .map(|e| {
                    e.weight
                        * spherical_harmonic(l as i32, -(m as i32), e.theta, e.phi)
                            .expect("|M| <= L by construction")
                })
                .sum();
            let z = sum * scale;
            if z.norm() > max_abs {
                max_abs = z.norm();
                worst = (l, m);
            }
            moments.insert((l, m), z);
        }
    }
    MultipoleReport {
        j: HalfInt::from_twice(l_max as i32),
        moments,
        max_abs,
        worst,
        tolerance: tol,
        pass: max_abs <= tol,
    }
}

/// `z_L^M / C` for `L = 1..=l_max`, judged at [`DEFAULT_ISOTROPY_TOL`].
pub fn multipole_moments(set: &WeightedDirectionSet, l_max: u32) -> MultipoleReport {
    moments_with_tol(set, l_max, DEFAULT_ISOTROPY_TOL)
}

/// Passes iff every moment with `1 <= L <= 2J` is within `tol` of zero.
pub fn verify_isotropy(set: &WeightedDirectionSet, j: HalfInt, tol: f64) -> MultipoleReport {
    moments_with_tol(set, j.twice().max(0) as u32, tol)
}

/// Worst deviation from Wigner-D orthogonality.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub j: HalfInt,
    pub max_deviation: f64,
    /// `(j, j', m, m', k)` at the worst deviation.
    pub worst: [HalfInt; 5],
    pub tolerance: f64,
    pub pass: bool,
}

/// `D^j_{mk}(φ_r, θ_r, 0)` for all `j <= J` and all entries.
struct DTable {
    /// Indexed by `2j`, then `(m, k)` flattened, then entry.
    blocks: Vec<Vec<Vec<Complex64>>>,
}

impl DTable {
    fn new(set: &WeightedDirectionSet, j_max: HalfInt) -> Self {
        let blocks = (0..=j_max.twice())
            .map(|tj| {
                let j = HalfInt::from_twice(tj);
                let mut block = Vec::with_capacity(((tj + 1) * (tj + 1)) as usize);
                for m in j.projections() {
                    for k in j.projections() {
                        let d = SmallD::new(j, m, k).expect("valid projections");
                        block.push(
                            set.entries()
                                .iter()
                                .map(|e| Complex64::from_polar(d.eval(e.theta), -m.value() * e.phi))
                                .collect(),
                        );
                    }
                }
                block
            })
            .collect();
        DTable { blocks }
    }

    fn get(&self, j: HalfInt, m: HalfInt, k: HalfInt) -> &[Complex64] {
        let dim = j.twice() + 1;
        let mi = (m.twice() + j.twice()) / 2;
        let ki = (k.twice() + j.twice()) / 2;
        &self.blocks[j.twice() as usize][(mi * dim + ki) as usize]
    }
}

/// Visits `Σ_r (c_r/C) D^j_{mk}(n_r) conj(D^{j'}_{m'k}(n_r))` for every
/// `j, j' <= J` with `j - j'` integer, every `m, m'` and every common `k`.
fn for_each_overlap<F>(set: &WeightedDirectionSet, j_max: HalfInt, mut visit: F)
where
    F: FnMut(HalfInt, HalfInt, HalfInt, HalfInt, HalfInt, Complex64),
{
    let table = DTable::new(set, j_max);
    let probs = set.probabilities();
    for tj in 0..=j_max.twice() {
        let j = HalfInt::from_twice(tj);
        for tjp in (tj % 2..=j_max.twice()).step_by(2) {
            let jp = HalfInt::from_twice(tjp);
            let k_bound = j.min(jp);
            for k in k_bound.projections() {
                for m in j.projections() {
                    let row = table.get(j, m, k);
                    for mp in jp.projections() {
                        let col = table.get(jp, mp, k);
                        let g: Complex64 = row
                            .iter()
                            .zip(col)
                            .zip(&probs)
                            .map(|((a, b), p)| a * b.conj() * *p)
                            .sum();
                        visit(j, jp, m, mp, k, g);
                    }
                }
            }
        }
    }
}

/// Checks `Σ_r c_r D^j_{mk}(n_r) conj(D^{j'}_{m'k}(n_r)) = C δ_{mm'} δ_{jj'}/(2j+1)`.
pub fn verify_wigner_orthogonality(
    set: &WeightedDirectionSet,
    j_max: HalfInt,
    tol: f64,
) -> OrthogonalityReport {
    let mut max_deviation = 0.0;
    let mut worst = [HalfInt::ZERO; 5];
    for_each_overlap(set, j_max, |j, jp, m, mp, k, g| {
        let expected = if j == jp && m == mp {
            1.0 / (j.twice() as f64 + 1.0)
        } else {
            0.0
        };
        let dev = (g - expected).norm();
        if dev > max_deviation {
            max_deviation = dev;
            worst = [j, jp, m, mp, k];
        }
    });
    OrthogonalityReport {
        j: j_max,
        max_deviation,
        worst,
        tolerance: tol,
        pass: max_deviation <= tol,
    }
}

/// Largest gap between the direct weighted D-matrix overlaps and their
/// expansion in 3-j symbols and multipoles,
///
/// `Σ_r c_r D^j_{mk} conj(D^{j'}_{m'k}) =
///   (-1)^{m-k} Σ_l (2l+1) (j j' l; m -m' m'-m)(j j' l; k -k 0) u_l^{m-m'}`,
///
/// with `u_l^M = Σ_r c_r D^l_{M0}(n_r)` (all divided by `C`). The identity
/// holds for any set; on isotropic sets only `l = 0` survives, which is the
/// mechanism behind the equivalence of the two isotropy criteria.
pub fn coupled_expansion_residual(set: &WeightedDirectionSet, j_max: HalfInt) -> Result<f64> {
    let probs = set.probabilities();
    let l_top = j_max.twice();
    // u_l^M for l = 0..=2J (integer l), M = -l..=l.
    let mut u: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
    for l in 0..=l_top {
        let lh = HalfInt::from_int(l);
        for mm in -l..=l {
            let d = SmallD::new(lh, HalfInt::from_int(mm), HalfInt::ZERO)?;
            let sum: Complex64 = set
                .entries()
                .iter()
                .zip(&probs)
                .map(|(e, p)| Complex64::from_polar(p * d.eval(e.theta), -(mm as f64) * e.phi))
                .sum();
            u.insert((l, mm), sum);
        }
    }
    let mut worst = 0.0f64;
    let mut failure = None;
    for_each_overlap(set, j_max, |j, jp, m, mp, k, direct| {
        if failure.is_some() {
            return;
        }
        let big_m = m - mp;
        let lo = (j - jp).abs();
        let hi = j + jp;
        let mut expansion = Complex64::new(0.0, 0.0);
        for lh in lo.ladder_to(hi) {
            if big_m.abs() > lh {
                continue;
            }
            let a = three_j(j, jp, lh, m, -mp, mp - m);
            let b = three_j(j, jp, lh, k, -k, HalfInt::ZERO);
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    let l = lh.as_integer().expect("j - j' integer gives integer l");
                    let ul = u[&(l, big_m.as_integer().unwrap())];
                    expansion += ul * ((2.0 * lh.value() + 1.0) * a * b);
                }
                (Err(e), _) | (_, Err(e)) => failure = Some(e),
            }
        }
        let sign = (m - k).parity_sign().expect("m - k integer");
        worst = worst.max((direct - expansion * sign).norm());
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}
