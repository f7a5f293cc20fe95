//! Finite covariant measurements applied to effective states.
//!
//! Outcome `r` of the measurement built on a weighted set projects onto
//! `U(n_r)|B̃>`, `|B̃> = Σ_j sqrt(2j+1)|j, m>`, with weight `c_r / C`.
//! For a source direction `n` the outcome probabilities are
//! `p_r = (c_r/C) |Σ_j sqrt(2j+1) Ã_j Σ_{m'} conj(D^j_{m'm}(n_r)) D^j_{m'm}(n)|²`.
//! They sum to one only if the set is isotropic to at least the largest `j`
//! of the state; that closure is checked, never repaired.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;

use super::set::{unit_to_spherical, WeightedDirectionSet};
use crate::angular::{gauss_legendre, HalfAnglePowers, HalfInt, SmallD};
use crate::encoding::EffectiveState;
use crate::error::{Error, Result};

pub const CLOSURE_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-9;

/// One `(j, m')` component of a rotated multiplet ladder.
#[derive(Debug, Clone)]
struct LadderComponent {
    m_prime: f64,
    d: SmallD,
}

/// `D^j_{m'm}(φ, θ, 0)` over a list of `(j, m')` components.
#[derive(Debug, Clone)]
struct RotatedLadder {
    components: Vec<LadderComponent>,
    max_pow: usize,
}

impl RotatedLadder {
    fn new<I: IntoIterator<Item = HalfInt>>(js: I, m: HalfInt) -> Self {
        let mut components = Vec::new();
        let mut max_pow = 0;
        for j in js {
            max_pow = max_pow.max(j.twice() as usize);
            for mp in j.projections() {
                components.push(LadderComponent {
                    m_prime: mp.value(),
                    d: SmallD::new(j, mp, m).expect("m is a valid projection of j"),
                });
            }
        }
        RotatedLadder {
            components,
            max_pow,
        }
    }

    fn len(&self) -> usize {
        self.components.len()
    }

    fn eval_into(&self, theta: f64, phi: f64, out: &mut [Complex64]) {
        let powers = HalfAnglePowers::new(theta, self.max_pow);
        for (slot, c) in out.iter_mut().zip(&self.components) {
            *slot = Complex64::from_polar(c.d.eval_powers(&powers), -c.m_prime * phi);
        }
    }
}

fn check_unit(v: &Vector3<f64>, what: &str) -> Result<()> {
    if !v.iter().all(|x| x.is_finite()) || (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidArgument(format!(
            "{what} must be a unit vector, got norm {}",
            v.norm()
        )));
    }
    Ok(())
}

/// A finite measurement specialised to one state, ready for repeated
/// evaluation at many source directions.
#[derive(Debug, Clone)]
pub struct Measurement {
    ladder: RotatedLadder,
    /// Per outcome, `sqrt(2j+1) Ã_j conj(D^j_{m'm}(n_r))` over the ladder.
    outcome_rows: Vec<Vec<Complex64>>,
    /// Per ladder component, `Ã_j` folded into the source side.
    source_coeffs: Vec<f64>,
    probs: Vec<f64>,
    directions: Vec<Vector3<f64>>,
}

impl Measurement {
    pub fn new(state: &EffectiveState, set: &WeightedDirectionSet) -> Self {
        let support: Vec<(HalfInt, f64)> = state.components().filter(|(_, a)| *a != 0.0).collect();
        let ladder = RotatedLadder::new(support.iter().map(|(j, _)| *j), state.m());
        let mut seed = Vec::with_capacity(ladder.len());
        let mut source_coeffs = Vec::with_capacity(ladder.len());
        for (j, a) in &support {
            for _ in j.projections() {
                seed.push((2.0 * j.value() + 1.0).sqrt());
                source_coeffs.push(*a);
            }
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); ladder.len()];
        let outcome_rows = set
            .entries()
            .iter()
            .map(|e| {
                ladder.eval_into(e.theta, e.phi, &mut buf);
                buf.iter().zip(&seed).map(|(d, s)| d.conj() * *s).collect()
            })
            .collect();
        Measurement {
            ladder,
            outcome_rows,
            source_coeffs,
            probs: set.probabilities(),
            directions: set.unit_vectors(),
        }
    }

    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    /// Scratch space for [`Measurement::probabilities_into`].
    pub fn scratch(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.ladder.len()]
    }

    /// Fills `out` with `p_r` for the source at `(θ, φ)` and returns `Σ p_r`.
    /// No closure check.
    pub fn probabilities_into(
        &self,
        theta: f64,
        phi: f64,
        scratch: &mut [Complex64],
        out: &mut Vec<f64>,
    ) -> f64 {
        self.ladder.eval_into(theta, phi, scratch);
        for (s, a) in scratch.iter_mut().zip(&self.source_coeffs) {
            *s *= *a;
        }
        out.clear();
        let mut total = 0.0;
        for (row, w) in self.outcome_rows.iter().zip(&self.probs) {
            let amp: Complex64 = row.iter().zip(scratch.iter()).map(|(r, s)| r * s).sum();
            let p = w * amp.norm_sqr();
            total += p;
            out.push(p);
        }
        total
    }

    /// `p_r` for a unit source vector, rejected if `Σ p_r` deviates from 1
    /// by more than [`CLOSURE_TOL`].
    pub fn distribution(&self, source: &Vector3<f64>) -> Result<Vec<f64>> {
        check_unit(source, "source")?;
        let (theta, phi) = unit_to_spherical(source);
        let mut scratch = self.scratch();
        let mut out = Vec::with_capacity(self.outcomes());
        let total = self.probabilities_into(theta, phi, &mut scratch, &mut out);
        check_closure(total)?;
        Ok(out)
    }

    /// `Σ_r p_r (1 + n·n_r)/2` for a unit source vector.
    pub fn fidelity_at(&self, source: &Vector3<f64>) -> Result<f64> {
        let p = self.distribution(source)?;
        Ok(self.score(source, &p))
    }

    fn score(&self, source: &Vector3<f64>, p: &[f64]) -> f64 {
        p.iter()
            .zip(&self.directions)
            .map(|(p, n)| p * 0.5 * (1.0 + source.dot(n)))
            .sum()
    }
}

pub(crate) fn check_closure(total: f64) -> Result<()> {
    if !((total - 1.0).abs() <= CLOSURE_TOL) {
        return Err(Error::ClosureViolation { sum: total });
    }
    Ok(())
}

/// `(unit vector, weight)` pairs of a product rule on the sphere with
/// weights summing to one: Gauss–Legendre in `cos θ` times a uniform `φ` grid.
pub fn sphere_rule(polar_nodes: usize, azimuths: usize) -> Vec<(Vector3<f64>, f64)> {
    let q = gauss_legendre(polar_nodes);
    let mut rule = Vec::with_capacity(polar_nodes * azimuths);
    for (x, w) in q.iter() {
        let s = (1.0 - x * x).max(0.0).sqrt();
        for k in 0..azimuths {
            let phi = TAU * k as f64 / azimuths as f64;
            rule.push((
                Vector3::new(s * phi.cos(), s * phi.sin(), x),
                0.5 * w / azimuths as f64,
            ));
        }
    }
    rule
}

/// A product rule exact for the degree-`2j+1` integrands that arise from a
/// state whose largest spin is `j`.
fn rule_for_spin(j: HalfInt) -> Vec<(Vector3<f64>, f64)> {
    let two_j = j.twice() as usize;
    sphere_rule(two_j + 2, 2 * two_j + 3)
}

pub fn outcome_distribution(
    state: &EffectiveState,
    set: &WeightedDirectionSet,
    source: &Vector3<f64>,
) -> Result<Vec<f64>> {
    Measurement::new(state, set).distribution(source)
}

pub fn fixed_source_fidelity(
    state: &EffectiveState,
    set: &WeightedDirectionSet,
    source: &Vector3<f64>,
) -> Result<f64> {
    Measurement::new(state, set).fidelity_at(source)
}

/// Fixed-source fidelity averaged over an isotropic source with an exact
/// product rule. Closure is checked at every rule node.
pub fn averaged_finite_fidelity(state: &EffectiveState, set: &WeightedDirectionSet) -> Result<f64> {
    let meas = Measurement::new(state, set);
    let mut scratch = meas.scratch();
    let mut p = Vec::with_capacity(meas.outcomes());
    let mut total = 0.0;
    for (n, w) in rule_for_spin(state.max_spin()) {
        let (theta, phi) = unit_to_spherical(&n);
        let sum = meas.probabilities_into(theta, phi, &mut scratch, &mut p);
        check_closure(sum)?;
        total += w * meas.score(&n, &p);
    }
    Ok(total)
}

/// Finite-prior versus continuous-prior moment operator.
#[derive(Debug, Clone)]
pub struct SourceMomentComparison {
    pub finite: DMatrix<Complex64>,
    pub continuous: DMatrix<Complex64>,
    /// Frobenius norm of `finite - continuous`.
    pub deviation: f64,
}

/// Compares `Σ_r (c_r/C) (1 + n_r·g)/2 ρ(n_r)` with
/// `∫ dn/4π (1 + n·g)/2 ρ(n)`, where `ρ(n)` is the projector onto the
/// rotated effective state `U(n)|Ã>` in the multiplet basis `⊕_j |j, m'>`.
pub fn source_moment_operator(
    state: &EffectiveState,
    set: &WeightedDirectionSet,
    guess: &Vector3<f64>,
) -> Result<SourceMomentComparison> {
    check_unit(guess, "guess")?;
    let js: Vec<HalfInt> = state.m().ladder_to(state.total_spin()).collect();
    let ladder = RotatedLadder::new(js.iter().copied(), state.m());
    let amps: Vec<f64> = js
        .iter()
        .zip(state.coeffs())
        .flat_map(|(j, a)| std::iter::repeat_n(*a, j.twice() as usize + 1))
        .collect();
    let dim = ladder.len();
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];

    let mut accumulate = |target: &mut DMatrix<Complex64>, n: &Vector3<f64>, weight: f64| {
        let (theta, phi) = unit_to_spherical(n);
        ladder.eval_into(theta, phi, &mut psi);
        for (p, a) in psi.iter_mut().zip(&amps) {
            *p *= *a;
        }
        let w = weight * 0.5 * (1.0 + n.dot(guess));
        for r in 0..dim {
            for c in 0..dim {
                target[(r, c)] += psi[r] * psi[c].conj() * w;
            }
        }
    };

    let mut finite = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (n, p) in set.unit_vectors().iter().zip(set.probabilities()) {
        accumulate(&mut finite, n, p);
    }
    let mut continuous = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (n, w) in rule_for_spin(state.total_spin()) {
        accumulate(&mut continuous, &n, w);
    }
    let deviation = (&finite - &continuous).norm();
    Ok(SourceMomentComparison {
        finite,
        continuous,
        deviation,
    })
}
