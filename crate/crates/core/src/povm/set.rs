use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use nalgebra::{Rotation3, Vector3};

use crate::error::{Error, Result};

const COINCIDENCE_TOL: f64 = 1e-12;

/// A weighted direction `(θ, φ, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedDirection {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl WeightedDirection {
    pub fn new(theta: f64, phi: f64, weight: f64) -> Self {
        WeightedDirection { theta, phi, weight }
    }

    pub fn unit_vector(&self) -> Vector3<f64> {
        spherical_to_unit(self.theta, self.phi)
    }
}

pub fn spherical_to_unit(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// `(θ, φ)` of a non-zero vector, `φ ∈ [0, 2π)`; `φ = 0` on the poles.
pub fn unit_to_spherical(v: &Vector3<f64>) -> (f64, f64) {
    let n = v.norm();
    let theta = (v.z / n).clamp(-1.0, 1.0).acos();
    if v.x.hypot(v.y) <= 1e-15 * n {
        return (theta, 0.0);
    }
    (theta, wrap_phi(v.y.atan2(v.x)))
}

fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Unit vectors with positive weights: a candidate finite measurement, or a
/// finite source prior with probabilities `c_r / C`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDirectionSet {
    entries: Vec<WeightedDirection>,
    total_weight: f64,
}

impl WeightedDirectionSet {
    /// Validates the entries: `θ ∈ [0, π]`, weights finite and positive, and
    /// no two directions coincide. `φ` is wrapped into `[0, 2π)`.
    pub fn new(entries: Vec<WeightedDirection>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDirectionSet("empty set".into()));
        }
        let mut clean = Vec::with_capacity(entries.len());
        for (i, e) in entries.into_iter().enumerate() {
            if !(e.theta.is_finite() && (0.0..=PI).contains(&e.theta)) {
                return Err(Error::InvalidDirectionSet(format!(
                    "entry {i}: theta = {} outside [0, π]",
                    e.theta
                )));
            }
            if !e.phi.is_finite() {
                return Err(Error::InvalidDirectionSet(format!("entry {i}: phi = {}", e.phi)));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::InvalidDirectionSet(format!(
                    "entry {i}: weight = {} is not positive",
                    e.weight
                )));
            }
            clean.push(WeightedDirection::new(e.theta, wrap_phi(e.phi), e.weight));
        }
        let vectors: Vec<Vector3<f64>> = clean.iter().map(WeightedDirection::unit_vector).collect();
        for a in 0..vectors.len() {
            for b in (a + 1)..vectors.len() {
                if (vectors[a] - vectors[b]).norm() <= COINCIDENCE_TOL {
                    return Err(Error::InvalidDirectionSet(format!(
                        "entries {a} and {b} point in the same direction"
                    )));
                }
            }
        }
        let total_weight = clean.iter().map(|e| e.weight).sum();
        Ok(WeightedDirectionSet {
            entries: clean,
            total_weight,
        })
    }

    pub fn entries(&self) -> &[WeightedDirection] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `C = Σ c_r`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn unit_vectors(&self) -> Vec<Vector3<f64>> {
        self.entries.iter().map(WeightedDirection::unit_vector).collect()
    }

    /// `c_r / C`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.weight / self.total_weight).collect()
    }

    /// Rigidly rotated copy.
    pub fn rotated(&self, rotation: &Rotation3<f64>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let (theta, phi) = unit_to_spherical(&(rotation * e.unit_vector()));
                WeightedDirection::new(theta, phi, e.weight)
            })
            .collect();
        WeightedDirectionSet::new(entries)
    }

    /// Copy with entry `index` reweighted by `factor`.
    pub fn with_scaled_weight(&self, index: usize, factor: f64) -> Result<Self> {
        let mut entries = self.entries.clone();
        let e = entries.get_mut(index).ok_or_else(|| {
            Error::InvalidArgument(format!("no entry {index} in a set of {}", self.len()))
        })?;
        e.weight *= factor;
        WeightedDirectionSet::new(entries)
    }

    /// CSV `theta,phi,weight` with a header line; 17 significant digits so
    /// that reading the file back reproduces every value exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["theta", "phi", "weight"])?;
        for e in &self.entries {
            w.write_record([
                format!("{:.16e}", e.theta),
                format!("{:.16e}", e.phi),
                format!("{:.16e}", e.weight),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses `theta,phi,weight` lines (radians). The header is optional;
    /// blank lines and `#` comments are skipped.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut entries = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            if line == 0 && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("theta")) {
                continue;
            }
            if record.len() != 3 {
                return Err(Error::Parse(format!(
                    "record {}: expected 3 fields theta,phi,weight, got {}",
                    line + 1,
                    record.len()
                )));
            }
            let field = |i: usize| -> Result<f64> {
                record[i].parse::<f64>().map_err(|_| {
                    Error::Parse(format!("record {}: bad number {:?}", line + 1, &record[i]))
                })
            };
            entries.push(WeightedDirection::new(field(0)?, field(1)?, field(2)?));
        }
        WeightedDirectionSet::new(entries)
    }
}
