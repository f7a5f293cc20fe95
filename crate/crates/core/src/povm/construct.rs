use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use super::set::{WeightedDirection, WeightedDirectionSet};
use crate::angular::{legendre_p, HalfInt};
use crate::error::{Error, Result};

/// Ring latitudes and weights of the isotropic grid, before the azimuthal
/// expansion. `weights[0]` and `weights[last]` are the pole weights (1).
#[derive(Debug, Clone, PartialEq)]
pub struct RingWeights {
    pub order: i32,
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
}

const RESIDUAL_TOL: f64 = 1e-12;

/// Solves `Σ_k c_k P_L(cos θ_k) = 0`, `L = 1..=2Ĵ`, over the latitudes
/// `θ_k = kπ/(2Ĵ+1)`, `k = 0..=2Ĵ+1`, with `c_0 = c_{2Ĵ+1} = 1`.
pub fn ring_weights(order: i32) -> Result<RingWeights> {
    if order < 1 {
        return Err(Error::InvalidArgument(format!(
            "isotropic grid needs J >= 1/2, got rounded order {order}"
        )));
    }
    let two_j = 2 * order as usize;
    let rings = two_j + 2;
    let thetas: Vec<f64> = (0..rings)
        .map(|k| k as f64 * PI / (two_j as f64 + 1.0))
        .collect();
    let a = DMatrix::from_fn(two_j, two_j, |row, col| {
        legendre_p(row as u32 + 1, thetas[col + 1].cos())
    });
    // Poles contribute P_L(1) + P_L(-1).
    let b = DVector::from_fn(two_j, |row, _| {
        let l = row as u32 + 1;
        -(legendre_p(l, 1.0) + legendre_p(l, -1.0))
    });
    let singular = |detail: String| Error::SingularSystem { j: order, detail };
    let interior = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| singular("LU factorisation hit a zero pivot".into()))?;
    let residual = (&a * &interior - &b).amax();
    let scale = a.amax() * interior.amax().max(1.0);
    if !(residual <= RESIDUAL_TOL * scale) {
        return Err(singular(format!(
            "residual {residual:e} exceeds {RESIDUAL_TOL:e} (scale {scale:e})"
        )));
    }
    let mut weights = Vec::with_capacity(rings);
    weights.push(1.0);
    weights.extend(interior.iter().copied());
    weights.push(1.0);
    for (index, &value) in weights.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonPositiveWeight { j: order, index, value });
        }
    }
    Ok(RingWeights {
        order,
        thetas,
        weights,
    })
}

/// Weighted set isotropic up to spin `Ĵ = ⌈J⌉`.
///
/// Each interior latitude carries `2Ĵ+1` equally spaced azimuths
/// `φ_s = 2πs/(2Ĵ+1)`, all with the ring weight. The `2Ĵ+1` coincident
/// points at each pole are merged into one entry of weight `2Ĵ+1`.
pub fn construct_isotropic_set(j: HalfInt) -> Result<WeightedDirectionSet> {
    let order = j.ceil();
    let rings = ring_weights(order)?;
    let azimuths = 2 * order as usize + 1;
    let pole_weight = azimuths as f64;
    let last = rings.thetas.len() - 1;
    let mut entries = Vec::with_capacity(2 + (last - 1) * azimuths);
    entries.push(WeightedDirection::new(0.0, 0.0, pole_weight * rings.weights[0]));
    for k in 1..last {
        for s in 0..azimuths {
            let phi = TAU * s as f64 / azimuths as f64;
            entries.push(WeightedDirection::new(rings.thetas[k], phi, rings.weights[k]));
        }
    }
    entries.push(WeightedDirection::new(PI, 0.0, pole_weight * rings.weights[last]));
    WeightedDirectionSet::new(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Platonic {
    Tetrahedron,
    Octahedron,
}

impl std::str::FromStr for Platonic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetrahedron" => Ok(Platonic::Tetrahedron),
            "octahedron" => Ok(Platonic::Octahedron),
            _ => Err(Error::UnknownPlatonic(s.to_string())),
        }
    }
}

/// Unit-weight vertex sets.
///
/// Octahedron: the six `±x, ±y, ±z` axes. Tetrahedron: one vertex at the
/// north pole, the other three at `cos θ = -1/3`, `φ = 0, 2π/3, 4π/3`.
pub fn platonic_set(kind: Platonic) -> WeightedDirectionSet {
    let half = PI / 2.0;
    let entries = match kind {
        Platonic::Octahedron => vec![
            WeightedDirection::new(0.0, 0.0, 1.0),
            WeightedDirection::new(PI, 0.0, 1.0),
            WeightedDirection::new(half, 0.0, 1.0),
            WeightedDirection::new(half, half, 1.0),
            WeightedDirection::new(half, PI, 1.0),
            WeightedDirection::new(half, 3.0 * half, 1.0),
        ],
        Platonic::Tetrahedron => {
            let theta = (-1.0f64 / 3.0).acos();
            vec![
                WeightedDirection::new(0.0, 0.0, 1.0),
                WeightedDirection::new(theta, 0.0, 1.0),
                WeightedDirection::new(theta, TAU / 3.0, 1.0),
                WeightedDirection::new(theta, 2.0 * TAU / 3.0, 1.0),
            ]
        }
    };
    WeightedDirectionSet::new(entries).expect("platonic vertices are distinct")
}

/// `platonic_set` by name.
pub fn platonic_set_named(name: &str) -> Result<WeightedDirectionSet> {
    Ok(platonic_set(name.parse()?))
}
