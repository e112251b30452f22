//! Closed-form oracles: single-pair spectrum, exact two-pair 1D ground
//! state, exact energies, and the analytic fidelity curve with its
//! `8 / pi^2` dilute limit.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::basis::{binomial, FullBasis};
use crate::hamiltonian::ModelParameters;
use crate::lattice::{Direction, LatticeGeometry};
use crate::state::{Basis, StateVector};
use crate::Error;

/// Single-pair energies on a ring: `E_k = -U0 - 2 (J^2/U0) cos^2(k pi / L)`
/// for `k = 0 .. L-1`.
pub fn single_pair_spectrum(l: usize, params: &ModelParameters) -> Vec<(usize, f64)> {
    let v = params.effective(Direction::X);
    (0..l)
        .map(|k| {
            let c = (k as f64 * PI / l as f64).cos();
            (k, -params.u0 - 2.0 * v * c * c)
        })
        .collect()
}

/// The exact two-pair ground state of the effective model on a ring:
/// amplitudes `A sin[pi (d - 1/2) / (L - 1)]` in the pair distance `d`.
#[derive(Clone, Debug)]
pub struct TwoPairExactState {
    l: usize,
    normalization: f64,
}

impl TwoPairExactState {
    pub fn new(l: usize) -> Result<Self, Error> {
        if l < 3 {
            return Err(Error::InvalidGeometry(format!(
                "the two-pair solution needs L >= 3, got {l}"
            )));
        }
        let mut norm2 = 0.0;
        for (d, count) in distance_multiplicities(l) {
            norm2 += count as f64 * sine_profile(l, d).powi(2);
        }
        Ok(Self {
            l,
            normalization: 1.0 / norm2.sqrt(),
        })
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Amplitude of the configuration `{j1, j2}`.
    pub fn amplitude(&self, j1: usize, j2: usize) -> f64 {
        let diff = j1.abs_diff(j2);
        let d = diff.min(self.l - diff);
        self.normalization * sine_profile(self.l, d)
    }

    /// The state as a vector over the full `C(L, 2)` basis.
    pub fn state_vector(&self) -> Result<StateVector, Error> {
        let geom = LatticeGeometry::ring(self.l)?;
        let fb = FullBasis::new(geom, 2)?;
        let amps: Vec<f64> = fb
            .iter()
            .map(|c| self.amplitude(c.occupied()[0], c.occupied()[1]))
            .collect();
        StateVector::new(Arc::new(Basis::Full(fb)), amps)
    }
}

/// `sin[pi (d - 1/2) / (L - 1)]`; invariant under `d <-> L - d`.
fn sine_profile(l: usize, d: usize) -> f64 {
    (PI * (d as f64 - 0.5) / (l as f64 - 1.0)).sin()
}

/// Ring distances `d` with the number of two-pair configurations at each.
fn distance_multiplicities(l: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=l / 2).map(move |d| (d, if 2 * d == l { l / 2 } else { l }))
}

/// Exact two-pair ground energy:
/// `-2 U0 - 4 (J^2/U0) cos^2(pi / (2 (L - 1)))`.
pub fn two_pair_exact_energy(l: usize, params: &ModelParameters) -> f64 {
    let v = params.effective(Direction::X);
    let c = (PI / (2.0 * (l as f64 - 1.0))).cos();
    -2.0 * params.u0 - 4.0 * v * c * c
}

/// Closed-form fidelity between the two-pair exact ground state and the
/// coboson ansatz on a ring of `l` sites. Tends to `8 / pi^2` as `l` grows.
pub fn analytic_fidelity_1d(l: usize) -> Result<f64, Error> {
    if l < 3 {
        return Err(Error::InvalidGeometry(format!(
            "the analytic fidelity needs L >= 3, got {l}"
        )));
    }
    let mut norm2 = 0.0;
    let mut sum = 0.0;
    for (d, count) in distance_multiplicities(l) {
        let a = sine_profile(l, d);
        norm2 += count as f64 * a * a;
        sum += count as f64 * a;
    }
    let c = binomial(l, 2) as f64;
    let overlap = sum / (norm2 * c).sqrt();
    Ok(overlap * overlap)
}

/// The dilute-limit fidelity `8 / pi^2`.
pub const FIDELITY_LIMIT: f64 = 8.0 / (PI * PI);
