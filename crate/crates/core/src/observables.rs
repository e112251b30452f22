//! Fidelities, conditional pair-position maps and constituent purity.

use crate::basis::PairConfiguration;
use crate::lattice::LatticeGeometry;
use crate::state::StateVector;
use crate::Error;

/// Squared overlap `|<u|v>|^2`.
///
/// Both states must be normalized on the same basis; a zero-momentum sector
/// state and a full-basis state over the same geometry are reconciled by
/// lifting the sector one. The result is independent of either state's
/// global phase.
pub fn fidelity(u: &StateVector, v: &StateVector) -> Result<f64, Error> {
    if u.same_basis(v) {
        let dot: f64 = u.amps().iter().zip(v.amps()).map(|(a, b)| a * b).sum();
        return Ok(dot * dot);
    }
    // allow one full / one zero-momentum-sector representation
    let compatible = u.basis().geometry() == v.basis().geometry()
        && u.basis().n_pairs() == v.basis().n_pairs();
    if compatible {
        let lu = u.lift_to_full()?;
        let lv = v.lift_to_full()?;
        if lu.same_basis(&lv) {
            let dot: f64 = lu.amps().iter().zip(lv.amps()).map(|(a, b)| a * b).sum();
            return Ok(dot * dot);
        }
    }
    Err(Error::BasisMismatch(
        "fidelity requires states over the same basis (or its k=0 sector image)".into(),
    ))
}

/// Probability map for the second pair's position given one pair at the
/// anchor site. `p(anchor) = 0` and the map sums to 1.
#[derive(Clone, Debug)]
pub struct CorrelationMap {
    geom: LatticeGeometry,
    anchor: usize,
    probabilities: Vec<f64>,
}

impl CorrelationMap {
    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, site: usize) -> f64 {
        self.probabilities[site]
    }
}

/// Conditional pair-position map of a two-pair state.
///
/// `p(s)` is proportional to the squared amplitude of `{anchor, s}`,
/// normalized over `s != anchor`.
pub fn conditional_map(state: &StateVector, anchor: usize) -> Result<CorrelationMap, Error> {
    if state.basis().n_pairs() != 2 {
        return Err(Error::Unsupported(
            "conditional maps are defined for two-pair states".into(),
        ));
    }
    let geom = *state.basis().geometry();
    let m = geom.sites();
    if anchor >= m {
        return Err(Error::InvalidGeometry(format!(
            "anchor site {anchor} out of range for {m} sites"
        )));
    }
    let mut probs = vec![0.0; m];
    for s in 0..m {
        if s == anchor {
            continue;
        }
        let config =
            PairConfiguration::new(vec![anchor.min(s), anchor.max(s)], m)?;
        let a = state.amplitude_of(&config)?;
        probs[s] = a * a;
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::Unsupported(
            "state has no weight on configurations containing the anchor".into(),
        ));
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok(CorrelationMap {
        geom,
        anchor,
        probabilities: probs,
    })
}

/// Purity of the constituent reduced density matrix of a single-pair state
/// `sum_j psi_j |j, j>`: `sum_j |psi_j|^4`.
pub fn purity_of_pair_constituent(state: &StateVector) -> Result<f64, Error> {
    if state.basis().n_pairs() != 1 {
        return Err(Error::Unsupported(
            "constituent purity is defined for single-pair states".into(),
        ));
    }
    let full = state.lift_to_full()?;
    Ok(full.amps().iter().map(|a| a.powi(4)).sum())
}
