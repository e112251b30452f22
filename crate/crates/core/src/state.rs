//! State vectors with an attached basis identity.

use std::sync::Arc;

use crate::basis::{FullBasis, Momentum, PairConfiguration, SectorBasis};
use crate::lattice::LatticeGeometry;
use crate::Error;

/// Tensor basis of `N` type-a and `N` type-b fermions on the lattice.
///
/// A basis state is an (a-configuration, b-configuration) pair; the index is
/// `rank_a * C(M, N) + rank_b`. Within each species, creation operators are
/// applied in increasing site order to define the state's sign.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSpeciesBasis {
    species: FullBasis,
}

impl TwoSpeciesBasis {
    pub fn new(geom: LatticeGeometry, n_pairs: usize) -> Result<Self, Error> {
        Ok(Self {
            species: FullBasis::new(geom, n_pairs)?,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        self.species.geometry()
    }

    pub fn n_pairs(&self) -> usize {
        self.species.n_pairs()
    }

    pub fn species_basis(&self) -> &FullBasis {
        &self.species
    }

    pub fn dimension(&self) -> usize {
        self.species.dimension() * self.species.dimension()
    }

    pub fn index(&self, a: &PairConfiguration, b: &PairConfiguration) -> usize {
        self.species.rank(a) * self.species.dimension() + self.species.rank(b)
    }

    pub fn unindex(&self, i: usize) -> (PairConfiguration, PairConfiguration) {
        let d = self.species.dimension();
        (self.species.unrank(i / d), self.species.unrank(i % d))
    }
}

/// The basis a state vector or Hamiltonian lives on.
#[derive(Clone, Debug)]
pub enum Basis {
    Full(FullBasis),
    Sector(SectorBasis),
    TwoSpecies(TwoSpeciesBasis),
}

/// Identity of a basis, used for mismatch checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisId {
    kind: u8,
    geom: LatticeGeometry,
    n_pairs: usize,
    momentum: Option<Momentum>,
}

impl Basis {
    pub fn dimension(&self) -> usize {
        match self {
            Basis::Full(b) => b.dimension(),
            Basis::Sector(b) => b.dimension(),
            Basis::TwoSpecies(b) => b.dimension(),
        }
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        match self {
            Basis::Full(b) => b.geometry(),
            Basis::Sector(b) => b.geometry(),
            Basis::TwoSpecies(b) => b.geometry(),
        }
    }

    pub fn n_pairs(&self) -> usize {
        match self {
            Basis::Full(b) => b.n_pairs(),
            Basis::Sector(b) => b.n_pairs(),
            Basis::TwoSpecies(b) => b.n_pairs(),
        }
    }

    pub fn id(&self) -> BasisId {
        BasisId {
            kind: match self {
                Basis::Full(_) => 0,
                Basis::Sector(_) => 1,
                Basis::TwoSpecies(_) => 2,
            },
            geom: *self.geometry(),
            n_pairs: self.n_pairs(),
            momentum: match self {
                Basis::Sector(b) => Some(b.momentum()),
                _ => None,
            },
        }
    }

    pub fn as_full(&self) -> Option<&FullBasis> {
        match self {
            Basis::Full(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_sector(&self) -> Option<&SectorBasis> {
        match self {
            Basis::Sector(b) => Some(b),
            _ => None,
        }
    }
}

/// A normalized real amplitude vector over a basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<Basis>,
    amps: Vec<f64>,
}

impl StateVector {
    /// Wrap amplitudes that are already normalized (to 1e-8).
    pub fn new(basis: Arc<Basis>, amps: Vec<f64>) -> Result<Self, Error> {
        if amps.len() != basis.dimension() {
            return Err(Error::BasisMismatch(format!(
                "vector length {} does not match basis dimension {}",
                amps.len(),
                basis.dimension()
            )));
        }
        let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { basis, amps })
    }

    /// Normalize raw amplitudes; the zero vector is rejected.
    pub fn normalized(basis: Arc<Basis>, mut amps: Vec<f64>) -> Result<Self, Error> {
        if amps.len() != basis.dimension() {
            return Err(Error::BasisMismatch(format!(
                "vector length {} does not match basis dimension {}",
                amps.len(),
                basis.dimension()
            )));
        }
        let norm = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        Ok(Self { basis, amps })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn same_basis(&self, other: &StateVector) -> bool {
        self.basis.id() == other.basis.id()
    }

    /// Amplitude of a specific configuration.
    ///
    /// Supported on full bases and zero-momentum sector bases.
    pub fn amplitude_of(&self, config: &PairConfiguration) -> Result<f64, Error> {
        match self.basis.as_ref() {
            Basis::Full(b) => {
                if config.n_pairs() != b.n_pairs() {
                    return Err(Error::BasisMismatch(
                        "configuration size does not match basis".into(),
                    ));
                }
                Ok(self.amps[b.rank(config)])
            }
            Basis::Sector(b) => {
                if !b.momentum().is_zero() {
                    return Err(Error::Unsupported(
                        "real amplitudes are only defined in the zero-momentum sector".into(),
                    ));
                }
                match b.find(config) {
                    Some((i, _)) => Ok(self.amps[i] / (b.orbit_size(i) as f64).sqrt()),
                    None => Ok(0.0),
                }
            }
            Basis::TwoSpecies(_) => Err(Error::Unsupported(
                "amplitude lookup by pair configuration is not defined on the two-species basis"
                    .into(),
            )),
        }
    }

    /// Expand a zero-momentum sector state over the full basis.
    pub fn lift_to_full(&self) -> Result<StateVector, Error> {
        match self.basis.as_ref() {
            Basis::Sector(b) => {
                let amps = b.lift(&self.amps)?;
                let full = FullBasis::new(*b.geometry(), b.n_pairs())?;
                StateVector::new(Arc::new(Basis::Full(full)), amps)
            }
            Basis::Full(_) => Ok(self.clone()),
            Basis::TwoSpecies(_) => Err(Error::Unsupported(
                "two-species states cannot be lifted to the pair basis".into(),
            )),
        }
    }
}
