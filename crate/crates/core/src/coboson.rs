//! Schmidt spectra, compositeness normalization factors and the coboson
//! ansatz state.

use std::sync::Arc;

use crate::basis::{binomial, Momentum, SectorBasis};
use crate::hamiltonian::{build_effective, ModelParameters};
use crate::lattice::{Direction, LatticeGeometry};
use crate::state::{Basis, StateVector};
use crate::Error;

/// Schmidt coefficients of a single-pair state, descending, summing to 1.
#[derive(Clone, Debug)]
pub struct SchmidtSpectrum {
    coefficients: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, Error> {
        if coefficients.windows(2).any(|w| w[0] < w[1]) || coefficients.iter().any(|&c| c < 0.0) {
            return Err(Error::InvalidGeometry(
                "Schmidt coefficients must be non-negative and descending".into(),
            ));
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized { norm: sum });
        }
        Ok(Self { coefficients })
    }

    /// Uniform spectrum `1/S` of rank `S` (maximally entangled pair).
    pub fn uniform(rank: usize) -> Self {
        Self {
            coefficients: vec![1.0 / rank as f64; rank],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Purity `P = sum lambda^2`.
    pub fn purity(&self) -> f64 {
        self.coefficients.iter().map(|l| l * l).sum()
    }

    /// Compositeness factor `chi_N = N! e_N(lambda)`, via Newton's
    /// identities between power sums and elementary symmetric polynomials.
    /// `chi_0 = chi_1 = 1`; zero when `N` exceeds the Schmidt rank.
    pub fn chi(&self, n: usize) -> f64 {
        let s = self.rank();
        if n > s {
            return 0.0;
        }
        // power sums p_1 .. p_n
        let mut powers = vec![0.0; n + 1];
        for &l in &self.coefficients {
            let mut acc = 1.0;
            for p in powers.iter_mut().skip(1) {
                acc *= l;
                *p += acc;
            }
        }
        // k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
        let mut elementary = vec![0.0; n + 1];
        elementary[0] = 1.0;
        for k in 1..=n {
            let mut acc = 0.0;
            let mut sign = 1.0;
            for i in 1..=k {
                acc += sign * elementary[k - i] * powers[i];
                sign = -sign;
            }
            elementary[k] = acc / k as f64;
        }
        let factorial: f64 = (1..=n).map(|i| i as f64).product();
        factorial * elementary[n]
    }
}

/// Schmidt spectrum of the single-pair ground state on `geom`: uniform
/// `1/M` with rank `M` by translation invariance.
pub fn schmidt_of_single_pair_ground(geom: &LatticeGeometry) -> SchmidtSpectrum {
    SchmidtSpectrum::uniform(geom.sites())
}

/// The coboson ansatz: the uniform superposition of all `C(M, N)` hard-core
/// configurations, on a full basis or its zero-momentum sector image.
pub fn ansatz_state(basis: &Arc<Basis>) -> Result<StateVector, Error> {
    match basis.as_ref() {
        Basis::Full(fb) => {
            let amp = 1.0 / (fb.dimension() as f64).sqrt();
            StateVector::new(basis.clone(), vec![amp; fb.dimension()])
        }
        Basis::Sector(sb) => {
            if !sb.momentum().is_zero() {
                return Err(Error::Unsupported(
                    "the ansatz lives in the zero-momentum sector".into(),
                ));
            }
            let c = binomial(sb.geometry().sites(), sb.n_pairs()) as f64;
            let amps = (0..sb.dimension())
                .map(|i| (sb.orbit_size(i) as f64 / c).sqrt())
                .collect();
            StateVector::new(basis.clone(), amps)
        }
        Basis::TwoSpecies(_) => Err(Error::Unsupported(
            "the ansatz is defined on pair bases".into(),
        )),
    }
}

/// Expectation value of the effective Hamiltonian in the ansatz state,
/// evaluated as a sparse quadratic form in the zero-momentum sector.
pub fn ansatz_energy(geom: &LatticeGeometry, params: &ModelParameters) -> Result<f64, Error> {
    let sector = SectorBasis::build(*geom, params.n_pairs, Momentum::ZERO)?;
    let basis = Arc::new(Basis::Sector(sector));
    let h = build_effective(&basis, params)?;
    let state = ansatz_state(&basis)?;
    Ok(h.quadratic_form(state.amps()))
}

/// Closed form of the two-pair ansatz energy on a 1D ring:
/// `-2 U0 - 4 J^2/U0 + (4 J^2/U0) / (L - 1)`.
pub fn ansatz_energy_two_pairs_ring(l: usize, params: &ModelParameters) -> f64 {
    let v = params.effective(Direction::X);
    -2.0 * params.u0 - 4.0 * v + 4.0 * v / (l as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use crate::basis::FullBasis;
    use crate::eigensolver::ground_state;

    #[test]
    fn uniform_spectrum_properties() {
        let s = schmidt_of_single_pair_ground(&LatticeGeometry::ring(4).unwrap());
        assert_eq!(s.rank(), 4);
        assert!(s.coefficients().iter().all(|&l| (l - 0.25).abs() < 1e-15));
        assert!((s.purity() - 0.25).abs() < 1e-15);
        let s = schmidt_of_single_pair_ground(&LatticeGeometry::new(3, 3).unwrap());
        assert_eq!(s.rank(), 9);
        assert!((s.purity() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn chi_two_equals_one_minus_purity() {
        for m in [2usize, 4, 7, 16, 51] {
            let s = SchmidtSpectrum::uniform(m);
            assert!((s.chi(2) - (1.0 - 1.0 / m as f64)).abs() < 1e-13);
        }
        assert!((SchmidtSpectrum::uniform(4).chi(2) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn chi_edge_cases() {
        let s = SchmidtSpectrum::uniform(5);
        assert_eq!(s.chi(0), 1.0);
        assert!((s.chi(1) - 1.0).abs() < 1e-15);
        assert_eq!(s.chi(6), 0.0);
    }

    /// Brute-force sum over strictly decreasing index tuples.
    fn chi_brute_force(coeffs: &[f64], n: usize) -> f64 {
        fn rec(coeffs: &[f64], n: usize, start: usize) -> f64 {
            if n == 0 {
                return 1.0;
            }
            (start..coeffs.len())
                .map(|i| coeffs[i] * rec(coeffs, n - 1, i + 1))
                .sum()
        }
        let factorial: f64 = (1..=n).map(|i| i as f64).product();
        factorial * rec(coeffs, n, 0)
    }

    #[test]
    fn chi_matches_brute_force() {
        for s in 2..=8usize {
            // a non-uniform normalized descending spectrum
            let raw: Vec<f64> = (0..s).map(|i| 1.0 / (i as f64 + 1.5)).collect();
            let sum: f64 = raw.iter().sum();
            let coeffs: Vec<f64> = raw.iter().map(|x| x / sum).collect();
            let spec = SchmidtSpectrum::new(coeffs.clone()).unwrap();
            for n in 0..=4.min(s) {
                let expect = chi_brute_force(&coeffs, n);
                assert!(
                    (spec.chi(n) - expect).abs() < 1e-13,
                    "S={s} N={n}: {} vs {expect}",
                    spec.chi(n)
                );
            }
            let uni = SchmidtSpectrum::uniform(s);
            for n in 0..=4.min(s) {
                // closed form N! C(S,N) / S^N for the uniform spectrum
                let closed =
                    chi_brute_force(&vec![1.0 / s as f64; s], n);
                assert!((uni.chi(n) - closed).abs() < 1e-13);
                let direct = (1..=n).map(|i| i as f64).product::<f64>()
                    * binomial(s, n) as f64
                    / (s as f64).powi(n as i32);
                assert!((uni.chi(n) - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn chi_ratio_grows_with_sites() {
        for n in [2usize, 3, 4] {
            let mut prev = 0.0;
            for m in (2 * n)..=64 {
                let s = SchmidtSpectrum::uniform(m);
                let ratio = s.chi(n) / s.chi(n - 1);
                assert!(ratio > 0.0 && ratio <= 1.0);
                assert!(ratio > prev, "ratio not increasing at N={n}, M={m}");
                prev = ratio;
            }
        }
    }

    #[test]
    fn ansatz_is_uniform_and_zero_momentum() {
        let g = LatticeGeometry::ring(4).unwrap();
        let full = Arc::new(Basis::Full(FullBasis::new(g, 2).unwrap()));
        let a = ansatz_state(&full).unwrap();
        for amp in a.amps() {
            assert!((amp - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        }
        // sector image lifts back to the same uniform vector
        let sb = SectorBasis::build(g, 2, Momentum::ZERO).unwrap();
        let sector = Arc::new(Basis::Sector(sb));
        let a_sector = ansatz_state(&sector).unwrap().lift_to_full().unwrap();
        for (x, y) in a.amps().iter().zip(a_sector.amps()) {
            assert!((x - y).abs() < 1e-14);
        }
        // everything outside k = 0: overlap of the ansatz with any k != 0
        // sector state vanishes because the ansatz is translation invariant
        for kc in 1..4 {
            let sk = SectorBasis::build(g, 2, Momentum { row: 0, col: kc }).unwrap();
            for i in 0..sk.dimension() {
                let mut v = vec![num_complex::Complex64::new(0.0, 0.0); sk.dimension()];
                v[i] = num_complex::Complex64::new(1.0, 0.0);
                let lifted = sk.lift_complex(&v).unwrap();
                let overlap: num_complex::Complex64 = lifted
                    .iter()
                    .zip(a.amps())
                    .map(|(c, &r)| c.conj() * r)
                    .sum();
                assert!(overlap.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_pair_ansatz_energy_is_ground_energy() {
        let g = LatticeGeometry::ring(7).unwrap();
        let p = ModelParameters::new(1.0, 0.1, 0.1, 1).unwrap();
        let e = ansatz_energy(&g, &p).unwrap();
        let e0 = -p.u0 - 2.0 * p.effective(Direction::X);
        assert!((e - e0).abs() < 1e-13);
    }

    #[test]
    fn two_pair_ansatz_energy_closed_form() {
        for l in [4usize, 5, 10, 40] {
            let g = LatticeGeometry::ring(l).unwrap();
            let p = ModelParameters::new(1.0, 0.1, 0.1, 2).unwrap();
            let e = ansatz_energy(&g, &p).unwrap();
            let closed = ansatz_energy_two_pairs_ring(l, &p);
            assert!((e - closed).abs() < 1e-12, "L={l}: {e} vs {closed}");
        }
    }

    #[test]
    fn ansatz_energy_is_variational_upper_bound() {
        for l in [4usize, 6, 9, 14] {
            let g = LatticeGeometry::ring(l).unwrap();
            let p = ModelParameters::new(1.0, 0.1, 0.1, 2).unwrap();
            let sector = Arc::new(Basis::Sector(
                SectorBasis::build(g, 2, Momentum::ZERO).unwrap(),
            ));
            let h = build_effective(&sector, &p).unwrap();
            let exact = ground_state(&h, 1e-12, 1).unwrap().eigenvalue;
            let e = ansatz_energy(&g, &p).unwrap();
            assert!(e >= exact - 1e-12);
            // and the exact two-pair energy agrees with the closed form
            let closed = analytic::two_pair_exact_energy(l, &p);
            assert!((exact - closed).abs() < 1e-10);
        }
    }
}
