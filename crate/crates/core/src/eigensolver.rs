//! Lowest eigenpair of a sparse symmetric Hamiltonian.
//!
//! Small problems go through a dense solver; larger ones use Lanczos with
//! full reorthogonalization and a deterministic seeded start vector.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::SparseHamiltonian;
use crate::state::StateVector;
use crate::Error;

/// Dimensions up to this bound are solved densely.
pub const DENSE_LIMIT: usize = 2000;

/// Lowest eigenvalues closer than this are flagged as near-degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

const MAX_ITERATIONS: usize = 600;

/// Result of a ground-state solve.
#[derive(Clone, Debug)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenvector: StateVector,
    /// `||H v - lambda v||_2` of the returned pair.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the lowest eigenvalue is within [`DEGENERACY_GAP`] of the
    /// next one (or when degeneracy cannot be ruled out). Fidelities against
    /// such states are ill-defined up to mixing within the subspace.
    pub near_degenerate: bool,
    /// Ritz minima recorded at each convergence check (Lanczos only).
    pub ritz_history: Vec<f64>,
}

/// Smallest eigenpair of `h`, deterministic for a given `seed`.
///
/// The eigenvector's global phase is fixed by making its largest-magnitude
/// amplitude positive. Non-convergence is an error, never silently accepted.
pub fn ground_state(h: &SparseHamiltonian, tol: f64, seed: u64) -> Result<EigenResult, Error> {
    assert!(h.dim() >= 1 && tol > 0.0);
    if h.dim() <= DENSE_LIMIT {
        ground_state_dense(h)
    } else {
        ground_state_lanczos(h, tol, seed)
    }
}

/// Dense path: full symmetric eigendecomposition, polished by inverse
/// iteration at the computed eigenvalue.
pub fn ground_state_dense(h: &SparseHamiltonian) -> Result<EigenResult, Error> {
    let dense = h.to_dense();
    let eig = dense.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lowest = order[0];
    let mut lambda = eig.eigenvalues[lowest];
    let near_degenerate = order
        .get(1)
        .map(|&i| (eig.eigenvalues[i] - lambda).abs() < DEGENERACY_GAP)
        .unwrap_or(false);
    let mut amps: Vec<f64> = eig.eigenvectors.column(lowest).iter().copied().collect();
    if h.dim() > 1 && !near_degenerate {
        polish_inverse_iteration(h, &dense, &mut amps, &mut lambda);
    }
    fix_phase(&mut amps);
    let residual = residual_norm(h, &amps, lambda);
    let eigenvector = StateVector::normalized(h.basis().clone(), amps)?;
    Ok(EigenResult {
        eigenvalue: lambda,
        eigenvector,
        residual,
        iterations: 0,
        converged: true,
        near_degenerate,
        ritz_history: vec![lambda],
    })
}

/// All eigenvalues, ascending. Dense only.
pub fn full_spectrum(h: &SparseHamiltonian) -> Result<Vec<f64>, Error> {
    if h.dim() > DENSE_LIMIT {
        return Err(Error::SizeLimit {
            dim: h.dim(),
            limit: DENSE_LIMIT,
        });
    }
    let mut eig: Vec<f64> = h
        .to_dense()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Lanczos with full reorthogonalization against all stored basis vectors.
pub fn ground_state_lanczos(
    h: &SparseHamiltonian,
    tol: f64,
    seed: u64,
) -> Result<EigenResult, Error> {
    let dim = h.dim();
    let max_iter = MAX_ITERATIONS.min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v0: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
    normalize(&mut v0);

    let mut vs: Vec<Vec<f64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut history: Vec<f64> = Vec::new();
    let scale = 1.0f64.max(h_scale(h));

    for m in 0..max_iter {
        let mut w = h.matvec(&vs[m]);
        if m > 0 {
            let b = betas[m - 1];
            let prev = &vs[m - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        let alpha = dot(&w, &vs[m]);
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&vs[m]) {
            *wi -= alpha * vi;
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for v in &vs {
                let c = dot(&w, v);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        let breakdown = beta < 1e-13 * scale;

        let check = breakdown || m == max_iter - 1 || (m + 1) % 5 == 0;
        if check {
            let (theta, s, gap_small) = tridiag_lowest(&alphas, &betas);
            history.push(theta);
            let res_est = if breakdown {
                0.0
            } else {
                beta * s.last().copied().unwrap_or(1.0).abs()
            };
            if res_est <= tol * 1.0f64.max(theta.abs()) || breakdown {
                let mut amps = vec![0.0; dim];
                for (si, v) in s.iter().zip(&vs) {
                    for (ai, vi) in amps.iter_mut().zip(v) {
                        *ai += si * vi;
                    }
                }
                normalize(&mut amps);
                fix_phase(&mut amps);
                let residual = residual_norm(h, &amps, theta);
                // breakdown before spanning the space leaves degeneracy
                // undecided; flag conservatively
                let exhausted = breakdown && vs.len() < dim;
                let near_degenerate = gap_small || exhausted;
                let eigenvector = StateVector::normalized(h.basis().clone(), amps)?;
                return Ok(EigenResult {
                    eigenvalue: theta,
                    eigenvector,
                    residual,
                    iterations: m + 1,
                    converged: true,
                    near_degenerate,
                    ritz_history: history,
                });
            }
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        vs.push(next);
    }
    let (theta, s, _) = tridiag_lowest(&alphas, &betas);
    let mut amps = vec![0.0; dim];
    for (si, v) in s.iter().zip(&vs) {
        for (ai, vi) in amps.iter_mut().zip(v) {
            *ai += si * vi;
        }
    }
    normalize(&mut amps);
    let residual = residual_norm(h, &amps, theta);
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
    })
}

/// Two inverse-iteration steps at the computed eigenvalue, followed by a
/// Rayleigh-quotient update. Tightens eigenvector components beyond the
/// accuracy of the QR-based decomposition.
fn polish_inverse_iteration(
    h: &SparseHamiltonian,
    dense: &DMatrix<f64>,
    amps: &mut Vec<f64>,
    lambda: &mut f64,
) {
    let n = dense.nrows();
    let mut shifted = dense.clone();
    for i in 0..n {
        shifted[(i, i)] -= *lambda;
    }
    let lu = shifted.full_piv_lu();
    let mut x = nalgebra::DVector::from_column_slice(amps);
    for _ in 0..2 {
        match lu.solve(&x) {
            Some(y) if y.norm().is_finite() && y.norm() > 0.0 => {
                x = y.normalize();
            }
            _ => return,
        }
    }
    let candidate: Vec<f64> = x.iter().copied().collect();
    let rq: f64 = h
        .matvec(&candidate)
        .iter()
        .zip(&candidate)
        .map(|(a, b)| a * b)
        .sum();
    if residual_norm(h, &candidate, rq) <= residual_norm(h, amps, *lambda) {
        *amps = candidate;
        *lambda = rq;
    }
}

/// Smallest Ritz value of the current tridiagonal matrix, its coefficient
/// vector, and whether the gap to the next Ritz value is below the
/// degeneracy threshold.
fn tridiag_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>, bool) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lowest = order[0];
    let gap_small = order
        .get(1)
        .map(|&i| (eig.eigenvalues[i] - eig.eigenvalues[lowest]).abs() < DEGENERACY_GAP)
        .unwrap_or(false);
    (
        eig.eigenvalues[lowest],
        eig.eigenvectors.column(lowest).iter().copied().collect(),
        gap_small,
    )
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

fn fix_phase(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

fn residual_norm(h: &SparseHamiltonian, v: &[f64], lambda: f64) -> f64 {
    h.matvec(v)
        .iter()
        .zip(v)
        .map(|(hv, vi)| (hv - lambda * vi).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn h_scale(h: &SparseHamiltonian) -> f64 {
    // infinity-norm estimate from a probe multiply with the all-ones vector
    // would miss cancellations; use the largest diagonal magnitude instead
    (0..h.dim()).map(|i| h.entry(i, i).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{FullBasis, Momentum, SectorBasis};
    use crate::hamiltonian::{build_effective, ModelParameters};
    use crate::lattice::LatticeGeometry;
    use crate::state::Basis;
    use std::sync::Arc;

    #[test]
    fn two_by_two_oracle() {
        // [[1, -sqrt(2)], [-sqrt(2), 0]] has lowest eigenpair
        // lambda = -1, v = (1, sqrt(2)) / sqrt(3)
        let g = LatticeGeometry::ring(4).unwrap();
        let p = ModelParameters::new(1.0, 1.0, 1.0, 2).unwrap();
        let sb = SectorBasis::build(g, 2, Momentum::ZERO).unwrap();
        let h = build_effective(&Arc::new(Basis::Sector(sb)), &p).unwrap();
        // shift to the quoted units: (H + 2(U0 + V)) / V with V = 1
        let v = p.effective(crate::lattice::Direction::X);
        let shift = 2.0 * (p.u0 + v);
        let r = ground_state(&h, 1e-12, 1).unwrap();
        assert!(((r.eigenvalue + shift) / v - (-1.0)).abs() < 1e-12);
        let amps = r.eigenvector.amps();
        assert!((amps[0] - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!((amps[1] - (2f64 / 3.0).sqrt()).abs() < 1e-10);
        assert!(r.residual < 1e-10);
        assert!(!r.near_degenerate);
    }

    #[test]
    fn lanczos_matches_dense_on_medium_problem() {
        let g = LatticeGeometry::ring(30).unwrap();
        let p = ModelParameters::new(1.0, 0.1, 0.1, 2).unwrap();
        let basis = Arc::new(Basis::Full(FullBasis::new(g, 2).unwrap()));
        let h = build_effective(&basis, &p).unwrap();
        assert!(h.dim() <= 500);
        let dense = ground_state_dense(&h).unwrap();
        let lanczos = ground_state_lanczos(&h, 1e-12, 7).unwrap();
        assert!((dense.eigenvalue - lanczos.eigenvalue).abs() < 1e-10);
        assert!(lanczos.residual < 1e-9);
        assert!(lanczos.converged);
    }

    #[test]
    fn ritz_minimum_is_monotone() {
        let g = LatticeGeometry::new(2, 36).unwrap();
        let p = ModelParameters::new(1.0, 0.1, 0.1, 2).unwrap();
        let basis = Arc::new(Basis::Full(FullBasis::new(g, 2).unwrap()));
        let h = build_effective(&basis, &p).unwrap();
        let r = ground_state_lanczos(&h, 1e-12, 3).unwrap();
        assert!(r.ritz_history.len() >= 2);
        for w in r.ritz_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let g = LatticeGeometry::ring(40).unwrap();
        let p = ModelParameters::new(1.0, 0.1, 0.1, 2).unwrap();
        let basis = Arc::new(Basis::Full(FullBasis::new(g, 2).unwrap()));
        let h = build_effective(&basis, &p).unwrap();
        let a = ground_state_lanczos(&h, 1e-12, 42).unwrap();
        let b = ground_state_lanczos(&h, 1e-12, 42).unwrap();
        assert_eq!(a.eigenvalue.to_bits(), b.eigenvalue.to_bits());
        assert_eq!(a.iterations, b.iterations);
        for (x, y) in a.eigenvector.amps().iter().zip(b.eigenvector.amps()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn degenerate_ground_is_flagged() {
        // 1x3 ring, single pair, k = 1 and k = 2 are degenerate; in the full
        // basis the dense solver must flag the near-degeneracy of excited
        // levels only when they are lowest, so test on a shifted matrix:
        // the identity-like case is covered by the effective model at N = 1
        // restricted to the degenerate doublet. Simplest check: a diagonal
        // matrix with a repeated minimum.
        let g = LatticeGeometry::ring(2).unwrap();
        let p = ModelParameters::new(1.0, 0.0, 0.0, 1).unwrap();
        let basis = Arc::new(Basis::Full(FullBasis::new(g, 1).unwrap()));
        let h = build_effective(&basis, &p).unwrap();
        // J = 0: both single-pair states sit at -U0
        let r = ground_state(&h, 1e-12, 1).unwrap();
        assert!(r.near_degenerate);
    }
}
