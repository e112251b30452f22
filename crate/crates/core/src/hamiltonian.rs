//! Hamiltonian assembly: effective pair model, full two-species fermion
//! model, and the Heisenberg image of the 1D chain.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::basis::{FullBasis, PairConfiguration, SectorBasis};
use crate::lattice::{Direction, LatticeGeometry};
use crate::state::{Basis, TwoSpeciesBasis};
use crate::Error;

/// Maximum dimension accepted by [`build_full`].
pub const FULL_MODEL_LIMIT: usize = 1_000_000;

/// Physical parameters: on-site attraction `U0`, bare hoppings `J_x`, `J_y`,
/// and the pair number `N`. Effective tunnelings are `V_nu = J_nu^2 / U0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParameters {
    pub u0: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub n_pairs: usize,
}

impl ModelParameters {
    pub fn new(u0: f64, j_x: f64, j_y: f64, n_pairs: usize) -> Result<Self, Error> {
        if !(u0 > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "U0 must be positive, got {u0}"
            )));
        }
        Ok(Self {
            u0,
            j_x,
            j_y,
            n_pairs,
        })
    }

    pub fn bare_hopping(&self, dir: Direction) -> f64 {
        match dir {
            Direction::X => self.j_x,
            Direction::Y => self.j_y,
        }
    }

    /// Effective pair tunneling `V_nu = J_nu^2 / U0`.
    pub fn effective(&self, dir: Direction) -> f64 {
        let j = self.bare_hopping(dir);
        j * j / self.u0
    }

    /// `max(|J_x|, |J_y|) / U0`, reported as a perturbative-validity figure.
    pub fn perturbative_ratio(&self) -> f64 {
        self.j_x.abs().max(self.j_y.abs()) / self.u0
    }

    /// Per-pair constant `U0 + sum of V_nu` over directions of extent >= 2.
    pub fn pair_constant(&self, geom: &LatticeGeometry) -> f64 {
        let mut c = self.u0;
        for dir in Direction::ALL {
            if geom.extent(dir) >= 2 {
                c += self.effective(dir);
            }
        }
        c
    }
}

/// Real symmetric sparse operator in CSR form, tied to its basis.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    basis: Arc<Basis>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseHamiltonian {
    fn from_rows(basis: Arc<Basis>, rows: Vec<BTreeMap<usize, f64>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            basis,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| v * x[c])
            .sum()
    }

    /// `H x`, parallelized over rows when the `parallel` feature is on.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        #[cfg(feature = "parallel")]
        {
            (0..self.dim())
                .into_par_iter()
                .map(|i| self.row_dot(i, x))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.matvec_seq(x)
        }
    }

    /// Sequential `H x`, kept for benchmarking against the parallel path.
    pub fn matvec_seq(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim()).map(|i| self.row_dot(i, x)).collect()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(h, v)| h * v).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }

    /// Largest `|H_ij - H_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut map = std::collections::HashMap::new();
        for i in 0..self.dim() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                map.insert((i, self.col_idx[k]), self.values[k]);
            }
        }
        map.iter()
            .map(|(&(i, j), &v)| (v - map.get(&(j, i)).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] == j {
                return self.values[k];
            }
        }
        0.0
    }
}

fn build_rows<F>(dim: usize, f: F) -> Vec<BTreeMap<usize, f64>>
where
    F: Fn(usize) -> BTreeMap<usize, f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..dim).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..dim).map(f).collect()
    }
}

/// Diagonal element of the effective model on `config`.
fn effective_diagonal(
    geom: &LatticeGeometry,
    params: &ModelParameters,
    config: &PairConfiguration,
) -> f64 {
    let mut diag = -(config.n_pairs() as f64) * params.pair_constant(geom);
    for dir in Direction::ALL {
        let v = params.effective(dir);
        for (j, jp) in geom.bonds(dir) {
            if config.contains(j) && config.contains(jp) {
                diag += v;
            }
        }
    }
    diag
}

/// Allowed single-pair hops out of `config`: `(direction, target config)`.
///
/// Each occupied site is moved one step both ways along every direction of
/// extent >= 2; blocked targets are skipped. At extent 2 both steps reach
/// the same site, reproducing the doubled bond sum.
fn pair_hops(
    geom: &LatticeGeometry,
    config: &PairConfiguration,
) -> Vec<(Direction, PairConfiguration)> {
    let mut out = Vec::new();
    for &j in config.occupied() {
        for dir in Direction::ALL {
            if geom.extent(dir) < 2 {
                continue;
            }
            for step in [-1i64, 1] {
                let target = geom.neighbor(j, dir, step);
                if let Some(moved) = config.move_pair(j, target) {
                    out.push((dir, moved));
                }
            }
        }
    }
    out
}

/// Effective ground-manifold Hamiltonian on a full or zero-momentum sector
/// basis.
///
/// Diagonal: `-N (U0 + sum V_nu) + sum_bonds V_nu n_j n_j'`; off-diagonal:
/// `-V_nu / 2` per allowed pair hop along a `nu`-bond. Sector elements carry
/// the orbit-norm factor `sqrt(|orbit_b| / |orbit_a|)`.
pub fn build_effective(
    basis: &Arc<Basis>,
    params: &ModelParameters,
) -> Result<SparseHamiltonian, Error> {
    if basis.n_pairs() != params.n_pairs {
        return Err(Error::BasisMismatch(format!(
            "basis holds {} pairs but parameters specify {}",
            basis.n_pairs(),
            params.n_pairs
        )));
    }
    let geom = *basis.geometry();
    match basis.as_ref() {
        Basis::Full(fb) => {
            let rows = build_rows(fb.dimension(), |i| {
                let config = fb.unrank(i);
                let mut row = BTreeMap::new();
                row.insert(i, effective_diagonal(&geom, params, &config));
                for (dir, target) in pair_hops(&geom, &config) {
                    let j = fb.rank(&target);
                    *row.entry(j).or_insert(0.0) += -params.effective(dir) / 2.0;
                }
                row
            });
            Ok(SparseHamiltonian::from_rows(basis.clone(), rows))
        }
        Basis::Sector(sb) => {
            if !sb.momentum().is_zero() {
                return Err(Error::Unsupported(
                    "sparse real assembly is restricted to the zero-momentum sector; \
                     use build_effective_sector_dense for finite momentum"
                        .into(),
                ));
            }
            let rows = build_rows(sb.dimension(), |b| {
                let rep = &sb.representatives()[b];
                let mut row = BTreeMap::new();
                row.insert(b, effective_diagonal(&geom, params, rep));
                let orbit_b = sb.orbit_size(b) as f64;
                for (dir, target) in pair_hops(&geom, rep) {
                    let (a, _) = sb
                        .find(&target)
                        .expect("every orbit is compatible at zero momentum");
                    let factor = (orbit_b / sb.orbit_size(a) as f64).sqrt();
                    *row.entry(a).or_insert(0.0) += -params.effective(dir) / 2.0 * factor;
                }
                row
            });
            Ok(SparseHamiltonian::from_rows(basis.clone(), rows))
        }
        Basis::TwoSpecies(_) => Err(Error::BasisMismatch(
            "the effective model is defined on pair bases, not the two-species basis".into(),
        )),
    }
}

/// Dense complex effective Hamiltonian in an arbitrary momentum sector.
///
/// Entry `(a, b) = sum_hops h exp(+i phi_k(t)) sqrt(|orbit_b| / |orbit_a|)`
/// where the hop target equals `T_t` applied to representative `a`.
pub fn build_effective_sector_dense(
    sector: &SectorBasis,
    params: &ModelParameters,
) -> Result<DMatrix<Complex64>, Error> {
    if sector.n_pairs() != params.n_pairs {
        return Err(Error::BasisMismatch(format!(
            "basis holds {} pairs but parameters specify {}",
            sector.n_pairs(),
            params.n_pairs
        )));
    }
    let geom = *sector.geometry();
    let d = sector.dimension();
    let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for b in 0..d {
        let rep = &sector.representatives()[b];
        m[(b, b)] += Complex64::new(effective_diagonal(&geom, params, rep), 0.0);
        let orbit_b = sector.orbit_size(b) as f64;
        for (dir, target) in pair_hops(&geom, rep) {
            if let Some((a, shift)) = sector.find(&target) {
                let factor = (orbit_b / sector.orbit_size(a) as f64).sqrt();
                let h = -params.effective(dir) / 2.0 * factor;
                m[(a, b)] += sector.phase(shift).conj() * h;
            }
        }
    }
    Ok(m)
}

/// Fermionic sign of moving a particle `from -> to` within `config`
/// (creation operators ordered by increasing site index).
fn hop_sign(config: &PairConfiguration, from: usize, to: usize) -> f64 {
    let below_from = config.occupied().iter().filter(|&&s| s < from).count();
    let below_to = config
        .occupied()
        .iter()
        .filter(|&&s| s < to && s != from)
        .count();
    if (below_from + below_to) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Full two-species fermion Hamiltonian: on-site attraction `-U0` between
/// species plus single-particle hopping `J_nu / 2` along each direction.
///
/// Operators of different species commute.
pub fn build_full(
    geom: LatticeGeometry,
    params: &ModelParameters,
) -> Result<SparseHamiltonian, Error> {
    let ts = TwoSpeciesBasis::new(geom, params.n_pairs)?;
    let dim = ts.dimension();
    if dim > FULL_MODEL_LIMIT {
        return Err(Error::SizeLimit {
            dim,
            limit: FULL_MODEL_LIMIT,
        });
    }
    let basis = Arc::new(Basis::TwoSpecies(ts));
    let ts = match basis.as_ref() {
        Basis::TwoSpecies(t) => t.clone(),
        _ => unreachable!(),
    };
    let rows = build_rows(dim, |i| {
        let (ca, cb) = ts.unindex(i);
        let mut row = BTreeMap::new();
        let paired = ca.occupied().iter().filter(|&&s| cb.contains(s)).count();
        row.insert(i, -params.u0 * paired as f64);
        // species hops; the two species are handled symmetrically
        for (species, config, other) in [(0u8, &ca, &cb), (1u8, &cb, &ca)] {
            for &j in config.occupied() {
                for dir in Direction::ALL {
                    if geom.extent(dir) < 2 {
                        continue;
                    }
                    for step in [-1i64, 1] {
                        let target = geom.neighbor(j, dir, step);
                        if let Some(moved) = config.move_pair(j, target) {
                            let amp = params.bare_hopping(dir) / 2.0 * hop_sign(config, j, target);
                            let col = if species == 0 {
                                ts.index(&moved, other)
                            } else {
                                ts.index(other, &moved)
                            };
                            *row.entry(col).or_insert(0.0) += amp;
                        }
                    }
                }
            }
        }
        row
    });
    Ok(SparseHamiltonian::from_rows(basis, rows))
}

/// Heisenberg-model image of the 1D effective Hamiltonian:
/// `H = -N U0 + (J^2 / 4 U0)(H_H - L)` restricted to the magnetization
/// sector with `N` up spins, built directly from
/// `H_H = sum_j sigma_j . sigma_{j+1}`.
///
/// Requires an even chain length; the sublattice rotation relating the two
/// models is a similarity transformation only on bipartite rings.
pub fn heisenberg_image(
    geom: LatticeGeometry,
    params: &ModelParameters,
) -> Result<SparseHamiltonian, Error> {
    if geom.rows() != 1 {
        return Err(Error::InvalidGeometry(
            "the Heisenberg image is defined for 1 x L chains".into(),
        ));
    }
    let l = geom.cols();
    if l % 2 != 0 {
        return Err(Error::OddLength(l));
    }
    let fb = FullBasis::new(geom, params.n_pairs)?;
    let basis = Arc::new(Basis::Full(fb));
    let fb = basis.as_full().unwrap().clone();
    let v4 = params.effective(Direction::X) / 4.0;
    let offset = -(params.n_pairs as f64) * params.u0 - v4 * l as f64;
    let bonds = geom.bonds(Direction::X);
    let rows = build_rows(fb.dimension(), |i| {
        let config = fb.unrank(i);
        let mut row = BTreeMap::new();
        let mut zz = 0.0;
        for &(j, jp) in &bonds {
            if config.contains(j) == config.contains(jp) {
                zz += 1.0;
            } else {
                zz -= 1.0;
                // exchange term sigma^x sigma^x + sigma^y sigma^y -> 2 flip
                let (from, to) = if config.contains(j) { (j, jp) } else { (jp, j) };
                let flipped = config.move_pair(from, to).expect("target is unoccupied");
                *row.entry(fb.rank(&flipped)).or_insert(0.0) += 2.0 * v4;
            }
        }
        *row.entry(i).or_insert(0.0) += offset + v4 * zz;
        row
    });
    Ok(SparseHamiltonian::from_rows(basis, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{Momentum, SectorBasis};

    fn params(u0: f64, j: f64, n: usize) -> ModelParameters {
        ModelParameters::new(u0, j, j, n).unwrap()
    }

    fn full_basis(geom: LatticeGeometry, n: usize) -> Arc<Basis> {
        Arc::new(Basis::Full(FullBasis::new(geom, n).unwrap()))
    }

    #[test]
    fn single_pair_ring_spectrum_matches_closed_form() {
        let g = LatticeGeometry::ring(3).unwrap();
        let p = params(1.0, 0.1, 1);
        let h = build_effective(&full_basis(g, 1), &p).unwrap();
        let dense = h.to_dense();
        let mut eig: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let v = p.effective(Direction::X);
        let expected = [-1.0 - 2.0 * v, -1.0 - v / 2.0, -1.0 - v / 2.0];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn sector_matrix_1x4_two_pairs() {
        // In units V with the constant -2(U0 + V) removed, the k = 0 sector
        // matrix is [[1, -sqrt(2)], [-sqrt(2), 0]].
        let g = LatticeGeometry::ring(4).unwrap();
        let p = params(1.0, 0.2, 2);
        let v = p.effective(Direction::X);
        let sb = SectorBasis::build(g, 2, Momentum::ZERO).unwrap();
        let h = build_effective(&Arc::new(Basis::Sector(sb)), &p).unwrap();
        let shift = -2.0 * (p.u0 + v);
        assert!(((h.entry(0, 0) - shift) / v - 1.0).abs() < 1e-12);
        assert!(((h.entry(1, 1) - shift) / v - 0.0).abs() < 1e-12);
        assert!((h.entry(0, 1) / v + 2f64.sqrt()).abs() < 1e-12);
        assert!((h.entry(1, 0) / v + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn filled_lattice_blocks_all_hops() {
        let g = LatticeGeometry::ring(4).unwrap();
        let p = params(1.0, 0.1, 4);
        let h = build_effective(&full_basis(g, 4), &p).unwrap();
        assert_eq!(h.dim(), 1);
        let v = p.effective(Direction::X);
        // -4(U0 + V) + 4 V from the four fully occupied bonds
        assert!((h.entry(0, 0) - (-4.0 * (p.u0 + v) + 4.0 * v)).abs() < 1e-13);
    }

    #[test]
    fn symmetry_and_diagonal_presence() {
        for (n, l, np) in [(1, 6, 2), (2, 3, 2), (3, 4, 2), (1, 8, 3)] {
            let g = LatticeGeometry::new(n, l).unwrap();
            let p = params(1.0, 0.1, np);
            let h = build_effective(&full_basis(g, np), &p).unwrap();
            assert!(h.max_asymmetry() < 1e-14);
            let sb = SectorBasis::build(g, np, Momentum::ZERO).unwrap();
            let hs = build_effective(&Arc::new(Basis::Sector(sb)), &p).unwrap();
            assert!(hs.max_asymmetry() < 1e-13);
        }
    }

    #[test]
    fn translation_invariance_full_basis() {
        for (n, l, np) in [(1, 8, 2), (2, 5, 2), (3, 3, 2)] {
            let g = LatticeGeometry::new(n, l).unwrap();
            let p = params(1.0, 0.1, np);
            let fbasis = full_basis(g, np);
            let fb = fbasis.as_full().unwrap().clone();
            let h = build_effective(&fbasis, &p).unwrap();
            let dense = h.to_dense();
            for t in g.translations() {
                let perm: Vec<usize> = (0..fb.dimension())
                    .map(|i| {
                        fb.rank(&fb.unrank(i).translated(
                            &g,
                            t.shift_rows as i64,
                            t.shift_cols as i64,
                        ))
                    })
                    .collect();
                for i in 0..fb.dimension() {
                    for j in 0..fb.dimension() {
                        let delta = (dense[(perm[i], perm[j])] - dense[(i, j)]).abs();
                        assert!(delta < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn full_model_two_site_single_pair() {
        let g = LatticeGeometry::ring(2).unwrap();
        let p = params(1.0, 0.3, 1);
        let h = build_full(g, &p).unwrap();
        assert_eq!(h.dim(), 4);
        // paired states (a and b on the same site) carry -U0
        let ts = TwoSpeciesBasis::new(g, 1).unwrap();
        let c0 = PairConfiguration::new(vec![0], 2).unwrap();
        let c1 = PairConfiguration::new(vec![1], 2).unwrap();
        assert!((h.entry(ts.index(&c0, &c0), ts.index(&c0, &c0)) + p.u0).abs() < 1e-15);
        assert!((h.entry(ts.index(&c0, &c1), ts.index(&c0, &c1))).abs() < 1e-15);
        assert!(h.max_asymmetry() < 1e-14);
    }

    #[test]
    fn full_model_ground_energy_close_to_perturbative() {
        let g = LatticeGeometry::ring(5).unwrap();
        let p = params(100.0, 1.0, 1);
        let h = build_full(g, &p).unwrap();
        let dense = h.to_dense();
        let e_full = dense
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let e_eff = -p.u0 - 2.0 * p.effective(Direction::X);
        let quartic = p.j_x.powi(4) / p.u0.powi(3);
        assert!((e_full - e_eff).abs() < 10.0 * quartic);
    }

    #[test]
    fn sign_of_j_is_irrelevant_on_even_rings() {
        for (l, np) in [(4, 1), (6, 2)] {
            let g = LatticeGeometry::ring(l).unwrap();
            let pp = params(50.0, 1.0, np);
            let pm = ModelParameters::new(50.0, -1.0, -1.0, np).unwrap();
            let ep = build_full(g, &pp)
                .unwrap()
                .to_dense()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let em = build_full(g, &pm)
                .unwrap()
                .to_dense()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert!((ep - em).abs() < 1e-10);
        }
    }

    #[test]
    fn heisenberg_image_two_sites() {
        // L = 2, N = 1: effective model has doubled bonds; spectra must match
        let g = LatticeGeometry::ring(2).unwrap();
        let p = params(1.0, 0.1, 1);
        let he = build_effective(&full_basis(g, 1), &p).unwrap().to_dense();
        let hh = heisenberg_image(g, &p).unwrap().to_dense();
        let mut ee: Vec<f64> = he.symmetric_eigen().eigenvalues.iter().copied().collect();
        let mut eh: Vec<f64> = hh.symmetric_eigen().eigenvalues.iter().copied().collect();
        ee.sort_by(f64::total_cmp);
        eh.sort_by(f64::total_cmp);
        for (a, b) in ee.iter().zip(&eh) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn heisenberg_image_empty_sector() {
        let g = LatticeGeometry::ring(4).unwrap();
        let p = params(1.0, 0.1, 0);
        let h = heisenberg_image(g, &p).unwrap();
        assert_eq!(h.dim(), 1);
        assert!(h.entry(0, 0).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_image_rejects_odd_length() {
        let g = LatticeGeometry::ring(5).unwrap();
        let p = params(1.0, 0.1, 2);
        assert!(matches!(heisenberg_image(g, &p), Err(Error::OddLength(5))));
    }

    #[test]
    fn dense_sector_matrix_matches_sparse_at_zero_momentum() {
        let g = LatticeGeometry::new(2, 4).unwrap();
        let p = params(1.0, 0.15, 2);
        let sb = SectorBasis::build(g, 2, Momentum::ZERO).unwrap();
        let dense_c = build_effective_sector_dense(&sb, &p).unwrap();
        let sparse = build_effective(&Arc::new(Basis::Sector(sb)), &p)
            .unwrap()
            .to_dense();
        for i in 0..sparse.nrows() {
            for j in 0..sparse.ncols() {
                assert!((dense_c[(i, j)].re - sparse[(i, j)]).abs() < 1e-13);
                assert!(dense_c[(i, j)].im.abs() < 1e-13);
            }
        }
    }
}
