//! Hard-core pair configurations and momentum-sector bases.
//!
//! A configuration is a strictly increasing list of occupied sites (at most
//! one pair per site). The full basis is the set of all `C(M, N)`
//! configurations in lexicographic order, with combinadic ranking. Sector
//! bases collect one lexicographically-smallest representative per
//! translation orbit, keeping only orbits compatible with the requested
//! momentum.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::lattice::LatticeGeometry;
use crate::Error;

/// Exact binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc as usize
}

/// Positions of `N` hard-core pairs, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairConfiguration {
    occupied: Vec<usize>,
}

impl PairConfiguration {
    /// Build from a strictly increasing site list bounded by `sites`.
    pub fn new(occupied: Vec<usize>, sites: usize) -> Result<Self, Error> {
        if !occupied.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidGeometry(
                "configuration sites must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = occupied.last() {
            if last >= sites {
                return Err(Error::InvalidGeometry(format!(
                    "site {last} out of range for {sites} sites"
                )));
            }
        }
        Ok(Self { occupied })
    }

    fn from_sorted(occupied: Vec<usize>) -> Self {
        debug_assert!(occupied.windows(2).all(|w| w[0] < w[1]));
        Self { occupied }
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    pub fn n_pairs(&self) -> usize {
        self.occupied.len()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.occupied.binary_search(&site).is_ok()
    }

    /// Image under translation by (`dr`, `dc`) on `geom`.
    pub fn translated(&self, geom: &LatticeGeometry, dr: i64, dc: i64) -> Self {
        let mut sites: Vec<usize> = self
            .occupied
            .iter()
            .map(|&s| geom.translate_site(s, dr, dc))
            .collect();
        sites.sort_unstable();
        Self::from_sorted(sites)
    }

    /// Configuration with one pair moved `from -> to`; `None` if blocked.
    pub fn move_pair(&self, from: usize, to: usize) -> Option<Self> {
        if !self.contains(from) || self.contains(to) || from == to {
            return None;
        }
        let mut sites = self.occupied.clone();
        sites.retain(|&s| s != from);
        let pos = sites.partition_point(|&s| s < to);
        sites.insert(pos, to);
        Some(Self::from_sorted(sites))
    }
}

/// All `C(M, N)` configurations of `N` pairs on `M` sites, in lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct FullBasis {
    geom: LatticeGeometry,
    n_pairs: usize,
    dim: usize,
}

impl FullBasis {
    /// `N` may be 0 (a single empty configuration) but not exceed `M`.
    pub fn new(geom: LatticeGeometry, n_pairs: usize) -> Result<Self, Error> {
        let m = geom.sites();
        if n_pairs > m {
            return Err(Error::PairCountOutOfRange { n: n_pairs, m });
        }
        Ok(Self {
            geom,
            n_pairs,
            dim: binomial(m, n_pairs),
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Lexicographic rank of `config` in `[0, C(M, N))`.
    pub fn rank(&self, config: &PairConfiguration) -> usize {
        let m = self.geom.sites();
        let n = self.n_pairs;
        let mut rank = 0usize;
        let mut next = 0usize;
        for (i, &c) in config.occupied.iter().enumerate() {
            for v in next..c {
                rank += binomial(m - 1 - v, n - 1 - i);
            }
            next = c + 1;
        }
        rank
    }

    /// Configuration with lexicographic rank `index`.
    pub fn unrank(&self, index: usize) -> PairConfiguration {
        debug_assert!(index < self.dim);
        let m = self.geom.sites();
        let n = self.n_pairs;
        let mut sites = Vec::with_capacity(n);
        let mut rem = index;
        let mut v = 0usize;
        for i in 0..n {
            loop {
                let cnt = binomial(m - 1 - v, n - 1 - i);
                if rem < cnt {
                    sites.push(v);
                    v += 1;
                    break;
                }
                rem -= cnt;
                v += 1;
            }
        }
        PairConfiguration::from_sorted(sites)
    }

    /// Iterate all configurations in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = PairConfiguration> + '_ {
        let m = self.geom.sites();
        let n = self.n_pairs;
        let mut cur: Option<Vec<usize>> = if self.dim > 0 {
            Some((0..n).collect())
        } else {
            None
        };
        std::iter::from_fn(move || {
            let sites = cur.take()?;
            // compute lexicographic successor
            let mut next = sites.clone();
            let mut i = n;
            while i > 0 {
                i -= 1;
                if next[i] < m - (n - i) {
                    next[i] += 1;
                    for j in i + 1..n {
                        next[j] = next[j - 1] + 1;
                    }
                    cur = Some(next);
                    break;
                }
            }
            Some(PairConfiguration::from_sorted(sites))
        })
    }
}

/// Integer momentum labels; `row` in `[0, rows)`, `col` in `[0, cols)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Momentum {
    pub row: usize,
    pub col: usize,
}

impl Momentum {
    pub const ZERO: Momentum = Momentum { row: 0, col: 0 };

    pub fn is_zero(&self) -> bool {
        self.row == 0 && self.col == 0
    }
}

/// Momentum-symmetrized basis: one representative per compatible orbit.
///
/// The symmetrized state of representative `a` with momentum `k` is
/// `|a(k)> = N^{-1/2} sum_t exp(-i phi_k(t)) T_t |a>` with
/// `phi_k(t) = 2 pi (k_row t_row / rows + k_col t_col / cols)`; its
/// amplitude on each orbit member has magnitude `1/sqrt(orbit size)`.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    geom: LatticeGeometry,
    n_pairs: usize,
    momentum: Momentum,
    reps: Vec<PairConfiguration>,
    orbit_sizes: Vec<usize>,
    index: HashMap<PairConfiguration, usize>,
}

impl SectorBasis {
    pub fn build(
        geom: LatticeGeometry,
        n_pairs: usize,
        momentum: Momentum,
    ) -> Result<Self, Error> {
        let m = geom.sites();
        if n_pairs == 0 || n_pairs > m {
            return Err(Error::PairCountOutOfRange { n: n_pairs, m });
        }
        if momentum.row >= geom.rows() || momentum.col >= geom.cols() {
            return Err(Error::MomentumOutOfRange {
                row: momentum.row,
                col: momentum.col,
            });
        }
        let mut reps = Vec::new();
        let mut orbit_sizes = Vec::new();
        // Every representative contains site 0 (translations act transitively
        // on sites), so enumerate configurations {0} + (N-1 of the rest).
        let rest = FullBasis::new(LatticeGeometry::new(1, m.max(2) - 1)?, n_pairs - 1)?;
        let group_order = m;
        for tail in rest.iter() {
            let mut sites = vec![0usize];
            sites.extend(tail.occupied().iter().map(|&s| s + 1));
            let config = PairConfiguration::from_sorted(sites);
            let (rep, _) = representative(&geom, &config);
            if rep != config {
                continue;
            }
            let stab = stabilizer_shifts(&geom, &config);
            if !stab
                .iter()
                .all(|&s| momentum_phase_trivial(&geom, momentum, s))
            {
                continue;
            }
            orbit_sizes.push(group_order / stab.len());
            reps.push(config);
        }
        let index = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        Ok(Self {
            geom,
            n_pairs,
            momentum,
            reps,
            orbit_sizes,
            index,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn momentum(&self) -> Momentum {
        self.momentum
    }

    pub fn dimension(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[PairConfiguration] {
        &self.reps
    }

    pub fn orbit_size(&self, rep_index: usize) -> usize {
        self.orbit_sizes[rep_index]
    }

    /// Locate the orbit of `config`: representative index and a shift `t`
    /// with `config = T_t(rep)`. `None` if the orbit is incompatible with
    /// this sector's momentum.
    pub fn find(&self, config: &PairConfiguration) -> Option<(usize, (usize, usize))> {
        let (rep, shift) = representative(&self.geom, config);
        self.index.get(&rep).map(|&i| (i, shift))
    }

    /// Phase `exp(-i phi_k(t))` attached to translation `t`.
    pub fn phase(&self, shift: (usize, usize)) -> Complex64 {
        let arg = 2.0
            * std::f64::consts::PI
            * (self.momentum.row as f64 * shift.0 as f64 / self.geom.rows() as f64
                + self.momentum.col as f64 * shift.1 as f64 / self.geom.cols() as f64);
        Complex64::from_polar(1.0, -arg)
    }

    /// Expand a real zero-momentum sector vector over the full basis.
    pub fn lift(&self, sector_amps: &[f64]) -> Result<Vec<f64>, Error> {
        if !self.momentum.is_zero() {
            return Err(Error::Unsupported(
                "real lift is only defined in the zero-momentum sector".into(),
            ));
        }
        if sector_amps.len() != self.dimension() {
            return Err(Error::BasisMismatch(format!(
                "sector vector length {} does not match dimension {}",
                sector_amps.len(),
                self.dimension()
            )));
        }
        let full = FullBasis::new(self.geom, self.n_pairs)?;
        let mut out = vec![0.0; full.dimension()];
        for (i, rep) in self.reps.iter().enumerate() {
            let amp = sector_amps[i] / (self.orbit_sizes[i] as f64).sqrt();
            for t in self.geom.translations() {
                let img = rep.translated(&self.geom, t.shift_rows as i64, t.shift_cols as i64);
                out[full.rank(&img)] = amp;
            }
        }
        Ok(out)
    }

    /// Expand a complex sector vector over the full basis, with phases.
    pub fn lift_complex(&self, sector_amps: &[Complex64]) -> Result<Vec<Complex64>, Error> {
        if sector_amps.len() != self.dimension() {
            return Err(Error::BasisMismatch(format!(
                "sector vector length {} does not match dimension {}",
                sector_amps.len(),
                self.dimension()
            )));
        }
        let full = FullBasis::new(self.geom, self.n_pairs)?;
        let mut out = vec![Complex64::new(0.0, 0.0); full.dimension()];
        for (i, rep) in self.reps.iter().enumerate() {
            let amp = sector_amps[i] / (self.orbit_sizes[i] as f64).sqrt();
            for t in self.geom.translations() {
                let img = rep.translated(&self.geom, t.shift_rows as i64, t.shift_cols as i64);
                out[full.rank(&img)] = amp * self.phase((t.shift_rows, t.shift_cols));
            }
        }
        Ok(out)
    }
}

/// Lexicographically smallest orbit member of `config`, together with the
/// shift `t` such that `config = T_t(rep)`.
///
/// The minimum always occupies site 0, so only the translations mapping an
/// occupied site to the origin need to be tried.
pub fn representative(
    geom: &LatticeGeometry,
    config: &PairConfiguration,
) -> (PairConfiguration, (usize, usize)) {
    let mut best: Option<(PairConfiguration, (usize, usize))> = None;
    for &s in config.occupied() {
        let (r, c) = geom.site_coords(s);
        let cand = config.translated(geom, -(r as i64), -(c as i64));
        match &best {
            Some((b, _)) if *b <= cand => {}
            _ => best = Some((cand, (r, c))),
        }
    }
    best.expect("configuration must be non-empty")
}

/// Shifts fixing `config` as a set. Candidates map site 0 onto an occupied
/// site, so at most `N` shifts need checking.
fn stabilizer_shifts(geom: &LatticeGeometry, config: &PairConfiguration) -> Vec<(usize, usize)> {
    debug_assert!(config.contains(0));
    config
        .occupied()
        .iter()
        .map(|&s| geom.site_coords(s))
        .filter(|&(r, c)| config.translated(geom, r as i64, c as i64) == *config)
        .collect()
}

fn momentum_phase_trivial(geom: &LatticeGeometry, k: Momentum, shift: (usize, usize)) -> bool {
    // phi_k(t) in 2 pi Z  <=>  (k_row t_row cols + k_col t_col rows) = 0 mod rows*cols
    let m = geom.sites();
    (k.row * shift.0 * geom.cols() + k.col * shift.1 * geom.rows()) % m == 0
}
