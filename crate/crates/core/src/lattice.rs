//! Rings and rectangular tori with periodic boundary conditions.
//!
//! Sites are indexed row-major with the column index running fastest, so a
//! 1D ring is a `1 x L` geometry whose only nontrivial direction is
//! [`Direction::X`] (along columns). All bond lists are the literal per-site
//! sums of the lattice Hamiltonian: a direction of extent 2 therefore lists
//! every physical bond twice.

use crate::Error;

/// Hopping / interaction direction on the torus.
///
/// `X` runs along columns (extent `cols`), `Y` along rows (extent `rows`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::X, Direction::Y];
}

/// An `rows x cols` torus; `rows == 1` is a 1D ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeGeometry {
    rows: usize,
    cols: usize,
}

/// One element of the translation group, as a site permutation.
#[derive(Clone, Debug)]
pub struct Translation {
    pub shift_rows: usize,
    pub shift_cols: usize,
    /// `perm[s]` is the image of site `s` under the translation.
    pub perm: Vec<usize>,
}

impl LatticeGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGeometry(format!(
                "extents must be positive, got {rows} x {cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// A 1D ring of `cols` sites.
    pub fn ring(cols: usize) -> Result<Self, Error> {
        Self::new(1, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of sites `M = rows * cols`.
    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn extent(&self, dir: Direction) -> usize {
        match dir {
            Direction::X => self.cols,
            Direction::Y => self.rows,
        }
    }

    /// True if any direction has extent exactly 2 (doubled bond lists).
    pub fn has_extent_two(&self) -> bool {
        self.rows == 2 || self.cols == 2
    }

    /// Site index for (possibly out-of-range) coordinates, taken mod extents.
    pub fn site_index(&self, row: i64, col: i64) -> usize {
        let r = row.rem_euclid(self.rows as i64) as usize;
        let c = col.rem_euclid(self.cols as i64) as usize;
        r * self.cols + c
    }

    /// Inverse of [`site_index`](Self::site_index) for in-range sites.
    pub fn site_coords(&self, site: usize) -> (usize, usize) {
        debug_assert!(site < self.sites());
        (site / self.cols, site % self.cols)
    }

    /// Image of `site` under translation by (`dr`, `dc`).
    pub fn translate_site(&self, site: usize, dr: i64, dc: i64) -> usize {
        let (r, c) = self.site_coords(site);
        self.site_index(r as i64 + dr, c as i64 + dc)
    }

    /// Neighbour of `site` at `step` lattice spacings along `dir`.
    pub fn neighbor(&self, site: usize, dir: Direction, step: i64) -> usize {
        match dir {
            Direction::X => self.translate_site(site, 0, step),
            Direction::Y => self.translate_site(site, step, 0),
        }
    }

    /// Directed bonds `(j, shift(j))` along `dir`, one per site.
    ///
    /// Empty when the direction has extent 1; for extent 2 each physical
    /// bond appears twice (literal per-site sum).
    pub fn bonds(&self, dir: Direction) -> Vec<(usize, usize)> {
        if self.extent(dir) < 2 {
            return Vec::new();
        }
        (0..self.sites())
            .map(|j| (j, self.neighbor(j, dir, 1)))
            .collect()
    }

    /// All `rows * cols` translations, ordered by (row shift, column shift).
    pub fn translations(&self) -> Vec<Translation> {
        let mut out = Vec::with_capacity(self.sites());
        for tr in 0..self.rows {
            for tc in 0..self.cols {
                let perm = (0..self.sites())
                    .map(|s| self.translate_site(s, tr as i64, tc as i64))
                    .collect();
                out.push(Translation {
                    shift_rows: tr,
                    shift_cols: tc,
                    perm,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn site_index_wraps() {
        let g = LatticeGeometry::ring(5).unwrap();
        assert_eq!(g.site_index(0, 0), 0);
        assert_eq!(g.site_index(0, 7), 2);
        assert_eq!(g.site_index(0, -1), 4);
        let g = LatticeGeometry::new(4, 18).unwrap();
        let s = g.site_index(3, 2);
        assert_eq!(g.site_coords(s), (3, 2));
        assert_eq!(g.site_index(3 + 4, 2 + 18), s);
    }

    #[test]
    fn site_index_bijective() {
        let g = LatticeGeometry::new(3, 7).unwrap();
        let all: HashSet<usize> = (0..3)
            .flat_map(|r| (0..7).map(move |c| (r, c)))
            .map(|(r, c)| g.site_index(r as i64, c as i64))
            .collect();
        assert_eq!(all.len(), 21);
    }

    #[test]
    fn ring_bonds() {
        let g = LatticeGeometry::ring(4).unwrap();
        assert_eq!(g.bonds(Direction::X), vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(g.bonds(Direction::Y).is_empty());
    }

    #[test]
    fn extent_two_bonds_are_doubled() {
        let g = LatticeGeometry::new(2, 3).unwrap();
        let b = g.bonds(Direction::Y);
        assert_eq!(b.len(), 6);
        // each vertical pair appears twice (as (j, j') and (j', j))
        let set: HashSet<(usize, usize)> = b
            .iter()
            .map(|&(a, c)| (a.min(c), a.max(c)))
            .collect();
        assert_eq!(set.len(), 3);
        for (a, c) in b.iter() {
            assert!(b.contains(&(*c, *a)));
        }
    }

    #[test]
    fn translations_form_group() {
        let g = LatticeGeometry::new(2, 2).unwrap();
        let ts = g.translations();
        assert_eq!(ts.len(), 4);
        for t in &ts {
            // order <= 2 on a 2x2 torus
            let twice: Vec<usize> = (0..4).map(|s| t.perm[t.perm[s]]).collect();
            assert_eq!(twice, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn shift_by_one_has_order_l() {
        let g = LatticeGeometry::ring(6).unwrap();
        let mut s = 0usize;
        for _ in 0..6 {
            s = g.translate_site(s, 0, 1);
        }
        assert_eq!(s, 0);
        assert_eq!(g.translations().len(), 6);
    }

    #[test]
    fn translations_are_permutations() {
        for (n, l) in [(1, 9), (3, 5), (4, 4), (2, 6)] {
            let g = LatticeGeometry::new(n, l).unwrap();
            for t in g.translations() {
                let uniq: HashSet<usize> = t.perm.iter().copied().collect();
                assert_eq!(uniq.len(), g.sites());
            }
        }
    }

    #[test]
    fn bonds_translation_covariant() {
        for (n, l) in [(1, 6), (3, 4), (2, 5)] {
            let g = LatticeGeometry::new(n, l).unwrap();
            for dir in Direction::ALL {
                let bonds: HashSet<(usize, usize)> = g.bonds(dir).into_iter().collect();
                for t in g.translations() {
                    let mapped: HashSet<(usize, usize)> = bonds
                        .iter()
                        .map(|&(a, b)| (t.perm[a], t.perm[b]))
                        .collect();
                    assert_eq!(mapped, bonds);
                }
            }
        }
    }

    #[test]
    fn zero_extent_rejected() {
        assert!(LatticeGeometry::new(0, 5).is_err());
        assert!(LatticeGeometry::new(3, 0).is_err());
    }
}
