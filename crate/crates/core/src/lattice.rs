//! Lattices, sites and finite regions.
//!
//! Sites carry up to two integer coordinates plus a factor tag; the tag is 0
//! everywhere except on disjoint-union (product) lattices, where it names the
//! factor a site belongs to. One-dimensional lattices simply keep `y = 0`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A lattice site. Ordering is lexicographic in `(tag, x, y)`, which fixes
/// the canonical iteration order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub tag: u8,
    pub x: i64,
    pub y: i64,
}

impl Site {
    /// Site on a one-dimensional lattice.
    pub fn line(x: i64) -> Self {
        Site { tag: 0, x, y: 0 }
    }

    /// Site on a two-dimensional lattice.
    pub fn plane(x: i64, y: i64) -> Self {
        Site { tag: 0, x, y }
    }

    /// The same coordinates re-tagged as belonging to factor `tag` of a
    /// product lattice.
    pub fn tagged(self, tag: u8) -> Self {
        Site { tag, ..self }
    }

    /// Drop the factor tag (used when projecting product configurations).
    pub fn untagged(self) -> Self {
        Site { tag: 0, ..self }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag != 0 {
            write!(f, "{}#", self.tag)?;
        }
        if self.y == 0 {
            write!(f, "{}", self.x)
        } else {
            write!(f, "({},{})", self.x, self.y)
        }
    }
}

/// Supported lattices: the integer line, the plane, the half line
/// {0, 1, 2, ...}, finite rectangular grids (a chain is a grid of height 1)
/// and one-level disjoint unions used by product models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lattice {
    Line,
    Plane,
    HalfLine,
    Grid { w: usize, h: usize },
    Product(Vec<Lattice>),
}

impl Lattice {
    /// Finite chain of `n` sites, indexed 0..n.
    pub fn chain(n: usize) -> Self {
        Lattice::Grid { w: n, h: 1 }
    }

    /// Number of coordinates a site effectively uses (products report the
    /// maximum of their factors).
    pub fn dims(&self) -> u8 {
        match self {
            Lattice::Line | Lattice::HalfLine => 1,
            Lattice::Plane => 2,
            Lattice::Grid { h, .. } => {
                if *h > 1 {
                    2
                } else {
                    1
                }
            }
            Lattice::Product(fs) => fs.iter().map(|f| f.dims()).max().unwrap_or(1),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Lattice::Line | Lattice::Plane | Lattice::HalfLine => false,
            Lattice::Grid { .. } => true,
            Lattice::Product(fs) => fs.iter().all(|f| f.is_finite()),
        }
    }

    pub fn contains(&self, s: Site) -> bool {
        match self {
            Lattice::Line => s.tag == 0 && s.y == 0,
            Lattice::Plane => s.tag == 0,
            Lattice::HalfLine => s.tag == 0 && s.y == 0 && s.x >= 0,
            Lattice::Grid { w, h } => {
                s.tag == 0 && (0..*w as i64).contains(&s.x) && (0..*h as i64).contains(&s.y)
            }
            Lattice::Product(fs) => fs
                .get(s.tag as usize)
                .map(|f| f.contains(s.untagged()))
                .unwrap_or(false),
        }
    }

    /// Factor lattices of a product; a plain lattice is its own single factor.
    pub fn factors(&self) -> &[Lattice] {
        match self {
            Lattice::Product(fs) => fs,
            _ => std::slice::from_ref(self),
        }
    }

    /// All sites of a finite lattice in canonical order.
    pub fn sites(&self) -> Result<Vec<Site>> {
        match self {
            Lattice::Grid { w, h } => {
                let mut out = Vec::with_capacity(w * h);
                for x in 0..*w as i64 {
                    for y in 0..*h as i64 {
                        out.push(Site::plane(x, y));
                    }
                }
                out.sort();
                Ok(out)
            }
            Lattice::Product(fs) => {
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    out.extend(f.sites()?.into_iter().map(|s| s.tagged(i as u8)));
                }
                out.sort();
                Ok(out)
            }
            _ => Err(Error::TooLarge(format!("lattice {self:?} is infinite"))),
        }
    }

    /// Nearest-neighbour step directions (used by the pair potentials).
    pub(crate) fn neighbor_offsets(&self) -> &'static [(i64, i64)] {
        match self.dims() {
            1 => &[(1, 0)],
            _ => &[(1, 0), (0, 1)],
        }
    }
}

/// A finite set of sites with set operations; iteration is always in site
/// order, so every reduction over a region is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Region(BTreeSet<Site>);

impl Region {
    pub fn new() -> Self {
        Region(BTreeSet::new())
    }

    pub fn single(s: Site) -> Self {
        Region(BTreeSet::from([s]))
    }

    /// Sites x0..x1 (inclusive) of a one-dimensional lattice.
    pub fn segment(x0: i64, x1: i64) -> Self {
        (x0..=x1).map(Site::line).collect()
    }

    pub fn insert(&mut self, s: Site) {
        self.0.insert(s);
    }

    pub fn contains(&self, s: Site) -> bool {
        self.0.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Site> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Region) -> Region {
        Region(self.0.intersection(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &Region) -> Region {
        Region(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Sites belonging to factor `tag`, with the tag stripped.
    pub fn project(&self, tag: u8) -> Region {
        self.iter()
            .filter(|s| s.tag == tag)
            .map(Site::untagged)
            .collect()
    }
}

impl FromIterator<Site> for Region {
    fn from_iter<I: IntoIterator<Item = Site>>(iter: I) -> Self {
        Region(iter.into_iter().collect())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_order_is_tag_then_coords() {
        let mut v = vec![
            Site::plane(1, -1),
            Site::line(0).tagged(1),
            Site::line(-3),
            Site::plane(1, -2),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Site::line(-3),
                Site::plane(1, -2),
                Site::plane(1, -1),
                Site::line(0).tagged(1),
            ]
        );
    }

    #[test]
    fn half_line_membership() {
        assert!(Lattice::HalfLine.contains(Site::line(0)));
        assert!(Lattice::HalfLine.contains(Site::line(17)));
        assert!(!Lattice::HalfLine.contains(Site::line(-1)));
        assert!(!Lattice::HalfLine.contains(Site::plane(2, 1)));
    }

    #[test]
    fn grid_sites_are_sorted_and_complete() {
        let l = Lattice::Grid { w: 2, h: 3 };
        let sites = l.sites().unwrap();
        assert_eq!(sites.len(), 6);
        assert!(sites.windows(2).all(|w| w[0] < w[1]));
        assert!(sites.iter().all(|&s| l.contains(s)));
        assert!(!l.contains(Site::plane(2, 0)));
        assert!(!l.contains(Site::plane(0, 3)));
    }

    #[test]
    fn chain_is_one_dimensional() {
        assert_eq!(Lattice::chain(8).dims(), 1);
        assert_eq!(Lattice::Grid { w: 2, h: 3 }.dims(), 2);
    }

    #[test]
    fn product_membership_uses_tags() {
        let p = Lattice::Product(vec![Lattice::Line, Lattice::chain(2)]);
        assert!(p.contains(Site::line(-5)));
        assert!(p.contains(Site::line(1).tagged(1)));
        assert!(!p.contains(Site::line(2).tagged(1)));
        assert!(!p.contains(Site::line(0).tagged(2)));
    }

    #[test]
    fn region_ops() {
        let a = Region::segment(0, 3);
        let b = Region::segment(2, 5);
        assert_eq!(a.intersection(&b), Region::segment(2, 3));
        assert_eq!(a.union(&b), Region::segment(0, 5));
        assert_eq!(a.difference(&b), Region::segment(0, 1));
        assert!(Region::segment(2, 3).is_subset(&a));
        assert_eq!(format!("{}", Region::segment(-1, 1)), "{-1,0,1}");
    }
}
