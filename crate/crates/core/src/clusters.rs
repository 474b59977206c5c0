//! Cluster partitions of the lattice and offspring enumeration.
//!
//! A cluster partition chops the lattice into disjoint groups of sites.
//! Given two configurations with finite discrepancy, every subset of the
//! clusters meeting the discrepancy produces one *offspring*: copy the
//! second parent on the chosen clusters, the first parent elsewhere. The
//! offspring set has exactly `2^k` members for `k` touched clusters and
//! always contains both parents.

use std::collections::BTreeSet;

use crate::config::{discrepancy, Configuration, Discrepancy};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region, Site};
use crate::transforms::SpatialMap;

/// Identifier of one cluster inside a partition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClusterId {
    /// The single cluster of the trivial partition.
    Whole,
    /// An atomic cluster: the site itself.
    Site(Site),
    /// A block index of a block partition.
    Block(i64),
    /// Index into an explicit finite partition.
    Part(usize),
    /// Cluster of factor `tag` in a product partition.
    Tagged(u8, Box<ClusterId>),
}

/// The bundled partition kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClusterPartition {
    /// Every site is its own cluster.
    Atomic,
    /// One cluster holding the whole lattice.
    Unique,
    /// Contiguous bands of `size` consecutive x-coordinates; `offset` slides
    /// the band boundaries (images of block partitions under translations).
    Blocks { size: u32, offset: i64 },
    /// Explicit partition of a finite lattice.
    FiniteList(Vec<Region>),
    /// Factor-wise partition of a product lattice.
    Product(Vec<ClusterPartition>),
}

impl ClusterPartition {
    pub fn atomic() -> Self {
        ClusterPartition::Atomic
    }

    pub fn unique() -> Self {
        ClusterPartition::Unique
    }

    pub fn blocks(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidModel("block size must be positive".into()));
        }
        Ok(ClusterPartition::Blocks { size, offset: 0 })
    }

    pub fn finite_list(parts: Vec<Region>) -> Self {
        ClusterPartition::FiniteList(parts)
    }

    pub fn product(parts: Vec<ClusterPartition>) -> Self {
        ClusterPartition::Product(parts)
    }

    /// The cluster containing `s`. Total for every site of the validated
    /// lattice.
    pub fn cluster_of(&self, s: Site) -> ClusterId {
        match self {
            ClusterPartition::Atomic => ClusterId::Site(s),
            ClusterPartition::Unique => ClusterId::Whole,
            ClusterPartition::Blocks { size, offset } => {
                ClusterId::Block((s.x - offset).div_euclid(*size as i64))
            }
            ClusterPartition::FiniteList(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if p.contains(s) {
                        return ClusterId::Part(i);
                    }
                }
                panic!("site {s} is not covered by the finite partition");
            }
            ClusterPartition::Product(parts) => {
                let inner = parts
                    .get(s.tag as usize)
                    .unwrap_or_else(|| panic!("site tag {} outside product partition", s.tag));
                ClusterId::Tagged(s.tag, Box::new(inner.cluster_of(s.untagged())))
            }
        }
    }

    /// Sorted distinct ids of clusters intersecting `region`.
    pub fn clusters_meeting(&self, region: &Region) -> Vec<ClusterId> {
        let set: BTreeSet<ClusterId> = region.iter().map(|s| self.cluster_of(s)).collect();
        set.into_iter().collect()
    }

    /// Structural validation against the hosting lattice.
    pub fn validate(&self, lattice: &Lattice) -> Result<()> {
        match self {
            ClusterPartition::Atomic | ClusterPartition::Unique => Ok(()),
            ClusterPartition::Blocks { size, .. } => {
                if *size == 0 {
                    return Err(Error::InvalidModel("block size must be positive".into()));
                }
                if matches!(lattice, Lattice::Product(_)) {
                    return Err(Error::InvalidModel(
                        "use a product partition on a product lattice".into(),
                    ));
                }
                Ok(())
            }
            ClusterPartition::FiniteList(parts) => {
                let sites = lattice.sites().map_err(|_| {
                    Error::InvalidModel("explicit partitions need a finite lattice".into())
                })?;
                let mut seen = Region::new();
                for p in parts {
                    if p.is_empty() {
                        return Err(Error::InvalidModel("empty cluster in partition".into()));
                    }
                    if !seen.is_disjoint(p) {
                        return Err(Error::InvalidModel("overlapping clusters".into()));
                    }
                    seen = seen.union(p);
                }
                if seen.len() != sites.len() || !sites.iter().all(|&s| seen.contains(s)) {
                    return Err(Error::InvalidModel(
                        "partition does not cover the lattice exactly".into(),
                    ));
                }
                Ok(())
            }
            ClusterPartition::Product(parts) => {
                let factors = lattice.factors();
                if !matches!(lattice, Lattice::Product(_)) || factors.len() != parts.len() {
                    return Err(Error::InvalidModel(
                        "product partition needs a product lattice with matching factors".into(),
                    ));
                }
                for (p, l) in parts.iter().zip(factors) {
                    p.validate(l)?;
                }
                Ok(())
            }
        }
    }

    /// The image partition under a spatial bijection, when it is
    /// representable in the bundled kinds.
    pub fn transformed(&self, spatial: &SpatialMap) -> Result<ClusterPartition> {
        match self {
            ClusterPartition::Atomic => Ok(ClusterPartition::Atomic),
            ClusterPartition::Unique => Ok(ClusterPartition::Unique),
            ClusterPartition::Blocks { size, offset } => match spatial {
                SpatialMap::Identity => Ok(self.clone()),
                SpatialMap::Translation(tx, _) => Ok(ClusterPartition::Blocks {
                    size: *size,
                    offset: offset + tx,
                }),
                SpatialMap::Reflection => {
                    // The band [o + mk, o + mk + k) maps onto
                    // (-o - mk - k, -o - mk], i.e. bands anchored at 1 - o.
                    let k = *size as i64;
                    Ok(ClusterPartition::Blocks {
                        size: *size,
                        offset: (1 - offset).rem_euclid(k),
                    })
                }
                SpatialMap::Permutation(_) => Err(Error::IncompatibleTransform(
                    "finite permutations do not preserve block partitions".into(),
                )),
            },
            ClusterPartition::FiniteList(parts) => Ok(ClusterPartition::FiniteList(
                parts
                    .iter()
                    .map(|p| p.iter().map(|s| spatial.apply(s)).collect())
                    .collect(),
            )),
            ClusterPartition::Product(_) => match spatial {
                SpatialMap::Identity => Ok(self.clone()),
                _ => Err(Error::IncompatibleTransform(
                    "only the identity acts on product partitions".into(),
                )),
            },
        }
    }
}

/// All interpolations of `sigma` and `eta` along whole clusters: for each
/// subset of the clusters meeting the discrepancy, take `eta`'s values
/// there and `sigma`'s elsewhere. Pairs with macroscopic discrepancy have no
/// offspring. The result is ordered lexicographically by the sorted list of
/// chosen cluster ids (so `sigma`, carrying the empty choice, comes first).
pub fn offspring(
    partition: &ClusterPartition,
    sigma: &Configuration,
    eta: &Configuration,
) -> Vec<Configuration> {
    let d = match discrepancy(sigma, eta) {
        Discrepancy::Macroscopic => return Vec::new(),
        Discrepancy::Finite(d) => d,
    };
    let ids = partition.clusters_meeting(&d);
    let k = ids.len();
    let mut choices: Vec<Vec<ClusterId>> = Vec::with_capacity(1 << k);
    for mask in 0u64..(1u64 << k) {
        let chosen: Vec<ClusterId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, id)| id.clone())
            .collect();
        choices.push(chosen);
    }
    choices.sort();
    choices
        .into_iter()
        .map(|chosen| {
            let chosen: BTreeSet<&ClusterId> = chosen.iter().collect();
            let mut out = sigma.clone();
            for s in d.iter() {
                if chosen.contains(&partition.cluster_of(s)) {
                    out = out.set(s, eta.value(s));
                }
            }
            out
        })
        .collect()
}
