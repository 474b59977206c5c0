//! Configuration-space transforms and the comparisons built on them.
//!
//! A transform pairs a spatial bijection of the lattice with a family of
//! spin bijections, one per site: `(tau sigma)(x) = tau_x(sigma(tau_*^{-1} x))`.
//! Spatial maps are restricted to identity, translations, point reflection
//! and finitely supported permutations; spin families are either one global
//! bijection or a periodic site-indexed family. These are exactly the shapes
//! under which tail-plus-overrides configurations stay representable.
//!
//! On top of the transforms this module hosts the model-level checks:
//! coefficient equality for equivalent potentials, tau-isomorphism of two
//! models, the window probe certifying *non*-equivalence, and product-model
//! construction with its factorization check.

use std::collections::BTreeSet;

use crate::config::{Configuration, Spin, SpinSet, TailPattern};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region, Site};
use crate::model::Model;
use crate::numeric::lcm;
use crate::potential::Potential;

/// A bijection of the spin labels `0..q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinPerm(Vec<u8>);

impl SpinPerm {
    pub fn identity(q: u8) -> Self {
        SpinPerm((0..q).collect())
    }

    /// The two-state flip `0 <-> 1`.
    pub fn flip() -> Self {
        SpinPerm(vec![1, 0])
    }

    /// The cyclic shift `l -> l + 1 (mod q)`.
    pub fn cycle(q: u8) -> Self {
        SpinPerm((0..q).map(|l| (l + 1) % q).collect())
    }

    pub fn new(table: Vec<u8>) -> Result<Self> {
        let q = table.len();
        let mut seen = vec![false; q];
        for &v in &table {
            if (v as usize) >= q || seen[v as usize] {
                return Err(Error::IncompatibleTransform(
                    "spin map is not a bijection".into(),
                ));
            }
            seen[v as usize] = true;
        }
        Ok(SpinPerm(table))
    }

    pub fn q(&self) -> u8 {
        self.0.len() as u8
    }

    pub fn apply(&self, s: Spin) -> Spin {
        Spin(self.0[s.0 as usize])
    }

    pub fn inverse(&self) -> SpinPerm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        SpinPerm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i as u8 == v)
    }

    pub fn into_table(self) -> Vec<u8> {
        self.0
    }
}

/// Spatial part of a transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpatialMap {
    Identity,
    Translation(i64, i64),
    /// Point reflection through the origin.
    Reflection,
    /// Finitely supported permutation; sites outside the map are fixed.
    Permutation(std::collections::BTreeMap<Site, Site>),
}

impl SpatialMap {
    pub fn apply(&self, s: Site) -> Site {
        match self {
            SpatialMap::Identity => s,
            SpatialMap::Translation(tx, ty) => Site {
                tag: s.tag,
                x: s.x + tx,
                y: s.y + ty,
            },
            SpatialMap::Reflection => Site {
                tag: s.tag,
                x: -s.x,
                y: -s.y,
            },
            SpatialMap::Permutation(map) => map.get(&s).copied().unwrap_or(s),
        }
    }

    pub fn inverse(&self) -> SpatialMap {
        match self {
            SpatialMap::Identity => SpatialMap::Identity,
            SpatialMap::Translation(tx, ty) => SpatialMap::Translation(-tx, -ty),
            SpatialMap::Reflection => SpatialMap::Reflection,
            SpatialMap::Permutation(map) => {
                SpatialMap::Permutation(map.iter().map(|(&k, &v)| (v, k)).collect())
            }
        }
    }

    fn validate(&self, lattice: &Lattice) -> Result<()> {
        if matches!(lattice, Lattice::Product(_)) && !matches!(self, SpatialMap::Identity) {
            return Err(Error::IncompatibleTransform(
                "only the identity acts on product lattices".into(),
            ));
        }
        match self {
            SpatialMap::Identity => Ok(()),
            SpatialMap::Translation(tx, ty) => {
                let ok = match lattice {
                    Lattice::Line => *ty == 0,
                    Lattice::Plane => true,
                    _ => (*tx, *ty) == (0, 0),
                };
                if ok {
                    Ok(())
                } else {
                    Err(Error::IncompatibleTransform(format!(
                        "translation ({tx},{ty}) is not a bijection of {lattice:?}"
                    )))
                }
            }
            SpatialMap::Reflection => match lattice {
                Lattice::Line | Lattice::Plane => Ok(()),
                _ => Err(Error::IncompatibleTransform(format!(
                    "reflection is not a bijection of {lattice:?}"
                ))),
            },
            SpatialMap::Permutation(map) => {
                let keys: BTreeSet<Site> = map.keys().copied().collect();
                let vals: BTreeSet<Site> = map.values().copied().collect();
                if keys != vals {
                    return Err(Error::IncompatibleTransform(
                        "site permutation must have equal key and value sets".into(),
                    ));
                }
                for &s in &keys {
                    if !lattice.contains(s) {
                        return Err(Error::IncompatibleTransform(format!(
                            "permuted site {s} lies outside the lattice"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Per-site family of spin bijections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpinAction {
    /// One bijection applied at every site.
    Global(SpinPerm),
    /// Periodic site-indexed family, indexed like a tail table.
    Periodic {
        px: usize,
        py: usize,
        maps: Vec<SpinPerm>,
    },
}

/// A configuration-space transform `tau`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauTransform {
    spatial: SpatialMap,
    spin: SpinAction,
}

impl TauTransform {
    pub fn new(spatial: SpatialMap, spin: SpinAction) -> Result<Self> {
        match &spin {
            SpinAction::Global(p) => {
                if p.q() < 2 {
                    return Err(Error::IncompatibleTransform("spin map needs q >= 2".into()));
                }
            }
            SpinAction::Periodic { px, py, maps } => {
                if *px == 0 || *py == 0 || maps.len() != px * py {
                    return Err(Error::IncompatibleTransform(
                        "periodic spin family needs px*py maps".into(),
                    ));
                }
                let q = maps[0].q();
                if q < 2 || maps.iter().any(|m| m.q() != q) {
                    return Err(Error::IncompatibleTransform(
                        "periodic spin family must share one q".into(),
                    ));
                }
                if matches!(spatial, SpatialMap::Permutation(_)) {
                    // The inverse of such a transform needs a spin family that
                    // is periodic except at finitely many sites, which the
                    // representation cannot express.
                    return Err(Error::IncompatibleTransform(
                        "periodic spin families cannot combine with site permutations".into(),
                    ));
                }
            }
        }
        Ok(TauTransform { spatial, spin })
    }

    /// The identity transform for `q` spin labels.
    pub fn identity(q: u8) -> Self {
        TauTransform {
            spatial: SpatialMap::Identity,
            spin: SpinAction::Global(SpinPerm::identity(q)),
        }
    }

    /// Pure translation.
    pub fn translation(tx: i64, ty: i64, q: u8) -> Self {
        TauTransform {
            spatial: SpatialMap::Translation(tx, ty),
            spin: SpinAction::Global(SpinPerm::identity(q)),
        }
    }

    /// Global spin bijection with no spatial motion.
    pub fn spin_map(perm: SpinPerm) -> Self {
        TauTransform {
            spatial: SpatialMap::Identity,
            spin: SpinAction::Global(perm),
        }
    }

    pub fn spatial(&self) -> &SpatialMap {
        &self.spatial
    }

    pub fn q(&self) -> u8 {
        match &self.spin {
            SpinAction::Global(p) => p.q(),
            SpinAction::Periodic { maps, .. } => maps[0].q(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.spatial, SpatialMap::Identity)
            && match &self.spin {
                SpinAction::Global(p) => p.is_identity(),
                SpinAction::Periodic { maps, .. } => maps.iter().all(|m| m.is_identity()),
            }
    }

    /// `tau_* s`.
    pub fn apply_site(&self, s: Site) -> Site {
        self.spatial.apply(s)
    }

    pub fn apply_region(&self, r: &Region) -> Region {
        r.iter().map(|s| self.apply_site(s)).collect()
    }

    /// The spin bijection acting at site `s`.
    pub fn spin_perm_at(&self, s: Site) -> SpinPerm {
        match &self.spin {
            SpinAction::Global(p) => p.clone(),
            SpinAction::Periodic { px, py, maps } => {
                let x = s.x.rem_euclid(*px as i64) as usize;
                let y = s.y.rem_euclid(*py as i64) as usize;
                maps[y * px + x].clone()
            }
        }
    }

    /// Compatibility with a hosting model.
    pub fn validate(&self, lattice: &Lattice, spins: &SpinSet) -> Result<()> {
        self.spatial.validate(lattice)?;
        if self.q() != spins.q() {
            return Err(Error::IncompatibleTransform(format!(
                "spin maps act on {} labels but the model has {}",
                self.q(),
                spins.q()
            )));
        }
        Ok(())
    }

    /// `tau^{-1}`: the inverse spatial map together with the family
    /// `x -> tau_{tau_* x}^{-1}`.
    pub fn inverse(&self) -> Result<TauTransform> {
        let spatial = self.spatial.inverse();
        let spin = match &self.spin {
            SpinAction::Global(p) => SpinAction::Global(p.inverse()),
            SpinAction::Periodic { px, py, .. } => {
                let mut maps = Vec::with_capacity(px * py);
                for y in 0..*py {
                    for x in 0..*px {
                        let s = Site::plane(x as i64, y as i64);
                        maps.push(self.spin_perm_at(self.apply_site(s)).inverse());
                    }
                }
                SpinAction::Periodic {
                    px: *px,
                    py: *py,
                    maps,
                }
            }
        };
        TauTransform::new(spatial, spin)
    }

    /// Apply the transform to a configuration, producing a canonical
    /// tail-plus-overrides result: the tail moves analytically, overrides
    /// are re-evaluated on the finitely many affected sites.
    pub fn apply_config(&self, sigma: &Configuration) -> Result<Configuration> {
        let tail = sigma.tail();
        if tail.factors().is_some() {
            return if self.is_identity() {
                Ok(sigma.clone())
            } else {
                Err(Error::IncompatibleTransform(
                    "non-identity transforms do not act on product configurations".into(),
                ))
            };
        }
        let (tpx, tpy) = tail.period().expect("plain tails are periodic");
        let (spx, spy) = match &self.spin {
            SpinAction::Global(_) => (1, 1),
            SpinAction::Periodic { px, py, .. } => (*px, *py),
        };
        let (npx, npy) = (lcm(tpx, spx), lcm(tpy, spy));
        let mut table = Vec::with_capacity(npx * npy);
        for y in 0..npy as i64 {
            for x in 0..npx as i64 {
                let s = Site::plane(x, y);
                // Finitely supported permutations only disturb finitely many
                // sites, so the tail transforms as under the identity.
                let pre = match &self.spatial {
                    SpatialMap::Identity | SpatialMap::Permutation(_) => s,
                    SpatialMap::Translation(tx, ty) => Site::plane(s.x - tx, s.y - ty),
                    SpatialMap::Reflection => Site::plane(-s.x, -s.y),
                };
                table.push(self.spin_perm_at(s).apply(tail.value(pre)));
            }
        }
        let new_tail = TailPattern::grid(format!("tau({})", tail.id()), npx, npy, table)?;

        let mut candidates: BTreeSet<Site> = sigma
            .overrides()
            .keys()
            .map(|&k| self.apply_site(k))
            .collect();
        if let SpatialMap::Permutation(map) = &self.spatial {
            candidates.extend(map.keys().copied());
        }
        let inv_spatial = self.spatial.inverse();
        let raw: Vec<(Site, Spin)> = candidates
            .into_iter()
            .map(|x| {
                let v = self.spin_perm_at(x).apply(sigma.value(inv_spatial.apply(x)));
                (x, v)
            })
            .collect();
        Ok(Configuration::canonical(new_tail, raw))
    }
}

// ---------------------------------------------------------------------------
// model-level checks
// ---------------------------------------------------------------------------

/// Maximum coefficient deviation over a list of sampled parent pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DevReport {
    pub samples: usize,
    pub comparisons: usize,
    pub max_dev: f64,
}

/// Compare genetic coefficients of two models sharing lattice, spins and
/// clusters. For equivalent potentials the deviation vanishes; for
/// inequivalent ones it is the caller's evidence against equivalence.
pub fn check_potential_equivalence(
    a: &Model,
    b: &Model,
    samples: &[(Configuration, Configuration)],
) -> Result<DevReport> {
    if a.spins() != b.spins() {
        return Err(Error::SpinMismatch("models must share the spin set".into()));
    }
    if a.lattice() != b.lattice() || a.clusters() != b.clusters() {
        return Err(Error::InvalidModel(
            "potential comparison needs equal lattices and clusters".into(),
        ));
    }
    let mut max_dev: f64 = 0.0;
    let mut comparisons = 0;
    for (zeta, eta) in samples {
        let cva = a.coefficient_vector(zeta, eta)?;
        let cvb = b.coefficient_vector(zeta, eta)?;
        for (omega, c) in cva.iter() {
            max_dev = max_dev.max((c - cvb.get(omega)).abs());
            comparisons += 1;
        }
    }
    Ok(DevReport {
        samples: samples.len(),
        comparisons,
        max_dev,
    })
}

/// Compare `c_{zeta eta, omega}` in `a` against
/// `c'_{tau zeta tau eta, tau omega}` in `b`. The clusters of `b` must be
/// the tau-image of `a`'s for the offspring sets to correspond; a structural
/// mismatch surfaces as `IncompatibleTransform`.
pub fn check_tau_isomorphism(
    a: &Model,
    b: &Model,
    tau: &TauTransform,
    samples: &[(Configuration, Configuration)],
) -> Result<DevReport> {
    tau.validate(a.lattice(), a.spins())?;
    if a.spins() != b.spins() {
        return Err(Error::SpinMismatch("models must share the spin set".into()));
    }
    let mut max_dev: f64 = 0.0;
    let mut comparisons = 0;
    for (zeta, eta) in samples {
        let tz = tau.apply_config(zeta)?;
        let te = tau.apply_config(eta)?;
        let cva = a.coefficient_vector(zeta, eta)?;
        let cvb = b.coefficient_vector(&tz, &te)?;
        if cva.len() != cvb.len() {
            return Err(Error::IncompatibleTransform(format!(
                "offspring sets have sizes {} and {}: clusters of the image model \
                 are not the tau-image of the source clusters",
                cva.len(),
                cvb.len()
            )));
        }
        for (omega, c) in cva.iter() {
            let image = tau.apply_config(omega)?;
            if cvb.get(&image) == 0.0 && !cvb.contains(&image) {
                return Err(Error::IncompatibleTransform(
                    "tau image of an offspring is not an offspring of the image pair".into(),
                ));
            }
            max_dev = max_dev.max((c - cvb.get(&image)).abs());
            comparisons += 1;
        }
        let ema = a.evo_coefficient_matrix(zeta, eta)?;
        let emb = b.evo_coefficient_matrix(&tz, &te)?;
        for ((omega, varpi), c) in ema.iter() {
            let io = tau.apply_config(omega)?;
            let ip = tau.apply_config(varpi)?;
            max_dev = max_dev.max((c - emb.get(&io, &ip)).abs());
            comparisons += 1;
        }
    }
    Ok(DevReport {
        samples: samples.len(),
        comparisons,
        max_dev,
    })
}

/// Outcome of the window probe: the spread of `H^A - H^B` over all interior
/// assignments of a small window, with a witness pair when non-constant.
/// A non-zero spread certifies the potentials are *not* equivalent; a zero
/// spread on probed windows is merely consistent with equivalence.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub window: Region,
    pub spread: f64,
    /// Two interior assignments realising the extreme Hamiltonian
    /// differences, present when the spread exceeds the caller's tolerance.
    pub witness: Option<(Configuration, Configuration)>,
}

/// Probe `H_Lambda^{Phi - Psi}` for dependence on the interior of `lam` by
/// exhausting all spin assignments inside, with `anchor` fixed outside.
pub fn equivalence_probe(
    a: &Model,
    b: &Model,
    lam: &Region,
    anchor: &Configuration,
    tol: f64,
) -> Result<ProbeReport> {
    let q = a.spins().q() as usize;
    let n = lam.len();
    let states = q.checked_pow(n as u32).filter(|&s| s <= 4096).ok_or_else(|| {
        Error::TooLarge(format!("probe window of {n} sites is too big to exhaust"))
    })?;
    let sites: Vec<Site> = lam.iter().collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut lo_cfg = anchor.clone();
    let mut hi_cfg = anchor.clone();
    for idx in 0..states {
        let mut cfg = anchor.clone();
        let mut rest = idx;
        for &s in sites.iter().rev() {
            cfg = cfg.set(s, Spin((rest % q) as u8));
            rest /= q;
        }
        let d = a.hamiltonian(lam, &cfg)? - b.hamiltonian(lam, &cfg)?;
        if d < lo {
            lo = d;
            lo_cfg = cfg.clone();
        }
        if d > hi {
            hi = d;
            hi_cfg = cfg;
        }
    }
    let spread = hi - lo;
    Ok(ProbeReport {
        window: lam.clone(),
        spread,
        witness: (spread > tol).then_some((lo_cfg, hi_cfg)),
    })
}

/// Assemble the product of 1..=4 models over a common spin set: tagged
/// disjoint-union lattice, direct-sum potential, factor-wise clusters.
pub fn build_product_model(factors: &[Model]) -> Result<Model> {
    if factors.is_empty() || factors.len() > 4 {
        return Err(Error::InvalidModel(format!(
            "product models take 1..=4 factors, got {}",
            factors.len()
        )));
    }
    let spins = factors[0].spins().clone();
    for f in factors {
        if f.spins() != &spins {
            return Err(Error::SpinMismatch(
                "product factors must share one spin set".into(),
            ));
        }
        if matches!(f.lattice(), Lattice::Product(_)) {
            return Err(Error::InvalidModel("nested product models".into()));
        }
    }
    let lattice = Lattice::Product(factors.iter().map(|f| f.lattice().clone()).collect());
    let potential = Potential::direct_sum(factors.iter().map(|f| f.potential().clone()).collect())?;
    let clusters =
        crate::clusters::ClusterPartition::product(factors.iter().map(|f| f.clusters().clone()).collect());
    Model::new(lattice, spins, potential, clusters)
}

/// Deviations between product-model coefficients and the products of factor
/// coefficients, for both the genetic vectors and the evolution matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorReport {
    pub samples: usize,
    pub genetic_comparisons: usize,
    pub evolution_comparisons: usize,
    pub max_genetic_dev: f64,
    pub max_evolution_dev: f64,
}

/// Verify `c_{sigma eta, omega} = prod_i c^i` on the sampled product-level
/// pairs, and likewise for the evolution coefficients.
pub fn check_tensor_factorization(
    product: &Model,
    factors: &[Model],
    samples: &[(Configuration, Configuration)],
) -> Result<TensorReport> {
    let mut rep = TensorReport {
        samples: samples.len(),
        genetic_comparisons: 0,
        evolution_comparisons: 0,
        max_genetic_dev: 0.0,
        max_evolution_dev: 0.0,
    };
    for (sigma, eta) in samples {
        let cv = product.coefficient_vector(sigma, eta)?;
        let factor_cvs: Vec<_> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.coefficient_vector(&sigma.project(i as u8)?, &eta.project(i as u8)?)
            })
            .collect::<Result<_>>()?;
        for (omega, c) in cv.iter() {
            let mut prod = 1.0;
            for (i, fcv) in factor_cvs.iter().enumerate() {
                prod *= fcv.get(&omega.project(i as u8)?);
            }
            rep.max_genetic_dev = rep.max_genetic_dev.max((c - prod).abs());
            rep.genetic_comparisons += 1;
        }

        let em = product.evo_coefficient_matrix(sigma, eta)?;
        let factor_ems: Vec<_> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.evo_coefficient_matrix(&sigma.project(i as u8)?, &eta.project(i as u8)?)
            })
            .collect::<Result<_>>()?;
        for ((omega, pi), c) in em.iter() {
            let mut prod = 1.0;
            for (i, fem) in factor_ems.iter().enumerate() {
                prod *= fem.get(&omega.project(i as u8)?, &pi.project(i as u8)?);
            }
            rep.max_evolution_dev = rep.max_evolution_dev.max((c - prod).abs());
            rep.evolution_comparisons += 1;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn plus() -> Arc<TailPattern> {
        TailPattern::constant("plus", Spin(1))
    }

    #[test]
    fn translation_moves_overrides() {
        let tau = TauTransform::translation(1, 0, 2);
        let sigma = Configuration::tail_only(plus()).set(Site::line(0), Spin(0));
        let moved = tau.apply_config(&sigma).unwrap();
        assert_eq!(moved.value(Site::line(1)), Spin(0));
        assert_eq!(moved.value(Site::line(0)), Spin(1));
        assert_eq!(moved.overrides().len(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let cases = vec![
            TauTransform::translation(3, 0, 2),
            TauTransform::spin_map(SpinPerm::flip()),
            TauTransform::new(SpatialMap::Reflection, SpinAction::Global(SpinPerm::flip()))
                .unwrap(),
            TauTransform::new(
                SpatialMap::Translation(1, 0),
                SpinAction::Periodic {
                    px: 2,
                    py: 1,
                    maps: vec![SpinPerm::identity(2), SpinPerm::flip()],
                },
            )
            .unwrap(),
        ];
        let sigma = Configuration::tail_only(plus())
            .set(Site::line(0), Spin(0))
            .set(Site::line(3), Spin(0));
        for tau in cases {
            let inv = tau.inverse().unwrap();
            let there = tau.apply_config(&sigma).unwrap();
            let back = inv.apply_config(&there).unwrap();
            assert_eq!(back.overrides(), sigma.overrides(), "tau = {tau:?}");
            for x in -6..6 {
                assert_eq!(back.value(Site::line(x)), sigma.value(Site::line(x)));
            }
        }
    }

    #[test]
    fn spin_flip_flips_the_tail() {
        let tau = TauTransform::spin_map(SpinPerm::flip());
        let sigma = Configuration::tail_only(plus()).set(Site::line(2), Spin(0));
        let flipped = tau.apply_config(&sigma).unwrap();
        assert_eq!(flipped.value(Site::line(0)), Spin(0));
        assert_eq!(flipped.value(Site::line(2)), Spin(1));
        // Canonical form over the flipped tail still has one override.
        assert_eq!(flipped.overrides().len(), 1);
    }

    #[test]
    fn periodic_spin_family_acts_sitewise() {
        // Flip only odd sites.
        let tau = TauTransform::new(
            SpatialMap::Identity,
            SpinAction::Periodic {
                px: 2,
                py: 1,
                maps: vec![SpinPerm::identity(2), SpinPerm::flip()],
            },
        )
        .unwrap();
        let sigma = Configuration::tail_only(plus());
        let out = tau.apply_config(&sigma).unwrap();
        assert_eq!(out.value(Site::line(0)), Spin(1));
        assert_eq!(out.value(Site::line(1)), Spin(0));
        assert_eq!(out.value(Site::line(-1)), Spin(0));
    }

    #[test]
    fn finite_permutation_swaps_two_sites() {
        let map = [(Site::line(0), Site::line(5)), (Site::line(5), Site::line(0))];
        let tau = TauTransform::new(
            SpatialMap::Permutation(map.into_iter().collect()),
            SpinAction::Global(SpinPerm::identity(2)),
        )
        .unwrap();
        let sigma = Configuration::tail_only(plus()).set(Site::line(0), Spin(0));
        let out = tau.apply_config(&sigma).unwrap();
        assert_eq!(out.value(Site::line(5)), Spin(0));
        assert_eq!(out.value(Site::line(0)), Spin(1));
    }

    #[test]
    fn discrepancy_moves_with_tau() {
        use crate::config::{discrepancy, Discrepancy};
        let tau = TauTransform::new(
            SpatialMap::Reflection,
            SpinAction::Global(SpinPerm::identity(2)),
        )
        .unwrap();
        let a = Configuration::tail_only(plus()).set(Site::line(2), Spin(0));
        let b = Configuration::tail_only(plus()).set(Site::line(-3), Spin(0));
        let (ta, tb) = (tau.apply_config(&a).unwrap(), tau.apply_config(&b).unwrap());
        let before = match discrepancy(&a, &b) {
            Discrepancy::Finite(r) => r,
            _ => panic!(),
        };
        let after = match discrepancy(&ta, &tb) {
            Discrepancy::Finite(r) => r,
            _ => panic!(),
        };
        assert_eq!(after, tau.apply_region(&before));
    }

    #[test]
    fn invalid_transforms_are_rejected() {
        // Translation off the half line.
        assert!(TauTransform::translation(1, 0, 2)
            .validate(&Lattice::HalfLine, &SpinSet::labels(2).unwrap())
            .is_err());
        // Permutation with mismatched key/value sets.
        let bad = SpatialMap::Permutation(
            [(Site::line(0), Site::line(1))].into_iter().collect(),
        );
        assert!(TauTransform::new(bad, SpinAction::Global(SpinPerm::identity(2)))
            .unwrap()
            .validate(&Lattice::Line, &SpinSet::labels(2).unwrap())
            .is_err());
        // Periodic family over a site permutation is unrepresentable.
        let swap = SpatialMap::Permutation(
            [(Site::line(0), Site::line(1)), (Site::line(1), Site::line(0))]
                .into_iter()
                .collect(),
        );
        assert!(TauTransform::new(
            swap,
            SpinAction::Periodic {
                px: 2,
                py: 1,
                maps: vec![SpinPerm::identity(2), SpinPerm::flip()],
            },
        )
        .is_err());
        // Wrong q.
        assert!(TauTransform::spin_map(SpinPerm::identity(3))
            .validate(&Lattice::Line, &SpinSet::labels(2).unwrap())
            .is_err());
    }
}
