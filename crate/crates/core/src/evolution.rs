//! The evolution algebra on ordered configuration pairs.
//!
//! Basis elements are ordered pairs `e_{sigma eta}`; distinct basis pairs
//! multiply to zero and a diagonal square spreads over offspring pairs,
//! `e_{sigma eta}^2 = sum 𝗰_{sigma eta, zeta xi} e_{zeta xi}` with
//! `𝗰_{sigma eta, zeta xi} = c_{sigma eta, zeta} c_{sigma eta, xi}`.
//! The Markov part (pairs with finite discrepancy) splits into ideals, one
//! per fertile class, which are pairwise isomorphic under finite-range
//! potentials; this module carries the witness map and its checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::config::{discrepancy, Configuration, Discrepancy};
use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::model::Model;

/// Support bound accepted by [`Model::is_idempotent`] by default.
pub const IDEMPOTENT_SUPPORT_BOUND: usize = 6;

/// Per-coefficient tolerance for idempotency.
pub const IDEMPOTENT_TOL: f64 = 1e-12;

/// A finite linear combination of ordered-pair basis elements. Exact zeros
/// are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairElement {
    terms: BTreeMap<(Configuration, Configuration), f64>,
}

impl PairElement {
    pub fn zero() -> Self {
        PairElement::default()
    }

    /// The basis element `e_{sigma eta}`.
    pub fn basis(sigma: Configuration, eta: Configuration) -> Self {
        PairElement {
            terms: [((sigma, eta), 1.0)].into_iter().collect(),
        }
    }

    pub fn from_terms(
        raw: impl IntoIterator<Item = ((Configuration, Configuration), f64)>,
    ) -> Self {
        let mut terms: BTreeMap<(Configuration, Configuration), f64> = BTreeMap::new();
        for (pair, a) in raw {
            *terms.entry(pair).or_insert(0.0) += a;
        }
        terms.retain(|_, a| *a != 0.0);
        PairElement { terms }
    }

    pub fn coeff(&self, sigma: &Configuration, eta: &Configuration) -> f64 {
        self.terms
            .get(&(sigma.clone(), eta.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Configuration, Configuration), f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn add(&self, other: &PairElement) -> PairElement {
        PairElement::from_terms(
            self.iter()
                .map(|(p, a)| (p.clone(), a))
                .chain(other.iter().map(|(p, a)| (p.clone(), a))),
        )
    }

    pub fn sub(&self, other: &PairElement) -> PairElement {
        PairElement::from_terms(
            self.iter()
                .map(|(p, a)| (p.clone(), a))
                .chain(other.iter().map(|(p, a)| (p.clone(), -a))),
        )
    }

    pub fn scale(&self, factor: f64) -> PairElement {
        PairElement::from_terms(self.iter().map(|(p, a)| (p.clone(), a * factor)))
    }

    pub fn norm_inf(&self) -> f64 {
        self.terms.values().fold(0.0, |m, a| m.max(a.abs()))
    }
}

impl fmt::Display for PairElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((s, e), a)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}·[{s}|{e}]")?;
        }
        Ok(())
    }
}

/// Normalised weights of offspring pairs for one diagonal square:
/// `entries[(zeta, xi)] = c_{sigma eta, zeta} · c_{sigma eta, xi}`,
/// computed jointly in log space. Empty for macroscopic pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EvoCoefficientMatrix {
    pair: (Configuration, Configuration),
    entries: BTreeMap<(Configuration, Configuration), f64>,
}

impl EvoCoefficientMatrix {
    pub fn pair(&self) -> (&Configuration, &Configuration) {
        (&self.pair.0, &self.pair.1)
    }

    pub fn get(&self, zeta: &Configuration, xi: &Configuration) -> f64 {
        self.entries
            .get(&(zeta.clone(), xi.clone()))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn contains(&self, zeta: &Configuration, xi: &Configuration) -> bool {
        self.entries.contains_key(&(zeta.clone(), xi.clone()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Configuration, Configuration), f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// Outcome of checking the fertile-ideal isomorphism on sampled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealIsoReport {
    pub samples: usize,
    pub comparisons: usize,
    /// Max deviation between matched offspring-pair coefficients.
    pub max_dev: f64,
    /// Discrepancy sets survive the map unchanged.
    pub discrepancy_preserved: bool,
    /// Mapping forth and back reproduces every sample exactly.
    pub round_trip_exact: bool,
    /// Distinct samples map to distinct images.
    pub injective: bool,
}

/// `base` with `donor`'s values transplanted onto `region`.
fn transplant(base: &Configuration, donor: &Configuration, region: &Region) -> Configuration {
    region
        .iter()
        .fold(base.clone(), |acc, s| acc.set(s, donor.value(s)))
}

impl Model {
    /// The coefficients of a diagonal square in the pair basis: the outer
    /// product of the genetic coefficients with themselves, evaluated
    /// jointly as `exp(l_zeta + l_xi − 2·LSE)`.
    pub fn evo_coefficient_matrix(
        &self,
        sigma: &Configuration,
        eta: &Configuration,
    ) -> Result<EvoCoefficientMatrix> {
        let pair = (sigma.clone(), eta.clone());
        let w = match self.offspring_weights(sigma, eta)? {
            None => {
                return Ok(EvoCoefficientMatrix {
                    pair,
                    entries: BTreeMap::new(),
                })
            }
            Some(w) => w,
        };
        let mut entries = BTreeMap::new();
        for (zeta, lz) in w.configs.iter().zip(&w.logh) {
            for (xi, lx) in w.configs.iter().zip(&w.logh) {
                entries.insert((zeta.clone(), xi.clone()), (lz + lx - 2.0 * w.lse).exp());
            }
        }
        Ok(EvoCoefficientMatrix { pair, entries })
    }

    /// Bilinear product on the pair basis: distinct basis pairs annihilate,
    /// equal pairs square through the coefficient matrix.
    pub fn evo_product(&self, u: &PairElement, v: &PairElement) -> Result<PairElement> {
        let mut acc: BTreeMap<(Configuration, Configuration), f64> = BTreeMap::new();
        for (pu, au) in u.iter() {
            let av = match v.terms.get(pu) {
                Some(&av) => av,
                None => continue,
            };
            let w = au * av;
            if w == 0.0 {
                continue;
            }
            let em = self.evo_coefficient_matrix(&pu.0, &pu.1)?;
            for (pair, c) in em.iter() {
                *acc.entry(pair.clone()).or_insert(0.0) += w * c;
            }
        }
        Ok(PairElement::from_terms(acc))
    }

    /// Whether `u` squares to itself, coefficient-wise within
    /// [`IDEMPOTENT_TOL`]. Rejects supports larger than `support_bound`
    /// (the square grows quadratically in the offspring counts).
    pub fn is_idempotent(&self, u: &PairElement, support_bound: usize) -> Result<bool> {
        if u.len() > support_bound {
            return Err(Error::SupportTooLarge(format!(
                "support {} exceeds the bound {support_bound}",
                u.len()
            )));
        }
        let sq = self.evo_product(u, u)?;
        let keys: BTreeSet<_> = sq.terms.keys().chain(u.terms.keys()).cloned().collect();
        Ok(keys.into_iter().all(|k| {
            (sq.terms.get(&k).copied().unwrap_or(0.0) - u.terms.get(&k).copied().unwrap_or(0.0))
                .abs()
                <= IDEMPOTENT_TOL
        }))
    }

    /// The witness map between two fertile ideals: carries a pair from the
    /// class of `sigma_ref` into the class of `eta_ref` by keeping both
    /// configurations on the interaction closure of their mutual
    /// discrepancy, rewriting the remaining deviation-from-`sigma_ref`
    /// sites (keep the value where it already differs from `eta_ref`,
    /// otherwise take `sigma_ref`'s), and following `eta_ref` elsewhere.
    /// Applying the map with the references swapped inverts it.
    pub fn fertile_ideal_iso_map(
        &self,
        sigma_ref: &Configuration,
        eta_ref: &Configuration,
        zeta: &Configuration,
        xi: &Configuration,
    ) -> Result<(Configuration, Configuration)> {
        if !self.potential().is_finite_range() {
            return Err(Error::InfiniteRange(
                "the ideal map needs a finite-range potential".into(),
            ));
        }
        for c in [sigma_ref, eta_ref, zeta, xi] {
            self.validate_config(c)?;
        }
        let d_sz = match discrepancy(sigma_ref, zeta) {
            Discrepancy::Finite(d) => d,
            Discrepancy::Macroscopic => {
                return Err(Error::NotFertile(format!(
                    "{zeta} is not in the fertile class of {sigma_ref}"
                )))
            }
        };
        if discrepancy(sigma_ref, xi) == Discrepancy::Macroscopic {
            return Err(Error::NotFertile(format!(
                "{xi} is not in the fertile class of {sigma_ref}"
            )));
        }
        let d_zx = discrepancy(zeta, xi)
            .region()
            .expect("both in one class")
            .clone();
        let core = self.closure(&d_zx)?;
        let fringe = d_sz.difference(&core);

        let map_one = |omega: &Configuration| -> Configuration {
            let mut out = eta_ref.clone();
            for s in core.iter() {
                out = out.set(s, omega.value(s));
            }
            for s in fringe.iter() {
                let v = omega.value(s);
                out = out.set(
                    s,
                    if v != eta_ref.value(s) {
                        v
                    } else {
                        sigma_ref.value(s)
                    },
                );
            }
            out
        };
        Ok((map_one(zeta), map_one(xi)))
    }

    /// Verify, on sampled pairs from `sigma_ref`'s class, that the ideal
    /// map preserves the square coefficients: each offspring pair is
    /// matched with the image-side offspring pair carrying the same values
    /// on the (shared) discrepancy, and the two coefficients are compared.
    /// Also checks discrepancy preservation, exact round trips and
    /// injectivity on the sample set.
    pub fn check_iso_coefficients(
        &self,
        sigma_ref: &Configuration,
        eta_ref: &Configuration,
        samples: &[(Configuration, Configuration)],
    ) -> Result<IdealIsoReport> {
        if !self.potential().is_finite_range() {
            return Err(Error::InfiniteRange(
                "the ideal-isomorphism check needs a finite-range potential".into(),
            ));
        }
        let mut comparisons = 0;
        let mut max_dev: f64 = 0.0;
        let mut discrepancy_preserved = true;
        let mut round_trip_exact = true;
        let mut images = BTreeSet::new();
        for (zeta, xi) in samples {
            let (z2, x2) = self.fertile_ideal_iso_map(sigma_ref, eta_ref, zeta, xi)?;
            let d = discrepancy(zeta, xi);
            if d != discrepancy(&z2, &x2) {
                discrepancy_preserved = false;
            }
            let back = self.fertile_ideal_iso_map(eta_ref, sigma_ref, &z2, &x2)?;
            if &back.0 != zeta || &back.1 != xi {
                round_trip_exact = false;
            }
            images.insert((z2.clone(), x2.clone()));

            let region = d.region().expect("samples are fertile").clone();
            let em = self.evo_coefficient_matrix(zeta, xi)?;
            let em2 = self.evo_coefficient_matrix(&z2, &x2)?;
            if em.len() != em2.len() {
                return Err(Error::IncompatibleTransform(format!(
                    "offspring counts differ: {} vs {}",
                    em.len(),
                    em2.len()
                )));
            }
            for ((omega, varpi), c) in em.iter() {
                let o2 = transplant(&z2, omega, &region);
                let p2 = transplant(&z2, varpi, &region);
                if !em2.contains(&o2, &p2) {
                    return Err(Error::IncompatibleTransform(
                        "an offspring image is not an offspring of the image pair".into(),
                    ));
                }
                max_dev = max_dev.max((c - em2.get(&o2, &p2)).abs());
                comparisons += 1;
            }
        }
        let distinct: BTreeSet<_> = samples.iter().collect();
        Ok(IdealIsoReport {
            samples: samples.len(),
            comparisons,
            max_dev,
            discrepancy_preserved,
            round_trip_exact,
            injective: images.len() == distinct.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusters::ClusterPartition;
    use crate::config::{Spin, TailPattern};
    use crate::lattice::{Lattice, Site};
    use crate::potential::Potential;
    use crate::SpinSet;
    use std::sync::Arc;

    fn plus() -> Arc<TailPattern> {
        TailPattern::constant("plus", Spin(1))
    }

    fn minus() -> Arc<TailPattern> {
        TailPattern::constant("minus", Spin(0))
    }

    fn flips(sites: &[i64]) -> Configuration {
        let mut c = Configuration::tail_only(plus());
        for &x in sites {
            c = c.set(Site::line(x), Spin(0));
        }
        c
    }

    fn raises(sites: &[i64]) -> Configuration {
        let mut c = Configuration::tail_only(minus());
        for &x in sites {
            c = c.set(Site::line(x), Spin(1));
        }
        c
    }

    #[test]
    fn diagonal_identity_pair() {
        let m = Model::ising_line(1.0);
        let s = flips(&[0]);
        let em = m.evo_coefficient_matrix(&s, &s).unwrap();
        assert_eq!(em.len(), 1);
        assert_eq!(em.get(&s, &s), 1.0);
    }

    #[test]
    fn zero_potential_square_is_uniform() {
        let m = Model::new(
            Lattice::Line,
            SpinSet::ising(),
            Potential::Zero,
            ClusterPartition::unique(),
        )
        .unwrap();
        let (s, e) = (flips(&[0]), flips(&[]));
        let em = m.evo_coefficient_matrix(&s, &e).unwrap();
        assert_eq!(em.len(), 4);
        for (_, c) in em.iter() {
            assert!((c - 0.25).abs() < 1e-15);
        }
        assert!((em.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entries_factor_through_genetic_coefficients() {
        let m = Model::ising_line(1.0);
        let (s, e) = (flips(&[0]), flips(&[]));
        let em = m.evo_coefficient_matrix(&s, &e).unwrap();
        let cv = m.coefficient_vector(&s, &e).unwrap();
        for ((zeta, xi), c) in em.iter() {
            assert!(
                (c - cv.get(zeta) * cv.get(xi)).abs() <= 1e-14,
                "entry ({zeta},{xi})"
            );
        }
        // The largest entry squares the single-flip share 1/(1+e^{-4}).
        let share = 1.0 / (1.0 + (-4.0f64).exp());
        let top = em.get(&e, &e);
        assert!((top - share * share).abs() < 1e-14);
        assert!((top - 0.9643510).abs() < 1e-7);
    }

    #[test]
    fn squares_ignore_pair_order() {
        let m = Model::ising_line(0.7);
        let (s, e) = (flips(&[-1, 2]), flips(&[]));
        let a = m.evo_coefficient_matrix(&s, &e).unwrap();
        let b = m.evo_coefficient_matrix(&e, &s).unwrap();
        assert_eq!(a.len(), b.len());
        for (pair, c) in a.iter() {
            assert_eq!(c, b.get(&pair.0, &pair.1));
        }
    }

    #[test]
    fn distinct_basis_pairs_annihilate() {
        let m = Model::ising_line(1.0);
        let u = PairElement::basis(flips(&[0]), flips(&[]));
        let v = PairElement::basis(flips(&[1]), flips(&[]));
        assert!(m.evo_product(&u, &v).unwrap().is_zero());

        let diag = PairElement::basis(flips(&[0]), flips(&[0]));
        let sq = m.evo_product(&diag, &diag).unwrap();
        assert_eq!(sq, diag);
    }

    #[test]
    fn macroscopic_squares_vanish() {
        let m = Model::ising_line(1.0);
        let u = PairElement::basis(flips(&[]), raises(&[]));
        assert!(m.evo_product(&u, &u).unwrap().is_zero());
    }

    #[test]
    fn idempotents_are_diagonal_unit_sums() {
        let m = Model::ising_line(1.0);
        let d0 = PairElement::basis(flips(&[0]), flips(&[0]));
        let d1 = PairElement::basis(flips(&[1]), flips(&[1]));
        assert!(m.is_idempotent(&d0.add(&d1), IDEMPOTENT_SUPPORT_BOUND).unwrap());
        assert!(!m.is_idempotent(&d0.scale(0.5), IDEMPOTENT_SUPPORT_BOUND).unwrap());
        let off = PairElement::basis(flips(&[0]), flips(&[]));
        assert!(!m.is_idempotent(&off, IDEMPOTENT_SUPPORT_BOUND).unwrap());

        let mut big = PairElement::zero();
        for x in 0..7 {
            big = big.add(&PairElement::basis(flips(&[x]), flips(&[x])));
        }
        assert!(matches!(
            m.is_idempotent(&big, IDEMPOTENT_SUPPORT_BOUND),
            Err(Error::SupportTooLarge(_))
        ));
    }

    #[test]
    fn iso_map_traces_the_three_regions() {
        // References all-plus and all-minus; the diagonal single-flip pair
        // maps to all-minus with the origin raised.
        let m = Model::ising_line(1.0);
        let (sigma, eta) = (flips(&[]), raises(&[]));
        let z = flips(&[0]);
        let (z2, x2) = m.fertile_ideal_iso_map(&sigma, &eta, &z, &z).unwrap();
        assert_eq!(z2, raises(&[0]));
        assert_eq!(x2, z2);
    }

    #[test]
    fn iso_map_round_trip_is_exact() {
        let m = Model::ising_line(1.0);
        let (sigma, eta) = (flips(&[]), raises(&[]));
        let pairs = [
            (flips(&[0]), flips(&[])),
            (flips(&[0, 5]), flips(&[5])),
            (flips(&[-2, 1, 3]), flips(&[1])),
        ];
        for (z, x) in pairs {
            let (z2, x2) = m.fertile_ideal_iso_map(&sigma, &eta, &z, &x).unwrap();
            let (zb, xb) = m.fertile_ideal_iso_map(&eta, &sigma, &z2, &x2).unwrap();
            assert_eq!(zb, z);
            assert_eq!(xb, x);
        }
    }

    #[test]
    fn iso_preserves_coefficients_exactly() {
        let m = Model::ising_line(1.0);
        let (sigma, eta) = (flips(&[]), raises(&[]));
        let samples = vec![
            (flips(&[0]), flips(&[])),
            (flips(&[0, 5]), flips(&[5])),
            (flips(&[-1, 0, 2]), flips(&[0])),
        ];
        let rep = m.check_iso_coefficients(&sigma, &eta, &samples).unwrap();
        assert!(rep.discrepancy_preserved);
        assert!(rep.round_trip_exact);
        assert!(rep.injective);
        assert!(rep.max_dev <= 1e-12, "max dev {}", rep.max_dev);
    }

    #[test]
    fn infinite_range_is_rejected() {
        let m = Model::star();
        let zero = Configuration::tail_only(minus());
        let err = m.check_iso_coefficients(&zero, &zero, &[]);
        assert!(matches!(err, Err(Error::InfiniteRange(_))));
    }
}
