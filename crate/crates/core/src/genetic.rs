//! The genetic algebra: structural coefficients, bilinear products,
//! fertile classes, multiplicative functionals, the principal-ideal
//! recursion and the finite-subalgebra embedding.
//!
//! Basis elements are indexed by configurations. The product of two basis
//! elements spreads over the offspring of the pair with Boltzmann-normalised
//! weights,
//! `e_zeta · e_eta = sum_{omega} c_{zeta eta, omega} e_omega`, where
//! `c_{zeta eta, omega} = h_D(omega) / sum_{xi} h_D(xi)` over the offspring
//! set, `D` the discrepancy and `h = exp(-H)`. All normalisations run in
//! log space; weights are materialised only as ratios.

use std::collections::BTreeMap;
use std::fmt;

use crate::config::{discrepancy, Configuration, Discrepancy, Spin};
use crate::error::{Error, Result};
use crate::lattice::Region;
use crate::model::Model;
use crate::numeric::log_sum_exp;
use crate::oracle::FiniteModel;

/// Identifies the fertile class of a configuration: all configurations with
/// the same tail (as a function) share one id and pairwise finite
/// discrepancy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FertileClassId(String);

impl FertileClassId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FertileClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The normalised offspring weights of one pair: `entries[omega]` is the
/// share of `e_omega` in `e_zeta · e_eta`. Empty exactly when the pair has
/// macroscopic discrepancy (no offspring).
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pair: (Configuration, Configuration),
    entries: BTreeMap<Configuration, f64>,
}

impl CoefficientVector {
    pub fn pair(&self) -> (&Configuration, &Configuration) {
        (&self.pair.0, &self.pair.1)
    }

    /// Coefficient of `omega`, zero when `omega` is not an offspring.
    pub fn get(&self, omega: &Configuration) -> f64 {
        self.entries.get(omega).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, omega: &Configuration) -> bool {
        self.entries.contains_key(omega)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Sum of all coefficients; 1 for fertile pairs (Markov property).
    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }
}

/// A finite linear combination of basis configurations. Exact zeros are
/// never stored, so `is_zero` is structural.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Configuration, f64>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    /// The basis element `e_sigma`.
    pub fn basis(sigma: Configuration) -> Self {
        AlgebraElement {
            terms: [(sigma, 1.0)].into_iter().collect(),
        }
    }

    /// Accumulate raw terms, dropping exact zeros.
    pub fn from_terms(raw: impl IntoIterator<Item = (Configuration, f64)>) -> Self {
        let mut terms: BTreeMap<Configuration, f64> = BTreeMap::new();
        for (sigma, a) in raw {
            *terms.entry(sigma).or_insert(0.0) += a;
        }
        terms.retain(|_, a| *a != 0.0);
        AlgebraElement { terms }
    }

    pub fn coeff(&self, sigma: &Configuration) -> f64 {
        self.terms.get(sigma).copied().unwrap_or(0.0)
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

    pub fn iter(&self) -> impl Iterator<Item = (&Configuration, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn support(&self) -> impl Iterator<Item = &Configuration> {
        self.terms.keys()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_terms(
            self.iter()
                .map(|(s, a)| (s.clone(), a))
                .chain(other.iter().map(|(s, a)| (s.clone(), a))),
        )
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_terms(
            self.iter()
                .map(|(s, a)| (s.clone(), a))
                .chain(other.iter().map(|(s, a)| (s.clone(), -a))),
        )
    }

    pub fn scale(&self, factor: f64) -> AlgebraElement {
        AlgebraElement::from_terms(self.iter().map(|(s, a)| (s.clone(), a * factor)))
    }

    /// `l1` norm of the coefficient vector.
    pub fn norm_one(&self) -> f64 {
        self.terms.values().fold(0.0, |s, a| s + a.abs())
    }

    /// Largest absolute coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.terms.values().fold(0.0, |m, a| m.max(a.abs()))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (sigma, a)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}·[{sigma}]")?;
        }
        Ok(())
    }
}

/// Shared normalisation data for one pair: the canonically sorted
/// offspring, their log-Boltzmann weights over the discrepancy and the log
/// normaliser. Symmetric in the pair by construction, which makes the
/// algebra product commutative to the bit.
pub(crate) struct OffspringWeights {
    pub(crate) configs: Vec<Configuration>,
    pub(crate) logh: Vec<f64>,
    pub(crate) lse: f64,
}

/// Outcome of rebuilding a basis element inside a principal ideal.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalIdealReport {
    /// `|D|` between the generator and the target.
    pub discrepancy_size: usize,
    /// Number of distinct basis products evaluated during the recursion.
    pub products_used: usize,
    /// `l1` distance between the rebuilt element and the direct basis
    /// element.
    pub residual: f64,
}

/// Outcome of comparing the algebra against its image in a finite window.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedReport {
    /// The closure of all pairwise discrepancies.
    pub window: Region,
    /// The window actually embedded into (equals `window` unless enlarged).
    pub enlarged: Region,
    pub pairs: usize,
    pub comparisons: usize,
    pub max_dev: f64,
}

impl Model {
    /// The fertile class of a configuration, read off its tail. Two
    /// representable configurations share a class id exactly when their
    /// discrepancy is finite.
    pub fn fertile_class_id(&self, sigma: &Configuration) -> FertileClassId {
        FertileClassId(sigma.tail().class_key())
    }

    pub(crate) fn offspring_weights(
        &self,
        zeta: &Configuration,
        eta: &Configuration,
    ) -> Result<Option<OffspringWeights>> {
        self.validate_config(zeta)?;
        self.validate_config(eta)?;
        let region = match discrepancy(zeta, eta) {
            Discrepancy::Macroscopic => return Ok(None),
            Discrepancy::Finite(d) => d,
        };
        let mut configs = self.offspring(zeta, eta);
        configs.sort();
        let logh: Vec<f64> = configs
            .iter()
            .map(|omega| self.log_boltzmann(&region, omega))
            .collect::<Result<_>>()?;
        let lse = log_sum_exp(&logh);
        Ok(Some(OffspringWeights { configs, logh, lse }))
    }

    /// The structural coefficients of the pair `(zeta, eta)`: normalised
    /// Boltzmann weights of its offspring. Empty for macroscopic pairs.
    pub fn coefficient_vector(
        &self,
        zeta: &Configuration,
        eta: &Configuration,
    ) -> Result<CoefficientVector> {
        let pair = (zeta.clone(), eta.clone());
        match self.offspring_weights(zeta, eta)? {
            None => Ok(CoefficientVector {
                pair,
                entries: BTreeMap::new(),
            }),
            Some(w) => {
                let entries = w
                    .configs
                    .into_iter()
                    .zip(w.logh)
                    .map(|(omega, l)| (omega, (l - w.lse).exp()))
                    .collect();
                Ok(CoefficientVector { pair, entries })
            }
        }
    }

    /// Bilinear product of two elements. Support pairs are visited in
    /// canonical configuration order and reduced in that order, so equal
    /// inputs produce bitwise-equal outputs.
    pub fn product(&self, u: &AlgebraElement, v: &AlgebraElement) -> Result<AlgebraElement> {
        let mut acc: BTreeMap<Configuration, f64> = BTreeMap::new();
        for (su, au) in u.iter() {
            for (sv, av) in v.iter() {
                let w = au * av;
                if w == 0.0 {
                    continue;
                }
                let cv = self.coefficient_vector(su, sv)?;
                for (omega, c) in cv.iter() {
                    *acc.entry(omega.clone()).or_insert(0.0) += w * c;
                }
            }
        }
        Ok(AlgebraElement::from_terms(acc))
    }

    /// `(u·v)·w − u·(v·w)`.
    pub fn associator(
        &self,
        u: &AlgebraElement,
        v: &AlgebraElement,
        w: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        let left = self.product(&self.product(u, v)?, w)?;
        let right = self.product(u, &self.product(v, w)?)?;
        Ok(left.sub(&right))
    }

    /// The multiplicative functional attached to a fertile class: the sum
    /// of coefficients of `u` over basis elements lying in `class`.
    pub fn class_functional(&self, class: &FertileClassId, u: &AlgebraElement) -> f64 {
        u.iter()
            .filter(|(sigma, _)| &self.fertile_class_id(sigma) == class)
            .map(|(_, a)| a)
            .sum()
    }

    /// Rebuild `e_zeta` inside the principal ideal generated by `e_eta`,
    /// by recursion on the discrepancy size:
    /// `e_zeta = (1/c_{eta zeta, zeta}) (e_eta·e_zeta −
    /// sum_{xi != zeta} c_{eta zeta, xi} e_xi)`, with every `e_xi` itself
    /// rebuilt recursively and `e_eta = e_eta·e_eta` as the base case.
    /// Reports the l1 distance to the direct basis element.
    pub fn express_in_principal_ideal(
        &self,
        eta: &Configuration,
        zeta: &Configuration,
    ) -> Result<PrincipalIdealReport> {
        let d = match discrepancy(eta, zeta) {
            Discrepancy::Finite(d) => d,
            Discrepancy::Macroscopic => {
                return Err(Error::NotFertile(format!(
                    "{zeta} is not in the fertile class of {eta}"
                )))
            }
        };
        let mut memo: BTreeMap<Configuration, AlgebraElement> = BTreeMap::new();
        let rebuilt = self.rebuild_in_ideal(eta, zeta, &mut memo)?;
        let residual = rebuilt.sub(&AlgebraElement::basis(zeta.clone())).norm_one();
        Ok(PrincipalIdealReport {
            discrepancy_size: d.len(),
            products_used: memo.len(),
            residual,
        })
    }

    fn rebuild_in_ideal(
        &self,
        eta: &Configuration,
        zeta: &Configuration,
        memo: &mut BTreeMap<Configuration, AlgebraElement>,
    ) -> Result<AlgebraElement> {
        if let Some(done) = memo.get(zeta) {
            return Ok(done.clone());
        }
        let e_eta = AlgebraElement::basis(eta.clone());
        let rebuilt = if zeta == eta {
            self.product(&e_eta, &e_eta)?
        } else {
            let cv = self.coefficient_vector(eta, zeta)?;
            let c_zeta = cv.get(zeta);
            let mut out = self.product(&e_eta, &AlgebraElement::basis(zeta.clone()))?;
            for (xi, c) in cv.iter() {
                if xi == zeta {
                    continue;
                }
                let sub = self.rebuild_in_ideal(eta, xi, memo)?;
                out = out.sub(&sub.scale(c));
            }
            out.scale(1.0 / c_zeta)
        };
        memo.insert(zeta.clone(), rebuilt.clone());
        Ok(rebuilt)
    }

    /// Map a set of basis configurations (one fertile class) into the
    /// finite system on a window and compare structural coefficients
    /// against the exact finite-volume measure.
    ///
    /// The window is the interaction closure of all pairwise discrepancies;
    /// `enlarged` may widen it. Each configuration is sent to its spin
    /// values on the window, padded with `xi` on the widened part; the
    /// finite system takes `xi` as its outer boundary condition.
    pub fn embed_finite_subalgebra(
        &self,
        basis: &[Configuration],
        enlarged: Option<&Region>,
        xi: &Configuration,
        enumeration_cap: usize,
    ) -> Result<EmbedReport> {
        if basis.is_empty() {
            return Err(Error::InvalidModel("embedding needs basis configurations".into()));
        }
        for sigma in basis {
            self.validate_config(sigma)?;
        }
        self.validate_config(xi)?;
        let mut union = Region::new();
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                match discrepancy(a, b) {
                    Discrepancy::Finite(d) => union = union.union(&d),
                    Discrepancy::Macroscopic => {
                        return Err(Error::ClassMismatch(format!(
                            "{a} and {b} lie in different fertile classes ({} vs {})",
                            self.fertile_class_id(a),
                            self.fertile_class_id(b)
                        )))
                    }
                }
            }
        }
        let window = self.closure(&union)?;
        let target = match enlarged {
            Some(big) => {
                if !window.is_subset(big) {
                    return Err(Error::InvalidModel(format!(
                        "enlarged window {big} must contain the closure {window}"
                    )));
                }
                big.clone()
            }
            None => window.clone(),
        };

        let fm = FiniteModel::embedded(self, &target, xi)?;
        let table = fm.enumerate_measure(enumeration_cap)?;
        let image = |sigma: &Configuration| -> Vec<Spin> {
            fm.sites()
                .iter()
                .map(|&s| {
                    if window.contains(s) {
                        sigma.value(s)
                    } else {
                        xi.value(s)
                    }
                })
                .collect()
        };

        let mut comparisons = 0;
        let mut pairs = 0;
        let mut max_dev: f64 = 0.0;
        for a in basis {
            for b in basis {
                pairs += 1;
                let cv = self.coefficient_vector(a, b)?;
                let fa = fm.assignment(image(a))?;
                let fb = fm.assignment(image(b))?;
                for (omega, c) in cv.iter() {
                    let fo = fm.assignment(image(omega))?;
                    let finite = fm.genetic_coefficient(&table, &fa, &fb, &fo)?;
                    max_dev = max_dev.max((c - finite).abs());
                    comparisons += 1;
                }
            }
        }
        Ok(EmbedReport {
            window,
            enlarged: target,
            pairs,
            comparisons,
            max_dev,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusters::ClusterPartition;
    use crate::config::TailPattern;
    use crate::lattice::{Lattice, Site};
    use crate::potential::Potential;
    use crate::SpinSet;
    use std::sync::Arc;

    fn plus() -> Arc<TailPattern> {
        TailPattern::constant("plus", Spin(1))
    }

    fn flips(sites: &[i64]) -> Configuration {
        let mut c = Configuration::tail_only(plus());
        for &x in sites {
            c = c.set(Site::line(x), Spin(0));
        }
        c
    }

    fn zero_line(clusters: ClusterPartition) -> Model {
        Model::new(Lattice::Line, SpinSet::ising(), Potential::Zero, clusters).unwrap()
    }

    #[test]
    fn idempotent_pair_has_unit_coefficient() {
        let m = Model::ising_line(1.0);
        let zeta = flips(&[0]);
        let cv = m.coefficient_vector(&zeta, &zeta).unwrap();
        assert_eq!(cv.len(), 1);
        assert_eq!(cv.get(&zeta), 1.0);
    }

    #[test]
    fn zero_potential_splits_evenly() {
        let m = zero_line(ClusterPartition::unique());
        let (zeta, eta) = (flips(&[0]), flips(&[]));
        let cv = m.coefficient_vector(&zeta, &eta).unwrap();
        assert_eq!(cv.len(), 2);
        assert!((cv.get(&zeta) - 0.5).abs() < 1e-15);
        assert!((cv.get(&eta) - 0.5).abs() < 1e-15);

        let atomic = zero_line(ClusterPartition::atomic());
        let cv4 = atomic.coefficient_vector(&flips(&[0, 5]), &flips(&[])).unwrap();
        assert_eq!(cv4.len(), 4);
        for (_, c) in cv4.iter() {
            assert!((c - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn single_flip_matches_logistic_form() {
        // Flipping one site of the all-plus chain costs 2 bonds of energy
        // each way: H_D(eta) = -2, H_D(zeta) = +2, so the share of eta is
        // 1/(1 + e^{-4}).
        let expected = 1.0 / (1.0 + (-4.0f64).exp());
        assert!((expected - 0.9820137900379085).abs() < 1e-15);

        for clusters in [ClusterPartition::unique(), ClusterPartition::atomic()] {
            let m = Model::ising_line(1.0).with_clusters(clusters).unwrap();
            let (zeta, eta) = (flips(&[0]), flips(&[]));
            let cv = m.coefficient_vector(&zeta, &eta).unwrap();
            assert_eq!(cv.len(), 2);
            assert!((cv.get(&eta) - expected).abs() < 1e-12);
            assert!((cv.get(&zeta) - (1.0 - expected)).abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_commute_exactly() {
        let m = Model::ising_line(1.0);
        let (zeta, eta) = (flips(&[-1, 0, 2]), flips(&[2]));
        let ab = m.coefficient_vector(&zeta, &eta).unwrap();
        let ba = m.coefficient_vector(&eta, &zeta).unwrap();
        assert_eq!(ab.len(), ba.len());
        for (omega, c) in ab.iter() {
            // Bitwise equality: both orders perform identical arithmetic.
            assert_eq!(c, ba.get(omega), "coefficient of {omega}");
        }
    }

    #[test]
    fn markov_sum_is_one() {
        let m = Model::ising_line(0.7);
        for pair in [
            (flips(&[0]), flips(&[])),
            (flips(&[-2, 1]), flips(&[1, 3])),
            (flips(&[0, 1, 2]), flips(&[])),
        ] {
            let cv = m.coefficient_vector(&pair.0, &pair.1).unwrap();
            assert!((cv.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn macroscopic_pairs_are_sterile() {
        let m = Model::ising_line(1.0);
        let zeta = Configuration::tail_only(plus());
        let eta = Configuration::tail_only(TailPattern::constant("minus", Spin(0)));
        let cv = m.coefficient_vector(&zeta, &eta).unwrap();
        assert!(cv.is_empty());

        let prod = m
            .product(
                &AlgebraElement::basis(zeta.clone()),
                &AlgebraElement::basis(eta.clone()),
            )
            .unwrap();
        assert!(prod.is_zero());
    }

    #[test]
    fn product_is_bilinear() {
        let m = zero_line(ClusterPartition::unique());
        let (zeta, eta) = (flips(&[0]), flips(&[]));
        let u = AlgebraElement::basis(zeta.clone()).scale(2.0);
        let v = AlgebraElement::basis(eta.clone()).scale(3.0);
        let p = m.product(&u, &v).unwrap();
        assert!((p.coeff(&zeta) - 3.0).abs() < 1e-12);
        assert!((p.coeff(&eta) - 3.0).abs() < 1e-12);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn class_functional_counts_only_its_class() {
        let m = Model::ising_line(1.0);
        let in_class = flips(&[0]);
        let other = Configuration::tail_only(TailPattern::constant("minus", Spin(0)));
        let class = m.fertile_class_id(&in_class);
        assert_eq!(m.fertile_class_id(&flips(&[3])), class);
        assert_ne!(m.fertile_class_id(&other), class);

        let u = AlgebraElement::basis(in_class.clone());
        assert_eq!(m.class_functional(&class, &u), 1.0);
        assert_eq!(m.class_functional(&m.fertile_class_id(&other), &u), 0.0);

        // The functional is multiplicative across products.
        let v = AlgebraElement::basis(flips(&[1])).scale(0.3).add(
            &AlgebraElement::basis(flips(&[2, 4])).scale(-1.2),
        );
        let w = AlgebraElement::basis(flips(&[])).scale(0.8).add(
            &AlgebraElement::basis(flips(&[1, 2])).scale(0.5),
        );
        let pv = m.class_functional(&class, &v);
        let pw = m.class_functional(&class, &w);
        let pvw = m.class_functional(&class, &m.product(&v, &w).unwrap());
        assert!((pvw - pv * pw).abs() < 1e-12);
    }

    #[test]
    fn associator_matches_hand_expansion() {
        // The three-configuration construction: unit discrepancies
        // D(sigma,eta) = {0} and D(eta,zeta) = {1}.
        let m = Model::ising_line(1.0);
        let sigma = flips(&[0, 1]);
        let eta = flips(&[1]);
        let zeta = flips(&[]);

        let c_ez = m.coefficient_vector(&eta, &zeta).unwrap();
        let c_sz = m.coefficient_vector(&sigma, &zeta).unwrap();
        let c_se = m.coefficient_vector(&sigma, &eta).unwrap();
        let expected = (c_ez.get(&eta) - c_sz.get(&sigma)) * c_se.get(&sigma)
            + c_ez.get(&zeta) * c_sz.get(&sigma);

        // associator computes (uv)w - u(vw); the expansion above carries
        // the opposite orientation.
        let assoc = m
            .associator(
                &AlgebraElement::basis(sigma.clone()),
                &AlgebraElement::basis(eta.clone()),
                &AlgebraElement::basis(zeta.clone()),
            )
            .unwrap();
        let got = -assoc.coeff(&sigma);
        assert!((got - expected).abs() < 1e-12, "got {got}, want {expected}");
        assert!(got.abs() > 1e-9, "witness must be nonzero, got {got}");
    }

    #[test]
    fn principal_ideal_base_case_is_exact() {
        let m = Model::ising_line(1.0);
        let eta = flips(&[]);
        let rep = m.express_in_principal_ideal(&eta, &eta).unwrap();
        assert_eq!(rep.discrepancy_size, 0);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn principal_ideal_recursion_closes() {
        let m = Model::ising_line(1.0);
        let eta = flips(&[]);
        let one = m.express_in_principal_ideal(&eta, &flips(&[2])).unwrap();
        assert_eq!(one.discrepancy_size, 1);
        assert!(one.residual <= 1e-12, "residual {}", one.residual);

        let three = m
            .express_in_principal_ideal(&eta, &flips(&[-1, 0, 3]))
            .unwrap();
        assert_eq!(three.discrepancy_size, 3);
        assert!(three.residual <= 1e-10, "residual {}", three.residual);
    }

    #[test]
    fn principal_ideal_rejects_other_classes() {
        let m = Model::ising_line(1.0);
        let eta = flips(&[]);
        let minus = Configuration::tail_only(TailPattern::constant("minus", Spin(0)));
        assert!(matches!(
            m.express_in_principal_ideal(&eta, &minus),
            Err(Error::NotFertile(_))
        ));
    }

    #[test]
    fn embedding_matches_oracle() {
        let m = Model::ising_line(1.0);
        let xi = flips(&[]);
        let basis = vec![flips(&[]), flips(&[0])];
        let rep = m
            .embed_finite_subalgebra(&basis, None, &xi, 1 << 20)
            .unwrap();
        assert_eq!(
            rep.window,
            [Site::line(-1), Site::line(0), Site::line(1)]
                .into_iter()
                .collect()
        );
        assert!(rep.max_dev <= 1e-12, "max dev {}", rep.max_dev);

        // Widening the window must not change any coefficient.
        let big: Region = (-2..=2).map(Site::line).collect();
        let rep2 = m
            .embed_finite_subalgebra(&basis, Some(&big), &xi, 1 << 20)
            .unwrap();
        assert_eq!(rep2.enlarged, big);
        assert!(rep2.max_dev <= 1e-12, "max dev {}", rep2.max_dev);
    }

    #[test]
    fn embedding_rejects_mixed_classes() {
        let m = Model::ising_line(1.0);
        let minus = Configuration::tail_only(TailPattern::constant("minus", Spin(0)));
        let err = m.embed_finite_subalgebra(&[flips(&[]), minus], None, &flips(&[]), 1 << 20);
        assert!(matches!(err, Err(Error::ClassMismatch(_))));
    }
}
