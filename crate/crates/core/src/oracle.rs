//! Brute-force finite-volume oracle.
//!
//! On a finite set of sites every Gibbs measure is an explicit normalised
//! weight table, and every algebra coefficient is a plain ratio of measure
//! values: `a_{ζη,σ} = μ(σ)/μ(offspring)` and
//! `b_{ζξ,ησ} = μ(η)μ(σ)/μ(offspring)²`. This module enumerates the table
//! exhaustively and exposes those ratios as an independent cross-check for
//! the log-space coefficient routes in the main algebra modules. The two
//! computations share no intermediate floats, so agreement is evidence, not
//! tautology.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clusters::ClusterId;
use crate::config::{Configuration, Spin, TailPattern};
use crate::error::{Error, Result};
use crate::lattice::{Region, Site};
use crate::model::Model;
use crate::numeric::log_sum_exp;
use crate::potential::InteractionTerm;

/// Largest state count enumerated by default; larger requests are rejected
/// rather than approximated.
pub const DEFAULT_ENUM_CAP: usize = 1 << 20;

/// One spin per oracle site, packed in site order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment(Vec<Spin>);

impl Assignment {
    pub fn labels(&self) -> &[Spin] {
        &self.0
    }
}

/// A finite spin system with an explicit term list. Built either from a
/// model on a finite lattice (free boundary) or by freezing a boundary
/// configuration outside a finite window of an infinite model.
#[derive(Debug, Clone)]
pub struct FiniteModel {
    sites: Vec<Site>,
    index: BTreeMap<Site, usize>,
    q: u8,
    terms: Vec<InteractionTerm>,
    /// Supplies spins for term sites outside the window (embedded case).
    boundary: Option<Configuration>,
    cluster_ids: Vec<ClusterId>,
}

/// The enumerated measure: log weights in state order plus the log
/// partition value. Probabilities are strictly positive and normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTable {
    log_weights: Vec<f64>,
    log_z: f64,
}

impl MeasureTable {
    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn log_prob(&self, state: usize) -> f64 {
        self.log_weights[state] - self.log_z
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.log_prob(state).exp()
    }

    pub fn total(&self) -> f64 {
        (0..self.len()).map(|i| self.prob(i)).sum()
    }
}

impl FiniteModel {
    /// Assemble from explicit parts; every term must read only listed sites.
    pub fn from_parts(
        sites: Vec<Site>,
        q: u8,
        terms: Vec<InteractionTerm>,
        cluster_ids: Vec<ClusterId>,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidModel("need at least two spin values".into()));
        }
        if cluster_ids.len() != sites.len() {
            return Err(Error::InvalidModel(
                "one cluster id per site is required".into(),
            ));
        }
        let mut sorted = sites;
        sorted.sort();
        sorted.dedup();
        let index: BTreeMap<Site, usize> =
            sorted.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        if index.len() != sorted.len() {
            return Err(Error::InvalidModel("duplicate oracle sites".into()));
        }
        for t in &terms {
            if let Some(&s) = t.indexed_sites().iter().find(|s| !index.contains_key(s)) {
                return Err(Error::InvalidModel(format!(
                    "term reads site {s:?} outside the oracle volume"
                )));
            }
        }
        Ok(FiniteModel {
            sites: sorted,
            index,
            q,
            terms,
            boundary: None,
            cluster_ids,
        })
    }

    /// The whole finite lattice of `model`, free boundary.
    pub fn from_model(model: &Model) -> Result<Self> {
        let sites = model.lattice().sites()?;
        let region: Region = sites.iter().copied().collect();
        let terms = model
            .potential()
            .terms_touching(model.lattice(), model.spins(), &region)?;
        let cluster_ids = sites
            .iter()
            .map(|&s| model.clusters().cluster_of(s))
            .collect();
        FiniteModel::from_parts(sites, model.spins().q(), terms, cluster_ids)
    }

    /// The window `lam` of a (possibly infinite) model, with spins outside
    /// the window frozen to `xi` wherever a term reaches across.
    pub fn embedded(model: &Model, lam: &Region, xi: &Configuration) -> Result<Self> {
        model.validate_config(xi)?;
        let sites: Vec<Site> = lam.iter().collect();
        let terms = model
            .potential()
            .terms_touching(model.lattice(), model.spins(), lam)?;
        let index: BTreeMap<Site, usize> =
            sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let cluster_ids = sites
            .iter()
            .map(|&s| model.clusters().cluster_of(s))
            .collect();
        Ok(FiniteModel {
            sites,
            index,
            q: model.spins().q(),
            terms,
            boundary: Some(xi.clone()),
            cluster_ids,
        })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    /// `q^{\#sites}`, rejecting overflow.
    pub fn state_count(&self) -> Result<usize> {
        (self.q as usize)
            .checked_pow(self.sites.len() as u32)
            .ok_or_else(|| Error::TooLarge("state count overflows usize".into()))
    }

    /// Pack explicit labels (one per site, in site order).
    pub fn assignment(&self, labels: Vec<Spin>) -> Result<Assignment> {
        if labels.len() != self.sites.len() {
            return Err(Error::InvalidModel(format!(
                "expected {} labels, got {}",
                self.sites.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|s| s.0 >= self.q) {
            return Err(Error::InvalidModel(format!(
                "label {} out of range (q = {})",
                bad.0, self.q
            )));
        }
        Ok(Assignment(labels))
    }

    /// Read a configuration at the oracle sites.
    pub fn restrict(&self, sigma: &Configuration) -> Result<Assignment> {
        self.assignment(self.sites.iter().map(|&s| sigma.value(s)).collect())
    }

    /// Index of an assignment in enumeration order (first site most
    /// significant, radix `q`).
    pub fn state_index(&self, a: &Assignment) -> usize {
        a.0.iter()
            .fold(0usize, |acc, s| acc * self.q as usize + s.0 as usize)
    }

    fn spin_at(&self, a: &Assignment, s: Site) -> Spin {
        match self.index.get(&s) {
            Some(&i) => a.0[i],
            None => self
                .boundary
                .as_ref()
                .expect("terms beyond the volume imply a boundary")
                .value(s),
        }
    }

    /// Full energy of an assignment (boundary spins frozen where needed).
    pub fn hamiltonian(&self, a: &Assignment) -> f64 {
        self.terms
            .iter()
            .map(|t| t.eval_with(|s| self.spin_at(a, s)))
            .sum()
    }

    /// Exhaustively enumerate all states and normalise.
    pub fn enumerate_measure(&self, cap: usize) -> Result<MeasureTable> {
        let states = self.state_count()?;
        if states > cap {
            return Err(Error::TooLarge(format!(
                "{states} states exceed the enumeration cap {cap}"
            )));
        }
        let mut log_weights = Vec::with_capacity(states);
        let mut labels = vec![Spin(0); self.sites.len()];
        loop {
            log_weights.push(-self.hamiltonian(&Assignment(labels.clone())));
            // Odometer step, last site fastest.
            let mut pos = self.sites.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if labels[pos].0 + 1 < self.q {
                    labels[pos].0 += 1;
                    break;
                }
                labels[pos].0 = 0;
            }
            if labels.iter().all(|s| s.0 == 0) {
                break;
            }
        }
        debug_assert_eq!(log_weights.len(), states);
        let log_z = log_sum_exp(&log_weights);
        Ok(MeasureTable { log_weights, log_z })
    }

    /// All cluster-wise interpolations between two assignments, sorted.
    pub fn offspring_assignments(&self, zeta: &Assignment, eta: &Assignment) -> Vec<Assignment> {
        let mut groups: BTreeMap<&ClusterId, Vec<usize>> = BTreeMap::new();
        for i in 0..self.sites.len() {
            if zeta.0[i] != eta.0[i] {
                groups.entry(&self.cluster_ids[i]).or_default().push(i);
            }
        }
        let groups: Vec<&Vec<usize>> = groups.values().collect();
        let mut out = Vec::with_capacity(1 << groups.len());
        for mask in 0u64..(1u64 << groups.len()) {
            let mut labels = zeta.0.clone();
            for (g, idxs) in groups.iter().enumerate() {
                if mask >> g & 1 == 1 {
                    for &i in *idxs {
                        labels[i] = eta.0[i];
                    }
                }
            }
            out.push(Assignment(labels));
        }
        out.sort();
        out
    }

    /// `a_{ζη,σ} = μ(σ) / μ(offspring of (ζ,η))`, straight from the table.
    pub fn genetic_coefficient(
        &self,
        table: &MeasureTable,
        zeta: &Assignment,
        eta: &Assignment,
        sigma: &Assignment,
    ) -> Result<f64> {
        let offspring = self.offspring_assignments(zeta, eta);
        if !offspring.contains(sigma) {
            return Err(Error::NotOffspring(
                "queried assignment does not interpolate the pair".into(),
            ));
        }
        let total: f64 = offspring
            .iter()
            .map(|o| table.prob(self.state_index(o)))
            .sum();
        Ok(table.prob(self.state_index(sigma)) / total)
    }

    /// `b_{ζξ,ησ} = μ(η)μ(σ) / μ(offspring)²` under the product measure.
    pub fn evolution_coefficient(
        &self,
        table: &MeasureTable,
        zeta: &Assignment,
        xi: &Assignment,
        eta: &Assignment,
        sigma: &Assignment,
    ) -> Result<f64> {
        let offspring = self.offspring_assignments(zeta, xi);
        if !offspring.contains(eta) || !offspring.contains(sigma) {
            return Err(Error::NotOffspring(
                "queried pair does not interpolate the parents".into(),
            ));
        }
        let total: f64 = offspring
            .iter()
            .map(|o| table.prob(self.state_index(o)))
            .sum();
        Ok(table.prob(self.state_index(eta)) * table.prob(self.state_index(sigma))
            / (total * total))
    }

    /// Conditional probability of `a`'s labels on `inner` given its labels
    /// everywhere else, computed by brute-force summation over the table.
    pub fn conditional_probability(
        &self,
        table: &MeasureTable,
        a: &Assignment,
        inner: &Region,
    ) -> Result<f64> {
        let idxs = self.inner_indices(inner)?;
        let mut denom = 0.0;
        let mut labels = a.0.clone();
        for patch in 0..(self.q as usize).pow(idxs.len() as u32) {
            let mut rest = patch;
            for &i in idxs.iter().rev() {
                labels[i] = Spin((rest % self.q as usize) as u8);
                rest /= self.q as usize;
            }
            denom += table.prob(self.state_index(&Assignment(labels.clone())));
        }
        Ok(table.prob(self.state_index(a)) / denom)
    }

    /// The same conditional probability from the local specification: only
    /// terms touching `inner` enter, everything else is frozen from `a`
    /// (and the boundary, if any). Agreement with
    /// [`FiniteModel::conditional_probability`] is the finite-volume
    /// consistency of the specification.
    pub fn local_conditional(&self, a: &Assignment, inner: &Region) -> Result<f64> {
        let idxs = self.inner_indices(inner)?;
        let local: Vec<&InteractionTerm> = self
            .terms
            .iter()
            .filter(|t| !t.support().is_disjoint(inner))
            .collect();
        let energy = |labels: &[Spin]| -> f64 {
            local
                .iter()
                .map(|t| {
                    t.eval_with(|s| match self.index.get(&s) {
                        Some(&i) => labels[i],
                        None => self.spin_at(a, s),
                    })
                })
                .sum()
        };
        let mut log_weights = Vec::new();
        let mut target = None;
        let mut labels = a.0.clone();
        for patch in 0..(self.q as usize).pow(idxs.len() as u32) {
            let mut rest = patch;
            for &i in idxs.iter().rev() {
                labels[i] = Spin((rest % self.q as usize) as u8);
                rest /= self.q as usize;
            }
            log_weights.push(-energy(&labels));
            if labels == a.0 {
                target = Some(patch);
            }
        }
        let target = target.expect("the patch loop visits a's own labels");
        Ok((log_weights[target] - log_sum_exp(&log_weights)).exp())
    }

    fn inner_indices(&self, inner: &Region) -> Result<Vec<usize>> {
        inner
            .iter()
            .map(|s| {
                self.index.get(&s).copied().ok_or_else(|| {
                    Error::InvalidModel(format!("site {s:?} is outside the oracle volume"))
                })
            })
            .collect()
    }
}

/// Deviations between the lattice-model coefficient routes and the oracle
/// ratios on uniformly sampled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub samples: usize,
    pub genetic_comparisons: usize,
    pub evolution_comparisons: usize,
    pub max_genetic_dev: f64,
    pub max_evolution_dev: f64,
}

/// Sample uniform assignment pairs on a finite-lattice model and compare
/// every genetic coefficient (and, for discrepancies up to four sites,
/// every pair-square coefficient) against the oracle ratios.
pub fn compare_finite_equivalence(
    model: &Model,
    n_samples: usize,
    seed: u64,
    cap: usize,
) -> Result<OracleReport> {
    let fm = FiniteModel::from_model(model)?;
    let table = fm.enumerate_measure(cap)?;
    let tail = TailPattern::constant("zero", Spin(0));
    let q = model.spins().q();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Configuration {
        let mut c = Configuration::tail_only(tail.clone());
        for &s in fm.sites() {
            c = c.set(s, Spin(rng.gen_range(0..q)));
        }
        c
    };

    let mut report = OracleReport {
        samples: n_samples,
        genetic_comparisons: 0,
        evolution_comparisons: 0,
        max_genetic_dev: 0.0,
        max_evolution_dev: 0.0,
    };
    for _ in 0..n_samples {
        let zeta = draw(&mut rng);
        let eta = draw(&mut rng);
        let fz = fm.restrict(&zeta)?;
        let fe = fm.restrict(&eta)?;

        let cv = model.coefficient_vector(&zeta, &eta)?;
        for (omega, c) in cv.iter() {
            let a = fm.genetic_coefficient(&table, &fz, &fe, &fm.restrict(omega)?)?;
            report.max_genetic_dev = report.max_genetic_dev.max((c - a).abs());
            report.genetic_comparisons += 1;
        }

        let diff = fz
            .labels()
            .iter()
            .zip(fe.labels())
            .filter(|(a, b)| a != b)
            .count();
        if diff <= 4 {
            let em = model.evo_coefficient_matrix(&zeta, &eta)?;
            for ((eo, so), c) in em.iter() {
                let b = fm.evolution_coefficient(
                    &table,
                    &fz,
                    &fe,
                    &fm.restrict(eo)?,
                    &fm.restrict(so)?,
                )?;
                report.max_evolution_dev = report.max_evolution_dev.max((c - b).abs());
                report.evolution_comparisons += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusters::ClusterPartition;
    use crate::lattice::Lattice;
    use crate::potential::Potential;
    use crate::SpinSet;

    fn chain_model(n: usize, beta: f64) -> Model {
        Model::new(
            Lattice::chain(n),
            SpinSet::ising(),
            Potential::ising(beta),
            ClusterPartition::atomic(),
        )
        .unwrap()
    }

    #[test]
    fn zero_potential_two_sites_is_uniform() {
        let m = Model::new(
            Lattice::chain(2),
            SpinSet::ising(),
            Potential::Zero,
            ClusterPartition::atomic(),
        )
        .unwrap();
        let fm = FiniteModel::from_model(&m).unwrap();
        let t = fm.enumerate_measure(DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(t.len(), 4);
        for i in 0..4 {
            assert!((t.prob(i) - 0.25).abs() < 1e-15);
        }
        assert!((t.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_site_field_weights() {
        // One site, energy equal to the label: p(0) = 1/(1 + e^{-1}).
        let site = Site::line(0);
        let term = InteractionTerm::table(vec![site], 2, vec![0.0, 1.0]).unwrap();
        let fm =
            FiniteModel::from_parts(vec![site], 2, vec![term], vec![ClusterId::Site(site)])
                .unwrap();
        let t = fm.enumerate_measure(DEFAULT_ENUM_CAP).unwrap();
        assert!((t.prob(0) - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-14);
        assert!((t.prob(0) - 0.7310585786300049).abs() < 1e-13);
    }

    #[test]
    fn three_site_chain_matches_direct_sum() {
        // Independent route: eight explicit Boltzmann weights in linear
        // space, no log-sum-exp.
        let m = chain_model(3, 1.0);
        let fm = FiniteModel::from_model(&m).unwrap();
        let t = fm.enumerate_measure(DEFAULT_ENUM_CAP).unwrap();
        let z = 2.0 * 2.0f64.exp() + 2.0 * (-2.0f64).exp() + 4.0;
        // State 7 = (+,+,+) under the enumeration (1 = plus, first site
        // most significant); its energy is -2.
        let a = fm
            .assignment(vec![Spin(1), Spin(1), Spin(1)])
            .unwrap();
        assert_eq!(fm.state_index(&a), 7);
        assert!((fm.hamiltonian(&a) + 2.0).abs() < 1e-15);
        assert!((t.prob(7) - 2.0f64.exp() / z).abs() < 1e-14);
        assert!((t.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn genetic_ratio_edge_cases() {
        let m = chain_model(4, 0.0);
        let fm = FiniteModel::from_model(&m).unwrap();
        let t = fm.enumerate_measure(DEFAULT_ENUM_CAP).unwrap();
        let z = fm
            .assignment(vec![Spin(0), Spin(0), Spin(0), Spin(0)])
            .unwrap();
        // Identical parents: single offspring, coefficient one.
        assert_eq!(fm.genetic_coefficient(&t, &z, &z, &z).unwrap(), 1.0);
        // One flipped site under a zero potential: an even split.
        let e = fm
            .assignment(vec![Spin(1), Spin(0), Spin(0), Spin(0)])
            .unwrap();
        let a = fm.genetic_coefficient(&t, &z, &e, &z).unwrap();
        assert!((a - 0.5).abs() < 1e-14);
        let b = fm.evolution_coefficient(&t, &z, &e, &z, &e).unwrap();
        assert!((b - 0.25).abs() < 1e-14);
        // Non-offspring queries are rejected.
        let far = fm
            .assignment(vec![Spin(0), Spin(0), Spin(0), Spin(1)])
            .unwrap();
        assert!(matches!(
            fm.genetic_coefficient(&t, &z, &e, &far),
            Err(Error::NotOffspring(_))
        ));
    }

    #[test]
    fn conditional_probability_consistency() {
        let m = chain_model(5, 0.8);
        let fm = FiniteModel::from_model(&m).unwrap();
        let t = fm.enumerate_measure(DEFAULT_ENUM_CAP).unwrap();
        let a = fm
            .assignment(vec![Spin(1), Spin(0), Spin(1), Spin(1), Spin(0)])
            .unwrap();
        let inner: Region = [Site::line(1), Site::line(2)].into_iter().collect();
        let brute = fm.conditional_probability(&t, &a, &inner).unwrap();
        let local = fm.local_conditional(&a, &inner).unwrap();
        assert!((brute - local).abs() < 1e-12, "{brute} vs {local}");
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let m = chain_model(8, 0.5);
        let fm = FiniteModel::from_model(&m).unwrap();
        assert!(matches!(
            fm.enumerate_measure(100),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn oracle_agrees_with_model_routes() {
        for beta in [0.3, 1.0] {
            let m = chain_model(6, beta);
            let rep = compare_finite_equivalence(&m, 40, 7, DEFAULT_ENUM_CAP).unwrap();
            assert!(rep.genetic_comparisons > 0);
            assert!(rep.evolution_comparisons > 0);
            assert!(rep.max_genetic_dev <= 1e-10, "beta {beta}: {rep:?}");
            assert!(rep.max_evolution_dev <= 1e-10, "beta {beta}: {rep:?}");
        }
    }

    #[test]
    fn oracle_handles_potts_grid() {
        let m = Model::new(
            Lattice::Grid { w: 2, h: 3 },
            SpinSet::labels(3).unwrap(),
            Potential::potts(0.7),
            ClusterPartition::atomic(),
        )
        .unwrap();
        let rep = compare_finite_equivalence(&m, 25, 11, DEFAULT_ENUM_CAP).unwrap();
        assert!(rep.max_genetic_dev <= 1e-10, "{rep:?}");
        assert!(rep.max_evolution_dev <= 1e-10, "{rep:?}");
    }
}
