//! The model: a lattice, a spin set, a potential and a cluster partition.
//!
//! Everything downstream — Hamiltonians, genetic coefficients, evolution
//! coefficients, the finite-volume oracle — is a function of one `Model`.
//! Construction validates the parts against each other once, so the rest of
//! the crate can assume a coherent bundle.

use crate::clusters::{self, ClusterPartition};
use crate::config::{Configuration, SpinSet};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region, Site};
use crate::potential::{InteractionTerm, Neighborhood, Potential};

/// A lattice spin system together with the cluster partition that shapes
/// its offspring sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    lattice: Lattice,
    spins: SpinSet,
    potential: Potential,
    clusters: ClusterPartition,
}

impl Model {
    pub fn new(
        lattice: Lattice,
        spins: SpinSet,
        potential: Potential,
        clusters: ClusterPartition,
    ) -> Result<Self> {
        potential.validate(&lattice, &spins)?;
        clusters.validate(&lattice)?;
        Ok(Model {
            lattice,
            spins,
            potential,
            clusters,
        })
    }

    /// Nearest-neighbour two-state chain with coupling `beta`, atomic
    /// clusters. The workhorse fixture.
    pub fn ising_line(beta: f64) -> Self {
        Model::new(
            Lattice::Line,
            SpinSet::ising(),
            Potential::ising(beta),
            ClusterPartition::atomic(),
        )
        .expect("valid by construction")
    }

    /// `q`-state nearest-neighbour chain, atomic clusters.
    pub fn potts_line(q: u8, beta: f64) -> Result<Self> {
        Model::new(
            Lattice::Line,
            SpinSet::labels(q)?,
            Potential::potts(beta),
            ClusterPartition::atomic(),
        )
    }

    /// The half-line star system: every site couples to the hub at the
    /// origin with strength `1/x^2`. Atomic clusters.
    pub fn star() -> Self {
        Model::new(
            Lattice::HalfLine,
            SpinSet::ising(),
            Potential::star(),
            ClusterPartition::atomic(),
        )
        .expect("valid by construction")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn spins(&self) -> &SpinSet {
        &self.spins
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn clusters(&self) -> &ClusterPartition {
        &self.clusters
    }

    /// Same system, different cluster partition (revalidated).
    pub fn with_clusters(&self, clusters: ClusterPartition) -> Result<Self> {
        Model::new(
            self.lattice.clone(),
            self.spins.clone(),
            self.potential.clone(),
            clusters,
        )
    }

    /// Same lattice, spins and clusters under a different potential
    /// (revalidated).
    pub fn with_potential(&self, potential: Potential) -> Result<Self> {
        Model::new(
            self.lattice.clone(),
            self.spins.clone(),
            potential,
            self.clusters.clone(),
        )
    }

    /// Check that a configuration lives on this model: spin labels within
    /// range, override sites on the lattice, tail shape matching the lattice
    /// shape.
    pub fn validate_config(&self, sigma: &Configuration) -> Result<()> {
        let q = self.spins.q();
        if sigma.tail().max_label() >= q {
            return Err(Error::SpinMismatch(format!(
                "tail '{}' uses labels beyond q = {q}",
                sigma.tail().id()
            )));
        }
        let factor_count = sigma.tail().factors().map(|f| f.len());
        match (&self.lattice, factor_count) {
            (Lattice::Product(ls), Some(n)) if ls.len() == n => {}
            (Lattice::Product(ls), got) => {
                return Err(Error::InvalidModel(format!(
                    "product lattice with {} factors needs a product tail, got {:?}",
                    ls.len(),
                    got
                )))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidModel(
                    "product tail on a non-product lattice".into(),
                ))
            }
            (_, None) => {}
        }
        for (&s, &v) in sigma.overrides() {
            if !self.lattice.contains(s) {
                return Err(Error::InvalidModel(format!(
                    "override site {s} lies outside the lattice"
                )));
            }
            if v.0 >= q {
                return Err(Error::SpinMismatch(format!(
                    "override {v} at {s} is beyond q = {q}"
                )));
            }
        }
        Ok(())
    }

    // -- delegation to the potential -------------------------------------

    pub fn hamiltonian(&self, lam: &Region, sigma: &Configuration) -> Result<f64> {
        self.potential
            .hamiltonian(&self.lattice, &self.spins, lam, sigma)
    }

    pub fn log_boltzmann(&self, lam: &Region, sigma: &Configuration) -> Result<f64> {
        self.potential
            .log_boltzmann(&self.lattice, &self.spins, lam, sigma)
    }

    pub fn boundary(&self, lam: &Region) -> Result<Region> {
        self.potential.boundary(&self.lattice, &self.spins, lam)
    }

    pub fn closure(&self, lam: &Region) -> Result<Region> {
        self.potential.closure(&self.lattice, &self.spins, lam)
    }

    pub fn neighborhood(&self, x: Site) -> Result<Neighborhood> {
        self.potential.neighborhood(&self.lattice, &self.spins, x)
    }

    pub fn terms_touching(&self, lam: &Region) -> Result<Vec<InteractionTerm>> {
        self.potential.terms_touching(&self.lattice, &self.spins, lam)
    }

    /// Offspring of a pair under this model's cluster partition.
    pub fn offspring(&self, sigma: &Configuration, eta: &Configuration) -> Vec<Configuration> {
        clusters::offspring(&self.clusters, sigma, eta)
    }
}
