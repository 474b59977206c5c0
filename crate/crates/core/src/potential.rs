//! Interaction potentials and restricted Hamiltonians.
//!
//! A potential assigns to finite site sets `A` a local energy term that
//! depends only on the spins inside `A`. The restricted Hamiltonian on a
//! finite region sums every term whose support meets the region. All bundled
//! kinds are finite range except the inverse-square star, which keeps one hub
//! site interacting with the whole half line and is therefore evaluated
//! analytically (closed-form series plus finite corrections) instead of by
//! term enumeration.

use std::collections::BTreeSet;

use crate::config::{Configuration, Spin, SpinSet};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Region, Site};
use crate::numeric::ZETA_2;
use crate::transforms::TauTransform;

/// One `custom_pair` table entry: a pair function on the spin labels of
/// `{base, base + offset}`. Without an anchor the entry contributes a term at
/// *every* base site (a translation-invariant family); with `base` set it
/// contributes exactly one term, which is how explicitly supported potentials
/// such as a single marked bond are written.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry {
    pub base: Option<Site>,
    pub offset: (i64, i64),
    /// Row-major `q*q` table: value for labels `(a, b)` at `a*q + b`.
    pub table: Vec<f64>,
}

/// The bundled potential kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// No interaction at all.
    Zero,
    /// Nearest-neighbour coupling `-beta * v(a) * v(b)` of the numeric spin
    /// values.
    IsingPair { beta: f64 },
    /// Nearest-neighbour coupling `-beta * [a == b]` of the labels.
    PottsPair { beta: f64 },
    /// Finite list of pair-table entries (see [`PairEntry`]).
    CustomPair { entries: Vec<PairEntry> },
    /// `Phi_{0,n}(sigma) = v(sigma(n)) * v(sigma(0)) / n^2` on the half line:
    /// every site interacts with the hub 0.
    StarInverseSquare,
    /// `base` plus constant shifts `c_A` on explicitly listed supports.
    Shifted {
        base: Box<Potential>,
        shifts: Vec<(Region, f64)>,
    },
    /// Factor-wise potential on a product lattice; factor `i` acts on the
    /// sites tagged `i`.
    DirectSum(Vec<Potential>),
    /// The image potential `tau(Phi)`, with terms carried along the
    /// transform.
    TauImage {
        base: Box<Potential>,
        tau: Box<TauTransform>,
    },
}

/// Finite neighbourhood of a site, or a marker that it touches infinitely
/// many sites (the star hub).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Neighborhood {
    Finite(Region),
    Infinite,
}

/// A single term `Phi_A`: its support and an evaluator that only reads spins
/// inside the support.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTerm {
    support: Region,
    eval: TermEval,
}

#[derive(Debug, Clone, PartialEq)]
enum TermEval {
    /// Value table indexed by the labels at `sites` (first site most
    /// significant, radix `q`).
    Table {
        sites: Vec<Site>,
        q: u8,
        values: Vec<f64>,
    },
    /// Constant term (from shift families).
    Const(f64),
}

impl InteractionTerm {
    pub fn support(&self) -> &Region {
        &self.support
    }

    /// Term value on a configuration; reads only sites in the support.
    pub fn eval(&self, sigma: &Configuration) -> f64 {
        self.eval_with(|s| sigma.value(s))
    }

    /// Term value with spins supplied by an arbitrary lookup (used when
    /// tabulating terms against packed assignments).
    pub fn eval_with(&self, lookup: impl Fn(Site) -> Spin) -> f64 {
        match &self.eval {
            TermEval::Table { sites, q, values } => {
                let mut idx = 0usize;
                for &s in sites {
                    idx = idx * (*q as usize) + lookup(s).0 as usize;
                }
                values[idx]
            }
            TermEval::Const(c) => *c,
        }
    }

    /// Sites the evaluator actually indexes (empty for constant terms).
    pub fn indexed_sites(&self) -> &[Site] {
        match &self.eval {
            TermEval::Table { sites, .. } => sites,
            TermEval::Const(_) => &[],
        }
    }

    /// True when the term is identically zero and hence ignorable for
    /// boundaries and neighbourhoods.
    pub fn is_vanishing(&self) -> bool {
        match &self.eval {
            TermEval::Table { values, .. } => values.iter().all(|v| *v == 0.0),
            TermEval::Const(c) => *c == 0.0,
        }
    }

    fn pair(a: Site, b: Site, q: u8, values: Vec<f64>) -> Self {
        InteractionTerm {
            support: [a, b].into_iter().collect(),
            eval: TermEval::Table {
                sites: vec![a, b],
                q,
                values,
            },
        }
    }

    fn constant(support: Region, c: f64) -> Self {
        InteractionTerm {
            support,
            eval: TermEval::Const(c),
        }
    }

    /// Build a term on a finite explicit support from its value table (used
    /// by the finite oracle's direct constructors).
    pub fn table(sites: Vec<Site>, q: u8, values: Vec<f64>) -> Result<Self> {
        let expect = (q as usize).pow(sites.len() as u32);
        if values.len() != expect {
            return Err(Error::InvalidModel(format!(
                "term table over {} sites needs {} entries, got {}",
                sites.len(),
                expect,
                values.len()
            )));
        }
        Ok(InteractionTerm {
            support: sites.iter().copied().collect(),
            eval: TermEval::Table { sites, q, values },
        })
    }

    /// Re-tag every site as belonging to product factor `tag`.
    fn retag(self, tag: u8) -> Self {
        let map = |s: Site| s.tagged(tag);
        match self.eval {
            TermEval::Table { sites, q, values } => InteractionTerm {
                support: self.support.iter().map(map).collect(),
                eval: TermEval::Table {
                    sites: sites.into_iter().map(map).collect(),
                    q,
                    values,
                },
            },
            TermEval::Const(c) => InteractionTerm {
                support: self.support.iter().map(map).collect(),
                eval: TermEval::Const(c),
            },
        }
    }

    /// The image of this term under `tau`: support moves with the spatial
    /// map, and the table is precomposed with the inverse spin maps so that
    /// the new term evaluated on `omega` equals the old term on
    /// `tau^{-1}(omega)`.
    fn tau_image(&self, tau: &TauTransform) -> Result<Self> {
        match &self.eval {
            TermEval::Const(c) => Ok(InteractionTerm::constant(
                self.support.iter().map(|s| tau.apply_site(s)).collect(),
                *c,
            )),
            TermEval::Table { sites, q, values } => {
                let new_sites: Vec<Site> = sites.iter().map(|&s| tau.apply_site(s)).collect();
                let inv_perms: Vec<Vec<u8>> = new_sites
                    .iter()
                    .map(|&ns| tau.spin_perm_at(ns).inverse().into_table())
                    .collect();
                let qq = *q as usize;
                let mut new_values = vec![0.0; values.len()];
                for (idx, slot) in new_values.iter_mut().enumerate() {
                    // Decode the label tuple for `idx`, map each label through
                    // the inverse spin permutation, re-encode.
                    let mut rest = idx;
                    let mut old_idx = 0usize;
                    let mut digits = vec![0usize; sites.len()];
                    for d in (0..sites.len()).rev() {
                        digits[d] = rest % qq;
                        rest /= qq;
                    }
                    for (d, perm) in digits.iter().zip(&inv_perms) {
                        old_idx = old_idx * qq + perm[*d] as usize;
                    }
                    *slot = values[old_idx];
                }
                Ok(InteractionTerm {
                    support: new_sites.iter().copied().collect(),
                    eval: TermEval::Table {
                        sites: new_sites,
                        q: *q,
                        values: new_values,
                    },
                })
            }
        }
    }
}

impl Potential {
    pub fn ising(beta: f64) -> Self {
        Potential::IsingPair { beta }
    }

    pub fn potts(beta: f64) -> Self {
        Potential::PottsPair { beta }
    }

    pub fn custom_pair(entries: Vec<PairEntry>) -> Self {
        Potential::CustomPair { entries }
    }

    pub fn star() -> Self {
        Potential::StarInverseSquare
    }

    /// `Psi_A = Phi_A + c_A` on the listed supports, `Phi_A` elsewhere.
    pub fn shifted(base: Potential, shifts: Vec<(Region, f64)>) -> Result<Self> {
        if shifts.iter().any(|(r, _)| r.is_empty()) {
            return Err(Error::InvalidModel("shift on an empty support".into()));
        }
        Ok(Potential::Shifted {
            base: Box::new(base),
            shifts,
        })
    }

    /// Factor-wise sum on a product lattice.
    pub fn direct_sum(parts: Vec<Potential>) -> Result<Self> {
        if parts.is_empty() || parts.len() > 4 {
            return Err(Error::InvalidModel(format!(
                "direct sum takes 1..=4 factors, got {}",
                parts.len()
            )));
        }
        Ok(Potential::DirectSum(parts))
    }

    /// The image potential `tau(Phi)`.
    pub fn tau_image(base: Potential, tau: TauTransform) -> Self {
        Potential::TauImage {
            base: Box::new(base),
            tau: Box::new(tau),
        }
    }

    /// Whether every site has a finite neighbourhood.
    pub fn is_finite_range(&self) -> bool {
        match self {
            Potential::Zero
            | Potential::IsingPair { .. }
            | Potential::PottsPair { .. }
            | Potential::CustomPair { .. } => true,
            Potential::StarInverseSquare => false,
            Potential::Shifted { base, .. } => base.is_finite_range(),
            Potential::DirectSum(parts) => parts.iter().all(|p| p.is_finite_range()),
            Potential::TauImage { base, .. } => base.is_finite_range(),
        }
    }

    /// Structural validation against the lattice and spin set hosting the
    /// potential (table sizes, factor counts, the star's lattice).
    pub fn validate(&self, lattice: &Lattice, spins: &SpinSet) -> Result<()> {
        let q = spins.q() as usize;
        match self {
            Potential::Zero => Ok(()),
            Potential::IsingPair { beta } | Potential::PottsPair { beta } => {
                if !beta.is_finite() || *beta < 0.0 {
                    return Err(Error::InvalidModel(format!("beta must be >= 0, got {beta}")));
                }
                Ok(())
            }
            Potential::CustomPair { entries } => {
                for e in entries {
                    if e.table.len() != q * q {
                        return Err(Error::InvalidModel(format!(
                            "pair table needs q^2 = {} entries, got {}",
                            q * q,
                            e.table.len()
                        )));
                    }
                    if e.offset == (0, 0) {
                        return Err(Error::InvalidModel("pair offset must be nonzero".into()));
                    }
                }
                Ok(())
            }
            Potential::StarInverseSquare => {
                if *lattice != Lattice::HalfLine {
                    return Err(Error::InvalidModel(
                        "the star potential lives on the half line".into(),
                    ));
                }
                Ok(())
            }
            Potential::Shifted { base, .. } => base.validate(lattice, spins),
            Potential::DirectSum(parts) => {
                let factors = lattice.factors();
                if !matches!(lattice, Lattice::Product(_)) || factors.len() != parts.len() {
                    return Err(Error::InvalidModel(
                        "direct sum needs a product lattice with one factor per part".into(),
                    ));
                }
                for (p, l) in parts.iter().zip(factors) {
                    if matches!(l, Lattice::Product(_)) {
                        return Err(Error::InvalidModel("nested product lattices".into()));
                    }
                    p.validate(l, spins)?;
                }
                Ok(())
            }
            Potential::TauImage { base, tau } => {
                tau.validate(lattice, spins)?;
                base.validate(lattice, spins)
            }
        }
    }

    /// Nearest-neighbour or custom pair entries realised against the lattice
    /// and spin set.
    fn pair_entries(&self, lattice: &Lattice, spins: &SpinSet) -> Vec<PairEntry> {
        let q = spins.q() as usize;
        match self {
            Potential::IsingPair { beta } => lattice
                .neighbor_offsets()
                .iter()
                .map(|&off| {
                    let mut table = vec![0.0; q * q];
                    for a in 0..q {
                        for b in 0..q {
                            table[a * q + b] =
                                -beta * spins.value(Spin(a as u8)) * spins.value(Spin(b as u8));
                        }
                    }
                    PairEntry {
                        base: None,
                        offset: off,
                        table,
                    }
                })
                .collect(),
            Potential::PottsPair { beta } => lattice
                .neighbor_offsets()
                .iter()
                .map(|&off| {
                    let mut table = vec![0.0; q * q];
                    for a in 0..q {
                        table[a * q + a] = -beta;
                    }
                    PairEntry {
                        base: None,
                        offset: off,
                        table,
                    }
                })
                .collect(),
            Potential::CustomPair { entries } => entries.clone(),
            _ => Vec::new(),
        }
    }

    /// The finite list of terms whose support meets `lam`. Errors with
    /// `InfiniteRange` for the star kind, whose hub has unboundedly many
    /// touching terms.
    pub fn terms_touching(
        &self,
        lattice: &Lattice,
        spins: &SpinSet,
        lam: &Region,
    ) -> Result<Vec<InteractionTerm>> {
        let mut out = match self {
            Potential::Zero => Vec::new(),
            Potential::IsingPair { .. }
            | Potential::PottsPair { .. }
            | Potential::CustomPair { .. } => {
                let entries = self.pair_entries(lattice, spins);
                let q = spins.q();
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for (idx, e) in entries.iter().enumerate() {
                    let (dx, dy) = e.offset;
                    let candidates: Vec<Site> = match e.base {
                        Some(b) => vec![b],
                        None => lam
                            .iter()
                            .flat_map(|s| {
                                [
                                    s,
                                    Site {
                                        tag: s.tag,
                                        x: s.x - dx,
                                        y: s.y - dy,
                                    },
                                ]
                            })
                            .collect(),
                    };
                    for base in candidates {
                        let partner = Site {
                            tag: base.tag,
                            x: base.x + dx,
                            y: base.y + dy,
                        };
                        let touches = lam.contains(base) || lam.contains(partner);
                        if touches
                            && lattice.contains(base)
                            && lattice.contains(partner)
                            && seen.insert((base, idx))
                        {
                            out.push(InteractionTerm::pair(base, partner, q, e.table.clone()));
                        }
                    }
                }
                out
            }
            Potential::StarInverseSquare => {
                return Err(Error::InfiniteRange(
                    "star potential: infinitely many terms touch the hub".into(),
                ))
            }
            Potential::Shifted { base, shifts } => {
                let mut out = base.terms_touching(lattice, spins, lam)?;
                for (support, c) in shifts {
                    if !support.is_disjoint(lam) {
                        out.push(InteractionTerm::constant(support.clone(), *c));
                    }
                }
                out
            }
            Potential::DirectSum(parts) => {
                let factors = lattice.factors();
                let mut out = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    let sub = lam.project(i as u8);
                    for t in p.terms_touching(&factors[i], spins, &sub)? {
                        out.push(t.retag(i as u8));
                    }
                }
                out
            }
            Potential::TauImage { base, tau } => {
                let inv = tau.inverse()?;
                let pre_lam: Region = lam.iter().map(|s| inv.apply_site(s)).collect();
                base.terms_touching(lattice, spins, &pre_lam)?
                    .iter()
                    .map(|t| t.tau_image(tau))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        out.sort_by(|a, b| {
            (&a.support, a.indexed_sites()).cmp(&(&b.support, b.indexed_sites()))
        });
        Ok(out)
    }

    /// `H_Lambda(sigma)`: the sum of all terms touching `lam`, with the
    /// analytic closed form for the star kind.
    pub fn hamiltonian(
        &self,
        lattice: &Lattice,
        spins: &SpinSet,
        lam: &Region,
        sigma: &Configuration,
    ) -> Result<f64> {
        if lam.is_empty() {
            return Ok(0.0);
        }
        match self {
            Potential::StarInverseSquare => star_hamiltonian(spins, lam, sigma),
            Potential::Shifted { base, shifts } => {
                let mut h = base.hamiltonian(lattice, spins, lam, sigma)?;
                for (support, c) in shifts {
                    if !support.is_disjoint(lam) {
                        h += c;
                    }
                }
                Ok(h)
            }
            Potential::DirectSum(parts) => {
                let factors = lattice.factors();
                if factors.len() != parts.len() {
                    return Err(Error::InvalidModel(
                        "direct sum factor count does not match the lattice".into(),
                    ));
                }
                let mut h = 0.0;
                for (i, p) in parts.iter().enumerate() {
                    let sub = lam.project(i as u8);
                    if sub.is_empty() {
                        continue;
                    }
                    h += p.hamiltonian(&factors[i], spins, &sub, &sigma.project(i as u8)?)?;
                }
                Ok(h)
            }
            Potential::TauImage { base, tau } => {
                let inv = tau.inverse()?;
                let pre_lam: Region = lam.iter().map(|s| inv.apply_site(s)).collect();
                let pre_sigma = inv.apply_config(sigma)?;
                base.hamiltonian(lattice, spins, &pre_lam, &pre_sigma)
            }
            _ => Ok(self
                .terms_touching(lattice, spins, lam)?
                .iter()
                .map(|t| t.eval(sigma))
                .sum()),
        }
    }

    /// `-H_Lambda(sigma)`; callers exponentiate only inside normalised
    /// ratios.
    pub fn log_boltzmann(
        &self,
        lattice: &Lattice,
        spins: &SpinSet,
        lam: &Region,
        sigma: &Configuration,
    ) -> Result<f64> {
        Ok(-self.hamiltonian(lattice, spins, lam, sigma)?)
    }

    /// The boundary `∂L`: sites outside `L` covered by a non-vanishing term
    /// meeting `L`.
    pub fn boundary(&self, lattice: &Lattice, spins: &SpinSet, lam: &Region) -> Result<Region> {
        if !self.is_finite_range() {
            return Err(Error::InfiniteRange(
                "potential boundary needs a finite-range potential".into(),
            ));
        }
        let mut out = Region::new();
        for t in self.terms_touching(lattice, spins, lam)? {
            if t.is_vanishing() {
                continue;
            }
            for s in t.support().iter() {
                if !lam.contains(s) {
                    out.insert(s);
                }
            }
        }
        Ok(out)
    }

    /// `L` together with its boundary.
    pub fn closure(&self, lattice: &Lattice, spins: &SpinSet, lam: &Region) -> Result<Region> {
        Ok(lam.union(&self.boundary(lattice, spins, lam)?))
    }

    /// Sites sharing a non-vanishing term with `x` (and the `Infinite`
    /// marker for the star hub).
    pub fn neighborhood(
        &self,
        lattice: &Lattice,
        spins: &SpinSet,
        x: Site,
    ) -> Result<Neighborhood> {
        match self {
            Potential::StarInverseSquare => {
                if x == Site::line(0) {
                    Ok(Neighborhood::Infinite)
                } else if lattice.contains(x) {
                    Ok(Neighborhood::Finite(Region::single(Site::line(0))))
                } else {
                    Ok(Neighborhood::Finite(Region::new()))
                }
            }
            Potential::TauImage { base, tau } => {
                let pre = tau.inverse()?.apply_site(x);
                match base.neighborhood(lattice, spins, pre)? {
                    Neighborhood::Infinite => Ok(Neighborhood::Infinite),
                    Neighborhood::Finite(r) => Ok(Neighborhood::Finite(
                        r.iter().map(|s| tau.apply_site(s)).collect(),
                    )),
                }
            }
            Potential::DirectSum(parts) => {
                let factors = lattice.factors();
                let part = parts
                    .get(x.tag as usize)
                    .ok_or_else(|| Error::InvalidModel(format!("no factor {}", x.tag)))?;
                match part.neighborhood(&factors[x.tag as usize], spins, x.untagged())? {
                    Neighborhood::Infinite => Ok(Neighborhood::Infinite),
                    Neighborhood::Finite(r) => Ok(Neighborhood::Finite(
                        r.iter().map(|s| s.tagged(x.tag)).collect(),
                    )),
                }
            }
            _ => {
                let mut out = Region::new();
                for t in self.terms_touching(lattice, spins, &Region::single(x))? {
                    if t.is_vanishing() {
                        continue;
                    }
                    for s in t.support().iter() {
                        if s != x {
                            out.insert(s);
                        }
                    }
                }
                Ok(Neighborhood::Finite(out))
            }
        }
    }
}

/// Closed-form star Hamiltonian. For a region containing the hub the full
/// series over the half line contributes `v_tail * zeta(2)` plus finite
/// corrections from the overridden sites; away from the hub only the listed
/// sites' terms touch the region. Only constant tails are supported.
fn star_hamiltonian(spins: &SpinSet, lam: &Region, sigma: &Configuration) -> Result<f64> {
    let Some(tail_spin) = sigma.tail().as_constant() else {
        return Err(Error::UnsupportedTail(
            "star potential needs a constant tail".into(),
        ));
    };
    let v_tail = spins.value(tail_spin);
    let hub = Site::line(0);
    let hub_val = spins.value(sigma.value(hub));
    if lam.contains(hub) {
        let mut series = v_tail * ZETA_2;
        for (&s, &sp) in sigma.overrides() {
            if s.x >= 1 {
                let n = s.x as f64;
                series += (spins.value(sp) - v_tail) / (n * n);
            }
        }
        Ok(hub_val * series)
    } else {
        let mut sum = 0.0;
        for s in lam.iter() {
            if s.x >= 1 {
                let n = s.x as f64;
                sum += spins.value(sigma.value(s)) / (n * n);
            }
        }
        Ok(hub_val * sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::TailPattern;
    use std::sync::Arc;

    fn plus_tail() -> Arc<TailPattern> {
        TailPattern::constant("plus", Spin(1))
    }

    fn site0() -> Region {
        Region::single(Site::line(0))
    }

    #[test]
    fn zero_potential_is_zero() {
        let phi = Potential::Zero;
        let sigma = Configuration::tail_only(plus_tail());
        let h = phi
            .hamiltonian(&Lattice::Line, &SpinSet::ising(), &site0(), &sigma)
            .unwrap();
        assert_eq!(h, 0.0);
        assert!(phi
            .boundary(&Lattice::Line, &SpinSet::ising(), &site0())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn ising_flip_at_origin_costs_two() {
        // Tail all +1, site 0 flipped to -1: the two touching bonds each
        // contribute -beta * (-1)(+1) = +1.
        let phi = Potential::ising(1.0);
        let sigma = Configuration::tail_only(plus_tail()).set(Site::line(0), Spin(0));
        let h = phi
            .hamiltonian(&Lattice::Line, &SpinSet::ising(), &site0(), &sigma)
            .unwrap();
        assert!((h - 2.0).abs() < 1e-15);
        let lb = phi
            .log_boltzmann(&Lattice::Line, &SpinSet::ising(), &site0(), &sigma)
            .unwrap();
        assert!((lb + 2.0).abs() < 1e-15);

        // The unflipped tail has both bonds aligned: H = -2.
        let eta = Configuration::tail_only(plus_tail());
        let h_eta = phi
            .hamiltonian(&Lattice::Line, &SpinSet::ising(), &site0(), &eta)
            .unwrap();
        assert!((h_eta + 2.0).abs() < 1e-15);
    }

    #[test]
    fn ising_boundaries() {
        let phi = Potential::ising(1.0);
        let s = SpinSet::ising();
        let b0 = phi.boundary(&Lattice::Line, &s, &site0()).unwrap();
        assert_eq!(b0, [Site::line(-1), Site::line(1)].into_iter().collect());
        let b01 = phi
            .boundary(&Lattice::Line, &s, &Region::segment(0, 1))
            .unwrap();
        assert_eq!(b01, [Site::line(-1), Site::line(2)].into_iter().collect());
        let cl = phi
            .closure(&Lattice::Line, &s, &Region::segment(0, 1))
            .unwrap();
        assert_eq!(cl, Region::segment(-1, 2));
    }

    #[test]
    fn beta_zero_bonds_vanish() {
        let phi = Potential::ising(0.0);
        let b = phi
            .boundary(&Lattice::Line, &SpinSet::ising(), &site0())
            .unwrap();
        assert!(b.is_empty(), "beta = 0 terms are identically zero");
    }

    #[test]
    fn plane_neighborhood() {
        let phi = Potential::ising(1.0);
        let n = phi
            .neighborhood(&Lattice::Plane, &SpinSet::ising(), Site::plane(0, 0))
            .unwrap();
        let expect: Region = [
            Site::plane(1, 0),
            Site::plane(-1, 0),
            Site::plane(0, 1),
            Site::plane(0, -1),
        ]
        .into_iter()
        .collect();
        assert_eq!(n, Neighborhood::Finite(expect));
    }

    #[test]
    fn half_line_edge_has_one_neighbor() {
        let phi = Potential::ising(1.0);
        let n = phi
            .neighborhood(&Lattice::HalfLine, &SpinSet::ising(), Site::line(0))
            .unwrap();
        assert_eq!(n, Neighborhood::Finite(Region::single(Site::line(1))));
    }

    #[test]
    fn grid_respects_edges() {
        // 2x3 grid: site (0,0) has neighbors (1,0) and (0,1) only.
        let phi = Potential::potts(1.0);
        let lat = Lattice::Grid { w: 2, h: 3 };
        let n = phi
            .neighborhood(&lat, &SpinSet::labels(3).unwrap(), Site::plane(0, 0))
            .unwrap();
        let expect: Region = [Site::plane(1, 0), Site::plane(0, 1)].into_iter().collect();
        assert_eq!(n, Neighborhood::Finite(expect));

        // Total bond count on the 2x3 grid: 3 vertical pairs * 2 + ... = 7.
        let all: Region = lat.sites().unwrap().into_iter().collect();
        let terms = phi
            .terms_touching(&lat, &SpinSet::labels(3).unwrap(), &all)
            .unwrap();
        assert_eq!(terms.len(), 7);
    }

    #[test]
    fn potts_counts_equal_neighbors() {
        let phi = Potential::potts(0.5);
        let s = SpinSet::labels(3).unwrap();
        let t = TailPattern::constant("zero", Spin(0));
        let sigma = Configuration::tail_only(t).set(Site::line(1), Spin(2));
        // Bonds {-1,0}, {0,1}, {1,2} touch {0,1}: values -0.5, 0, 0.
        let h = phi
            .hamiltonian(&Lattice::Line, &s, &Region::segment(0, 1), &sigma)
            .unwrap();
        assert!((h + 0.5).abs() < 1e-15);
    }

    #[test]
    fn star_full_series_at_hub() {
        let phi = Potential::star();
        let s = SpinSet::labels(2).unwrap(); // values 0, 1
        let ones = Configuration::tail_only(TailPattern::constant("ones", Spin(1)));
        let h = phi
            .hamiltonian(&Lattice::HalfLine, &s, &site0(), &ones)
            .unwrap();
        assert!((h - ZETA_2).abs() < 1e-15);

        // Independent series oracle including an override: zero out site 2.
        let sigma = ones.set(Site::line(2), Spin(0));
        let h2 = phi
            .hamiltonian(&Lattice::HalfLine, &s, &site0(), &sigma)
            .unwrap();
        let mut oracle = 0.0;
        let n_max = 200_000u64;
        for n in 1..=n_max {
            let v = s.value(sigma.value(Site::line(n as i64)));
            oracle += v / (n as f64 * n as f64);
        }
        // Euler-Maclaurin tail for the all-ones remainder.
        let nf = n_max as f64;
        oracle += 1.0 / nf - 1.0 / (2.0 * nf * nf) + 1.0 / (6.0 * nf * nf * nf);
        assert!(
            (h2 - oracle).abs() < 1e-12,
            "closed form {h2} vs series {oracle}"
        );
    }

    #[test]
    fn star_away_from_hub_is_finite_sum() {
        let phi = Potential::star();
        let s = SpinSet::labels(2).unwrap();
        let ones = Configuration::tail_only(TailPattern::constant("ones", Spin(1)));
        let lam = Region::segment(2, 3);
        let h = phi.hamiltonian(&Lattice::HalfLine, &s, &lam, &ones).unwrap();
        assert!((h - (1.0 / 4.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn star_rejects_non_constant_tails_and_term_walks() {
        let phi = Potential::star();
        let s = SpinSet::labels(2).unwrap();
        let striped = Configuration::tail_only(
            TailPattern::line("stripe", vec![Spin(0), Spin(1)]).unwrap(),
        );
        assert!(matches!(
            phi.hamiltonian(&Lattice::HalfLine, &s, &site0(), &striped),
            Err(Error::UnsupportedTail(_))
        ));
        assert!(matches!(
            phi.boundary(&Lattice::HalfLine, &s, &site0()),
            Err(Error::InfiniteRange(_))
        ));
        assert_eq!(
            phi.neighborhood(&Lattice::HalfLine, &s, Site::line(0)).unwrap(),
            Neighborhood::Infinite
        );
        assert_eq!(
            phi.neighborhood(&Lattice::HalfLine, &s, Site::line(7)).unwrap(),
            Neighborhood::Finite(Region::single(Site::line(0)))
        );
    }

    #[test]
    fn shifts_add_constants() {
        let bond: Region = [Site::line(0), Site::line(1)].into_iter().collect();
        let phi = Potential::shifted(Potential::ising(1.0), vec![(bond, 0.5)]).unwrap();
        let base = Potential::ising(1.0);
        let s = SpinSet::ising();
        for sigma in [
            Configuration::tail_only(plus_tail()),
            Configuration::tail_only(plus_tail()).set(Site::line(0), Spin(0)),
        ] {
            let h_base = base
                .hamiltonian(&Lattice::Line, &s, &site0(), &sigma)
                .unwrap();
            let h_shift = phi
                .hamiltonian(&Lattice::Line, &s, &site0(), &sigma)
                .unwrap();
            assert!((h_shift - h_base - 0.5).abs() < 1e-15);
        }
        // A region not touching the shifted bond sees no change.
        let far = Region::single(Site::line(10));
        let sigma = Configuration::tail_only(plus_tail());
        assert_eq!(
            phi.hamiltonian(&Lattice::Line, &s, &far, &sigma).unwrap(),
            base.hamiltonian(&Lattice::Line, &s, &far, &sigma).unwrap()
        );
    }

    #[test]
    fn anchored_custom_pair_is_a_single_bond() {
        // The single-bond potential `Phi_A(sigma) = sigma(0)` iff A = {0,1}.
        let s = SpinSet::labels(2).unwrap();
        let phi = Potential::custom_pair(vec![PairEntry {
            base: Some(Site::line(0)),
            offset: (1, 0),
            table: vec![0.0, 0.0, 1.0, 1.0], // value(a) regardless of b
        }]);
        let zero_tail = Configuration::tail_only(TailPattern::constant("z", Spin(0)));
        let one_at_origin = zero_tail.set(Site::line(0), Spin(1));
        let h0 = phi
            .hamiltonian(&Lattice::Line, &s, &site0(), &one_at_origin)
            .unwrap();
        assert_eq!(h0, 1.0);
        // Far regions see no term at all.
        let far = Region::single(Site::line(5));
        assert_eq!(
            phi.terms_touching(&Lattice::Line, &s, &far).unwrap().len(),
            0
        );
        // H_{2} = 0: the bond {0,1} does not touch {2}.
        let h2 = phi
            .hamiltonian(&Lattice::Line, &s, &Region::single(Site::line(2)), &one_at_origin)
            .unwrap();
        assert_eq!(h2, 0.0);
    }

    #[test]
    fn direct_sum_separates() {
        let lat = Lattice::Product(vec![Lattice::Line, Lattice::Line]);
        let spins = SpinSet::ising();
        let phi = Potential::direct_sum(vec![Potential::ising(1.0), Potential::potts(0.7)])
            .unwrap();
        let t = TailPattern::product("pp", vec![plus_tail(), plus_tail()]).unwrap();
        let sigma = Configuration::tail_only(t)
            .set(Site::line(0), Spin(0))
            .set(Site::line(1).tagged(1), Spin(0));
        let lam: Region = [Site::line(0), Site::line(1).tagged(1)].into_iter().collect();
        let h = phi.hamiltonian(&lat, &spins, &lam, &sigma).unwrap();

        let h0 = Potential::ising(1.0)
            .hamiltonian(
                &Lattice::Line,
                &spins,
                &lam.project(0),
                &sigma.project(0).unwrap(),
            )
            .unwrap();
        let h1 = Potential::potts(0.7)
            .hamiltonian(
                &Lattice::Line,
                &spins,
                &lam.project(1),
                &sigma.project(1).unwrap(),
            )
            .unwrap();
        assert!((h - (h0 + h1)).abs() < 1e-15);
    }

    #[test]
    fn term_locality() {
        // Term evaluation ignores sites outside the support.
        let phi = Potential::ising(1.0);
        let s = SpinSet::ising();
        let terms = phi
            .terms_touching(&Lattice::Line, &s, &site0())
            .unwrap();
        assert_eq!(terms.len(), 2);
        let a = Configuration::tail_only(plus_tail()).set(Site::line(0), Spin(0));
        for t in &terms {
            let mut b = a.clone();
            for far in [Site::line(40), Site::line(-17)] {
                assert!(!t.support().contains(far));
                b = b.set(far, Spin(0));
            }
            assert_eq!(t.eval(&a), t.eval(&b));
        }
    }
}
