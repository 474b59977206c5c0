//! Deterministic pseudo-random configurations, pairs and algebra elements.
//!
//! Everything is driven by a seeded ChaCha stream so that suite runs are
//! reproducible; samplers scatter overrides over a centred finite window
//! (or the whole lattice when it is finite), which keeps every drawn
//! configuration inside the fertile class of its tail.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Configuration, Spin, TailPattern};
use crate::error::Result;
use crate::genetic::AlgebraElement;
use crate::lattice::{Lattice, Site};
use crate::model::Model;

/// The crate-wide RNG: a named, seedable stream cipher generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sites eligible for random overrides: a centred window of half-width
/// `half_width` on infinite lattices, every site on finite ones.
pub fn sample_window(lattice: &Lattice, half_width: i64) -> Vec<Site> {
    match lattice {
        Lattice::Line => (-half_width..=half_width).map(Site::line).collect(),
        Lattice::HalfLine => (0..=2 * half_width).map(Site::line).collect(),
        Lattice::Plane => {
            let mut out = Vec::new();
            for x in -half_width..=half_width {
                for y in -half_width..=half_width {
                    out.push(Site::plane(x, y));
                }
            }
            out
        }
        Lattice::Grid { .. } => lattice.sites().expect("grids are finite"),
        Lattice::Product(fs) => {
            let mut out = Vec::new();
            for (tag, f) in fs.iter().enumerate() {
                for s in sample_window(f, half_width) {
                    out.push(s.tagged(tag as u8));
                }
            }
            out
        }
    }
}

/// One random configuration over `tail`: up to `scatter` window sites get
/// uniformly random labels.
pub fn sample_config(
    model: &Model,
    tail: &Arc<TailPattern>,
    half_width: i64,
    scatter: usize,
    rng: &mut ChaCha8Rng,
) -> Configuration {
    let window = sample_window(model.lattice(), half_width);
    let q = model.spins().q();
    let mut c = Configuration::tail_only(tail.clone());
    let n = rng.gen_range(0..=scatter);
    for _ in 0..n {
        let s = window[rng.gen_range(0..window.len())];
        c = c.set(s, Spin(rng.gen_range(0..q)));
    }
    c
}

/// Random same-class pairs whose discrepancy has at most `max_diff` sites.
pub fn sample_pairs(
    model: &Model,
    tail: &Arc<TailPattern>,
    half_width: i64,
    max_diff: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Configuration, Configuration)>> {
    let window = sample_window(model.lattice(), half_width);
    let q = model.spins().q();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let zeta = sample_config(model, tail, half_width, max_diff, rng);
        let mut eta = zeta.clone();
        let k = rng.gen_range(0..=max_diff);
        for _ in 0..k {
            let s = window[rng.gen_range(0..window.len())];
            eta = eta.set(s, Spin(rng.gen_range(0..q)));
        }
        model.validate_config(&zeta)?;
        model.validate_config(&eta)?;
        out.push((zeta, eta));
    }
    Ok(out)
}

/// Random elements of the class algebra: up to `support` random basis
/// configurations with coefficients uniform in [-1, 1].
pub fn sample_elements(
    model: &Model,
    tail: &Arc<TailPattern>,
    half_width: i64,
    support: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<AlgebraElement>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.gen_range(1..=support.max(1));
        let mut terms = Vec::with_capacity(n);
        for _ in 0..n {
            let c = sample_config(model, tail, half_width, 3, rng);
            model.validate_config(&c)?;
            terms.push((c, rng.gen_range(-1.0..1.0)));
        }
        out.push(AlgebraElement::from_terms(terms));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::discrepancy;

    #[test]
    fn pairs_are_reproducible_and_bounded() {
        let m = Model::ising_line(1.0);
        let tail = TailPattern::constant("plus", Spin(1));
        let a = sample_pairs(&m, &tail, 4, 6, 50, &mut rng(13)).unwrap();
        let b = sample_pairs(&m, &tail, 4, 6, 50, &mut rng(13)).unwrap();
        assert_eq!(a, b);
        for (z, e) in &a {
            let d = discrepancy(z, e);
            let r = d.region().expect("same tail");
            assert!(r.len() <= 6);
        }
        let c = sample_pairs(&m, &tail, 4, 6, 50, &mut rng(14)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn windows_track_the_lattice() {
        assert_eq!(sample_window(&Lattice::Line, 4).len(), 9);
        assert_eq!(sample_window(&Lattice::HalfLine, 4).len(), 9);
        assert_eq!(sample_window(&Lattice::chain(5), 4).len(), 5);
        let prod = Lattice::Product(vec![Lattice::Line, Lattice::Line]);
        assert_eq!(sample_window(&prod, 2).len(), 10);
    }

    #[test]
    fn elements_stay_in_class() {
        let m = Model::ising_line(0.5);
        let tail = TailPattern::constant("plus", Spin(1));
        let els = sample_elements(&m, &tail, 3, 4, 10, &mut rng(99)).unwrap();
        assert!(els.iter().any(|e| !e.is_zero()));
        for e in &els {
            for (c, _) in e.iter() {
                assert!(discrepancy(c, &Configuration::tail_only(tail.clone())).is_finite());
            }
        }
    }
}
