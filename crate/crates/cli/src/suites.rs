//! The verification suites behind `gga verify`.
//!
//! Every suite pins its tolerances in code and reports one [`Check`] per
//! verified inequality. Sampling is driven by the seedable generator in
//! [`gga_core::sampling`], so identical model + seed + sample count yields
//! a byte-identical report body.

use std::collections::BTreeSet;

use rand::Rng as _;
use serde_json::json;

use gga_core::evolution::IDEMPOTENT_SUPPORT_BOUND;
use gga_core::numeric::ZETA_2;
use gga_core::sampling;
use gga_core::{
    check_potential_equivalence, check_tau_isomorphism, check_tensor_factorization, discrepancy,
    equivalence_probe, AlgebraElement, ClusterPartition, Configuration, Discrepancy, Error,
    FiniteModel, Lattice, Model, PairElement, Potential, Region, Site, Spin, SpinSet, SpatialMap,
    TailPattern, TauTransform, DEFAULT_ENUM_CAP,
};

use crate::report::{Check, Report};
use crate::spec::{BuiltModel, CliError, CliResult, PotentialSpec};

use std::sync::Arc;

/// The available suite names, in canonical order.
pub const SUITES: &[&str] = &[
    "markov",
    "nonassoc",
    "decomposition",
    "equiv-potentials",
    "tau-iso",
    "functionals",
    "tensor",
    "finite-oracle",
    "evo-factorization",
    "em-ideal-iso",
    "counterexample",
    "embed-finite",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Enumeration cap for the brute-force oracle, overridable via the
/// `GGA_ENUM_CAP` environment variable.
pub fn enum_cap() -> usize {
    std::env::var("GGA_ENUM_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// Sample count used when the caller does not pass `--samples`. Suites
/// that enumerate exhaustively ignore the count and report what they ran.
fn default_samples(suite: &str) -> usize {
    match suite {
        "markov" | "evo-factorization" => 1000,
        "equiv-potentials" | "tau-iso" => 500,
        "functionals" | "finite-oracle" => 200,
        "tensor" => 100,
        "em-ideal-iso" | "embed-finite" => 50,
        _ => 1,
    }
}

/// Run one verification suite against a parsed model.
pub fn run_suite(
    bm: &BuiltModel,
    suite: &str,
    seed: u64,
    samples: Option<usize>,
) -> CliResult<Report> {
    let n = samples.unwrap_or_else(|| default_samples(suite));
    let (used, checks) = match suite {
        "markov" => markov(bm, seed, n)?,
        "nonassoc" => nonassoc(bm)?,
        "decomposition" => decomposition(bm)?,
        "equiv-potentials" => equiv_potentials(bm, seed, n)?,
        "tau-iso" => tau_iso(bm, seed, n)?,
        "functionals" => functionals(bm, seed, n)?,
        "tensor" => tensor(bm, seed, n)?,
        "finite-oracle" => finite_oracle(bm, seed, n)?,
        "evo-factorization" => evo_factorization(bm, seed, n)?,
        "em-ideal-iso" => em_ideal_iso(bm, seed, n)?,
        "counterexample" => counterexample(bm)?,
        "embed-finite" => embed_finite(bm, seed, n)?,
        _ => {
            return Err(usage(format!(
                "unknown suite {suite}; expected one of: {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(Report::new(suite, seed, used, checks))
}

/// First declared tail whose tail-only configuration the model accepts
/// (product lattices reject plain tails, and vice versa).
fn valid_tails(bm: &BuiltModel) -> Vec<&Arc<TailPattern>> {
    bm.tails
        .values()
        .filter(|t| {
            bm.model
                .validate_config(&Configuration::tail_only(Arc::clone(t)))
                .is_ok()
        })
        .collect()
}

fn first_valid_tail(bm: &BuiltModel) -> CliResult<&Arc<TailPattern>> {
    valid_tails(bm)
        .first()
        .copied()
        .ok_or_else(|| usage("the model spec declares no tail usable on its lattice"))
}

/// Change a site to the cyclically next spin label.
fn flip(model: &Model, c: &Configuration, s: Site) -> Configuration {
    let q = model.spins().q();
    c.set(s, Spin((c.value(s).0 + 1) % q))
}

/// Two adjacent sites near the middle of a small probe window.
fn probe_pair(model: &Model) -> CliResult<(Site, Site)> {
    let w = sampling::sample_window(model.lattice(), 1);
    if w.len() < 2 {
        return Err(usage("the suite needs a lattice with at least two sites"));
    }
    let i = (w.len() - 1) / 2;
    Ok((w[i], w[i + 1]))
}

/// Markov property of both coefficient families under three cluster
/// partitions, plus the two-offspring complement identity and its
/// logistic closed form on the whole-lattice partition.
fn markov(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let partitions = [
        ("atomic", ClusterPartition::atomic()),
        ("unique", ClusterPartition::unique()),
        ("blocks2", ClusterPartition::blocks(2)?),
    ];
    let mut checks = Vec::new();
    for (name, part) in partitions {
        let model = Model::new(
            m.lattice().clone(),
            m.spins().clone(),
            m.potential().clone(),
            part,
        )?;
        let mut rng = sampling::rng(seed);
        let pairs = sampling::sample_pairs(&model, tail, 8, 6, n, &mut rng)?;
        let mut dev_g: f64 = 0.0;
        let mut dev_e: f64 = 0.0;
        for (zeta, eta) in &pairs {
            let cv = model.coefficient_vector(zeta, eta)?;
            dev_g = dev_g.max((cv.sum() - 1.0).abs());
            let em = model.evo_coefficient_matrix(zeta, eta)?;
            dev_e = dev_e.max((em.sum() - 1.0).abs());
        }
        checks.push(Check::at_most(format!("markov-sum-{name}"), dev_g, 1e-12));
        checks.push(Check::at_most(format!("evolution-sum-{name}"), dev_e, 1e-12));
        if name != "unique" {
            continue;
        }
        // With the whole lattice as one cluster the only offspring are the
        // parents themselves, so the two coefficients are complementary
        // and each one is a logistic function of the energy difference.
        let mut dev_c: f64 = 0.0;
        let mut dev_l: f64 = 0.0;
        for (zeta, eta) in &pairs {
            let d = match discrepancy(zeta, eta) {
                Discrepancy::Finite(d) if !d.is_empty() => d,
                _ => continue,
            };
            let cv = model.coefficient_vector(zeta, eta)?;
            dev_c = dev_c.max((cv.get(zeta) + cv.get(eta) - 1.0).abs());
            let lz = model.log_boltzmann(&d, zeta)?;
            let le = model.log_boltzmann(&d, eta)?;
            let logistic = 1.0 / (1.0 + (le - lz).exp());
            dev_l = dev_l.max((cv.get(zeta) - logistic).abs());
        }
        checks.push(Check::at_most("unique-complement", dev_c, 1e-15));
        checks.push(Check::at_most("unique-logistic", dev_l, 1e-12));
    }
    Ok((n, checks))
}

/// A fixed three-configuration witness of non-associativity, checked
/// against its hand expansion, plus the two-dimensional contrast: with
/// only two basis configurations there is no triple of distinct elements,
/// so the scanned associator maximum is zero.
fn nonassoc(bm: &BuiltModel) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let (s0, s1) = probe_pair(m)?;
    let base = Configuration::tail_only(Arc::clone(tail));
    let sigma = flip(m, &flip(m, &base, s0), s1);
    let eta = flip(m, &base, s1);
    let zeta = base;

    let c_ez = m.coefficient_vector(&eta, &zeta)?;
    let c_sz = m.coefficient_vector(&sigma, &zeta)?;
    let c_se = m.coefficient_vector(&sigma, &eta)?;
    let expected = (c_ez.get(&eta) - c_sz.get(&sigma)) * c_se.get(&sigma)
        + c_ez.get(&zeta) * c_sz.get(&sigma);
    let assoc = m.associator(
        &AlgebraElement::basis(sigma.clone()),
        &AlgebraElement::basis(eta),
        &AlgebraElement::basis(zeta),
    )?;
    // associator computes (uv)w - u(vw); the expansion above carries the
    // opposite orientation.
    let got = -assoc.coeff(&sigma);

    let mut checks = vec![
        Check::at_least("associator-nonzero", got.abs(), 1e-9)
            .with_witness(json!({ "coefficient": got })),
        Check::at_most("associator-expansion", (got - expected).abs(), 1e-12),
    ];

    // One-site model: two basis configurations, hence no distinct triple.
    let tiny = Model::new(
        Lattice::Grid { w: 1, h: 1 },
        SpinSet::ising(),
        Potential::ising(1.0),
        ClusterPartition::atomic(),
    )?;
    let t = TailPattern::grid("site", 1, 1, vec![Spin(0)])?;
    let c0 = Configuration::tail_only(t);
    let c1 = c0.set(Site::plane(0, 0), Spin(1));
    let basis = [c0, c1];
    let mut max_dev: f64 = 0.0;
    let mut triples = 0;
    for a in &basis {
        for b in &basis {
            for c in &basis {
                if a == b || b == c || a == c {
                    continue;
                }
                let assoc = tiny.associator(
                    &AlgebraElement::basis(a.clone()),
                    &AlgebraElement::basis(b.clone()),
                    &AlgebraElement::basis(c.clone()),
                )?;
                max_dev = max_dev.max(assoc.norm_inf());
                triples += 1;
            }
        }
    }
    checks.push(
        Check::at_most("two-dim-associator", max_dev, 1e-15)
            .with_witness(json!({ "distinct_triples": triples })),
    );
    Ok((1, checks))
}

/// Rebuild every nearby basis element inside the principal ideal of the
/// reference tail, exhaustively over discrepancies of up to four sites in
/// a seven-site window.
fn decomposition(bm: &BuiltModel) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let eta = Configuration::tail_only(Arc::clone(tail));
    let mut window = sampling::sample_window(m.lattice(), 3);
    window.truncate(7);
    let q = m.spins().q();

    let mut cases = 0usize;
    let mut max_res: f64 = 0.0;
    let mut max_products = 0usize;
    for mask in 0u32..(1 << window.len()) {
        let d: Vec<Site> = window
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        if d.len() > 4 {
            continue;
        }
        // Every assignment that differs from the reference at each chosen
        // site; one per site for q = 2.
        let mut idx = vec![0u8; d.len()];
        'assignments: loop {
            let mut zeta = eta.clone();
            for (k, &s) in d.iter().enumerate() {
                zeta = zeta.set(s, Spin((eta.value(s).0 + 1 + idx[k]) % q));
            }
            let rep = m.express_in_principal_ideal(&eta, &zeta)?;
            max_res = max_res.max(rep.residual);
            max_products = max_products.max(rep.products_used);
            cases += 1;
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break 'assignments;
                }
                idx[k] += 1;
                if idx[k] <= q - 2 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
    let checks = vec![Check::at_most("ideal-reconstruction", max_res, 1e-10)
        .with_witness(json!({ "cases": cases, "max_products": max_products }))];
    Ok((cases, checks))
}

/// Constant shifts of the potential leave every coefficient unchanged; a
/// genuine coupling change does not.
fn equiv_potentials(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let w = sampling::sample_window(m.lattice(), 2);
    if w.len() < 3 {
        return Err(usage("the equivalence suite needs at least three sites"));
    }
    // Dyadic constants: representable exactly, so the shifted Hamiltonian
    // differs by an exactly reproducible amount.
    let shifts = vec![
        ([w[0]].into_iter().collect::<Region>(), 0.5),
        ([w[0], w[1]].into_iter().collect::<Region>(), -0.25),
        ([w[2]].into_iter().collect::<Region>(), 0.125),
    ];
    let shifted = Model::new(
        m.lattice().clone(),
        m.spins().clone(),
        Potential::shifted(m.potential().clone(), shifts)?,
        m.clusters().clone(),
    )?;
    let mut rng = sampling::rng(seed);
    let pairs = sampling::sample_pairs(m, tail, 6, 4, n, &mut rng)?;
    let rep = check_potential_equivalence(m, &shifted, &pairs)?;
    let mut checks = vec![Check::at_most("equivalent-shift", rep.max_dev, 1e-12)
        .with_witness(json!({ "comparisons": rep.comparisons }))];

    // Negative control: bump the coupling, which changes conditional
    // weights at order one.
    let control_pot = match &bm.spec.potential {
        PotentialSpec::Ising { beta } => Potential::ising(beta + 0.25),
        PotentialSpec::Potts { beta } => Potential::potts(beta + 0.25),
        _ => {
            return Err(usage(
                "the equivalence suite needs an ising or potts potential for its control",
            ))
        }
    };
    let control = Model::new(
        m.lattice().clone(),
        m.spins().clone(),
        control_pot,
        m.clusters().clone(),
    )?;
    let rep2 = check_potential_equivalence(m, &control, &pairs)?;
    checks.push(Check::at_least("inequivalent-control", rep2.max_dev, 1e-3));
    Ok((n, checks))
}

/// A unit translation carries the model onto its image coefficient for
/// coefficient, while the potentials themselves stay inequivalent — the
/// probe exhibits an interior-dependent Hamiltonian difference.
fn tau_iso(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let q = m.spins().q();
    let image = Model::new(
        m.lattice().clone(),
        m.spins().clone(),
        Potential::tau_image(m.potential().clone(), TauTransform::translation(1, 0, q)),
        m.clusters().transformed(&SpatialMap::Translation(1, 0))?,
    )?;
    let tail = first_valid_tail(bm)?;
    let mut rng = sampling::rng(seed);
    let pairs = sampling::sample_pairs(m, tail, 6, 4, n, &mut rng)?;
    let tau = TauTransform::translation(1, 0, q);
    let rep = check_tau_isomorphism(m, &image, &tau, &pairs)?;
    let mut checks = vec![Check::at_most("tau-isomorphism", rep.max_dev, 1e-12)
        .with_witness(json!({ "comparisons": rep.comparisons }))];

    let anchor = Configuration::tail_only(Arc::clone(tail));
    let lam: Region = sampling::sample_window(m.lattice(), 0).into_iter().collect();
    let probe = equivalence_probe(m, &image, &lam, &anchor, 1e-9)?;
    checks.push(
        Check::at_least("inequivalence-spread", probe.spread, 1e-9).with_witness(json!({
            "window": lam.to_string(),
            "witness": probe
                .witness
                .map(|(a, b)| vec![a.to_string(), b.to_string()]),
        })),
    );
    Ok((n, checks))
}

/// The per-class coefficient sums are multiplicative functionals, also on
/// elements mixing two fertile classes (cross products vanish).
fn functionals(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tails = valid_tails(bm);
    let t1 = *tails
        .first()
        .ok_or_else(|| usage("the model spec declares no tail usable on its lattice"))?;
    let t2 = *tails.get(1).unwrap_or(&t1);
    let class1 = m.fertile_class_id(&Configuration::tail_only(Arc::clone(t1)));
    let class2 = m.fertile_class_id(&Configuration::tail_only(Arc::clone(t2)));

    let mut rng = sampling::rng(seed);
    let us1 = sampling::sample_elements(m, t1, 5, 3, n, &mut rng)?;
    let us2 = sampling::sample_elements(m, t2, 5, 2, n, &mut rng)?;
    let vs1 = sampling::sample_elements(m, t1, 5, 2, n, &mut rng)?;
    let vs2 = sampling::sample_elements(m, t2, 5, 3, n, &mut rng)?;
    let mut dev: f64 = 0.0;
    for i in 0..n {
        let u = us1[i].add(&us2[i]);
        let v = vs1[i].add(&vs2[i]);
        let uv = m.product(&u, &v)?;
        for class in [&class1, &class2] {
            let lhs = m.class_functional(class, &uv);
            let rhs = m.class_functional(class, &u) * m.class_functional(class, &v);
            dev = dev.max((lhs - rhs).abs());
        }
    }
    Ok((
        n,
        vec![Check::at_most("functional-multiplicative", dev, 1e-10)],
    ))
}

/// Coefficients of a product model factor through the factor models'
/// coefficients, for both algebra families.
fn tensor(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let factors = split_product(m)?;
    let tail = first_valid_tail(bm)?;
    let mut rng = sampling::rng(seed);
    let pairs = sampling::sample_pairs(m, tail, 4, 3, n, &mut rng)?;
    let rep = check_tensor_factorization(m, &factors, &pairs)?;
    Ok((
        n,
        vec![
            Check::at_most("tensor-genetic", rep.max_genetic_dev, 1e-12)
                .with_witness(json!({ "comparisons": rep.genetic_comparisons })),
            Check::at_most("tensor-evolution", rep.max_evolution_dev, 1e-12)
                .with_witness(json!({ "comparisons": rep.evolution_comparisons })),
        ],
    ))
}

fn split_product(m: &Model) -> CliResult<Vec<Model>> {
    let (lats, pots, cls) = match (m.lattice(), m.potential(), m.clusters()) {
        (Lattice::Product(l), Potential::DirectSum(p), ClusterPartition::Product(c)) => (l, p, c),
        _ => {
            return Err(usage(
                "the tensor suite needs a product lattice with a direct-sum potential \
                 and factor-wise clusters",
            ))
        }
    };
    lats.iter()
        .zip(pots)
        .zip(cls)
        .map(|((lat, pot), cl)| {
            Model::new(lat.clone(), m.spins().clone(), pot.clone(), cl.clone())
                .map_err(Into::into)
        })
        .collect()
}

/// Differential test against exhaustive enumeration on a finite lattice,
/// plus two independent routes to the conditional probabilities and — for
/// two-state atomic-cluster models — the identity between coefficients
/// and conditionals.
fn finite_oracle(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let cap = enum_cap();
    let rep = gga_core::compare_finite_equivalence(m, n, seed, cap)?;
    let mut checks = vec![
        Check::at_most("oracle-genetic", rep.max_genetic_dev, 1e-10)
            .with_witness(json!({ "comparisons": rep.genetic_comparisons })),
        Check::at_most("oracle-evolution", rep.max_evolution_dev, 1e-10)
            .with_witness(json!({ "comparisons": rep.evolution_comparisons })),
    ];

    let fm = FiniteModel::from_model(m)?;
    let table = fm.enumerate_measure(cap)?;
    let tail = first_valid_tail(bm)?;
    let mut rng = sampling::rng(seed.wrapping_add(1));
    let pairs = sampling::sample_pairs(m, tail, 4, 3, n.min(50), &mut rng)?;
    let gibbs = m.spins().q() == 2 && *m.clusters() == ClusterPartition::atomic();
    let mut dev_dlr: f64 = 0.0;
    let mut dev_gibbs: f64 = 0.0;
    for (zeta, eta) in &pairs {
        let d = match discrepancy(zeta, eta) {
            Discrepancy::Finite(d) if !d.is_empty() => d,
            _ => continue,
        };
        let cv = m.coefficient_vector(zeta, eta)?;
        for (sigma, c) in cv.iter() {
            let a = fm.restrict(sigma)?;
            let p = fm.conditional_probability(&table, &a, &d)?;
            let p2 = fm.local_conditional(&a, &d)?;
            dev_dlr = dev_dlr.max((p - p2).abs());
            if gibbs {
                dev_gibbs = dev_gibbs.max((c - p).abs());
            }
        }
    }
    checks.push(Check::at_most("dlr-two-routes", dev_dlr, 1e-10));
    if gibbs {
        checks.push(Check::at_most("gibbs-conditional", dev_gibbs, 1e-10));
    }
    Ok((n, checks))
}

/// Each pair coefficient is the product of the two matching structural
/// coefficients, and the idempotents of the pair algebra are exactly the
/// 0/1 sums of diagonal basis elements.
fn evo_factorization(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let mut rng = sampling::rng(seed);
    let pairs = sampling::sample_pairs(m, tail, 6, 4, n, &mut rng)?;
    let mut dev: f64 = 0.0;
    let mut comparisons = 0usize;
    for (sigma, eta) in &pairs {
        let cv = m.coefficient_vector(sigma, eta)?;
        let em = m.evo_coefficient_matrix(sigma, eta)?;
        for ((zeta, xi), c) in em.iter() {
            dev = dev.max((c - cv.get(zeta) * cv.get(xi)).abs());
            comparisons += 1;
        }
    }
    let mut checks = vec![Check::at_most("evolution-factorization", dev, 1e-14)
        .with_witness(json!({ "comparisons": comparisons }))];

    // Exhaustive idempotent scan: all 0/1 combinations of up to three
    // pair-basis elements drawn from three nearby configurations.
    let (s0, s1) = probe_pair(m)?;
    let base = Configuration::tail_only(Arc::clone(tail));
    let configs = [base.clone(), flip(m, &base, s0), flip(m, &base, s1)];
    let mut pool = Vec::new();
    for a in &configs {
        for b in &configs {
            pool.push((a.clone(), b.clone()));
        }
    }
    let mut cases = 0usize;
    let mut mismatches = 0usize;
    for mask in 0u16..(1 << pool.len()) {
        if mask.count_ones() > 3 {
            continue;
        }
        let chosen: Vec<&(Configuration, Configuration)> = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .collect();
        let mut u = PairElement::zero();
        for (a, b) in &chosen {
            u = u.add(&PairElement::basis(a.clone(), b.clone()));
        }
        let predicted = chosen.iter().all(|(a, b)| a == b);
        let actual = m.is_idempotent(&u, IDEMPOTENT_SUPPORT_BOUND)?;
        if actual != predicted {
            mismatches += 1;
        }
        cases += 1;
    }
    checks.push(
        Check::at_most("idempotent-characterization", mismatches as f64, 0.0)
            .with_witness(json!({ "cases": cases })),
    );
    Ok((n, checks))
}

/// The reference swap carries the fertile pair ideal of one class onto
/// the other's, preserving discrepancies and coefficients; mapping back
/// is the exact inverse.
fn em_ideal_iso(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tails = valid_tails(bm);
    if tails.len() < 2 {
        return Err(usage(
            "the ideal-isomorphism suite needs two reference tails in the model spec",
        ));
    }
    let sigma_ref = Configuration::tail_only(Arc::clone(tails[0]));
    let eta_ref = Configuration::tail_only(Arc::clone(tails[1]));
    if m.fertile_class_id(&sigma_ref) == m.fertile_class_id(&eta_ref) {
        return Err(usage(
            "the reference tails must lie in different fertile classes",
        ));
    }
    let mut rng = sampling::rng(seed);
    let pairs = sampling::sample_pairs(m, tails[0], 5, 3, n, &mut rng)?;
    let rep = m.check_iso_coefficients(&sigma_ref, &eta_ref, &pairs)?;
    Ok((
        n,
        vec![
            Check::at_most("iso-coefficients", rep.max_dev, 1e-12)
                .with_witness(json!({ "comparisons": rep.comparisons })),
            Check::boolean("iso-round-trip", rep.round_trip_exact),
            Check::boolean("iso-discrepancy", rep.discrepancy_preserved),
            Check::boolean("iso-injective", rep.injective),
        ],
    ))
}

/// The inverse-square star model: the coefficient of the all-ones parent
/// against its origin flip hits `1/(1+e^{pi^2/6})`, strictly below every
/// coefficient arising in the all-zeros class with discrepancies in a
/// seven-site window — so the class algebras cannot be isomorphic.
fn counterexample(bm: &BuiltModel) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    if m.spins().q() != 2 {
        return Err(usage("the counterexample suite needs a two-state model"));
    }
    let one = bm.tail("one")?;
    let zero = bm.tail("zero")?;
    let origin = *sampling::sample_window(m.lattice(), 0)
        .first()
        .ok_or_else(|| usage("empty lattice window"))?;

    let xi = Configuration::tail_only(Arc::clone(one));
    let eta = flip(m, &xi, origin);
    let c_star = m.coefficient_vector(&xi, &eta)?.get(&xi);
    let target = 1.0 / (1.0 + ZETA_2.exp());
    let mut checks = vec![Check::at_most(
        "counterexample-value",
        (c_star - target).abs(),
        1e-9,
    )
    .with_witness(json!({ "coefficient": c_star, "closed_form": target }))];

    // Exhaust the all-zeros class over the window: every coefficient
    // stays strictly above the value realised in the all-ones class.
    let window = sampling::sample_window(m.lattice(), 3);
    let zero_base = Configuration::tail_only(Arc::clone(zero));
    let mut configs = Vec::with_capacity(1 << window.len());
    for mask in 0u32..(1 << window.len()) {
        let mut c = zero_base.clone();
        for (i, &s) in window.iter().enumerate() {
            if mask >> i & 1 == 1 {
                c = c.set(s, Spin(1));
            }
        }
        configs.push(c);
    }
    let mut min_c = f64::INFINITY;
    let mut scanned = 0usize;
    for a in &configs {
        for b in &configs {
            for (_, c) in m.coefficient_vector(a, b)?.iter() {
                min_c = min_c.min(c);
            }
            scanned += 1;
        }
    }
    checks.push(
        Check::at_least("strict-inequality", min_c - c_star, 0.0)
            .with_witness(json!({ "min_class_coefficient": min_c, "pairs": scanned })),
    );

    // The hub interacts with every site, so term enumeration around the
    // origin must refuse rather than truncate.
    let lam: Region = [origin].into_iter().collect();
    let guarded = matches!(m.terms_touching(&lam), Err(Error::InfiniteRange(_)));
    checks.push(Check::boolean("infinite-range-guard", guarded));
    Ok((scanned, checks))
}

/// Small basis sets generate subalgebras matching the finite model built
/// on the closure of their discrepancies — and on any larger window.
fn embed_finite(bm: &BuiltModel, seed: u64, n: usize) -> CliResult<(usize, Vec<Check>)> {
    let m = &bm.model;
    let tail = first_valid_tail(bm)?;
    let cap = enum_cap();
    let xi = Configuration::tail_only(Arc::clone(tail));
    let mut rng = sampling::rng(seed);
    let mut dev_min: f64 = 0.0;
    let mut dev_big: f64 = 0.0;
    for _ in 0..n {
        let k = rng.gen_range(1..=3);
        let mut set = BTreeSet::new();
        for _ in 0..k {
            set.insert(sampling::sample_config(m, tail, 3, 2, &mut rng));
        }
        let basis: Vec<Configuration> = set.into_iter().collect();
        let r1 = m.embed_finite_subalgebra(&basis, None, &xi, cap)?;
        dev_min = dev_min.max(r1.max_dev);
        let big = m.closure(&m.closure(&r1.window)?)?;
        let r2 = m.embed_finite_subalgebra(&basis, Some(&big), &xi, cap)?;
        dev_big = dev_big.max(r2.max_dev);
    }
    Ok((
        n,
        vec![
            Check::at_most("embed-minimal", dev_min, 1e-12),
            Check::at_most("embed-enlarged", dev_big, 1e-12),
        ],
    ))
}
