//! Spin sets, periodic tail patterns and configurations.
//!
//! A configuration assigns a spin label to every lattice site. We only ever
//! manipulate configurations of the form "periodic tail pattern + finitely
//! many overrides"; the override map is kept *canonical* (no entry repeats
//! the tail value underneath it), so two configurations are equal as
//! functions exactly when their representations are equal. Tail patterns are
//! reduced to their minimal period on construction for the same reason.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Region, Site};
use crate::numeric::lcm;

/// A spin label in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin(pub u8);

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The finite single-site state space: `q` labels, each optionally carrying
/// a numeric value used by potentials that multiply spins (Ising-like).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSet {
    values: Vec<f64>,
}

impl SpinSet {
    /// Labels `0..q` valued as themselves (0.0, 1.0, ...).
    pub fn labels(q: u8) -> Result<Self> {
        Self::with_values((0..q).map(f64::from).collect())
    }

    /// The classical two-state set with numeric values -1 and +1.
    pub fn ising() -> Self {
        SpinSet {
            values: vec![-1.0, 1.0],
        }
    }

    pub fn with_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.len() > u8::MAX as usize {
            return Err(Error::InvalidModel(format!(
                "spin set needs 2..=255 labels, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("non-finite spin value".into()));
        }
        Ok(SpinSet { values })
    }

    pub fn q(&self) -> u8 {
        self.values.len() as u8
    }

    pub fn value(&self, s: Spin) -> f64 {
        self.values[s.0 as usize]
    }

    pub fn contains(&self, s: Spin) -> bool {
        (s.0 as usize) < self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = Spin> {
        (0..self.q()).map(Spin)
    }
}

// ---------------------------------------------------------------------------
// tail patterns
// ---------------------------------------------------------------------------

/// The eventually-repeating part of a configuration: a doubly periodic
/// pattern (period 1 in unused directions), or a tuple of factor patterns on
/// a product lattice. Identity (`==`, ordering, hashing) is by *content*,
/// never by the display id, and the stored period is always minimal, so
/// pattern equality coincides with pointwise equality of the induced
/// functions.
#[derive(Debug, Clone)]
pub struct TailPattern {
    id: String,
    kind: TailKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum TailKind {
    Periodic {
        px: usize,
        py: usize,
        /// Row-major: entry `(x, y)` lives at `y * px + x`.
        table: Vec<Spin>,
    },
    Product(Vec<Arc<TailPattern>>),
}

impl PartialEq for TailPattern {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for TailPattern {}
impl PartialOrd for TailPattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TailPattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.kind.cmp(&other.kind)
    }
}
impl Hash for TailPattern {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
    }
}

impl TailPattern {
    /// Constant pattern.
    pub fn constant(id: impl Into<String>, s: Spin) -> Arc<Self> {
        Arc::new(TailPattern {
            id: id.into(),
            kind: TailKind::Periodic {
                px: 1,
                py: 1,
                table: vec![s],
            },
        })
    }

    /// One-dimensional pattern repeating `labels` along the x axis.
    pub fn line(id: impl Into<String>, labels: Vec<Spin>) -> Result<Arc<Self>> {
        let px = labels.len();
        Self::grid(id, px, 1, labels)
    }

    /// Two-dimensional pattern with x-period `px`, y-period `py` and a
    /// row-major table of `px * py` labels.
    pub fn grid(id: impl Into<String>, px: usize, py: usize, table: Vec<Spin>) -> Result<Arc<Self>> {
        if px == 0 || py == 0 || table.len() != px * py {
            return Err(Error::InvalidModel(format!(
                "tail table must hold px*py = {}*{} labels, got {}",
                px,
                py,
                table.len()
            )));
        }
        let (px, py, table) = minimize_period(px, py, table);
        Ok(Arc::new(TailPattern {
            id: id.into(),
            kind: TailKind::Periodic { px, py, table },
        }))
    }

    /// Tuple pattern for a product lattice: factor `i` uses `factors[i]`.
    pub fn product(id: impl Into<String>, factors: Vec<Arc<TailPattern>>) -> Result<Arc<Self>> {
        if factors.is_empty() {
            return Err(Error::InvalidModel("product tail needs factors".into()));
        }
        Ok(Arc::new(TailPattern {
            id: id.into(),
            kind: TailKind::Product(factors),
        }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Value at a site; product patterns dispatch on the site tag.
    pub fn value(&self, s: Site) -> Spin {
        match &self.kind {
            TailKind::Periodic { px, py, table } => {
                let x = s.x.rem_euclid(*px as i64) as usize;
                let y = s.y.rem_euclid(*py as i64) as usize;
                table[y * px + x]
            }
            TailKind::Product(fs) => fs
                .get(s.tag as usize)
                .unwrap_or_else(|| panic!("site tag {} outside product tail", s.tag))
                .value(s.untagged()),
        }
    }

    /// Factor patterns of a product tail; a plain tail has none.
    pub fn factors(&self) -> Option<&[Arc<TailPattern>]> {
        match &self.kind {
            TailKind::Product(fs) => Some(fs),
            TailKind::Periodic { .. } => None,
        }
    }

    /// Minimal `(px, py)` period of a plain tail; `None` for product tails.
    pub fn period(&self) -> Option<(usize, usize)> {
        match &self.kind {
            TailKind::Periodic { px, py, .. } => Some((*px, *py)),
            TailKind::Product(_) => None,
        }
    }

    /// `Some(label)` when the pattern is constant.
    pub fn as_constant(&self) -> Option<Spin> {
        match &self.kind {
            TailKind::Periodic { table, .. } if table.len() == 1 => Some(table[0]),
            _ => None,
        }
    }

    /// Largest spin label used anywhere in the pattern.
    pub fn max_label(&self) -> u8 {
        match &self.kind {
            TailKind::Periodic { table, .. } => table.iter().map(|s| s.0).max().unwrap_or(0),
            TailKind::Product(fs) => fs.iter().map(|f| f.max_label()).max().unwrap_or(0),
        }
    }

    /// Content-derived key naming the asymptotic class of configurations
    /// built over this pattern. Equal keys iff equal pattern functions.
    pub fn class_key(&self) -> String {
        match &self.kind {
            TailKind::Periodic { px, py, table } => {
                if table.len() == 1 {
                    format!("const{}", table[0])
                } else {
                    let labels: Vec<String> = table.iter().map(|s| s.to_string()).collect();
                    if *py == 1 {
                        format!("p{}:{}", px, labels.join(","))
                    } else {
                        format!("p{}x{}:{}", px, py, labels.join(","))
                    }
                }
            }
            TailKind::Product(fs) => {
                let keys: Vec<String> = fs.iter().map(|f| f.class_key()).collect();
                format!("prod[{}]", keys.join(";"))
            }
        }
    }
}

impl fmt::Display for TailPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// Shrink `(px, py)` to the minimal period representing the same function.
fn minimize_period(px: usize, py: usize, table: Vec<Spin>) -> (usize, usize, Vec<Spin>) {
    let at = |x: usize, y: usize| table[y * px + x];
    let mut best_px = px;
    for d in 1..px {
        if px % d == 0 && (0..py).all(|y| (0..px).all(|x| at(x, y) == at(x % d, y))) {
            best_px = d;
            break;
        }
    }
    let mut best_py = py;
    for e in 1..py {
        if py % e == 0 && (0..py).all(|y| (0..best_px).all(|x| at(x, y) == at(x, y % e))) {
            best_py = e;
            break;
        }
    }
    if best_px == px && best_py == py {
        return (px, py, table);
    }
    let mut reduced = Vec::with_capacity(best_px * best_py);
    for y in 0..best_py {
        for x in 0..best_px {
            reduced.push(at(x, y));
        }
    }
    (best_px, best_py, reduced)
}

// ---------------------------------------------------------------------------
// configurations
// ---------------------------------------------------------------------------

/// A spin configuration: tail pattern plus canonical finite overrides.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    tail: Arc<TailPattern>,
    overrides: BTreeMap<Site, Spin>,
}

impl Configuration {
    /// The pure tail configuration.
    pub fn tail_only(tail: Arc<TailPattern>) -> Self {
        Configuration {
            tail,
            overrides: BTreeMap::new(),
        }
    }

    /// Build from raw overrides, dropping every entry that repeats the tail
    /// value at its site. This is the canonicalisation step all constructors
    /// funnel through.
    pub fn canonical(
        tail: Arc<TailPattern>,
        raw: impl IntoIterator<Item = (Site, Spin)>,
    ) -> Self {
        let overrides = raw
            .into_iter()
            .filter(|&(site, spin)| tail.value(site) != spin)
            .collect();
        Configuration { tail, overrides }
    }

    pub fn tail(&self) -> &Arc<TailPattern> {
        &self.tail
    }

    pub fn overrides(&self) -> &BTreeMap<Site, Spin> {
        &self.overrides
    }

    pub fn value(&self, s: Site) -> Spin {
        self.overrides
            .get(&s)
            .copied()
            .unwrap_or_else(|| self.tail.value(s))
    }

    /// Functional update; the result is canonical again.
    pub fn set(&self, s: Site, spin: Spin) -> Self {
        let mut overrides = self.overrides.clone();
        if self.tail.value(s) == spin {
            overrides.remove(&s);
        } else {
            overrides.insert(s, spin);
        }
        Configuration {
            tail: Arc::clone(&self.tail),
            overrides,
        }
    }

    /// All sites whose value is spelled out explicitly.
    pub fn support(&self) -> Region {
        self.overrides.keys().copied().collect()
    }

    /// Combine per-factor configurations into one on the product lattice.
    pub fn product(id: impl Into<String>, factors: &[Configuration]) -> Result<Self> {
        let tails: Vec<_> = factors.iter().map(|c| Arc::clone(&c.tail)).collect();
        let tail = TailPattern::product(id, tails)?;
        let raw = factors.iter().enumerate().flat_map(|(i, c)| {
            c.overrides
                .iter()
                .map(move |(&s, &v)| (s.tagged(i as u8), v))
        });
        Ok(Configuration::canonical(tail, raw.collect::<Vec<_>>()))
    }

    /// Restrict a product configuration to factor `tag`.
    pub fn project(&self, tag: u8) -> Result<Self> {
        let factors = self.tail.factors().ok_or_else(|| {
            Error::InvalidModel("project needs a configuration on a product lattice".into())
        })?;
        let tail = factors
            .get(tag as usize)
            .ok_or_else(|| Error::InvalidModel(format!("no factor {tag}")))?;
        let raw: Vec<_> = self
            .overrides
            .iter()
            .filter(|(s, _)| s.tag == tag)
            .map(|(&s, &v)| (s.untagged(), v))
            .collect();
        Ok(Configuration::canonical(Arc::clone(tail), raw))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tail.id())?;
        if !self.overrides.is_empty() {
            write!(f, "{{")?;
            for (i, (s, v)) in self.overrides.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}:{v}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// discrepancy
// ---------------------------------------------------------------------------

/// Where two configurations disagree: on a finite set of sites, or on an
/// infinite one (different asymptotic behaviour).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrepancy {
    Finite(Region),
    Macroscopic,
}

impl Discrepancy {
    pub fn is_finite(&self) -> bool {
        matches!(self, Discrepancy::Finite(_))
    }

    pub fn region(&self) -> Option<&Region> {
        match self {
            Discrepancy::Finite(r) => Some(r),
            Discrepancy::Macroscopic => None,
        }
    }
}

/// Compare two tail patterns as functions. Periodic patterns are compared
/// over one fundamental domain of the least common period, which decides
/// equality everywhere; patterns of different shape (plain vs. product,
/// mismatched factor counts) differ on infinitely many sites.
pub fn tails_agree_cofinitely(a: &TailPattern, b: &TailPattern) -> Discrepancy {
    match (&a.kind, &b.kind) {
        (
            TailKind::Periodic {
                px: apx,
                py: apy,
                table: _,
            },
            TailKind::Periodic {
                px: bpx,
                py: bpy,
                table: _,
            },
        ) => {
            let lx = lcm(*apx, *bpx);
            let ly = lcm(*apy, *bpy);
            for y in 0..ly as i64 {
                for x in 0..lx as i64 {
                    let s = Site::plane(x, y);
                    if a.value(s) != b.value(s) {
                        return Discrepancy::Macroscopic;
                    }
                }
            }
            Discrepancy::Finite(Region::new())
        }
        (TailKind::Product(fa), TailKind::Product(fb)) => {
            if fa.len() != fb.len() {
                return Discrepancy::Macroscopic;
            }
            for (x, y) in fa.iter().zip(fb) {
                if tails_agree_cofinitely(x, y) == Discrepancy::Macroscopic {
                    return Discrepancy::Macroscopic;
                }
            }
            Discrepancy::Finite(Region::new())
        }
        _ => Discrepancy::Macroscopic,
    }
}

/// The set of sites where `a` and `b` differ, classified as finite or
/// macroscopic. With equal tails the difference hides inside the override
/// supports, so a finite scan decides it exactly.
pub fn discrepancy(a: &Configuration, b: &Configuration) -> Discrepancy {
    match tails_agree_cofinitely(&a.tail, &b.tail) {
        Discrepancy::Macroscopic => Discrepancy::Macroscopic,
        Discrepancy::Finite(_) => {
            let candidates = a.support().union(&b.support());
            let region = candidates
                .iter()
                .filter(|&s| a.value(s) != b.value(s))
                .collect();
            Discrepancy::Finite(region)
        }
    }
}
