//! JSON model specifications and configuration references.
//!
//! A spec file fully describes one model — lattice, spin set, potential,
//! cluster partition — plus a dictionary of named tail patterns that
//! configuration references point into. Sites are written as flat integer
//! arrays whose reading depends on the lattice: `[x]` on one-dimensional
//! lattices, `[x, y]` on two-dimensional ones, and `[factor, …]` with the
//! factor index prepended on product lattices.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use gga_core::{
    ClusterPartition, Configuration, Lattice, Model, PairEntry, Potential, Region, Site, Spin,
    SpinSet, TailPattern,
};

/// Current spec format version.
pub const SPEC_VERSION: u32 = 1;

/// Errors surfaced to the command line; `Usage` maps to exit code 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gga_core::Error> for CliError {
    fn from(e: gga_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub version: u32,
    pub lattice: LatticeSpec,
    pub spins: SpinSpec,
    pub potential: PotentialSpec,
    pub clusters: ClusterSpec,
    #[serde(default)]
    pub tails: BTreeMap<String, TailSpec>,
    /// Informational only: which Gibbs measure the model is thought of as
    /// carrying. The coefficient pipeline never reads it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LatticeSpec {
    Line,
    HalfLine,
    Plane,
    Grid { w: usize, h: usize },
    Product { factors: Vec<LatticeSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSpec {
    pub q: u8,
    /// Optional numeric values per label; plain labels 0..q otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Ising {
        beta: f64,
    },
    Potts {
        beta: f64,
    },
    Star,
    Pair {
        entries: Vec<PairEntrySpec>,
    },
    Shifted {
        base: Box<PotentialSpec>,
        shifts: Vec<ShiftSpec>,
    },
    DirectSum {
        parts: Vec<PotentialSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntrySpec {
    /// Anchor site; omitted for a translation-invariant family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<i64>>,
    /// Offset `[dx]` or `[dx, dy]` to the partner site.
    pub offset: Vec<i64>,
    /// Row-major `q*q` value table over the two labels.
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub region: Vec<Vec<i64>>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClusterSpec {
    Atomic,
    Unique,
    Blocks { size: u32 },
    FiniteList { parts: Vec<Vec<Vec<i64>>> },
    Product { parts: Vec<ClusterSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TailSpec {
    Constant { label: u8 },
    Line { labels: Vec<u8> },
    Grid { px: usize, py: usize, labels: Vec<u8> },
    /// Factor-wise tail of a product lattice; entries name other tails.
    Product { factors: Vec<String> },
}

/// A configuration reference: a tail name plus overrides, each written as
/// `[[site…], label]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub tail: String,
    #[serde(default)]
    pub overrides: Vec<(Vec<i64>, u8)>,
}

/// Input for `gga embed`: the basis to embed, the boundary condition, and
/// an optional explicitly enlarged window.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedSpec {
    pub basis: Vec<ConfigSpec>,
    pub boundary: ConfigSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enlarged: Option<Vec<Vec<i64>>>,
}

/// A parsed spec together with the model and resolved tails it denotes.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub spec: ModelSpec,
    pub model: Model,
    pub tails: BTreeMap<String, Arc<TailPattern>>,
}

/// Decode a site array relative to a lattice: product lattices consume a
/// leading factor index, two-dimensional lattices take `[x, y]`, the rest
/// take `[x]`.
pub fn parse_site(lattice: &Lattice, raw: &[i64]) -> CliResult<Site> {
    let site = match lattice {
        Lattice::Product(fs) => {
            let (&tag, rest) = raw
                .split_first()
                .ok_or_else(|| usage("empty site array"))?;
            let f = fs
                .get(tag as usize)
                .ok_or_else(|| usage(format!("product factor {tag} out of range")))?;
            parse_site(f, rest)?.tagged(tag as u8)
        }
        _ => match (lattice.dims(), raw) {
            (1, [x]) => Site::line(*x),
            (2, [x, y]) => Site::plane(*x, *y),
            (d, _) => {
                return Err(usage(format!(
                    "site {raw:?} does not match a {d}-dimensional lattice"
                )))
            }
        },
    };
    if !lattice.contains(site) {
        return Err(usage(format!("site {raw:?} is not on the lattice")));
    }
    Ok(site)
}

fn parse_region(lattice: &Lattice, raw: &[Vec<i64>]) -> CliResult<Region> {
    let mut out = Region::new();
    for r in raw {
        out.insert(parse_site(lattice, r)?);
    }
    Ok(out)
}

impl LatticeSpec {
    fn build(&self) -> CliResult<Lattice> {
        Ok(match self {
            LatticeSpec::Line => Lattice::Line,
            LatticeSpec::HalfLine => Lattice::HalfLine,
            LatticeSpec::Plane => Lattice::Plane,
            LatticeSpec::Grid { w, h } => {
                if *w == 0 || *h == 0 {
                    return Err(usage("grid dimensions must be positive"));
                }
                Lattice::Grid { w: *w, h: *h }
            }
            LatticeSpec::Product { factors } => {
                let fs = factors
                    .iter()
                    .map(|f| f.build())
                    .collect::<CliResult<Vec<_>>>()?;
                if fs.iter().any(|f| matches!(f, Lattice::Product(_))) {
                    return Err(usage("product lattices do not nest"));
                }
                Lattice::Product(fs)
            }
        })
    }
}

impl SpinSpec {
    fn build(&self) -> CliResult<SpinSet> {
        match &self.values {
            None => SpinSet::labels(self.q).map_err(Into::into),
            Some(vs) => {
                if vs.len() != self.q as usize {
                    return Err(usage(format!(
                        "spins: q = {} but {} values given",
                        self.q,
                        vs.len()
                    )));
                }
                SpinSet::with_values(vs.clone()).map_err(Into::into)
            }
        }
    }
}

impl PotentialSpec {
    fn build(&self, lattice: &Lattice) -> CliResult<Potential> {
        Ok(match self {
            PotentialSpec::Zero => Potential::Zero,
            PotentialSpec::Ising { beta } => Potential::ising(*beta),
            PotentialSpec::Potts { beta } => Potential::potts(*beta),
            PotentialSpec::Star => Potential::star(),
            PotentialSpec::Pair { entries } => {
                let mut out = Vec::with_capacity(entries.len());
                for e in entries {
                    let base = e
                        .base
                        .as_ref()
                        .map(|b| parse_site(lattice, b))
                        .transpose()?;
                    let offset = match e.offset.as_slice() {
                        [dx] => (*dx, 0),
                        [dx, dy] => (*dx, *dy),
                        _ => return Err(usage("pair offset must be [dx] or [dx, dy]")),
                    };
                    out.push(PairEntry {
                        base,
                        offset,
                        table: e.table.clone(),
                    });
                }
                Potential::custom_pair(out)
            }
            PotentialSpec::Shifted { base, shifts } => {
                let inner = base.build(lattice)?;
                let shifts = shifts
                    .iter()
                    .map(|s| Ok((parse_region(lattice, &s.region)?, s.value)))
                    .collect::<CliResult<Vec<_>>>()?;
                Potential::shifted(inner, shifts)?
            }
            PotentialSpec::DirectSum { parts } => {
                let factors = lattice.factors();
                if parts.len() != factors.len() {
                    return Err(usage(format!(
                        "direct-sum has {} parts but the lattice has {} factors",
                        parts.len(),
                        factors.len()
                    )));
                }
                let built = parts
                    .iter()
                    .zip(factors)
                    .map(|(p, f)| p.build(f))
                    .collect::<CliResult<Vec<_>>>()?;
                Potential::direct_sum(built)?
            }
        })
    }
}

impl ClusterSpec {
    fn build(&self, lattice: &Lattice) -> CliResult<ClusterPartition> {
        Ok(match self {
            ClusterSpec::Atomic => ClusterPartition::atomic(),
            ClusterSpec::Unique => ClusterPartition::unique(),
            ClusterSpec::Blocks { size } => ClusterPartition::blocks(*size)?,
            ClusterSpec::FiniteList { parts } => ClusterPartition::finite_list(
                parts
                    .iter()
                    .map(|p| parse_region(lattice, p))
                    .collect::<CliResult<Vec<_>>>()?,
            ),
            ClusterSpec::Product { parts } => {
                let factors = lattice.factors();
                if parts.len() != factors.len() {
                    return Err(usage(format!(
                        "cluster product has {} parts but the lattice has {} factors",
                        parts.len(),
                        factors.len()
                    )));
                }
                ClusterPartition::product(
                    parts
                        .iter()
                        .zip(factors)
                        .map(|(p, f)| p.build(f))
                        .collect::<CliResult<Vec<_>>>()?,
                )
            }
        })
    }
}

fn build_tails(
    specs: &BTreeMap<String, TailSpec>,
) -> CliResult<BTreeMap<String, Arc<TailPattern>>> {
    let mut out: BTreeMap<String, Arc<TailPattern>> = BTreeMap::new();
    // Non-product tails first; products then resolve by name, so factor
    // tails must not themselves be products (one level, like lattices).
    for (name, spec) in specs {
        let tail = match spec {
            TailSpec::Constant { label } => TailPattern::constant(name.clone(), Spin(*label)),
            TailSpec::Line { labels } => TailPattern::line(
                name.clone(),
                labels.iter().map(|&l| Spin(l)).collect(),
            )?,
            TailSpec::Grid { px, py, labels } => TailPattern::grid(
                name.clone(),
                *px,
                *py,
                labels.iter().map(|&l| Spin(l)).collect(),
            )?,
            TailSpec::Product { .. } => continue,
        };
        out.insert(name.clone(), tail);
    }
    for (name, spec) in specs {
        if let TailSpec::Product { factors } = spec {
            let resolved = factors
                .iter()
                .map(|f| {
                    out.get(f).cloned().ok_or_else(|| {
                        usage(format!(
                            "tail {name}: factor {f} is not a declared non-product tail"
                        ))
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            out.insert(name.clone(), TailPattern::product(name.clone(), resolved)?);
        }
    }
    Ok(out)
}

impl BuiltModel {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: ModelSpec = serde_json::from_str(text)
            .map_err(|e| usage(format!("model spec parse error: {e}")))?;
        if spec.version != SPEC_VERSION {
            return Err(usage(format!(
                "unsupported spec version {} (expected {SPEC_VERSION})",
                spec.version
            )));
        }
        let lattice = spec.lattice.build()?;
        let spins = spec.spins.build()?;
        let potential = spec.potential.build(&lattice)?;
        let clusters = spec.clusters.build(&lattice)?;
        let model = Model::new(lattice, spins, potential, clusters)?;
        let tails = build_tails(&spec.tails)?;
        for (name, tail) in &tails {
            if tail.max_label() >= model.spins().q() {
                return Err(usage(format!(
                    "tail {name} uses label {} but q = {}",
                    tail.max_label(),
                    model.spins().q()
                )));
            }
        }
        Ok(BuiltModel { spec, model, tails })
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn tail(&self, name: &str) -> CliResult<&Arc<TailPattern>> {
        self.tails
            .get(name)
            .ok_or_else(|| usage(format!("unknown tail {name}")))
    }

    /// The first declared tail, used by suites as the default class.
    pub fn default_tail(&self) -> CliResult<&Arc<TailPattern>> {
        self.tails
            .values()
            .next()
            .ok_or_else(|| usage("the model spec declares no tails"))
    }

    /// Realise a configuration reference against this model.
    pub fn config(&self, spec: &ConfigSpec) -> CliResult<Configuration> {
        let mut c = Configuration::tail_only(self.tail(&spec.tail)?.clone());
        for (raw, label) in &spec.overrides {
            c = c.set(parse_site(self.model.lattice(), raw)?, Spin(*label));
        }
        self.model.validate_config(&c)?;
        Ok(c)
    }

    /// Parse a command-line configuration: either `@file.json` holding a
    /// configuration object, or the compact form
    /// `tail[+site:label…]` with sites written `x`, `x,y` or `tag#x[,y]`.
    pub fn config_arg(&self, arg: &str) -> CliResult<Configuration> {
        if let Some(path) = arg.strip_prefix('@') {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {path}: {e}")))?;
            let spec: ConfigSpec = serde_json::from_str(&text)
                .map_err(|e| usage(format!("configuration parse error in {path}: {e}")))?;
            return self.config(&spec);
        }
        let mut parts = arg.split('+');
        let tail = parts.next().unwrap_or_default();
        let mut spec = ConfigSpec {
            tail: tail.to_string(),
            overrides: Vec::new(),
        };
        for ov in parts {
            let (site, label) = ov
                .rsplit_once(':')
                .ok_or_else(|| usage(format!("override {ov} is missing ':label'")))?;
            let label: u8 = label
                .parse()
                .map_err(|_| usage(format!("bad spin label in override {ov}")))?;
            let (tag, coords) = match site.split_once('#') {
                Some((t, c)) => (
                    Some(
                        t.parse::<i64>()
                            .map_err(|_| usage(format!("bad factor tag in {site}")))?,
                    ),
                    c,
                ),
                None => (None, site),
            };
            let mut raw: Vec<i64> = Vec::new();
            if let Some(t) = tag {
                raw.push(t);
            }
            for c in coords.split(',') {
                raw.push(
                    c.parse()
                        .map_err(|_| usage(format!("bad coordinate {c} in {site}")))?,
                );
            }
            spec.overrides.push((raw, label));
        }
        self.config(&spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "lattice": {"kind": "line"},
        "spins": {"q": 2},
        "potential": {"kind": "zero"},
        "clusters": {"kind": "atomic"},
        "tails": {"zero": {"kind": "constant", "label": 0}}
    }"#;

    #[test]
    fn minimal_spec_builds() {
        let bm = BuiltModel::from_json(MINIMAL).unwrap();
        assert_eq!(bm.model.spins().q(), 2);
        let c = bm
            .config(&ConfigSpec {
                tail: "zero".into(),
                overrides: vec![(vec![3], 1)],
            })
            .unwrap();
        assert_eq!(c.value(Site::line(3)), Spin(1));
    }

    #[test]
    fn q_one_is_rejected() {
        let text = MINIMAL.replace("\"q\": 2", "\"q\": 1");
        let err = BuiltModel::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("2..=255"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"extra\": 0,");
        assert!(BuiltModel::from_json(&text).is_err());
    }

    #[test]
    fn round_trip_is_lossless() {
        let bm = BuiltModel::from_json(MINIMAL).unwrap();
        let json = serde_json::to_string(&bm.spec).unwrap();
        let again = BuiltModel::from_json(&json).unwrap();
        assert_eq!(
            serde_json::to_value(&bm.spec).unwrap(),
            serde_json::to_value(&again.spec).unwrap()
        );
    }

    #[test]
    fn compact_config_syntax() {
        let bm = BuiltModel::from_json(MINIMAL).unwrap();
        let c = bm.config_arg("zero+0:1+-2:1").unwrap();
        assert_eq!(c.value(Site::line(0)), Spin(1));
        assert_eq!(c.value(Site::line(-2)), Spin(1));
        assert_eq!(c.value(Site::line(5)), Spin(0));
        assert!(bm.config_arg("nope").is_err());
        assert!(bm.config_arg("zero+0:7").is_err());
    }

    #[test]
    fn star_spec_builds_the_counterexample_model() {
        let text = r#"{
            "version": 1,
            "lattice": {"kind": "half-line"},
            "spins": {"q": 2},
            "potential": {"kind": "star"},
            "clusters": {"kind": "unique"},
            "tails": {
                "zero": {"kind": "constant", "label": 0},
                "one": {"kind": "constant", "label": 1}
            }
        }"#;
        let bm = BuiltModel::from_json(text).unwrap();
        assert_eq!(bm.tails.len(), 2);
    }
}
