//! Algebras generated by Gibbs measures on lattice spin systems.
//!
//! The crate models spin configurations on (finite or infinite) lattices as a
//! periodic tail pattern plus finitely many overrides, evaluates interaction
//! potentials on finite windows, and builds two commutative algebras on top:
//!
//! * the *genetic* algebra, whose structure constants are conditional Gibbs
//!   weights of "offspring" configurations interpolating between two parents
//!   along clusters, and
//! * the *evolution* algebra on ordered parent pairs, whose structure
//!   constants factor through the genetic ones.
//!
//! A brute-force finite oracle (exhaustive state enumeration) provides an
//! independent route to every coefficient on finite windows; the `transforms`
//! module covers lattice/spin symmetries, potential equivalence probes and
//! product (tensor) models.

pub mod clusters;
pub mod config;
pub mod error;
pub mod evolution;
pub mod genetic;
pub mod lattice;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod potential;
pub mod sampling;
pub mod transforms;

pub use clusters::{ClusterId, ClusterPartition};
pub use config::{discrepancy, Configuration, Discrepancy, Spin, SpinSet, TailPattern};
pub use error::{Error, Result};
pub use evolution::{EvoCoefficientMatrix, IdealIsoReport, PairElement};
pub use genetic::{
    AlgebraElement, CoefficientVector, EmbedReport, FertileClassId, PrincipalIdealReport,
};
pub use lattice::{Lattice, Region, Site};
pub use model::Model;
pub use oracle::{
    compare_finite_equivalence, Assignment, FiniteModel, MeasureTable, OracleReport,
    DEFAULT_ENUM_CAP,
};
pub use potential::{InteractionTerm, Neighborhood, PairEntry, Potential};
pub use transforms::{
    build_product_model, check_potential_equivalence, check_tau_isomorphism,
    check_tensor_factorization, equivalence_probe, DevReport, ProbeReport, SpatialMap, SpinAction,
    SpinPerm, TauTransform, TensorReport,
};
