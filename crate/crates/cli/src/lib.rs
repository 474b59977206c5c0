//! Command-line front end for the Gibbs-generated algebras: JSON model
//! specifications, verification suites, and machine-readable reports.

pub mod report;
pub mod spec;
pub mod suites;
