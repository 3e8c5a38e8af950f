//! Hausdorff-type metrics on finitely represented fuzzy sets.
//!
//! Fuzzy sets here are normal, upper semi-continuous and given by finitely
//! many levels with finite nested cuts ([`StepFuzzySet`]). On them the
//! crate computes
//!
//! * the Hausdorff metric on finite point sets ([`hausdorff`]),
//! * the endograph and sendograph metrics `H_end`, `H_send` and their grid
//!   oracles ([`metrics`]),
//! * levelwise profiles and Γ-convergence diagnostics for sequences,
//! * total boundedness, equi-right-continuity, closedness and Cauchy
//!   certificates for families ([`family`]).
//!
//! Limits are never decided exactly: sequences and families are finite
//! prefixes, and every verdict comes from an explicit tail rule
//! ([`TailRule`]).

pub mod certificate;
pub mod error;
pub mod family;
pub mod fuzzy;
pub mod generators;
pub mod hausdorff;
pub mod metrics;
pub mod space;

pub use certificate::{Certificate, CertificateKind, Evidence, TailRule, Verdict, Witness, TOL};
pub use error::{Error, Result};
pub use family::{
    cauchy_tail_profile, closedness_witness, erc_modulus, family_union_cut, member_modulus, rel_compact_send_report,
    tb_end_report, tb_send_report, FuzzyFamily,
};
pub use fuzzy::{Level, PlatformSet, StepFuzzySet};
pub use generators::{GeneratorKind, GeneratorTag};
pub use hausdorff::{
    cauchy_limit_construct, covering_number, directed_hausdorff, eps_net, family_eps_net, hausdorff,
    kuratowski_tail_diagnostic, union_family, CauchyConstruction, FiniteSet, KuratowskiDiagnostic,
};
pub use metrics::{
    default_alpha_grid, endograph_metric, endograph_oracle, gamma_diagnostic, levelwise_distance, levelwise_profile,
    send_decomposition, send_decomposition_check, sendograph_metric, sendograph_oracle, GammaDiagnostic,
    LevelProfile, Metric, ProfileMode, SendDecomposition,
};
pub use space::{validate_metric, LiftedPoint, MetricSpace, Point};
