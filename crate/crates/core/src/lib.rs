//! Additive statistics of finite sets in abelian groups, and a pipeline that
//! extracts large, high-energy subsets of `A - A` with exact certificates.
//!
//! Supported groups are `F_2^n`, `F_p^n`, `Z/mZ` and `Z` ([`GroupSpec`]).
//! Elements are stored as a single `i64` ([`Elem`]) in a canonical encoding,
//! so sets are sorted vectors and group laws are a few integer operations.
//!
//! ```
//! use addcomb::{FiniteSet, GroupSpec, Elem, energy_exact, run_pipeline, PipelineConfig};
//!
//! let a = FiniteSet::new(GroupSpec::Zint, [0, 1, 3].map(Elem)).unwrap();
//! let e = energy_exact(&a).unwrap();
//! assert_eq!((e.quadruples, e.cube), (15, 27));
//!
//! let report = run_pipeline(&a, &PipelineConfig::default()).unwrap();
//! assert_eq!(report.chosen.label.to_string(), "A_minus_A");
//! ```

pub mod dyadic;
pub mod error;
pub mod exact;
pub mod extract;
pub mod generators;
pub mod group;
pub mod io;
mod par;
pub mod report;
pub mod set;
pub mod verify;

pub use dyadic::{
    cs2_holds, cs2_lhs, dp1_level, dp1_level_weighted, dp2_level, dp2_level_weighted, invariance_energy_bound,
    DyadicLevel, InvarianceBoundReport,
};
pub use error::{Error, Result};
pub use extract::{
    evaluate_candidate, run_pipeline, CandidateCertificate, CandidateLabel, InputSource, OutputFormat, PipelineConfig,
    PipelineReport, RunConfig, TheoremScale,
};
pub use generators::{gen_gap, gen_r_plus_h, gen_random, gen_subspace, GapSpec, GeneratorSpec, RPlusHSpec};
pub use group::{Elem, GroupSpec};
pub use set::{
    build_set, diff_set, doubling_stats, energy_exact, energy_oracle, energy_with, is_coset, sum_set,
    translate_heavy_set, translate_intersect, DiffTable, DoublingStats, EnergyPath, EnergyReport, FiniteSet,
};
