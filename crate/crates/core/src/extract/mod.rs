//! The candidate-extraction pipeline.
//!
//! Given `A` with `|A - A| = K|A|`, every construction below yields a subset
//! of `A - A` with exact size and energy:
//!
//! * `A - A` and (a translate of) `A` itself;
//! * the refined slice family `T` ([`first_refinement`](RefinementResult));
//! * `X` from coverage counts over `T` (large spread exponent);
//! * the slices `A[t]` and `X` from the pair-value chain (small spread exponent).
//!
//! Both cascades always run; the report keeps every certificate and picks
//! the most energetic one above the size floor.

mod certificate;
mod large;
mod refine;
mod small;
mod universe;

use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{check_eps, parse_eps};
use crate::generators::GeneratorSpec;
use crate::group::GroupSpec;
use crate::report::{ser_ratio, SCHEMA_VERSION};
use crate::set::{energy_from_table, DiffTable, EnergyReport, FiniteSet};

pub use certificate::{evaluate_candidate, CandidateCertificate, CandidateLabel, TheoremScale};
pub use large::LargeBetaSummary;
pub use refine::{RefinementResult, SliceStats};
pub use small::{SmallBetaSummary, SmallBetaX, SmallSliceStats};
pub use universe::MAX_UNIVERSE;

use certificate::{certify, choose, shift_into_differences, to_signed};

/// Tunables of one pipeline run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Written as `"p/q"`.
    #[serde(serialize_with = "ser_eps", deserialize_with = "de_eps")]
    pub eps: Ratio<u64>,
    /// Size floor exponent: candidates need `|S| ≥ K^{-c_max}|A|`.
    pub c_max: u32,
    /// Most slices `A[t]` examined; larger heavy sets are sampled uniformly.
    pub slice_cap: usize,
    /// Most representative pairs enumerated for one slice.
    pub pair_cap: u64,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { eps: Ratio::new(1, 37), c_max: 8, slice_cap: 4096, pair_cap: 1_000_000, seed: 0 }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if self.slice_cap == 0 || self.pair_cap == 0 {
            return Err(Error::OutOfRange("slice and pair caps must be positive".into()));
        }
        Ok(())
    }
}

fn ser_eps<S: Serializer>(eps: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", eps.numer(), eps.denom()))
}

fn de_eps<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Ratio<u64>, D::Error> {
    let text = String::deserialize(d)?;
    parse_eps(&text).map_err(serde::de::Error::custom)
}

/// Where the analysed set came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputSource {
    File {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group: Option<GroupSpec>,
    },
    Generator {
        spec: GeneratorSpec,
    },
    Memory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" | "csv-summary" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format {other:?}"))),
        }
    }
}

/// Everything needed to reproduce a run; echoed into its report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn in_memory(pipeline: PipelineConfig) -> Self {
        RunConfig { input: InputSource::Memory, pipeline, format: OutputFormat::Json, out: None }
    }
}

/// Standing assumptions of the extraction argument, evaluated exactly.
#[derive(Debug, Clone, Serialize)]
pub struct StandingAssumptions {
    /// `E(A - A) ≥ K^{-(1-2ε)}`; when true, `A' = A - A` already suffices.
    pub diff_energy_meets: bool,
    /// `E(A) ≥ K^{-(1-ε)}`.
    pub set_energy_meets: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SizeFloor {
    pub c_max: u32,
    /// `max(min(2, |A|), K^{-c_max}|A|)`.
    pub min_size: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Truncation {
    /// The heavy set exceeded the slice cap and was sampled.
    pub slices_sampled: bool,
    /// Slices whose spread was not computed (pair cap).
    pub spread_skipped: u64,
    /// Slices of `T` left out of the pair-value chain (pair cap).
    pub pair_skipped: u64,
    /// Fewer than two slices survived the refinement.
    pub t_below_two: bool,
    pub any: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub stage: &'static str,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub total_ms: f64,
    pub stages: Vec<StageTime>,
}

/// The full record of one run. Everything except `timing` is a function of
/// the input and the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub run: RunConfig,
    pub group: GroupSpec,
    pub set_size: u64,
    pub diff_size: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub k: Ratio<u64>,
    pub degenerate: bool,
    pub energy_set: EnergyReport,
    pub energy_diff: EnergyReport,
    pub standing: StandingAssumptions,
    pub size_floor: SizeFloor,
    pub refinement: Option<RefinementResult>,
    pub slices: Vec<SliceStats>,
    pub large_beta: Option<LargeBetaSummary>,
    pub small_beta: Option<SmallBetaSummary>,
    pub certificates: Vec<CandidateCertificate>,
    pub chosen_index: usize,
    pub chosen: CandidateCertificate,
    pub trace: Vec<TraceEntry>,
    pub truncation: Truncation,
    pub timing: Timing,
}

struct Clock {
    start: Instant,
    last: Instant,
    timing: Timing,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Clock { start: now, last: now, timing: Timing::default() }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.timing.stages.push(StageTime { stage, ms: (now - self.last).as_secs_f64() * 1e3 });
        self.last = now;
    }

    fn finish(mut self) -> Timing {
        self.timing.total_ms = self.start.elapsed().as_secs_f64() * 1e3;
        self.timing
    }
}

/// Runs every construction on `a` and certifies each candidate.
pub fn run_pipeline(a: &FiniteSet, config: &PipelineConfig) -> Result<PipelineReport> {
    config.validate()?;
    a.require_nonempty()?;
    let mut clock = Clock::new();
    let mut trace = Vec::new();
    let mut note = |stage: &'static str, text: String| trace.push(TraceEntry { stage, note: text });

    let set_table = DiffTable::build(a)?;
    let energy_set = energy_from_table(&set_table);
    let diff = set_table.support_set();
    let (n, d) = (a.len() as u64, diff.len() as u64);
    let scale = TheoremScale::new(n, d, config.eps, config.c_max)?;
    let eps = to_signed(config.eps);
    let diff_table = DiffTable::build(&diff)?;
    let energy_diff = energy_from_table(&diff_table);
    clock.lap("tables");

    let standing = StandingAssumptions {
        diff_energy_meets: scale.energy_at_least(&energy_diff, Ratio::from_integer(1) - eps * 2),
        set_energy_meets: scale.energy_at_least(&energy_set, Ratio::from_integer(1) - eps),
    };
    let diff_cert = CandidateCertificate::from_parts(CandidateLabel::AMinusA, diff.clone(), energy_diff, &scale);
    let size_floor = SizeFloor { c_max: config.c_max, min_size: scale.min_size() };

    let mut report = PipelineReport {
        schema: SCHEMA_VERSION,
        run: RunConfig::in_memory(config.clone()),
        group: a.group(),
        set_size: n,
        diff_size: d,
        k: scale.k,
        degenerate: d == n,
        energy_set,
        energy_diff,
        standing,
        size_floor,
        refinement: None,
        slices: Vec::new(),
        large_beta: None,
        small_beta: None,
        certificates: Vec::new(),
        chosen_index: 0,
        chosen: diff_cert.clone(),
        trace: Vec::new(),
        truncation: Truncation::default(),
        timing: Timing::default(),
    };

    if d == n {
        note("degenerate", "K = 1: A is a coset of a finite subgroup and A - A is that subgroup".into());
        report.certificates.push(diff_cert);
        report.trace = trace;
        report.timing = clock.finish();
        return Ok(report);
    }

    let universe = universe::Universe::new(a, set_table)?;
    note(
        "standing",
        format!(
            "E(A - A) {} K^-(1-2eps); E(A) {} K^-(1-eps)",
            if report.standing.diff_energy_meets { ">=" } else { "<" },
            if report.standing.set_energy_meets { ">=" } else { "<" },
        ),
    );
    if universe.period.len() > 1 {
        note("universe", format!("A is a union of cosets of a subgroup of order {}", universe.period.len()));
    }

    let mut certs = Vec::new();
    certs.push(diff_cert);
    let (shifted, offset) = shift_into_differences(&universe, a.elems())?;
    let mut a_cert = certify(CandidateLabel::A, shifted, energy_set, &universe, &scale)?;
    a_cert.offset = Some(offset);
    certs.push(a_cert);

    let refinement = refine::first_refinement(&universe, &scale, config)?;
    clock.lap("first_refinement");
    let r = &refinement.result;
    note(
        "first_refinement",
        format!(
            "{} heavy differences, {} examined, |T| = {}, beta = {}",
            r.heavy_count,
            r.sampled_count,
            r.t_size,
            r.beta.map_or("n/a".to_string(), |b| format!("{b:.4}"))
        ),
    );
    match (r.large_case, r.small_case) {
        (Some(true), _) => note("first_refinement", "beta falls in the large case".into()),
        (_, Some(true)) => note("first_refinement", "beta falls in the small case".into()),
        _ => {}
    }
    let mut truncation = Truncation {
        slices_sampled: r.sampled_count < r.heavy_count,
        spread_skipped: r.skipped_count,
        t_below_two: r.t_below_two,
        ..Truncation::default()
    };

    if r.t.is_empty() {
        note("large_beta", "T is empty; cascade skipped".into());
        note("small_beta", "T is empty; cascade skipped".into());
    } else {
        let (summary, cert) = large::large_beta_candidate(&universe, &diff_table, &refinement, &scale)?;
        clock.lap("large_beta");
        note(
            "large_beta",
            format!("X from coverage counts: |X| = {}, E(X) = {:.6}", summary.x_size, cert.energy.value()),
        );
        report.large_beta = Some(summary);
        certs.push(cert);

        let out = small::small_beta_chain(&universe, &diff_table, &refinement, &scale, config)?;
        clock.lap("small_beta");
        truncation.pair_skipped = out.summary.skipped;
        note(
            "small_beta",
            format!(
                "{} slices processed, {} skipped, |T'| = {}",
                out.summary.processed, out.summary.skipped, out.summary.t_prime_size
            ),
        );
        certs.extend(out.slice_certificates);
        match out.x_certificate {
            Some(cert) => {
                note(
                    "small_beta",
                    format!("X from the pair-value chain: |X| = {}, E(X) = {:.6}", cert.size, cert.energy.value()),
                );
                certs.push(cert);
            }
            None => note("small_beta", "T' is empty; X omitted".into()),
        }
        report.small_beta = Some(out.summary);
    }

    truncation.any = truncation.slices_sampled
        || truncation.spread_skipped > 0
        || truncation.pair_skipped > 0
        || truncation.t_below_two;
    let chosen = choose(&certs).ok_or_else(|| Error::Internal("no candidate meets the size floor".into()))?;
    note(
        "choose",
        format!(
            "{} of {} candidates meet the size floor; chose {}",
            certs.iter().filter(|c| c.meets_size_floor).count(),
            certs.len(),
            certs[chosen].label
        ),
    );

    report.chosen = certs[chosen].clone();
    report.chosen_index = chosen;
    report.certificates = certs;
    report.refinement = Some(refinement.result);
    report.slices = refinement.slices;
    report.truncation = truncation;
    report.trace = trace;
    report.timing = clock.finish();
    Ok(report)
}
