//! `addcomb`: generate set files, run the extraction pipeline, and execute the
//! seeded verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use addcomb::exact::parse_eps;
use addcomb::generators::parse_compact_group;
use addcomb::io::{format_set, read_set};
use addcomb::report::{to_csv, to_json};
use addcomb::verify::{suite_lemmas, suite_oracle, suite_pipeline, SuiteReport};
use addcomb::{run_pipeline, GeneratorSpec, InputSource, OutputFormat, PipelineConfig, RunConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "addcomb", version, about = "Additive energy toolkit and candidate-extraction pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated set, e.g. `generate r-plus-h n=20 dH=8 r=32 seed=7`.
    Generate {
        /// Generator kind followed by `key=value` parameters.
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the extraction pipeline and write its report.
    Extract(ExtractArgs),
    /// Run a seeded property suite.
    Verify {
        suite: Suite,
        /// Number of trials; each suite has its own default.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the full suite report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Set file to analyse.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator spec to analyse instead of a file, e.g. `r-plus-h n=20 dh=8 r=32 seed=7`.
    #[arg(long)]
    gen: Option<String>,
    /// Run configuration (or an earlier report) in JSON; other flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Expected group of the input file, e.g. `f2:20` or `"fp p=3 n=4"`.
    #[arg(long, requires = "input")]
    group: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exponent gain, as `p/q` or a decimal.
    #[arg(long)]
    eps: Option<String>,
    /// Size floor exponent.
    #[arg(long)]
    cmax: Option<u32>,
    #[arg(long)]
    slice_cap: Option<usize>,
    #[arg(long)]
    pair_cap: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `json` or `csv` (alias `csv-summary`).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Oracle,
    Lemmas,
    Pipeline,
}

#[derive(Debug)]
enum Failure {
    Verify(String),
    Input(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Input(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<addcomb::Error> for Failure {
    fn from(e: addcomb::Error) -> Self {
        use addcomb::Error as E;
        match e {
            E::Resource(_) | E::OracleCap { .. } => Failure::Resource(e.to_string()),
            E::Internal(_) | E::TransformPrecision { .. } => Failure::Verify(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { spec, out } => cmd_generate(&spec.join(" "), out.as_deref()),
        Command::Extract(args) => cmd_extract(args),
        Command::Verify { suite, trials, seed, out } => cmd_verify(suite, trials, seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("addcomb: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn cmd_generate(spec: &str, out: Option<&Path>) -> Result<(), Failure> {
    let set = GeneratorSpec::parse(spec)?.generate()?;
    emit(out, &format_set(&set))
}

fn cmd_extract(args: ExtractArgs) -> Result<(), Failure> {
    let run = build_run_config(args)?;
    let set = match &run.input {
        InputSource::File { path, group } => read_set(Path::new(path), *group)?,
        InputSource::Generator { spec } => spec.generate()?,
        InputSource::Memory => return Err(Failure::Input("a run config needs a file or generator input".into())),
    };
    let mut report = run_pipeline(&set, &run.pipeline)?;
    report.run = run.clone();
    let text = match run.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => to_csv(&report),
    };
    emit(run.out.as_deref().map(Path::new), &text)
}

fn build_run_config(args: ExtractArgs) -> Result<RunConfig, Failure> {
    let mut run = match &args.config {
        Some(path) => load_run_config(path)?,
        None => RunConfig::in_memory(PipelineConfig::default()),
    };
    if let Some(path) = args.input {
        let group = args.group.as_deref().map(parse_compact_group).transpose()?;
        run.input = InputSource::File { path: path.to_string_lossy().into_owned(), group };
    }
    if let Some(spec) = args.gen {
        run.input = InputSource::Generator { spec: GeneratorSpec::parse(&spec)? };
    }
    if run.input == InputSource::Memory {
        return Err(Failure::Input("extract needs --in, --gen or --config".into()));
    }
    let p = &mut run.pipeline;
    if let Some(eps) = args.eps {
        p.eps = parse_eps(&eps)?;
    }
    if let Some(c) = args.cmax {
        p.c_max = c;
    }
    if let Some(c) = args.slice_cap {
        p.slice_cap = c;
    }
    if let Some(c) = args.pair_cap {
        p.pair_cap = c;
    }
    if let Some(s) = args.seed {
        p.seed = s;
    }
    p.validate()?;
    if let Some(f) = args.format {
        run.format = f.parse()?;
    }
    if let Some(out) = args.out {
        run.out = Some(out.to_string_lossy().into_owned());
    }
    Ok(run)
}

/// Accepts a bare run config or a report, whose `run` field is the config.
fn load_run_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(input_err)?;
    if let Some(run) = value.get_mut("run") {
        value = run.take();
    }
    serde_json::from_value(value).map_err(input_err)
}

fn cmd_verify(suite: Suite, trials: Option<u64>, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let report = match suite {
        Suite::Oracle => suite_oracle(trials.unwrap_or(200), seed)?,
        Suite::Lemmas => suite_lemmas(trials.unwrap_or(1000), seed)?,
        Suite::Pipeline => suite_pipeline(trials.unwrap_or(8), seed)?,
    };
    let json = serde_json::to_string_pretty(&report).map_err(input_err)? + "\n";
    if let Some(path) = out {
        write_atomic(path, &json)?;
    }
    print_summary(&report);
    if report.passed() {
        Ok(())
    } else {
        let failing: Vec<_> = report.checks.iter().filter(|c| c.failures > 0).collect();
        let witness = serde_json::to_string(&failing).map_err(input_err)?;
        Err(Failure::Verify(format!("{} suite failed: {witness}", report.suite)))
    }
}

fn print_summary(report: &SuiteReport) {
    for c in &report.checks {
        let status = if c.failures == 0 { "PASS" } else { "FAIL" };
        println!("{status} {}: {}/{} passed", c.name, c.trials - c.failures, c.trials);
    }
    let passed = report.checks.iter().filter(|c| c.failures == 0).count();
    println!("{} (seed {}): {passed}/{} checks passed", report.suite, report.seed, report.checks.len());
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(input_err),
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| input_err(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(text.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
