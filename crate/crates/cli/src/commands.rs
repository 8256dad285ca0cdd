use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use sho_core::bider::{SolveMode, SolveReport, Verification};
use sho_core::cartan::ChainDims;
use sho_core::structure::Simplicity;
use sho_core::Parity;

use crate::error::{CliError, CliResult, EXIT_OK, EXIT_VIOLATION};
use crate::json::to_canonical_string;
use crate::session::Session;
use crate::suites::{self, CheckResult, Status, Suite, TheoremSummary, WeightTable};

#[derive(Debug, Parser)]
#[command(
    name = "sho",
    version,
    about = "Build SHO(n,n;t) over F_p and analyse its super-biderivations"
)]
pub struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Params {
    /// Number of even (and of odd) variables.
    #[arg(long)]
    pub n: usize,

    /// Odd prime characteristic.
    #[arg(long)]
    pub p: u32,

    /// Truncation exponents, comma separated; all ones by default.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<u32>>,
}

impl Params {
    pub fn truncation(&self) -> Vec<u32> {
        self.t.clone().unwrap_or_else(|| vec![1; self.n])
    }
}

/// Where the algebra comes from: parameters, or a file written by `build`.
#[derive(Debug, Clone, Args)]
pub struct Source {
    #[arg(long, required_unless_present = "algebra", requires = "p")]
    pub n: Option<usize>,

    #[arg(long, required_unless_present = "algebra", requires = "n")]
    pub p: Option<u32>,

    #[arg(long, value_delimiter = ',', requires = "n")]
    pub t: Option<Vec<u32>>,

    /// Algebra file written by `build`.
    #[arg(long, conflicts_with_all = ["n", "p", "t"])]
    pub algebra: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Dense up to dimension 60, blocked above.
    Auto,
    Dense,
    Blocked,
}

impl ModeArg {
    fn requested(self) -> Option<SolveMode> {
        match self {
            ModeArg::Auto => None,
            ModeArg::Dense => Some(SolveMode::Dense),
            ModeArg::Blocked => Some(SolveMode::Blocked),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Even,
    Odd,
    Both,
}

impl ParityArg {
    fn parities(self) -> Vec<Parity> {
        match self {
            ParityArg::Even => vec![Parity::Even],
            ParityArg::Odd => vec![Parity::Odd],
            ParityArg::Both => vec![Parity::Even, Parity::Odd],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the chain down to SHO and write the algebra file.
    Build {
        #[command(flatten)]
        params: Params,

        /// Output path; defaults to sho_<n>_<p>_<t>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and write its report.
    Verify {
        #[command(flatten)]
        source: Source,

        #[arg(long, default_value = "all")]
        suite: Suite,

        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,

        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for skew-symmetric super-biderivations.
    Bider {
        #[command(flatten)]
        source: Source,

        #[arg(long, value_enum, default_value_t = ParityArg::Both)]
        parity: ParityArg,

        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,

        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Toral weights of the Hamiltonian images and of HO.
    Weights {
        #[command(flatten)]
        source: Source,

        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structure constants as plain `a b k c` lines.
    DumpSc {
        #[command(flatten)]
        source: Source,

        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// The run parameters echoed into every report. Paths and thread counts are
/// left out so that reports depend only on the mathematics and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub n: usize,
    pub p: u32,
    pub t: Vec<u32>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SolveMode>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub dims: ChainDims,
    pub degenerate: bool,
    pub simplicity: Simplicity,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solves: Vec<SolveReport>,
    pub violations: u64,
    pub passed: bool,
}

impl Report {
    fn new(session: &Session, config: ConfigEcho) -> Self {
        let file = session.file();
        Report {
            config,
            dims: file.dims,
            degenerate: file.degenerate,
            simplicity: file.simplicity,
            checks: Vec::new(),
            weights: None,
            theorem: None,
            solves: Vec::new(),
            violations: 0,
            passed: true,
        }
    }

    fn finish(mut self) -> Self {
        self.violations = self.checks.iter().map(|c| c.violations).sum();
        let unverified = self.solves.iter().any(|s| s.verification == Verification::Unverified);
        self.passed = !unverified && self.checks.iter().all(|c| c.status != Status::Fail);
        self
    }

    fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        }
    }
}

fn echo(session: &Session, command: &str) -> ConfigEcho {
    let file = session.file();
    ConfigEcho {
        command: command.to_string(),
        n: file.n,
        p: file.p,
        t: file.t.clone(),
        seed: session.seed(),
        suite: None,
        parity: None,
        mode: None,
    }
}

fn open(source: &Source, seed: u64) -> CliResult<Session> {
    match (&source.algebra, source.n, source.p) {
        (Some(path), _, _) => Session::load(path, seed),
        (None, Some(n), Some(p)) => {
            let t = source.t.clone().unwrap_or_else(|| vec![1; n]);
            Session::build(n, p, &t, seed)
        }
        _ => Err(CliError::Usage("give --n and --p, or --algebra".into())),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

pub fn default_algebra_path(n: usize, p: u32, t: &[u32]) -> PathBuf {
    let t: Vec<String> = t.iter().map(u32::to_string).collect();
    PathBuf::from(format!("sho_{n}_{p}_{}.json", t.join("_")))
}

#[derive(Serialize)]
struct BuildSummary<'a> {
    n: usize,
    p: u32,
    t: &'a [u32],
    dims: ChainDims,
    degenerate: bool,
    simplicity: Simplicity,
    file: String,
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> CliResult<i32> {
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            log::warn!("thread pool already initialised; ignoring --threads");
        }
    }
    let seed = cli.seed;
    let started = Instant::now();
    let code = match cli.command {
        Command::Build { params, out } => {
            let t = params.truncation();
            let session = Session::build(params.n, params.p, &t, seed)?;
            let path = out.unwrap_or_else(|| default_algebra_path(params.n, params.p, &t));
            session.file().save(&path)?;
            let file = session.file();
            if file.degenerate {
                log::warn!("SHO is degenerate at these parameters: {:?}", file.simplicity);
            }
            let summary = BuildSummary {
                n: file.n,
                p: file.p,
                t: &file.t,
                dims: file.dims,
                degenerate: file.degenerate,
                simplicity: file.simplicity,
                file: path.display().to_string(),
            };
            write_output(None, &to_canonical_string(&summary))?;
            EXIT_OK
        }
        Command::Verify {
            source,
            suite,
            mode,
            out,
        } => {
            let mut session = open(&source, seed)?;
            let mode = session.resolve_mode(mode.requested());
            let output = suites::run(&mut session, suite, mode)?;
            let mut config = echo(&session, "verify");
            config.suite = Some(suite);
            config.mode = Some(mode);
            let mut report = Report::new(&session, config);
            report.checks = output.checks;
            report.weights = output.weights;
            report.theorem = output.theorem;
            let report = report.finish();
            for c in report.checks.iter().filter(|c| c.status == Status::Fail) {
                log::error!("{} / {}: {} violations", c.suite, c.name, c.violations);
            }
            write_output(out.as_deref(), &to_canonical_string(&report))?;
            report.exit_code()
        }
        Command::Bider {
            source,
            parity,
            mode,
            out,
        } => {
            let mut session = open(&source, seed)?;
            let mode = session.resolve_mode(mode.requested());
            let mut config = echo(&session, "bider");
            config.parity = Some(format!("{parity:?}").to_lowercase());
            config.mode = Some(mode);
            let mut report = Report::new(&session, config);
            for q in parity.parities() {
                let solved = session.solve(q, mode)?;
                report.solves.push(solved.1.clone());
            }
            let report = report.finish();
            write_output(out.as_deref(), &to_canonical_string(&report))?;
            report.exit_code()
        }
        Command::Weights { source, out } => {
            let mut session = open(&source, seed)?;
            let output = suites::run(&mut session, Suite::Weights, SolveMode::Dense)?;
            let mut report = Report::new(&session, echo(&session, "weights"));
            report.checks = output.checks;
            report.weights = output.weights;
            let report = report.finish();
            write_output(out.as_deref(), &to_canonical_string(&report))?;
            report.exit_code()
        }
        Command::DumpSc { source, out } => {
            let session = open(&source, seed)?;
            write_output(out.as_deref(), &dump_structure_constants(&session))?;
            EXIT_OK
        }
    };
    info!("finished in {:.2?}", started.elapsed());
    Ok(code)
}

/// `# n=.. p=.. t=.. dim=..` followed by one `a b k c` line per nonzero constant.
pub fn dump_structure_constants(session: &Session) -> String {
    let file = session.file();
    let t: Vec<String> = file.t.iter().map(u32::to_string).collect();
    let mut out = format!("# n={} p={} t={} dim={}\n", file.n, file.p, t.join(","), file.dims.sho);
    for [a, b, k, c] in &file.structure_constants {
        writeln!(out, "{a} {b} {k} {c}").expect("writing to a String cannot fail");
    }
    out
}
