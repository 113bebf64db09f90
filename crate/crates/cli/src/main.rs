use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod convert;
mod recipes;
mod report;
mod suites;

use config::Settings;

#[derive(Parser)]
#[command(name = "lpkit", version, about = "Run Littlewood-Paley verification suites and convert data files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter pair admissibility.
    Filters(SuiteArgs),
    /// Analysis followed by synthesis on band-limited inputs.
    Reconstruct(SuiteArgs),
    /// Weighted vector-valued and kernel maximal inequalities.
    Maximal(SuiteArgs),
    /// Cross-scale weight class constants.
    Xclass(SuiteArgs),
    /// Function-side versus coefficient-side norms.
    TransformNorms(SuiteArgs),
    /// Boundedness of almost-diagonal matrices.
    AlmostDiagonal(SuiteArgs),
    /// Smooth atoms and atomic decomposition.
    Atoms(SuiteArgs),
    /// Elementary and Sobolev-type embeddings.
    Embed(SuiteArgs),
    /// Convert between LPGF1, CSV, coefficient binary and JSON.
    Convert { input: PathBuf, output: PathBuf },
}

/// Every suite flag is a setting; flags override the config file.
#[derive(Args)]
struct SuiteArgs {
    /// `key = value` settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `summary.json` and `cases.csv`.
    #[arg(long, default_value = "lpkit-report")]
    out: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(allow_hyphen_values = true, long = "L")]
    level: Option<String>,
    #[arg(allow_hyphen_values = true, long = "T")]
    side: Option<String>,
    /// Scale window `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Number of seeded cases.
    #[arg(long, allow_hyphen_values = true)]
    seeds: Option<String>,
    /// Filter kind: bump or cosine.
    #[arg(long, allow_hyphen_values = true)]
    kind: Option<String>,
    /// Weight recipe, e.g. `power:s=1` or `product:s=0.5,a=0.25`.
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    /// Class exponents `alpha1,alpha2`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    widths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    depths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mode: Option<String>,
    #[arg(allow_hyphen_values = true, long = "K")]
    kernel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,
    #[arg(allow_hyphen_values = true, long = "N")]
    moments: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    normalization: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    scale: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    density: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c_lower: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    bound: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
}

impl SuiteArgs {
    fn settings(&self) -> lpkit::Result<Settings> {
        let mut settings = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = [
            ("n", &self.n),
            ("L", &self.level),
            ("T", &self.side),
            ("window", &self.window),
            ("seeds", &self.seeds),
            ("kind", &self.kind),
            ("weights", &self.weights),
            ("alpha", &self.alpha),
            ("p", &self.p),
            ("q", &self.q),
            ("r", &self.r),
            ("theta", &self.theta),
            ("delta", &self.delta),
            ("eps", &self.eps),
            ("s", &self.s),
            ("widths", &self.widths),
            ("lo", &self.lo),
            ("depths", &self.depths),
            ("shift", &self.shift),
            ("mode", &self.mode),
            ("K", &self.kernel),
            ("direction", &self.direction),
            ("N", &self.moments),
            ("normalization", &self.normalization),
            ("scale", &self.scale),
            ("p0", &self.p0),
            ("p1", &self.p1),
            ("s0", &self.s0),
            ("s1", &self.s1),
            ("density", &self.density),
            ("samples", &self.samples),
            ("c_lower", &self.c_lower),
            ("bound", &self.bound),
            ("tol", &self.tol),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.set(key, v);
            }
        }
        Ok(settings)
    }
}

fn run_suite(name: &str, args: &SuiteArgs) -> ExitCode {
    let outcome = args.settings().and_then(|settings| {
        let report = suites::run(name, &settings, args.seed)?;
        report.write(&args.out, &settings, args.seed)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            println!("{name}: {}", report.statement);
            for c in &report.criteria {
                println!("  {} {} = {:.6e} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                for c in report.failures() {
                    eprintln!("criterion `{}` failed: {:.6e} is not {}", c.name, c.value, c.threshold);
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Filters(a) => ("filters", a),
        Command::Reconstruct(a) => ("reconstruct", a),
        Command::Maximal(a) => ("maximal", a),
        Command::Xclass(a) => ("xclass", a),
        Command::TransformNorms(a) => ("transform-norms", a),
        Command::AlmostDiagonal(a) => ("almost-diagonal", a),
        Command::Atoms(a) => ("atoms", a),
        Command::Embed(a) => ("embed", a),
        Command::Convert { input, output } => {
            return match convert::convert(input, output) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
    };
    debug_assert!(suites::SUITES.contains(&name));
    run_suite(name, args)
}
