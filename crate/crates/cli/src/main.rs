use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use qcalc_cli::config::{parse_angles, parse_units};
use qcalc_cli::{run_suite, Config, Suite};
use qcalc_core::operator::{format_operator, generate_operator, GeneratorSpec};

#[derive(Parser)]
#[command(name = "qcalc", version, about = "Checks the quaternionic S, Q, P2 and F calculi on test operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a theorem suite (or `all`) and report each check.
    Run(RunArgs),
    /// Write a seeded test operator in the plain-text format.
    Generate(GenerateArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// identities, product_rules, independence, powers, hinf, oracle, kernels or all
    suite: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Acceptance tolerance for every check, replacing the per-check defaults.
    #[arg(long)]
    tol: Option<f64>,
    /// Contour angles for the independence suite, comma separated.
    #[arg(long)]
    angles: Option<String>,
    /// Imaginary units for the independence suite: e1, e2, e3 or a:b:c, comma separated.
    #[arg(long)]
    units: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving <suite>.json and <suite>.csv.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run independent checks concurrently.
    #[arg(long)]
    parallel: bool,
    /// Use the diagonal operator of the sampled eigenvalues.
    #[arg(long)]
    diag: bool,
    /// Highest power for the powers suite.
    #[arg(long)]
    n_max: Option<u32>,
    /// Number of (s, p) pairs for the identities suite.
    #[arg(long)]
    pairs: Option<usize>,
    /// Print every check, not only failures.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    r_max: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    omega: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_for(args: &RunArgs) -> anyhow::Result<Config> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(d) = args.dim {
        cfg.generator.dim = d;
    }
    if let Some(s) = args.seed {
        cfg.generator.seed = s;
    }
    if let Some(t) = args.tol {
        cfg.tol = Some(t);
    }
    if let Some(a) = &args.angles {
        cfg.angles = Some(parse_angles(a).map_err(|e| anyhow!("--angles: {e}"))?);
    }
    if let Some(u) = &args.units {
        cfg.units = Some(parse_units(u).map_err(|e| anyhow!("--units: {e}"))?);
    }
    if let Some(n) = args.n_max {
        cfg.n_max = n;
    }
    if let Some(n) = args.pairs {
        cfg.pairs = n;
    }
    cfg.diag |= args.diag;
    Ok(cfg)
}

fn run(args: &RunArgs) -> anyhow::Result<bool> {
    let suites = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&args.suite).ok_or_else(|| anyhow!("unknown suite '{}'", args.suite))?]
    };
    let cfg = config_for(args)?;
    let mut all_passed = true;
    for suite in suites {
        let report = run_suite(suite, &cfg, args.parallel).with_context(|| format!("suite {}", suite.name()))?;
        for c in &report.checks {
            if args.verbose || !c.pass {
                let verdict = if c.pass { "pass" } else { "FAIL" };
                println!("  {verdict} {:<40} {:>10.3e} (tol {:.0e})", c.tag, c.residual, c.tol);
            }
        }
        let failed = report.failures();
        println!("{}: {}/{} checks passed", report.suite, report.checks.len() - failed, report.checks.len());
        if let Some(dir) = &args.report {
            let (json, csv) = report.write(dir)?;
            println!("  wrote {} and {}", json.display(), csv.display());
        }
        all_passed &= report.passed();
    }
    Ok(all_passed)
}

fn generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let spec = GeneratorSpec { dim: args.dim, r_min: args.r_min, r_max: args.r_max, omega: args.omega, seed: args.seed };
    let text = format_operator(&generate_operator(&spec)?);
    match &args.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Generate(args) => generate(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
