use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperoct::experiment::{self, Config, RawConfig};
use hyperoct::Error;

/// Orthogonal polynomials with hyperoctahedral symmetry and their asymptotics.
#[derive(Parser)]
#[command(name = "hyperoct", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monic orthogonal polynomials and their squared norms (JSON).
    Ortho(Common),
    /// Truncated asymptotic functions P^(m) (JSON).
    Asym(Common),
    /// Exactness check for polynomial c-functions over a weight box (CSV).
    Exact(Common),
    /// Error decay along the ray l*lambda, l = 1..l_max (CSV + summary JSON).
    DecayRay(Common),
    /// Pairwise inner products of normalized polynomials (CSV).
    OrthoScan(Common),
    /// Gram matrix of the monomial basis below lambda (CSV).
    Gram(Common),
    /// Gram matrix drift as the truncation order grows (JSON).
    Stability(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spec as a JSON object or a preset name
    /// (symplectic, hall-littlewood-sample, koornwinder-sample).
    #[arg(long)]
    spec: Option<String>,
    /// Rank N.
    #[arg(short = 'N', long = "rank")]
    n: Option<usize>,
    /// Truncation order K of the weight function.
    #[arg(short = 'K', long = "order")]
    order: Option<usize>,
    /// dominance or lexicographic.
    #[arg(long)]
    ordering: Option<String>,
    /// A weight, e.g. 2,1 (repeatable).
    #[arg(long = "lambda", allow_hyphen_values = true)]
    lambdas: Vec<String>,
    /// Add every dominant weight with largest part at most this.
    #[arg(long)]
    max_part: Option<i64>,
    #[arg(long)]
    l_max: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    m_ref: Option<usize>,
    #[arg(long)]
    k_step: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Digits for decimal renderings.
    #[arg(long)]
    digits: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_weight(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Config {
            field: "lambda".into(),
            message: format!("{s:?}: {e}"),
        })
}

fn overrides(kind: &str, c: &Common) -> Result<RawConfig, Error> {
    let spec = match &c.spec {
        None => None,
        Some(s) if s.trim_start().starts_with('{') => Some(serde_json::from_str(s).map_err(|e| Error::Config {
            field: "spec".into(),
            message: e.to_string(),
        })?),
        Some(s) => Some(serde_json::Value::String(s.clone())),
    };
    let mut lambdas: Vec<Vec<i64>> = c.lambdas.iter().map(|s| parse_weight(s)).collect::<Result<_, _>>()?;
    let (lambda, lambdas) = match lambdas.len() {
        0 => (None, None),
        1 => (lambdas.pop(), None),
        _ => (None, Some(lambdas)),
    };
    Ok(RawConfig {
        experiment: Some(kind.into()),
        spec,
        n: c.n,
        order: c.order,
        ordering: c.ordering.clone(),
        lambda,
        lambdas,
        max_part: c.max_part,
        l_max: c.l_max,
        m: c.m,
        m_ref: c.m_ref,
        k_step: c.k_step,
        tol: c.tol,
        digits: c.digits,
        output: c.output.clone(),
    })
}

fn execute(kind: &str, c: &Common) -> Result<bool, Error> {
    let base = match &c.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let mut raw = base.merge(overrides(kind, c)?);
    // weights from flags replace the config's weight selection entirely
    if !c.lambdas.is_empty() || c.max_part.is_some() {
        let o = overrides(kind, c)?;
        raw.lambda = o.lambda;
        raw.lambdas = o.lambdas;
        raw.max_part = o.max_part;
    }
    let config = Config::resolve(raw)?;
    if let Some(t) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build_global()
            .map_err(|e| Error::Config {
                field: "threads".into(),
                message: e.to_string(),
            })?;
    }
    let outcome = experiment::run(&config)?;
    if let Some(text) = experiment::write_outcome(&config, &outcome)? {
        std::io::stdout().write_all(text.as_bytes())?;
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Ortho(c) => ("ortho", c),
        Command::Asym(c) => ("asym", c),
        Command::Exact(c) => ("exact", c),
        Command::DecayRay(c) => ("decay-ray", c),
        Command::OrthoScan(c) => ("ortho-scan", c),
        Command::Gram(c) => ("gram", c),
        Command::Stability(c) => ("stability", c),
    };
    match execute(kind, common) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("hyperoct: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("hyperoct: {e}");
            ExitCode::from(experiment::exit_code(&e))
        }
    }
}
