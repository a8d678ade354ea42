//! `pconvex`: gauges, Carathéodory reduction and random-space experiments
//! for p-convex bodies.
//!
//! Exit codes: 0 success, 2 invalid input, 3 enumeration budget exceeded,
//! 4 numerical failure.

mod experiments;
mod files;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pconvex::caratheodory::{caratheodory_reduce, caratheodory_zero, gauge_bruteforce};
use pconvex::gluskin::{random_gluskin_space, RandomSpaceSpec};
use pconvex::{PExponent, DEFAULT_TOL};
use serde_json::json;

use experiments::{AxiomsArgs, DiameterArgs, EnvelopeArgs, Lemma7Args, RunArgs, VolumeArgs};
use files::{parse_vector, read_body, read_json, BodyFile, CombinationFile};
use table::{emit, Manifest, Table};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<pconvex::Error> for CliError {
    fn from(e: pconvex::Error) -> Self {
        let code = match e {
            pconvex::Error::BudgetExceeded { .. } => 3,
            pconvex::Error::Numerical(_) => 4,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pconvex", version, about = "Gauges and experiments for p-convex bodies (0 < p < 1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact gauge of a vector, with a minimal-weight witness.
    Gauge {
        body: PathBuf,
        /// Comma-separated coordinates, e.g. `0.25,-0.5`.
        #[arg(allow_hyphen_values = true)]
        vector: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Reduce a combination to linearly independent support.
    Reduce {
        body: PathBuf,
        combination: PathBuf,
        /// The combination evaluates to zero; reduce to at most n+1 terms.
        #[arg(long)]
        zero: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Write a random body Q_p(A) as JSON.
    RandomBody {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Seeded experiments producing CSV or JSON tables.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Subcommand)]
enum Experiment {
    /// Monte Carlo volume of a body against closed form and upper bound.
    Volume(VolumeArgs),
    /// Probability that a random tuple maps into a scaled fixed body.
    Lemma7(Lemma7Args),
    /// Distance estimates between random pairs, by dimension.
    Diameter(DiameterArgs),
    /// Sandwich between a space and its q-envelopes.
    Envelope(EnvelopeArgs),
    /// Random checks of the p-norm axioms.
    Axioms(AxiomsArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gauge { body, vector, tol, json } => gauge(&body, &vector, tol, json),
        Command::Reduce { body, combination, zero, tol } => reduce(&body, &combination, zero, tol),
        Command::RandomBody { n, p, seed } => {
            let space = random_gluskin_space(RandomSpaceSpec { n, p: PExponent::new(p)?, seed })?;
            let file = BodyFile::from_body(space.body(), Some(format!("Q_p(A) n={n} p={p} seed={seed}")));
            println!("{}", serde_json::to_string_pretty(&file).expect("body serializes"));
            Ok(())
        }
        Command::Experiment(exp) => experiment(exp),
    }
}

fn gauge(body: &Path, vector: &str, tol: f64, as_json: bool) -> Result<(), CliError> {
    let body = read_body(body)?;
    let x = parse_vector(vector)?;
    if x.len() != body.dim() {
        return Err(CliError::validation(format!(
            "vector has {} coordinates, body lives in R^{}",
            x.len(),
            body.dim()
        )));
    }
    let (value, witness) = gauge_bruteforce(&x, &body, tol)?;
    if as_json {
        let out = json!({ "gauge": value, "witness": CombinationFile::from_combination(&witness) });
        println!("{}", serde_json::to_string_pretty(&out).expect("gauge serializes"));
    } else {
        println!("gauge: {value}");
        for t in witness.terms() {
            let sign = if t.sign.factor() > 0.0 { '+' } else { '-' };
            println!("  {sign} {} * g[{}]", t.lambda, t.index);
        }
    }
    Ok(())
}

fn reduce(body: &Path, combination: &Path, zero: bool, tol: f64) -> Result<(), CliError> {
    let body = read_body(body)?;
    let comb = read_json::<CombinationFile>(combination)?.to_combination(body.dim())?;
    let reduce = if zero { caratheodory_zero } else { caratheodory_reduce };
    let result = reduce(&comb, body.generators(), body.p(), tol)?;
    let out = json!({
        "terms": CombinationFile::from_combination(&result.combination).terms,
        "term_count": result.combination.support_len(),
        "weight_before": result.weight_before,
        "weight_after": result.weight_after,
        "iterations": result.iterations,
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("reduction serializes"));
    Ok(())
}

fn experiment(exp: Experiment) -> Result<(), CliError> {
    let (name, run, parameters) = match &exp {
        Experiment::Volume(a) => ("volume", &a.run, serde_json::to_value(a)),
        Experiment::Lemma7(a) => ("lemma7", &a.run, serde_json::to_value(a)),
        Experiment::Diameter(a) => ("diameter", &a.run, serde_json::to_value(a)),
        Experiment::Envelope(a) => ("envelope", &a.run, serde_json::to_value(a)),
        Experiment::Axioms(a) => ("axioms", &a.run, serde_json::to_value(a)),
    };
    let run: RunArgs = run.clone();
    let parameters = parameters.expect("arguments serialize");
    if let Some(threads) = run.threads {
        if threads == 0 {
            return Err(CliError::validation("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::validation(format!("cannot start thread pool: {e}")))?;
    }
    let table: Table = match &exp {
        Experiment::Volume(a) => experiments::volume(a),
        Experiment::Lemma7(a) => experiments::lemma7(a),
        Experiment::Diameter(a) => experiments::diameter(a),
        Experiment::Envelope(a) => experiments::envelope(a),
        Experiment::Axioms(a) => experiments::axioms(a),
    }?;
    let manifest = Manifest::new(&format!("experiment {name}"), parameters, run.seed, run.out, table.len());
    emit(&table, run.out, run.output.as_deref(), &manifest)
}
