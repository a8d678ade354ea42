//! The `experiment` subcommands. Each builds a [`Table`]; randomness flows
//! only from `--seed` through derived child seeds.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pconvex::gluskin::{
    ball_volume_lp, diameter_experiment, euclidean_ball_volume, lemma7_experiment,
    lemma7_t_for_bound, random_gluskin_space, volume_mc, volume_upper_bound, DiameterConfig,
    Lemma7Config, RandomSpaceSpec, VolumeBoundMode,
};
use pconvex::norms::{check_pnorm_axioms, envelope_sandwich_check, PNormedSpace};
use pconvex::rng::derive_seed;
use pconvex::{LinearMap, PBody, PExponent};
use serde::Serialize;

use crate::files::{read_body, read_map};
use crate::table::{Format, Table};
use crate::CliError;

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    /// Seed for every random draw of the run.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub out: Format,
    /// Output file; a `<output>.manifest.json` is written next to it.
    /// Defaults to stdout, without manifest.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, env = "PCONVEX_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    /// The unit ball of `ℓ_p^n`, generators `±e_i`.
    Lp,
    /// Random `Q_p(A)`.
    Gluskin,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VolumeArgs {
    #[arg(long, required_unless_present = "body")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "lp")]
    pub kind: BodyKind,
    /// Number of bodies (only differs between rows for `gluskin`).
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Body file to measure instead of a generated one.
    #[arg(long, conflicts_with_all = ["n", "kind", "count"])]
    pub body: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group = clap::ArgGroup::new("level").required(true).args(["t", "target_bound"]))]
pub struct Lemma7Args {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub t: Option<f64>,
    /// Pick `t` so that the volumetric bound equals this value.
    #[arg(long)]
    pub target_bound: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 100_000)]
    pub volume_samples: usize,
    /// Linear map as a JSON list of rows; identity by default.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Fixed body `Q_p(A')`; a random one by default.
    #[arg(long)]
    pub body: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiameterArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    /// Objective evaluations per search start.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Random search starts on top of identity and permutations.
    #[arg(long, default_value_t = 2)]
    pub restarts: usize,
    /// Directions per space for the Banach-envelope ratio; 0 disables it.
    #[arg(long, default_value_t = 200)]
    pub envelope_samples: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnvelopeArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Envelope exponents, comma separated; default `min(2p, 1)` and 1.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub spaces: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, conflicts_with_all = ["n", "spaces"])]
    pub body: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AxiomsArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 20)]
    pub spaces: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, conflicts_with_all = ["n", "spaces"])]
    pub body: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunArgs,
}

fn random_space(n: usize, p: PExponent, seed: u64) -> Result<PNormedSpace, CliError> {
    Ok(random_gluskin_space(RandomSpaceSpec { n, p, seed })?)
}

/// Bodies for per-space experiments: the file, or `count` random spaces.
fn spaces(
    body: &Option<PathBuf>,
    n: usize,
    p: PExponent,
    count: usize,
    seed: u64,
) -> Result<Vec<(PNormedSpace, u64)>, CliError> {
    match body {
        Some(path) => Ok(vec![(read_body(path)?.into(), seed)]),
        None => (0..count as u64)
            .map(|i| {
                let s = derive_seed(seed, i);
                Ok((random_space(n, p, s)?, s))
            })
            .collect(),
    }
}

pub fn volume(args: &VolumeArgs) -> Result<Table, CliError> {
    let seed = args.run.seed;
    let mut table = Table::new(&[
        "index", "n", "p", "kind", "samples", "hits", "mean", "std_error", "lp_ball_volume",
        "upper_bound",
    ]);
    let rows: Vec<(PNormedSpace, &str, u64)> = match &args.body {
        Some(path) => vec![(read_body(path)?.into(), "file", seed)],
        None => {
            let n = args.n.expect("clap requires --n without --body");
            let p = PExponent::new(args.p)?;
            (0..args.count as u64)
                .map(|i| {
                    let s = derive_seed(seed, i);
                    Ok(match args.kind {
                        BodyKind::Lp => (PBody::lp_ball(n, p)?.into(), "lp", s),
                        BodyKind::Gluskin => (random_space(n, p, s)?, "gluskin", s),
                    })
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    for (i, (space, kind, s)) in rows.into_iter().enumerate() {
        let est = volume_mc(&space, args.samples, s)?;
        let upper = volume_upper_bound(&space, VolumeBoundMode::Hadamard)?;
        table.push(vec![
            i.into(),
            space.dim().into(),
            space.p().value().into(),
            kind.into(),
            est.samples.into(),
            est.hits.into(),
            est.mean.into(),
            est.std_error.into(),
            ball_volume_lp(space.dim(), space.p()).into(),
            upper.into(),
        ]);
    }
    Ok(table)
}

pub fn lemma7(args: &Lemma7Args) -> Result<Table, CliError> {
    let seed = args.run.seed;
    let p = PExponent::new(args.p)?;
    let fixed: PNormedSpace = match &args.body {
        Some(path) => read_body(path)?.into(),
        None => random_space(args.n, p, derive_seed(seed, 1))?,
    };
    let map = match &args.map {
        Some(path) => read_map(path)?,
        None => LinearMap::identity(fixed.dim()),
    };
    let t = match (args.t, args.target_bound) {
        (Some(t), _) => t,
        (None, Some(target)) => {
            if target.is_nan() || target <= 0.0 {
                return Err(CliError::validation("--target-bound must be positive"));
            }
            // same volume draw the experiment itself makes
            let vol = volume_mc(&fixed, args.volume_samples, derive_seed(seed, 0))?;
            let ratio = vol.mean / euclidean_ball_volume(fixed.dim());
            lemma7_t_for_bound(fixed.dim(), fixed.p(), ratio, target)
        }
        (None, None) => unreachable!("clap requires --t or --target-bound"),
    };
    let config = Lemma7Config { t, trials: args.trials, seed, volume_samples: args.volume_samples };
    let r = lemma7_experiment(&map, &fixed, &config)?;
    let mut table = Table::new(&[
        "n", "p", "t", "radius", "trials", "successes", "empirical", "sigma", "volume",
        "volume_std_error", "bound", "vacuous", "consistent",
    ]);
    table.push(vec![
        r.n.into(),
        r.p.into(),
        r.t.into(),
        r.radius.into(),
        r.trials.into(),
        r.successes.into(),
        r.empirical.into(),
        r.sigma.into(),
        r.volume.mean.into(),
        r.volume.std_error.into(),
        r.bound.into(),
        r.vacuous.into(),
        r.consistent.into(),
    ]);
    Ok(table)
}

pub fn diameter(args: &DiameterArgs) -> Result<Table, CliError> {
    if args.pairs == 0 {
        return Err(CliError::validation("--pairs must be at least 1"));
    }
    let config = DiameterConfig {
        n_values: args.n.clone(),
        p: PExponent::new(args.p)?,
        pairs: args.pairs,
        budget: args.budget,
        restarts: args.restarts,
        seed: args.run.seed,
        envelope_samples: args.envelope_samples,
    };
    let mut table = Table::new(&[
        "n", "p", "pair", "distance_upper", "reference", "envelope_ratio_a", "envelope_ratio_b",
    ]);
    for r in diameter_experiment(&config)? {
        table.push(vec![
            r.n.into(),
            r.p.into(),
            r.pair.into(),
            r.distance_upper.into(),
            r.reference.into(),
            r.envelope_ratio_a.into(),
            r.envelope_ratio_b.into(),
        ]);
    }
    Ok(table)
}

pub fn envelope(args: &EnvelopeArgs) -> Result<Table, CliError> {
    let p = PExponent::new(args.p)?;
    let spaces = spaces(&args.body, args.n, p, args.spaces, args.run.seed)?;
    let mut table = Table::new(&[
        "space", "n", "p", "q", "samples", "bound", "max_ratio", "lower_violations",
        "upper_violations",
    ]);
    for (i, (space, s)) in spaces.iter().enumerate() {
        let pv = space.p().value();
        let mut qs = if args.q.is_empty() { vec![(2.0 * pv).min(1.0), 1.0] } else { args.q.clone() };
        qs.dedup();
        for q in qs {
            let r = envelope_sandwich_check(space, PExponent::envelope(q)?, args.samples, derive_seed(*s, 1))?;
            table.push(vec![
                i.into(),
                space.dim().into(),
                pv.into(),
                q.into(),
                r.samples.into(),
                r.bound.into(),
                r.max_ratio.into(),
                r.lower_violations.into(),
                r.upper_violations.into(),
            ]);
        }
    }
    Ok(table)
}

pub fn axioms(args: &AxiomsArgs) -> Result<Table, CliError> {
    let p = PExponent::new(args.p)?;
    let spaces = spaces(&args.body, args.n, p, args.spaces, args.run.seed)?;
    let mut table = Table::new(&[
        "space", "n", "p", "samples", "positivity_violations", "homogeneity_violations",
        "triangle_violations", "worst_homogeneity_error", "worst_triangle_margin",
    ]);
    for (i, (space, s)) in spaces.iter().enumerate() {
        let r = check_pnorm_axioms(space, args.samples, derive_seed(*s, 1))?;
        table.push(vec![
            i.into(),
            space.dim().into(),
            space.p().value().into(),
            r.samples.into(),
            r.positivity_violations.into(),
            r.homogeneity_violations.into(),
            r.triangle_violations.into(),
            r.worst_homogeneity_error.into(),
            r.worst_triangle_margin.into(),
        ]);
    }
    Ok(table)
}
