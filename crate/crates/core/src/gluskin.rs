//! Random Gluskin-type spaces `Q_p(A) = p-conv{±e_i, ±P_i}` and the Monte
//! Carlo experiments built on them.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::caratheodory::contains;
use crate::error::{Error, Result};
use crate::linalg::binomial;
use crate::norms::{distance_estimate, envelope_sandwich_check, DistanceConfig, PNormedSpace};
use crate::rng::{self, domain};
use crate::types::{GeneratorSet, LinearMap, PBody, PExponent, Vector, DEFAULT_TOL};

/// Samples per Monte Carlo block; each block owns one random stream.
pub const MC_BLOCK: usize = 4096;

/// Largest `|cos|` allowed between two generators of a random space.
const MAX_ALIGNMENT: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpaceSpec {
    pub n: usize,
    pub p: PExponent,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub hits: u64,
}

/// Uniform point of the unit sphere `S^(n-1)`: a Gaussian vector,
/// normalized. The zero vector is redrawn.
pub fn sample_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    assert!(n >= 1, "sphere dimension must be positive");
    loop {
        let v = Vector::from_vec(rng::normal_vector(rng, n));
        let norm = v.norm();
        if norm > 0.0 && norm.is_finite() {
            return v / norm;
        }
    }
}

/// `Q_p(A)` for `A = (P_1..P_n)` drawn from stream `(seed, SPACE, 0)`.
///
/// Generators are `e_1..e_n, P_1..P_n`. For `n ≥ 2`, a `P_i` nearly parallel
/// to an earlier generator is redrawn (a null event in exact arithmetic).
pub fn random_gluskin_space(spec: RandomSpaceSpec) -> Result<PNormedSpace> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let mut rng = rng::stream(spec.seed, domain::SPACE, 0);
    let mut gens = GeneratorSet::canonical(n)?.points().to_vec();
    while gens.len() < 2 * n {
        let candidate = sample_sphere(n, &mut rng);
        let aligned = n >= 2 && gens.iter().any(|g| g.dot(&candidate).abs() > MAX_ALIGNMENT);
        if !aligned {
            gens.push(candidate);
        }
    }
    let body = PBody::new(GeneratorSet::new(n, gens)?, spec.p)?;
    Ok(PNormedSpace::new(body))
}

/// `|B_{ℓ_p^n}| = 2^n Γ(1 + 1/p)^n / Γ(1 + n/p)`, evaluated in log space.
pub fn ball_volume_lp(n: usize, p: PExponent) -> f64 {
    let (n, p) = (n as f64, p.value());
    (n * std::f64::consts::LN_2 + n * ln_gamma(1.0 + 1.0 / p) - ln_gamma(1.0 + n / p)).exp()
}

/// `|B_{ℓ_2^n}| = π^(n/2) / Γ(1 + n/2)`.
pub fn euclidean_ball_volume(n: usize) -> f64 {
    let n = n as f64;
    (0.5 * n * std::f64::consts::PI.ln() - ln_gamma(1.0 + 0.5 * n)).exp()
}

/// Uniform point of the Euclidean unit ball.
fn sample_ball<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    let dir = sample_sphere(n, rng);
    let u: f64 = rng.random();
    dir * u.powf(1.0 / n as f64)
}

/// Lebesgue volume of the unit ball by rejection sampling in `B_{ℓ_2^n}`.
///
/// Needs every generator inside the Euclidean ball, which puts the whole
/// body there too (`Σ λ_i ≤ (Σ λ_i^p)^(1/p) ≤ 1`). Samples come in blocks of
/// [`MC_BLOCK`], block `b` drawing from stream `(seed, VOLUME, b)`.
pub fn volume_mc(space: &PNormedSpace, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let body = space.body();
    if body.generators().points().iter().any(|g| g.norm() > 1.0 + 1e-12) {
        return Err(Error::invalid("volume estimation needs generators of Euclidean norm at most 1"));
    }
    let n = space.dim();
    let blocks = samples.div_ceil(MC_BLOCK);
    let hits: Vec<u64> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed, domain::VOLUME, b as u64);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut hits = 0u64;
            for _ in 0..count {
                if contains(&sample_ball(n, &mut rng), body, DEFAULT_TOL)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    let hits: u64 = hits.iter().sum();
    let fraction = hits as f64 / samples as f64;
    let ball = euclidean_ball_volume(n);
    Ok(VolumeEstimate {
        mean: fraction * ball,
        std_error: ball * (fraction * (1.0 - fraction) / samples as f64).sqrt(),
        samples,
        hits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeBoundMode {
    /// Every `n`-subset determinant bounded by 1 (Hadamard, unit generators).
    Hadamard,
    /// Exact `|det|` of every `n`-subset of the signed generators.
    Determinant,
}

/// Upper bound for `|B|` from the covering of `B` by the p-convex hulls of
/// `n`-subsets of the `2m` signed generators, each of volume
/// `|det| · |B_{ℓ_p^n}| / 2^n`. For `Q_p(A)`, `2m = 4n`.
pub fn volume_upper_bound(space: &PNormedSpace, mode: VolumeBoundMode) -> Result<f64> {
    let body = space.body();
    let gens = body.generators();
    let n = space.dim();
    let simplex = ball_volume_lp(n, body.p()) / 2f64.powi(n as i32);
    match mode {
        VolumeBoundMode::Hadamard => {
            if gens.points().iter().any(|g| g.norm() > 1.0 + 1e-12) {
                return Err(Error::invalid("Hadamard bound needs generators of norm at most 1"));
            }
            Ok(binomial(2 * gens.len() as u64, n as u64) as f64 * simplex)
        }
        VolumeBoundMode::Determinant => {
            let signed: Vec<Vector> = gens
                .points()
                .iter()
                .flat_map(|g| [g.clone(), -g.clone()])
                .collect();
            let required = binomial(signed.len() as u64, n as u64);
            if required > crate::caratheodory::ENUMERATION_LIMIT {
                return Err(Error::BudgetExceeded {
                    required,
                    limit: crate::caratheodory::ENUMERATION_LIMIT,
                });
            }
            let mut total = 0.0;
            for_each_subset(signed.len(), n, &mut |idx| {
                let cols: Vec<Vector> = idx.iter().map(|&i| signed[i].clone()).collect();
                total += nalgebra::DMatrix::from_columns(&cols).determinant().abs();
            });
            Ok(total * simplex)
        }
    }
}

fn for_each_subset(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..=m - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    if k <= m {
        rec(0, m, k, &mut Vec::with_capacity(k), f);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma7Config {
    pub t: f64,
    pub trials: usize,
    pub seed: u64,
    /// Monte Carlo samples for `|Q_p(A')|`.
    pub volume_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma7Report {
    pub n: usize,
    pub p: f64,
    pub t: f64,
    /// `2^(1/p) t`.
    pub radius: f64,
    pub trials: usize,
    pub successes: usize,
    pub empirical: f64,
    /// Binomial standard error of `empirical`.
    pub sigma: f64,
    pub volume: VolumeEstimate,
    /// `(2^(1/p) t)^(n²) (|Q_p(A')| / |B_{ℓ_2^n}|)^n`.
    pub bound: f64,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    /// `empirical ≤ bound + 3σ`, or the bound is vacuous.
    pub consistent: bool,
}

/// Estimates `P{A : ‖T P_i‖_{Q_p(A')} ≤ 2^(1/p) t for all i}` over random
/// `A` and compares it with the volumetric bound.
///
/// `T` is rescaled to `|det T| = 1`. Trial `i` draws its `n` sphere points
/// from stream `(seed, LEMMA7, i)`; the volume uses a derived seed.
pub fn lemma7_experiment(
    map: &LinearMap,
    fixed: &PNormedSpace,
    config: &Lemma7Config,
) -> Result<Lemma7Report> {
    let n = fixed.dim();
    if map.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: map.dim() });
    }
    if !(config.t > 0.0) || !config.t.is_finite() {
        return Err(Error::invalid(format!("t must be positive, got {}", config.t)));
    }
    if config.trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let map = map.normalized()?;
    let p = fixed.p().value();
    let radius = 2f64.powf(1.0 / p) * config.t;

    let outcomes: Vec<bool> = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(config.seed, domain::LEMMA7, i);
            let points: Vec<Vector> = (0..n).map(|_| sample_sphere(n, &mut rng)).collect();
            for point in &points {
                if !contains(&(map.apply(point) / radius), fixed.body(), DEFAULT_TOL)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<_>>()?;
    let successes = outcomes.iter().filter(|&&ok| ok).count();
    let empirical = successes as f64 / config.trials as f64;
    let sigma = (empirical * (1.0 - empirical) / config.trials as f64).sqrt();

    let volume = volume_mc(fixed, config.volume_samples, rng::derive_seed(config.seed, 0))?;
    let ratio = volume.mean / euclidean_ball_volume(n);
    let bound = radius.powi((n * n) as i32) * ratio.powi(n as i32);
    let vacuous = bound >= 1.0;
    Ok(Lemma7Report {
        n,
        p,
        t: config.t,
        radius,
        trials: config.trials,
        successes,
        empirical,
        sigma,
        volume,
        bound,
        vacuous,
        consistent: vacuous || empirical <= bound + 3.0 * sigma,
    })
}

/// The `t` at which the volumetric bound of [`lemma7_experiment`] equals
/// `target`, given the volume ratio `|Q_p(A')| / |B_{ℓ_2^n}|`.
pub fn lemma7_t_for_bound(n: usize, p: PExponent, volume_ratio: f64, target: f64) -> f64 {
    let n = n as f64;
    let radius = (target / volume_ratio.powf(n)).powf(1.0 / (n * n));
    radius / 2f64.powf(1.0 / p.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiameterConfig {
    pub n_values: Vec<usize>,
    pub p: PExponent,
    pub pairs: usize,
    /// Objective evaluations per distance-search restart.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Random directions per space for the Banach-envelope ratio; 0 skips it.
    pub envelope_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub p: f64,
    pub pair: usize,
    pub distance_upper: f64,
    /// `n^(2/p - 1)`, the known upper bound on the diameter.
    pub reference: f64,
    /// Largest `‖x‖_X / ‖x‖_{X^b}` observed for each space of the pair.
    pub envelope_ratio_a: f64,
    pub envelope_ratio_b: f64,
}

/// Distance estimates between independent random pairs `(Q_p(A), Q_p(A'))`
/// for each dimension, one row per pair, in `(n, pair)` order.
///
/// Pair `k` of dimension `n` uses child seeds derived from `seed`, so adding
/// dimensions or pairs never changes existing rows.
pub fn diameter_experiment(config: &DiameterConfig) -> Result<Vec<ScalingRow>> {
    if config.n_values.contains(&0) {
        return Err(Error::invalid("dimensions must be positive"));
    }
    let jobs: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.pairs).map(move |k| (n, k)))
        .collect();
    let banach = PExponent::envelope(1.0)?;
    jobs.par_iter()
        .map(|&(n, pair)| {
            let base = rng::derive_seed(config.seed, ((n as u64) << 24) | pair as u64);
            let spec = |i| RandomSpaceSpec { n, p: config.p, seed: rng::derive_seed(base, i) };
            let x = random_gluskin_space(spec(0))?;
            let y = random_gluskin_space(spec(1))?;
            let search = DistanceConfig::new(config.budget, config.restarts, rng::derive_seed(base, 2));
            let estimate = distance_estimate(&x, &y, &search)?;
            let (ratio_a, ratio_b) = if config.envelope_samples > 0 {
                let env_seed = rng::derive_seed(base, 3);
                (
                    envelope_sandwich_check(&x, banach, config.envelope_samples, env_seed)?.max_ratio,
                    envelope_sandwich_check(&y, banach, config.envelope_samples, env_seed)?.max_ratio,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(ScalingRow {
                n,
                p: config.p.value(),
                pair,
                distance_upper: estimate.upper_bound,
                reference: (n as f64).powf(2.0 / config.p.value() - 1.0),
                envelope_ratio_a: ratio_a,
                envelope_ratio_b: ratio_b,
            })
        })
        .collect()
}

/// Median of `distance_upper` per dimension, in `config.n_values` order.
pub fn median_by_dimension(rows: &[ScalingRow]) -> Vec<(usize, f64)> {
    let mut dims: Vec<usize> = Vec::new();
    for r in rows {
        if !dims.contains(&r.n) {
            dims.push(r.n);
        }
    }
    dims.into_iter()
        .map(|n| {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.distance_upper).collect();
            v.sort_by(f64::total_cmp);
            let mid = v.len() / 2;
            let median = if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) };
            (n, median)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caratheodory::gauge_bruteforce;

    fn p(v: f64) -> PExponent {
        PExponent::envelope(v).unwrap()
    }

    #[test]
    fn sphere_samples_are_unit() {
        let mut rng = rng::stream(1, domain::SAMPLES, 0);
        for n in 1..6 {
            let v = sample_sphere(n, &mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        let v = sample_sphere(1, &mut rng);
        assert_eq!(v[0].abs(), 1.0);
    }

    #[test]
    fn sphere_coordinate_mean_is_centred() {
        let mut rng = rng::stream(2, domain::SAMPLES, 0);
        let draws = 100_000;
        let mean: f64 = (0..draws).map(|_| sample_sphere(3, &mut rng)[0]).sum::<f64>() / draws as f64;
        assert!(mean.abs() < 5.0 / (draws as f64).sqrt(), "{mean}");
    }

    #[test]
    fn lp_ball_volumes() {
        assert!((ball_volume_lp(2, p(1.0)) - 2.0).abs() < 1e-12);
        assert!((ball_volume_lp(2, p(0.5)) - 2.0 / 3.0).abs() < 1e-12);
        assert!((ball_volume_lp(1, p(0.5)) - 2.0).abs() < 1e-12);
        assert!((ball_volume_lp(3, p(0.5)) - 64.0 / 720.0).abs() < 1e-12);
        assert!((euclidean_ball_volume(2) - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn gluskin_space_shape_and_determinism() {
        let spec = RandomSpaceSpec { n: 3, p: p(0.5), seed: 5 };
        let a = random_gluskin_space(spec).unwrap();
        let b = random_gluskin_space(spec).unwrap();
        assert_eq!(a, b);
        let gens = a.body().generators();
        assert_eq!(gens.len(), 6);
        assert!(gens.points().iter().all(|g| (g.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn generators_lie_in_their_own_ball() {
        let space = random_gluskin_space(RandomSpaceSpec { n: 2, p: p(0.5), seed: 42 }).unwrap();
        for g in space.body().generators().points() {
            let (gauge, _) = gauge_bruteforce(g, space.body(), 1e-10).unwrap();
            assert!(gauge <= 1.0 + 1e-9, "{gauge}");
        }
    }

    #[test]
    fn one_dimensional_space_is_an_interval() {
        let space = random_gluskin_space(RandomSpaceSpec { n: 1, p: p(0.5), seed: 3 }).unwrap();
        assert_eq!(space.body().generators().len(), 2);
        let bound = volume_upper_bound(&space, VolumeBoundMode::Hadamard).unwrap();
        assert!((bound - 4.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_for_plane() {
        let space = random_gluskin_space(RandomSpaceSpec { n: 2, p: p(0.5), seed: 1 }).unwrap();
        let bound = volume_upper_bound(&space, VolumeBoundMode::Hadamard).unwrap();
        assert!((bound - 28.0 / 6.0).abs() < 1e-12);
        let tighter = volume_upper_bound(&space, VolumeBoundMode::Determinant).unwrap();
        assert!(tighter <= bound + 1e-12);
    }

    #[test]
    fn volume_mc_is_blocked_deterministically() {
        let body: PNormedSpace = PBody::lp_ball(2, p(0.5)).unwrap().into();
        let a = volume_mc(&body, 10_000, 4).unwrap();
        let b = volume_mc(&body, 10_000, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.hits <= 10_000);
        assert!((a.mean - 2.0 / 3.0).abs() < 4.0 * a.std_error);
    }

    #[test]
    fn volume_mc_rejects_long_generators() {
        let gens = GeneratorSet::from_rows(2, &[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let space: PNormedSpace = PBody::new(gens, p(0.5)).unwrap().into();
        assert!(volume_mc(&space, 100, 0).is_err());
    }

    #[test]
    fn lemma7_rejects_bad_inputs() {
        let space = random_gluskin_space(RandomSpaceSpec { n: 2, p: p(0.5), seed: 0 }).unwrap();
        let id = LinearMap::identity(2);
        let cfg = |t, trials| Lemma7Config { t, trials, seed: 0, volume_samples: 100 };
        assert!(lemma7_experiment(&id, &space, &cfg(0.1, 0)).is_err());
        assert!(lemma7_experiment(&id, &space, &cfg(-1.0, 10)).is_err());
    }

    #[test]
    fn lemma7_large_t_is_certain() {
        let space = random_gluskin_space(RandomSpaceSpec { n: 2, p: p(0.5), seed: 0 }).unwrap();
        let cfg = Lemma7Config { t: 50.0, trials: 200, seed: 1, volume_samples: 2000 };
        let report = lemma7_experiment(&LinearMap::identity(2), &space, &cfg).unwrap();
        assert_eq!(report.empirical, 1.0);
        assert!(report.vacuous && report.consistent);
    }

    #[test]
    fn t_for_bound_inverts_bound() {
        let t = lemma7_t_for_bound(2, p(0.5), 0.4, 0.5);
        let radius = 4.0 * t;
        assert!((radius.powi(4) * 0.4f64.powi(2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diameter_rows_reference_and_order() {
        let cfg = DiameterConfig {
            n_values: vec![2],
            p: p(0.5),
            pairs: 2,
            budget: 60,
            restarts: 1,
            seed: 0,
            envelope_samples: 20,
        };
        let rows = diameter_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].reference, 8.0);
        assert!(rows.iter().all(|r| r.distance_upper >= 1.0));
        assert_eq!((rows[0].pair, rows[1].pair), (0, 1));
    }
}
