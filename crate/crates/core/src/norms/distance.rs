//! Upper estimates of the Banach-Mazur distance between two p-normed spaces.
//!
//! `d(X, Y) = inf ‖T‖·‖T⁻¹‖` over isomorphisms `T`. The objective
//! `log‖T‖ + log‖T⁻¹‖` is invariant under `T ↦ cT`, so the search runs over
//! all of GL(n) and maps are rescaled to `|det| = 1` only for reporting.
//! Any candidate gives an upper bound; no lower-bound certificate is
//! attempted.

use rayon::prelude::*;
use serde::Serialize;

use super::simplex::nelder_mead;
use super::{operator_norm, PNormedSpace};
use crate::error::{Error, Result};
use crate::rng::{self, domain};
use crate::types::LinearMap;

/// Candidates with a larger condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;
/// Local search stops once the simplex is this small.
pub const SIMPLEX_XTOL: f64 = 1e-8;
const SIMPLEX_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceConfig {
    /// Objective evaluations allowed per restart.
    pub budget: usize,
    /// Random restarts on top of the identity and the axis permutations.
    pub restarts: usize,
    pub seed: u64,
    /// Additional deterministic starting maps, tried after the permutations.
    pub extra_starts: Vec<LinearMap>,
}

impl DistanceConfig {
    pub fn new(budget: usize, restarts: usize, seed: u64) -> Self {
        Self { budget, restarts, seed, extra_starts: Vec::new() }
    }

    pub fn with_start(mut self, start: LinearMap) -> Self {
        self.extra_starts.push(start);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEstimate {
    /// `‖T‖·‖T⁻¹‖` for the best map found, at least 1.
    pub upper_bound: f64,
    #[serde(serialize_with = "serialize_map")]
    pub best_map: LinearMap,
    pub evaluations: usize,
    pub seed: u64,
    /// Which start produced the best map (identity is 0).
    pub best_start: usize,
}

fn serialize_map<S: serde::Serializer>(map: &LinearMap, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let n = map.dim();
    let mut seq = s.serialize_seq(Some(n))?;
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| map.matrix()[(i, j)]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// `log‖T‖_{X→Y} + log‖T⁻¹‖_{Y→X}`, or `+∞` when `T` is too close to
/// singular.
pub fn distance_objective(map: &LinearMap, x: &PNormedSpace, y: &PNormedSpace) -> Result<f64> {
    if !(map.condition_number() <= MAX_CONDITION) {
        return Ok(f64::INFINITY);
    }
    let inverse = map.inverse()?;
    Ok(operator_norm(map, x, y)?.ln() + operator_norm(&inverse, y, x)?.ln())
}

/// Best `‖T‖·‖T⁻¹‖` found by Nelder-Mead from a fixed set of starts.
///
/// Starts, in order: the identity, the remaining axis permutations in
/// lexicographic order, `config.extra_starts`, then `config.restarts`
/// Gaussian matrices drawn from stream `(seed, DISTANCE, r)`. Each start is
/// refined independently with up to `config.budget` evaluations; the
/// smallest objective wins, ties going to the earliest start.
pub fn distance_estimate(
    x: &PNormedSpace,
    y: &PNormedSpace,
    config: &DistanceConfig,
) -> Result<DistanceEstimate> {
    let n = x.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: y.dim() });
    }
    if config.budget == 0 {
        return Err(Error::invalid("distance search budget must be at least 1"));
    }
    if let Some(bad) = config.extra_starts.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: bad.dim() });
    }
    // surfaces enumeration-budget errors before the search swallows them
    distance_objective(&LinearMap::identity(n), x, y)?;

    let mut starts: Vec<LinearMap> = permutation_maps(n);
    starts.extend(config.extra_starts.iter().cloned());
    starts.extend((0..config.restarts as u64).map(|r| random_start(n, config.seed, r)));

    let runs: Vec<(f64, Vec<f64>, usize)> = starts
        .par_iter()
        .map(|start| local_search(start, x, y, config.budget))
        .collect();

    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best_start, (value, params, _)) = runs
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1 .0 < a.1 .0 { b } else { a })
        .expect("identity start is always present");
    if !value.is_finite() {
        return Err(Error::numerical("every candidate map was singular"));
    }

    let best_map = LinearMap::from_row_slice(n, &params)?.normalized()?;
    let product = operator_norm(&best_map, x, y)? * operator_norm(&best_map.inverse()?, y, x)?;
    Ok(DistanceEstimate {
        upper_bound: product.max(1.0),
        best_map,
        evaluations,
        seed: config.seed,
        best_start,
    })
}

/// Nelder-Mead from `start`, restarted from its own optimum while that keeps
/// improving and budget remains.
fn local_search(
    start: &LinearMap,
    x: &PNormedSpace,
    y: &PNormedSpace,
    budget: usize,
) -> (f64, Vec<f64>, usize) {
    let n = x.dim();
    let objective = |params: &[f64]| -> f64 {
        LinearMap::from_row_slice(n, params)
            .and_then(|m| distance_objective(&m, x, y))
            .unwrap_or(f64::INFINITY)
    };
    let mut best_params = row_major(&start.normalized().unwrap_or_else(|_| start.clone()));
    let mut best_value = objective(&best_params);
    let mut used = 1;
    while used < budget {
        let out = nelder_mead(objective, &best_params, SIMPLEX_STEP, budget - used, SIMPLEX_XTOL);
        used += out.evaluations;
        let improved = out.value < best_value - 1e-12;
        if out.value < best_value {
            best_value = out.value;
            best_params = out.x;
            if let Ok(m) = LinearMap::from_row_slice(n, &best_params).and_then(|m| m.normalized()) {
                best_params = row_major(&m);
            }
        }
        if !out.converged || !improved {
            break;
        }
    }
    (best_value, best_params, used)
}

fn row_major(map: &LinearMap) -> Vec<f64> {
    let n = map.dim();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|ij| map.matrix()[ij]).collect()
}

fn random_start(n: usize, seed: u64, restart: u64) -> LinearMap {
    let mut rng = rng::stream(seed, domain::DISTANCE, restart);
    loop {
        let entries = rng::normal_vector(&mut rng, n * n);
        if let Ok(m) = LinearMap::from_row_slice(n, &entries).and_then(|m| m.normalized()) {
            return m;
        }
    }
}

/// All `n!` permutation matrices, identity first, in lexicographic order.
fn permutation_maps(n: usize) -> Vec<LinearMap> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        let mut entries = vec![0.0; n * n];
        for (col, &row) in perm.iter().enumerate() {
            entries[row * n + col] = 1.0;
        }
        out.push(LinearMap::from_row_slice(n, &entries).expect("permutation matrix"));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{PBody, PExponent};

    fn l_half(n: usize) -> PNormedSpace {
        PBody::lp_ball(n, PExponent::new(0.5).unwrap()).unwrap().into()
    }

    #[test]
    fn permutations_are_complete() {
        let perms = permutation_maps(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], LinearMap::identity(3));
        assert_eq!(permutation_maps(1).len(), 1);
    }

    #[test]
    fn identical_spaces_have_distance_one() {
        let x = l_half(2);
        let est = distance_estimate(&x, &x, &DistanceConfig::new(50, 1, 0)).unwrap();
        assert!(est.upper_bound <= 1.0 + 1e-6);
        assert!(est.upper_bound >= 1.0);
    }

    #[test]
    fn objective_rejects_near_singular_maps() {
        let x = l_half(2);
        let m = LinearMap::diagonal(&[1.0, 1e-9]).unwrap();
        assert_eq!(distance_objective(&m, &x, &x).unwrap(), f64::INFINITY);
    }

    #[test]
    fn seed_determines_result() {
        let x = l_half(2);
        let y = x.transformed(&LinearMap::from_row_slice(2, &[1.0, 0.4, 0.2, 1.0]).unwrap()).unwrap();
        let cfg = DistanceConfig::new(200, 2, 9);
        let a = distance_estimate(&x, &y, &cfg).unwrap();
        let b = distance_estimate(&x, &y, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
