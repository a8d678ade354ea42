//! Quasi-normed spaces given by finitely generated p-convex unit balls.

mod distance;
mod simplex;

pub use distance::{distance_estimate, distance_objective, DistanceConfig, DistanceEstimate};
pub use simplex::{nelder_mead, SimplexOutcome};

use rayon::prelude::*;
use serde::Serialize;

use crate::caratheodory::gauge_bruteforce;
use crate::error::{Error, Result};
use crate::rng::{self, domain};
use crate::types::{LinearMap, PBody, PExponent, Vector, DEFAULT_TOL};

/// Relative tolerance for the axiom and sandwich checks.
pub const CHECK_TOL: f64 = 1e-9;

/// `R^n` equipped with the gauge of a p-convex body.
#[derive(Debug, Clone, PartialEq)]
pub struct PNormedSpace {
    body: PBody,
}

impl PNormedSpace {
    pub fn new(body: PBody) -> Self {
        Self { body }
    }

    #[inline]
    pub fn body(&self) -> &PBody {
        &self.body
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    #[inline]
    pub fn p(&self) -> PExponent {
        self.body.p()
    }

    /// The space whose unit ball is `map(B)`.
    pub fn transformed(&self, map: &LinearMap) -> Result<Self> {
        Ok(Self::new(self.body.transformed(map)?))
    }
}

impl From<PBody> for PNormedSpace {
    fn from(body: PBody) -> Self {
        Self::new(body)
    }
}

/// The p-norm of `x`, computed exactly by subset enumeration.
pub fn gauge(x: &Vector, space: &PNormedSpace) -> Result<f64> {
    gauge_bruteforce(x, &space.body, DEFAULT_TOL).map(|(g, _)| g)
}

/// `‖T‖_{X→Y}`.
///
/// Every unit vector of `X` is `Σ λ_i g_i` with `Σ λ_i^p ≤ 1`, so the
/// p-triangle inequality gives `‖Tx‖^p ≤ Σ λ_i^p ‖T g_i‖^p`, and the supremum
/// is attained at a generator.
pub fn operator_norm(map: &LinearMap, from: &PNormedSpace, to: &PNormedSpace) -> Result<f64> {
    operator_norm_argmax(map, from, to).map(|(norm, _)| norm)
}

/// Operator norm and the index of a generator attaining it.
pub fn operator_norm_argmax(
    map: &LinearMap,
    from: &PNormedSpace,
    to: &PNormedSpace,
) -> Result<(f64, usize)> {
    if map.dim() != from.dim() || map.dim() != to.dim() {
        return Err(Error::DimensionMismatch { expected: from.dim(), actual: map.dim() });
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, g) in from.body.generators().points().iter().enumerate() {
        let value = gauge(&map.apply(g), to)?;
        if value > best.0 {
            best = (value, i);
        }
    }
    Ok(best)
}

/// The q-envelope of a p-normed space, `p ≤ q ≤ 1`: same generators,
/// exponent `q`. Its unit ball `q-conv(±A)` equals `q-conv(B_X)` because
/// `±A ⊆ B_X ⊆ q-conv(±A)`. `q = 1` gives the Banach envelope; `q = p`
/// returns the space itself.
pub fn q_envelope(space: &PNormedSpace, q: PExponent) -> Result<PNormedSpace> {
    let p = space.p().value();
    if q.value() < p {
        return Err(Error::invalid(format!("envelope exponent {} is below p = {p}", q.value())));
    }
    Ok(PNormedSpace::new(space.body.with_exponent(q)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub positivity_violations: usize,
    pub homogeneity_violations: usize,
    pub triangle_violations: usize,
    /// Largest `|‖ax‖ - |a|‖x‖| / (|a|‖x‖)` seen.
    pub worst_homogeneity_error: f64,
    /// Largest `(‖x+y‖^p - ‖x‖^p - ‖y‖^p) / max(1, ‖x‖^p + ‖y‖^p)`; negative
    /// values mean every sample had slack.
    pub worst_triangle_margin: f64,
}

impl AxiomReport {
    pub fn violations(&self) -> usize {
        self.positivity_violations + self.homogeneity_violations + self.triangle_violations
    }
}

struct AxiomSample {
    positivity: bool,
    homogeneity_error: f64,
    triangle_margin: f64,
}

/// Checks positivity, absolute homogeneity and the p-triangle inequality
/// on `samples` random triples `(x, y, a)`.
///
/// Points are standard Gaussian vectors rescaled by `e^u`, `u ∈ [-3, 3]`, so
/// that several orders of magnitude are covered; `a ∈ [-10, 10]`.
pub fn check_pnorm_axioms(space: &PNormedSpace, samples: usize, seed: u64) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let n = space.dim();
    let p = space.p().value();
    let zero_ok = gauge(&Vector::zeros(n), space)? == 0.0;

    let results: Vec<AxiomSample> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            use rand::Rng;
            let mut rng = rng::stream(seed, domain::AXIOMS, i);
            let draw = |rng: &mut rng::StreamRng| {
                let scale = rng.random_range(-3.0..3.0_f64).exp();
                Vector::from_vec(rng::normal_vector(rng, n)) * scale
            };
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let mut a = 0.0;
            while a == 0.0 {
                a = rng.random_range(-10.0..10.0);
            }
            let gx = gauge(&x, space)?;
            let gy = gauge(&y, space)?;
            let gax = gauge(&(&x * a), space)?;
            let gxy = gauge(&(&x + &y), space)?;
            let expected = a.abs() * gx;
            let rhs = gx.powf(p) + gy.powf(p);
            Ok(AxiomSample {
                positivity: gx > 0.0 && gy > 0.0,
                homogeneity_error: (gax - expected).abs() / expected,
                triangle_margin: (gxy.powf(p) - rhs) / rhs.max(1.0),
            })
        })
        .collect::<Result<_>>()?;

    let mut report = AxiomReport {
        samples,
        positivity_violations: usize::from(!zero_ok),
        worst_triangle_margin: f64::NEG_INFINITY,
        ..Default::default()
    };
    for s in &results {
        report.positivity_violations += usize::from(!s.positivity);
        report.homogeneity_violations += usize::from(!(s.homogeneity_error <= CHECK_TOL));
        report.triangle_violations += usize::from(!(s.triangle_margin <= CHECK_TOL));
        report.worst_homogeneity_error = report.worst_homogeneity_error.max(s.homogeneity_error);
        report.worst_triangle_margin = report.worst_triangle_margin.max(s.triangle_margin);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub q: f64,
    /// `n^(1/p - 1/q)`.
    pub bound: f64,
    /// Largest observed `‖x‖_X / ‖x‖_{X^q}`, an empirical lower bound for
    /// `d(X, X^q)`.
    pub max_ratio: f64,
    /// Samples with `‖x‖_{X^q} > ‖x‖_X`.
    pub lower_violations: usize,
    /// Samples with `‖x‖_X > bound · ‖x‖_{X^q}`.
    pub upper_violations: usize,
}

impl SandwichReport {
    pub fn violations(&self) -> usize {
        self.lower_violations + self.upper_violations
    }
}

/// `(‖x‖_X, ‖x‖_{X^q})` for one point.
pub fn envelope_norms(x: &Vector, space: &PNormedSpace, envelope: &PNormedSpace) -> Result<(f64, f64)> {
    Ok((gauge(x, space)?, gauge(x, envelope)?))
}

/// Checks `‖x‖_{X^q} ≤ ‖x‖_X ≤ n^(1/p-1/q) ‖x‖_{X^q}` on random Gaussian
/// directions and reports the largest ratio seen.
pub fn envelope_sandwich_check(
    space: &PNormedSpace,
    q: PExponent,
    samples: usize,
    seed: u64,
) -> Result<SandwichReport> {
    let envelope = q_envelope(space, q)?;
    let n = space.dim();
    let p = space.p().value();
    let bound = (n as f64).powf(1.0 / p - 1.0 / q.value());

    let pairs: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, domain::ENVELOPE, i);
            let x = Vector::from_vec(rng::normal_vector(&mut rng, n));
            envelope_norms(&x, space, &envelope)
        })
        .collect::<Result<_>>()?;

    let mut report = SandwichReport {
        samples,
        q: q.value(),
        bound,
        max_ratio: 0.0,
        lower_violations: 0,
        upper_violations: 0,
    };
    for (norm_x, norm_env) in pairs {
        if norm_env > norm_x * (1.0 + CHECK_TOL) {
            report.lower_violations += 1;
        }
        if norm_x > bound * norm_env * (1.0 + CHECK_TOL) {
            report.upper_violations += 1;
        }
        report.max_ratio = report.max_ratio.max(norm_x / norm_env);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn l_half(n: usize) -> PNormedSpace {
        PBody::lp_ball(n, PExponent::new(0.5).unwrap()).unwrap().into()
    }

    #[test]
    fn gauge_examples() {
        let x = l_half(2);
        assert!((gauge(&dvector![1.0, 1.0], &x).unwrap() - 4.0).abs() < 1e-14);
        assert!((gauge(&dvector![0.25, 0.25], &x).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gauge(&dvector![0.0, 0.0], &x).unwrap(), 0.0);
    }

    #[test]
    fn operator_norm_examples() {
        let x = l_half(2);
        assert_eq!(operator_norm(&LinearMap::identity(2), &x, &x).unwrap(), 1.0);
        let d = operator_norm(&LinearMap::diagonal(&[2.0, 1.0]).unwrap(), &x, &x).unwrap();
        assert!((d - 2.0).abs() < 1e-12, "{d}");
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = LinearMap::from_row_slice(2, &[c, -c, c, c]).unwrap();
        let norm = operator_norm(&rot, &x, &x).unwrap();
        assert!((norm - 2.0 * 2f64.sqrt()).abs() < 1e-12, "{norm}");
    }

    #[test]
    fn axioms_hold_on_lp_ball() {
        let report = check_pnorm_axioms(&l_half(2), 1000, 3).unwrap();
        assert_eq!(report.violations(), 0, "{report:?}");
        assert!(report.worst_triangle_margin <= 0.0);
    }

    #[test]
    fn homogeneity_and_equality_case() {
        let x = l_half(2);
        let v = dvector![0.3, -0.7];
        let g = gauge(&v, &x).unwrap();
        assert!((gauge(&(&v * -2.0), &x).unwrap() - 2.0 * g).abs() < 1e-14);
        let e1 = dvector![1.0, 0.0];
        let lhs = gauge(&(&e1 * 2.0), &x).unwrap().powf(0.5);
        assert!((lhs - 2f64.sqrt()).abs() < 1e-15 && lhs <= 2.0);
    }

    #[test]
    fn envelope_examples() {
        let x = l_half(2);
        let same = q_envelope(&x, PExponent::envelope(0.5).unwrap()).unwrap();
        assert_eq!(same, x);
        let banach = q_envelope(&x, PExponent::envelope(1.0).unwrap()).unwrap();
        let t = dvector![0.5, 0.5];
        assert!((gauge(&t, &banach).unwrap() - 1.0).abs() < 1e-15);
        assert!((gauge(&t, &x).unwrap() - 2.0).abs() < 1e-15);
        assert!(q_envelope(&x, PExponent::envelope(0.3).unwrap()).is_err());
    }

    #[test]
    fn sandwich_on_lp_ball_is_tight_but_never_violated() {
        let report =
            envelope_sandwich_check(&l_half(2), PExponent::envelope(1.0).unwrap(), 500, 11).unwrap();
        assert_eq!(report.violations(), 0);
        assert_eq!(report.bound, 2.0);
        assert!(report.max_ratio <= 2.0 * (1.0 + 1e-12) && report.max_ratio > 1.9);
        let banach = q_envelope(&l_half(2), PExponent::envelope(1.0).unwrap()).unwrap();
        let (a, b) = envelope_norms(&dvector![0.0, 1.0], &l_half(2), &banach).unwrap();
        assert_eq!((a, b), (1.0, 1.0));
    }
}
