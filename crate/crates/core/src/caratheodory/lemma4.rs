//! Drop-one reduction of an `(n+1)`-term combination to at most `n` terms.
//!
//! Given independent `P_1..P_n` and an extra point `Q` in R^n, any point `M`
//! of `p-conv{P_1..P_n, Q, 0}` already lies in the p-convex hull of `0` and
//! some `n` of the `n + 1` points. Rather than tracing the boundary of the
//! image of the weight simplex, every drop candidate is solved directly:
//! there are only `n + 1` of them and one is guaranteed to work.

use crate::combination::weight_of;
use crate::error::{Error, Result};
use crate::linalg::{self, LineSolution};
use crate::types::{PCombination, PExponent, Term, Vector};

/// Reduces a combination over `points ∪ {q}` to one over at most `n` of
/// those vectors, with nonnegative coefficients and weight at most `1 + tol`.
///
/// Term indices `0..n` refer to `points`, index `n` refers to `q`. Signs are
/// honoured (a `Minus` term uses the negated vector) and carried over to the
/// output unchanged.
pub fn lemma4_reduce(
    points: &[Vector],
    q: &Vector,
    comb: &PCombination,
    p: PExponent,
    tol: f64,
) -> Result<PCombination> {
    let n = points.len();
    if n == 0 {
        return Err(Error::invalid("need at least one independent point"));
    }
    if q.len() != n || points.iter().any(|v| v.len() != n) {
        return Err(Error::invalid(format!("expected {n} points and Q in R^{n}")));
    }
    if linalg::independent_subset(points, tol).len() != n {
        return Err(Error::invalid("points must be linearly independent"));
    }

    let mut seen = vec![false; n + 1];
    let mut slots: Vec<Option<Term>> = vec![None; n + 1];
    for t in comb.terms() {
        if t.index > n {
            return Err(Error::IndexOutOfRange { index: t.index, len: n + 1 });
        }
        if std::mem::replace(&mut seen[t.index], true) {
            return Err(Error::invalid(format!("point {} appears twice", t.index)));
        }
        slots[t.index] = Some(*t);
    }

    let weight = weight_of(comb.lambdas(), p.value());
    if weight > 1.0 + tol {
        return Err(Error::invalid(format!("combination weight {weight} exceeds 1")));
    }
    if comb.support_len() <= n {
        return Ok(comb.clone());
    }

    let vectors: Vec<Vector> = (0..=n)
        .map(|i| {
            let base = if i < n { &points[i] } else { q };
            match slots[i] {
                Some(t) => base * t.sign.factor(),
                None => base.clone(),
            }
        })
        .collect();
    let lambdas: Vec<f64> = slots.iter().map(|s| s.map_or(0.0, |t| t.lambda)).collect();
    let target = weighted_sum(&vectors, &lambdas);

    let reduced = drop_one_search(&vectors, &target, p.value(), tol)?;
    let terms = slots
        .iter()
        .enumerate()
        .filter_map(|(i, slot)| {
            let lambda = reduced[i];
            (lambda > 0.0).then(|| {
                let sign = slot.map_or(crate::types::Sign::Plus, |t| t.sign);
                Term::new(i, sign, lambda)
            })
        })
        .collect();
    PCombination::new(comb.dim(), terms)
}

pub(crate) fn weighted_sum(vectors: &[Vector], lambdas: &[f64]) -> Vector {
    let mut acc = Vector::zeros(vectors[0].len());
    for (v, &l) in vectors.iter().zip(lambdas) {
        acc.axpy(l, v, 1.0);
    }
    acc
}

/// Tries every drop candidate and returns coefficients over all `n + 1`
/// vectors, zero at the dropped position.
///
/// `vectors[0..n]` are the independent points and `vectors[n]` is `Q`.
/// `Q` is tried first, then `P_1, …, P_n` in order; the first feasible
/// candidate wins.
pub(crate) fn drop_one_search(vectors: &[Vector], target: &Vector, p: f64, tol: f64) -> Result<Vec<f64>> {
    let n = vectors.len() - 1;
    let order = std::iter::once(n).chain(0..n);
    for drop in order {
        let cols: Vec<Vector> =
            vectors.iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, v)| v.clone()).collect();
        let Some(solution) = linalg::solve_line(&cols, target, tol) else {
            continue;
        };
        let best = match solution {
            LineSolution::Unique(c) => feasible(c, tol),
            LineSolution::Line { base, direction } => best_on_segment(&base, &direction, p, tol),
        };
        if let Some(c) = best {
            if weight_of(c.iter().copied(), p) <= 1.0 + tol {
                let mut full = c;
                full.insert(drop, 0.0);
                return Ok(full);
            }
        }
    }
    Err(Error::numerical(
        "no drop-one candidate represents the point within tolerance",
    ))
}

/// Clamps negatives in `[-tol, 0)` to zero; rejects anything below `-tol`.
fn feasible(mut c: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    if c.iter().any(|&v| v < -tol) {
        return None;
    }
    c.iter_mut().for_each(|v| *v = v.max(0.0));
    Some(c)
}

/// Minimum-weight nonnegative point of `{base + t·direction}`.
///
/// The weight is concave along the line, so only the endpoints of the
/// feasible interval need to be checked.
fn best_on_segment(base: &[f64], direction: &[f64], p: f64, tol: f64) -> Option<Vec<f64>> {
    let scale = direction.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (&b, &d) in base.iter().zip(direction) {
        if d.abs() <= tol * scale {
            if b < -tol {
                return None;
            }
        } else if d > 0.0 {
            lo = lo.max(-b / d);
        } else {
            hi = hi.min(-b / d);
        }
    }
    if lo > hi {
        // allow crossing by rounding only
        let slack = tol * (1.0 + lo.abs().max(hi.abs()));
        if lo - hi > slack {
            return None;
        }
        let mid = 0.5 * (lo + hi);
        lo = mid;
        hi = mid;
    }
    [lo, hi]
        .into_iter()
        .filter(|t| t.is_finite())
        .filter_map(|t| {
            let c: Vec<f64> = base.iter().zip(direction).map(|(&b, &d)| b + t * d).collect();
            feasible(c, tol)
        })
        .map(|c| (weight_of(c.iter().copied(), p), c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn half() -> PExponent {
        PExponent::new(0.5).unwrap()
    }

    fn basis2() -> Vec<Vector> {
        vec![dvector![1.0, 0.0], dvector![0.0, 1.0]]
    }

    #[test]
    fn drops_q_when_interior_to_basis_hull() {
        let comb =
            PCombination::new(2, vec![Term::plus(0, 0.05), Term::plus(1, 0.05), Term::plus(2, 0.05)])
                .unwrap();
        let out = lemma4_reduce(&basis2(), &dvector![0.5, 0.5], &comb, half(), 1e-10).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.terms()[0].index, 0);
        assert_eq!(out.terms()[1].index, 1);
        for t in out.terms() {
            assert!((t.lambda - 0.075).abs() < 1e-15);
        }
        let w = crate::combination::combination_weight(&out, half());
        assert!((w - 2.0 * 0.075_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn already_short_is_returned_as_is() {
        let comb = PCombination::new(2, vec![Term::plus(2, 0.1)]).unwrap();
        let out = lemma4_reduce(&basis2(), &dvector![-0.6, 0.8], &comb, half(), 1e-10).unwrap();
        assert_eq!(out, comb);
    }

    #[test]
    fn search_skips_infeasible_q_drop() {
        let q = dvector![-0.6, 0.8];
        let vectors = vec![dvector![1.0, 0.0], dvector![0.0, 1.0], q.clone()];
        let target = &q * 0.1;
        let c = drop_one_search(&vectors, &target, 0.5, 1e-10).unwrap();
        // Dropping Q would need a negative e_1 coefficient, so e_1 is dropped.
        assert_eq!(c[0], 0.0);
        assert!(c[1].abs() < 1e-15);
        assert!((c[2] - 0.1).abs() < 1e-15);
        assert!((weight_of(c, 0.5) - 0.1_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dependent_candidate_resolves_to_segment_endpoint() {
        // Without P_3, {P_1, P_2, Q} is dependent and the target has a line of
        // representations; the cheaper endpoint puts everything on Q.
        let cols = vec![dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0], dvector![1.0, 1.0, 0.0]];
        let target = dvector![0.08, 0.08, 0.0];
        let Some(LineSolution::Line { base, direction }) = linalg::solve_line(&cols, &target, 1e-10)
        else {
            panic!("expected a line of solutions");
        };
        let c = best_on_segment(&base, &direction, 0.5, 1e-10).unwrap();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
        assert!((c[2] - 0.08).abs() < 1e-15);
    }

    #[test]
    fn segment_minimum_is_an_endpoint() {
        // c(t) = (0.08 - t, 0.08 - t, t) for t in [0, 0.08]
        let base = [0.08, 0.08, 0.0];
        let dir = [-1.0, -1.0, 1.0];
        let c = best_on_segment(&base, &dir, 0.5, 1e-10).unwrap();
        assert!((c[0]).abs() < 1e-15 && (c[2] - 0.08).abs() < 1e-15);
    }

    #[test]
    fn rejects_dependent_points_and_heavy_weight() {
        let dep = vec![dvector![1.0, 0.0], dvector![2.0, 0.0]];
        let comb = PCombination::new(2, vec![Term::plus(0, 0.1)]).unwrap();
        assert!(lemma4_reduce(&dep, &dvector![0.0, 1.0], &comb, half(), 1e-10).is_err());
        let heavy =
            PCombination::new(2, vec![Term::plus(0, 0.5), Term::plus(1, 0.5), Term::plus(2, 0.5)])
                .unwrap();
        assert!(lemma4_reduce(&basis2(), &dvector![1.0, 1.0], &heavy, half(), 1e-10).is_err());
    }
}
