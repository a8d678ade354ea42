//! Exact gauge of a finitely generated symmetric p-convex body.
//!
//! `‖x‖^p` is the least weight `Σ λ_i^p` over all representations of `x`.
//! Any representation reduces ([`super::caratheodory_reduce`]) to one on
//! linearly independent generators without gaining weight, and on each
//! independent subset the representation is unique. The minimum over
//! independent subsets is therefore the gauge.
//!
//! The enumeration runs over unsigned generator subsets: for a fixed
//! subset, the sign of each coefficient picks which of `±g` is used, and
//! subsets containing both `+g` and `-g` are dependent anyway. Subsets are
//! visited depth-first in lexicographic order with an incremental QR, so a
//! dependent prefix prunes its whole subtree.

use crate::combination::weight_of;
use crate::error::{Error, Result};
use crate::linalg::{self, IncrementalQr};
use crate::types::{PBody, PCombination, Sign, Term, Vector};

/// Maximum admissible `C(2m, n)` for `m` generators in R^n.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// `‖x‖_B` together with a minimum-weight witness combination.
pub fn gauge_bruteforce(x: &Vector, body: &PBody, tol: f64) -> Result<(f64, PCombination)> {
    check_inputs(x, body)?;
    let dim = body.dim();
    if x.iter().all(|&v| v == 0.0) {
        return Ok((0.0, PCombination::empty(dim)));
    }
    let mut search = Search::new(x, body, tol, None);
    search.run();
    let Some(best) = search.best else {
        return Err(Error::numerical("point lies outside the span of the generators"));
    };
    let p = body.p().value();
    Ok((best.weight.powf(1.0 / p), best.into_combination(dim)))
}

/// Whether `‖x‖_B ≤ 1 + tol`, with a witness representation when it is.
pub fn membership(x: &Vector, body: &PBody, tol: f64) -> Result<(bool, Option<PCombination>)> {
    let (gauge, witness) = gauge_bruteforce(x, body, tol)?;
    if gauge <= 1.0 + tol {
        Ok((true, Some(witness)))
    } else {
        Ok((false, None))
    }
}

/// Fast membership test (`‖x‖_B ≤ 1`) that stops at the first subset whose
/// representation has weight at most one. No witness is kept.
pub fn contains(x: &Vector, body: &PBody, tol: f64) -> Result<bool> {
    check_inputs(x, body)?;
    if x.iter().all(|&v| v == 0.0) {
        return Ok(true);
    }
    let mut search = Search::new(x, body, tol, Some(1.0));
    search.run();
    Ok(search.best.is_some_and(|b| b.weight <= 1.0))
}

fn check_inputs(x: &Vector, body: &PBody) -> Result<()> {
    let dim = body.dim();
    if x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("point has a non-finite coordinate"));
    }
    let required = linalg::binomial(2 * body.generators().len() as u64, dim as u64);
    if required > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded { required, limit: ENUMERATION_LIMIT });
    }
    Ok(())
}

struct Best {
    weight: f64,
    indices: Vec<usize>,
    coeffs: Vec<f64>,
}

impl Best {
    fn into_combination(self, dim: usize) -> PCombination {
        let terms = self
            .indices
            .into_iter()
            .zip(self.coeffs)
            .filter(|&(_, c)| c != 0.0)
            .map(|(i, c)| Term::new(i, Sign::of(c), c.abs()))
            .collect();
        PCombination::new(dim, terms).expect("absolute values are nonnegative")
    }
}

struct Search<'a> {
    x: &'a Vector,
    x_norm: f64,
    gens: &'a [Vector],
    p: f64,
    tol: f64,
    qr: IncrementalQr,
    chosen: Vec<usize>,
    best: Option<Best>,
    stop_at: Option<f64>,
}

impl<'a> Search<'a> {
    fn new(x: &'a Vector, body: &'a PBody, tol: f64, stop_at: Option<f64>) -> Self {
        Self {
            x,
            x_norm: x.norm(),
            gens: body.generators().points(),
            p: body.p().value(),
            tol,
            qr: IncrementalQr::new(body.dim(), tol),
            chosen: Vec::with_capacity(body.dim()),
            best: None,
            stop_at,
        }
    }

    fn run(&mut self) {
        self.descend(0);
    }

    /// Returns `true` when the early-exit threshold was reached.
    fn descend(&mut self, start: usize) -> bool {
        for i in start..self.gens.len() {
            if !self.qr.push(&self.gens[i]) {
                continue;
            }
            self.chosen.push(i);
            let (coeffs, residual) = self.qr.solve(self.x);
            if linalg::residual_ok(residual, self.x_norm, self.tol) {
                let weight = weight_of(coeffs.iter().map(|c| c.abs()), self.p);
                if self.best.as_ref().is_none_or(|b| weight < b.weight) {
                    self.best = Some(Best { weight, indices: self.chosen.clone(), coeffs });
                }
                if self.stop_at.is_some_and(|limit| weight <= limit) {
                    return true;
                }
            }
            if self.qr.rank() < self.x.len() && self.descend(i + 1) {
                return true;
            }
            self.chosen.pop();
            self.qr.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PExponent;
    use nalgebra::dvector;

    fn l_half(n: usize) -> PBody {
        PBody::lp_ball(n, PExponent::new(0.5).unwrap()).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let body = l_half(2);
        let (g, w) = gauge_bruteforce(&dvector![1.0, 0.0], &body, 1e-10).unwrap();
        assert_eq!(g, 1.0);
        assert_eq!(w.terms(), &[Term::plus(0, 1.0)]);
        let (g, _) = gauge_bruteforce(&dvector![0.25, 0.25], &body, 1e-10).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
        let (g, w) = gauge_bruteforce(&dvector![0.0, 0.0], &body, 1e-10).unwrap();
        assert_eq!(g, 0.0);
        assert!(w.is_empty());
        let (g, _) = gauge_bruteforce(&dvector![1.0, 1.0], &body, 1e-10).unwrap();
        assert!((g - 4.0).abs() < 1e-14);
    }

    #[test]
    fn witness_signs_follow_coordinates() {
        let (_, w) = gauge_bruteforce(&dvector![-0.3, 0.2], &l_half(2), 1e-10).unwrap();
        assert_eq!(w.terms(), &[Term::minus(0, 0.3), Term::plus(1, 0.2)]);
    }

    #[test]
    fn membership_examples() {
        let body = l_half(2);
        let (inside, w) = membership(&dvector![0.0, 1.0], &body, 1e-10).unwrap();
        assert!(inside);
        assert_eq!(w.unwrap().terms(), &[Term::plus(1, 1.0)]);
        assert!(membership(&dvector![0.25, 0.25], &body, 1e-10).unwrap().0);
        let (inside, w) = membership(&dvector![0.3, 0.3], &body, 1e-10).unwrap();
        assert!(!inside && w.is_none());
        let (g, _) = gauge_bruteforce(&dvector![0.3, 0.3], &body, 1e-10).unwrap();
        assert!((g - 1.2).abs() < 1e-12);
    }

    #[test]
    fn contains_agrees_with_gauge() {
        let body = l_half(2);
        assert!(contains(&dvector![0.2, 0.2], &body, 1e-10).unwrap());
        assert!(!contains(&dvector![0.3, 0.3], &body, 1e-10).unwrap());
        assert!(contains(&dvector![0.0, 0.0], &body, 1e-10).unwrap());
    }

    #[test]
    fn extra_generator_shortcuts_the_gauge() {
        let p = PExponent::new(0.5).unwrap();
        let gens = crate::types::GeneratorSet::from_rows(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
        )
        .unwrap();
        let body = PBody::new(gens, p).unwrap();
        let (g, w) = gauge_bruteforce(&dvector![0.5, 0.5], &body, 1e-10).unwrap();
        assert!((g - 1.0).abs() < 1e-14);
        assert_eq!(w.terms().len(), 1);
        assert_eq!(w.terms()[0].index, 2);
    }

    #[test]
    fn budget_and_dimension_errors() {
        let body = l_half(2);
        assert!(matches!(
            gauge_bruteforce(&dvector![1.0, 0.0, 0.0], &body, 1e-10),
            Err(Error::DimensionMismatch { .. })
        ));
        let p = PExponent::new(0.5).unwrap();
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let mut r = vec![0.0; 8];
                r[i % 8] = 1.0 + i as f64;
                r[(i + 1) % 8] = 1.0;
                r
            })
            .collect();
        let big = PBody::new(crate::types::GeneratorSet::from_rows(8, &rows).unwrap(), p).unwrap();
        assert!(matches!(
            gauge_bruteforce(&Vector::from_element(8, 1.0), &big, 1e-10),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
