//! Constructive Carathéodory reduction for p-convex hulls.
//!
//! A nonzero point of `p-conv(A)` is a combination of at most `n` linearly
//! independent points of `A`; zero needs at most `n + 1`. Both reductions
//! work one pass at a time: pick a maximal independent subset of the
//! current support, append the next support point, rescale that block to
//! weight one, and let [`lemma4_reduce`] drop a point from it. Every pass
//! shortens the support and never increases the weight.

mod lemma4;
mod oracle;

pub use lemma4::lemma4_reduce;
pub use oracle::{contains, gauge_bruteforce, membership, ENUMERATION_LIMIT};

use crate::combination::{combination_weight, eval_combination, weight_of};
use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{GeneratorSet, PCombination, PExponent, Term, Vector};

/// Relative value drift tolerated before a reduction is declared failed.
const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub combination: PCombination,
    /// Number of drop-one passes performed.
    pub iterations: usize,
    pub weight_before: f64,
    pub weight_after: f64,
}

/// Rewrites a combination with nonzero value over at most `n` linearly
/// independent signed generators, without increasing its weight.
pub fn caratheodory_reduce(
    comb: &PCombination,
    gens: &GeneratorSet,
    p: PExponent,
    tol: f64,
) -> Result<ReductionResult> {
    let (value, weight_before) = validate(comb, gens, p, tol)?;
    if value.norm() <= tol {
        return Err(Error::invalid(
            "combination evaluates to zero; use the zero-case reduction",
        ));
    }

    let mut terms: Vec<Term> = comb.support().copied().collect();
    let mut iterations = 0;
    loop {
        let vectors = signed_vectors(&terms, gens);
        let independent = linalg::independent_subset(&vectors, tol);
        if independent.len() == terms.len() {
            break;
        }
        let (head, tail) = split_head(&terms, &independent);
        let reduced = reduce_head(&head, gens, p, tol)?;
        terms = reduced.into_iter().chain(tail).collect();
        iterations += 1;
    }
    finish(comb, gens, p, terms, iterations, &value, weight_before)
}

/// Rewrites a nontrivial combination of zero over at most `n + 1` signed
/// generators, without increasing its weight.
///
/// Reduction stops once the support has at most `rank + 1` points.
pub fn caratheodory_zero(
    comb: &PCombination,
    gens: &GeneratorSet,
    p: PExponent,
    tol: f64,
) -> Result<ReductionResult> {
    let (value, weight_before) = validate(comb, gens, p, tol)?;
    if value.norm() > tol {
        return Err(Error::invalid(format!(
            "combination evaluates to a vector of norm {}, not zero",
            value.norm()
        )));
    }
    if !(weight_before > 0.0) {
        return Err(Error::invalid("zero-case reduction needs a combination of positive weight"));
    }

    let mut terms: Vec<Term> = comb.support().copied().collect();
    let mut iterations = 0;
    loop {
        let vectors = signed_vectors(&terms, gens);
        let independent = linalg::independent_subset(&vectors, tol);
        if terms.len() <= independent.len() + 1 {
            break;
        }
        let (head, tail) = split_head(&terms, &independent);
        if head_sums_to_zero(&head, gens, tol) {
            // The block alone already represents zero.
            terms = head;
            iterations += 1;
            break;
        }
        let reduced = reduce_head(&head, gens, p, tol)?;
        terms = reduced.into_iter().chain(tail).collect();
        iterations += 1;
    }
    finish(comb, gens, p, terms, iterations, &value, weight_before)
}

fn validate(
    comb: &PCombination,
    gens: &GeneratorSet,
    p: PExponent,
    tol: f64,
) -> Result<(Vector, f64)> {
    let value = eval_combination(comb, gens)?;
    let weight = combination_weight(comb, p);
    if weight > 1.0 + tol {
        return Err(Error::invalid(format!("combination weight {weight} exceeds 1")));
    }
    Ok((value, weight))
}

fn finish(
    input: &PCombination,
    gens: &GeneratorSet,
    p: PExponent,
    terms: Vec<Term>,
    iterations: usize,
    value: &Vector,
    weight_before: f64,
) -> Result<ReductionResult> {
    let combination = PCombination::new(input.dim(), terms)?;
    let out = eval_combination(&combination, gens)?;
    let drift = (&out - value).norm();
    if drift > VALUE_TOL * value.norm().max(1.0) {
        return Err(Error::numerical(format!("reduction moved the point by {drift:e}")));
    }
    let weight_after = combination_weight(&combination, p);
    Ok(ReductionResult { combination, iterations, weight_before, weight_after })
}

fn signed_vectors(terms: &[Term], gens: &GeneratorSet) -> Vec<Vector> {
    terms.iter().map(|t| &gens.points()[t.index] * t.sign.factor()).collect()
}

/// Splits the support into the block `P_1..P_m, P_{m+1}` (independent
/// points first, then the first dependent one) and the untouched tail.
fn split_head(terms: &[Term], independent: &[usize]) -> (Vec<Term>, Vec<Term>) {
    let mut is_indep = vec![false; terms.len()];
    for &i in independent {
        is_indep[i] = true;
    }
    let extra = is_indep.iter().position(|&b| !b).expect("support is dependent");
    let head: Vec<Term> =
        independent.iter().map(|&i| terms[i]).chain(std::iter::once(terms[extra])).collect();
    let tail: Vec<Term> = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| !is_indep[i] && i != extra)
        .map(|(_, t)| *t)
        .collect();
    (head, tail)
}

/// Coordinates of each head vector in an orthonormal basis of the span of
/// its independent part.
fn span_coordinates(head: &[Term], gens: &GeneratorSet, tol: f64) -> Vec<Vector> {
    let vectors = signed_vectors(head, gens);
    let m = head.len() - 1;
    let indices: Vec<usize> = (0..m).collect();
    let basis = linalg::orthonormal_basis(&vectors, &indices, tol);
    vectors
        .iter()
        .map(|v| Vector::from_iterator(m, basis.iter().map(|b| b.dot(v))))
        .collect()
}

fn head_sums_to_zero(head: &[Term], gens: &GeneratorSet, tol: f64) -> bool {
    let vectors = signed_vectors(head, gens);
    let lambdas: Vec<f64> = head.iter().map(|t| t.lambda).collect();
    let scale: f64 = vectors.iter().zip(&lambdas).map(|(v, l)| l * v.norm()).sum();
    lemma4::weighted_sum(&vectors, &lambdas).norm() <= tol * scale
}

/// One drop-one pass on the `m + 1` head terms: rescale to unit weight,
/// reduce in span coordinates, scale back.
fn reduce_head(head: &[Term], gens: &GeneratorSet, p: PExponent, tol: f64) -> Result<Vec<Term>> {
    let pv = p.value();
    let coords = span_coordinates(head, gens, tol);
    let head_weight = weight_of(head.iter().map(|t| t.lambda), pv);
    let s = head_weight.powf(1.0 / pv);
    let scaled: Vec<f64> = head.iter().map(|t| t.lambda / s).collect();
    let target = lemma4::weighted_sum(&coords, &scaled);
    let beta = lemma4::drop_one_search(&coords, &target, pv, tol)?;
    Ok(head
        .iter()
        .zip(beta)
        .filter(|&(_, b)| b > 0.0)
        .map(|(t, b)| Term { lambda: s * b, ..*t })
        .collect())
}
