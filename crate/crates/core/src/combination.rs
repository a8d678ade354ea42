//! Evaluating and reweighting combinations of signed generators.

use crate::error::{Error, Result};
use crate::types::{GeneratorSet, PCombination, PExponent, Term, Vector};

/// Largest number of parts [`split_to_unit_weight`] will create.
pub const MAX_SPLIT_PARTS: usize = 10_000_000;

const UNIT_WEIGHT_TOL: f64 = 1e-12;

/// `Σ sign_i · λ_i · gens[index_i]`, summed in term order with
/// compensation.
pub fn eval_combination(comb: &PCombination, gens: &GeneratorSet) -> Result<Vector> {
    if comb.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), actual: comb.dim() });
    }
    let mut acc = vec![NeumaierSum::default(); gens.dim()];
    for t in comb.terms() {
        let g = gens.get(t.index)?;
        let c = t.sign.factor() * t.lambda;
        for (a, gi) in acc.iter_mut().zip(g.iter()) {
            a.add(c * gi);
        }
    }
    Ok(Vector::from_iterator(gens.dim(), acc.iter().map(NeumaierSum::total)))
}

#[derive(Debug, Clone, Copy, Default)]
struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        self.carry += if self.sum.abs() >= v.abs() { (self.sum - t) + v } else { (v - t) + self.sum };
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `Σ λ_i^p`; zero for the empty combination.
pub fn combination_weight(comb: &PCombination, p: PExponent) -> f64 {
    weight_of(comb.lambdas(), p.value())
}

/// Compensated, since splits can produce millions of equal terms.
pub(crate) fn weight_of(lambdas: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    let mut acc = NeumaierSum::default();
    for l in lambdas {
        acc.add(if l > 0.0 { l.powf(p) } else { 0.0 });
    }
    acc.total()
}

/// Rewrites a combination of weight `w ∈ (0, 1]` as one of weight exactly 1
/// with the same value.
///
/// The largest coefficient `λ₁` is split into one part `λ₁ - (k-1)b` and
/// `k - 1` parts `b`, where `k` is the least count with
/// `k^(1-p) λ₁^p + rest ≥ 1`. The weight of the split grows monotonically
/// in `b ∈ [0, λ₁/k]`, so `b` is found by bisection. The big part keeps the
/// original term's position; the `k - 1` new parts are appended.
pub fn split_to_unit_weight(comb: &PCombination, p: PExponent) -> Result<PCombination> {
    let pv = p.value();
    let Some((pos, lead)) = comb
        .terms()
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |best, (i, t)| match best {
            Some((_, l)) if l >= t.lambda => best,
            _ => Some((i, t.lambda)),
        })
        .filter(|&(_, l)| l > 0.0)
    else {
        return Err(Error::invalid("cannot rescale an all-zero combination"));
    };

    let weight = combination_weight(comb, p);
    if weight > 1.0 + UNIT_WEIGHT_TOL {
        return Err(Error::invalid(format!("combination weight {weight} exceeds 1")));
    }
    if (weight - 1.0).abs() <= UNIT_WEIGHT_TOL {
        return Ok(comb.clone());
    }

    let rest = weight_of(
        comb.terms().iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, t)| t.lambda),
        pv,
    );
    let target = 1.0 - rest;
    let lead_pow = lead.powf(pv);
    let split_weight = |k: usize| (k as f64).powf(1.0 - pv) * lead_pow;

    let k = (target / lead_pow).powf(1.0 / (1.0 - pv)).ceil().max(2.0);
    if !(k <= MAX_SPLIT_PARTS as f64) {
        return Err(Error::invalid(format!(
            "reaching unit weight needs more than {MAX_SPLIT_PARTS} parts"
        )));
    }
    let mut k = k as usize;
    while k > 2 && split_weight(k - 1) >= target {
        k -= 1;
    }
    while split_weight(k) < target {
        k += 1;
    }

    let parts = (k - 1) as f64;
    let g = |b: f64| (lead - parts * b).max(0.0).powf(pv) + parts * b.powf(pv);
    let (mut lo, mut hi) = (0.0_f64, lead / k as f64);
    let small = if g(hi) <= target {
        hi
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (g(lo) - target).abs() <= (g(hi) - target).abs() {
            lo
        } else {
            hi
        }
    };

    let mut terms: Vec<Term> = comb.terms().to_vec();
    let lead_term = terms[pos];
    terms[pos].lambda = lead - parts * small;
    terms.extend(std::iter::repeat_n(Term { lambda: small, ..lead_term }, k - 1));
    PCombination::new(comb.dim(), terms)
}
