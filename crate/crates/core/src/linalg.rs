//! Small dense linear algebra: incremental QR by modified Gram-Schmidt,
//! greedy independent-subset selection and span membership solves.
//!
//! Dimensions here are tiny (n ≤ 10 in practice), so everything is
//! column-by-column and allocation-light. Every rank decision is relative to
//! the norm of the column being tested, which makes it invariant under
//! column scaling.

use crate::types::Vector;

/// Thin QR factorization of a growing list of columns.
///
/// Columns are orthogonalized twice ("twice is enough"), so `Q` stays
/// orthonormal to working precision even for nearly dependent input.
#[derive(Debug, Clone)]
pub struct IncrementalQr {
    dim: usize,
    tol: f64,
    q: Vec<Vector>,
    // r[j] holds column j of R, length j + 1
    r: Vec<Vec<f64>>,
}

impl IncrementalQr {
    pub fn new(dim: usize, tol: f64) -> Self {
        Self { dim, tol, q: Vec::with_capacity(dim), r: Vec::with_capacity(dim) }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.q.len()
    }

    #[inline]
    pub fn basis(&self) -> &[Vector] {
        &self.q
    }

    /// Appends `col` if it is independent of the current columns, i.e. its
    /// residual after projection exceeds `tol · ‖col‖`. Returns whether the
    /// column was accepted; a rejected column leaves the state untouched.
    pub fn push(&mut self, col: &Vector) -> bool {
        debug_assert_eq!(col.len(), self.dim);
        let norm = col.norm();
        if norm == 0.0 || self.q.len() == self.dim {
            return false;
        }
        let mut v = col.clone();
        let mut coeffs = vec![0.0; self.q.len() + 1];
        for _ in 0..2 {
            for (j, qj) in self.q.iter().enumerate() {
                let c = qj.dot(&v);
                v.axpy(-c, qj, 1.0);
                coeffs[j] += c;
            }
        }
        let residual = v.norm();
        if !(residual > self.tol * norm) {
            return false;
        }
        coeffs[self.q.len()] = residual;
        self.q.push(v / residual);
        self.r.push(coeffs);
        true
    }

    /// Removes the most recently pushed column.
    pub fn pop(&mut self) {
        self.q.pop();
        self.r.pop();
    }

    /// Least-squares coefficients of `x` over the current columns and the
    /// Euclidean norm of the residual.
    pub fn solve(&self, x: &Vector) -> (Vec<f64>, f64) {
        let k = self.q.len();
        let mut resid = x.clone();
        let mut y = vec![0.0; k];
        for _ in 0..2 {
            for (j, qj) in self.q.iter().enumerate() {
                let c = qj.dot(&resid);
                resid.axpy(-c, qj, 1.0);
                y[j] += c;
            }
        }
        let mut c = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = y[i];
            for (j, cj) in c.iter().enumerate().skip(i + 1) {
                s -= self.r[j][i] * cj;
            }
            c[i] = s / self.r[i][i];
        }
        (c, resid.norm())
    }
}

/// Indices of a maximal linearly independent subset, picked greedily in
/// input order.
pub fn independent_subset(points: &[Vector], tol: f64) -> Vec<usize> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let mut qr = IncrementalQr::new(first.len(), tol);
    let mut picked = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if qr.push(p) {
            picked.push(i);
        }
    }
    picked
}

/// Accepts a least-squares residual as "inside the span".
#[inline]
pub(crate) fn residual_ok(residual: f64, x_norm: f64, tol: f64) -> bool {
    if x_norm == 0.0 {
        residual < tol
    } else {
        residual < tol * x_norm
    }
}

/// Coefficients `c` with `Σ c_i points[i] = x`, if `x` lies in the span of
/// the (independent) `points`. Signs are unrestricted.
pub fn solve_representation(points: &[Vector], x: &Vector, tol: f64) -> Option<Vec<f64>> {
    let mut qr = IncrementalQr::new(x.len(), tol);
    for p in points {
        if !qr.push(p) {
            return None;
        }
    }
    let (c, residual) = qr.solve(x);
    residual_ok(residual, x.norm(), tol).then_some(c)
}

/// Solution set of `Σ c_i cols[i] = x` when the columns have nullity at most
/// one: a particular solution and, if rank deficient, a null direction.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LineSolution {
    Unique(Vec<f64>),
    Line { base: Vec<f64>, direction: Vec<f64> },
}

pub(crate) fn solve_line(cols: &[Vector], x: &Vector, tol: f64) -> Option<LineSolution> {
    let mut qr = IncrementalQr::new(x.len(), tol);
    let mut basis_idx = Vec::with_capacity(cols.len());
    let mut dependent = Vec::new();
    for (i, c) in cols.iter().enumerate() {
        if qr.push(c) {
            basis_idx.push(i);
        } else {
            dependent.push(i);
        }
    }
    if dependent.len() > 1 {
        // nullity ≥ 2 never arises from the reductions in this crate
        return None;
    }
    let (coef, residual) = qr.solve(x);
    if !residual_ok(residual, x.norm(), tol) {
        return None;
    }
    let mut base = vec![0.0; cols.len()];
    for (&i, &c) in basis_idx.iter().zip(&coef) {
        base[i] = c;
    }
    match dependent.first() {
        None => Some(LineSolution::Unique(base)),
        Some(&d) => {
            let (a, _) = qr.solve(&cols[d]);
            let mut direction = vec![0.0; cols.len()];
            direction[d] = 1.0;
            for (&i, &ai) in basis_idx.iter().zip(&a) {
                direction[i] = -ai;
            }
            Some(LineSolution::Line { base, direction })
        }
    }
}

/// Orthonormal basis of the span of `points[indices]`, in the given order.
pub fn orthonormal_basis(points: &[Vector], indices: &[usize], tol: f64) -> Vec<Vector> {
    let dim = points.first().map_or(0, |p| p.len());
    let mut qr = IncrementalQr::new(dim, tol);
    for &i in indices {
        qr.push(&points[i]);
    }
    qr.basis().to_vec()
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, dvector};

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn independent_subset_examples() {
        let pts = vec![e(2, 0), e(2, 1), e(2, 0) + e(2, 1)];
        assert_eq!(independent_subset(&pts, 1e-10), vec![0, 1]);
        assert_eq!(independent_subset(&[e(2, 0)], 1e-10), vec![0]);
        assert_eq!(independent_subset(&[e(2, 0), e(2, 0) * 2.0], 1e-10), vec![0]);
    }

    #[test]
    fn rank_is_scale_invariant() {
        let pts = vec![dvector![1e-8, 0.0, 0.0], dvector![1e-8, 1e-9, 0.0], dvector![3e6, 0.0, 7e6]];
        assert_eq!(independent_subset(&pts, 1e-10).len(), 3);
        let scaled: Vec<Vector> = pts.iter().map(|p| p * 1e12).collect();
        assert_eq!(independent_subset(&scaled, 1e-10).len(), 3);
    }

    #[test]
    fn solve_representation_examples() {
        let c = solve_representation(&[e(2, 0), e(2, 1)], &dvector![0.3, 0.4], 1e-10).unwrap();
        assert!((c[0] - 0.3).abs() < 1e-15 && (c[1] - 0.4).abs() < 1e-15);
        assert!(solve_representation(&[e(2, 0)], &dvector![0.0, 1.0], 1e-10).is_none());
        let c = solve_representation(&[dvector![1.0, 0.0], dvector![1.0, 1.0]], &dvector![2.0, 1.0], 1e-10)
            .unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_target_has_zero_coefficients() {
        let c = solve_representation(&[e(3, 0), e(3, 2)], &Vector::zeros(3), 1e-10).unwrap();
        assert_eq!(c, vec![0.0, 0.0]);
    }

    #[test]
    fn line_solution_spans_null_direction() {
        // e1, e2, e1 + e2 with target (1, 1)
        let cols = vec![e(2, 0), e(2, 1), e(2, 0) + e(2, 1)];
        match solve_line(&cols, &dvector![1.0, 1.0], 1e-10).unwrap() {
            LineSolution::Line { base, direction } => {
                assert_eq!(base, vec![1.0, 1.0, 0.0]);
                assert_eq!(direction, vec![-1.0, -1.0, 1.0]);
            }
            other => panic!("expected a line, got {other:?}"),
        }
    }

    #[test]
    fn orthonormal_basis_is_orthonormal() {
        let pts = vec![dvector![1.0, 2.0, 3.0], dvector![0.0, 1.0, 1.0]];
        let q = orthonormal_basis(&pts, &[0, 1], 1e-10);
        let m = DMatrix::from_columns(&q);
        let gram = m.transpose() * &m;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(16, 4), 1820);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
