//! Domain types shared by every module: exponents, generator sets,
//! p-convex bodies, signed combinations and linear maps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A point of R^n in Euclidean coordinates.
pub type Vector = DVector<f64>;

/// Relative tolerance used for rank and residual decisions unless the
/// caller supplies one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Exponent `p` of a p-convex body.
///
/// Bodies use `0 < p < 1`. Envelopes may go up to `q = 1`, which is the
/// ordinary convex (Banach) case.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PExponent(f64);

impl PExponent {
    /// Exponent of a genuinely p-convex body, `0 < p < 1`.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 && p < 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::invalid(format!("exponent must lie in (0, 1), got {p}")))
        }
    }

    /// Exponent of an envelope, `0 < q <= 1`.
    pub fn envelope(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::invalid(format!("envelope exponent must lie in (0, 1], got {q}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sign attached to a generator. Every generator `g` contributes both
/// `+g` and `-g` to the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(value: f64) -> Sign {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// The half-set `A` of generators. The symmetric body is spanned by `±A`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    dim: usize,
    points: Vec<Vector>,
}

impl GeneratorSet {
    pub fn new(dim: usize, points: Vec<Vector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if points.is_empty() {
            return Err(Error::invalid("a generator set needs at least one point"));
        }
        for (i, point) in points.iter().enumerate() {
            if point.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: point.len() });
            }
            if point.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("generator {i} has a non-finite coordinate")));
            }
            if point.norm() == 0.0 {
                return Err(Error::invalid(format!("generator {i} is the zero vector")));
            }
        }
        Ok(Self { dim, points })
    }

    /// Builds a generator set from plain coordinate rows.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows.iter().map(|r| Vector::from_column_slice(r)).collect();
        Self::new(dim, points)
    }

    /// The canonical basis `e_1, ..., e_n`; its body is the unit ball of ℓ_p^n.
    pub fn canonical(dim: usize) -> Result<Self> {
        let points = (0..dim)
            .map(|i| {
                let mut e = Vector::zeros(dim);
                e[i] = 1.0;
                e
            })
            .collect();
        Self::new(dim, points)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Result<&Vector> {
        self.points
            .get(index)
            .ok_or(Error::IndexOutOfRange { index, len: self.points.len() })
    }

    /// `sign · points[index]`.
    pub fn signed(&self, index: usize, sign: Sign) -> Result<Vector> {
        Ok(self.get(index)? * sign.factor())
    }

    /// Image of every generator under `map`.
    pub fn transformed(&self, map: &LinearMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: map.dim() });
        }
        Self::new(self.dim, self.points.iter().map(|g| map.apply(g)).collect())
    }
}

/// Symmetric p-convex body `p-conv(±A)` together with its exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct PBody {
    generators: GeneratorSet,
    p: PExponent,
}

impl PBody {
    /// Fails unless the generators span R^n, otherwise the gauge would take
    /// infinite values.
    pub fn new(generators: GeneratorSet, p: PExponent) -> Result<Self> {
        let rank = linalg::independent_subset(generators.points(), DEFAULT_TOL).len();
        if rank < generators.dim() {
            return Err(Error::invalid(format!(
                "generators span a {rank}-dimensional subspace of R^{}",
                generators.dim()
            )));
        }
        Ok(Self { generators, p })
    }

    /// Unit ball of ℓ_p^n.
    pub fn lp_ball(dim: usize, p: PExponent) -> Result<Self> {
        Self::new(GeneratorSet::canonical(dim)?, p)
    }

    #[inline]
    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    #[inline]
    pub fn p(&self) -> PExponent {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.generators.dim()
    }

    /// Same generators, different exponent.
    pub fn with_exponent(&self, p: PExponent) -> Self {
        Self { generators: self.generators.clone(), p }
    }

    /// `map(B)`, the body generated by the images of the generators.
    pub fn transformed(&self, map: &LinearMap) -> Result<Self> {
        Self::new(self.generators.transformed(map)?, self.p)
    }
}

/// One summand `sign · lambda · A[index]` of a combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub index: usize,
    pub sign: Sign,
    pub lambda: f64,
}

impl Term {
    pub fn new(index: usize, sign: Sign, lambda: f64) -> Self {
        Self { index, sign, lambda }
    }

    pub fn plus(index: usize, lambda: f64) -> Self {
        Self::new(index, Sign::Plus, lambda)
    }

    pub fn minus(index: usize, lambda: f64) -> Self {
        Self::new(index, Sign::Minus, lambda)
    }
}

/// A nonnegative combination `Σ λ_i (±g_i)` of signed generators.
#[derive(Debug, Clone, PartialEq)]
pub struct PCombination {
    dim: usize,
    terms: Vec<Term>,
}

impl PCombination {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if !t.lambda.is_finite() || t.lambda < 0.0 {
                return Err(Error::invalid(format!(
                    "coefficient {} of generator {} must be finite and nonnegative",
                    t.lambda, t.index
                )));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.lambda)
    }

    /// Terms with a strictly positive coefficient.
    pub fn support(&self) -> impl Iterator<Item = &Term> + '_ {
        self.terms.iter().filter(|t| t.lambda > 0.0)
    }

    pub fn support_len(&self) -> usize {
        self.support().count()
    }

    /// Drops zero-coefficient terms.
    pub fn pruned(&self) -> Self {
        Self { dim: self.dim, terms: self.support().copied().collect() }
    }

    /// Every coefficient multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { lambda: t.lambda * factor, ..*t })
            .collect();
        Self { dim: self.dim, terms }
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }
}

/// An `n × n` real matrix acting on R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid(format!(
                "linear map must be a nonempty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("linear map has a non-finite entry"));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&Vector::from_column_slice(entries)))
    }

    /// Row-major entries.
    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, actual: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Row-major rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("linear map rows must form a square matrix"));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_slice(n, &flat)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Ratio of extreme singular values; infinite for singular maps.
    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        self.matrix
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .map(|matrix| Self { matrix })
            .ok_or_else(|| Error::numerical("linear map is singular"))
    }

    /// Rescaled copy with `|det| = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let det = self.determinant().abs();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::numerical("cannot normalize a singular linear map"));
        }
        let scale = det.powf(-1.0 / self.dim() as f64);
        Self::new(&self.matrix * scale)
    }

    pub fn compose(&self, other: &LinearMap) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_ranges() {
        assert!(PExponent::new(0.5).is_ok());
        assert!(PExponent::new(1.0).is_err());
        assert!(PExponent::new(0.0).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(PExponent::envelope(1.0).is_ok());
        assert!(PExponent::envelope(1.5).is_err());
    }

    #[test]
    fn generator_set_rejects_zero_and_mismatch() {
        assert!(GeneratorSet::from_rows(2, &[vec![0.0, 0.0]]).is_err());
        assert!(matches!(
            GeneratorSet::from_rows(2, &[vec![1.0, 0.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(GeneratorSet::from_rows(2, &[]).is_err());
    }

    #[test]
    fn body_requires_spanning_generators() {
        let p = PExponent::new(0.5).unwrap();
        let flat = GeneratorSet::from_rows(2, &[vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert!(PBody::new(flat, p).is_err());
        assert!(PBody::lp_ball(3, p).is_ok());
    }

    #[test]
    fn combination_rejects_negative_lambda() {
        assert!(PCombination::new(2, vec![Term::plus(0, -0.1)]).is_err());
    }

    #[test]
    fn normalized_map_has_unit_determinant() {
        let t = LinearMap::diagonal(&[3.0, 1.0]).unwrap().normalized().unwrap();
        assert!((t.determinant().abs() - 1.0).abs() < 1e-12);
        assert!(LinearMap::diagonal(&[1.0, 0.0]).unwrap().normalized().is_err());
    }
}
