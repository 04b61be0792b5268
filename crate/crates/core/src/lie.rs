//! Matrix Lie algebras given by spanning sets.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, VectorSpan};

/// A linear span of `n × n` matrices, kept as an echelon basis of the
/// flattened entries.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpan<F> {
    n: usize,
    span: VectorSpan<F>,
}

impl<F: Field> LieAlgebraSpan<F> {
    pub fn zero(n: usize) -> Self {
        LieAlgebraSpan { n, span: VectorSpan::new(n * n) }
    }

    /// Linear span of the given matrices (no bracket closure).
    pub fn span_of(n: usize, gens: &[Matrix<F>]) -> Self {
        let mut out = Self::zero(n);
        for g in gens {
            out.insert(g);
        }
        out
    }

    /// Inserts a matrix; returns true when the span grew.
    pub fn insert(&mut self, m: &Matrix<F>) -> bool {
        assert_eq!((m.rows(), m.cols()), (self.n, self.n), "matrix size");
        self.span.insert(m.as_slice())
    }

    pub fn contains(&self, m: &Matrix<F>) -> bool {
        self.span.contains(m.as_slice())
    }

    /// Coordinates with respect to [`Self::basis`].
    pub fn coordinates(&self, m: &Matrix<F>) -> Option<Vec<F>> {
        self.span.coordinates(m.as_slice())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.span.is_empty()
    }

    /// Echelon basis, sorted by pivot (canonical for exact fields).
    pub fn basis(&self) -> Vec<Matrix<F>> {
        self.span
            .canonical()
            .into_iter()
            .map(|v| Matrix::from_flat(self.n, self.n, v))
            .collect()
    }

    /// Basis in the order used by [`Self::coordinates`].
    pub fn coordinate_basis(&self) -> Vec<Matrix<F>> {
        self.span
            .basis()
            .iter()
            .map(|v| Matrix::from_flat(self.n, self.n, v.clone()))
            .collect()
    }

    pub fn is_lie_closed(&self) -> bool {
        let b = self.coordinate_basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if !self.contains(&b[i].bracket(&b[j])) {
                    return false;
                }
            }
        }
        true
    }

    pub fn ensure_closed(&self) -> Result<()> {
        if self.is_lie_closed() {
            Ok(())
        } else {
            Err(Error::NotLieClosed)
        }
    }

    pub fn contains_algebra(&self, other: &Self) -> bool {
        other.coordinate_basis().iter().all(|m| self.contains(m))
    }

    pub fn same_span(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.contains_algebra(other)
    }

    /// `[self, other]` as a linear span.
    pub fn bracket_span(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for a in self.coordinate_basis() {
            for b in other.coordinate_basis() {
                out.insert(&a.bracket(&b));
            }
        }
        out
    }

    /// `[g, g]`.
    pub fn derived(&self) -> Self {
        self.bracket_span(self)
    }

    pub fn map(&self, f: impl Fn(&Matrix<F>) -> Matrix<F>, n: usize) -> Self {
        Self::span_of(n, &self.coordinate_basis().iter().map(f).collect::<Vec<_>>())
    }
}

/// Smallest bracket-closed span containing the generators.
pub fn lie_closure<F: Field>(n: usize, gens: &[Matrix<F>]) -> Result<LieAlgebraSpan<F>> {
    let mut alg = LieAlgebraSpan::span_of(n, gens);
    let cap = n * n + 1;
    let mut frontier = alg.coordinate_basis();
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > cap {
            return Err(Error::Internal("bracket saturation did not terminate".into()));
        }
        let basis = alg.coordinate_basis();
        let mut fresh = Vec::new();
        for a in &frontier {
            for b in &basis {
                let c = a.bracket(b);
                if alg.insert(&c) {
                    fresh.push(c);
                }
            }
        }
        frontier = fresh;
    }
    Ok(alg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Q;

    fn rot(n: usize, i: usize, j: usize) -> Matrix<Q> {
        let mut m = Matrix::zeros(n, n);
        m.set(i, j, Q::from_i64(-1));
        m.set(j, i, Q::from_i64(1));
        m
    }

    #[test]
    fn closure_of_two_rotations_is_so3() {
        let g = lie_closure(3, &[rot(3, 0, 1), rot(3, 1, 2)]).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.contains(&rot(3, 0, 2)));
        assert!(g.is_lie_closed());
    }

    #[test]
    fn closure_is_idempotent() {
        let g = lie_closure(3, &[rot(3, 0, 1)]).unwrap();
        assert_eq!(g.dim(), 1);
        let again = lie_closure(3, &g.basis()).unwrap();
        assert!(again.same_span(&g));
    }

    #[test]
    fn span_need_not_be_closed() {
        let s = LieAlgebraSpan::span_of(3, &[rot(3, 0, 1), rot(3, 1, 2)]);
        assert_eq!(s.ensure_closed(), Err(Error::NotLieClosed));
        assert_eq!(s.derived().dim(), 1);
    }
}
