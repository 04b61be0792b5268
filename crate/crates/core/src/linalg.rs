//! Dense matrices, echelon forms, nullspaces and spans over a [`Field`].
//!
//! Exact fields pivot on the first nonzero entry, which makes every echelon
//! basis (and therefore every [`Subspace`]) canonical. Float fields pivot on
//! the largest entry and compare against a tolerance scaled by the data.

use std::fmt;

use crate::field::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(n: usize, cols: &[Vec<F>]) -> Self {
        Self::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| F::from_i64(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: F) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<F> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() && F::EXACT {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(rhs.get(k, j)));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(F::neg).collect() }
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn bracket(&self, rhs: &Self) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    /// Zero test relative to `scale` (exact fields ignore the scale).
    pub fn is_negligible(&self, scale: f64) -> bool {
        self.data.iter().all(|x| x.negligible(scale))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(F::abs_f64).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.sub(&self.transpose()).is_negligible(self.max_abs().max(1.0))
    }

    pub fn approx_eq(&self, rhs: &Self) -> bool {
        let scale = self.max_abs().max(rhs.max_abs()).max(1.0);
        self.sub(rhs).is_negligible(scale)
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.max_abs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let pick = if F::EXACT {
                (r..m.rows).find(|&i| !m.get(i, c).is_zero())
            } else {
                (r..m.rows)
                    .filter(|&i| !m.get(i, c).negligible(scale))
                    .max_by(|&a, &b| m.get(a, c).abs_f64().total_cmp(&m.get(b, c).abs_f64()))
            };
            let Some(p) = pick else {
                if !F::EXACT {
                    for i in r..m.rows {
                        m.set(i, c, F::zero());
                    }
                }
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv();
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() && F::EXACT {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&factor.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
                if !F::EXACT {
                    m.set(i, c, F::zero());
                }
            }
            pivots.push(c);
            r += 1;
        }
        if !F::EXACT {
            for i in r..m.rows {
                for j in 0..m.cols {
                    m.set(i, j, F::zero());
                }
            }
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = r.get(row, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Some solution of `A x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Self::from_columns(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant via elimination.
    pub fn det(&self) -> F {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let pick = if F::EXACT {
                (c..n).find(|&i| !m.get(i, c).is_zero())
            } else {
                (c..n).max_by(|&a, &b| m.get(a, c).abs_f64().total_cmp(&m.get(b, c).abs_f64()))
            };
            let Some(p) = pick else { return F::zero() };
            if m.get(p, c).is_zero() && F::EXACT {
                return F::zero();
            }
            if p != c {
                m.swap_rows(p, c);
                det = det.neg();
            }
            let pivot = m.get(c, c).clone();
            det = det.mul(&pivot);
            for i in c + 1..n {
                let factor = m.get(i, c).div(&pivot);
                for j in c..n {
                    let v = m.get(i, j).sub(&factor.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

pub fn axpy<F: Field>(y: &mut [F], a: &F, x: &[F]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.add(&a.mul(xi));
    }
}

pub fn scaled<F: Field>(a: &F, x: &[F]) -> Vec<F> {
    x.iter().map(|v| v.mul(a)).collect()
}

pub fn max_abs<F: Field>(v: &[F]) -> f64 {
    v.iter().map(F::abs_f64).fold(0.0, f64::max)
}

pub fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()
}

/// Linear span kept in reduced echelon form, grown one vector at a time.
#[derive(Clone, Debug)]
pub struct VectorSpan<F> {
    len: usize,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> VectorSpan<F> {
    pub fn new(len: usize) -> Self {
        VectorSpan { len, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors<'a>(len: usize, vs: impl IntoIterator<Item = &'a Vec<F>>) -> Self {
        let mut span = Self::new(len);
        for v in vs {
            span.insert(v);
        }
        span
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() && F::EXACT {
                continue;
            }
            let c = r[p].clone();
            axpy(&mut r, &c.neg(), row);
            if !F::EXACT {
                r[p] = F::zero();
            }
        }
        r
    }

    fn residual_pivot(&self, v: &[F]) -> (Vec<F>, Option<usize>) {
        assert_eq!(v.len(), self.len, "span vector length");
        // Relative to the input, but never below unit scale: a vector that is
        // itself pure noise must not open a new direction.
        let scale = max_abs(v).max(1.0);
        let r = self.reduce(v);
        let pivot = if F::EXACT {
            r.iter().position(|x| !x.is_zero())
        } else {
            r.iter()
                .enumerate()
                .filter(|(_, x)| !x.negligible(scale))
                .max_by(|a, b| a.1.abs_f64().total_cmp(&b.1.abs_f64()))
                .map(|(i, _)| i)
        };
        (r, pivot)
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.residual_pivot(v).1.is_none()
    }

    /// Adds `v`; returns true when the span grew.
    pub fn insert(&mut self, v: &[F]) -> bool {
        let (mut r, pivot) = self.residual_pivot(v);
        let Some(p) = pivot else { return false };
        let inv = r[p].inv();
        for x in r.iter_mut() {
            *x = x.mul(&inv);
        }
        if !F::EXACT {
            let scale = max_abs(&r);
            for x in r.iter_mut() {
                if x.negligible(scale) {
                    *x = F::zero();
                }
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() && F::EXACT {
                continue;
            }
            let c = row[p].clone();
            axpy(row, &c.neg(), &r);
            if !F::EXACT {
                row[p] = F::zero();
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Coordinates of `v` in [`Self::basis`] order, when `v` lies in the span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Basis vectors in insertion order (not sorted).
    pub fn basis(&self) -> &[Vec<F>] {
        &self.rows
    }

    /// Basis sorted by pivot: the reduced echelon form of the span.
    pub fn canonical(&self) -> Vec<Vec<F>> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        idx.into_iter().map(|i| self.rows[i].clone()).collect()
    }
}

/// A linear subspace of `F^n`, stored as a canonical echelon basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    n: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn from_vectors(n: usize, vs: &[Vec<F>]) -> Self {
        let span = VectorSpan::from_vectors(n, vs.iter());
        Subspace { n, basis: span.canonical() }
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace { n, basis: (0..n).map(|i| unit(n, i)).collect() }
    }

    pub fn spanned_by_units(n: usize, idx: &[usize]) -> Self {
        let vs: Vec<Vec<F>> = idx.iter().map(|&i| unit(n, i)).collect();
        Self::from_vectors(n, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Basis vectors as the columns of an `n × dim` matrix.
    pub fn columns(&self) -> Matrix<F> {
        Matrix::from_columns(self.n, &self.basis)
    }

    pub fn contains(&self, v: &[F]) -> bool {
        VectorSpan::from_vectors(self.n, self.basis.iter()).contains(v)
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        let span = VectorSpan::from_vectors(self.n, self.basis.iter());
        other.basis.iter().all(|v| span.contains(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Self::from_vectors(self.n, &vs)
    }

    /// Vectors annihilating the subspace under the Euclidean dot product.
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.n);
        }
        let m = Matrix::from_rows(self.basis.clone());
        Self::from_vectors(self.n, &m.nullspace())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let a = self.annihilator();
        let b = other.annihilator();
        let mut rows = a.basis.clone();
        rows.extend(b.basis.iter().cloned());
        if rows.is_empty() {
            return Self::full(self.n);
        }
        Self::from_vectors(self.n, &Matrix::from_rows(rows).nullspace())
    }

    /// Image of the subspace under a linear map.
    pub fn image(&self, op: &Matrix<F>) -> Self {
        let vs: Vec<Vec<F>> = self.basis.iter().map(|b| op.mul_vec(b)).collect();
        Self::from_vectors(op.rows(), &vs)
    }

    pub fn is_invariant(&self, op: &Matrix<F>) -> bool {
        let span = VectorSpan::from_vectors(self.n, self.basis.iter());
        self.basis.iter().all(|b| span.contains(&op.mul_vec(b)))
    }
}

/// Kernel of a single matrix as a subspace.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    Subspace::from_vectors(m.cols(), &m.nullspace())
}

/// Column space of a matrix.
pub fn image<F: Field>(m: &Matrix<F>) -> Subspace<F> {
    let cols: Vec<Vec<F>> = (0..m.cols()).map(|j| m.column(j)).collect();
    Subspace::from_vectors(m.rows(), &cols)
}

/// Common kernel of several matrices.
pub fn common_kernel<F: Field>(n: usize, ms: &[Matrix<F>]) -> Subspace<F> {
    if ms.is_empty() {
        return Subspace::full(n);
    }
    let mut stacked = ms[0].clone();
    for m in &ms[1..] {
        stacked = stacked.vstack(m);
    }
    kernel(&stacked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Q, R64};

    fn q(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_i64(rows)
    }

    #[test]
    fn rref_and_rank() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, q(&[&[1, 0, 1], &[0, 1, 1], &[0, 0, 0]]));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = q(&[&[1, 2, 3, 4], &[0, 1, 1, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = q(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.det(), Q::from_i64(1));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(2));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn span_canonical_form_is_order_independent() {
        let a = vec![Q::from_i64(1), Q::from_i64(1), Q::from_i64(0)];
        let b = vec![Q::from_i64(0), Q::from_i64(1), Q::from_i64(0)];
        let s1 = Subspace::from_vectors(3, &[a.clone(), b.clone()]);
        let s2 = Subspace::from_vectors(3, &[b, a]);
        assert_eq!(s1, s2);
        assert_eq!(s1, Subspace::spanned_by_units(3, &[0, 1]));
    }

    #[test]
    fn intersection_of_planes() {
        let u = Subspace::<Q>::spanned_by_units(3, &[0, 1]);
        let w = Subspace::<Q>::spanned_by_units(3, &[1, 2]);
        assert_eq!(u.intersection(&w), Subspace::spanned_by_units(3, &[1]));
        assert_eq!(u.sum(&w), Subspace::full(3));
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let m = Matrix::from_rows(vec![
            vec![R64(1.0), R64(2.0)],
            vec![R64(2.0), R64(4.0 + 1e-13)],
        ]);
        assert_eq!(m.rank(), 1);
        let span = VectorSpan::from_vectors(2, [vec![R64(1.0), R64(2.0)]].iter());
        let coords = span.coordinates(&[R64(3.0), R64(6.0)]).unwrap();
        let back = scaled(&coords[0], &span.basis()[0]);
        assert!((back[0].0 - 3.0).abs() < 1e-12 && (back[1].0 - 6.0).abs() < 1e-12);
    }
}
