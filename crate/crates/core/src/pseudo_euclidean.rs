//! The normal fiber `ℝ^{p, q+p}` in its adapted basis.
//!
//! Vectors are ordered `(v_1..v_p, e_1..e_q, w_1..w_p)` with
//! `⟨v_i, w_j⟩ = δ_ij`, `⟨e_i, e_j⟩ = δ_ij` and all other pairings zero.
//! `Ξ = span(v)` is a maximal isotropic subspace when `q` is the screen
//! dimension. The helpers at the bottom work for an arbitrary nondegenerate
//! gram matrix and are reused for restricted modules.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::linalg::{unit, Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignatureSpace {
    pub p: usize,
    pub q: usize,
}

impl SignatureSpace {
    pub fn new(p: usize, q: usize) -> Self {
        SignatureSpace { p, q }
    }

    /// Euclidean space of dimension `q`.
    pub fn euclidean(q: usize) -> Self {
        SignatureSpace { p: 0, q }
    }

    /// `ℝ^{1, m+1}` with a single null pair.
    pub fn lorentzian(m: usize) -> Self {
        SignatureSpace { p: 1, q: m }
    }

    pub fn dim(&self) -> usize {
        2 * self.p + self.q
    }

    pub fn v(&self, i: usize) -> usize {
        assert!(i < self.p);
        i
    }

    pub fn e(&self, j: usize) -> usize {
        assert!(j < self.q);
        self.p + j
    }

    pub fn w(&self, i: usize) -> usize {
        assert!(i < self.p);
        self.p + self.q + i
    }

    pub fn v_range(&self) -> std::ops::Range<usize> {
        0..self.p
    }

    pub fn e_range(&self) -> std::ops::Range<usize> {
        self.p..self.p + self.q
    }

    pub fn w_range(&self) -> std::ops::Range<usize> {
        self.p + self.q..self.dim()
    }

    /// Basis labels in storage order, e.g. `["v1", "e1", "e2", "w1"]`.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend((1..=self.p).map(|i| format!("v{i}")));
        out.extend((1..=self.q).map(|i| format!("e{i}")));
        out.extend((1..=self.p).map(|i| format!("w{i}")));
        out
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels().iter().position(|l| l == label)
    }

    pub fn gram<F: Field>(&self) -> Matrix<F> {
        let n = self.dim();
        let mut g = Matrix::zeros(n, n);
        for i in 0..self.p {
            g.set(self.v(i), self.w(i), F::one());
            g.set(self.w(i), self.v(i), F::one());
        }
        for j in 0..self.q {
            g.set(self.e(j), self.e(j), F::one());
        }
        g
    }

    pub fn basis_vector<F: Field>(&self, i: usize) -> Vec<F> {
        unit(self.dim(), i)
    }

    pub fn xi<F: Field>(&self) -> Subspace<F> {
        Subspace::spanned_by_units(self.dim(), &self.v_range().collect::<Vec<_>>())
    }

    pub fn screen<F: Field>(&self) -> Subspace<F> {
        Subspace::spanned_by_units(self.dim(), &self.e_range().collect::<Vec<_>>())
    }
}

pub fn inner_product<F: Field>(space: &SignatureSpace, x: &[F], y: &[F]) -> Result<F> {
    check_dim(space.dim(), x.len())?;
    check_dim(space.dim(), y.len())?;
    Ok(bilinear(&space.gram(), x, y))
}

/// `xᵀ G y` for an arbitrary gram matrix.
pub fn bilinear<F: Field>(gram: &Matrix<F>, x: &[F], y: &[F]) -> F {
    crate::linalg::dot(x, &gram.mul_vec(y))
}

pub fn is_metric_skew<F: Field>(space: &SignatureSpace, t: &Matrix<F>) -> Result<bool> {
    check_dim(space.dim(), t.rows())?;
    check_dim(space.dim(), t.cols())?;
    Ok(is_skew_for(&space.gram(), t))
}

/// `G T + Tᵀ G = 0`.
pub fn is_skew_for<F: Field>(gram: &Matrix<F>, t: &Matrix<F>) -> bool {
    let gt = gram.mul(t);
    gt.add(&gt.transpose()).is_negligible(t.max_abs().max(1.0))
}

/// Blocks of an element of the stabilizer of `Ξ`:
///
/// ```text
///     ⎡ A   −Xᵀ   *  ⎤
/// T = ⎢ 0    B    X  ⎥
///     ⎣ 0    0   −Aᵀ ⎦
/// ```
///
/// `x[j]` is the screen component of `T w_j`, `star` is the (skew) `v`-part
/// of `T w`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerBlocks<F> {
    pub a: Matrix<F>,
    pub b: Matrix<F>,
    pub x: Vec<Vec<F>>,
    pub star: Matrix<F>,
}

impl<F: Field> StabilizerBlocks<F> {
    pub fn zero(space: &SignatureSpace) -> Self {
        StabilizerBlocks {
            a: Matrix::zeros(space.p, space.p),
            b: Matrix::zeros(space.q, space.q),
            x: vec![vec![F::zero(); space.q]; space.p],
            star: Matrix::zeros(space.p, space.p),
        }
    }

    /// Builds the operator. Fails with [`Error::NotSkew`] when `B` or `star`
    /// is not skew.
    pub fn assemble(&self, space: &SignatureSpace) -> Result<Matrix<F>> {
        let (p, q) = (space.p, space.q);
        check_dim(p, self.a.rows())?;
        check_dim(p, self.a.cols())?;
        check_dim(q, self.b.rows())?;
        check_dim(q, self.b.cols())?;
        check_dim(p, self.x.len())?;
        check_dim(p, self.star.rows())?;
        check_dim(p, self.star.cols())?;
        for xj in &self.x {
            check_dim(q, xj.len())?;
        }
        let skew = |m: &Matrix<F>| m.add(&m.transpose()).is_negligible(m.max_abs().max(1.0));
        if !skew(&self.b) || !skew(&self.star) {
            return Err(Error::NotSkew);
        }
        let n = space.dim();
        let mut t = Matrix::zeros(n, n);
        for i in 0..p {
            for j in 0..p {
                t.set(space.v(i), space.v(j), self.a.get(i, j).clone());
                t.set(space.w(i), space.w(j), self.a.get(j, i).neg());
                t.set(space.v(i), space.w(j), self.star.get(i, j).clone());
            }
        }
        for i in 0..q {
            for j in 0..q {
                t.set(space.e(i), space.e(j), self.b.get(i, j).clone());
            }
        }
        for (j, xj) in self.x.iter().enumerate() {
            for (k, val) in xj.iter().enumerate() {
                t.set(space.e(k), space.w(j), val.clone());
                t.set(space.v(j), space.e(k), val.neg());
            }
        }
        Ok(t)
    }
}

/// Reads off the stabilizer blocks of a skew operator preserving `Ξ`.
pub fn stabilizer_blocks<F: Field>(
    space: &SignatureSpace,
    t: &Matrix<F>,
) -> Result<StabilizerBlocks<F>> {
    if !is_metric_skew(space, t)? {
        return Err(Error::NotSkew);
    }
    let scale = t.max_abs().max(1.0);
    for col in space.v_range() {
        for row in space.e_range().chain(space.w_range()) {
            if !t.get(row, col).negligible(scale) {
                return Err(Error::NotInStabilizer);
            }
        }
    }
    let (p, q) = (space.p, space.q);
    Ok(StabilizerBlocks {
        a: Matrix::from_fn(p, p, |i, j| t.get(space.v(i), space.v(j)).clone()),
        b: Matrix::from_fn(q, q, |i, j| t.get(space.e(i), space.e(j)).clone()),
        x: (0..p).map(|j| (0..q).map(|k| t.get(space.e(k), space.w(j)).clone()).collect()).collect(),
        star: Matrix::from_fn(p, p, |i, j| t.get(space.v(i), space.w(j)).clone()),
    })
}

/// The `so(q)` block of a stabilizer element.
pub fn screen_projection<F: Field>(space: &SignatureSpace, t: &Matrix<F>) -> Result<Matrix<F>> {
    Ok(stabilizer_blocks(space, t)?.b)
}

/// Screen block without the stabilizer check.
pub fn screen_block<F: Field>(space: &SignatureSpace, t: &Matrix<F>) -> Matrix<F> {
    Matrix::from_fn(space.q, space.q, |i, j| t.get(space.e(i), space.e(j)).clone())
}

pub fn orthogonal_complement<F: Field>(space: &SignatureSpace, u: &Subspace<F>) -> Result<Subspace<F>> {
    check_dim(space.dim(), u.ambient_dim())?;
    Ok(complement_for(&space.gram(), u))
}

/// `{x : xᵀ G u = 0 for all u ∈ U}`.
pub fn complement_for<F: Field>(gram: &Matrix<F>, u: &Subspace<F>) -> Subspace<F> {
    let images: Vec<Vec<F>> = u.basis().iter().map(|b| gram.mul_vec(b)).collect();
    Subspace::from_vectors(gram.rows(), &images).annihilator()
}

/// Gram matrix of the bilinear form restricted to the span of `basis`.
pub fn restricted_gram<F: Field>(gram: &Matrix<F>, basis: &[Vec<F>]) -> Matrix<F> {
    Matrix::from_fn(basis.len(), basis.len(), |i, j| bilinear(gram, &basis[i], &basis[j]))
}

/// Cross pairing matrix `⟨a_i, b_j⟩`.
pub fn restricted_pairing<F: Field>(gram: &Matrix<F>, a: &[Vec<F>], b: &[Vec<F>]) -> Matrix<F> {
    Matrix::from_fn(a.len(), b.len(), |i, j| bilinear(gram, &a[i], &b[j]))
}

pub fn is_isotropic<F: Field>(gram: &Matrix<F>, u: &Subspace<F>) -> bool {
    restricted_gram(gram, u.basis()).is_negligible(1.0)
}

pub fn is_nondegenerate<F: Field>(gram: &Matrix<F>, u: &Subspace<F>) -> bool {
    restricted_gram(gram, u.basis()).rank() == u.dim()
}

/// `U ∩ U⊥`.
pub fn radical<F: Field>(gram: &Matrix<F>, u: &Subspace<F>) -> Subspace<F> {
    u.intersection(&complement_for(gram, u))
}

/// Inertia `(negative, zero, positive)` of a symmetric matrix, by symmetric
/// elimination.
pub fn inertia<F: Field>(sym: &Matrix<F>) -> (usize, usize, usize) {
    let mut m = sym.clone();
    let n = m.rows();
    let scale = sym.max_abs().max(1.0);
    let mut diag: Vec<F> = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pick = if F::EXACT {
            active.iter().copied().find(|&i| !m.get(i, i).is_zero())
        } else {
            active
                .iter()
                .copied()
                .filter(|&i| !m.get(i, i).negligible(scale))
                .max_by(|&a, &b| m.get(a, a).abs_f64().total_cmp(&m.get(b, b).abs_f64()))
        };
        let k = match pick {
            Some(k) => k,
            None => {
                // No usable diagonal entry: fold a coupled index into another.
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(|&(i, j)| {
                    i < j && !m.get(i, j).negligible(scale)
                });
                let Some((i, j)) = pair else { break };
                for c in 0..n {
                    let v = m.get(i, c).add(m.get(j, c));
                    m.set(i, c, v);
                }
                for r in 0..n {
                    let v = m.get(r, i).add(m.get(r, j));
                    m.set(r, i, v);
                }
                i
            }
        };
        let pivot = m.get(k, k).clone();
        active.retain(|&i| i != k);
        for &i in &active {
            let f = m.get(i, k).div(&pivot);
            for &j in &active {
                let v = m.get(i, j).sub(&f.mul(m.get(k, j)));
                m.set(i, j, v);
            }
        }
        diag.push(pivot);
    }
    let neg = diag.iter().filter(|d| d.signum() < 0).count();
    let pos = diag.iter().filter(|d| d.signum() > 0).count();
    (neg, n - neg - pos, pos)
}
