//! Shape operators, the normal curvature operator and the algebraic
//! curvature tensor built from them, plus the tensor spaces `K(h)` and
//! `B_h(h)`.
//!
//! Curvature tensors are stored covariantly: `T[a][b][c][d] = ⟨𝓡(a,b)c, d⟩`
//! on the adapted basis of the normal fiber.

use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::lie::LieAlgebraSpan;
use crate::linalg::{dot, unit, Matrix, VectorSpan};
use crate::pseudo_euclidean::{screen_block, SignatureSpace};

/// Shape operators `A_ξ` of the normal basis vectors at one point, with
/// respect to an orthonormal tangent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeFamily<F> {
    space: SignatureSpace,
    tangent_dim: usize,
    ops: Vec<Matrix<F>>,
}

impl<F: Field> ShapeFamily<F> {
    /// `ops[k]` is the shape operator of the `k`-th normal basis vector in
    /// storage order `(v, e, w)`.
    pub fn new(space: SignatureSpace, tangent_dim: usize, ops: Vec<Matrix<F>>) -> Result<Self> {
        check_dim(space.dim(), ops.len())?;
        for (k, a) in ops.iter().enumerate() {
            check_dim(tangent_dim, a.rows())?;
            check_dim(tangent_dim, a.cols())?;
            if !a.is_symmetric() {
                return Err(Error::NonSymmetricShape(k));
            }
        }
        Ok(ShapeFamily { space, tangent_dim, ops })
    }

    pub fn zero(space: SignatureSpace, tangent_dim: usize) -> Self {
        ShapeFamily { space, tangent_dim, ops: vec![Matrix::zeros(tangent_dim, tangent_dim); space.dim()] }
    }

    pub fn space(&self) -> &SignatureSpace {
        &self.space
    }

    pub fn tangent_dim(&self) -> usize {
        self.tangent_dim
    }

    pub fn operators(&self) -> &[Matrix<F>] {
        &self.ops
    }

    pub fn basis_shape(&self, k: usize) -> &Matrix<F> {
        &self.ops[k]
    }

    /// `A_ξ` by linear extension.
    pub fn shape(&self, xi: &[F]) -> Matrix<F> {
        assert_eq!(xi.len(), self.ops.len());
        let m = self.tangent_dim;
        xi.iter()
            .zip(&self.ops)
            .filter(|(c, _)| !c.is_zero())
            .fold(Matrix::zeros(m, m), |acc, (c, a)| acc.add(&a.scale(c)))
    }

    /// `[A_a, A_b]` for all pairs of normal basis vectors.
    fn commutators(&self) -> Vec<Vec<Matrix<F>>> {
        let n = self.ops.len();
        (0..n)
            .map(|a| (0..n).map(|b| self.ops[a].bracket(&self.ops[b])).collect())
            .collect()
    }
}

/// Turns the covariant table `M[a][b] = ⟨R ξ_a, ξ_b⟩` into the operator `R`.
fn operator_from_pairing<F: Field>(space: &SignatureSpace, pairing: &Matrix<F>) -> Matrix<F> {
    // G R = Mᵀ and the adapted gram is its own inverse.
    space.gram::<F>().mul(&pairing.transpose())
}

/// Normal curvature operator `R⊥(X, Y)` from the Ricci equation
/// `⟨R⊥(X,Y)ξ_a, ξ_b⟩ = ⟨[A_a, A_b]X, Y⟩`.
pub fn normal_curvature<F: Field>(shapes: &ShapeFamily<F>, x: &[F], y: &[F]) -> Result<Matrix<F>> {
    check_dim(shapes.tangent_dim, x.len())?;
    check_dim(shapes.tangent_dim, y.len())?;
    let n = shapes.space.dim();
    let comm = shapes.commutators();
    let pairing = Matrix::from_fn(n, n, |a, b| dot(y, &comm[a][b].mul_vec(x)));
    Ok(operator_from_pairing(&shapes.space, &pairing))
}

/// Dense covariant 4-tensor on the normal fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct OlmosTensor<F> {
    space: SignatureSpace,
    values: Vec<F>,
    transport: Option<Matrix<F>>,
}

/// Outcome of the four curvature-identity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub skew_first_pair: bool,
    pub skew_adjoint: bool,
    pub pair_symmetry: bool,
    pub bianchi: bool,
}

impl IdentityReport {
    pub fn all(&self) -> bool {
        self.skew_first_pair && self.skew_adjoint && self.pair_symmetry && self.bianchi
    }
}

impl<F: Field> OlmosTensor<F> {
    pub fn zero(space: SignatureSpace) -> Self {
        let n = space.dim();
        OlmosTensor { space, values: vec![F::zero(); n * n * n * n], transport: None }
    }

    pub fn from_fn(space: SignatureSpace, mut f: impl FnMut(usize, usize, usize, usize) -> F) -> Self {
        let n = space.dim();
        let mut values = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        values.push(f(a, b, c, d));
                    }
                }
            }
        }
        OlmosTensor { space, values, transport: None }
    }

    pub fn space(&self) -> &SignatureSpace {
        &self.space
    }

    /// Flat covariant table, index order `(a, b, c, d)`.
    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn transport(&self) -> Option<&Matrix<F>> {
        self.transport.as_ref()
    }

    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        let n = self.space.dim();
        ((a * n + b) * n + c) * n + d
    }

    /// `⟨𝓡(ξ_a, ξ_b)ξ_c, ξ_d⟩` on basis vectors.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &F {
        &self.values[self.idx(a, b, c, d)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(F::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs(&self.values)
    }

    /// The operator `𝓡(ξ_a, ξ_b)` on the normal fiber.
    pub fn operator(&self, a: usize, b: usize) -> Matrix<F> {
        let n = self.space.dim();
        let pairing = Matrix::from_fn(n, n, |c, d| self.get(a, b, c, d).clone());
        operator_from_pairing(&self.space, &pairing)
    }

    /// `𝓡(ξ1, ξ2)` for arbitrary normal vectors.
    pub fn operator_on(&self, xi1: &[F], xi2: &[F]) -> Matrix<F> {
        let n = self.space.dim();
        let mut out = Matrix::zeros(n, n);
        for a in 0..n {
            if xi1[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if xi2[b].is_zero() {
                    continue;
                }
                out = out.add(&self.operator(a, b).scale(&xi1[a].mul(&xi2[b])));
            }
        }
        out
    }

    /// All operators `𝓡(ξ_a, ξ_b)` with `a < b`.
    pub fn operators(&self) -> Vec<Matrix<F>> {
        let n = self.space.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                out.push(self.operator(a, b));
            }
        }
        out
    }

    pub fn check_identities(&self) -> IdentityReport {
        let n = self.space.dim();
        let scale = self.max_abs().max(1.0);
        let zero = |x: F| x.negligible(scale);
        let mut rep = IdentityReport { skew_first_pair: true, skew_adjoint: true, pair_symmetry: true, bianchi: true };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let t = self.get(a, b, c, d);
                        rep.skew_first_pair &= zero(t.add(self.get(b, a, c, d)));
                        rep.skew_adjoint &= zero(t.add(self.get(a, b, d, c)));
                        rep.pair_symmetry &= zero(t.sub(self.get(c, d, a, b)));
                        rep.bianchi &= zero(t.add(self.get(b, c, a, d)).add(self.get(c, a, b, d)));
                    }
                }
            }
        }
        rep
    }
}

/// The algebraic curvature tensor `𝓡(ξ1,ξ2) = Σ_i R⊥(A_{ξ2} e_i, A_{ξ1} e_i)`
/// over an orthonormal tangent basis.
///
/// With this ordering `⟨𝓡(ξ1,ξ2)ξ3,ξ4⟩ = −½ Tr([A_1,A_2]∘[A_3,A_4])`.
pub fn olmos_tensor<F: Field>(shapes: &ShapeFamily<F>) -> OlmosTensor<F> {
    let dm = shapes.tangent_dim;
    let comm = shapes.commutators();
    // Images A_a e_i, one list per normal basis vector.
    let images: Vec<Vec<Vec<F>>> = shapes.ops.iter().map(|a| (0..dm).map(|i| a.column(i)).collect()).collect();
    OlmosTensor::from_fn(shapes.space, |a, b, c, d| {
        // ⟨R⊥(X, Y)ξ_c, ξ_d⟩ = Yᵀ [A_c, A_d] X with X = A_b e_i, Y = A_a e_i.
        (0..dm).fold(F::zero(), |acc, i| {
            acc.add(&dot(&images[a][i], &comm[c][d].mul_vec(&images[b][i])))
        })
    })
}

/// `−½ Tr([A_a,A_b] ∘ [A_c,A_d])` for basis indices.
pub fn trace_formula<F: Field>(shapes: &ShapeFamily<F>, a: usize, b: usize, c: usize, d: usize) -> F {
    let ops = &shapes.ops;
    let c1 = ops[a].bracket(&ops[b]);
    let c2 = ops[c].bracket(&ops[d]);
    c1.mul(&c2).trace().mul(&F::ratio(-1, 2))
}

/// Checks that `tau` preserves the gram matrix.
pub fn check_orthogonal<F: Field>(space: &SignatureSpace, tau: &Matrix<F>) -> Result<()> {
    check_dim(space.dim(), tau.rows())?;
    check_dim(space.dim(), tau.cols())?;
    let g = space.gram::<F>();
    let lhs = tau.transpose().mul(&g).mul(tau);
    if lhs.sub(&g).is_negligible(tau.max_abs().max(1.0).powi(2)) {
        Ok(())
    } else {
        Err(Error::NonOrthogonalTransport)
    }
}

/// `𝓡^τ(ξ1,ξ2) = τ⁻¹ ∘ 𝓡(τξ1, τξ2) ∘ τ`.
pub fn conjugate_tensor<F: Field>(r: &OlmosTensor<F>, tau: &Matrix<F>) -> Result<OlmosTensor<F>> {
    check_orthogonal(&r.space, tau)?;
    let cur = transform4(&r.values, r.space.dim(), tau);
    let transport = match &r.transport {
        Some(prev) => prev.mul(tau),
        None => tau.clone(),
    };
    Ok(OlmosTensor { space: r.space, values: cur, transport: Some(transport) })
}

/// Pulls a covariant 4-tensor on `F^n` back along the `n × k` matrix `m`:
/// `T'[a][b][c][d] = Σ m[a'][a] m[b'][b] m[c'][c] m[d'][d] T[a'][b'][c'][d']`.
pub fn transform4<F: Field>(values: &[F], n: usize, m: &Matrix<F>) -> Vec<F> {
    assert_eq!(values.len(), n * n * n * n);
    assert_eq!(m.rows(), n);
    let k = m.cols();
    // Contract the leading index and rotate it to the back, four times.
    let mut cur = values.to_vec();
    let mut dims = [n, n, n, n];
    for _ in 0..4 {
        let rest: usize = dims[1..].iter().product();
        let mut next = vec![F::zero(); rest * k];
        for a in 0..k {
            for a0 in 0..dims[0] {
                let t = m.get(a0, a);
                if t.is_zero() && F::EXACT {
                    continue;
                }
                for r in 0..rest {
                    let slot = &mut next[r * k + a];
                    *slot = slot.add(&t.mul(&cur[a0 * rest + r]));
                }
            }
        }
        cur = next;
        dims = [dims[1], dims[2], dims[3], k];
    }
    cur
}

/// Screen parts of a curvature tensor:
/// `P0[x][y] = pr 𝓡(e_x, e_y)`, `P[i][y] = pr 𝓡(w_i, e_y)`,
/// `Qm[i][j] = pr 𝓡(w_i, w_j)`, each a `q × q` skew matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ScreenComponents<F> {
    pub p0: Vec<Vec<Matrix<F>>>,
    pub p: Vec<Vec<Matrix<F>>>,
    pub qm: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> ScreenComponents<F> {
    /// All component values, for spanning the screen algebra.
    pub fn values(&self) -> Vec<Matrix<F>> {
        self.p0
            .iter()
            .chain(&self.p)
            .chain(&self.qm)
            .flat_map(|row| row.iter().cloned())
            .collect()
    }

    /// `P0(Y1,Y2) + P_j(β1_j Y2 − β2_j Y1) + β1_i β2_j Q_ij` for
    /// `ξ = α·v + Y + β·w`.
    pub fn reconstruct(&self, space: &SignatureSpace, xi1: &[F], xi2: &[F]) -> Matrix<F> {
        let q = space.q;
        let y1: Vec<F> = space.e_range().map(|k| xi1[k].clone()).collect();
        let y2: Vec<F> = space.e_range().map(|k| xi2[k].clone()).collect();
        let b1: Vec<F> = space.w_range().map(|k| xi1[k].clone()).collect();
        let b2: Vec<F> = space.w_range().map(|k| xi2[k].clone()).collect();
        let mut out = Matrix::zeros(q, q);
        for x in 0..q {
            for y in 0..q {
                let c = y1[x].mul(&y2[y]);
                if !c.is_zero() {
                    out = out.add(&self.p0[x][y].scale(&c));
                }
            }
        }
        for j in 0..space.p {
            for y in 0..q {
                let c = b1[j].mul(&y2[y]).sub(&b2[j].mul(&y1[y]));
                if !c.is_zero() {
                    out = out.add(&self.p[j][y].scale(&c));
                }
            }
            for i in 0..space.p {
                let c = b1[i].mul(&b2[j]);
                if !c.is_zero() {
                    out = out.add(&self.qm[i][j].scale(&c));
                }
            }
        }
        out
    }
}

pub fn extract_screen_components<F: Field>(r: &OlmosTensor<F>) -> ScreenComponents<F> {
    let s = r.space;
    let block = |a: usize, b: usize| screen_block(&s, &r.operator(a, b));
    ScreenComponents {
        p0: (0..s.q).map(|x| (0..s.q).map(|y| block(s.e(x), s.e(y))).collect()).collect(),
        p: (0..s.p).map(|i| (0..s.q).map(|y| block(s.w(i), s.e(y))).collect()).collect(),
        qm: (0..s.p).map(|i| (0..s.p).map(|j| block(s.w(i), s.w(j))).collect()).collect(),
    }
}

/// Which constraint a [`TensorSpaceBasis`] solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorSpaceKind {
    /// `K(h) ⊂ Λ²𝓔* ⊗ h`, coordinates indexed by `(x<y, k)`.
    Curvature,
    /// `B_h(h) ⊂ 𝓔* ⊗ h`, coordinates indexed by `(x, k)`.
    WeakCurvature,
}

/// A basis of `K(h)` or `B_h(h)` in coordinates over an echelon basis of `h`.
#[derive(Clone, Debug)]
pub struct TensorSpaceBasis<F> {
    pub kind: TensorSpaceKind,
    pub q: usize,
    pub algebra: Vec<Matrix<F>>,
    pub basis: Vec<Vec<F>>,
}

impl<F: Field> TensorSpaceBasis<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn combine(&self, coeffs: &[F]) -> Matrix<F> {
        self.algebra
            .iter()
            .zip(coeffs)
            .fold(Matrix::zeros(self.q, self.q), |acc, (h, c)| acc.add(&h.scale(c)))
    }

    /// `R(e_x, e_y)` for the `idx`-th basis tensor of `K(h)`.
    pub fn curvature_value(&self, idx: usize, x: usize, y: usize) -> Matrix<F> {
        assert_eq!(self.kind, TensorSpaceKind::Curvature);
        let dh = self.algebra.len();
        if x == y {
            return Matrix::zeros(self.q, self.q);
        }
        let (lo, hi, sign) = if x < y { (x, y, F::one()) } else { (y, x, F::from_i64(-1)) };
        let pair = pair_index(self.q, lo, hi);
        let coeffs = &self.basis[idx][pair * dh..(pair + 1) * dh];
        self.combine(coeffs).scale(&sign)
    }

    /// `Q(e_x)` for the `idx`-th basis tensor of `B_h(h)`.
    pub fn weak_value(&self, idx: usize, x: usize) -> Matrix<F> {
        assert_eq!(self.kind, TensorSpaceKind::WeakCurvature);
        let dh = self.algebra.len();
        self.combine(&self.basis[idx][x * dh..(x + 1) * dh])
    }
}

fn pair_index(q: usize, x: usize, y: usize) -> usize {
    // Position of (x, y), x < y, in lexicographic order.
    x * (2 * q - x - 1) / 2 + (y - x - 1)
}

fn echelon_algebra<F: Field>(q: usize, h: &[Matrix<F>]) -> Result<Vec<Matrix<F>>> {
    for m in h {
        check_dim(q, m.rows())?;
        check_dim(q, m.cols())?;
    }
    Ok(LieAlgebraSpan::span_of(q, h).basis())
}

/// Exact basis of `K(h) = {R ∈ Λ²𝓔*⊗h : R(x,y)z + R(y,z)x + R(z,x)y = 0}`.
///
/// The cyclic sum is alternating in `(x, y, z)` once `R` is skew in its
/// first pair, so strictly increasing triples suffice.
pub fn curvature_space<F: Field>(q: usize, h: &[Matrix<F>]) -> Result<TensorSpaceBasis<F>> {
    let alg = echelon_algebra(q, h)?;
    let dh = alg.len();
    let pairs = q * q.saturating_sub(1) / 2;
    let unknowns = pairs * dh;
    let mut rows: Vec<Vec<F>> = Vec::new();
    for x in 0..q {
        for y in x + 1..q {
            for z in y + 1..q {
                // R(x,y)z + R(y,z)x − R(x,z)y, one row per output component.
                let terms = [(x, y, z, 1i64), (y, z, x, 1), (x, z, y, -1)];
                for out in 0..q {
                    let mut row = vec![F::zero(); unknowns];
                    for &(a, b, c, sign) in &terms {
                        let pair = pair_index(q, a, b);
                        for (k, hk) in alg.iter().enumerate() {
                            let val = hk.get(out, c).mul(&F::from_i64(sign));
                            let slot = &mut row[pair * dh + k];
                            *slot = slot.add(&val);
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    let basis = solve_constraints(unknowns, rows);
    Ok(TensorSpaceBasis { kind: TensorSpaceKind::Curvature, q, algebra: alg, basis })
}

/// Exact basis of `B_h(h)` for the identity screen metric.
pub fn weak_curvature_space<F: Field>(q: usize, h: &[Matrix<F>]) -> Result<TensorSpaceBasis<F>> {
    weak_curvature_space_for(&Matrix::identity(q), h)
}

/// `B_h(h) = {Q ∈ 𝓔*⊗h : ⟨Q(x)y,z⟩ + ⟨Q(y)z,x⟩ + ⟨Q(z)x,y⟩ = 0}` for the
/// metric with the given gram matrix.
pub fn weak_curvature_space_for<F: Field>(gram: &Matrix<F>, h: &[Matrix<F>]) -> Result<TensorSpaceBasis<F>> {
    let q = gram.rows();
    let alg = echelon_algebra(q, h)?;
    let dh = alg.len();
    let unknowns = q * dh;
    // ⟨H e_y, e_z⟩ for each algebra basis element.
    let pairing: Vec<Matrix<F>> = alg.iter().map(|hk| hk.transpose().mul(gram)).collect();
    let mut rows: Vec<Vec<F>> = Vec::new();
    for x in 0..q {
        for y in 0..q {
            for z in 0..q {
                let mut row = vec![F::zero(); unknowns];
                for &(a, b, c) in &[(x, y, z), (y, z, x), (z, x, y)] {
                    for (k, pk) in pairing.iter().enumerate() {
                        let slot = &mut row[a * dh + k];
                        *slot = slot.add(pk.get(b, c));
                    }
                }
                rows.push(row);
            }
        }
    }
    let basis = solve_constraints(unknowns, rows);
    Ok(TensorSpaceBasis { kind: TensorSpaceKind::WeakCurvature, q, algebra: alg, basis })
}

fn solve_constraints<F: Field>(unknowns: usize, rows: Vec<Vec<F>>) -> Vec<Vec<F>> {
    if unknowns == 0 {
        return Vec::new();
    }
    // Deduplicate by echelon reduction before solving.
    let span = VectorSpan::from_vectors(unknowns, rows.iter());
    if span.is_empty() {
        return (0..unknowns).map(|i| unit(unknowns, i)).collect();
    }
    Matrix::from_rows(span.canonical()).nullspace()
}

/// Result of the weak Berger test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakBergerReport {
    pub is_weak_berger: bool,
    pub algebra_dim: usize,
    pub span_dim: usize,
    pub dim_b: usize,
}

/// `h` is weak Berger when the values `Q(x)`, `Q ∈ B_h(h)`, span `h`.
pub fn is_weak_berger<F: Field>(q: usize, h: &[Matrix<F>]) -> Result<WeakBergerReport> {
    let alg = LieAlgebraSpan::span_of(q, h);
    alg.ensure_closed()?;
    let b = weak_curvature_space(q, h)?;
    let mut values = LieAlgebraSpan::zero(q);
    for idx in 0..b.dim() {
        for x in 0..q {
            values.insert(&b.weak_value(idx, x));
        }
    }
    Ok(WeakBergerReport {
        is_weak_berger: values.dim() == alg.dim(),
        algebra_dim: alg.dim(),
        span_dim: values.dim(),
        dim_b: b.dim(),
    })
}

/// Standard basis `E_ij − E_ji` (`i < j`) of `so(n)`.
pub fn so_basis<F: Field>(n: usize) -> Vec<Matrix<F>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zeros(n, n);
            m.set(i, j, F::from_i64(-1));
            m.set(j, i, F::one());
            out.push(m);
        }
    }
    out
}
