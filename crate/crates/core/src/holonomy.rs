//! Holonomy algebras generated by curvature operators and their invariant
//! subspace structure.
//!
//! Nondegenerate invariant splittings come from generalized eigenspaces of
//! self-adjoint operators commuting with the algebra: if `S` is self-adjoint
//! and `f` is a factor of its characteristic polynomial coprime to the rest,
//! then `ker f(S)^n` and `im f(S)^n` are complementary, orthogonal,
//! nondegenerate and invariant. Isotropic invariant subspaces are searched
//! among kernels, images and hulls built from the algebra itself.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{curvature_space, transform4, OlmosTensor};
use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::lie::{lie_closure, LieAlgebraSpan};
use crate::linalg::{common_kernel, image, kernel, Matrix, Subspace, VectorSpan};
use crate::pseudo_euclidean::{complement_for, inertia, is_nondegenerate, radical, restricted_gram, SignatureSpace};
use crate::spectral::{char_poly, eval_matrix, rational_factors};

/// Default seed for the pseudo-random commutant combinations.
pub const DEFAULT_SEED: u64 = 0xB10C;

/// Span of all curvature operators of the given tensors, bracket-closed.
pub fn generate_holonomy<F: Field>(space: &SignatureSpace, tensors: &[OlmosTensor<F>]) -> Result<LieAlgebraSpan<F>> {
    let mut gens = Vec::new();
    for t in tensors {
        if t.space() != space {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: t.space().dim() });
        }
        gens.extend(t.operators());
    }
    lie_closure(space.dim(), &gens)
}

/// Matrices of the algebra restricted to the invariant subspace spanned by
/// `basis`, in that basis: `X_U = (BᵀGB)⁻¹ BᵀG X B`.
pub fn restrict_ops<F: Field>(gram: &Matrix<F>, basis: &[Vec<F>], ops: &[Matrix<F>]) -> Result<(Matrix<F>, Vec<Matrix<F>>)> {
    let n = gram.rows();
    let b = Matrix::from_columns(n, basis);
    let gu = restricted_gram(gram, basis);
    let inv = gu.inverse().ok_or(Error::Internal("restriction to a degenerate subspace".into()))?;
    let left = inv.mul(&b.transpose()).mul(gram);
    let restricted = ops.iter().map(|x| left.mul(x).mul(&b)).collect();
    Ok((gu, restricted))
}

/// Self-adjoint operators commuting with every element of `ops`.
pub fn self_adjoint_commutant<F: Field>(gram: &Matrix<F>, ops: &[Matrix<F>]) -> Vec<Matrix<F>> {
    let n = gram.rows();
    let unknowns = n * n;
    let mut rows: Vec<Vec<F>> = Vec::new();
    // Entry (i, j) of S X − X S, linear in the entries of S.
    for x in ops {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![F::zero(); unknowns];
                for k in 0..n {
                    let a = &mut row[i * n + k];
                    *a = a.add(x.get(k, j));
                    let b = &mut row[k * n + j];
                    *b = b.sub(x.get(i, k));
                }
                rows.push(row);
            }
        }
    }
    // (G S)_ij − (G S)_ji.
    for i in 0..n {
        for j in i + 1..n {
            let mut row = vec![F::zero(); unknowns];
            for k in 0..n {
                let a = &mut row[k * n + j];
                *a = a.add(gram.get(i, k));
                let b = &mut row[k * n + i];
                *b = b.sub(gram.get(j, k));
            }
            rows.push(row);
        }
    }
    let span = VectorSpan::from_vectors(unknowns, rows.iter());
    let sols = if span.is_empty() {
        (0..unknowns).map(|i| crate::linalg::unit(unknowns, i)).collect()
    } else {
        Matrix::from_rows(span.canonical()).nullspace()
    };
    let mut out: Vec<Matrix<F>> = sols.into_iter().map(|v| Matrix::from_flat(n, n, v)).collect();
    // Canonical order over the span.
    let canon = LieAlgebraSpan::span_of(n, &out).basis();
    if canon.len() == out.len() {
        out = canon;
    }
    out
}

fn is_scalar<F: Field>(s: &Matrix<F>) -> bool {
    let n = s.rows();
    let c = s.get(0, 0).clone();
    s.sub(&Matrix::identity(n).scale(&c)).is_negligible(s.max_abs().max(1.0))
}

/// Commutant elements tried for splitting, in a fixed order.
fn split_candidates<F: Field>(commutant: &[Matrix<F>], seed: u64) -> Vec<Matrix<F>> {
    let mut out: Vec<Matrix<F>> = commutant.iter().filter(|s| !is_scalar(s)).cloned().collect();
    let k = commutant.len();
    for i in 0..k {
        for j in i + 1..k.min(i + 4) {
            out.push(commutant[i].add(&commutant[j]));
        }
    }
    if k > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..6 {
            let s = commutant.iter().fold(Matrix::zeros(commutant[0].rows(), commutant[0].cols()), |acc, c| {
                let coef: i64 = rng.random_range(-7..=7);
                acc.add(&c.scale(&F::from_i64(coef)))
            });
            out.push(s);
        }
    }
    out.retain(|s| !is_scalar(s));
    out
}

/// A proper nondegenerate invariant splitting `(U, U⊥)`, when one is found.
pub fn find_split<F: Field>(gram: &Matrix<F>, ops: &[Matrix<F>], seed: u64) -> Option<(Subspace<F>, Subspace<F>)> {
    let n = gram.rows();
    if n < 2 {
        return None;
    }
    let commutant = self_adjoint_commutant(gram, ops);
    for s in split_candidates(&commutant, seed) {
        for f in rational_factors(&char_poly(&s)) {
            let p = eval_matrix(&f, &s).pow(n as u32);
            let k = kernel(&p);
            if k.dim() == 0 || k.dim() == n {
                continue;
            }
            let w = image(&p);
            if k.dim() + w.dim() != n || !is_nondegenerate(gram, &k) {
                continue;
            }
            if ops.iter().all(|x| k.is_invariant(x) && w.is_invariant(x)) {
                return Some((k, w));
            }
        }
    }
    None
}

/// Nondegenerate invariant pieces, each with no further split found.
pub fn decompose<F: Field>(gram: &Matrix<F>, ops: &[Matrix<F>], seed: u64) -> Result<Vec<Subspace<F>>> {
    let n = gram.rows();
    let Some((u, w)) = find_split(gram, ops, seed) else {
        return Ok(vec![Subspace::full(n)]);
    };
    let mut out = Vec::new();
    for part in [u, w] {
        let (gu, ru) = restrict_ops(gram, part.basis(), ops)?;
        let basis = Matrix::from_columns(n, part.basis());
        for sub in decompose(&gu, &ru, seed)? {
            let vs: Vec<Vec<F>> = sub.basis().iter().map(|c| basis.mul_vec(c)).collect();
            out.push(Subspace::from_vectors(n, &vs));
        }
    }
    out.sort_by_key(|s| leading_pivot(s));
    Ok(out)
}

fn leading_pivot<F: Field>(s: &Subspace<F>) -> usize {
    s.basis().first().and_then(|v| v.iter().position(|x| !x.is_zero())).unwrap_or(usize::MAX)
}

/// Smallest invariant subspace containing `u`.
pub fn invariant_hull<F: Field>(u: &Subspace<F>, ops: &[Matrix<F>]) -> Subspace<F> {
    let n = u.ambient_dim();
    let mut span = VectorSpan::from_vectors(n, u.basis().iter());
    let mut frontier: Vec<Vec<F>> = span.basis().to_vec();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        for v in &frontier {
            for x in ops {
                let xv = x.mul_vec(v);
                if span.insert(&xv) {
                    fresh.push(xv);
                }
            }
        }
        frontier = fresh;
    }
    Subspace::from_vectors(n, &span.canonical())
}

/// Largest invariant subspace contained in `u`.
pub fn invariant_core<F: Field>(u: &Subspace<F>, ops: &[Matrix<F>]) -> Subspace<F> {
    let n = u.ambient_dim();
    let mut cur = u.clone();
    loop {
        let ann = cur.annihilator();
        if ann.is_zero() {
            return cur;
        }
        let a = Matrix::from_rows(ann.basis().to_vec());
        let mut next = cur.clone();
        for x in ops {
            next = next.intersection(&kernel(&a.mul(x)));
        }
        if next.dim() == cur.dim() {
            return cur;
        }
        cur = next;
        if cur.is_zero() {
            return Subspace::zero(n);
        }
    }
}

fn ideal_series<F: Field>(alg: &LieAlgebraSpan<F>) -> Vec<LieAlgebraSpan<F>> {
    let mut out = vec![alg.clone()];
    // Lower central series.
    let mut cur = alg.clone();
    for _ in 0..alg.size() {
        let next = alg.bracket_span(&cur);
        if next.dim() == cur.dim() || next.is_zero() {
            if !next.is_zero() {
                out.push(next);
            }
            break;
        }
        out.push(next.clone());
        cur = next;
    }
    // Derived series.
    let mut cur = alg.clone();
    for _ in 0..alg.size() {
        let next = cur.derived();
        if next.dim() == cur.dim() || next.is_zero() {
            break;
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

/// Best-effort search for a nonzero isotropic invariant subspace; the
/// largest one found is returned. Every result is invariant and isotropic.
pub fn find_isotropic_invariant<F: Field>(gram: &Matrix<F>, alg: &LieAlgebraSpan<F>, seed: u64) -> Option<Subspace<F>> {
    let n = gram.rows();
    let ops = alg.coordinate_basis();
    let mut candidates: Vec<Subspace<F>> = Vec::new();
    for ideal in ideal_series(alg) {
        let b = ideal.coordinate_basis();
        candidates.push(common_kernel(n, &b));
        let mut img = Subspace::zero(n);
        for x in &b {
            img = img.sum(&image(x));
        }
        candidates.push(img.clone());
        for _ in 0..3 {
            let next = b.iter().fold(Subspace::zero(n), |acc, x| acc.sum(&img.image(x)));
            candidates.push(next.clone());
            img = next;
        }
        for x in &b {
            let mut pw = x.clone();
            for _ in 0..3 {
                candidates.push(kernel(&pw));
                candidates.push(image(&pw));
                pw = pw.mul(x);
            }
        }
    }
    let commutant = self_adjoint_commutant(gram, &ops);
    for s in split_candidates(&commutant, seed) {
        for f in rational_factors(&char_poly(&s)) {
            let base = eval_matrix(&f, &s);
            let mut pw = base.clone();
            for _ in 0..n {
                candidates.push(kernel(&pw));
                candidates.push(image(&pw));
                pw = pw.mul(&base);
            }
        }
    }
    let mut best: Option<Subspace<F>> = None;
    for c in candidates {
        if c.is_zero() || c.dim() == n {
            continue;
        }
        for inv in [invariant_hull(&c, &ops), invariant_core(&c, &ops)] {
            let rad = radical(gram, &inv);
            if rad.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|b| rad.dim() > b.dim()) {
                best = Some(rad);
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Irreducible,
    WeaklyIrreducible,
    Decomposable,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Irreducible => "irreducible",
            Classification::WeaklyIrreducible => "weakly_irreducible",
            Classification::Decomposable => "decomposable",
        }
    }
}

/// One nondegenerate summand of the decomposition.
#[derive(Clone, Debug)]
pub struct ModuleInfo<F> {
    pub subspace: Subspace<F>,
    /// `(negative, positive)` index of the restricted metric.
    pub signature: (usize, usize),
    /// The algebra restricted to this summand, in its echelon basis.
    pub algebra: LieAlgebraSpan<F>,
    pub gram: Matrix<F>,
    pub trivial: bool,
    /// Isotropic invariant subspace found inside the summand (ambient
    /// coordinates).
    pub isotropic: Option<Subspace<F>>,
}

#[derive(Clone, Debug)]
pub struct SplittingReport<F> {
    pub classification: Classification,
    /// Decomposable: a proper nondegenerate invariant subspace.
    /// Weakly irreducible: the isotropic invariant subspace found.
    pub witness: Option<Subspace<F>>,
    /// Vectors fixed by the whole algebra.
    pub flat_part: Subspace<F>,
    pub modules: Vec<ModuleInfo<F>>,
    pub commutant_dim: usize,
}

/// Invariant subspace analysis for an algebra on the adapted normal space.
pub fn invariant_subspace_analysis<F: Field>(space: &SignatureSpace, h: &LieAlgebraSpan<F>, seed: u64) -> Result<SplittingReport<F>> {
    check_dim(space.dim(), h.size())?;
    analyze(&space.gram(), h, seed)
}

/// Invariant subspace analysis for an algebra skew with respect to `gram`.
pub fn analyze<F: Field>(gram: &Matrix<F>, h: &LieAlgebraSpan<F>, seed: u64) -> Result<SplittingReport<F>> {
    let n = gram.rows();
    let ops = h.coordinate_basis();
    let flat_part = common_kernel(n, &ops);
    let commutant_dim = self_adjoint_commutant(gram, &ops).len();
    let pieces = decompose(gram, &ops, seed)?;
    let mut modules = Vec::new();
    for piece in &pieces {
        let (gu, ru) = restrict_ops(gram, piece.basis(), &ops)?;
        let (neg, _, pos) = inertia(&gu);
        let local = LieAlgebraSpan::span_of(piece.dim(), &ru);
        let trivial = local.is_zero();
        let isotropic = if trivial || neg == 0 || pos == 0 {
            None
        } else {
            find_isotropic_invariant(&gu, &local, seed).map(|iso| {
                let b = Matrix::from_columns(n, piece.basis());
                Subspace::from_vectors(n, &iso.basis().iter().map(|c| b.mul_vec(c)).collect::<Vec<_>>())
            })
        };
        modules.push(ModuleInfo { subspace: piece.clone(), signature: (neg, pos), algebra: local, gram: gu, trivial, isotropic });
    }
    let (classification, witness) = if modules.len() > 1 {
        (Classification::Decomposable, Some(modules[0].subspace.clone()))
    } else if let Some(iso) = modules[0].isotropic.clone() {
        (Classification::WeaklyIrreducible, Some(iso))
    } else {
        (Classification::Irreducible, None)
    };
    Ok(SplittingReport { classification, witness, flat_part, modules, commutant_dim })
}

/// Re-verifies a report's witness exactly.
pub fn verify_witness<F: Field>(gram: &Matrix<F>, h: &LieAlgebraSpan<F>, report: &SplittingReport<F>) -> bool {
    let ops = h.coordinate_basis();
    let n = gram.rows();
    match (&report.classification, &report.witness) {
        (Classification::Decomposable, Some(w)) => {
            w.dim() > 0 && w.dim() < n && is_nondegenerate(gram, w) && ops.iter().all(|x| w.is_invariant(x))
        }
        (Classification::WeaklyIrreducible, Some(w)) => {
            w.dim() > 0
                && crate::pseudo_euclidean::is_isotropic(gram, w)
                && ops.iter().all(|x| w.is_invariant(x))
        }
        (Classification::Irreducible, None) => true,
        _ => false,
    }
}

/// `E = E_0 ⊕ E_1 ⊕ … ⊕ E_ℓ` with ideals `g_1 ⊕ … ⊕ g_ℓ`.
#[derive(Clone, Debug)]
pub struct ScreenDecomposition<F> {
    pub q: usize,
    pub e0: Subspace<F>,
    pub modules: Vec<Subspace<F>>,
    /// Ideals as matrices on the whole screen.
    pub ideals: Vec<LieAlgebraSpan<F>>,
    pub irreducible: Vec<bool>,
}

/// Failure of the Borel-Lichnerowicz property.
#[derive(Clone, Debug)]
pub struct NoBLWitness<F> {
    pub modules: Vec<Subspace<F>>,
    pub ideal_dims: Vec<usize>,
    pub algebra_dim: usize,
    /// An element outside `⊕ g_j` and the modules it acts on nontrivially.
    pub element: Matrix<F>,
    pub coupled_modules: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum BLOutcome<F> {
    Decomposition(ScreenDecomposition<F>),
    NoBL(NoBLWitness<F>),
}

/// Borel-Lichnerowicz decomposition for an algebra on Euclidean `ℝ^q`.
pub fn borel_lichnerowicz<F: Field>(g: &LieAlgebraSpan<F>, seed: u64) -> Result<BLOutcome<F>> {
    let q = g.size();
    let gram = Matrix::<F>::identity(q);
    let ops = g.coordinate_basis();
    let e0 = common_kernel(q, &ops);
    let mut modules = Vec::new();
    let rest = complement_for(&gram, &e0);
    if !rest.is_zero() {
        let (gu, ru) = restrict_ops(&gram, rest.basis(), &ops)?;
        let b = Matrix::from_columns(q, rest.basis());
        for sub in decompose(&gu, &ru, seed)? {
            let vs: Vec<Vec<F>> = sub.basis().iter().map(|c| b.mul_vec(c)).collect();
            modules.push(Subspace::from_vectors(q, &vs));
        }
    }
    modules.sort_by_key(|s| leading_pivot(s));
    let irreducible = modules
        .iter()
        .map(|m| {
            let (gu, ru) = restrict_ops(&gram, m.basis(), &ops)?;
            Ok(self_adjoint_commutant(&gu, &ru).len() == 1)
        })
        .collect::<Result<Vec<bool>>>()?;
    let mut ideals = Vec::new();
    for j in 0..modules.len() {
        // Coefficients c with Σ c_k X_k killing every other module.
        let mut rows: Vec<Vec<F>> = Vec::new();
        for (i, m) in modules.iter().enumerate() {
            if i == j {
                continue;
            }
            for u in m.basis() {
                let images: Vec<Vec<F>> = ops.iter().map(|x| x.mul_vec(u)).collect();
                for r in 0..q {
                    rows.push(images.iter().map(|im| im[r].clone()).collect());
                }
            }
        }
        let coeffs: Vec<Vec<F>> = if rows.is_empty() {
            (0..ops.len()).map(|k| crate::linalg::unit(ops.len(), k)).collect()
        } else {
            Matrix::from_rows(rows).nullspace()
        };
        let elems: Vec<Matrix<F>> = coeffs
            .iter()
            .map(|c| ops.iter().zip(c).fold(Matrix::zeros(q, q), |acc, (x, ck)| acc.add(&x.scale(ck))))
            .collect();
        ideals.push(LieAlgebraSpan::span_of(q, &elems));
    }
    let total: usize = ideals.iter().map(LieAlgebraSpan::dim).sum();
    if total == g.dim() {
        return Ok(BLOutcome::Decomposition(ScreenDecomposition { q, e0, modules, ideals, irreducible }));
    }
    let mut sum = LieAlgebraSpan::zero(q);
    for ideal in &ideals {
        for x in ideal.coordinate_basis() {
            sum.insert(&x);
        }
    }
    let element = ops.iter().find(|x| !sum.contains(x)).cloned().ok_or(Error::Internal("ideal sum mismatch".into()))?;
    let coupled_modules = modules
        .iter()
        .enumerate()
        .filter(|(_, m)| m.basis().iter().any(|u| element.mul_vec(u).iter().any(|x| !x.is_zero())))
        .map(|(i, _)| i)
        .collect();
    Ok(BLOutcome::NoBL(NoBLWitness {
        modules,
        ideal_dims: ideals.iter().map(LieAlgebraSpan::dim).collect(),
        algebra_dim: g.dim(),
        element,
        coupled_modules,
    }))
}

impl<F: Field> ScreenDecomposition<F> {
    /// Checks orthogonality, completeness, invariance, commuting ideals and
    /// trivial cross action.
    pub fn verify(&self, g: &LieAlgebraSpan<F>) -> bool {
        let q = self.q;
        let gram = Matrix::<F>::identity(q);
        let mut all = vec![self.e0.clone()];
        all.extend(self.modules.iter().cloned());
        let total: usize = all.iter().map(Subspace::dim).sum();
        if total != q {
            return false;
        }
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if !crate::pseudo_euclidean::restricted_pairing(&gram, all[i].basis(), all[j].basis()).is_zero() {
                    return false;
                }
            }
        }
        let ops = g.coordinate_basis();
        if !all.iter().all(|m| ops.iter().all(|x| m.is_invariant(x))) {
            return false;
        }
        if !self.e0.basis().iter().all(|u| ops.iter().all(|x| x.mul_vec(u).iter().all(F::is_zero))) {
            return false;
        }
        for (j, ideal) in self.ideals.iter().enumerate() {
            if !g.contains_algebra(ideal) {
                return false;
            }
            for (k, other) in self.ideals.iter().enumerate() {
                if k != j && !ideal.bracket_span(other).is_zero() {
                    return false;
                }
            }
            for (i, m) in self.modules.iter().enumerate() {
                if i != j
                    && !ideal.coordinate_basis().iter().all(|x| m.basis().iter().all(|u| x.mul_vec(u).iter().all(F::is_zero)))
                {
                    return false;
                }
            }
        }
        true
    }

    /// `g_j` restricted to `E_j`, in the echelon basis of `E_j`.
    pub fn restricted_ideal(&self, j: usize) -> Result<(Matrix<F>, Vec<Matrix<F>>)> {
        let gram = Matrix::<F>::identity(self.q);
        restrict_ops(&gram, self.modules[j].basis(), &self.ideals[j].coordinate_basis())
    }
}

/// Covariant curvature tensor on a Euclidean module with gram `gram`
/// (`T[a][b][c][d] = ⟨R(a,b)c, d⟩`).
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleTensor<F> {
    pub gram: Matrix<F>,
    pub values: Vec<F>,
}

impl<F: Field> ModuleTensor<F> {
    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &F {
        let k = self.dim();
        &self.values[((a * k + b) * k + c) * k + d]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(F::is_zero)
    }

    /// The operator `R(a, b)`, i.e. `G⁻¹ Mᵀ` with `M_cd = T[a][b][c][d]`.
    pub fn operator(&self, a: usize, b: usize) -> Result<Matrix<F>> {
        let k = self.dim();
        let m = Matrix::from_fn(k, k, |c, d| self.get(a, b, c, d).clone());
        Ok(self.gram.inverse().ok_or(Error::SingularMetric)?.mul(&m.transpose()))
    }

    /// Restriction of the screen part `P0` (an `ℝ^q`-tensor) to the span of
    /// `basis`.
    pub fn from_screen(p0: &[Vec<Matrix<F>>], basis: &[Vec<F>]) -> Self {
        let q = p0.len();
        let mut full = Vec::with_capacity(q * q * q * q);
        for x in 0..q {
            for y in 0..q {
                for z in 0..q {
                    for t in 0..q {
                        // ⟨P0(x,y) e_z, e_t⟩ is the (t, z) entry.
                        full.push(p0[x][y].get(t, z).clone());
                    }
                }
            }
        }
        let b = Matrix::from_columns(q, basis);
        ModuleTensor { gram: b.transpose().mul(&b), values: transform4(&full, q, &b) }
    }

    /// Restriction of a normal-space tensor to the span of `basis`.
    pub fn from_tensor(t: &OlmosTensor<F>, basis: &[Vec<F>]) -> Self {
        let n = t.space().dim();
        let b = Matrix::from_columns(n, basis);
        let gram = t.space().gram::<F>();
        ModuleTensor { gram: b.transpose().mul(&gram).mul(&b), values: transform4(t.values(), n, &b) }
    }
}

/// `scal(R) = Σ g^{kk'} g^{ll'} ⟨R(e_k,e_l)e_{l'},e_{k'}⟩`.
pub fn screen_scalar_curvature<F: Field>(r: &ModuleTensor<F>) -> Result<F> {
    let k = r.dim();
    let ginv = r.gram.inverse().ok_or(Error::SingularMetric)?;
    let mut acc = F::zero();
    for a in 0..k {
        for a2 in 0..k {
            let ga = ginv.get(a, a2);
            if ga.is_zero() && F::EXACT {
                continue;
            }
            for b in 0..k {
                for b2 in 0..k {
                    let gb = ginv.get(b, b2);
                    if gb.is_zero() && F::EXACT {
                        continue;
                    }
                    acc = acc.add(&ga.mul(gb).mul(r.get(a, b, b2, a2)));
                }
            }
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct HolonomySystemReport<F> {
    pub module_dim: usize,
    pub scal: F,
    pub irreducible: bool,
    pub nonzero: bool,
    pub symmetric_flag: bool,
}

/// Hypotheses of the holonomy-system theorem for `(E_j, R_j, g_j)`; `g_j`
/// is given as matrices in the same basis as `R_j`.
pub fn holonomy_system_check<F: Field>(r: &ModuleTensor<F>, g: &[Matrix<F>], seed: u64) -> Result<HolonomySystemReport<F>> {
    let k = r.dim();
    let alg = LieAlgebraSpan::span_of(k, g);
    for a in 0..k {
        for b in 0..k {
            if !alg.contains(&r.operator(a, b)?) {
                return Err(Error::TensorNotInAlgebra(a, b));
            }
        }
    }
    let irreducible = k > 0 && find_split(&r.gram, &alg.coordinate_basis(), seed).is_none() && self_adjoint_commutant(&r.gram, &alg.coordinate_basis()).len() == 1;
    let scal = screen_scalar_curvature(r)?;
    let nonzero = !r.is_zero();
    let symmetric_flag = irreducible && !scal.is_zero();
    Ok(HolonomySystemReport { module_dim: k, scal, irreducible, nonzero, symmetric_flag })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyLemmaEntry {
    pub dim_k: usize,
    pub nonzero: bool,
}

/// `dim K(g_j)` for each ideal acting on its module. A zero entry means the
/// data cannot come from a spacelike submanifold.
pub fn keylemma_check<F: Field>(decomp: &ScreenDecomposition<F>) -> Result<Vec<KeyLemmaEntry>> {
    (0..decomp.modules.len())
        .map(|j| {
            let (_, gj) = decomp.restricted_ideal(j)?;
            let dim_k = curvature_space(decomp.modules[j].dim(), &gj)?.dim();
            Ok(KeyLemmaEntry { dim_k, nonzero: dim_k > 0 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::so_basis;
    use crate::field::Q;

    fn block_diag(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
        let (n, m) = (a.rows(), b.rows());
        Matrix::from_fn(n + m, n + m, |i, j| {
            if i < n && j < n {
                a.get(i, j).clone()
            } else if i >= n && j >= n {
                b.get(i - n, j - n).clone()
            } else {
                Q::from_i64(0)
            }
        })
    }

    #[test]
    fn full_so_is_irreducible() {
        for q in 2..=4 {
            let g = LieAlgebraSpan::span_of(q, &so_basis::<Q>(q));
            let rep = analyze(&Matrix::identity(q), &g, DEFAULT_SEED).unwrap();
            assert_eq!(rep.classification, Classification::Irreducible);
            assert_eq!(rep.commutant_dim, 1);
        }
    }

    #[test]
    fn two_blocks_decompose() {
        let j = &so_basis::<Q>(2)[0];
        let z = Matrix::<Q>::zeros(2, 2);
        let g = LieAlgebraSpan::span_of(4, &[block_diag(j, &z), block_diag(&z, j)]);
        let rep = analyze(&Matrix::identity(4), &g, DEFAULT_SEED).unwrap();
        assert_eq!(rep.classification, Classification::Decomposable);
        assert_eq!(rep.witness.as_ref().unwrap(), &Subspace::spanned_by_units(4, &[0, 1]));
        assert!(verify_witness(&Matrix::identity(4), &g, &rep));
    }

    #[test]
    fn diagonal_so2_has_no_bl() {
        let j = &so_basis::<Q>(2)[0];
        let g = LieAlgebraSpan::span_of(4, &[block_diag(j, j)]);
        match borel_lichnerowicz(&g, DEFAULT_SEED).unwrap() {
            BLOutcome::NoBL(w) => {
                assert_eq!(w.modules.len(), 2);
                assert_eq!(w.coupled_modules, vec![0, 1]);
            }
            BLOutcome::Decomposition(_) => panic!("expected failure"),
        }
    }

    #[test]
    fn bl_for_so2_plus_so3() {
        let j = so_basis::<Q>(2);
        let s3 = so_basis::<Q>(3);
        let z2 = Matrix::zeros(2, 2);
        let z3 = Matrix::zeros(3, 3);
        let mut gens = vec![block_diag(&j[0], &z3)];
        gens.extend(s3.iter().map(|x| block_diag(&z2, x)));
        let g = LieAlgebraSpan::span_of(5, &gens);
        let BLOutcome::Decomposition(d) = borel_lichnerowicz(&g, DEFAULT_SEED).unwrap() else { panic!() };
        assert!(d.e0.is_zero());
        assert_eq!(d.modules.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(d.ideals.iter().map(LieAlgebraSpan::dim).collect::<Vec<_>>(), vec![1, 3]);
        assert!(d.verify(&g));
        let keys = keylemma_check(&d).unwrap();
        assert_eq!(keys.iter().map(|k| k.dim_k).collect::<Vec<_>>(), vec![1, 6]);
    }

    #[test]
    fn zero_algebra_is_all_flat() {
        let g = LieAlgebraSpan::<Q>::zero(3);
        let BLOutcome::Decomposition(d) = borel_lichnerowicz(&g, DEFAULT_SEED).unwrap() else { panic!() };
        assert_eq!(d.e0.dim(), 3);
        assert!(d.modules.is_empty());
        assert!(keylemma_check(&d).unwrap().is_empty());
    }

    #[test]
    fn constant_curvature_tensor_is_symmetric_system() {
        // R(x,y)z = ⟨x,z⟩y − ⟨y,z⟩x on ℝ³: ⟨R(a,b)c,d⟩ = δ_ac δ_bd − δ_bc δ_ad.
        let k = 3;
        let d = |i: usize, j: usize| if i == j { 1 } else { 0 };
        let mut values = Vec::new();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    for e in 0..k {
                        values.push(Q::from_i64(d(a, c) * d(b, e) - d(b, c) * d(a, e)));
                    }
                }
            }
        }
        let r = ModuleTensor { gram: Matrix::identity(k), values };
        let rep = holonomy_system_check(&r, &so_basis(3), DEFAULT_SEED).unwrap();
        assert!(rep.irreducible && rep.nonzero && rep.symmetric_flag);
        assert_eq!(rep.scal, Q::from_i64(-6));
        let zero = ModuleTensor { gram: Matrix::identity(k), values: vec![Q::from_i64(0); 81] };
        let rep0 = holonomy_system_check(&zero, &so_basis(3), DEFAULT_SEED).unwrap();
        assert!(!rep0.nonzero && !rep0.symmetric_flag);
    }
}
