//! Weakly irreducible subalgebras of `so(1, m+1)` and the Lorentzian
//! splitting of a normal holonomy algebra.
//!
//! Elements of the stabilizer of a null line `ℝv` are written in an adapted
//! basis `(v, f_1..f_m, w)` as
//!
//! ```text
//!            ⎡ a   −Xᵀ   0 ⎤
//! T(a,B,X) = ⎢ 0    B    X ⎥
//!            ⎣ 0    0   −a ⎦
//! ```
//!
//! with `a ∈ ℝ`, `B ∈ so(m)` and `X ∈ ℝ^m`; `a` is the `ℝ`-part, `B` the
//! screen part and `X` the translation part.

use crate::error::{check_dim, Error, Result};
use crate::field::Field;
use crate::holonomy::{analyze, holonomy_system_check, restrict_ops, Classification, HolonomySystemReport, ModuleTensor, SplittingReport};
use crate::curvature::OlmosTensor;
use crate::lie::LieAlgebraSpan;
use crate::linalg::{unit, Matrix, Subspace, VectorSpan};
use crate::pseudo_euclidean::{bilinear, complement_for, inertia, restricted_gram, SignatureSpace, StabilizerBlocks};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BBIType {
    Type1,
    Type2,
    Type3,
    Type4,
    Irreducible,
    NotWeaklyIrreducible,
}

impl BBIType {
    pub fn as_str(&self) -> &'static str {
        match self {
            BBIType::Type1 => "Type1",
            BBIType::Type2 => "Type2",
            BBIType::Type3 => "Type3",
            BBIType::Type4 => "Type4",
            BBIType::Irreducible => "Irreducible",
            BBIType::NotWeaklyIrreducible => "NotWeaklyIrreducible",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BBIClassification<F> {
    pub tag: BBIType,
    pub m: usize,
    /// Screen algebra in the adapted screen basis (coordinate order equals
    /// the echelon order).
    pub g: LieAlgebraSpan<F>,
    /// Gram matrix of the adapted screen basis.
    pub screen_gram: Matrix<F>,
    /// `φ` on the basis of `g` (Type 3).
    pub phi: Option<Vec<F>>,
    /// `ψ` on the basis of `g`, in coordinates of a basis of `ℝ^{m−ℓ}` (Type 4).
    pub psi: Option<Vec<Vec<F>>>,
    pub ell: Option<usize>,
    /// Invariant null vector in the input coordinates.
    pub null_vector: Option<Vec<F>>,
    /// Irreducible case: the algebra is all of `so(1, m+1)`.
    pub full: bool,
}

impl<F: Field> BBIClassification<F> {
    fn bare(tag: BBIType, m: usize) -> Self {
        BBIClassification {
            tag,
            m,
            g: LieAlgebraSpan::zero(m),
            screen_gram: Matrix::identity(m),
            phi: None,
            psi: None,
            ell: None,
            null_vector: None,
            full: false,
        }
    }
}

/// `T(a, B, X)` in the adapted basis of `ℝ^{1, m+1}`.
pub fn stabilizer_element<F: Field>(a: F, b: &Matrix<F>, x: &[F]) -> Result<Matrix<F>> {
    let m = b.rows();
    let space = SignatureSpace::lorentzian(m);
    StabilizerBlocks { a: Matrix::from_flat(1, 1, vec![a]), b: b.clone(), x: vec![x.to_vec()], star: Matrix::zeros(1, 1) }
        .assemble(&space)
}

/// Data of a construction request.
#[derive(Clone, Debug)]
pub enum TypeData<F> {
    Type1,
    Type2,
    /// Values of `φ` on the given generators of `g`.
    Type3 { phi: Vec<F> },
    /// `g ⊂ so(ℓ)`; values of `ψ` on the generators, each in `ℝ^{m−ℓ}`.
    Type4 { ell: usize, psi: Vec<Vec<F>> },
}

/// Checks that `values` (one per generator) define a linear map on the span
/// of `gens` vanishing on `[g, g]`, and returns it on the echelon basis.
fn linear_on_algebra<F: Field>(size: usize, gens: &[Matrix<F>], values: &[Vec<F>]) -> Result<(LieAlgebraSpan<F>, Vec<Vec<F>>)> {
    check_dim(gens.len(), values.len())?;
    let width = values.first().map_or(0, Vec::len);
    // Graph of the map; it is well defined iff the graph has dimension dim g.
    let mut graph = VectorSpan::new(size * size + width);
    for (g, val) in gens.iter().zip(values) {
        check_dim(width, val.len())?;
        let mut row = g.as_slice().to_vec();
        row.extend(val.iter().cloned());
        graph.insert(&row);
    }
    let alg = LieAlgebraSpan::span_of(size, &LieAlgebraSpan::span_of(size, gens).basis());
    if graph.dim() != alg.dim() {
        return Err(Error::InvalidEpimorphism("values are not linear in the generators".into()));
    }
    let eval = |m: &Matrix<F>| -> Result<Vec<F>> {
        let mut probe = m.as_slice().to_vec();
        probe.extend(std::iter::repeat_n(F::zero(), width));
        // Solve for coefficients over the graph rows, then read the values.
        let rows = graph.basis();
        let a = Matrix::from_columns(size * size, &rows.iter().map(|r| r[..size * size].to_vec()).collect::<Vec<_>>());
        let c = a.solve(m.as_slice()).ok_or(Error::Internal("element outside algebra".into()))?;
        Ok((0..width).map(|k| rows.iter().zip(&c).fold(F::zero(), |acc, (r, ck)| acc.add(&ck.mul(&r[size * size + k])))).collect())
    };
    let on_basis = alg.coordinate_basis().iter().map(eval).collect::<Result<Vec<_>>>()?;
    for d in alg.derived().coordinate_basis() {
        if eval(&d)?.iter().any(|x| !x.is_zero()) {
            return Err(Error::InvalidEpimorphism("does not vanish on [g, g]".into()));
        }
    }
    Ok((alg, on_basis))
}

/// The algebra of the requested type, for `g` given by generators.
///
/// For Types 1-3 `g ⊂ so(m)`; for Type 4 `g ⊂ so(ℓ)` acts on the first `ℓ`
/// screen directions.
pub fn construct_type<F: Field>(m: usize, g: &[Matrix<F>], data: &TypeData<F>) -> Result<LieAlgebraSpan<F>> {
    let zero_x = vec![F::zero(); m];
    let translations = |upto: usize| -> Result<Vec<Matrix<F>>> {
        (0..upto).map(|i| stabilizer_element(F::zero(), &Matrix::zeros(m, m), &unit(m, i))).collect()
    };
    let mut gens = Vec::new();
    match data {
        TypeData::Type1 | TypeData::Type2 | TypeData::Type3 { .. } => {
            for b in g {
                check_dim(m, b.rows())?;
            }
            LieAlgebraSpan::span_of(m, g).ensure_closed()?;
        }
        TypeData::Type4 { ell, .. } => {
            if *ell == 0 || *ell >= m {
                return Err(Error::InvalidConstruction(format!("need 0 < ell < m, got ell = {ell}, m = {m}")));
            }
            for b in g {
                check_dim(*ell, b.rows())?;
            }
            LieAlgebraSpan::span_of(*ell, g).ensure_closed()?;
        }
    }
    match data {
        TypeData::Type1 => {
            gens.push(stabilizer_element(F::one(), &Matrix::zeros(m, m), &zero_x)?);
            for b in g {
                gens.push(stabilizer_element(F::zero(), b, &zero_x)?);
            }
            gens.extend(translations(m)?);
        }
        TypeData::Type2 => {
            for b in g {
                gens.push(stabilizer_element(F::zero(), b, &zero_x)?);
            }
            gens.extend(translations(m)?);
        }
        TypeData::Type3 { phi } => {
            let values: Vec<Vec<F>> = phi.iter().map(|x| vec![x.clone()]).collect();
            let (_, on_basis) = linear_on_algebra(m, g, &values)?;
            if on_basis.iter().all(|v| v[0].is_zero()) {
                return Err(Error::InvalidEpimorphism("phi is not surjective".into()));
            }
            for (b, a) in g.iter().zip(phi) {
                gens.push(stabilizer_element(a.clone(), b, &zero_x)?);
            }
            gens.extend(translations(m)?);
        }
        TypeData::Type4 { ell, psi } => {
            let ell = *ell;
            let (_, on_basis) = linear_on_algebra(ell, g, psi)?;
            let width = m - ell;
            if psi.iter().any(|v| v.len() != width) {
                return Err(Error::InvalidEpimorphism(format!("psi must take values in R^{width}")));
            }
            if on_basis.is_empty() || Matrix::from_rows(on_basis).rank() != width {
                return Err(Error::InvalidEpimorphism("psi is not surjective".into()));
            }
            for (b, val) in g.iter().zip(psi) {
                let embedded = Matrix::from_fn(m, m, |i, j| if i < ell && j < ell { b.get(i, j).clone() } else { F::zero() });
                let mut x = vec![F::zero(); ell];
                x.extend(val.iter().cloned());
                gens.push(stabilizer_element(F::zero(), &embedded, &x)?);
            }
            gens.extend(translations(ell)?);
        }
    }
    let alg = LieAlgebraSpan::span_of(m + 2, &gens);
    if !alg.is_lie_closed() {
        return Err(Error::Internal("constructed span is not closed".into()));
    }
    Ok(alg)
}

/// Classifies an algebra on `ℝ^{1, m+1}` given in the adapted basis.
pub fn classify_bbi<F: Field>(space: &SignatureSpace, h: &LieAlgebraSpan<F>, seed: u64) -> Result<BBIClassification<F>> {
    if space.p != 1 {
        return Err(Error::SignatureMismatch { neg: space.p, pos: space.p + space.q });
    }
    check_dim(space.dim(), h.size())?;
    classify_with_gram(&space.gram(), h, seed)
}

/// Classification for an algebra skew with respect to a Lorentzian gram.
pub fn classify_with_gram<F: Field>(gram: &Matrix<F>, h: &LieAlgebraSpan<F>, seed: u64) -> Result<BBIClassification<F>> {
    let n = gram.rows();
    let (neg, zero, pos) = inertia(gram);
    if neg != 1 || zero != 0 || n < 2 {
        return Err(Error::SignatureMismatch { neg, pos });
    }
    h.ensure_closed()?;
    let report = analyze(gram, h, seed)?;
    classify_from_report(gram, h, &report)
}

fn classify_from_report<F: Field>(gram: &Matrix<F>, h: &LieAlgebraSpan<F>, report: &SplittingReport<F>) -> Result<BBIClassification<F>> {
    let n = gram.rows();
    let m = n - 2;
    match report.classification {
        Classification::Decomposable => return Ok(BBIClassification::bare(BBIType::NotWeaklyIrreducible, m)),
        Classification::Irreducible => {
            let mut c = BBIClassification::bare(BBIType::Irreducible, m);
            c.full = h.dim() == n * (n - 1) / 2;
            return Ok(c);
        }
        Classification::WeaklyIrreducible => {}
    }
    let xi = report.witness.as_ref().ok_or(Error::Internal("missing isotropic witness".into()))?;
    if xi.dim() != 1 {
        return Err(Error::UnrecognizedStructure(format!("invariant isotropic subspace of dimension {}", xi.dim())));
    }
    let v = xi.basis()[0].clone();
    let (p, screen_gram) = adapted_basis(gram, &v)?;
    let pinv = p.inverse().ok_or(Error::Internal("adapted basis is singular".into()))?;
    // (a, B, X) for each basis element of h.
    let parts: Vec<(F, Matrix<F>, Vec<F>)> = h
        .coordinate_basis()
        .iter()
        .map(|t| {
            let tt = pinv.mul(t).mul(&p);
            let a = tt.get(0, 0).clone();
            let b = Matrix::from_fn(m, m, |i, j| tt.get(i + 1, j + 1).clone());
            let x = (0..m).map(|i| tt.get(i + 1, m + 1).clone()).collect();
            (a, b, x)
        })
        .collect();
    let a_zero = parts.iter().all(|(a, _, _)| a.is_zero());
    let screen_parts: Vec<Matrix<F>> = parts.iter().map(|(_, b, _)| b.clone()).collect();
    let g = LieAlgebraSpan::span_of(m, &LieAlgebraSpan::span_of(m, &screen_parts).basis());
    // Translation ideal: combinations with a = 0 and B = 0.
    let rows: Vec<Vec<F>> = {
        let mut rows = vec![parts.iter().map(|(a, _, _)| a.clone()).collect::<Vec<F>>()];
        for idx in 0..m * m {
            rows.push(parts.iter().map(|(_, b, _)| b.as_slice()[idx].clone()).collect());
        }
        rows
    };
    let coeffs = Matrix::from_rows(rows).nullspace();
    let mut trans = VectorSpan::new(m);
    for c in &coeffs {
        let x = parts.iter().zip(c).fold(vec![F::zero(); m], |acc, ((_, _, x), ck)| {
            acc.iter().zip(x).map(|(s, xi)| s.add(&ck.mul(xi))).collect()
        });
        trans.insert(&x);
    }
    let d_t = trans.dim();
    // Lift of a screen element to (a, X) through h.
    let lift = |b: &Matrix<F>| -> Result<(F, Vec<F>)> {
        let cols: Vec<Vec<F>> = screen_parts.iter().map(|s| s.as_slice().to_vec()).collect();
        let c = Matrix::from_columns(m * m, &cols).solve(b.as_slice()).ok_or(Error::Internal("screen element has no lift".into()))?;
        let a = parts.iter().zip(&c).fold(F::zero(), |acc, ((a, _, _), ck)| acc.add(&ck.mul(a)));
        let x = parts.iter().zip(&c).fold(vec![F::zero(); m], |acc, ((_, _, x), ck)| {
            acc.iter().zip(x).map(|(s, xi)| s.add(&ck.mul(xi))).collect()
        });
        Ok((a, x))
    };
    let mut out = BBIClassification::bare(BBIType::Type2, m);
    out.null_vector = Some(v);
    out.screen_gram = screen_gram.clone();
    if d_t == m {
        if a_zero {
            out.tag = BBIType::Type2;
        } else if h.dim() == g.dim() + m + 1 {
            out.tag = BBIType::Type1;
        } else if h.dim() == g.dim() + m {
            let phi = g.coordinate_basis().iter().map(|b| lift(b).map(|(a, _)| a)).collect::<Result<Vec<F>>>()?;
            for d in g.derived().coordinate_basis() {
                if !lift(&d)?.0.is_zero() {
                    return Err(Error::UnrecognizedStructure("R-part does not vanish on [g, g]".into()));
                }
            }
            out.tag = BBIType::Type3;
            out.phi = Some(phi);
        } else {
            return Err(Error::UnrecognizedStructure("dimension count matches no type".into()));
        }
        out.g = g;
        return Ok(out);
    }
    if !a_zero || d_t == 0 {
        return Err(Error::UnrecognizedStructure(format!("translation part of rank {d_t} < {m} with nonzero R-part or no translations")));
    }
    // Type 4: split the screen as L ⊕ L⊥ with L the free translations.
    let l = Subspace::from_vectors(m, &trans.canonical());
    let lperp = complement_for(&screen_gram, &l);
    for b in g.coordinate_basis() {
        if !l.is_invariant(&b) || !lperp.basis().iter().all(|u| b.mul_vec(u).iter().all(F::is_zero)) {
            return Err(Error::UnrecognizedStructure("screen algebra does not act on the translation part only".into()));
        }
    }
    // Projection onto L⊥ along L, in coordinates of the echelon basis of L⊥.
    let mut basis_cols = l.basis().to_vec();
    basis_cols.extend(lperp.basis().iter().cloned());
    let change = Matrix::from_columns(m, &basis_cols).inverse().ok_or(Error::Internal("singular screen split".into()))?;
    let ell = l.dim();
    let project = |x: &[F]| -> Vec<F> { change.mul_vec(x)[ell..].to_vec() };
    let psi = g.coordinate_basis().iter().map(|b| lift(b).map(|(_, x)| project(&x))).collect::<Result<Vec<Vec<F>>>>()?;
    if psi.is_empty() || Matrix::from_rows(psi.clone()).rank() != m - ell {
        return Err(Error::UnrecognizedStructure("psi is not surjective".into()));
    }
    for d in g.derived().coordinate_basis() {
        if project(&lift(&d)?.1).iter().any(|x| !x.is_zero()) {
            return Err(Error::UnrecognizedStructure("psi does not vanish on [g, g]".into()));
        }
    }
    out.tag = BBIType::Type4;
    out.ell = Some(ell);
    out.psi = Some(psi);
    out.g = g;
    Ok(out)
}

/// Columns `(v, f_1..f_m, w)` with `⟨v, w⟩ = 1`, `⟨w, w⟩ = 0` and `f`
/// spanning `{v, w}⊥`; also returns the gram matrix of `f`.
fn adapted_basis<F: Field>(gram: &Matrix<F>, v: &[F]) -> Result<(Matrix<F>, Matrix<F>)> {
    let n = gram.rows();
    let gv = gram.mul_vec(v);
    // Prefer a null partner among the basis vectors, else the first one
    // pairing with v.
    let pairing: Vec<usize> = (0..n).filter(|&k| !gv[k].is_zero()).collect();
    let k = pairing
        .iter()
        .copied()
        .find(|&k| gram.get(k, k).is_zero())
        .or_else(|| pairing.first().copied())
        .ok_or(Error::Internal("null vector in the radical".into()))?;
    let u: Vec<F> = unit::<F>(n, k).iter().map(|x| x.div(&gv[k])).collect();
    let half_uu = bilinear(gram, &u, &u).mul(&F::ratio(1, 2));
    let w: Vec<F> = u.iter().zip(v).map(|(ui, vi)| ui.sub(&half_uu.mul(vi))).collect();
    let screen = complement_for(gram, &Subspace::from_vectors(n, &[v.to_vec(), w.clone()]));
    let mut cols = vec![v.to_vec()];
    cols.extend(screen.basis().iter().cloned());
    cols.push(w);
    Ok((Matrix::from_columns(n, &cols), restricted_gram(gram, screen.basis())))
}

/// A Riemannian factor of the normal holonomy representation.
#[derive(Clone, Debug)]
pub struct RiemannianFactor<F> {
    pub subspace: Subspace<F>,
    pub algebra_dim: usize,
    pub system: Option<HolonomySystemReport<F>>,
}

#[derive(Clone, Debug)]
pub struct LorentzianFactor<F> {
    pub subspace: Subspace<F>,
    pub algebra_dim: usize,
    pub classification: BBIClassification<F>,
}

#[derive(Clone, Debug)]
pub struct LorentzianSplitting<F> {
    pub report: SplittingReport<F>,
    /// Sum of the summands with trivial action.
    pub flat: Subspace<F>,
    pub riemannian: Vec<RiemannianFactor<F>>,
    pub lorentzian: Option<LorentzianFactor<F>>,
}

/// Splits a holonomy algebra on a Lorentzian normal space into a flat part,
/// Riemannian factors and at most one Lorentzian factor, and classifies the
/// latter. Riemannian factors get holonomy-system reports when curvature
/// tensors are supplied.
pub fn lorentzian_splitting<F: Field>(
    space: &SignatureSpace,
    hol: &LieAlgebraSpan<F>,
    tensors: &[OlmosTensor<F>],
    seed: u64,
) -> Result<LorentzianSplitting<F>> {
    if space.p > 1 {
        return Err(Error::SignatureMismatch { neg: space.p, pos: space.p + space.q });
    }
    check_dim(space.dim(), hol.size())?;
    let gram = space.gram::<F>();
    let n = space.dim();
    let report = analyze(&gram, hol, seed)?;
    let ops = hol.coordinate_basis();
    let mut flat = Subspace::zero(n);
    let mut riemannian = Vec::new();
    let mut lorentzian = None;
    for module in &report.modules {
        if module.trivial {
            flat = flat.sum(&module.subspace);
            continue;
        }
        if module.signature.0 == 0 {
            let system = match tensors.first() {
                Some(t) => {
                    let r = ModuleTensor::from_tensor(t, module.subspace.basis());
                    let (_, local) = restrict_ops(&gram, module.subspace.basis(), &ops)?;
                    Some(holonomy_system_check(&r, &local, seed)?)
                }
                None => None,
            };
            riemannian.push(RiemannianFactor { subspace: module.subspace.clone(), algebra_dim: module.algebra.dim(), system });
        } else {
            let local = LieAlgebraSpan::span_of(module.subspace.dim(), &module.algebra.basis());
            let local_report = analyze(&module.gram, &local, seed)?;
            let mut classification = classify_from_report(&module.gram, &local, &local_report)?;
            if let Some(v) = classification.null_vector.take() {
                let b = Matrix::from_columns(n, module.subspace.basis());
                classification.null_vector = Some(b.mul_vec(&v));
            }
            lorentzian = Some(LorentzianFactor { subspace: module.subspace.clone(), algebra_dim: module.algebra.dim(), classification });
        }
    }
    Ok(LorentzianSplitting { report, flat, riemannian, lorentzian })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::so_basis;
    use crate::field::Q;
    use crate::holonomy::DEFAULT_SEED;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn type2_null_translations() {
        let h = construct_type::<Q>(1, &[], &TypeData::Type2).unwrap();
        assert_eq!(h.dim(), 1);
        let c = classify_bbi(&SignatureSpace::lorentzian(1), &h, DEFAULT_SEED).unwrap();
        assert_eq!(c.tag, BBIType::Type2);
    }

    #[test]
    fn type1_so2_round_trip() {
        let h = construct_type::<Q>(2, &so_basis(2), &TypeData::Type1).unwrap();
        assert_eq!(h.dim(), 4);
        let c = classify_bbi(&SignatureSpace::lorentzian(2), &h, DEFAULT_SEED).unwrap();
        assert_eq!(c.tag, BBIType::Type1);
    }

    #[test]
    fn type3_recovers_phi() {
        let h = construct_type::<Q>(2, &so_basis(2), &TypeData::Type3 { phi: vec![q(3)] }).unwrap();
        let c = classify_bbi(&SignatureSpace::lorentzian(2), &h, DEFAULT_SEED).unwrap();
        assert_eq!(c.tag, BBIType::Type3);
        let b = c.g.coordinate_basis()[0].clone();
        // The recovered basis element is a multiple t·J of J; φ scales with it.
        let t = b.get(1, 0).clone();
        assert_eq!(c.phi.unwrap()[0], t.mul(&q(3)));
    }

    #[test]
    fn type4_recovers_ell() {
        let h = construct_type::<Q>(3, &so_basis(2), &TypeData::Type4 { ell: 2, psi: vec![vec![q(1)]] }).unwrap();
        let c = classify_bbi(&SignatureSpace::lorentzian(3), &h, DEFAULT_SEED).unwrap();
        assert_eq!(c.tag, BBIType::Type4);
        assert_eq!(c.ell, Some(2));
    }

    #[test]
    fn invalid_epimorphisms() {
        assert!(matches!(
            construct_type::<Q>(2, &so_basis(2), &TypeData::Type3 { phi: vec![q(0)] }),
            Err(Error::InvalidEpimorphism(_))
        ));
        assert!(matches!(
            construct_type::<Q>(3, &so_basis(3), &TypeData::Type3 { phi: vec![q(1), q(0), q(0)] }),
            Err(Error::InvalidEpimorphism(_))
        ));
    }

    #[test]
    fn signature_is_checked() {
        let h = LieAlgebraSpan::<Q>::zero(6);
        assert!(matches!(classify_bbi(&SignatureSpace::new(2, 2), &h, DEFAULT_SEED), Err(Error::SignatureMismatch { .. })));
    }
}
