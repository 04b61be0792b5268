//! Characteristic polynomials and eigenvalue candidates.
//!
//! Exact fields locate roots numerically on the squarefree part of the
//! characteristic polynomial, snap them to small-denominator rationals and
//! keep only those that are exact roots. Roots the snap misses are refined
//! by Newton steps in exact arithmetic and recovered as the simplest
//! rational in a tiny interval. Float fields read eigenvalues off a Schur
//! decomposition.

use nalgebra::{DMatrix, Schur};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::field::{simplest_between, Field, Q};
use crate::linalg::Matrix;

/// Polynomial coefficients, lowest degree first.
pub type Poly<F> = Vec<F>;

fn trim<F: Field>(mut p: Poly<F>) -> Poly<F> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn degree<F: Field>(p: &Poly<F>) -> Option<usize> {
    let t = trim(p.clone());
    (!t.is_empty()).then(|| t.len() - 1)
}

pub fn eval<F: Field>(p: &Poly<F>, x: &F) -> F {
    p.iter().rev().fold(F::zero(), |acc, c| acc.mul(x).add(c))
}

/// `p(M)` by Horner's scheme.
pub fn eval_matrix<F: Field>(p: &Poly<F>, m: &Matrix<F>) -> Matrix<F> {
    let n = m.rows();
    p.iter().rev().fold(Matrix::zeros(n, n), |acc, c| acc.mul(m).add(&Matrix::identity(n).scale(c)))
}

pub fn derivative<F: Field>(p: &Poly<F>) -> Poly<F> {
    p.iter().enumerate().skip(1).map(|(k, c)| c.mul(&F::from_i64(k as i64))).collect()
}

/// Quotient and remainder.
pub fn divmod<F: Field>(num: &Poly<F>, den: &Poly<F>) -> (Poly<F>, Poly<F>) {
    let den = trim(den.clone());
    assert!(!den.is_empty(), "polynomial division by zero");
    let mut rem = trim(num.clone());
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let lead = den.last().unwrap().clone();
    let mut quot = vec![F::zero(); rem.len() - den.len() + 1];
    while rem.len() >= den.len() {
        let shift = rem.len() - den.len();
        let c = rem.last().unwrap().div(&lead);
        for (i, d) in den.iter().enumerate() {
            rem[shift + i] = rem[shift + i].sub(&c.mul(d));
        }
        quot[shift] = c;
        rem.pop();
        rem = trim(rem);
    }
    (quot, rem)
}

fn monic<F: Field>(p: Poly<F>) -> Poly<F> {
    let p = trim(p);
    match p.last() {
        Some(lead) => {
            let inv = lead.inv();
            p.iter().map(|c| c.mul(&inv)).collect()
        }
        None => p,
    }
}

/// Monic greatest common divisor.
pub fn gcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// `det(t I − M)` via the Faddeev–LeVerrier recursion.
pub fn char_poly<F: Field>(m: &Matrix<F>) -> Poly<F> {
    let n = m.rows();
    let mut coeffs = vec![F::zero(); n + 1];
    coeffs[n] = F::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        mk = m.mul(&mk).add(&Matrix::identity(n).scale(&coeffs[n - k + 1]));
        coeffs[n - k] = m.mul(&mk).trace().neg().div(&F::from_i64(k as i64));
    }
    coeffs
}

/// `p / gcd(p, p')`.
pub fn squarefree<F: Field>(p: &Poly<F>) -> Poly<F> {
    let g = gcd(p, &derivative(p));
    monic(divmod(p, &g).0)
}

/// Complex roots `(re, im)` of a polynomial from its companion matrix.
pub fn float_roots<F: Field>(p: &Poly<F>) -> Vec<(f64, f64)> {
    let p = monic(trim(p.clone()));
    let d = p.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    let companion = DMatrix::<f64>::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -p[i].to_f64()
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    if companion.iter().any(|x| !x.is_finite()) {
        return Vec::new();
    }
    // Bounded QR iteration: an unconverged Schur form yields no roots, which
    // callers treat as "no certified factor".
    match Schur::try_new(companion, f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect(),
        None => Vec::new(),
    }
}

/// Bits of precision reached by the Newton refinement.
const REFINE_BITS: u32 = 1536;

/// Exact rational root of `p` near `approx`, for roots whose denominator
/// has at most about half of [`REFINE_BITS`] bits.
fn refine_rational_root(p: &[Q], approx: f64) -> Option<Q> {
    let dp = derivative(&p.to_vec());
    let mut x = Q::from_float(approx)?;
    let mut bits = 64u32;
    while bits < REFINE_BITS {
        bits = (bits * 2).min(REFINE_BITS);
        let slope = eval(&dp, &x);
        if Zero::is_zero(&slope) {
            return None;
        }
        x = &x - eval(&p.to_vec(), &x) / slope;
        // Round to a dyadic so the operands stay small.
        let scale = Q::from_integer(BigInt::one() << bits);
        x = (&x * &scale).round() / scale;
    }
    let radius = Q::new(BigInt::one(), BigInt::one() << (REFINE_BITS - 32));
    let r = simplest_between(&(&x - &radius), &(&x + &radius));
    Zero::is_zero(&eval(&p.to_vec(), &r)).then_some(r)
}

/// Monic factors of `p` that are products of `(t − λ)` for real eigenvalue
/// clusters or of `(t² − 2 Re z t + |z|²)` for conjugate pairs, each kept
/// only when it divides `p` (exactly, for exact fields).
pub fn rational_factors<F: Field>(p: &Poly<F>) -> Vec<Poly<F>> {
    let p = trim(p.clone());
    let Some(d) = degree(&p) else { return Vec::new() };
    if d == 0 {
        return Vec::new();
    }
    let base = if F::EXACT { squarefree(&p) } else { monic(p.clone()) };
    let roots = float_roots(&base);
    let scale = roots.iter().map(|(re, im)| re.hypot(*im)).fold(1.0, f64::max);
    let mut out: Vec<Poly<F>> = Vec::new();
    let mut push = |f: Poly<F>| {
        if out.iter().any(|g| g == &f) {
            return;
        }
        let divides = if F::EXACT {
            divmod(&base, &f).1.is_empty()
        } else {
            true
        };
        if divides {
            out.push(f);
        }
    };
    let real_tol = 1e-7 * scale;
    for &(re, im) in &roots {
        if im.abs() <= real_tol {
            let snapped = F::snap(re).filter(|l| eval(&base, l).is_zero());
            let exact = || {
                let q: Option<Vec<Q>> = base.iter().map(F::to_rational).collect();
                refine_rational_root(&q?, re).map(|r| F::from_rational(&r))
            };
            let lambda = if F::EXACT { snapped.or_else(exact) } else { F::snap(re) };
            if let Some(lambda) = lambda {
                push(vec![lambda.neg(), F::one()]);
            }
        } else if im > 0.0 {
            if let (Some(b), Some(c)) = (F::snap(-2.0 * re), F::snap(re * re + im * im)) {
                push(vec![c, b, F::one()]);
            }
        }
    }
    if !F::EXACT {
        // Merge float clusters: drop near-duplicates of earlier linear factors.
        let mut merged: Vec<Poly<F>> = Vec::new();
        for f in out {
            let dup = merged.iter().any(|g| {
                g.len() == f.len() && g.iter().zip(&f).all(|(a, b)| (a.to_f64() - b.to_f64()).abs() <= 1e-6 * scale)
            });
            if !dup {
                merged.push(f);
            }
        }
        return merged;
    }
    out
}

/// Real eigenvalues found by [`rational_factors`].
pub fn real_eigenvalues<F: Field>(m: &Matrix<F>) -> Vec<F> {
    rational_factors(&char_poly(m)).into_iter().filter(|f| f.len() == 2).map(|f| f[0].neg()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Q, R64};

    fn qp(c: &[i64]) -> Poly<Q> {
        c.iter().map(|&x| Q::from_i64(x)).collect()
    }

    #[test]
    fn recovers_roots_with_large_denominators() {
        // (t - a)(t - b) with denominators far beyond the snap limit.
        let a = Q::new(BigInt::from(987_654_321i64), BigInt::from(123_456_791i64));
        let b = Q::new(BigInt::from(-55_555_557i64), BigInt::from(77_777_777i64));
        let p = vec![a.mul(&b), a.add(&b).neg(), <Q as Field>::one()];
        let mut roots = real_eigenvalues(&Matrix::from_rows(vec![vec![a.clone(), <Q as Field>::zero()], vec![<Q as Field>::one(), b.clone()]]));
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(roots, vec![b.clone(), a.clone()]);
        assert_eq!(rational_factors(&p).len(), 2);
    }

    #[test]
    fn char_poly_of_companion() {
        let m = Matrix::<Q>::from_i64(&[&[2, 1], &[0, 3]]);
        assert_eq!(char_poly(&m), qp(&[6, -5, 1]));
    }

    #[test]
    fn gcd_and_squarefree() {
        // (t-1)^2 (t+2)
        let p = qp(&[2, -3, 0, 1]);
        assert_eq!(squarefree(&p), qp(&[-2, 1, 1]));
        assert_eq!(gcd(&p, &qp(&[-1, 1])), qp(&[-1, 1]));
    }

    #[test]
    fn rational_eigenvalues_with_multiplicity() {
        let m = Matrix::<Q>::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, -2]]);
        let mut ev: Vec<f64> = real_eigenvalues(&m).iter().map(|x| x.to_f64()).collect();
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![-2.0, 1.0]);
        let mf = m.map(|x| R64(x.to_f64()));
        assert_eq!(real_eigenvalues(&mf).len(), 2);
    }

    #[test]
    fn quadratic_factor_for_rotation() {
        let m = Matrix::<Q>::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(rational_factors(&char_poly(&m)), vec![qp(&[1, 0, 1])]);
    }
}
