//! Point jets: frames, second fundamental form, mean curvature and the
//! shape family of an immersion at one parameter point.
//!
//! The tangent frame is Gram-Schmidt applied to the coordinate vectors
//! `∂_i X`. Normal candidates are the coordinate axes projected off the
//! tangent space; the timelike candidate is processed first and the
//! spacelike ones are taken greedily by length. The normal frame is returned
//! in the adapted order `(v, e_1..e_q, w)` with `⟨v, w⟩ = 1`.

use nalgebra::DMatrix;

use super::immersion::{minkowski, Immersion, Jet2};
use crate::curvature::ShapeFamily;
use crate::error::{Error, Result};
use crate::field::R64;
use crate::linalg::Matrix;
use crate::pseudo_euclidean::SignatureSpace;

/// Relative threshold below which a Gram-Schmidt residual counts as zero.
const GS_EPS: f64 = 1e-10;

/// Relative tolerance for accepting a null normal hint.
const HINT_TOL: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct PointJet {
    pub parameter: Vec<f64>,
    pub point: Vec<f64>,
    /// `∂_i X`.
    pub coordinate_tangents: Vec<Vec<f64>>,
    /// Induced metric `g_ij = ⟨∂_i X, ∂_j X⟩`.
    pub metric: Vec<Vec<f64>>,
    /// Orthonormal tangent frame `E_a = Σ_i C[a][i] ∂_i X`.
    pub tangent: Vec<Vec<f64>>,
    pub frame_coeffs: Vec<Vec<f64>>,
    /// Normal frame in the adapted order `(v, e_1..e_q, w)`.
    pub normal: Vec<Vec<f64>>,
    pub space: SignatureSpace,
    /// `Π(E_a, E_b)` as ambient vectors.
    pub second_fundamental_form: Vec<Vec<Vec<f64>>>,
    pub mean_curvature: Vec<f64>,
    /// Shape operators of the normal frame vectors.
    pub shapes: ShapeFamily<R64>,
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn scaled(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| a * xi).collect()
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, xi| m.max(xi.abs()))
}

fn unit_axis(n: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    e
}

/// Orthonormal frame of the span of `vectors` (all spacelike) with the
/// coefficients expressing it in terms of `vectors`.
pub(crate) fn tangent_frame(vectors: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let d = vectors.len();
    let scale = vectors.iter().map(|x| minkowski(x, x).abs()).fold(0.0, f64::max);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (i, x) in vectors.iter().enumerate() {
        let mut y = x.clone();
        let mut c = vec![0.0; d];
        c[i] = 1.0;
        for (e, ce) in frame.iter().zip(&coeffs) {
            let t = minkowski(x, e);
            axpy(&mut y, -t, e);
            axpy(&mut c, -t, ce);
        }
        let nn = minkowski(&y, &y);
        if !(nn > GS_EPS * scale) {
            return Err(Error::DegenerateMetric);
        }
        let s = nn.sqrt();
        frame.push(scaled(1.0 / s, &y));
        coeffs.push(scaled(1.0 / s, &c));
    }
    Ok((frame, coeffs))
}

/// Component of `y` orthogonal to the orthonormal spacelike `frame`.
pub(crate) fn normal_part(y: &[f64], frame: &[Vec<f64>]) -> Vec<f64> {
    let mut out = y.to_vec();
    for e in frame {
        axpy(&mut out, -minkowski(y, e), e);
    }
    out
}

/// Picks spacelike unit vectors from `candidates` greedily by length after
/// removing their components along `fixed` (pairs `(vector, dual)` with
/// `y ↦ y − ⟨y, dual⟩ vector`) and along already chosen vectors.
fn greedy_spacelike(candidates: &[Vec<f64>], fixed: &[(Vec<f64>, Vec<f64>)], count: usize) -> Result<Vec<Vec<f64>>> {
    let scale = candidates.iter().map(|c| max_abs(c)).fold(1.0, f64::max);
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut used = vec![false; candidates.len()];
    for _ in 0..count {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (k, y) in candidates.iter().enumerate() {
            if used[k] {
                continue;
            }
            let mut r = y.clone();
            for (vec, dual) in fixed {
                axpy(&mut r, -minkowski(y, dual), vec);
            }
            for s in &chosen {
                let t = minkowski(&r, s);
                axpy(&mut r, -t, s);
            }
            let nn = minkowski(&r, &r);
            if best.as_ref().is_none_or(|b| nn > b.2) {
                best = Some((k, r, nn));
            }
        }
        match best {
            Some((k, r, nn)) if nn > GS_EPS * scale * scale => {
                used[k] = true;
                chosen.push(scaled(1.0 / nn.sqrt(), &r));
            }
            _ => return Err(Error::Internal("normal frame construction lost rank".into())),
        }
    }
    Ok(chosen)
}

/// Adapted normal frame `(v, e_1..e_q, w)` at a point with orthonormal
/// tangent frame `tangent`. A null normal `hint` becomes `v` when given.
pub(crate) fn normal_frame(tangent: &[Vec<f64>], ambient: usize, hint: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
    let n = ambient + 1;
    let d = tangent.len();
    if n < d + 2 {
        return Err(Error::Input("normal space must have dimension at least 2".into()));
    }
    let candidates: Vec<Vec<f64>> = (0..n).map(|k| normal_part(&unit_axis(n, k), tangent)).collect();
    let t0 = &candidates[0];
    let s = -minkowski(t0, t0);
    if !(s > GS_EPS) {
        return Err(Error::DegenerateMetric);
    }
    let n0 = scaled(1.0 / s.sqrt(), t0);
    let (v, w, screen) = match hint {
        Some(hint) => {
            let size = max_abs(hint);
            if size == 0.0 {
                return Err(Error::Input("null normal hint is zero".into()));
            }
            let off_normal = tangent.iter().map(|e| minkowski(hint, e).abs()).fold(0.0, f64::max);
            let nn = minkowski(hint, hint).abs();
            if off_normal > HINT_TOL * size || nn > HINT_TOL * size * size {
                return Err(Error::Input("hint is not a null normal vector".into()));
            }
            // Remove the residual tangential part and rescale the spacelike
            // part against n0 so the vector is null to rounding.
            let normal = normal_part(hint, tangent);
            let a = -minkowski(&normal, &n0);
            let mut spatial = normal.clone();
            axpy(&mut spatial, -a, &n0);
            let s_len = minkowski(&spatial, &spatial).max(0.0).sqrt();
            let ell: Vec<f64> = if s_len > 0.0 {
                let mut out = scaled(a, &n0);
                axpy(&mut out, a.abs() / s_len, &spatial);
                out
            } else {
                normal
            };
            let ell = ell.as_slice();
            let pair = minkowski(ell, &n0);
            let wp = scaled(1.0 / pair, &n0);
            let mut w = wp.clone();
            axpy(&mut w, -0.5 * minkowski(&wp, &wp), ell);
            let v = ell.to_vec();
            let screen = greedy_spacelike(&candidates, &[(v.clone(), w.clone()), (w.clone(), v.clone())], n - d - 2)?;
            (v, w, screen)
        }
        None => {
            let neg_n0 = scaled(-1.0, &n0);
            let spacelike = greedy_spacelike(&candidates[1..], &[(n0.clone(), neg_n0)], n - d - 1)?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let s0 = &spacelike[0];
            let v: Vec<f64> = n0.iter().zip(s0).map(|(a, b)| h * (a + b)).collect();
            let w: Vec<f64> = n0.iter().zip(s0).map(|(a, b)| h * (b - a)).collect();
            (v, w, spacelike[1..].to_vec())
        }
    };
    let mut frame = vec![v];
    frame.extend(screen);
    frame.push(w);
    Ok(frame)
}

impl PointJet {
    pub fn tangent_dim(&self) -> usize {
        self.tangent.len()
    }

    /// `A_ξ` in the orthonormal tangent frame for an ambient normal vector.
    pub fn shape_operator(&self, xi: &[f64]) -> Vec<Vec<f64>> {
        self.second_fundamental_form.iter().map(|row| row.iter().map(|p| minkowski(p, xi)).collect()).collect()
    }

    /// Shape family of an arbitrary normal frame expressed in `space`'s
    /// adapted order.
    pub fn shapes_in_frame(&self, space: SignatureSpace, frame: &[Vec<f64>]) -> Result<ShapeFamily<R64>> {
        if frame.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: frame.len() });
        }
        let d = self.tangent_dim();
        let ops = frame
            .iter()
            .map(|xi| {
                let a = self.shape_operator(xi);
                Matrix::from_fn(d, d, |i, j| R64(0.5 * (a[i][j] + a[j][i])))
            })
            .collect();
        ShapeFamily::new(space, d, ops)
    }

    /// `A_H` in the orthonormal tangent frame.
    pub fn mean_curvature_operator(&self) -> Vec<Vec<f64>> {
        self.shape_operator(&self.mean_curvature)
    }

    /// Eigenvalues of `A_H`, ascending.
    pub fn mean_curvature_spectrum(&self) -> Vec<f64> {
        symmetric_eigenvalues(&self.mean_curvature_operator())
    }

    /// Coordinates of an ambient normal vector in the adapted normal frame.
    pub fn normal_coordinates(&self, xi: &[f64]) -> Vec<f64> {
        let gram = self.space.gram::<R64>();
        let pairings: Vec<f64> = self.normal.iter().map(|b| minkowski(b, xi)).collect();
        // The adapted gram is its own inverse.
        (0..gram.rows()).map(|i| (0..gram.cols()).map(|j| gram.get(i, j).0 * pairings[j]).sum()).collect()
    }
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let d = a.len();
    let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (a[i][j] + a[j][i]));
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Jet of `imm` at `u` with the configured derivative mode.
pub fn point_jet(imm: &Immersion, u: &[f64]) -> Result<PointJet> {
    point_jet_with(imm, u, None)
}

/// Jet of `imm` at `u`, using the null normal `hint` (if any) as `v`.
pub fn point_jet_with(imm: &Immersion, u: &[f64], hint: Option<&[f64]>) -> Result<PointJet> {
    jet_from_derivatives(imm, u, imm.jet2(u)?, hint)
}

pub(crate) fn jet_from_derivatives(imm: &Immersion, u: &[f64], j: Jet2, hint: Option<&[f64]>) -> Result<PointJet> {
    let d = imm.parameter_dim;
    let metric: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|k| minkowski(&j.first[i], &j.first[k])).collect()).collect();
    let (tangent, frame_coeffs) = tangent_frame(&j.first)?;
    let normal = normal_frame(&tangent, imm.ambient_dim, hint)?;
    let space = SignatureSpace::lorentzian(normal.len() - 2);
    let n = imm.ambient_dim + 1;
    // Π(∂_i, ∂_k) is the normal part of ∂_i ∂_k X.
    let pi_coord: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|k| {
                    let sym: Vec<f64> = (0..n).map(|c| 0.5 * (j.second[i][k][c] + j.second[k][i][c])).collect();
                    normal_part(&sym, &tangent)
                })
                .collect()
        })
        .collect();
    let pi: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    let mut out = vec![0.0; n];
                    for i in 0..d {
                        for k in 0..d {
                            axpy(&mut out, frame_coeffs[a][i] * frame_coeffs[b][k], &pi_coord[i][k]);
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let mut mean_curvature = vec![0.0; n];
    for (a, row) in pi.iter().enumerate() {
        axpy(&mut mean_curvature, 1.0 / d as f64, &row[a]);
    }
    let mut jet = PointJet {
        parameter: u.to_vec(),
        point: j.value,
        coordinate_tangents: j.first,
        metric,
        tangent,
        frame_coeffs,
        normal,
        space,
        second_fundamental_form: pi,
        mean_curvature,
        shapes: ShapeFamily::zero(space, d),
    };
    jet.shapes = jet.shapes_in_frame(space, &jet.normal.clone())?;
    Ok(jet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::immersion::Derivatives;

    #[test]
    fn flat_plane_has_vanishing_second_fundamental_form() {
        let imm = Immersion::flat(2, 3).unwrap();
        let jet = point_jet(&imm, &[0.3, -0.2]).unwrap();
        assert!(jet.second_fundamental_form.iter().flatten().flatten().all(|x| x.abs() < 1e-9));
        assert_eq!(jet.space, SignatureSpace::lorentzian(0));
    }

    #[test]
    fn normal_frame_is_adapted() {
        let imm = Immersion::veronese().unwrap().with_derivatives(Derivatives::Automatic);
        let jet = point_jet(&imm, &[1.0, 0.4]).unwrap();
        let g = jet.space.gram::<R64>();
        for (i, a) in jet.normal.iter().enumerate() {
            for (k, b) in jet.normal.iter().enumerate() {
                assert!((minkowski(a, b) - g.get(i, k).0).abs() < 1e-12);
            }
            for t in &jet.tangent {
                assert!(minkowski(a, t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hint_becomes_first_vector() {
        let imm = Immersion::light_cone_sphere(2).unwrap();
        let u = [0.8, 2.0];
        let x = imm.point(&u);
        let jet = point_jet_with(&imm, &u, Some(&x)).unwrap();
        assert!(jet.normal[0].iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!((minkowski(&jet.normal[0], jet.normal.last().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn timelike_immersions_are_rejected() {
        let imm = Immersion::flat(1, 2).unwrap();
        let mut imm = imm;
        imm.family = crate::geometry::Family::Affine { origin: vec![0.0; 3], directions: vec![vec![1.0, 0.0, 0.0]] };
        assert!(matches!(point_jet(&imm, &[0.0]), Err(Error::DegenerateMetric)));
    }
}
