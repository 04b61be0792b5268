//! Checks for light-cone submanifolds, parallel second fundamental form and
//! the mean curvature of extrinsically symmetric pieces.

use super::immersion::{minkowski, Immersion};
use super::jet::{normal_part, point_jet, point_jet_with, symmetric_eigenvalues, PointJet};
use super::transport::{parallel_transport, Loop};
use crate::error::{Error, Result};

/// Tolerance on `⟨V, V⟩` for a point to count as lying on the light cone.
pub const CONE_TOL: f64 = 1e-9;

/// Step used to differentiate the second fundamental form along the
/// manifold.
pub const PI_STEP: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSample {
    pub parameter: Vec<f64>,
    /// `⟨V, V⟩` for the position vector `V`.
    pub norm_sq: f64,
    /// `max |A_V + id|`.
    pub shape_defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeLoop {
    /// `max |τ(V) − V|` in the adapted coordinates of the loop's base point.
    pub residual: f64,
    /// Gram residual of the whole transport.
    pub gram_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightConeReport {
    pub samples: Vec<ConeSample>,
    pub loops: Vec<ConeLoop>,
    pub max_norm_sq: f64,
    pub max_shape_defect: f64,
    pub max_transport_residual: f64,
}

impl LightConeReport {
    pub fn passes(&self, shape_tol: f64, transport_tol: f64) -> bool {
        self.max_norm_sq <= CONE_TOL && self.max_shape_defect <= shape_tol && self.max_transport_residual <= transport_tol
    }
}

fn cone_point(imm: &Immersion, u: &[f64]) -> Result<Vec<f64>> {
    let v = imm.point(u);
    let nn = minkowski(&v, &v);
    let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if nn.abs() > CONE_TOL * scale * scale {
        return Err(Error::NotOnCone(nn));
    }
    Ok(v)
}

/// Jet at `u` whose adapted frame starts with the position vector.
pub fn cone_jet(imm: &Immersion, u: &[f64]) -> Result<PointJet> {
    let v = cone_point(imm, u)?;
    point_jet_with(imm, u, Some(&v))
}

/// Verifies `⟨V, V⟩ = 0`, `A_V = −id` at the samples and `∇⊥V = 0` by
/// transporting `V` around the loops (each starting at its first vertex).
pub fn light_cone_check(imm: &Immersion, samples: &[Vec<f64>], loops: &[Loop], steps: usize) -> Result<LightConeReport> {
    let mut out = Vec::with_capacity(samples.len());
    for u in samples {
        let jet = cone_jet(imm, u)?;
        let v = &jet.normal[0];
        let a = jet.shape_operator(v);
        let defect = a
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(k, x)| (x + if i == k { 1.0 } else { 0.0 }).abs()))
            .fold(0.0, f64::max);
        out.push(ConeSample { parameter: u.clone(), norm_sq: minkowski(v, v), shape_defect: defect });
    }
    let mut loop_reports = Vec::with_capacity(loops.len());
    for l in loops {
        let start = l.vertices.first().ok_or_else(|| Error::Input("empty loop".into()))?;
        let base = cone_jet(imm, start)?;
        let t = parallel_transport(imm, &base, l, steps)?;
        // V is the first adapted vector, so τ(V) should be the first unit vector.
        let residual = (0..base.space.dim())
            .map(|b| (t.tau.get(b, 0).0 - if b == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        loop_reports.push(ConeLoop { residual, gram_residual: t.residual });
    }
    Ok(LightConeReport {
        max_norm_sq: out.iter().map(|s| s.norm_sq.abs()).fold(0.0, f64::max),
        max_shape_defect: out.iter().map(|s| s.shape_defect).fold(0.0, f64::max),
        max_transport_residual: loop_reports.iter().map(|l| l.residual).fold(0.0, f64::max),
        samples: out,
        loops: loop_reports,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiSample {
    pub parameter: Vec<f64>,
    /// `max |⟨(∇⊥Π)(E_a, E_b, E_c), ξ_k⟩|` over the frames.
    pub residual: f64,
    /// Eigenvalues of `A_H`, ascending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParallelPiReport {
    pub samples: Vec<PiSample>,
    pub max_residual: f64,
    /// Largest variation of a sorted eigenvalue across samples.
    pub spread: f64,
    /// Distinct eigenvalues of `A_H` at the first sample (clusters within
    /// the tolerance merged).
    pub distinct_eigenvalues: Vec<f64>,
    /// Multiplicities of the distinct eigenvalues.
    pub multiplicities: Vec<usize>,
    pub parallel: bool,
    pub constant: bool,
}

/// `Π(∂_i, ∂_k)` at `u` as ambient vectors, with the tangent frame.
fn coordinate_pi(imm: &Immersion, u: &[f64]) -> Result<(Vec<Vec<Vec<f64>>>, PointJet)> {
    let j = imm.jet2_exact(u)?;
    let jet = super::jet::jet_from_derivatives(imm, u, j.clone(), None)?;
    let d = imm.parameter_dim;
    let pi = (0..d).map(|i| (0..d).map(|k| normal_part(&j.second[i][k], &jet.tangent)).collect()).collect();
    Ok((pi, jet))
}

/// `∇⊥Π` residual at one point, measured in orthonormal tangent and
/// adapted normal frames.
pub fn parallel_pi_residual(imm: &Immersion, u: &[f64]) -> Result<f64> {
    let d = imm.parameter_dim;
    let (pi, jet) = coordinate_pi(imm, u)?;
    let j = imm.jet2_exact(u)?;
    // Christoffel symbols Γ^l_{ki} = g^{lm} ⟨∂_k ∂_i X, ∂_m X⟩.
    let g = nalgebra::DMatrix::from_fn(d, d, |a, b| jet.metric[a][b]);
    let ginv = g.try_inverse().ok_or(Error::DegenerateMetric)?;
    let gamma = |l: usize, k: usize, i: usize| -> f64 {
        (0..d).map(|m| ginv[(l, m)] * minkowski(&j.second[k][i], &j.first[m])).sum()
    };
    let n = jet.point.len();
    // (∇⊥_k Π)_{ik'} in coordinates.
    let mut nabla = vec![vec![vec![vec![0.0; n]; d]; d]; d];
    for k in 0..d {
        let mut up = u.to_vec();
        let mut down = u.to_vec();
        up[k] += PI_STEP;
        down[k] -= PI_STEP;
        let (pu, _) = coordinate_pi(imm, &up)?;
        let (pd, _) = coordinate_pi(imm, &down)?;
        for i in 0..d {
            for i2 in 0..d {
                let diff: Vec<f64> = pu[i][i2].iter().zip(&pd[i][i2]).map(|(a, b)| (a - b) / (2.0 * PI_STEP)).collect();
                let mut val = normal_part(&diff, &jet.tangent);
                for l in 0..d {
                    let (g1, g2) = (gamma(l, k, i), gamma(l, k, i2));
                    for c in 0..n {
                        val[c] -= g1 * pi[l][i2][c] + g2 * pi[i][l][c];
                    }
                }
                nabla[k][i][i2] = val;
            }
        }
    }
    let c = &jet.frame_coeffs;
    let mut worst = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for e in 0..d {
                let mut v = vec![0.0; n];
                for k in 0..d {
                    for i in 0..d {
                        for i2 in 0..d {
                            let w = c[a][k] * c[b][i] * c[e][i2];
                            if w != 0.0 {
                                for (vc, nc) in v.iter_mut().zip(&nabla[k][i][i2]) {
                                    *vc += w * nc;
                                }
                            }
                        }
                    }
                }
                for xi in &jet.normal {
                    worst = worst.max(minkowski(&v, xi).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Groups sorted values into clusters of width at most `tol`.
pub fn cluster(values: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>) {
    let mut reps: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut start = f64::NAN;
    for &x in values {
        if reps.is_empty() || x - start > tol {
            reps.push(x);
            counts.push(1);
            start = x;
        } else {
            *counts.last_mut().unwrap() += 1;
        }
    }
    (reps, counts)
}

/// `∇⊥Π` residual and the spectrum of `A_H` at every sample.
pub fn parallel_pi_check(imm: &Immersion, samples: &[Vec<f64>], tol: f64) -> Result<ParallelPiReport> {
    if samples.is_empty() {
        return Err(Error::Input("parallel check needs at least one sample".into()));
    }
    let mut out = Vec::with_capacity(samples.len());
    for u in samples {
        let jet = point_jet(imm, u)?;
        out.push(PiSample { parameter: u.clone(), residual: parallel_pi_residual(imm, u)?, eigenvalues: jet.mean_curvature_spectrum() });
    }
    let first = &out[0].eigenvalues;
    let spread = out
        .iter()
        .flat_map(|s| s.eigenvalues.iter().zip(first).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let max_residual = out.iter().map(|s| s.residual).fold(0.0, f64::max);
    let (distinct_eigenvalues, multiplicities) = cluster(first, tol.max(spread));
    Ok(ParallelPiReport {
        parallel: max_residual <= tol,
        constant: spread <= tol,
        distinct_eigenvalues,
        multiplicities,
        max_residual,
        spread,
        samples: out,
    })
}

/// Mean curvature consistency: if `A_H = λ·id` then `λ = ⟨H, H⟩`, so a
/// nonzero lightlike `H` forces `A_H = 0`, which a full immersion cannot
/// have.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurvatureCase {
    pub norm_sq: f64,
    pub lightlike: bool,
    /// Largest entry of `A_H − (Tr A_H / dim M)·id`.
    pub umbilic_defect: f64,
    /// `Tr A_H / dim M`.
    pub trace_lambda: f64,
    /// Largest entry of `A_H`.
    pub shape_norm: f64,
    /// `H ≠ 0` lightlike: `A_H = λ·id` would force `λ = 0` and `A_H = 0`,
    /// contradicting fullness.
    pub contradiction: bool,
}

/// Evaluates the mean curvature case analysis for `h` (ambient normal vector;
/// the jet's own mean curvature when `None`).
pub fn mean_curvature_case(jet: &PointJet, h: Option<&[f64]>, tol: f64) -> MeanCurvatureCase {
    let h = h.unwrap_or(&jet.mean_curvature);
    let d = jet.tangent_dim();
    let a = jet.shape_operator(h);
    let trace_lambda = (0..d).map(|i| a[i][i]).sum::<f64>() / d as f64;
    let umbilic_defect = a
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(k, x)| (x - if i == k { trace_lambda } else { 0.0 }).abs()))
        .fold(0.0, f64::max);
    let shape_norm = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let norm_sq = minkowski(h, h);
    let size = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lightlike = size > tol && norm_sq.abs() <= tol * size * size.max(1.0);
    MeanCurvatureCase { norm_sq, lightlike, umbilic_defect, trace_lambda, shape_norm, contradiction: lightlike }
}

/// Spectrum of `A_H` at a point.
pub fn mean_curvature_spectrum(imm: &Immersion, u: &[f64]) -> Result<Vec<f64>> {
    Ok(symmetric_eigenvalues(&point_jet(imm, u)?.mean_curvature_operator()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::immersion::{Derivatives, Family};
    use crate::geometry::Expr;

    #[test]
    fn round_sphere_is_parallel_with_one_eigenvalue() {
        let imm = Immersion::sphere(2, 2.0).unwrap().with_derivatives(Derivatives::Automatic);
        let samples = vec![vec![0.7, 0.1], vec![1.2, 2.0], vec![2.0, -1.0]];
        let r = parallel_pi_check(&imm, &samples, 1e-6).unwrap();
        assert!(r.parallel, "{}", r.max_residual);
        assert!(r.constant);
        assert_eq!(r.distinct_eigenvalues.len(), 1);
        assert!((r.distinct_eigenvalues[0] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn translated_cone_is_rejected() {
        let imm = Immersion::new(Family::LightConeSection {
            dim: 2,
            scale: Expr::Const(1.0),
            direction: None,
            origin: Some(vec![0.5, 0.0, 0.0, 0.0]),
        })
        .unwrap();
        assert!(matches!(light_cone_check(&imm, &[vec![1.0, 1.0]], &[], 64), Err(Error::NotOnCone(_))));
    }

    #[test]
    fn lightlike_mean_curvature_is_flagged() {
        let imm = Immersion::light_cone_sphere(2).unwrap();
        let jet = cone_jet(&imm, &[1.0, 0.5]).unwrap();
        let own = mean_curvature_case(&jet, None, 1e-9);
        assert!(!own.lightlike && !own.contradiction);
        let injected = mean_curvature_case(&jet, Some(&jet.normal[0]), 1e-9);
        assert!(injected.lightlike && injected.contradiction);
    }
}
