//! Parallel transport in the normal bundle along piecewise linear paths in
//! parameter space.
//!
//! A normal field `ξ` along `γ` is `∇⊥`-parallel when `ξ'` is tangent, and
//! since `⟨ξ, ∂_i X⟩ = 0` this gives
//! `ξ' = −Σ g^{ij} ⟨ξ, ∂_j ∂_k X⟩ γ'^k ∂_i X`.
//! The equation is integrated for all frame vectors at once with the
//! classical four-stage Runge-Kutta scheme at a fixed step. Derivatives of
//! the evaluator come from automatic differentiation.

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

use super::immersion::{minkowski, number_list, Immersion};
use super::jet::PointJet;
use crate::error::{Error, Result};
use crate::field::R64;
use crate::linalg::Matrix;

/// Default number of integration steps per loop.
pub const DEFAULT_STEPS: usize = 512;

/// Closed piecewise linear path in parameter space. The image of the first
/// and last vertex must coincide; the parameters themselves may differ (for
/// example by a period).
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    pub vertices: Vec<Vec<f64>>,
}

impl Loop {
    pub fn new(vertices: Vec<Vec<f64>>) -> Self {
        Loop { vertices }
    }

    /// Accepts either a list of points or `{"vertices": [...]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let list = match v {
            Value::Object(m) => m.get("vertices").ok_or_else(|| Error::Input("loop needs \"vertices\"".into()))?,
            other => other,
        };
        let vertices = list
            .as_array()
            .ok_or_else(|| Error::Input("loop vertices must be a list".into()))?
            .iter()
            .map(|p| number_list(p, "loop vertex"))
            .collect::<Result<Vec<_>>>()?;
        if vertices.len() < 2 {
            return Err(Error::Input("loop needs at least two vertices".into()));
        }
        Ok(Loop { vertices })
    }

    pub fn segments(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct TransportResult {
    pub path: Loop,
    /// Total number of integration steps.
    pub steps: usize,
    /// Transport on the normal fiber in the adapted frame of the base point:
    /// column `a` holds the coordinates of the transported `ξ_a`.
    pub tau: Matrix<R64>,
    /// `max |τᵀ G τ − G|`.
    pub residual: f64,
    /// Largest tangential component of a transported vector at the end.
    pub normal_leak: f64,
    /// Transported frame at every vertex (ambient vectors).
    pub vertex_frames: Vec<Vec<Vec<f64>>>,
}

impl TransportResult {
    /// Transported frame at the end of the path.
    pub fn frame(&self) -> &[Vec<f64>] {
        self.vertex_frames.last().expect("path has vertices")
    }
}

struct Field1 {
    tangents: Vec<Vec<f64>>,
    second: Vec<Vec<Vec<f64>>>,
    ginv: DMatrix<f64>,
}

fn field_at(imm: &Immersion, u: &[f64]) -> Result<Field1> {
    let j = imm.jet2_exact(u)?;
    let d = imm.parameter_dim;
    let g = DMatrix::from_fn(d, d, |i, k| minkowski(&j.first[i], &j.first[k]));
    let chol = g.cholesky().ok_or(Error::DegenerateMetric)?;
    Ok(Field1 { ginv: chol.inverse(), tangents: j.first, second: j.second })
}

/// `ξ'` for every frame vector at a point, for velocity `vel`.
fn rhs(f: &Field1, vel: &[f64], frame: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = vel.len();
    // Directional second derivative Σ_k ∂_j ∂_k X γ'^k for each j.
    let dir: Vec<Vec<f64>> = (0..d)
        .map(|jx| {
            let n = f.tangents[0].len();
            (0..n).map(|c| (0..d).map(|k| f.second[jx][k][c] * vel[k]).sum()).collect()
        })
        .collect();
    frame
        .iter()
        .map(|xi| {
            let b = DVector::from_iterator(d, dir.iter().map(|dj| minkowski(xi, dj)));
            let c = &f.ginv * b;
            let mut out = vec![0.0; xi.len()];
            for (i, t) in f.tangents.iter().enumerate() {
                for (o, ti) in out.iter_mut().zip(t) {
                    *o -= c[i] * ti;
                }
            }
            out
        })
        .collect()
}

fn combine(base: &[Vec<f64>], k: &[Vec<f64>], s: f64) -> Vec<Vec<f64>> {
    base.iter().zip(k).map(|(b, kk)| b.iter().zip(kk).map(|(x, y)| x + s * y).collect()).collect()
}

/// Transports `frame` along the polyline `path`, returning the frame at each
/// vertex. Each segment is integrated with `steps_per_segment` RK4 steps.
pub fn transport_along(imm: &Immersion, frame: &[Vec<f64>], path: &[Vec<f64>], steps_per_segment: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut current = frame.to_vec();
    let mut out = vec![current.clone()];
    for seg in path.windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        if a.len() != imm.parameter_dim || b.len() != imm.parameter_dim {
            return Err(Error::DimensionMismatch { expected: imm.parameter_dim, got: a.len().min(b.len()) });
        }
        let vel: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let dt = 1.0 / steps_per_segment as f64;
        let at = |t: f64| -> Vec<f64> { a.iter().zip(&vel).map(|(x, v)| x + t * v).collect() };
        let mut next_field = field_at(imm, &at(0.0))?;
        for s in 0..steps_per_segment {
            let t = s as f64 * dt;
            let f0 = next_field;
            let fm = field_at(imm, &at(t + 0.5 * dt))?;
            next_field = field_at(imm, &at(t + dt))?;
            let k1 = rhs(&f0, &vel, &current);
            let k2 = rhs(&fm, &vel, &combine(&current, &k1, 0.5 * dt));
            let k3 = rhs(&fm, &vel, &combine(&current, &k2, 0.5 * dt));
            let k4 = rhs(&next_field, &vel, &combine(&current, &k3, dt));
            for (i, xi) in current.iter_mut().enumerate() {
                for c in 0..xi.len() {
                    xi[c] += dt / 6.0 * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]);
                }
            }
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// Transport of the normal frame of `base` around `path`, which must start
/// at `base`'s parameter point and close up in the image.
pub fn parallel_transport(imm: &Immersion, base: &PointJet, path: &Loop, steps: usize) -> Result<TransportResult> {
    if steps < 8 {
        return Err(Error::Input("transport needs at least 8 steps".into()));
    }
    if path.vertices.len() < 2 {
        return Err(Error::Input("loop needs at least two vertices".into()));
    }
    let start = imm.point(&path.vertices[0]);
    let end = imm.point(path.vertices.last().unwrap());
    let size = 1.0 + start.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = start.iter().zip(&end).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if gap > 1e-9 * size {
        return Err(Error::OpenLoop(gap));
    }
    let base_gap = start.iter().zip(&base.point).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if base_gap > 1e-9 * size {
        return Err(Error::Input("loop does not start at the base point".into()));
    }
    let per_segment = steps.div_ceil(path.segments());
    let vertex_frames = transport_along(imm, &base.normal, &path.vertices, per_segment)?;
    let end_frame = vertex_frames.last().unwrap();
    let n = base.normal.len();
    let gram = base.space.gram::<R64>();
    // G is its own inverse in the adapted basis.
    let tau = Matrix::from_fn(n, n, |b, a| {
        R64((0..n).map(|c| gram.get(b, c).0 * minkowski(&base.normal[c], &end_frame[a])).sum())
    });
    let check = tau.transpose().mul(&gram).mul(&tau).sub(&gram);
    let residual = check.max_abs();
    let normal_leak = end_frame
        .iter()
        .flat_map(|xi| base.tangent.iter().map(move |e| minkowski(xi, e).abs()))
        .fold(0.0, f64::max);
    Ok(TransportResult { path: path.clone(), steps: per_segment * path.segments(), tau, residual, normal_leak, vertex_frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::jet::point_jet;
    use crate::linalg::Matrix;

    #[test]
    fn constant_loop_is_identity() {
        let imm = Immersion::veronese().unwrap();
        let base = point_jet(&imm, &[1.0, 0.5]).unwrap();
        let t = parallel_transport(&imm, &base, &Loop::new(vec![vec![1.0, 0.5], vec![1.0, 0.5]]), 16).unwrap();
        assert!(t.tau.sub(&Matrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn flat_immersion_transport_is_identity() {
        let imm = Immersion::flat(2, 3).unwrap();
        let base = point_jet(&imm, &[0.0, 0.0]).unwrap();
        let square = Loop::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]]);
        let t = parallel_transport(&imm, &base, &square, 64).unwrap();
        assert!(t.tau.sub(&Matrix::identity(2)).max_abs() < 1e-8);
        assert!(t.residual < 1e-12);
    }

    #[test]
    fn open_paths_are_rejected() {
        let imm = Immersion::sphere(2, 1.0).unwrap();
        let base = point_jet(&imm, &[1.0, 0.0]).unwrap();
        let path = Loop::new(vec![vec![1.0, 0.0], vec![1.2, 0.0]]);
        assert!(matches!(parallel_transport(&imm, &base, &path, 16), Err(Error::OpenLoop(_))));
        let ok = Loop::new(vec![vec![1.0, 0.0], vec![1.0, 2.0 * std::f64::consts::PI]]);
        assert!(parallel_transport(&imm, &base, &ok, 4).is_err());
        assert!(parallel_transport(&imm, &base, &ok, 16).is_ok());
    }
}
