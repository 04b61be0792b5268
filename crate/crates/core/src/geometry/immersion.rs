//! Parametrized spacelike immersions into `ℝ^{1,N}`.
//!
//! Ambient vectors have `N + 1` coordinates and coordinate 0 is the timelike
//! one, so `⟨x, y⟩ = −x₀y₀ + x₁y₁ + … + x_N y_N`. Built-in families place
//! their image in the leading coordinates and pad with zeros up to the
//! requested ambient dimension.

use nalgebra::{Dyn, U1};
use num_dual::{Derivative, Dual2DVec64, DualNum};
use serde_json::{Map, Value};

use super::expr::Expr;
use crate::error::{Error, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Lorentzian inner product on `ℝ^{1,N}`.
pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).enumerate().map(|(k, (a, b))| if k == 0 { -a * b } else { a * b }).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `u ↦ origin + Σ u_i d_i`.
    Affine { origin: Vec<f64>, directions: Vec<Vec<f64>> },
    /// Round sphere `S^dim(radius)` in the spatial coordinates `1..=dim+1`.
    Sphere { dim: usize, radius: f64 },
    /// Product of round spheres in consecutive blocks of spatial coordinates.
    ProductSpheres { factors: Vec<(usize, f64)> },
    /// `u ↦ origin + f(u)·(1, n(u)/|n(u)|)`; with `direction = None`, `n`
    /// parametrizes the unit sphere `S^dim`.
    LightConeSection { dim: usize, scale: Expr, direction: Option<Vec<Expr>>, origin: Option<Vec<f64>> },
    /// `y ↦ (√(1+|y|²), y)`, the hyperbolic space in `ℝ^{1,dim}`.
    Hyperbolic { dim: usize },
    /// Veronese surface: the unit sphere `S²` mapped into `S⁴(radius)` by
    /// quadratic harmonic polynomials.
    Veronese { radius: f64 },
    /// One expression per ambient coordinate.
    Custom { dim: usize, components: Vec<Expr> },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Affine { .. } => "affine",
            Family::Sphere { .. } => "sphere",
            Family::ProductSpheres { .. } => "product_spheres",
            Family::LightConeSection { .. } => "light_cone_section",
            Family::Hyperbolic { .. } => "hyperbolic",
            Family::Veronese { .. } => "veronese",
            Family::Custom { .. } => "custom",
        }
    }

    fn parameter_dim(&self) -> usize {
        match self {
            Family::Affine { directions, .. } => directions.len(),
            Family::Sphere { dim, .. } | Family::LightConeSection { dim, .. } | Family::Hyperbolic { dim } => *dim,
            Family::ProductSpheres { factors } => factors.iter().map(|f| f.0).sum(),
            Family::Veronese { .. } => 2,
            Family::Custom { dim, .. } => *dim,
        }
    }

    /// Smallest `N` such that the image fits into `ℝ^{1,N}`.
    fn minimal_ambient(&self) -> usize {
        match self {
            Family::Affine { origin, .. } => origin.len().saturating_sub(1),
            Family::Sphere { dim, .. } => dim + 1,
            Family::ProductSpheres { factors } => factors.iter().map(|f| f.0 + 1).sum(),
            Family::LightConeSection { dim, direction, origin, .. } => {
                let n = direction.as_ref().map_or(dim + 1, Vec::len);
                n.max(origin.as_ref().map_or(0, |o| o.len().saturating_sub(1)))
            }
            Family::Hyperbolic { dim } => *dim,
            Family::Veronese { .. } => 5,
            Family::Custom { components, .. } => components.len().saturating_sub(1),
        }
    }
}

/// How second derivatives of the evaluator are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivatives {
    /// Central second-order differences with step `h`.
    FiniteDifference,
    /// Forward-mode automatic differentiation (exact up to rounding).
    Automatic,
}

impl Derivatives {
    pub fn as_str(&self) -> &'static str {
        match self {
            Derivatives::FiniteDifference => "finite_difference",
            Derivatives::Automatic => "automatic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Immersion {
    pub family: Family,
    /// `N` in `ℝ^{1,N}`.
    pub ambient_dim: usize,
    pub parameter_dim: usize,
    pub h: f64,
    pub derivatives: Derivatives,
}

/// Value, first and second partial derivatives of the evaluator at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: Vec<f64>,
    /// `first[i]` is `∂_i X`.
    pub first: Vec<Vec<f64>>,
    /// `second[i][j]` is `∂_i ∂_j X`.
    pub second: Vec<Vec<Vec<f64>>>,
}

/// Hyperspherical coordinates of `S^k(r)` in `ℝ^{k+1}`.
fn sphere_coords<D: DualNum<Primitive = f64>>(angles: &[D], r: f64) -> Vec<D> {
    let k = angles.len();
    let mut out = Vec::with_capacity(k + 1);
    let mut prefix = D::from(r);
    for a in angles {
        out.push(prefix.clone() * a.cos());
        prefix *= a.sin();
    }
    out.push(prefix);
    out
}

impl Immersion {
    pub fn new(family: Family) -> Result<Self> {
        let ambient_dim = family.minimal_ambient();
        Self::with_ambient(family, ambient_dim)
    }

    /// The family placed in `ℝ^{1,N}` with `N = ambient_dim`.
    pub fn with_ambient(family: Family, ambient_dim: usize) -> Result<Self> {
        let parameter_dim = family.parameter_dim();
        if ambient_dim < family.minimal_ambient() {
            return Err(Error::Input(format!(
                "{} needs ambient dimension at least {}",
                family.name(),
                family.minimal_ambient()
            )));
        }
        if parameter_dim == 0 {
            return Err(Error::Input("immersion needs at least one parameter".into()));
        }
        if ambient_dim + 1 < parameter_dim + 2 {
            return Err(Error::Input("normal space must have dimension at least 2".into()));
        }
        match &family {
            Family::Affine { origin, directions } => {
                if directions.iter().any(|d| d.len() != origin.len()) {
                    return Err(Error::Input("affine directions must match the origin length".into()));
                }
            }
            Family::Sphere { radius, .. } | Family::Veronese { radius } if *radius <= 0.0 => {
                return Err(Error::Input("radius must be positive".into()));
            }
            Family::ProductSpheres { factors } => {
                if factors.is_empty() || factors.iter().any(|&(k, r)| k == 0 || r <= 0.0) {
                    return Err(Error::Input("product factors need positive dimension and radius".into()));
                }
            }
            Family::LightConeSection { dim, scale, direction, .. } => {
                if scale.arity() > *dim || direction.iter().flatten().any(|e| e.arity() > *dim) {
                    return Err(Error::Input("light-cone expressions use too many parameters".into()));
                }
            }
            Family::Custom { dim, components } => {
                if components.iter().any(|e| e.arity() > *dim) {
                    return Err(Error::Input("custom expressions use too many parameters".into()));
                }
            }
            _ => {}
        }
        Ok(Immersion { family, ambient_dim, parameter_dim, h: DEFAULT_STEP, derivatives: Derivatives::FiniteDifference })
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_derivatives(mut self, d: Derivatives) -> Self {
        self.derivatives = d;
        self
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        Self::new(Family::Sphere { dim, radius })
    }

    pub fn product_spheres(factors: &[(usize, f64)]) -> Result<Self> {
        Self::new(Family::ProductSpheres { factors: factors.to_vec() })
    }

    /// `u ↦ (1, n(u))` for the unit sphere `S^dim`.
    pub fn light_cone_sphere(dim: usize) -> Result<Self> {
        Self::new(Family::LightConeSection { dim, scale: Expr::Const(1.0), direction: None, origin: None })
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::with_ambient(Family::Hyperbolic { dim }, dim + 1)
    }

    pub fn veronese() -> Result<Self> {
        Self::new(Family::Veronese { radius: 1.0 })
    }

    /// Affine plane through the origin spanned by the first `dim` spatial axes
    /// of `ℝ^{1,N}`.
    pub fn flat(dim: usize, ambient_dim: usize) -> Result<Self> {
        let directions = (0..dim).map(|i| crate::linalg::unit::<crate::R64>(ambient_dim + 1, i + 1).iter().map(|x| x.0).collect()).collect();
        Self::with_ambient(Family::Affine { origin: vec![0.0; ambient_dim + 1], directions }, ambient_dim)
    }

    /// Evaluator, generic over dual numbers.
    pub fn eval<D: DualNum<Primitive = f64>>(&self, u: &[D]) -> Vec<D> {
        let mut out: Vec<D> = match &self.family {
            Family::Affine { origin, directions } => origin
                .iter()
                .enumerate()
                .map(|(k, o)| {
                    directions.iter().zip(u).fold(D::from(*o), |acc, (d, ui)| acc + ui.clone() * d[k])
                })
                .collect(),
            Family::Sphere { radius, .. } => {
                let mut x = vec![D::from(0.0)];
                x.extend(sphere_coords(u, *radius));
                x
            }
            Family::ProductSpheres { factors } => {
                let mut x = vec![D::from(0.0)];
                let mut offset = 0;
                for &(k, r) in factors {
                    x.extend(sphere_coords(&u[offset..offset + k], r));
                    offset += k;
                }
                x
            }
            Family::LightConeSection { scale, direction, origin, .. } => {
                let n = match direction {
                    Some(exprs) => {
                        let raw: Vec<D> = exprs.iter().map(|e| e.eval(u)).collect();
                        let norm = raw.iter().map(|c| c.clone() * c.clone()).sum::<D>().sqrt();
                        raw.into_iter().map(|c| c / norm.clone()).collect()
                    }
                    None => sphere_coords(u, 1.0),
                };
                let f = scale.eval(u);
                let mut x = vec![f.clone()];
                x.extend(n.into_iter().map(|c| c * f.clone()));
                if let Some(o) = origin {
                    x.resize(o.len().max(x.len()), D::from(0.0));
                    for (xi, oi) in x.iter_mut().zip(o) {
                        *xi += *oi;
                    }
                }
                x
            }
            Family::Hyperbolic { .. } => {
                let r2: D = u.iter().map(|y| y.clone() * y.clone()).sum();
                let mut x = vec![(r2 + 1.0).sqrt()];
                x.extend(u.iter().cloned());
                x
            }
            Family::Veronese { radius } => {
                let (theta, phi) = (&u[0], &u[1]);
                let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
                let s3 = 3f64.sqrt();
                let c = *radius * s3;
                vec![
                    D::from(0.0),
                    y.clone() * z.clone() * c,
                    x.clone() * z.clone() * c,
                    x.clone() * y.clone() * c,
                    (x.clone() * x.clone() - y.clone() * y.clone()) * (c / 2.0),
                    (x.clone() * x + y.clone() * y - z.clone() * z * 2.0) * (c / (2.0 * s3)),
                ]
            }
            Family::Custom { components, .. } => components.iter().map(|e| e.eval(u)).collect(),
        };
        out.resize(self.ambient_dim + 1, D::from(0.0));
        out
    }

    pub fn point(&self, u: &[f64]) -> Vec<f64> {
        self.eval(u)
    }

    fn check_param(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.parameter_dim {
            return Err(Error::DimensionMismatch { expected: self.parameter_dim, got: u.len() });
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("parameter point is not finite".into()));
        }
        Ok(())
    }

    /// Second-order jet using the configured derivative mode.
    pub fn jet2(&self, u: &[f64]) -> Result<Jet2> {
        match self.derivatives {
            Derivatives::FiniteDifference => self.jet2_fd(u, self.h),
            Derivatives::Automatic => self.jet2_exact(u),
        }
    }

    /// Derivatives by forward-mode automatic differentiation.
    pub fn jet2_exact(&self, u: &[f64]) -> Result<Jet2> {
        self.check_param(u)?;
        let d = self.parameter_dim;
        let dyn_d = Dyn(d);
        let vars: Vec<Dual2DVec64> = u
            .iter()
            .enumerate()
            .map(|(i, &ui)| {
                let mut x = Dual2DVec64::from_re(ui);
                x.v1 = Derivative::derivative_generic(U1, dyn_d, i);
                x
            })
            .collect();
        let out = self.eval(&vars);
        let n = out.len();
        let mut value = Vec::with_capacity(n);
        let mut first = vec![vec![0.0; n]; d];
        let mut second = vec![vec![vec![0.0; n]; d]; d];
        for (k, o) in out.into_iter().enumerate() {
            value.push(o.re);
            let g = o.v1.unwrap_generic(U1, dyn_d);
            let h = o.v2.unwrap_generic(dyn_d, dyn_d);
            for i in 0..d {
                first[i][k] = g[i];
                for j in 0..d {
                    second[i][j][k] = h[(i, j)];
                }
            }
        }
        finite(Jet2 { value, first, second })
    }

    /// Derivatives by central differences with step `h`.
    pub fn jet2_fd(&self, u: &[f64], h: f64) -> Result<Jet2> {
        self.check_param(u)?;
        if !(h > 0.0) {
            return Err(Error::Input("finite-difference step must be positive".into()));
        }
        let d = self.parameter_dim;
        let at = |shift: &[(usize, f64)]| {
            let mut p = u.to_vec();
            for &(i, s) in shift {
                p[i] += s;
            }
            self.point(&p)
        };
        let value = self.point(u);
        let n = value.len();
        let mut first = vec![vec![0.0; n]; d];
        let mut second = vec![vec![vec![0.0; n]; d]; d];
        for i in 0..d {
            let (p, m) = (at(&[(i, h)]), at(&[(i, -h)]));
            for k in 0..n {
                first[i][k] = (p[k] - m[k]) / (2.0 * h);
                second[i][i][k] = (p[k] - 2.0 * value[k] + m[k]) / (h * h);
            }
            for j in 0..i {
                let pp = at(&[(i, h), (j, h)]);
                let pm = at(&[(i, h), (j, -h)]);
                let mp = at(&[(i, -h), (j, h)]);
                let mm = at(&[(i, -h), (j, -h)]);
                for k in 0..n {
                    let v = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
                    second[i][j][k] = v;
                    second[j][i][k] = v;
                }
            }
        }
        finite(Jet2 { value, first, second })
    }

    /// Parses `{"family": …, "params": {…}, "h": …, "derivatives": …}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Input("immersion must be an object".into()))?;
        let family = obj.get("family").and_then(Value::as_str).ok_or_else(|| Error::Input("missing \"family\"".into()))?;
        let empty = Map::new();
        let params = match obj.get("params") {
            Some(Value::Object(m)) => m,
            Some(_) => return Err(Error::Input("\"params\" must be an object".into())),
            None => &empty,
        };
        let family = match family {
            "affine" => Family::Affine { origin: vector(params, "origin")?, directions: vectors(params, "directions")? },
            "sphere" => Family::Sphere { dim: uint(params, "dim", Some(2))?, radius: float(params, "radius", Some(1.0))? },
            "product_spheres" => {
                let raw = params.get("factors").and_then(Value::as_array).ok_or_else(|| Error::Input("missing \"factors\"".into()))?;
                let factors = raw
                    .iter()
                    .map(|f| {
                        let f = f.as_object().ok_or_else(|| Error::Input("factor must be an object".into()))?;
                        Ok((uint(f, "dim", None)?, float(f, "radius", Some(1.0))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Family::ProductSpheres { factors }
            }
            "light_cone_section" => Family::LightConeSection {
                dim: uint(params, "dim", Some(2))?,
                scale: params.get("f").map(Expr::parse).transpose()?.unwrap_or(Expr::Const(1.0)),
                direction: params
                    .get("n")
                    .map(|n| {
                        n.as_array()
                            .ok_or_else(|| Error::Input("\"n\" must be a list of expressions".into()))?
                            .iter()
                            .map(Expr::parse)
                            .collect::<Result<Vec<_>>>()
                    })
                    .transpose()?,
                origin: params.get("origin").map(|_| vector(params, "origin")).transpose()?,
            },
            "hyperbolic" => Family::Hyperbolic { dim: uint(params, "dim", Some(2))? },
            "veronese" => Family::Veronese { radius: float(params, "radius", Some(1.0))? },
            "custom" => {
                let exprs = params
                    .get("components")
                    .or_else(|| obj.get("expr"))
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Input("custom family needs a list of component expressions".into()))?;
                Family::Custom { dim: uint(params, "dim", None)?, components: exprs.iter().map(Expr::parse).collect::<Result<_>>()? }
            }
            other => return Err(Error::Input(format!("unknown family {other:?}"))),
        };
        let default_ambient = match family {
            Family::Hyperbolic { dim } => dim + 1,
            _ => family.minimal_ambient(),
        };
        let ambient = uint(params, "ambient_dim", Some(default_ambient))?;
        let mut imm = Self::with_ambient(family, ambient)?;
        if let Some(h) = obj.get("h") {
            imm.h = h.as_f64().filter(|h| *h > 0.0).ok_or_else(|| Error::Input("\"h\" must be a positive number".into()))?;
        }
        if let Some(d) = obj.get("derivatives") {
            imm.derivatives = match d.as_str() {
                Some("finite_difference") => Derivatives::FiniteDifference,
                Some("automatic") => Derivatives::Automatic,
                _ => return Err(Error::Input("\"derivatives\" must be \"finite_difference\" or \"automatic\"".into())),
            };
        }
        Ok(imm)
    }
}

fn finite(j: Jet2) -> Result<Jet2> {
    let ok = j.value.iter().chain(j.first.iter().flatten()).chain(j.second.iter().flatten().flatten()).all(|x| x.is_finite());
    if ok {
        Ok(j)
    } else {
        Err(Error::Input("evaluator produced a non-finite value".into()))
    }
}

fn uint(m: &Map<String, Value>, key: &str, default: Option<usize>) -> Result<usize> {
    match (m.get(key), default) {
        (Some(v), _) => v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Input(format!("\"{key}\" must be a non-negative integer"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::Input(format!("missing \"{key}\""))),
    }
}

fn float(m: &Map<String, Value>, key: &str, default: Option<f64>) -> Result<f64> {
    match (m.get(key), default) {
        (Some(v), _) => v.as_f64().ok_or_else(|| Error::Input(format!("\"{key}\" must be a number"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::Input(format!("missing \"{key}\""))),
    }
}

pub(crate) fn number_list(v: &Value, what: &str) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Input(format!("{what} must be a list of numbers")))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| Error::Input(format!("{what} must be a list of numbers"))))
        .collect()
}

/// A list of parameter points, each of length `dim`.
pub fn points_from_json(v: &Value, dim: usize) -> Result<Vec<Vec<f64>>> {
    let points = v
        .as_array()
        .ok_or_else(|| Error::Input("points must be a list of parameter points".into()))?
        .iter()
        .map(|p| number_list(p, "point"))
        .collect::<Result<Vec<_>>>()?;
    match points.iter().find(|p| p.len() != dim) {
        Some(bad) => Err(Error::DimensionMismatch { expected: dim, got: bad.len() }),
        None => Ok(points),
    }
}

fn vector(m: &Map<String, Value>, key: &str) -> Result<Vec<f64>> {
    number_list(m.get(key).ok_or_else(|| Error::Input(format!("missing \"{key}\"")))?, &format!("\"{key}\""))
}

fn vectors(m: &Map<String, Value>, key: &str) -> Result<Vec<Vec<f64>>> {
    m.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Input(format!("\"{key}\" must be a list of vectors")))?
        .iter()
        .map(|v| number_list(v, &format!("\"{key}\"")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sphere_lands_on_radius() {
        let imm = Immersion::sphere(2, 2.0).unwrap();
        let x = imm.point(&[0.7, 1.3]);
        assert_eq!(x.len(), 4);
        assert!((minkowski(&x, &x) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn veronese_lies_on_unit_sphere() {
        let imm = Immersion::veronese().unwrap();
        let x = imm.point(&[0.4, 2.1]);
        assert!((minkowski(&x, &x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn automatic_and_finite_differences_agree() {
        let imm = Immersion::veronese().unwrap();
        let a = imm.jet2_exact(&[0.9, 0.3]).unwrap();
        let f = imm.jet2_fd(&[0.9, 0.3], 1e-4).unwrap();
        for i in 0..2 {
            for k in 0..6 {
                assert!((a.first[i][k] - f.first[i][k]).abs() < 1e-7);
                for j in 0..2 {
                    assert!((a.second[i][j][k] - f.second[i][j][k]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn parses_custom_family() {
        let imm = Immersion::from_json(&json!({
            "family": "custom",
            "params": {"dim": 1, "components": [0, ["cos", "u0"], ["sin", "u0"], 0]}
        }))
        .unwrap();
        assert_eq!(imm.ambient_dim, 3);
        assert_eq!(imm.point(&[0.0]), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_hypersurfaces() {
        assert!(Immersion::with_ambient(Family::Sphere { dim: 2, radius: 1.0 }, 2).is_err());
    }
}
