//! End-to-end analysis of a parametrized immersion.
//!
//! The pipeline computes the adapted frame at a base point, transports it
//! along the given loops, samples curvature tensors at every vertex (pulled
//! back to the base fiber by the transport) and hands them to the algebraic
//! layer: holonomy generation, invariant subspace analysis, the Lorentzian
//! splitting, and on the screen the Borel-Lichnérowicz decomposition with
//! its per-module checks. Geometric checks (light cone, `∇⊥Π`, mean
//! curvature case analysis) run alongside. The result is one JSON report.
//!
//! Float tensors carry discretization error, so the algebra runs at a scoped
//! rank tolerance (see [`PipelineOptions::algebra_tolerance`]). In exact mode
//! tensor values are snapped to rationals and the exact result is used only
//! if it re-verifies and agrees with the float holonomy dimension.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use super::checks::{light_cone_check, mean_curvature_case, parallel_pi_check, CONE_TOL};
use super::immersion::{minkowski, number_list, Derivatives, Immersion};
use super::jet::{point_jet, point_jet_with, PointJet};
use super::transport::{parallel_transport, transport_along, Loop, DEFAULT_STEPS};
use crate::bbi::{lorentzian_splitting, LorentzianSplitting};
use crate::curvature::{extract_screen_components, normal_curvature, olmos_tensor, OlmosTensor};
use crate::error::{Error, Result};
use crate::field::{rationalize, with_float_tolerance, Field, Q, R64, SNAP_MAX_DEN};
use crate::holonomy::{borel_lichnerowicz, generate_holonomy, holonomy_system_check, keylemma_check, BLOutcome, ModuleTensor, DEFAULT_SEED};
use crate::lie::{lie_closure, LieAlgebraSpan};
use crate::linalg::{unit, Matrix};
use crate::pseudo_euclidean::{restricted_gram, screen_block, SignatureSpace};
use crate::report::{floats, matrix, num, scalar, vector};

/// Tolerance for `‖A_V + id‖` on light-cone samples.
pub const CONE_SHAPE_TOL: f64 = 1e-5;
/// Tolerance for the transport of `V` around a loop.
pub const CONE_TRANSPORT_TOL: f64 = 1e-6;
/// Tolerance for the `∇⊥Π` residual and the constancy of the `A_H` spectrum.
pub const PI_TOL: f64 = 1e-6;
/// Tolerance used to decide whether a mean curvature vector is lightlike.
pub const CASE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub mode: Mode,
    /// Requested float rank tolerance; raised to the jet accuracy floor.
    pub tol: f64,
    /// Overrides the derived algebra tolerance.
    pub algebra_tol: Option<f64>,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { mode: Mode::Exact, tol: crate::field::FLOAT_TOL, algebra_tol: None, seed: DEFAULT_SEED }
    }
}

impl PipelineOptions {
    /// Rank tolerance for the algebra stage. Finite-difference jets are
    /// accurate to about `h²`, automatic ones to transport accuracy.
    pub fn algebra_tolerance(&self, imm: &Immersion) -> f64 {
        self.algebra_tol.unwrap_or_else(|| {
            let floor = match imm.derivatives {
                Derivatives::Automatic => 1e-7,
                Derivatives::FiniteDifference => (100.0 * imm.h * imm.h).max(1e-7),
            };
            self.tol.max(floor)
        })
    }
}

/// Immersion together with the sampling plan.
#[derive(Clone, Debug)]
pub struct GeometryInput {
    pub immersion: Immersion,
    pub base: Vec<f64>,
    /// Paths starting at `base`. Closed ones also yield a holonomy element.
    pub loops: Vec<Loop>,
    /// Points for the `∇⊥Π` and light-cone checks.
    pub samples: Vec<Vec<f64>>,
    pub steps: usize,
    /// Replaces `H` by a null normal (adapted coordinates, or `v` itself).
    pub inject_mean_curvature: Option<Vec<f64>>,
}

impl GeometryInput {
    pub fn new(immersion: Immersion, base: Vec<f64>) -> Self {
        GeometryInput { samples: vec![base.clone()], immersion, base, loops: Vec::new(), steps: DEFAULT_STEPS, inject_mean_curvature: None }
    }

    /// Immersion keys plus `"base"`, `"loops"`, `"samples"`, `"steps"` and
    /// `"inject_mean_curvature"` (`true` or adapted coordinates).
    pub fn from_json(v: &Value) -> Result<Self> {
        let immersion = Immersion::from_json(v)?;
        let d = immersion.parameter_dim;
        let base = match v.get("base") {
            Some(b) => number_list(b, "base")?,
            None => vec![1.0; d],
        };
        if base.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: base.len() });
        }
        let loops = match v.get("loops") {
            Some(Value::Array(ls)) => ls.iter().map(Loop::from_json).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Input("\"loops\" must be a list".into())),
            None => Vec::new(),
        };
        let samples = match v.get("samples") {
            Some(Value::Array(ss)) => ss.iter().map(|s| number_list(s, "sample")).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::Input("\"samples\" must be a list of points".into())),
            None => vec![base.clone()],
        };
        if let Some(bad) = samples.iter().chain(loops.iter().flat_map(|l| &l.vertices)).find(|p| p.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        let steps = match v.get("steps") {
            Some(s) => s.as_u64().ok_or_else(|| Error::Input("\"steps\" must be a positive integer".into()))? as usize,
            None => DEFAULT_STEPS,
        };
        let inject_mean_curvature = match v.get("inject_mean_curvature") {
            None | Some(Value::Bool(false)) | Some(Value::Null) => None,
            Some(Value::Bool(true)) => Some(Vec::new()),
            Some(other) => Some(number_list(other, "inject_mean_curvature")?),
        };
        Ok(GeometryInput { immersion, base, loops, samples, steps, inject_mean_curvature })
    }
}

/// Typed summary of a pipeline run; `report` holds the full JSON.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub holonomy_dim: usize,
    pub classification: String,
    /// Tag of the Lorentzian factor, if there is one.
    pub lorentzian_type: Option<String>,
    pub xi_invariant: bool,
    pub parallel_null_normal: bool,
    /// Only set for light-cone sections.
    pub xi_contains_v: Option<bool>,
    pub light_cone_passes: Option<bool>,
    pub contradiction: Option<bool>,
    pub exact: bool,
    pub report: Value,
}

struct TransportSummary {
    json: Value,
}

struct Gathered {
    base: PointJet,
    /// Largest gram residual of the closed-loop transports.
    max_residual: f64,
    tensors: Vec<OlmosTensor<R64>>,
    transports: Vec<TransportSummary>,
}

fn max_abs_f(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// The position vector when it is a nonzero null normal at `u`.
fn null_position(imm: &Immersion, u: &[f64]) -> Result<Option<Vec<f64>>> {
    let x = imm.point(u);
    let scale = max_abs_f(&x);
    if scale == 0.0 || minkowski(&x, &x).abs() > CONE_TOL * scale * scale {
        return Ok(None);
    }
    let j = imm.jet2_exact(u)?;
    let normal = j.first.iter().all(|t| minkowski(&x, t).abs() <= 1e-9 * scale * max_abs_f(t).max(1.0));
    Ok(normal.then_some(x))
}

fn gather(input: &GeometryInput, hint: Option<&[f64]>) -> Result<Gathered> {
    let imm = &input.immersion;
    let base = point_jet_with(imm, &input.base, hint)?;
    let mut tensors = vec![olmos_tensor(&base.shapes)];
    let mut transports = Vec::new();
    let mut max_residual = 0.0f64;
    for l in &input.loops {
        let start_gap = max_abs_f(&imm.point(&l.vertices[0]).iter().zip(&base.point).map(|(a, b)| a - b).collect::<Vec<_>>());
        if start_gap > 1e-9 * (1.0 + max_abs_f(&base.point)) {
            return Err(Error::Input("every loop must start at the base point".into()));
        }
        let first = imm.point(&l.vertices[0]);
        let last = imm.point(l.vertices.last().unwrap());
        let gap = max_abs_f(&first.iter().zip(&last).map(|(a, b)| a - b).collect::<Vec<_>>());
        let closed = gap <= 1e-9 * (1.0 + max_abs_f(&first));
        let frames = if closed {
            let t = parallel_transport(imm, &base, l, input.steps)?;
            max_residual = max_residual.max(t.residual);
            transports.push(TransportSummary {
                json: json!({
                    "closed": true,
                    "normal_leak": num(t.normal_leak),
                    "residual": num(t.residual),
                    "steps": t.steps,
                    "tau": matrix(&t.tau),
                    "vertices": l.vertices.len(),
                }),
            });
            t.vertex_frames
        } else {
            let per = input.steps.max(8).div_ceil(l.segments());
            transports.push(TransportSummary { json: json!({"closed": false, "steps": per * l.segments(), "vertices": l.vertices.len()}) });
            transport_along(imm, &base.normal, &l.vertices, per)?
        };
        for (u, frame) in l.vertices.iter().zip(&frames).skip(1) {
            let jet = point_jet(imm, u)?;
            tensors.push(olmos_tensor(&jet.shapes_in_frame(base.space, frame)?));
        }
    }
    Ok(Gathered { base, max_residual, tensors, transports })
}

/// Outcome of the algebra stage in one arithmetic.
struct Algebra<F> {
    hol: LieAlgebraSpan<F>,
    split: LorentzianSplitting<F>,
    xi_invariant: bool,
    v_fixed: bool,
    identities_hold: bool,
    json: Map<String, Value>,
}

fn algebra_stage<F: Field>(space: &SignatureSpace, tensors: &[OlmosTensor<F>], seed: u64) -> Result<Algebra<F>> {
    let identities_hold = tensors.iter().all(|t| t.check_identities().all());
    let hol = generate_holonomy(space, tensors)?;
    let split = lorentzian_splitting(space, &hol, &tensors[..1], seed)?;
    let ops = hol.coordinate_basis();
    let xi_invariant = space.p == 1 && ops.iter().all(|x| (1..space.dim()).all(|b| x.get(b, 0).is_zero()));
    let v_fixed = xi_invariant && ops.iter().all(|x| x.get(0, 0).is_zero());

    let mut out = Map::new();
    let rep = &split.report;
    out.insert("classification".into(), json!(rep.classification.as_str()));
    out.insert(
        "holonomy".into(),
        json!({"commutant_dim": rep.commutant_dim, "dim": hol.dim(), "flat_dim": rep.flat_part.dim(), "basis": hol.basis().iter().map(matrix).collect::<Vec<_>>()}),
    );
    out.insert(
        "witness".into(),
        rep.witness.as_ref().map_or(Value::Null, |w| Value::Array(w.basis().iter().map(|b| vector(b)).collect())),
    );
    out.insert(
        "riemannian".into(),
        Value::Array(
            split
                .riemannian
                .iter()
                .map(|r| {
                    json!({
                        "algebra_dim": r.algebra_dim,
                        "dim": r.subspace.dim(),
                        "system": r.system.as_ref().map(|s| json!({
                            "irreducible": s.irreducible,
                            "nonzero": s.nonzero,
                            "scal": scalar(&s.scal),
                            "symmetric": s.symmetric_flag,
                        })),
                    })
                })
                .collect(),
        ),
    );
    out.insert(
        "lorentzian".into(),
        split.lorentzian.as_ref().map_or(Value::Null, |l| {
            let c = &l.classification;
            json!({
                "algebra_dim": l.algebra_dim,
                "dim": l.subspace.dim(),
                "ell": c.ell,
                "full": c.full,
                "m": c.m,
                "null_vector": c.null_vector.as_ref().map(|v| vector(v)),
                "phi": c.phi.as_ref().map(|p| vector(p)),
                "screen_algebra_dim": c.g.dim(),
                "type": c.tag.as_str(),
            })
        }),
    );
    let max_abs = tensors.iter().map(OlmosTensor::max_abs).fold(0.0, f64::max);
    out.insert("curvature".into(), json!({"identities_hold": identities_hold, "max_abs": num(max_abs), "tensors": tensors.len()}));
    let screen = if xi_invariant && space.q > 0 { screen_stage(space, &hol, tensors, seed)? } else { Value::Null };
    out.insert("screen".into(), screen);
    Ok(Algebra { hol, split, xi_invariant, v_fixed, identities_hold, json: out })
}

fn screen_stage<F: Field>(space: &SignatureSpace, hol: &LieAlgebraSpan<F>, tensors: &[OlmosTensor<F>], seed: u64) -> Result<Value> {
    let q = space.q;
    let blocks: Vec<Matrix<F>> = hol.basis().iter().map(|x| screen_block(space, x)).collect();
    let g = lie_closure(q, &blocks)?;
    let p0s: Vec<_> = tensors.iter().map(|t| extract_screen_components(t).p0).collect();
    let mut out = json!({"algebra_dim": g.dim(), "q": q});
    match borel_lichnerowicz(&g, seed)? {
        BLOutcome::NoBL(w) => {
            out["bl"] = json!(false);
            out["coupled_modules"] = json!(w.coupled_modules);
            out["ideals"] = json!(w.ideal_dims);
            out["modules"] = json!(w.modules.iter().map(|m| m.dim()).collect::<Vec<_>>());
        }
        BLOutcome::Decomposition(d) => {
            out["bl"] = json!(true);
            out["e0_dim"] = json!(d.e0.dim());
            out["ideals"] = json!(d.ideals.iter().map(|i| i.dim()).collect::<Vec<_>>());
            out["modules"] = json!(d.modules.iter().map(|m| m.dim()).collect::<Vec<_>>());
            out["keylemma"] = match keylemma_check(&d) {
                Ok(entries) => json!(entries.iter().map(|e| json!({"dim_K": e.dim_k, "nonzero": e.nonzero})).collect::<Vec<_>>()),
                Err(e) => json!(e.to_string()),
            };
            let mut systems = Vec::new();
            for (j, module) in d.modules.iter().enumerate() {
                let restricted: Vec<ModuleTensor<F>> = p0s.iter().map(|p0| ModuleTensor::from_screen(p0, module.basis())).collect();
                let scal: Vec<Value> = restricted
                    .iter()
                    .filter(|r| !r.is_zero())
                    .map(|r| crate::holonomy::screen_scalar_curvature(r).map(|s| scalar(&s)).unwrap_or(Value::Null))
                    .collect();
                let negative = restricted
                    .iter()
                    .filter(|r| !r.is_zero())
                    .all(|r| crate::holonomy::screen_scalar_curvature(r).is_ok_and(|s| s.signum() < 0));
                let system = d
                    .restricted_ideal(j)
                    .and_then(|(_, gj)| holonomy_system_check(&restricted[0], &gj, seed))
                    .map(|s| {
                        json!({
                            "irreducible": s.irreducible,
                            "nonzero": s.nonzero,
                            "scal": scalar(&s.scal),
                            "symmetric": s.symmetric_flag,
                        })
                    })
                    .unwrap_or_else(|e| json!({"error": e.to_string()}));
                systems.push(json!({"dim": module.dim(), "irreducible": d.irreducible[j], "scal": scal, "scal_negative": negative, "system": system}));
            }
            out["systems"] = Value::Array(systems);
        }
    }
    Ok(out)
}

/// Null direction (adapted coordinates) preserved by the float holonomy:
/// the Lorentzian factor's null line, or a null vector in the flat part.
fn invariant_null_direction(space: &SignatureSpace, split: &LorentzianSplitting<R64>) -> Option<Vec<f64>> {
    if let Some(v) = split.lorentzian.as_ref().and_then(|l| l.classification.null_vector.as_ref()) {
        return Some(v.iter().map(|x| x.0).collect());
    }
    let flat = split.report.flat_part.basis();
    if flat.is_empty() {
        return None;
    }
    let gram = restricted_gram(&space.gram::<R64>(), flat);
    let k = flat.len();
    let eig = DMatrix::from_fn(k, k, |i, j| gram.get(i, j).0).symmetric_eigen();
    let neg = (0..k).find(|&i| eig.eigenvalues[i] < -1e-6)?;
    let pos = (0..k).find(|&i| eig.eigenvalues[i] > 1e-6)?;
    let combo = |i: usize| -> Vec<f64> {
        let s = eig.eigenvalues[i].abs().sqrt();
        (0..space.dim()).map(|c| (0..k).map(|r| eig.eigenvectors[(r, i)] * flat[r][c].0).sum::<f64>() / s).collect()
    };
    let (n, p) = (combo(neg), combo(pos));
    Some(n.iter().zip(&p).map(|(a, b)| a + b).collect())
}

fn to_ambient(frame: &[Vec<f64>], coords: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; frame[0].len()];
    for (c, xi) in coords.iter().zip(frame) {
        for (o, x) in out.iter_mut().zip(xi) {
            *o += c * x;
        }
    }
    out
}

/// Snaps a float tensor to rationals; `None` if some value is not within
/// `tol` of a rational with bounded denominator.
fn snap_tensor(t: &OlmosTensor<R64>, tol: f64) -> Option<OlmosTensor<Q>> {
    let values: Option<Vec<Q>> = t
        .values()
        .iter()
        .map(|x| rationalize(x.0, SNAP_MAX_DEN).filter(|q| (q.to_f64() - x.0).abs() <= tol))
        .collect();
    let values = values?;
    let n = t.space().dim();
    Some(OlmosTensor::from_fn(*t.space(), |a, b, c, d| values[((a * n + b) * n + c) * n + d].clone()))
}

/// Runs the full analysis.
pub fn pipeline(input: &GeometryInput, opts: &PipelineOptions) -> Result<PipelineReport> {
    let imm = &input.immersion;
    let mut notes: Vec<String> = Vec::new();

    let cone_hint = null_position(imm, &input.base)?;
    let mut hint = cone_hint.clone();
    let mut gathered = gather(input, hint.as_deref())?;
    // The gram residual bounds the transport error of the pulled-back tensors.
    let tol = match opts.algebra_tol {
        Some(t) => t,
        None => opts.algebra_tolerance(imm).max(gathered.max_residual),
    };
    let space = gathered.base.space;
    let mut float = with_float_tolerance(tol, || algebra_stage(&space, &gathered.tensors, opts.seed))?;
    if !float.xi_invariant && !float.hol.is_zero() {
        if let Some(l) = invariant_null_direction(&space, &float.split) {
            let ambient = to_ambient(&gathered.base.normal, &l);
            notes.push("adapted frame rebuilt around an invariant null normal direction".into());
            hint = Some(ambient);
            gathered = gather(input, hint.as_deref())?;
            float = with_float_tolerance(tol, || algebra_stage(&space, &gathered.tensors, opts.seed))?;
        }
    }

    // R⊥ values at the base should lie in the generated algebra.
    let base = &gathered.base;
    let d = base.tangent_dim();
    let normal_curvature_in_holonomy = with_float_tolerance(tol, || {
        (0..d).all(|i| {
            (i + 1..d).all(|k| {
                normal_curvature(&base.shapes, &unit::<R64>(d, i), &unit::<R64>(d, k)).is_ok_and(|r| float.hol.contains(&r))
            })
        })
    });
    if !normal_curvature_in_holonomy {
        notes.push("normal curvature at the base is not in the sampled holonomy algebra".into());
    }

    let mut exact = false;
    let mut algebra_json = float.json.clone();
    if opts.mode == Mode::Exact {
        let snapped: Option<Vec<OlmosTensor<Q>>> = gathered.tensors.iter().map(|t| snap_tensor(t, tol)).collect();
        match snapped {
            None => notes.push("curvature values are not rational within tolerance; float result reported".into()),
            Some(ts) => match algebra_stage(&space, &ts, opts.seed) {
                Ok(ex) if ex.identities_hold && ex.hol.dim() == float.hol.dim() && ex.xi_invariant == float.xi_invariant => {
                    exact = true;
                    algebra_json = ex.json;
                }
                Ok(_) => notes.push("snapped rational tensors did not re-verify; float result reported".into()),
                Err(e) => notes.push(format!("exact stage failed ({e}); float result reported")),
            },
        }
    }

    let light_cone = match &cone_hint {
        Some(_) => Some(light_cone_check(imm, &input.samples, &input.loops, input.steps)?),
        None => None,
    };
    let light_cone_passes = light_cone.as_ref().map(|r| r.passes(CONE_SHAPE_TOL, CONE_TRANSPORT_TOL));
    let xi_contains_v = cone_hint.as_ref().map(|v| {
        let used = hint.as_deref().is_some_and(|h| h == v.as_slice());
        used && float.xi_invariant
    });
    let pi = parallel_pi_check(imm, &input.samples, PI_TOL)?;

    if c_len_mismatch(&input.inject_mean_curvature, space.dim()) {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: input.inject_mean_curvature.as_ref().map_or(0, Vec::len) });
    }
    let case = input.inject_mean_curvature.as_ref().map(|c| {
        let h = if c.is_empty() { base.normal[0].clone() } else { to_ambient(&base.normal, c) };
        mean_curvature_case(base, Some(&h), CASE_TOL)
    });

    let lorentzian_type = float.split.lorentzian.as_ref().map(|l| l.classification.tag.as_str().to_string());
    let classification = float.split.report.classification.as_str().to_string();
    let mut report = algebra_json;
    report.insert("algebra_tolerance".into(), num(tol));
    report.insert("base".into(), floats(&input.base));
    report.insert("mode".into(), json!(if exact { "exact" } else { "float" }));
    report.insert("requested_mode".into(), json!(opts.mode.as_str()));
    report.insert("seed".into(), json!(opts.seed));
    report.insert("normal_signature".into(), json!({"negative": space.p, "positive": space.p + space.q}));
    report.insert(
        "immersion".into(),
        json!({
            "ambient_signature": [1, imm.ambient_dim],
            "derivatives": imm.derivatives.as_str(),
            "family": imm.family.name(),
            "parameter_dim": imm.parameter_dim,
            "step": num(imm.h),
        }),
    );
    report.insert(
        "flags".into(),
        json!({
            "normal_curvature_in_holonomy": normal_curvature_in_holonomy,
            "parallel_null_normal": float.v_fixed,
            "trivial_holonomy": float.hol.is_zero(),
            "xi_contains_v": xi_contains_v,
            "xi_invariant": float.xi_invariant,
        }),
    );
    report.insert(
        "mean_curvature".into(),
        json!({"eigenvalues": floats(&base.mean_curvature_spectrum()), "norm_sq": num(minkowski(&base.mean_curvature, &base.mean_curvature))}),
    );
    report.insert(
        "parallel_pi".into(),
        json!({
            "constant": pi.constant,
            "eigenvalues": floats(&pi.distinct_eigenvalues),
            "max_residual": num(pi.max_residual),
            "multiplicities": pi.multiplicities,
            "parallel": pi.parallel,
            "spread": num(pi.spread),
            "tolerance": num(PI_TOL),
        }),
    );
    report.insert(
        "light_cone".into(),
        light_cone.as_ref().map_or(Value::Null, |r| {
            json!({
                "max_norm_sq": num(r.max_norm_sq),
                "max_shape_defect": num(r.max_shape_defect),
                "max_transport_residual": num(r.max_transport_residual),
                "passes": r.passes(CONE_SHAPE_TOL, CONE_TRANSPORT_TOL),
                "samples": r.samples.len(),
                "loops": r.loops.len(),
            })
        }),
    );
    report.insert(
        "case_analysis".into(),
        case.as_ref().map_or(Value::Null, |c| {
            json!({
                "contradiction": c.contradiction,
                "lightlike": c.lightlike,
                "norm_sq": num(c.norm_sq),
                "shape_norm": num(c.shape_norm),
                "trace_lambda": num(c.trace_lambda),
                "umbilic_defect": num(c.umbilic_defect),
            })
        }),
    );
    report.insert("transport".into(), Value::Array(gathered.transports.iter().map(|t| t.json.clone()).collect()));
    report.insert("notes".into(), json!(notes));

    Ok(PipelineReport {
        holonomy_dim: float.hol.dim(),
        classification,
        lorentzian_type,
        xi_invariant: float.xi_invariant,
        parallel_null_normal: float.v_fixed,
        xi_contains_v,
        light_cone_passes,
        contradiction: case.map(|c| c.contradiction),
        exact,
        report: Value::Object(report),
    })
}

fn c_len_mismatch(inject: &Option<Vec<f64>>, n: usize) -> bool {
    inject.as_ref().is_some_and(|c| !c.is_empty() && c.len() != n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;
    use std::f64::consts::PI;

    #[test]
    fn flat_plane_has_trivial_holonomy() {
        let input = GeometryInput::from_json(&json!({
            "family": "affine",
            "params": {"origin": [0, 0, 0, 0], "directions": [[0, 1, 0, 0], [0, 0, 1, 0]]},
            "loops": [[[1, 1], [2, 1], [2, 2], [1, 1]]]
        }))
        .unwrap();
        let r = pipeline(&input, &PipelineOptions::default()).unwrap();
        assert_eq!(r.holonomy_dim, 0);
        assert!(r.exact);
        assert_eq!(r.report["flags"]["trivial_holonomy"], json!(true));
    }

    #[test]
    fn veronese_gets_so2_and_invariant_xi() {
        let t = 1.0;
        let mut input = GeometryInput::new(Immersion::veronese().unwrap().with_derivatives(Derivatives::Automatic), vec![t, 0.0]);
        input.loops = vec![Loop::new(vec![vec![t, 0.0], vec![t, 2.0 * PI]])];
        input.steps = 128;
        let r = pipeline(&input, &PipelineOptions { mode: Mode::Float, ..Default::default() }).unwrap();
        assert_eq!(r.holonomy_dim, 1, "{}", crate::report::to_pretty(&r.report));
        assert!(r.xi_invariant);
        assert_eq!(r.classification, "decomposable");
    }

    #[test]
    fn light_cone_section_reports_parallel_v() {
        let mut input = GeometryInput::new(Immersion::light_cone_sphere(2).unwrap(), vec![1.0, 0.3]);
        input.loops = vec![Loop::new(vec![vec![1.0, 0.3], vec![1.0, 0.3 + 2.0 * PI]])];
        input.steps = 256;
        let r = pipeline(&input, &PipelineOptions::default()).unwrap();
        assert_eq!(r.xi_contains_v, Some(true), "{}", crate::report::to_pretty(&r.report));
        assert_eq!(r.light_cone_passes, Some(true), "{}", r.report["light_cone"]);
        assert!(r.lorentzian_type.as_deref().is_none_or(|t| t == "Type2"));
    }
}
