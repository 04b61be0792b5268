//! Subcommand implementations. Each takes the parsed input document and
//! returns the report as a JSON value.

use serde_json::{json, Map, Value};

use normhol::bbi::{classify_bbi, construct_type, TypeData};
use normhol::curvature::{
    curvature_space, extract_screen_components, is_weak_berger, olmos_tensor, trace_formula, weak_curvature_space,
};
use normhol::field::with_float_tolerance;
use normhol::geometry::checks::{light_cone_check, parallel_pi_check};
use normhol::geometry::pipeline::{CONE_SHAPE_TOL, CONE_TRANSPORT_TOL, PI_TOL};
use normhol::geometry::{minkowski, parallel_transport, pipeline, point_jet, GeometryInput, Mode, PipelineOptions};
use normhol::holonomy::{borel_lichnerowicz, generate_holonomy, invariant_subspace_analysis, keylemma_check, verify_witness, BLOutcome};
use normhol::lie::{lie_closure, LieAlgebraSpan};
use normhol::linalg::{unit, Matrix};
use normhol::pseudo_euclidean::{screen_block, SignatureSpace};
use normhol::report::{floats, matrix, num, parse_algebra, parse_scalar, parse_shape_family, parse_signature, shape_family_json, vector};
use normhol::{Error, Field, Result, Q, R64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Curvature,
    Screen,
    Decompose,
    ClassifyBbi,
    WeakBerger,
    CurvatureSpace,
    Geometry,
    Pipeline,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub mode: Mode,
    pub tol: f64,
    pub seed: u64,
}

pub fn execute(cmd: Command, input: &Value, cfg: &Config) -> Result<Value> {
    let mut out = match cmd {
        Command::Geometry => geometry(input)?,
        Command::Pipeline => {
            let opts = PipelineOptions { mode: cfg.mode, tol: cfg.tol, algebra_tol: None, seed: cfg.seed };
            return Ok(pipeline(&GeometryInput::from_json(input)?, &opts)?.report);
        }
        _ => match cfg.mode {
            Mode::Exact => algebraic::<Q>(cmd, input, cfg.seed)?,
            Mode::Float => with_float_tolerance(cfg.tol, || algebraic::<R64>(cmd, input, cfg.seed))?,
        },
    };
    if let Value::Object(m) = &mut out {
        if !m.contains_key("mode") {
            let mode = if cmd == Command::Geometry { "float" } else { cfg.mode.as_str() };
            m.insert("mode".into(), json!(mode));
        }
    }
    Ok(out)
}

fn algebraic<F: Field>(cmd: Command, input: &Value, seed: u64) -> Result<Value> {
    match cmd {
        Command::Curvature => curvature::<F>(input),
        Command::Screen => screen::<F>(input),
        Command::Decompose => decompose::<F>(input, seed),
        Command::ClassifyBbi => classify::<F>(input, seed),
        Command::WeakBerger => weak_berger::<F>(input),
        Command::CurvatureSpace => tensor_spaces::<F>(input),
        Command::Geometry | Command::Pipeline => unreachable!("handled by execute"),
    }
}

fn pair_label(labels: &[String], a: usize, b: usize) -> String {
    format!("{},{}", labels[a], labels[b])
}

fn curvature<F: Field>(input: &Value) -> Result<Value> {
    let shapes = parse_shape_family::<F>(input)?;
    let space = *shapes.space();
    let r = olmos_tensor(&shapes);
    let ids = r.check_identities();
    let n = space.dim();
    let mut trace_ok = true;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    trace_ok &= r.get(a, b, c, d).sub(&trace_formula(&shapes, a, b, c, d)).is_zero();
                }
            }
        }
    }
    if !trace_ok || !ids.all() {
        // The tensor is built from symmetric shape operators, so both hold
        // for every valid input.
        return Err(Error::Internal("curvature identities failed on a valid shape family".into()));
    }
    let labels = space.labels();
    let mut ops = Map::new();
    for a in 0..n {
        for b in a + 1..n {
            let op = r.operator(a, b);
            if !op.is_zero() {
                ops.insert(pair_label(&labels, a, b), matrix(&op));
            }
        }
    }
    let hol = generate_holonomy(&space, std::slice::from_ref(&r))?;
    Ok(json!({
        "holonomy_dim": hol.dim(),
        "identities": {
            "bianchi": ids.bianchi,
            "pair_symmetry": ids.pair_symmetry,
            "skew_adjoint": ids.skew_adjoint,
            "skew_first_pair": ids.skew_first_pair,
        },
        "operators": ops,
        "signature": {"p": space.p, "q": space.q},
        "trace_formula": trace_ok,
        "zero": r.is_zero(),
    }))
}

fn screen<F: Field>(input: &Value) -> Result<Value> {
    let shapes = parse_shape_family::<F>(input)?;
    let space = *shapes.space();
    let r = olmos_tensor(&shapes);
    let comps = extract_screen_components(&r);
    let labels = space.labels();
    let q = space.q;
    let g = lie_closure(q, &comps.values())?;
    let projected = lie_closure(q, &generate_holonomy(&space, std::slice::from_ref(&r))?.basis().iter().map(|x| screen_block(&space, x)).collect::<Vec<_>>())?;
    let n = space.dim();
    let mut reconstruction = true;
    for a in 0..n {
        for b in 0..n {
            let expected = screen_block(&space, &r.operator(a, b));
            let got = comps.reconstruct(&space, &unit::<F>(n, a), &unit::<F>(n, b));
            // The expansion has no v-terms; it applies to pairs without v.
            if space.v_range().contains(&a) || space.v_range().contains(&b) {
                continue;
            }
            reconstruction &= expected.sub(&got).is_zero();
        }
    }
    let named = |rows: &[Vec<Matrix<F>>], first: &dyn Fn(usize) -> usize, second: &dyn Fn(usize) -> usize| {
        let mut m = Map::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    m.insert(pair_label(&labels, first(i), second(j)), matrix(x));
                }
            }
        }
        Value::Object(m)
    };
    Ok(json!({
        "P": named(&comps.p, &|i| space.w(i), &|j| space.e(j)),
        "P0": named(&comps.p0, &|i| space.e(i), &|j| space.e(j)),
        "Q": named(&comps.qm, &|i| space.w(i), &|j| space.w(j)),
        "projected_holonomy_dim": projected.dim(),
        "reconstruction": reconstruction,
        "screen_algebra": g.basis().iter().map(matrix).collect::<Vec<_>>(),
        "screen_algebra_dim": g.dim(),
        "span_matches_projection": g.same_span(&projected),
    }))
}

fn decompose<F: Field>(input: &Value, seed: u64) -> Result<Value> {
    let (n, gens) = parse_algebra::<F>(input)?;
    let space = match input.get("signature") {
        Some(s) => parse_signature(s)?,
        None => SignatureSpace::euclidean(n),
    };
    if space.dim() != n {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: n });
    }
    let alg = lie_closure(n, &gens)?;
    let report = invariant_subspace_analysis(&space, &alg, seed)?;
    if !verify_witness(&space.gram(), &alg, &report) {
        return Err(Error::Internal("splitting witness failed re-verification".into()));
    }
    let mut out = json!({
        "algebra_dim": alg.dim(),
        "classification": report.classification.as_str(),
        "commutant_dim": report.commutant_dim,
        "flat_dim": report.flat_part.dim(),
        "modules": report.modules.iter().map(|m| json!({
            "algebra_dim": m.algebra.dim(),
            "dim": m.subspace.dim(),
            "isotropic_dim": m.isotropic.as_ref().map(|s| s.dim()),
            "signature": [m.signature.0, m.signature.1],
            "trivial": m.trivial,
        })).collect::<Vec<_>>(),
        "signature": {"p": space.p, "q": space.q},
        "witness": report.witness.as_ref().map(|w| w.basis().iter().map(|b| vector(b)).collect::<Vec<_>>()),
    });
    if space.p == 0 {
        out["borel_lichnerowicz"] = match borel_lichnerowicz(&alg, seed)? {
            BLOutcome::Decomposition(d) => {
                if !d.verify(&alg) {
                    return Err(Error::Internal("decomposition failed re-verification".into()));
                }
                let keylemma = keylemma_check(&d)?;
                json!({
                    "bl": true,
                    "e0_dim": d.e0.dim(),
                    "ideals": d.ideals.iter().map(|i| i.dim()).collect::<Vec<_>>(),
                    "irreducible": d.irreducible,
                    "keylemma": keylemma.iter().map(|e| json!({"dim_K": e.dim_k, "nonzero": e.nonzero})).collect::<Vec<_>>(),
                    "modules": d.modules.iter().map(|m| m.dim()).collect::<Vec<_>>(),
                    "realizable": keylemma.iter().all(|e| e.nonzero),
                })
            }
            BLOutcome::NoBL(w) => json!({
                "algebra_dim": w.algebra_dim,
                "bl": false,
                "coupled_modules": w.coupled_modules,
                "element": matrix(&w.element),
                "ideals": w.ideal_dims,
                "modules": w.modules.iter().map(|m| m.dim()).collect::<Vec<_>>(),
            }),
        };
    }
    Ok(out)
}

fn type_data<F: Field>(c: &Value) -> Result<TypeData<F>> {
    let tag = c.get("type").and_then(Value::as_str).ok_or_else(|| Error::Input("construct needs \"type\"".into()))?;
    let list = |key: &str| -> Result<Vec<F>> {
        c.get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Input(format!("{tag} needs \"{key}\"")))?
            .iter()
            .map(parse_scalar)
            .collect()
    };
    Ok(match tag {
        "Type1" => TypeData::Type1,
        "Type2" => TypeData::Type2,
        "Type3" => TypeData::Type3 { phi: list("phi")? },
        "Type4" => {
            let ell = c.get("ell").and_then(Value::as_u64).ok_or_else(|| Error::Input("Type4 needs \"ell\"".into()))? as usize;
            let psi = c
                .get("psi")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Input("Type4 needs \"psi\"".into()))?
                .iter()
                .map(|row| row.as_array().ok_or_else(|| Error::Input("psi rows must be lists".into()))?.iter().map(parse_scalar).collect())
                .collect::<Result<Vec<Vec<F>>>>()?;
            TypeData::Type4 { ell, psi }
        }
        other => return Err(Error::Input(format!("unknown type {other:?}; expected Type1..Type4"))),
    })
}

fn classify<F: Field>(input: &Value, seed: u64) -> Result<Value> {
    let (m, alg, requested) = if let Some(c) = input.get("construct") {
        let m = c.get("m").and_then(Value::as_u64).ok_or_else(|| Error::Input("construct needs \"m\"".into()))? as usize;
        let g = match c.get("g") {
            Some(g) => parse_algebra::<F>(g)?.1,
            None => Vec::new(),
        };
        let data = type_data::<F>(c)?;
        (m, construct_type(m, &g, &data)?, c.get("type").cloned())
    } else {
        let (n, gens) = parse_algebra::<F>(input)?;
        if n < 2 {
            return Err(Error::Input("algebra must act on R^{1, m+1} with m >= 0".into()));
        }
        (n - 2, lie_closure(n, &gens)?, None)
    };
    let c = classify_bbi(&SignatureSpace::lorentzian(m), &alg, seed)?;
    let mut out = json!({
        "algebra_dim": alg.dim(),
        "ell": c.ell,
        "full": c.full,
        "m": c.m,
        "null_vector": c.null_vector.as_ref().map(|v| vector(v)),
        "phi": c.phi.as_ref().map(|v| vector(v)),
        "psi": c.psi.as_ref().map(|rows| rows.iter().map(|r| vector(r)).collect::<Vec<_>>()),
        "screen_algebra_dim": c.g.dim(),
        "type": c.tag.as_str(),
    });
    if let Some(t) = requested {
        if t.as_str() != Some(c.tag.as_str()) {
            return Err(Error::Internal(format!("constructed {t} but classified as {}", c.tag.as_str())));
        }
        out["constructed"] = t;
    }
    Ok(out)
}

fn weak_berger<F: Field>(input: &Value) -> Result<Value> {
    let (q, gens) = parse_algebra::<F>(input)?;
    let basis = LieAlgebraSpan::span_of(q, &gens).basis();
    let r = is_weak_berger(q, &basis)?;
    Ok(json!({
        "algebra_dim": r.algebra_dim,
        "dim_B": r.dim_b,
        "is_weak_berger": r.is_weak_berger,
        "q": q,
        "span_dim": r.span_dim,
    }))
}

fn tensor_spaces<F: Field>(input: &Value) -> Result<Value> {
    let (q, gens) = parse_algebra::<F>(input)?;
    let alg = LieAlgebraSpan::span_of(q, &gens);
    alg.ensure_closed()?;
    let basis = alg.basis();
    Ok(json!({
        "algebra_dim": alg.dim(),
        "dim_B": weak_curvature_space(q, &basis)?.dim(),
        "dim_K": curvature_space(q, &basis)?.dim(),
        "q": q,
    }))
}

/// Jets at `"points"` (default: `"base"`), transports of the adapted frame
/// of the first point around `"loops"`, and the geometric checks.
fn geometry(input: &Value) -> Result<Value> {
    let g = GeometryInput::from_json(input)?;
    let imm = &g.immersion;
    let points = match input.get("points") {
        Some(p) => normhol::geometry::immersion::points_from_json(p, imm.parameter_dim)?,
        None => vec![g.base.clone()],
    };
    let mut jets = Vec::new();
    for u in &points {
        let jet = point_jet(imm, u)?;
        jets.push(json!({
            "mean_curvature": floats(&jet.mean_curvature),
            "mean_curvature_eigenvalues": floats(&jet.mean_curvature_spectrum()),
            "mean_curvature_norm_sq": num(minkowski(&jet.mean_curvature, &jet.mean_curvature)),
            "metric": jet.metric.iter().map(|r| floats(r)).collect::<Vec<_>>(),
            "parameter": floats(u),
            "point": floats(&jet.point),
            "shape_family": shape_family_json(&jet.shapes),
        }));
    }
    let base = point_jet(imm, &g.base)?;
    let mut transports = Vec::new();
    for l in &g.loops {
        let t = parallel_transport(imm, &base, l, g.steps)?;
        transports.push(json!({
            "normal_leak": num(t.normal_leak),
            "residual": num(t.residual),
            "steps": t.steps,
            "tau": matrix(&t.tau),
        }));
    }
    let pi = parallel_pi_check(imm, &g.samples, PI_TOL)?;
    let x = imm.point(&g.base);
    let on_cone = minkowski(&x, &x).abs() <= normhol::geometry::checks::CONE_TOL * x.iter().fold(1.0f64, |m, y| m.max(y.abs())).powi(2);
    let light_cone = if on_cone {
        let r = light_cone_check(imm, &g.samples, &g.loops, g.steps)?;
        json!({
            "max_norm_sq": num(r.max_norm_sq),
            "max_shape_defect": num(r.max_shape_defect),
            "max_transport_residual": num(r.max_transport_residual),
            "passes": r.passes(CONE_SHAPE_TOL, CONE_TRANSPORT_TOL),
        })
    } else {
        Value::Null
    };
    Ok(json!({
        "immersion": {
            "ambient_signature": [1, imm.ambient_dim],
            "derivatives": imm.derivatives.as_str(),
            "family": imm.family.name(),
            "parameter_dim": imm.parameter_dim,
            "step": num(imm.h),
        },
        "jets": jets,
        "light_cone": light_cone,
        "parallel_pi": {
            "constant": pi.constant,
            "eigenvalues": floats(&pi.distinct_eigenvalues),
            "max_residual": num(pi.max_residual),
            "multiplicities": pi.multiplicities,
            "parallel": pi.parallel,
        },
        "transport": transports,
    }))
}
