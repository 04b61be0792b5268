//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers or strings and returns a pretty-printed
//! JSON report. The `*_report` functions hold the logic and are usable from
//! native code; the exported wrappers only convert errors into JavaScript
//! exceptions.

use std::f64::consts::PI;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use normhol::bbi::{classify_bbi, construct_type, TypeData};
use normhol::curvature::{curvature_space, is_weak_berger, so_basis, weak_curvature_space};
use normhol::geometry::{parallel_transport, point_jet, Derivatives, Immersion, Loop};
use normhol::linalg::Matrix;
use normhol::pseudo_euclidean::SignatureSpace;
use normhol::report::{num, to_pretty, vector};
use normhol::{Error, Field, Result, Q};

/// `so(g)` acting on the first `g` of `size` coordinates.
fn screen_algebra(g: usize, size: usize) -> Result<Vec<Matrix<Q>>> {
    if !matches!(g, 0 | 2 | 3) {
        return Err(Error::Input(format!("screen algebra must be 0, so(2) or so(3), got {g}")));
    }
    if g > size {
        return Err(Error::Input(format!("so({g}) does not act on {size} screen directions")));
    }
    let basis: Vec<Matrix<Q>> = if g == 0 { Vec::new() } else { so_basis(g) };
    Ok(basis
        .iter()
        .map(|b| Matrix::from_fn(size, size, |i, j| if i < g && j < g { b.get(i, j).clone() } else { Q::zero() }))
        .collect())
}

/// Builds the algebra of type `tag` on `ℝ^{1,m+1}` from the screen algebra
/// `g` (`0` for the zero algebra, `2` or `3` for `so(2)`, `so(3)`) and
/// classifies it again.
///
/// Type 3 uses `φ = 1` on every generator and Type 4 lets `g` act on the
/// first `ℓ = dim` screen directions with `ψ` sending every generator to
/// the first remaining direction; both need an abelian `g`.
pub fn classify_report(tag: &str, m: usize, g: usize) -> Result<Value> {
    let gens = screen_algebra(g, if tag == "Type4" { g } else { m })?;
    let data = match tag {
        "Type1" => TypeData::Type1,
        "Type2" => TypeData::Type2,
        "Type3" => TypeData::Type3 { phi: vec![Q::one(); gens.len()] },
        "Type4" => {
            if m <= g {
                return Err(Error::Input(format!("Type4 with so({g}) needs m > {g}")));
            }
            let mut psi = vec![Q::zero(); m - g];
            psi[0] = Q::one();
            TypeData::Type4 { ell: g, psi: vec![psi; gens.len()] }
        }
        other => return Err(Error::Input(format!("unknown type {other:?}"))),
    };
    let alg = construct_type(m, &gens, &data)?;
    let c = classify_bbi(&SignatureSpace::lorentzian(m), &alg, 0xB10C)?;
    Ok(json!({
        "algebra_dim": alg.dim(),
        "constructed": tag,
        "m": m,
        "null_vector": c.null_vector.as_ref().map(|v| vector(v)),
        "recovered": c.tag.as_str() == tag,
        "screen_algebra_dim": c.g.dim(),
        "type": c.tag.as_str(),
    }))
}

/// Rotation angle in `[0, π]` of an orthogonal map that fixes all but one
/// plane.
fn plane_rotation_angle(trace: f64, dim: usize) -> f64 {
    ((trace - (dim as f64 - 2.0)) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Normal holonomy of the Veronese surface around the latitude circle at
/// polar angle `polar`, integrated with `steps` Runge-Kutta steps.
///
/// The transport rotates one normal plane; the expected angle is twice the
/// enclosed spherical area, reduced to `[0, π]`.
pub fn veronese_report(polar: f64, steps: usize) -> Result<Value> {
    if !(polar > 0.0 && polar < PI) {
        return Err(Error::Input("polar angle must lie strictly between 0 and π".into()));
    }
    if steps == 0 {
        return Err(Error::Input("steps must be positive".into()));
    }
    let imm = Immersion::veronese()?.with_derivatives(Derivatives::Automatic);
    let base = point_jet(&imm, &[polar, 0.0])?;
    let path = Loop::new(vec![vec![polar, 0.0], vec![polar, 2.0 * PI]]);
    let t = parallel_transport(&imm, &base, &path, steps)?;
    let n = t.tau.rows();
    let trace: f64 = (0..n).map(|i| t.tau.get(i, i).0).sum();
    let area = 2.0 * PI * (1.0 - polar.cos());
    let folded = (2.0 * area).rem_euclid(2.0 * PI);
    let expected = if folded > PI { 2.0 * PI - folded } else { folded };
    let angle = plane_rotation_angle(trace, n);
    Ok(json!({
        "angle": num(angle),
        "enclosed_area": num(area),
        "error": num((angle - expected).abs()),
        "expected": num(expected),
        "gram_residual": num(t.residual),
        "steps": steps,
    }))
}

/// Dimensions of `K(so(n))` and `B(so(n))` and the weak Berger test.
pub fn tensor_space_report(n: usize) -> Result<Value> {
    if !(2..=5).contains(&n) {
        return Err(Error::Input("n must be between 2 and 5".into()));
    }
    let basis: Vec<_> = so_basis::<Q>(n);
    Ok(json!({
        "algebra_dim": basis.len(),
        "dim_B": weak_curvature_space(n, &basis)?.dim(),
        "dim_K": curvature_space(n, &basis)?.dim(),
        "is_weak_berger": is_weak_berger(n, &basis)?.is_weak_berger,
        "n": n,
    }))
}

fn export(r: Result<Value>) -> std::result::Result<String, JsError> {
    r.map(|v| to_pretty(&v)).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn classify(tag: &str, m: usize, g: usize) -> std::result::Result<String, JsError> {
    export(classify_report(tag, m, g))
}

#[wasm_bindgen]
pub fn veronese_holonomy(polar: f64, steps: usize) -> std::result::Result<String, JsError> {
    export(veronese_report(polar, steps))
}

#[wasm_bindgen]
pub fn tensor_spaces(n: usize) -> std::result::Result<String, JsError> {
    export(tensor_space_report(n))
}
