//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings; the plain Rust functions
//! behind them are usable (and tested) natively.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use ruled_slant::odecheck::{self, OdeKind};
use ruled_slant::report::{build_mesh, Mesh};
use ruled_slant::slant::{self, Verdict};
use ruled_slant::synth::{self, CurvatureProfile, Preset, PresetParams, Triad};
use ruled_slant::{frame, Curve, RuledSurfaceSpec, Tolerances};

/// Surface selection sent by the page.
#[derive(Clone, Debug, Deserialize)]
pub struct SurfaceInput {
    pub preset: Option<String>,
    pub theta: Option<f64>,
    pub c: Option<f64>,
    #[serde(default)]
    pub base: String,
    #[serde(default)]
    pub director: String,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
    pub n: usize,
}

impl SurfaceInput {
    fn spec(&self) -> Result<RuledSurfaceSpec, String> {
        if let Some(name) = self.preset.as_deref().filter(|p| !p.is_empty()) {
            let params = PresetParams {
                theta: self.theta,
                c: self.c,
            };
            let mut preset = synth::gallery(name, &params).map_err(|e| e.to_string())?;
            if let (Some(lo), Some(hi)) = (self.u_min, self.u_max) {
                preset = preset.with_range(lo, hi).map_err(|e| e.to_string())?;
            }
            return preset.to_spec(self.n).map_err(|e| e.to_string());
        }
        let base = if self.base.trim().is_empty() {
            "0, 0, 0"
        } else {
            &self.base
        };
        let (lo, hi) = (self.u_min.unwrap_or(0.0), self.u_max.unwrap_or(1.0));
        RuledSurfaceSpec::new(
            Curve::parse(base).map_err(|e| format!("base: {e}"))?,
            Curve::parse(&self.director).map_err(|e| format!("director: {e}"))?,
            lo,
            hi,
            self.n,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct ResidualSummary {
    pub kind: OdeKind,
    pub max_norm: f64,
    pub satisfied: bool,
    pub excluded: usize,
}

#[derive(Debug, Serialize)]
pub struct AnalysisView {
    pub u: Vec<f64>,
    pub s_q: Vec<f64>,
    pub kappa_q: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Spherical image of the director.
    pub q: Vec<[f64; 3]>,
    pub q_slant: Verdict,
    pub h_slant: Verdict,
    pub a_slant: Verdict,
    pub axis: Option<[f64; 3]>,
    pub theta: Option<f64>,
    pub residuals: Vec<ResidualSummary>,
}

pub fn analyze_surface(input: &SurfaceInput) -> Result<AnalysisView, String> {
    let spec = input.spec()?;
    let tol = Tolerances::default();
    let field = frame::analyze(&spec, &tol).map_err(|e| e.to_string())?;
    let report = slant::classify(&field, tol.tol_abs, tol.tol_rel).map_err(|e| e.to_string())?;
    let residuals = odecheck::residual_profiles(&field, tol.ode_tol)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| ResidualSummary {
            kind: r.kind,
            max_norm: r.max_norm,
            satisfied: r.satisfied,
            excluded: r.excluded,
        })
        .collect();
    Ok(AnalysisView {
        u: field.samples.iter().map(|s| s.u).collect(),
        s_q: field.samples.iter().map(|s| s.s_q).collect(),
        kappa_q: field.kappa(),
        q: field.samples.iter().map(|s| s.q.into()).collect(),
        sigma: report.sigma_values.clone(),
        q_slant: report.q_slant.verdict,
        h_slant: report.h_slant.verdict,
        a_slant: report.a_slant.verdict,
        axis: report.axis.map(Into::into),
        theta: report.theta,
        residuals,
    })
}

pub fn mesh_surface(input: &SurfaceInput, v_max: f64, nu: usize, nv: usize) -> Result<Mesh, String> {
    let spec = input.spec()?;
    build_mesh(&spec, v_max, nu, nv, &Tolerances::default()).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct SynthView {
    pub s: Vec<f64>,
    pub kappa_q: Vec<f64>,
    pub q: Vec<[f64; 3]>,
    pub round_trip_error: f64,
    pub max_gram_defect_after: f64,
}

pub fn synthesize_profile(kappa: &str, s_min: f64, s_max: f64, steps: usize) -> Result<SynthView, String> {
    let profile = CurvatureProfile::parse(kappa, s_min, s_max, "demo").map_err(|e| e.to_string())?;
    let field = synth::integrate_frenet(&profile, &Triad::identity(), steps).map_err(|e| e.to_string())?;
    let round_trip_error = synth::round_trip_error(&field).map_err(|e| e.to_string())?;
    let samples = &field.field.samples;
    Ok(SynthView {
        s: samples.iter().map(|s| s.u).collect(),
        kappa_q: samples.iter().map(|s| s.kappa_q).collect(),
        q: samples.iter().map(|s| s.q.into()).collect(),
        round_trip_error,
        max_gram_defect_after: field.max_gram_defect_after,
    })
}

/// Preset names with their kind, for the page's selector.
pub fn preset_list() -> Vec<(&'static str, &'static str)> {
    synth::PRESET_NAMES
        .iter()
        .map(|&name| {
            let kind = match synth::gallery(name, &PresetParams::default()) {
                Ok(Preset::Profile(_)) => "profile",
                _ => "surface",
            };
            (name, kind)
        })
        .collect()
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

fn parse_input(json: &str) -> Result<SurfaceInput, String> {
    serde_json::from_str(json).map_err(|e| format!("bad request: {e}"))
}

#[wasm_bindgen]
pub fn analyze(input_json: &str) -> Result<String, JsValue> {
    to_js(parse_input(input_json).and_then(|i| analyze_surface(&i)))
}

#[wasm_bindgen]
pub fn mesh(input_json: &str, v_max: f64, nu: usize, nv: usize) -> Result<String, JsValue> {
    to_js(parse_input(input_json).and_then(|i| mesh_surface(&i, v_max, nu, nv)))
}

#[wasm_bindgen]
pub fn synthesize(kappa: &str, s_min: f64, s_max: f64, steps: usize) -> Result<String, JsValue> {
    to_js(synthesize_profile(kappa, s_min, s_max, steps))
}

#[wasm_bindgen]
pub fn presets() -> String {
    serde_json::to_string(&preset_list()).expect("static list serializes")
}
