//! Analysis reports and file outputs: JSON report, per-sample CSV and OBJ
//! meshes.

use std::io::{self, Write};

use nalgebra::Vector3;
use serde::Serialize;

use crate::derived::{self, DerivedKind};
use crate::frame::{self, FrameField};
use crate::odecheck::{self, ResidualReport};
use crate::slant::{self, FrameVector, SlantReport, Verdict};
use crate::{Result, RuledSurfaceSpec, Tolerances};

pub const TOOL_NAME: &str = "ruled-slant";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the analyzed surface came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecEcho {
    pub preset: Option<String>,
    pub theta: Option<f64>,
    pub c: Option<f64>,
    pub base: String,
    pub director: String,
    pub u_min: f64,
    pub u_max: f64,
    pub n_samples: usize,
}

impl SpecEcho {
    pub fn of(spec: &RuledSurfaceSpec) -> Self {
        Self {
            preset: None,
            theta: None,
            c: None,
            base: spec.base.describe(),
            director: spec.director.describe(),
            u_min: spec.u_min,
            u_max: spec.u_max,
            n_samples: spec.n_samples,
        }
    }

    pub fn with_preset(mut self, name: &str, theta: Option<f64>, c: Option<f64>) -> Self {
        self.preset = Some(name.to_string());
        self.theta = theta;
        self.c = c;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
}

impl Stats {
    /// `None` for an empty slice.
    pub fn of(xs: &[f64]) -> Option<Stats> {
        if xs.is_empty() {
            return None;
        }
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Stats {
            min,
            max,
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            spread: max - min,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSummary {
    pub samples: usize,
    pub arc_length_sq: f64,
    pub kappa_q: Option<Stats>,
    pub kappa_q_prime: Option<Stats>,
    pub sigma: Option<Stats>,
    pub kappa_q_negative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedSummary {
    pub kind: DerivedKind,
    pub kappa: Option<Stats>,
    pub ds_ratio: Option<Stats>,
    /// Samples where the derived frame is undefined.
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Consistency {
    pub q_group_satisfied: bool,
    pub h_group_satisfied: bool,
    pub q_slant: Verdict,
    pub h_slant: Verdict,
    pub disagreement: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub spec: SpecEcho,
    pub tolerances: Tolerances,
    pub summary: FieldSummary,
    pub derived: Vec<DerivedSummary>,
    pub slant: SlantReport,
    pub ode_residuals: Vec<ResidualReport>,
    pub consistency: Consistency,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs frame, derived, slant and residual analyses on `spec`.
pub fn analyze(spec: &RuledSurfaceSpec, echo: SpecEcho, tol: &Tolerances) -> Result<(AnalysisReport, FrameField)> {
    let field = frame::analyze(spec, tol)?;
    let report = report_for(&field, echo)?;
    Ok((report, field))
}

pub fn report_for(field: &FrameField, echo: SpecEcho) -> Result<AnalysisReport> {
    let tol = field.tolerances;
    let slant = slant::classify(field, tol.tol_abs, tol.tol_rel)?;
    let ode_residuals = odecheck::residual_profiles(field, tol.ode_tol)?;

    let kappa = field.kappa();
    let kappa_prime: Vec<f64> = field.samples.iter().map(|s| s.kappa_q_prime).collect();
    let kappa_q_negative = kappa.iter().any(|&k| k < 0.0);
    let summary = FieldSummary {
        samples: field.len(),
        arc_length_sq: field.samples.last().map_or(0.0, |s| s.s_q),
        kappa_q: Stats::of(&kappa),
        kappa_q_prime: Stats::of(&kappa_prime),
        sigma: Stats::of(&slant.sigma_values),
        kappa_q_negative,
    };
    let derived = [DerivedKind::H, DerivedKind::A]
        .into_iter()
        .map(|kind| {
            let frames: Vec<_> = field
                .samples
                .iter()
                .filter_map(|s| derived::derived_apparatus(s, kind, tol.eps_ka).ok())
                .collect();
            let k: Vec<f64> = frames.iter().map(|f| f.kappa).collect();
            let r: Vec<f64> = frames.iter().map(|f| f.ds_ratio).collect();
            DerivedSummary {
                kind,
                kappa: Stats::of(&k),
                ds_ratio: Stats::of(&r),
                excluded: field.len() - frames.len(),
            }
        })
        .collect();

    let group = |v: FrameVector| {
        ode_residuals
            .iter()
            .filter(|r| r.kind.characterizes() == v)
            .all(|r| r.satisfied)
    };
    let q_group_satisfied = group(FrameVector::Q);
    let h_group_satisfied = group(FrameVector::H);
    let mut notes = Vec::new();
    if q_group_satisfied != (slant.q_slant.verdict == Verdict::Yes) {
        notes.push(format!(
            "q-slant verdict {:?} but q-group residuals satisfied = {q_group_satisfied}",
            slant.q_slant.verdict
        ));
    }
    if h_group_satisfied != (slant.h_slant.verdict == Verdict::Yes) {
        notes.push(format!(
            "h-slant verdict {:?} but h-group residuals satisfied = {h_group_satisfied}",
            slant.h_slant.verdict
        ));
    }
    if kappa_q_negative {
        notes.push("kappa_q < 0 somewhere: the S_a frame uses h_a = -sign(kappa_q) h and kappa_a = 1/|kappa_q|".into());
    }
    let excluded: usize = ode_residuals.iter().map(|r| r.excluded).max().unwrap_or(0);
    if excluded > 0 {
        notes.push(format!(
            "{excluded} samples with |kappa_q| < eps_ka excluded from the S_a residuals"
        ));
    }
    let disagreement = q_group_satisfied != (slant.q_slant.verdict == Verdict::Yes)
        || h_group_satisfied != (slant.h_slant.verdict == Verdict::Yes);

    Ok(AnalysisReport {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        spec: echo,
        tolerances: tol,
        summary,
        derived,
        consistency: Consistency {
            q_group_satisfied,
            h_group_satisfied,
            q_slant: slant.q_slant.verdict,
            h_slant: slant.h_slant.verdict,
            disagreement,
            notes,
        },
        slant,
        ode_residuals,
    })
}

pub const CSV_HEADER: &str = "u,s_q,qx,qy,qz,hx,hy,hz,ax,ay,az,kappa_q,kappa_q_prime,speed,cx,cy,cz,\
h_qx,h_qy,h_qz,h_hx,h_hy,h_hz,h_ax,h_ay,h_az,h_kappa,h_ds_ratio,\
a_qx,a_qy,a_qz,a_hx,a_hy,a_hz,a_ax,a_ay,a_az,a_kappa,a_ds_ratio";

/// One row per sample; `S_a` columns are empty where `|κ_q| < eps_ka`.
pub fn write_csv(field: &FrameField, mut w: impl Write) -> io::Result<()> {
    fn push(row: &mut Vec<String>, v: &Vector3<f64>) {
        row.extend(v.iter().map(|x| format!("{x:?}")));
    }
    writeln!(w, "{CSV_HEADER}")?;
    for s in &field.samples {
        let mut row: Vec<String> = [s.u, s.s_q].iter().map(|x| format!("{x:?}")).collect();
        push(&mut row, &s.q);
        push(&mut row, &s.h);
        push(&mut row, &s.a);
        row.extend([s.kappa_q, s.kappa_q_prime, s.speed].iter().map(|x| format!("{x:?}")));
        push(&mut row, &s.striction_point);
        for kind in [DerivedKind::H, DerivedKind::A] {
            match derived::derived_apparatus(s, kind, field.tolerances.eps_ka) {
                Ok(f) => {
                    push(&mut row, &f.q);
                    push(&mut row, &f.h);
                    push(&mut row, &f.a);
                    row.push(format!("{:?}", f.kappa));
                    row.push(format!("{:?}", f.ds_ratio));
                }
                Err(_) => row.extend(std::iter::repeat_n(String::new(), 11)),
            }
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Triangulated patch of a ruled surface and its striction curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mesh {
    pub nu: usize,
    pub nv: usize,
    /// Row-major in `u`: vertex `i * nv + j` is `r(u_i, v_j)`.
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices.
    pub triangles: Vec<[usize; 3]>,
    pub striction: Vec<[f64; 3]>,
}

/// Samples `r(u, v) = f(u) + v q̂(u)` on `nu × nv` points with
/// `v ∈ [-v_max, v_max]`.
pub fn build_mesh(spec: &RuledSurfaceSpec, v_max: f64, nu: usize, nv: usize, tol: &Tolerances) -> Result<Mesh> {
    if nu < 2 || nv < 2 || !(v_max > 0.0 && v_max.is_finite()) {
        return Err(crate::Error::InvalidSpec(format!(
            "mesh needs nu >= 2, nv >= 2 and a positive v range, got nu = {nu}, nv = {nv}, vmax = {v_max}"
        )));
    }
    let grid = spec.with_samples(nu)?.grid();
    let rows = crate::par_map(&grid, |&u| -> Result<(Vec<[f64; 3]>, [f64; 3])> {
        let c = frame::striction_point(spec, u, tol)?;
        let row = (0..nv)
            .map(|j| {
                let v = -v_max + 2.0 * v_max * j as f64 / (nv - 1) as f64;
                spec.point(u, v).map(|p| p.into())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((row, c.into()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut vertices = Vec::with_capacity(nu * nv);
    let mut striction = Vec::with_capacity(nu);
    for (row, c) in rows {
        vertices.extend(row);
        striction.push(c);
    }
    let mut triangles = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
    for i in 0..nu - 1 {
        for j in 0..nv - 1 {
            let a = i * nv + j;
            let b = a + nv;
            triangles.push([a, b, b + 1]);
            triangles.push([a, b + 1, a + 1]);
        }
    }
    Ok(Mesh {
        nu,
        nv,
        vertices,
        triangles,
        striction,
    })
}

impl Mesh {
    /// Surface vertices, then striction vertices, triangles and one polyline.
    pub fn write_obj(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "# {TOOL_NAME} {TOOL_VERSION}")?;
        writeln!(w, "# surface {} x {}", self.nu, self.nv)?;
        for p in &self.vertices {
            writeln!(w, "v {:?} {:?} {:?}", p[0], p[1], p[2])?;
        }
        writeln!(w, "# striction curve")?;
        for p in &self.striction {
            writeln!(w, "v {:?} {:?} {:?}", p[0], p[1], p[2])?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        let first = self.vertices.len() + 1;
        let line: Vec<String> = (first..first + self.striction.len()).map(|i| i.to_string()).collect();
        writeln!(w, "l {}", line.join(" "))
    }
}
