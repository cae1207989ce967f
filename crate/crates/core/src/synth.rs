//! Frame fields of prescribed conical curvature, obtained by integrating
//!
//! ```text
//! q' = h,   h' = -q + κ_q(s) a,   a' = -κ_q(s) h
//! ```
//!
//! with classical RK4 and modified Gram–Schmidt after every step, and the
//! preset gallery used throughout the tests.
//!
//! The integrated director is turned back into a [`RuledSurfaceSpec`] (a cone
//! with apex at the origin) through a [`TaylorCurve`]: at every knot the
//! Taylor coefficients of `q` follow from the frame at the knot and the
//! Taylor coefficients of `κ_q` by the same recurrence, so the reconstructed
//! director has accurate derivatives of every order the analysis needs.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::curve::{Curve, RuledSurfaceSpec, SampledCurve, TaylorCurve};
use crate::expr::{self, eval_jet, eval_value, Expr, MAX_ORDER};
use crate::frame::{FrameField, FrameJets, FrenetSample};
use crate::{Error, Result, Tolerances};

pub const MIN_STEPS: usize = 16;

/// Integration steps per analysis-grid interval for profile presets, so the
/// analysis grid lands on integration knots.
pub const STEPS_PER_SAMPLE: usize = 8;

/// Default analysis grid size of the gallery.
pub const DEFAULT_SAMPLES: usize = 256;

/// Conical curvature as a function of the spherical arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureProfile {
    pub expr: Expr,
    pub s_min: f64,
    pub s_max: f64,
    pub description: String,
}

impl CurvatureProfile {
    pub fn parse(text: &str, s_min: f64, s_max: f64, description: impl Into<String>) -> Result<Self> {
        if !(s_min.is_finite() && s_max.is_finite() && s_min < s_max) {
            return Err(Error::InvalidSpec(format!("profile range [{s_min}, {s_max}] is empty")));
        }
        Ok(Self {
            expr: expr::parse_expression(text)?,
            s_min,
            s_max,
            description: description.into(),
        })
    }

    pub fn kappa(&self, s: f64) -> Result<f64> {
        Ok(eval_value(&self.expr, s)?)
    }
}

/// An orthonormal right-handed triple `{q, h, a}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Triad {
    pub q: Vector3<f64>,
    pub h: Vector3<f64>,
    pub a: Vector3<f64>,
}

impl Triad {
    pub fn identity() -> Self {
        Self {
            q: Vector3::x(),
            h: Vector3::y(),
            a: Vector3::z(),
        }
    }

    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        Self {
            q: r * self.q,
            h: r * self.h,
            a: r * self.a,
        }
    }

    fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.q, self.h, self.a])
    }

    /// Max entry of `|GᵀG - I|` for `G = [q h a]`.
    pub fn gram_defect(&self) -> f64 {
        let g = self.matrix();
        (g.transpose() * g - Matrix3::identity()).abs().max()
    }

    fn orthonormalized(&self) -> Self {
        let q = self.q.normalize();
        let h = (self.h - q * q.dot(&self.h)).normalize();
        let a = self.a - q * q.dot(&self.a);
        let a = (a - h * h.dot(&a)).normalize();
        Self { q, h, a }
    }

    fn axpy(&self, k: f64, d: &Triad) -> Triad {
        Triad {
            q: self.q + d.q * k,
            h: self.h + d.h * k,
            a: self.a + d.a * k,
        }
    }
}

fn frenet_rhs(kappa: f64, f: &Triad) -> Triad {
    Triad {
        q: f.h,
        h: -f.q + f.a * kappa,
        a: -f.h * kappa,
    }
}

#[derive(Clone, Debug)]
pub struct SynthesizedField {
    /// Samples at every integration knot; `u = s_q + s_min`, unit speed,
    /// striction point at the origin.
    pub field: FrameField,
    pub profile: CurvatureProfile,
    pub initial: Triad,
    pub step: f64,
    /// Max Gram defect after an RK4 step, before re-orthonormalization.
    pub max_gram_defect_before: f64,
    /// Max Gram defect after re-orthonormalization.
    pub max_gram_defect_after: f64,
}

impl SynthesizedField {
    /// The reconstructed cone, analyzed on `n_samples` points.
    pub fn spec(&self, n_samples: usize) -> Result<RuledSurfaceSpec> {
        self.field.spec.with_samples(n_samples)
    }

    pub fn triads(&self) -> Vec<Triad> {
        self.field
            .samples
            .iter()
            .map(|s| Triad { q: s.q, h: s.h, a: s.a })
            .collect()
    }
}

pub fn integrate_frenet(profile: &CurvatureProfile, initial: &Triad, n_steps: usize) -> Result<SynthesizedField> {
    if n_steps < MIN_STEPS {
        return Err(Error::InvalidSpec(format!(
            "integration needs at least {MIN_STEPS} steps, got {n_steps}"
        )));
    }
    if initial.gram_defect() > 1e-12 || initial.q.cross(&initial.h).dot(&initial.a) < 0.0 {
        return Err(Error::InvalidSpec(
            "initial frame is not orthonormal and right-handed".into(),
        ));
    }
    let step = (profile.s_max - profile.s_min) / n_steps as f64;
    let knot = |i: usize| {
        if i == n_steps {
            profile.s_max
        } else {
            profile.s_min + step * i as f64
        }
    };

    let mut frames = Vec::with_capacity(n_steps + 1);
    frames.push(*initial);
    let mut defect_before: f64 = 0.0;
    let mut defect_after: f64 = 0.0;
    let mut f = *initial;
    for i in 0..n_steps {
        let s = knot(i);
        let h = knot(i + 1) - s;
        let k_start = profile.kappa(s)?;
        let k_mid = profile.kappa(s + 0.5 * h)?;
        let k_end = profile.kappa(s + h)?;
        let d1 = frenet_rhs(k_start, &f);
        let d2 = frenet_rhs(k_mid, &f.axpy(0.5 * h, &d1));
        let d3 = frenet_rhs(k_mid, &f.axpy(0.5 * h, &d2));
        let d4 = frenet_rhs(k_end, &f.axpy(h, &d3));
        let next = Triad {
            q: f.q + (d1.q + d2.q * 2.0 + d3.q * 2.0 + d4.q) * (h / 6.0),
            h: f.h + (d1.h + d2.h * 2.0 + d3.h * 2.0 + d4.h) * (h / 6.0),
            a: f.a + (d1.a + d2.a * 2.0 + d3.a * 2.0 + d4.a) * (h / 6.0),
        };
        defect_before = defect_before.max(next.gram_defect());
        f = next.orthonormalized();
        defect_after = defect_after.max(f.gram_defect());
        frames.push(f);
    }

    let mut coeffs = Vec::with_capacity(frames.len());
    let mut samples = Vec::with_capacity(frames.len());
    for (i, fr) in frames.iter().enumerate() {
        let s = knot(i);
        let kj = eval_jet(&profile.expr, s, MAX_ORDER - 1)?;
        coeffs.push(director_series(fr, kj.coefficients()));
        samples.push(FrenetSample {
            u: s,
            s_q: s - profile.s_min,
            q: fr.q,
            h: fr.h,
            a: fr.a,
            kappa_q: kj.value(),
            kappa_q_prime: kj.derivative(1),
            speed: 1.0,
            striction_point: Vector3::zeros(),
        });
    }
    let director = Curve::Taylor(TaylorCurve::new(profile.s_min, step, coeffs)?);
    let spec = RuledSurfaceSpec::new(Curve::origin(), director, profile.s_min, profile.s_max, n_steps + 1)?;
    Ok(SynthesizedField {
        field: FrameField {
            spec,
            tolerances: Tolerances::default(),
            samples,
        },
        profile: profile.clone(),
        initial: *initial,
        step,
        max_gram_defect_before: defect_before,
        max_gram_defect_after: defect_after,
    })
}

/// Taylor coefficients of `q` about a knot from the frame there and the
/// Taylor coefficients of `κ_q`.
fn director_series(f: &Triad, kappa: &[f64]) -> Vec<Vector3<f64>> {
    let n = kappa.len();
    let mut q = vec![f.q];
    let mut h = vec![f.h];
    let mut a = vec![f.a];
    for k in 0..n {
        let scale = 1.0 / (k + 1) as f64;
        let mut ka = Vector3::zeros();
        let mut kh = Vector3::zeros();
        for j in 0..=k {
            ka += a[k - j] * kappa[j];
            kh += h[k - j] * kappa[j];
        }
        let qn = h[k] * scale;
        let hn = (ka - q[k]) * scale;
        let an = -kh * scale;
        q.push(qn);
        h.push(hn);
        a.push(an);
    }
    q
}

/// Recomputes `κ_q` at every knot from the integrated directors alone,
/// through a piecewise-quintic interpolant of the knot values.
pub fn recompute_curvature(field: &SynthesizedField) -> Result<Vec<f64>> {
    let points: Vec<_> = field.field.samples.iter().map(|s| s.q).collect();
    let director = Curve::Sampled(SampledCurve::new(field.profile.s_min, field.step, points)?);
    let spec = RuledSurfaceSpec::new(
        Curve::origin(),
        director,
        field.profile.s_min,
        field.profile.s_max,
        field.field.samples.len(),
    )?;
    let tol = Tolerances::default();
    field
        .field
        .samples
        .iter()
        .map(|s| FrameJets::at(&spec, s.u, 2, &tol).map(|j| j.kappa.value()))
        .collect()
}

/// Max `|κ_recomputed - κ_profile|` over the knots.
pub fn round_trip_error(field: &SynthesizedField) -> Result<f64> {
    let recomputed = recompute_curvature(field)?;
    Ok(field
        .field
        .samples
        .iter()
        .zip(recomputed)
        .map(|(s, k)| (s.kappa_q - k).abs())
        .fold(0.0, f64::max))
}

pub const PRESET_NAMES: [&str; 5] = [
    "helicoid",
    "cone-theta",
    "slant-family-c",
    "quadratic",
    "nonslant-mixed",
];

/// Optional preset parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PresetParams {
    /// Polar angle of the small-circle director of `cone-theta`.
    pub theta: Option<f64>,
    /// Constant `κ_h` of `slant-family-c`.
    pub c: Option<f64>,
}

pub const DEFAULT_THETA: f64 = FRAC_PI_4;
pub const DEFAULT_C: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub enum Preset {
    Surface(RuledSurfaceSpec),
    Profile(CurvatureProfile),
}

impl Preset {
    /// The preset as a ruled surface analyzed on `n_samples` points; profiles
    /// are integrated from the identity frame with [`STEPS_PER_SAMPLE`] steps
    /// per grid interval.
    pub fn to_spec(&self, n_samples: usize) -> Result<RuledSurfaceSpec> {
        match self {
            Preset::Surface(spec) => spec.with_samples(n_samples),
            Preset::Profile(p) => {
                if n_samples < 3 {
                    return Err(Error::InvalidSpec(format!(
                        "n_samples must be at least 3, got {n_samples}"
                    )));
                }
                let steps = (STEPS_PER_SAMPLE * (n_samples - 1)).max(MIN_STEPS);
                integrate_frenet(p, &Triad::identity(), steps)?.spec(n_samples)
            }
        }
    }

    /// Same preset over another parameter (or arc-length) range.
    pub fn with_range(&self, lo: f64, hi: f64) -> Result<Preset> {
        Ok(match self {
            Preset::Surface(s) => Preset::Surface(RuledSurfaceSpec::new(
                s.base.clone(),
                s.director.clone(),
                lo,
                hi,
                s.n_samples,
            )?),
            Preset::Profile(p) => {
                let mut p = p.clone();
                if !(lo < hi) {
                    return Err(Error::InvalidSpec(format!("profile range [{lo}, {hi}] is empty")));
                }
                p.s_min = lo;
                p.s_max = hi;
                Preset::Profile(p)
            }
        })
    }
}

pub fn gallery(name: &str, params: &PresetParams) -> Result<Preset> {
    let n = DEFAULT_SAMPLES;
    match name {
        "helicoid" => Ok(Preset::Surface(RuledSurfaceSpec::from_text(
            "0, 0, u",
            "cos(u), sin(u), 0",
            0.0,
            2.0 * PI,
            n,
        )?)),
        "cone-theta" => {
            let theta = params.theta.unwrap_or(DEFAULT_THETA);
            if !(theta > 0.0 && theta < PI) {
                return Err(Error::InvalidSpec(format!("theta must lie in (0, pi), got {theta}")));
            }
            let director = format!("sin({theta:?})*cos(u), sin({theta:?})*sin(u), cos({theta:?})");
            Ok(Preset::Surface(RuledSurfaceSpec::from_text(
                "0, 0, 0",
                &director,
                0.0,
                2.0 * PI,
                n,
            )?))
        }
        "slant-family-c" => {
            let c = params.c.unwrap_or(DEFAULT_C);
            if !(c != 0.0 && c.is_finite()) {
                return Err(Error::InvalidSpec(format!("c must be finite and nonzero, got {c}")));
            }
            let half = 0.9 / c.abs();
            let text = format!("({c:?})*s/sqrt(1 - ({c:?})^2*s^2)");
            Ok(Preset::Profile(CurvatureProfile::parse(
                &text,
                -half,
                half,
                format!("kappa_q = c s / sqrt(1 - c^2 s^2) with c = {c}; kappa_h = c"),
            )?))
        }
        "quadratic" => Ok(Preset::Profile(CurvatureProfile::parse(
            "s^2",
            0.5,
            2.0,
            "kappa_q = s^2",
        )?)),
        "nonslant-mixed" => Ok(Preset::Profile(CurvatureProfile::parse(
            "sin(s) + s",
            0.5,
            3.0,
            "kappa_q = sin s + s",
        )?)),
        other => Err(Error::UnknownPreset {
            name: other.to_string(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}
