//! Frames of the surfaces ruled by the central normal `h` (`S_h`) and the
//! central tangent `a` (`S_a`), in closed form from a single sample, plus a
//! cross-check that re-analyzes those surfaces from scratch.
//!
//! For `S_h`:
//!
//! ```text
//! q_h = h,  h_h = (-q + κ_q a)/√(1+κ_q²),  a_h = (a + κ_q q)/√(1+κ_q²)
//! κ_h = κ_q' / (1+κ_q²)^{3/2},  ds_q/ds_h = 1/√(1+κ_q²)
//! ```
//!
//! For `S_a`, with `σ = sign(κ_q)`:
//!
//! ```text
//! q_a = a,  h_a = -σ h,  a_a = q_a × h_a = σ q,  κ_a = 1/|κ_q|,  ds_q/ds_a = 1/|κ_q|
//! ```
//!
//! which reduces to `h_a = -h`, `a_a = q`, `κ_a = 1/κ_q` when `κ_q > 0` and
//! keeps the frame right-handed and the Frenet equations exact otherwise.

use nalgebra::Vector3;
use serde::Serialize;

use crate::curve::{Curve, RuledSurfaceSpec, TaylorCurve};
use crate::expr::MAX_ORDER;
use crate::frame::{self, FrameJets, FrenetSample};
use crate::{par_map, Error, Result, Tolerances};

/// `|κ_q|` below which [`cross_validate`] skips a sample for `S_a`.
pub const CROSS_CHECK_MIN_KAPPA: f64 = 1e-3;

/// Knots of the re-expressed director per sampling-grid interval.
pub const KNOTS_PER_INTERVAL: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DerivedKind {
    /// Surface ruled by the central normal.
    H,
    /// Surface ruled by the central tangent.
    A,
}

impl DerivedKind {
    pub fn prefix(self) -> &'static str {
        match self {
            DerivedKind::H => "h_",
            DerivedKind::A => "a_",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedFrame {
    pub kind: DerivedKind,
    pub q: Vector3<f64>,
    pub h: Vector3<f64>,
    pub a: Vector3<f64>,
    /// Conical curvature of the derived surface.
    pub kappa: f64,
    /// `ds_q / ds_h` or `ds_q / ds_a`.
    pub ds_ratio: f64,
}

/// Closed-form frame of `S_h`.
pub fn sh_apparatus(sample: &FrenetSample) -> DerivedFrame {
    let k = sample.kappa_q;
    let root = (1.0 + k * k).sqrt();
    DerivedFrame {
        kind: DerivedKind::H,
        q: sample.h,
        h: (-sample.q + sample.a * k) / root,
        a: (sample.a + sample.q * k) / root,
        kappa: sample.kappa_q_prime / (root * root * root),
        ds_ratio: 1.0 / root,
    }
}

/// Closed-form frame of `S_a`; needs `|κ_q| ≥ eps_ka`.
pub fn sa_apparatus(sample: &FrenetSample, eps_ka: f64) -> Result<DerivedFrame> {
    let k = sample.kappa_q;
    if !(k.abs() >= eps_ka) {
        return Err(Error::VanishingCurvature { u: sample.u, kappa: k });
    }
    let sign = k.signum();
    let q = sample.a;
    let h = -sample.h * sign;
    Ok(DerivedFrame {
        kind: DerivedKind::A,
        q,
        h,
        a: q.cross(&h),
        kappa: 1.0 / k.abs(),
        ds_ratio: 1.0 / k.abs(),
    })
}

pub fn derived_apparatus(sample: &FrenetSample, kind: DerivedKind, eps_ka: f64) -> Result<DerivedFrame> {
    match kind {
        DerivedKind::H => Ok(sh_apparatus(sample)),
        DerivedKind::A => sa_apparatus(sample, eps_ka),
    }
}

/// A ruled surface with the same base curve whose director is the `h` (or
/// `a`) field of `spec`, stored as its Taylor expansion at knots spaced
/// [`KNOTS_PER_INTERVAL`] per sampling interval.
pub fn reexpressed_spec(spec: &RuledSurfaceSpec, kind: DerivedKind, tol: &Tolerances) -> Result<RuledSurfaceSpec> {
    let knots = spec.with_samples(KNOTS_PER_INTERVAL * (spec.n_samples - 1) + 1)?;
    let coeffs = par_map(&knots.grid(), |&u| {
        FrameJets::at(spec, u, MAX_ORDER, tol).map(|j| {
            let v = match kind {
                DerivedKind::H => j.h,
                DerivedKind::A => j.a,
            };
            (0..=v.order())
                .map(|k| Vector3::from_fn(|i, _| v.0[i].coefficients()[k]))
                .collect::<Vec<_>>()
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let step = (spec.u_max - spec.u_min) / (knots.n_samples - 1) as f64;
    let director = Curve::Taylor(TaylorCurve::new(spec.u_min, step, coeffs)?);
    RuledSurfaceSpec::new(spec.base.clone(), director, spec.u_min, spec.u_max, spec.n_samples)
}

/// Largest deviations between closed-form derived frames and the frames
/// obtained by analyzing the re-expressed director directly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossValidation {
    pub kind: DerivedKind,
    /// Interior grid samples compared.
    pub compared: usize,
    /// Interior samples skipped because `|κ_q|` is below [`CROSS_CHECK_MIN_KAPPA`].
    pub skipped: usize,
    /// Max `|κ_closed - κ_direct|` (magnitudes for `S_a`).
    pub max_kappa_deviation: f64,
    /// Max `‖v_closed - v_direct‖` over the three frame vectors.
    pub max_frame_deviation: f64,
    /// True when `κ_q < 0` somewhere, so the `S_a` orientation flips.
    pub kappa_q_negative: bool,
}

pub fn cross_validate(spec: &RuledSurfaceSpec, kind: DerivedKind, tol: &Tolerances) -> Result<CrossValidation> {
    let field = frame::analyze(spec, tol)?;
    let samples = &field.samples;
    let interior = &samples[1..samples.len() - 1];
    let usable: Vec<&FrenetSample> = interior
        .iter()
        .filter(|s| kind == DerivedKind::H || s.kappa_q.abs() >= CROSS_CHECK_MIN_KAPPA)
        .collect();
    if usable.is_empty() {
        let worst = interior
            .iter()
            .max_by(|a, b| a.kappa_q.abs().total_cmp(&b.kappa_q.abs()))
            .expect("at least one interior sample");
        return Err(Error::VanishingCurvature {
            u: worst.u,
            kappa: worst.kappa_q,
        });
    }
    let other = reexpressed_spec(spec, kind, tol)?;
    let deviations = par_map(&usable, |s| -> Result<(f64, f64)> {
        let closed = derived_apparatus(s, kind, tol.eps_ka)?;
        let direct = FrameJets::at(&other, s.u, 2, tol)?;
        let kappa_dev = match kind {
            DerivedKind::H => (closed.kappa - direct.kappa.value()).abs(),
            DerivedKind::A => (closed.kappa.abs() - direct.kappa.value().abs()).abs(),
        };
        let frame_dev = (closed.q - direct.q.value())
            .norm()
            .max((closed.h - direct.h.value()).norm())
            .max((closed.a - direct.a.value()).norm());
        Ok((kappa_dev, frame_dev))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CrossValidation {
        kind,
        compared: usable.len(),
        skipped: interior.len() - usable.len(),
        max_kappa_deviation: deviations.iter().map(|d| d.0).fold(0.0, f64::max),
        max_frame_deviation: deviations.iter().map(|d| d.1).fold(0.0, f64::max),
        kappa_q_negative: samples.iter().any(|s| s.kappa_q < 0.0),
    })
}
