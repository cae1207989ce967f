//! Frenet apparatus of ruled surfaces `r(u, v) = f(u) + v q(u)` in Euclidean
//! 3-space: striction curve, the ruling / central normal / central tangent
//! frame `{q, h, a}`, conical curvature, the surfaces ruled by `h` and `a`,
//! slant classification and the differential-equation characterizations of
//! slant surfaces.
//!
//! The pipeline is
//!
//! 1. [`expr`] parses coordinate functions and evaluates them as jets,
//! 2. [`frame`] turns a [`RuledSurfaceSpec`] into a [`FrameField`],
//! 3. [`derived`] maps each sample onto the surfaces ruled by `h` and `a`,
//! 4. [`slant`] classifies the field and recovers fixed axes,
//! 5. [`odecheck`] evaluates the nine residual characterizations,
//!
//! with [`synth`] producing fields of prescribed conical curvature and
//! [`report`] assembling JSON, CSV and OBJ outputs.

// `!(x <= tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// jet recurrences read best with explicit coefficient indices
#![allow(clippy::needless_range_loop)]

pub mod curve;
pub mod derived;
pub mod expr;
pub mod frame;
pub mod odecheck;
pub mod report;
pub mod slant;
pub mod synth;

#[cfg(feature = "cli")]
pub mod cli;

mod quadrature;

pub use curve::{Curve, RuledSurfaceSpec};
pub use frame::{FrameField, FrenetSample};

use serde::Serialize;
use thiserror::Error;

pub use expr::ExprError;

/// Numerical thresholds shared by the whole pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Director speed `‖dq̂/du‖` at or below which a ruling is cylindrical.
    pub eps_cyl: f64,
    /// `|κ_q|` below which the central-tangent surface is undefined.
    pub eps_ka: f64,
    /// Absolute part of the constancy tolerance.
    pub tol_abs: f64,
    /// Relative part of the constancy tolerance, scaled by the median magnitude.
    pub tol_rel: f64,
    /// Max residual norm for a differential-equation characterization to hold.
    pub ode_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_cyl: 1e-12,
            eps_ka: 1e-9,
            tol_abs: 1e-8,
            tol_rel: 1e-6,
            ode_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("cylindrical ruling at u = {u}: director speed {speed:e} is below the threshold")]
    Cylindrical { u: f64, speed: f64 },
    #[error("degenerate surface normal at (u, v) = ({u}, {v})")]
    DegenerateNormal { u: f64, v: f64 },
    #[error("vanishing conical curvature at u = {u} (|kappa_q| = {kappa:e})")]
    VanishingCurvature { u: f64, kappa: f64 },
    #[error("field has {found} samples, at least {needed} are required")]
    TooFewSamples { found: usize, needed: usize },
    #[error("{kind} axis fit failed: inner-product spread {spread:e} exceeds {tolerance:e}")]
    NotSlant {
        kind: &'static str,
        spread: f64,
        tolerance: f64,
    },
    #[error("unknown preset '{name}', expected one of: {valid}")]
    UnknownPreset { name: String, valid: String },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// True for errors caused by the geometry of the surface rather than by
    /// malformed input.
    pub fn is_degenerate_surface(&self) -> bool {
        matches!(
            self,
            Error::Cylindrical { .. }
                | Error::DegenerateNormal { .. }
                | Error::VanishingCurvature { .. }
                | Error::NotSlant { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Order-preserving map, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}
