//! q-, h- and a-slant classification and fixed-axis recovery.
//!
//! A ruled surface is X-slant when the frame vector X makes a constant angle
//! with a fixed direction. The curvature criteria are
//!
//! * q-slant ⟺ `κ_q` constant,
//! * h-slant ⟺ `σ = κ_q′ / (1 + κ_q²)^{3/2}` constant,
//! * a-slant ⟺ q-slant (when `κ_q` does not vanish).

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::frame::{FrameField, FrenetSample};
use crate::{Error, Result};

/// Max spread of `⟨X_i, axis⟩` accepted by [`recover_axis`].
pub const AXIS_SPREAD_TOL: f64 = 1e-6;

/// `|cos θ|` below which a recovered axis is perpendicular to the frame
/// vector, which the definition of slant surfaces excludes.
pub const PERPENDICULAR_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrameVector {
    Q,
    H,
    A,
}

impl FrameVector {
    pub const ALL: [FrameVector; 3] = [FrameVector::Q, FrameVector::H, FrameVector::A];

    pub fn name(self) -> &'static str {
        match self {
            FrameVector::Q => "q",
            FrameVector::H => "h",
            FrameVector::A => "a",
        }
    }

    fn of(self, s: &FrenetSample) -> Vector3<f64> {
        match self {
            FrameVector::Q => s.q,
            FrameVector::H => s.h,
            FrameVector::A => s.a,
        }
    }
}

/// A verdict with the spread that decided it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub spread: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisFit {
    pub kind: FrameVector,
    pub axis: Vector3<f64>,
    /// Angle between the frame vector and the axis, in `[0, π]`.
    pub theta: f64,
    /// Spread of `⟨X_i, axis⟩` over the grid.
    pub spread: f64,
    /// The axis is perpendicular to the frame vector or the frame vector is
    /// constant.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlantReport {
    pub q_slant: Classification,
    pub h_slant: Classification,
    pub a_slant: Classification,
    pub sigma_values: Vec<f64>,
    /// Axis of the first slant kind (q, then h, then a) whose fit verifies.
    pub axis: Option<Vector3<f64>>,
    pub theta: Option<f64>,
    pub axis_kind: Option<FrameVector>,
    pub axis_fits: Vec<AxisFit>,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub eps_ka: f64,
}

impl SlantReport {
    pub fn verdict(&self, kind: FrameVector) -> Verdict {
        match kind {
            FrameVector::Q => self.q_slant.verdict,
            FrameVector::H => self.h_slant.verdict,
            FrameVector::A => self.a_slant.verdict,
        }
    }
}

pub fn sigma(sample: &FrenetSample) -> f64 {
    sigma_of(sample.kappa_q, sample.kappa_q_prime)
}

pub(crate) fn sigma_of(kappa: f64, kappa_prime: f64) -> f64 {
    kappa_prime / (1.0 + kappa * kappa).powf(1.5)
}

pub fn spread(xs: &[f64]) -> f64 {
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    hi - lo
}

pub fn median_abs(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Constancy test `spread(x) ≤ tol_abs + tol_rel · median|x|`.
pub fn constancy(xs: &[f64], tol_abs: f64, tol_rel: f64) -> Classification {
    let spread = spread(xs);
    let tolerance = tol_abs + tol_rel * median_abs(xs);
    Classification {
        verdict: if spread <= tolerance { Verdict::Yes } else { Verdict::No },
        spread,
        tolerance,
    }
}

pub fn classify(field: &FrameField, tol_abs: f64, tol_rel: f64) -> Result<SlantReport> {
    if field.samples.len() < 3 {
        return Err(Error::TooFewSamples {
            found: field.samples.len(),
            needed: 3,
        });
    }
    let eps_ka = field.tolerances.eps_ka;
    let kappa = field.kappa();
    let sigma_values: Vec<f64> = field.samples.iter().map(sigma).collect();
    let q_slant = constancy(&kappa, tol_abs, tol_rel);
    let h_slant = constancy(&sigma_values, tol_abs, tol_rel);
    let a_slant = if kappa.iter().all(|k| k.abs() < eps_ka) {
        Classification {
            verdict: Verdict::Degenerate,
            ..q_slant
        }
    } else {
        q_slant
    };

    let mut axis_fits = Vec::new();
    let mut chosen = None;
    for (kind, c) in [
        (FrameVector::Q, q_slant),
        (FrameVector::H, h_slant),
        (FrameVector::A, a_slant),
    ] {
        if c.verdict != Verdict::Yes {
            continue;
        }
        if let Ok(fit) = recover_axis(field, kind) {
            if chosen.is_none() && !fit.degenerate {
                chosen = Some(fit);
            }
            axis_fits.push(fit);
        }
    }
    Ok(SlantReport {
        q_slant,
        h_slant,
        a_slant,
        sigma_values,
        axis: chosen.map(|f| f.axis),
        theta: chosen.map(|f| f.theta),
        axis_kind: chosen.map(|f| f.kind),
        axis_fits,
        tol_abs,
        tol_rel,
        eps_ka,
    })
}

/// Recovers the fixed direction that the chosen frame vector makes a
/// constant angle with, verifying the result over the whole grid.
pub fn recover_axis(field: &FrameField, kind: FrameVector) -> Result<AxisFit> {
    if field.samples.len() < 3 {
        return Err(Error::TooFewSamples {
            found: field.samples.len(),
            needed: 3,
        });
    }
    let vectors: Vec<Vector3<f64>> = field.samples.iter().map(|s| kind.of(s)).collect();
    let (axis, theta, constant) = match kind {
        FrameVector::Q => {
            let n = field.samples.len() as f64;
            let mean_kappa = field.samples.iter().map(|s| s.kappa_q).sum::<f64>() / n;
            let theta = 1f64.atan2(mean_kappa);
            let (st, ct) = theta.sin_cos();
            let sum: Vector3<f64> = field.samples.iter().map(|s| s.q * ct + s.a * st).sum();
            (sum.normalize(), theta, false)
        }
        FrameVector::H | FrameVector::A => eigen_axis(&vectors),
    };
    let dots: Vec<f64> = vectors.iter().map(|v| v.dot(&axis)).collect();
    let spread = spread(&dots);
    if !(spread <= AXIS_SPREAD_TOL) {
        return Err(Error::NotSlant {
            kind: kind.name(),
            spread,
            tolerance: AXIS_SPREAD_TOL,
        });
    }
    Ok(AxisFit {
        kind,
        axis,
        theta,
        spread,
        degenerate: constant || theta.cos().abs() < PERPENDICULAR_TOL,
    })
}

/// Unit minimizer of the variance of `⟨v_i, x⟩`, oriented so the mean inner
/// product is non-negative. Returns `(axis, θ, constant)`.
fn eigen_axis(vectors: &[Vector3<f64>]) -> (Vector3<f64>, f64, bool) {
    let n = vectors.len() as f64;
    let mean: Vector3<f64> = vectors.iter().sum::<Vector3<f64>>() / n;
    let cov: Matrix3<f64> = vectors
        .iter()
        .map(|v| (v - mean) * (v - mean).transpose())
        .sum::<Matrix3<f64>>()
        / n;
    if cov.abs().max() <= 1e-28 {
        return (mean.normalize(), 0.0, true);
    }
    let eig = SymmetricEigen::new(cov);
    let i = eig.eigenvalues.imin();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(i).into_owned().normalize();
    let mut m = mean.dot(&axis);
    if m < 0.0 {
        axis = -axis;
        m = -m;
    }
    (axis, m.clamp(-1.0, 1.0).acos(), false)
}
