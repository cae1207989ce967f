//! Residuals of the differential-equation characterizations of slant ruled
//! surfaces.
//!
//! For a frame `{Q, H, A}` with conical curvature `k` and `'` the derivative
//! with respect to its spherical arc length, the Frenet equations give
//!
//! ```text
//! Q''' + (1 + k²) Q' = k' A
//! H''  + (1 + k²) H  = k' A
//! A''' + (1 + k²) A' = 2k' Q - k'' H - 3k k' A
//! ```
//!
//! so each left-hand side vanishes exactly when `k` is constant. Applied to
//! the frames of `S_q`, `S_h` and `S_a` this yields nine residuals; the
//! right-hand sides are exposed through [`closed_form`] as an independent
//! check of the jet-based [`residual`].

use nalgebra::Vector3;
use serde::Serialize;

use crate::derived;
use crate::expr::{Jet, VecJet};
use crate::frame::{FrameField, FrameJets};
use crate::slant::FrameVector;
use crate::{par_map, Error, Result};

/// Director jet order needed by the third-derivative kinds on `S_h` and `S_a`.
pub const RESIDUAL_ORDER: usize = 5;

/// Which ruled surface a residual lives on, and hence its arc length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Surface {
    /// The surface itself, arc length `s_q`.
    #[serde(rename = "s_q")]
    Q,
    /// The surface ruled by `h`, arc length `s_h`.
    #[serde(rename = "s_h")]
    H,
    /// The surface ruled by `a`, arc length `s_a`.
    #[serde(rename = "s_a")]
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum OdeKind {
    Q3,
    H2,
    A3,
    QH3,
    HH2,
    AH3,
    QA3,
    HA2,
    AA3,
}

impl OdeKind {
    pub const ALL: [OdeKind; 9] = [
        OdeKind::Q3,
        OdeKind::H2,
        OdeKind::A3,
        OdeKind::QH3,
        OdeKind::HH2,
        OdeKind::AH3,
        OdeKind::QA3,
        OdeKind::HA2,
        OdeKind::AA3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OdeKind::Q3 => "Q3",
            OdeKind::H2 => "H2",
            OdeKind::A3 => "A3",
            OdeKind::QH3 => "QH3",
            OdeKind::HH2 => "HH2",
            OdeKind::AH3 => "AH3",
            OdeKind::QA3 => "QA3",
            OdeKind::HA2 => "HA2",
            OdeKind::AA3 => "AA3",
        }
    }

    pub fn parse(name: &str) -> Option<OdeKind> {
        OdeKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }

    pub fn surface(self) -> Surface {
        match self {
            OdeKind::Q3 | OdeKind::H2 | OdeKind::A3 => Surface::Q,
            OdeKind::QH3 | OdeKind::HH2 | OdeKind::AH3 => Surface::H,
            OdeKind::QA3 | OdeKind::HA2 | OdeKind::AA3 => Surface::A,
        }
    }

    /// Frame vector of [`Self::surface`] the equation is written for.
    pub fn vector(self) -> FrameVector {
        match self {
            OdeKind::Q3 | OdeKind::QH3 | OdeKind::QA3 => FrameVector::Q,
            OdeKind::H2 | OdeKind::HH2 | OdeKind::HA2 => FrameVector::H,
            OdeKind::A3 | OdeKind::AH3 | OdeKind::AA3 => FrameVector::A,
        }
    }

    pub fn derivative_order(self) -> usize {
        match self.vector() {
            FrameVector::H => 2,
            _ => 3,
        }
    }

    /// The slant property of the original surface the kind characterizes:
    /// `S_h` kinds characterize h-slant surfaces, all others q-slant ones.
    pub fn characterizes(self) -> FrameVector {
        match self.surface() {
            Surface::H => FrameVector::H,
            _ => FrameVector::Q,
        }
    }

    pub fn equation(self) -> &'static str {
        match self {
            OdeKind::Q3 => "q''' + (1 + kappa_q^2) q' = 0",
            OdeKind::H2 => "h'' + (1 + kappa_q^2) h = 0",
            OdeKind::A3 => "a''' + (1 + kappa_q^2) a' = 0",
            OdeKind::QH3 => "q_h''' + (1 + kappa_h^2) q_h' = 0",
            OdeKind::HH2 => "h_h'' + (1 + kappa_h^2) h_h = 0",
            OdeKind::AH3 => "a_h''' + (1 + kappa_h^2) a_h' = 0",
            OdeKind::QA3 => "q_a''' + (1 + kappa_a^2) q_a' = 0",
            OdeKind::HA2 => "h_a'' + (1 + kappa_a^2) h_a = 0",
            OdeKind::AA3 => "a_a''' + (1 + kappa_a^2) a_a' = 0",
        }
    }
}

/// Frame, conical curvature and `du/ds` of one surface as jets in `u`.
struct SurfaceJets {
    q: VecJet,
    h: VecJet,
    a: VecJet,
    kappa: Jet,
    du_ds: Jet,
}

impl SurfaceJets {
    fn new(j: &FrameJets, surface: Surface, eps_ka: f64) -> Result<Self> {
        let k = j.kappa;
        Ok(match surface {
            Surface::Q => SurfaceJets {
                q: j.q,
                h: j.h,
                a: j.a,
                kappa: k,
                du_ds: j.speed.recip(),
            },
            Surface::H => {
                let root = (k * k + 1.0).sqrt();
                SurfaceJets {
                    q: j.h,
                    h: (j.a.scale(&k) - j.q).div(&root),
                    a: (j.a + j.q.scale(&k)).div(&root),
                    kappa: j.kappa_prime() / (root * root * root),
                    du_ds: (j.speed * root).recip(),
                }
            }
            Surface::A => {
                if !(k.value().abs() >= eps_ka) {
                    return Err(Error::VanishingCurvature {
                        u: j.u,
                        kappa: k.value(),
                    });
                }
                let sign = k.value().signum();
                let abs = k.abs();
                SurfaceJets {
                    q: j.a,
                    h: j.h.scale_f64(-sign),
                    a: j.q.scale_f64(sign),
                    kappa: abs.recip(),
                    du_ds: (j.speed * abs).recip(),
                }
            }
        })
    }

    fn vector(&self, v: FrameVector) -> VecJet {
        match v {
            FrameVector::Q => self.q,
            FrameVector::H => self.h,
            FrameVector::A => self.a,
        }
    }

    fn d(&self, x: &VecJet) -> VecJet {
        x.differentiate().scale(&self.du_ds)
    }
}

/// Left-hand side of the kind's equation at parameter `u`.
pub fn residual(field: &FrameField, kind: OdeKind, u: f64) -> Result<Vector3<f64>> {
    let tol = &field.tolerances;
    let j = FrameJets::at(&field.spec, u, RESIDUAL_ORDER, tol)?;
    let s = SurfaceJets::new(&j, kind.surface(), tol.eps_ka)?;
    let x = s.vector(kind.vector());
    let k = s.kappa.value();
    let coefficient = 1.0 + k * k;
    let d1 = s.d(&x);
    let d2 = s.d(&d1);
    Ok(match kind.derivative_order() {
        2 => d2.value() + x.value() * coefficient,
        _ => s.d(&d2).value() + d1.value() * coefficient,
    })
}

/// Curvature of the kind's surface and its first two arc-length derivatives.
fn curvature_derivatives(j: &FrameJets, surface: Surface) -> (f64, f64, f64) {
    let k1j = j.ds(&j.kappa);
    let k2j = j.ds(&k1j);
    let k3j = j.ds(&k2j);
    let (k, k1, k2, k3) = (j.kappa.value(), k1j.value(), k2j.value(), k3j.value());
    match surface {
        Surface::Q => (k, k1, k2),
        Surface::H => {
            let w = 1.0 + k * k;
            let sigma = k1 / w.powf(1.5);
            let sigma1 = k2 / w.powf(1.5) - 3.0 * k * k1 * k1 / w.powf(2.5);
            let sigma2 = k3 / w.powf(1.5) - (9.0 * k * k1 * k2 + 3.0 * k1.powi(3)) / w.powf(2.5)
                + 15.0 * k * k * k1.powi(3) / w.powf(3.5);
            (sigma, sigma1 / w.sqrt(), sigma2 / w - k * k1 * sigma1 / (w * w))
        }
        Surface::A => {
            let sign = k.signum();
            let m = k.abs();
            (
                1.0 / m,
                -sign * k1 / m.powi(3),
                -sign * k2 / m.powi(4) + 3.0 * k1 * k1 / m.powi(5),
            )
        }
    }
}

/// Value the residual must take by the Frenet equations of the kind's
/// surface, computed from curvature derivatives and frame values only.
pub fn closed_form(field: &FrameField, kind: OdeKind, u: f64) -> Result<Vector3<f64>> {
    let tol = &field.tolerances;
    let j = FrameJets::at(&field.spec, u, RESIDUAL_ORDER, tol)?;
    let sample = j.sample(0.0);
    let (q, h, a) = match kind.surface() {
        Surface::Q => (sample.q, sample.h, sample.a),
        Surface::H => {
            let f = derived::sh_apparatus(&sample);
            (f.q, f.h, f.a)
        }
        Surface::A => {
            let f = derived::sa_apparatus(&sample, tol.eps_ka)?;
            (f.q, f.h, f.a)
        }
    };
    let (k, k1, k2) = curvature_derivatives(&j, kind.surface());
    Ok(match kind.vector() {
        FrameVector::Q | FrameVector::H => a * k1,
        FrameVector::A => q * (2.0 * k1) - h * k2 - a * (3.0 * k * k1),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub kind: OdeKind,
    pub equation: &'static str,
    pub arc_length: Surface,
    /// Interior grid parameters.
    pub u: Vec<f64>,
    /// Residual norm per interior sample; `None` where the `S_a` frame is
    /// undefined.
    pub norms: Vec<Option<f64>>,
    pub max_norm: f64,
    pub satisfied: bool,
    pub tolerance: f64,
    pub evaluated: usize,
    pub excluded: usize,
}

/// Residual norms over the interior grid points. Samples with
/// `|κ_q| < eps_ka` are excluded for `S_a` kinds; a profile with no
/// evaluated sample is vacuously satisfied.
pub fn residual_profile(field: &FrameField, kind: OdeKind, tol: f64) -> Result<ResidualReport> {
    let n = field.samples.len();
    if n < 3 {
        return Err(Error::TooFewSamples { found: n, needed: 3 });
    }
    let eps_ka = field.tolerances.eps_ka;
    let interior = &field.samples[1..n - 1];
    let norms = par_map(interior, |s| {
        if kind.surface() == Surface::A && !(s.kappa_q.abs() >= eps_ka) {
            Ok(None)
        } else {
            residual(field, kind, s.u).map(|r| Some(r.norm()))
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let evaluated = norms.iter().flatten().count();
    let max_norm = norms.iter().flatten().fold(0.0, |m: f64, &x| m.max(x));
    Ok(ResidualReport {
        kind,
        equation: kind.equation(),
        arc_length: kind.surface(),
        u: interior.iter().map(|s| s.u).collect(),
        excluded: norms.len() - evaluated,
        evaluated,
        norms,
        max_norm,
        satisfied: max_norm <= tol,
        tolerance: tol,
    })
}

pub fn residual_profiles(field: &FrameField, tol: f64) -> Result<Vec<ResidualReport>> {
    OdeKind::ALL.iter().map(|&k| residual_profile(field, k, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::analyze;
    use crate::synth::{gallery, integrate_frenet, CurvatureProfile, PresetParams, Triad};
    use crate::Tolerances;
    use approx::assert_relative_eq;

    fn preset(name: &str, n: usize) -> FrameField {
        let spec = gallery(name, &PresetParams::default()).unwrap().to_spec(n).unwrap();
        analyze(&spec, &Tolerances::default()).unwrap()
    }

    #[test]
    fn small_circle_residuals_vanish() {
        let field = preset("cone-theta", 32);
        for kind in OdeKind::ALL {
            let r = residual_profile(&field, kind, 1e-7).unwrap();
            assert!(r.satisfied, "{kind:?} {}", r.max_norm);
            assert_eq!(r.evaluated, 30);
        }
    }

    #[test]
    fn helicoid_h2_and_vacuous_sa_kinds() {
        let field = preset("helicoid", 32);
        assert!(residual(&field, OdeKind::H2, 1.0).unwrap().norm() <= 1e-7);
        let r = residual_profile(&field, OdeKind::AA3, 1e-6).unwrap();
        assert_eq!((r.evaluated, r.excluded), (0, 30));
        assert!(r.satisfied);
        assert!(matches!(
            residual(&field, OdeKind::HA2, 1.0),
            Err(Error::VanishingCurvature { .. })
        ));
    }

    #[test]
    fn linear_curvature_q3_residual_is_a() {
        let p = CurvatureProfile::parse("s", 0.0, 1.0, "").unwrap();
        let synth = integrate_frenet(&p, &Triad::identity(), 200).unwrap();
        let field = FrameField {
            spec: synth.spec(201).unwrap(),
            ..synth.field.clone()
        };
        let r = residual(&field, OdeKind::Q3, 0.5).unwrap();
        assert_relative_eq!(r.norm(), 1.0, epsilon = 1e-10);

        // central differences of the integrated directors
        let q: Vec<_> = synth.field.samples.iter().map(|s| s.q).collect();
        let (i, h) = (100, synth.step);
        let d1 = (q[i + 1] - q[i - 1]) / (2.0 * h);
        let d3 = (q[i + 2] - q[i + 1] * 2.0 + q[i - 1] * 2.0 - q[i - 2]) / (2.0 * h.powi(3));
        let fd = d3 + d1 * (1.0 + 0.25);
        assert_relative_eq!(fd, r, epsilon = 1e-3);
        assert_relative_eq!(r, synth.field.samples[i].a, epsilon = 1e-8);
    }

    #[test]
    fn residuals_match_closed_forms() {
        for name in ["quadratic", "nonslant-mixed", "slant-family-c", "cone-theta"] {
            let field = preset(name, 24);
            for kind in OdeKind::ALL {
                for s in &field.samples[1..23] {
                    let r = residual(&field, kind, s.u).unwrap();
                    let c = closed_form(&field, kind, s.u).unwrap();
                    let scale = c.norm().max(1.0);
                    assert!((r - c).norm() <= 1e-8 * scale, "{name} {kind:?} u={} {r} {c}", s.u);
                }
            }
        }
    }

    #[test]
    fn unit_sigma_family_profiles() {
        let p = CurvatureProfile::parse("s/sqrt(1 - s^2)", -0.9, 0.9, "").unwrap();
        let spec = integrate_frenet(&p, &Triad::identity(), 400).unwrap().spec(51).unwrap();
        let field = analyze(&spec, &Tolerances::default()).unwrap();
        assert!(residual_profile(&field, OdeKind::HH2, 1e-6).unwrap().satisfied);
        assert!(!residual_profile(&field, OdeKind::Q3, 1e-6).unwrap().satisfied);
    }

    #[test]
    fn quadratic_satisfies_nothing() {
        let field = preset("quadratic", 64);
        for r in residual_profiles(&field, 1e-6).unwrap() {
            assert!(!r.satisfied, "{:?}", r.kind);
            assert!(r.max_norm >= 1e-2);
        }
    }

    #[test]
    fn kind_metadata() {
        assert_eq!(OdeKind::parse("aa3"), Some(OdeKind::AA3));
        assert_eq!(OdeKind::parse("X"), None);
        assert_eq!(OdeKind::HH2.derivative_order(), 2);
        assert_eq!(OdeKind::QA3.characterizes(), FrameVector::Q);
        assert_eq!(OdeKind::AH3.characterizes(), FrameVector::H);
    }
}
