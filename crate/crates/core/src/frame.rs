//! Striction curve, Frenet frame `{q, h, a}` and conical curvature of a
//! ruled surface.
//!
//! With `q̂` the unit director and `ρ = ‖dq̂/du‖` the speed of its spherical
//! image, the frame is
//!
//! ```text
//! q = q̂,   h = (dq̂/du) / ρ,   a = q × h,   κ_q = ⟨dh/ds_q, a⟩
//! ```
//!
//! and derivatives with respect to the spherical arc length `s_q` are taken
//! as `d/ds_q = (1/ρ) d/du` in jet arithmetic. `κ_q` is signed so that
//!
//! ```text
//! dq/ds_q = h,   dh/ds_q = -q + κ_q a,   da/ds_q = -κ_q h
//! ```
//!
//! holds exactly; `|κ_q| = ‖da/ds_q‖`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::curve::RuledSurfaceSpec;
use crate::expr::{Jet, VecJet};
use crate::quadrature::GaussLegendre;
use crate::{par_map, Error, Result, Tolerances};

/// Director jet order used for [`FrenetSample`]s: enough for `κ_q'`.
pub const SAMPLE_ORDER: usize = 3;

/// Frame data at one parameter value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrenetSample {
    pub u: f64,
    /// Arc length of the spherical image from `u_min`.
    pub s_q: f64,
    pub q: Vector3<f64>,
    pub h: Vector3<f64>,
    pub a: Vector3<f64>,
    /// Signed conical curvature.
    pub kappa_q: f64,
    /// `dκ_q/ds_q`.
    pub kappa_q_prime: f64,
    /// `ds_q/du`.
    pub speed: f64,
    pub striction_point: Vector3<f64>,
}

/// Jets in `u` of the frame at one parameter value.
///
/// With director order `N`: `q` has order `N`, `speed`, `h`, `a` order
/// `N-1`, `kappa` order `N-2`.
#[derive(Clone, Debug)]
pub struct FrameJets {
    pub u: f64,
    pub base: Vector3<f64>,
    pub base_velocity: Vector3<f64>,
    pub q: VecJet,
    pub speed: Jet,
    pub h: VecJet,
    pub a: VecJet,
    pub kappa: Jet,
}

impl FrameJets {
    pub fn at(spec: &RuledSurfaceSpec, u: f64, order: usize, tol: &Tolerances) -> Result<Self> {
        assert!(order >= 2, "frame jets need director order >= 2");
        let f = spec.base.jet(u, 1)?;
        let q = unit_director(spec, u, order)?;
        let qu = q.differentiate();
        let speed = qu.norm();
        if !(speed.value() > tol.eps_cyl) {
            return Err(Error::Cylindrical {
                u,
                speed: speed.value(),
            });
        }
        let h = qu.div(&speed);
        let a = q.cross(&h);
        let dh = h.differentiate().div(&speed);
        let kappa = dh.dot(&a);
        Ok(Self {
            u,
            base: f.value(),
            base_velocity: f.derivative(1),
            q,
            speed,
            h,
            a,
            kappa,
        })
    }

    /// `d/ds_q` of a scalar jet.
    pub fn ds(&self, x: &Jet) -> Jet {
        x.differentiate() / self.speed
    }

    /// `d/ds_q` of a vector jet.
    pub fn ds_vec(&self, x: &VecJet) -> VecJet {
        x.differentiate().div(&self.speed)
    }

    /// `dκ_q/ds_q`, two orders below the director.
    pub fn kappa_prime(&self) -> Jet {
        self.ds(&self.kappa)
    }

    /// `f(u) - (⟨ḟ, dq̂/du⟩ / ‖dq̂/du‖²) q̂(u)`.
    pub fn striction_point(&self) -> Vector3<f64> {
        let qu = self.q.derivative(1);
        self.base - self.q.value() * (self.base_velocity.dot(&qu) / qu.norm_squared())
    }

    pub(crate) fn sample(&self, s_q: f64) -> FrenetSample {
        FrenetSample {
            u: self.u,
            s_q,
            q: self.q.value(),
            h: self.h.value(),
            a: self.a.value(),
            kappa_q: self.kappa.value(),
            kappa_q_prime: self.kappa_prime().value(),
            speed: self.speed.value(),
            striction_point: self.striction_point(),
        }
    }
}

/// Jet of `q/‖q‖`.
fn unit_director(spec: &RuledSurfaceSpec, u: f64, order: usize) -> Result<VecJet> {
    let q = spec.director.jet(u, order)?;
    let len = q.norm();
    if !(len.value() > 0.0) {
        return Err(Error::InvalidSpec(format!("director vanishes at u = {u}")));
    }
    Ok(q.div(&len))
}

/// `‖dq̂/du‖` at `u`.
pub fn director_speed(spec: &RuledSurfaceSpec, u: f64) -> Result<f64> {
    let q = unit_director(spec, u, 1)?;
    Ok(q.differentiate().value().norm())
}

/// Central point of the ruling at `u`.
pub fn striction_point(spec: &RuledSurfaceSpec, u: f64, tol: &Tolerances) -> Result<Vector3<f64>> {
    let f = spec.base.jet(u, 1)?;
    let q = unit_director(spec, u, 1)?;
    let qu = q.derivative(1);
    let speed = qu.norm();
    if !(speed > tol.eps_cyl) {
        return Err(Error::Cylindrical { u, speed });
    }
    Ok(f.value() - q.value() * (f.derivative(1).dot(&qu) / (speed * speed)))
}

/// Frame, curvature and arc length at a single parameter value.
pub fn frenet_apparatus(spec: &RuledSurfaceSpec, u: f64, tol: &Tolerances) -> Result<FrenetSample> {
    let jets = FrameJets::at(spec, u, SAMPLE_ORDER, tol)?;
    let s_q = arc_length_sq(spec, spec.u_min, u, tol)?;
    Ok(jets.sample(s_q))
}

fn speed_checked(spec: &RuledSurfaceSpec, u: f64, tol: &Tolerances) -> Result<f64> {
    let speed = director_speed(spec, u)?;
    if !(speed > tol.eps_cyl) {
        return Err(Error::Cylindrical { u, speed });
    }
    Ok(speed)
}

/// Arc length of the spherical image between `u0` and `u1`, by 16-point
/// Gauss–Legendre panels at the density of the sampling grid.
pub fn arc_length_sq(spec: &RuledSurfaceSpec, u0: f64, u1: f64, tol: &Tolerances) -> Result<f64> {
    let slack = 1e-12 * (spec.u_max - spec.u_min);
    if !(spec.u_min - slack <= u0 && u0 <= u1 && u1 <= spec.u_max + slack) {
        return Err(Error::InvalidSpec(format!(
            "arc-length interval [{u0}, {u1}] outside [{}, {}]",
            spec.u_min, spec.u_max
        )));
    }
    if u0 == u1 {
        return Ok(0.0);
    }
    let panels = ((spec.n_samples as f64) * (u1 - u0) / (spec.u_max - spec.u_min))
        .ceil()
        .max(1.0) as usize;
    let rule = GaussLegendre::sixteen();
    let width = (u1 - u0) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = u0 + p as f64 * width;
        let b = if p + 1 == panels { u1 } else { a + width };
        total += rule.panel(a, b, |u| speed_checked(spec, u, tol))?;
    }
    Ok(total)
}

/// Unit normal `(ḟ + v dq̂/du) × q̂`, normalized by its own length.
pub fn surface_normal(spec: &RuledSurfaceSpec, u: f64, v: f64) -> Result<Vector3<f64>> {
    let f = spec.base.jet(u, 1)?;
    let q = unit_director(spec, u, 1)?;
    let tangent = f.derivative(1) + q.derivative(1) * v;
    let m = tangent.cross(&q.value());
    let len = m.norm();
    if !(len > 1e-12 * tangent.norm().max(1.0)) {
        return Err(Error::DegenerateNormal { u, v });
    }
    Ok(m / len)
}

/// Frenet samples over the whole parameter grid.
#[derive(Clone, Debug)]
pub struct FrameField {
    pub spec: RuledSurfaceSpec,
    pub tolerances: Tolerances,
    pub samples: Vec<FrenetSample>,
}

impl FrameField {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn kappa(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.kappa_q).collect()
    }
}

/// Analyzes `spec` on its grid. `s_q` accumulates one quadrature panel per
/// grid interval.
pub fn analyze(spec: &RuledSurfaceSpec, tol: &Tolerances) -> Result<FrameField> {
    let grid = spec.grid();
    let jets = par_map(&grid, |&u| FrameJets::at(spec, u, SAMPLE_ORDER, tol))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rule = GaussLegendre::sixteen();
    let pieces = par_map(&grid.windows(2).collect::<Vec<_>>(), |w| {
        rule.panel(w[0], w[1], |u| speed_checked(spec, u, tol))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut s = 0.0;
    let mut samples = Vec::with_capacity(grid.len());
    for (i, j) in jets.iter().enumerate() {
        if i > 0 {
            s += pieces[i - 1];
        }
        samples.push(j.sample(s));
    }
    Ok(FrameField {
        spec: spec.clone(),
        tolerances: *tol,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn helicoid() -> RuledSurfaceSpec {
        RuledSurfaceSpec::from_text("0,0,u", "cos(u),sin(u),0", 0.0, 2.0 * PI, 64).unwrap()
    }

    fn small_circle(theta: f64) -> RuledSurfaceSpec {
        let d = format!("sin({theta:?})*cos(u), sin({theta:?})*sin(u), cos({theta:?})");
        RuledSurfaceSpec::from_text("0,0,0", &d, 0.0, 2.0 * PI, 64).unwrap()
    }

    #[test]
    fn helicoid_striction_is_the_axis() {
        let tol = Tolerances::default();
        for &u in &[0.0, 0.4, 2.5] {
            let c = striction_point(&helicoid(), u, &tol).unwrap();
            assert_relative_eq!(c, Vector3::new(0.0, 0.0, u), epsilon = 1e-14);
        }
    }

    #[test]
    fn cone_striction_is_the_apex() {
        let c = striction_point(&small_circle(1.0), 0.3, &Tolerances::default()).unwrap();
        assert_eq!(c, Vector3::zeros());
    }

    #[test]
    fn cylinder_is_rejected() {
        let spec = RuledSurfaceSpec::from_text("cos(u),sin(u),0", "0,0,1", 0.0, 1.0, 8).unwrap();
        let tol = Tolerances::default();
        assert!(matches!(
            striction_point(&spec, 0.5, &tol),
            Err(Error::Cylindrical { .. })
        ));
        assert!(matches!(
            frenet_apparatus(&spec, 0.5, &tol),
            Err(Error::Cylindrical { .. })
        ));
        assert!(matches!(
            arc_length_sq(&spec, 0.0, 1.0, &tol),
            Err(Error::Cylindrical { .. })
        ));
    }

    #[test]
    fn helicoid_frame() {
        let tol = Tolerances::default();
        let u = 0.7;
        let s = frenet_apparatus(&helicoid(), u, &tol).unwrap();
        assert_relative_eq!(s.q, Vector3::new(u.cos(), u.sin(), 0.0), epsilon = 1e-15);
        assert_relative_eq!(s.h, Vector3::new(-u.sin(), u.cos(), 0.0), epsilon = 1e-15);
        assert_relative_eq!(s.a, Vector3::z(), epsilon = 1e-15);
        assert!(s.kappa_q.abs() < 1e-14);
        assert_relative_eq!(s.s_q, u, epsilon = 1e-13);
    }

    #[test]
    fn small_circle_curvature_is_cot_theta() {
        let s = frenet_apparatus(&small_circle(FRAC_PI_4), 1.1, &Tolerances::default()).unwrap();
        assert_relative_eq!(s.kappa_q, 1.0, epsilon = 1e-13);
        assert!(s.kappa_q_prime.abs() < 1e-12);
    }

    #[test]
    fn small_circle_arc_length() {
        let tol = Tolerances::default();
        let l = arc_length_sq(&small_circle(FRAC_PI_4), 0.0, 2.0 * PI, &tol).unwrap();
        assert_relative_eq!(l, 4.442882938158366, epsilon = 1e-12);
        assert_eq!(arc_length_sq(&small_circle(FRAC_PI_4), 1.0, 1.0, &tol).unwrap(), 0.0);
        let h = arc_length_sq(&helicoid(), 0.0, 1.0, &tol).unwrap();
        assert_relative_eq!(h, 1.0, epsilon = 1e-14);
        assert!(arc_length_sq(&helicoid(), 1.0, 0.5, &tol).is_err());
    }

    #[test]
    fn helicoid_normal_on_axis_is_h() {
        let u = 0.9;
        let m = surface_normal(&helicoid(), u, 0.0).unwrap();
        assert_relative_eq!(m, Vector3::new(-u.sin(), u.cos(), 0.0), epsilon = 1e-15);
    }

    #[test]
    fn helicoid_normal_tends_to_the_central_tangent_line() {
        for &v in &[1e6, -1e6] {
            let m = surface_normal(&helicoid(), 0.3, v).unwrap();
            // angle between the lines spanned by m and a = e3
            assert!(m.z.abs() > 1.0 - 1e-11, "v = {v}: {m}");
        }
    }

    #[test]
    fn cone_apex_normal_is_degenerate() {
        assert!(matches!(
            surface_normal(&small_circle(1.0), 0.2, 0.0),
            Err(Error::DegenerateNormal { .. })
        ));
    }

    #[test]
    fn analyze_accumulates_arc_length() {
        let tol = Tolerances::default();
        let field = analyze(&small_circle(FRAC_PI_4), &tol).unwrap();
        assert_eq!(field.len(), 64);
        let last = field.samples.last().unwrap();
        assert_relative_eq!(last.s_q, 2.0 * PI * FRAC_PI_4.sin(), epsilon = 1e-12);
        assert!(field.samples.windows(2).all(|w| w[1].s_q > w[0].s_q && w[1].u > w[0].u));
    }
}
