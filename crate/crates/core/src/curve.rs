//! Space curves that can be evaluated as jets, and the ruled-surface
//! specification built from two of them.

use nalgebra::Vector3;

use crate::expr::{self, Expr, ExprError, Jet, VecJet, MAX_ORDER};
use crate::{Error, Result};

/// A parametrized space curve.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve {
    /// Three coordinate expressions.
    Expression(Box<[Expr; 3]>),
    /// Piecewise quintic interpolation of samples on a uniform grid.
    Sampled(SampledCurve),
    /// Piecewise Taylor polynomials around uniformly spaced knots.
    Taylor(TaylorCurve),
}

impl Curve {
    pub fn from_exprs(exprs: [Expr; 3]) -> Self {
        Curve::Expression(Box::new(exprs))
    }

    /// Parses `"x, y, z"`.
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        expr::parse_curve(text).map(Curve::from_exprs)
    }

    /// The constant curve at the origin.
    pub fn origin() -> Self {
        Curve::from_exprs([Expr::Const(0.0), Expr::Const(0.0), Expr::Const(0.0)])
    }

    pub fn jet(&self, u: f64, order: usize) -> Result<VecJet, ExprError> {
        if order > MAX_ORDER {
            return Err(ExprError::OrderTooHigh {
                requested: order,
                max: MAX_ORDER,
            });
        }
        match self {
            Curve::Expression(e) => expr::curve_jet(e, u, order),
            Curve::Sampled(s) => Ok(s.jet(u, order)),
            Curve::Taylor(t) => Ok(t.jet(u, order)),
        }
    }

    pub fn point(&self, u: f64) -> Result<Vector3<f64>, ExprError> {
        self.jet(u, 0).map(|j| j.value())
    }

    /// Short human-readable description used in report echoes.
    pub fn describe(&self) -> String {
        match self {
            Curve::Expression(e) => format!("{}, {}, {}", e[0], e[1], e[2]),
            Curve::Sampled(s) => format!(
                "sampled({} points on [{}, {}])",
                s.points.len(),
                s.start,
                s.start + s.step * (s.points.len() - 1) as f64
            ),
            Curve::Taylor(t) => format!(
                "taylor({} knots on [{}, {}])",
                t.coeffs.len(),
                t.start,
                t.start + t.step * (t.coeffs.len() - 1) as f64
            ),
        }
    }
}

/// Uniform samples `points[i] = c(start + i*step)` interpolated by the
/// degree-5 polynomial through the six samples surrounding the query.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    start: f64,
    step: f64,
    points: Vec<Vector3<f64>>,
}

const STENCIL: usize = 6;

impl SampledCurve {
    pub fn new(start: f64, step: f64, points: Vec<Vector3<f64>>) -> Result<Self> {
        if points.len() < STENCIL {
            return Err(Error::InvalidSpec(format!(
                "sampled curve needs at least {STENCIL} points, got {}",
                points.len()
            )));
        }
        if !(step > 0.0) || !start.is_finite() {
            return Err(Error::InvalidSpec("sampled curve needs a positive step".into()));
        }
        Ok(Self { start, step, points })
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    fn jet(&self, u: f64, order: usize) -> VecJet {
        let n = self.points.len();
        let cell = ((u - self.start) / self.step).floor();
        let cell = if cell.is_nan() {
            0.0
        } else {
            cell.clamp(0.0, (n - 2) as f64)
        } as usize;
        let first = cell.saturating_sub(2).min(n - STENCIL);
        let xs: [f64; STENCIL] = std::array::from_fn(|k| self.start + (first + k) as f64 * self.step);
        let t = Jet::variable(u, order);
        let mut out = [Jet::constant(0.0, order); 3];
        for (axis, slot) in out.iter_mut().enumerate() {
            // Newton divided differences, then Horner in jets.
            let mut dd: [f64; STENCIL] = std::array::from_fn(|k| self.points[first + k][axis]);
            for level in 1..STENCIL {
                for k in (level..STENCIL).rev() {
                    dd[k] = (dd[k] - dd[k - 1]) / (xs[k] - xs[k - level]);
                }
            }
            let mut acc = Jet::constant(dd[STENCIL - 1], order);
            for k in (0..STENCIL - 1).rev() {
                acc = acc * (t - xs[k]) + dd[k];
            }
            *slot = acc;
        }
        VecJet(out)
    }
}

/// Taylor coefficient vectors around knots `start + i*step`; a query is
/// answered by the polynomial of the nearest knot.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCurve {
    start: f64,
    step: f64,
    coeffs: Vec<Vec<Vector3<f64>>>,
}

impl TaylorCurve {
    pub fn new(start: f64, step: f64, coeffs: Vec<Vec<Vector3<f64>>>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidSpec("taylor curve needs coefficients".into()));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidSpec("taylor curve needs a positive step".into()));
        }
        Ok(Self { start, step, coeffs })
    }

    fn jet(&self, u: f64, order: usize) -> VecJet {
        let n = self.coeffs.len();
        let knot = ((u - self.start) / self.step).round();
        let knot = if knot.is_nan() {
            0.0
        } else {
            knot.clamp(0.0, (n - 1) as f64)
        } as usize;
        let delta = u - (self.start + knot as f64 * self.step);
        let t = Jet::variable(delta, order);
        let c = &self.coeffs[knot];
        let mut out = [Jet::constant(0.0, order); 3];
        for (axis, slot) in out.iter_mut().enumerate() {
            let mut acc = Jet::constant(c[c.len() - 1][axis], order);
            for k in (0..c.len() - 1).rev() {
                acc = acc * t + c[k][axis];
            }
            *slot = acc;
        }
        VecJet(out)
    }
}

/// `r(u, v) = f(u) + v q̂(u)` on `[u_min, u_max]`, analyzed on `n_samples`
/// uniformly spaced parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct RuledSurfaceSpec {
    pub base: Curve,
    /// Any nonvanishing direction field; normalized before differentiation.
    pub director: Curve,
    pub u_min: f64,
    pub u_max: f64,
    pub n_samples: usize,
}

impl RuledSurfaceSpec {
    pub fn new(base: Curve, director: Curve, u_min: f64, u_max: f64, n_samples: usize) -> Result<Self> {
        if !(u_min.is_finite() && u_max.is_finite() && u_min < u_max) {
            return Err(Error::InvalidSpec(format!(
                "parameter domain [{u_min}, {u_max}] is empty or not finite"
            )));
        }
        if n_samples < 3 {
            return Err(Error::InvalidSpec(format!(
                "n_samples must be at least 3, got {n_samples}"
            )));
        }
        Ok(Self {
            base,
            director,
            u_min,
            u_max,
            n_samples,
        })
    }

    /// Parses comma-separated base and director triples.
    pub fn from_text(base: &str, director: &str, u_min: f64, u_max: f64, n_samples: usize) -> Result<Self> {
        Self::new(Curve::parse(base)?, Curve::parse(director)?, u_min, u_max, n_samples)
    }

    pub fn with_samples(&self, n_samples: usize) -> Result<Self> {
        Self::new(
            self.base.clone(),
            self.director.clone(),
            self.u_min,
            self.u_max,
            n_samples,
        )
    }

    /// The `i`-th grid parameter.
    pub fn grid_point(&self, i: usize) -> f64 {
        if i + 1 == self.n_samples {
            return self.u_max;
        }
        self.u_min + (self.u_max - self.u_min) * i as f64 / (self.n_samples - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n_samples).map(|i| self.grid_point(i)).collect()
    }

    /// Surface point `f(u) + v q̂(u)`.
    pub fn point(&self, u: f64, v: f64) -> Result<Vector3<f64>> {
        let f = self.base.point(u)?;
        let q = self.director.point(u)?;
        let len = q.norm();
        if !(len > 0.0) {
            return Err(Error::InvalidSpec(format!("director vanishes at u = {u}")));
        }
        Ok(f + q * (v / len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sampled_curve_reproduces_quintics_exactly() {
        let p = |x: f64| Vector3::new(x.powi(5) - 2.0 * x, x * x, 1.0 - x.powi(3));
        let pts: Vec<_> = (0..11).map(|i| p(0.3 * i as f64)).collect();
        let c = SampledCurve::new(0.0, 0.3, pts).unwrap();
        for &u in &[0.0, 0.17, 1.5, 2.99, 3.0] {
            let j = c.jet(u, 3);
            assert_relative_eq!(j.value(), p(u), epsilon = 1e-11);
            let d1 = Vector3::new(5.0 * u.powi(4) - 2.0, 2.0 * u, -3.0 * u * u);
            assert_relative_eq!(j.derivative(1), d1, epsilon = 1e-10);
            let d3 = Vector3::new(60.0 * u * u, 0.0, -6.0);
            assert_relative_eq!(j.derivative(3), d3, epsilon = 1e-8);
        }
    }

    #[test]
    fn sampled_curve_needs_a_stencil() {
        assert!(SampledCurve::new(0.0, 1.0, vec![Vector3::zeros(); 5]).is_err());
    }

    #[test]
    fn taylor_curve_uses_nearest_knot() {
        // knots at 0 and 1 carrying exp expansions about each knot
        let series = |x0: f64| -> Vec<Vector3<f64>> {
            let mut f = 1.0;
            (0..9)
                .map(|k| {
                    if k > 0 {
                        f *= k as f64;
                    }
                    Vector3::new(x0.exp() / f, 0.0, 0.0)
                })
                .collect()
        };
        let c = TaylorCurve::new(0.0, 1.0, vec![series(0.0), series(1.0)]).unwrap();
        for &u in &[-0.1, 0.2, 0.49, 0.51, 1.3] {
            let j = c.jet(u, 2);
            assert_relative_eq!(j.value().x, u.exp(), max_relative = 1e-7);
            assert_relative_eq!(j.derivative(2).x, u.exp(), max_relative = 1e-5);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(RuledSurfaceSpec::from_text("0,0,t", "cos(t),sin(t),0", 1.0, 1.0, 10).is_err());
        assert!(RuledSurfaceSpec::from_text("0,0,t", "cos(t),sin(t),0", 0.0, 1.0, 2).is_err());
        let s = RuledSurfaceSpec::from_text("0,0,t", "cos(t),sin(t),0", 0.0, 1.0, 5).unwrap();
        assert_eq!(s.grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
