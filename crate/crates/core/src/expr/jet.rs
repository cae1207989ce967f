//! Truncated univariate Taylor arithmetic.
//!
//! A [`Jet`] carries a function value together with its derivatives up to a
//! fixed order at one evaluation point. Internally the jet stores normalized
//! Taylor coefficients `f^(k)(t0) / k!`, which keeps every recurrence below
//! free of binomial factors; the public accessors convert back to derivative
//! values.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::Vector3;

/// Highest derivative order a jet can carry.
pub const MAX_ORDER: usize = 8;
const LEN: usize = MAX_ORDER + 1;

const FACTORIAL: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    order: usize,
    coeffs: [f64; LEN],
}

impl Jet {
    /// The constant function `value`.
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = [0.0; LEN];
        coeffs[0] = value;
        Self { order, coeffs }
    }

    /// The identity function evaluated at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut jet = Self::constant(t0, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    /// Builds a jet from derivative values `d[0..=order]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        assert!(!d.is_empty() && d.len() <= MAX_ORDER + 1);
        let mut jet = Self::constant(0.0, d.len() - 1);
        for (k, v) in d.iter().enumerate() {
            jet.coeffs[k] = v / FACTORIAL[k];
        }
        jet
    }

    /// Builds a jet from normalized Taylor coefficients.
    pub fn from_coefficients(c: &[f64]) -> Self {
        assert!(!c.is_empty() && c.len() <= MAX_ORDER + 1);
        let mut jet = Self::constant(0.0, c.len() - 1);
        jet.coeffs[..c.len()].copy_from_slice(c);
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// The `k`-th derivative value.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order, "derivative {k} beyond jet order {}", self.order);
        self.coeffs[k] * FACTORIAL[k]
    }

    /// All derivative values `d[0..=order]`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order).map(|k| self.derivative(k)).collect()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs[..=self.order]
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_finite())
    }

    /// Drops derivatives above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut coeffs = [0.0; LEN];
        coeffs[..=order].copy_from_slice(&self.coeffs[..=order]);
        Self { order, coeffs }
    }

    /// The jet of the derivative, one order shorter.
    ///
    /// Panics on an order-0 jet, which carries no derivative information.
    pub fn differentiate(&self) -> Self {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut coeffs = [0.0; LEN];
        for k in 0..=order {
            coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        Self { order, coeffs }
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = *self;
        for c in out.coeffs[..=self.order].iter_mut() {
            *c = f(*c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|c| c * s)
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0, self.order) / *self
    }

    pub fn sqrt(&self) -> Self {
        let n = self.order;
        let a = &self.coeffs;
        let mut r = [0.0; LEN];
        r[0] = a[0].sqrt();
        for k in 1..=n {
            let mut acc = a[k];
            for j in 1..k {
                acc -= r[j] * r[k - j];
            }
            r[k] = acc / (2.0 * r[0]);
        }
        Self { order: n, coeffs: r }
    }

    pub fn exp(&self) -> Self {
        let n = self.order;
        let a = &self.coeffs;
        let mut e = [0.0; LEN];
        e[0] = a[0].exp();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self { order: n, coeffs: e }
    }

    pub fn ln(&self) -> Self {
        let n = self.order;
        let a = &self.coeffs;
        let mut l = [0.0; LEN];
        l[0] = a[0].ln();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Self { order: n, coeffs: l }
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.order;
        let a = &self.coeffs;
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        (s[0], c[0]) = a[0].sin_cos();
        for k in 1..=n {
            let (mut sk, mut ck) = (0.0, 0.0);
            for j in 1..=k {
                let ja = j as f64 * a[j];
                sk += ja * c[k - j];
                ck -= ja * s[k - j];
            }
            s[k] = sk / k as f64;
            c[k] = ck / k as f64;
        }
        (Self { order: n, coeffs: s }, Self { order: n, coeffs: c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    /// `|f|`, differentiated through the sign of the value.
    pub fn abs(&self) -> Self {
        if self.coeffs[0] < 0.0 {
            -*self
        } else {
            *self
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i32) -> Self {
        let mut base = *self;
        let mut acc = Jet::constant(1.0, self.order);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    /// Real power for a positive base.
    pub fn powf(&self, p: f64) -> Self {
        (self.ln().scale(p)).exp()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coeffs = [0.0; LEN];
        for k in 0..=order {
            coeffs[k] = self.coeffs[k] + rhs.coeffs[k];
        }
        Jet { order, coeffs }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coeffs = [0.0; LEN];
        for k in 0..=order {
            coeffs[k] = self.coeffs[k] - rhs.coeffs[k];
        }
        Jet { order, coeffs }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coeffs = [0.0; LEN];
        for k in 0..=order {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Jet { order, coeffs }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let b = &rhs.coeffs;
        let mut c = [0.0; LEN];
        for k in 0..=order {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= b[j] * c[k - j];
            }
            c[k] = acc / b[0];
        }
        Jet { order, coeffs: c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

/// A 3-vector whose components are jets of a common order at a common point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VecJet(pub [Jet; 3]);

impl VecJet {
    pub fn new(x: Jet, y: Jet, z: Jet) -> Self {
        let order = x.order.min(y.order).min(z.order);
        Self([x.truncate(order), y.truncate(order), z.truncate(order)])
    }

    pub fn constant(v: Vector3<f64>, order: usize) -> Self {
        Self([
            Jet::constant(v.x, order),
            Jet::constant(v.y, order),
            Jet::constant(v.z, order),
        ])
    }

    pub fn order(&self) -> usize {
        self.0[0].order
    }

    pub fn value(&self) -> Vector3<f64> {
        Vector3::new(self.0[0].value(), self.0[1].value(), self.0[2].value())
    }

    /// The `k`-th derivative vector.
    pub fn derivative(&self, k: usize) -> Vector3<f64> {
        Vector3::new(
            self.0[0].derivative(k),
            self.0[1].derivative(k),
            self.0[2].derivative(k),
        )
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self(self.0.map(|j| j.truncate(order)))
    }

    pub fn differentiate(&self) -> Self {
        Self(self.0.map(|j| j.differentiate()))
    }

    pub fn dot(&self, rhs: &VecJet) -> Jet {
        self.0[0] * rhs.0[0] + self.0[1] * rhs.0[1] + self.0[2] * rhs.0[2]
    }

    pub fn cross(&self, rhs: &VecJet) -> VecJet {
        let [ax, ay, az] = self.0;
        let [bx, by, bz] = rhs.0;
        VecJet([ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx])
    }

    pub fn norm_squared(&self) -> Jet {
        self.dot(self)
    }

    /// Euclidean norm; the value must be nonzero for order ≥ 1.
    pub fn norm(&self) -> Jet {
        self.norm_squared().sqrt()
    }

    /// Multiplies every component by a scalar jet.
    pub fn scale(&self, s: &Jet) -> VecJet {
        VecJet(self.0.map(|j| j * *s))
    }

    pub fn scale_f64(&self, s: f64) -> VecJet {
        VecJet(self.0.map(|j| j.scale(s)))
    }

    /// Divides every component by a scalar jet.
    pub fn div(&self, s: &Jet) -> VecJet {
        let inv = s.recip();
        self.scale(&inv)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Jet::is_finite)
    }
}

impl Add for VecJet {
    type Output = VecJet;
    fn add(self, rhs: VecJet) -> VecJet {
        VecJet([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for VecJet {
    type Output = VecJet;
    fn sub(self, rhs: VecJet) -> VecJet {
        VecJet([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for VecJet {
    type Output = VecJet;
    fn neg(self) -> VecJet {
        self.scale_f64(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_derivatives_are_all_one_at_zero() {
        let e = Jet::variable(0.0, 4).exp();
        assert_eq!(e.derivatives().len(), 5);
        for d in e.derivatives() {
            assert_relative_eq!(d, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn geometric_series_division() {
        // 1/(1-t) at 0: k-th derivative is k!
        let t = Jet::variable(0.0, 6);
        let g = Jet::constant(1.0, 6) / (Jet::constant(1.0, 6) - t);
        for k in 0..=6 {
            assert_relative_eq!(g.derivative(k), FACTORIAL[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let t = Jet::variable(2.3, 5);
        let x = t * t + t.sin() + 3.0;
        let r = x.sqrt();
        let back = r * r;
        for k in 0..=5 {
            assert_relative_eq!(back.coefficients()[k], x.coefficients()[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn ln_inverts_exp() {
        let t = Jet::variable(-0.4, 6);
        let x = (t.cos() * 2.0).exp().ln();
        let y = t.cos() * 2.0;
        for k in 0..=6 {
            assert_relative_eq!(x.coefficients()[k], y.coefficients()[k], epsilon = 1e-13);
        }
    }

    #[test]
    fn powi_matches_powf_on_positive_base() {
        let t = Jet::variable(1.7, 5);
        let a = t.powi(-3);
        let b = t.powf(-3.0);
        for k in 0..=5 {
            assert_relative_eq!(a.derivative(k), b.derivative(k), max_relative = 1e-12);
        }
    }

    #[test]
    fn mixed_orders_truncate_to_minimum() {
        let a = Jet::variable(1.0, 4);
        let b = Jet::variable(1.0, 2);
        assert_eq!((a * b).order(), 2);
        assert_eq!((a + b).order(), 2);
        assert_eq!(a.differentiate().order(), 3);
    }

    #[test]
    fn cross_product_is_orthogonal() {
        let t = Jet::variable(0.3, 3);
        let u = VecJet::new(t.cos(), t.sin(), t);
        let v = VecJet::new(t * t, Jet::constant(1.0, 3), t.exp());
        let w = u.cross(&v);
        let d1 = w.dot(&u);
        let d2 = w.dot(&v);
        for k in 0..=3 {
            assert!(d1.derivative(k).abs() < 1e-13);
            assert!(d2.derivative(k).abs() < 1e-13);
        }
    }
}
