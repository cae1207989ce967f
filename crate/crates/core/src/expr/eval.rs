use super::ast::{BinaryOp, Expr, UnaryOp};
use super::jet::{Jet, VecJet, MAX_ORDER};
use super::ExprError;

/// Below this magnitude `abs` is treated as sitting on its kink.
const ABS_KINK: f64 = 1e-14;

fn domain(node: &Expr, t: f64, reason: &str) -> ExprError {
    ExprError::Domain {
        node: node.to_string(),
        t,
        reason: reason.to_string(),
    }
}

/// Evaluates `expr` and its first `order` derivatives at `t0`.
///
/// `d[i]` of the result is the exact `i`-th derivative up to rounding.
pub fn eval_jet(expr: &Expr, t0: f64, order: usize) -> Result<Jet, ExprError> {
    if order > MAX_ORDER {
        return Err(ExprError::OrderTooHigh {
            requested: order,
            max: MAX_ORDER,
        });
    }
    eval_node(expr, t0, order)
}

/// Plain value of `expr` at `t0`.
pub fn eval_value(expr: &Expr, t0: f64) -> Result<f64, ExprError> {
    eval_jet(expr, t0, 0).map(|j| j.value())
}

/// Componentwise [`eval_jet`] of a curve given by three expressions.
pub fn curve_jet(curve: &[Expr; 3], t0: f64, order: usize) -> Result<VecJet, ExprError> {
    let mut out = [Jet::constant(0.0, 0); 3];
    for (i, e) in curve.iter().enumerate() {
        out[i] = eval_jet(e, t0, order).map_err(|err| ExprError::Component {
            component: i + 1,
            source: Box::new(err),
        })?;
    }
    Ok(VecJet(out))
}

fn eval_node(node: &Expr, t0: f64, order: usize) -> Result<Jet, ExprError> {
    let out = match node {
        Expr::Const(v) => Jet::constant(*v, order),
        Expr::Named(c) => Jet::constant(c.value(), order),
        Expr::Var => Jet::variable(t0, order),
        Expr::Unary(op, arg) => {
            let a = eval_node(arg, t0, order)?;
            let x = a.value();
            match op {
                UnaryOp::Neg => -a,
                UnaryOp::Sin => a.sin(),
                UnaryOp::Cos => a.cos(),
                UnaryOp::Tan => {
                    if x.cos() == 0.0 {
                        return Err(domain(node, t0, "tangent pole"));
                    }
                    a.tan()
                }
                UnaryOp::Exp => a.exp(),
                UnaryOp::Log => {
                    if !(x > 0.0) {
                        return Err(domain(node, t0, "logarithm of a nonpositive value"));
                    }
                    a.ln()
                }
                UnaryOp::Sqrt => {
                    if x < 0.0 {
                        return Err(domain(node, t0, "square root of a negative value"));
                    }
                    if x == 0.0 && order >= 1 {
                        return Err(domain(node, t0, "square root is not differentiable at 0"));
                    }
                    a.sqrt()
                }
                UnaryOp::Abs => {
                    if x.abs() < ABS_KINK && order >= 1 {
                        return Err(domain(node, t0, "abs is not differentiable at 0"));
                    }
                    a.abs()
                }
            }
        }
        Expr::Binary(op, lhs, rhs) => {
            let a = eval_node(lhs, t0, order)?;
            match op {
                BinaryOp::Add => a + eval_node(rhs, t0, order)?,
                BinaryOp::Sub => a - eval_node(rhs, t0, order)?,
                BinaryOp::Mul => a * eval_node(rhs, t0, order)?,
                BinaryOp::Div => {
                    let b = eval_node(rhs, t0, order)?;
                    if b.value() == 0.0 {
                        return Err(domain(node, t0, "division by zero"));
                    }
                    a / b
                }
                BinaryOp::Pow => {
                    let p = eval_node(rhs, t0, 0)?.value();
                    let x = a.value();
                    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                        if p < 0.0 && x == 0.0 {
                            return Err(domain(node, t0, "negative power of zero"));
                        }
                        a.powi(p as i32)
                    } else {
                        if !(x > 0.0) {
                            return Err(domain(node, t0, "non-integer power of a nonpositive base"));
                        }
                        a.powf(p)
                    }
                }
            }
        }
    };
    if !out.is_finite() {
        return Err(domain(node, t0, "non-finite result"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use approx::assert_relative_eq;

    fn jet(src: &str, t0: f64, order: usize) -> Vec<f64> {
        eval_jet(&parse_expression(src).unwrap(), t0, order)
            .unwrap()
            .derivatives()
    }

    #[test]
    fn sine_maclaurin() {
        let d = jet("sin(t)", 0.0, 3);
        let want = [0.0, 1.0, 0.0, -1.0];
        for (a, b) in d.iter().zip(want) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn square_polynomial() {
        assert_eq!(jet("t^2", 3.0, 3), vec![9.0, 6.0, 2.0, 0.0]);
    }

    #[test]
    fn exp_self_derivative() {
        for d in jet("exp(t)", 0.0, 4) {
            assert_relative_eq!(d, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_addition() {
        assert_eq!(jet("2+3", 0.7, 0), vec![5.0]);
        assert_eq!(jet("2+3", 0.7, 2), vec![5.0, 0.0, 0.0]);
    }

    #[test]
    fn named_constants() {
        assert_relative_eq!(jet("pi", 0.0, 0)[0], std::f64::consts::PI);
        assert_relative_eq!(jet("e^2", 0.0, 0)[0], std::f64::consts::E.powi(2), max_relative = 1e-15);
    }

    #[test]
    fn fractional_power_of_positive_base() {
        // d/dt t^(1/2) = 1/(2 sqrt t)
        let d = jet("t^0.5", 4.0, 1);
        assert_relative_eq!(d[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(d[1], 0.25, epsilon = 1e-14);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let e = eval_jet(&parse_expression("1 + log(t - 1)").unwrap(), 0.5, 1).unwrap_err();
        match e {
            ExprError::Domain { node, .. } => assert_eq!(node, "log(t - 1.0)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(eval_jet(&parse_expression("sqrt(t)").unwrap(), -1.0, 0).is_err());
        assert!(eval_jet(&parse_expression("sqrt(t)").unwrap(), 0.0, 1).is_err());
        assert!(eval_jet(&parse_expression("sqrt(t)").unwrap(), 0.0, 0).is_ok());
        assert!(eval_jet(&parse_expression("1/t").unwrap(), 0.0, 0).is_err());
        assert!(eval_jet(&parse_expression("(-t)^0.5").unwrap(), 1.0, 0).is_err());
        assert!(eval_jet(&parse_expression("t^-1").unwrap(), 0.0, 0).is_err());
    }

    #[test]
    fn abs_kink() {
        let e = parse_expression("abs(t)").unwrap();
        assert!(eval_jet(&e, 0.0, 1).is_err());
        assert_eq!(eval_jet(&e, 0.0, 0).unwrap().value(), 0.0);
        assert_eq!(eval_jet(&e, -2.0, 2).unwrap().derivatives(), vec![2.0, -1.0, 0.0]);
    }

    #[test]
    fn order_limit() {
        let e = parse_expression("t").unwrap();
        assert!(eval_jet(&e, 0.0, MAX_ORDER).is_ok());
        assert!(matches!(
            eval_jet(&e, 0.0, MAX_ORDER + 1),
            Err(ExprError::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn curve_examples() {
        let c = crate::expr::parse_curve("cos(t), sin(t), 0").unwrap();
        let j = curve_jet(&c, 0.0, 1).unwrap();
        assert_eq!(j.value(), nalgebra::Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(j.derivative(1), nalgebra::Vector3::new(0.0, 1.0, 0.0));

        let c = crate::expr::parse_curve("0,0,t").unwrap();
        let j = curve_jet(&c, 1.25, 2).unwrap();
        assert_eq!(j.value(), nalgebra::Vector3::new(0.0, 0.0, 1.25));
        assert_eq!(j.derivative(1), nalgebra::Vector3::new(0.0, 0.0, 1.0));
        assert_eq!(j.derivative(2), nalgebra::Vector3::zeros());

        let c = crate::expr::parse_curve("t, log(t), 0").unwrap();
        match curve_jet(&c, 0.0, 1) {
            Err(ExprError::Component { component, source }) => {
                assert_eq!(component, 2);
                assert!(matches!(*source, ExprError::Domain { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
