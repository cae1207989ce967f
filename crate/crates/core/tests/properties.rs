use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;

use ruled_slant::derived::{sa_apparatus, sh_apparatus};
use ruled_slant::expr::{eval_jet, eval_value, parse_expression, BinaryOp, Expr, UnaryOp};
use ruled_slant::frame::{self, FrenetSample};
use ruled_slant::slant::{constancy, Verdict};
use ruled_slant::synth::{integrate_frenet, CurvatureProfile, Triad};
use ruled_slant::{RuledSurfaceSpec, Tolerances};

/// Smooth expressions without domain restrictions on `[-1, 1]`.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (-2.0..2.0f64).prop_map(|c| Expr::constant((c * 100.0).round() / 100.0)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinaryOp::Mul, a, b)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Sin, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Cos, a)),
            inner.clone().prop_map(|a| Expr::unary(UnaryOp::Neg, a)),
            inner
                .clone()
                .prop_map(|a| Expr::unary(UnaryOp::Exp, Expr::unary(UnaryOp::Sin, a))),
            (inner, 2..4i32).prop_map(|(a, n)| Expr::binary(BinaryOp::Pow, a, Expr::constant(n as f64))),
        ]
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn jets_match_finite_differences(e in smooth_expr(), t in -1.0..1.0f64) {
        let j = eval_jet(&e, t, 2).unwrap();
        let h = 1e-4;
        let f = |x: f64| eval_value(&e, x).unwrap();
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
        let scale = 1.0 + j.value().abs() + j.derivative(1).abs() + j.derivative(2).abs();
        prop_assert!((j.derivative(1) - d1).abs() <= 1e-5 * scale, "{e}: {} vs {d1}", j.derivative(1));
        prop_assert!((j.derivative(2) - d2).abs() <= 1e-3 * scale, "{e}: {} vs {d2}", j.derivative(2));
    }

    #[test]
    fn products_obey_leibniz(f in smooth_expr(), g in smooth_expr(), t in -1.0..1.0f64) {
        let order = 5;
        let jf = eval_jet(&f, t, order).unwrap();
        let jg = eval_jet(&g, t, order).unwrap();
        let jp = eval_jet(&Expr::binary(BinaryOp::Mul, f, g), t, order).unwrap();
        for k in 0..=order {
            let expected: f64 = (0..=k).map(|j| binomial(k, j) * jf.derivative(j) * jg.derivative(k - j)).sum();
            let scale = 1.0 + (0..=k).map(|j| (binomial(k, j) * jf.derivative(j) * jg.derivative(k - j)).abs()).sum::<f64>();
            prop_assert!((jp.derivative(k) - expected).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn printing_round_trips(e in smooth_expr(), t in -1.0..1.0f64) {
        let text = e.to_string();
        let back = parse_expression(&text).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        let (a, b) = (eval_value(&e, t).unwrap(), eval_value(&back, t).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{text}: {a} vs {b}");
    }

    #[test]
    fn derived_frames_are_right_handed(kappa in -50.0..50.0f64, kappa_prime in -50.0..50.0f64, angle in 0.0..std::f64::consts::TAU) {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::new(1.0, 2.0, 3.0)), angle);
        let s = FrenetSample {
            u: 0.0,
            s_q: 0.0,
            q: r * Vector3::x(),
            h: r * Vector3::y(),
            a: r * Vector3::z(),
            kappa_q: kappa,
            kappa_q_prime: kappa_prime,
            speed: 1.0,
            striction_point: Vector3::zeros(),
        };
        let mut frames = vec![sh_apparatus(&s)];
        if kappa.abs() >= 1e-9 {
            frames.push(sa_apparatus(&s, 1e-9).unwrap());
        }
        for f in frames {
            prop_assert!((f.q.norm() - 1.0).abs() <= 1e-12);
            prop_assert!((f.h.norm() - 1.0).abs() <= 1e-12);
            prop_assert!(f.q.dot(&f.h).abs() <= 1e-12);
            prop_assert!((f.q.cross(&f.h) - f.a).norm() <= 1e-12);
            prop_assert!(f.ds_ratio > 0.0);
        }
    }

    #[test]
    fn constancy_is_monotone_in_tolerance(xs in prop::collection::vec(-1.0..1.0f64, 3..20), tol in 1e-9..1e-1f64) {
        let tight = constancy(&xs, tol, 0.0);
        let loose = constancy(&xs, 10.0 * tol, 0.0);
        if tight.verdict == Verdict::Yes {
            prop_assert_eq!(loose.verdict, Verdict::Yes);
        }
        prop_assert_eq!(tight.spread, loose.spread);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn striction_point_is_central(
        coeffs in prop::array::uniform12(-1.0..1.0f64),
        u in 0.2..6.0f64,
    ) {
        let base = format!(
            "{:?}*cos(u) + {:?}*sin(2*u), {:?}*u + {:?}*cos(u), {:?}*sin(u) + {:?}*u^2",
            coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]
        );
        let director = format!(
            "cos(u) + {:?}*sin(u), sin(u) + {:?}*cos(2*u), 1.5 + {:?}*cos(u) + {:?}*sin(3*u)",
            coeffs[6] * 0.3, coeffs[7] * 0.3, coeffs[8], coeffs[9] * 0.3
        );
        let spec = RuledSurfaceSpec::from_text(&base, &director, 0.0, 6.3, 8).unwrap();
        let tol = Tolerances::default();
        let s = frame::frenet_apparatus(&spec, u, &tol).unwrap();
        let v = (s.striction_point - spec.base.point(u).unwrap()).dot(&s.q);
        if let Ok(m) = frame::surface_normal(&spec, u, v) {
            prop_assert!(m.dot(&s.a).abs() <= 1e-8);
        }
        // away from the central point the normal turns towards a
        let m = frame::surface_normal(&spec, u, v + 10.0 + coeffs[10].abs()).unwrap();
        prop_assert!(m.dot(&s.a).abs() > 1e-3);
    }

    #[test]
    fn integration_commutes_with_rotations(
        axis in prop::array::uniform3(-1.0..1.0f64),
        angle in 0.0..std::f64::consts::TAU,
    ) {
        prop_assume!(Vector3::from(axis).norm() > 0.1);
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle);
        let p = CurvatureProfile::parse("sin(s) + s", 0.0, 2.0, "").unwrap();
        let plain = integrate_frenet(&p, &Triad::identity(), 128).unwrap();
        let rotated = integrate_frenet(&p, &Triad::identity().rotated(r.matrix()), 128).unwrap();
        for (a, b) in plain.triads().iter().zip(rotated.triads()) {
            let ra = a.rotated(r.matrix());
            prop_assert!((ra.q - b.q).norm() <= 1e-9);
            prop_assert!((ra.h - b.h).norm() <= 1e-9);
            prop_assert!((ra.a - b.a).norm() <= 1e-9);
        }
    }
}

#[test]
fn gram_defect_shrinks_with_the_step() {
    let p = CurvatureProfile::parse("sin(s) + s", 0.5, 3.0, "").unwrap();
    for n in [32, 64, 128, 256] {
        let f = integrate_frenet(&p, &Triad::identity(), n).unwrap();
        assert!(
            f.max_gram_defect_before <= f.step.powi(4),
            "n = {n}: {}",
            f.max_gram_defect_before
        );
        assert!(f.max_gram_defect_after <= 1e-14);
    }
}
