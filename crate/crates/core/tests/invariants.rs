use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use polyma::asymptotics::{interpolation_bound, mixed_root};
use polyma::constructions::{counterexample_rhs, prop52_bump, thm63_h_profile};
use polyma::geometry::Polytope;
use polyma::harness::CompiledExpr;
use polyma::normalize::{theta_functionals, AffineMap, SecondOrderJet};

fn spd(entries: &[f64], n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(n, n, entries);
    m.transpose() * &m + DMatrix::identity(n, n) * 0.2
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn expression_jets_match_hand_derivatives(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
                                              x in proptest::collection::vec(-1.0f64..1.0, 3)) {
        let src = format!("{a}*x1^2 + {b}*sin(x2) + {c}*x1*x3 + exp(x3)");
        let e = CompiledExpr::new(&src, 3).unwrap();
        let want = a * x[0] * x[0] + b * x[1].sin() + c * x[0] * x[2] + x[2].exp();
        prop_assert!((e.eval(&x) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        let g = e.gradient_at(&x);
        let gw = [2.0 * a * x[0] + c * x[2], b * x[1].cos(), c * x[0] + x[2].exp()];
        let h = e.hessian_at(&x);
        let hw = DMatrix::from_row_slice(3, 3, &[2.0 * a, 0.0, c, 0.0, -b * x[1].sin(), 0.0, c, 0.0, x[2].exp()]);
        for i in 0..3 {
            prop_assert!((g[i] - gw[i]).abs() <= 1e-12);
            for j in 0..3 {
                prop_assert!((h[(i, j)] - hw[(i, j)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn affine_inverse_and_composition(m in proptest::collection::vec(-0.4f64..0.4, 9), t in proptest::collection::vec(-2.0f64..2.0, 3),
                                      x in proptest::collection::vec(-5.0f64..5.0, 3)) {
        let lin = DMatrix::identity(3, 3) + DMatrix::from_row_slice(3, 3, &m);
        let a = AffineMap::new(lin.clone(), DVector::from_column_slice(&t)).unwrap();
        let x = DVector::from_column_slice(&x);
        let back = a.inverse().apply(&a.apply(&x));
        prop_assert!((back - &x).norm() <= 1e-10 * (1.0 + x.norm()));
        let twice = a.compose(&a).apply(&x);
        prop_assert!((twice - a.apply(&a.apply(&x))).norm() <= 1e-10 * (1.0 + x.norm()));
        prop_assert!((a.determinant() - lin.determinant()).abs() <= 1e-12);
    }

    #[test]
    fn theta_is_invariant_under_hessian_scaling(e in proptest::collection::vec(-1.0f64..1.0, 9), s in 0.01f64..100.0, v in 0usize..8) {
        let p = Polytope::unit_cube(3);
        let x = p.vertices[v].clone();
        let h = spd(&e, 3);
        let t0 = theta_functionals(&SecondOrderJet::from_hessian(x.clone(), h.clone()), &p).unwrap().theta_max;
        let t1 = theta_functionals(&SecondOrderJet::from_hessian(x, h * s), &p).unwrap().theta_max;
        prop_assert!((t0 - t1).abs() <= 1e-9);
        prop_assert!(t0 > 0.0 && t0 < std::f64::consts::PI);
    }

    #[test]
    fn mixed_root_solves_the_determinant_equation(u11 in 0.2f64..3.0, u22 in 0.2f64..3.0, f in 0.01f64..1.0) {
        prop_assume!(u11 * u22 > f);
        let jet = SecondOrderJet::from_hessian(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[u11, 0.0, 0.0, u22]));
        let r = mixed_root(&jet, f).unwrap();
        let expected = (u11 * u22 - f).sqrt();
        prop_assert!((r.big - expected).abs() <= 1e-10);
        prop_assert!((r.small + expected).abs() <= 1e-10);
    }

    #[test]
    fn bump_is_c2_convex_and_monotone(eps0 in 0.01f64..2.0) {
        let g = prop52_bump(eps0).unwrap();
        // g″ is of size 1/ε₀ on the middle piece, so rounding there scales the same way.
        let tol = 1e-12 * eps0.recip().max(1.0);
        prop_assert!(g.continuity_defect() <= tol);
        prop_assert!(g.min_second_derivative(0.0, 3.0 * eps0, 400) >= -tol);
        for i in 0..100 {
            let t = 3.0 * eps0 * i as f64 / 99.0;
            prop_assert!(g.d1(t) <= 1e-12);
        }
    }

    #[test]
    fn h_profile_is_exactly_continuous(delta in 0.05f64..0.95) {
        let h = thm63_h_profile(delta).unwrap();
        prop_assert_eq!(h.continuity_defect(), 0.0);
        let d = delta.powi(3);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..200 {
            let t = 2.0 * d * i as f64 / 199.0;
            let [_, d1, d2] = h.eval_all(t);
            prop_assert!((0.0..=1.0).contains(&d2));
            prop_assert!(d1 >= prev);
            prev = d1;
        }
    }

    #[test]
    fn counterexample_profiles_are_ordered_and_lipschitz(k_max in 1u32..12, s in proptest::collection::vec(0.0f64..0.5, 2)) {
        let rhs = counterexample_rhs(k_max).unwrap();
        for &t in &s {
            prop_assert!(rhs.g.eval(t) <= rhs.g_tilde.eval(t) + 1e-15);
            prop_assert!(rhs.g.eval(t) >= 0.5 - 1e-15 && rhs.g_tilde.eval(t) <= 1.0 + 1e-15);
        }
        let (a, b) = (s[0], s[1]);
        prop_assume!((a - b).abs() > 1e-12);
        prop_assert!((rhs.g.eval(a) - rhs.g.eval(b)).abs() <= 2.0 * (a - b).abs() * (1.0 + 1e-9));
        prop_assert!((rhs.g_tilde.eval(a) - rhs.g_tilde.eval(b)).abs() <= 3.0 * (a - b).abs() * (1.0 + 1e-9));
    }

    #[test]
    fn interpolation_bound_holds_for_trigonometric_profiles(k in 0.1f64..6.0, amp in 0.01f64..1.0, alpha in 0.05f64..1.0) {
        // Norms are measured on a uniform sample of [0, 1].
        let xs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let f: Vec<f64> = xs.iter().map(|x| amp * (k * x).sin()).collect();
        let df: Vec<f64> = xs.iter().map(|x| amp * k * (k * x).cos()).collect();
        let a = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assume!(a > 0.0);
        let mut hold: f64 = 0.0;
        for i in 0..xs.len() {
            for j in 0..i {
                hold = hold.max((df[i] - df[j]).abs() / (xs[i] - xs[j]).powf(alpha));
            }
        }
        let dsup = df.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let b = (dsup + hold).max(a);
        let bound = interpolation_bound(a, b, alpha).unwrap();
        prop_assert!(dsup <= bound.sup_bound);
    }
}
