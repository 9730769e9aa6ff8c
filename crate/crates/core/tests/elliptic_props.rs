use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use twoarc::elliptic::{complete_integrals, in_parallelogram, ExtComplex, Modulus};

fn modulus_strategy() -> impl Strategy<Value = Modulus> {
    (0.02f64..=1.0, -1.5f64..1.5).prop_filter_map("k outside D_k", |(r, theta)| {
        complete_integrals(Complex64::from_polar(r, theta)).ok()
    })
}

fn rel(err: Complex64, scale: f64) -> f64 {
    err.norm() / (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pythagorean_identities(m in modulus_strategy(), l in 0.0f64..1.0, lp in -1.0f64..1.0) {
        let u = m.point(l, lp);
        prop_assume!(m.pole_distance(u) >= 0.05 * m.min_period_scale());
        let j = m.jacobi(u).unwrap();
        let scale = j.sn.norm_sqr() + j.cn.norm_sqr() + j.dn.norm_sqr();
        prop_assert!(rel(j.sn * j.sn + j.cn * j.cn - 1.0, scale) <= 1e-10);
        prop_assert!(rel(j.dn * j.dn + m.k2() * j.sn * j.sn - 1.0, scale) <= 1e-10);
    }

    #[test]
    fn sn2_periods(m in modulus_strategy(), l in 0.0f64..1.0, lp in -1.0f64..1.0) {
        let u = m.point(l, lp);
        prop_assume!(m.pole_distance(u) >= 0.05 * m.min_period_scale());
        let s = m.sn2(u).unwrap();
        let s1 = m.sn2(u + m.big_k * 2.0).unwrap();
        let s2 = m.sn2(u + Complex64::i() * m.big_k_prime * 2.0).unwrap();
        prop_assert!(rel(s1 - s, s.norm()) <= 1e-10);
        prop_assert!(rel(s2 - s, s.norm()) <= 1e-10);
    }

    #[test]
    fn difference_formula(
        m in modulus_strategy(),
        l1 in 0.0f64..1.0, lp1 in -1.0f64..1.0,
        l2 in 0.0f64..1.0, lp2 in -1.0f64..1.0,
    ) {
        let u = m.point(l1, lp1);
        let v = m.point(l2, lp2);
        let guard = 0.05 * m.min_period_scale();
        let half_sum = (u + v) * 0.5;
        let half_diff = (u - v) * 0.5;
        for p in [u, v, half_sum, half_diff] {
            prop_assume!(m.pole_distance(p) >= guard);
        }
        let ju = m.jacobi(u).unwrap();
        let jv = m.jacobi(v).unwrap();
        let js = m.jacobi(half_sum).unwrap();
        let jd = m.jacobi(half_diff).unwrap();
        let denom = Complex64::new(1.0, 0.0) - m.k2() * js.sn * js.sn * jd.sn * jd.sn;
        prop_assume!(denom.norm() > 1e-3);
        let rhs = jd.sn * js.cn * js.dn * 2.0 / denom;
        let lhs = ju.sn - jv.sn;
        let scale = ju.sn.norm() + jv.sn.norm();
        prop_assert!(rel(lhs - rhs, scale) <= 1e-9, "lhs {} rhs {}", lhs, rhs);
    }

    #[test]
    fn sn_bounded_by_tan(m in modulus_strategy(), r in 0.0f64..=PI / 4.0, arg in 0.0f64..(2.0 * PI)) {
        let u = Complex64::from_polar(r, arg);
        let s = m.jacobi(u).unwrap().sn.norm();
        prop_assert!(s <= u.norm().tan() + 1e-12, "|sn| {} > tan {}", s, u.norm().tan());
        prop_assert!(u.norm().tan() <= 4.0 / PI * u.norm() + 1e-12);
    }

    #[test]
    fn inverse_round_trip(m in modulus_strategy(), l in 0.001f64..0.999, lp in -0.999f64..0.999) {
        let rho = m.point(l, lp);
        prop_assume!(m.pole_distance(rho) >= 1e-3 * m.min_period_scale());
        let w = m.sn2(rho).unwrap();
        let back = m.inverse_sn2(ExtComplex::Finite(w)).unwrap();
        prop_assert!(in_parallelogram(back.lambda, back.lambda_prime));
        prop_assert!((back.rho - rho).norm() <= 1e-8 * (1.0 + rho.norm()), "{} vs {}", back.rho, rho);
    }

    #[test]
    fn forward_after_inverse(m in modulus_strategy(), re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let w = Complex64::new(re, im);
        let r = m.inverse_sn2(ExtComplex::Finite(w)).unwrap();
        prop_assert!(in_parallelogram(r.lambda, r.lambda_prime));
        let back = m.sn2(r.rho).unwrap();
        prop_assert!((back - w).norm() <= 1e-8 * (1.0 + w.norm()));
    }

    #[test]
    fn modulus_invariants(m in modulus_strategy()) {
        prop_assert!((m.k * m.k + m.k_prime * m.k_prime - 1.0).norm() <= 1e-12);
        prop_assert!(m.tau().im > 0.0);
        prop_assert!(m.nome_q.norm() < 1.0);
    }
}
