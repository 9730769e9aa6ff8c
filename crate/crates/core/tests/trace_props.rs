mod common;

use common::{c, random_tuple, rng};
use num_complex::Complex64;
use rand::Rng;
use twoarc::density::approximate_tuple;
use twoarc::geometry::{is_tn_tuple, EndpointTuple, DEFAULT_TN_TOL};
use twoarc::pell::{construct_pair, eval_poly, PolynomialPair};
use twoarc::poly::derivative;
use twoarc::trace::{endpoints_from_pair, trace_preimage};

fn pair_for(t: &EndpointTuple, n: u32) -> PolynomialPair {
    let cert = is_tn_tuple(t, n, DEFAULT_TN_TOL).unwrap();
    construct_pair(t, &cert).unwrap()
}

fn matches_as_set(got: &[Complex64], want: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; got.len()];
    got.len() == want.len()
        && want.iter().all(|w| {
            let hit = (0..got.len()).find(|&i| !used[i] && (got[i] - w).norm() <= tol);
            if let Some(i) = hit {
                used[i] = true;
            }
            hit.is_some()
        })
}

#[test]
fn endpoints_recover_random_tuples() {
    let mut r = rng(31);
    let mut done = 0;
    while done < 25 {
        let t = random_tuple(&mut r, 0.25);
        let n = r.gen_range(3..=12u32);
        let Ok(snapped) = approximate_tuple(&t, n).and_then(|a| a.snapped_tuple()) else {
            continue;
        };
        let cert = is_tn_tuple(&snapped, n, DEFAULT_TN_TOL).unwrap();
        let Ok(pair) = construct_pair(&snapped, &cert) else {
            continue;
        };
        let ends = endpoints_from_pair(&pair).unwrap();
        assert!(
            matches_as_set(&ends, &snapped.points(), 1e-6),
            "n {n}: {ends:?} vs {:?}",
            snapped.points()
        );
        done += 1;
    }
}

#[test]
fn traced_points_lie_on_the_preimage_and_branches_are_continuous() {
    let mut r = rng(32);
    let mut done = 0;
    while done < 8 {
        let t = random_tuple(&mut r, 0.25);
        let n = r.gen_range(3..=10u32);
        let Ok(snapped) = approximate_tuple(&t, n).and_then(|a| a.snapped_tuple()) else {
            continue;
        };
        let cert = is_tn_tuple(&snapped, n, DEFAULT_TN_TOL).unwrap();
        let Ok(pair) = construct_pair(&snapped, &cert) else {
            continue;
        };
        let tr = trace_preimage(&pair, 256).unwrap();
        assert!((1..=2).contains(&tr.component_count), "{}", tr.component_count);
        assert!(matches_as_set(&tr.endpoint_estimates, &snapped.points(), 1e-6));

        let mut total = 0usize;
        let mut inside = 0usize;
        for level in &tr.points {
            for z in &level.roots {
                total += 1;
                let v = eval_poly(&pair.t_coeffs, *z).unwrap();
                if v.im.abs() <= 1e-7 && v.re.abs() <= 1.0 + 1e-7 {
                    inside += 1;
                }
            }
        }
        assert!(inside as f64 >= 0.99 * total as f64, "{inside}/{total}");

        let dt_poly = derivative(&pair.t_coeffs);
        for w in tr.points.windows(2) {
            if w[0].flagged || w[1].flagged {
                continue;
            }
            let dt = (w[1].t - w[0].t).abs();
            for (a, b) in w[0].roots.iter().zip(&w[1].roots) {
                let step_a = dt / eval_poly(&dt_poly, *a).unwrap().norm();
                let step_b = dt / eval_poly(&dt_poly, *b).unwrap().norm();
                assert!(
                    (a - b).norm() <= 5.0 * step_a.max(step_b),
                    "jump {} at t {}",
                    (a - b).norm(),
                    w[0].t
                );
            }
        }
        done += 1;
    }
}

#[test]
fn component_counts_of_reference_cases() {
    let sym = EndpointTuple::new([c(-1.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)]).unwrap();
    let p4 = pair_for(&sym, 4);
    assert_eq!(trace_preimage(&p4, 256).unwrap().component_count, 2);
    assert!(matches_as_set(&endpoints_from_pair(&p4).unwrap(), &sym.points(), 1e-6));

    let cross = EndpointTuple::new([c(1.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(-1.0, 0.0)]).unwrap();
    let p2 = pair_for(&cross, 2);
    assert_eq!(trace_preimage(&p2, 256).unwrap().component_count, 1);
    assert!(matches_as_set(
        &endpoints_from_pair(&p2).unwrap(),
        &cross.points(),
        1e-6
    ));

    for cval in [0.3, 0.5, 0.8] {
        let t = EndpointTuple::new([c(-1.0, 0.0), c(-cval, 0.0), c(cval, 0.0), c(1.0, 0.0)]).unwrap();
        for n in [2u32, 6, 10] {
            let p = pair_for(&t, n);
            let tr = trace_preimage(&p, 256).unwrap();
            assert_eq!(tr.component_count, 2, "c {cval} n {n}");
            assert!(matches_as_set(&endpoints_from_pair(&p).unwrap(), &t.points(), 1e-6));
        }
    }
}
