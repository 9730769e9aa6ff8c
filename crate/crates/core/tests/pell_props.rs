mod common;

use common::{c, random_tuple, rng};
use num_complex::Complex64;
use rand::Rng;
use twoarc::density::approximate_tuple;
use twoarc::geometry::{is_tn_tuple, EndpointTuple, DEFAULT_TN_TOL};
use twoarc::pell::{construct_pair, eval_poly, pell_residual, PolynomialPair};
use twoarc::poly::{compose_affine, derivative, roots};

fn certified_samples(seed: u64, count: usize) -> Vec<(EndpointTuple, u32)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let t = random_tuple(&mut r, 0.25);
        let n = r.gen_range(2..=16u32);
        let Ok(ap) = approximate_tuple(&t, n) else { continue };
        let Ok(snapped) = ap.snapped_tuple() else { continue };
        let min_sep = snapped
            .points()
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                snapped.points()[i + 1..]
                    .iter()
                    .map(move |b| (a - b).norm())
                    .collect::<Vec<_>>()
            })
            .fold(f64::INFINITY, f64::min);
        if min_sep < 0.05 || snapped.points().iter().any(|p| p.norm() > 4.0) {
            continue;
        }
        out.push((snapped, n));
    }
    out
}

fn check_pair(t: &EndpointTuple, n: u32) -> PolynomialPair {
    let cert = is_tn_tuple(t, n, DEFAULT_TN_TOL).unwrap();
    assert!(cert.accepted, "{cert:?}");
    let pair = construct_pair(t, &cert).unwrap_or_else(|e| panic!("n {n} {t:?}: {e}"));
    assert!(pair.pell_residual <= 1e-8, "n {n}: {}", pair.pell_residual);
    assert_eq!(pair.t_coeffs.len(), n as usize + 1);
    assert_eq!(pair.u_coeffs.len(), n as usize - 1);
    let lead_u = *pair.u_coeffs.last().unwrap();
    assert!((lead_u - pair.tau).norm() <= 1e-10 * pair.tau.norm());
    for a in t.points() {
        let v = eval_poly(&pair.t_coeffs, a).unwrap();
        let cond: f64 = pair
            .t_coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * a.norm().powi(j as i32))
            .sum();
        assert!(
            (v.norm() - 1.0).abs() <= 1e-7,
            "|T(a)| = {} n {n} cond {cond:e} tau {}",
            v.norm(),
            pair.tau
        );
        assert!(
            v.im.abs() <= 1e-6 && (v.re.abs() - 1.0).abs() <= 1e-6,
            "n {n} T(a) = {v}"
        );
    }
    assert!((eval_poly(&pair.t_coeffs, t.a4).unwrap() - 1.0).norm() <= 1e-7);
    pair
}

#[test]
fn random_certified_tuples_close_the_identity() {
    for (t, n) in certified_samples(21, 60) {
        check_pair(&t, n);
    }
}

#[test]
fn roots_of_t2_minus_one_split_into_endpoints_and_double_roots() {
    for (t, n) in certified_samples(22, 25) {
        let pair = check_pair(&t, n);
        let mut zs = Vec::new();
        for level in [1.0, -1.0] {
            let mut shifted = pair.t_coeffs.clone();
            shifted[0] -= level;
            zs.extend(roots(&shifted).unwrap());
        }
        let diam = t.points().iter().map(|p| p.norm()).fold(0.0, f64::max);
        let tol = 1e-6 * (1.0 + diam);
        let mut used = vec![false; zs.len()];
        let mut take = |w: Complex64| {
            let (i, d) = zs
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, z)| (i, (z - w).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[i] = true;
            (d, zs[i])
        };
        for a in t.points() {
            let (d, _) = take(a);
            assert!(d <= tol, "n {n}: endpoint {a} missing ({d})");
        }
        let u_roots = if pair.u_coeffs.len() > 1 {
            roots(&pair.u_coeffs).unwrap()
        } else {
            vec![]
        };
        let critical = roots(&derivative(&pair.t_coeffs)).unwrap();
        for w in u_roots {
            let (_, z1) = take(w);
            let (_, z2) = take(w);
            let tw = eval_poly(&pair.t_coeffs, w).unwrap();
            assert!((tw.norm() - 1.0).abs() <= 1e-7, "n {n}: T(w) = {tw}");
            let crit = critical.iter().map(|c| (c - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(
                crit <= 1e-5 * (1.0 + diam),
                "n {n}: no critical point of T at {w} ({crit})"
            );
            assert!((z1 - w).norm() + (z2 - w).norm() <= 2e-3 * (1.0 + diam));
        }
        assert!(used.iter().all(|&u| u));
    }
}

#[test]
fn affine_change_of_variable_commutes_with_construction() {
    let sigma = Complex64::from_polar(1.3, 0.6);
    let beta = c(0.15, -0.1);
    for (t, n) in certified_samples(23, 20) {
        let pair = check_pair(&t, n);
        let moved = EndpointTuple::new(t.points().map(|a| sigma * a + beta)).unwrap();
        let moved_pair = check_pair(&moved, n);
        // T~(z) = T((z - beta) / sigma)
        let want = compose_affine(&pair.t_coeffs, 1.0 / sigma, -beta / sigma);
        let scale = want.iter().map(|w| w.norm()).fold(1.0, f64::max);
        for (a, b) in moved_pair.t_coeffs.iter().zip(&want) {
            assert!((a - b).norm() <= 1e-7 * scale, "n {n}: {a} vs {b}");
        }
    }
}

#[test]
fn closed_forms() {
    let cross = EndpointTuple::new([c(1.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(-1.0, 0.0)]).unwrap();
    let t2 = PolynomialPair::from_coeffs(vec![c(-0.6, 0.0), c(0.0, 0.0), c(1.6, 0.0)], vec![c(1.6, 0.0)]).unwrap();
    assert!(pell_residual(&t2, &cross).unwrap() <= 1e-14);
    assert!((eval_poly(&t2.t_coeffs, c(1.0, 0.0)).unwrap() - 1.0).norm() <= 1e-15);

    let sym = EndpointTuple::new([c(-1.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)]).unwrap();
    let t4 = PolynomialPair::from_coeffs(
        [41.0, 0.0, -160.0, 0.0, 128.0].map(|x| c(x / 9.0, 0.0)).to_vec(),
        [-80.0, 0.0, 128.0].map(|x| c(x / 9.0, 0.0)).to_vec(),
    )
    .unwrap();
    assert!(pell_residual(&t4, &sym).unwrap() <= 1e-14);
    assert!((eval_poly(&t4.t_coeffs, c(0.5, 0.0)).unwrap() - 1.0).norm() <= 1e-14);

    let mismatched = PolynomialPair {
        u_coeffs: vec![c(1.0, 0.0)],
        ..t4.clone()
    };
    assert!(pell_residual(&mismatched, &sym).is_err());
}

#[test]
fn symmetric_intervals_up_to_the_degree_cap() {
    for cval in [0.3, 0.5, 0.8] {
        let t = EndpointTuple::new([c(-1.0, 0.0), c(-cval, 0.0), c(cval, 0.0), c(1.0, 0.0)]).unwrap();
        for n in (2..=16).step_by(2) {
            let pair = check_pair(&t, n);
            assert!(pair.t_coeffs.iter().all(|z| z.im.abs() <= 1e-9 * pair.tau.norm()));
        }
        for n in (18..=32).step_by(2) {
            let cert = is_tn_tuple(&t, n, DEFAULT_TN_TOL).unwrap();
            match construct_pair(&t, &cert) {
                Ok(pair) => assert!(pair.pell_residual <= 1e-8),
                Err(e) => assert!(matches!(e, twoarc::error::Error::NoConvergence { .. }), "{e}"),
            }
        }
    }
}

#[test]
fn random_tuples_at_high_degree() {
    let mut r = rng(24);
    let mut done = 0;
    while done < 10 {
        let t = random_tuple(&mut r, 0.3);
        let n = r.gen_range(17..=32u32);
        let Ok(snapped) = approximate_tuple(&t, n).and_then(|a| a.snapped_tuple()) else {
            continue;
        };
        let cert = is_tn_tuple(&snapped, n, DEFAULT_TN_TOL).unwrap();
        match construct_pair(&snapped, &cert) {
            Ok(pair) => assert!(pair.pell_residual <= 1e-8),
            Err(e) => assert!(matches!(e, twoarc::error::Error::NoConvergence { .. }), "{e}"),
        }
        done += 1;
    }
}
