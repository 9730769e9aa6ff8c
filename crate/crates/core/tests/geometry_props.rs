mod common;

use std::f64::consts::TAU;

use common::{c, random_modulus, random_tuple, rng, tuple_from_rho};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use twoarc::density::approximate_tuple;
use twoarc::geometry::{canonical_order, is_tn_tuple, EndpointTuple, DEFAULT_TN_TOL};

#[test]
fn synthesized_lattice_tuples_are_accepted() {
    let mut r = rng(41);
    let mut done = 0;
    while done < 150 {
        let m = random_modulus(&mut r);
        let n = r.gen_range(2..=512u32);
        let mi = r.gen_range(0..n as i64);
        let mpi = r.gen_range(-(n as i64) + 1..=n as i64);
        if mi == 0 && mpi % n as i64 == 0 {
            continue;
        }
        let rho = m.point(mi as f64 / n as f64, mpi as f64 / n as f64);
        let a1 = Complex64::from_polar(r.gen_range(0.5..1.5), r.gen_range(0.0..TAU));
        let Some(t) = tuple_from_rho(&m, a1, -a1, rho) else {
            continue;
        };
        let cert = is_tn_tuple(&t, n, DEFAULT_TN_TOL).unwrap();
        assert!(cert.accepted, "k {} n {n} m {mi} m' {mpi}: {cert:?}", m.k);
        done += 1;
    }
}

#[test]
fn off_lattice_points_are_rejected() {
    let mut r = rng(42);
    let mut done = 0;
    while done < 150 {
        let m = random_modulus(&mut r);
        let n = r.gen_range(2..=512u32);
        let nf = n as f64;
        let l = (r.gen_range(0..n) as f64 + r.gen_range(0.1..0.9)) / nf;
        let lp = (r.gen_range(-(n as i64) + 1..n as i64) as f64 + r.gen_range(0.1..0.9)) / nf;
        let Some(t) = tuple_from_rho(&m, c(-1.0, 0.0), c(1.0, 0.0), m.point(l, lp)) else {
            continue;
        };
        let cert = is_tn_tuple(&t, n, DEFAULT_TN_TOL).unwrap();
        assert!(!cert.accepted, "n {n}: {cert:?}");
        done += 1;
    }
}

#[test]
fn relabeling_does_not_change_the_verdict() {
    let mut r = rng(43);
    for _ in 0..60 {
        let t = random_tuple(&mut r, 0.2);
        let mut pts = t.points();
        pts.shuffle(&mut r);
        let shuffled = EndpointTuple::new(pts).unwrap();
        for n in [3u32, 8, 40] {
            let a = is_tn_tuple(&t, n, 1e-6).unwrap();
            let b = is_tn_tuple(&shuffled, n, 1e-6).unwrap();
            assert_eq!(a.accepted, b.accepted);
        }
        let snapped = approximate_tuple(&t, 8).unwrap().snapped_tuple().unwrap();
        let mut pts = snapped.points();
        pts.shuffle(&mut r);
        assert!(
            is_tn_tuple(&EndpointTuple::new(pts).unwrap(), 8, DEFAULT_TN_TOL)
                .unwrap()
                .accepted
        );
        let ct = canonical_order(&shuffled).unwrap();
        assert!(ct.canonical);
        assert!(ct.k_squared().norm() <= 1.0 + 1e-12);
    }
}
