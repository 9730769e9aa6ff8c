#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoarc::elliptic::{complete_integrals, Modulus};
use twoarc::geometry::{canonical_order, EndpointTuple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Four points in the unit disk, pairwise at least `min_sep` apart, centred
/// on their centroid, in canonical order.
pub fn random_tuple(rng: &mut ChaCha8Rng, min_sep: f64) -> EndpointTuple {
    loop {
        let pts: Vec<Complex64> = (0..4)
            .map(|_| Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        let ok = (0..4).all(|i| (i + 1..4).all(|j| (pts[i] - pts[j]).norm() >= min_sep));
        if !ok {
            continue;
        }
        let centroid = pts.iter().sum::<Complex64>() / 4.0;
        let arr = [
            pts[0] - centroid,
            pts[1] - centroid,
            pts[2] - centroid,
            pts[3] - centroid,
        ];
        if let Ok(t) = EndpointTuple::new(arr).and_then(|t| canonical_order(&t)) {
            return t;
        }
    }
}

pub fn random_modulus(rng: &mut ChaCha8Rng) -> Modulus {
    loop {
        let r = rng.gen_range(0.02..=1.0);
        let theta = rng.gen_range(-1.5..1.5);
        if let Ok(m) = complete_integrals(Complex64::from_polar(r, theta)) {
            return m;
        }
    }
}

/// Tuple with `sn^2(rho) = (a4 - a2)/(a4 - a1)` and modulus `m`, built from
/// the defining relations with `a1`, `a4` fixed.
pub fn tuple_from_rho(m: &Modulus, a1: Complex64, a4: Complex64, rho: Complex64) -> Option<EndpointTuple> {
    let s2 = m.sn2(rho).ok()?;
    let k2 = m.k2();
    let a2 = a4 - (a4 - a1) * s2;
    let a3 = (k2 * (a4 - a2) * a1 - (a4 - a1) * a2) / (k2 * (a4 - a2) - (a4 - a1));
    EndpointTuple::new([a1, a2, a3, a4]).ok()
}
