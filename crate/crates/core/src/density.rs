//! Snapping an arbitrary quadruple to a nearby T_n-tuple, and the explicit
//! constants of the O(1/n) bound.
//!
//! With `a1`, `a4` and the modulus fixed, the lattice point `rho` of the
//! tuple is rounded to `rho~ = (m/n) K + i (m'/n) K'`, and
//!
//! ```text
//! a2~ = a4 - (a4 - a1) sn^2(rho~)
//! a3~ = A1 (a2~ + A2) / (a2~ + A3)
//! ```
//!
//! For `n >= N` the error obeys `|a2 - a2~| <= C1/n`, `|a3 - a3~| <= C2/n`
//! with
//!
//! ```text
//! C1 = (16/pi) (|K| + |K'|) |a4 - a1| s* c* d*
//! C2 = C1 |A1| |A2 - A3| / (|a2 + A3| |a4 - a1| s**)
//! ```
//!
//! where the extrema are taken over the box
//! `{mu K + i mu' K' : |mu - lambda| <= 1/n2, |mu' - lambda'| <= 1/n2}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::geometry::{
    analyze, check_degree, is_tn_tuple, EndpointTuple, TupleAnalysis, TupleCertificate, DEFAULT_TN_TOL,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default grid resolution (points per side) for the extrema search.
pub const DEFAULT_GRID: usize = 128;

/// Multiplicative safety factor applied to the sampled extrema.
pub const SAFETY_FACTOR: f64 = 1.05;

/// `n * lambda` within this distance of a half-integer counts as a tie.
const TIE_EPS: f64 = 1e-9;

/// Residuals below this are treated as an exact lattice hit.
const EXACT_HIT: f64 = 1e-12;

/// Pole avoidance margin, in units of `min(|K|, |K'|)`.
const POLE_MARGIN: f64 = 1e-6;

/// The Moebius coefficients relating `a3` to `a2` at fixed `a1`, `a4`, `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusParams {
    #[serde(rename = "A1")]
    pub a1: Complex64,
    #[serde(rename = "A2")]
    pub a2: Complex64,
    #[serde(rename = "A3")]
    pub a3: Complex64,
}

impl MoebiusParams {
    pub fn new(t: &EndpointTuple, m: &Modulus) -> Self {
        let k2 = m.k2();
        let kp2 = m.k_prime * m.k_prime;
        MoebiusParams {
            a1: (t.a4 - kp2 * t.a1) / k2,
            a2: k2 * t.a1 * t.a4 / (kp2 * t.a1 - t.a4),
            a3: (kp2 * t.a4 - t.a1) / k2,
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a1 * (z + self.a2) / (z + self.a3)
    }
}

/// `a3` from `a2` so that the cross-ratio of `(a1, a2, a3, a4)` is `k^2`.
/// Same map as [`MoebiusParams::apply`], written without the `A2` pole that
/// appears when `k'^2 a1 = a4`.
fn partner_point(a1: Complex64, a4: Complex64, k2: Complex64, a2: Complex64) -> Complex64 {
    (k2 * (a4 - a2) * a1 - (a4 - a1) * a2) / (k2 * (a4 - a2) - (a4 - a1))
}

fn round_with_ties_away(x: f64) -> f64 {
    let floor = x.floor();
    if (x - floor - 0.5).abs() <= TIE_EPS {
        if x >= 0.0 {
            floor + 1.0
        } else {
            floor
        }
    } else {
        x.round()
    }
}

/// Lattice distance from the point `(lambda, lambda')` to the nearest point
/// of `origin + period * Z^2`, measured in the complex plane.
fn distance_to_lattice(m: &Modulus, lambda: f64, lambda_prime: f64, origin: (f64, f64), period: (f64, f64)) -> f64 {
    let a = ((lambda - origin.0) / period.0).round();
    let b = ((lambda_prime - origin.1) / period.1).round();
    let mut best = f64::INFINITY;
    for da in -1..=1 {
        for db in -1..=1 {
            let pl = origin.0 + (a + da as f64) * period.0;
            let pp = origin.1 + (b + db as f64) * period.1;
            best = best.min(m.point(lambda - pl, lambda_prime - pp).norm());
        }
    }
    best
}

/// Whether `(m, m')` would put `rho~` on a corner, or put `rho +- rho~` or
/// `(rho +- rho~)/2` near a pole of `sn`, `cn`, `dn`.
fn excluded(m: &Modulus, lambda: f64, lambda_prime: f64, mm: i64, mp: i64, n: u32) -> bool {
    let guard = POLE_MARGIN * m.min_period_scale();
    let tl = mm as f64 / n as f64;
    let tlp = mp as f64 / n as f64;
    if distance_to_lattice(m, tl, tlp, (0.0, 0.0), (1.0, 1.0)) < guard {
        return true;
    }
    [1.0, -1.0].iter().any(|&s| {
        let dl = lambda + s * tl;
        let dlp = lambda_prime + s * tlp;
        // poles of the sum: iK' + 2ZK + 2iZK'; poles of the half sum: twice that.
        distance_to_lattice(m, dl, dlp, (0.0, 1.0), (2.0, 2.0)) < 2.0 * guard
            || distance_to_lattice(m, dl, dlp, (0.0, 2.0), (4.0, 4.0)) < 2.0 * guard
    })
}

/// Integers `m`, `m'` with `|m/n - lambda| <= 1/n`, `|m'/n - lambda'| <= 1/n`
/// avoiding the pole configurations. Nearest rounding (ties away from zero)
/// first; on conflict, the admissible neighbour closest to `rho` in the plane.
pub fn nearest_lattice(lambda: f64, lambda_prime: f64, n: u32, modulus: &Modulus) -> (i64, i64) {
    let nf = n as f64;
    let m0 = round_with_ties_away(nf * lambda) as i64;
    let mp0 = round_with_ties_away(nf * lambda_prime) as i64;
    if !excluded(modulus, lambda, lambda_prime, m0, mp0, n) {
        return (m0, mp0);
    }
    let rho = modulus.point(lambda, lambda_prime);
    let within = |v: i64, x: f64| (v as f64 / nf - x).abs() <= 1.0 / nf + 1e-12;
    let mut best: Option<(f64, (i64, i64))> = None;
    for dm in -1..=1 {
        for dmp in -1..=1 {
            if dm == 0 && dmp == 0 {
                continue;
            }
            let (mm, mp) = (m0 + dm, mp0 + dmp);
            if !within(mm, lambda) || !within(mp, lambda_prime) {
                continue;
            }
            if excluded(modulus, lambda, lambda_prime, mm, mp, n) {
                continue;
            }
            let d = (modulus.point(mm as f64 / nf, mp as f64 / nf) - rho).norm();
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, (mm, mp)));
            }
        }
    }
    best.map_or((m0, mp0), |(_, v)| v)
}

/// Result of snapping a tuple to the T_n lattice.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Approximation {
    /// The canonical input tuple the approximation refers to.
    pub tuple: EndpointTuple,
    pub a_tilde2: Complex64,
    pub a_tilde3: Complex64,
    pub m: i64,
    pub m_prime: i64,
    pub rho_tilde: Complex64,
    /// `is_tn_tuple` on `(a1, a2~, a3~, a4)`.
    pub certificate: TupleCertificate,
}

impl Approximation {
    pub fn snapped_tuple(&self) -> Result<EndpointTuple> {
        EndpointTuple::new([self.tuple.a1, self.a_tilde2, self.a_tilde3, self.tuple.a4])
    }
}

pub fn approximate_tuple(t: &EndpointTuple, n: u32) -> Result<Approximation> {
    check_degree(n)?;
    let analysis = analyze(t)?;
    approximate_analyzed(&analysis, n)
}

fn approximate_analyzed(analysis: &TupleAnalysis, n: u32) -> Result<Approximation> {
    let TupleAnalysis { tuple, modulus, rho } = analysis;
    let nf = n as f64;
    let (m, m_prime) = nearest_lattice(rho.lambda, rho.lambda_prime, n, modulus);
    let rho_tilde = modulus.point(m as f64 / nf, m_prime as f64 / nf);
    let exact =
        (rho.lambda - m as f64 / nf).abs() <= EXACT_HIT && (rho.lambda_prime - m_prime as f64 / nf).abs() <= EXACT_HIT;
    let (a_tilde2, a_tilde3) = if exact {
        (tuple.a2, tuple.a3)
    } else {
        let s2 = modulus.sn2(rho_tilde)?;
        let k2 = modulus.k2();
        let a2 = tuple.a4 - (tuple.a4 - tuple.a1) * s2;
        let pole = k2 * (tuple.a4 - a2) - (tuple.a4 - tuple.a1);
        assert!(
            pole.norm() > 0.0,
            "a2~ hit the Moebius pole; the lattice exclusion should prevent this"
        );
        (a2, partner_point(tuple.a1, tuple.a4, k2, a2))
    };
    let snapped = EndpointTuple::new([tuple.a1, a_tilde2, a_tilde3, tuple.a4])?;
    let certificate = is_tn_tuple(&snapped, n, DEFAULT_TN_TOL)?;
    Ok(Approximation {
        tuple: *tuple,
        a_tilde2,
        a_tilde3,
        m,
        m_prime,
        rho_tilde,
        certificate,
    })
}

/// Approximation together with the bound report; the certificate records
/// whether `n >= N`.
pub fn approximate_with_bounds(t: &EndpointTuple, n: u32, grid: usize) -> Result<(Approximation, ErrorBoundReport)> {
    check_degree(n)?;
    let analysis = analyze(t)?;
    let report = bounds_analyzed(&analysis, grid)?;
    let mut approx = approximate_analyzed(&analysis, n)?;
    approx.certificate.bound_certified = Some(n as u64 >= report.big_n);
    Ok((approx, report))
}

/// Constants of the O(1/n) bound for one tuple.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBoundReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub n1: f64,
    pub n2: u64,
    pub n3: f64,
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(rename = "sStar")]
    pub s_star: f64,
    #[serde(rename = "cStar")]
    pub c_star: f64,
    #[serde(rename = "dStar")]
    pub d_star: f64,
    #[serde(rename = "sStarStar")]
    pub s_star_star: f64,
    /// `B` evaluated at `n = N`.
    #[serde(rename = "B_observed")]
    pub b_observed: f64,
    pub moebius: MoebiusParams,
    pub grid: usize,
}

/// The six special points that the extrema box must avoid, in lattice
/// coordinates: `0, K, +-iK', K +- iK'`.
const SPECIAL_POINTS: [(f64, f64); 6] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0)];

/// Smallest `n2 >= 2` whose box of half-width `1/n2` around
/// `(lambda, lambda')` excludes the special points.
pub fn threshold_n2(lambda: f64, lambda_prime: f64) -> Result<u64> {
    let cheb = SPECIAL_POINTS
        .iter()
        .map(|&(a, b)| (lambda - a).abs().max((lambda_prime - b).abs()))
        .fold(f64::INFINITY, f64::min);
    if cheb == 0.0 || !cheb.is_finite() {
        return Err(Error::Degenerate(format!(
            "(lambda, lambda') = ({lambda}, {lambda_prime}) sits on an excluded corner"
        )));
    }
    let excludes = |n2: u64| {
        let h = 1.0 / n2 as f64;
        SPECIAL_POINTS
            .iter()
            .all(|&(a, b)| (lambda - a).abs() > h || (lambda_prime - b).abs() > h)
    };
    // Jump close to the answer, then step.
    let mut n2 = ((1.0 / cheb).floor() as u64).saturating_sub(1).max(2);
    while !excludes(n2) {
        n2 += 1;
    }
    Ok(n2)
}

#[derive(Debug, Clone, Copy)]
struct Extrema {
    sn_max: f64,
    cn_max: f64,
    dn_max: f64,
    pole_gap_min: f64,
}

impl Extrema {
    fn merge(self, o: Extrema) -> Extrema {
        Extrema {
            sn_max: self.sn_max.max(o.sn_max),
            cn_max: self.cn_max.max(o.cn_max),
            dn_max: self.dn_max.max(o.dn_max),
            pole_gap_min: self.pole_gap_min.min(o.pole_gap_min),
        }
    }
}

/// Per quantity: best value and where it was attained.
type RowBest = [(f64, (f64, f64)); 4];

struct BoxSampler<'a> {
    modulus: &'a Modulus,
    inv_k2: Complex64,
    centre: (f64, f64),
    half: f64,
}

impl BoxSampler<'_> {
    fn clamp(&self, p: (f64, f64)) -> (f64, f64) {
        (
            p.0.clamp(self.centre.0 - self.half, self.centre.0 + self.half),
            p.1.clamp(self.centre.1 - self.half, self.centre.1 + self.half),
        )
    }

    /// `[|sn|, |cn|, |dn|, -|sn^2 - 1/k^2|]`; every entry is to be maximised.
    fn values(&self, p: (f64, f64)) -> Result<[f64; 4]> {
        let j = self.modulus.jacobi(self.modulus.point(p.0, p.1))?;
        Ok([
            j.sn.norm(),
            j.cn.norm(),
            j.dn.norm(),
            -(j.sn * j.sn - self.inv_k2).norm(),
        ])
    }

    fn grid(&self, points: usize) -> Result<(Extrema, RowBest)> {
        let points = points.max(2);
        let coord = |i: usize, c: f64| c - self.half + 2.0 * self.half * i as f64 / (points - 1) as f64;
        let rows: Vec<Result<RowBest>> = (0..points)
            .into_par_iter()
            .map(|i| {
                let mut best = [(f64::NEG_INFINITY, (0.0, 0.0)); 4];
                for j in 0..points {
                    let p = (coord(i, self.centre.0), coord(j, self.centre.1));
                    let v = self.values(p)?;
                    for q in 0..4 {
                        if v[q] > best[q].0 {
                            best[q] = (v[q], p);
                        }
                    }
                }
                Ok(best)
            })
            .collect();
        let mut best = [(f64::NEG_INFINITY, (0.0, 0.0)); 4];
        for row in rows {
            let row = row?;
            for q in 0..4 {
                if row[q].0 > best[q].0 {
                    best[q] = row[q];
                }
            }
        }
        Ok((to_extrema(&best.map(|b| b.0)), best))
    }

    /// Compass search from a grid maximiser, confined to the box.
    fn refine(&self, q: usize, start: (f64, f64), value: f64, step: f64) -> Result<f64> {
        let mut p = start;
        let mut best = value;
        let mut h = step;
        while h > 1e-10 * self.half {
            let mut improved = false;
            for d in [
                (h, 0.0),
                (-h, 0.0),
                (0.0, h),
                (0.0, -h),
                (h, h),
                (-h, -h),
                (h, -h),
                (-h, h),
            ] {
                let cand = self.clamp((p.0 + d.0, p.1 + d.1));
                let v = self.values(cand)?[q];
                if v > best {
                    best = v;
                    p = cand;
                    improved = true;
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        Ok(best)
    }
}

fn to_extrema(v: &[f64; 4]) -> Extrema {
    Extrema {
        sn_max: v[0],
        cn_max: v[1],
        dn_max: v[2],
        pole_gap_min: -v[3],
    }
}

/// Grid-plus-refinement extrema of `|sn|`, `|cn|`, `|dn|` and minimum of
/// `|sn^2 - 1/k^2|` over the box of half-width `1/n2` around `(lambda, lambda')`.
/// No safety factor applied.
pub fn box_extrema(
    modulus: &Modulus,
    lambda: f64,
    lambda_prime: f64,
    n2: u64,
    grid: usize,
) -> Result<(f64, f64, f64, f64)> {
    let sampler = BoxSampler {
        modulus,
        inv_k2: ONE / modulus.k2(),
        centre: (lambda, lambda_prime),
        half: 1.0 / n2 as f64,
    };
    let (coarse, argbest) = sampler.grid(grid)?;
    let step = 2.0 * sampler.half / (grid.max(2) - 1) as f64;
    let mut refined = [0.0; 4];
    for q in 0..4 {
        refined[q] = sampler.refine(q, argbest[q].1, argbest[q].0, step)?;
    }
    let e = coarse.merge(to_extrema(&refined));
    Ok((e.sn_max, e.cn_max, e.dn_max, e.pole_gap_min))
}

pub fn error_bounds(t: &EndpointTuple, grid: usize) -> Result<ErrorBoundReport> {
    let analysis = analyze(t)?;
    bounds_analyzed(&analysis, grid)
}

fn bounds_analyzed(analysis: &TupleAnalysis, grid: usize) -> Result<ErrorBoundReport> {
    let TupleAnalysis { tuple, modulus, rho } = analysis;
    let period_sum = modulus.big_k.norm() + modulus.big_k_prime.norm();
    let n1 = 2.0 / PI * period_sum;
    let n2 = threshold_n2(rho.lambda, rho.lambda_prime)?;
    let (s, c, d, gap) = box_extrema(modulus, rho.lambda, rho.lambda_prime, n2, grid)?;
    let s_star = s * SAFETY_FACTOR;
    let c_star = c * SAFETY_FACTOR;
    let d_star = d * SAFETY_FACTOR;
    let s_star_star = gap / SAFETY_FACTOR;
    if s_star_star.is_nan() || s_star_star <= 0.0 {
        return Err(Error::Degenerate("s** vanished: box touches K + iK'".into()));
    }
    let span = (tuple.a4 - tuple.a1).norm();
    let moebius = MoebiusParams::new(tuple, modulus);
    // |A1| |A2 - A3| = |A1 A2 - A1 A3| with A1 A2 = -a1 a4.
    let a_factor = (-tuple.a1 * tuple.a4 - moebius.a1 * moebius.a3).norm();
    let a2_gap = (tuple.a2 + moebius.a3).norm();
    let c1 = 16.0 / PI * period_sum * span * s_star * c_star * d_star;
    let c2 = c1 * a_factor / (a2_gap * span * s_star_star);
    let n3 = 2.0 * 2f64.sqrt() * s_star / PI * period_sum;
    let big_n = n1.max(n2 as f64).max(n3).ceil() as u64;
    if !(c1.is_finite() && c2.is_finite() && c1 > 0.0 && c2 > 0.0) {
        return Err(Error::Degenerate(format!(
            "non-finite bound constants C1 = {c1}, C2 = {c2}"
        )));
    }
    let b_observed = chain_analyzed(analysis, big_n.clamp(2, u32::MAX as u64) as u32)?.b_observed;
    Ok(ErrorBoundReport {
        c1,
        c2,
        n1,
        n2,
        n3,
        big_n,
        s_star,
        c_star,
        d_star,
        s_star_star,
        b_observed,
        moebius,
        grid,
    })
}

/// Observed quantities along the proof chain at one `n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundChain {
    pub n: u32,
    /// `|k^2| |sn^2((rho + rho~)/2)| |sn^2((rho - rho~)/2)|`.
    pub product: f64,
    /// `|sn(rho) + sn(rho~)| |2 cn dn((rho + rho~)/2)| / |1 - k^2 sn^2 sn^2|`.
    pub b_observed: f64,
    /// `|rho - rho~|`, bounded by `(|K| + |K'|)/n`.
    pub rho_gap: f64,
}

pub fn bound_chain(t: &EndpointTuple, n: u32) -> Result<BoundChain> {
    check_degree(n)?;
    chain_analyzed(&analyze(t)?, n)
}

fn chain_analyzed(analysis: &TupleAnalysis, n: u32) -> Result<BoundChain> {
    let TupleAnalysis { modulus, rho, .. } = analysis;
    let nf = n as f64;
    let (m, mp) = nearest_lattice(rho.lambda, rho.lambda_prime, n, modulus);
    let rho_tilde = modulus.point(m as f64 / nf, mp as f64 / nf);
    let r = modulus.jacobi(rho.rho)?;
    let rt = modulus.jacobi(rho_tilde)?;
    let hs = modulus.jacobi((rho.rho + rho_tilde) * 0.5)?;
    let hd = modulus.jacobi((rho.rho - rho_tilde) * 0.5)?;
    let k2 = modulus.k2();
    let product = k2.norm() * (hs.sn * hs.sn).norm() * (hd.sn * hd.sn).norm();
    let denom = (ONE - k2 * hs.sn * hs.sn * hd.sn * hd.sn).norm();
    let b_observed = (r.sn + rt.sn).norm() * (hs.cn * hs.dn * 2.0).norm() / denom;
    Ok(BoundChain {
        n,
        product,
        b_observed,
        rho_gap: (rho.rho - rho_tilde).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::complete_integrals;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn symmetric() -> EndpointTuple {
        EndpointTuple::new([c(-1.0, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn rounding_examples() {
        let m = complete_integrals(c(0.7, 0.2)).unwrap();
        assert_eq!(nearest_lattice(0.5, 0.0, 4, &m), (2, 0));
        assert_eq!(nearest_lattice(0.30, 0.52, 10, &m), (3, 5));
        assert_eq!(nearest_lattice(0.25, 0.1, 2, &m), (1, 0));
        assert_eq!(round_with_ties_away(-2.5), -3.0);
        assert_eq!(round_with_ties_away(2.5 - 1e-12), 3.0);
    }

    #[test]
    fn corner_hits_are_moved() {
        // lambda near 0 with n lambda' integral would put rho~ on the corner 0.
        let m = complete_integrals(c(0.6, 0.1)).unwrap();
        let (mm, mp) = nearest_lattice(0.01, 0.02, 8, &m);
        assert!(!(mm == 0 && mp == 0));
        assert!((mm as f64 / 8.0 - 0.01).abs() <= 1.0 / 8.0);
        assert!((mp as f64 / 8.0 - 0.02).abs() <= 1.0 / 8.0);
    }

    #[test]
    fn moebius_forms_agree() {
        let t = EndpointTuple::new([c(-0.8, 0.3), c(0.1, 0.6), c(0.4, -0.5), c(0.9, 0.1)]).unwrap();
        let a = analyze(&t).unwrap();
        let mp = MoebiusParams::new(&a.tuple, &a.modulus);
        let z = c(0.05, 0.2);
        let lhs = mp.apply(z);
        let rhs = partner_point(a.tuple.a1, a.tuple.a4, a.modulus.k2(), z);
        assert!((lhs - rhs).norm() < 1e-12);
        // and the original tuple is a fixed point of the relation
        assert!((mp.apply(a.tuple.a2) - a.tuple.a3).norm() < 1e-12);
    }

    #[test]
    fn certified_tuple_is_returned_unchanged() {
        let t = symmetric();
        let ap = approximate_tuple(&t, 4).unwrap();
        assert_eq!(ap.a_tilde2, t.a2);
        assert_eq!(ap.a_tilde3, t.a3);
        assert!(ap.certificate.accepted);
    }

    #[test]
    fn odd_degree_snap_of_symmetric_tuple() {
        let t = symmetric();
        let ap = approximate_tuple(&t, 5).unwrap();
        assert_eq!((ap.m, ap.m_prime), (3, 0));
        let m = complete_integrals(c(2.0 * 2f64.sqrt() / 3.0, 0.0)).unwrap();
        let s2 = m.sn2(m.big_k * 0.6).unwrap();
        let want = c(1.0, 0.0) - s2 * 2.0;
        assert!((ap.a_tilde2 - want).norm() < 1e-14);
        assert!(ap.a_tilde2.im.abs() < 1e-14 && ap.a_tilde2.re > -1.0 && ap.a_tilde2.re < 1.0);
        assert!(ap.certificate.accepted);
        assert_eq!(ap.certificate.n, 5);
    }

    #[test]
    fn n2_threshold() {
        assert_eq!(threshold_n2(0.5, 0.0).unwrap(), 3);
        assert_eq!(threshold_n2(0.5, 0.5).unwrap(), 3);
        assert_eq!(threshold_n2(0.1, 0.0).unwrap(), 11);
        assert!(threshold_n2(1.0, 0.0).is_err());
    }

    #[test]
    fn bound_report_is_positive() {
        let r = error_bounds(&symmetric(), 64).unwrap();
        assert!(r.c1 > 0.0 && r.c2 > 0.0);
        assert!(r.big_n as f64 >= r.n1);
        assert!(r.big_n >= r.n2);
        assert!(r.b_observed <= 8.0 * r.s_star * r.c_star * r.d_star);
    }

    #[test]
    fn grid_resolution_consistency() {
        let t = EndpointTuple::new([c(-0.8, 0.3), c(0.1, 0.6), c(0.4, -0.5), c(0.9, 0.1)]).unwrap();
        let a = analyze(&t).unwrap();
        let n2 = threshold_n2(a.rho.lambda, a.rho.lambda_prime).unwrap();
        let coarse = box_extrema(&a.modulus, a.rho.lambda, a.rho.lambda_prime, n2, 64).unwrap();
        let fine = box_extrema(&a.modulus, a.rho.lambda, a.rho.lambda_prime, n2, 128).unwrap();
        for (x, y) in [
            (coarse.0, fine.0),
            (coarse.1, fine.1),
            (coarse.2, fine.2),
            (coarse.3, fine.3),
        ] {
            assert!((x - y).abs() < 0.01 * y, "{x} vs {y}");
        }
    }
}
