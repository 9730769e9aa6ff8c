//! Endpoint quadruples, their modulus and lattice point, and the rationality
//! test that decides whether a quadruple is a T_n-tuple.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{complete_integrals, ExtComplex, LatticeCoord, Modulus};
use crate::error::{Error, Result};

/// Default minimum separation between endpoints.
pub const SEPARATION_FLOOR: f64 = 1e-12;

/// Default absolute tolerance on the `(lambda, lambda')` residuals.
pub const DEFAULT_TN_TOL: f64 = 1e-9;

/// Four arc endpoints. `permutation[i]` is the index, in the caller's
/// original labeling, of the point now stored in slot `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointTuple {
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
    pub a4: Complex64,
    pub canonical: bool,
    pub permutation: [usize; 4],
}

impl EndpointTuple {
    pub fn new(points: [Complex64; 4]) -> Result<Self> {
        Self::with_floor(points, SEPARATION_FLOOR)
    }

    pub fn with_floor(points: [Complex64; 4], floor: f64) -> Result<Self> {
        for (i, z) in points.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Input(format!("endpoint {} is not finite", i + 1)));
            }
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let separation = (points[i] - points[j]).norm();
                if separation <= floor {
                    return Err(Error::NotDistinct {
                        i: i + 1,
                        j: j + 1,
                        separation,
                    });
                }
            }
        }
        let [a1, a2, a3, a4] = points;
        Ok(EndpointTuple {
            a1,
            a2,
            a3,
            a4,
            canonical: false,
            permutation: [0, 1, 2, 3],
        })
    }

    pub fn points(&self) -> [Complex64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }

    /// Coefficients of `H_4(z) = (z - a1)(z - a2)(z - a3)(z - a4)`, ascending.
    pub fn h4(&self) -> Vec<Complex64> {
        crate::poly::from_roots(&self.points())
    }

    /// `k^2` from the cross-ratio of the current labeling.
    pub fn k_squared(&self) -> Complex64 {
        let [a1, a2, a3, a4] = self.points();
        (a4 - a1) * (a3 - a2) / ((a4 - a2) * (a3 - a1))
    }

    fn satisfies_ordering(&self) -> bool {
        let [a1, a2, a3, a4] = self.points();
        let lhs = (a4 - a1).norm() * (a3 - a2).norm();
        let rhs = (a4 - a2).norm() * (a3 - a1).norm();
        lhs <= rhs * (1.0 + 1e-13)
    }
}

fn on_negative_axis(z: Complex64) -> bool {
    z.re < 0.0 && z.im.abs() <= 1e-14 * z.norm()
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Relabel the endpoints so that `|a4-a1||a3-a2| <= |a4-a2||a3-a1|` and
/// `k^2` is off the negative real axis. Scans the 24 permutations in
/// lexicographic order, so an input that already qualifies comes back
/// unchanged.
pub fn canonical_order(t: &EndpointTuple) -> Result<EndpointTuple> {
    EndpointTuple::new(t.points())?;
    if t.canonical {
        return Ok(*t);
    }
    let pts = t.points();
    for p in permutations() {
        let mut cand = EndpointTuple {
            a1: pts[p[0]],
            a2: pts[p[1]],
            a3: pts[p[2]],
            a4: pts[p[3]],
            canonical: false,
            permutation: [
                t.permutation[p[0]],
                t.permutation[p[1]],
                t.permutation[p[2]],
                t.permutation[p[3]],
            ],
        };
        if cand.satisfies_ordering() && !on_negative_axis(cand.k_squared()) {
            cand.canonical = true;
            return Ok(cand);
        }
    }
    Err(Error::NotCanonicalizable)
}

/// Modulus of a canonical tuple, `k` taken with `Re k > 0`.
pub fn modulus_from_tuple(t: &EndpointTuple) -> Result<Modulus> {
    let [a1, a2, a3, a4] = t.points();
    let k2 = t.k_squared();
    if k2.norm() < 1e-14 || (k2 - 1.0).norm() < 1e-14 {
        return Err(Error::Degenerate(format!("k^2 = {k2} (collapsed endpoints)")));
    }
    if on_negative_axis(k2) {
        return Err(Error::NotCanonicalizable);
    }
    let kp2 = (a4 - a3) * (a2 - a1) / ((a4 - a2) * (a3 - a1));
    let defect = (k2 + kp2 - 1.0).norm();
    if defect > 1e-10 * (1.0 + kp2.norm()) {
        return Err(Error::NoConvergence {
            what: "complementary modulus cross-check",
            residual: defect,
        });
    }
    complete_integrals(k2.sqrt())
}

const CORNER_EPS: f64 = 1e-12;

/// The point of the half period parallelogram with
/// `sn^2(rho) = (a4 - a2) / (a4 - a1)`.
pub fn rho_from_tuple(t: &EndpointTuple, m: &Modulus) -> Result<LatticeCoord> {
    let w = (t.a4 - t.a2) / (t.a4 - t.a1);
    let r = m.inverse_sn2(ExtComplex::Finite(w))?;
    let at_int = |x: f64| (x - x.round()).abs() <= CORNER_EPS;
    if at_int(r.lambda) && at_int(r.lambda_prime) {
        return Err(Error::Degenerate(format!(
            "rho = ({}, {}) is a corner of the parallelogram",
            r.lambda, r.lambda_prime
        )));
    }
    Ok(r)
}

/// Canonical tuple with its modulus and lattice point.
#[derive(Debug, Clone)]
pub struct TupleAnalysis {
    pub tuple: EndpointTuple,
    pub modulus: Modulus,
    pub rho: LatticeCoord,
}

pub fn analyze(t: &EndpointTuple) -> Result<TupleAnalysis> {
    let tuple = canonical_order(t)?;
    let modulus = modulus_from_tuple(&tuple)?;
    let rho = rho_from_tuple(&tuple, &modulus)?;
    Ok(TupleAnalysis { tuple, modulus, rho })
}

/// Witness (or refutation) that `rho = (m/n) K + i (m'/n) K'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TupleCertificate {
    pub n: u32,
    pub m: i64,
    pub m_prime: i64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub lambda_residual: f64,
    pub lambda_prime_residual: f64,
    pub tolerance: f64,
    pub accepted: bool,
    /// Set by the density routines: whether `n >= N`, so the O(1/n) bound
    /// applies to this approximation.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound_certified: Option<bool>,
}

pub(crate) fn check_degree(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::UnsupportedDegree {
            n,
            min: 2,
            max: u32::MAX,
        });
    }
    Ok(())
}

pub fn certificate_for(rho: &LatticeCoord, n: u32, tol: f64) -> TupleCertificate {
    let nf = n as f64;
    let m = (nf * rho.lambda).round();
    let m_prime = (nf * rho.lambda_prime).round();
    let lambda_residual = (rho.lambda - m / nf).abs();
    let lambda_prime_residual = (rho.lambda_prime - m_prime / nf).abs();
    TupleCertificate {
        n,
        m: m as i64,
        m_prime: m_prime as i64,
        lambda: rho.lambda,
        lambda_prime: rho.lambda_prime,
        lambda_residual,
        lambda_prime_residual,
        tolerance: tol,
        accepted: lambda_residual.max(lambda_prime_residual) <= tol,
        bound_certified: None,
    }
}

/// Decide whether `t` is a T_n-tuple. The certificate is returned whether or
/// not the tuple is accepted.
pub fn is_tn_tuple(t: &EndpointTuple, n: u32, tol: f64) -> Result<TupleCertificate> {
    check_degree(n)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let analysis = analyze(t)?;
    Ok(certificate_for(&analysis.rho, n, tol))
}
