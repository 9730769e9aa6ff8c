//! Numerical construction of the polynomial pair `(T_n, U_{n-2})` with
//!
//! ```text
//! T_n(z)^2 - 1 = H_4(z) U_{n-2}(z)^2,   H_4(z) = (z - a1)(z - a2)(z - a3)(z - a4)
//! ```
//!
//! for a certified T_n-tuple.
//!
//! The initial pair comes from the Laurent expansion of `sqrt(H_4)` at
//! infinity: a solution satisfies `T - sqrt(H_4) U = O(z^-n)`, so `U` spans
//! the kernel of a Hankel matrix built from the expansion coefficients and
//! `T` is the polynomial part of `sqrt(H_4) U`. Gauss-Newton on the full
//! coefficient system then polishes the pair.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{is_tn_tuple, EndpointTuple, TupleCertificate};
pub use crate::poly::eval_poly;
use crate::poly::{compensated_horner, compose_affine, horner, mul, roots, sub};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest supported degree.
pub const MAX_DEGREE: u32 = 32;

/// Residual required of an accepted construction.
pub const PELL_TOL: f64 = 1e-8;

/// `T_n` and `U_{n-2}` in ascending coefficient order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PolynomialPair {
    pub t_coeffs: Vec<Complex64>,
    pub u_coeffs: Vec<Complex64>,
    pub tau: Complex64,
    pub pell_residual: f64,
}

impl PolynomialPair {
    /// Pair from coefficient vectors; `tau` is the leading coefficient of `T`
    /// and the residual is left unset (NaN) until checked against a tuple.
    pub fn from_coeffs(t_coeffs: Vec<Complex64>, u_coeffs: Vec<Complex64>) -> Result<Self> {
        check_shapes(&t_coeffs, &u_coeffs)?;
        let tau = *t_coeffs.last().unwrap();
        Ok(PolynomialPair {
            t_coeffs,
            u_coeffs,
            tau,
            pell_residual: f64::NAN,
        })
    }

    pub fn degree(&self) -> usize {
        self.t_coeffs.len() - 1
    }

    pub fn eval_t(&self, z: Complex64) -> Complex64 {
        horner(&self.t_coeffs, z)
    }

    pub fn eval_u(&self, z: Complex64) -> Complex64 {
        horner(&self.u_coeffs, z)
    }
}

pub(crate) fn check_shapes(t: &[Complex64], u: &[Complex64]) -> Result<()> {
    if t.len() < 3 {
        return Err(Error::Shape(format!(
            "T needs degree >= 2 (got {} coefficients)",
            t.len()
        )));
    }
    if u.len() + 2 != t.len() {
        return Err(Error::Shape(format!(
            "U must have {} coefficients for deg T = {}, got {}",
            t.len() - 2,
            t.len() - 1,
            u.len()
        )));
    }
    if t.last() == Some(&ZERO) {
        return Err(Error::Shape("leading coefficient of T is zero".into()));
    }
    Ok(())
}

/// Coefficients of `T^2 - 1 - H U^2`.
fn defect(t: &[Complex64], u: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    let mut t2 = mul(t, t);
    t2[0] -= ONE;
    sub(&t2, &mul(h, &mul(u, u)))
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Max-norm of the coefficients of `T^2 - 1 - H_4 U^2`, divided by `|tau|^2`.
pub fn pell_residual(pair: &PolynomialPair, t: &EndpointTuple) -> Result<f64> {
    check_shapes(&pair.t_coeffs, &pair.u_coeffs)?;
    let tau = *pair.t_coeffs.last().unwrap();
    Ok(max_norm(&defect(&pair.t_coeffs, &pair.u_coeffs, &t.h4())) / tau.norm_sqr())
}

type Big = FBig<HalfEven, 2>;
type Bc = Complex<Big>;

/// Working precisions (bits) tried in turn by the expansion at infinity,
/// whose Hankel system loses roughly `4 n log10(radius / capacity)` digits.
const LAURENT_PRECISIONS: [usize; 5] = [128, 256, 512, 1024, 2048];

/// Consistency required of the initial pair: the non-constant part of
/// `T^2 - H U^2` relative to its constant term.
const LAURENT_CONSISTENCY: f64 = 1e-14;

fn big(x: f64, prec: usize) -> Big {
    Big::try_from(x).unwrap_or(Big::ZERO).with_precision(prec).value()
}

fn bc(z: Complex64, prec: usize) -> Bc {
    Complex::new(big(z.re, prec), big(z.im, prec))
}

fn to_f64(z: &Bc) -> Complex64 {
    Complex64::new(z.re.to_f64().value(), z.im.to_f64().value())
}

fn big_mul(a: &[Bc], b: &[Bc]) -> Vec<Bc> {
    let mut out = vec![Bc::new(Big::ZERO, Big::ZERO); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

/// Power series of `sqrt(1 + p1 x + ... + p4 x^4)` up to `x^len-1`.
fn sqrt_series(p: &[Bc], len: usize, prec: usize) -> Vec<Bc> {
    let zero = bc(ZERO, prec);
    let half = big(0.5, prec);
    let mut s = vec![zero.clone(); len];
    s[0] = bc(ONE, prec);
    for j in 1..len {
        let pj = p.get(j).cloned().unwrap_or_else(|| zero.clone());
        let cross = (1..j).fold(zero.clone(), |acc, i| acc + &s[i] * &s[j - i]);
        s[j] = (pj - cross).scale(half.clone());
    }
    s
}

/// Gaussian elimination with partial pivoting on a square system.
fn big_solve(mut a: Vec<Vec<Bc>>, mut b: Vec<Bc>) -> Option<Vec<Bc>> {
    let n = b.len();
    let size = |z: &Bc| to_f64(z).norm();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| size(&a[i][col]).total_cmp(&size(&a[j][col])))?;
        if size(&a[pivot][col]) == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = &a[row][col] / &a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (target, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *target = &*target - &f * p;
            }
            let v = &f * &b[col];
            b[row] = &b[row] - v;
        }
    }
    let mut x: Vec<Bc> = vec![Bc::new(Big::ZERO, Big::ZERO); n];
    for row in (0..n).rev() {
        let acc = (row + 1..n).fold(b[row].clone(), |acc, k| acc - &a[row][k] * &x[k]);
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// `(T, U, c, consistency)` at one working precision, with `lead(U) = 1`
/// and `T^2 - H U^2 = c`.
fn laurent_at(points: &[Complex64], n: usize, prec: usize) -> Option<(Vec<Bc>, Vec<Bc>, Complex64, f64)> {
    let zero = bc(ZERO, prec);
    let one = bc(ONE, prec);
    let h = points
        .iter()
        .fold(vec![one.clone()], |acc, &p| big_mul(&acc, &[-bc(p, prec), one.clone()]));
    // sqrt(H) = sum_j s_j z^(2-j), s from the reversed coefficients of H.
    let reversed: Vec<Bc> = h.iter().rev().cloned().collect();
    let s = sqrt_series(&reversed, 2 * n + 1, prec);
    let u_len = n - 1;
    let mut u = vec![zero.clone(); u_len];
    u[u_len - 1] = one;
    if u_len > 1 {
        // coefficient of z^-l in sqrt(H) U vanishes for l = 1..n-2; the
        // last condition (l = n-1) holds automatically on a T_n-tuple.
        let m = u_len - 1;
        let a: Vec<Vec<Bc>> = (0..m).map(|l| (0..m).map(|i| s[i + 3 + l].clone()).collect()).collect();
        let b: Vec<Bc> = (0..m).map(|l| -s[m + 3 + l].clone()).collect();
        let sol = big_solve(a, b)?;
        for (slot, v) in u.iter_mut().zip(sol) {
            *slot = v;
        }
    }
    let t: Vec<Bc> = (0..=n)
        .map(|p| {
            (0..u_len)
                .filter(|&i| i + 2 >= p)
                .fold(zero.clone(), |acc, i| acc + &u[i] * &s[i + 2 - p])
        })
        .collect();
    let tt = big_mul(&t, &t);
    let hu = big_mul(&h, &big_mul(&u, &u));
    let d: Vec<Complex64> = tt.iter().zip(&hu).map(|(x, y)| to_f64(&(x - y))).collect();
    let c = d[0];
    let consistency = d[1..].iter().map(|x| x.norm()).fold(0.0, f64::max) / c.norm();
    Some((t, u, c, consistency))
}

/// Initial pair from the kernel of the Hankel matrix of `sqrt(H)`'s
/// expansion at infinity, `H` monic with the given roots.
fn laurent_pair(points: &[Complex64], n: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut best = None;
    for prec in LAURENT_PRECISIONS {
        let Some(found) = laurent_at(points, n, prec) else {
            continue;
        };
        let done = found.3 <= LAURENT_CONSISTENCY;
        best = Some(found);
        if done {
            break;
        }
    }
    let Some((t, u, c, _)) = best else {
        return Err(Error::NoConvergence {
            what: "Hankel kernel solve",
            residual: f64::NAN,
        });
    };
    if c == ZERO || !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::NoConvergence {
            what: "Laurent initial pair",
            residual: f64::INFINITY,
        });
    }
    // Rescale so that T^2 - H U^2 = 1.
    let scale = ONE / c.sqrt();
    Ok((
        t.iter().map(|x| to_f64(x) * scale).collect(),
        u.iter().map(|x| to_f64(x) * scale).collect(),
    ))
}

/// Levels whose preimages supply collocation points on the arcs.
const COLLOCATION_LEVELS: [f64; 4] = [
    0.9238795325112867,
    0.3826834323650898,
    -0.3826834323650898,
    -0.9238795325112867,
];

/// The anchors plus the roots of `T - t` for each collocation level.
fn collocation_points(t: &[Complex64], anchors: &[Complex64]) -> Vec<Complex64> {
    let mut pts = anchors.to_vec();
    for level in COLLOCATION_LEVELS {
        let mut shifted = t.to_vec();
        shifted[0] -= level;
        if let Ok(zs) = roots(&shifted) {
            pts.extend(zs);
        }
    }
    pts
}

/// Levenberg-Marquardt for `T^2 - 1 = H U^2`, fitting the coefficient defect
/// (scaled by `1/|tau|^2`) together with the pointwise defect at points on
/// the arcs and at the `anchors`.
fn refine(
    mut t: Vec<Complex64>,
    mut u: Vec<Complex64>,
    h: &[Complex64],
    anchors: &[Complex64],
    iterations: usize,
) -> (Vec<Complex64>, Vec<Complex64>, f64) {
    let nt = t.len();
    let nu = u.len();
    let coeff_rows = 2 * (nt - 1) + 1;
    let weight = 1.0 / t.last().unwrap().norm_sqr();
    let residuals = |t: &[Complex64], u: &[Complex64], pts: &[Complex64]| -> Vec<Complex64> {
        let mut r: Vec<Complex64> = defect(t, u, h).into_iter().map(|c| c * weight).collect();
        r.resize(coeff_rows, ZERO);
        r.extend(pts.iter().map(|&z| {
            let tv = compensated_horner(t, z);
            let uv = compensated_horner(u, z);
            tv * tv - ONE - compensated_horner(h, z) * uv * uv
        }));
        r
    };
    let mut pts = collocation_points(&t, anchors);
    let mut res = max_norm(&residuals(&t, &u, &pts));
    let mut mu = 0.0f64;
    for _ in 0..iterations {
        if res == 0.0 {
            break;
        }
        let r = residuals(&t, &u, &pts);
        res = max_norm(&r);
        let rows = coeff_rows + pts.len();
        let two_t: Vec<Complex64> = t.iter().map(|c| c * (2.0 * weight)).collect();
        let two_hu: Vec<Complex64> = mul(h, &u).iter().map(|c| -c * (2.0 * weight)).collect();
        let at: Vec<(Complex64, Complex64)> = pts
            .iter()
            .map(|&z| (horner(&t, z) * 2.0, -horner(h, z) * horner(&u, z) * 2.0))
            .collect();
        let mut jac = DMatrix::from_fn(rows, nt + nu, |row, col| {
            if row >= coeff_rows {
                let i = row - coeff_rows;
                let z = pts[i];
                return if col < nt {
                    at[i].0 * z.powu(col as u32)
                } else {
                    at[i].1 * z.powu((col - nt) as u32)
                };
            }
            if col < nt {
                row.checked_sub(col).and_then(|k| two_t.get(k)).copied().unwrap_or(ZERO)
            } else {
                row.checked_sub(col - nt)
                    .and_then(|k| two_hu.get(k))
                    .copied()
                    .unwrap_or(ZERO)
            }
        });
        let col_scale: Vec<f64> = jac
            .column_iter()
            .map(|c| {
                let n = c.norm();
                if n > 0.0 {
                    1.0 / n
                } else {
                    1.0
                }
            })
            .collect();
        for (j, &sc) in col_scale.iter().enumerate() {
            jac.column_mut(j).scale_mut(sc);
        }
        let rhs = DVector::from_fn(rows, |row, _| -r[row]);
        let svd = jac.svd(true, true);
        let (Some(left), Some(right_t)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
            break;
        };
        let sv = &svd.singular_values;
        let g = left.adjoint() * &rhs;
        let sigma_max = sv.max();
        if mu == 0.0 {
            mu = 1e-6 * sigma_max * sigma_max;
        }
        let base = l2(&r);
        let mut accepted = false;
        while mu <= 1e6 * sigma_max * sigma_max {
            let filtered = DVector::from_fn(sv.len(), |i, _| g[i] * (sv[i] / (sv[i] * sv[i] + mu)));
            let mut step = right_t.adjoint() * filtered;
            for (j, &sc) in col_scale.iter().enumerate() {
                step[j] *= sc;
            }
            let t_new: Vec<Complex64> = t.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let u_new: Vec<Complex64> = u.iter().zip(step.iter().skip(nt)).map(|(a, d)| a + d).collect();
            let trial = l2(&residuals(&t_new, &u_new, &pts));
            if trial < base {
                t = t_new;
                u = u_new;
                mu = (mu / 4.0).max(1e-30 * sigma_max * sigma_max);
                accepted = true;
                break;
            }
            mu *= 8.0;
        }
        if !accepted {
            break;
        }
        pts = collocation_points(&t, anchors);
        res = max_norm(&residuals(&t, &u, &pts));
    }
    (t, u, res)
}

/// Build `(T_n, U_{n-2})` for a tuple certified at degree `cert.n`.
///
/// Normalisation: `lead(T) = lead(U) = tau` and `T_n(a4) = +1`.
pub fn construct_pair(t: &EndpointTuple, cert: &TupleCertificate) -> Result<PolynomialPair> {
    let n = cert.n;
    if !(2..=MAX_DEGREE).contains(&n) {
        return Err(Error::UnsupportedDegree {
            n,
            min: 2,
            max: MAX_DEGREE,
        });
    }
    let recheck = is_tn_tuple(t, n, cert.tolerance)?;
    if !cert.accepted || !recheck.accepted {
        return Err(Error::NotCertified {
            n,
            lambda_residual: recheck.lambda_residual,
            lambda_prime_residual: recheck.lambda_prime_residual,
        });
    }
    let n = n as usize;
    let pts = t.points();
    let centre = pts.iter().sum::<Complex64>() / 4.0;
    let radius = pts.iter().map(|p| (p - centre).norm()).fold(0.0, f64::max);
    let scaled: Vec<Complex64> = pts.iter().map(|p| (p - centre) / radius).collect();
    let h_scaled = crate::poly::from_roots(&scaled);

    let (t0, u0) = laurent_pair(&scaled, n)?;
    let (ts, us, _) = refine(t0, u0, &h_scaled, &scaled, 30);

    // Back to the caller's variable: T(z) = T^(zeta), U(z) = U^(zeta) / r^2.
    let inv = Complex64::from(1.0 / radius);
    let shift = -centre * inv;
    let t_orig = compose_affine(&ts, inv, shift);
    let u_orig: Vec<Complex64> = compose_affine(&us, inv, shift)
        .into_iter()
        .map(|c| c * inv * inv)
        .collect();
    let h = t.h4();
    let weight = 1.0 / t_orig.last().unwrap().norm_sqr();
    let (mut tc, mut uc) = if max_norm(&defect(&t_orig, &u_orig, &h)) * weight <= PELL_TOL {
        (t_orig, u_orig)
    } else {
        let (tc, uc, _) = refine(t_orig, u_orig, &h, &pts, 8);
        (tc, uc)
    };

    if horner(&tc, t.a4).re < 0.0 {
        tc.iter_mut().for_each(|c| *c = -*c);
    }
    let tau = *tc.last().unwrap();
    let lead_u = *uc.last().unwrap();
    if (lead_u + tau).norm() < (lead_u - tau).norm() {
        uc.iter_mut().for_each(|c| *c = -*c);
    }
    let mut pair = PolynomialPair {
        t_coeffs: tc,
        u_coeffs: uc,
        tau,
        pell_residual: f64::NAN,
    };
    pair.pell_residual = pell_residual(&pair, t)?;
    if pair.pell_residual.is_nan() || pair.pell_residual > PELL_TOL {
        return Err(Error::NoConvergence {
            what: "Pell pair construction",
            residual: pair.pell_residual,
        });
    }
    Ok(pair)
}
