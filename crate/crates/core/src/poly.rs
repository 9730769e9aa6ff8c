//! Dense complex polynomials in ascending-degree coefficient form, plus a
//! simultaneous root finder.
//!
//! Coefficient vectors are `[c0, c1, ..., cd]` for `c0 + c1 z + ... + cd z^d`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Compensated Horner evaluation: about as accurate as Horner in twice the
/// working precision.
pub fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Result<Complex64> {
    if coeffs.is_empty() {
        return Err(Error::Shape("cannot evaluate an empty coefficient vector".into()));
    }
    Ok(compensated_horner(coeffs, z))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `x * y` and its rounding error (the error itself rounded once).
fn complex_two_prod(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let (ac, e1) = two_prod(x.re, y.re);
    let (bd, e2) = two_prod(x.im, y.im);
    let (ad, e3) = two_prod(x.re, y.im);
    let (bc, e4) = two_prod(x.im, y.re);
    let (re, e5) = two_sum(ac, -bd);
    let (im, e6) = two_sum(ad, bc);
    (Complex64::new(re, im), Complex64::new(e1 - e2 + e5, e3 + e4 + e6))
}

pub(crate) fn compensated_horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut iter = coeffs.iter().rev();
    let mut s = *iter.next().unwrap_or(&ZERO);
    let mut corr = ZERO;
    for &c in iter {
        let (p, pe) = complex_two_prod(s, z);
        let (re, se_re) = two_sum(p.re, c.re);
        let (im, se_im) = two_sum(p.im, c.im);
        s = Complex64::new(re, im);
        corr = corr * z + pe + Complex64::new(se_re, se_im);
    }
    s + corr
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Value and first derivative in one pass.
pub(crate) fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| a.get(i).copied().unwrap_or(ZERO) - b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
    a.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
}

/// Monic polynomial with the given roots.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().fold(vec![ONE], |acc, &r| mul(&acc, &[-r, ONE]))
}

/// Substitute `z -> scale * z + shift`, returning the coefficients of
/// `p(scale * z + shift)`.
pub fn compose_affine(p: &[Complex64], scale: Complex64, shift: Complex64) -> Vec<Complex64> {
    let lin = [shift, scale];
    let mut out = vec![ZERO];
    for &c in p.iter().rev() {
        out = mul(&out, &lin);
        out[0] += c;
    }
    out.resize(p.len().max(1), ZERO);
    out
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1] == ZERO {
        end -= 1;
    }
    &coeffs[..end]
}

/// All roots of `coeffs` via Aberth-Ehrlich iteration, falling back to the
/// eigenvalues of the companion matrix when the iteration stalls.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    roots_from(coeffs, None)
}

/// Like [`roots`], but seeded with `guesses` (one per root) when provided.
pub fn roots_from(coeffs: &[Complex64], guesses: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let p = trim(coeffs);
    let degree = p.len().saturating_sub(1);
    if p.is_empty() || (degree == 0 && p[0] == ZERO) {
        return Err(Error::Shape("zero polynomial has no well-defined roots".into()));
    }
    if degree == 0 {
        return Ok(Vec::new());
    }
    if degree == 1 {
        return Ok(vec![-p[0] / p[1]]);
    }
    let initial = match guesses {
        Some(g) if g.len() == degree => g.to_vec(),
        _ => initial_guesses(p),
    };
    match aberth(p, initial) {
        Some(zs) => Ok(zs),
        None => {
            let zs = companion_roots(p)?;
            Ok(zs.into_iter().map(|z| newton_polish(p, z)).collect())
        }
    }
}

/// Points spread on a circle whose radius comes from the Fujiwara bound,
/// rotated off the axes so symmetric polynomials do not start on a
/// symmetry line.
fn initial_guesses(p: &[Complex64]) -> Vec<Complex64> {
    let d = p.len() - 1;
    let lead = p[d];
    let radius = (0..d)
        .map(|i| (p[i] / lead).norm().powf(1.0 / (d - i) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3);
    let centre = -p[d - 1] / (lead * d as f64);
    (0..d)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.4;
            centre + Complex64::from_polar(0.5 * radius, theta)
        })
        .collect()
}

fn aberth(p: &[Complex64], mut z: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let d = z.len();
    let scale: f64 = p.iter().map(|c| c.norm()).sum();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = horner_with_derivative(p, z[i]);
            if v.norm() <= 4.0 * f64::EPSILON * scale * (1.0 + z[i].norm()).powi(d as i32) {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let step = ratio / (ONE - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            return Some(z);
        }
    }
    // Accept if every residual is at rounding level even when a root pair
    // keeps jittering (multiple roots converge only to ~sqrt(eps)).
    let ok = z
        .iter()
        .all(|&zi| horner(p, zi).norm() <= 1e-9 * scale * (1.0 + zi.norm()).powi(d as i32));
    ok.then_some(z)
}

fn companion_roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = p.len() - 1;
    let lead = p[d];
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        m[(i, d - 1)] = -p[i] / lead;
    }
    m.schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(Error::NoConvergence {
            what: "companion eigenvalue solve",
            residual: f64::NAN,
        })
}

fn newton_polish(p: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let (v, dv) = horner_with_derivative(p, z);
        if dv == ZERO {
            break;
        }
        let step = v / dv;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
    }
    z
}
