//! Jacobian elliptic functions for complex argument and complex modulus.
//!
//! The modulus is restricted to `D_k = {|k| <= 1, Re k > 0, k != 1}`, on
//! which the quarter periods `K(k)` and `K'(k) = K(k')` are single valued.
//! `K` and `K'` come from the arithmetic-geometric mean, `sn`, `cn`, `dn`
//! from theta quotients, and the inverse of `sn^2` from Carlson's `R_F`
//! followed by Newton polishing and folding into the half period
//! parallelogram
//!
//! ```text
//! P = { mu K + i mu' K' : 0 <= mu, mu' <= 1 } u { 0 < mu < 1, -1 < mu' < 0 }
//! ```
//!
//! on which `sn^2` is a bijection onto the extended plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative distance (in units of `min(|K|, |K'|)`) below which an argument
/// is treated as sitting on a pole.
pub const POLE_GUARD: f64 = 1e-8;

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

/// Values of `sn`, `cn`, `dn` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

/// A point `rho = lambda K + i lambda' K'` together with its lattice
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeCoord {
    pub rho: Complex64,
    pub lambda: f64,
    pub lambda_prime: f64,
}

/// Theta-series data for one choice of quarter periods.
#[derive(Debug, Clone)]
struct ThetaFrame {
    quarter: Complex64,
    quarter_prime: Complex64,
    /// `exp(i pi tau n^2)` for n = 1, 2, ...
    int_powers: Vec<Complex64>,
    /// `exp(i pi tau (n + 1/2)^2)` for n = 0, 1, ...
    half_powers: Vec<Complex64>,
    th2_0: Complex64,
    th3_0: Complex64,
    th4_0: Complex64,
}

struct Thetas {
    th1: Complex64,
    th2: Complex64,
    th3: Complex64,
    th4: Complex64,
}

impl ThetaFrame {
    fn new(quarter: Complex64, quarter_prime: Complex64) -> Self {
        let tau = I * quarter_prime / quarter;
        let ipt = I * PI * tau;
        // Arguments are reduced to |Im v| <= pi Im(tau) / 2, so term n is
        // bounded by |q|^(n^2 - n).
        let log_q = -PI * tau.im;
        let mut int_powers = Vec::new();
        let mut half_powers = Vec::new();
        for n in 0..64u32 {
            let nf = n as f64;
            half_powers.push((ipt * (nf + 0.5) * (nf + 0.5)).exp());
            if n > 0 {
                int_powers.push((ipt * nf * nf).exp());
            }
            if n > 1 && log_q * (nf * nf - nf) < -42.0 {
                break;
            }
        }
        let mut frame = ThetaFrame {
            quarter,
            quarter_prime,
            int_powers,
            half_powers,
            th2_0: ONE,
            th3_0: ONE,
            th4_0: ONE,
        };
        let t0 = frame.thetas(ZERO);
        frame.th2_0 = t0.th2;
        frame.th3_0 = t0.th3;
        frame.th4_0 = t0.th4;
        frame
    }

    fn nome_abs(&self) -> f64 {
        (-PI * (self.quarter_prime / self.quarter).re).exp()
    }

    fn thetas(&self, v: Complex64) -> Thetas {
        let mut th1 = ZERO;
        let mut th2 = ZERO;
        let mut th3 = ONE;
        let mut th4 = ONE;
        for (n, &qh) in self.half_powers.iter().enumerate() {
            let arg = v * (2 * n + 1) as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            th1 += qh * arg.sin() * (2.0 * sign);
            th2 += qh * arg.cos() * 2.0;
        }
        for (idx, &qi) in self.int_powers.iter().enumerate() {
            let n = idx + 1;
            let c = (v * (2 * n) as f64).cos() * qi * 2.0;
            th3 += c;
            th4 += if n % 2 == 0 { c } else { -c };
        }
        Thetas { th1, th2, th3, th4 }
    }

    /// `sn, cn, dn` in this frame, after reducing the argument modulo
    /// `4K`, `4iK'` and tracking the sign flips of the half-period shifts.
    fn jacobi(&self, u: Complex64) -> Jacobi {
        let (lambda, lambda_prime) = coords_in(self.quarter, self.quarter_prime, u);
        let a = (lambda / 2.0).round();
        let b = (lambda_prime / 2.0).round();
        let reduced = u - self.quarter * (2.0 * a) - I * self.quarter_prime * (2.0 * b);
        let odd_a = (a as i64).rem_euclid(2) == 1;
        let odd_b = (b as i64).rem_euclid(2) == 1;

        let v = reduced * (PI / 2.0) / self.quarter;
        let t = self.thetas(v);
        let mut sn = self.th3_0 / self.th2_0 * t.th1 / t.th4;
        let mut cn = self.th4_0 / self.th2_0 * t.th2 / t.th4;
        let mut dn = self.th4_0 / self.th3_0 * t.th3 / t.th4;
        if odd_a {
            sn = -sn;
            cn = -cn;
        }
        if odd_b {
            cn = -cn;
            dn = -dn;
        }
        Jacobi { sn, cn, dn }
    }
}

/// Real coordinates of `u` in the frame `(K, iK')`.
fn coords_in(quarter: Complex64, quarter_prime: Complex64, u: Complex64) -> (f64, f64) {
    let tau = I * quarter_prime / quarter;
    let w = u / quarter;
    let lambda_prime = w.im / tau.im;
    let lambda = w.re - lambda_prime * tau.re;
    (lambda, lambda_prime)
}

/// Modulus data: `k`, `k'`, the quarter periods `K`, `K'` and the nome
/// `q = exp(-pi K'/K)`.
#[derive(Debug, Clone, Serialize)]
pub struct Modulus {
    pub k: Complex64,
    pub k_prime: Complex64,
    #[serde(rename = "K")]
    pub big_k: Complex64,
    #[serde(rename = "K_prime")]
    pub big_k_prime: Complex64,
    pub nome_q: Complex64,
    #[serde(skip)]
    frame: ThetaFrame,
    /// Evaluate through the imaginary transformation (frame built on
    /// `(K', K)`), chosen when that nome is smaller.
    #[serde(skip)]
    swapped: bool,
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
    }
}

/// Arithmetic-geometric mean with the "right" square-root branch at every
/// step: the one minimising `|a_{n+1} - b_{n+1}|`.
pub fn agm(mut a: Complex64, mut b: Complex64) -> Result<Complex64> {
    for _ in 0..64 {
        if (a - b).norm() <= 4.0 * f64::EPSILON * a.norm() {
            return Ok(a);
        }
        let mean = (a + b) * 0.5;
        let mut root = (a * b).sqrt();
        if (mean - root).norm() > (mean + root).norm() {
            root = -root;
        }
        a = mean;
        b = root;
    }
    Err(Error::NoConvergence {
        what: "AGM",
        residual: (a - b).norm(),
    })
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication, for complex
/// arguments off the closed negative real axis (at most one may vanish).
pub fn carlson_rf(x: Complex64, y: Complex64, z: Complex64) -> Complex64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..200 {
        let mean = (x + y + z) / 3.0;
        let spread = (mean - x).norm().max((mean - y).norm()).max((mean - z).norm());
        if spread <= 1e-3 * mean.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = (x + lam) * 0.25;
        y = (y + lam) * 0.25;
        z = (z + lam) * 0.25;
    }
    let mean = (x + y + z) / 3.0;
    let dx = (mean - x) / mean;
    let dy = (mean - y) / mean;
    let dz = -(dx + dy);
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (ONE - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - e2 * e3 * (3.0 / 44.0)) / mean.sqrt()
}

/// Whether `k` lies in `D_k`.
pub fn in_domain(k: Complex64) -> bool {
    k.norm() <= 1.0 + 1e-12 && k.re > 0.0 && k != ONE
}

/// Complete integrals and nome for a modulus in `D_k`.
pub fn complete_integrals(k: Complex64) -> Result<Modulus> {
    if !(k.re.is_finite() && k.im.is_finite()) || !in_domain(k) {
        return Err(Error::ModulusOutOfDomain { k });
    }
    // Principal branch; Re(1 - k^2) >= 0 on D_k so Re k' > 0.
    let k_prime = (ONE - k * k).sqrt();
    let big_k = Complex64::from(PI / 2.0) / agm(ONE, k_prime)?;
    let big_k_prime = Complex64::from(PI / 2.0) / agm(ONE, k)?;
    let ratio = big_k_prime / big_k;
    if ratio.re.is_nan() || ratio.re <= 0.0 {
        return Err(Error::NoConvergence {
            what: "quarter-period frame (Im(iK'/K) <= 0)",
            residual: ratio.re,
        });
    }
    let nome_q = (-PI * ratio).exp();
    let direct = ThetaFrame::new(big_k, big_k_prime);
    let dual = ThetaFrame::new(big_k_prime, big_k);
    let swapped = dual.nome_abs() < direct.nome_abs();
    Ok(Modulus {
        k,
        k_prime,
        big_k,
        big_k_prime,
        nome_q,
        frame: if swapped { dual } else { direct },
        swapped,
    })
}

impl Modulus {
    pub fn new(k: Complex64) -> Result<Self> {
        complete_integrals(k)
    }

    pub fn k2(&self) -> Complex64 {
        self.k * self.k
    }

    /// `tau = iK'/K`, always in the upper half plane.
    pub fn tau(&self) -> Complex64 {
        I * self.big_k_prime / self.big_k
    }

    pub fn min_period_scale(&self) -> f64 {
        self.big_k.norm().min(self.big_k_prime.norm())
    }

    /// The point `lambda K + i lambda' K'`.
    pub fn point(&self, lambda: f64, lambda_prime: f64) -> Complex64 {
        self.big_k * lambda + I * self.big_k_prime * lambda_prime
    }

    /// Real `(lambda, lambda')` with `u = lambda K + i lambda' K'`; no folding.
    pub fn lattice_coords(&self, u: Complex64) -> (f64, f64) {
        coords_in(self.big_k, self.big_k_prime, u)
    }

    /// Distance from `u` to the nearest pole `iK' + 2mK + 2m'iK'`.
    pub fn pole_distance(&self, u: Complex64) -> f64 {
        let (lambda, lambda_prime) = self.lattice_coords(u);
        let a0 = (lambda / 2.0).round();
        let b0 = ((lambda_prime - 1.0) / 2.0).round();
        let mut best = f64::INFINITY;
        for da in -1..=1 {
            for db in -1..=1 {
                let a = a0 + da as f64;
                let b = b0 + db as f64;
                let pole = self.point(2.0 * a, 2.0 * b + 1.0);
                best = best.min((u - pole).norm());
            }
        }
        best
    }

    /// `sn(u)`, `cn(u)`, `dn(u)`; errors within `POLE_GUARD * min(|K|, |K'|)`
    /// of a pole.
    pub fn jacobi(&self, u: Complex64) -> Result<Jacobi> {
        let distance = self.pole_distance(u);
        if distance < POLE_GUARD * self.min_period_scale() {
            return Err(Error::Pole { u, distance });
        }
        Ok(self.jacobi_unchecked(u))
    }

    pub(crate) fn jacobi_unchecked(&self, u: Complex64) -> Jacobi {
        if !self.swapped {
            return self.frame.jacobi(u);
        }
        // Imaginary transformation: sn(u,k) = i sc(-iu,k'), cn(u,k) = nc(-iu,k'),
        // dn(u,k) = dc(-iu,k').
        let dual = self.frame.jacobi(-I * u);
        Jacobi {
            sn: I * dual.sn / dual.cn,
            cn: ONE / dual.cn,
            dn: dual.dn / dual.cn,
        }
    }

    pub fn sn2(&self, u: Complex64) -> Result<Complex64> {
        let j = self.jacobi(u)?;
        Ok(j.sn * j.sn)
    }

    /// Theta-constant reconstruction `theta_2(0)^2 / theta_3(0)^2` of the
    /// modulus in the evaluation frame (equals `k`, or `k'` when swapped).
    #[cfg(test)]
    fn theta_modulus(&self) -> Complex64 {
        let r = self.frame.th2_0 / self.frame.th3_0;
        r * r
    }

    fn lattice_coord(&self, lambda: f64, lambda_prime: f64) -> LatticeCoord {
        LatticeCoord {
            rho: self.point(lambda, lambda_prime),
            lambda,
            lambda_prime,
        }
    }

    /// The unique `rho` in the half period parallelogram with
    /// `sn^2(rho) = w`.
    pub fn inverse_sn2(&self, w: ExtComplex) -> Result<LatticeCoord> {
        let k2 = self.k2();
        let w = match w {
            ExtComplex::Infinity => return Ok(self.lattice_coord(0.0, 1.0)),
            ExtComplex::Finite(w) => w,
        };
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::Input(format!("non-finite sn^2 target {w}")));
        }
        if w == ZERO {
            return Ok(self.lattice_coord(0.0, 0.0));
        }
        if w == ONE {
            return Ok(self.lattice_coord(1.0, 0.0));
        }
        if w * k2 == ONE || w == ONE / k2 {
            return Ok(self.lattice_coord(1.0, 1.0));
        }

        // Near the pole work with v = u - iK', where sn^2(iK' + v) = 1/(k^2 sn^2(v)).
        let (target, offset) = if w.norm() * self.k.norm() > 1.0 {
            (ONE / (k2 * w), I * self.big_k_prime)
        } else {
            (w, ZERO)
        };
        let seed = target.sqrt() * carlson_rf(ONE - target, ONE - k2 * target, ONE);
        let mut v = self.polish_sn2(seed, target);
        if !self.sn2_matches(v, target) {
            v = self.polish_sn2(self.grid_seed(target), target);
        }
        if !self.sn2_matches(v, target) {
            let residual = self
                .jacobi(v)
                .map(|j| (j.sn * j.sn - target).norm())
                .unwrap_or(f64::INFINITY);
            return Err(Error::NoConvergence {
                what: "sn^2 inversion",
                residual,
            });
        }
        let (lambda, lambda_prime) = self.lattice_coords(v + offset);
        let (lambda, lambda_prime) = fold_into_parallelogram(lambda, lambda_prime);
        Ok(self.lattice_coord(lambda, lambda_prime))
    }

    fn sn2_matches(&self, u: Complex64, w: Complex64) -> bool {
        match self.jacobi(u) {
            Ok(j) => (j.sn * j.sn - w).norm() <= 1e-10 * (1.0 + w.norm()),
            Err(_) => false,
        }
    }

    /// Newton on `sn^2(u) - w`, keeping only steps that reduce the residual.
    fn polish_sn2(&self, mut u: Complex64, w: Complex64) -> Complex64 {
        let scale = self.big_k.norm() + self.big_k_prime.norm();
        let Ok(mut j) = self.jacobi(u) else {
            return u;
        };
        let mut residual = (j.sn * j.sn - w).norm();
        for _ in 0..30 {
            let deriv = j.sn * j.cn * j.dn * 2.0;
            if deriv == ZERO {
                break;
            }
            let step = (j.sn * j.sn - w) / deriv;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let mut trial = u - step;
            let mut accepted = false;
            for _ in 0..8 {
                if let Ok(jt) = self.jacobi(trial) {
                    let r = (jt.sn * jt.sn - w).norm();
                    if r < residual || r == 0.0 {
                        u = trial;
                        j = jt;
                        residual = r;
                        accepted = true;
                        break;
                    }
                }
                trial = u - (u - trial) * 0.5;
            }
            if !accepted || step.norm() <= 1e-16 * scale {
                break;
            }
        }
        u
    }

    /// Best grid point of the parallelogram for `sn^2(u) = w`, used when the
    /// Carlson seed lands off the solution.
    fn grid_seed(&self, w: Complex64) -> Complex64 {
        let steps = 48;
        let mut best = (f64::INFINITY, ZERO);
        for i in 0..=steps {
            for j in 0..=2 * steps {
                let lambda = i as f64 / steps as f64;
                let lambda_prime = j as f64 / steps as f64 - 1.0;
                let u = self.point(lambda, lambda_prime);
                if let Ok(jv) = self.jacobi(u) {
                    let r = (jv.sn * jv.sn - w).norm();
                    if r < best.0 {
                        best = (r, u);
                    }
                }
            }
        }
        best.1
    }
}

const FOLD_EPS: f64 = 1e-13;

/// Map lattice coordinates into the half period parallelogram using the
/// periods `2K`, `2iK'` of `sn^2` and its evenness. On boundary ties the
/// representative with `lambda' >= 0` wins.
pub fn fold_into_parallelogram(lambda: f64, lambda_prime: f64) -> (f64, f64) {
    let mut l = lambda - 2.0 * (lambda / 2.0).round();
    let mut lp = lambda_prime - 2.0 * (lambda_prime / 2.0).round();
    if l < 0.0 {
        l = -l;
        lp = -lp;
    }
    if lp <= -1.0 + FOLD_EPS {
        lp += 2.0;
    }
    if lp < 0.0 && (l <= FOLD_EPS || l >= 1.0 - FOLD_EPS) {
        lp = -lp;
    }
    // Canonical zeros avoid "-0" leaking into reports.
    (l + 0.0, lp + 0.0)
}

/// Whether `(lambda, lambda')` lies in the half period parallelogram.
pub fn in_parallelogram(lambda: f64, lambda_prime: f64) -> bool {
    let closed_square = (0.0..=1.0).contains(&lambda) && (0.0..=1.0).contains(&lambda_prime);
    let open_lower = lambda > 0.0 && lambda < 1.0 && lambda_prime > -1.0 && lambda_prime < 0.0;
    closed_square || open_lower
}
