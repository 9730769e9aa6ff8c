//! Point-set approximation of `T_n^{-1}([-1, 1])`.
//!
//! Each level `t` in `[-1, 1]` contributes the `n` roots of `T_n(z) = t`.
//! Roots are threaded into branches by nearest-neighbour continuation,
//! and components are counted on an epsilon-graph over all traced points.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pell::{check_shapes, PolynomialPair};
use crate::poly::{compensated_horner, derivative, horner_with_derivative, roots, roots_from};

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 16;

/// Refinement levels placed on each side of an interior critical value.
const CRITICAL_REFINEMENTS: i32 = 30;

/// `|T(c) -+ 1|` below which a critical point counts as a double root of `T -+ 1`.
const DOUBLE_ROOT_TOL: f64 = 1e-6;

/// Pairs whose residual exceeds this are not traced for endpoints.
const ENDPOINT_RESIDUAL_MAX: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceLevel {
    pub t: f64,
    pub roots: Vec<Complex64>,
    /// Set for levels next to an interior critical value of `T`, and for
    /// levels whose roots failed the membership test.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PreimageTrace {
    pub points: Vec<TraceLevel>,
    pub component_count: usize,
    pub endpoint_estimates: Vec<Complex64>,
    /// One ordered point sequence per branch, following `t` from 1 to -1.
    pub gamma: Vec<Vec<Complex64>>,
}

fn shifted(t: &[Complex64], level: f64) -> Vec<Complex64> {
    let mut p = t.to_vec();
    p[0] -= level;
    p
}

fn diameter(pts: &[Complex64]) -> f64 {
    pts.iter()
        .enumerate()
        .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max)
}

/// Roots of `T - s` of odd multiplicity, for `s = 1` and `s = -1`.
///
/// A critical point `c` with `T(c) = s` is a double root of `T - s`; the two
/// computed roots nearest to it are dropped. The survivors are polished by
/// Newton's method on `T - s`.
fn odd_roots(t: &[Complex64]) -> Result<Vec<Complex64>> {
    let critical = roots(&derivative(t))?;
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let p = shifted(t, s);
        let mut zs = roots(&p)?;
        for c in &critical {
            if (compensated_horner(t, *c) - s).norm() > DOUBLE_ROOT_TOL {
                continue;
            }
            for _ in 0..2 {
                if let Some((i, _)) = zs
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| (*a - c).norm().total_cmp(&(*b - c).norm()))
                {
                    zs.swap_remove(i);
                }
            }
        }
        for mut z in zs {
            for _ in 0..3 {
                let (_, dv) = horner_with_derivative(&p, z);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = compensated_horner(&p, z) / dv;
                if !(step.re.is_finite() && step.im.is_finite()) {
                    break;
                }
                z -= step;
            }
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// The four arc endpoints of a two-arc pair: zeros of `T^2 - 1` of odd
/// multiplicity, sorted by real then imaginary part.
pub fn endpoints_from_pair(pair: &PolynomialPair) -> Result<Vec<Complex64>> {
    check_shapes(&pair.t_coeffs, &pair.u_coeffs)?;
    if pair.pell_residual > ENDPOINT_RESIDUAL_MAX {
        return Err(Error::Degenerate(format!(
            "Pell residual {:e} exceeds {ENDPOINT_RESIDUAL_MAX:e}",
            pair.pell_residual
        )));
    }
    let odd = odd_roots(&pair.t_coeffs)?;
    if odd.len() != 4 {
        return Err(Error::NotTwoArc { odd: odd.len() });
    }
    Ok(odd)
}

/// Levels `cos(pi j / samples)` plus refinement levels around interior
/// critical values, in decreasing order, each with its flag.
fn levels(t: &[Complex64], samples: usize) -> Result<Vec<(f64, bool)>> {
    let mut out: Vec<(f64, bool)> = (0..=samples)
        .map(|j| ((PI * j as f64 / samples as f64).cos(), false))
        .collect();
    let spacing = PI / samples as f64;
    for c in roots(&derivative(t))? {
        let v = compensated_horner(t, c);
        if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) || v.re.abs() >= 1.0 {
            continue;
        }
        let tc = v.re;
        let local = spacing * (1.0 - tc * tc).sqrt().max(spacing);
        for k in 1..=CRITICAL_REFINEMENTS {
            let d = local * 2f64.powi(-k);
            for level in [tc - d, tc + d] {
                if level.abs() < 1.0 {
                    out.push((level, true));
                }
            }
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// Assign `found` to the slots of `prev` greedily by distance to `predicted`.
fn thread(predicted: &[Complex64], found: Vec<Complex64>) -> Vec<Complex64> {
    let n = predicted.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in predicted.iter().enumerate() {
        for (j, z) in found.iter().enumerate() {
            pairs.push(((p - z).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = vec![Complex64::new(f64::NAN, f64::NAN); n];
    let mut slot_done = vec![false; n];
    let mut root_done = vec![false; n];
    for (_, i, j) in pairs {
        if !slot_done[i] && !root_done[j] {
            out[i] = found[j];
            slot_done[i] = true;
            root_done[j] = true;
        }
    }
    out
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Connected components of the graph joining points closer than `eps`.
fn count_components(pts: &[Complex64], eps: f64) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let cell = |z: &Complex64| ((z.re / eps).floor() as i64, (z.im / eps).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, z) in pts.iter().enumerate() {
        grid.entry(cell(z)).or_default().push(i);
    }
    let mut sets = DisjointSets::new(pts.len());
    for (i, z) in pts.iter().enumerate() {
        let (cx, cy) = cell(z);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                    for &j in bucket {
                        if j > i && (pts[j] - z).norm() <= eps {
                            sets.union(i, j);
                        }
                    }
                }
            }
        }
    }
    (0..pts.len()).filter(|&i| sets.find(i) == i).count()
}

/// Trace `T_n^{-1}([-1, 1])` at `samples + 1` Chebyshev-spaced levels.
pub fn trace_preimage(pair: &PolynomialPair, samples: usize) -> Result<PreimageTrace> {
    check_shapes(&pair.t_coeffs, &pair.u_coeffs)?;
    if samples < MIN_SAMPLES {
        return Err(Error::Input(format!(
            "samples must be at least {MIN_SAMPLES}, got {samples}"
        )));
    }
    let t = &pair.t_coeffs;
    let n = t.len() - 1;
    let tau = t[n].norm();
    let lv = levels(t, samples)?;

    let solved: Vec<Result<Vec<Complex64>>> = lv.par_iter().map(|&(level, _)| roots(&shifted(t, level))).collect();

    let mut points: Vec<TraceLevel> = Vec::with_capacity(lv.len());
    let mut prev: Option<(f64, Vec<Complex64>)> = None;
    for ((level, critical), found) in lv.into_iter().zip(solved) {
        let found = found?;
        let ordered = match &prev {
            None => found,
            Some((prev_t, prev_roots)) => {
                let dt = level - prev_t;
                let predicted: Vec<Complex64> = prev_roots
                    .iter()
                    .map(|&z| {
                        let (_, dv) = horner_with_derivative(t, z);
                        let step = dt / dv;
                        if step.re.is_finite() && step.im.is_finite() && step.norm() <= (dt.abs()).sqrt() {
                            z + step
                        } else {
                            z
                        }
                    })
                    .collect();
                let warm = roots_from(&shifted(t, level), Some(&predicted)).unwrap_or(found);
                thread(&predicted, warm)
            }
        };
        let member = ordered.iter().all(|z| {
            let bound = 1e-8 * (1.0 + tau * (1.0 + z.norm()).powi(n as i32));
            (compensated_horner(t, *z) - level).norm() <= bound
        });
        prev = Some((level, ordered.clone()));
        points.push(TraceLevel {
            t: level,
            roots: ordered,
            flagged: critical || !member,
        });
    }

    let gamma: Vec<Vec<Complex64>> = (0..n).map(|j| points.iter().map(|l| l.roots[j]).collect()).collect();
    let endpoint_estimates = odd_roots(t)?;
    let all: Vec<Complex64> = points.iter().flat_map(|l| l.roots.iter().copied()).collect();
    let mut diam = diameter(&endpoint_estimates);
    if diam == 0.0 {
        let (lo, hi) = all.iter().fold(
            (
                Complex64::new(f64::INFINITY, f64::INFINITY),
                Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), z| {
                (
                    Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
                    Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
                )
            },
        );
        diam = (hi - lo).norm();
    }
    let eps = 10.0 / samples as f64 * diam.max(f64::MIN_POSITIVE);
    let component_count = count_components(&all, eps);
    Ok(PreimageTrace {
        points,
        component_count,
        endpoint_estimates,
        gamma,
    })
}

/// Rows `t,re,im,branch_id`, one per traced point.
pub fn write_csv<W: Write>(trace: &PreimageTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "t,re,im,branch_id")?;
    for level in &trace.points {
        for (j, z) in level.roots.iter().enumerate() {
            writeln!(w, "{},{},{},{}", level.t, z.re, z.im, j)?;
        }
    }
    Ok(())
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// One polyline per branch and a circle per endpoint estimate; the
/// imaginary axis points up.
pub fn write_svg<W: Write>(trace: &PreimageTrace, mut w: W) -> io::Result<()> {
    let all = trace
        .gamma
        .iter()
        .flatten()
        .chain(trace.endpoint_estimates.iter())
        .filter(|z| z.re.is_finite() && z.im.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in all {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let margin = 0.05 * span;
    let (vx, vy) = (x0 - margin, -y1 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = span / 400.0;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}" width="800" height="{:.0}">"#,
        800.0 * vh / vw
    )?;
    for (j, branch) in trace.gamma.iter().enumerate() {
        let pts: Vec<String> = branch
            .iter()
            .filter(|z| z.re.is_finite() && z.im.is_finite())
            .map(|z| format!("{:.6},{:.6}", z.re, -z.im))
            .collect();
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{}" stroke-width="{stroke:.6}" points="{}"/>"#,
            PALETTE[j % PALETTE.len()],
            pts.join(" ")
        )?;
    }
    for z in &trace.endpoint_estimates {
        writeln!(
            w,
            r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="black"/>"#,
            z.re,
            -z.im,
            3.0 * stroke
        )?;
    }
    writeln!(w, "</svg>")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn pair(t: &[f64], u: &[f64]) -> PolynomialPair {
        PolynomialPair::from_coeffs(real(t), real(u)).unwrap()
    }

    fn near_set(got: &[Complex64], want: &[Complex64], tol: f64) -> bool {
        got.len() == want.len() && want.iter().all(|w| got.iter().any(|g| (g - w).norm() <= tol))
    }

    #[test]
    fn classical_single_arc() {
        let p = pair(&[-1.0, 0.0, 2.0], &[2.0]);
        let tr = trace_preimage(&p, 64).unwrap();
        assert_eq!(tr.component_count, 1);
        assert!(near_set(&tr.endpoint_estimates, &real(&[-1.0, 1.0]), 1e-12));
        for level in &tr.points {
            for z in &level.roots {
                assert!(z.im.abs() < 1e-7 && z.re.abs() <= 1.0 + 1e-7);
            }
        }
    }

    #[test]
    fn crossing_arcs_are_one_component() {
        let p = pair(&[-0.6, 0.0, 1.6], &[1.6]);
        let tr = trace_preimage(&p, 128).unwrap();
        assert_eq!(tr.component_count, 1);
        assert!(tr.points.iter().any(|l| l.flagged));
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.5),
            Complex64::new(0.0, -0.5),
        ];
        assert!(near_set(&endpoints_from_pair(&p).unwrap(), &want, 1e-8));
    }

    #[test]
    fn symmetric_intervals_are_two_components() {
        let p = pair(
            &[41.0 / 9.0, 0.0, -160.0 / 9.0, 0.0, 128.0 / 9.0],
            &[-80.0 / 9.0, 0.0, 128.0 / 9.0],
        );
        let tr = trace_preimage(&p, 128).unwrap();
        assert_eq!(tr.component_count, 2);
        assert!(near_set(
            &endpoints_from_pair(&p).unwrap(),
            &real(&[-1.0, -0.5, 0.5, 1.0]),
            1e-8
        ));
    }

    #[test]
    fn classical_cubic_is_not_two_arc() {
        let p = pair(&[0.0, -3.0, 0.0, 4.0], &[0.0, 4.0]);
        assert!(matches!(endpoints_from_pair(&p), Err(Error::NotTwoArc { odd: 2 })));
    }

    #[test]
    fn small_sample_counts_rejected() {
        let p = pair(&[-1.0, 0.0, 2.0], &[2.0]);
        assert!(matches!(trace_preimage(&p, 8), Err(Error::Input(_))));
    }

    #[test]
    fn exports_are_deterministic() {
        let p = pair(&[-0.6, 0.0, 1.6], &[1.6]);
        let render = || {
            let tr = trace_preimage(&p, 32).unwrap();
            let mut csv = Vec::new();
            let mut svg = Vec::new();
            write_csv(&tr, &mut csv).unwrap();
            write_svg(&tr, &mut svg).unwrap();
            (csv, svg)
        };
        let (a, b) = (render(), render());
        assert_eq!(a, b);
        let text = String::from_utf8(a.0).unwrap();
        assert!(text.starts_with("t,re,im,branch_id\n"));
        assert!(String::from_utf8(a.1).unwrap().contains("<polyline"));
    }
}
