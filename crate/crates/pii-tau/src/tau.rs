//! `∂_t log τ` assembled from the Fredholm determinant and the correction
//! terms, integration of `log τ` along straight paths, and scanning of the
//! complex `t`-plane for zeros of the determinant.

use crate::cauchy::{log_near, Numerics, StripSamples};
use crate::corrections::{self, CorrectionBreakdown};
use crate::error::{Error, Result};
use crate::fredholm::{assemble_from_samples, fredholm_det, log_det, NystromOperator};
use crate::monodromy::MonodromyParams;
use crate::quadrature::{gauss_legendre, gauss_segment};
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `|det|` below which `∂_t log det` is not evaluated.
pub const DIVISOR_THRESHOLD: f64 = 1e-8;

/// Components of `∂_t log τ = ∂_t log det − (4iν/3 + 2ν²/t) + 𝓕`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauDerivative {
    pub t: C64,
    /// `∂_t log det` by the resolvent trace `−tr[(I − M)⁻¹ ∂_t M]`.
    pub ddt_log_det: C64,
    /// `∂_t log det` by central differences of `log det`.
    pub ddt_log_det_fd: C64,
    pub closed_form: C64,
    pub calf: C64,
    pub total: C64,
    pub det: C64,
    pub log_det: C64,
    pub kernel_norm: f64,
    pub corrections: CorrectionBreakdown,
    pub numerics: Numerics,
}

impl TauDerivative {
    /// Residual of `total = ddt_log_det − closed_form + calf`.
    pub fn aggregation_residual(&self) -> f64 {
        (self.total - (self.ddt_log_det - self.closed_form + self.calf)).norm()
    }
}

fn check_t(t: C64) -> Result<()> {
    if !(t.norm() > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t}: the representation is not valid at t = 0")));
    }
    Ok(())
}

/// Finite-difference step for `∂_t`.
pub fn fd_step(t: C64) -> f64 {
    1e-4 * t.norm()
}

fn operator_at(t: C64, mp: &MonodromyParams, numerics: &Numerics) -> Result<(StripSamples, NystromOperator)> {
    let strip = StripSamples::sample(mp, t, numerics)?;
    let op = assemble_from_samples(&strip, numerics.variant);
    Ok((strip, op))
}

/// `−tr[(I − M)⁻¹ D]` for `D ≈ ∂_t M`; `None` if `I − M` is singular.
fn resolvent_trace(m: &DMatrix<C64>, dm: &DMatrix<C64>) -> Option<C64> {
    let n = m.nrows();
    let lu = (DMatrix::identity(n, n) - m).lu();
    lu.solve(dm).map(|x| -x.trace())
}

/// `∂_t log τ` at `t` with all components. With `estimate_errors` the correction
/// terms are cross-checked at twice the node count (and aggregation is refused
/// when they disagree by more than the corrections' limit).
pub fn dlogtau_with(t: C64, mp: &MonodromyParams, numerics: &Numerics, estimate_errors: bool) -> Result<TauDerivative> {
    check_t(t)?;
    numerics.validate()?;
    let delta = fd_step(t);
    let (strip, op) = operator_at(t, mp, numerics)?;
    let (_, op_p) = operator_at(t + delta, mp, numerics)?;
    let (_, op_m) = operator_at(t - delta, mp, numerics)?;
    let d0 = log_det(&op);
    if !(d0.det.norm() >= DIVISOR_THRESHOLD) {
        return Err(Error::DivisorProximity(d0.det.norm()));
    }
    let dm = (&op_p.matrix - &op_m.matrix) / C64::from(2.0 * delta);
    let ddt = resolvent_trace(&op.matrix, &dm).ok_or(Error::DivisorProximity(0.0))?;
    let lp = log_near(log_det(&op_p).det, d0.log_det);
    let lm = log_near(log_det(&op_m).det, d0.log_det);
    let ddt_fd = (lp - lm) / (2.0 * delta);
    let corr = if estimate_errors {
        corrections::calf(t, mp, numerics)?
    } else {
        corrections::breakdown_from_strip(&strip, mp)?
    };
    let closed_form = corrections::closed_form(mp.nu, t);
    Ok(TauDerivative {
        t,
        ddt_log_det: ddt,
        ddt_log_det_fd: ddt_fd,
        closed_form,
        calf: corr.total,
        total: ddt - closed_form + corr.total,
        det: d0.det,
        log_det: d0.log_det,
        kernel_norm: op.norm_estimate,
        corrections: corr,
        numerics: *numerics,
    })
}

/// [`dlogtau_with`] including the error cross-checks.
pub fn dlogtau(t: C64, mp: &MonodromyParams, numerics: &Numerics) -> Result<TauDerivative> {
    dlogtau_with(t, mp, numerics, true)
}

/// `∂_t log det` by central differences with step `delta` and branch-continuous logarithms.
pub fn ddt_log_det_fd(t: C64, mp: &MonodromyParams, numerics: &Numerics, delta: f64) -> Result<C64> {
    check_t(t)?;
    let l0 = fredholm_det(t, mp, numerics, false)?.log_det;
    let lp = log_near(fredholm_det(t + delta, mp, numerics, false)?.det, l0);
    let lm = log_near(fredholm_det(t - delta, mp, numerics, false)?.det, l0);
    Ok((lp - lm) / (2.0 * delta))
}

/// Base point of [`logtau_from_base`]: on the positive real axis where `det ≈ 1`.
pub const BASE_POINT: C64 = C64 { re: 5.0, im: 0.0 };

/// `log τ(t) − log τ(5)` along the straight segment from the base point.
pub fn logtau_from_base(t: C64, mp: &MonodromyParams, numerics: &Numerics, tol: f64) -> Result<PathIntegral> {
    logtau_path(BASE_POINT, t, mp, numerics, tol)
}

/// Result of integrating `∂_t log τ` along a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathIntegral {
    /// `log τ(t₁) − log τ(t₀)`.
    pub value: C64,
    /// Number of `∂_t log τ` evaluations.
    pub evaluations: usize,
    /// Smallest `|det|` met along the path.
    pub min_abs_det: f64,
}

/// `|det|` below which a path is considered to cross the divisor.
pub const PATH_DET_THRESHOLD: f64 = 1e-6;

/// `log τ(t₁) − log τ(t₀)` by adaptive Gauss–Legendre quadrature of `∂_t log τ`
/// along the straight segment.
pub fn logtau_path(t0: C64, t1: C64, mp: &MonodromyParams, numerics: &Numerics, tol: f64) -> Result<PathIntegral> {
    let mut f = |t: C64| -> Result<(C64, f64)> {
        let d = dlogtau_with(t, mp, numerics, false)?;
        Ok((d.total, d.det.norm()))
    };
    integrate_path(&mut f, t0, t1, tol)
}

/// Adaptive path integration of a generic `t ↦ (value, |det|)` map.
pub fn integrate_path<F>(f: &mut F, t0: C64, t1: C64, tol: f64) -> Result<PathIntegral>
where
    F: FnMut(C64) -> Result<(C64, f64)>,
{
    let mut out = PathIntegral { value: C64::new(0.0, 0.0), evaluations: 0, min_abs_det: f64::INFINITY };
    if t0 == t1 {
        return Ok(out);
    }
    let rule = gauss_legendre(8);
    let mut seg = |a: C64, b: C64, out: &mut PathIntegral| -> Result<C64> {
        let mut err = None;
        let v = gauss_segment(a, b, &rule, |t| match f(t) {
            Ok((v, ad)) => {
                out.evaluations += 1;
                out.min_abs_det = out.min_abs_det.min(ad);
                if ad < PATH_DET_THRESHOLD && err.is_none() {
                    err = Some(Error::PathCrossesDivisor { t, abs_det: ad });
                }
                v
            }
            Err(Error::DivisorProximity(ad)) => {
                err.get_or_insert(Error::PathCrossesDivisor { t, abs_det: ad });
                C64::new(f64::NAN, 0.0)
            }
            Err(e) => {
                err.get_or_insert(e);
                C64::new(f64::NAN, 0.0)
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    // Iterative bisection on a stack, processed left to right for determinism.
    let whole = seg(t0, t1, &mut out)?;
    let mut stack = vec![(t0, t1, whole, 0u32)];
    let mut total = C64::new(0.0, 0.0);
    while let Some((a, b, v, depth)) = stack.pop() {
        let m = (a + b) * 0.5;
        let l = seg(a, m, &mut out)?;
        let r = seg(m, b, &mut out)?;
        let share = tol * ((b - a).norm() / (t1 - t0).norm());
        if (l + r - v).norm() <= share.max(1e-15) || depth >= 12 {
            total += l + r;
        } else {
            stack.push((m, b, r, depth + 1));
            stack.push((a, m, l, depth + 1));
        }
    }
    out.value = total;
    Ok(out)
}

/// A confirmed or candidate zero of the determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivisorHit {
    pub t_root: C64,
    pub abs_det: f64,
    /// Winding number of `det` around a small square enclosing the root.
    pub winding: i64,
    /// `|det|` at the final iterate.
    pub residual: f64,
    pub iterations: usize,
}

/// Half-side of the confirmation square, relative to `max(1, |t|)`.
pub const CONFIRM_HALF_SIDE: f64 = 1e-2;

/// Winding number of `f` around the square of half-side `r` centered at `c`,
/// sampled at 20 points per side.
pub fn square_winding<F: Fn(C64) -> Result<C64> + Sync>(f: &F, c: C64, r: f64) -> Result<i64> {
    let corners = [C64::new(r, -r), C64::new(r, r), C64::new(-r, r), C64::new(-r, -r)];
    let pts: Vec<C64> = (0..4)
        .flat_map(|s| {
            let a = corners[(s + 3) % 4];
            let b = corners[s];
            (0..20).map(move |k| c + a + (b - a) * (k as f64 / 20.0))
        })
        .collect();
    let vals: Vec<C64> = pts.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for k in 0..vals.len() {
        let a = vals[k];
        let b = vals[(k + 1) % vals.len()];
        total += (b / a).arg();
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Newton iteration on `f` from `guess` (finite-difference derivative), then
/// argument-principle confirmation.
pub fn refine_zero_with<F: Fn(C64) -> Result<C64> + Sync>(f: &F, guess: C64) -> Result<DivisorHit> {
    let mut t = guess;
    let mut v = f(t)?;
    if !(v.norm() < 0.5) {
        return Err(Error::NotConverged(format!("|det({guess})| = {} is not below 0.5", v.norm())));
    }
    let mut trace = vec![t];
    let mut iterations = 0;
    while v.norm() >= 1e-10 {
        if iterations == 30 {
            return Err(Error::NotConverged(format!("Newton iterates {trace:?}, last |det| = {:e}", v.norm())));
        }
        let h = 1e-6 * t.norm().max(1.0);
        let d = (f(t + h)? - f(t - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::NotConverged(format!("vanishing derivative at {t}")));
        }
        let step = v / d;
        t -= step;
        v = f(t)?;
        iterations += 1;
        trace.push(t);
        if step.norm() < 1e-15 * t.norm().max(1.0) {
            break;
        }
    }
    let winding = square_winding(f, t, CONFIRM_HALF_SIDE * t.norm().max(1.0))?;
    Ok(DivisorHit { t_root: t, abs_det: v.norm(), winding, residual: v.norm(), iterations })
}

/// [`refine_zero_with`] on the Fredholm determinant of the Painlevé II data.
pub fn refine_zero(guess: C64, mp: &MonodromyParams, numerics: &Numerics) -> Result<DivisorHit> {
    let f = |t: C64| -> Result<C64> { Ok(fredholm_det(t, mp, numerics, false)?.det) };
    refine_zero_with(&f, guess)
}

/// Rectangle `[re0, re1] × [im0, im1]` in the `t`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let v = [self.re0, self.re1, self.im0, self.im1];
        if v.iter().any(|x| !x.is_finite()) || self.re0 > self.re1 || self.im0 > self.im1 {
            return Err(Error::InvalidArgument(format!("bad region {self:?}")));
        }
        if self.re0 <= 0.0 && 0.0 <= self.re1 && self.im0 <= 0.0 && 0.0 <= self.im1 {
            return Err(Error::InvalidArgument("region contains t = 0".into()));
        }
        Ok(())
    }

    /// Grid points in row-major order (imaginary part outer, real part inner).
    /// The edges of the rectangle are hit exactly.
    pub fn grid(&self, nx: usize, ny: usize) -> Vec<C64> {
        let axis = |a: f64, b: f64, n: usize| -> Vec<f64> {
            match n {
                0 => vec![],
                1 => vec![0.5 * (a + b)],
                _ => (0..n)
                    .map(|k| {
                        let s = k as f64 / (n - 1) as f64;
                        a * (1.0 - s) + b * s
                    })
                    .collect(),
            }
        };
        let xs = axis(self.re0, self.re1, nx);
        let ys = axis(self.im0, self.im1, ny);
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| C64::new(x, y))).collect()
    }
}

/// One grid evaluation of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub t: C64,
    /// `None` when the evaluation failed (see `error`).
    pub det: Option<C64>,
    pub error: Option<String>,
}

/// Grid values and refined hits of a divisor scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub samples: Vec<GridSample>,
    pub hits: Vec<DivisorHit>,
}

/// Evaluate `f` on the grid (in parallel, results in grid order).
pub fn scan_grid<F: Fn(C64) -> Result<C64> + Sync>(f: &F, region: &Region, nx: usize, ny: usize) -> Result<Vec<GridSample>> {
    region.validate()?;
    Ok(region
        .grid(nx, ny)
        .par_iter()
        .map(|&t| match f(t) {
            Ok(d) => GridSample { t, det: Some(d), error: None },
            Err(e) => GridSample { t, det: None, error: Some(e.to_string()) },
        })
        .collect())
}

/// Candidate starting points: centers of cells around which `det` winds and
/// grid points that are local minima of `|det|` below 1/2.
pub fn candidates(samples: &[GridSample], nx: usize, ny: usize) -> Vec<C64> {
    let at = |i: usize, j: usize| samples[j * nx + i].det;
    let mut out = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let ring = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            if let [Some(a), Some(b), Some(c), Some(d)] = ring {
                let w: f64 = [(a, b), (b, c), (c, d), (d, a)].iter().map(|(p, q)| (q / p).arg()).sum();
                if (w / (2.0 * PI)).round() != 0.0 {
                    out.push((samples[j * nx + i].t + samples[(j + 1) * nx + i + 1].t) * 0.5);
                }
            }
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            let Some(v) = at(i, j) else { continue };
            if v.norm() >= 0.5 {
                continue;
            }
            let mut is_min = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                    continue;
                }
                if let Some(w) = at(a as usize, b as usize) {
                    if w.norm() < v.norm() {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push(samples[j * nx + i].t);
            }
        }
    }
    out
}

/// Scan `f` over the grid, refine candidates and keep confirmed, distinct hits.
pub fn divisor_scan_with<F: Fn(C64) -> Result<C64> + Sync>(f: &F, region: &Region, nx: usize, ny: usize) -> Result<ScanResult> {
    let samples = scan_grid(f, region, nx, ny)?;
    let cands = candidates(&samples, nx, ny);
    let refined: Vec<Option<DivisorHit>> = cands.par_iter().map(|&c| refine_zero_with(f, c).ok()).collect();
    let mut hits: Vec<DivisorHit> = Vec::new();
    for h in refined.into_iter().flatten() {
        if h.winding < 1 {
            continue;
        }
        if hits.iter().any(|k| (k.t_root - h.t_root).norm() < 1e-6 * h.t_root.norm().max(1.0)) {
            continue;
        }
        hits.push(h);
    }
    Ok(ScanResult { samples, hits })
}

/// [`divisor_scan_with`] on the Fredholm determinant of the Painlevé II data.
pub fn divisor_scan(region: &Region, nx: usize, ny: usize, mp: &MonodromyParams, numerics: &Numerics) -> Result<ScanResult> {
    let f = |t: C64| -> Result<C64> { Ok(fredholm_det(t, mp, numerics, false)?.det) };
    divisor_scan_with(&f, region, nx, ny)
}
