//! Nyström discretization of the integrable kernel on `iℝ`, log-determinants,
//! and two independent determinant routes used as cross-checks.
//!
//! The default kernel ([`KernelVariant::LeftShift`]) is
//! `K(z, w) = (C/A)(z) φ₋(w)⁻² ∫_{iℝ−ε} b(u) du / ((z − u)(u − w)(2πi)²)`
//! with `b = (B/A) φ²` on `iℝ − ε`. Writing the inner integral as the divided
//! difference `(C_b(w) − C_b(z)) / (2πi (z − w))` of the Cauchy transform `C_b`
//! removes the near-singularity at `u ≈ z, w`; the diagonal is the limit
//! `−C_b'(z)/2πi`. The mirror variant ([`KernelVariant::RightShift`]) exchanges
//! the roles of `B` and `C`, of `φ₊` and `φ₋`, and of the lines `iℝ ∓ ε`.

use crate::cauchy::{cauchy_at_nodes, Contour, Numerics, StripSamples};
use crate::error::{Error, Result};
use crate::jump::{JumpModel, JumpSample};
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Which of the two equivalent kernel forms to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVariant {
    /// Inner line `iℝ − ε`, weight `φ₋⁻²`, density `(B/A) φ²`.
    #[default]
    LeftShift,
    /// Inner line `iℝ + ε`, weight `φ₊²`, density `(C/A) φ⁻²`.
    RightShift,
}

/// Dense Nyström matrix `M_ij = K(z_i, z_j) w_j` on the contour `iℝ`.
#[derive(Debug, Clone)]
pub struct NystromOperator {
    pub matrix: DMatrix<C64>,
    pub contour: Contour,
    pub t: C64,
    pub eps: f64,
    pub variant: KernelVariant,
    /// Nodes of the inner (shifted) quadrature.
    pub inner_nodes: usize,
    /// Power-iteration estimate of the spectral norm of `matrix`.
    pub norm_estimate: f64,
}

/// `log det(I − M)` together with `det`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetResult {
    pub log_det: C64,
    pub det: C64,
    pub n_nodes: usize,
    /// `|det(n) − det(2n)|` when requested, otherwise `NaN`.
    pub est_error: f64,
}

/// Determinant from the truncated trace expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceDet {
    pub log_det: C64,
    pub det: C64,
    /// Bound on the discarded tail of the logarithm.
    pub tail_bound: f64,
}

/// Determinants of the `2×2` block operator on `iℝ+ε ∪ iℝ−ε` and of its
/// composed (Schur complement) form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockDet {
    pub block: C64,
    pub composed: C64,
}

/// `D^{1/2} M D^{−1/2}` with `D = diag|w_j|`: the similar matrix whose
/// Euclidean norms approximate the `L²` operator norms of the kernel.
pub fn balanced(m: &DMatrix<C64>, weights: &[C64]) -> DMatrix<C64> {
    let s: Vec<f64> = weights.iter().map(|w| w.norm().sqrt()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (s[i] / s[j]))
}

/// Spectral-norm estimate by power iteration on `MᴴM` from a fixed start vector.
pub fn norm_estimate(m: &DMatrix<C64>) -> f64 {
    let n = m.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = nalgebra::DVector::<C64>::from_fn(n, |k, _| C64::new(1.0 + 0.1 * (k % 7) as f64, 0.0));
    let mut est = 0.0;
    for _ in 0..60 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        v /= C64::from(nv);
        let w = m * &v;
        let new = w.norm();
        v = m.adjoint() * w;
        if (new - est).abs() <= 1e-10 * new {
            return new;
        }
        est = new;
    }
    est
}

/// Nyström operator from precomputed node values: `M_ij = f(z_i) g(z_j) inner_ij w_j`.
fn operator_from_parts(
    strip: &StripSamples,
    variant: KernelVariant,
    left_factor: &[C64],
    right_factor: &[C64],
    transform: &[C64],
    transform_d: &[C64],
) -> NystromOperator {
    let c = &strip.mid;
    let n = c.n_nodes;
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let inner = if i == j {
                        -transform_d[i] / (2.0 * PI * I)
                    } else {
                        (transform[j] - transform[i]) / (2.0 * PI * I * (c.nodes[i] - c.nodes[j]))
                    };
                    left_factor[i] * right_factor[j] * inner * c.weights[j]
                })
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let norm = norm_estimate(&balanced(&matrix, &c.weights));
    NystromOperator {
        matrix,
        contour: c.clone(),
        t: strip.t,
        eps: strip.right.shift,
        variant,
        inner_nodes: n,
        norm_estimate: norm,
    }
}

fn ratio(s: &JumpSample, num: fn(&JumpSample) -> (C64, C64)) -> (C64, C64) {
    let (v, dv) = num(s);
    let a = s.e.a;
    (v / a, (dv * a - v * s.dz.a) / (a * a))
}

fn entry_b(s: &JumpSample) -> (C64, C64) {
    (s.e.b, s.dz.b)
}

fn entry_c(s: &JumpSample) -> (C64, C64) {
    (s.e.c, s.dz.c)
}

/// Density `r φ^{2σ}` and its derivative from `r = B/A` or `C/A`, `log φ` and `(log φ)'`.
fn dressed(samples: &[JumpSample], num: fn(&JumpSample) -> (C64, C64), lphi: &[C64], dlphi: &[C64], sigma: f64) -> (Vec<C64>, Vec<C64>) {
    samples
        .iter()
        .zip(lphi)
        .zip(dlphi)
        .map(|((s, &l), &dl)| {
            let (r, dr) = ratio(s, num);
            let w = (2.0 * sigma * l).exp();
            (r * w, (dr + 2.0 * sigma * r * dl) * w)
        })
        .unzip()
}

/// Assemble the Nyström operator from sampled strip data.
pub fn assemble_from_samples(strip: &StripSamples, variant: KernelVariant) -> NystromOperator {
    let mid = &strip.on_mid;
    match variant {
        KernelVariant::LeftShift => {
            let lp_left = strip.log_phi_on_left();
            let dlp_left = strip.dlog_phi_on_left();
            let lpp = strip.log_phi_plus();
            let dlpp = strip.dlog_phi_plus();
            let lpm = strip.log_phi_minus();
            let (b_l, db_l) = dressed(&strip.on_left, entry_b, &lp_left, &dlp_left, 1.0);
            let (b_m, db_m) = dressed(mid, entry_b, &lpp, &dlpp, 1.0);
            let cb = cauchy_at_nodes(&strip.left, &b_l, &strip.mid, &b_m);
            let dcb = cauchy_at_nodes(&strip.left, &db_l, &strip.mid, &db_m);
            let f: Vec<C64> = mid.iter().map(|s| s.e.c / s.e.a).collect();
            let g: Vec<C64> = lpm.iter().map(|l| (-2.0 * l).exp()).collect();
            operator_from_parts(strip, variant, &f, &g, &cb, &dcb)
        }
        KernelVariant::RightShift => {
            let lp_right = strip.log_phi_on_right();
            let dlp_right = strip.dlog_phi_on_right();
            let lpm = strip.log_phi_minus();
            let dlpm = strip.dlog_phi_minus();
            let lpp = strip.log_phi_plus();
            let (c_r, dc_r) = dressed(&strip.on_right, entry_c, &lp_right, &dlp_right, -1.0);
            let (c_m, dc_m) = dressed(mid, entry_c, &lpm, &dlpm, -1.0);
            let cc = cauchy_at_nodes(&strip.right, &c_r, &strip.mid, &c_m);
            let dcc = cauchy_at_nodes(&strip.right, &dc_r, &strip.mid, &dc_m);
            let f: Vec<C64> = mid.iter().map(|s| s.e.b / s.e.a).collect();
            let g: Vec<C64> = lpp.iter().map(|l| (2.0 * l).exp()).collect();
            operator_from_parts(strip, variant, &f, &g, &cc, &dcc)
        }
    }
}

/// Sample the jump model and assemble the Nyström operator at `t`.
pub fn assemble_kernel<M: JumpModel + ?Sized>(t: C64, model: &M, numerics: &Numerics) -> Result<NystromOperator> {
    let strip = StripSamples::sample(model, t, numerics)?;
    let op = assemble_from_samples(&strip, numerics.variant);
    if op.matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(format!("non-finite kernel entries at t = {t}")));
    }
    Ok(op)
}

/// Operator with a separable kernel `f(z) g(w)` on a contour (test hook).
pub fn rank_one_operator(contour: &Contour, f: &[C64], g: &[C64], t: C64) -> NystromOperator {
    let n = contour.n_nodes;
    let matrix = DMatrix::from_fn(n, n, |i, j| f[i] * g[j] * contour.weights[j]);
    let norm = norm_estimate(&balanced(&matrix, &contour.weights));
    NystromOperator {
        matrix,
        contour: contour.clone(),
        t,
        eps: 0.0,
        variant: KernelVariant::LeftShift,
        inner_nodes: 0,
        norm_estimate: norm,
    }
}

/// `log det(X)` by partial-pivoting LU: the sum of the logs of the pivots
/// (plus `iπ` for an odd permutation). The imaginary part is a continuous
/// accumulation of pivot phases and is not reduced to `(−π, π]`.
pub fn log_det_of(x: DMatrix<C64>) -> (C64, C64) {
    let lu = x.lu();
    let u = lu.u();
    let mut log = C64::new(0.0, 0.0);
    for k in 0..u.nrows() {
        let p = u[(k, k)];
        if p == C64::new(0.0, 0.0) || !p.is_finite() {
            return (C64::new(f64::NEG_INFINITY, 0.0), C64::new(0.0, 0.0));
        }
        log += p.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        log += I * PI;
    }
    (log, log.exp())
}

/// `log det(I − M)`; an exactly singular matrix gives `det = 0`, `log_det = −∞`.
pub fn log_det(op: &NystromOperator) -> DetResult {
    let n = op.matrix.nrows();
    let (log_det, det) = log_det_of(DMatrix::identity(n, n) - &op.matrix);
    DetResult { log_det, det, n_nodes: n, est_error: f64::NAN }
}

/// `det(I − K)` at `t`; with `estimate_error` the value at `2n` nodes is also
/// computed and `est_error = |det(n) − det(2n)|`.
pub fn fredholm_det<M: JumpModel + ?Sized>(t: C64, model: &M, numerics: &Numerics, estimate_error: bool) -> Result<DetResult> {
    let mut d = log_det(&assemble_kernel(t, model, numerics)?);
    if estimate_error {
        let fine = log_det(&assemble_kernel(t, model, &numerics.with_nodes(2 * numerics.n_nodes))?);
        d.est_error = (fine.det - d.det).norm();
    }
    Ok(d)
}

/// `log det(I − M) = −Σ_{m ≤ n_max} tr(M^m)/m`, requiring a norm estimate below 1/2.
pub fn det_via_traces(op: &NystromOperator, n_max: usize) -> Result<TraceDet> {
    let r = op.norm_estimate;
    if !(r < 0.5) {
        return Err(Error::NormTooLarge(r));
    }
    let m1 = balanced(&op.matrix, &op.contour.weights);
    let fro = m1.norm();
    let mut power = m1.clone();
    let mut log = C64::new(0.0, 0.0);
    for m in 1..=n_max.max(1) {
        log -= power.trace() / m as f64;
        if m < n_max {
            power = &power * &m1;
        }
    }
    // |tr M^m| ≤ ‖M‖_F² ‖M‖^{m−2} for m ≥ 2.
    let tail: f64 = (n_max + 1..n_max + 200).map(|m| fro * fro * r.powi(m as i32 - 2) / m as f64).sum();
    Ok(TraceDet { log_det: log, det: log.exp(), tail_bound: tail })
}

/// Naive Nyström discretization of the block operator on `l₁ = iℝ+ε`,
/// `l₃ = iℝ−ε`: `K₃₁ f(z) = −c(z) ∫_{l₃} f(u)/(z − u) du/2πi`, `c = (C/A)φ⁻²`,
/// and `K₁₃ f(u) = −b(u) ∫_{l₁} f(z)/(u − z) dz/2πi`, `b = (B/A)φ²`.
pub fn det_via_blocks<M: JumpModel + ?Sized>(t: C64, model: &M, numerics: &Numerics) -> Result<BlockDet> {
    let strip = StripSamples::sample(model, t, numerics)?;
    Ok(blocks_from_samples(&strip))
}

/// [`det_via_blocks`] on already sampled data.
pub fn blocks_from_samples(strip: &StripSamples) -> BlockDet {
    let (k31, k13) = off_diagonal_blocks(strip);
    let n = k31.nrows();
    let (_, block) = log_det_of(block_matrix(&k31, &k13));
    let (_, composed) = log_det_of(DMatrix::identity(n, n) - &k31 * &k13);
    BlockDet { block, composed }
}

/// Discretized off-diagonal blocks `K₃₁` (from `iℝ − ε` to `iℝ + ε`) and `K₁₃`
/// of the two-contour operator.
pub fn off_diagonal_blocks(strip: &StripSamples) -> (DMatrix<C64>, DMatrix<C64>) {
    let lp_r = strip.log_phi_on_right();
    let lp_l = strip.log_phi_on_left();
    let c_r: Vec<C64> = strip.on_right.iter().zip(&lp_r).map(|(s, l)| s.e.c / s.e.a * (-2.0 * l).exp()).collect();
    let b_l: Vec<C64> = strip.on_left.iter().zip(&lp_l).map(|(s, l)| s.e.b / s.e.a * (2.0 * l).exp()).collect();
    let (l1, l3) = (&strip.right, &strip.left);
    let n = l1.n_nodes;
    let k31 = DMatrix::from_fn(n, n, |i, k| -c_r[i] / (2.0 * PI * I * (l1.nodes[i] - l3.nodes[k])) * l3.weights[k]);
    let k13 = DMatrix::from_fn(n, n, |k, i| -b_l[k] / (2.0 * PI * I * (l3.nodes[k] - l1.nodes[i])) * l1.weights[i]);
    (k31, k13)
}

/// `I − K` for the two-contour operator. The vectors `f, g` of the integrable
/// kernel have disjoint supports, so the diagonal blocks of `K` vanish identically.
pub fn block_matrix(k31: &DMatrix<C64>, k13: &DMatrix<C64>) -> DMatrix<C64> {
    let n = k31.nrows();
    let mut big = DMatrix::<C64>::identity(2 * n, 2 * n);
    big.view_mut((0, n), (n, n)).copy_from(&(-k31));
    big.view_mut((n, 0), (n, n)).copy_from(&(-k13));
    big
}
