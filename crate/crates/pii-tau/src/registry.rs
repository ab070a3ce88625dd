//! Registry of the identities the numerics must satisfy, each with a fixed RNG
//! seed, a tolerance and a generator of admissible inputs. Run by `selftest`.
//!
//! Cases marked *advisory* are measured and reported like every other case
//! but do not decide the overall verdict; they record properties that the
//! present discretization does not reach (see the README).

use crate::cauchy::{phi_factor, Numerics, Side, StripSamples};
use crate::corrections::{self, verify_sector_integrals};
use crate::error::Result;
use crate::fredholm::{
    assemble_from_samples, blocks_from_samples, block_matrix, det_via_traces, fredholm_det, log_det,
    off_diagonal_blocks, rank_one_operator, KernelVariant,
};
use crate::geometry::{maps_unchecked, theta, zeta};
use crate::jump::{
    jump_product, jump_sample, model_stokes_h, model_z, parametrix_l, parametrix_l4, parametrix_r, parametrix_r0,
    sector_jump_g, JumpEntries, Matrix2,
};
use crate::monodromy::{params_from_pair, MonodromyParams};
use crate::specialfn::{gamma_complex, pcf_d, pcf_d_prime};
use crate::tau::{dlogtau, refine_zero_with};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A measured residual over a number of random samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measure {
    pub residual: f64,
    pub samples: usize,
}

type Check = fn(&mut ChaCha8Rng) -> Result<Measure>;

/// One identity of the registry.
#[derive(Clone, Copy)]
pub struct IdentityCase {
    pub name: &'static str,
    /// The identity in mathematical notation.
    pub statement: &'static str,
    pub tolerance: f64,
    pub seed: u64,
    pub advisory: bool,
    pub check: Check,
}

/// Outcome of one identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub statement: String,
    pub tolerance: f64,
    pub residual: f64,
    pub samples: usize,
    pub passed: bool,
    pub advisory: bool,
    pub error: Option<String>,
}

/// Overall verdict: every non-advisory case passed.
pub fn all_required_pass(results: &[IdentityResult]) -> bool {
    results.iter().all(|r| r.passed || r.advisory)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn in_disc(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    let rho = r * rng.random::<f64>().sqrt();
    C64::from_polar(rho, rng.random_range(-PI..PI))
}

/// Random admissible Stokes pair with derived parameters.
pub fn random_params(rng: &mut ChaCha8Rng) -> MonodromyParams {
    loop {
        let s1 = in_disc(rng, 2.0);
        let s3 = in_disc(rng, 2.0);
        if let Ok(mp) = params_from_pair(s1, s3) {
            if mp.nu.norm() < 1.0 {
                return mp;
            }
        }
    }
}

fn reference_params() -> MonodromyParams {
    params_from_pair(c(0.0, 2.0), c(0.0, 1.0)).expect("reference Stokes data are admissible")
}

/// The values of `t` used by the jump-matrix suites, `|t| ∈ [0.5, 3]`.
pub const JUMP_TIMES: [C64; 5] = [
    C64 { re: 0.5, im: 0.0 },
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 1.0, im: 0.5 },
    C64 { re: 2.0, im: 0.0 },
    C64 { re: 3.0, im: 0.0 },
];

fn rel(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1e-300)
}

fn max_of<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn fd4<F: Fn(C64) -> C64>(f: F, z: C64, h: f64) -> C64 {
    (f(z - 2.0 * h) - 8.0 * f(z - h) + 8.0 * f(z + h) - f(z + 2.0 * h)) / (12.0 * h)
}

fn entries_close(a: &JumpEntries, b: &JumpEntries) -> f64 {
    max_of([(a.a - b.a).norm(), (a.b - b.b).norm(), (a.c - b.c).norm(), (a.d - b.d).norm()])
}

// ---------------------------------------------------------------- special functions

fn gamma_reflection(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let z = in_disc(rng, 4.0);
        if (z - z.re.round()).norm() < 0.05 {
            continue;
        }
        let v = gamma_complex(z)? * gamma_complex(1.0 - z)? * (PI * z).sin();
        worst = worst.max(rel(v, C64::from(PI), PI));
        n += 1;
    }
    Ok(Measure { residual: worst, samples: n })
}

fn pcf_sample(rng: &mut ChaCha8Rng) -> (C64, C64) {
    (in_disc(rng, 2.0), in_disc(rng, 8.0))
}

fn pcf_recurrence(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..200).map(|_| {
        let (nu, z) = pcf_sample(rng);
        let (a, b, d) = (pcf_d(nu + 1.0, z), z * pcf_d(nu, z), nu * pcf_d(nu - 1.0, z));
        (a - b + d).norm() / max_of([a.norm(), b.norm(), d.norm()])
    }));
    Ok(Measure { residual: worst, samples: 200 })
}

fn pcf_derivative(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..200).map(|_| {
        let (nu, z) = pcf_sample(rng);
        let d = fd4(|x| pcf_d(nu, x), z, 1e-3);
        let (a, b) = (0.5 * z * pcf_d(nu, z), nu * pcf_d(nu - 1.0, z));
        (a + d - b).norm() / max_of([a.norm(), b.norm(), d.norm()])
    }));
    Ok(Measure { residual: worst, samples: 200 })
}

fn pcf_ode(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let h = 5e-3;
    let worst = max_of((0..200).map(|_| {
        let (nu, z) = pcf_sample(rng);
        let y = |x: C64| pcf_d(nu, x);
        let ypp = (16.0 * (y(z + h) + y(z - h)) - (y(z + 2.0 * h) + y(z - 2.0 * h)) - 30.0 * y(z)) / (12.0 * h * h);
        let q = (nu + 0.5 - 0.25 * z * z) * y(z);
        (ypp + q).norm() / max_of([ypp.norm(), q.norm()])
    }));
    Ok(Measure { residual: worst, samples: 200 })
}

fn pcf_ode_analytic(rng: &mut ChaCha8Rng) -> Result<Measure> {
    // D''_ν from the derivative identity applied twice, i.e. through D_ν, D_{ν−1}, D_{ν−2}.
    let worst = max_of((0..200).map(|_| {
        let (nu, z) = pcf_sample(rng);
        let (d0, d1, d2) = (pcf_d(nu, z), pcf_d(nu - 1.0, z), pcf_d(nu - 2.0, z));
        let terms = [
            nu * (nu - 1.0) * d2,
            -nu * z * d1,
            (0.25 * z * z - 0.5) * d0,
            (nu + 0.5 - 0.25 * z * z) * d0,
        ];
        let sum: C64 = terms.iter().sum();
        sum.norm() / max_of(terms.iter().map(|t| t.norm()))
    }));
    Ok(Measure { residual: worst, samples: 200 })
}

fn pcf_wronskian(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..200).map(|_| {
        let (nu, z) = pcf_sample(rng);
        let (f, fp) = (pcf_d(-nu - 1.0, I * z), I * pcf_d_prime(-nu - 1.0, I * z));
        let (g, gp) = (pcf_d(nu, z), pcf_d_prime(nu, z));
        let w = f * gp - g * fp;
        let want = I * (-I * PI * nu * 0.5).exp();
        (w - want).norm() / max_of([want.norm(), (f * gp).norm(), (g * fp).norm()])
    }));
    Ok(Measure { residual: worst, samples: 200 })
}

fn model_symmetry(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let s3 = Matrix2::diag(c(1.0, 0.0), c(-1.0, 0.0));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mp = random_params(rng);
        let zeta = in_disc(rng, 3.0);
        let tail = Matrix2::sigma3_pow((-I * PI * (mp.nu + 1.0)).exp());
        for k in 0..=2 {
            let lhs = s3 * model_z(k + 2, -zeta, &mp)? * s3;
            let rhs = model_z(k, zeta, &mp)? * tail;
            worst = worst.max((lhs - rhs).max_abs() / rhs.max_abs());
        }
    }
    Ok(Measure { residual: worst, samples: 60 })
}

// ---------------------------------------------------------------- monodromy

fn stokes_constraint(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..100).map(|_| random_params(rng).stokes.constraint_residual()));
    Ok(Measure { residual: worst, samples: 100 })
}

fn monodromy_identity(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..100).map(|_| random_params(rng).monodromy_residual()));
    Ok(Measure { residual: worst, samples: 100 })
}

fn nu_noninteger(rng: &mut ChaCha8Rng) -> Result<Measure> {
    // Residual: 1e-8 / distance to the nearest integer (< 1 means the bound holds).
    let worst = max_of((0..100).map(|_| {
        let nu = random_params(rng).nu;
        1e-8 / (nu - nu.re.round()).norm()
    }));
    Ok(Measure { residual: worst, samples: 100 })
}

fn model_jumps_close(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mp = random_params(rng);
        let mut p = model_stokes_h(4, &mp)?;
        for k in 0..4 {
            p = p * model_stokes_h(k, &mp)?;
        }
        worst = worst.max((p - Matrix2::identity()).max_abs());
    }
    Ok(Measure { residual: worst, samples: 100 })
}

// ---------------------------------------------------------------- geometry

fn strip_point(rng: &mut ChaCha8Rng) -> C64 {
    c(rng.random_range(-0.3..0.3), rng.random_range(-4.0..4.0))
}

fn random_t(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.random_range(0.5..3.0), rng.random_range(-0.5..0.5))
}

fn phase_relations(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let worst = max_of((0..100).map(|_| {
        let (z, t) = (strip_point(rng), random_t(rng));
        let p = maps_unchecked(z, t);
        let th = theta(z);
        let a = I * p.zeta * p.zeta / (4.0 * t) - 1.0 / 3.0;
        let b = -I * p.xi * p.xi / (4.0 * t) + 1.0 / 3.0;
        max_of([rel(a, th, 1.0 + th.norm()), rel(b, th, 1.0 + th.norm())])
    }));
    Ok(Measure { residual: worst, samples: 100 })
}

fn zeta_reflection(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let bad = (0..100)
        .filter(|_| {
            let (z, t) = (strip_point(rng), random_t(rng));
            maps_unchecked(z, t).xi != zeta(-z, t)
        })
        .count();
    Ok(Measure { residual: bad as f64, samples: 100 })
}

fn zeta_continuity(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t = random_t(rng);
        let x = rng.random_range(-0.3..0.3);
        let pts: Vec<C64> = (0..=4000).map(|k| zeta(c(x, -20.0 + 0.01 * k as f64), t)).collect();
        worst = worst.max(max_of(pts.windows(2).map(|w| (w[1] / w[0]).arg().abs())));
    }
    Ok(Measure { residual: worst, samples: 10 })
}

// ---------------------------------------------------------------- jump

fn axis_points(rng: &mut ChaCha8Rng) -> Vec<C64> {
    (0..50).map(|_| c(0.0, rng.random_range(-8.0..8.0))).collect()
}

fn jump_unimodular(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let pts = axis_points(rng);
    let worst = max_of(JUMP_TIMES.iter().flat_map(|&t| pts.iter().map(move |&z| (jump_sample(z, t, &mp).e.det() - 1.0).norm())));
    Ok(Measure { residual: worst, samples: 250 })
}

fn jump_reflection(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let pts = axis_points(rng);
    let bad = JUMP_TIMES
        .iter()
        .flat_map(|&t| pts.iter().map(move |&z| (z, t)))
        .filter(|&(z, t)| jump_sample(z, t, &mp).e.c != jump_sample(-z, t, &mp).e.b)
        .count();
    Ok(Measure { residual: bad as f64, samples: 250 })
}

fn jump_closed_forms(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let pts = axis_points(rng);
    let mut worst: f64 = 0.0;
    for &t in &JUMP_TIMES {
        for &z in &pts {
            let e = jump_sample(z, t, &mp).e.matrix();
            worst = worst.max((e - jump_product(z, t, &mp)?).max_abs());
        }
    }
    Ok(Measure { residual: worst, samples: 250 })
}

fn no_monodromy(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let pts = axis_points(rng);
    let mut worst: f64 = 0.0;
    for &t in &JUMP_TIMES {
        for &z in &pts {
            let a = parametrix_r0(z, t, &mp)?.value * parametrix_l4(z, t, &mp)?.value.inv();
            let b = parametrix_r(4, z, t, &mp)?.value * parametrix_l(0, z, t, &mp)?.value.inv();
            worst = worst.max((a - b).max_abs() / a.max_abs());
        }
    }
    Ok(Measure { residual: worst, samples: 250 })
}

fn left_parametrix_symmetry(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for &t in &JUMP_TIMES {
        for _ in 0..10 {
            let z = strip_point(rng);
            let l = parametrix_l4(z, t, &mp)?.value;
            let r = parametrix_r(4, -z, t, &mp)?.value.sigma2_conj();
            worst = worst.max((l - r).max_abs() / l.max_abs());
        }
    }
    Ok(Measure { residual: worst, samples: 50 })
}

fn jump_decay(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let worst = max_of(JUMP_TIMES.iter().flat_map(|&t| {
        let mp = &mp;
        [20.0, -20.0].map(move |y| (jump_sample(c(0.0, y), t, mp).e.matrix() - Matrix2::identity()).max_abs())
    }));
    Ok(Measure { residual: worst, samples: 10 })
}

fn triangularity(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut bad = 0;
    for _ in 0..50 {
        let mp = random_params(rng);
        let (z, t) = (strip_point(rng), random_t(rng));
        for k in 0..4 {
            let g = sector_jump_g(k, z, t, &mp)?;
            let zero = if k % 2 == 0 { g.a12 } else { g.a21 };
            bad += usize::from(zero != c(0.0, 0.0));
        }
        let hd = sector_jump_g(4, z, t, &mp)?;
        bad += usize::from(hd.a12 != c(0.0, 0.0) || hd.a21 != c(0.0, 0.0));
    }
    Ok(Measure { residual: bad as f64, samples: 250 })
}

fn h_sign(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mp = random_params(rng);
        let (z, t) = (strip_point(rng), random_t(rng));
        let a = jump_sample(z, t, &mp);
        let b = jump_sample(z, t, &mp.with_flipped_h());
        worst = worst.max(entries_close(&a.e, &b.e)).max(entries_close(&a.dz, &b.dz)).max(entries_close(&a.dt, &b.dt));
    }
    Ok(Measure { residual: worst, samples: 50 })
}

fn derivatives_fd(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let (z, t) = (strip_point(rng), random_t(rng));
        let s = jump_sample(z, t, &mp);
        let e = |z, t| jump_sample(z, t, &mp).e;
        let (zp, zm) = (e(z + h, t), e(z - h, t));
        let (tp, tm) = (e(z, t + h), e(z, t - h));
        let pick = |x: &JumpEntries| [x.a, x.b, x.c, x.d];
        let scale = 1.0 + max_of(pick(&s.e).map(|v| v.norm()));
        for k in 0..4 {
            let fz = (pick(&zp)[k] - pick(&zm)[k]) / (2.0 * h);
            let ft = (pick(&tp)[k] - pick(&tm)[k]) / (2.0 * h);
            worst = worst.max(rel(fz, pick(&s.dz)[k], scale)).max(rel(ft, pick(&s.dt)[k], scale));
        }
        let p = parametrix_r0(z, t, &mp)?;
        let fz = (parametrix_r0(z + h, t, &mp)?.value - parametrix_r0(z - h, t, &mp)?.value).scale(c(0.5 / h, 0.0));
        let ft = (parametrix_r0(z, t + h, &mp)?.value - parametrix_r0(z, t - h, &mp)?.value).scale(c(0.5 / h, 0.0));
        let ps = 1.0 + p.value.max_abs();
        worst = worst.max((fz - p.dz).max_abs() / ps).max((ft - p.dt).max_abs() / ps);
    }
    Ok(Measure { residual: worst, samples: 30 })
}

// ---------------------------------------------------------------- scalar factor

fn phi_node_doubling(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let pts = [c(0.3, 0.5), c(-0.3, -1.2), c(0.25, 2.0)];
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let coarse = Numerics::default().with_nodes(128).contour(0.0)?;
        let fine = Numerics::default().with_nodes(256).contour(0.0)?;
        for &z in &pts {
            let a = phi_factor(t, &mp, &coarse, z, Side::Off)?;
            let b = phi_factor(t, &mp, &fine, z, Side::Off)?;
            worst = worst.max((a - b).norm());
        }
    }
    Ok(Measure { residual: worst, samples: 9 })
}

fn phi_eps_robust(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0)] {
        let vals: Vec<(Vec<C64>, Vec<C64>)> = [0.05, 0.1, 0.2]
            .iter()
            .map(|&eps| {
                let s = StripSamples::sample(&mp, t, &Numerics::default().with_eps(eps))?;
                Ok((s.log_phi_plus(), s.log_phi_minus()))
            })
            .collect::<Result<_>>()?;
        for v in &vals[1..] {
            for j in 0..v.0.len() {
                worst = worst.max((v.0[j].exp() - vals[0].0[j].exp()).norm());
                worst = worst.max((v.1[j].exp() - vals[0].1[j].exp()).norm());
            }
        }
    }
    Ok(Measure { residual: worst, samples: 2 })
}

fn plemelj(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for &t in &[c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let s = StripSamples::sample(&mp, t, &Numerics::default())?;
        let (p, m) = (s.log_phi_plus(), s.log_phi_minus());
        worst = worst.max(max_of((0..p.len()).map(|j| (p[j] - m[j] - s.log_a_mid[j]).norm())));
    }
    Ok(Measure { residual: worst, samples: 3 })
}

// ---------------------------------------------------------------- determinant

fn det_at(t: C64, num: &Numerics) -> Result<C64> {
    Ok(fredholm_det(t, &reference_params(), num, false)?.det)
}

fn det_eps_invariance(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let base = det_at(t, &Numerics::default().with_eps(0.1))?;
        for eps in [0.05, 0.2] {
            worst = worst.max((det_at(t, &Numerics::default().with_eps(eps))? - base).norm());
        }
    }
    Ok(Measure { residual: worst, samples: 3 })
}

/// `|det(n) − det(2n)|` for `n = 64, 128, 256` at `t = 2`.
pub fn node_doubling_differences(t: C64) -> Result<[f64; 2]> {
    let d: Vec<C64> = [64, 128, 256].iter().map(|&n| det_at(t, &Numerics::default().with_nodes(n))).collect::<Result<_>>()?;
    Ok([(d[1] - d[0]).norm(), (d[2] - d[1]).norm()])
}

fn det_node_doubling(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    // Residual: contraction ratio of successive differences (floored at 1e-12).
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0)] {
        let [d1, d2] = node_doubling_differences(t)?;
        worst = worst.max(d2.max(1e-13) / d1.max(1e-12));
    }
    Ok(Measure { residual: worst, samples: 2 })
}

/// `|det − 1|` at `t = 2` and `t = 8` on the positive real axis.
pub fn large_t_decay() -> Result<(f64, f64)> {
    Ok(((det_at(c(2.0, 0.0), &Numerics::default())? - 1.0).norm(), (det_at(c(8.0, 0.0), &Numerics::default())? - 1.0).norm()))
}

fn det_large_t(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    // Residual: |det(8) − 1| / |det(2) − 1|, tolerance 1/10.
    let (a, b) = large_t_decay()?;
    Ok(Measure { residual: b / a, samples: 2 })
}

fn fg_disjoint(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let strip = StripSamples::sample(&reference_params(), c(2.0, 0.0), &Numerics::default().with_nodes(64))?;
    let (k31, k13) = off_diagonal_blocks(&strip);
    let big = block_matrix(&k31, &k13);
    let n = k31.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..2 * n {
        for j in 0..2 * n {
            if (i < n) == (j < n) {
                let want = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((big[(i, j)] - want).norm());
            }
        }
    }
    Ok(Measure { residual: worst, samples: 1 })
}

fn rank_one(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let k = crate::cauchy::build_sinh_contour(200, 1.0, 0.0)?;
    let f: Vec<C64> = k.nodes.iter().map(|z| 0.6 / (I * PI) / (1.0 - z * z)).collect();
    let g: Vec<C64> = k.nodes.iter().map(|z| 1.0 / (1.0 - z * z)).collect();
    let op = rank_one_operator(&k, &f, &g, c(1.0, 0.0));
    let d = log_det(&op).det;
    let tr = det_via_traces(&op, 60)?.det;
    Ok(Measure { residual: (d - 0.7).norm().max((tr - 0.7).norm()), samples: 1 })
}

fn det_trace_route(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for t in [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)] {
        let strip = StripSamples::sample(&reference_params(), t, &Numerics::default())?;
        let op = assemble_from_samples(&strip, KernelVariant::LeftShift);
        if op.norm_estimate >= 0.3 {
            continue;
        }
        used += 1;
        let tr = det_via_traces(&op, 80)?;
        worst = worst.max((tr.det - log_det(&op).det).norm());
    }
    Ok(Measure { residual: worst, samples: used })
}

fn det_kernel_variants(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(1.0, 0.5)] {
        let strip = StripSamples::sample(&reference_params(), t, &Numerics::default())?;
        let a = log_det(&assemble_from_samples(&strip, KernelVariant::LeftShift)).det;
        let b = log_det(&assemble_from_samples(&strip, KernelVariant::RightShift)).det;
        worst = worst.max((a - b).norm());
    }
    Ok(Measure { residual: worst, samples: 3 })
}

fn det_schur(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let strip = StripSamples::sample(&reference_params(), t, &Numerics::default())?;
        let b = blocks_from_samples(&strip);
        worst = worst.max((b.block - b.composed).norm() / b.block.norm());
    }
    Ok(Measure { residual: worst, samples: 3 })
}

fn det_block_vs_single(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let strip = StripSamples::sample(&reference_params(), t, &Numerics::default())?;
        let b = blocks_from_samples(&strip);
        let s = log_det(&assemble_from_samples(&strip, KernelVariant::LeftShift)).det;
        worst = worst.max((b.block - s).norm());
    }
    Ok(Measure { residual: worst, samples: 3 })
}

// ---------------------------------------------------------------- corrections

fn trace_two_ways(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let z = c(0.0, rng.random_range(-6.0..6.0));
        let t = JUMP_TIMES[rng.random_range(0..JUMP_TIMES.len())];
        let a = corrections::f_tilde_integrand(z, t, &mp)?;
        let b = corrections::f_tilde_via_jump(z, t, &mp)?;
        // Entry sum Σ_{ij} P_ij X_ji with P = Φ_R⁻¹Φ_R′, X = Φ_L⁻¹Φ̇_L − Φ_R⁻¹Φ̇_R.
        let r = parametrix_r0(z, t, &mp)?;
        let l = parametrix_l4(z, t, &mp)?;
        let p = (r.value.inv() * r.dz).entries();
        let x = (l.value.inv() * l.dt - r.value.inv() * r.dt).entries();
        let e = p[0] * x[0] + p[1] * x[2] + p[2] * x[1] + p[3] * x[3];
        let scale = 1e-3 + a.norm();
        worst = worst.max(rel(a, b, scale)).max(rel(a, e, scale));
    }
    Ok(Measure { residual: worst, samples: 30 })
}

fn corrections_stability(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for t in [c(0.5, 0.0), c(2.0, 0.0), c(3.0, 0.0)] {
        let base = corrections::calf(t, &mp, &Numerics::default())?;
        let eps = corrections::calf(t, &mp, &Numerics::default().with_eps(0.2))?;
        worst = worst.max(base.est_error).max((eps.total - base.total).norm());
    }
    Ok(Measure { residual: worst, samples: 3 })
}

fn sector_check() -> Result<crate::corrections::SectorCheck> {
    verify_sector_integrals(c(2.0, 0.0), &reference_params(), 10.0)
}

fn sector_closed_form(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let s = sector_check()?;
    Ok(Measure { residual: (s.value - s.stated).norm(), samples: 1 })
}

fn sector_value(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let s = sector_check()?;
    let (nu, t) = (reference_params().nu, c(2.0, 0.0));
    let want = 2.0 * I * nu / 3.0 + nu * nu / (2.0 * t);
    Ok(Measure { residual: (s.value - want).norm(), samples: 1 })
}

// ---------------------------------------------------------------- tau

const TAU_TIMES: [C64; 3] = [C64 { re: 0.5, im: 0.0 }, C64 { re: 2.0, im: 0.0 }, C64 { re: 3.0, im: 0.0 }];

fn tau_trace_vs_fd(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for &t in &TAU_TIMES {
        let d = dlogtau(t, &reference_params(), &Numerics::default())?;
        worst = worst.max((d.ddt_log_det - d.ddt_log_det_fd).norm());
    }
    Ok(Measure { residual: worst, samples: TAU_TIMES.len() })
}

fn tau_aggregation(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for &t in &TAU_TIMES {
        let d = dlogtau(t, &reference_params(), &Numerics::default())?;
        worst = worst.max(d.aggregation_residual());
        if !(d.closed_form.is_finite() && d.calf.is_finite()) {
            worst = f64::INFINITY;
        }
    }
    Ok(Measure { residual: worst, samples: TAU_TIMES.len() })
}

fn tau_stability(_rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mp = reference_params();
    let mut worst: f64 = 0.0;
    for &t in &TAU_TIMES {
        let d = dlogtau(t, &mp, &Numerics::default())?;
        let e = dlogtau(t, &mp, &Numerics::default().with_eps(0.2))?;
        let n = dlogtau(t, &mp, &Numerics::default().with_nodes(400))?;
        for (a, b) in [(d.ddt_log_det, e.ddt_log_det), (d.calf, e.calf), (d.total, e.total), (d.ddt_log_det, n.ddt_log_det), (d.calf, n.calf), (d.total, n.total)] {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(Measure { residual: worst, samples: TAU_TIMES.len() })
}

fn synthetic_zero(rng: &mut ChaCha8Rng) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t0 = c(rng.random_range(0.5..3.0), rng.random_range(-2.0..2.0));
        let f = move |t: C64| -> Result<C64> { Ok((t - t0) * (0.2 * t).exp()) };
        let guess = t0 + in_disc(rng, 0.05);
        let h = refine_zero_with(&f, guess)?;
        worst = worst.max((h.t_root - t0).norm());
        if h.winding != 1 {
            worst = f64::INFINITY;
        }
    }
    Ok(Measure { residual: worst, samples: 10 })
}

macro_rules! case {
    ($name:literal, $stmt:literal, $tol:expr, $seed:expr, $check:expr) => {
        IdentityCase { name: $name, statement: $stmt, tolerance: $tol, seed: $seed, advisory: false, check: $check }
    };
    ($name:literal, $stmt:literal, $tol:expr, $seed:expr, $check:expr, advisory) => {
        IdentityCase { name: $name, statement: $stmt, tolerance: $tol, seed: $seed, advisory: true, check: $check }
    };
}

/// Every registered identity, in a fixed order.
pub fn cases() -> Vec<IdentityCase> {
    vec![
        case!("gamma_reflection", "Γ(z)Γ(1−z)sin(πz) = π", 1e-10, 11, gamma_reflection),
        case!("pcf_recurrence", "D_{ν+1}(z) − zD_ν(z) + νD_{ν−1}(z) = 0", 1e-9, 12, pcf_recurrence),
        case!("pcf_derivative", "(z/2)D_ν(z) + D'_ν(z) = νD_{ν−1}(z)", 1e-9, 13, pcf_derivative),
        case!("pcf_ode", "D''_ν + (ν + 1/2 − z²/4)D_ν = 0", 1e-6, 14, pcf_ode),
        case!("pcf_ode_analytic", "D''_ν + (ν + 1/2 − z²/4)D_ν = 0 with D''_ν from the derivative identity", 1e-9, 17, pcf_ode_analytic),
        case!("pcf_wronskian", "D_{−ν−1}(iz)∂D_ν(z) − D_ν(z)∂D_{−ν−1}(iz) = i e^{−iπν/2}", 1e-9, 15, pcf_wronskian),
        case!("model_symmetry", "σ₃Z_{k+2}(−ζ)σ₃ = Z_k(ζ)e^{−iπ(ν+1)σ₃}", 1e-9, 16, model_symmetry),
        case!("stokes_constraint", "s₁ − s₂ + s₃ + s₁s₂s₃ = 0", 1e-12, 21, stokes_constraint),
        case!("monodromy_identity", "1 + h₀h₁ = e^{2πiν}", 1e-10, 22, monodromy_identity),
        case!("nu_noninteger", "|ν − round ν| > 1e−8 (residual 1e−8/dist)", 1.0, 23, nu_noninteger),
        case!("model_jumps_close", "e^{2πiνσ₃}H₀H₁H₂H₃ = I", 1e-12, 24, model_jumps_close),
        case!("phase_relations", "θ = iζ²/(4t) − 1/3 = −iξ²/(4t) + 1/3", 1e-12, 31, phase_relations),
        case!("zeta_reflection", "ξ(z) = ζ(−z) bit for bit (residual: mismatches)", 0.5, 32, zeta_reflection),
        case!("zeta_continuity", "|Δ arg ζ| < π/2 between neighbouring points of iℝ + x", PI / 2.0, 33, zeta_continuity),
        case!("jump_unimodular", "det J = AD − BC = 1 on iℝ", 1e-8, 41, jump_unimodular),
        case!("jump_reflection", "C(z) = B(−z) bit for bit (residual: mismatches)", 0.5, 42, jump_reflection),
        case!("jump_closed_forms", "[[A,B],[C,D]] = Φ_R^{(0)}(Φ_L^{(4)})⁻¹", 1e-8, 43, jump_closed_forms),
        case!("no_monodromy", "Φ_R^{(0)}(Φ_L^{(4)})⁻¹ = Φ_R^{(4)}(Φ_L^{(0)})⁻¹", 1e-8, 44, no_monodromy),
        case!("left_parametrix_symmetry", "Φ_L^{(4)}(z) = σ₂Φ_R^{(4)}(−z)σ₂", 1e-9, 45, left_parametrix_symmetry),
        case!("sector_triangularity", "G^{(k)} lower (k even) / upper (k odd) triangular, G^{(4)} diagonal", 0.5, 46, triangularity),
        case!("h_sign_unobservable", "J and its derivatives invariant under h → −h", 0.0, 47, h_sign),
        case!("jump_derivatives", "∂_z, ∂_t of A, B, C, D and Φ_R^{(0)} match central differences", 1e-6, 48, derivatives_fd),
        case!("jump_decay", "‖J(iy) − I‖ < 1e−3 at |y| = 20", 1e-3, 49, jump_decay, advisory),
        case!("phi_node_doubling", "φ at fixed points changes < 1e−8 from n = 128 to 256", 1e-8, 51, phi_node_doubling),
        case!("phi_eps_robust", "φ± on iℝ agree for ε ∈ {0.05, 0.1, 0.2}", 1e-6, 52, phi_eps_robust),
        case!("plemelj", "log φ₊ − log φ₋ = log A on iℝ", 1e-7, 53, plemelj),
        case!("det_eps_invariance", "det(I − M) independent of ε ∈ [0.05, 0.2]", 1e-6, 61, det_eps_invariance),
        case!("det_node_doubling", "|det(4n) − det(2n)| ≤ ½|det(2n) − det(n)|, n = 64 (residual: ratio)", 0.5, 62, det_node_doubling),
        case!("det_large_t", "|det − 1| at t = 8 ≤ |det − 1| at t = 2 / 10 (residual: ratio)", 0.1, 63, det_large_t, advisory),
        case!("fg_disjoint", "fᵀg = 0: diagonal blocks of the two-contour kernel vanish", 0.0, 64, fg_disjoint),
        case!("rank_one_determinant", "det(I − f⊗g) = 1 − ∫fg = 0.7", 1e-10, 65, rank_one),
        case!("det_trace_route", "log det(I − M) = −Σ tr Mᵐ/m for ‖M‖ < 0.3", 1e-6, 66, det_trace_route),
        case!("det_kernel_variants", "left- and right-shifted kernels give the same determinant", 1e-8, 67, det_kernel_variants),
        case!("det_schur", "block determinant = det(I − K₃₁K₁₃)", 1e-8, 68, det_schur),
        case!("det_block_vs_single", "block determinant = single-contour determinant", 1e-6, 69, det_block_vs_single, advisory),
        case!("trace_two_ways", "Tr[Φ_R⁻¹Φ_R′X] by 2×2 algebra, entry sum and −Tr[Φ_R′Φ_R⁻¹J̇J⁻¹]", 1e-9, 71, trace_two_ways),
        case!("corrections_stability", "𝓕 stable under n → 2n and ε → 2ε", 1e-6, 72, corrections_stability),
        case!("sector_closed_form", "sector integrals = 2iν/3 + ν²/t at (2i, i, t = 2)", 1e-4, 73, sector_closed_form, advisory),
        case!("sector_integral_value", "sector integrals = 2iν/3 + ν²/(2t) at (2i, i, t = 2)", 1e-8, 74, sector_value),
        case!("tau_trace_vs_fd", "−tr[(I − M)⁻¹∂_tM] = ∂_t log det by differences", 1e-6, 81, tau_trace_vs_fd),
        case!("tau_aggregation", "total = ∂_t log det − (4iν/3 + 2ν²/t) + 𝓕, all terms finite", 0.0, 82, tau_aggregation),
        case!("tau_stability", "∂_t log τ components stable under ε → 2ε and n → 2n", 1e-5, 83, tau_stability),
        case!("synthetic_zero", "Newton + argument principle recover an injected simple zero", 1e-8, 91, synthetic_zero),
    ]
}

fn run_case(case: &IdentityCase) -> IdentityResult {
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let (residual, samples, error) = match (case.check)(&mut rng) {
        Ok(m) => (m.residual, m.samples, None),
        Err(e) => (f64::NAN, 0, Some(e.to_string())),
    };
    IdentityResult {
        name: case.name.to_string(),
        statement: case.statement.to_string(),
        tolerance: case.tolerance,
        residual,
        samples,
        passed: error.is_none() && residual <= case.tolerance,
        advisory: case.advisory,
        error,
    }
}

/// Run every case whose name contains `filter` (all when `None`), in registry order.
pub fn run_registry(filter: Option<&str>) -> Vec<IdentityResult> {
    let selected: Vec<IdentityCase> = cases().into_iter().filter(|c| filter.is_none_or(|f| c.name.contains(f))).collect();
    selected.par_iter().map(run_case).collect()
}

/// Run the case with exactly this name.
pub fn run_named(name: &str) -> Option<IdentityResult> {
    cases().iter().find(|c| c.name == name).map(run_case)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<&str> = cases().iter().map(|c| c.name).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    /// Every module invariant has exactly one registry case, and nothing else
    /// is registered.
    #[test]
    fn coverage_audit() {
        const EXPECTED: [&str; 43] = [
            // specialfn
            "gamma_reflection", "pcf_recurrence", "pcf_derivative", "pcf_ode", "pcf_ode_analytic", "pcf_wronskian", "model_symmetry",
            // monodromy
            "stokes_constraint", "monodromy_identity", "nu_noninteger", "model_jumps_close",
            // geometry
            "phase_relations", "zeta_reflection", "zeta_continuity",
            // jump
            "jump_unimodular", "jump_reflection", "jump_closed_forms", "no_monodromy", "left_parametrix_symmetry",
            "sector_triangularity", "h_sign_unobservable", "jump_derivatives", "jump_decay",
            // cauchy
            "phi_node_doubling", "phi_eps_robust", "plemelj",
            // fredholm
            "det_eps_invariance", "det_node_doubling", "det_large_t", "fg_disjoint", "rank_one_determinant",
            "det_trace_route", "det_kernel_variants", "det_schur", "det_block_vs_single",
            // corrections
            "trace_two_ways", "corrections_stability", "sector_closed_form", "sector_integral_value",
            // tau
            "tau_trace_vs_fd", "tau_aggregation", "tau_stability", "synthetic_zero",
        ];
        let mut registered: Vec<&str> = cases().iter().map(|c| c.name).collect();
        let mut expected = EXPECTED.to_vec();
        registered.sort();
        expected.sort();
        assert_eq!(registered, expected);
    }

    #[test]
    fn seeds_are_unique() {
        let mut seeds: Vec<u64> = cases().iter().map(|c| c.seed).collect();
        let n = seeds.len();
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), n);
    }

    #[test]
    fn filter_selects_single_suite() {
        let r = run_registry(Some("wronskian"));
        assert_eq!(r.len(), 1);
        assert!(r[0].passed, "{r:?}");
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = run_registry(Some("pcf_recurrence"));
        let b = run_registry(Some("pcf_recurrence"));
        assert_eq!(a[0].residual.to_bits(), b[0].residual.to_bits());
    }
}
