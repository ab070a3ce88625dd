//! Parametrices, Stokes matrices and the jump on the imaginary axis.
//!
//! All parabolic cylinder functions enter through the scaled functions
//! `E_μ(x) = e^{x²/4} D_μ(x)`; the Gaussian factors are absorbed exactly by the
//! phase `e^{itθ}` through `itθ = −ζ²/4 − it/3`, so every entry below is a
//! product of powers of `W = ζm` (or `V = ξ/m`), a pure phase `e^{ict}` and
//! scaled functions. Derivatives in `z` and `t` follow by the chain rule using
//! `E'_μ = μ E_{μ−1}`.

use crate::error::{Error, Result};
use crate::geometry::{map_derivatives, maps_unchecked, theta, MapDerivatives, PhasePoint};
use crate::monodromy::{MonodromyParams, StokesData};
use crate::specialfn::{pcf_d, pcf_d_prime, pcf_e};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// A 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

impl Matrix2 {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Self::diag(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::diag(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    pub fn diag(a: C64, b: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(a, z, z, b)
    }

    /// `a^{σ₃} = diag(a, 1/a)`.
    pub fn sigma3_pow(a: C64) -> Self {
        Self::diag(a, 1.0 / a)
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    /// Adjugate; equals the inverse for unimodular matrices.
    pub fn adj(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inv(&self) -> Self {
        self.adj().scale(1.0 / self.det())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// `σ₂ X σ₂`.
    pub fn sigma2_conj(&self) -> Self {
        Self::new(self.a22, -self.a21, -self.a12, self.a11)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.a11.norm().max(self.a12.norm()).max(self.a21.norm()).max(self.a22.norm())
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, b: Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * b.a11 + self.a12 * b.a21,
            self.a11 * b.a12 + self.a12 * b.a22,
            self.a21 * b.a11 + self.a22 * b.a21,
            self.a21 * b.a12 + self.a22 * b.a22,
        )
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, b: Matrix2) -> Matrix2 {
        Matrix2::new(self.a11 + b.a11, self.a12 + b.a12, self.a21 + b.a21, self.a22 + b.a22)
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, b: Matrix2) -> Matrix2 {
        Matrix2::new(self.a11 - b.a11, self.a12 - b.a12, self.a21 - b.a21, self.a22 - b.a22)
    }
}

/// Stokes matrix `S_k`, `k = 1..=6`: lower triangular for odd `k`, upper for even.
pub fn stokes_matrix(k: i64, z: C64, t: C64, sd: &StokesData) -> Result<Matrix2> {
    let s = sd.s(k)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let e = (2.0 * I * t * theta(z)).exp();
    Ok(if k % 2 == 1 {
        Matrix2::new(one, zero, s * e, one)
    } else {
        Matrix2::new(one, s / e, zero, one)
    })
}

/// Model-problem jump `H_k` for `k = 0..=3`; `k = 4` returns `H_D = e^{2πiνσ₃}`.
pub fn model_stokes_h(k: i64, mp: &MonodromyParams) -> Result<Matrix2> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match k {
        0 => Ok(Matrix2::new(one, zero, mp.h0, one)),
        1 => Ok(Matrix2::new(one, mp.h1, zero, one)),
        2 | 3 => {
            let c = Matrix2::sigma3_pow((I * PI * (mp.nu + 0.5)).exp());
            Ok(c * model_stokes_h(k - 2, mp)? * c.inv())
        }
        4 => Ok(Matrix2::sigma3_pow((2.0 * PI * I * mp.nu).exp())),
        _ => Err(Error::Index { what: "model jump H_k", index: k }),
    }
}

/// Sector jump `G^{(k)} = e^{−itθσ₃} h^{−σ₃} H_k h^{σ₃} e^{itθσ₃}`, `k = 0..=4`.
pub fn sector_jump_g(k: i64, z: C64, t: C64, mp: &MonodromyParams) -> Result<Matrix2> {
    let h = model_stokes_h(k, mp)?;
    // P H P⁻¹ with P = diag(p, 1/p), p = e^{−itθ}/h; only p² = e^{−2itθ}/h² matters.
    // Zero entries stay exactly zero even when the exponential under- or overflows.
    let e = 2.0 * I * t * theta(z);
    let up = |x: C64| if x == C64::new(0.0, 0.0) { x } else { x * (-e).exp() / mp.h_sq };
    let lo = |x: C64| if x == C64::new(0.0, 0.0) { x } else { x * e.exp() * mp.h_sq };
    Ok(Matrix2::new(h.a11, up(h.a12), lo(h.a21), h.a22))
}

/// Model-problem solution in the zeroth sector,
/// `Z₀(ζ) = 2^{−σ₃/2} [[D_{−ν−1}(iζ), D_ν(ζ)], [∂_ζ D_{−ν−1}(iζ), ∂_ζ D_ν(ζ)]] diag(e^{iπ(ν+1)/2}, 1)`.
/// Its entries are entire in `ζ`.
pub fn model_z0(zeta: C64, nu: C64) -> Matrix2 {
    let iz = I * zeta;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let ph = (I * PI * (nu + 1.0) * 0.5).exp();
    Matrix2::new(
        r * pcf_d(-nu - 1.0, iz) * ph,
        r * pcf_d(nu, zeta),
        2f64.sqrt() * I * pcf_d_prime(-nu - 1.0, iz) * ph,
        2f64.sqrt() * pcf_d_prime(nu, zeta),
    )
}

/// Sector solution `Z_k = Z₀ H₀ ⋯ H_{k−1}`, `k = 0..=4`, continued analytically
/// to any `ζ`.
pub fn model_z(k: i64, zeta: C64, mp: &MonodromyParams) -> Result<Matrix2> {
    if !(0..=4).contains(&k) {
        return Err(Error::Index { what: "model sector", index: k });
    }
    let mut z = model_z0(zeta, mp.nu);
    for j in 0..k {
        z = z * model_stokes_h(j, mp)?;
    }
    Ok(z)
}

/// A matrix-valued function with its `z`- and `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parametrix {
    pub value: Matrix2,
    pub dz: Matrix2,
    pub dt: Matrix2,
}

/// Lazily evaluated scaled parabolic cylinder values at rotations of one base point.
struct PcfBank {
    x: C64,
    items: Vec<(C64, C64, C64)>,
}

impl PcfBank {
    fn new(x: C64) -> Self {
        Self { x, items: Vec::with_capacity(8) }
    }

    fn get(&mut self, mu: C64, rot: C64) -> C64 {
        if let Some(&(_, _, v)) = self.items.iter().find(|(m, r, _)| *m == mu && *r == rot) {
            return v;
        }
        let v = pcf_e(mu, rot * self.x);
        self.items.push((mu, rot, v));
        v
    }

    /// `(E_μ(rot·x), E'_μ(rot·x))`.
    fn pair(&mut self, mu: C64, rot: C64) -> (C64, C64) {
        (self.get(mu, rot), mu * self.get(mu - 1.0, rot))
    }
}

/// Base data of one variable (`ζ` with `log W`, or `ξ` with `log V`).
#[derive(Clone, Copy)]
struct Base {
    x: C64,
    dx_dz: C64,
    dx_dt: C64,
    l: C64,
    l_z: C64,
    l_t: C64,
}

fn zeta_base(p: &PhasePoint, d: &MapDerivatives) -> Base {
    Base { x: p.zeta, dx_dz: d.dzeta_dz, dx_dt: d.dzeta_dt, l: p.log_w, l_z: d.dlogw_dz, l_t: d.dlog_dt }
}

fn xi_base(p: &PhasePoint, d: &MapDerivatives) -> Base {
    Base { x: p.xi, dx_dz: d.dxi_dz, dx_dt: d.dxi_dt, l: p.log_v, l_z: d.dlogv_dz, l_t: d.dlog_dt }
}

/// Entry of the form `coef · e^{pw·L + i·tc·t} · E_μ(rot·x)`.
#[derive(Clone, Copy)]
struct Single {
    coef: C64,
    pw: C64,
    tc: f64,
    mu: C64,
    rot: C64,
}

fn eval_single(s: &Single, b: &Base, t: C64, bank: &mut PcfBank) -> (C64, C64, C64) {
    let pre = s.coef * (s.pw * b.l + I * s.tc * t).exp();
    let (e0, e1) = bank.pair(s.mu, s.rot);
    let v = pre * e0;
    let vz = pre * (s.pw * b.l_z * e0 + e1 * s.rot * b.dx_dz);
    let vt = pre * ((s.pw * b.l_t + I * s.tc) * e0 + e1 * s.rot * b.dx_dt);
    (v, vz, vt)
}

/// Column constants `(c₁, p₁, c₂, q₂)` of the model solution in sector `k`:
/// first column `c₁ D_{−ν−1}(p₁ζ)`, second column `c₂ D_ν(q₂ζ)`.
fn sector_constants(k: i64, nu: C64) -> Result<(C64, C64, C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let a = I * PI * (nu + 1.0) * 0.5;
    let (c1, p1) = match k {
        0 => (a.exp(), I),
        1 | 2 => ((-a).exp(), -I),
        3 | 4 => ((-3.0 * a).exp(), I),
        _ => return Err(Error::Index { what: "parametrix sector", index: k }),
    };
    let (c2, q2) = match k {
        0 | 1 => (one, one),
        2 | 3 => ((I * PI * nu).exp(), -one),
        _ => ((2.0 * PI * I * nu).exp(), one),
    };
    Ok((c1, p1, c2, q2))
}

fn sector_entries(k: i64, mp: &MonodromyParams) -> Result<[Single; 4]> {
    let nu = mp.nu;
    let (c1, p1, c2, q2) = sector_constants(k, nu)?;
    Ok([
        Single { coef: -c1 * p1, pw: nu, tc: 0.0, mu: -nu, rot: p1 },
        Single { coef: nu / mp.h_sq * c2 * q2, pw: nu, tc: 2.0 / 3.0, mu: nu - 1.0, rot: q2 },
        Single { coef: mp.h_sq * c1, pw: -nu, tc: -2.0 / 3.0, mu: -nu - 1.0, rot: p1 },
        Single { coef: c2, pw: -nu, tc: 0.0, mu: nu, rot: q2 },
    ])
}

fn assemble(vals: [(C64, C64, C64); 4]) -> Parametrix {
    Parametrix {
        value: Matrix2::new(vals[0].0, vals[1].0, vals[2].0, vals[3].0),
        dz: Matrix2::new(vals[0].1, vals[1].1, vals[2].1, vals[3].1),
        dt: Matrix2::new(vals[0].2, vals[1].2, vals[2].2, vals[3].2),
    }
}

fn check_t(t: C64) -> Result<()> {
    if t.norm() == 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t} is not admissible (t ≠ 0 required)")));
    }
    Ok(())
}

/// Right parametrix `Φ_R^{(k)}(z, t)` in sector `k = 0..=4` with derivatives.
pub fn parametrix_r(k: i64, z: C64, t: C64, mp: &MonodromyParams) -> Result<Parametrix> {
    check_t(t)?;
    let entries = sector_entries(k, mp)?;
    let p = maps_unchecked(z, t);
    let d = map_derivatives(&p);
    let b = zeta_base(&p, &d);
    let mut bank = PcfBank::new(b.x);
    Ok(assemble(entries.map(|e| eval_single(&e, &b, t, &mut bank))))
}

/// Left parametrix `Φ_L^{(k)}(z) = σ₂ Φ_R^{(k)}(−z) σ₂` with derivatives.
pub fn parametrix_l(k: i64, z: C64, t: C64, mp: &MonodromyParams) -> Result<Parametrix> {
    check_t(t)?;
    let e = sector_entries(k, mp)?;
    let p = maps_unchecked(z, t);
    let d = map_derivatives(&p);
    let b = xi_base(&p, &d);
    let mut bank = PcfBank::new(b.x);
    let v = e.map(|s| eval_single(&s, &b, t, &mut bank));
    let neg = |x: (C64, C64, C64)| (-x.0, -x.1, -x.2);
    // σ₂ [[a, b], [c, d]] σ₂ = [[d, −c], [−b, a]]
    Ok(assemble([v[3], neg(v[2]), neg(v[1]), v[0]]))
}

/// `Φ_R^{(0)}`, the right parametrix in the zeroth sector.
pub fn parametrix_r0(z: C64, t: C64, mp: &MonodromyParams) -> Result<Parametrix> {
    parametrix_r(0, z, t, mp)
}

/// `Φ_L^{(4)}`, the left parametrix in the fourth sector.
pub fn parametrix_l4(z: C64, t: C64, mp: &MonodromyParams) -> Result<Parametrix> {
    parametrix_l(4, z, t, mp)
}

/// The entries of the jump `J = [[A, B], [C, D]]` on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEntries {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl JumpEntries {
    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn matrix(&self) -> Matrix2 {
        Matrix2::new(self.a, self.b, self.c, self.d)
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }
}

/// Jump entries with their `z`- and `t`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSample {
    pub e: JumpEntries,
    pub dz: JumpEntries,
    pub dt: JumpEntries,
}

/// Source of jump data on the imaginary-axis strip. Implemented by
/// [`MonodromyParams`] (the Painlevé II jump) and by synthetic models in tests.
pub trait JumpModel: Sync {
    /// Entries and derivatives at `(z, t)`.
    fn sample(&self, z: C64, t: C64) -> JumpSample;
}

/// Product term `coef · e^{p_w log W + p_v log V + i·tc·t} · E_{μ₁}(r₁ζ) E_{μ₂}(r₂ξ)`.
#[derive(Clone, Copy)]
struct Pair {
    coef: C64,
    pw: C64,
    pv: C64,
    tc: f64,
    mu1: C64,
    r1: C64,
    mu2: C64,
    r2: C64,
}

fn eval_pair(
    s: &Pair,
    b1: &Base,
    b2: &Base,
    t: C64,
    k1: &mut PcfBank,
    k2: &mut PcfBank,
) -> (C64, C64, C64) {
    let pre = s.coef * (s.pw * b1.l + s.pv * b2.l + I * s.tc * t).exp();
    let (e1, e1p) = k1.pair(s.mu1, s.r1);
    let (e2, e2p) = k2.pair(s.mu2, s.r2);
    let v = pre * e1 * e2;
    let vz = pre
        * ((s.pw * b1.l_z + s.pv * b2.l_z) * e1 * e2
            + e1p * s.r1 * b1.dx_dz * e2
            + e1 * e2p * s.r2 * b2.dx_dz);
    let vt = pre
        * ((s.pw * b1.l_t + s.pv * b2.l_t + I * s.tc) * e1 * e2
            + e1p * s.r1 * b1.dx_dt * e2
            + e1 * e2p * s.r2 * b2.dx_dt);
    (v, vz, vt)
}

struct EntryTerms {
    a: [Pair; 2],
    b: [Pair; 2],
    d: [Pair; 2],
}

fn entry_terms(mp: &MonodromyParams) -> EntryTerms {
    let nu = mp.nu;
    let hs = mp.h_sq;
    let em = (-I * PI * nu).exp();
    let e2 = (2.0 * PI * I * nu).exp();
    let one = C64::new(1.0, 0.0);
    let p = |coef, pw, pv, tc, mu1, r1, mu2, r2| Pair { coef, pw, pv, tc, mu1, r1, mu2, r2 };
    EntryTerms {
        a: [
            p(em, nu, nu, 0.0, -nu, I, -nu, I),
            p(nu * nu / (hs * hs) * e2, nu, nu, 4.0 / 3.0, nu - 1.0, one, nu - 1.0, one),
        ],
        b: [
            p(I * hs * em, nu, -nu, -2.0 / 3.0, -nu, I, -nu - 1.0, I),
            p(nu / hs * e2, nu, -nu, 2.0 / 3.0, nu - 1.0, one, nu, one),
        ],
        d: [
            p(-hs * hs * em, -nu, -nu, -4.0 / 3.0, -nu - 1.0, I, -nu - 1.0, I),
            p(e2, -nu, -nu, 0.0, nu, one, nu, one),
        ],
    }
}

fn sum2(
    terms: &[Pair; 2],
    b1: &Base,
    b2: &Base,
    t: C64,
    k1: &mut PcfBank,
    k2: &mut PcfBank,
) -> (C64, C64, C64) {
    let x = eval_pair(&terms[0], b1, b2, t, k1, k2);
    let y = eval_pair(&terms[1], b1, b2, t, k1, k2);
    (x.0 + y.0, x.1 + y.1, x.2 + y.2)
}

/// Closed-form jump entries `A, B, C, D` with derivatives; `C` is evaluated
/// through the code path of `B` with `ζ ↔ ξ`, `W ↔ V` exchanged, so that
/// `C(z) = B(−z)` holds bit for bit.
pub fn jump_sample(z: C64, t: C64, mp: &MonodromyParams) -> JumpSample {
    let terms = entry_terms(mp);
    let p = maps_unchecked(z, t);
    let d = map_derivatives(&p);
    let bz = zeta_base(&p, &d);
    let bx = xi_base(&p, &d);
    let mut kz = PcfBank::new(bz.x);
    let mut kx = PcfBank::new(bx.x);
    let a = sum2(&terms.a, &bz, &bx, t, &mut kz, &mut kx);
    let b = sum2(&terms.b, &bz, &bx, t, &mut kz, &mut kx);
    let c = sum2(&terms.b, &bx, &bz, t, &mut kx, &mut kz);
    let dd = sum2(&terms.d, &bz, &bx, t, &mut kz, &mut kx);
    JumpSample {
        e: JumpEntries { a: a.0, b: b.0, c: c.0, d: dd.0 },
        dz: JumpEntries { a: a.1, b: b.1, c: c.1, d: dd.1 },
        dt: JumpEntries { a: a.2, b: b.2, c: c.2, d: dd.2 },
    }
}

/// Closed-form jump entries at `(z, t)`; `z` should lie in the strip `|Re z| < 1/2`.
pub fn jump_entries(z: C64, t: C64, mp: &MonodromyParams) -> Result<JumpEntries> {
    check_t(t)?;
    let e = jump_sample(z, t, mp).e;
    let dev = (e.det() - 1.0).norm();
    if !(dev < 1e-6) {
        return Err(Error::Branch(format!("det J deviates from 1 by {dev:e} at z = {z}")));
    }
    Ok(e)
}

/// The jump as the product `Φ_R^{(0)} (Φ_L^{(4)})⁻¹` (cross-check of the closed forms).
pub fn jump_product(z: C64, t: C64, mp: &MonodromyParams) -> Result<Matrix2> {
    let r = parametrix_r0(z, t, mp)?;
    let l = parametrix_l4(z, t, mp)?;
    Ok(r.value * l.value.adj())
}

impl JumpModel for MonodromyParams {
    fn sample(&self, z: C64, t: C64) -> JumpSample {
        jump_sample(z, t, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monodromy::params_from_pair;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mp() -> MonodromyParams {
        params_from_pair(c(0.0, 2.0), c(0.0, 1.0)).unwrap()
    }

    #[test]
    fn stokes_matrix_shapes() {
        let sd = crate::monodromy::stokes_from_pair(c(0.3, 0.1), c(-0.7, 0.4)).unwrap();
        let z = c(0.2, 0.3);
        let t = c(1.5, 0.0);
        for k in 1..=6 {
            let s = stokes_matrix(k, z, t, &sd).unwrap();
            assert!((s.det() - 1.0).norm() < 1e-14);
        }
        let s4 = stokes_matrix(4, z, t, &sd).unwrap();
        let want = -sd.s1 * (-2.0 * I * t * theta(z)).exp();
        assert!((s4.a12 - want).norm() < 1e-14);
        assert!(stokes_matrix(0, z, t, &sd).is_err());
    }

    #[test]
    fn model_jumps_close_up() {
        let mp = mp();
        let mut prod = model_stokes_h(4, &mp).unwrap();
        for k in 0..4 {
            prod = prod * model_stokes_h(k, &mp).unwrap();
        }
        assert!((prod - Matrix2::identity()).max_abs() < 1e-12);
        let h2 = model_stokes_h(2, &mp).unwrap();
        let want = mp.h0 * (-2.0 * PI * I * (mp.nu + 0.5)).exp();
        assert!((h2.a21 - want).norm() < 1e-14);
    }

    #[test]
    fn sector_jump_entries() {
        let mp = mp();
        let z = c(0.3, -0.2);
        let t = c(2.0, 0.0);
        let g0 = sector_jump_g(0, z, t, &mp).unwrap();
        let want = mp.h0 * mp.h_sq * (2.0 * I * t * theta(z)).exp();
        assert!((g0.a21 - want).norm() < 1e-13 * want.norm());
        // h0 h^2 = -s1 / (1 - s1 s3): the lower entry of the LDU factor of the Stokes product.
        let s = mp.stokes;
        let lower = -s.s1 / (1.0 - s.s1 * s.s3) * (2.0 * I * t * theta(z)).exp();
        assert!((g0.a21 - lower).norm() < 1e-12 * want.norm());
        assert_eq!(g0.a12, c(0.0, 0.0));
        let g1 = sector_jump_g(1, z, t, &mp).unwrap();
        assert_eq!(g1.a21, c(0.0, 0.0));
        let g4 = sector_jump_g(4, z, t, &mp).unwrap();
        assert_eq!(g4, model_stokes_h(4, &mp).unwrap());
    }

    /// Φ_R^{(0)} from its definition with unscaled parabolic cylinder functions.
    fn r0_definition(z: C64, t: C64, mp: &MonodromyParams) -> Matrix2 {
        let p = maps_unchecked(z, t);
        let nu = mp.nu;
        let ze = p.zeta;
        let w = (nu * p.log_w).exp();
        let th = (I * t * theta(z)).exp();
        let e13 = (I * t / 3.0).exp();
        let mid = Matrix2::new(
            (I * PI * nu / 2.0).exp() * pcf_d(-nu, I * ze),
            nu * pcf_d(nu - 1.0, ze),
            I * (I * PI * nu / 2.0).exp() * pcf_d(-nu - 1.0, I * ze),
            pcf_d(nu, ze),
        );
        Matrix2::sigma3_pow(w / mp.h * e13) * mid * Matrix2::sigma3_pow(mp.h * th)
    }

    #[test]
    fn r0_matches_definition() {
        let mp = mp();
        let t = c(1.5, 0.0);
        for &z in &[c(0.0, 0.4), c(0.1, -1.3), c(0.0, 2.2)] {
            let a = parametrix_r0(z, t, &mp).unwrap().value;
            let b = r0_definition(z, t, &mp);
            assert!((a - b).max_abs() < 1e-10 * b.max_abs(), "{a:?} {b:?}");
        }
    }

    #[test]
    fn unimodular_parametrices() {
        let mp = mp();
        let t = c(2.0, 0.0);
        // Every sector parametrix near the turning point z = 1/2.
        for j in 0..12 {
            let z = c(0.5, 0.0) + C64::from_polar(0.35, 0.3 + j as f64 * PI / 6.0);
            for s in 0..=4 {
                let r = parametrix_r(s, z, t, &mp).unwrap().value;
                assert!((r.det() - 1.0).norm() < 1e-9, "sector {s} z {z}");
            }
        }
        // The sectors used on the imaginary axis, far along it.
        for k in -10..=10 {
            let z = c(0.05, 0.7 * k as f64);
            let r = parametrix_r0(z, t, &mp).unwrap().value;
            assert!((r.det() - 1.0).norm() < 1e-9, "z {z}");
            let l = parametrix_l4(z, t, &mp).unwrap().value;
            assert!((l.det() - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn sector_parametrices_are_linked_by_g() {
        let mp = mp();
        let t = c(2.0, 0.0);
        let z = c(0.9, 0.35);
        for k in 0..4 {
            let a = parametrix_r(k, z, t, &mp).unwrap().value * sector_jump_g(k, z, t, &mp).unwrap();
            let b = parametrix_r(k + 1, z, t, &mp).unwrap().value;
            assert!((a - b).max_abs() < 1e-9 * b.max_abs(), "k={k}");
        }
    }

    #[test]
    fn closed_form_matches_product() {
        let mp = mp();
        let t = c(1.0, 0.5);
        for k in -6..=6 {
            let z = c(0.0, 0.9 * k as f64 + 0.1);
            let e = jump_entries(z, t, &mp).unwrap().matrix();
            let p = jump_product(z, t, &mp).unwrap();
            assert!((e - p).max_abs() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn c_is_b_reflected_bitwise() {
        let mp = mp();
        let t = c(2.0, 0.0);
        let z = c(0.03, 1.7);
        let s = jump_sample(z, t, &mp);
        let r = jump_sample(-z, t, &mp);
        assert_eq!(s.e.c, r.e.b);
        assert!((s.e.a - r.e.a).norm() < 1e-12);
    }

    #[test]
    fn h_sign_is_unobservable() {
        let mp = mp();
        let t = c(2.0, 0.0);
        let z = c(0.0, 0.8);
        let a = jump_sample(z, t, &mp);
        let b = jump_sample(z, t, &mp.with_flipped_h());
        assert_eq!(a, b);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mp = mp();
        let t = c(2.0, 0.3);
        let z = c(0.1, 0.9);
        let s = jump_sample(z, t, &mp);
        let h = 1e-5;
        let fz = |z: C64| jump_sample(z, t, &mp).e.matrix();
        let ft = |t: C64| jump_sample(z, t, &mp).e.matrix();
        let dz = (fz(z + h) - fz(z - h)).scale(c(0.5 / h, 0.0));
        let dt = (ft(t + h) - ft(t - h)).scale(c(0.5 / h, 0.0));
        assert!((dz - s.dz.matrix()).max_abs() < 1e-7);
        assert!((dt - s.dt.matrix()).max_abs() < 1e-7);
        for k in [0, 2, 4] {
            let p = parametrix_r(k, z, t, &mp).unwrap();
            let fz = |z: C64| parametrix_r(k, z, t, &mp).unwrap().value;
            let d = (fz(z + h) - fz(z - h)).scale(c(0.5 / h, 0.0));
            assert!((d - p.dz).max_abs() < 1e-7 * (1.0 + p.dz.max_abs()));
        }
        let l = parametrix_l4(z, t, &mp).unwrap();
        let ft = |t: C64| parametrix_l4(z, t, &mp).unwrap().value;
        let d = (ft(t + h) - ft(t - h)).scale(c(0.5 / h, 0.0));
        assert!((d - l.dt).max_abs() < 1e-7 * (1.0 + l.dt.max_abs()));
    }
}
