//! Stokes data, the cyclic constraint and the derived monodromy parameters
//! `ν`, `h₀`, `h₁`, `h`.

use crate::error::{Error, Result};
use crate::specialfn::rgamma;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Stokes multipliers `(s₁, s₂, s₃)` satisfying `s₁ − s₂ + s₃ + s₁s₂s₃ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesData {
    pub s1: C64,
    pub s2: C64,
    pub s3: C64,
}

impl StokesData {
    /// Residual of the cyclic constraint.
    pub fn constraint_residual(&self) -> f64 {
        (self.s1 - self.s2 + self.s3 + self.s1 * self.s2 * self.s3).norm()
    }

    /// Stokes multiplier `s_k` for `k = 1..=6`, using `s_{k+3} = −s_k`.
    pub fn s(&self, k: i64) -> Result<C64> {
        match k {
            1 => Ok(self.s1),
            2 => Ok(self.s2),
            3 => Ok(self.s3),
            4..=6 => Ok(-self.s(k - 3)?),
            _ => Err(Error::Index { what: "Stokes multiplier", index: k }),
        }
    }
}

/// Builds Stokes data from `(s₁, s₃)`, solving the constraint for `s₂`.
pub fn stokes_from_pair(s1: C64, s3: C64) -> Result<StokesData> {
    if !(s1.is_finite() && s3.is_finite()) {
        return Err(Error::InvalidArgument("Stokes data must be finite".into()));
    }
    let p = s1 * s3;
    if p.norm() < 1e-14 {
        return Err(Error::DegenerateStokes("s1*s3 = 0 (excluded value)".into()));
    }
    let q = 1.0 - p;
    if q.norm() < 1e-14 {
        return Err(Error::DegenerateStokes("s1*s3 = 1 (excluded value)".into()));
    }
    if q.im == 0.0 && q.re < 0.0 {
        return Err(Error::Branch(format!(
            "arg(1 - s1*s3) = ±π for 1 - s1*s3 = {q}; principal branch undefined"
        )));
    }
    let sd = StokesData { s1, s2: (s1 + s3) / q, s3 };
    Ok(sd)
}

/// Parameters derived from the Stokes data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyParams {
    /// `ν = −log(1 − s₁s₃)/(2πi)` (principal logarithm).
    pub nu: C64,
    /// `h₀ = −i√(2π)/Γ(ν+1)`.
    pub h0: C64,
    /// `h₁ = √(2π) e^{iπν}/Γ(−ν)`.
    pub h1: C64,
    /// `h = (−h₁/s₃)^{1/2}`, principal root.
    pub h: C64,
    /// `h² = −h₁/s₃`, the only combination entering the jump entries.
    pub h_sq: C64,
    /// The Stokes data the parameters were derived from.
    pub stokes: StokesData,
}

impl MonodromyParams {
    /// Residual of `1 + h₀h₁ = e^{2πiν}`.
    pub fn monodromy_residual(&self) -> f64 {
        (1.0 + self.h0 * self.h1 - (C64::new(0.0, 2.0 * PI) * self.nu).exp()).norm()
    }

    /// The same parameters with `h` replaced by `−h` (unobservable downstream).
    pub fn with_flipped_h(&self) -> Self {
        Self { h: -self.h, ..*self }
    }
}

/// Derives `ν, h₀, h₁, h` from Stokes data.
pub fn derived_params(sd: StokesData) -> Result<MonodromyParams> {
    let q = 1.0 - sd.s1 * sd.s3;
    if sd.s3.norm() < 1e-300 || q.norm() < 1e-14 {
        return Err(Error::DegenerateStokes("s1*s3 in {0, 1}".into()));
    }
    let i = C64::i();
    let nu = -q.ln() / (2.0 * PI * i);
    if (nu - nu.re.round()).norm() < 1e-8 {
        return Err(Error::DegenerateStokes(format!("nu = {nu} is an integer")));
    }
    let h0 = -i * SQRT_2PI * rgamma(nu + 1.0);
    let h1 = SQRT_2PI * (i * PI * nu).exp() * rgamma(-nu);
    let h_sq = -h1 / sd.s3;
    let mp = MonodromyParams { nu, h0, h1, h: h_sq.sqrt(), h_sq, stokes: sd };
    let res = mp.monodromy_residual();
    if !(res < 1e-8) {
        return Err(Error::NotConverged(format!("monodromy identity residual {res:e}")));
    }
    Ok(mp)
}

/// Convenience: `derived_params(stokes_from_pair(s1, s3)?)`.
pub fn params_from_pair(s1: C64, s3: C64) -> Result<MonodromyParams> {
    derived_params(stokes_from_pair(s1, s3)?)
}
