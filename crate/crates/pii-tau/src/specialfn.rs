//! Complex Gamma, Kummer's confluent hypergeometric function and parabolic
//! cylinder functions `D_ν(z)` for complex order and argument.
//!
//! Parabolic cylinder functions are evaluated in the scaled form
//! `E_ν(z) = e^{z²/4} D_ν(z)`, which stays O(|z|^ν) in the sector
//! `|arg z| < 3π/4` and lets the jump-matrix code multiply products of
//! parabolic cylinder functions without overflow. Four routes are used:
//!
//! * `|z| ≤ series_radius`: two Kummer series,
//! * `|z| ≥ asymptotic radius`, `|arg z| ≤ 5π/8`: Poincaré expansion,
//! * intermediate radii: Taylor-series integration of Weber's equation
//!   (inward from the asymptotic circle where `D_ν` is recessive, outward
//!   from the origin where it is dominant),
//! * `|arg z| > 5π/8`: the connection formula back into the right half-plane.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Accuracy knobs for the special-function routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPolicy {
    /// Relative accuracy requested from series summation.
    pub target_rel_error: f64,
    /// Radius below which the Kummer-series route is used for `D_ν`.
    pub series_radius: f64,
    /// Radius (before adding `|ν|`) beyond which the asymptotic expansion is used.
    pub asymptotic_radius: f64,
    /// Maximal number of series terms.
    pub max_terms: usize,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        Self {
            target_rel_error: 1e-10,
            series_radius: 3.5,
            asymptotic_radius: 8.0,
            max_terms: 500,
        }
    }
}

impl PrecisionPolicy {
    /// Checks the policy invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_error > 0.0) || !(self.series_radius > 0.0) || self.max_terms < 1 {
            return Err(Error::InvalidConfig(format!("invalid precision policy {self:?}")));
        }
        if !(self.asymptotic_radius > self.series_radius) {
            return Err(Error::InvalidConfig(
                "asymptotic radius must exceed the series radius".into(),
            ));
        }
        Ok(())
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation, valid for `Re z ≥ 1/2`.
fn gamma_lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    SQRT_2PI * t.powc(z + 0.5) * (-t).exp() * x
}

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Complex Gamma function; reflection is used for `Re z < 1/2`.
pub fn gamma_complex(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::GammaPole(z.re));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.5 {
        PI / ((PI * z).sin() * gamma_lanczos(1.0 - z))
    } else {
        gamma_lanczos(z)
    }
}

/// Reciprocal Gamma function `1/Γ(z)`; entire, exactly zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (PI * z).sin() * gamma_lanczos(1.0 - z) / PI
    } else {
        1.0 / gamma_lanczos(z)
    }
}

/// Kummer's function `M(a, b, z) = Σ (a)_n zⁿ / ((b)_n n!)` by direct summation.
pub fn kummer_m(a: C64, b: C64, z: C64, policy: &PrecisionPolicy) -> Result<C64> {
    if is_nonpositive_integer(b) {
        return Err(Error::InvalidArgument(format!(
            "Kummer M undefined for b = {} (non-positive integer)",
            b.re
        )));
    }
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..policy.max_terms {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        // stop once the terms are small and the ratio test says they keep shrinking
        if term.norm() <= 1e-17 * sum.norm()
            && ((a + nf + 1.0) * z / ((b + nf + 1.0) * (nf + 2.0))).norm() < 0.5
        {
            return Ok(sum);
        }
        if term == C64::new(0.0, 0.0) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        terms: policy.max_terms,
        estimate: term.norm() / sum.norm(),
    })
}

/// `E_μ(x) = e^{x²/4} D_μ(x)` with default precision policy.
pub fn pcf_e(mu: C64, x: C64) -> C64 {
    pcf_e_with(mu, x, &PrecisionPolicy::default())
}

/// `E_μ(x) = e^{x²/4} D_μ(x)` with an explicit precision policy.
pub fn pcf_e_with(mu: C64, x: C64, policy: &PrecisionPolicy) -> C64 {
    let r = x.norm();
    if r <= policy.series_radius {
        return e_kummer(mu, x, policy);
    }
    let arg = x.arg().abs();
    if arg > 0.625 * PI {
        return e_connection(mu, x, policy);
    }
    let r_asym = policy.asymptotic_radius + mu.norm();
    if r >= r_asym {
        return e_asymptotic(mu, x);
    }
    if arg <= 0.25 * PI {
        // D_μ is recessive along the ray: integrate inward from the asymptotic circle.
        let x_far = x * (r_asym / r);
        let e_far = e_asymptotic(mu, x_far);
        let de_far = mu * e_asymptotic(mu - 1.0, x_far) - 0.5 * x_far * e_far;
        let (y, _) = integrate_weber(mu, x_far, e_far, de_far, x);
        y * ((x * x - x_far * x_far) * 0.25).exp()
    } else {
        let (d0, dd0) = d_at_origin(mu);
        let (y, _) = integrate_weber(mu, C64::new(0.0, 0.0), d0, dd0, x);
        y * (x * x * 0.25).exp()
    }
}

/// `D_μ(0)` and `D'_μ(0)` in closed form.
fn d_at_origin(mu: C64) -> (C64, C64) {
    let two = C64::new(2.0, 0.0);
    let d0 = two.powc(mu * 0.5) * SQRT_PI * rgamma((1.0 - mu) * 0.5);
    let dd0 = -two.powc((mu + 1.0) * 0.5) * SQRT_PI * rgamma(-mu * 0.5);
    (d0, dd0)
}

fn e_kummer(mu: C64, x: C64, policy: &PrecisionPolicy) -> C64 {
    let x2 = x * x * 0.5;
    let two = C64::new(2.0, 0.0);
    let pol = PrecisionPolicy {
        target_rel_error: 1e-16,
        ..*policy
    };
    let m1 = kummer_m(-mu * 0.5, C64::new(0.5, 0.0), x2, &pol).unwrap_or_else(|_| C64::new(f64::NAN, 0.0));
    let m2 = kummer_m((1.0 - mu) * 0.5, C64::new(1.5, 0.0), x2, &pol)
        .unwrap_or_else(|_| C64::new(f64::NAN, 0.0));
    two.powc(mu * 0.5) * (SQRT_PI * rgamma((1.0 - mu) * 0.5) * m1 - SQRT_2PI * x * rgamma(-mu * 0.5) * m2)
}

fn e_asymptotic(mu: C64, x: C64) -> C64 {
    let inv = 1.0 / (x * x);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 0..400 {
        let kf = k as f64;
        let next = -term * (mu - 2.0 * kf) * (mu - 2.0 * kf - 1.0) * inv / (2.0 * (kf + 1.0));
        let nn = next.norm();
        if nn > last {
            break;
        }
        sum += next;
        term = next;
        last = nn;
        if nn <= 1e-17 * sum.norm() {
            break;
        }
    }
    (mu * x.ln()).exp() * sum
}

fn e_connection(mu: C64, x: C64, policy: &PrecisionPolicy) -> C64 {
    // D_μ(x) = e^{∓iπμ} D_μ(−x) + √(2π)/Γ(−μ) e^{∓iπ(μ+1)/2} D_{−μ−1}(±ix),
    // upper signs for Im x < 0; both right-hand arguments lie in |arg| ≤ π/2.
    let s = if x.im < 0.0 { 1.0 } else { -1.0 };
    let i = C64::i();
    let a = (-s * i * PI * mu).exp() * pcf_e_with(mu, -x, policy);
    let b = SQRT_2PI
        * rgamma(-mu)
        * (-s * i * PI * (mu + 1.0) * 0.5).exp()
        * (x * x * 0.5).exp()
        * pcf_e_with(-mu - 1.0, s * i * x, policy);
    a + b
}

/// Integrates `y'' = (x²/4 − μ − ½) y` along the segment `from → to` by local
/// Taylor series; returns `(y, y')` at `to`.
fn integrate_weber(mu: C64, from: C64, y0: C64, dy0: C64, to: C64) -> (C64, C64) {
    let a = mu + 0.5;
    let span = to - from;
    let len = span.norm();
    let steps = ((len / 0.4).ceil() as usize).max(1);
    let h = span / steps as f64;
    let (mut y, mut dy) = (y0, dy0);
    let mut xc = from;
    let mut coef = [C64::new(0.0, 0.0); 160];
    for _ in 0..steps {
        let c0 = xc * xc * 0.25 - a;
        let c1 = xc * 0.5;
        let c2 = C64::new(0.25, 0.0);
        coef[0] = y;
        coef[1] = dy;
        let mut val = y + dy * h;
        let mut der = dy;
        let mut hp = h; // h^{k-1} for the derivative, h^k for the value
        let scale = y.norm() + dy.norm() * h.norm();
        for k in 0..coef.len() - 2 {
            let mut num = c0 * coef[k];
            if k >= 1 {
                num += c1 * coef[k - 1];
            }
            if k >= 2 {
                num += c2 * coef[k - 2];
            }
            let next = num / (((k + 2) * (k + 1)) as f64);
            coef[k + 2] = next;
            let hk1 = hp * h; // h^{k+2}
            val += next * hk1;
            der += next * hp * (k + 2) as f64;
            hp = hk1;
            let t = next.norm() * hk1.norm();
            if k > 6 && t < 1e-18 * (val.norm() + scale) && coef[k + 1].norm() * (hk1 / h).norm() < 1e-17 * (val.norm() + scale) {
                break;
            }
        }
        y = val;
        dy = der;
        xc += h;
    }
    (y, dy)
}

/// Parabolic cylinder function `D_ν(z)`.
pub fn pcf_d(nu: C64, z: C64) -> C64 {
    pcf_e(nu, z) * (-z * z * 0.25).exp()
}

/// Derivative `D'_ν(z) = ν D_{ν−1}(z) − (z/2) D_ν(z)`.
pub fn pcf_d_prime(nu: C64, z: C64) -> C64 {
    (nu * pcf_e(nu - 1.0, z) - 0.5 * z * pcf_e(nu, z)) * (-z * z * 0.25).exp()
}

/// Derivative of the scaled function, `E'_μ(x) = μ E_{μ−1}(x)`.
pub fn pcf_e_prime(mu: C64, x: C64) -> C64 {
    mu * pcf_e(mu - 1.0, x)
}
