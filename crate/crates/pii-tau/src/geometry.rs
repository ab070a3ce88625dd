//! Phase function, conformal maps `ζ, ξ` and the Möbius factor `m`.
//!
//! The conformal map is realized by the analytic branch
//! `ζ(z) = (1 − 2z)·√(−4it/3)·√(z + 1)`, which is single-valued on
//! `Re z > −1` and hence continuous along every vertical line in the strip
//! `|Re z| < 1/2`. The combination `W = ζ·m = −√(−4it/3)·√(z+1)·(2z+1)` has
//! no branch point at `z = 1/2`, so its logarithm is continued analytically
//! and anchored to the principal `log ζ + log m` far down the imaginary axis.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Phase `θ(z) = 4z³/3 − z`.
pub fn theta(z: C64) -> C64 {
    z * z * z * (4.0 / 3.0) - z
}

/// Derivative `θ'(z) = 4z² − 1`.
pub fn theta_prime(z: C64) -> C64 {
    4.0 * z * z - 1.0
}

/// Maps evaluated at a point `(z, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub z: C64,
    pub t: C64,
    pub zeta: C64,
    pub xi: C64,
    pub m: C64,
    /// Continuous logarithm of `W = ζ m`.
    pub log_w: C64,
    /// Continuous logarithm of `V = ξ / m = W(−z)`.
    pub log_v: C64,
}

/// Partial derivatives of the maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapDerivatives {
    pub dzeta_dz: C64,
    pub dzeta_dt: C64,
    pub dxi_dz: C64,
    pub dxi_dt: C64,
    pub dm_dz: C64,
    /// `∂_z log W`.
    pub dlogw_dz: C64,
    /// `∂_z log V`.
    pub dlogv_dz: C64,
    /// `∂_t log W = ∂_t log V = 1/(2t)`.
    pub dlog_dt: C64,
}

fn s_factor(t: C64) -> C64 {
    (C64::new(0.0, -4.0 / 3.0) * t).sqrt()
}

/// `ζ(z, t)` on the analytic branch.
pub fn zeta(z: C64, t: C64) -> C64 {
    (1.0 - 2.0 * z) * s_factor(t) * (z + 1.0).sqrt()
}

fn log_w_base(z: C64, t: C64) -> C64 {
    s_factor(t).ln() + 0.5 * (z + 1.0).ln() + (2.0 * z + 1.0).ln()
}

/// Integer multiple of `iπ` fixing the branch of `log W` for a given `t`.
fn log_w_offset(t: C64) -> f64 {
    let z0 = C64::new(0.0, -1e8);
    let m0 = (z0 + 0.5) / (z0 - 0.5);
    let principal = zeta(z0, t).ln() + m0.ln();
    ((principal - log_w_base(z0, t)).im / PI).round()
}

/// Continuous `log W(z)` for `Re z > −1/2`.
pub fn log_w(z: C64, t: C64) -> C64 {
    log_w_base(z, t) + C64::new(0.0, PI * log_w_offset(t))
}

/// Evaluates the maps without rejecting `z = ±1/2` (the factor `m` is then infinite).
pub fn maps_unchecked(z: C64, t: C64) -> PhasePoint {
    let off = C64::new(0.0, PI * log_w_offset(t));
    PhasePoint {
        z,
        t,
        zeta: zeta(z, t),
        xi: zeta(-z, t),
        m: (z + 0.5) / (z - 0.5),
        log_w: log_w_base(z, t) + off,
        log_v: log_w_base(-z, t) + off,
    }
}

/// Evaluates `ζ, ξ, m` and the continuous logarithms at `(z, t)`.
pub fn maps(z: C64, t: C64) -> Result<PhasePoint> {
    if t.norm() == 0.0 {
        return Err(Error::InvalidArgument("t = 0 is excluded".into()));
    }
    if (z - 0.5).norm() == 0.0 || (z + 0.5).norm() == 0.0 {
        return Err(Error::SingularPoint(format!("m(z) is singular at z = {z}")));
    }
    Ok(maps_unchecked(z, t))
}

/// Derivatives of the maps at a phase point.
pub fn map_derivatives(p: &PhasePoint) -> MapDerivatives {
    let s = s_factor(p.t);
    let dzeta = |z: C64| {
        let r = (z + 1.0).sqrt();
        -2.0 * s * r + (1.0 - 2.0 * z) * s / (2.0 * r)
    };
    let dlw = |z: C64| 0.5 / (z + 1.0) + 2.0 / (2.0 * z + 1.0);
    let z = p.z;
    MapDerivatives {
        dzeta_dz: dzeta(z),
        dzeta_dt: p.zeta / (2.0 * p.t),
        dxi_dz: -dzeta(-z),
        dxi_dt: p.xi / (2.0 * p.t),
        dm_dz: -1.0 / ((z - 0.5) * (z - 0.5)),
        dlogw_dz: dlw(z),
        dlogv_dz: -dlw(-z),
        dlog_dt: 1.0 / (2.0 * p.t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(c(0.0, 0.0)), c(0.0, 0.0));
        assert!((theta(c(0.5, 0.0)) - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((theta(c(-0.5, 0.0)) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn maps_examples() {
        let t = c(1.3, 0.2);
        assert_eq!(zeta(c(0.5, 0.0), t), c(0.0, 0.0));
        let p = maps(c(0.0, 0.0), t).unwrap();
        let z0 = 2.0 * (c(0.0, -1.0) * t / 3.0).sqrt();
        assert!((p.zeta - z0).norm() < 1e-15 && (p.xi - z0).norm() < 1e-15);
        assert_eq!(p.m, c(-1.0, 0.0));
        assert!(maps(c(0.5, 0.0), t).is_err());
        assert!(maps(c(0.1, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn zeta_xi_relation() {
        let t = c(2.0, 0.0);
        for k in -20..=20 {
            let z = c(0.0, 0.37 * k as f64);
            let p = maps(z, t).unwrap();
            let r = p.zeta * p.zeta + p.xi * p.xi + c(0.0, 8.0 / 3.0) * t;
            assert!(r.norm() < 1e-12 * (1.0 + p.zeta.norm_sqr()));
            let th = c(0.0, 1.0) * p.zeta * p.zeta / (4.0 * t) - 1.0 / 3.0;
            assert!((th - theta(z)).norm() < 1e-12 * (1.0 + theta(z).norm()));
        }
    }

    #[test]
    fn derivative_examples() {
        let t = c(1.0, 0.0);
        let p = maps(c(0.0, 0.0), t).unwrap();
        let d = map_derivatives(&p);
        assert!((d.dm_dz - c(-4.0, 0.0)).norm() < 1e-15);
        assert!((d.dzeta_dt - p.zeta / (2.0 * t)).norm() < 1e-15);
        let z = c(0.0, 1.0);
        let p = maps(z, t).unwrap();
        let d = map_derivatives(&p);
        let h = 1e-6;
        let fd = (zeta(z + h, t) - zeta(z - h, t)) / (2.0 * h);
        assert!((fd - d.dzeta_dz).norm() < 1e-7 * d.dzeta_dz.norm());
        let closed = -c(0.0, 8.0) * t * (z * z - 0.25) / p.zeta;
        assert!((closed - d.dzeta_dz).norm() < 1e-13 * closed.norm());
    }

    #[test]
    fn log_w_matches_principal_far_down() {
        let t = c(2.0, 0.0);
        let z = c(0.0, -1e6);
        let p = maps(z, t).unwrap();
        let principal = p.zeta.ln() + p.m.ln();
        assert!((p.log_w - principal).norm() < 1e-9);
        assert!(((p.log_w.exp()) - p.zeta * p.m).norm() < 1e-9 * (p.zeta * p.m).norm());
    }
}
