//! Contours realizing the imaginary axis and its shifts `iℝ ± ε`, Cauchy
//! transforms on them, and the scalar factor `φ` with its boundary values.
//!
//! Conventions: every contour is a vertical line oriented upwards, so its `+`
//! side is the left half-plane. For a density `f` on a line `Γ`,
//! `C[f](x) = ∫_Γ f(w)/(w − x) dw/2πi`, and `φ = exp C[log A]` on `iℝ`
//! satisfies `φ₊ = φ₋ A`.
//!
//! Transforms at points close to the line use singularity subtraction: with the
//! analytic continuation `f(x)` known,
//! `C[f](x) = (Σ_k (f_k − f(x)) w_k/(z_k − x) + f(x) ∫_Γ dw/(w − x)) / 2πi`,
//! whose summand is analytic, so the rule converges at the rate set by the
//! strip of analyticity instead of the distance from `x` to the line.

use crate::error::{Error, Result};
use crate::fredholm::KernelVariant;
use crate::jump::{JumpModel, JumpSample};
use crate::quadrature::gauss_legendre;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Parametrization of a vertical line by a finite rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourMap {
    /// `z = ε + iL sinh s` with the trapezoidal rule in `s`, truncated.
    Sinh,
    /// `z = ε + iLu/(1 − u²)` with Gauss–Legendre points `u` on `(−1, 1)`.
    Rational,
}

/// Discretization settings shared by the determinant and correction routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    /// Nodes per contour.
    pub n_nodes: usize,
    /// Map scale `L`.
    pub scale: f64,
    /// Shift `ε` of the auxiliary lines `iℝ ± ε`.
    pub eps: f64,
    pub map: ContourMap,
    pub variant: KernelVariant,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { n_nodes: 200, scale: 0.5, eps: 0.1, map: ContourMap::Sinh, variant: KernelVariant::LeftShift }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 8 {
            return Err(Error::InvalidConfig(format!("n_nodes = {} < 8", self.n_nodes)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidConfig(format!("scale L = {} must be positive", self.scale)));
        }
        if !(self.eps > 0.0 && self.eps < 0.4) {
            return Err(Error::InvalidConfig(format!("eps = {} outside (0, 0.4)", self.eps)));
        }
        Ok(())
    }

    pub fn with_nodes(&self, n_nodes: usize) -> Self {
        Self { n_nodes, ..*self }
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..*self }
    }

    /// The contour with the given shift.
    pub fn contour(&self, shift: f64) -> Result<Contour> {
        Contour::build(self.map, self.n_nodes, self.scale, shift)
    }
}

/// A discretized vertical line `Re z = shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    pub shift: f64,
    pub map_scale: f64,
    pub n_nodes: usize,
    pub map: ContourMap,
    /// Endpoints of the truncated line covered by the rule (`None`: the whole line).
    pub ends: Option<(C64, C64)>,
}

/// Trapezoidal step for the sinh map with `n` nodes.
///
/// Balances the discretization error `exp(−2πd/h)` (with `d ≈ 1/2` the
/// half-width of the strip of analyticity in the `s`-plane) against the
/// truncation error `exp(−p·s_max)` for densities decaying like `|z|^{−p}`,
/// `p ≈ 3/2`.
pub fn sinh_step(n: usize) -> f64 {
    (4.0 * PI * 0.5 / (1.5 * n as f64)).sqrt()
}

/// Gauss–Legendre contour `z = ε + iLu/(1−u²)`.
pub fn build_contour(n: usize, l: f64, eps: f64) -> Result<Contour> {
    Contour::build(ContourMap::Rational, n, l, eps)
}

/// Truncated trapezoidal contour `z = ε + iL sinh s`.
pub fn build_sinh_contour(n: usize, l: f64, eps: f64) -> Result<Contour> {
    Contour::build(ContourMap::Sinh, n, l, eps)
}

impl Contour {
    pub fn build(map: ContourMap, n: usize, l: f64, eps: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidArgument(format!("contour needs n >= 8 nodes, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("bad contour parameters L = {l}, eps = {eps}")));
        }
        let (nodes, weights, ends): (Vec<C64>, Vec<C64>, _) = match map {
            ContourMap::Rational => {
                let (u, w) = gauss_legendre(n);
                let z = u.iter().map(|&u| C64::new(eps, l * u / (1.0 - u * u))).collect();
                let wz = u
                    .iter()
                    .zip(&w)
                    .map(|(&u, &w)| I * (l * (1.0 + u * u) / ((1.0 - u * u) * (1.0 - u * u)) * w))
                    .collect();
                (z, wz, None)
            }
            ContourMap::Sinh => {
                let h = sinh_step(n);
                let s = |j: f64| (j - (n as f64 - 1.0) / 2.0) * h;
                let z = (0..n).map(|j| C64::new(eps, l * s(j as f64).sinh())).collect();
                let wz = (0..n).map(|j| I * (l * s(j as f64).cosh() * h)).collect();
                let top = s(n as f64 - 1.0) + h / 2.0;
                let ends = (C64::new(eps, -l * top.sinh()), C64::new(eps, l * top.sinh()));
                (z, wz, Some(ends))
            }
        };
        Ok(Self { nodes, weights, shift: eps, map_scale: l, n_nodes: n, map, ends })
    }

    /// The same rule on the line `Re z = shift`.
    pub fn shifted(&self, shift: f64) -> Self {
        let d = shift - self.shift;
        let mv = |z: C64| z + d;
        Self {
            nodes: self.nodes.iter().map(|&z| mv(z)).collect(),
            weights: self.weights.clone(),
            shift,
            map_scale: self.map_scale,
            n_nodes: self.n_nodes,
            map: self.map,
            ends: self.ends.map(|(a, b)| (mv(a), mv(b))),
        }
    }

    /// `∫ f dz` by the rule.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        f.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// `∫_Γ dw/(w − x)` over the part of the line covered by the rule.
    fn log_kernel_integral(&self, x: C64) -> C64 {
        let left = x.re < self.shift;
        match self.ends {
            Some((bot, top)) if left => (top - x).ln() - (bot - x).ln(),
            Some((bot, top)) => (x - top).ln() - (x - bot).ln(),
            None if left => I * PI,
            None => -I * PI,
        }
    }

    /// Index of the node whose imaginary part is closest to `Im x`.
    pub fn nearest_node(&self, x: C64) -> usize {
        let k = self.nodes.partition_point(|z| z.im < x.im);
        if k == 0 {
            0
        } else if k == self.n_nodes {
            k - 1
        } else if (self.nodes[k].im - x.im).abs() < (x.im - self.nodes[k - 1].im).abs() {
            k
        } else {
            k - 1
        }
    }
}

/// Cauchy transform `∫_Γ f(w)/(w − x) dw/2πi` of node values `f`.
///
/// With `fx = Some(f(x))` (the analytic continuation of the density to `x`)
/// the singularity-subtracted rule is used; otherwise the plain rule.
pub fn cauchy_transform(c: &Contour, f: &[C64], x: C64, fx: Option<C64>) -> C64 {
    match fx {
        None => c.nodes.iter().zip(&c.weights).zip(f).map(|((z, w), f)| f * w / (z - x)).sum::<C64>() / (2.0 * PI * I),
        Some(fx) => {
            let s: C64 = c
                .nodes
                .iter()
                .zip(&c.weights)
                .zip(f)
                .map(|((z, w), f)| (f - fx) * w / (z - x))
                .sum();
            (s + fx * c.log_kernel_integral(x)) / (2.0 * PI * I)
        }
    }
}

/// Cauchy transforms at the nodes of `target` with continuation values `fx`.
pub fn cauchy_at_nodes(c: &Contour, f: &[C64], target: &Contour, fx: &[C64]) -> Vec<C64> {
    target.nodes.par_iter().zip(fx.par_iter()).map(|(&x, &v)| cauchy_transform(c, f, x, Some(v))).collect()
}

/// `log v` on the branch closest to `reference`.
pub fn log_near(v: C64, reference: C64) -> C64 {
    let l = v.ln();
    let k = ((reference.im - l.im) / (2.0 * PI)).round();
    l + I * (2.0 * PI * k)
}

/// Node values of a nonvanishing function with a branch-continuous logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub values: Vec<C64>,
    pub logs: Vec<C64>,
}

impl ScalarField {
    /// Continuous logarithm along the node order; fails on near-zero values.
    pub fn new(values: Vec<C64>) -> Result<Self> {
        let mut logs = Vec::with_capacity(values.len());
        for (k, &v) in values.iter().enumerate() {
            let m = v.norm();
            if !(m >= 1e-12) || !m.is_finite() {
                return Err(Error::NearZeroA(m));
            }
            let l = match k {
                0 => v.ln(),
                _ => log_near(v, logs[k - 1]),
            };
            logs.push(l);
        }
        Ok(Self { values, logs })
    }

    /// Net increment of the argument divided by `2π`, rounded.
    pub fn winding(&self) -> i64 {
        match (self.logs.first(), self.logs.last()) {
            (Some(a), Some(b)) => ((b.im - a.im) / (2.0 * PI)).round() as i64,
            _ => 0,
        }
    }

    /// Largest argument jump between adjacent nodes (continuity diagnostic).
    pub fn max_log_jump(&self) -> f64 {
        self.logs.windows(2).map(|w| (w[1].im - w[0].im).abs()).fold(0.0, f64::max)
    }
}

/// Winding number of `A` along the contour.
pub fn winding_of_a<M: JumpModel + ?Sized>(t: C64, model: &M, c: &Contour) -> Result<i64> {
    let a: Vec<C64> = c.nodes.par_iter().map(|&z| model.sample(z, t).e.a).collect();
    Ok(ScalarField::new(a)?.winding())
}

/// Which value of `φ` to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Boundary value from the left of the line.
    Plus,
    /// Boundary value from the right of the line.
    Minus,
    /// Value at a point off the line.
    Off,
}

/// Offset used to realize the boundary values by a shifted line.
const BOUNDARY_SHIFT: f64 = 0.1;

/// `φ(z) = exp ∫_Γ log A(w)/(w − z) dw/2πi` for the line `c`, or its boundary
/// values `φ_±` for `z` on the line.
pub fn phi_factor<M: JumpModel + ?Sized>(t: C64, model: &M, c: &Contour, z: C64, side: Side) -> Result<C64> {
    let a: Vec<C64> = c.nodes.par_iter().map(|&w| model.sample(w, t).e.a).collect();
    let field = ScalarField::new(a)?;
    let wind = field.winding();
    if wind != 0 {
        return Err(Error::Winding(wind));
    }
    let reference = field.logs[c.nearest_node(z)];
    let log_a_at = |x: C64| -> Result<C64> {
        let v = model.sample(x, t).e.a;
        if !(v.norm() >= 1e-12) {
            return Err(Error::NearZeroA(v.norm()));
        }
        Ok(log_near(v, reference))
    };
    let on_line = (z.re - c.shift).abs() < 1e-12;
    match side {
        Side::Off => {
            if c.nodes.iter().any(|w| (w - z).norm() < 1e-12) {
                return Err(Error::SingularPoint(format!("z = {z} is a contour node")));
            }
            let fx = if (z.re - c.shift).abs() < 0.45 { Some(log_a_at(z)?) } else { None };
            Ok(cauchy_transform(c, &field.logs, z, fx).exp())
        }
        Side::Plus | Side::Minus => {
            if !on_line {
                return Err(Error::InvalidArgument(format!("boundary value requested off the line at z = {z}")));
            }
            // φ₊ is the continuation from the left: move the line to the right of z.
            let d = if side == Side::Plus { BOUNDARY_SHIFT } else { -BOUNDARY_SHIFT };
            let moved = c.shifted(c.shift + d);
            let a: Vec<C64> = moved.nodes.par_iter().map(|&w| model.sample(w, t).e.a).collect();
            let logs: Vec<C64> = a.iter().zip(&field.logs).map(|(&v, &r)| log_near(v, r)).collect();
            if let Some(v) = a.iter().find(|v| !(v.norm() >= 1e-12)) {
                return Err(Error::NearZeroA(v.norm()));
            }
            Ok(cauchy_transform(&moved, &logs, z, Some(log_a_at(z)?)).exp())
        }
    }
}

/// Largest change of `log A` allowed between neighbouring nodes.
pub const MAX_LOG_STEP: f64 = 1.0;

/// Jump data sampled on the three aligned lines `iℝ − ε`, `iℝ`, `iℝ + ε`,
/// with branch-continuous `log A`, and the derived values of `φ`.
#[derive(Debug, Clone)]
pub struct StripSamples {
    pub t: C64,
    pub mid: Contour,
    pub left: Contour,
    pub right: Contour,
    pub on_mid: Vec<JumpSample>,
    pub on_left: Vec<JumpSample>,
    pub on_right: Vec<JumpSample>,
    pub log_a_mid: Vec<C64>,
    pub log_a_left: Vec<C64>,
    pub log_a_right: Vec<C64>,
}

/// Logarithmic derivative `A'/A` of a sample.
pub fn dlog_a(s: &JumpSample) -> C64 {
    s.dz.a / s.e.a
}

impl StripSamples {
    /// Sample `model` at `t` on the lines described by `numerics`.
    pub fn sample<M: JumpModel + ?Sized>(model: &M, t: C64, numerics: &Numerics) -> Result<Self> {
        numerics.validate()?;
        let mid = numerics.contour(0.0)?;
        let left = mid.shifted(-numerics.eps);
        let right = mid.shifted(numerics.eps);
        let take = |c: &Contour| -> Vec<JumpSample> { c.nodes.par_iter().map(|&z| model.sample(z, t)).collect() };
        let on_mid = take(&mid);
        let on_left = take(&left);
        let on_right = take(&right);
        for s in on_mid.iter().chain(&on_left).chain(&on_right) {
            let e = &s.e;
            let big = e.a.norm().max(e.b.norm()).max(e.c.norm());
            if !big.is_finite() || big > 1e8 {
                return Err(Error::Overflow(format!(
                    "jump entries reach {big:e}; try a larger |t| or a smaller grid range"
                )));
            }
        }
        let field = ScalarField::new(on_mid.iter().map(|s| s.e.a).collect())?;
        let wind = field.winding();
        if wind != 0 {
            return Err(Error::Winding(wind));
        }
        let shifted_logs = |samples: &[JumpSample]| -> Result<Vec<C64>> {
            samples
                .iter()
                .zip(&field.logs)
                .map(|(s, &r)| {
                    let m = s.e.a.norm();
                    if !(m >= 1e-12) {
                        return Err(Error::NearZeroA(m));
                    }
                    Ok(log_near(s.e.a, r))
                })
                .collect()
        };
        let log_a_left = shifted_logs(&on_left)?;
        let log_a_right = shifted_logs(&on_right)?;
        for logs in [&field.logs, &log_a_left, &log_a_right] {
            let step = logs.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
            if step > MAX_LOG_STEP {
                return Err(Error::NotConverged(format!(
                    "log A changes by {step:.3} between neighbouring nodes; the jump is under-resolved at t = {t}"
                )));
            }
        }
        Ok(Self { t, mid, left, right, on_mid, on_left, on_right, log_a_mid: field.logs, log_a_left, log_a_right })
    }

    /// `log φ₊` at the nodes of `iℝ` (transform over `iℝ + ε`).
    pub fn log_phi_plus(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.right, &self.log_a_right, &self.mid, &self.log_a_mid)
    }

    /// `log φ₋` at the nodes of `iℝ` (transform over `iℝ − ε`).
    pub fn log_phi_minus(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.left, &self.log_a_left, &self.mid, &self.log_a_mid)
    }

    /// `log φ` at the nodes of `iℝ − ε` (the `+` side).
    pub fn log_phi_on_left(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.mid, &self.log_a_mid, &self.left, &self.log_a_left)
    }

    /// `log φ` at the nodes of `iℝ + ε` (the `−` side).
    pub fn log_phi_on_right(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.mid, &self.log_a_mid, &self.right, &self.log_a_right)
    }

    fn dlog(samples: &[JumpSample]) -> Vec<C64> {
        samples.iter().map(dlog_a).collect()
    }

    /// `(log φ₊)'` at the nodes of `iℝ`.
    pub fn dlog_phi_plus(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.right, &Self::dlog(&self.on_right), &self.mid, &Self::dlog(&self.on_mid))
    }

    /// `(log φ₋)'` at the nodes of `iℝ`.
    pub fn dlog_phi_minus(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.left, &Self::dlog(&self.on_left), &self.mid, &Self::dlog(&self.on_mid))
    }

    /// `(log φ)'` at the nodes of `iℝ − ε`.
    pub fn dlog_phi_on_left(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.mid, &Self::dlog(&self.on_mid), &self.left, &Self::dlog(&self.on_left))
    }

    /// `(log φ)'` at the nodes of `iℝ + ε`.
    pub fn dlog_phi_on_right(&self) -> Vec<C64> {
        cauchy_at_nodes(&self.mid, &Self::dlog(&self.on_mid), &self.right, &Self::dlog(&self.on_right))
    }
}
