//! Linear Fourier transform `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx` of step potentials
//! and Gaussians, and the maximally truncated transform ℱ⋆.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{param, Result};
use crate::gaussians::GaussianParams;
use crate::numeric::{osc_integral, KahanSumC};
use crate::potential::PiecewisePotential;

/// Exact transform, layer by layer. A modulation `ξ₀` shifts the argument.
pub fn linear_ft(f: &PiecewisePotential, xi: f64) -> C64 {
    let w = xi - f.modulation();
    let mut acc = KahanSumC::new();
    for l in f.layers() {
        acc.add(l.value * C64::from_polar(1.0, -2.0 * PI * l.left * w) * osc_integral(l.width(), w));
    }
    acc.value()
}

/// `Ĝ(ξ) = c √(π/α) exp((v - 2πiξ)²/(4α))`.
pub fn gaussian_ft(g: &GaussianParams, xi: f64) -> Result<C64> {
    g.validate()?;
    let w = g.v - C64::new(0.0, 2.0 * PI * xi);
    Ok(g.c * (PI / g.alpha).sqrt() * (w * w / (4.0 * g.alpha)).exp())
}

/// `x ↦ ∫_{-∞}^x f(t) e^{-2πitξ} dt` for fixed ξ, stored at the breakpoints
/// and interpolated in closed form inside each layer (a circular arc, or a
/// segment when the shifted frequency is zero).
#[derive(Debug, Clone)]
pub struct PrefixCurve<'a> {
    f: &'a PiecewisePotential,
    omega: f64,
    at_breakpoints: Vec<C64>,
}

impl<'a> PrefixCurve<'a> {
    pub fn new(f: &'a PiecewisePotential, xi: f64) -> Self {
        let omega = xi - f.modulation();
        let mut at_breakpoints = Vec::with_capacity(f.n_layers() + 1);
        let mut acc = KahanSumC::new();
        if f.support().is_some() {
            at_breakpoints.push(acc.value());
            for l in f.layers() {
                acc.add(layer_increment(l.value, l.left, l.width(), omega));
                at_breakpoints.push(acc.value());
            }
        }
        Self { f, omega, at_breakpoints }
    }

    pub fn at_breakpoints(&self) -> &[C64] {
        &self.at_breakpoints
    }

    /// `f̂(ξ)`, the endpoint of the curve.
    pub fn total(&self) -> C64 {
        self.at_breakpoints.last().copied().unwrap_or_default()
    }

    /// Value at `left + s` inside layer `k`.
    pub fn in_layer(&self, k: usize, s: f64) -> C64 {
        let bps = self.f.breakpoints();
        self.at_breakpoints[k] + layer_increment(self.f.values()[k], bps[k], s, self.omega)
    }

    pub fn value_at(&self, x: f64) -> C64 {
        let Some((a, b)) = self.f.support() else {
            return C64::default();
        };
        if x <= a {
            return C64::default();
        }
        if x >= b {
            return self.total();
        }
        let bps = self.f.breakpoints();
        let k = bps.partition_point(|&bp| bp <= x) - 1;
        self.in_layer(k, x - bps[k])
    }

    /// Breakpoints plus `m` equispaced interior points per layer.
    pub fn sample(&self, m: usize) -> Vec<C64> {
        let mut pts = Vec::with_capacity(self.f.n_layers() * (m + 1) + 1);
        for (k, l) in self.f.layers().enumerate() {
            pts.push(self.at_breakpoints[k]);
            for j in 1..=m {
                pts.push(self.in_layer(k, l.width() * j as f64 / (m + 1) as f64));
            }
        }
        if let Some(last) = self.at_breakpoints.last() {
            pts.push(*last);
        }
        pts
    }
}

/// `∫_left^{left+s} v e^{-2πitω} dt`
pub(crate) fn layer_increment(v: C64, left: f64, s: f64, omega: f64) -> C64 {
    v * C64::from_polar(1.0, -2.0 * PI * left * omega) * osc_integral(s, omega)
}

/// Certified bracket `[value, value + error_bound]` for `(ℱ⋆f)(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxTruncated {
    pub value: f64,
    pub error_bound: f64,
}

impl MaxTruncated {
    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }
}

/// `sup_I |∫_I f e^{-2πixξ}|`, i.e. the diameter of the prefix curve, from
/// the breakpoints plus `m` interior samples per layer.
///
/// The curve has speed `|f_k|` on layer `k`, so every curve point lies within
/// `|f_k| h_k / (2m)` of a sample and the diameter is off by at most
/// `2 max_k |f_k| h_k / m`.
pub fn max_truncated_ft(f: &PiecewisePotential, xi: f64, m: usize) -> Result<MaxTruncated> {
    if m < 1 {
        return Err(param("refinement m must be at least 1"));
    }
    let curve = PrefixCurve::new(f, xi);
    let pts = curve.sample(m);
    let value = diameter(&pts);
    let error_bound = f.layers().map(|l| 2.0 * l.value.norm() * l.width() / m as f64).fold(0.0, f64::max);
    Ok(MaxTruncated { value, error_bound })
}

/// O(N²) reference diameter.
pub fn diameter_naive(pts: &[C64]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max((pts[i] - pts[j]).norm_sqr());
        }
    }
    best.sqrt()
}

/// Diameter via convex hull and rotating calipers.
pub fn diameter(pts: &[C64]) -> f64 {
    let hull = convex_hull(pts);
    let n = hull.len();
    match n {
        0 | 1 => return 0.0,
        2 => return (hull[0] - hull[1]).norm(),
        _ => {}
    }
    let area = |a: C64, b: C64, c: C64| cross(b - a, c - a).abs();
    let mut best: f64 = 0.0;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        let mut steps = 0;
        while steps < n && area(hull[i], hull[ni], hull[(j + 1) % n]) > area(hull[i], hull[ni], hull[j]) {
            j = (j + 1) % n;
            steps += 1;
        }
        best = best.max((hull[i] - hull[j]).norm_sqr()).max((hull[ni] - hull[j]).norm_sqr());
    }
    best.sqrt()
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn convex_hull(pts: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut lower: Vec<C64> = Vec::with_capacity(p.len());
    for &q in &p {
        while lower.len() >= 2
            && cross(lower[lower.len() - 1] - lower[lower.len() - 2], q - lower[lower.len() - 2]) <= 0.0
        {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<C64> = Vec::with_capacity(p.len());
    for &q in p.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 1] - upper[upper.len() - 2], q - upper[upper.len() - 2]) <= 0.0
        {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
