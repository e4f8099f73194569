//! The SU(1,1) scattering transform `f ↦ (a(ξ), b(ξ))` of step potentials.
//!
//! Each layer is propagated exactly in the rotated frame
//! `ã = a e^{-iπxξ}`, `b̃ = b e^{iπxξ}`, where the system has constant
//! coefficients `M = [[-iπξ, conj f], [f, iπξ]]` and `M² = (|f|² - π²ξ²) I`.
//! The boundary phases are restored once at the right edge.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{param, Result};
use crate::exec::Exec;
use crate::potential::PiecewisePotential;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Below this `|κh|` the layer functions use their even Taylor series.
const TAYLOR_SWITCH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl TransferMatrix {
    pub const IDENTITY: Self = Self { m11: ONE, m12: ZERO, m21: ZERO, m22: ONE };

    /// `exp(h M)` for one layer of value `value` and width `width` at
    /// frequency `xi` (already shifted by any modulation).
    pub fn layer(value: C64, width: f64, xi: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(param(format!("layer width must be positive, got {width}")));
        }
        Ok(Self::layer_unchecked(value, width, xi))
    }

    pub(crate) fn layer_unchecked(value: C64, width: f64, xi: f64) -> Self {
        let (ch, sh) = cosh_sinhc(value.norm_sqr() - PI * PI * xi * xi, width);
        let phase = PI * xi * sh;
        Self { m11: C64::new(ch, -phase), m12: value.conj() * sh, m21: value * sh, m22: C64::new(ch, phase) }
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `self · rhs`
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m11: self.m11 * rhs.m11 + self.m12 * rhs.m21,
            m12: self.m11 * rhs.m12 + self.m12 * rhs.m22,
            m21: self.m21 * rhs.m11 + self.m22 * rhs.m21,
            m22: self.m21 * rhs.m12 + self.m22 * rhs.m22,
        }
    }

    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (self.m11 * v.0 + self.m12 * v.1, self.m21 * v.0 + self.m22 * v.1)
    }

    /// Re-imposes `m22 = conj m11`, `m21 = conj m12`.
    pub fn project(&mut self) {
        let a = 0.5 * (self.m11 + self.m22.conj());
        let b = 0.5 * (self.m12 + self.m21.conj());
        self.m11 = a;
        self.m22 = a.conj();
        self.m12 = b;
        self.m21 = b.conj();
    }

    /// Largest deviation from the SU(1,1) structure.
    pub fn structure_defect(&self) -> f64 {
        (self.m22 - self.m11.conj()).norm().max((self.m21 - self.m12.conj()).norm()).max((self.det() - ONE).norm())
    }
}

/// `(cosh(κh), sinh(κh)/κ)` for `κ² = kappa2`, real-valued on both branches.
fn cosh_sinhc(kappa2: f64, h: f64) -> (f64, f64) {
    let z = kappa2 * h * h;
    if z.abs() < TAYLOR_SWITCH * TAYLOR_SWITCH {
        let ch = 1.0 + z / 2.0 + z * z / 24.0;
        let sh = h * (1.0 + z / 6.0 + z * z / 120.0);
        (ch, sh)
    } else if kappa2 > 0.0 {
        let k = kappa2.sqrt();
        ((k * h).cosh(), (k * h).sinh() / k)
    } else {
        let w = (-kappa2).sqrt();
        ((w * h).cos(), (w * h).sin() / w)
    }
}

/// Uniform symmetric ξ-grid with an odd node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralGrid {
    pub xi_max: f64,
    pub n: usize,
    pub adaptive: bool,
}

impl SpectralGrid {
    pub fn new(xi_max: f64, n: usize) -> Result<Self> {
        if !(xi_max > 0.0) || !xi_max.is_finite() {
            return Err(param("xi_max must be positive"));
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(param(format!("grid node count must be odd and >= 3, got {n}")));
        }
        Ok(Self { xi_max, n, adaptive: false })
    }

    /// Smallest odd grid on `[-xi_max, xi_max]` with spacing at most `spacing`.
    pub fn with_spacing(xi_max: f64, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(param("spacing must be positive"));
        }
        let half = (xi_max / spacing - 1e-9).ceil().max(1.0) as usize;
        Self::new(xi_max, 2 * half + 1)
    }

    pub fn adaptive(mut self, on: bool) -> Self {
        self.adaptive = on;
        self
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.xi_max / (self.n - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        let half = (self.n - 1) / 2;
        (j as f64 - half as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Twice the range at the same spacing.
    pub fn doubled(&self) -> Self {
        Self { xi_max: 2.0 * self.xi_max, n: 2 * self.n - 1, adaptive: self.adaptive }
    }

    pub fn refined(&self) -> Self {
        Self { xi_max: self.xi_max, n: 2 * self.n - 1, adaptive: self.adaptive }
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| if j == 0 || j == self.n - 1 { 0.5 * h } else { h }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterOptions {
    pub exec: Exec,
    /// Project the running product back onto SU(1,1) every this many layers.
    pub renormalize_every: Option<usize>,
    /// Negative control: flips the sign of the boundary phase restored on
    /// `b`. Only used to check that the symmetry suite catches it.
    pub phase_fault: bool,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self { exec: Exec::default(), renormalize_every: Some(1 << 10), phase_fault: false }
    }
}

impl ScatterOptions {
    pub fn sequential() -> Self {
        Self { exec: Exec::Sequential, ..Self::default() }
    }
}

/// Scattering data on a list of frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    pub xi: Vec<f64>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
}

impl ScatteringData {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `log|a|²`, evaluated as `log(1 + |b|²)`.
    pub fn log_a2(&self, j: usize) -> f64 {
        log_a2(self.b[j])
    }

    pub fn r(&self, j: usize) -> C64 {
        self.b[j] / self.a[j]
    }

    /// `max_ξ | |a|² - |b|² - 1 |`
    pub fn conservation_defect(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| (a.norm_sqr() - b.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_ξ log(|a| + |b|)`
    pub fn max_log_a_plus_b(&self) -> f64 {
        self.a.iter().zip(&self.b).map(|(a, b)| (a.norm() + b.norm()).ln()).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn log_a2(b: C64) -> f64 {
    b.norm_sqr().ln_1p()
}

/// `(a(ξ), b(ξ))` at a single frequency.
pub fn nlft_at(f: &PiecewisePotential, xi: f64, opts: &ScatterOptions) -> (C64, C64) {
    let Some((x0, xn)) = f.support() else {
        return (ONE, ZERO);
    };
    let xi = xi - f.modulation();
    let every = opts.renormalize_every.unwrap_or(usize::MAX).max(1);
    let mut prod = TransferMatrix::IDENTITY;
    for (k, l) in f.layers().enumerate() {
        let m = TransferMatrix::layer_unchecked(l.value, l.width(), xi);
        prod = m.mul(&prod);
        if (k + 1) % every == 0 {
            prod.project();
        }
    }
    // (ã, b̃)(x₀) = (e^{-iπx₀ξ}, 0)
    let a = prod.m11 * C64::from_polar(1.0, PI * (xn - x0) * xi);
    let sign = if opts.phase_fault { 1.0 } else { -1.0 };
    let b = prod.m21 * C64::from_polar(1.0, sign * PI * xn * xi - PI * x0 * xi);
    (a, b)
}

pub fn nlft_points(f: &PiecewisePotential, xi: &[f64], opts: &ScatterOptions) -> ScatteringData {
    let ab = opts.exec.map_slice(xi, |&x| nlft_at(f, x, opts));
    let (a, b) = ab.into_iter().unzip();
    ScatteringData { xi: xi.to_vec(), a, b }
}

pub fn nlft(f: &PiecewisePotential, grid: &SpectralGrid) -> ScatteringData {
    nlft_with(f, grid, &ScatterOptions::default())
}

pub fn nlft_with(f: &PiecewisePotential, grid: &SpectralGrid, opts: &ScatterOptions) -> ScatteringData {
    nlft_points(f, &grid.nodes(), opts)
}

/// Classical fourth-order Runge–Kutta on the unrotated system, stepping each
/// layer in equal substeps no longer than `step`. The potential, including
/// any modulation phase, is evaluated pointwise.
pub fn nlft_ode_oracle(f: &PiecewisePotential, xi: f64, step: f64) -> Result<(C64, C64)> {
    if !(step > 0.0) {
        return Err(param("RK4 step must be positive"));
    }
    if let Some(w) = f.min_width() {
        if step > w * (1.0 + 1e-12) {
            return Err(param(format!("RK4 step {step} exceeds the narrowest layer {w}")));
        }
    }
    let xi0 = f.modulation();
    let mut y = (ONE, ZERO);
    for l in f.layers() {
        let n = (l.width() / step - 1e-9).ceil().max(1.0) as usize;
        let h = l.width() / n as f64;
        // y' = [[0, conj(F)], [F, 0]] y with F(x) = v e^{2πix(ξ₀ - ξ)}
        let rhs = |x: f64, y: (C64, C64)| {
            let big_f = l.value * C64::from_polar(1.0, 2.0 * PI * x * (xi0 - xi));
            (big_f.conj() * y.1, big_f * y.0)
        };
        for s in 0..n {
            let x = l.left + h * s as f64;
            let k1 = rhs(x, y);
            let k2 = rhs(x + 0.5 * h, (y.0 + 0.5 * h * k1.0, y.1 + 0.5 * h * k1.1));
            let k3 = rhs(x + 0.5 * h, (y.0 + 0.5 * h * k2.0, y.1 + 0.5 * h * k2.1));
            let k4 = rhs(x + h, (y.0 + h * k3.0, y.1 + h * k3.1));
            y.0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            y.1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        }
    }
    Ok(y)
}

/// Rotated states `(ã, b̃)` at every breakpoint for one frequency; the
/// building block for partial products inside the support.
#[derive(Debug, Clone)]
pub(crate) struct LayerStates {
    xi: f64,
    states: Vec<(C64, C64)>,
}

impl LayerStates {
    pub(crate) fn new(f: &PiecewisePotential, xi: f64) -> Self {
        let xi = xi - f.modulation();
        let mut states = Vec::with_capacity(f.n_layers() + 1);
        if let Some((x0, _)) = f.support() {
            let mut v = (C64::from_polar(1.0, -PI * x0 * xi), ZERO);
            states.push(v);
            for l in f.layers() {
                v = TransferMatrix::layer_unchecked(l.value, l.width(), xi).apply(v);
                states.push(v);
            }
        }
        Self { xi, states }
    }

    /// `r(x, ξ)` for `x` in layer `k` (`left ≤ x ≤ left + width`).
    pub(crate) fn r_in_layer(&self, k: usize, left: f64, value: C64, x: f64) -> C64 {
        let v = if x > left {
            TransferMatrix::layer_unchecked(value, x - left, self.xi).apply(self.states[k])
        } else {
            self.states[k]
        };
        v.1 / v.0 * C64::from_polar(1.0, -2.0 * PI * x * self.xi)
    }
}

/// `r(x, ξ) = b(x, ξ)/a(x, ξ)` at sorted nodes inside the support.
pub fn reflection_trace(f: &PiecewisePotential, xi: f64, nodes: &[f64]) -> Result<Vec<C64>> {
    let Some((x0, xn)) = f.support() else {
        return Ok(vec![ZERO; nodes.len()]);
    };
    if nodes.windows(2).any(|w| w[1] < w[0]) {
        return Err(param("reflection nodes must be sorted"));
    }
    if nodes.iter().any(|&x| x < x0 || x > xn) {
        return Err(param("reflection nodes must lie inside the support"));
    }
    let states = LayerStates::new(f, xi);
    let bps = f.breakpoints();
    let vals = f.values();
    let mut out = Vec::with_capacity(nodes.len());
    let mut k = 0;
    for &x in nodes {
        while k + 1 < vals.len() && x >= bps[k + 1] {
            k += 1;
        }
        let r = states.r_in_layer(k, bps[k], vals[k], x);
        assert!(r.norm() < 1.0, "|r| >= 1 at x = {x}: |a| fell below 1");
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationRow {
    pub radius: f64,
    pub sup_diff: f64,
}

/// Sup-distance on the grid between the transform of `f·𝟙_[-R,R]` and that
/// of the largest truncation.
pub fn truncation_convergence(
    f: &PiecewisePotential,
    grid: &SpectralGrid,
    radii: &[f64],
) -> Result<Vec<TruncationRow>> {
    if radii.is_empty() {
        return Ok(Vec::new());
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("radii must be strictly increasing"));
    }
    let reference = nlft(&f.truncate(*radii.last().unwrap())?, grid);
    radii
        .iter()
        .map(|&r| {
            let d = nlft(&f.truncate(r)?, grid);
            let sup = (0..d.len())
                .map(|j| (d.a[j] - reference.a[j]).norm() + (d.b[j] - reference.b[j]).norm())
                .fold(0.0, f64::max);
            Ok(TruncationRow { radius: r, sup_diff: sup })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::potential::RandomFamily;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_layer_is_a_pure_phase() {
        let m = TransferMatrix::layer(ZERO, 0.7, 1.3).unwrap();
        assert!((m.m11 - C64::from_polar(1.0, -PI * 1.3 * 0.7)).norm() < 1e-15);
        assert!((m.m22 - C64::from_polar(1.0, PI * 1.3 * 0.7)).norm() < 1e-15);
        assert_eq!(m.m12, ZERO);
        let f = PiecewisePotential::constant(-0.3, 0.4, ZERO).unwrap();
        let (a, b) = nlft_at(&f, 2.1, &ScatterOptions::default());
        assert!((a - ONE).norm() < 1e-15 && b.norm() == 0.0);
    }

    #[test]
    fn layer_at_zero_frequency() {
        let v = c(0.6, -0.8) * 1.7;
        let m = TransferMatrix::layer(v, 0.9, 0.0).unwrap();
        assert_relative_eq!(m.m11.re, (1.7f64 * 0.9).cosh(), epsilon = 1e-14);
        let expect_b = v / v.norm() * (1.7f64 * 0.9).sinh();
        assert!((m.m21 - expect_b).norm() < 1e-14);
        assert!(m.structure_defect() < 1e-14);
        let (a, b) = nlft_ode_oracle(&PiecewisePotential::constant(0.0, 0.9, v).unwrap(), 0.0, 1e-3).unwrap();
        assert!((a - m.m11).norm() < 1e-10 && (b - m.m21).norm() < 1e-10);
    }

    #[test]
    fn layer_taylor_agreement() {
        let v = c(0.3, 0.4);
        let xi = 0.2;
        let h = 1e-6;
        let m = TransferMatrix::layer(v, h, xi).unwrap();
        let first = [ONE + h * c(0.0, -PI * xi), h * v.conj(), h * v, ONE + h * c(0.0, PI * xi)];
        let got = [m.m11, m.m12, m.m21, m.m22];
        for (g, e) in got.iter().zip(first) {
            assert!((g - e).norm() < 1e-11);
        }
    }

    #[test]
    fn turning_point_branch_is_continuous() {
        // |f| = π|ξ| makes κ = 0
        let v = c(PI * 0.5, 0.0);
        let exact = TransferMatrix::layer(v, 1.0, 0.5).unwrap();
        for eps in [1e-3, 1e-6, 1e-9, 1e-12] {
            let near = TransferMatrix::layer(v, 1.0, 0.5 + eps).unwrap();
            assert!((near.m11 - exact.m11).norm() < 10.0 * eps);
            assert!((near.m21 - exact.m21).norm() < 10.0 * eps);
        }
        assert!(exact.structure_defect() < 1e-14);
        assert!(TransferMatrix::layer(v, 0.0, 0.5).is_err());
        assert!(TransferMatrix::layer(v, -1.0, 0.5).is_err());
    }

    #[test]
    fn single_layer_transform() {
        let f = PiecewisePotential::constant(0.0, 1.0, c(1.0, 0.0)).unwrap();
        let (a, b) = nlft_at(&f, 0.0, &ScatterOptions::default());
        assert_relative_eq!(a.re, 1f64.cosh(), epsilon = 1e-15);
        assert_relative_eq!(b.re, 1f64.sinh(), epsilon = 1e-15);
        assert_relative_eq!(a.norm_sqr() - b.norm_sqr(), 1.0, epsilon = 1e-14);
        let (ao, bo) = nlft_ode_oracle(&f, 0.0, 1e-3).unwrap();
        assert!((ao.re - 1.5430806348152437).abs() < 1e-10);
        assert!((bo.re - 1.1752011936438014).abs() < 1e-10);
    }

    #[test]
    fn empty_potential_is_identity() {
        let grid = SpectralGrid::new(3.0, 7).unwrap();
        let d = nlft(&PiecewisePotential::zero(), &grid);
        assert!(d.a.iter().all(|a| *a == ONE) && d.b.iter().all(|b| *b == ZERO));
        assert_eq!(nlft_ode_oracle(&PiecewisePotential::zero(), 1.0, 0.1).unwrap(), (ONE, ZERO));
    }

    #[test]
    fn oracle_agrees_on_random_five_layer_potential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = RandomFamily { max_layers: 5, min_width: 0.1, max_width: 0.5, max_l1: 2.0 };
        let f = loop {
            let f = fam.sample(&mut rng);
            if f.n_layers() == 5 {
                break f;
            }
        };
        let (a, b) = nlft_at(&f, 0.7, &ScatterOptions::default());
        let (ao, bo) = nlft_ode_oracle(&f, 0.7, 1e-3).unwrap();
        assert!((a - ao).norm() < 1e-8 && (b - bo).norm() < 1e-8);
        assert!(nlft_ode_oracle(&f, 0.7, 10.0).is_err());
    }

    #[test]
    fn reflection_trace_examples() {
        let f = PiecewisePotential::constant(0.0, 1.0, c(1.0, 0.0)).unwrap();
        let r = reflection_trace(&f, 0.0, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(r[0], ZERO);
        assert_relative_eq!(r[1].re, 0.5f64.tanh(), epsilon = 1e-15);
        assert_relative_eq!(r[2].re, 1f64.tanh(), epsilon = 1e-15);
        assert!(reflection_trace(&f, 0.0, &[0.5, 0.2]).is_err());
        assert!(reflection_trace(&f, 0.0, &[2.0]).is_err());
    }

    #[test]
    fn reflection_trace_matches_partial_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = RandomFamily::default().sample(&mut rng);
        let (x0, xn) = f.support().unwrap();
        let mut nodes: Vec<f64> = (0..=20).map(|i| x0 + (xn - x0) * i as f64 / 20.0).collect();
        nodes[20] = xn;
        let xi = -0.8;
        let r = reflection_trace(&f, xi, &nodes).unwrap();
        let bound = 2.0 * f.l1_norm();
        for (x, rx) in nodes.iter().zip(&r) {
            assert!(rx.norm() <= bound.min(1.0) + 1e-14);
            if *x > x0 {
                let (a, b) = nlft_at(&f.clip(x0, *x).unwrap(), xi, &ScatterOptions::default());
                assert!((b / a - rx).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_layer_additivity() {
        let f1 = PiecewisePotential::constant(0.0, 0.6, c(0.8, 0.3)).unwrap();
        let f2 = PiecewisePotential::constant(0.6, 1.5, c(-0.2, 1.1)).unwrap();
        let f = f1.join(&f2).unwrap();
        let o = ScatterOptions::default();
        for xi in [-1.3, 0.0, 0.4, 2.2] {
            let (a1, b1) = nlft_at(&f1, xi, &o);
            let (a2, b2) = nlft_at(&f2, xi, &o);
            let (a, b) = nlft_at(&f, xi, &o);
            assert!((a - (a1 * a2 + b1 * b2.conj())).norm() < 1e-13);
            assert!((b - (a1 * b2 + b1 * a2.conj())).norm() < 1e-13);
        }
    }

    #[test]
    fn renormalization_keeps_long_products_structured() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = RandomFamily { max_layers: 20_000, min_width: 1e-4, max_width: 2e-4, max_l1: 1.0 };
        let f = fam.sample(&mut rng);
        let (a, b) = nlft_at(&f, 3.7, &ScatterOptions::default());
        assert!((a.norm_sqr() - b.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_examples() {
        let f = PiecewisePotential::new(vec![0.0, 0.3, 1.0], vec![c(1.0, 0.5), c(-0.4, 0.2)]).unwrap();
        let grid = SpectralGrid::new(4.0, 41).unwrap();
        let rows = truncation_convergence(&f, &grid, &[0.5, 1.0, 2.0]).unwrap();
        assert!(rows[0].sup_diff > 0.0);
        assert_eq!(rows[1].sup_diff, 0.0);
        assert_eq!(rows[2].sup_diff, 0.0);
        assert!(truncation_convergence(&f, &grid, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn truncation_differences_are_nonincreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let grid = SpectralGrid::new(3.0, 31).unwrap();
        for _ in 0..10 {
            let f = RandomFamily::default().sample(&mut rng);
            let (a, b) = f.support().unwrap();
            let rmax = a.abs().max(b.abs());
            let radii: Vec<f64> = (1..=8).map(|i| rmax * i as f64 / 6.0).collect();
            let rows = truncation_convergence(&f, &grid, &radii).unwrap();
            // the difference is not monotone pointwise in general, but it
            // must vanish once the support is covered
            for row in &rows {
                if row.radius >= rmax {
                    assert_eq!(row.sup_diff, 0.0);
                }
            }
            assert!(rows.iter().all(|r| r.sup_diff.is_finite()));
        }
    }

    #[test]
    fn grid_construction() {
        let g = SpectralGrid::new(2.0, 5).unwrap();
        assert_eq!(g.nodes(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(g.doubled().nodes(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0]);
        assert!(SpectralGrid::new(2.0, 4).is_err());
        assert!(SpectralGrid::new(-1.0, 5).is_err());
        let s = SpectralGrid::with_spacing(1.0, 0.3).unwrap();
        assert!(s.spacing() <= 0.3);
    }
}
