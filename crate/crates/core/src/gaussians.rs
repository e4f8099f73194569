//! The Gaussian family `G(x) = c e^{-αx² + vx}`: closed-form norms and
//! transforms, reduction to `e^{-πx²}`, step sampling, and an upper estimate
//! of the `L^p` distance from a potential to the family.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{param, Error, Result};
use crate::exec::Exec;
use crate::numeric::{KahanSum, GL8};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::potential::PiecewisePotential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub c: C64,
    pub alpha: f64,
    pub v: C64,
}

impl GaussianParams {
    /// `e^{-πx²}`
    pub fn standard() -> Self {
        Self { c: C64::new(1.0, 0.0), alpha: PI, v: C64::new(0.0, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(param(format!("Gaussian width alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.c * (C64::new(-self.alpha * x * x, 0.0) + self.v * x).exp()
    }

    /// Centre `Re(v)/(2α)` of `|G|`.
    pub fn center(&self) -> f64 {
        self.v.re / (2.0 * self.alpha)
    }

    /// Peak of `|G|`, `|c| e^{Re(v)²/(4α)}`.
    pub fn peak(&self) -> f64 {
        self.c.norm() * (self.v.re * self.v.re / (4.0 * self.alpha)).exp()
    }

    /// `‖G‖_p = |c| e^{Re(v)²/(4α)} (π/(pα))^{1/(2p)}`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p >= 1.0) {
            return Err(Error::Exponent(p, "need p >= 1"));
        }
        Ok(self.peak() * (PI / (p * self.alpha)).powf(0.5 / p))
    }

    /// Parameters of `Ĝ`, itself a Gaussian.
    pub fn fourier(&self) -> Result<Self> {
        self.validate()?;
        Ok(Self {
            c: self.c * (PI / self.alpha).sqrt() * (self.v * self.v / (4.0 * self.alpha)).exp(),
            alpha: PI * PI / self.alpha,
            v: C64::new(0.0, -PI / self.alpha) * self.v,
        })
    }

    /// `∫_{x<lo} |G|^p + ∫_{x>hi} |G|^p`.
    pub fn tail_lp_pow(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let mu = self.center();
        let s = (p * self.alpha).sqrt();
        let amp = self.peak().powf(p) * (PI / (p * self.alpha)).sqrt() * 0.5;
        amp * (erfc(s * (hi - mu)) + erfc(s * (mu - lo)))
    }

    /// Symmetry parameters with
    /// `G(x) = scale · e^{2πixξ₀} · λ^{-1} γ((x - x₀)/λ)`, `γ(x) = e^{-πx²}`.
    pub fn standard_form(&self) -> Result<StandardForm> {
        self.validate()?;
        let dilation = (PI / self.alpha).sqrt();
        Ok(StandardForm {
            scale: self.c * (self.v.re * self.v.re / (4.0 * self.alpha)).exp() * dilation,
            modulation: self.v.im / (2.0 * PI),
            translation: self.center(),
            dilation,
        })
    }

    /// Midpoint step approximation on `n` equal layers of `[lo, hi]`, with
    /// rigorous discretization error bounds.
    pub fn sample_to_potential(&self, lo: f64, hi: f64, n: usize) -> Result<SampledGaussian> {
        self.validate()?;
        if n < 1 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(param("sampling needs n >= 1 and a finite window lo < hi"));
        }
        let h = (hi - lo) / n as f64;
        let mut bps = Vec::with_capacity(n + 1);
        let mut vals = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        let mu = self.center();
        let peak = self.peak();
        for k in 0..n {
            let left = lo + h * k as f64;
            let right = if k + 1 == n { hi } else { lo + h * (k + 1) as f64 };
            bps.push(left);
            vals.push(self.eval(0.5 * (left + right)));
            // |G'| = |G|·|v - 2αx|; both factors maximised separately
            let d = if mu < left {
                left - mu
            } else if mu > right {
                mu - right
            } else {
                0.0
            };
            let gmax = peak * (-self.alpha * d * d).exp();
            let lin = (self.v - 2.0 * self.alpha * left).norm().max((self.v - 2.0 * self.alpha * right).norm());
            slopes.push(gmax * lin);
        }
        bps.push(hi);
        Ok(SampledGaussian {
            potential: PiecewisePotential::new(bps, vals)?,
            gaussian: *self,
            window: (lo, hi),
            width: h,
            layer_slopes: slopes,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardForm {
    pub scale: C64,
    pub modulation: f64,
    pub translation: f64,
    pub dilation: f64,
}

impl StandardForm {
    /// `scale · e^{2πixξ₀} · λ^{-1} e^{-π((x-x₀)/λ)²}`
    pub fn rebuild(&self, x: f64) -> C64 {
        let y = (x - self.translation) / self.dilation;
        self.scale * C64::from_polar(1.0, 2.0 * PI * x * self.modulation) * (-PI * y * y).exp() / self.dilation
    }

    /// Inverse composition applied to a function `g`, evaluated at `y`; maps
    /// the original Gaussian to `e^{-πy²}`.
    pub fn reduce<F: Fn(f64) -> C64>(&self, g: F, y: f64) -> C64 {
        let x = self.dilation * y + self.translation;
        g(x) * C64::from_polar(1.0, -2.0 * PI * x * self.modulation) * self.dilation / self.scale
    }

    /// The same reduction carried out with the potential-level symmetries.
    pub fn reduce_potential(&self, f: &PiecewisePotential) -> Result<PiecewisePotential> {
        use crate::potential::Symmetry::*;
        f.scaled(1.0 / self.scale)
            .apply_symmetry(Modulation { xi0: -self.modulation })?
            .apply_symmetry(Translation { x0: -self.translation })?
            .apply_symmetry(Dilation { lambda: 1.0 / self.dilation })
    }
}

#[derive(Debug, Clone)]
pub struct SampledGaussian {
    pub potential: PiecewisePotential,
    pub gaussian: GaussianParams,
    pub window: (f64, f64),
    pub width: f64,
    layer_slopes: Vec<f64>,
}

impl SampledGaussian {
    /// Bound on `‖step - G‖₁`: Gaussian tails outside the window plus
    /// `sup|G'|·h²/4` per layer.
    pub fn l1_error_bound(&self) -> f64 {
        self.lp_error_bound(1.0)
    }

    /// Bound on `‖step - G‖_p` (Minkowski over the window and tail parts).
    pub fn lp_error_bound(&self, p: f64) -> f64 {
        let h = self.width;
        let (lo, hi) = self.window;
        let inside = if p == 1.0 {
            self.layer_slopes.iter().map(|s| s * h * h / 4.0).sum::<f64>()
        } else {
            // pointwise error <= sup|G'|·h/2
            self.layer_slopes.iter().map(|s| (s * h / 2.0).powf(p) * h).sum::<f64>().powf(1.0 / p)
        };
        inside + self.gaussian.tail_lp_pow(p, lo, hi).powf(1.0 / p)
    }
}

/// Options for [`dist_p`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistOptions {
    pub starts: usize,
    pub max_evals: usize,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for DistOptions {
    fn default() -> Self {
        Self { starts: 8, max_evals: 6000, seed: 0x9e37_79b9, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistResult {
    /// `‖f - G_best‖_p`, an upper bound on the distance to the family.
    pub dist: f64,
    pub best: GaussianParams,
    pub starts: usize,
    pub converged: bool,
    pub evals: usize,
}

/// Internal coordinates `(Re A, Im A, ln α, μ, ω)` with
/// `G = A e^{-α(x-μ)²} e^{iωx}`.
fn to_coords(g: &GaussianParams) -> [f64; 5] {
    let amp = g.c * (g.v.re * g.v.re / (4.0 * g.alpha)).exp();
    [amp.re, amp.im, g.alpha.ln(), g.center(), g.v.im]
}

fn from_coords(x: &[f64]) -> GaussianParams {
    let alpha = x[2].exp();
    let mu = x[3];
    // A e^{-α(x-μ)²} = A e^{-αμ²} e^{-αx² + 2αμx}
    GaussianParams { c: C64::new(x[0], x[1]) * (-alpha * mu * mu).exp(), alpha, v: C64::new(2.0 * alpha * mu, x[4]) }
}

/// `‖f - G‖_p^p`: Gauss–Legendre (8 nodes) on panels of each layer, closed
/// forms for the Gaussian tails outside the support of `f`.
pub fn lp_distance_pow(f: &PiecewisePotential, g: &GaussianParams, p: f64) -> f64 {
    let Some((lo, hi)) = f.support() else {
        return g.tail_lp_pow(p, 0.0, 0.0);
    };
    let sa = g.alpha.sqrt();
    let mut acc = KahanSum::new();
    for l in f.layers() {
        let panels = ((l.width() * sa / 0.25).ceil() as usize).clamp(1, 256);
        let w = l.width() / panels as f64;
        for j in 0..panels {
            let a = l.left + w * j as f64;
            for (x, wt) in GL8.mapped(a, a + w) {
                let fx = l.value * f.phase_at(x);
                acc.add(wt * (fx - g.eval(x)).norm().powf(p));
            }
        }
    }
    acc.add(g.tail_lp_pow(p, lo, hi));
    acc.value()
}

/// Moment-matched starting Gaussian.
pub fn moment_start(f: &PiecewisePotential) -> Result<GaussianParams> {
    let mass = f.l1_norm();
    if mass == 0.0 {
        return Err(Error::ZeroPotential);
    }
    let mut m1 = KahanSum::new();
    let mut m2 = KahanSum::new();
    for l in f.layers() {
        let a = l.value.norm();
        m1.add(a * (l.right * l.right - l.left * l.left) / 2.0);
        m2.add(a * (l.right.powi(3) - l.left.powi(3)) / 3.0);
    }
    let mu = m1.value() / mass;
    let var = (m2.value() / mass - mu * mu).max(1e-12);
    let alpha = 1.0 / (2.0 * var);
    // mean phase slope between neighbouring layers, weighted by magnitude
    let mut num = 0.0;
    let mut den = 0.0;
    let layers: Vec<_> = f.layers().collect();
    for w in layers.windows(2) {
        let wt = w[0].value.norm() * w[1].value.norm();
        if wt > 0.0 {
            let dx = 0.5 * (w[1].left + w[1].right) - 0.5 * (w[0].left + w[0].right);
            num += wt * (w[1].value / w[0].value).arg() / dx;
            den += wt;
        }
    }
    let omega = if den > 0.0 { num / den } else { 0.0 } + 2.0 * PI * f.modulation();
    Ok(project_amplitude(f, alpha, mu, omega))
}

/// Best amplitude for fixed shape (L² projection).
fn project_amplitude(f: &PiecewisePotential, alpha: f64, mu: f64, omega: f64) -> GaussianParams {
    let shape = from_coords(&[1.0, 0.0, alpha.ln(), mu, omega]);
    let mut ip = crate::numeric::KahanSumC::new();
    let sa = alpha.sqrt();
    for l in f.layers() {
        let panels = ((l.width() * sa / 0.25).ceil() as usize).clamp(1, 256);
        let w = l.width() / panels as f64;
        for j in 0..panels {
            let a = l.left + w * j as f64;
            for (x, wt) in GL8.mapped(a, a + w) {
                ip.add(wt * l.value * f.phase_at(x) * shape.eval(x).conj());
            }
        }
    }
    // ‖e^{-α(x-μ)²}‖₂² = √(π/(2α))
    let amp = ip.value() / (PI / (2.0 * alpha)).sqrt();
    from_coords(&[amp.re, amp.im, alpha.ln(), mu, omega])
}

/// Multi-start Nelder–Mead estimate of `dist_p(f, 𝔊)` from the moment-matched
/// start. Non-convergence is reported, not fatal.
pub fn dist_p(f: &PiecewisePotential, p: f64, opts: &DistOptions) -> Result<DistResult> {
    let start = moment_start(f)?;
    dist_p_from(f, p, &start, opts)
}

/// As [`dist_p`], with an explicit first start; further starts perturb it.
pub fn dist_p_from(f: &PiecewisePotential, p: f64, start: &GaussianParams, opts: &DistOptions) -> Result<DistResult> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Exponent(p, "need 1 < p < 2"));
    }
    if opts.starts < 1 {
        return Err(param("need at least one start"));
    }
    start.validate()?;
    if f.is_zero() {
        return Err(Error::ZeroPotential);
    }
    let base = to_coords(start);
    let sigma = (0.5 / start.alpha).sqrt();
    let inits: Vec<[f64; 5]> = (0..opts.starts)
        .map(|i| {
            if i == 0 {
                return base;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let alpha = (base[2] + rng.gen_range(-0.7..0.7)).exp();
            let mu = base[3] + sigma * rng.gen_range(-0.5..0.5);
            let omega = base[4] + rng.gen_range(-1.0..1.0) / sigma;
            to_coords(&project_amplitude(f, alpha, mu, omega))
        })
        .collect();
    let scale_amp = start.peak().max(1e-12) * 0.1;
    let runs = opts.exec.map_slice(&inits, |x0| {
        let mut nm = NelderMeadOptions::new(5);
        nm.scale = vec![scale_amp, scale_amp, 0.1, 0.1 * sigma, 0.2 / sigma];
        nm.max_evals = opts.max_evals;
        nm.ftol_abs = 1e-16;
        nm.ftol_rel = 1e-10;
        nm.xtol = 1e-9;
        nelder_mead(|x| lp_distance_pow(f, &from_coords(x), p), x0, &nm)
    });
    let res = runs.iter().fold(&runs[0], |acc, r| if r.fx < acc.fx { r } else { acc });
    Ok(DistResult {
        dist: res.fx.max(0.0).powf(1.0 / p),
        best: from_coords(&res.x),
        starts: opts.starts,
        converged: res.converged,
        evals: runs.iter().map(|r| r.evals).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_norms() {
        let g = GaussianParams::standard();
        assert_relative_eq!(g.lp_norm(2.0).unwrap(), 2f64.powf(-0.25), epsilon = 1e-15);
        assert_relative_eq!(g.lp_norm(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(GaussianParams { alpha: -1.0, ..g }.lp_norm(2.0).is_err());
    }

    #[test]
    fn closed_form_norm_matches_discretization() {
        let g = GaussianParams { c: C64::new(0.5, -1.0), alpha: 1.3, v: C64::new(0.8, 2.0) };
        let s = g.sample_to_potential(-8.0, 8.0, 20_000).unwrap();
        for p in [1.0, 4.0 / 3.0, 2.0, 3.0] {
            assert_relative_eq!(s.potential.lp_norm(p).unwrap(), g.lp_norm(p).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn fourier_params_agree_with_transform() {
        let g = GaussianParams { c: C64::new(0.5, -1.0), alpha: 1.3, v: C64::new(0.8, 2.0) };
        let gh = g.fourier().unwrap();
        for xi in [-1.0, 0.0, 0.4] {
            let direct = crate::linear::gaussian_ft(&g, xi).unwrap();
            assert!((gh.eval(xi) - direct).norm() < 1e-13 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn standard_form_examples() {
        let sf = GaussianParams::standard().standard_form().unwrap();
        assert_relative_eq!(sf.scale.re, 1.0, epsilon = 1e-15);
        assert_eq!(sf.scale.im, 0.0);
        assert_eq!(sf.modulation, 0.0);
        assert_eq!(sf.translation, 0.0);
        assert_relative_eq!(sf.dilation, 1.0, epsilon = 1e-15);

        let m = GaussianParams { v: C64::new(0.0, 2.0 * PI), ..GaussianParams::standard() };
        let sf = m.standard_form().unwrap();
        assert_relative_eq!(sf.modulation, 1.0, epsilon = 1e-15);
        assert_relative_eq!(sf.dilation, 1.0, epsilon = 1e-15);
        assert_eq!(sf.translation, 0.0);

        let g = GaussianParams { c: C64::new(2.0, 0.0), alpha: 2.0, v: C64::new(1.0, 0.0) };
        let sf = g.standard_form().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=1200 {
            let y = -6.0 + 0.01 * i as f64;
            worst = worst.max((sf.reduce(|x| g.eval(x), y) - (-PI * y * y).exp()).norm());
            worst = worst.max((sf.rebuild(y) - g.eval(y)).norm());
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn standard_form_through_potential_symmetries() {
        let g = GaussianParams { c: C64::new(0.3, 1.2), alpha: 0.7, v: C64::new(-0.9, 3.0) };
        let sf = g.standard_form().unwrap();
        let step = g.sample_to_potential(-10.0, 10.0, 400).unwrap().potential;
        let reduced = sf.reduce_potential(&step).unwrap();
        assert_relative_eq!(reduced.modulation(), -sf.modulation * sf.dilation, epsilon = 1e-14);
        for l in reduced.layers() {
            let mid = 0.5 * (l.left + l.right);
            assert!((reduced.value_at(mid) - C64::new((-PI * mid * mid).exp(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn sampling_examples() {
        let g = GaussianParams::standard();
        let s = g.sample_to_potential(-6.0, 6.0, 4000).unwrap();
        assert!((s.potential.l1_norm() - 1.0).abs() < 1e-5);
        let one = g.sample_to_potential(-1.0, 3.0, 1).unwrap();
        assert_eq!(one.potential.n_layers(), 1);
        assert_eq!(one.potential.values()[0], g.eval(1.0));
        let mut prev = g.sample_to_potential(-6.0, 6.0, 100).unwrap();
        for n in [200, 400, 800] {
            let next = g.sample_to_potential(-6.0, 6.0, n).unwrap();
            assert!(next.l1_error_bound() <= 0.5 * prev.l1_error_bound() * (1.0 + 1e-12));
            prev = next;
        }
        assert!(g.sample_to_potential(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn error_bounds_are_honest() {
        let g = GaussianParams { c: C64::new(1.0, 0.5), alpha: 2.0, v: C64::new(1.0, 1.0) };
        let s = g.sample_to_potential(-2.0, 2.5, 300).unwrap();
        for p in [1.0, 1.5] {
            let actual = lp_distance_pow(&s.potential, &g, p).powf(1.0 / p);
            assert!(actual <= s.lp_error_bound(p), "p={p}: {actual} > {}", s.lp_error_bound(p));
        }
    }

    #[test]
    fn distance_of_discretized_gaussian_is_small() {
        let g = GaussianParams::standard();
        let s = g.sample_to_potential(-6.0, 6.0, 600).unwrap();
        let p = 1.5;
        let res = dist_p(&s.potential, p, &DistOptions { starts: 4, ..Default::default() }).unwrap();
        assert!(res.dist <= s.lp_error_bound(p), "{} > {}", res.dist, s.lp_error_bound(p));
    }

    #[test]
    fn distance_with_bump_obeys_triangle_inequality() {
        let g = GaussianParams::standard();
        let sampled = g.sample_to_potential(-5.0, 5.0, 500).unwrap();
        let base = sampled.potential.clone();
        let p = 4.0 / 3.0;
        // bump of L^p size 0.01 on [0.2, 0.4]
        let height = 0.01 / 0.2f64.powf(1.0 / p);
        let bump = PiecewisePotential::constant(0.2, 0.4, C64::new(height, 0.0)).unwrap();
        let f = base.sum(&bump).unwrap();
        let res = dist_p(&f, p, &DistOptions { starts: 4, ..Default::default() }).unwrap();
        let gap = lp_distance_pow(&f, &g, p).powf(1.0 / p);
        assert!(gap <= 0.01 + sampled.lp_error_bound(p), "{gap}");
        assert!(res.dist <= gap + 1e-9, "{} > {}", res.dist, gap);
    }

    #[test]
    fn recovers_from_perturbed_width() {
        let g = GaussianParams { c: C64::new(0.8, 0.3), alpha: 1.7, v: C64::new(0.5, 1.5) };
        let f = g.sample_to_potential(-6.0, 6.0, 1200).unwrap().potential;
        let p = 1.5;
        let known = lp_distance_pow(&f, &g, p).powf(1.0 / p);
        let start = GaussianParams { alpha: 1.3 * g.alpha, ..g };
        let res = dist_p_from(&f, p, &start, &DistOptions { starts: 2, ..Default::default() }).unwrap();
        assert!(res.dist <= known + 1e-4, "{} vs known {}", res.dist, known);
    }

    #[test]
    fn zero_potential_is_rejected() {
        assert!(matches!(dist_p(&PiecewisePotential::zero(), 1.5, &DistOptions::default()), Err(Error::ZeroPotential)));
        let f = PiecewisePotential::constant(0.0, 1.0, C64::new(1.0, 0.0)).unwrap();
        assert!(dist_p(&f, 2.5, &DistOptions::default()).is_err());
    }
}
