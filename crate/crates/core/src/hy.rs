//! Linear and nonlinear Hausdorff–Young ratios.
//!
//! Both numerators are `L^q` norms in ξ, computed by the trapezoid rule on a
//! uniform grid centred at the modulation frequency. The grid range doubles
//! at fixed spacing, reusing earlier nodes, until each norm changes by less
//! than `rtol`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exec::Exec;
use crate::functionals::tail_envelope;
use crate::linear::linear_ft;
use crate::numeric::{ksum, linear_fit, log_log_slope, LinearFit};
use crate::potential::PiecewisePotential;
use crate::scattering::{log_a2, nlft_points, ScatterOptions};
use num_complex::Complex64 as C64;

/// `B_p = p^{1/(2p)} q^{-1/(2q)}`, with the limit value `1` at `p = 1`.
pub fn beckner(p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Exponent(p, "need 1 <= p <= 2"));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = p / (p - 1.0);
    Ok(p.powf(1.0 / (2.0 * p)) * q.powf(-1.0 / (2.0 * q)))
}

fn dual(p: f64) -> Result<f64> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Exponent(p, "need 1 < p < 2"));
    }
    Ok(p / (p - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HYOptions {
    /// Stop doubling once a doubling changes each norm by less than this,
    /// relatively.
    pub rtol: f64,
    pub max_doublings: usize,
    /// ξ-spacing; defaults to a quarter of the reciprocal support length.
    pub spacing: Option<f64>,
    /// Initial half-range; defaults to `max(2, 16·spacing)`.
    pub xi_max: Option<f64>,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for HYOptions {
    fn default() -> Self {
        Self { rtol: 1e-6, max_doublings: 14, spacing: None, xi_max: None, exec: Exec::default() }
    }
}

/// Integrands `|f̂(ξ)|^q` and `(log|a(ξ)|²)^{q/2}` on the grid
/// `ξ₀ + j·h`, `|j| ≤ half`.
#[derive(Debug, Clone)]
pub struct SpectralSamples<'a> {
    f: &'a PiecewisePotential,
    q: f64,
    spacing: f64,
    half: usize,
    linear: Vec<f64>,
    nonlinear: Vec<f64>,
    with_nonlinear: bool,
    exec: Exec,
}

impl<'a> SpectralSamples<'a> {
    pub fn new(f: &'a PiecewisePotential, q: f64, spacing: f64, xi_max: f64, exec: Exec) -> Result<Self> {
        Self::build(f, q, spacing, xi_max, exec, true)
    }

    /// Only the linear integrand.
    pub fn linear_only(f: &'a PiecewisePotential, q: f64, spacing: f64, xi_max: f64, exec: Exec) -> Result<Self> {
        Self::build(f, q, spacing, xi_max, exec, false)
    }

    fn build(f: &'a PiecewisePotential, q: f64, spacing: f64, xi_max: f64, exec: Exec, nl: bool) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::Exponent(q, "need 1 < q < ∞"));
        }
        if !(spacing > 0.0) || !(xi_max >= spacing) || !xi_max.is_finite() {
            return Err(param("need 0 < spacing <= xi_max"));
        }
        let half = (xi_max / spacing).round() as usize;
        let mut s = Self { f, q, spacing, half, linear: Vec::new(), nonlinear: Vec::new(), with_nonlinear: nl, exec };
        let idx: Vec<i64> = (-(half as i64)..=half as i64).collect();
        let (lin, non) = s.evaluate(&idx);
        s.linear = lin;
        s.nonlinear = non;
        Ok(s)
    }

    fn node(&self, j: i64) -> f64 {
        self.f.modulation() + j as f64 * self.spacing
    }

    fn evaluate(&self, idx: &[i64]) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = idx.iter().map(|&j| self.node(j)).collect();
        let q = self.q;
        let lin = self.exec.map_slice(&xs, |&xi| linear_ft(self.f, xi).norm().powf(q));
        let non = if self.with_nonlinear {
            let data = nlft_points(self.f, &xs, &ScatterOptions { exec: self.exec, ..Default::default() });
            data.b.iter().map(|&b| log_a2(b).powf(q / 2.0)).collect()
        } else {
            Vec::new()
        };
        (lin, non)
    }

    pub fn xi_max(&self) -> f64 {
        self.half as f64 * self.spacing
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Twice the range at the same spacing; only the new outer nodes are
    /// evaluated.
    pub fn double(&mut self) {
        let h = self.half as i64;
        let outer_neg: Vec<i64> = (-2 * h..-h).collect();
        let outer_pos: Vec<i64> = (h + 1..=2 * h).collect();
        let (ln, nn) = self.evaluate(&outer_neg);
        let (lp, np) = self.evaluate(&outer_pos);
        self.linear = [ln, std::mem::take(&mut self.linear), lp].concat();
        if self.with_nonlinear {
            self.nonlinear = [nn, std::mem::take(&mut self.nonlinear), np].concat();
        }
        self.half *= 2;
    }

    fn trapezoid(&self, vals: &[f64]) -> f64 {
        let n = vals.len();
        self.spacing * (ksum(vals.iter().copied()) - 0.5 * (vals[0] + vals[n - 1]))
    }

    fn nodes(&self) -> Vec<f64> {
        let h = self.half as i64;
        (-h..=h).map(|j| j as f64 * self.spacing).collect()
    }

    /// `(‖f̂‖_q^q, ‖(log|a|²)^{1/2}‖_q^q)` on the grid; the second is `NaN`
    /// for linear-only samples.
    pub fn integrals(&self) -> (f64, f64) {
        let nl = if self.with_nonlinear { self.trapezoid(&self.nonlinear) } else { f64::NAN };
        (self.trapezoid(&self.linear), nl)
    }

    /// Tail estimates for both integrals from the `|ξ|^{-q}` envelope.
    pub fn tails(&self) -> (f64, f64) {
        let nodes = self.nodes();
        let nl = if self.with_nonlinear { tail_envelope(&nodes, &self.nonlinear, self.q) } else { f64::NAN };
        (tail_envelope(&nodes, &self.linear, self.q), nl)
    }
}

/// An `L^q` norm from grid quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    /// Grid value.
    pub value: f64,
    /// Increase of the norm if the estimated ξ-tail is added.
    pub tail: f64,
    /// Relative change of the grid value in the last doubling.
    pub last_change: f64,
}

impl NormEstimate {
    fn new(integral: f64, tail: f64, previous: f64, q: f64) -> Self {
        let value = integral.max(0.0).powf(1.0 / q);
        let prev = previous.max(0.0).powf(1.0 / q);
        Self {
            value,
            tail: (integral + tail).max(0.0).powf(1.0 / q) - value,
            last_change: if value > 0.0 { (value - prev).abs() / value } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HYReport {
    pub p: f64,
    pub q: f64,
    pub l1: f64,
    pub lp: f64,
    pub fhat_q: NormEstimate,
    pub nonlinear_q: NormEstimate,
    pub beckner: f64,
    pub linear_ratio: f64,
    pub nonlinear_ratio: f64,
    /// `B_p - nonlinear_ratio`
    pub deficit: f64,
    /// `B_p e^{‖f‖₁} ‖f‖_p - ‖(log|a|²)^{1/2}‖_q`
    pub altineq_slack: f64,
    pub xi_max: f64,
    pub spacing: f64,
    pub doublings: usize,
    pub converged: bool,
}

impl HYReport {
    /// `B_p - linear_ratio`
    pub fn linear_deficit(&self) -> f64 {
        self.beckner - self.linear_ratio
    }

    /// `‖(log|a|²)^{1/2}‖_q / ‖f̂‖_q`
    pub fn rho(&self) -> f64 {
        self.nonlinear_q.value / self.fhat_q.value
    }
}

fn default_spacing(f: &PiecewisePotential) -> f64 {
    let (a, b) = f.support().unwrap_or((0.0, 1.0));
    0.25 / (b - a)
}

/// Doubles until both norms change by less than `rtol` or the cap is hit.
/// Returns the number of doublings and whether the criterion was met.
fn converge(samples: &mut SpectralSamples, opts: &HYOptions) -> (usize, bool) {
    let q = samples.q;
    let rel = |a: f64, b: f64| {
        let (a, b) = (a.max(0.0).powf(1.0 / q), b.max(0.0).powf(1.0 / q));
        if b > 0.0 {
            (a - b).abs() / b
        } else {
            0.0
        }
    };
    for done in 1..=opts.max_doublings {
        let prev = samples.integrals();
        samples.double();
        let cur = samples.integrals();
        if rel(prev.0, cur.0) < opts.rtol && (!samples.with_nonlinear || rel(prev.1, cur.1) < opts.rtol) {
            return (done, true);
        }
    }
    (opts.max_doublings, false)
}

/// Grid integrals before the last doubling: the inner half of the nodes.
fn previous_integrals(s: &SpectralSamples) -> (f64, f64) {
    let inner = |vals: &[f64]| {
        let n = vals.len();
        s.trapezoid(&vals[n / 4..n - n / 4])
    };
    let nl = if s.with_nonlinear { inner(&s.nonlinear) } else { f64::NAN };
    (inner(&s.linear), nl)
}

fn start_grid(f: &PiecewisePotential, opts: &HYOptions) -> (f64, f64) {
    let spacing = opts.spacing.unwrap_or_else(|| default_spacing(f));
    (spacing, opts.xi_max.unwrap_or((16.0 * spacing).max(2.0)))
}

/// `‖f̂‖_q` alone, with adaptive range doubling.
pub fn linear_lq_norm(f: &PiecewisePotential, q: f64, opts: &HYOptions) -> Result<NormEstimate> {
    let (spacing, xi_max) = start_grid(f, opts);
    let mut s = SpectralSamples::linear_only(f, q, spacing, xi_max, opts.exec)?;
    converge(&mut s, opts);
    Ok(NormEstimate::new(s.integrals().0, s.tails().0, previous_integrals(&s).0, q))
}

/// Both Hausdorff–Young ratios for `f` at exponent `p`.
pub fn nonlinear_ratio(f: &PiecewisePotential, p: f64, opts: &HYOptions) -> Result<HYReport> {
    let q = dual(p)?;
    if f.is_zero() {
        return Err(Error::ZeroPotential);
    }
    let (spacing, xi_max) = start_grid(f, opts);
    let mut s = SpectralSamples::new(f, q, spacing, xi_max, opts.exec)?;
    let (doublings, converged) = converge(&mut s, opts);
    let (lin, non) = s.integrals();
    let (tl, tn) = s.tails();
    let (pl, pn) = previous_integrals(&s);
    let fhat_q = NormEstimate::new(lin, tl, pl, q);
    let nonlinear_q = NormEstimate::new(non, tn, pn, q);
    let b = beckner(p)?;
    let l1 = f.l1_norm();
    let lp = f.lp_norm(p)?;
    Ok(HYReport {
        p,
        q,
        l1,
        lp,
        fhat_q,
        nonlinear_q,
        beckner: b,
        linear_ratio: fhat_q.value / lp,
        nonlinear_ratio: nonlinear_q.value / lp,
        deficit: b - nonlinear_q.value / lp,
        altineq_slack: b * l1.exp() * lp - nonlinear_q.value,
        xi_max: s.xi_max(),
        spacing: s.spacing(),
        doublings,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub report: HYReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub p: f64,
    pub rows: Vec<SweepRow>,
    /// Least-squares fit `deficit ≈ d₀ + ε̂·c²‖shape‖₁²`; `ε̂` is the slope.
    /// Empirical, not a certified value of the theorem's ε.
    pub deficit_fit: LinearFit,
    pub eps_hat: f64,
    /// `min_c deficit(c) / (c‖shape‖₁)²`
    pub eps_lower: f64,
    /// Log-log fit of `linear_ratio - nonlinear_ratio` against `c`.
    pub gap_slope: LinearFit,
    pub all_deficits_positive: bool,
    pub all_below_linear: bool,
    pub min_altineq_slack: f64,
}

/// HY reports for `c·shape` over `cs`, with the small-potential fits.
pub fn small_potential_sweep(shape: &PiecewisePotential, p: f64, cs: &[f64], opts: &HYOptions) -> Result<SweepReport> {
    if cs.is_empty() || cs.iter().any(|&c| !(c > 0.0)) || cs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(param("sweep needs a nonempty increasing list of positive c"));
    }
    if shape.is_zero() {
        return Err(Error::ZeroPotential);
    }
    let reports = opts.exec.map_slice(cs, |&c| nonlinear_ratio(&shape.scaled(C64::new(c, 0.0)), p, opts));
    let rows: Vec<SweepRow> =
        cs.iter().zip(reports).map(|(&c, r)| r.map(|report| SweepRow { c, report })).collect::<Result<_>>()?;
    let s1 = shape.l1_norm();
    let xs: Vec<f64> = cs.iter().map(|c| (c * s1).powi(2)).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.report.deficit).collect();
    let deficit_fit = linear_fit(&xs, &ds);
    let eps_lower = ds.iter().zip(&xs).map(|(d, x)| d / x).fold(f64::INFINITY, f64::min);
    let gaps: Vec<f64> = rows.iter().map(|r| r.report.linear_ratio - r.report.nonlinear_ratio).collect();
    Ok(SweepReport {
        p,
        deficit_fit,
        eps_hat: deficit_fit.slope,
        eps_lower,
        gap_slope: log_log_slope(cs, &gaps),
        all_deficits_positive: ds.iter().all(|&d| d > 0.0),
        all_below_linear: gaps.iter().all(|&g| g > 0.0),
        min_altineq_slack: rows.iter().map(|r| r.report.altineq_slack).fold(f64::INFINITY, f64::min),
        rows,
    })
}

/// Search space: equal-width step potentials with values in a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchFamily {
    pub layers: usize,
    pub width: f64,
    /// Bound on `|Re v|` and `|Im v|` per layer.
    pub max_abs: f64,
    /// Candidates with smaller `‖f‖₁` are rescaled up to it.
    pub l1_floor: f64,
}

impl Default for SearchFamily {
    fn default() -> Self {
        Self { layers: 6, width: 0.25, max_abs: 2.0, l1_floor: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Initial annealing temperature in units of ρ; decays linearly to 0.
    pub temperature: f64,
    pub step: f64,
    pub hy: HYOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 4,
            temperature: 1e-3,
            step: 0.3,
            hy: HYOptions { rtol: 1e-4, max_doublings: 10, exec: Exec::Sequential, ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchStep {
    pub iteration: usize,
    /// Best ρ over all chains after this iteration.
    pub best_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub p: f64,
    pub seed: u64,
    pub iterations: usize,
    pub best: PiecewisePotential,
    pub best_rho: f64,
    pub report: HYReport,
    pub log: Vec<SearchStep>,
}

impl SearchFamily {
    fn validate(&self) -> Result<()> {
        if self.layers < 1 || !(self.width > 0.0) || !(self.max_abs > 0.0) || !(self.l1_floor > 0.0) {
            return Err(param("search family needs layers >= 1 and positive width, bound and floor"));
        }
        if self.l1_floor > self.max_abs * std::f64::consts::SQRT_2 * self.width * self.layers as f64 {
            return Err(param("l1 floor unreachable inside the value box"));
        }
        Ok(())
    }

    fn build(&self, vals: &[C64]) -> PiecewisePotential {
        let f = PiecewisePotential::uniform(0.0, self.width, vals.to_vec()).expect("valid family");
        let l1 = f.l1_norm();
        if l1 < self.l1_floor {
            let s = if l1 > 0.0 { self.l1_floor / l1 } else { 0.0 };
            if s > 0.0 {
                let scaled: Vec<C64> = vals.iter().map(|v| self.clamp(v * s)).collect();
                return PiecewisePotential::uniform(0.0, self.width, scaled).expect("valid family");
            }
            let mut flat = vec![C64::new(self.l1_floor / (self.width * self.layers as f64), 0.0); self.layers];
            flat.iter_mut().for_each(|v| *v = self.clamp(*v));
            return PiecewisePotential::uniform(0.0, self.width, flat).expect("valid family");
        }
        f
    }

    fn clamp(&self, v: C64) -> C64 {
        C64::new(v.re.clamp(-self.max_abs, self.max_abs), v.im.clamp(-self.max_abs, self.max_abs))
    }
}

fn rho_of(f: &PiecewisePotential, p: f64, opts: &HYOptions) -> Result<(f64, HYReport)> {
    let r = nonlinear_ratio(f, p, opts)?;
    Ok((r.rho(), r))
}

/// Simulated annealing for large `ρ(f) = ‖(log|a|²)^{1/2}‖_q / ‖f̂‖_q`.
/// Independent chains run in parallel with seeds `seed, seed+1, …`; the
/// result depends only on the seed.
pub fn counterexample_search(
    p: f64,
    iterations: usize,
    seed: u64,
    family: &SearchFamily,
    opts: &SearchOptions,
    exec: Exec,
) -> Result<SearchReport> {
    dual(p)?;
    family.validate()?;
    if iterations < 1 || opts.restarts < 1 {
        return Err(param("search needs at least one iteration and one chain"));
    }
    let chains = exec.map_range(opts.restarts, |r| run_chain(p, iterations, seed.wrapping_add(r as u64), family, opts));
    let chains: Vec<Chain> = chains.into_iter().collect::<Result<_>>()?;
    let log = (0..iterations)
        .map(|i| SearchStep {
            iteration: i + 1,
            best_rho: chains.iter().map(|c| c.best_so_far[i]).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let winner = chains.iter().fold(&chains[0], |acc, c| if c.best_rho > acc.best_rho { c } else { acc });
    Ok(SearchReport {
        p,
        seed,
        iterations,
        best: winner.best.clone(),
        best_rho: winner.best_rho,
        report: winner.report,
        log,
    })
}

struct Chain {
    best: PiecewisePotential,
    best_rho: f64,
    report: HYReport,
    best_so_far: Vec<f64>,
}

fn run_chain(p: f64, iterations: usize, seed: u64, family: &SearchFamily, opts: &SearchOptions) -> Result<Chain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = family.max_abs;
    let mut vals: Vec<C64> =
        (0..family.layers).map(|_| C64::new(rng.gen_range(-m..=m), rng.gen_range(-m..=m))).collect();
    let mut cur = family.build(&vals);
    vals = cur.values().to_vec();
    let (mut cur_rho, mut cur_rep) = rho_of(&cur, p, &opts.hy)?;
    let mut best = (cur.clone(), cur_rho, cur_rep);
    let mut best_so_far = Vec::with_capacity(iterations);
    for it in 0..iterations {
        let frac = 1.0 - it as f64 / iterations as f64;
        let mut cand = vals.clone();
        let k = rng.gen_range(0..family.layers);
        let scale = opts.step * m * frac.max(0.05);
        cand[k] = family.clamp(cand[k] + C64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale)));
        let f = family.build(&cand);
        let (rho, rep) = rho_of(&f, p, &opts.hy)?;
        let temp = opts.temperature * frac;
        let u: f64 = rng.gen();
        let accept = rho >= cur_rho || (temp > 0.0 && u < ((rho - cur_rho) / temp).exp());
        if accept {
            vals = f.values().to_vec();
            cur = f;
            cur_rho = rho;
            cur_rep = rep;
            if cur_rho > best.1 {
                best = (cur.clone(), cur_rho, cur_rep);
            }
        }
        best_so_far.push(best.1);
    }
    Ok(Chain { best: best.0, best_rho: best.1, report: best.2, best_so_far })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Symmetry;
    use approx::assert_relative_eq;

    #[test]
    fn beckner_values() {
        assert_relative_eq!(beckner(2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(beckner(1.0).unwrap(), 1.0);
        assert!((beckner(4.0 / 3.0).unwrap() - 0.93669).abs() < 1e-5);
        assert!(beckner(1.0 + 1e-9).unwrap() > 0.999);
        assert!(beckner(0.9).is_err() && beckner(2.1).is_err());
    }

    #[test]
    fn zero_potential_rejected() {
        let err = nonlinear_ratio(&PiecewisePotential::zero(), 1.5, &HYOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "ratio undefined for f = 0");
    }

    #[test]
    fn small_box_orders_ratios() {
        let f = PiecewisePotential::constant(0.0, 1.0, C64::new(0.1, 0.0)).unwrap();
        let r = nonlinear_ratio(&f, 4.0 / 3.0, &HYOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.nonlinear_ratio < r.linear_ratio && r.linear_ratio < r.beckner);
        // ‖sinc‖₄⁴ = 2/3
        assert!((r.linear_ratio - (2.0f64 / 3.0).powf(0.25)).abs() < 1e-6, "{}", r.linear_ratio);
        assert!(r.altineq_slack > 0.0);
        let hi = nonlinear_ratio(&f, 4.0 / 3.0, &HYOptions { rtol: 1e-8, spacing: Some(0.125), ..Default::default() })
            .unwrap();
        assert!((hi.nonlinear_ratio - r.nonlinear_ratio).abs() < 1e-6);
    }

    #[test]
    fn plancherel_near_p_two() {
        let f = PiecewisePotential::new(vec![0.0, 0.3, 1.0], vec![C64::new(0.5, 0.2), C64::new(-0.4, 0.7)]).unwrap();
        let r = nonlinear_ratio(&f, 1.999, &HYOptions { rtol: 1e-3, ..Default::default() }).unwrap();
        assert!((r.nonlinear_q.value / f.l2_norm() - 1.0).abs() < 0.01);
    }

    #[test]
    fn ratios_invariant_under_symmetries() {
        let f = PiecewisePotential::new(vec![-0.2, 0.3, 0.9], vec![C64::new(0.4, 0.1), C64::new(0.2, -0.5)]).unwrap();
        let opts = HYOptions { rtol: 1e-8, ..Default::default() };
        let base = nonlinear_ratio(&f, 1.5, &opts).unwrap();
        for sym in [
            Symmetry::Unimodular { theta: 0.7 },
            Symmetry::Modulation { xi0: 0.35 },
            Symmetry::Translation { x0: 1.3 },
            Symmetry::Conjugation,
        ] {
            let g = f.apply_symmetry(sym).unwrap();
            let r = nonlinear_ratio(&g, 1.5, &opts).unwrap();
            assert!((r.nonlinear_ratio - base.nonlinear_ratio).abs() < 1e-7, "{sym:?}");
            assert!((r.linear_ratio - base.linear_ratio).abs() < 1e-7, "{sym:?}");
        }
        // L¹-normalized dilation leaves ‖f‖₁ and the ratios unchanged
        let g = f.apply_symmetry(Symmetry::Dilation { lambda: 2.0 }).unwrap();
        let r = nonlinear_ratio(&g, 1.5, &opts).unwrap();
        assert!((r.nonlinear_ratio - base.nonlinear_ratio).abs() < 1e-7);
    }

    #[test]
    fn sweep_fits_small_box() {
        let shape = PiecewisePotential::constant(0.0, 1.0, C64::new(1.0, 0.0)).unwrap();
        let cs = [0.02, 0.04, 0.06, 0.08, 0.1];
        let rep = small_potential_sweep(&shape, 4.0 / 3.0, &cs, &HYOptions::default()).unwrap();
        assert!(rep.all_deficits_positive && rep.all_below_linear);
        assert!(rep.eps_hat > 0.0);
        assert!((rep.gap_slope.slope - 2.0).abs() < 0.1, "{:?}", rep.gap_slope);
        assert!(rep.min_altineq_slack >= 0.0);
        assert!(small_potential_sweep(&shape, 1.5, &[0.2, 0.1], &HYOptions::default()).is_err());
    }

    #[test]
    fn search_is_deterministic_and_monotone() {
        let fam = SearchFamily { layers: 3, ..Default::default() };
        let opts = SearchOptions { restarts: 2, ..Default::default() };
        let a = counterexample_search(1.5, 12, 1, &fam, &opts, Exec::Parallel).unwrap();
        let b = counterexample_search(1.5, 12, 1, &fam, &opts, Exec::Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.log.windows(2).all(|w| w[1].best_rho >= w[0].best_rho));
        assert!(a.best.l1_norm() >= fam.l1_floor * (1.0 - 1e-12));
        assert_eq!(a.log.len(), 12);
    }

    #[test]
    fn rho_tends_to_one_for_tiny_potentials() {
        let f = PiecewisePotential::new(vec![0.0, 0.5, 1.0], vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.8)]).unwrap();
        let mut last = f64::INFINITY;
        for c in [0.2, 0.05, 0.0125] {
            let r = nonlinear_ratio(&f.scaled(C64::new(c, 0.0)), 1.5, &HYOptions::default()).unwrap();
            let gap = (r.rho() - 1.0).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
    }
}
