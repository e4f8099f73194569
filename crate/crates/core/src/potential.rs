//! Compactly supported step potentials, interval sets, exact norms, the
//! symmetry transforms, and the small-potential hypothesis check.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::numeric::KahanSum;

/// A step function `f = Σ f_k 𝟙_[x_{k-1}, x_k)`, optionally multiplied by the
/// plane wave `e^{2πi x ξ₀}` (`modulation = ξ₀`).
///
/// The modulated form is kept symbolic: scattering, linear transforms and the
/// quartic functionals absorb it as an exact frequency shift.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PotentialFile", into = "PotentialFile")]
pub struct PiecewisePotential {
    breakpoints: Vec<f64>,
    values: Vec<C64>,
    modulation: f64,
}

/// On-disk form: `{"breakpoints":[…], "values":[[re,im],…]}` with an
/// optional `"modulation"`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialFile {
    breakpoints: Vec<f64>,
    values: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_zero_f64")]
    modulation: f64,
}

fn is_zero_f64(x: &f64) -> bool {
    *x == 0.0
}

impl TryFrom<PotentialFile> for PiecewisePotential {
    type Error = Error;

    fn try_from(p: PotentialFile) -> Result<Self> {
        if !p.modulation.is_finite() {
            return Err(param("modulation must be finite"));
        }
        let values = p.values.iter().map(|v| C64::new(v[0], v[1])).collect();
        Ok(Self::new(p.breakpoints, values)?.with_modulation(p.modulation))
    }
}

impl From<PiecewisePotential> for PotentialFile {
    fn from(f: PiecewisePotential) -> Self {
        Self {
            values: f.values.iter().map(|v| [v.re, v.im]).collect(),
            breakpoints: f.breakpoints,
            modulation: f.modulation,
        }
    }
}

/// One constant piece of a potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub left: f64,
    pub right: f64,
    pub value: C64,
}

impl Layer {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

impl PiecewisePotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if breakpoints.len() <= 1 {
            if !values.is_empty() {
                return Err(Error::LayerCount { expected: 0, got: values.len() });
            }
            return Ok(Self::zero());
        }
        for (i, x) in breakpoints.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Breakpoints(i));
            }
        }
        for i in 1..breakpoints.len() {
            if breakpoints[i] <= breakpoints[i - 1] {
                return Err(Error::Breakpoints(i));
            }
        }
        if values.len() != breakpoints.len() - 1 {
            return Err(Error::LayerCount { expected: breakpoints.len() - 1, got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(Self { breakpoints, values, modulation: 0.0 })
    }

    /// The zero potential (no layers).
    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), values: Vec::new(), modulation: 0.0 }
    }

    /// `value · 𝟙_[left, right)`.
    pub fn constant(left: f64, right: f64, value: C64) -> Result<Self> {
        Self::new(vec![left, right], vec![value])
    }

    /// Layers of equal width `width` starting at `left`.
    pub fn uniform(left: f64, width: f64, values: Vec<C64>) -> Result<Self> {
        if !(width > 0.0) {
            return Err(param("layer width must be positive"));
        }
        let bps = (0..=values.len()).map(|k| left + width * k as f64).collect();
        Self::new(bps, values)
    }

    pub fn with_modulation(mut self, xi0: f64) -> Self {
        self.modulation = xi0;
        self
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn modulation(&self) -> f64 {
        self.modulation
    }

    pub fn n_layers(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when the induced function vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    /// `[x₀, x_n]`, or `None` for the empty potential.
    pub fn support(&self) -> Option<(f64, f64)> {
        match (self.breakpoints.first(), self.breakpoints.last()) {
            (Some(&a), Some(&b)) if self.n_layers() > 0 => Some((a, b)),
            _ => None,
        }
    }

    pub fn layers(&self) -> impl Iterator<Item = Layer> + '_ {
        self.values.iter().enumerate().map(move |(k, &value)| Layer {
            left: self.breakpoints[k],
            right: self.breakpoints[k + 1],
            value,
        })
    }

    pub fn min_width(&self) -> Option<f64> {
        self.layers().map(|l| l.width()).reduce(f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise value, including the modulation phase. Layers are half-open
    /// on the right.
    pub fn value_at(&self, x: f64) -> C64 {
        let Some((a, b)) = self.support() else {
            return C64::new(0.0, 0.0);
        };
        if x < a || x >= b {
            return C64::new(0.0, 0.0);
        }
        let k = self.breakpoints.partition_point(|&bp| bp <= x) - 1;
        self.values[k] * self.phase_at(x)
    }

    /// `e^{2πi x ξ₀}`.
    pub fn phase_at(&self, x: f64) -> C64 {
        if self.modulation == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::from_polar(1.0, 2.0 * PI * x * self.modulation)
        }
    }

    /// `c · f`.
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            modulation: self.modulation,
        }
    }

    /// `(Σ |f_k|^p h_k)^{1/p}`, accumulated with compensation.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Exponent(p, "need p >= 1"));
        }
        Ok(self.lp_norm_pow(p).powf(1.0 / p))
    }

    /// `‖f‖_p^p`.
    pub fn lp_norm_pow(&self, p: f64) -> f64 {
        let mut acc = KahanSum::new();
        for l in self.layers() {
            acc.add(l.value.norm().powf(p) * l.width());
        }
        acc.value()
    }

    pub fn l1_norm(&self) -> f64 {
        self.lp_norm_pow(1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm_pow(2.0).sqrt()
    }

    /// `∫_S |f|` by exact interval intersection.
    pub fn l1_norm_on_set(&self, set: &IntervalSet) -> f64 {
        let mut acc = KahanSum::new();
        for l in self.layers() {
            let m = l.value.norm();
            if m == 0.0 {
                continue;
            }
            for &(a, b) in set.intervals() {
                let overlap = b.min(l.right) - a.max(l.left);
                if overlap > 0.0 {
                    acc.add(m * overlap);
                }
            }
        }
        acc.value()
    }

    /// `f · 𝟙_[-R, R]`.
    pub fn truncate(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(param("truncation radius must be positive"));
        }
        self.clip(-radius, radius)
    }

    /// `f · 𝟙_[lo, hi]`.
    pub fn clip(&self, lo: f64, hi: f64) -> Result<Self> {
        let mut bps = Vec::new();
        let mut vals = Vec::new();
        for l in self.layers() {
            let a = l.left.max(lo);
            let b = l.right.min(hi);
            if b <= a {
                continue;
            }
            if bps.last() != Some(&a) {
                if !bps.is_empty() {
                    // gap between kept layers cannot happen for a contiguous
                    // potential, but keep the representation valid anyway
                    vals.push(C64::new(0.0, 0.0));
                }
                bps.push(a);
            }
            bps.push(b);
            vals.push(l.value);
        }
        Ok(Self::new(bps, vals)?.with_modulation(self.modulation))
    }

    /// Applies one of the symmetry transforms to `f`.
    pub fn apply_symmetry(&self, sym: Symmetry) -> Result<Self> {
        let mut out = self.clone();
        match sym {
            Symmetry::Unimodular { theta } => {
                let u = C64::from_polar(1.0, theta);
                out.values.iter_mut().for_each(|v| *v *= u);
            }
            Symmetry::Modulation { xi0 } => out.modulation += xi0,
            Symmetry::Translation { x0 } => {
                out.breakpoints.iter_mut().for_each(|x| *x += x0);
                // e^{2πi(x-x0)ξ₀} = e^{-2πi x0 ξ₀} e^{2πi x ξ₀}
                if self.modulation != 0.0 {
                    let u = C64::from_polar(1.0, -2.0 * PI * x0 * self.modulation);
                    out.values.iter_mut().for_each(|v| *v *= u);
                }
            }
            Symmetry::Dilation { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(param("dilation factor must be positive"));
                }
                out.breakpoints.iter_mut().for_each(|x| *x *= lambda);
                out.values.iter_mut().for_each(|v| *v /= lambda);
                out.modulation /= lambda;
            }
            Symmetry::Conjugation => {
                out.values.iter_mut().for_each(|v| *v = v.conj());
                out.modulation = -out.modulation;
            }
        }
        Ok(out)
    }

    /// `self ⊕ right`: the sum of two potentials with `self` supported to the
    /// left of `right`. A zero layer fills any gap.
    pub fn join(&self, right: &Self) -> Result<Self> {
        let (Some((_, b)), Some((c, _))) = (self.support(), right.support()) else {
            return Ok(if self.is_empty() { right.clone() } else { self.clone() });
        };
        if c < b {
            return Err(param("join requires the left potential to end before the right one starts"));
        }
        if self.modulation != right.modulation {
            return Err(param("join requires equal modulation"));
        }
        let mut bps = self.breakpoints.clone();
        let mut vals = self.values.clone();
        if c > b {
            bps.push(c);
            vals.push(C64::new(0.0, 0.0));
        }
        bps.extend_from_slice(&right.breakpoints[1..]);
        vals.extend_from_slice(&right.values);
        Ok(Self::new(bps, vals)?.with_modulation(self.modulation))
    }

    /// Splits at `x` into `(f·𝟙_{<x}, f·𝟙_{≥x})`.
    pub fn split_at(&self, x: f64) -> Result<(Self, Self)> {
        let Some((a, b)) = self.support() else {
            return Ok((Self::zero(), Self::zero()));
        };
        let left = if x > a { self.clip(a, x.min(b))? } else { Self::zero() };
        let right = if x < b { self.clip(x.max(a), b)? } else { Self::zero() };
        Ok((left, right))
    }

    /// Pointwise sum on the merged breakpoints. Both terms must carry the
    /// same modulation (the zero potential matches any).
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.modulation != other.modulation {
            return Err(param("sum requires equal modulation"));
        }
        let bps = common_breakpoints(&[self, other]);
        let vals = self.values_on(&bps).iter().zip(other.values_on(&bps)).map(|(a, b)| a + b).collect();
        Ok(Self::new(bps, vals)?.with_modulation(self.modulation))
    }

    /// Values of `f` (without the modulation phase) on the layers of a finer
    /// partition `bps` that contains every breakpoint of `f`.
    pub(crate) fn values_on(&self, bps: &[f64]) -> Vec<C64> {
        bps.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                match self.support() {
                    Some((a, b)) if mid >= a && mid < b => {
                        let k = self.breakpoints.partition_point(|&bp| bp <= mid) - 1;
                        self.values[k]
                    }
                    _ => C64::new(0.0, 0.0),
                }
            })
            .collect()
    }

    /// Canonical representative: zero end layers stripped, equal neighbours
    /// merged, modulation dropped for the zero function.
    pub fn canonical(&self) -> Self {
        let mut bps: Vec<f64> = Vec::new();
        let mut vals: Vec<C64> = Vec::new();
        for l in self.layers() {
            if vals.last() == Some(&l.value) && bps.last() == Some(&l.left) {
                *bps.last_mut().unwrap() = l.right;
                continue;
            }
            if bps.last() != Some(&l.left) {
                bps.push(l.left);
            }
            bps.push(l.right);
            vals.push(l.value);
        }
        let zero = C64::new(0.0, 0.0);
        while vals.first() == Some(&zero) {
            vals.remove(0);
            bps.remove(0);
        }
        while vals.last() == Some(&zero) {
            vals.pop();
            bps.pop();
        }
        if vals.is_empty() {
            return Self::zero();
        }
        Self { breakpoints: bps, values: vals, modulation: self.modulation }
    }
}

/// Equality of the induced functions, not of the representations.
impl PartialEq for PiecewisePotential {
    fn eq(&self, other: &Self) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        a.breakpoints == b.breakpoints && a.values == b.values && a.modulation == b.modulation
    }
}

/// Merged, sorted breakpoints of several potentials.
pub(crate) fn common_breakpoints(fs: &[&PiecewisePotential]) -> Vec<f64> {
    let mut bps: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints().iter().copied()).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    bps
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symmetry {
    /// `e^{iθ} f`
    Unimodular { theta: f64 },
    /// `e^{2πi x ξ₀} f`
    Modulation { xi0: f64 },
    /// `f(· - x₀)`
    Translation { x0: f64 },
    /// `λ^{-1} f(λ^{-1} ·)`
    Dilation { lambda: f64 },
    /// `conj f`
    Conjugation,
}

/// Finite union of disjoint closed intervals; on disk
/// `{"intervals":[[a,b],…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalFile", into = "IntervalFile")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalFile {
    intervals: Vec<(f64, f64)>,
}

impl TryFrom<IntervalFile> for IntervalSet {
    type Error = Error;

    fn try_from(f: IntervalFile) -> Result<Self> {
        Self::new(f.intervals)
    }
}

impl From<IntervalSet> for IntervalFile {
    fn from(s: IntervalSet) -> Self {
        Self { intervals: s.intervals }
    }
}

impl IntervalSet {
    /// Sorts and merges overlapping intervals. Degenerate or reversed
    /// intervals are rejected.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(param(format!("invalid interval [{a}, {b}]")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        crate::numeric::ksum(self.intervals.iter().map(|(a, b)| b - a))
    }

    pub fn dilate(&self, lambda: f64) -> Self {
        Self { intervals: self.intervals.iter().map(|(a, b)| (a * lambda, b * lambda)).collect() }
    }

    pub fn translate(&self, x0: f64) -> Self {
        Self { intervals: self.intervals.iter().map(|(a, b)| (a + x0, b + x0)).collect() }
    }
}

/// Parameters `(p, A, λ, δ)` of the small-potential hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConfig {
    pub p: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub lambda: f64,
    pub delta: f64,
}

impl HypothesisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p < 2.0) {
            return Err(Error::Exponent(self.p, "need 1 < p < 2"));
        }
        if !(self.a > 0.0) {
            return Err(param("A must be positive"));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(param("lambda must lie in (0, 1)"));
        }
        if !(self.delta > 0.0) {
            return Err(param("delta must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `‖f‖₁ ≤ δ`
    pub i: bool,
    /// `‖f‖_{L¹(S)} ≥ λ‖f‖₁`
    pub ii: bool,
    /// `‖f‖_p^p ≤ A|S|^{1-p}‖f‖₁`
    pub iii: bool,
    pub margin_i: f64,
    pub margin_ii: f64,
    pub margin_iii: f64,
    pub l1: f64,
    pub l1_on_set: f64,
    pub lp_pow: f64,
    pub set_measure: f64,
}

impl HypothesisReport {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii
    }
}

pub fn check_hypotheses(f: &PiecewisePotential, set: &IntervalSet, cfg: &HypothesisConfig) -> Result<HypothesisReport> {
    cfg.validate()?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let l1 = f.l1_norm();
    let l1_on_set = f.l1_norm_on_set(set);
    let lp_pow = f.lp_norm_pow(cfg.p);
    let measure = set.measure();
    let margin_i = cfg.delta - l1;
    let margin_ii = l1_on_set - cfg.lambda * l1;
    let margin_iii = cfg.a * measure.powf(1.0 - cfg.p) * l1 - lp_pow;
    Ok(HypothesisReport {
        i: margin_i >= 0.0,
        ii: margin_ii >= 0.0,
        iii: margin_iii >= 0.0,
        margin_i,
        margin_ii,
        margin_iii,
        l1,
        l1_on_set,
        lp_pow,
        set_measure: measure,
    })
}

/// Recipe for seeded random step potentials used by the invariant suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomFamily {
    pub max_layers: usize,
    pub min_width: f64,
    pub max_width: f64,
    /// Target `‖f‖₁` is drawn uniformly from `(0.05, max_l1]`.
    pub max_l1: f64,
}

impl Default for RandomFamily {
    fn default() -> Self {
        Self { max_layers: 50, min_width: 0.02, max_width: 0.3, max_l1: 2.0 }
    }
}

impl RandomFamily {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PiecewisePotential {
        let n = rng.gen_range(1..=self.max_layers.max(1));
        let mut x = rng.gen_range(-1.0..1.0);
        let mut bps = vec![x];
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            x += rng.gen_range(self.min_width..=self.max_width);
            bps.push(x);
            vals.push(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let f = PiecewisePotential::new(bps, vals).expect("generated breakpoints are increasing");
        let l1 = f.l1_norm();
        let target = rng.gen_range(0.05..=self.max_l1);
        if l1 > 0.0 {
            f.scaled(C64::new(target / l1, 0.0))
        } else {
            f
        }
    }
}
