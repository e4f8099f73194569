//! Numerical check of the two elementary inequalities behind the expansion
//! bound: with `t = v/u`,
//!
//! (a) `|1+t|^{q/2} - 1 - (q/2)t ≤ D_q (|t|^{q/2} [+ t²  if q > 4])`,
//! (b) `||1+t|^{q-2} - 1| ≤ E_q (|t|^{q-2} [+ |t|  if q > 3])`.
//!
//! The quotients are evaluated on a t-grid, their limits at `0` and `±∞`
//! extrapolated from decade sequences, and the resulting constants checked
//! against the inequalities in the original `(u, v)` variables.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientLimits {
    pub at_zero: f64,
    pub at_pos_inf: f64,
    pub at_neg_inf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub q: f64,
    pub grid_len: usize,
    /// Supremum of the part (a) quotient over the grid and its limits.
    pub d_q: f64,
    /// Supremum of the part (b) quotient over the grid and its limits.
    pub e_q: f64,
    pub sup_a_grid: f64,
    pub sup_b_grid: f64,
    pub limits_a: QuotientLimits,
    pub limits_b: QuotientLimits,
    /// Closed-form limits of part (a) at `0` and of part (b) at `0`.
    pub expected_zero_a: f64,
    pub expected_zero_b: f64,
    /// `(u, v)` pairs at which either inequality failed with the reported
    /// constants.
    pub violations: usize,
    pub pairs_checked: usize,
}

impl LemmaReport {
    /// Largest deviation of the extrapolated limits from their closed forms
    /// (`1` at `±∞`).
    pub fn limit_error(&self) -> f64 {
        [
            (self.limits_a.at_zero - self.expected_zero_a).abs(),
            (self.limits_b.at_zero - self.expected_zero_b).abs(),
            (self.limits_a.at_pos_inf - 1.0).abs(),
            (self.limits_a.at_neg_inf - 1.0).abs(),
            (self.limits_b.at_pos_inf - 1.0).abs(),
            (self.limits_b.at_neg_inf - 1.0).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, limit_tol: f64) -> bool {
        self.d_q.is_finite() && self.e_q.is_finite() && self.violations == 0 && self.limit_error() <= limit_tol
    }
}

/// `|1+t|^s - 1 - s t`, by its binomial series near `0`.
fn excess(s: f64, t: f64) -> f64 {
    if t.abs() < 0.05 {
        let mut coef = s * (s - 1.0) / 2.0;
        let mut pow = t * t;
        let mut sum = 0.0;
        for k in 2..60 {
            let term = coef * pow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coef *= (s - k as f64) / (k as f64 + 1.0);
            pow *= t;
        }
        sum
    } else {
        (1.0 + t).abs().powf(s) - 1.0 - s * t
    }
}

pub fn quotient_a(q: f64, t: f64) -> f64 {
    let den = if q <= 4.0 { t.abs().powf(q / 2.0) } else { t.abs().powf(q / 2.0) + t * t };
    excess(q / 2.0, t) / den
}

pub fn quotient_b(q: f64, t: f64) -> f64 {
    let log_abs = if t > -1.0 { t.ln_1p() } else { (-1.0 - t).ln() };
    let num = ((q - 2.0) * log_abs).exp_m1().abs();
    let den = if q <= 3.0 { t.abs().powf(q - 2.0) } else { t.abs().powf(q - 2.0) + t.abs() };
    num / den
}

/// Magnitudes `10^{-12} … 10^{12}` with both signs, plus points clustered
/// around `0` and `-1`.
pub fn default_t_grid() -> Vec<f64> {
    let mut t = Vec::new();
    let n = 2401;
    for i in 0..n {
        let m = 10f64.powf(-12.0 + 24.0 * i as f64 / (n - 1) as f64);
        t.push(m);
        t.push(-m);
    }
    for k in 1..=120 {
        let d = 10f64.powf(-(k as f64) / 10.0);
        t.push(-1.0 + d);
        t.push(-1.0 - d);
    }
    t.push(-1.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// Aitken Δ² on the last three terms.
fn aitken(s: &[f64]) -> f64 {
    let n = s.len();
    let (a, b, c) = (s[n - 3], s[n - 2], s[n - 1]);
    let den = (c - b) - (b - a);
    if den.abs() <= 1e-300 || !den.is_finite() {
        return c;
    }
    let acc = c - (c - b) * (c - b) / den;
    if acc.is_finite() {
        acc
    } else {
        c
    }
}

fn limits<F: Fn(f64) -> f64>(quot: F) -> QuotientLimits {
    let seq = |sign: f64, up: bool| -> f64 {
        let s: Vec<f64> = (0..=12)
            .map(|k| {
                let m = if up { 10f64.powi(k) } else { 10f64.powi(-k) };
                quot(sign * m)
            })
            .collect();
        aitken(&s)
    };
    let zero_pos = seq(1.0, false);
    let zero_neg = seq(-1.0, false);
    QuotientLimits { at_zero: 0.5 * (zero_pos + zero_neg), at_pos_inf: seq(1.0, true), at_neg_inf: seq(-1.0, true) }
}

pub fn lemma_numeric_check(q: f64, t_grid: &[f64]) -> Result<LemmaReport> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::Exponent(q, "need q > 2"));
    }
    let ts: Vec<f64> = t_grid.iter().copied().filter(|&t| t != 0.0 && t.is_finite()).collect();
    if ts.is_empty() {
        return Err(crate::error::param("t-grid has no nonzero points"));
    }
    let sup = |f: &dyn Fn(f64) -> f64| ts.iter().map(|&t| f(t)).fold(f64::NEG_INFINITY, f64::max);
    let sup_a_grid = sup(&|t| quotient_a(q, t));
    let sup_b_grid = sup(&|t| quotient_b(q, t));
    let limits_a = limits(|t| quotient_a(q, t));
    let limits_b = limits(|t| quotient_b(q, t));
    let lim_max = |l: &QuotientLimits| l.at_zero.max(l.at_pos_inf).max(l.at_neg_inf);
    let d_q = sup_a_grid.max(lim_max(&limits_a));
    let e_q = sup_b_grid.max(lim_max(&limits_b));
    let expected_zero_a = if q < 4.0 { 0.0 } else { q * (q - 2.0) / 8.0 };
    let expected_zero_b = if q < 3.0 { 0.0 } else { q - 2.0 };

    let (violations, pairs_checked) = check_pairs(q, d_q, e_q, &ts);
    Ok(LemmaReport {
        q,
        grid_len: ts.len(),
        d_q,
        e_q,
        sup_a_grid,
        sup_b_grid,
        limits_a,
        limits_b,
        expected_zero_a,
        expected_zero_b,
        violations,
        pairs_checked,
    })
}

/// Both inequalities at `v = t·u` for every grid `t` and a few scales `u`,
/// plus `u = 0`, with a relative rounding allowance.
fn check_pairs(q: f64, d: f64, e: f64, ts: &[f64]) -> (usize, usize) {
    let s = q / 2.0;
    let mut bad = 0;
    let mut count = 0;
    let rel = 1e-12;
    let check_a = |u: f64, v: f64| {
        let lhs = (u + v).abs().powf(s);
        let mut rhs = u.powf(s) + s * v * u.powf(s - 1.0) + d * v.abs().powf(s);
        if q > 4.0 {
            rhs += d * v * v * u.powf(s - 2.0);
        }
        // the first two terms may cancel; scale the allowance by their size
        let scale = u.powf(s) + (s * v * u.powf(s - 1.0)).abs() + lhs;
        lhs <= rhs + rel * scale
    };
    let check_b = |u: f64, v: f64| {
        let lhs = ((u + v).abs().powf(q - 2.0) - u.powf(q - 2.0)).abs();
        let mut rhs = e * v.abs().powf(q - 2.0);
        if q > 3.0 {
            rhs += e * v.abs() * u.powf(q - 3.0);
        }
        let scale = (u + v).abs().powf(q - 2.0) + u.powf(q - 2.0);
        lhs <= rhs + rel * scale
    };
    for u in [1e-3, 1.0, 7.5, 1e3] {
        for &t in ts {
            let v = t * u;
            count += 1;
            if !(check_a(u, v) && check_b(u, v)) {
                bad += 1;
            }
        }
    }
    for v in [-2.0f64, -1e-3, 1e-3, 2.0] {
        count += 1;
        let ok_a = v.abs().powf(s) <= d * v.abs().powf(s) * (1.0 + rel);
        let ok_b = v.abs().powf(q - 2.0) <= e * v.abs().powf(q - 2.0) * (1.0 + rel);
        if !(ok_a && ok_b) {
            bad += 1;
        }
    }
    (bad, count)
}
