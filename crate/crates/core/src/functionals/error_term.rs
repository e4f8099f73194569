//! The error operator ℰ in `log|a|² = |f̂|² - 𝒬f + ℰf`.
//!
//! With `R(x) = F(x) conj(r(x)²)`, `K(u) = ∫_{-∞}^u R`, and `C`, `T` as for 𝒬,
//! the two corner integrals reduce to
//!
//! `ℰf = 2 Re ∫ [F̄K + RC] T² du - Re ∫ 2 R K T² du`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{param, Result};
use crate::linear::{linear_ft, PrefixCurve};
use crate::numeric::{KahanSum, KahanSumC, GL16};
use crate::potential::PiecewisePotential;
use crate::scattering::{log_a2, nlft_at, LayerStates, ScatterOptions};

use super::quartic::quartic_q;

/// Tolerance used for 𝒬 inside the residual.
pub const RESIDUAL_Q_TOL: f64 = 1e-14;

/// `log|a(ξ)|² - |f̂(ξ)|² + 𝒬f(ξ)` from exact scattering and exact `f̂`.
pub fn error_e_residual(f: &PiecewisePotential, xi: f64) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    let (_, b) = nlft_at(f, xi, &ScatterOptions::sequential());
    let q = quartic_q(f, xi, RESIDUAL_Q_TOL).expect("positive tolerance");
    log_a2(b) - linear_ft(f, xi).norm_sqr() + q
}

/// Direct quadrature of the two ℰ integrals.
pub fn error_e_direct(f: &PiecewisePotential, xi: f64, tol: f64) -> Result<f64> {
    let (first, second) = error_e_terms(f, xi, tol)?;
    Ok(first - second)
}

/// The two ℰ integrals separately, `ℰf = first - second`. Panels per layer
/// double until two successive values agree to `tol`.
pub fn error_e_terms(f: &PiecewisePotential, xi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(param("quadrature tolerance must be positive"));
    }
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let states = LayerStates::new(f, xi);
    let curve = PrefixCurve::new(f, xi);
    let mut mult = 1;
    let mut prev = direct_with_panels(f, xi, &states, &curve, mult);
    for _ in 0..8 {
        mult *= 2;
        let next = direct_with_panels(f, xi, &states, &curve, mult);
        if (next.0 - prev.0).abs() + (next.1 - prev.1).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

fn direct_with_panels(
    f: &PiecewisePotential,
    xi: f64,
    states: &LayerStates,
    curve: &PrefixCurve,
    mult: usize,
) -> (f64, f64) {
    let omega = xi - f.modulation();
    let total = curve.total();
    let mut k_acc = KahanSumC::new();
    let mut first = KahanSum::new();
    let mut second = KahanSum::new();
    for (k, l) in f.layers().enumerate() {
        let big_f = |u: f64| l.value * C64::from_polar(1.0, -2.0 * PI * u * omega);
        let big_r = |u: f64| {
            let r = states.r_in_layer(k, l.left, l.value, u);
            big_f(u) * (r * r).conj()
        };
        let base = ((l.width() * (2.0 * omega.abs() + l.value.norm())).ceil() as usize).max(1);
        let panels = base * mult;
        let w = l.width() / panels as f64;
        for j in 0..panels {
            let a = l.left + w * j as f64;
            let b = if j + 1 == panels { l.right } else { a + w };
            let k_a = k_acc.value();
            let (mut p1, mut p2) = (0.0, 0.0);
            for (u, wu) in GL16.mapped(a, b) {
                let mut inner = KahanSumC::new();
                for (t, wt) in GL16.mapped(a, u) {
                    inner.add(wt * big_r(t));
                }
                let k_u = k_a + inner.value();
                let prefix = curve.in_layer(k, u - l.left);
                let c = prefix.conj();
                let t = total - prefix;
                let r_u = big_r(u);
                let term1 = 2.0 * ((big_f(u).conj() * k_u + r_u * c) * t * t).re;
                let term2 = 2.0 * (r_u * k_u * t * t).re;
                p1 += wu * term1;
                p2 += wu * term2;
            }
            first.add(p1);
            second.add(p2);
            let mut inc = KahanSumC::new();
            for (t, wt) in GL16.mapped(a, b) {
                inc.add(wt * big_r(t));
            }
            k_acc.add(inc.value());
        }
    }
    (first.value(), second.value())
}
