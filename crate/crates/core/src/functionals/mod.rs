//! Terms of the expansion `log|a(ξ)|² = |f̂(ξ)|² - 𝒬f(ξ) + ℰf(ξ)`, their
//! ℱ⋆-domination bounds, the functional ℋ, and the elementary inequalities
//! used to integrate the expansion.

mod error_term;
mod lemma;
mod quartic;

pub use error_term::{error_e_direct, error_e_residual, error_e_terms, RESIDUAL_Q_TOL};
pub use lemma::{default_t_grid, lemma_numeric_check, quotient_a, quotient_b, LemmaReport, QuotientLimits};
pub use quartic::{phi_quadrilinear, quartic_q};

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exec::Exec;
use crate::linear::{linear_ft, max_truncated_ft};
use crate::potential::PiecewisePotential;
use crate::scattering::{log_a2, nlft_at, ScatterOptions, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionRow {
    pub xi: f64,
    pub log_a2: f64,
    pub fhat_sq: f64,
    pub q_op: f64,
    pub e_residual: f64,
    pub e_direct: Option<f64>,
    /// Upper end of the certified ℱ⋆ bracket.
    pub fstar: f64,
    pub fstar_err: f64,
    pub bound_q: f64,
    pub bound_e: f64,
}

impl ExpansionRow {
    /// `| |f̂|² - 𝒬 + ℰ - log|a|² |`; zero up to rounding by construction.
    pub fn identity_error(&self) -> f64 {
        (self.fhat_sq - self.q_op + self.e_residual - self.log_a2).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub l1: f64,
    /// Absolute quadrature tolerance used for 𝒬 (and ℰ-direct).
    pub tol: f64,
    pub rows: Vec<ExpansionRow>,
}

impl ExpansionReport {
    pub fn max_identity_error(&self) -> f64 {
        self.rows.iter().map(ExpansionRow::identity_error).fold(0.0, f64::max)
    }

    /// Smallest `bound - |value| + tol` over all rows, for 𝒬 and ℰ.
    pub fn domination_margins(&self) -> (f64, f64) {
        let mq = self.rows.iter().map(|r| r.bound_q - r.q_op.abs() + self.tol).fold(f64::INFINITY, f64::min);
        let me = self.rows.iter().map(|r| r.bound_e - r.e_residual.abs() + self.tol).fold(f64::INFINITY, f64::min);
        (mq, me)
    }

    /// `max_ξ |log|a|² - |f̂|²|`
    pub fn sup_quartic_gap(&self) -> f64 {
        self.rows.iter().map(|r| (r.log_a2 - r.fhat_sq).abs()).fold(0.0, f64::max)
    }

    pub fn sup_e(&self) -> f64 {
        self.rows.iter().map(|r| r.e_residual.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionOptions {
    pub tol: f64,
    /// Interior samples per layer for the ℱ⋆ bracket.
    pub fstar_refine: usize,
    pub direct: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self { tol: 1e-13, fstar_refine: 64, direct: false, exec: Exec::default() }
    }
}

/// Every expansion term at each frequency.
pub fn expansion_report(f: &PiecewisePotential, xis: &[f64], opts: &ExpansionOptions) -> Result<ExpansionReport> {
    if !(opts.tol > 0.0) {
        return Err(param("quadrature tolerance must be positive"));
    }
    let l1 = f.l1_norm();
    let rows = opts.exec.map_slice(xis, |&xi| -> Result<ExpansionRow> {
        let (_, b) = nlft_at(f, xi, &ScatterOptions::sequential());
        let la2 = log_a2(b);
        let fhat_sq = linear_ft(f, xi).norm_sqr();
        let q_op = quartic_q(f, xi, opts.tol)?;
        let e_residual = la2 - fhat_sq + q_op;
        let e_direct = if opts.direct { Some(error_e_direct(f, xi, opts.tol.max(1e-12))?) } else { None };
        let fs = max_truncated_ft(f, xi, opts.fstar_refine)?;
        let fstar = fs.upper();
        Ok(ExpansionRow {
            xi,
            log_a2: la2,
            fhat_sq,
            q_op,
            e_residual,
            e_direct,
            fstar,
            fstar_err: fs.error_bound,
            bound_q: l1 * l1 * fstar * fstar,
            bound_e: 12.0 * l1.powi(4) * fstar * fstar,
        })
    });
    Ok(ExpansionReport { l1, tol: opts.tol, rows: rows.into_iter().collect::<Result<_>>()? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HReport {
    pub q: f64,
    /// Trapezoid value of `∫ 𝒬f(ξ) |f̂(ξ)|^{q-2} dξ` on the grid.
    pub value: f64,
    /// Estimate of `∫_{|ξ|>ξ_max} |𝒬f| |f̂|^{q-2}` from the `|ξ|^{-q}` envelope.
    pub tail: f64,
    pub grid: SpectralGrid,
}

/// `ℋ(f) = ∫ 𝒬f(ξ) |f̂(ξ)|^{q-2} dξ` with `q = p/(p-1)`.
pub fn h_functional(f: &PiecewisePotential, p: f64, grid: &SpectralGrid, tol: f64, exec: Exec) -> Result<HReport> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::Exponent(p, "need 1 < p < 2"));
    }
    let q = p / (p - 1.0);
    if f.is_zero() {
        return Ok(HReport { q, value: 0.0, tail: 0.0, grid: *grid });
    }
    let nodes = grid.nodes();
    let vals = exec
        .map_slice(&nodes, |&xi| -> Result<f64> { Ok(quartic_q(f, xi, tol)? * linear_ft(f, xi).norm().powf(q - 2.0)) });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let weights = grid.trapezoid_weights();
    let value = crate::numeric::ksum(vals.iter().zip(&weights).map(|(v, w)| v * w));
    let tail = tail_envelope(&nodes, &vals, q);
    Ok(HReport { q, value, tail, grid: *grid })
}

/// `∫_{|ξ|>X} g` for `|g| ≲ A|ξ|^{-decay}`, with `A` taken as the largest
/// `|g(ξ)| (|ξ|/X)^{decay}` over the outer quarter of each side.
pub(crate) fn tail_envelope(nodes: &[f64], vals: &[f64], decay: f64) -> f64 {
    let x = nodes.last().copied().unwrap_or(0.0).abs();
    if x == 0.0 || decay <= 1.0 {
        return f64::INFINITY;
    }
    let env = |side: f64| {
        nodes
            .iter()
            .zip(vals)
            .filter(|(n, _)| side * **n >= 0.75 * x)
            .map(|(n, v)| v.abs() * (n.abs() / x).powf(decay))
            .fold(0.0, f64::max)
    };
    (env(1.0) + env(-1.0)) * x / (decay - 1.0)
}
