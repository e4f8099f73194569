//! File formats: potential and interval-set JSON, the CSV tables, and the
//! Gaussian distance report.
//!
//! Floats are written with Rust's shortest round-trip formatting (scientific
//! outside `[1e-4, 1e15)`), so equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::ExpansionReport;
use crate::gaussians::DistResult;
use crate::hy::SweepReport;
use crate::linear::{linear_ft, max_truncated_ft};
use crate::potential::{IntervalSet, PiecewisePotential};
use crate::scattering::ScatteringData;

/// Shortest round-trip decimal, scientific for very small or large values.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input { path: path.display().to_string(), msg: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| Error::Input { path: path.display().to_string(), msg: e.to_string() })
}

pub fn read_potential(path: &Path) -> Result<PiecewisePotential> {
    read_json(path)
}

pub fn read_intervals(path: &Path) -> Result<IntervalSet> {
    read_json(path)
}

pub fn potential_json(f: &PiecewisePotential) -> String {
    serde_json::to_string_pretty(f).expect("potential serializes")
}

/// `xi,re_a,im_a,re_b,im_b,log_a2`
pub fn transform_csv(d: &ScatteringData) -> String {
    let mut s = String::from("xi,re_a,im_a,re_b,im_b,log_a2\n");
    for j in 0..d.len() {
        let (a, b) = (d.a[j], d.b[j]);
        writeln!(s, "{},{},{},{},{},{}", num(d.xi[j]), num(a.re), num(a.im), num(b.re), num(b.im), num(d.log_a2(j)))
            .unwrap();
    }
    s
}

/// `xi,abs_fhat,fstar,fstar_err`, with `fstar` the upper end of the
/// certified bracket.
pub fn linear_csv(f: &PiecewisePotential, xis: &[f64], refine: usize) -> Result<String> {
    let mut s = String::from("xi,abs_fhat,fstar,fstar_err\n");
    for &xi in xis {
        let m = max_truncated_ft(f, xi, refine)?;
        writeln!(s, "{},{},{},{}", num(xi), num(linear_ft(f, xi).norm()), num(m.upper()), num(m.error_bound)).unwrap();
    }
    Ok(s)
}

/// `xi,log_a2,fhat_sq,q_op,e_residual,bound_q,bound_e`
pub fn expansion_csv(rep: &ExpansionReport) -> String {
    let mut s = String::from("xi,log_a2,fhat_sq,q_op,e_residual,bound_q,bound_e\n");
    for r in &rep.rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(r.xi),
            num(r.log_a2),
            num(r.fhat_sq),
            num(r.q_op),
            num(r.e_residual),
            num(r.bound_q),
            num(r.bound_e)
        )
        .unwrap();
    }
    s
}

/// `c,l1,lp,linear_ratio,nonlinear_ratio,deficit,altineq_slack`
pub fn sweep_csv(rep: &SweepReport) -> String {
    let mut s = String::from("c,l1,lp,linear_ratio,nonlinear_ratio,deficit,altineq_slack\n");
    for row in &rep.rows {
        let r = &row.report;
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            num(row.c),
            num(r.l1),
            num(r.lp),
            num(r.linear_ratio),
            num(r.nonlinear_ratio),
            num(r.deficit),
            num(r.altineq_slack)
        )
        .unwrap();
    }
    s
}

#[derive(Serialize)]
struct DistGaussian {
    c: [f64; 2],
    alpha: f64,
    v: [f64; 2],
}

#[derive(Serialize)]
struct DistFile {
    dist: f64,
    gaussian: DistGaussian,
    starts: usize,
}

/// `{"dist":d,"gaussian":{"c":[re,im],"alpha":a,"v":[re,im]},"starts":k}`
pub fn dist_json(r: &DistResult) -> String {
    let g = &r.best;
    let file = DistFile {
        dist: r.dist,
        gaussian: DistGaussian { c: [g.c.re, g.c.im], alpha: g.alpha, v: [g.v.re, g.v.im] },
        starts: r.starts,
    };
    serde_json::to_string(&file).expect("dist report serializes")
}
