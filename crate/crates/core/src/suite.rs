//! The invariant suite behind `verify`: symmetry rules, conservation,
//! Riemann–Lebesgue, the RK4 oracle, truncation, Plancherel, the
//! ℱ⋆-domination bounds and the elementary-inequality constants, each with a
//! tolerance and a reported margin.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::functionals::{default_t_grid, expansion_report, lemma_numeric_check, ExpansionOptions};
use crate::hy::{nonlinear_ratio, HYOptions};
use crate::potential::{PiecewisePotential, RandomFamily, Symmetry};
use crate::scattering::{nlft_at, nlft_ode_oracle, nlft_points, truncation_convergence, ScatterOptions, SpectralGrid};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random potentials drawn for the scattering checks.
    pub potentials: usize,
    pub xi_max: f64,
    pub xi_count: usize,
    /// Potentials (a prefix of the random draw) also run through the RK4
    /// and expansion checks.
    pub heavy_potentials: usize,
    pub oracle_step: f64,
    pub plancherel_p: f64,
    pub plancherel_potentials: usize,
    pub lemma_q: Vec<f64>,
    /// Negative control passed through to the scattering transform.
    pub phase_fault: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            potentials: 12,
            xi_max: 4.0,
            xi_count: 41,
            heavy_potentials: 3,
            oracle_step: 1e-3,
            plancherel_p: 1.999,
            plancherel_potentials: 3,
            lemma_q: vec![2.5, 3.0, 4.0, 6.0],
            phase_fault: false,
            exec: Exec::default(),
        }
    }
}

/// One named check: passes when `observed ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, tolerance: f64) -> Self {
        Self { name: name.into(), observed, tolerance, passed: observed <= tolerance }
    }

    pub fn margin(&self) -> f64 {
        self.tolerance - self.observed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }

    /// One line per check.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            writeln!(
                s,
                "{} {:<28} observed={:.6e} tol={:.1e} margin={:.6e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.tolerance,
                c.margin()
            )
            .unwrap();
        }
        s
    }
}

fn suite_family() -> RandomFamily {
    RandomFamily { max_layers: 12, min_width: 0.05, max_width: 0.3, max_l1: 2.0 }
}

/// Seeded random potentials; every other one carries a modulation.
pub fn suite_potentials(seed: u64, n: usize) -> Vec<PiecewisePotential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fam = suite_family();
    (0..n)
        .map(|i| {
            let f = fam.sample(&mut rng);
            if i % 2 == 1 {
                let xi0 = rng.gen_range(-1.0..1.0);
                f.with_modulation(xi0)
            } else {
                f
            }
        })
        .collect()
}

fn max_over<T, F: Fn(&T) -> f64>(items: &[T], f: F) -> f64 {
    items.iter().map(f).fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

fn dist(x: (C64, C64), y: (C64, C64)) -> f64 {
    (x.0 - y.0).norm().max((x.1 - y.1).norm())
}

/// Symmetry parameters drawn per potential.
struct SymParams {
    theta: f64,
    xi0: f64,
    x0: f64,
    lambda: f64,
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fs = suite_potentials(cfg.seed, cfg.potentials);
    let grid = SpectralGrid::new(cfg.xi_max, cfg.xi_count)?;
    let xis = grid.nodes();
    let opts = ScatterOptions { exec: Exec::Sequential, phase_fault: cfg.phase_fault, ..Default::default() };
    let exec = cfg.exec;
    let heavy = &fs[..cfg.heavy_potentials.min(fs.len())];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let params: Vec<SymParams> = fs
        .iter()
        .map(|_| SymParams {
            theta: rng.gen_range(-3.0..3.0),
            xi0: rng.gen_range(-2.0..2.0),
            x0: rng.gen_range(-3.0..3.0),
            lambda: rng.gen_range(0.5..2.0),
        })
        .collect();
    let mut checks = Vec::new();

    let data = exec.map_slice(&fs, |f| nlft_points(f, &xis, &opts));
    checks.push(Check::new("conservation", max_over(&data, |d| d.conservation_defect()), 1e-10));
    let rl = fs.iter().zip(&data).map(|(f, d)| d.max_log_a_plus_b() - f.l1_norm()).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::new("riemann_lebesgue", rl, 1e-12));
    let refl = fs
        .iter()
        .zip(&data)
        .map(|(f, d)| {
            let bound = (2.0 * f.l1_norm()).min(1.0);
            (0..d.len()).map(|j| d.r(j).norm() - bound).fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::new("reflection_bound", refl, 1e-14));

    let idx: Vec<usize> = (0..fs.len()).collect();
    let sym = |rule: &str, i: usize| -> Result<f64> {
        let f = &fs[i];
        let p = &params[i];
        let mut worst = 0.0f64;
        match rule {
            "unimodular" => {
                let g = f.apply_symmetry(Symmetry::Unimodular { theta: p.theta })?;
                let u = C64::from_polar(1.0, p.theta);
                for (j, &xi) in xis.iter().enumerate() {
                    worst = worst.max(dist(nlft_at(&g, xi, &opts), (data[i].a[j], u * data[i].b[j])));
                }
            }
            "translation" => {
                let g = f.apply_symmetry(Symmetry::Translation { x0: p.x0 })?;
                for (j, &xi) in xis.iter().enumerate() {
                    let phase = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * p.x0 * xi);
                    worst = worst.max(dist(nlft_at(&g, xi, &opts), (data[i].a[j], phase * data[i].b[j])));
                }
            }
            "dilation" => {
                let g = f.apply_symmetry(Symmetry::Dilation { lambda: p.lambda })?;
                for &xi in &xis {
                    worst = worst.max(dist(nlft_at(&g, xi, &opts), nlft_at(f, p.lambda * xi, &opts)));
                }
            }
            "conjugation" => {
                let g = f.apply_symmetry(Symmetry::Conjugation)?;
                for &xi in &xis {
                    let (a1, b1) = nlft_at(f, -xi, &opts);
                    worst = worst.max(dist(nlft_at(&g, xi, &opts), (a1.conj(), b1.conj())));
                }
            }
            "additivity" => {
                let bps = f.breakpoints();
                let (left, right) = f.split_at(bps[bps.len() / 2])?;
                for &xi in &xis {
                    let (a1, b1) = nlft_at(&left, xi, &opts);
                    let (a2, b2) = nlft_at(&right, xi, &opts);
                    let composed = (a1 * a2 + b1 * b2.conj(), a1 * b2 + b1 * a2.conj());
                    worst = worst.max(dist(nlft_at(f, xi, &opts), composed));
                }
            }
            _ => unreachable!(),
        }
        Ok(worst)
    };
    for rule in ["unimodular", "translation", "dilation", "conjugation", "additivity"] {
        let vals = exec.map_slice(&idx, |&i| sym(rule, i));
        let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
        checks.push(Check::new(format!("symmetry.{rule}"), max_over(&vals, |v| *v), 1e-9));
    }

    // the modulated side comes from pointwise RK4 on e^{2πixξ₀}f
    let ode_xis: Vec<f64> = xis.iter().copied().step_by(4).collect();
    let fine = (cfg.oracle_step / 4.0).min(heavy.iter().filter_map(|f| f.min_width()).fold(f64::INFINITY, f64::min));
    let modulation = exec.map_slice(&idx[..heavy.len()], |&i| -> Result<f64> {
        let g = fs[i].apply_symmetry(Symmetry::Modulation { xi0: params[i].xi0 })?;
        let mut worst = 0.0f64;
        for &xi in &ode_xis {
            let lhs = nlft_ode_oracle(&g, xi, fine)?;
            worst = worst.max(dist(lhs, nlft_at(&fs[i], xi - params[i].xi0, &opts)));
        }
        Ok(worst)
    });
    let modulation: Vec<f64> = modulation.into_iter().collect::<Result<_>>()?;
    checks.push(Check::new("symmetry.modulation", max_over(&modulation, |v| *v), 1e-9));

    let oracle = exec.map_slice(heavy, |f| -> Result<f64> {
        let mut worst = 0.0f64;
        for &xi in &ode_xis {
            worst = worst.max(dist(nlft_ode_oracle(f, xi, cfg.oracle_step)?, nlft_at(f, xi, &opts)));
        }
        Ok(worst)
    });
    let oracle: Vec<f64> = oracle.into_iter().collect::<Result<_>>()?;
    checks.push(Check::new("rk4_oracle", max_over(&oracle, |v| *v), 1e-8));

    // differences must vanish once the window covers the support
    let coarse = SpectralGrid::new(cfg.xi_max, 21)?;
    let mut trunc = 0.0f64;
    for f in heavy {
        let (a, b) = f.support().expect("random potentials are nonzero");
        let rmax = a.abs().max(b.abs());
        let radii: Vec<f64> = (1..=8).map(|i| rmax * i as f64 / 6.0).collect();
        for row in truncation_convergence(f, &coarse, &radii)? {
            if row.radius >= rmax {
                trunc = trunc.max(row.sup_diff);
            }
        }
    }
    checks.push(Check::new("truncation", trunc, 0.0));

    let hy = HYOptions { rtol: 1e-3, exec, ..Default::default() };
    let mut planch = 0.0f64;
    for f in fs.iter().take(cfg.plancherel_potentials) {
        let rep = nonlinear_ratio(f, cfg.plancherel_p, &hy)?;
        planch = planch.max((rep.nonlinear_q.value / f.l2_norm() - 1.0).abs());
    }
    checks.push(Check::new("plancherel", planch, 1e-2));

    let eopts = ExpansionOptions { exec, ..Default::default() };
    let (mut dq, mut de) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for f in heavy {
        let rep = expansion_report(f, &xis, &eopts)?;
        for r in &rep.rows {
            dq = dq.max(r.q_op.abs() - r.bound_q);
            de = de.max(r.e_residual.abs() - r.bound_e);
        }
    }
    checks.push(Check::new("domination.quartic", dq, eopts.tol));
    checks.push(Check::new("domination.error", de, eopts.tol));

    let tgrid = default_t_grid();
    for &q in &cfg.lemma_q {
        let rep = lemma_numeric_check(q, &tgrid)?;
        let finite = rep.d_q.is_finite() && rep.e_q.is_finite();
        let observed = if rep.violations == 0 && finite { rep.limit_error() } else { f64::INFINITY };
        checks.push(Check::new(format!("lemma.q={q}"), observed, 1e-6));
    }

    Ok(SuiteReport { config: cfg.clone(), checks })
}
