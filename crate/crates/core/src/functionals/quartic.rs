//! The quartic operator 𝒬 and its quadrilinear polarization Φ.
//!
//! Both integrate over the corner region `{x₁∧x₂ > x₃∨x₄}`. Integrating
//! `x₁, x₂` above `u = x₃∨x₄` gives tail factors `T(u) = ∫_u^∞ F`, and the
//! remaining pair collapses to a single integral in `u`, where
//! `F(x) = f(x) e^{-2πixξ}`:
//!
//! `𝒬f(ξ) = Re ∫ 2 F̄(u) C(u) T(u)² du`, with `C(u) = ∫_{-∞}^u F̄`.
//!
//! On each layer the integrand is a trigonometric polynomial in
//! `e^{2πiuω}` with frequencies between `-ω` and `2ω`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{param, Result};
use crate::linear::PrefixCurve;
use crate::numeric::{KahanSum, GL12, GL16};
use crate::potential::{common_breakpoints, PiecewisePotential};

const MAX_DEPTH: u32 = 24;

/// `∫_a^b g` to absolute accuracy `tol`: panels of at most one period of
/// the highest frequency `freq` (cycles per unit length), bisected while the
/// embedded 16/12-point difference exceeds the panel's share of `tol`.
pub(crate) fn integrate_oscillatory<G: Fn(f64) -> f64>(
    a: f64,
    b: f64,
    freq: f64,
    tol: f64,
    total_len: f64,
    g: &G,
) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    let panels = ((freq.abs() * len).ceil() as usize).max(1);
    let w = len / panels as f64;
    let mut acc = KahanSum::new();
    for j in 0..panels {
        let lo = a + w * j as f64;
        let hi = if j + 1 == panels { b } else { lo + w };
        acc.add(adaptive_panel(lo, hi, tol * (hi - lo) / total_len, g, MAX_DEPTH));
    }
    acc.value()
}

fn adaptive_panel<G: Fn(f64) -> f64>(a: f64, b: f64, tol: f64, g: &G, depth: u32) -> f64 {
    let fine = GL16.integrate(a, b, g);
    let coarse = GL12.integrate(a, b, g);
    if (fine - coarse).abs() <= tol || depth == 0 {
        return fine;
    }
    let m = 0.5 * (a + b);
    adaptive_panel(a, m, 0.5 * tol, g, depth - 1) + adaptive_panel(m, b, 0.5 * tol, g, depth - 1)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(param("quadrature tolerance must be positive"));
    }
    Ok(())
}

/// `𝒬f(ξ)` to absolute accuracy `tol`.
pub fn quartic_q(f: &PiecewisePotential, xi: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let Some((lo, hi)) = f.support() else {
        return Ok(0.0);
    };
    let omega = xi - f.modulation();
    let curve = PrefixCurve::new(f, xi);
    let total = curve.total();
    let len = hi - lo;
    let mut acc = KahanSum::new();
    for (k, l) in f.layers().enumerate() {
        if l.value == C64::default() {
            continue;
        }
        let left = l.left;
        let g = |u: f64| {
            let prefix = curve.in_layer(k, u - left);
            let t = total - prefix;
            let fbar = l.value.conj() * C64::from_polar(1.0, 2.0 * PI * u * omega);
            2.0 * (fbar * prefix.conj() * t * t).re
        };
        acc.add(integrate_oscillatory(l.left, l.right, 2.0 * omega, tol, len, &g));
    }
    Ok(acc.value())
}

/// `Φ(f₁, f₂, f₃, f₄)(ξ) = Re ∫ [F̄₃C₄ + F̄₄C₃](u) T₁(u) T₂(u) du` on the
/// merged breakpoints, each `Fⱼ` using its own modulation.
pub fn phi_quadrilinear(
    f1: &PiecewisePotential,
    f2: &PiecewisePotential,
    f3: &PiecewisePotential,
    f4: &PiecewisePotential,
    xi: f64,
    tol: f64,
) -> Result<f64> {
    check_tol(tol)?;
    let fs = [f1, f2, f3, f4];
    if fs.iter().any(|f| f.is_zero()) {
        return Ok(0.0);
    }
    let bps = common_breakpoints(&fs);
    let (lo, hi) = (bps[0], bps[bps.len() - 1]);
    let curves: Vec<PrefixCurve> = fs.iter().map(|f| PrefixCurve::new(f, xi)).collect();
    let totals: Vec<C64> = curves.iter().map(|c| c.total()).collect();
    let freq = fs.iter().map(|f| (xi - f.modulation()).abs()).fold(0.0, f64::max) * 2.0;
    let g = |u: f64| {
        let tail = |j: usize| totals[j] - curves[j].value_at(u);
        let fbar = |j: usize| (fs[j].value_at(u) * C64::from_polar(1.0, -2.0 * PI * u * xi)).conj();
        let c3 = curves[2].value_at(u).conj();
        let c4 = curves[3].value_at(u).conj();
        ((fbar(2) * c4 + fbar(3) * c3) * tail(0) * tail(1)).re
    };
    let mut acc = KahanSum::new();
    for w in bps.windows(2) {
        acc.add(integrate_oscillatory(w[0], w[1], freq, tol, hi - lo, &g));
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::GaussLegendre;
    use crate::potential::RandomFamily;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Nested Gauss–Legendre over the ordered simplex
    /// `x₃ < x₄ < x₁ < x₂`, split at every breakpoint. The corner region is
    /// four copies of it (swap `x₁↔x₂`, `x₃↔x₄`).
    fn brute_force_q(f: &PiecewisePotential, xi: f64, n: usize) -> f64 {
        let gl = GaussLegendre::new(n);
        let bps = f.breakpoints().to_vec();
        let big_f = |x: f64| f.value_at(x) * C64::from_polar(1.0, -2.0 * PI * x * xi);
        let pieces = |a: f64, b: f64| -> Vec<(f64, f64)> {
            let mut cuts = vec![a];
            cuts.extend(bps.iter().copied().filter(|&x| x > a && x < b));
            cuts.push(b);
            cuts.windows(2).map(|w| (w[0], w[1])).collect()
        };
        let (lo, hi) = (bps[0], bps[bps.len() - 1]);
        let mut total = C64::default();
        for (a2, b2) in pieces(lo, hi) {
            for (x2, w2) in gl.mapped(a2, b2) {
                let f2 = big_f(x2);
                for (a1, b1) in pieces(lo, x2) {
                    for (x1, w1) in gl.mapped(a1, b1) {
                        let f1 = big_f(x1);
                        for (a4, b4) in pieces(lo, x1) {
                            for (x4, w4) in gl.mapped(a4, b4) {
                                let f4 = big_f(x4).conj();
                                for (a3, b3) in pieces(lo, x4) {
                                    for (x3, w3) in gl.mapped(a3, b3) {
                                        total += w2 * w1 * w4 * w3 * f2 * f1 * f4 * big_f(x3).conj();
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        4.0 * total.re
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_and_box() {
        assert_eq!(quartic_q(&PiecewisePotential::zero(), 0.3, 1e-12).unwrap(), 0.0);
        let b = PiecewisePotential::constant(0.0, 1.0, c(1.0, 0.0)).unwrap();
        assert!((quartic_q(&b, 0.0, 1e-13).unwrap() - 1.0 / 6.0).abs() < 1e-13);
        assert!((brute_force_q(&b, 0.0, 6) - 1.0 / 6.0).abs() < 1e-13);
        assert!(quartic_q(&b, 0.0, 0.0).is_err());
    }

    #[test]
    fn matches_brute_force_oracle() {
        let fs = [
            PiecewisePotential::new(vec![0.0, 0.4, 1.1], vec![c(0.7, 0.2), c(-0.3, 0.9)]).unwrap(),
            PiecewisePotential::new(vec![-0.5, 0.0, 0.3, 0.8], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.4, -0.6)]).unwrap(),
            PiecewisePotential::constant(0.2, 0.9, c(0.5, 0.5)).unwrap().with_modulation(0.4),
        ];
        for f in &fs {
            for xi in [0.0, 0.3, -0.3, 1.0, -1.0] {
                let q = quartic_q(f, xi, 1e-13).unwrap();
                let o1 = brute_force_q(f, xi, 10);
                let o2 = brute_force_q(f, xi, 14);
                let oracle_err = (o1 - o2).abs();
                assert!((q - o2).abs() <= 1e-8f64.max(oracle_err), "xi={xi}: {q} vs {o2} (±{oracle_err})");
            }
        }
    }

    #[test]
    fn homogeneity_and_polarization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = RandomFamily { max_layers: 8, ..Default::default() };
        for _ in 0..5 {
            let f = fam.sample(&mut rng);
            for xi in [-1.3, 0.0, 0.7] {
                let q = quartic_q(&f, xi, 1e-14).unwrap();
                let q2 = quartic_q(&f.scaled(c(2.0, 0.0)), xi, 1e-14).unwrap();
                assert!((q2 - 16.0 * q).abs() <= 1e-10 * (1.0 + q.abs()), "{q2} vs {}", 16.0 * q);
                let phi = phi_quadrilinear(&f, &f, &f, &f, xi, 1e-14).unwrap();
                assert!((phi - q).abs() < 1e-10, "{phi} vs {q}");
            }
        }
    }

    #[test]
    fn phi_is_multilinear_and_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fam = RandomFamily { max_layers: 6, ..Default::default() };
        let fs: Vec<PiecewisePotential> = (0..5).map(|_| fam.sample(&mut rng)).collect();
        let z = PiecewisePotential::zero();
        assert_eq!(phi_quadrilinear(&fs[0], &z, &fs[1], &fs[2], 0.2, 1e-12).unwrap(), 0.0);
        let xi = 0.45;
        // additivity in the third slot, with the sum built on merged breakpoints
        let sum = fs[2].sum(&fs[4]).unwrap();
        let lhs = phi_quadrilinear(&fs[0], &fs[1], &sum, &fs[3], xi, 1e-14).unwrap();
        let rhs = phi_quadrilinear(&fs[0], &fs[1], &fs[2], &fs[3], xi, 1e-14).unwrap()
            + phi_quadrilinear(&fs[0], &fs[1], &fs[4], &fs[3], xi, 1e-14).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);

        let fstar = |f: &PiecewisePotential| crate::linear::max_truncated_ft(f, xi, 64).unwrap().upper();
        let phi = phi_quadrilinear(&fs[0], &fs[1], &fs[2], &fs[3], xi, 1e-14).unwrap().abs();
        assert!(phi <= fs[0].l1_norm() * fs[1].l1_norm() * fstar(&fs[2]) * fstar(&fs[3]) + 1e-12);
        assert!(phi <= fs[2].l1_norm() * fs[3].l1_norm() * fstar(&fs[0]) * fstar(&fs[1]) + 1e-12);
    }
}
