//! Derivative-free Nelder–Mead minimizer.

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Initial simplex edge along each coordinate.
    pub scale: Vec<f64>,
    pub max_evals: usize,
    /// Stop when the spread of simplex values drops below
    /// `ftol_abs + ftol_rel·|f_best|` and the simplex is smaller than `xtol`.
    pub ftol_abs: f64,
    pub ftol_rel: f64,
    pub xtol: f64,
    /// Rebuild the simplex around the best point this many times after
    /// convergence; guards against a collapsed simplex.
    pub restarts: usize,
}

impl NelderMeadOptions {
    pub fn new(dim: usize) -> Self {
        Self { scale: vec![0.1; dim], max_evals: 20_000, ftol_abs: 1e-14, ftol_rel: 1e-12, xtol: 1e-10, restarts: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(opts.scale.len(), dim, "scale length must match dimension");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x, &mut evals);
    let mut converged = false;

    for round in 0..=opts.restarts {
        let shrink_scale = if round == 0 { 1.0 } else { 0.1f64.powi(round as i32) };
        let mut simplex: Vec<Vec<f64>> = vec![best_x.clone()];
        let mut values = vec![best_f];
        for i in 0..dim {
            let mut x = best_x.clone();
            x[i] += opts.scale[i] * shrink_scale;
            values.push(eval(&x, &mut evals));
            simplex.push(x);
        }
        converged = false;
        while evals < opts.max_evals {
            let mut order: Vec<usize> = (0..=dim).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[dim] - values[0];
            let size = simplex[1..]
                .iter()
                .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= opts.ftol_abs + opts.ftol_rel * values[0].abs() && size <= opts.xtol {
                converged = true;
                break;
            }

            let centroid: Vec<f64> =
                (0..dim).map(|j| simplex[..dim].iter().map(|x| x[j]).sum::<f64>() / dim as f64).collect();
            let along =
                |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (w - c)).collect() };

            let xr = along(-1.0);
            let fr = eval(&xr, &mut evals);
            if fr < values[0] {
                let xe = along(-2.0);
                let fe = eval(&xe, &mut evals);
                if fe < fr {
                    simplex[dim] = xe;
                    values[dim] = fe;
                } else {
                    simplex[dim] = xr;
                    values[dim] = fr;
                }
            } else if fr < values[dim - 1] {
                simplex[dim] = xr;
                values[dim] = fr;
            } else {
                let (xc, fc) = if fr < values[dim] {
                    let xc = along(-0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(0.5);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < values[dim].min(fr) {
                    simplex[dim] = xc;
                    values[dim] = fc;
                } else {
                    for i in 1..=dim {
                        let x: Vec<f64> = simplex[i].iter().zip(&simplex[0]).map(|(a, b)| b + 0.5 * (a - b)).collect();
                        values[i] = eval(&x, &mut evals);
                        simplex[i] = x;
                    }
                }
            }
        }
        let (ib, fb) =
            values.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        if fb <= best_f {
            best_f = fb;
            best_x = simplex[ib].clone();
        }
        if evals >= opts.max_evals {
            break;
        }
    }
    NelderMeadResult { x: best_x, fx: best_f, evals, converged }
}
