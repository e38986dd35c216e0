//! Derivative-free maximizers used to polish grid extrema.

use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimumTrace {
    pub best_x: Vec<f64>,
    pub best: f64,
    pub evaluations: usize,
    /// Best value after each improving evaluation.
    pub history: Vec<f64>,
}

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, budget: usize) -> Result<OptimumTrace>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = 2;
    let (mut best_x, mut best) = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut history = vec![best];
    while evals < budget && (b - a) > 1e-15 * (1.0 + a.abs() + b.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            if fc > best {
                best = fc;
                best_x = c;
                history.push(best);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            if fd > best {
                best = fd;
                best_x = d;
                history.push(best);
            }
        }
        evals += 1;
    }
    Ok(OptimumTrace { best_x: vec![best_x], best, evaluations: evals, history })
}

/// Nelder–Mead maximization started from the simplex `x0 + step_i e_i`.
///
/// Stops when the budget is spent or the simplex values agree to 1e-14
/// relative.
pub fn nelder_mead_max<F>(mut f: F, x0: &[f64], steps: &[f64], budget: usize) -> Result<OptimumTrace>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)?));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += steps[i];
        let v = f(&x)?;
        simplex.push((x, v));
    }
    let mut evals = dim + 1;
    let mut history = Vec::new();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let best = simplex[0].1;
        if history.last().is_none_or(|h| best > *h) {
            history.push(best);
        }
        let worst = simplex[dim].1;
        if evals >= budget || (best - worst).abs() <= 1e-14 * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, w)| c + t * (c - w)).collect()
        };
        let xr = along(alpha, &simplex[dim].0);
        let fr = f(&xr)?;
        evals += 1;
        if fr > simplex[0].1 {
            let xe = along(gamma, &simplex[dim].0);
            let fe = f(&xe)?;
            evals += 1;
            simplex[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let xc = along(-rho, &simplex[dim].0);
            let fc = f(&xc)?;
            evals += 1;
            if fc > simplex[dim].1 {
                simplex[dim] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = x_best.iter().zip(&entry.0).map(|(b, w)| b + sigma * (w - b)).collect();
                    let v = f(&x)?;
                    *entry = (x, v);
                }
                evals += dim;
            }
        }
    }
    let (best_x, best) = simplex.swap_remove(0);
    Ok(OptimumTrace { best_x, best, evaluations: evals, history })
}
