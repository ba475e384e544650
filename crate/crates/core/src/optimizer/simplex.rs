//! Nelder–Mead simplex descent.

/// Best vertex found and the iterations spent.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimize `f` from `x0` with an axis-aligned initial simplex of the given
/// step sizes. Stops when the spread of vertex values drops to `tol` and a
/// restart around the best vertex brings no further improvement, or after
/// `max_iters` iterations. The best vertex never gets worse, so the result
/// is no worse than `f(x0)`.
pub fn nelder_mead<F>(f: F, x0: &[f64], steps: &[f64], max_iters: usize, tol: f64) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 {
        return SimplexResult {
            x: Vec::new(),
            value: f(x0),
            iterations: 0,
            converged: true,
        };
    }
    let mut best_x = x0.to_vec();
    let mut best_f = f(x0);
    let mut iterations = 0;
    let mut scale = 1.0;
    let mut converged = false;

    while iterations < max_iters {
        let (x, fx, used, conv) = run(
            &f,
            &best_x,
            best_f,
            steps,
            scale,
            max_iters - iterations,
            tol,
        );
        iterations += used;
        let improved = fx < best_f - tol;
        if fx <= best_f {
            best_x = x;
            best_f = fx;
        }
        if !conv {
            break;
        }
        if !improved {
            converged = true;
            break;
        }
        // restart from the best vertex with a smaller simplex
        scale *= 0.5;
    }
    SimplexResult {
        x: best_x,
        value: best_f,
        iterations,
        converged,
    }
}

#[allow(clippy::type_complexity)]
fn run<F>(
    f: &F,
    x0: &[f64],
    f0: f64,
    steps: &[f64],
    scale: f64,
    budget: usize,
    tol: f64,
) -> (Vec<f64>, f64, usize, bool)
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i] * scale;
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut it = 0;
    while it < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread <= tol || !spread.is_finite() && simplex[0].1 == simplex[n].1 {
            return (simplex[0].0.clone(), simplex[0].1, it, true);
        }
        it += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v.0[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(EXPAND);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(CONTRACT * REFLECT);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            for (x, b) in v.0.iter_mut().zip(&best) {
                *x = b + SHRINK * (*x - b);
            }
            v.1 = f(&v.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), simplex[0].1, it, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0], &[0.5, 0.5], 2000, 1e-16);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], 5000, 1e-18);
        assert!(
            (r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5,
            "{:?}",
            r
        );
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[0].powi(2) * 0.1;
        for s in [-3.0, -1.0, 0.0, 2.5] {
            let r = nelder_mead(f, &[s], &[0.3], 50, 1e-12);
            assert!(r.value <= f(&[s]));
        }
    }

    #[test]
    fn respects_iteration_budget() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum();
        let r = nelder_mead(f, &[5.0; 6], &[0.1; 6], 10, 0.0);
        assert!(r.iterations <= 10);
        assert!(!r.converged);
    }
}
