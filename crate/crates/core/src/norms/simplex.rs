//! Nelder-Mead simplex search with standard coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
//!
//! Infinite objective values are allowed and simply rank last, which is how
//! infeasible (near-singular) parameters are rejected by callers.

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Stopped because the simplex collapsed, not because of the budget.
    pub converged: bool,
}

/// Minimizes `f` starting from a right-angled simplex of edge `step` at
/// `x0`. Stops when every vertex is within `xtol` of the best one or after
/// `max_evals` evaluations.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, max_evals: usize, xtol: f64) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
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

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() < dim + 1 {
        let (x, value) = best_of(simplex);
        return SimplexOutcome { x, value, evaluations: evals, converged: false };
    }

    let mut converged = false;
    while evals < max_evals {
        // stable sort keeps earlier vertices first on ties
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0_f64, f64::max);
        if diameter < xtol {
            converged = true;
            break;
        }

        let worst = simplex[dim].1;
        let second_worst = simplex[dim - 1].1;
        let best = simplex[0].1;
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[dim].0).map(|(c, w)| c + t * (w - c)).collect()
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < best {
            let expanded = along(-2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let c = along(-0.5);
            let v = eval(&c, &mut evals);
            (c, v)
        } else {
            let c = along(0.5);
            let v = eval(&c, &mut evals);
            (c, v)
        };
        if fc < worst.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if evals >= max_evals {
                break;
            }
            let x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + 0.5 * (v - a)).collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    let (x, value) = best_of(simplex);
    SimplexOutcome { x, value, evaluations: evals, converged }
}

fn best_of(simplex: Vec<(Vec<f64>, f64)>) -> (Vec<f64>, f64) {
    simplex
        .into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("simplex has at least one vertex")
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 5000, 1e-10);
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-6 && (out.x[1] - 1.0).abs() < 1e-6, "{out:?}");
    }

    #[test]
    fn respects_budget() {
        let out = nelder_mead(|x: &[f64]| x.iter().map(|v| v * v).sum(), &[3.0; 4], 1.0, 17, 1e-12);
        assert!(out.evaluations <= 17 + 1);
        assert!(!out.converged);
    }

    #[test]
    fn infinite_values_are_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::INFINITY } else { (x[0] - 0.5).abs() };
        let out = nelder_mead(f, &[2.0], 0.7, 500, 1e-12);
        assert!((out.x[0] - 0.5).abs() < 1e-9);
    }
}
