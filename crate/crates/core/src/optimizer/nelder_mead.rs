//! Unconstrained Nelder-Mead with dimension-adaptive coefficients
//! (Gao & Han, 2012).

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Stop once every vertex is within `xtol` of the best one (inf-norm)...
    pub xtol: f64,
    /// ...and the spread of values is below `ftol`.
    pub ftol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_evals: 4000, xtol: 1e-10, ftol: 1e-15 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
}

impl NelderMead {
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64], step: f64) -> Minimum {
        let n = x0.len();
        let nf = n as f64;
        let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
        let rho = 0.75 - 1.0 / (2.0 * nf);
        let sigma = 1.0 - 1.0 / nf;

        let evals = std::cell::Cell::new(0usize);
        let eval = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += step;
            let fx = eval(&x);
            simplex.push((x, fx));
        }

        let mut centroid = vec![0.0; n];
        let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
            c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect()
        };

        while evals.get() < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= self.xtol && (worst - best).abs() <= self.ftol {
                break;
            }

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }

            let xr = point(&centroid, &simplex[n].0, alpha);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = point(&centroid, &simplex[n].0, alpha * gamma);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = point(&centroid, &simplex[n].0, alpha * rho);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = point(&centroid, &simplex[n].0, -rho);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
                continue;
            }
            let x_best = simplex[0].0.clone();
            for (x, fx) in simplex.iter_mut().skip(1) {
                for (xi, bi) in x.iter_mut().zip(&x_best) {
                    *xi = bi + sigma * (*xi - bi);
                }
                *fx = eval(x);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, fx) = simplex.swap_remove(0);
        Minimum { x, fx, evals: evals.get() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let nm = NelderMead { max_evals: 20_000, ..Default::default() };
        let m = nm.minimize(|x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), &[-1.2, 1.0], 0.5);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn quadratic_seven_dims() {
        let nm = NelderMead { max_evals: 50_000, ..Default::default() };
        let target = [0.3, -1.0, 2.0, 0.0, 1.5, -0.7, 0.9];
        let m = nm.minimize(
            |x| x.iter().zip(&target).enumerate().map(|(i, (a, b))| (i + 1) as f64 * (a - b).powi(2)).sum(),
            &[0.0; 7],
            1.0,
        );
        for (a, b) in m.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn respects_eval_budget() {
        let nm = NelderMead { max_evals: 50, ..Default::default() };
        let m = nm.minimize(|x| x.iter().map(|v| v.abs()).sum(), &[5.0, 5.0, 5.0], 1.0);
        // The last shrink may overshoot the budget by at most n evaluations.
        assert!(m.evals <= 50 + 3);
    }
}
