//! Derivative-free local maximization (Nelder-Mead on a box).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub initial_step: f64,
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead {
            initial_step: 0.05,
            tol: 1e-6,
            max_evals: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(*lo, *hi);
    }
}

impl NelderMead {
    /// Maximizes `f` from `start`, keeping every trial point inside the box
    /// `[lower, upper]`. Stops when the spread of simplex values and the
    /// simplex diameter both fall below `tol`.
    pub fn maximize(
        &self,
        f: impl Fn(&[f64]) -> f64,
        start: &[f64],
        lower: &[f64],
        upper: &[f64],
    ) -> LocalOptimum {
        let n = start.len();
        assert!(lower.len() == n && upper.len() == n, "bounds must match the start point");
        let evals = std::cell::Cell::new(0usize);
        // minimize -f
        let eval = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_finite() {
                -v
            } else {
                f64::INFINITY
            }
        };

        let mut x0 = start.to_vec();
        clamp_into(&mut x0, lower, upper);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(&x0);
        simplex.push((x0.clone(), v0));
        for i in 0..n {
            let mut xi = x0.clone();
            let width = upper[i] - lower[i];
            let step = self.initial_step * if width.is_finite() { width } else { 1.0 };
            xi[i] += step;
            if xi[i] > upper[i] {
                xi[i] = x0[i] - step;
            }
            clamp_into(&mut xi, lower, upper);
            let v = eval(&xi);
            simplex.push((xi, v));
        }

        let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[n].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if (spread.abs() < self.tol && diameter < self.tol) || evals.get() >= self.max_evals {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect();
                clamp_into(&mut p, lower, upper);
                p
            };

            let xr = along(-alpha);
            let vr = eval(&xr);
            if vr < simplex[0].1 {
                let xe = along(-gamma);
                let ve = eval(&xe);
                simplex[n] = if ve < vr { (xe, ve) } else { (xr, vr) };
            } else if vr < simplex[n - 1].1 {
                simplex[n] = (xr, vr);
            } else {
                let (xc, vc) = if vr < simplex[n].1 {
                    let xc = along(-rho);
                    let vc = eval(&xc);
                    (xc, vc)
                } else {
                    let xc = along(rho);
                    let vc = eval(&xc);
                    (xc, vc)
                };
                if vc < simplex[n].1.min(vr) {
                    simplex[n] = (xc, vc);
                } else {
                    let best = simplex[0].0.clone();
                    for (x, v) in simplex[1..].iter_mut() {
                        for (xi, bi) in x.iter_mut().zip(&best) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        *v = eval(x);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, v) = simplex.swap_remove(0);
        LocalOptimum {
            x,
            value: -v,
            evals: evals.get(),
        }
    }
}
