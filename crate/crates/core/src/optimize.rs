//! Derivative-free Nelder-Mead simplex minimisation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Objective evaluations allowed after the starting point.
    pub max_evaluations: usize,
    /// Offset of each extra simplex vertex along one coordinate.
    pub initial_step: f64,
    /// Stop once the spread of vertex values is below this.
    pub f_tol: f64,
    /// ...and the simplex fits inside a box of this half-width.
    pub x_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_evaluations: 2000, initial_step: 0.01, f_tol: 1e-24, x_tol: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Budgeted<F> {
    f: F,
    used: usize,
    limit: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn call(&mut self, x: &[f64]) -> Option<f64> {
        if self.used >= self.limit {
            return None;
        }
        self.used += 1;
        let v = (self.f)(x);
        Some(if v.is_nan() { f64::INFINITY } else { v })
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
}

/// One simplex run from `start`; returns the best vertex and whether the
/// tolerances were met.
fn run<F: FnMut(&[f64]) -> f64>(
    obj: &mut Budgeted<F>,
    start: &[f64],
    start_value: f64,
    step: f64,
    cfg: &OptimizerConfig,
) -> (Vec<f64>, f64, bool) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), start_value)];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += if p[i] == 0.0 { step } else { step.max(step * p[i].abs()) };
        let Some(v) = obj.call(&p) else {
            return (start.to_vec(), start_value, false);
        };
        simplex.push((p, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = worst - best;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if best.is_finite() && spread <= cfg.f_tol && diameter <= cfg.x_tol {
            return (simplex[0].0.clone(), best, true);
        }

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let worst_p = simplex[n].0.clone();
        let second = simplex[n - 1].1;

        let reflected = lerp(&centroid, &worst_p, -1.0);
        let Some(fr) = obj.call(&reflected) else { break };
        if fr < best {
            let expanded = lerp(&centroid, &worst_p, -2.0);
            let Some(fe) = obj.call(&expanded) else {
                simplex[n] = (reflected, fr);
                break;
            };
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, outside) = if fr < worst {
            (lerp(&centroid, &worst_p, -0.5), true)
        } else {
            (lerp(&centroid, &worst_p, 0.5), false)
        };
        let Some(fc) = obj.call(&contracted) else { break };
        if (outside && fc <= fr) || (!outside && fc < worst) {
            simplex[n] = (contracted, fc);
            continue;
        }
        // shrink towards the best vertex
        let anchor = simplex[0].0.clone();
        for k in 1..=n {
            let p = lerp(&anchor, &simplex[k].0, 0.5);
            let Some(v) = obj.call(&p) else { break };
            simplex[k] = (p, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0.clone(), simplex[0].1, false)
}

/// Minimises `f` from `start`. Non-finite values count as `+inf`. After
/// convergence the simplex is rebuilt once around the optimum with a
/// smaller step; the run only counts as converged if that restart does not
/// improve on it.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(f: F, start: &[f64], start_value: f64, cfg: &OptimizerConfig) -> Minimum {
    let mut obj = Budgeted { f, used: 0, limit: cfg.max_evaluations };
    if start.is_empty() || cfg.max_evaluations == 0 {
        return Minimum { x: start.to_vec(), value: start_value, evaluations: 0, converged: false };
    }
    let (mut x, mut value, mut converged) = run(&mut obj, start, start_value, cfg.initial_step, cfg);
    if converged {
        let (x2, v2, c2) = run(&mut obj, &x, value, cfg.initial_step * 1e-3, cfg);
        if v2 < value {
            converged = c2 && (value - v2) <= cfg.f_tol;
            x = x2;
            value = v2;
        }
    }
    Minimum { x, value, evaluations: obj.used, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let start = [-1.2, 1.0];
        let cfg = OptimizerConfig { max_evaluations: 5000, initial_step: 0.1, ..Default::default() };
        let m = nelder_mead(f, &start, f(&start), &cfg);
        assert!(m.converged, "{m:?}");
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{m:?}");
        assert!(m.evaluations <= 5000);
    }

    #[test]
    fn one_dimensional() {
        let f = |x: &[f64]| (x[0] - 0.05).powi(2);
        let m = nelder_mead(f, &[0.0], f(&[0.0]), &OptimizerConfig::default());
        assert!((m.x[0] - 0.05).abs() < 1e-10, "{m:?}");
    }

    #[test]
    fn zero_budget_returns_start() {
        let m = nelder_mead(|x: &[f64]| x[0], &[3.0], 3.0, &OptimizerConfig { max_evaluations: 0, ..Default::default() });
        assert_eq!(m.x, vec![3.0]);
        assert_eq!(m.evaluations, 0);
        assert!(!m.converged);
    }

    #[test]
    fn never_worse_than_start_and_respects_budget() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { (x[0] - 2.0).abs() + x[1].abs() };
        let cfg = OptimizerConfig { max_evaluations: 37, ..Default::default() };
        let m = nelder_mead(f, &[0.0, 1.0], f(&[0.0, 1.0]), &cfg);
        assert!(m.value <= 3.0);
        assert!(m.evaluations <= 37);
        assert!(m.x[0] <= 0.5);
    }
}
