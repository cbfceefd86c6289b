//! Adaptive Simpson quadrature with breakpoint support.
//!
//! Each breakpoint interval is integrated separately and never straddled.
//! Integrands are treated as right-continuous: the right end of every
//! interval is sampled at the largest float below it, so a step located at
//! a breakpoint contributes its left-hand value to the interval that ends
//! there.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_depth: u32,
    /// Equal pieces each breakpoint interval is cut into before adapting.
    pub initial_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_depth: 40, initial_subdivisions: 1 }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_depth < 1 {
            return Err(Error::Domain("max_depth must be at least 1".into()));
        }
        if self.initial_subdivisions < 1 {
            return Err(Error::Domain("initial_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Integrator<'f, F> {
    f: &'f F,
    evaluations: usize,
    max_depth: u32,
    exhausted: bool,
}

impl<F: Fn(f64) -> f64> Integrator<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        let y = (self.f)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::IntegrandDomain { at: x })
        }
    }

    // Returns (value, error estimate).
    #[allow(clippy::too_many_arguments)]
    fn adapt(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<(f64, f64)> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let fine = left + right;
        let diff = fine - whole;
        if diff.abs() <= 15.0 * tol {
            return Ok((fine + diff / 15.0, diff.abs() / 15.0));
        }
        if depth >= self.max_depth || !(a < lm && lm < m && m < rm && rm < b) {
            self.exhausted = true;
            return Ok((fine + diff / 15.0, diff.abs() / 15.0));
        }
        let (lv, le) = self.adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        let (rv, re) = self.adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
        Ok((lv + rv, le + re))
    }

    fn segment(&mut self, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
        if b <= a {
            return Ok((0.0, 0.0));
        }
        let m = 0.5 * (a + b);
        let fa = self.eval(a)?;
        let fm = self.eval(m)?;
        let fb = self.eval(b.next_down())?;
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        self.adapt(a, b, fa, fm, fb, whole, tol, 1)
    }
}

/// Integrates `f` over `[a, b]`, splitting at `knots` (which must lie inside
/// `(a, b)` and be sorted).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    knots: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain(format!("invalid integration interval [{a}, {b}]")));
    }
    if knots.windows(2).any(|w| w[0] >= w[1]) || knots.iter().any(|&k| !(a < k && k < b)) {
        return Err(Error::Domain("knots must be sorted and strictly inside (a, b)".into()));
    }

    let mut edges = Vec::with_capacity(knots.len() + 2);
    edges.push(a);
    edges.extend_from_slice(knots);
    edges.push(b);

    let span = b - a;
    let mut it = Integrator { f: &f, evaluations: 0, max_depth: cfg.max_depth, exhausted: false };
    let mut value = 0.0;
    let mut error_estimate = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let pieces = cfg.initial_subdivisions;
        for k in 0..pieces {
            let s = lo + (hi - lo) * k as f64 / pieces as f64;
            let e = if k + 1 == pieces { hi } else { lo + (hi - lo) * (k + 1) as f64 / pieces as f64 };
            let tol = if span > 0.0 { cfg.abs_tol * (e - s) / span } else { cfg.abs_tol };
            let (v, err) = it.segment(s, e, tol)?;
            value += v;
            error_estimate += err;
        }
    }

    if it.exhausted && error_estimate > cfg.abs_tol {
        return Err(Error::Accuracy { estimate: value, error_estimate });
    }
    Ok(QuadratureResult { value, error_estimate, evaluations: it.evaluations })
}
