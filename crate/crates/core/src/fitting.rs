//! Reconstructing CPI trends and rate functions from observations.
//!
//! Two routes are offered. The indirect one fits the CPI itself (a trend
//! chosen by exhaustive pair search, then a seasonal part chosen by greedy
//! backward elimination) and derives the rate from the fitted curve. The
//! direct one fits a rate expansion so that its accumulated growth over
//! every observation interval matches the measured CPI ratio.

use std::cmp::Ordering;

use crate::basis::BasisFunctionSpec;
use crate::error::{Error, Result};
use crate::lsq::{linear_least_squares, LinearFit};
use crate::model::{BasisExpansion, CpiModel};
use crate::optimize::{nelder_mead, OptimizerConfig};
use crate::quadrature::QuadratureConfig;
use crate::rate::{log_accumulation, RateFunction};
use crate::timebase::{series_log_ratios, CpiSeries};

/// Relative sse difference below which two fits count as tied.
const TIE_RTOL: f64 = 1e-9;

fn sse_cmp(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
        Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

fn series_points(series: &CpiSeries) -> Vec<(f64, f64)> {
    series.observations().iter().map(|o| (o.time, o.value)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSearch {
    /// Basis is `[constant, first, second]`.
    pub fit: LinearFit,
    pub pairs_evaluated: usize,
}

/// Fits `constant + a f + b g` for every unordered pair `{f, g}` of the pool
/// and keeps the smallest sse. Ties go to the pair that is smaller in
/// (family, parameter) order.
pub fn best_pair_search(series: &CpiSeries, pool: &[BasisFunctionSpec]) -> Result<PairSearch> {
    let mut pool: Vec<BasisFunctionSpec> =
        pool.iter().copied().filter(|b| *b != BasisFunctionSpec::Constant).collect();
    pool.sort_by(BasisFunctionSpec::cmp_order);
    pool.dedup();
    if pool.len() < 2 {
        return Err(Error::Domain("pair search needs at least two non-constant candidates".into()));
    }
    let points = series_points(series);
    let mut best: Option<LinearFit> = None;
    let mut evaluated = 0;
    for (i, f) in pool.iter().enumerate() {
        for g in &pool[i + 1..] {
            let fit = linear_least_squares(&points, &[BasisFunctionSpec::Constant, *f, *g])?;
            evaluated += 1;
            // pairs arrive in order, so only a strictly smaller sse replaces
            if best.as_ref().is_none_or(|b| sse_cmp(fit.sse, b.sse) == Ordering::Less) {
                best = Some(fit);
            }
        }
    }
    Ok(PairSearch { fit: best.expect("at least one pair"), pairs_evaluated: evaluated })
}

pub fn best_pair_trend(series: &CpiSeries, pool: &[BasisFunctionSpec]) -> Result<LinearFit> {
    best_pair_search(series, pool).map(|s| s.fit)
}

/// Observation minus trend at every observation time.
pub fn detrend(series: &CpiSeries, trend: &LinearFit) -> Result<Vec<(f64, f64)>> {
    let e = trend.expansion();
    series.observations().iter().map(|o| Ok((o.time, o.value - e.eval(o.time)?))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep {
    pub removed: BasisFunctionSpec,
    /// Sse of the refit without the removed function.
    pub sse: f64,
    /// Refit sse for every candidate considered at this step.
    pub candidates: Vec<(BasisFunctionSpec, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub fit: LinearFit,
    pub steps: Vec<EliminationStep>,
}

fn split_pool(pool: &[BasisFunctionSpec]) -> (Vec<BasisFunctionSpec>, Vec<BasisFunctionSpec>) {
    pool.iter().copied().partition(|b| *b == BasisFunctionSpec::Constant)
}

/// At least one function must survive and only removable ones may go.
fn check_remove_count(fixed: usize, eligible: usize, remove_count: usize) -> Result<()> {
    if remove_count > eligible || fixed + eligible - remove_count == 0 {
        return Err(Error::Domain(format!(
            "cannot remove {remove_count} of {eligible} removable functions"
        )));
    }
    Ok(())
}

/// Removes `remove_count` functions one at a time, each time dropping the
/// one whose absence gives the smallest refitted sse. Constant members of
/// the pool are never removed. On a tie the function later in
/// (family, parameter) order is dropped.
pub fn greedy_backward_elimination_trace(
    targets: &[(f64, f64)],
    pool: &[BasisFunctionSpec],
    remove_count: usize,
) -> Result<Elimination> {
    let (fixed, mut alive) = split_pool(pool);
    check_remove_count(fixed.len(), alive.len(), remove_count)?;
    let with = |alive: &[BasisFunctionSpec]| -> Vec<BasisFunctionSpec> {
        fixed.iter().chain(alive.iter()).copied().collect()
    };

    let mut steps = Vec::with_capacity(remove_count);
    for _ in 0..remove_count {
        let mut candidates = Vec::with_capacity(alive.len());
        for (k, b) in alive.iter().enumerate() {
            let mut rest = alive.clone();
            rest.remove(k);
            candidates.push((*b, linear_least_squares(targets, &with(&rest))?.sse));
        }
        let &(removed, sse) = candidates
            .iter()
            .min_by(|a, b| sse_cmp(a.1, b.1).then_with(|| b.0.cmp_order(&a.0)))
            .expect("non-empty");
        alive.retain(|b| *b != removed);
        steps.push(EliminationStep { removed, sse, candidates });
    }
    Ok(Elimination { fit: linear_least_squares(targets, &with(&alive))?, steps })
}

pub fn greedy_backward_elimination(
    targets: &[(f64, f64)],
    pool: &[BasisFunctionSpec],
    remove_count: usize,
) -> Result<LinearFit> {
    greedy_backward_elimination_trace(targets, pool, remove_count).map(|e| e.fit)
}

/// Ranks every removable function once by the sse of the full fit without
/// it, then drops the `remove_count` cheapest together.
pub fn one_shot_elimination(
    targets: &[(f64, f64)],
    pool: &[BasisFunctionSpec],
    remove_count: usize,
) -> Result<LinearFit> {
    let (fixed, alive) = split_pool(pool);
    check_remove_count(fixed.len(), alive.len(), remove_count)?;
    let mut losses = Vec::with_capacity(alive.len());
    for (k, b) in alive.iter().enumerate() {
        let basis: Vec<_> = fixed
            .iter()
            .chain(alive.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, b)| b))
            .copied()
            .collect();
        losses.push((*b, linear_least_squares(targets, &basis)?.sse));
    }
    losses.sort_by(|a, b| sse_cmp(a.1, b.1).then_with(|| b.0.cmp_order(&a.0)));
    let dropped: Vec<_> = losses[..remove_count].iter().map(|l| l.0).collect();
    let basis: Vec<_> = fixed
        .iter()
        .chain(alive.iter().filter(|b| !dropped.contains(b)))
        .copied()
        .collect();
    linear_least_squares(targets, &basis)
}

/// How the seasonal stage drops functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EliminationMode {
    #[default]
    Iterative,
    OneShot,
}

/// Seasonal stage: a constant plus [`seasonal_pool`] fitted to the
/// detrended series, with `remove_count` pool members eliminated. The
/// constant is always kept.
///
/// [`seasonal_pool`]: crate::basis::seasonal_pool
pub fn seasonal_fit(
    series: &CpiSeries,
    trend: &LinearFit,
    remove_count: usize,
    mode: EliminationMode,
) -> Result<LinearFit> {
    let targets = detrend(series, trend)?;
    let mut pool = vec![BasisFunctionSpec::Constant];
    pool.extend(crate::basis::seasonal_pool());
    match mode {
        EliminationMode::Iterative => greedy_backward_elimination(&targets, &pool, remove_count),
        EliminationMode::OneShot => one_shot_elimination(&targets, &pool, remove_count),
    }
}

/// Trend plus seasonal part as one smooth CPI model on `domain`.
pub fn cpi_model_from_fit(trend: &LinearFit, seasonal: &LinearFit, domain: (f64, f64)) -> Result<CpiModel> {
    let mut terms = trend.expansion().terms;
    terms.extend(seasonal.expansion().terms);
    let model = CpiModel::Basis { expansion: BasisExpansion { terms }, domain };
    model.check_positive(1.0 / 1200.0)?;
    Ok(model)
}

/// Growth over each observation interval.
pub fn interval_growth(rate: &RateFunction, series: &CpiSeries, quad: &QuadratureConfig) -> Result<Vec<f64>> {
    series
        .observations()
        .windows(2)
        .map(|w| Ok(log_accumulation(rate, w[0].time, w[1].time, quad)?.exp()))
        .collect()
}

/// `Σ (exp(∫ ln(1 + rate)) - CPI(t[i+1]) / CPI(t[i]))²` over consecutive
/// observations.
pub fn functional_residual(rate: &RateFunction, series: &CpiSeries, quad: &QuadratureConfig) -> Result<f64> {
    let growth = interval_growth(rate, series, quad)?;
    Ok(series
        .observations()
        .windows(2)
        .zip(growth)
        .map(|(w, g)| (g - w[1].value / w[0].value).powi(2))
        .sum())
}

/// Cumulative variant in index units: the first observation is carried
/// forward with the rate and compared against each later observation,
/// `Σ (CPI(t0) exp(∫_{t0}^{t[i+1]} ln(1 + rate)) - CPI(t[i+1]))²`.
pub fn cumulative_residual(rate: &RateFunction, series: &CpiSeries, quad: &QuadratureConfig) -> Result<f64> {
    let obs = series.observations();
    let mut log_growth = 0.0;
    let mut total = 0.0;
    for w in obs.windows(2) {
        log_growth += log_accumulation(rate, w[0].time, w[1].time, quad)?;
        total += (obs[0].value * log_growth.exp() - w[1].value).powi(2);
    }
    Ok(total)
}

#[derive(Debug, Clone)]
pub struct RateFitReport {
    pub rate: RateFunction,
    pub expansion: BasisExpansion,
    pub residual: f64,
    pub initial_residual: f64,
    pub intervals_used: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Starting coefficients from the log-linearised problem: each interval's
/// mean log growth `g` becomes the rate `exp(g) - 1` at the interval
/// midpoint, and the basis is fitted to those points by least squares.
pub fn linearized_seed(series: &CpiSeries, basis: &[BasisFunctionSpec]) -> Result<Vec<f64>> {
    let points: Vec<(f64, f64)> = series_log_ratios(series)
        .iter()
        .map(|r| (0.5 * (r.start + r.end), (r.log_ratio / (r.end - r.start)).exp_m1()))
        .collect();
    if points.len() < basis.len() {
        return Ok(vec![0.0; basis.len()]);
    }
    Ok(linear_least_squares(&points, basis)?.coefficients)
}

fn basis_rate(basis: &[BasisFunctionSpec], coefficients: &[f64], domain: (f64, f64)) -> Result<RateFunction> {
    Ok(RateFunction::Basis { expansion: BasisExpansion::new(basis, coefficients)?, domain: Some(domain) })
}

/// Fits `rate(t) = Σ c_j φ_j(t)` by minimising [`functional_residual`] with a
/// Nelder-Mead simplex started from `init` (or [`linearized_seed`]).
pub fn fit_rate_direct(
    series: &CpiSeries,
    basis: &[BasisFunctionSpec],
    init: Option<&[f64]>,
    quad: &QuadratureConfig,
    opt: &OptimizerConfig,
) -> Result<RateFitReport> {
    if basis.is_empty() {
        return Err(Error::Domain("rate fit needs at least one basis function".into()));
    }
    let domain = (series.start(), series.end());
    for o in series.observations() {
        for b in basis {
            b.eval_checked(o.time)?;
        }
    }
    let start = match init {
        Some(c) if c.len() == basis.len() => c.to_vec(),
        Some(c) => {
            return Err(Error::Domain(format!(
                "{} initial coefficients for {} basis functions",
                c.len(),
                basis.len()
            )))
        }
        None => linearized_seed(series, basis)?,
    };

    let mut first_error: Option<Error> = None;
    let mut objective = |c: &[f64]| -> f64 {
        match basis_rate(basis, c, domain).and_then(|r| functional_residual(&r, series, quad)) {
            Ok(v) => v,
            Err(Error::RateDomain { .. }) => f64::INFINITY,
            Err(e) => {
                first_error.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let initial_residual = objective(&start);
    let min = nelder_mead(&mut objective, &start, initial_residual, opt);
    if !min.value.is_finite() {
        return Err(first_error.unwrap_or(Error::InfeasibleStart));
    }

    let expansion = BasisExpansion::new(basis, &min.x)?;
    Ok(RateFitReport {
        rate: RateFunction::Basis { expansion: expansion.clone(), domain: Some(domain) },
        expansion,
        residual: min.value,
        initial_residual,
        intervals_used: series.len() - 1,
        evaluations: min.evaluations,
        converged: min.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{seasonal_pool, trend_pool, BasisFunctionSpec as B, Frequency};
    use crate::model::{log_linear_model, piecewise_affine_model};
    use crate::rate::{constant_accumulate, rate_from_cpi};

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn monthly(n: usize, f: impl Fn(f64) -> f64) -> CpiSeries {
        let pts: Vec<_> = (1..=n).map(|k| {
            let t = 1993.0 + k as f64 / 12.0;
            (t, f(t))
        }).collect();
        CpiSeries::from_pairs(&pts).unwrap()
    }

    #[test]
    fn pair_count_for_three_candidates() {
        let pool = [B::PowerDecay { i: 5, base: 1992 }, B::PowerDecay { i: 9, base: 1992 }, B::LogShift { base: 1991 }];
        let s = monthly(30, |t| 100.0 + t - 1993.0);
        assert_eq!(best_pair_search(&s, &pool).unwrap().pairs_evaluated, 3);
    }

    #[test]
    fn planted_member_is_found() {
        let planted = B::RootPower { i: 7, base: 1993 };
        let s = monthly(60, |t| 90.0 + 4.0 * planted.eval(t).unwrap());
        let fit = best_pair_trend(&s, &trend_pool()).unwrap();
        assert!(fit.basis.contains(&planted), "{:?}", fit.basis);
        assert!(fit.sse <= 1e-8);
    }

    #[test]
    fn elimination_no_op_and_planted() {
        let s = monthly(48, |t| 10.0 + 3.0 * (std::f64::consts::PI * t / 3.0).sin() + 0.1 * (t - 1995.0));
        let targets: Vec<_> = s.observations().iter().map(|o| (o.time, o.value)).collect();
        let mut pool = vec![B::Constant];
        pool.extend(seasonal_pool());
        let full = linear_least_squares(&targets, &pool).unwrap();
        let none = greedy_backward_elimination(&targets, &pool, 0).unwrap();
        assert_eq!(none, full);

        let spanning = B::Sin(Frequency::per(2));
        let other = B::Cos(Frequency::per(5));
        let pts: Vec<_> = targets.iter().map(|&(t, _)| (t, 2.0 * spanning.eval(t).unwrap())).collect();
        let fit = greedy_backward_elimination(&pts, &[other, spanning], 1).unwrap();
        assert_eq!(fit.basis, vec![spanning]);
        assert!(greedy_backward_elimination(&pts, &[other, spanning], 2).is_err());
    }

    #[test]
    fn constant_is_never_eliminated() {
        let s = monthly(36, |t| 5.0 + (t - 1993.0));
        let targets: Vec<_> = s.observations().iter().map(|o| (o.time, o.value)).collect();
        let mut pool = vec![B::Constant];
        pool.extend(seasonal_pool().into_iter().take(6));
        let e = greedy_backward_elimination_trace(&targets, &pool, 5).unwrap();
        assert_eq!(e.fit.basis.len(), 2);
        assert_eq!(e.fit.basis[0], B::Constant);
        let o = one_shot_elimination(&targets, &pool, 5).unwrap();
        assert_eq!(o.basis[0], B::Constant);
        assert_eq!(o.basis.len(), 2);
    }

    #[test]
    fn trend_only_model_matches_trend() {
        let s = bundled();
        let trend = linear_least_squares(
            &series_points(&s),
            &[B::Constant, B::PowerDecay { i: 5, base: 1992 }, B::PowerDecay { i: 9, base: 1992 }],
        )
        .unwrap();
        let zero = LinearFit { basis: vec![B::Constant], coefficients: vec![0.0], sse: 0.0 };
        let m = cpi_model_from_fit(&trend, &zero, (s.start(), s.end())).unwrap();
        for t in [s.start(), 1996.3, s.end()] {
            assert!((m.value(t).unwrap() - trend.eval(t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_positive_model_is_rejected() {
        let trend = LinearFit { basis: vec![B::Constant], coefficients: vec![0.5], sse: 0.0 };
        let seas = LinearFit { basis: vec![B::Sin(Frequency::per(1))], coefficients: vec![1.0], sse: 0.0 };
        assert!(matches!(cpi_model_from_fit(&trend, &seas, (1993.0, 1995.0)), Err(Error::Positivity { .. })));
    }

    fn bundled() -> CpiSeries {
        crate::timebase::bundled_series()
    }

    #[test]
    fn interpolant_rates_have_zero_residual() {
        let s = bundled();
        for m in [piecewise_affine_model(&s), log_linear_model(&s)] {
            let r = functional_residual(&rate_from_cpi(&m), &s, &q()).unwrap();
            assert!(r <= 1e-12, "{r}");
        }
    }

    #[test]
    fn zero_rate_residual_is_direct_sum() {
        let s = bundled();
        let r = functional_residual(&RateFunction::Constant(0.0), &s, &q()).unwrap();
        let v = s.values();
        let expected: f64 = v.windows(2).map(|w| (1.0 - w[1] / w[0]).powi(2)).sum();
        assert!((r - expected).abs() <= 1e-15 * expected.max(1.0));
        assert!(r > 0.0);
    }

    #[test]
    fn cumulative_residual_of_exact_rate() {
        let s = bundled();
        let r = cumulative_residual(&rate_from_cpi(&piecewise_affine_model(&s)), &s, &q()).unwrap();
        assert!(r < 1e-18);
    }

    #[test]
    fn direct_fit_two_points() {
        let s = CpiSeries::from_pairs(&[(0.0, 100.0), (1.0, 110.0)]).unwrap();
        let rep = fit_rate_direct(&s, &[B::Constant], None, &q(), &OptimizerConfig::default()).unwrap();
        assert!((rep.expansion.coefficients()[0] - 0.1).abs() < 1e-9);
        assert_eq!(rep.intervals_used, 1);
    }

    #[test]
    fn direct_fit_recovers_constant() {
        let i = 0.05;
        let s = monthly(60, |t| 100.0 * (1.0 + constant_accumulate(i, t - 1993.0).unwrap()));
        let rep = fit_rate_direct(&s, &[B::Constant], Some(&[0.0]), &q(), &OptimizerConfig::default()).unwrap();
        assert!((rep.expansion.coefficients()[0] - i).abs() < 1e-6, "{rep:?}");
        assert!(rep.residual <= 1e-10);
        assert!(rep.residual <= rep.initial_residual);
    }

    #[test]
    fn direct_fit_zero_budget_is_pure_evaluation() {
        let s = bundled();
        let opt = OptimizerConfig { max_evaluations: 0, ..Default::default() };
        let rep = fit_rate_direct(&s, &[B::Constant], Some(&[0.04]), &q(), &opt).unwrap();
        let direct = functional_residual(&RateFunction::Constant(0.04), &s, &q()).unwrap();
        assert!((rep.residual - direct).abs() < 1e-15);
        assert_eq!(rep.evaluations, 0);
        assert!(!rep.converged);
    }

    #[test]
    fn infeasible_start() {
        let s = CpiSeries::from_pairs(&[(0.0, 100.0), (1.0, 110.0)]).unwrap();
        let opt = OptimizerConfig { max_evaluations: 10, ..Default::default() };
        let err = fit_rate_direct(&s, &[B::Constant], Some(&[-5.0]), &q(), &opt).unwrap_err();
        assert_eq!(err, Error::InfeasibleStart);
    }

    #[test]
    fn residual_is_scale_free() {
        let s = bundled();
        let rate = crate::presets::published_direct_rate();
        let a = functional_residual(&rate, &s, &q()).unwrap();
        for k in [0.01, 3.7, 1e4] {
            let b = functional_residual(&rate, &s.scaled(k).unwrap(), &q()).unwrap();
            assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
        }
    }
}
