//! Rate-per-unit-time functions and their accumulation over intervals.
//!
//! Over `[t0, t1]` the growth factor is `exp(∫ ln(1 + rate(u)) du)` and the
//! interval rate is that factor minus one. Piecewise forms use exact
//! per-segment antiderivatives; everything else goes through
//! [`crate::quadrature`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{segment_index, BasisExpansion, CpiModel, ScalarFn};
use crate::quadrature::{integrate, QuadratureConfig};

#[derive(Clone)]
pub enum RateFunction {
    Constant(f64),
    /// `values[i]` holds on `[knots[i], knots[i + 1])`.
    PiecewiseConstant { knots: Vec<f64>, values: Vec<f64> },
    /// `exp((ln CPI)'(t)) - 1`.
    FromCpi(CpiModel),
    Basis { expansion: BasisExpansion, domain: Option<(f64, f64)> },
    Custom { f: ScalarFn, domain: Option<(f64, f64)>, knots: Vec<f64> },
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(i) => write!(f, "Constant({i})"),
            Self::PiecewiseConstant { knots, values } => {
                write!(f, "PiecewiseConstant {{ knots: {knots:?}, values: {values:?} }}")
            }
            Self::FromCpi(m) => write!(f, "FromCpi({m:?})"),
            Self::Basis { expansion, domain } => write!(f, "Basis({expansion:?}, {domain:?})"),
            Self::Custom { domain, knots, .. } => write!(f, "Custom({domain:?}, {knots:?})"),
        }
    }
}

impl RateFunction {
    pub fn piecewise_constant(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || values.len() + 1 != knots.len() {
            return Err(Error::Domain(format!(
                "piecewise-constant rate needs n+1 knots for n values (got {} knots, {} values)",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("knots must be finite and strictly increasing".into()));
        }
        Ok(Self::PiecewiseConstant { knots, values })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, domain: Option<(f64, f64)>) -> Self {
        Self::Custom { f: Arc::new(f), domain, knots: Vec::new() }
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Self::Constant(_) => None,
            Self::PiecewiseConstant { knots, .. } => Some((knots[0], knots[knots.len() - 1])),
            Self::FromCpi(m) => Some(m.domain()),
            Self::Basis { domain, .. } | Self::Custom { domain, .. } => *domain,
        }
    }

    /// Interior breakpoints of the whole domain.
    pub fn knots(&self) -> &[f64] {
        match self {
            Self::PiecewiseConstant { knots, .. } => &knots[1..knots.len() - 1],
            Self::FromCpi(m) => m.knots(),
            Self::Custom { knots, .. } => knots,
            _ => &[],
        }
    }

    fn check_interval(&self, t0: f64, t1: f64) -> Result<()> {
        if !(t0.is_finite() && t1.is_finite()) || t0 > t1 {
            return Err(Error::Domain(format!("invalid interval [{t0}, {t1}]")));
        }
        if let Some((lo, hi)) = self.domain() {
            if t0 < lo || t1 > hi {
                return Err(Error::Domain(format!(
                    "interval [{t0}, {t1}] is outside the rate domain [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Rate per unit time at `t`; right-hand limit at knots.
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_interval(t, t)?;
        match self {
            Self::Constant(i) => Ok(*i),
            Self::PiecewiseConstant { knots, values } => Ok(values[segment_index(knots, t)]),
            Self::FromCpi(m) => Ok(m.log_derivative(t)?.exp_m1()),
            Self::Basis { expansion, .. } => expansion.eval(t),
            Self::Custom { f, .. } => Ok(f(t)),
        }
    }

    /// `ln(1 + rate(t))`; not finite where `1 + rate <= 0`.
    fn log_growth_density(&self, t: f64) -> f64 {
        match self {
            Self::FromCpi(m) => m.log_derivative(t).unwrap_or(f64::NAN),
            _ => self.eval(t).map(f64::ln_1p).unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccumulationResult {
    /// Rate over the whole interval.
    pub rate: f64,
    pub growth_factor: f64,
    /// `X(t0) / X(t1)` for a real-value objective `X`.
    pub objective_ratio: f64,
}

fn validated_ln_1p(i: f64, at: f64) -> Result<f64> {
    if i > -1.0 && i.is_finite() {
        Ok(i.ln_1p())
    } else {
        Err(Error::RateDomain { at })
    }
}

/// `∫ ln(1 + rate(u)) du` over `[t0, t1]`.
pub fn log_accumulation(rate: &RateFunction, t0: f64, t1: f64, quad: &QuadratureConfig) -> Result<f64> {
    rate.check_interval(t0, t1)?;
    if t0 == t1 {
        return Ok(0.0);
    }
    match rate {
        RateFunction::Constant(i) => Ok((t1 - t0) * validated_ln_1p(*i, t0)?),
        RateFunction::PiecewiseConstant { knots, values } => {
            let mut total = 0.0;
            for (seg, w) in knots.windows(2).enumerate() {
                let (lo, hi) = (w[0].max(t0), w[1].min(t1));
                if hi > lo {
                    total += (hi - lo) * validated_ln_1p(values[seg], lo)?;
                }
            }
            Ok(total)
        }
        RateFunction::FromCpi(m) if m.is_piecewise_interpolant() => Ok(m.value(t1)?.ln() - m.value(t0)?.ln()),
        _ => {
            let knots: Vec<f64> = rate.knots().iter().copied().filter(|&k| t0 < k && k < t1).collect();
            integrate(|u| rate.log_growth_density(u), t0, t1, &knots, quad)
                .map(|r| r.value)
                .map_err(|e| match e {
                    Error::IntegrandDomain { at } => Error::RateDomain { at },
                    other => other,
                })
        }
    }
}

pub fn accumulate(rate: &RateFunction, t0: f64, t1: f64, quad: &QuadratureConfig) -> Result<AccumulationResult> {
    let log_growth = log_accumulation(rate, t0, t1, quad)?;
    let growth_factor = log_growth.exp();
    Ok(AccumulationResult { rate: log_growth.exp_m1(), growth_factor, objective_ratio: growth_factor })
}

/// Real value at `t1` of `x0` held from `t0`.
pub fn real_value(rate: &RateFunction, x0: f64, t0: f64, t1: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(x0 > 0.0) || !x0.is_finite() {
        return Err(Error::Domain(format!("initial value must be positive, got {x0}")));
    }
    Ok(x0 / accumulate(rate, t0, t1, quad)?.growth_factor)
}

/// `(1 + i)^t - 1`.
pub fn constant_accumulate(i: f64, t: f64) -> Result<f64> {
    if !(i > -1.0) {
        return Err(Error::RateDomain { at: 0.0 });
    }
    Ok((1.0 + i).powf(t) - 1.0)
}

/// `∏ (1 + values[i])^(knots[i+1] - knots[i]) - 1`, computed as a product.
pub fn piecewise_product_accumulate(knots: &[f64], values: &[f64]) -> Result<f64> {
    if knots.len() != values.len() + 1 || values.is_empty() {
        return Err(Error::Domain("need n+1 knots for n values".into()));
    }
    if knots.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("knots must be strictly increasing".into()));
    }
    let mut product = 1.0;
    for (w, &i) in knots.windows(2).zip(values) {
        if !(i > -1.0) {
            return Err(Error::RateDomain { at: w[0] });
        }
        product *= (1.0 + i).powf(w[1] - w[0]);
    }
    Ok(product - 1.0)
}

pub fn rate_from_cpi(model: &CpiModel) -> RateFunction {
    RateFunction::FromCpi(model.clone())
}
