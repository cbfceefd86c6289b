//! Positive, piecewise-differentiable CPI models.

use std::fmt;
use std::sync::Arc;

use crate::basis::BasisFunctionSpec;
use crate::error::{Error, Result};
use crate::timebase::CpiSeries;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A linear combination of named basis functions.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisExpansion {
    pub terms: Vec<(BasisFunctionSpec, f64)>,
}

impl BasisExpansion {
    pub fn new(basis: &[BasisFunctionSpec], coefficients: &[f64]) -> Result<Self> {
        if basis.len() != coefficients.len() {
            return Err(Error::Domain(format!(
                "{} basis functions but {} coefficients",
                basis.len(),
                coefficients.len()
            )));
        }
        Ok(Self { terms: basis.iter().copied().zip(coefficients.iter().copied()).collect() })
    }

    pub fn basis(&self) -> Vec<BasisFunctionSpec> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.1).collect()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, (b, c)| Ok(acc + c * b.eval_checked(x)?))
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.terms
            .iter()
            .try_fold(0.0, |acc, (b, c)| Ok(acc + c * b.derivative_checked(x)?))
    }

    pub fn formula(&self) -> String {
        let mut out = String::new();
        for (i, (b, c)) in self.terms.iter().enumerate() {
            let sign = if *c < 0.0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let mag = c.abs();
            match b {
                BasisFunctionSpec::Constant => out.push_str(&format!("{sep}{sign}{sep}{mag}")),
                _ => out.push_str(&format!("{sep}{sign}{sep}{mag}*{}", b.formula())),
            }
        }
        out
    }
}

#[derive(Clone)]
pub enum CpiModel {
    /// Straight lines between observations.
    PiecewiseAffine { times: Vec<f64>, values: Vec<f64> },
    /// Exponential between observations (affine in log space).
    LogLinear { times: Vec<f64>, values: Vec<f64> },
    /// Smooth fitted model on a closed domain.
    Basis { expansion: BasisExpansion, domain: (f64, f64) },
    /// User-supplied value and derivative.
    Custom { value: ScalarFn, derivative: ScalarFn, domain: (f64, f64), knots: Vec<f64> },
}

impl fmt::Debug for CpiModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PiecewiseAffine { times, .. } => write!(f, "PiecewiseAffine({} knots)", times.len()),
            Self::LogLinear { times, .. } => write!(f, "LogLinear({} knots)", times.len()),
            Self::Basis { expansion, domain } => write!(f, "Basis({expansion:?}, {domain:?})"),
            Self::Custom { domain, knots, .. } => write!(f, "Custom({domain:?}, {} knots)", knots.len()),
        }
    }
}

/// Index of the segment used at `x`: right-continuous at interior knots,
/// last segment at the right end.
pub(crate) fn segment_index(times: &[f64], x: f64) -> usize {
    let n = times.len();
    let i = times.partition_point(|&t| t <= x);
    i.saturating_sub(1).min(n - 2)
}

impl CpiModel {
    pub fn custom(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Self {
        Self::Custom { value: Arc::new(value), derivative: Arc::new(derivative), domain, knots: Vec::new() }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::PiecewiseAffine { times, .. } | Self::LogLinear { times, .. } => {
                (times[0], times[times.len() - 1])
            }
            Self::Basis { domain, .. } | Self::Custom { domain, .. } => *domain,
        }
    }

    /// Interior breakpoints.
    pub fn knots(&self) -> &[f64] {
        match self {
            Self::PiecewiseAffine { times, .. } | Self::LogLinear { times, .. } => {
                &times[1..times.len() - 1]
            }
            Self::Basis { .. } => &[],
            Self::Custom { knots, .. } => knots,
        }
    }

    pub fn is_piecewise_interpolant(&self) -> bool {
        matches!(self, Self::PiecewiseAffine { .. } | Self::LogLinear { .. })
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if x.is_nan() || x < lo || x > hi {
            return Err(Error::Domain(format!("t = {x} is outside the model domain [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let v = match self {
            Self::PiecewiseAffine { times, values } => {
                let i = segment_index(times, x);
                let w = (x - times[i]) / (times[i + 1] - times[i]);
                if w == 1.0 {
                    values[i + 1]
                } else {
                    values[i] * (1.0 - w) + values[i + 1] * w
                }
            }
            Self::LogLinear { times, values } => {
                let i = segment_index(times, x);
                let w = (x - times[i]) / (times[i + 1] - times[i]);
                if w == 0.0 {
                    values[i]
                } else if w == 1.0 {
                    values[i + 1]
                } else {
                    (values[i].ln() * (1.0 - w) + values[i + 1].ln() * w).exp()
                }
            }
            Self::Basis { expansion, .. } => expansion.eval(x)?,
            Self::Custom { value, .. } => value(x),
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Positivity { at: x, value: v });
        }
        Ok(v)
    }

    /// Right-hand derivative (left-hand at the right end of the domain).
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(match self {
            Self::PiecewiseAffine { times, values } => {
                let i = segment_index(times, x);
                (values[i + 1] - values[i]) / (times[i + 1] - times[i])
            }
            Self::LogLinear { .. } => self.value(x)? * self.log_derivative(x)?,
            Self::Basis { expansion, .. } => expansion.derivative(x)?,
            Self::Custom { derivative, .. } => derivative(x),
        })
    }

    /// `(ln CPI)'(x)` with the same one-sided convention as [`Self::derivative`].
    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        match self {
            Self::LogLinear { times, values } => {
                self.check_domain(x)?;
                let i = segment_index(times, x);
                Ok((values[i + 1].ln() - values[i].ln()) / (times[i + 1] - times[i]))
            }
            _ => Ok(self.derivative(x)? / self.value(x)?),
        }
    }

    /// Checks positivity on a regular grid of spacing `step` plus both ends
    /// and every knot.
    pub fn check_positive(&self, step: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        let n = ((hi - lo) / step).ceil() as usize;
        for k in 0..=n {
            self.value((lo + k as f64 * step).min(hi))?;
        }
        for &k in self.knots() {
            self.value(k)?;
        }
        Ok(())
    }
}

/// Tangent exponential `F(x) = a * exp(b * x)` touching the model at an
/// anchor point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentExponential {
    pub a: f64,
    pub b: f64,
    pub anchor: f64,
    pub anchor_value: f64,
}

impl TangentExponential {
    /// Evaluated relative to the anchor so that large `x` does not overflow.
    pub fn eval(&self, x: f64) -> f64 {
        self.anchor_value * (self.b * (x - self.anchor)).exp()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.b * self.eval(x)
    }
}

pub fn tangent_exponential(model: &CpiModel, x: f64) -> Result<TangentExponential> {
    let value = model.value(x)?;
    let b = model.derivative(x)? / value;
    let a = value * (-b * x).exp();
    Ok(TangentExponential { a, b, anchor: x, anchor_value: value })
}

fn interpolant_data(series: &CpiSeries) -> (Vec<f64>, Vec<f64>) {
    (series.times(), series.values())
}

pub fn piecewise_affine_model(series: &CpiSeries) -> CpiModel {
    let (times, values) = interpolant_data(series);
    CpiModel::PiecewiseAffine { times, values }
}

pub fn log_linear_model(series: &CpiSeries) -> CpiModel {
    let (times, values) = interpolant_data(series);
    CpiModel::LogLinear { times, values }
}
