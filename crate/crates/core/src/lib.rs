//! Inflation and interest accumulation for arbitrary per-unit-time rate
//! functions.
//!
//! If the rate per unit time at `u` is `rate(u)`, the rate over `[t0, t1]` is
//!
//! ```text
//! exp(∫_{t0}^{t1} ln(1 + rate(u)) du) - 1
//! ```
//!
//! which reduces to `(1 + I)^t - 1` for a constant rate and to a product of
//! such factors for a piecewise-constant one. The crate also reconstructs
//! rate functions from discrete CPI observations: by interpolation, by
//! least-squares fits of the index, and by fitting the rate directly to the
//! observed interval growth.
//!
//! ```
//! use inflation_core::{accumulate, QuadratureConfig, RateFunction};
//!
//! let rate = RateFunction::custom(|u| u / 10.0 + 0.1, None);
//! let acc = accumulate(&rate, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
//! assert!((100.0 / acc.growth_factor - 86.98393756).abs() < 1e-6);
//! ```

pub mod basis;
pub mod cli;
pub mod error;
pub mod fitting;
pub mod format;
pub mod lsq;
pub mod model;
pub mod optimize;
pub mod presets;
pub mod quadrature;
pub mod rate;
pub mod report;
pub mod timebase;

pub use basis::{seasonal_pool, trend_pool, BasisFunctionSpec, Frequency};
pub use error::{Error, Result};
pub use fitting::{
    best_pair_search, best_pair_trend, cpi_model_from_fit, cumulative_residual, detrend, fit_rate_direct,
    functional_residual, greedy_backward_elimination, seasonal_fit, EliminationMode, greedy_backward_elimination_trace, one_shot_elimination,
    RateFitReport,
};
pub use lsq::{linear_least_squares, LinearFit};
pub use model::{log_linear_model, piecewise_affine_model, tangent_exponential, BasisExpansion, CpiModel, TangentExponential};
pub use optimize::OptimizerConfig;
pub use quadrature::{integrate, QuadratureConfig, QuadratureResult};
pub use rate::{
    accumulate, constant_accumulate, log_accumulation, piecewise_product_accumulate, rate_from_cpi, real_value,
    AccumulationResult, RateFunction,
};
pub use report::{FitReport, ReportKind};
pub use timebase::{month_code_to_time, parse_cpi_csv, series_log_ratios, CpiObservation, CpiSeries, MonthCode};
