//! Fit reports: flat JSON objects naming basis members and coefficients.
//!
//! ```json
//! {
//!   "kind": "cpi",
//!   "domain": [1993.0833333333333, 2003.0],
//!   "basis": ["const", "pow:5:1992", "pow:9:1992"],
//!   "coefficients": [151.620133157, 58.3876361545, -111.386626585],
//!   "sse": 237.627006987
//! }
//! ```
//!
//! `kind` is `cpi` when the expansion models the index itself and `rate`
//! when it models the rate per unit time. Numbers carry 12 significant
//! digits.

use serde::{Deserialize, Serialize};

use crate::basis::BasisFunctionSpec;
use crate::error::{Error, Result};
use crate::fitting::RateFitReport;
use crate::lsq::LinearFit;
use crate::model::{BasisExpansion, CpiModel};
use crate::rate::{rate_from_cpi, RateFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Cpi,
    Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub kind: ReportKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<(f64, f64)>,
    pub basis: Vec<String>,
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals_used: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl FitReport {
    fn from_expansion(kind: ReportKind, expansion: &BasisExpansion, domain: Option<(f64, f64)>) -> Self {
        Self {
            kind,
            domain,
            basis: expansion.basis().iter().map(ToString::to_string).collect(),
            coefficients: expansion.coefficients().into_iter().map(round12).collect(),
            sse: None,
            residual: None,
            intervals_used: None,
            converged: None,
        }
    }

    pub fn from_linear_fit(fit: &LinearFit, domain: (f64, f64)) -> Self {
        Self { sse: Some(round12(fit.sse)), ..Self::from_expansion(ReportKind::Cpi, &fit.expansion(), Some(domain)) }
    }

    /// Combined trend and seasonal model; `sse` is the final stage's.
    pub fn from_model(expansion: &BasisExpansion, domain: (f64, f64), sse: f64) -> Self {
        Self { sse: Some(round12(sse)), ..Self::from_expansion(ReportKind::Cpi, expansion, Some(domain)) }
    }

    pub fn from_rate_fit(fit: &RateFitReport, domain: (f64, f64)) -> Self {
        Self {
            residual: Some(round12(fit.residual)),
            intervals_used: Some(fit.intervals_used),
            converged: Some(fit.converged),
            ..Self::from_expansion(ReportKind::Rate, &fit.expansion, Some(domain))
        }
    }

    pub fn expansion(&self) -> Result<BasisExpansion> {
        let basis = self
            .basis
            .iter()
            .map(|s| s.parse::<BasisFunctionSpec>())
            .collect::<Result<Vec<_>>>()?;
        BasisExpansion::new(&basis, &self.coefficients).map_err(|e| Error::Report(e.to_string()))
    }

    /// The rate function the report describes: the expansion itself for
    /// `rate` reports, the rate derived from the modelled index otherwise.
    pub fn rate_function(&self) -> Result<RateFunction> {
        let expansion = self.expansion()?;
        match self.kind {
            ReportKind::Rate => Ok(RateFunction::Basis { expansion, domain: self.domain }),
            ReportKind::Cpi => Ok(rate_from_cpi(&self.cpi_model()?)),
        }
    }

    pub fn cpi_model(&self) -> Result<CpiModel> {
        if self.kind != ReportKind::Cpi {
            return Err(Error::Report("report does not describe a CPI model".into()));
        }
        let domain = self.domain.ok_or_else(|| Error::Report("CPI report needs a domain".into()))?;
        Ok(CpiModel::Basis { expansion: self.expansion()?, domain })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
        if report.basis.len() != report.coefficients.len() {
            return Err(Error::Report("basis and coefficients differ in length".into()));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisFunctionSpec as B, Frequency};
    use proptest::prelude::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(151.55846945312345), 151.558469453);
        assert_eq!(round12(-0.000156347532197123), -0.000156347532197);
        assert_eq!(round12(0.0), 0.0);
    }

    #[test]
    fn rate_report_rebuilds_rate() {
        let fit = LinearFit {
            basis: vec![B::Constant, B::Sin(Frequency::per(2))],
            coefficients: vec![0.05, 0.01],
            sse: 0.0,
        };
        let mut r = FitReport::from_linear_fit(&fit, (0.0, 4.0));
        r.kind = ReportKind::Rate;
        let back = FitReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        let rate = back.rate_function().unwrap();
        assert!((rate.eval(1.0).unwrap() - 0.06).abs() < 1e-15);
        assert!(back.cpi_model().is_err());
    }

    #[test]
    fn malformed_reports() {
        assert!(FitReport::from_json("{").is_err());
        assert!(FitReport::from_json(r#"{"kind":"rate","basis":["const"],"coefficients":[]}"#).is_err());
        let bad = FitReport::from_json(r#"{"kind":"rate","basis":["nope"],"coefficients":[1]}"#).unwrap();
        assert!(bad.rate_function().is_err());
        let no_domain = FitReport::from_json(r#"{"kind":"cpi","basis":["const"],"coefficients":[1]}"#).unwrap();
        assert!(no_domain.rate_function().is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(coefs in prop::collection::vec(-1e6f64..1e6, 1..6), sse in 0.0f64..1e4) {
            let basis: Vec<B> = [B::Constant, B::PowerDecay { i: 3, base: 1992 }, B::LogShift { base: 1991 }, B::XCos(Frequency::per(4)), B::Cos(Frequency::times(2)), B::RootPower { i: 13, base: 1993 }]
                .into_iter().take(coefs.len()).collect();
            let fit = LinearFit { basis, coefficients: coefs, sse };
            let r = FitReport::from_linear_fit(&fit, (1993.0, 2003.0));
            prop_assert_eq!(FitReport::from_json(&r.to_json()).unwrap(), r);
        }
    }
}
