//! Published coefficient sets for the bundled CPI data.

use crate::basis::{BasisFunctionSpec as B, Frequency};
use crate::model::{BasisExpansion, CpiModel};
use crate::rate::RateFunction;

/// Trig rate expansion fitted directly to the interval growth equation.
pub fn published_direct_rate_expansion() -> BasisExpansion {
    let terms = vec![
        (B::Constant, 0.04944210),
        (B::Cos(Frequency::times(1)), 0.009094682),
        (B::Sin(Frequency::times(2)), 0.01215932),
        (B::Sin(Frequency::times(4)), 0.01823419),
        (B::Sin(Frequency::per(3)), 0.05263253),
        (B::Cos(Frequency::per(3)), -0.009667420),
        (B::Cos(Frequency::per(4)), -0.07212055),
        (B::Sin(Frequency::per(2)), 0.02834145),
    ];
    BasisExpansion { terms }
}

pub fn published_direct_rate() -> RateFunction {
    RateFunction::Basis { expansion: published_direct_rate_expansion(), domain: None }
}

/// Published trend: `constant + (5/12)^(x-1992) + (3/4)^(x-1992)`.
pub fn published_trend_expansion() -> BasisExpansion {
    BasisExpansion {
        terms: vec![
            (B::Constant, 151.558469453),
            (B::PowerDecay { i: 5, base: 1992 }, 53.8746490595),
            (B::PowerDecay { i: 9, base: 1992 }, -108.487078769),
        ],
    }
}

/// Published trend plus seasonal CPI expression.
pub fn published_combined_expansion() -> BasisExpansion {
    let mut terms = published_trend_expansion().terms;
    terms.extend([
        (B::Constant, -0.08688205539),
        (B::Sin(Frequency::per(5)), 438.678532386),
        (B::XSin(Frequency::per(5)), -0.219746118617),
        (B::XCos(Frequency::per(2)), -0.392448110715),
        (B::XSin(Frequency::per(1)), 0.000156347532197),
        (B::Cos(Frequency::per(2)), 782.647022069),
    ]);
    BasisExpansion { terms }
}

pub fn published_combined_model(domain: (f64, f64)) -> CpiModel {
    CpiModel::Basis { expansion: published_combined_expansion(), domain }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureConfig;
    use crate::rate::{accumulate, rate_from_cpi};

    #[test]
    fn direct_rate_matches_written_formula() {
        use std::f64::consts::PI;
        let r = published_direct_rate();
        for x in [1993.1, 1997.45, 2002.9] {
            let expected = 0.04944210 + 0.009094682 * (x * PI).cos() + 0.01215932 * (2.0 * x * PI).sin()
                + 0.01823419 * (4.0 * x * PI).sin() + 0.05263253 * (x * PI / 3.0).sin()
                - 0.009667420 * (x * PI / 3.0).cos() - 0.07212055 * (x * PI / 4.0).cos()
                + 0.02834145 * (x * PI / 2.0).sin();
            assert!((r.eval(x).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn published_combined_model_gives_published_half_year_rate() {
        let m = published_combined_model((1993.0, 2003.0));
        let acc = accumulate(&rate_from_cpi(&m), 1993.5, 1994.0, &QuadratureConfig::default()).unwrap();
        let ratio = m.value(1994.0).unwrap() / m.value(1993.5).unwrap() - 1.0;
        assert!((acc.rate - ratio).abs() < 1e-9);
        assert!((acc.rate - 0.04737).abs() < 5e-6, "{}", acc.rate);
    }
}
