//! Linear least squares over a basis of named functions.

use nalgebra::{DMatrix, DVector};

use crate::basis::BasisFunctionSpec;
use crate::error::{Error, Result};
use crate::model::BasisExpansion;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub basis: Vec<BasisFunctionSpec>,
    pub coefficients: Vec<f64>,
    /// Sum of squared residuals at the data points.
    pub sse: f64,
}

impl LinearFit {
    pub fn expansion(&self) -> BasisExpansion {
        BasisExpansion::new(&self.basis, &self.coefficients).expect("lengths match")
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.expansion().eval(x)
    }

    /// `fit(t) - value` at each point.
    pub fn residuals(&self, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        let e = self.expansion();
        points.iter().map(|&(t, v)| Ok(e.eval(t)? - v)).collect()
    }

    pub fn coefficient_of(&self, b: &BasisFunctionSpec) -> Option<f64> {
        self.basis.iter().position(|x| x == b).map(|i| self.coefficients[i])
    }
}

/// Design matrix with one column per basis function.
pub fn design_matrix(times: &[f64], basis: &[BasisFunctionSpec]) -> Result<DMatrix<f64>> {
    let mut a = DMatrix::zeros(times.len(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        for (i, &t) in times.iter().enumerate() {
            a[(i, j)] = b.eval_checked(t)?;
        }
    }
    Ok(a)
}

/// Minimum-norm least-squares solution of `a * c ≈ y`.
///
/// Columns are scaled to unit norm before the SVD, so for rank-deficient
/// designs the norm is minimised in those equilibrated coordinates.
pub fn solve_min_norm(a: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let (n, m) = a.shape();
    let mut scaled = a.clone();
    let mut norms = vec![0.0; m];
    for j in 0..m {
        let norm = scaled.column(j).norm();
        norms[j] = norm;
        if norm > 0.0 {
            scaled.column_mut(j).unscale_mut(norm);
        }
    }
    let svd = scaled.svd(true, true);
    let s_max = svd.singular_values.max();
    let cutoff = f64::EPSILON * n.max(m) as f64 * s_max;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut c = DVector::zeros(m);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let proj = u.column(k).dot(y) / s;
            c += v_t.row(k).transpose() * proj;
        }
    }
    for j in 0..m {
        c[j] = if norms[j] > 0.0 { c[j] / norms[j] } else { 0.0 };
    }
    c
}

pub fn linear_least_squares(points: &[(f64, f64)], basis: &[BasisFunctionSpec]) -> Result<LinearFit> {
    if basis.is_empty() {
        return Err(Error::Domain("least squares needs at least one basis function".into()));
    }
    if points.len() < basis.len() {
        return Err(Error::Domain(format!(
            "{} data points cannot determine {} coefficients",
            points.len(),
            basis.len()
        )));
    }
    let times: Vec<f64> = points.iter().map(|p| p.0).collect();
    let a = design_matrix(&times, basis)?;
    let y = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let c = solve_min_norm(&a, &y);
    let r = &a * &c - &y;
    Ok(LinearFit { basis: basis.to_vec(), coefficients: c.iter().copied().collect(), sse: r.norm_squared() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{BasisFunctionSpec as B, Frequency};
    use proptest::prelude::*;

    #[test]
    fn constant_fit() {
        let f = linear_least_squares(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)], &[B::Constant]).unwrap();
        assert!((f.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(f.sse < 1e-28);
    }

    #[test]
    fn interpolating_line() {
        let line = B::RootPower { i: 12, base: 0 };
        let f = linear_least_squares(&[(0.0, 0.0), (1.0, 1.0)], &[B::Constant, line]).unwrap();
        assert!(f.coefficients[0].abs() < 1e-14);
        assert!((f.coefficients[1] - 1.0).abs() < 1e-14);
        assert!(f.sse < 1e-28);
    }

    #[test]
    fn too_few_points_and_bad_domain() {
        assert!(linear_least_squares(&[(0.0, 1.0)], &[B::Constant, B::Sin(Frequency::per(1))]).is_err());
        match linear_least_squares(&[(0.5, 1.0), (2.0, 1.0)], &[B::LogShift { base: 1 }]) {
            Err(Error::Basis { name, at }) => {
                assert_eq!(name, "ln:1");
                assert_eq!(at, 0.5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rank_deficient_columns_share_weight() {
        // (3/4)^(x-1993) = (4/3) (3/4)^(x-1992)
        let a = B::PowerDecay { i: 9, base: 1992 };
        let b = B::PowerDecay { i: 9, base: 1993 };
        let pts: Vec<_> = (0..20).map(|k| {
            let x = 1993.0 + k as f64 / 12.0;
            (x, 2.0 + 3.0 * a.eval(x).unwrap())
        }).collect();
        let f = linear_least_squares(&pts, &[B::Constant, a, b]).unwrap();
        assert!(f.sse < 1e-20);
        assert!(f.coefficients.iter().all(|c| c.is_finite()));
        let single = linear_least_squares(&pts, &[B::Constant, a]).unwrap();
        assert!((single.coefficients[1] - 3.0).abs() < 1e-9);
    }

    fn random_basis() -> Vec<B> {
        vec![
            B::Constant,
            B::Sin(Frequency::per(1)),
            B::Cos(Frequency::per(2)),
            B::XSin(Frequency::per(3)),
            B::XCos(Frequency::per(5)),
            B::PowerDecay { i: 7, base: 1992 },
            B::RootPower { i: 5, base: 1993 },
        ]
    }

    proptest! {
        #[test]
        fn residual_is_orthogonal_to_columns(noise in prop::collection::vec(-1.0f64..1.0, 60), mask in 1u8..127) {
            let pts: Vec<_> = noise.iter().enumerate().map(|(k, e)| {
                let x = 1993.0 + (k as f64 + 1.0) / 12.0;
                (x, 100.0 + 5.0 * (x - 1993.0) + e)
            }).collect();
            let basis: Vec<B> = random_basis().into_iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, b)| b).collect();
            let fit = linear_least_squares(&pts, &basis).unwrap();
            let r = fit.residuals(&pts).unwrap();
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((fit.sse - rn * rn).abs() <= 1e-8 * fit.sse.max(1e-300));
            for b in &basis {
                let col: Vec<f64> = pts.iter().map(|p| b.eval(p.0).unwrap()).collect();
                let cn = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                let dot: f64 = col.iter().zip(&r).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() <= 1e-6 * rn * cn, "{}: {} vs {}", b, dot, rn * cn);
            }
        }

        #[test]
        fn adding_a_column_never_increases_sse(noise in prop::collection::vec(-1.0f64..1.0, 60), mask in 1u8..63, extra in 0usize..7) {
            let pts: Vec<_> = noise.iter().enumerate().map(|(k, e)| (1993.0 + (k as f64 + 1.0) / 12.0, 3.0 * e)).collect();
            let all = random_basis();
            let basis: Vec<B> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, b)| *b).collect();
            prop_assume!(!basis.contains(&all[extra]));
            let mut bigger = basis.clone();
            bigger.push(all[extra]);
            let small = linear_least_squares(&pts, &basis).unwrap().sse;
            let big = linear_least_squares(&pts, &bigger).unwrap().sse;
            prop_assert!(big <= small * (1.0 + 1e-10) + 1e-12);
        }
    }
}
