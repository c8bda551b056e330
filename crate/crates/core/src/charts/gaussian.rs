//! Centered Gaussians `ψ(q) = (ξ₂/π)^{1/4} exp(i(ξ₁ + iξ₂)q²/2)`, `ξ₂ > 0`.
//!
//! The explicit realization samples `√h·ψ(q_k)` on a uniform grid over
//! `[−L, L]`; for rapidly decaying integrands the trapezoid rule on such a
//! grid is spectrally accurate, so grid inner products reproduce the
//! continuum ones to near machine precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Chart, ChartId, TangentFrame};
use crate::error::Result;
use crate::state::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChart {
    /// Half-width `L` of the position grid.
    pub half_width: f64,
    /// Number of grid nodes.
    pub nodes: usize,
}

impl Default for GaussianChart {
    fn default() -> Self {
        GaussianChart { half_width: 24.0, nodes: 6001 }
    }
}

impl GaussianChart {
    pub fn grid(&self) -> Vec<f64> {
        crate::curve::uniform_grid(-self.half_width, self.half_width, self.nodes)
    }

    fn step(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    /// `√h·ψ(q_k)` without renormalization.
    fn samples(&self, xi: &[f64]) -> Vec<Complex64> {
        let w = self.step().sqrt() * (xi[1] / std::f64::consts::PI).powf(0.25);
        let k = Complex64::new(xi[0], xi[1]) * Complex64::new(0.0, 0.5);
        self.grid().iter().map(|q| (k * q * q).exp() * w).collect()
    }

    /// `(ψ, q^{2m} ψ)` by grid quadrature.
    pub fn even_moment(&self, xi: &[f64], m: i32) -> Result<f64> {
        self.check_domain(xi)?;
        let s = self.samples(xi);
        Ok(self.grid().iter().zip(&s).map(|(q, a)| q.powi(2 * m) * a.norm_sqr()).sum())
    }
}

impl Chart for GaussianChart {
    fn id(&self) -> ChartId {
        ChartId::Gaussian
    }

    fn n_params(&self) -> usize {
        2
    }

    fn in_domain(&self, xi: &[f64]) -> bool {
        xi.len() == 2 && xi[0].is_finite() && xi[1].is_finite() && xi[1] > 0.0
    }

    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64> {
        let num = (4.0 * a[1] * b[1]).powf(0.25);
        let den = Complex64::new(a[1] + b[1], -(b[0] - a[0])).sqrt();
        Some(num / den)
    }

    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        self.check_domain(xi)?;
        let y2 = xi[1] * xi[1];
        let i = Complex64::i();
        let connection = vec![i / (4.0 * xi[1]), Complex64::new(0.0, 0.0)];
        let gram = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(3.0 / (16.0 * y2), 0.0),
                i / (8.0 * y2),
                -i / (8.0 * y2),
                Complex64::new(1.0 / (8.0 * y2), 0.0),
            ],
        );
        Ok(TangentFrame { connection, gram })
    }

    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        self.check_domain(xi)?;
        StateVector::new(self.samples(xi))
    }

    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_domain(xi)?;
        let s = self.samples(xi);
        let q = self.grid();
        let d1 = q.iter().zip(&s).map(|(q, a)| a * Complex64::new(0.0, 0.5 * q * q)).collect();
        let d2 = q.iter().zip(&s).map(|(q, a)| a * (0.25 / xi[1] - 0.5 * q * q)).collect();
        Ok(vec![d1, d2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_closed_forms() {
        let chart = GaussianChart::default();
        for y in [0.5, 1.0, 2.0, 3.5] {
            let xi = [0.3, y];
            assert!((chart.even_moment(&xi, 0).unwrap() - 1.0).abs() < 1e-12);
            assert!((chart.even_moment(&xi, 1).unwrap() - 1.0 / (2.0 * y)).abs() < 1e-8);
            assert!((chart.even_moment(&xi, 2).unwrap() - 3.0 / (4.0 * y * y)).abs() < 1e-8);
        }
    }

    #[test]
    fn metric_is_lobachevskian() {
        let chart = GaussianChart::default();
        let f = chart.tangent_frame(&[0.0, 2.0]).unwrap();
        let g = f.metric();
        assert!((g[(0, 0)] - 1.0 / 32.0).abs() < 1e-15 && (g[(1, 1)] - 1.0 / 32.0).abs() < 1e-15);
        assert!(g[(0, 1)].abs() < 1e-15);
        assert!((f.two_form()[(0, 1)] - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_overlap_against_grid_quadrature() {
        let chart = GaussianChart::default();
        let pts = [[0.0, 1.0], [1.0, 1.0], [-0.7, 0.4], [2.0, 3.0]];
        for a in &pts {
            for b in &pts {
                let exact = chart.analytic_overlap(a, b).unwrap();
                let num: Complex64 = chart.samples(a).iter().zip(chart.samples(b)).map(|(x, y)| x.conj() * y).sum();
                assert!((exact - num).norm() < 1e-12, "{a:?} {b:?}");
            }
        }
    }
}
