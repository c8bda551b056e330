//! Real unit vectors in `ℝ^d` in hyperspherical angles; an isotropic chart.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Chart, ChartId, TangentFrame};
use crate::error::{Error, Result};
use crate::state::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct RealSphereChart {
    dim: usize,
}

impl RealSphereChart {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall(dim));
        }
        Ok(RealSphereChart { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `x₁ = cos χ₁, x₂ = sin χ₁ cos χ₂, …, x_d = sin χ₁ ⋯ sin χ_{d−1}`.
    pub fn point(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        let mut prefix = 1.0;
        for &chi in xi {
            out.push(prefix * chi.cos());
            prefix *= chi.sin();
        }
        out.push(prefix);
        out
    }

    fn derivative(&self, xi: &[f64], mu: usize) -> Vec<f64> {
        let mut shifted = xi.to_vec();
        shifted[mu] += std::f64::consts::FRAC_PI_2;
        // ∂/∂χ_μ turns cos χ_μ into −sin χ_μ and sin χ_μ into cos χ_μ in every
        // coordinate that contains it; coordinates before μ do not depend on it.
        let p = self.point(&shifted);
        p.into_iter().enumerate().map(|(k, x)| if k < mu { 0.0 } else { x }).collect()
    }
}

impl Chart for RealSphereChart {
    fn id(&self) -> ChartId {
        ChartId::Realsphere
    }

    fn n_params(&self) -> usize {
        self.dim - 1
    }

    fn in_domain(&self, xi: &[f64]) -> bool {
        xi.len() == self.dim - 1 && xi.iter().all(|x| x.is_finite())
    }

    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64> {
        let d: f64 = self.point(a).iter().zip(self.point(b)).map(|(x, y)| x * y).sum();
        Some(Complex64::new(d, 0.0))
    }

    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        self.check_domain(xi)?;
        let n = self.n_params();
        let u: Vec<Vec<f64>> = (0..n).map(|mu| self.derivative(xi, mu)).collect();
        let gram = DMatrix::from_fn(n, n, |i, j| Complex64::new(u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum(), 0.0));
        Ok(TangentFrame { connection: vec![Complex64::new(0.0, 0.0); n], gram })
    }

    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        self.check_domain(xi)?;
        StateVector::from_real(&self.point(xi))
    }

    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_domain(xi)?;
        Ok((0..self.n_params())
            .map(|mu| self.derivative(xi, mu).into_iter().map(|x| Complex64::new(x, 0.0)).collect())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_two_form_vanishes() {
        let chart = RealSphereChart::new(5).unwrap();
        let xi = [0.3, 1.2, -0.7, 2.2];
        let p = chart.point(&xi);
        assert!((p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-15);
        let f = chart.tangent_frame(&xi).unwrap();
        assert!(f.two_form().iter().all(|x| *x == 0.0));
        // Round-sphere metric: diag(1, sin²χ₁, sin²χ₁ sin²χ₂, …).
        let g = f.metric();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((g[(1, 1)] - 0.3f64.sin().powi(2)).abs() < 1e-15);
        assert!((g[(2, 2)] - (0.3f64.sin() * 1.2f64.sin()).powi(2)).abs() < 1e-15);
        assert!(g[(0, 2)].abs() < 1e-15);
        assert!(RealSphereChart::new(2).is_err());
    }
}
