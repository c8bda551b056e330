//! Single-mode coherent states `D(z)|0⟩`, `z = (ξ₁ + iξ₂)/√2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Chart, ChartId, TangentFrame};
use crate::error::Result;
use crate::state::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentChart {
    /// Fock-space dimension of the explicit realization.
    pub truncation: usize,
}

impl Default for CoherentChart {
    fn default() -> Self {
        CoherentChart { truncation: 64 }
    }
}

fn z_of(xi: &[f64]) -> Complex64 {
    Complex64::new(xi[0], xi[1]) / std::f64::consts::SQRT_2
}

/// `∂z/∂ξ^μ`.
fn dz() -> [Complex64; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [Complex64::new(r, 0.0), Complex64::new(0.0, r)]
}

impl CoherentChart {
    /// Fock amplitudes `e^{−|z|²/2} zⁿ/√n!`.
    fn amplitudes(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.truncation);
        let mut a = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
        for n in 0..self.truncation {
            if n > 0 {
                a = a * z / (n as f64).sqrt();
            }
            out.push(a);
        }
        out
    }
}

impl Chart for CoherentChart {
    fn id(&self) -> ChartId {
        ChartId::Coherent
    }

    fn n_params(&self) -> usize {
        2
    }

    fn in_domain(&self, xi: &[f64]) -> bool {
        xi.len() == 2 && xi.iter().all(|x| x.is_finite())
    }

    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64> {
        let (z, w) = (z_of(a), z_of(b));
        Some((z.conj() * w - 0.5 * z.norm_sqr() - 0.5 * w.norm_sqr()).exp())
    }

    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        self.check_domain(xi)?;
        let z = z_of(xi);
        let b = dz();
        // u_μ = (b_μ a† + a_μ) ψ with a_μ = −Re(z̄ b_μ).
        let a: Vec<f64> = b.iter().map(|bm| -(z.conj() * bm).re).collect();
        let connection = b.iter().map(|bm| Complex64::new(0.0, (z.conj() * bm).im)).collect();
        let gram = DMatrix::from_fn(2, 2, |m, n| {
            a[m] * a[n] + a[m] * b[n] * z.conj() + b[m].conj() * z * a[n] + b[m].conj() * b[n] * (1.0 + z.norm_sqr())
        });
        Ok(TangentFrame { connection, gram })
    }

    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        self.check_domain(xi)?;
        StateVector::new(self.amplitudes(z_of(xi)))
    }

    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_domain(xi)?;
        let z = z_of(xi);
        let amps = self.amplitudes(z);
        Ok(dz()
            .iter()
            .map(|bm| {
                let am = -(z.conj() * bm).re;
                // ∂(e^{−|z|²/2} zⁿ/√n!) = a_μ·amp_n + √n·b_μ·amp_{n−1}.
                (0..self.truncation)
                    .map(|n| {
                        let lower = if n > 0 { amps[n - 1] * (n as f64).sqrt() * bm } else { Complex64::new(0.0, 0.0) };
                        amps[n] * am + lower
                    })
                    .collect()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_is_half_identity_and_two_form_is_half() {
        let chart = CoherentChart::default();
        for xi in [[0.0, 0.0], [1.3, -0.7], [-2.0, 2.5]] {
            let f = chart.tangent_frame(&xi).unwrap();
            let g = f.metric();
            assert!((g[(0, 0)] - 0.5).abs() < 1e-14 && (g[(1, 1)] - 0.5).abs() < 1e-14 && g[(0, 1)].abs() < 1e-14);
            assert!((f.perp_gram()[(0, 1)] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
            assert!((f.two_form()[(0, 1)] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn expectation_values_of_q_and_p() {
        let chart = CoherentChart::default();
        let xi = [0.8, -1.1];
        let psi = chart.state_vector(&xi).unwrap();
        let a = psi.amplitudes();
        // ⟨a⟩ = z, q = (a + a†)/√2, p = (a − a†)/(i√2).
        let mean_a: Complex64 = (1..a.len()).map(|n| a[n - 1].conj() * a[n] * (n as f64).sqrt()).sum();
        let q = std::f64::consts::SQRT_2 * mean_a.re;
        let p = std::f64::consts::SQRT_2 * mean_a.im;
        assert!((q - xi[0]).abs() < 1e-12 && (p - xi[1]).abs() < 1e-12);
    }
}
