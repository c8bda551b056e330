//! Two-mode coherent states with `z = (cos θ, e^{iφ} sin θ)`.
//!
//! With `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)` one has `z = (n₃, n₁ + i n₂)`,
//! so the overlap is `exp(n̂·n̂′ − 1 + i(n̂ ∧ n̂′)₃)`. Negative `θ` is allowed:
//! `(−θ, φ + π)` names the same point, which lets meridians pass the poles
//! without a coordinate jump.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Chart, ChartId, TangentFrame};
use crate::error::{Error, Result};
use crate::state::StateVector;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeSphereChart {
    /// Fock-space dimension per mode of the explicit realization.
    pub truncation: usize,
}

impl Default for TwoModeSphereChart {
    fn default() -> Self {
        TwoModeSphereChart { truncation: 32 }
    }
}

/// Below this `|sin θ|` the azimuth is inessential and metric operations refuse.
pub const POLE_EXCLUSION: f64 = 1e-8;

pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

fn z_of(xi: &[f64]) -> [Complex64; 2] {
    [Complex64::new(xi[0].cos(), 0.0), Complex64::from_polar(xi[0].sin(), xi[1])]
}

/// `∂z/∂θ`, `∂z/∂φ`.
fn dz(xi: &[f64]) -> [[Complex64; 2]; 2] {
    let (t, p) = (xi[0], xi[1]);
    [
        [Complex64::new(-t.sin(), 0.0), Complex64::from_polar(t.cos(), p)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(t.sin(), p) * Complex64::i()],
    ]
}

fn cdot(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn factorials_sqrt(n: usize) -> Vec<f64> {
    let mut out = vec![1.0; n];
    for k in 1..n {
        out[k] = out[k - 1] * (k as f64).sqrt();
    }
    out
}

impl TwoModeSphereChart {
    fn mode(&self, z: Complex64) -> Vec<Complex64> {
        let f = factorials_sqrt(self.truncation);
        let mut p = Complex64::new(1.0, 0.0);
        (0..self.truncation)
            .map(|n| {
                if n > 0 {
                    p *= z;
                }
                p / f[n]
            })
            .collect()
    }

    fn amplitudes(&self, z: &[Complex64; 2]) -> Vec<Complex64> {
        let (a, b) = (self.mode(z[0]), self.mode(z[1]));
        let norm = (-0.5 * (z[0].norm_sqr() + z[1].norm_sqr())).exp();
        a.iter().flat_map(|x| b.iter().map(move |y| x * y * norm)).collect()
    }

    /// Refuses points where `sin θ` vanishes.
    pub fn check_regular(&self, xi: &[f64]) -> Result<()> {
        if xi[0].sin().abs() < POLE_EXCLUSION {
            return Err(Error::SingularMetric(xi[0].sin().powi(2)));
        }
        Ok(())
    }
}

impl Chart for TwoModeSphereChart {
    fn id(&self) -> ChartId {
        ChartId::Sphere2mode
    }

    fn n_params(&self) -> usize {
        2
    }

    fn in_domain(&self, xi: &[f64]) -> bool {
        xi.len() == 2 && xi.iter().all(|x| x.is_finite())
    }

    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64> {
        let (z, w) = (z_of(a), z_of(b));
        Some((cdot(&z, &w) - 1.0).exp())
    }

    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        self.check_domain(xi)?;
        let z = z_of(xi);
        let d = dz(xi);
        let connection: Vec<Complex64> = d.iter().map(|dm| cdot(&z, dm)).collect();
        let gram = DMatrix::from_fn(2, 2, |m, n| cdot(&d[m], &d[n]) + connection[m].conj() * connection[n]);
        Ok(TangentFrame { connection, gram })
    }

    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        self.check_domain(xi)?;
        StateVector::new(self.amplitudes(&z_of(xi)))
    }

    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        self.check_domain(xi)?;
        let z = z_of(xi);
        let n = self.truncation;
        let amps = self.amplitudes(&z);
        // u_μ = (∂_μz · a†) ψ, valid because |z| = 1 is constant.
        Ok(dz(xi)
            .iter()
            .map(|dm| {
                let mut u = vec![Complex64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    for j in 0..n {
                        if i + 1 < n {
                            u[(i + 1) * n + j] += dm[0] * (i as f64 + 1.0).sqrt() * amps[i * n + j];
                        }
                        if j + 1 < n {
                            u[i * n + j + 1] += dm[1] * (j as f64 + 1.0).sqrt() * amps[i * n + j];
                        }
                    }
                }
                u
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn metric_is_round_sphere() {
        let chart = TwoModeSphereChart::default();
        let f = chart.tangent_frame(&[PI / 3.0, 0.4]).unwrap();
        let g = f.metric();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15 && (g[(1, 1)] - 0.75).abs() < 1e-15 && g[(0, 1)].abs() < 1e-15);
        let t = 0.7f64;
        let f = chart.tangent_frame(&[t, 1.0]).unwrap();
        assert!((f.perp_gram()[(0, 1)].im - t.cos() * t.sin()).abs() < 1e-15);
    }

    #[test]
    fn overlap_phase_is_exactly_the_wedge_component() {
        let chart = TwoModeSphereChart::default();
        let pts = [[0.3, 0.1], [2.0, -1.4], [1.1, 2.9], [-0.6, 0.5]];
        for a in &pts {
            for b in &pts {
                let (n, m) = (unit_vector(a[0], a[1]), unit_vector(b[0], b[1]));
                let z = chart.analytic_overlap(a, b).unwrap();
                let wedge = n[0] * m[1] - n[1] * m[0];
                let dot = n[0] * m[0] + n[1] * m[1] + n[2] * m[2];
                assert!((z.arg() - wedge).abs() < 1e-14);
                assert!((z.norm() - (dot - 1.0).exp()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn signed_theta_names_the_same_state() {
        let chart = TwoModeSphereChart::default();
        let z = chart.analytic_overlap(&[0.4, 1.0], &[-0.4, 1.0 + PI]).unwrap();
        assert!((z - 1.0).norm() < 1e-15);
        assert!(chart.check_regular(&[0.0, 1.0]).is_err());
    }
}
