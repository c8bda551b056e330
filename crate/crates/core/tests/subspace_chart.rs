//! A generic chart `ψ(ξ) = normalize(v₀ + Σ ξ^μ v_μ)` exercising the geodesic and
//! symplectic machinery on charts without closed-form overlaps.

use std::sync::Arc;

use num_complex::Complex64;
use raylab_core::charts::TangentFrame;
use raylab_core::riemann::{geodesic_connect, induced_metric};
use raylab_core::sampling::{random_state, rng};
use raylab_core::state::inner_product;
use raylab_core::symplectic::{closedness_defect, pullback_projection_gap};
use raylab_core::{Chart, ChartId, Result, StateVector};

#[derive(Debug, Clone)]
struct SubspaceChart {
    origin: Vec<Complex64>,
    directions: Vec<Vec<Complex64>>,
}

impl SubspaceChart {
    fn new(origin: &StateVector, directions: &[StateVector]) -> Self {
        SubspaceChart {
            origin: origin.amplitudes().to_vec(),
            directions: directions.iter().map(|d| d.amplitudes().to_vec()).collect(),
        }
    }

    /// `(unnormalized φ(ξ), ‖φ‖)`.
    fn raw(&self, xi: &[f64]) -> (Vec<Complex64>, f64) {
        let mut phi = self.origin.clone();
        for (x, v) in xi.iter().zip(&self.directions) {
            for (p, w) in phi.iter_mut().zip(v) {
                *p += w * x;
            }
        }
        let n = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (phi, n)
    }
}

impl Chart for SubspaceChart {
    // The id only labels output; no catalogued behaviour is keyed on it here.
    fn id(&self) -> ChartId {
        ChartId::Coherent
    }

    fn n_params(&self) -> usize {
        self.directions.len()
    }

    fn in_domain(&self, xi: &[f64]) -> bool {
        xi.len() == self.n_params() && xi.iter().all(|x| x.is_finite()) && self.raw(xi).1 > 1e-6
    }

    fn analytic_overlap(&self, _a: &[f64], _b: &[f64]) -> Option<Complex64> {
        None
    }

    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        Ok(TangentFrame::from_vectors(&self.state_vector(xi)?, &self.tangent_vectors(xi)?))
    }

    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        let (phi, n) = self.raw(xi);
        StateVector::from_unit(phi.iter().map(|z| z / n).collect())
    }

    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        let (phi, n) = self.raw(xi);
        let psi: Vec<Complex64> = phi.iter().map(|z| z / n).collect();
        Ok(self
            .directions
            .iter()
            .map(|v| {
                let re = psi.iter().zip(v).map(|(p, w)| p.conj() * w).sum::<Complex64>().re;
                v.iter().zip(&psi).map(|(w, p)| (w - p * re) / n).collect()
            })
            .collect())
    }
}

fn basis(dim: usize, k: usize, scale: Complex64) -> StateVector {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[k] = scale;
    StateVector::from_unit(v).unwrap()
}

/// `ψ ∝ (1, ξ¹ + iξ²)`: the stereographic chart of the Bloch sphere.
fn stereographic() -> SubspaceChart {
    SubspaceChart::new(
        &basis(2, 0, Complex64::new(1.0, 0.0)),
        &[basis(2, 1, Complex64::new(1.0, 0.0)), basis(2, 1, Complex64::new(0.0, 1.0))],
    )
}

#[test]
fn stereographic_metric_is_fubini_study() {
    let chart = stereographic();
    for xi in [[0.0, 0.0], [0.4, -0.3], [1.5, 2.0]] {
        let g = induced_metric(&chart, &xi).unwrap().g;
        let w = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let expected = if i == j { 1.0 / (w * w) } else { 0.0 };
            assert!((g[(i, j)] - expected).abs() < 1e-12, "{xi:?}: g{i}{j} = {}", g[(i, j)]);
        }
    }
}

#[test]
fn shooting_recovers_free_geodesics() {
    let chart = Arc::new(stereographic());
    for (a, b) in [([0.0, 0.0], [1.0, 0.0]), ([0.3, -0.2], [-0.5, 0.9]), ([1.2, 0.4], [0.2, -1.1])] {
        let conn = geodesic_connect(chart.as_ref(), &a, &b, 400).unwrap();
        let (psi_a, psi_b) = (chart.state_vector(&a).unwrap(), chart.state_vector(&b).unwrap());
        let angle = inner_product(&psi_a, &psi_b).unwrap().norm().acos();
        assert!((conn.solution.length() - angle).abs() < 1e-8, "{a:?}->{b:?}: {} vs {angle}", conn.solution.length());
        let phi_g = conn.solution.to_chart_curve(&chart).unwrap().geometric_phase().unwrap();
        assert!(phi_g.abs() < 1e-8, "{a:?}->{b:?}: φ_g = {phi_g}");
    }
}

#[test]
fn pulled_back_two_form_is_closed_on_three_parameters() {
    let mut g = rng(7);
    let origin = random_state(&mut g, 4);
    let dirs: Vec<StateVector> = (0..3).map(|_| random_state(&mut g, 4)).collect();
    let chart = SubspaceChart::new(&origin, &dirs);
    for xi in [[0.0, 0.0, 0.0], [0.2, -0.1, 0.3], [-0.4, 0.5, 0.1]] {
        let d = closedness_defect(&chart, &xi, 1e-4).unwrap();
        assert!(d < 1e-5, "{xi:?}: dω = {d}");
        assert!(pullback_projection_gap(&chart, &xi).unwrap() < 1e-12);
    }
}
