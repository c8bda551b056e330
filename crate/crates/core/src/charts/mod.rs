//! Parametric families `ξ ↦ ψ(ξ)` of states with tangents and analytic overlaps.
//!
//! Each chart has two realizations. The analytic one supplies exact overlaps
//! and first-order data `c_μ = (ψ, u_μ)`, `G_μν = (u_μ, u_ν)`; the explicit one
//! is a finite (possibly truncated) vector used for cross-validation.

mod coherent;
mod gaussian;
mod path;
mod realsphere;
mod sphere;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use coherent::CoherentChart;
pub use gaussian::GaussianChart;
pub use path::{null_phase_family, Path, PathSpec};
pub use realsphere::RealSphereChart;
pub use sphere::TwoModeSphereChart;

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::state::{inner_product, phase_of, PureState, StateVector, TangentSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartId {
    Coherent,
    Gaussian,
    Sphere2mode,
    Realsphere,
}

impl ChartId {
    pub const ALL: [ChartId; 4] = [ChartId::Coherent, ChartId::Gaussian, ChartId::Sphere2mode, ChartId::Realsphere];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChartId::Coherent => "coherent",
            ChartId::Gaussian => "gaussian",
            ChartId::Sphere2mode => "sphere2mode",
            ChartId::Realsphere => "realsphere",
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChartId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChartId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown chart id `{s}`")))
    }
}

/// First-order data at one chart point: `c_μ = (ψ, u_μ)` and `G_μν = (u_μ, u_ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub connection: Vec<Complex64>,
    pub gram: DMatrix<Complex64>,
}

impl TangentFrame {
    /// Builds the frame from an explicit state and explicit tangent vectors.
    pub fn from_vectors(psi: &StateVector, u: &[Vec<Complex64>]) -> Self {
        let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        let connection = u.iter().map(|v| dot(psi.amplitudes(), v)).collect();
        let n = u.len();
        let gram = DMatrix::from_fn(n, n, |i, j| dot(&u[i], &u[j]));
        TangentFrame { connection, gram }
    }

    pub fn dim(&self) -> usize {
        self.connection.len()
    }

    /// `(u⊥_μ, u⊥_ν) = G_μν − conj(c_μ) c_ν`.
    pub fn perp_gram(&self) -> DMatrix<Complex64> {
        let c = &self.connection;
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.gram[(i, j)] - c[i].conj() * c[j])
    }

    /// Induced metric `g_μν = Re(u⊥_μ, u⊥_ν)`.
    pub fn metric(&self) -> DMatrix<f64> {
        self.perp_gram().map(|z| z.re)
    }

    /// Pullback two-form `Im(u_μ, u_ν)`.
    pub fn two_form(&self) -> DMatrix<f64> {
        self.gram.map(|z| z.im)
    }

    /// Tangent data of a chart curve moving with velocity `ξ̇`.
    pub fn curve_tangent(&self, xi_dot: &[f64]) -> TangentSample {
        let connection = self.connection.iter().zip(xi_dot).map(|(c, v)| c * v).sum();
        let v = DVector::from_column_slice(xi_dot);
        let re = self.gram.map(|z| z.re);
        TangentSample { connection, speed_sq: v.dot(&(re * &v)) }
    }
}

/// How tangent vectors are obtained for metric computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentSource {
    /// Closed-form `c_μ` and `G_μν`.
    #[default]
    Analytic,
    /// Exact derivatives of the explicit realization.
    Explicit,
    /// Central differences of the explicit realization.
    FiniteDifference,
}

pub trait Chart: Clone + Send + Sync + fmt::Debug + 'static {
    fn id(&self) -> ChartId;

    /// Real dimension of the submanifold.
    fn n_params(&self) -> usize;

    fn in_domain(&self, xi: &[f64]) -> bool;

    /// `(ψ(ξ), ψ(ξ′))` in closed form, if the chart has one.
    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64>;

    /// Closed-form first-order data.
    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame>;

    /// The explicit (possibly truncated) state vector.
    fn state_vector(&self, xi: &[f64]) -> Result<StateVector>;

    /// Exact derivatives `∂ψ/∂ξ^μ` of the explicit realization.
    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>>;

    fn check_domain(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.n_params() {
            return Err(Error::DimensionMismatch(self.n_params(), xi.len()));
        }
        if !self.in_domain(xi) {
            return Err(Error::DomainViolation(format!("{} chart: {xi:?} outside domain", self.id())));
        }
        Ok(())
    }

    /// Central differences of [`Chart::state_vector`].
    fn fd_tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        (0..self.n_params())
            .map(|mu| {
                let h = 1e-5 * xi[mu].abs().max(1.0);
                let mut p = xi.to_vec();
                let mut m = xi.to_vec();
                p[mu] += h;
                m[mu] -= h;
                let (vp, vm) = (self.state_vector(&p)?, self.state_vector(&m)?);
                Ok(vp.amplitudes().iter().zip(vm.amplitudes()).map(|(a, b)| (a - b) / (2.0 * h)).collect())
            })
            .collect()
    }

    fn frame_with(&self, xi: &[f64], source: TangentSource) -> Result<TangentFrame> {
        self.check_domain(xi)?;
        match source {
            TangentSource::Analytic => self.tangent_frame(xi),
            TangentSource::Explicit => {
                Ok(TangentFrame::from_vectors(&self.state_vector(xi)?, &self.tangent_vectors(xi)?))
            }
            TangentSource::FiniteDifference => {
                Ok(TangentFrame::from_vectors(&self.state_vector(xi)?, &self.fd_tangent_vectors(xi)?))
            }
        }
    }
}

/// A chart state `e^{iα} ψ(ξ)`.
#[derive(Clone)]
pub struct ChartPoint<C> {
    chart: Arc<C>,
    xi: Vec<f64>,
    phase: f64,
}

impl<C: Chart> fmt::Debug for ChartPoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartPoint")
            .field("chart", &self.chart.id())
            .field("xi", &self.xi)
            .field("phase", &self.phase)
            .finish()
    }
}

impl<C: Chart> ChartPoint<C> {
    pub fn new(chart: Arc<C>, xi: Vec<f64>) -> Result<Self> {
        chart.check_domain(&xi)?;
        Ok(ChartPoint { chart, xi, phase: 0.0 })
    }

    pub fn chart(&self) -> &Arc<C> {
        &self.chart
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The explicit vector, including the phase.
    pub fn to_vector(&self) -> Result<StateVector> {
        Ok(self.chart.state_vector(&self.xi)?.rephased(self.phase))
    }
}

impl<C: Chart> PureState for ChartPoint<C> {
    fn overlap(&self, other: &Self) -> Result<Complex64> {
        let base = match self.chart.analytic_overlap(&self.xi, &other.xi) {
            Some(z) => z,
            None => inner_product(&self.chart.state_vector(&self.xi)?, &other.chart.state_vector(&other.xi)?)?,
        };
        Ok(base * Complex64::from_polar(1.0, other.phase - self.phase))
    }

    fn rephased(&self, theta: f64) -> Self {
        ChartPoint { chart: self.chart.clone(), xi: self.xi.clone(), phase: self.phase + theta }
    }
}

/// `arg(ψ(ξ), ψ(ξ′))` from the closed-form overlap.
pub fn analytic_overlap_phase<C: Chart>(chart: &C, a: &[f64], b: &[f64]) -> Result<f64> {
    chart.check_domain(a)?;
    chart.check_domain(b)?;
    let z = chart
        .analytic_overlap(a, b)
        .ok_or_else(|| Error::Unsupported(format!("{} chart has no analytic overlap", chart.id())))?;
    phase_of(z, "analytic_overlap_phase")
}

/// Samples a chart path with analytic tangents `ξ̇^μ u_μ`.
pub fn chart_curve<C: Chart, P: Path + ?Sized>(
    chart: &Arc<C>,
    path: &P,
    grid: &[f64],
) -> Result<SampledCurve<ChartPoint<C>>> {
    let mut states = Vec::with_capacity(grid.len());
    let mut tangents = Vec::with_capacity(grid.len());
    for (&s, (xi, xi_dot)) in grid.iter().zip(path.sample(grid)) {
        if !chart.in_domain(&xi) {
            return Err(Error::DomainViolation(format!("{} chart: path leaves domain at s = {s}", chart.id())));
        }
        tangents.push(chart.tangent_frame(&xi)?.curve_tangent(&xi_dot));
        states.push(ChartPoint::new(chart.clone(), xi)?);
    }
    SampledCurve::with_tangents(grid.to_vec(), states, tangents)
}

/// [`chart_curve`] on the default grid over `[0, 1]`.
pub fn chart_curve_default<C: Chart, P: Path + ?Sized>(
    chart: &Arc<C>,
    path: &P,
) -> Result<SampledCurve<ChartPoint<C>>> {
    chart_curve(chart, path, &crate::curve::uniform_grid(0.0, 1.0, crate::curve::DEFAULT_NODES))
}

/// Any of the catalogued charts behind one type, for runtime dispatch.
#[derive(Debug, Clone)]
pub enum AnyChart {
    Coherent(CoherentChart),
    Gaussian(GaussianChart),
    Sphere2mode(TwoModeSphereChart),
    Realsphere(RealSphereChart),
}

impl AnyChart {
    /// The chart with default settings; `dim` sets the real-sphere ambient dimension.
    pub fn build(id: ChartId, dim: usize) -> Result<Self> {
        Ok(match id {
            ChartId::Coherent => AnyChart::Coherent(CoherentChart::default()),
            ChartId::Gaussian => AnyChart::Gaussian(GaussianChart::default()),
            ChartId::Sphere2mode => AnyChart::Sphere2mode(TwoModeSphereChart::default()),
            ChartId::Realsphere => AnyChart::Realsphere(RealSphereChart::new(dim)?),
        })
    }
}

macro_rules! dispatch {
    ($self:ident, $c:ident => $e:expr) => {
        match $self {
            AnyChart::Coherent($c) => $e,
            AnyChart::Gaussian($c) => $e,
            AnyChart::Sphere2mode($c) => $e,
            AnyChart::Realsphere($c) => $e,
        }
    };
}

impl Chart for AnyChart {
    fn id(&self) -> ChartId {
        dispatch!(self, c => c.id())
    }
    fn n_params(&self) -> usize {
        dispatch!(self, c => c.n_params())
    }
    fn in_domain(&self, xi: &[f64]) -> bool {
        dispatch!(self, c => c.in_domain(xi))
    }
    fn analytic_overlap(&self, a: &[f64], b: &[f64]) -> Option<Complex64> {
        dispatch!(self, c => c.analytic_overlap(a, b))
    }
    fn tangent_frame(&self, xi: &[f64]) -> Result<TangentFrame> {
        dispatch!(self, c => c.tangent_frame(xi))
    }
    fn state_vector(&self, xi: &[f64]) -> Result<StateVector> {
        dispatch!(self, c => c.state_vector(xi))
    }
    fn tangent_vectors(&self, xi: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        dispatch!(self, c => c.tangent_vectors(xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn charts() -> Vec<(AnyChart, Vec<Vec<f64>>)> {
        vec![
            (AnyChart::build(ChartId::Coherent, 0).unwrap(), vec![vec![0.3, -0.4], vec![1.0, 1.2], vec![-1.5, 0.2]]),
            (AnyChart::build(ChartId::Gaussian, 0).unwrap(), vec![vec![0.0, 1.0], vec![0.7, 0.5], vec![-1.0, 2.0]]),
            (AnyChart::build(ChartId::Sphere2mode, 0).unwrap(), vec![vec![0.4, 0.3], vec![1.2, -2.0], vec![2.5, 1.0]]),
            (AnyChart::build(ChartId::Realsphere, 4).unwrap(), vec![vec![0.4, 0.3, 1.1], vec![1.2, 2.0, -0.4]]),
        ]
    }

    #[test]
    fn explicit_states_are_normalized_and_tangents_orthogonal_in_real_part() {
        for (chart, points) in charts() {
            for xi in points {
                let psi = chart.state_vector(&xi).unwrap();
                assert!((psi.norm() - 1.0).abs() < 1e-10);
                let frame = chart.tangent_frame(&xi).unwrap();
                for c in &frame.connection {
                    assert!(c.re.abs() < 1e-8, "{} {xi:?}", chart.id());
                }
            }
        }
    }

    #[test]
    fn finite_difference_tangents_match_exact_ones() {
        for (chart, points) in charts() {
            for xi in points {
                let exact = chart.tangent_vectors(&xi).unwrap();
                let fd = chart.fd_tangent_vectors(&xi).unwrap();
                for (e, f) in exact.iter().zip(&fd) {
                    let err = e.iter().zip(f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                    assert!(err < 1e-6, "{} {xi:?}: {err}", chart.id());
                }
            }
        }
    }

    #[test]
    fn analytic_frames_match_explicit_realizations() {
        for (chart, points) in charts() {
            for xi in points {
                let a = chart.frame_with(&xi, TangentSource::Analytic).unwrap();
                let e = chart.frame_with(&xi, TangentSource::Explicit).unwrap();
                for (x, y) in a.connection.iter().zip(&e.connection) {
                    assert!((x - y).norm() < 1e-8, "{} {xi:?}", chart.id());
                }
                assert!((&a.gram - &e.gram).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-8, "{}", chart.id());
            }
        }
    }

    #[test]
    fn analytic_overlaps_match_explicit_vectors() {
        for (chart, points) in charts() {
            for a in &points {
                assert!((chart.analytic_overlap(a, a).unwrap() - 1.0).norm() < 1e-10);
                for b in &points {
                    let z = chart.analytic_overlap(a, b).unwrap();
                    let w = inner_product(&chart.state_vector(a).unwrap(), &chart.state_vector(b).unwrap()).unwrap();
                    assert!((z - w).norm() < 1e-8, "{} {a:?} {b:?}: {z} vs {w}", chart.id());
                }
            }
        }
    }

    #[test]
    fn overlap_phase_examples() {
        let coh = CoherentChart::default();
        let s2 = std::f64::consts::SQRT_2;
        assert!(analytic_overlap_phase(&coh, &[0.0, 0.0], &[s2, s2]).unwrap().abs() < 1e-15);
        let g = GaussianChart::default();
        let p = analytic_overlap_phase(&g, &[0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!((p - 0.5 * 0.5f64.atan()).abs() < 1e-14);
        let sph = TwoModeSphereChart::default();
        let p = analytic_overlap_phase(&sph, &[0.0, 0.0], &[std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
        assert!(p.abs() < 1e-15);
    }

    #[test]
    fn chart_points_rephase_and_overlap() {
        let chart = Arc::new(CoherentChart::default());
        let a = ChartPoint::new(chart.clone(), vec![0.1, 0.2]).unwrap();
        let b = a.rephased(0.4);
        assert!((a.overlap(&b).unwrap() - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!(ChartPoint::new(Arc::new(GaussianChart::default()), vec![0.0, -1.0]).is_err());
    }

    #[test]
    fn chart_ids_parse() {
        for id in ChartId::ALL {
            assert_eq!(id.as_str().parse::<ChartId>().unwrap(), id);
        }
        assert!("bloch".parse::<ChartId>().is_err());
    }
}
