//! Bargmann invariants, their decomposition into triangles, and the
//! polygon identity `φ_g[closed polygon] = −arg Δ_n` for null-phase sides.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charts::{chart_curve, null_phase_family, Chart, ChartPoint, PathSpec};
use crate::curve::{uniform_grid, SampledCurve};
use crate::error::{Error, Result};
use crate::nullphase::free_geodesic;
use crate::state::{
    phase_of, project_to_ray, trace_product, wrap_phase, PureState, StateVector, ORTHOGONALITY_THRESHOLD,
};

/// Below this modulus `arg Δ_n` is not reported.
pub const PHASE_THRESHOLD: f64 = 1e-12;

/// Default connector resolution per polygon side.
pub const DEFAULT_SIDE_NODES: usize = 512;

/// Total node cap for refinement.
pub const MAX_TOTAL_NODES: usize = 1 << 20;

/// `n ≥ 2` states with no two cyclically consecutive ones orthogonal.
#[derive(Debug, Clone)]
pub struct VertexList<P> {
    states: Vec<P>,
}

impl<P: PureState> VertexList<P> {
    pub fn new(states: Vec<P>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: states.len() });
        }
        let n = states.len();
        for j in 0..n {
            let k = (j + 1) % n;
            if states[j].overlap(&states[k])?.norm() <= ORTHOGONALITY_THRESHOLD {
                return Err(Error::OrthogonalPair(j, k));
            }
        }
        Ok(VertexList { states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[P] {
        &self.states
    }

    /// The same vertices starting from index `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut states = self.states.clone();
        states.rotate_left(k % self.len());
        VertexList { states }
    }
}

/// `Δ_n = (ψ₁,ψ₂)(ψ₂,ψ₃)⋯(ψ_n,ψ₁)`.
pub fn bargmann_invariant<P: PureState>(v: &VertexList<P>) -> Result<Complex64> {
    let n = v.len();
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..n {
        acc *= v.states[j].overlap(&v.states[(j + 1) % n])?;
    }
    Ok(acc)
}

/// `Tr(ρ₁ρ₂⋯ρ_n)`, the projector form of the invariant.
pub fn bargmann_trace_form(v: &VertexList<StateVector>) -> Result<Complex64> {
    trace_product(&v.states.iter().map(project_to_ray).collect::<Vec<_>>())
}

/// `B_n = arg Δ_n` on (−π, π].
pub fn bargmann_phase<P: PureState>(v: &VertexList<P>) -> Result<f64> {
    let d = bargmann_invariant(v)?;
    if d.norm() <= PHASE_THRESHOLD {
        return Err(Error::UndefinedPhase { modulus: d.norm(), context: "bargmann_phase".into() });
    }
    Ok(wrap_phase(d.arg()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub anchor: usize,
    /// `Δ₃(ψ_a, ψ_{j−1}, ψ_j)` for `j = 3…n` counted from the anchor.
    pub triangles: Vec<Complex64>,
    /// `Δ₂(ψ_a, ψ_{j−1})` for `j = 4…n` counted from the anchor.
    pub pairs: Vec<Complex64>,
    pub reconstructed: Complex64,
}

/// Writes `Δ_n` as a product of triangle invariants over pair invariants,
/// fanning out from vertex `anchor`.
pub fn decompose_into_triangles<P: PureState>(v: &VertexList<P>, anchor: usize) -> Result<Decomposition> {
    let n = v.len();
    if n < 3 {
        return Err(Error::TooFewNodes { needed: 3, got: n });
    }
    if anchor >= n {
        return Err(Error::InvalidInput(format!("anchor {anchor} out of range for {n} vertices")));
    }
    let at = |k: usize| &v.states[(anchor + k) % n];
    let ov = |a: &P, b: &P| a.overlap(b);
    let mut triangles = Vec::with_capacity(n - 2);
    let mut pairs = Vec::with_capacity(n - 3);
    let mut reconstructed = Complex64::new(1.0, 0.0);
    for j in 2..n {
        let (a, b, c) = (at(0), at(j - 1), at(j));
        let t = ov(a, b)? * ov(b, c)? * ov(c, a)?;
        triangles.push(t);
        reconstructed *= t;
        if j >= 3 {
            let z = ov(a, b)?;
            if z.norm() <= ORTHOGONALITY_THRESHOLD {
                return Err(Error::VanishingDenominator(anchor, (anchor + j - 1) % n));
            }
            let d = z.norm_sqr();
            pairs.push(Complex64::new(d, 0.0));
            reconstructed /= d;
        }
    }
    Ok(Decomposition { anchor, triangles, pairs, reconstructed })
}

/// Builds a null-phase curve between two states.
pub trait Connector<P: PureState>: Sync {
    fn name(&self) -> &'static str;

    fn connect(&self, a: &P, b: &P, nodes: usize) -> Result<SampledCurve<P>>;
}

/// Free geodesics in the full ray space of explicit vectors.
#[derive(Debug, Clone, Copy, Default)]
pub struct FreeGeodesicConnector;

impl Connector<StateVector> for FreeGeodesicConnector {
    fn name(&self) -> &'static str {
        "free-geodesic"
    }

    fn connect(&self, a: &StateVector, b: &StateVector, nodes: usize) -> Result<SampledCurve<StateVector>> {
        free_geodesic(a, b, nodes)
    }
}

/// The chart's catalogued null-phase curve, with analytic tangents.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChartNullPhaseConnector;

impl<C: Chart> Connector<ChartPoint<C>> for ChartNullPhaseConnector {
    fn name(&self) -> &'static str {
        "chart-null-phase"
    }

    fn connect(&self, a: &ChartPoint<C>, b: &ChartPoint<C>, nodes: usize) -> Result<SampledCurve<ChartPoint<C>>> {
        let chart: &Arc<C> = a.chart();
        let path = null_phase_family(chart.id(), a.xi(), b.xi())?;
        if let PathSpec::SphereCircle { .. } | PathSpec::Semicircle { .. } = path {
            path.validate()?;
        }
        let curve = chart_curve(chart, &path, &uniform_grid(0.0, 1.0, nodes))?;
        // In-chart paths are only null phase while every overlap stays positive.
        let start = curve.start();
        for p in curve.states() {
            let z = start.overlap(p)?;
            if z.re <= 0.0 && chart.id() == crate::charts::ChartId::Realsphere {
                return Err(Error::Unsupported(format!(
                    "real path leaves the positive-overlap region (overlap {})",
                    z.re
                )));
            }
        }
        Ok(curve.rephase_smooth(|_| a.phase(), |_| 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygonCheck {
    pub phi_g: f64,
    pub minus_arg_delta: f64,
    /// `φ_g + arg Δ_n`, wrapped.
    pub defect: f64,
    pub nodes_per_side: usize,
}

/// Closes the polygon with null-phase sides and compares its geometric phase
/// with `−arg Δ_n`.
pub fn polygon_phase_check<P, C>(v: &VertexList<P>, connector: &C, nodes_per_side: usize) -> Result<PolygonCheck>
where
    P: PureState,
    C: Connector<P> + ?Sized,
{
    let n = v.len();
    let sides: Vec<SampledCurve<P>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let k = (j + 1) % n;
            connector
                .connect(&v.states[j], &v.states[k], nodes_per_side)
                .map_err(|e| Error::ConnectorUnavailable(j, k, e.to_string()))
        })
        .collect::<Result<_>>()?;
    let loop_ = SampledCurve::concat(&sides)?;
    let phi_g = loop_.geometric_phase()?;
    let minus_arg_delta = wrap_phase(-bargmann_phase(v)?);
    Ok(PolygonCheck { phi_g, minus_arg_delta, defect: wrap_phase(phi_g - minus_arg_delta), nodes_per_side })
}

/// Doubles the side resolution from [`DEFAULT_SIDE_NODES`] until the defect
/// changes by less than `1e-12` or the total node cap is reached.
pub fn polygon_phase_check_refined<P, C>(v: &VertexList<P>, connector: &C) -> Result<PolygonCheck>
where
    P: PureState,
    C: Connector<P> + ?Sized,
{
    let mut nodes = DEFAULT_SIDE_NODES;
    let mut last = polygon_phase_check(v, connector, nodes)?;
    while 2 * nodes * v.len() <= MAX_TOTAL_NODES {
        nodes *= 2;
        let next = polygon_phase_check(v, connector, nodes)?;
        let settled = (next.defect - last.defect).abs() < 1e-12;
        last = next;
        if settled {
            break;
        }
    }
    Ok(last)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainCheck {
    pub phi_chain: f64,
    pub sum_pieces: f64,
    pub bargmann_phase: f64,
    /// `φ_g[chain] − Σ φ_g[pieces] + B_n`, wrapped.
    pub defect: f64,
}

/// Additivity defect of a chain of curves joined end to start. For an open
/// chain the junction states are the piece starts plus the final end; for a
/// closed chain (last end on the first start ray) they are the piece starts.
pub fn chain_additivity<P: PureState>(pieces: &[SampledCurve<P>]) -> Result<ChainCheck> {
    let chain = SampledCurve::concat(pieces)?;
    let closed = pieces.len() > 1 && chain.is_closed()?;
    let mut junctions: Vec<P> = pieces.iter().map(|p| p.start().clone()).collect();
    if !closed {
        junctions.push(chain.end().clone());
    }
    let phi_chain = chain.geometric_phase()?;
    let sum_pieces = pieces.iter().map(|p| p.geometric_phase()).sum::<Result<f64>>()?;
    let b = bargmann_phase(&VertexList::new(junctions)?)?;
    Ok(ChainCheck { phi_chain, sum_pieces, bargmann_phase: b, defect: wrap_phase(phi_chain - sum_pieces + b) })
}

/// `arg` of a single Bargmann product, with the usual threshold.
pub fn triangle_phase<P: PureState>(a: &P, b: &P, c: &P) -> Result<f64> {
    phase_of(a.overlap(b)? * b.overlap(c)? * c.overlap(a)?, "triangle_phase")
}
