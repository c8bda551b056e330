//! Reading JSON arguments: inline documents, file paths or `-` for stdin.

use std::io::Read;
use std::sync::Arc;

use raylab_core::charts::{chart_curve, null_phase_family, PathSpec};
use raylab_core::curve::uniform_grid;
use raylab_core::symplectic::{DarbouxChart, DarbouxChartJson};
use raylab_core::{AnyChart, Chart, ChartId, ChartPoint, SampledCurve, StateVector, VertexList};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Ambient dimension used for the real-sphere chart when none is given.
pub const DEFAULT_REALSPHERE_DIM: usize = 4;

pub type ChartCurve = SampledCurve<ChartPoint<AnyChart>>;

/// Parses `arg` as inline JSON when it starts with `{` or `[`, reads stdin for `-`,
/// and otherwise treats it as a file path.
pub fn read_json(arg: &str) -> Result<Value, CliError> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ if arg == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
            s
        }
        _ => std::fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("{arg}: {e}")))?,
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn build_chart(id: ChartId, dim: Option<usize>) -> Result<Arc<AnyChart>, CliError> {
    AnyChart::build(id, dim.unwrap_or(DEFAULT_REALSPHERE_DIM)).map(Arc::new).map_err(usage)
}

/// A comma-separated coordinate list such as `0.5,1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords(pub Vec<f64>);

impl std::str::FromStr for Coords {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<_, _>>()
            .map(Coords)
    }
}

fn state_of(v: &Value) -> Result<StateVector, CliError> {
    StateVector::from_json(v).map(|(s, _)| s).map_err(usage)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartCurveJson {
    chart: ChartId,
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    path: Option<PathSpec>,
    #[serde(default)]
    from: Option<Vec<f64>>,
    #[serde(default)]
    to: Option<Vec<f64>>,
    #[serde(default)]
    nodes: Option<usize>,
}

/// A curve given either as explicit states or as a chart path.
pub enum CurveInput {
    Explicit(SampledCurve<StateVector>),
    Chart(ChartCurve),
}

impl CurveInput {
    pub fn parse(v: &Value, default_nodes: usize) -> Result<Self, CliError> {
        if v.get("chart").is_none() {
            return SampledCurve::from_json(v).map(CurveInput::Explicit).map_err(usage);
        }
        let spec: ChartCurveJson = serde_json::from_value(v.clone()).map_err(usage)?;
        let chart = build_chart(spec.chart, spec.dim)?;
        let path = match (spec.path, spec.from, spec.to) {
            (Some(p), None, None) => p,
            (None, Some(a), Some(b)) => null_phase_family(spec.chart, &a, &b).map_err(usage)?,
            _ => return Err(usage("a chart curve needs either `path` or both `from` and `to`")),
        };
        path.validate().map_err(usage)?;
        let grid = uniform_grid(0.0, 1.0, spec.nodes.unwrap_or(default_nodes));
        chart_curve(&chart, &path, &grid).map(CurveInput::Chart).map_err(usage)
    }

    /// The explicit realization, keeping analytic tangents.
    pub fn to_explicit(&self) -> Result<SampledCurve<StateVector>, CliError> {
        match self {
            CurveInput::Explicit(c) => Ok(c.clone()),
            CurveInput::Chart(c) => c.map_states(true, |p| p.to_vector()).map_err(CliError::Compute),
        }
    }
}

/// Vertices given as explicit states or as chart points.
pub enum VertexInput {
    Explicit(VertexList<StateVector>),
    Chart(VertexList<ChartPoint<AnyChart>>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartVerticesJson {
    chart: ChartId,
    #[serde(default)]
    dim: Option<usize>,
    points: Vec<Vec<f64>>,
}

impl VertexInput {
    /// Accepts `[<state>, …]`, `{"vertices": [<state>, …]}` or
    /// `{"chart": id, "points": [[ξ…], …]}`.
    pub fn parse(v: &Value) -> Result<Self, CliError> {
        if let Some(list) = v.as_array().or_else(|| v.get("vertices").and_then(Value::as_array)) {
            let states = list.iter().map(state_of).collect::<Result<Vec<_>, _>>()?;
            return VertexList::new(states).map(VertexInput::Explicit).map_err(usage);
        }
        let spec: ChartVerticesJson = serde_json::from_value(v.clone()).map_err(usage)?;
        let chart = build_chart(spec.chart, spec.dim)?;
        let points = spec
            .points
            .into_iter()
            .map(|xi| ChartPoint::new(chart.clone(), xi))
            .collect::<raylab_core::Result<Vec<_>>>()
            .map_err(usage)?;
        VertexList::new(points).map(VertexInput::Chart).map_err(usage)
    }
}

/// A single state or every state of a curve.
pub fn states_of(v: &Value) -> Result<Vec<StateVector>, CliError> {
    if v.get("params").is_some() || v.get("chart").is_some() {
        return Ok(CurveInput::parse(v, 101)?.to_explicit()?.states().to_vec());
    }
    if let Some(list) = v.as_array() {
        return list.iter().map(state_of).collect();
    }
    Ok(vec![state_of(v)?])
}

pub fn darboux_chart(v: &Value) -> Result<DarbouxChart, CliError> {
    let raw: DarbouxChartJson = serde_json::from_value(v.clone()).map_err(usage)?;
    DarbouxChart::from_json(&raw).map_err(usage)
}

/// A chart's dimension-appropriate sampling box, used for random points.
pub fn sample_box(chart: &AnyChart) -> Vec<(f64, f64)> {
    let n = chart.n_params();
    match chart.id() {
        ChartId::Coherent => vec![(-2.0, 2.0); n],
        ChartId::Gaussian => vec![(-2.0, 2.0), (0.2, 3.0)],
        ChartId::Sphere2mode => vec![(0.1, std::f64::consts::PI - 0.1), (-std::f64::consts::PI, std::f64::consts::PI)],
        ChartId::Realsphere => vec![(0.1, std::f64::consts::PI - 0.1); n],
    }
}
