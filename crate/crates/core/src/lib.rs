//! Numerical geometry of quantum ray space.

pub mod acceptance;
pub mod bargmann;
pub mod charts;
pub mod curve;
pub mod error;
pub mod nullphase;
pub mod riemann;
pub mod sampling;
pub mod state;
pub mod symplectic;

pub use bargmann::VertexList;
pub use charts::{AnyChart, Chart, ChartId, ChartPoint};
pub use curve::{QuadratureRule, SampledCurve, TangentMode};
pub use error::{Error, Result};
pub use nullphase::{NullPhaseReport, Verdict};
pub use riemann::{GeodesicSolution, MetricSample};
pub use state::{PureState, Ray, StateVector, TangentSample};
pub use symplectic::{CoordCurve, DarbouxChart, DarbouxCoords};
