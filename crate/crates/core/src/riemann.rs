//! Induced metrics, Christoffel symbols and geodesics on charts.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::bargmann::Connector;
use crate::charts::{Chart, ChartPoint, TangentSource};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::state::PureState;

/// Symmetry tolerance for metric samples.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A metric whose smallest eigenvalue is below this fraction of the largest is singular.
pub const RELATIVE_RANK_TOLERANCE: f64 = 1e-14;

/// Default RK4 steps for shooting.
pub const DEFAULT_STEPS: usize = 1000;

/// Iteration cap for two-point shooting.
pub const MAX_SHOOTING_ITERATIONS: usize = 64;

/// Terminal miss accepted by [`geodesic_connect`].
pub const TERMINAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub xi: Vec<f64>,
    pub g: DMatrix<f64>,
}

impl MetricSample {
    /// Validates symmetry and positive definiteness.
    pub fn new(xi: Vec<f64>, g: DMatrix<f64>) -> Result<Self> {
        let asym = (&g - g.transpose()).abs().max();
        if asym > SYMMETRY_TOLERANCE {
            return Err(Error::InvalidInput(format!("metric asymmetric by {asym:e}")));
        }
        let sym = (&g + g.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym.clone()).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        if lo.is_nan() || lo <= 0.0 || lo <= RELATIVE_RANK_TOLERANCE * hi {
            return Err(Error::SingularMetric(lo));
        }
        Ok(MetricSample { xi, g: sym })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.g.clone()).eigenvalues.min()
    }

    /// `vᵀ g v`.
    pub fn norm_sq(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(&self.g * &v))
    }
}

/// `g_μν = Re(u⊥_μ, u⊥_ν)` from the chart's closed-form tangents.
pub fn induced_metric<C: Chart>(chart: &C, xi: &[f64]) -> Result<MetricSample> {
    induced_metric_with(chart, xi, TangentSource::Analytic)
}

pub fn induced_metric_with<C: Chart>(chart: &C, xi: &[f64], source: TangentSource) -> Result<MetricSample> {
    MetricSample::new(xi.to_vec(), chart.frame_with(xi, source)?.metric())
}

/// `Γ^μ_{νλ}`, stored densely with the upper index first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, mu: usize, nu: usize, lam: usize) -> f64 {
        self.data[(mu * self.n + nu) * self.n + lam]
    }

    /// `Γ^μ_{νλ} v^ν v^λ`.
    pub fn contract(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|mu| {
                let mut acc = 0.0;
                for nu in 0..self.n {
                    for lam in 0..self.n {
                        acc += self.get(mu, nu, lam) * v[nu] * v[lam];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Step for the fourth-order central difference, `ε^{1/5}·max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    f64::EPSILON.powf(0.2) * x.abs().max(1.0)
}

/// Christoffel symbols from fourth-order central differences of the analytic metric.
/// Pass `h = None` for the default per-coordinate step.
pub fn christoffel<C: Chart>(chart: &C, xi: &[f64], h: Option<f64>) -> Result<Christoffel> {
    let g = induced_metric(chart, xi)?;
    let n = g.dim();
    let ginv = g.g.clone().try_inverse().ok_or(Error::SingularMetric(0.0))?;
    // dg[σ] = ∂_σ g.
    let mut dg = Vec::with_capacity(n);
    for sigma in 0..n {
        let step = h.unwrap_or_else(|| default_step(xi[sigma]));
        let at = |k: f64| -> Result<DMatrix<f64>> {
            let mut p = xi.to_vec();
            p[sigma] += k * step;
            Ok(induced_metric(chart, &p)?.g)
        };
        dg.push((at(-2.0)? - at(-1.0)? * 8.0 + at(1.0)? * 8.0 - at(2.0)?) / (12.0 * step));
    }
    let mut data = vec![0.0; n * n * n];
    for mu in 0..n {
        for nu in 0..n {
            for lam in nu..n {
                let mut acc = 0.0;
                for sigma in 0..n {
                    acc += ginv[(mu, sigma)] * (dg[nu][(sigma, lam)] + dg[lam][(sigma, nu)] - dg[sigma][(nu, lam)]);
                }
                data[(mu * n + nu) * n + lam] = 0.5 * acc;
                data[(mu * n + lam) * n + nu] = 0.5 * acc;
            }
        }
    }
    Ok(Christoffel { n, data })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicSolution {
    pub s: Vec<f64>,
    pub xi: Vec<Vec<f64>>,
    pub xi_dot: Vec<Vec<f64>>,
    /// `g_μν ξ̇^μ ξ̇^ν` at every node.
    pub conserved_speed: Vec<f64>,
    /// Set when the trajectory left the chart domain and was truncated.
    pub exited: bool,
}

impl GeodesicSolution {
    /// Wraps arbitrary samples (for diagnostics on curves that are not solutions).
    pub fn from_samples<C: Chart>(chart: &C, s: Vec<f64>, xi: Vec<Vec<f64>>, xi_dot: Vec<Vec<f64>>) -> Result<Self> {
        let conserved_speed = xi
            .iter()
            .zip(&xi_dot)
            .map(|(x, v)| Ok(induced_metric(chart, x)?.norm_sq(v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeodesicSolution { s, xi, xi_dot, conserved_speed, exited: false })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Max relative deviation of the conserved speed from its initial value.
    pub fn speed_drift(&self) -> f64 {
        let e0 = self.conserved_speed[0];
        let dev = self.conserved_speed.iter().fold(0.0, |m: f64, e| m.max((e - e0).abs()));
        if e0 > 0.0 {
            dev / e0
        } else {
            dev
        }
    }

    /// Riemannian length `∫ sqrt(g ξ̇ ξ̇) ds` by Simpson's rule.
    pub fn length(&self) -> f64 {
        let f: Vec<f64> = self.conserved_speed.iter().map(|e| e.max(0.0).sqrt()).collect();
        crate::curve::integrate(&self.s, &f, crate::curve::QuadratureRule::Simpson)
    }

    pub fn end(&self) -> &[f64] {
        &self.xi[self.len() - 1]
    }

    /// The state curve traced by the solution, with analytic tangents.
    pub fn to_chart_curve<C: Chart>(&self, chart: &std::sync::Arc<C>) -> Result<SampledCurve<ChartPoint<C>>> {
        let mut states = Vec::with_capacity(self.len());
        let mut tangents = Vec::with_capacity(self.len());
        for (x, v) in self.xi.iter().zip(&self.xi_dot) {
            tangents.push(chart.tangent_frame(x)?.curve_tangent(v));
            states.push(ChartPoint::new(chart.clone(), x.clone())?);
        }
        SampledCurve::with_tangents(self.s.clone(), states, tangents)
    }

    /// CSV with columns `s, xi_1.., xi_dot_1.., conserved_speed`.
    pub fn to_csv(&self) -> String {
        let n = self.xi.first().map(|x| x.len()).unwrap_or(0);
        let mut head = vec!["s".to_string()];
        head.extend((1..=n).map(|k| format!("xi_{k}")));
        head.extend((1..=n).map(|k| format!("xi_dot_{k}")));
        head.push("conserved_speed".into());
        let mut out = head.join(",") + "\n";
        for k in 0..self.len() {
            let mut row = vec![format!("{:.17e}", self.s[k])];
            row.extend(self.xi[k].iter().map(|x| format!("{x:.17e}")));
            row.extend(self.xi_dot[k].iter().map(|x| format!("{x:.17e}")));
            row.push(format!("{:.17e}", self.conserved_speed[k]));
            out += &(row.join(",") + "\n");
        }
        out
    }
}

fn geodesic_rhs<C: Chart>(chart: &C, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if !chart.in_domain(x) {
        return Err(Error::DomainViolation(format!("{x:?}")));
    }
    let acc = christoffel(chart, x, None)?.contract(v).into_iter().map(|a| -a).collect();
    Ok((v.to_vec(), acc))
}

fn axpy(a: &[f64], k: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

/// Fixed-step RK4 integration of `ξ̈^μ + Γ^μ_{νλ} ξ̇^ν ξ̇^λ = 0` on `[0, s_max]`.
pub fn geodesic_shoot<C: Chart>(
    chart: &C,
    xi0: &[f64],
    v0: &[f64],
    s_max: f64,
    steps: usize,
) -> Result<GeodesicSolution> {
    if steps < 16 {
        return Err(Error::TooFewNodes { needed: 16, got: steps });
    }
    chart.check_domain(xi0)?;
    if v0.len() != xi0.len() {
        return Err(Error::DimensionMismatch(xi0.len(), v0.len()));
    }
    let h = s_max / steps as f64;
    let mut sol = GeodesicSolution {
        s: vec![0.0],
        xi: vec![xi0.to_vec()],
        xi_dot: vec![v0.to_vec()],
        conserved_speed: vec![induced_metric(chart, xi0)?.norm_sq(v0)],
        exited: false,
    };
    let (mut x, mut v) = (xi0.to_vec(), v0.to_vec());
    for k in 1..=steps {
        let step = || -> Result<(Vec<f64>, Vec<f64>, f64)> {
            let (k1x, k1v) = geodesic_rhs(chart, &x, &v)?;
            let (k2x, k2v) = geodesic_rhs(chart, &axpy(&x, h / 2.0, &k1x), &axpy(&v, h / 2.0, &k1v))?;
            let (k3x, k3v) = geodesic_rhs(chart, &axpy(&x, h / 2.0, &k2x), &axpy(&v, h / 2.0, &k2v))?;
            let (k4x, k4v) = geodesic_rhs(chart, &axpy(&x, h, &k3x), &axpy(&v, h, &k3v))?;
            let nx: Vec<f64> =
                (0..x.len()).map(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i])).collect();
            let nv: Vec<f64> =
                (0..v.len()).map(|i| v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])).collect();
            let e = induced_metric(chart, &nx)?.norm_sq(&nv);
            Ok((nx, nv, e))
        };
        match step() {
            Ok((nx, nv, e)) => {
                x = nx;
                v = nv;
                sol.s.push(if k == steps { s_max } else { h * k as f64 });
                sol.xi.push(x.clone());
                sol.xi_dot.push(v.clone());
                sol.conserved_speed.push(e);
            }
            Err(Error::DomainViolation(_)) | Err(Error::SingularMetric(_)) => {
                sol.exited = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Connection {
    pub solution: GeodesicSolution,
    pub initial_velocity: Vec<f64>,
    pub miss: f64,
    pub iterations: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Two-point geodesic on `s ∈ [0, 1]` by shooting on `ξ̇(0)`: a finite-difference
/// Jacobian followed by Broyden updates, halving the step when the miss grows.
pub fn geodesic_connect<C: Chart>(chart: &C, a: &[f64], b: &[f64], steps: usize) -> Result<Connection> {
    chart.check_domain(a)?;
    chart.check_domain(b)?;
    let n = a.len();
    let residual = |v: &[f64]| -> Result<(GeodesicSolution, Vec<f64>)> {
        let sol = geodesic_shoot(chart, a, v, 1.0, steps)?;
        if sol.exited {
            return Ok((sol, vec![f64::INFINITY; n]));
        }
        let r = sol.end().iter().zip(b).map(|(x, y)| x - y).collect();
        Ok((sol, r))
    };
    let mut v: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let (mut sol, mut r) = residual(&v)?;
    if norm(&v) == 0.0 {
        return Ok(Connection { solution: sol, initial_velocity: v, miss: 0.0, iterations: 0 });
    }
    let jacobian = |v: &[f64], r: &[f64]| -> Result<DMatrix<f64>> {
        let mut j = DMatrix::zeros(n, n);
        for col in 0..n {
            let dh = 1e-7 * v[col].abs().max(1e-3 * norm(v)).max(1e-7);
            let mut vp = v.to_vec();
            vp[col] += dh;
            let (_, rp) = residual(&vp)?;
            for row in 0..n {
                j[(row, col)] = (rp[row] - r[row]) / dh;
            }
        }
        Ok(j)
    };
    if !r.iter().all(|x| x.is_finite()) {
        return Err(Error::NoConvergence { iterations: 0, residual: f64::INFINITY });
    }
    let mut jac = jacobian(&v, &r)?;
    for it in 1..=MAX_SHOOTING_ITERATIONS {
        let miss = norm(&r);
        if miss < 1e-11 {
            return Ok(Connection { solution: sol, initial_velocity: v, miss, iterations: it - 1 });
        }
        let rv = DVector::from_column_slice(&r);
        let Some(dv) = jac.clone().lu().solve(&rv) else {
            jac = jacobian(&v, &r)?;
            continue;
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let trial: Vec<f64> = v.iter().zip(dv.iter()).map(|(x, d)| x - lambda * d).collect();
            let (ts, tr) = residual(&trial)?;
            if tr.iter().all(|x| x.is_finite()) && norm(&tr) < miss {
                accepted = Some((trial, ts, tr));
                break;
            }
            lambda *= 0.5;
        }
        let Some((nv, ns, nr)) = accepted else {
            break;
        };
        let dvec: Vec<f64> = nv.iter().zip(&v).map(|(x, y)| x - y).collect();
        let dr: Vec<f64> = nr.iter().zip(&r).map(|(x, y)| x - y).collect();
        let (dvv, drv) = (DVector::from_column_slice(&dvec), DVector::from_column_slice(&dr));
        let denom = dvv.dot(&dvv);
        if lambda < 1.0 {
            // A damped step means the linear model is poor; rebuild it.
            jac = jacobian(&nv, &nr)?;
        } else if denom > 0.0 {
            jac += (&drv - &jac * &dvv) * dvv.transpose() / denom;
        }
        v = nv;
        sol = ns;
        r = nr;
    }
    let miss = norm(&r);
    if miss < TERMINAL_TOLERANCE {
        return Ok(Connection { solution: sol, initial_velocity: v, miss, iterations: MAX_SHOOTING_ITERATIONS });
    }
    Err(Error::NoConvergence { iterations: MAX_SHOOTING_ITERATIONS, residual: miss })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseSpeed {
    pub values: Vec<f64>,
    /// `(max − min)/mean` of the values.
    pub relative_variation: f64,
    pub affine: bool,
}

/// `‖ξ̇^μ u⊥_μ‖` per node; flags curves whose speed is not constant to `tol`.
pub fn transverse_speed<C: Chart>(chart: &C, sol: &GeodesicSolution, tol: f64) -> Result<TransverseSpeed> {
    let values: Vec<f64> = sol
        .xi
        .iter()
        .zip(&sol.xi_dot)
        .map(|(x, v)| Ok(chart.tangent_frame(x)?.metric_norm_sq(v).max(0.0).sqrt()))
        .collect::<Result<_>>()?;
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0f64), |(l, h), x| (l.min(*x), h.max(*x)));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let relative_variation = if mean > 0.0 { (hi - lo) / mean } else { hi - lo };
    Ok(TransverseSpeed { values, relative_variation, affine: relative_variation < tol })
}

/// Max over interior nodes of `|ξ̈ + Γ(ξ̇, ξ̇)|`, with `ξ̈` from 5-point differences of `ξ̇`.
pub fn acceleration_residual<C: Chart>(chart: &C, sol: &GeodesicSolution) -> Result<f64> {
    let m = sol.len();
    if m < 5 {
        return Err(Error::TooFewNodes { needed: 5, got: m });
    }
    let h = sol.s[1] - sol.s[0];
    let mut worst: f64 = 0.0;
    for k in 2..m - 2 {
        let g = christoffel(chart, &sol.xi[k], None)?.contract(&sol.xi_dot[k]);
        for (mu, gm) in g.iter().enumerate() {
            let d = |j: usize| sol.xi_dot[j][mu];
            let acc = (d(k - 2) - 8.0 * d(k - 1) + 8.0 * d(k + 1) - d(k + 2)) / (12.0 * h);
            worst = worst.max((acc + gm).abs());
        }
    }
    Ok(worst)
}

/// Relative conserved-speed drift at several resolutions and the observed orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftStudy {
    pub steps: Vec<usize>,
    pub drifts: Vec<f64>,
    pub orders: Vec<f64>,
}

impl DriftStudy {
    /// True when every drift is at round-off level, so no order can be measured.
    pub fn trivially_conserved(&self) -> bool {
        self.drifts.iter().all(|d| *d < 1e-14)
    }
}

pub fn drift_study<C: Chart>(chart: &C, xi0: &[f64], v0: &[f64], s_max: f64, steps: &[usize]) -> Result<DriftStudy> {
    let drifts = steps
        .iter()
        .map(|&n| {
            let sol = geodesic_shoot(chart, xi0, v0, s_max, n)?;
            if sol.exited {
                return Err(Error::DomainViolation("trajectory left the chart".into()));
            }
            Ok(sol.speed_drift())
        })
        .collect::<Result<Vec<_>>>()?;
    let orders = steps
        .windows(2)
        .zip(drifts.windows(2))
        .map(|(n, d)| (d[0] / d[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect();
    Ok(DriftStudy { steps: steps.to_vec(), drifts, orders })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleFit {
    pub center: f64,
    pub radius: f64,
    /// Max `|dist(ξ, (c, 0)) − R|`.
    pub residual: f64,
}

/// Least-squares fit of `ξ₁² + ξ₂² = 2cξ₁ + k` (semicircle centered on the ξ₁ axis).
pub fn fit_type_ii(points: &[Vec<f64>]) -> CircleFit {
    let (mut sxx, mut sx, mut n, mut sxy, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (x, y) = (p[0], p[0] * p[0] + p[1] * p[1]);
        sxx += x * x;
        sx += x;
        n += 1.0;
        sxy += x * y;
        sy += y;
    }
    // Normal equations for y = 2c·x + k.
    let det = sxx * n - sx * sx;
    let slope = (sxy * n - sx * sy) / det;
    let k = (sxx * sy - sx * sxy) / det;
    let center = slope / 2.0;
    let radius = (k + center * center).sqrt();
    let residual = points.iter().map(|p| ((p[0] - center).hypot(p[1]) - radius).abs()).fold(0.0, f64::max);
    CircleFit { center, radius, residual }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub xi1: f64,
    pub a: f64,
    pub b: f64,
    /// Max of `|ξ₁ − mean ξ₁|` and `|ln ξ₂ − ln a − b s|`.
    pub residual: f64,
}

/// Fit of `ξ₁ = const`, `ξ₂ = a e^{bs}`.
pub fn fit_type_i(s: &[f64], points: &[Vec<f64>]) -> LineFit {
    let n = s.len() as f64;
    let xi1 = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let ly: Vec<f64> = points.iter().map(|p| p[1].ln()).collect();
    let (ms, ml) = (s.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = s.iter().zip(&ly).map(|(x, y)| (x - ms) * (y - ml)).sum();
    let var: f64 = s.iter().map(|x| (x - ms) * (x - ms)).sum();
    let b = cov / var;
    let la = ml - b * ms;
    let mut residual: f64 = 0.0;
    for (k, p) in points.iter().enumerate() {
        residual = residual.max((p[0] - xi1).abs()).max((ly[k] - la - b * s[k]).abs());
    }
    LineFit { xi1, a: la.exp(), b, residual }
}

/// Constrained geodesics as polygon sides.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstrainedGeodesicConnector;

impl<C: Chart> Connector<ChartPoint<C>> for ConstrainedGeodesicConnector {
    fn name(&self) -> &'static str {
        "constrained-geodesic"
    }

    /// `nodes − 1` RK4 steps are used, so the side is sampled at the integrator nodes.
    fn connect(&self, a: &ChartPoint<C>, b: &ChartPoint<C>, nodes: usize) -> Result<SampledCurve<ChartPoint<C>>> {
        let steps = nodes.max(17) - 1;
        let con = geodesic_connect(a.chart().as_ref(), a.xi(), b.xi(), steps)?;
        let curve = con.solution.to_chart_curve(a.chart())?;
        Ok(curve.rephase_smooth(|_| a.phase(), |_| 0.0))
    }
}

impl crate::charts::TangentFrame {
    /// `ξ̇ᵀ g ξ̇` with the induced metric.
    pub fn metric_norm_sq(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(self.metric() * &v))
    }
}

/// Length of the state curve traced by a solution.
pub fn state_curve_length<C: Chart>(chart: &std::sync::Arc<C>, sol: &GeodesicSolution) -> Result<f64> {
    sol.to_chart_curve(chart)?.curve_length()
}

/// Overlap phase along a solution relative to its first node.
pub fn overlap_phases<C: Chart>(chart: &std::sync::Arc<C>, sol: &GeodesicSolution) -> Result<Vec<f64>> {
    let c = sol.to_chart_curve(chart)?;
    let first = c.start().clone();
    c.states().iter().map(|p| Ok(first.overlap(p)?.arg())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{CoherentChart, GaussianChart, TwoModeSphereChart};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
    use std::sync::Arc;

    #[test]
    fn metric_examples() {
        let g = induced_metric(&CoherentChart::default(), &[0.3, 0.1]).unwrap();
        assert!((g.g.clone() - DMatrix::identity(2, 2) * 0.5).abs().max() < 1e-15);
        let g = induced_metric(&GaussianChart::default(), &[0.0, 2.0]).unwrap();
        assert!((g.g.clone() - DMatrix::identity(2, 2) / 32.0).abs().max() < 1e-15);
        let g = induced_metric(&TwoModeSphereChart::default(), &[FRAC_PI_3, 0.0]).unwrap();
        assert!((g.g[(1, 1)] - 0.75).abs() < 1e-15);
        assert!(matches!(induced_metric(&TwoModeSphereChart::default(), &[0.0, 0.3]), Err(Error::SingularMetric(_))));
    }

    #[test]
    fn christoffel_examples() {
        assert!(christoffel(&CoherentChart::default(), &[0.4, -1.0], None).unwrap().max_abs() < 1e-6);
        let gam = christoffel(&GaussianChart::default(), &[0.3, 1.0], None).unwrap();
        assert!((gam.get(0, 0, 1) + 1.0).abs() < 1e-6);
        assert!((gam.get(1, 1, 1) + 1.0).abs() < 1e-6);
        assert!((gam.get(1, 0, 0) - 1.0).abs() < 1e-6);
        assert_eq!(gam.get(0, 0, 1), gam.get(0, 1, 0));
        let gam = christoffel(&TwoModeSphereChart::default(), &[FRAC_PI_4, 0.2], None).unwrap();
        assert!((gam.get(0, 1, 1) + 0.5).abs() < 1e-6);
        assert!((gam.get(1, 0, 1) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn shooting_examples() {
        let sol = geodesic_shoot(&CoherentChart::default(), &[0.0, 0.0], &[1.0, 1.0], 2.0, 100).unwrap();
        for (s, x) in sol.s.iter().zip(&sol.xi) {
            assert!((x[0] - s).abs() < 1e-12 && (x[1] - s).abs() < 1e-12);
        }
        let g = GaussianChart::default();
        let sol = geodesic_shoot(&g, &[0.0, 1.0], &[0.0, 0.7], 1.0, 1000).unwrap();
        let fit = fit_type_i(&sol.s, &sol.xi);
        assert!(fit.residual < 1e-6 && (fit.b - 0.7).abs() < 1e-6 && (fit.a - 1.0).abs() < 1e-6);
        let sol = geodesic_shoot(&g, &[0.0, 1.0], &[1.0, 0.0], 2.0, 1000).unwrap();
        let fit = fit_type_ii(&sol.xi);
        assert!(fit.residual < 1e-6 && fit.center.abs() < 1e-6 && (fit.radius - 1.0).abs() < 1e-6, "{fit:?}");
        assert!(sol.speed_drift() < 1e-8);
        assert!(geodesic_shoot(&g, &[0.0, 1.0], &[0.0, 1.0], 1.0, 8).is_err());
    }

    #[test]
    fn domain_exit_truncates() {
        let sol = geodesic_shoot(&GaussianChart::default(), &[0.0, 1.0], &[0.0, -1.0], 40.0, 16).unwrap();
        assert!(sol.exited && sol.len() < 17);
    }

    #[test]
    fn connect_examples() {
        let g = GaussianChart::default();
        let con = geodesic_connect(&g, &[-1.0, 1.0], &[1.0, 1.0], 1000).unwrap();
        assert!(con.miss < 1e-8);
        let fit = fit_type_ii(&con.solution.xi);
        assert!(fit.center.abs() < 1e-6 && (fit.radius - 2f64.sqrt()).abs() < 1e-6);
        let sph = Arc::new(TwoModeSphereChart::default());
        let con = geodesic_connect(sph.as_ref(), &[FRAC_PI_2, 0.0], &[FRAC_PI_2, FRAC_PI_3], 1000).unwrap();
        assert!((con.solution.length() - FRAC_PI_3).abs() < 1e-9);
        assert!((state_curve_length(&sph, &con.solution).unwrap() - FRAC_PI_3).abs() < 1e-6);
        let coh = CoherentChart::default();
        let con = geodesic_connect(&coh, &[0.0, 0.0], &[3.0, 4.0], 200).unwrap();
        assert!((con.solution.length() - 5.0 / 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn transverse_speed_examples() {
        let sph = TwoModeSphereChart::default();
        let sol = geodesic_shoot(&sph, &[FRAC_PI_2, 0.0], &[0.0, 1.0], PI, 200).unwrap();
        let t = transverse_speed(&sph, &sol, 1e-8).unwrap();
        assert!(t.affine && t.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let g = GaussianChart::default();
        let sol = geodesic_shoot(&g, &[0.0, 1.0], &[0.0, 1.0], 1.0, 200).unwrap();
        let t = transverse_speed(&g, &sol, 1e-8).unwrap();
        assert!(t.values.iter().all(|v| (v - 0.125f64.sqrt()).abs() < 1e-9));
        // The Type II semicircle in its angle parameter is not affine.
        let s: Vec<f64> = crate::curve::uniform_grid(0.3, 2.5, 50);
        let xi = s.iter().map(|t| vec![t.cos(), t.sin()]).collect();
        let xd = s.iter().map(|t| vec![-t.sin(), t.cos()]).collect();
        let fake = GeodesicSolution::from_samples(&g, s, xi, xd).unwrap();
        assert!(!transverse_speed(&g, &fake, 1e-8).unwrap().affine);
    }

    #[test]
    fn residual_and_drift_orders() {
        let g = GaussianChart::default();
        let r1 = acceleration_residual(&g, &geodesic_shoot(&g, &[0.0, 1.0], &[1.0, 0.3], 2.0, 100).unwrap()).unwrap();
        let r2 = acceleration_residual(&g, &geodesic_shoot(&g, &[0.0, 1.0], &[1.0, 0.3], 2.0, 200).unwrap()).unwrap();
        assert!(r2 < r1 / 8.0, "{r1} {r2}");
        let d = drift_study(&g, &[0.0, 1.0], &[1.0, 0.3], 2.0, &[25, 50, 100]).unwrap();
        assert!(d.orders.iter().all(|o| *o > 3.5), "{d:?}");
    }
}
