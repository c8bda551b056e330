//! Sampled curves of states and the phase functionals defined on them.
//!
//! A [`SampledCurve`] is a strictly increasing parameter grid with one state
//! per node. Curves produced by [`SampledCurve::concat`] remember their
//! junctions: the curve is smooth on each piece but may have a corner at a
//! junction, so tangents and quadrature are evaluated piece by piece.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{
    phase_of, ray_distance, wrap_phase, PureState, StateJson, StateVector, TangentSample, ORTHOGONALITY_THRESHOLD,
};

/// Node count used when sampling analytic curves.
pub const DEFAULT_NODES: usize = 1001;

/// Largest ray distance `1 − |(ψ,ψ′)|²` accepted at a junction.
pub const JUNCTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentMode {
    Analytic,
    FiniteDifference,
}

/// Quadrature used for line integrals along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Simpson with analytic tangents, trapezoid otherwise.
    #[default]
    Auto,
    Trapezoid,
    /// Composite Simpson on interval pairs; a leftover interval uses the
    /// quadratic through the last three nodes.
    Simpson,
}

/// `s₀ … s_{n−1}` equally spaced on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, nodes: usize) -> Vec<f64> {
    let n = nodes.max(2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k == n - 1 { b } else { a + h * k as f64 }).collect()
}

#[derive(Debug, Clone)]
pub struct SampledCurve<P> {
    params: Vec<f64>,
    states: Vec<P>,
    /// Interior node indices where one smooth piece ends and the next begins.
    breaks: Vec<usize>,
    /// Per-node tangents; at a junction this is the value from the left piece.
    tangents: Option<Vec<TangentSample>>,
    /// Right-piece tangents at each junction, aligned with `breaks`.
    right_tangents: Vec<TangentSample>,
}

impl<P: PureState> SampledCurve<P> {
    /// A curve whose tangents will be estimated by finite differences.
    pub fn new(params: Vec<f64>, states: Vec<P>) -> Result<Self> {
        validate(&params, &states)?;
        Ok(SampledCurve { params, states, breaks: vec![], tangents: None, right_tangents: vec![] })
    }

    /// A curve with analytic tangent data at every node.
    pub fn with_tangents(params: Vec<f64>, states: Vec<P>, tangents: Vec<TangentSample>) -> Result<Self> {
        validate(&params, &states)?;
        if tangents.len() != states.len() {
            return Err(Error::InvalidInput(format!("{} tangent samples for {} nodes", tangents.len(), states.len())));
        }
        Ok(SampledCurve { params, states, breaks: vec![], tangents: Some(tangents), right_tangents: vec![] })
    }

    /// Samples `f(s) = (ψ(s), tangent data)` on a grid.
    pub fn sample<F>(grid: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(P, TangentSample)>,
    {
        let (states, tangents) = grid.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        Self::with_tangents(grid.to_vec(), states, tangents)
    }

    /// Samples `ψ(s)` only; tangents by finite differences.
    pub fn sample_states<F>(grid: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<P>,
    {
        let states = grid.iter().map(|&s| f(s)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn states(&self) -> &[P] {
        &self.states
    }

    pub fn start(&self) -> &P {
        &self.states[0]
    }

    pub fn end(&self) -> &P {
        &self.states[self.len() - 1]
    }

    pub fn tangent_mode(&self) -> TangentMode {
        if self.tangents.is_some() {
            TangentMode::Analytic
        } else {
            TangentMode::FiniteDifference
        }
    }

    /// Junction node indices.
    pub fn junctions(&self) -> &[usize] {
        &self.breaks
    }

    /// Whether the end projects onto the start ray within the junction tolerance.
    pub fn is_closed(&self) -> Result<bool> {
        Ok(ray_distance(self.start(), self.end())? < JUNCTION_TOLERANCE)
    }

    /// Drops analytic tangents so finite differences are used instead.
    pub fn without_tangents(mut self) -> Self {
        self.tangents = None;
        self.right_tangents.clear();
        self
    }

    /// Node ranges `[a, b]` of the smooth pieces.
    pub fn pieces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.breaks.len() + 1);
        let mut a = 0;
        for &b in &self.breaks {
            out.push((a, b));
            a = b;
        }
        out.push((a, self.len() - 1));
        out
    }

    /// Tangent data on nodes `a..=b` of one piece.
    fn piece_tangents(&self, a: usize, b: usize) -> Result<Vec<TangentSample>> {
        if let Some(t) = &self.tangents {
            let mut out = t[a..=b].to_vec();
            if let Some(j) = self.breaks.iter().position(|&k| k == a) {
                out[0] = self.right_tangents[j];
            }
            return Ok(out);
        }
        fd_tangents(&self.params[a..=b], &self.states[a..=b])
    }

    /// Tangent data at every node, the left-piece value at junctions.
    pub fn tangent_samples(&self) -> Result<Vec<TangentSample>> {
        let mut out: Vec<TangentSample> = Vec::with_capacity(self.len());
        for (a, b) in self.pieces() {
            let t = self.piece_tangents(a, b)?;
            let skip = if a == 0 { 0 } else { 1 };
            out.extend_from_slice(&t[skip..]);
        }
        Ok(out)
    }

    fn resolve(&self, rule: QuadratureRule) -> QuadratureRule {
        match (rule, self.tangent_mode()) {
            (QuadratureRule::Auto, TangentMode::Analytic) => QuadratureRule::Simpson,
            (QuadratureRule::Auto, TangentMode::FiniteDifference) => QuadratureRule::Trapezoid,
            (r, _) => r,
        }
    }

    /// Per-interval integrals of `f(tangent)`, computed piecewise.
    fn interval_integrals<F>(&self, rule: QuadratureRule, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&TangentSample) -> f64,
    {
        let rule = self.resolve(rule);
        let mut out = Vec::with_capacity(self.len() - 1);
        for (a, b) in self.pieces() {
            let values: Vec<f64> = self.piece_tangents(a, b)?.iter().map(&f).collect();
            out.extend(interval_quadrature(&self.params[a..=b], &values, rule));
        }
        Ok(out)
    }

    /// `arg(ψ(s₀), ψ(s_N))`.
    pub fn total_phase(&self) -> Result<f64> {
        phase_of(self.start().overlap(self.end())?, "total_phase")
    }

    /// `Im ∫ (ψ, ψ̇) ds`, accumulated without wrapping.
    pub fn dynamical_phase(&self) -> Result<f64> {
        self.dynamical_phase_with(QuadratureRule::Auto)
    }

    pub fn dynamical_phase_with(&self, rule: QuadratureRule) -> Result<f64> {
        Ok(self.interval_integrals(rule, |t| t.connection.im)?.iter().sum())
    }

    /// `φ_tot − φ_dyn` on (−π, π].
    pub fn geometric_phase(&self) -> Result<f64> {
        self.geometric_phase_with(QuadratureRule::Auto)
    }

    pub fn geometric_phase_with(&self, rule: QuadratureRule) -> Result<f64> {
        Ok(wrap_phase(self.total_phase()? - self.dynamical_phase_with(rule)?))
    }

    /// Fubini–Study length `∫ sqrt(‖ψ̇‖² − |(ψ,ψ̇)|²) ds`.
    pub fn curve_length(&self) -> Result<f64> {
        self.curve_length_with(QuadratureRule::Auto)
    }

    pub fn curve_length_with(&self, rule: QuadratureRule) -> Result<f64> {
        Ok(self.interval_integrals(rule, |t| t.transverse_sq().sqrt())?.iter().sum())
    }

    /// Discrete parallel transport: every consecutive pair is put in phase.
    pub fn horizontal_lift(&self) -> Result<Self> {
        let mut states = Vec::with_capacity(self.len());
        states.push(self.states[0].clone());
        for k in 1..self.len() {
            let prev: &P = &states[k - 1];
            let theta = phase_of(prev.overlap(&self.states[k])?, "horizontal_lift")?;
            states.push(self.states[k].rephased(-theta));
        }
        Ok(SampledCurve {
            params: self.params.clone(),
            states,
            breaks: self.breaks.clone(),
            tangents: None,
            right_tangents: vec![],
        })
    }

    /// Multiplies node `k` by `e^{iα_k}`; tangents fall back to finite differences.
    pub fn rephase_nodes(&self, alphas: &[f64]) -> Result<Self> {
        if alphas.len() != self.len() {
            return Err(Error::InvalidInput(format!("{} phases for {} nodes", alphas.len(), self.len())));
        }
        let states = self.states.iter().zip(alphas).map(|(p, &a)| p.rephased(a)).collect();
        Ok(SampledCurve {
            params: self.params.clone(),
            states,
            breaks: self.breaks.clone(),
            tangents: None,
            right_tangents: vec![],
        })
    }

    /// Multiplies by a smooth gauge `e^{iα(s)}`, keeping analytic tangents exact.
    pub fn rephase_smooth<A, D>(&self, alpha: A, alpha_dot: D) -> Self
    where
        A: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let states = self.params.iter().zip(&self.states).map(|(&s, p)| p.rephased(alpha(s))).collect();
        let tangents = self
            .tangents
            .as_ref()
            .map(|t| t.iter().zip(&self.params).map(|(t, &s)| t.with_gauge_rate(alpha_dot(s))).collect());
        let right_tangents = self
            .breaks
            .iter()
            .zip(&self.right_tangents)
            .map(|(&k, t)| t.with_gauge_rate(alpha_dot(self.params[k])))
            .collect();
        SampledCurve { params: self.params.clone(), states, breaks: self.breaks.clone(), tangents, right_tangents }
    }

    /// The same ray curve traversed backwards on `[s₀, s_N]`.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        let (s0, sn) = (self.params[0], self.params[n - 1]);
        let params = self.params.iter().rev().map(|&s| s0 + sn - s).collect();
        let states = self.states.iter().rev().cloned().collect();
        let flip = |t: &TangentSample| TangentSample { connection: -t.connection, speed_sq: t.speed_sq };
        let breaks: Vec<usize> = self.breaks.iter().rev().map(|&k| n - 1 - k).collect();
        let (tangents, right_tangents) = match &self.tangents {
            None => (None, vec![]),
            Some(t) => {
                // Left and right swap roles at each junction.
                let mut out: Vec<TangentSample> = t.iter().rev().map(flip).collect();
                let mut right = Vec::with_capacity(self.breaks.len());
                for (j, &k) in self.breaks.iter().enumerate().rev() {
                    out[n - 1 - k] = flip(&self.right_tangents[j]);
                    right.push(flip(&t[k]));
                }
                (Some(out), right)
            }
        };
        SampledCurve { params, states, breaks, tangents, right_tangents }
    }

    /// Nodes `a..=b` as a curve of their own.
    pub fn window(&self, a: usize, b: usize) -> Result<Self> {
        if a >= b || b >= self.len() {
            return Err(Error::InvalidInput(format!("window [{a}, {b}] on {} nodes", self.len())));
        }
        let mut breaks = vec![];
        let mut right_tangents = vec![];
        for (j, &k) in self.breaks.iter().enumerate() {
            if k > a && k < b {
                breaks.push(k - a);
                if self.tangents.is_some() {
                    right_tangents.push(self.right_tangents[j]);
                }
            }
        }
        let tangents = self.tangents.as_ref().map(|t| {
            let mut w = t[a..=b].to_vec();
            if let Some(j) = self.breaks.iter().position(|&k| k == a) {
                w[0] = self.right_tangents[j];
            }
            w
        });
        Ok(SampledCurve {
            params: self.params[a..=b].to_vec(),
            states: self.states[a..=b].to_vec(),
            breaks,
            tangents,
            right_tangents,
        })
    }

    /// Joins curves end to start. Each piece is rephased to start in phase
    /// with the previous end and shifted in `s`; junction rays must agree.
    pub fn concat(pieces: &[Self]) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| Error::InvalidInput("no curves to concatenate".into()))?;
        let analytic = pieces.iter().all(|p| p.tangents.is_some());
        let mut out = if analytic { first.clone() } else { first.clone().without_tangents() };
        for piece in &pieces[1..] {
            let junction = out.len() - 1;
            let ov = out.end().overlap(piece.start())?;
            let dist = 1.0 - ov.norm_sqr();
            if dist > JUNCTION_TOLERANCE {
                return Err(Error::JunctionMismatch(dist));
            }
            let theta = phase_of(ov, "concat")?;
            let shift = out.params[junction] - piece.params[0];
            out.params.extend(piece.params[1..].iter().map(|s| s + shift));
            out.states.extend(piece.states[1..].iter().map(|p| p.rephased(-theta)));
            out.breaks.push(junction);
            out.breaks.extend(piece.breaks.iter().map(|k| k + junction));
            if analytic {
                let pt = piece.tangents.as_ref().expect("analytic piece");
                out.tangents.as_mut().expect("analytic curve").extend_from_slice(&pt[1..]);
                out.right_tangents.push(pt[0]);
                out.right_tangents.extend_from_slice(&piece.right_tangents);
            }
        }
        Ok(out)
    }

    /// Converts every state, keeping the grid and junctions. Analytic
    /// tangents are kept only if the map preserves overlaps to first order.
    pub fn map_states<Q, F>(&self, keep_tangents: bool, f: F) -> Result<SampledCurve<Q>>
    where
        Q: PureState,
        F: Fn(&P) -> Result<Q>,
    {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        validate(&self.params, &states)?;
        let (tangents, right_tangents) =
            if keep_tangents { (self.tangents.clone(), self.right_tangents.clone()) } else { (None, vec![]) };
        Ok(SampledCurve { params: self.params.clone(), states, breaks: self.breaks.clone(), tangents, right_tangents })
    }

    /// Cumulative `(s, φ_tot, φ_dyn, φ_g)` at every node, measured from `s₀`.
    /// `φ_tot` and `φ_g` are NaN where `ψ(s)` is orthogonal to `ψ(s₀)`.
    pub fn phase_table(&self) -> Result<Vec<PhaseRow>> {
        let increments = self.interval_integrals(QuadratureRule::Auto, |t| t.connection.im)?;
        let mut dyn_acc = 0.0;
        let mut rows = Vec::with_capacity(self.len());
        for k in 0..self.len() {
            if k > 0 {
                dyn_acc += increments[k - 1];
            }
            let ov = self.start().overlap(&self.states[k])?;
            let tot = if ov.norm() > ORTHOGONALITY_THRESHOLD { wrap_phase(ov.arg()) } else { f64::NAN };
            rows.push(PhaseRow {
                s: self.params[k],
                total: tot,
                dynamical: dyn_acc,
                geometric: wrap_phase(tot - dyn_acc),
            });
        }
        Ok(rows)
    }

    /// The phase table as CSV with header `s,phi_tot,phi_dyn,phi_g`.
    pub fn phase_table_csv(&self) -> Result<String> {
        let mut out = String::from("s,phi_tot,phi_dyn,phi_g\n");
        for r in self.phase_table()? {
            out.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", r.s, r.total, r.dynamical, r.geometric));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    pub s: f64,
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
}

/// `φ_g[c12 ∪ c23] − φ_g[c12] − φ_g[c23]`, wrapped.
pub fn phase_composition_defect<P: PureState>(c12: &SampledCurve<P>, c23: &SampledCurve<P>) -> Result<f64> {
    let joined = SampledCurve::concat(&[c12.clone(), c23.clone()])?;
    Ok(wrap_phase(joined.geometric_phase()? - c12.geometric_phase()? - c23.geometric_phase()?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveJson {
    params: Vec<f64>,
    states: Vec<StateJson>,
}

impl SampledCurve<StateVector> {
    /// Reads `{"params": [...], "states": [<state objects>]}`; states are normalized.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let raw: CurveJson = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let states = raw.states.into_iter().map(|s| s.into_state().map(|(v, _)| v)).collect::<Result<Vec<_>>>()?;
        Self::new(raw.params, states)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = CurveJson { params: self.params.clone(), states: self.states.iter().map(StateJson::from).collect() };
        serde_json::to_value(raw).expect("curve serializes")
    }

    /// A curve from explicit states and derivative vectors.
    pub fn from_derivatives(params: Vec<f64>, states: Vec<StateVector>, derivs: &[Vec<Complex64>]) -> Result<Self> {
        if derivs.len() != states.len() {
            return Err(Error::InvalidInput(format!("{} derivatives for {} nodes", derivs.len(), states.len())));
        }
        let tangents = states.iter().zip(derivs).map(|(p, d)| crate::state::tangent_from_derivative(p, d)).collect();
        Self::with_tangents(params, states, tangents)
    }
}

fn validate<P: PureState>(params: &[f64], states: &[P]) -> Result<()> {
    if params.len() != states.len() {
        return Err(Error::InvalidInput(format!("{} params for {} states", params.len(), states.len())));
    }
    if states.len() < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: states.len() });
    }
    for k in 0..params.len() - 1 {
        if params[k + 1].partial_cmp(&params[k]) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::NonIncreasingParams(k + 1));
        }
        if states[k].overlap(&states[k + 1])?.norm() <= ORTHOGONALITY_THRESHOLD {
            return Err(Error::OrthogonalPair(k, k + 1));
        }
    }
    Ok(())
}

/// Second-order finite-difference tangents on one smooth piece.
fn fd_tangents<P: PureState>(s: &[f64], psi: &[P]) -> Result<Vec<TangentSample>> {
    let n = psi.len();
    if n == 2 {
        let w = 1.0 / (s[1] - s[0]);
        let t0 = psi[0].stencil_tangent(&[(&psi[0], -w), (&psi[1], w)])?;
        let t1 = psi[1].stencil_tangent(&[(&psi[0], -w), (&psi[1], w)])?;
        return Ok(vec![t0, t1]);
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = if k == 0 {
            let (h1, h2) = (s[1] - s[0], s[2] - s[1]);
            let w = [-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))];
            psi[0].stencil_tangent(&[(&psi[0], w[0]), (&psi[1], w[1]), (&psi[2], w[2])])?
        } else if k == n - 1 {
            let (h1, h2) = (s[k - 1] - s[k - 2], s[k] - s[k - 1]);
            let w = [h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (2.0 * h2 + h1) / (h2 * (h1 + h2))];
            psi[k].stencil_tangent(&[(&psi[k - 2], w[0]), (&psi[k - 1], w[1]), (&psi[k], w[2])])?
        } else {
            let (h1, h2) = (s[k] - s[k - 1], s[k + 1] - s[k]);
            let w = [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))];
            psi[k].stencil_tangent(&[(&psi[k - 1], w[0]), (&psi[k], w[1]), (&psi[k + 1], w[2])])?
        };
        out.push(t);
    }
    Ok(out)
}

/// `∫_a^b` of the quadratic through `(x[i], f[i])`, `i = 0,1,2`.
fn quadratic_integral(x: [f64; 3], f: [f64; 3], a: f64, b: f64) -> f64 {
    let d1 = (f[1] - f[0]) / (x[1] - x[0]);
    let d2 = ((f[2] - f[1]) / (x[2] - x[1]) - d1) / (x[2] - x[0]);
    let h0 = x[1] - x[0];
    let prim = |u: f64| f[0] * u + d1 * u * u / 2.0 + d2 * (u * u * u / 3.0 - h0 * u * u / 2.0);
    prim(b - x[0]) - prim(a - x[0])
}

/// Integrals over each interval `[x_i, x_{i+1}]` under the given rule.
pub(crate) fn interval_quadrature(x: &[f64], f: &[f64], rule: QuadratureRule) -> Vec<f64> {
    let n = x.len();
    let trapezoid = |i: usize| 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    if n < 3 || rule == QuadratureRule::Trapezoid {
        return (0..n - 1).map(trapezoid).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    let mut i = 0;
    while i + 2 < n {
        let xs = [x[i], x[i + 1], x[i + 2]];
        let fs = [f[i], f[i + 1], f[i + 2]];
        out.push(quadratic_integral(xs, fs, x[i], x[i + 1]));
        out.push(quadratic_integral(xs, fs, x[i + 1], x[i + 2]));
        i += 2;
    }
    if i + 1 < n {
        let xs = [x[n - 3], x[n - 2], x[n - 1]];
        let fs = [f[n - 3], f[n - 2], f[n - 1]];
        out.push(quadratic_integral(xs, fs, x[n - 2], x[n - 1]));
    }
    out
}

/// Composite integral of samples under a rule (Auto means Simpson).
pub fn integrate(x: &[f64], f: &[f64], rule: QuadratureRule) -> f64 {
    let rule = if rule == QuadratureRule::Auto { QuadratureRule::Simpson } else { rule };
    interval_quadrature(x, f, rule).iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(a: Complex64, b: Complex64) -> StateVector {
        StateVector::new(vec![a, b]).unwrap()
    }

    /// `(cos(θ/2), e^{is} sin(θ/2))` with analytic tangents.
    pub(crate) fn latitude(theta: f64, a: f64, b: f64, nodes: usize) -> SampledCurve<StateVector> {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        SampledCurve::sample(&uniform_grid(a, b, nodes), |s| {
            let psi = StateVector::from_unit(vec![c(ct, 0.0), Complex64::from_polar(st, s)])?;
            let d = vec![c(0.0, 0.0), Complex64::from_polar(st, s) * c(0.0, 1.0)];
            Ok((psi.clone(), crate::state::tangent_from_derivative(&psi, &d)))
        })
        .unwrap()
    }

    fn pure_phase(a: f64, b: f64, nodes: usize) -> SampledCurve<StateVector> {
        let psi0 = qubit(c(0.6, 0.0), c(0.0, 0.8));
        SampledCurve::sample(&uniform_grid(a, b, nodes), |s| {
            Ok((psi0.rephased(s), TangentSample { connection: c(0.0, 1.0), speed_sq: 1.0 }))
        })
        .unwrap()
    }

    #[test]
    fn construction_invariants() {
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap();
        assert!(matches!(SampledCurve::new(vec![0.0], vec![e0.clone()]), Err(Error::TooFewNodes { .. })));
        assert!(matches!(
            SampledCurve::new(vec![0.0, 0.0], vec![e0.clone(), e0.clone()]),
            Err(Error::NonIncreasingParams(1))
        ));
        assert!(matches!(SampledCurve::new(vec![0.0, 1.0], vec![e0, e1]), Err(Error::OrthogonalPair(0, 1))));
    }

    #[test]
    fn total_phase_examples() {
        let psi0 = qubit(c(1.0, 0.0), c(1.0, 1.0));
        let constant = SampledCurve::new(uniform_grid(0.0, 1.0, 11), vec![psi0; 11]).unwrap();
        assert_eq!(constant.total_phase().unwrap(), 0.0);
        assert!((pure_phase(0.0, 0.5, 101).total_phase().unwrap() - 0.5).abs() < 1e-14);
        assert!(latitude(FRAC_PI_2, 0.0, 2.0 * PI, 1001).total_phase().unwrap().abs() < 1e-12);
    }

    #[test]
    fn dynamical_phase_examples() {
        let real = SampledCurve::sample_states(&uniform_grid(0.0, 1.0, 101), |s| {
            StateVector::from_real(&[s.cos(), s.sin(), 0.3])
        })
        .unwrap();
        assert!(real.dynamical_phase().unwrap().abs() < 1e-14);
        assert!((pure_phase(0.0, 0.5, 101).dynamical_phase().unwrap() - 0.5).abs() < 1e-14);
        let fd = pure_phase(0.0, 0.5, 101).without_tangents();
        assert!((fd.dynamical_phase().unwrap() - 0.5).abs() < 1e-5);
        let loop_ = latitude(FRAC_PI_2, 0.0, 2.0 * PI, 1001);
        assert!((loop_.dynamical_phase().unwrap() - PI).abs() < 1e-10);
    }

    #[test]
    fn geometric_phase_of_latitude_loop() {
        let g = latitude(FRAC_PI_2, 0.0, 2.0 * PI, 1001).geometric_phase().unwrap();
        assert!((wrap_phase(g + PI)).abs() < 1e-10);
        let theta = PI / 3.0;
        let g = latitude(theta, 0.0, 2.0 * PI, 1001).geometric_phase().unwrap();
        let expected = wrap_phase(-2.0 * PI * (theta / 2.0).sin().powi(2));
        assert!((g - expected).abs() < 1e-10);
    }

    #[test]
    fn finite_difference_quadrature_is_second_order() {
        let theta = PI / 3.0;
        let exact = 2.0 * PI * (theta / 2.0).sin().powi(2);
        let err = |n| (latitude(theta, 0.0, 2.0 * PI, n).without_tangents().dynamical_phase().unwrap() - exact).abs();
        let (e1, e2) = (err(101), err(201));
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.3, "order {order}");
    }

    #[test]
    fn horizontal_lift_examples() {
        let real =
            SampledCurve::sample_states(&uniform_grid(0.0, 1.0, 21), |s| StateVector::from_real(&[s.cos(), s.sin()]))
                .unwrap();
        let lifted = real.horizontal_lift().unwrap();
        for (a, b) in real.states().iter().zip(lifted.states()) {
            assert_eq!(a, b);
        }
        let psi0 = qubit(c(0.6, 0.0), c(0.0, 0.8));
        let states: Vec<_> = (0..20).map(|k| psi0.rephased(k as f64 / 10.0)).collect();
        let lifted = SampledCurve::new(uniform_grid(0.0, 1.0, 20), states).unwrap().horizontal_lift().unwrap();
        for p in lifted.states() {
            for (x, y) in p.amplitudes().iter().zip(psi0.amplitudes()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn curve_length_examples() {
        let psi0 = qubit(c(1.0, 0.0), c(0.0, 1.0));
        let constant =
            SampledCurve::with_tangents(uniform_grid(0.0, 1.0, 5), vec![psi0; 5], vec![TangentSample::zero(); 5])
                .unwrap();
        assert_eq!(constant.curve_length().unwrap(), 0.0);
        assert_eq!(pure_phase(0.0, 1.0, 11).curve_length().unwrap(), 0.0);
        // FS speed along a latitude is ½ sinθ.
        let l = latitude(PI / 3.0, 0.0, 1.0, 101).curve_length().unwrap();
        assert!((l - 0.5 * (PI / 3.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn smooth_gauge_leaves_geometric_phase_unchanged() {
        let loop_ = latitude(PI / 3.0, 0.0, 2.0 * PI, 1001);
        let g0 = loop_.geometric_phase().unwrap();
        let gauged = loop_.rephase_smooth(|s| 0.7 * s.sin() + 0.2 * s * s, |s| 0.7 * s.cos() + 0.4 * s);
        assert!((gauged.total_phase().unwrap() - loop_.total_phase().unwrap()).abs() > 1e-3);
        assert!((wrap_phase(gauged.geometric_phase().unwrap() - g0)).abs() < 1e-8);
        assert!((gauged.curve_length().unwrap() - loop_.curve_length().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn concat_tracks_junctions_and_reversal_is_additive() {
        let a = latitude(PI / 3.0, 0.0, 1.0, 101);
        let b = a.reversed();
        let joined = SampledCurve::concat(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(joined.len(), 201);
        assert_eq!(joined.junctions(), &[100]);
        assert!(phase_composition_defect(&a, &b).unwrap().abs() < 1e-12);
        assert!(joined.is_closed().unwrap());
        let w = joined.window(50, 150).unwrap();
        assert_eq!(w.junctions(), &[50]);
    }

    #[test]
    fn concat_rejects_ray_mismatch() {
        let a = latitude(PI / 3.0, 0.0, 1.0, 11);
        let b = latitude(PI / 3.0, 1.5, 2.0, 11);
        assert!(matches!(SampledCurve::concat(&[a, b]), Err(Error::JunctionMismatch(_))));
    }

    #[test]
    fn composition_defect_matches_bargmann_phase() {
        // Two straight-line (free geodesic) pieces through the qubit triple.
        let p1 = qubit(c(1.0, 0.0), c(0.0, 0.0));
        let p2 = qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
        let p3 = qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2));
        let seg = |a: &StateVector, b: &StateVector| {
            let (a, b) = (a.clone(), b.clone());
            SampledCurve::sample_states(&uniform_grid(0.0, 1.0, 401), move |s| {
                let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * (1.0 - s) + y * s).collect();
                StateVector::new(amps)
            })
            .unwrap()
        };
        let d = phase_composition_defect(&seg(&p1, &p2), &seg(&p2, &p3)).unwrap();
        assert!((d + FRAC_PI_4).abs() < 1e-5, "{d}");
    }

    #[test]
    fn quadrature_rules_integrate_polynomials() {
        let x = [0.0, 0.3, 0.5, 1.1, 1.2, 2.0];
        let f: Vec<f64> = x.iter().map(|t| 1.0 + 2.0 * t - 3.0 * t * t).collect();
        let exact = 2.0 + 4.0 - 8.0;
        assert!((integrate(&x, &f, QuadratureRule::Simpson) - exact).abs() < 1e-13);
        let f: Vec<f64> = x.iter().map(|t| 1.0 - t).collect();
        assert!((integrate(&x, &f, QuadratureRule::Trapezoid) - 0.0).abs() < 1e-14);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let loop_ = latitude(PI / 3.0, 0.0, 1.0, 11);
        let csv = loop_.phase_table_csv().unwrap();
        assert!(csv.starts_with("s,phi_tot,phi_dyn,phi_g\n"));
        assert_eq!(csv.lines().count(), 12);
        let back = SampledCurve::from_json(&loop_.to_json()).unwrap();
        assert_eq!(back.params(), loop_.params());
        let last = loop_.phase_table().unwrap().pop().unwrap();
        assert!((last.geometric - loop_.geometric_phase().unwrap()).abs() < 1e-14);
    }
}
