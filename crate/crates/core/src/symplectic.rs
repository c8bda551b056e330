//! Local Darboux coordinates, the connection one-form and the symplectic two-form.
//!
//! Around a base state `ψ₀` with orthonormal complement `{e_r}`, a state with
//! `(ψ₀, ψ) ≠ 0` is written `ψ = e^{iα}(sqrt(1 − ‖χ‖²) ψ₀ + χ)` with
//! `χ = Σ (β_r − iγ_r) e_r / √2`. In these coordinates
//! `A = dα + ½Σ(γ_r dβ_r − β_r dγ_r)` and `ω = Σ dγ_r ∧ dβ_r`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charts::Chart;
use crate::curve::{integrate, QuadratureRule, SampledCurve};
use crate::error::{Error, Result};
use crate::state::{tangent_from_derivative, StateVector};

/// Orthonormality tolerance of the frame `{ψ₀, e_r}`.
pub const FRAME_TOLERANCE: f64 = 1e-12;

/// Loops must close in `(β, γ)` to this tolerance.
pub const LOOP_CLOSURE_TOLERANCE: f64 = 1e-10;

/// States with `|(ψ₀, ψ)|` below this are outside the chart.
pub const CHART_OVERLAP_THRESHOLD: f64 = 1e-10;

/// A chart is isotropic when every pulled-back entry is below this.
pub const ISOTROPY_TOLERANCE: f64 = 1e-10;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxCoords {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl DarbouxCoords {
    pub fn zero(n: usize) -> Self {
        DarbouxCoords { alpha: 0.0, beta: vec![0.0; n], gamma: vec![0.0; n] }
    }

    /// Stacked `η = (β, γ)`.
    pub fn eta(&self) -> Vec<f64> {
        self.beta.iter().chain(&self.gamma).copied().collect()
    }

    pub fn from_eta(alpha: f64, eta: &[f64]) -> Self {
        let n = eta.len() / 2;
        DarbouxCoords { alpha, beta: eta[..n].to_vec(), gamma: eta[n..].to_vec() }
    }

    /// `‖χ‖² = ½ηᵀη`.
    pub fn chi_norm_sq(&self) -> f64 {
        0.5 * self.beta.iter().chain(&self.gamma).map(|x| x * x).sum::<f64>()
    }

    fn chi(&self) -> Vec<Complex64> {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        self.beta.iter().zip(&self.gamma).map(|(b, g)| Complex64::new(b * k, -g * k)).collect()
    }
}

/// Orthonormal frame `{ψ₀, e₁, …, e_{d−1}}` defining Darboux coordinates near `ψ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxChart {
    base: StateVector,
    basis: Vec<StateVector>,
}

/// JSON form: the base state and the complement basis, each as `[[re, im], …]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DarbouxChartJson {
    pub base: Vec<[f64; 2]>,
    #[serde(default)]
    pub basis: Option<Vec<Vec<[f64; 2]>>>,
}

impl DarbouxChart {
    /// Completes `ψ₀` to an orthonormal basis with the Householder reflection
    /// that maps `e^{iθ}e₀` to `ψ₀`; its remaining columns span the complement.
    pub fn new(base: StateVector) -> Result<Self> {
        let d = base.dim();
        let psi = base.amplitudes();
        let r = psi[0].norm();
        let ph = if r > 0.0 { psi[0] / r } else { Complex64::new(1.0, 0.0) };
        let mut w = psi.to_vec();
        w[0] -= ph;
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let basis = (1..d)
            .map(|k| {
                let mut col: Vec<Complex64> = if wn > 1e-30 {
                    let c = w[k].conj() * (2.0 / wn);
                    w.iter().map(|x| -x * c).collect()
                } else {
                    vec![Complex64::new(0.0, 0.0); d]
                };
                col[k] += 1.0;
                StateVector::from_unit(col)
            })
            .collect::<Result<_>>()?;
        Ok(DarbouxChart { base, basis })
    }

    /// Uses a caller-supplied complement basis, checked for orthonormality.
    pub fn with_basis(base: StateVector, basis: Vec<StateVector>) -> Result<Self> {
        let d = base.dim();
        if basis.len() + 1 != d {
            return Err(Error::DimensionMismatch(d - 1, basis.len()));
        }
        let all: Vec<&StateVector> = std::iter::once(&base).chain(&basis).collect();
        for (i, a) in all.iter().enumerate() {
            if a.dim() != d {
                return Err(Error::DimensionMismatch(d, a.dim()));
            }
            for b in &all[i..] {
                let z = dot(a.amplitudes(), b.amplitudes());
                let expect = if std::ptr::eq(*a, *b) { 1.0 } else { 0.0 };
                if (z - expect).norm() > FRAME_TOLERANCE {
                    return Err(Error::InvalidInput(format!(
                        "Darboux frame not orthonormal (defect {:e})",
                        (z - expect).norm()
                    )));
                }
            }
        }
        Ok(DarbouxChart { base, basis })
    }

    pub fn from_json(json: &DarbouxChartJson) -> Result<Self> {
        let vec = |v: &[[f64; 2]]| v.iter().map(|[r, i]| Complex64::new(*r, *i)).collect::<Vec<_>>();
        let base = StateVector::from_unit(vec(&json.base)).or_else(|_| StateVector::new(vec(&json.base)))?;
        match &json.basis {
            None => Self::new(base),
            Some(b) => Self::with_basis(base, b.iter().map(|v| StateVector::from_unit(vec(v))).collect::<Result<_>>()?),
        }
    }

    pub fn to_json(&self) -> DarbouxChartJson {
        let enc = |s: &StateVector| s.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        DarbouxChartJson { base: enc(&self.base), basis: Some(self.basis.iter().map(enc).collect()) }
    }

    pub fn base(&self) -> &StateVector {
        &self.base
    }

    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// Number of `(β_r, γ_r)` pairs.
    pub fn n_pairs(&self) -> usize {
        self.basis.len()
    }

    /// The chart with complement basis `e′_r = Σ_s U_{sr} e_s` for unitary `U`.
    pub fn rotated(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        let n = self.n_pairs();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::DimensionMismatch(n, u.nrows()));
        }
        let d = self.base.dim();
        let basis = (0..n)
            .map(|r| {
                let mut v = vec![Complex64::new(0.0, 0.0); d];
                for s in 0..n {
                    for (x, y) in v.iter_mut().zip(self.basis[s].amplitudes()) {
                        *x += u[(s, r)] * y;
                    }
                }
                StateVector::new(v)
            })
            .collect::<Result<_>>()?;
        Self::with_basis(self.base.clone(), basis)
    }

    pub fn to_coords(&self, psi: &StateVector) -> Result<DarbouxCoords> {
        if psi.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch(self.base.dim(), psi.dim()));
        }
        let c0 = dot(self.base.amplitudes(), psi.amplitudes());
        if c0.norm() < CHART_OVERLAP_THRESHOLD {
            return Err(Error::OutsideChart(c0.norm()));
        }
        let alpha = c0.arg();
        let w = Complex64::from_polar(std::f64::consts::SQRT_2, -alpha);
        let (beta, gamma) = self
            .basis
            .iter()
            .map(|e| {
                let chi = w * dot(e.amplitudes(), psi.amplitudes());
                (chi.re, -chi.im)
            })
            .unzip();
        Ok(DarbouxCoords { alpha, beta, gamma })
    }

    pub fn from_coords(&self, x: &DarbouxCoords) -> Result<StateVector> {
        self.check_coords(x)?;
        let f = (1.0 - x.chi_norm_sq()).sqrt();
        let phase = Complex64::from_polar(1.0, x.alpha);
        let chi = x.chi();
        let amps = (0..self.base.dim())
            .map(|i| {
                let mut a = self.base.amplitudes()[i] * f;
                for (c, e) in chi.iter().zip(&self.basis) {
                    a += c * e.amplitudes()[i];
                }
                a * phase
            })
            .collect();
        StateVector::new(amps)
    }

    /// `ψ̇` for coordinates moving with rates `v`.
    pub fn derivative(&self, x: &DarbouxCoords, v: &DarbouxCoords) -> Result<Vec<Complex64>> {
        self.check_coords(x)?;
        let f = (1.0 - x.chi_norm_sq()).sqrt();
        let (chi, chi_dot) = (x.chi(), v.chi());
        let re_dot: f64 = chi.iter().zip(&chi_dot).map(|(a, b)| (a.conj() * b).re).sum();
        let f_dot = -re_dot / f;
        let phase = Complex64::from_polar(1.0, x.alpha);
        let i_alpha = Complex64::new(0.0, v.alpha);
        Ok((0..self.base.dim())
            .map(|i| {
                let mut a = self.base.amplitudes()[i] * f;
                let mut da = self.base.amplitudes()[i] * f_dot;
                for ((c, cd), e) in chi.iter().zip(&chi_dot).zip(&self.basis) {
                    a += c * e.amplitudes()[i];
                    da += cd * e.amplitudes()[i];
                }
                phase * (i_alpha * a + da)
            })
            .collect())
    }

    fn check_coords(&self, x: &DarbouxCoords) -> Result<()> {
        let n = self.n_pairs();
        if x.beta.len() != n || x.gamma.len() != n {
            return Err(Error::DimensionMismatch(n, x.beta.len().max(x.gamma.len())));
        }
        if x.chi_norm_sq() >= 1.0 {
            return Err(Error::OutsideChart(x.chi_norm_sq()));
        }
        Ok(())
    }

    /// Maps a state curve to coordinates. Tangent samples do not determine coordinate
    /// rates, so the result has none and loop integrals use their discrete forms.
    pub fn coords_curve(&self, curve: &SampledCurve<StateVector>) -> Result<CoordCurve> {
        let points: Vec<DarbouxCoords> = curve.states().iter().map(|s| self.to_coords(s)).collect::<Result<_>>()?;
        let mut out = CoordCurve::new(curve.params().to_vec(), points)?;
        out.unwrap_alpha();
        Ok(out)
    }

    /// The state curve of a coordinate curve, with exact tangents when rates are known.
    pub fn state_curve(&self, c: &CoordCurve) -> Result<SampledCurve<StateVector>> {
        let states: Vec<StateVector> = c.points.iter().map(|x| self.from_coords(x)).collect::<Result<_>>()?;
        match &c.rates {
            Some(rates) => {
                let tangents = states
                    .iter()
                    .zip(c.points.iter().zip(rates))
                    .map(|(s, (x, v))| Ok(tangent_from_derivative(s, &self.derivative(x, v)?)))
                    .collect::<Result<_>>()?;
                SampledCurve::with_tangents(c.params.clone(), states, tangents)
            }
            None => SampledCurve::new(c.params.clone(), states),
        }
    }
}

/// A sampled curve in Darboux coordinates, with optional exact rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordCurve {
    pub params: Vec<f64>,
    pub points: Vec<DarbouxCoords>,
    #[serde(default)]
    pub rates: Option<Vec<DarbouxCoords>>,
}

impl CoordCurve {
    pub fn new(params: Vec<f64>, points: Vec<DarbouxCoords>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::DimensionMismatch(params.len(), points.len()));
        }
        if params.len() < 2 {
            return Err(Error::TooFewNodes { needed: 2, got: params.len() });
        }
        if let Some(k) = params.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasingParams(k + 1));
        }
        let n = points[0].beta.len();
        if points.iter().any(|p| p.beta.len() != n || p.gamma.len() != n) {
            return Err(Error::InvalidInput("coordinate points have inconsistent lengths".into()));
        }
        Ok(CoordCurve { params, points, rates: None })
    }

    pub fn with_rates(params: Vec<f64>, points: Vec<DarbouxCoords>, rates: Vec<DarbouxCoords>) -> Result<Self> {
        if rates.len() != points.len() {
            return Err(Error::DimensionMismatch(points.len(), rates.len()));
        }
        let mut c = Self::new(params, points)?;
        c.rates = Some(rates);
        Ok(c)
    }

    /// Samples `s ↦ (point, rate)` on a grid.
    pub fn sample<F>(grid: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> (DarbouxCoords, DarbouxCoords),
    {
        let (points, rates) = grid.iter().map(|&s| f(s)).unzip();
        Self::with_rates(grid.to_vec(), points, rates)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Removes `2π` jumps from `α` so that `∫dα` is the net change.
    pub fn unwrap_alpha(&mut self) {
        for k in 1..self.points.len() {
            let prev = self.points[k - 1].alpha;
            let d = crate::state::wrap_phase(self.points[k].alpha - prev);
            self.points[k].alpha = prev + d;
        }
    }

    /// Largest `(β, γ)` gap between the first and last points.
    pub fn closure_gap(&self) -> f64 {
        let (a, b) = (&self.points[0], &self.points[self.len() - 1]);
        a.eta().iter().zip(b.eta()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// `½Σ∫(γ_r dβ_r − β_r dγ_r)`: Simpson on exact rates, or the exact
    /// integral over the piecewise-linear interpolant when rates are absent.
    fn half_circulation(&self) -> f64 {
        match &self.rates {
            Some(rates) => {
                let f: Vec<f64> = self.points.iter().zip(rates).map(|(x, v)| one_form_a(x, v) - v.alpha).collect();
                integrate(&self.params, &f, QuadratureRule::Simpson)
            }
            None => {
                let mut acc = 0.0;
                for w in self.points.windows(2) {
                    for r in 0..w[0].beta.len() {
                        acc += w[0].gamma[r] * w[1].beta[r] - w[0].beta[r] * w[1].gamma[r];
                    }
                }
                0.5 * acc
            }
        }
    }

    /// `∫A` along the curve.
    pub fn integrate_a(&self) -> f64 {
        let d_alpha = match &self.rates {
            Some(rates) => {
                integrate(&self.params, &rates.iter().map(|v| v.alpha).collect::<Vec<_>>(), QuadratureRule::Simpson)
            }
            None => self.points[self.len() - 1].alpha - self.points[0].alpha,
        };
        d_alpha + self.half_circulation()
    }

    /// Fubini–Study length `∫ sqrt(½ η̇ᵀ g(η) η̇) ds`. Without exact rates the
    /// velocities come from three-point differences.
    pub fn fs_length(&self) -> Result<f64> {
        let etas: Vec<Vec<f64>> = self.points.iter().map(|p| p.eta()).collect();
        let rates: Vec<Vec<f64>> = match &self.rates {
            Some(r) => r.iter().map(|v| v.eta()).collect(),
            None => fd_rates(&self.params, &etas),
        };
        let f = etas
            .iter()
            .zip(&rates)
            .map(|(e, v)| Ok((0.5 * local_metric_quadratic(e, v)?).max(0.0).sqrt()))
            .collect::<Result<Vec<f64>>>()?;
        let rule = if self.rates.is_some() { QuadratureRule::Simpson } else { QuadratureRule::Trapezoid };
        Ok(integrate(&self.params, &f, rule))
    }
}

fn fd_rates(s: &[f64], x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = s.len();
    let n = x[0].len();
    (0..m)
        .map(|k| {
            if m == 2 {
                return (0..n).map(|i| (x[1][i] - x[0][i]) / (s[1] - s[0])).collect();
            }
            let (a, b, c) = if k == 0 {
                (0, 1, 2)
            } else if k == m - 1 {
                (m - 3, m - 2, m - 1)
            } else {
                (k - 1, k, k + 1)
            };
            let t = s[k];
            // Derivative of the quadratic through three nodes.
            let w0 = (2.0 * t - s[b] - s[c]) / ((s[a] - s[b]) * (s[a] - s[c]));
            let w1 = (2.0 * t - s[a] - s[c]) / ((s[b] - s[a]) * (s[b] - s[c]));
            let w2 = (2.0 * t - s[a] - s[b]) / ((s[c] - s[a]) * (s[c] - s[b]));
            (0..n).map(|i| w0 * x[a][i] + w1 * x[b][i] + w2 * x[c][i]).collect()
        })
        .collect()
}

/// `A = α̇ + ½Σ(γ_r β̇_r − β_r γ̇_r)` at `x` on the tangent `v`.
pub fn one_form_a(x: &DarbouxCoords, v: &DarbouxCoords) -> f64 {
    let half: f64 = (0..x.beta.len()).map(|r| x.gamma[r] * v.beta[r] - x.beta[r] * v.gamma[r]).sum();
    v.alpha + 0.5 * half
}

/// `∫_S ω` over a surface bounded by the loop, reduced to `½Σ∮(β_r dγ_r − γ_r dβ_r)`.
/// With this orientation the area equals the geometric phase of the state loop.
pub fn symplectic_area(c: &CoordCurve) -> Result<f64> {
    let gap = c.closure_gap();
    if gap > LOOP_CLOSURE_TOLERANCE {
        return Err(Error::OpenLoop(gap));
    }
    Ok(-c.half_circulation())
}

/// `J = [[0, I], [−I, 0]]` acting on `η = (β, γ)`.
pub fn symplectic_matrix(n_pairs: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * n_pairs, 2 * n_pairs, |i, j| {
        if j == i + n_pairs {
            1.0
        } else if i == j + n_pairs {
            -1.0
        } else {
            0.0
        }
    })
}

/// `g(η) = 1 + ½ηηᵀ/(1 − ½ηᵀη) + ½JηηᵀJ`, so that `ds² = ½ dηᵀ g dη`.
/// `vᵀ g(η) v` without forming `g`: `|v|² + ½(η·v)²/(1 − q) − ½(vᵀJη)²`.
pub fn local_metric_quadratic(eta: &[f64], v: &[f64]) -> Result<f64> {
    if !eta.len().is_multiple_of(2) || v.len() != eta.len() {
        return Err(Error::InvalidInput("η and v must stack β and γ of equal length".into()));
    }
    let n = eta.len() / 2;
    let q = 0.5 * eta.iter().map(|x| x * x).sum::<f64>();
    if q >= 1.0 {
        return Err(Error::DomainViolation(format!("ηᵀη = {} ≥ 2", 2.0 * q)));
    }
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let ev: f64 = eta.iter().zip(v).map(|(a, b)| a * b).sum();
    // Jη = (γ, −β).
    let vj: f64 = (0..n).map(|r| v[r] * eta[n + r] - v[n + r] * eta[r]).sum();
    Ok(vv + 0.5 * ev * ev / (1.0 - q) - 0.5 * vj * vj)
}

pub fn local_metric_matrix(eta: &[f64]) -> Result<DMatrix<f64>> {
    if !eta.len().is_multiple_of(2) {
        return Err(Error::InvalidInput("η must stack β and γ of equal length".into()));
    }
    let e = DVector::from_column_slice(eta);
    let q = 0.5 * e.dot(&e);
    if q >= 1.0 {
        return Err(Error::DomainViolation(format!("ηᵀη = {} ≥ 2", 2.0 * q)));
    }
    let j = symplectic_matrix(eta.len() / 2);
    let eet = &e * e.transpose();
    Ok(DMatrix::identity(eta.len(), eta.len()) + &eet * (0.5 / (1.0 - q)) + (&j * eet * &j) * 0.5)
}

/// Pullback of `ω`: `Im(u_μ, u_ν)`.
pub fn pullback_two_form<C: Chart>(chart: &C, xi: &[f64]) -> Result<DMatrix<f64>> {
    chart.check_domain(xi)?;
    Ok(chart.tangent_frame(xi)?.two_form())
}

/// `max |Im(u_μ, u_ν) − Im(u⊥_μ, u⊥_ν)|`, zero because `c_μ` is imaginary.
pub fn pullback_projection_gap<C: Chart>(chart: &C, xi: &[f64]) -> Result<f64> {
    let f = chart.tangent_frame(xi)?;
    Ok((f.two_form() - f.perp_gram().map(|z| z.im)).abs().max())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotropyReport {
    pub isotropic: bool,
    pub max_entry: f64,
}

pub fn isotropy_report<C: Chart>(chart: &C, samples: &[Vec<f64>]) -> Result<IsotropyReport> {
    let mut max_entry: f64 = 0.0;
    for xi in samples {
        max_entry = max_entry.max(pullback_two_form(chart, xi)?.abs().max());
    }
    Ok(IsotropyReport { isotropic: max_entry < ISOTROPY_TOLERANCE, max_entry })
}

/// `max |∂_λ ω_μν + ∂_μ ω_νλ + ∂_ν ω_λμ|` by central differences; zero for `n < 3`.
pub fn closedness_defect<C: Chart>(chart: &C, xi: &[f64], h: f64) -> Result<f64> {
    let n = chart.n_params();
    if n < 3 {
        chart.check_domain(xi)?;
        return Ok(0.0);
    }
    let d = (0..n)
        .map(|k| {
            let mut p = xi.to_vec();
            let mut m = xi.to_vec();
            p[k] += h;
            m[k] -= h;
            Ok((pullback_two_form(chart, &p)? - pullback_two_form(chart, &m)?) / (2.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for mu in 0..n {
        for nu in mu + 1..n {
            for lam in nu + 1..n {
                let s = d[lam][(mu, nu)] + d[mu][(nu, lam)] + d[nu][(lam, mu)];
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{CoherentChart, GaussianChart, RealSphereChart, TwoModeSphereChart};
    use crate::curve::uniform_grid;
    use crate::sampling::{random_state, random_unitary, rng};
    use crate::state::PureState;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    fn qubit_chart() -> DarbouxChart {
        DarbouxChart::new(StateVector::basis(2, 0).unwrap()).unwrap()
    }

    fn circle(r: f64, nodes: usize, forward: bool) -> CoordCurve {
        let sgn = if forward { 1.0 } else { -1.0 };
        CoordCurve::sample(&uniform_grid(0.0, TAU, nodes), |t| {
            let (s, c) = (sgn * t).sin_cos();
            (
                DarbouxCoords { alpha: 0.0, beta: vec![r * c], gamma: vec![r * s] },
                DarbouxCoords { alpha: 0.0, beta: vec![-sgn * r * s], gamma: vec![sgn * r * c] },
            )
        })
        .unwrap()
    }

    #[test]
    fn coordinate_examples() {
        let mut g = rng(7);
        let dc = DarbouxChart::new(random_state(&mut g, 4)).unwrap();
        let x = dc.to_coords(dc.base()).unwrap();
        assert!(x.alpha.abs() < 1e-15 && x.eta().iter().all(|v| v.abs() < 1e-15));
        let x = dc.to_coords(&dc.base().rephased(0.3)).unwrap();
        assert!((x.alpha - 0.3).abs() < 1e-14);
        let amps: Vec<Complex64> = dc
            .base()
            .amplitudes()
            .iter()
            .zip(dc.basis()[0].amplitudes())
            .map(|(a, b)| (a + b) * FRAC_1_SQRT_2)
            .collect();
        let x = dc.to_coords(&StateVector::from_unit(amps).unwrap()).unwrap();
        assert!(x.alpha.abs() < 1e-14 && (x.beta[0] - 1.0).abs() < 1e-14 && x.gamma[0].abs() < 1e-14);
        assert!(matches!(dc.to_coords(&dc.basis()[1]), Err(Error::OutsideChart(_))));
    }

    #[test]
    fn round_trip() {
        let mut g = rng(3);
        let dc = DarbouxChart::new(random_state(&mut g, 5)).unwrap();
        for _ in 0..20 {
            let psi = random_state(&mut g, 5);
            let back = dc.from_coords(&dc.to_coords(&psi).unwrap()).unwrap();
            let err: f64 =
                psi.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
        assert!(dc
            .from_coords(&DarbouxCoords { alpha: 0.0, beta: vec![1.5, 0.0, 0.0, 0.0], gamma: vec![0.0; 4] })
            .is_err());
    }

    #[test]
    fn one_form_examples() {
        let x = DarbouxCoords::zero(1);
        assert_eq!(one_form_a(&x, &DarbouxCoords { alpha: 1.0, beta: vec![0.0], gamma: vec![0.0] }), 1.0);
        let x = DarbouxCoords { alpha: 0.0, beta: vec![1.0], gamma: vec![0.0] };
        assert_eq!(one_form_a(&x, &DarbouxCoords { alpha: 0.0, beta: vec![0.0], gamma: vec![1.0] }), -0.5);
        assert!((circle(1.0, 1001, true).integrate_a() + PI).abs() < 1e-12);
    }

    #[test]
    fn area_matches_geometric_phase() {
        let dc = qubit_chart();
        for r in [0.3, 0.8, 1.2] {
            let c = circle(r, 1001, true);
            let area = symplectic_area(&c).unwrap();
            assert!((area - PI * r * r).abs() < 1e-12);
            let states = dc.state_curve(&c).unwrap();
            let phi = states.geometric_phase().unwrap();
            assert!(crate::state::wrap_phase(phi - area).abs() < 1e-4, "{phi} {area}");
            // Dynamical phase is the loop integral of A.
            assert!((states.dynamical_phase().unwrap() - c.integrate_a()).abs() < 1e-6);
            assert!((symplectic_area(&circle(r, 1001, false)).unwrap() + area).abs() < 1e-12);
        }
        let constant = CoordCurve::new(vec![0.0, 1.0], vec![DarbouxCoords::zero(1); 2]).unwrap();
        assert_eq!(symplectic_area(&constant).unwrap(), 0.0);
        let open =
            CoordCurve::new(vec![0.0, 1.0], vec![DarbouxCoords::zero(1), DarbouxCoords::from_eta(0.0, &[0.1, 0.0])]);
        assert!(matches!(symplectic_area(&open.unwrap()), Err(Error::OpenLoop(_))));
    }

    #[test]
    fn equator_loop_has_phase_pi() {
        // ‖χ‖² = sin²(θ/2), so r = 1 is the equator θ = π/2 and the loop bounds a hemisphere.
        let c = circle(1.0, 1001, true);
        let phi = qubit_chart().state_curve(&c).unwrap().geometric_phase().unwrap();
        assert!(crate::state::wrap_phase(phi + PI).abs() < 1e-6, "{phi}");
    }

    #[test]
    fn householder_frame_is_orthonormal() {
        let mut g = rng(11);
        for d in [2, 3, 7] {
            let dc = DarbouxChart::new(random_state(&mut g, d)).unwrap();
            assert!(DarbouxChart::with_basis(dc.base().clone(), dc.basis().to_vec()).is_ok());
        }
        let e0 = DarbouxChart::new(StateVector::basis(3, 0).unwrap()).unwrap();
        assert_eq!(e0.basis()[0], StateVector::basis(3, 1).unwrap());
    }

    #[test]
    fn metric_spectrum() {
        assert_eq!(local_metric_matrix(&[0.0; 4]).unwrap(), DMatrix::identity(4, 4));
        let eta = [0.6, 0.0, 0.0, 0.8];
        let ev = nalgebra::SymmetricEigen::new(local_metric_matrix(&eta).unwrap()).eigenvalues;
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([0.5, 1.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(local_metric_matrix(&[1.0, 1.0]).is_err());
        let v = [0.3, -1.1, 0.4, 0.9];
        let g = local_metric_matrix(&eta).unwrap();
        let dv = DVector::from_column_slice(&v);
        assert!((local_metric_quadratic(&eta, &v).unwrap() - dv.dot(&(g * &dv))).abs() < 1e-13);
    }

    #[test]
    fn fs_length_matches_state_curve() {
        let dc = qubit_chart();
        let c = circle(0.7, 1001, true);
        let a = c.fs_length().unwrap();
        let b = dc.state_curve(&c).unwrap().curve_length().unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn basis_rotation_invariance() {
        let mut g = rng(11);
        let dc = DarbouxChart::new(random_state(&mut g, 3)).unwrap();
        let c = circle(0.6, 801, true);
        let mut c2 = CoordCurve::sample(&c.params, |t| {
            let (s, co) = t.sin_cos();
            (
                DarbouxCoords { alpha: 0.1 * s, beta: vec![0.6 * co, 0.2 * s], gamma: vec![0.6 * s, 0.1] },
                DarbouxCoords { alpha: 0.1 * co, beta: vec![-0.6 * s, 0.2 * co], gamma: vec![0.6 * co, 0.0] },
            )
        })
        .unwrap();
        c2.rates = None;
        let states = dc.state_curve(&c2).unwrap();
        let rot = dc.rotated(&random_unitary(&mut g, 2)).unwrap();
        let (x1, x2) = (dc.coords_curve(&states).unwrap(), rot.coords_curve(&states).unwrap());
        assert!((symplectic_area(&x1).unwrap() - symplectic_area(&x2).unwrap()).abs() < 1e-10);
        assert!((x1.fs_length().unwrap() - x2.fs_length().unwrap()).abs() < 1e-10);
        let _ = c;
    }

    #[test]
    fn pullback_examples() {
        let w = pullback_two_form(&CoherentChart::default(), &[0.2, -0.4]).unwrap();
        assert!((w[(0, 1)] - 0.5).abs() < 1e-14 && (w[(1, 0)] + 0.5).abs() < 1e-14);
        let w = pullback_two_form(&GaussianChart::default(), &[0.3, 2.0]).unwrap();
        assert!((w[(0, 1)] - 1.0 / 32.0).abs() < 1e-14);
        let rs = RealSphereChart::new(4).unwrap();
        let samples = vec![vec![0.3, 1.0, 2.0], vec![1.2, 0.4, -1.0]];
        let rep = isotropy_report(&rs, &samples).unwrap();
        assert!(rep.isotropic && rep.max_entry == 0.0);
        let sph = TwoModeSphereChart::default();
        let rep = isotropy_report(&sph, &[vec![0.7, 0.1]]).unwrap();
        assert!(!rep.isotropic && (rep.max_entry - 0.7f64.sin() * 0.7f64.cos()).abs() < 1e-12);
        assert!(!isotropy_report(&GaussianChart::default(), &[vec![0.0, 1.0]]).unwrap().isotropic);
        for xi in [[0.2, 0.9], [-1.0, 2.0]] {
            assert!(pullback_projection_gap(&GaussianChart::default(), &xi).unwrap() < 1e-14);
        }
        assert_eq!(closedness_defect(&rs, &[0.3, 1.0, 2.0], 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let mut g = rng(5);
        let dc = DarbouxChart::new(random_state(&mut g, 3)).unwrap();
        let back =
            DarbouxChart::from_json(&serde_json::from_str(&serde_json::to_string(&dc.to_json()).unwrap()).unwrap());
        let back = back.unwrap();
        let states = std::iter::once(back.base()).chain(back.basis()).zip(std::iter::once(dc.base()).chain(dc.basis()));
        for (a, b) in states {
            assert!(a.amplitudes().iter().zip(b.amplitudes()).all(|(x, y)| (x - y).norm() < 1e-15));
        }
    }
}
