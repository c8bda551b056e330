//! Finite-dimensional pure states, rays and Pancharatnam phase relations.
//!
//! Everything downstream is written against the [`PureState`] trait, which
//! only asks for an inner product and a global rephasing. [`StateVector`] is
//! the explicit finite-dimensional implementation; chart points with analytic
//! overlaps live in [`crate::charts`].

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this modulus an inner product carries no usable phase.
pub const ORTHOGONALITY_THRESHOLD: f64 = 1e-10;

/// Tolerance on the Euclidean norm of a stored state.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Maps an angle onto the principal branch (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// First-order data of a curve at one node: `(ψ, ψ̇)` and `‖ψ̇‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentSample {
    pub connection: Complex64,
    pub speed_sq: f64,
}

impl TangentSample {
    pub fn zero() -> Self {
        TangentSample { connection: Complex64::new(0.0, 0.0), speed_sq: 0.0 }
    }

    /// Fubini–Study speed squared, `‖ψ̇‖² − |(ψ,ψ̇)|²`, clamped at zero.
    pub fn transverse_sq(&self) -> f64 {
        (self.speed_sq - self.connection.norm_sqr()).max(0.0)
    }

    /// Tangent data of `e^{iα(s)}ψ(s)` given `α̇`.
    pub fn with_gauge_rate(&self, alpha_dot: f64) -> Self {
        TangentSample {
            connection: self.connection + Complex64::new(0.0, alpha_dot),
            speed_sq: self.speed_sq + alpha_dot * alpha_dot + 2.0 * alpha_dot * self.connection.im,
        }
    }
}

/// A unit vector, or anything that behaves like one as far as overlaps go.
pub trait PureState: Clone + Send + Sync + fmt::Debug {
    /// The inner product `(self, other)`, conjugate-linear in `self`.
    fn overlap(&self, other: &Self) -> Result<Complex64>;

    /// `e^{iθ}·self`.
    fn rephased(&self, theta: f64) -> Self;

    /// Tangent data for the finite-difference derivative `v = Σ wⱼψⱼ` taken at `self`.
    ///
    /// The default expands `‖v‖²` in overlaps, which loses about `ε/h²` to
    /// cancellation; vector-backed states override it with direct arithmetic.
    fn stencil_tangent(&self, stencil: &[(&Self, f64)]) -> Result<TangentSample> {
        let mut connection = Complex64::new(0.0, 0.0);
        let mut speed_sq = 0.0;
        for (j, (pj, wj)) in stencil.iter().enumerate() {
            connection += self.overlap(pj)? * *wj;
            speed_sq += wj * wj;
            for (pl, wl) in &stencil[j + 1..] {
                speed_sq += 2.0 * wj * wl * pj.overlap(pl)?.re;
            }
        }
        Ok(TangentSample { connection, speed_sq })
    }
}

/// Normalized complex amplitudes, `dim ≥ 2`.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector").field("dim", &self.dim()).field("amps", &self.amps).finish()
    }
}

impl StateVector {
    /// Normalizes `amps` and returns the state.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::normalize(amps).map(|(s, _)| s)
    }

    /// Normalizes `amps`, also returning the factor `1/‖amps‖` that was applied.
    pub fn normalize(mut amps: Vec<Complex64>) -> Result<(Self, f64)> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let factor = 1.0 / norm;
        for a in &mut amps {
            *a *= factor;
        }
        Ok((StateVector { amps }, factor))
    }

    /// Wraps amplitudes that are already normalized to within [`NORM_TOLERANCE`].
    pub fn from_unit(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::DimensionTooSmall(amps.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { amps })
    }

    /// Real amplitudes, normalized.
    pub fn from_real(re: &[f64]) -> Result<Self> {
        Self::new(re.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `e_k` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidInput(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::from_unit(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reads the `{"dim": n, "re": [...], "im": [...]}` format. Returns the
    /// state together with the normalization factor applied to the raw data.
    pub fn from_json(value: &serde_json::Value) -> Result<(Self, f64)> {
        let raw: StateJson = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        raw.into_state()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StateJson::from(self)).expect("state serializes")
    }
}

impl PureState for StateVector {
    fn overlap(&self, other: &Self) -> Result<Complex64> {
        inner_product(self, other)
    }

    fn rephased(&self, theta: f64) -> Self {
        let w = Complex64::from_polar(1.0, theta);
        StateVector { amps: self.amps.iter().map(|a| a * w).collect() }
    }

    fn stencil_tangent(&self, stencil: &[(&Self, f64)]) -> Result<TangentSample> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (p, w) in stencil {
            if p.dim() != self.dim() {
                return Err(Error::DimensionMismatch(self.dim(), p.dim()));
            }
            for (acc, a) in v.iter_mut().zip(&p.amps) {
                *acc += a * *w;
            }
        }
        Ok(tangent_from_derivative(self, &v))
    }
}

/// Tangent data from an explicit derivative vector `ψ̇`.
pub fn tangent_from_derivative(psi: &StateVector, dpsi: &[Complex64]) -> TangentSample {
    let connection = psi.amps.iter().zip(dpsi).map(|(a, d)| a.conj() * d).sum();
    let speed_sq = dpsi.iter().map(|d| d.norm_sqr()).sum();
    TangentSample { connection, speed_sq }
}

/// Wire format for a single state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl StateJson {
    pub fn into_state(self) -> Result<(StateVector, f64)> {
        if self.re.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, self.re.len()));
        }
        if self.im.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, self.im.len()));
        }
        let amps = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        StateVector::normalize(amps)
    }
}

impl From<&StateVector> for StateJson {
    fn from(s: &StateVector) -> Self {
        StateJson { dim: s.dim(), re: s.amps.iter().map(|a| a.re).collect(), im: s.amps.iter().map(|a| a.im).collect() }
    }
}

/// `(a, b) = Σ conj(aᵢ)·bᵢ`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Rank-one projector `ρ = ψψ†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    projector: DMatrix<Complex64>,
}

impl Ray {
    pub fn projector(&self) -> &DMatrix<Complex64> {
        &self.projector
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.projector.trace()
    }

    /// Largest deviation from Hermiticity, idempotency and unit trace.
    pub fn invariant_residuals(&self) -> (f64, f64, f64) {
        let p = &self.projector;
        let herm = (p - p.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tr = (p.trace() - Complex64::new(1.0, 0.0)).norm();
        (herm, idem, tr)
    }

    /// Ray distance `1 − Tr(ρρ′)`.
    pub fn distance(&self, other: &Ray) -> Result<f64> {
        Ok(1.0 - trace_product(&[self.clone(), other.clone()])?.re)
    }
}

/// `ψψ†`; phase invariant by construction.
pub fn project_to_ray(a: &StateVector) -> Ray {
    let v = nalgebra::DVector::from_column_slice(a.amplitudes());
    Ray { projector: &v * v.adjoint() }
}

/// `Tr(ρ₁ρ₂⋯ρₙ)` by explicit matrix products.
pub fn trace_product(rays: &[Ray]) -> Result<Complex64> {
    let first = rays.first().ok_or_else(|| Error::InvalidInput("empty ray list".into()))?;
    let dim = first.dim();
    let mut acc = first.projector.clone();
    for r in &rays[1..] {
        if r.dim() != dim {
            return Err(Error::DimensionMismatch(dim, r.dim()));
        }
        acc *= &r.projector;
    }
    Ok(acc.trace())
}

/// Ray distance `1 − |(a,b)|²` for any pure states.
pub fn ray_distance<P: PureState>(a: &P, b: &P) -> Result<f64> {
    Ok(1.0 - a.overlap(b)?.norm_sqr())
}

/// `arg(a,b)` on (−π, π]; errors when the pair is (numerically) orthogonal.
pub fn pancharatnam_phase<P: PureState>(a: &P, b: &P) -> Result<f64> {
    let z = a.overlap(b)?;
    phase_of(z, "pancharatnam_phase")
}

pub(crate) fn phase_of(z: Complex64, context: &str) -> Result<f64> {
    if z.norm() <= ORTHOGONALITY_THRESHOLD {
        return Err(Error::UndefinedPhase { modulus: z.norm(), context: context.to_string() });
    }
    Ok(wrap_phase(z.arg()))
}

/// True iff `(a,b)` is real positive: `|arg(a,b)| < tol`.
pub fn in_phase<P: PureState>(a: &P, b: &P, tol: f64) -> Result<bool> {
    Ok(pancharatnam_phase(a, b)?.abs() < tol)
}
