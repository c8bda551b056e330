//! Seeded random states, unitaries and smooth curves for tests and benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curve::{uniform_grid, SampledCurve};
use crate::error::Result;
use crate::state::{tangent_from_derivative, StateVector};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unitarily invariant random unit vector.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(s) = StateVector::new(amps) {
            return s;
        }
    }
}

/// Random state whose overlap with `a` has modulus at least `min_overlap`.
pub fn random_state_near<R: Rng>(rng: &mut R, a: &StateVector, min_overlap: f64) -> StateVector {
    loop {
        let b = random_state(rng, a.dim());
        if crate::state::inner_product(a, &b).map(|z| z.norm() >= min_overlap).unwrap_or(false) {
            return b;
        }
    }
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_complex(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Samples `ψ = φ/‖φ‖` with exact tangents from `φ(s)` and `φ̇(s)`.
fn normalized_curve<F>(grid: &[f64], f: F) -> Result<SampledCurve<StateVector>>
where
    F: Fn(f64) -> (Vec<Complex64>, Vec<Complex64>),
{
    SampledCurve::sample(grid, |s| {
        let (phi, dphi) = f(s);
        let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let radial: f64 = phi.iter().zip(&dphi).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / (norm * norm);
        let psi = StateVector::from_unit(phi.iter().map(|z| z / norm).collect())?;
        let dpsi: Vec<Complex64> = phi.iter().zip(&dphi).map(|(a, b)| (b - a * radial) / norm).collect();
        Ok((psi.clone(), tangent_from_derivative(&psi, &dpsi)))
    })
}

/// `ψ(s) = φ(s)/‖φ(s)‖` with `φ(s) = v₀ + s v₁ + s² v₂` random, on `[0, 1]`,
/// sampled with exact tangents.
pub fn random_smooth_curve<R: Rng>(rng: &mut R, dim: usize, nodes: usize) -> Result<SampledCurve<StateVector>> {
    let v: Vec<Vec<Complex64>> = (0..3)
        .map(|k| {
            let scale = [1.0, 0.8, 0.5][k];
            (0..dim).map(|_| gaussian_complex(rng) * scale).collect()
        })
        .collect();
    normalized_curve(&uniform_grid(0.0, 1.0, nodes), |s| {
        let phi = (0..dim).map(|i| v[0][i] + v[1][i] * s + v[2][i] * s * s).collect();
        let dphi = (0..dim).map(|i| v[1][i] + v[2][i] * (2.0 * s)).collect();
        (phi, dphi)
    })
}

/// A smooth curve on `[0, 1]` from exactly `a` to exactly `b`:
/// `φ(s) = (1 − s)a + s b + s(1 − s) w` with random `w` of norm about `bump`.
pub fn random_arc<R: Rng>(
    rng: &mut R,
    a: &StateVector,
    b: &StateVector,
    bump: f64,
    nodes: usize,
) -> Result<SampledCurve<StateVector>> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(crate::error::Error::DimensionMismatch(dim, b.dim()));
    }
    let scale = bump / (dim as f64 * 2.0).sqrt();
    let w: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng) * scale).collect();
    let (a, b) = (a.amplitudes().to_vec(), b.amplitudes().to_vec());
    normalized_curve(&uniform_grid(0.0, 1.0, nodes), |s| {
        let phi = (0..dim).map(|i| a[i] * (1.0 - s) + b[i] * s + w[i] * (s * (1.0 - s))).collect();
        let dphi = (0..dim).map(|i| b[i] - a[i] + w[i] * (1.0 - 2.0 * s)).collect();
        (phi, dphi)
    })
}
