//! Null-phase certification, free geodesics and open-to-closed reduction.
//!
//! A curve is null phase when every connected portion has zero geometric
//! phase. Two numerical certificates are offered: additive separability of
//! `arg(ψ(s), ψ(s′))`, checked through its mixed second difference, and
//! reality and nonnegativity of every three-point trace product.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bargmann::Connector;
use crate::curve::{uniform_grid, SampledCurve};
use crate::error::{Error, Result};
use crate::sampling;
use crate::state::{inner_product, PureState, StateVector, TangentSample, ORTHOGONALITY_THRESHOLD};

/// Pairs with smaller overlap modulus are left out of the mixed differences.
pub const EXCLUSION_THRESHOLD: f64 = 1e-6;

/// Largest node count used by [`separability_test`]; longer curves are subsampled.
pub const SEPARABILITY_MAX_NODES: usize = 257;

/// Default tolerance on imaginary parts of three-point products.
pub const DEFAULT_TOL_IM: f64 = 1e-9;

/// `ψ(s) = φ₁ cos s + φ₂ sin s` on `[0, arccos|(a,b)|]`, with `φ₁ = a` and
/// `b` rephased so that `(a, b′)` is real positive.
pub fn free_geodesic(a: &StateVector, b: &StateVector, nodes: usize) -> Result<SampledCurve<StateVector>> {
    if nodes < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: nodes });
    }
    let ov = inner_product(a, b)?;
    if ov.norm() <= ORTHOGONALITY_THRESHOLD {
        return Err(Error::UndefinedPhase { modulus: ov.norm(), context: "free_geodesic".into() });
    }
    let b = b.rephased(-ov.arg());
    let m = ov.norm();
    let r: Vec<Complex64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| y - x * m).collect();
    let rn = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if rn < 1e-12 {
        let zero = TangentSample::zero();
        return SampledCurve::with_tangents(uniform_grid(0.0, 1.0, nodes), vec![a.clone(); nodes], vec![zero; nodes]);
    }
    let phi2: Vec<Complex64> = r.iter().map(|z| z / rn).collect();
    let s_end = rn.atan2(m);
    let phi1 = a.amplitudes().to_vec();
    SampledCurve::sample(&uniform_grid(0.0, s_end, nodes), |s| {
        let (c, sn) = (s.cos(), s.sin());
        let psi: Vec<Complex64> = phi1.iter().zip(&phi2).map(|(x, y)| x * c + y * sn).collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi = StateVector::from_unit(psi.iter().map(|z| z / norm).collect())?;
        let dpsi: Vec<Complex64> = phi1.iter().zip(&phi2).map(|(x, y)| -x * sn + y * c).collect();
        Ok((psi.clone(), crate::state::tangent_from_derivative(&psi, &dpsi)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

/// Where a test found its worst violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub test: String,
    /// Curve parameters of the two or three nodes involved.
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullPhaseReport {
    pub mixed_partial_max: Option<f64>,
    pub tol_sep: Option<f64>,
    pub triple_max_imag: Option<f64>,
    pub triple_min_real: Option<f64>,
    pub tol_im: Option<f64>,
    pub triples_evaluated: usize,
    pub excluded_rows: Vec<usize>,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl NullPhaseReport {
    fn empty(verdict: Verdict) -> Self {
        NullPhaseReport {
            mixed_partial_max: None,
            tol_sep: None,
            triple_max_imag: None,
            triple_min_real: None,
            tol_im: None,
            triples_evaluated: 0,
            excluded_rows: vec![],
            verdict,
            witness: None,
        }
    }

    /// Combines partial reports; the verdict passes only if both do.
    pub fn merge(self, other: NullPhaseReport) -> NullPhaseReport {
        let witness = match (&self.witness, &other.witness) {
            (Some(_), _) if !self.verdict.passed() => self.witness.clone(),
            (_, Some(_)) if !other.verdict.passed() => other.witness.clone(),
            (a, b) => a.clone().or(b.clone()),
        };
        let mut excluded = self.excluded_rows.clone();
        excluded.extend(other.excluded_rows.iter().copied().filter(|r| !self.excluded_rows.contains(r)));
        NullPhaseReport {
            mixed_partial_max: self.mixed_partial_max.or(other.mixed_partial_max),
            tol_sep: self.tol_sep.or(other.tol_sep),
            triple_max_imag: self.triple_max_imag.or(other.triple_max_imag),
            triple_min_real: self.triple_min_real.or(other.triple_min_real),
            tol_im: self.tol_im.or(other.tol_im),
            triples_evaluated: self.triples_evaluated + other.triples_evaluated,
            excluded_rows: excluded,
            verdict: Verdict::from_bool(self.verdict.passed() && other.verdict.passed()),
            witness,
        }
    }
}

/// Indices of at most `max` nodes, evenly strided and always including the last.
fn subsample(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let stride = (n - 1).div_ceil(max - 1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    idx
}

/// Default separability tolerance for a grid: the floating-point noise of
/// the mixed second difference, floored at `1e-8`.
pub fn default_tol_sep(max_abs_arg: f64, min_step: f64) -> f64 {
    (1e3 * f64::EPSILON * (1.0 + max_abs_arg) / (min_step * min_step)).max(1e-8)
}

/// Max of the mixed second difference of `arg(ψ(s), ψ(s′))` over the grid.
pub fn separability_test<P: PureState>(c: &SampledCurve<P>, tol: Option<f64>) -> Result<NullPhaseReport> {
    let idx = subsample(c.len(), SEPARABILITY_MAX_NODES);
    let m = idx.len();
    let s: Vec<f64> = idx.iter().map(|&k| c.params()[k]).collect();
    let states: Vec<&P> = idx.iter().map(|&k| &c.states()[k]).collect();
    let rows: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| states[i].overlap(states[j])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut excluded_rows = vec![];
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if z.norm() <= ORTHOGONALITY_THRESHOLD {
                return Err(Error::OrthogonalPair(idx[i], idx[j]));
            }
        }
        if row.iter().any(|z| z.norm() < EXCLUSION_THRESHOLD) {
            excluded_rows.push(idx[i]);
        }
    }
    // Unwrap column 0 down the rows, then each row from its column-0 value.
    let mut f = vec![vec![0.0; m]; m];
    let mut prev = 0.0;
    for i in 0..m {
        prev = unwrap_near(rows[i][0].arg(), prev);
        f[i][0] = prev;
        for j in 1..m {
            f[i][j] = unwrap_near(rows[i][j].arg(), f[i][j - 1]);
        }
    }
    let good = |i: usize, j: usize| rows[i][j].norm() >= EXCLUSION_THRESHOLD;
    let mut max_abs_arg: f64 = 0.0;
    for row in &f {
        for x in row {
            max_abs_arg = max_abs_arg.max(x.abs());
        }
    }
    let mut best = (0.0, 0, 0);
    for i in 1..m.saturating_sub(1) {
        for j in 1..m - 1 {
            if !(good(i + 1, j + 1) && good(i + 1, j - 1) && good(i - 1, j + 1) && good(i - 1, j - 1)) {
                continue;
            }
            let num = f[i + 1][j + 1] - f[i + 1][j - 1] - f[i - 1][j + 1] + f[i - 1][j - 1];
            let d = (num / ((s[i + 1] - s[i - 1]) * (s[j + 1] - s[j - 1]))).abs();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let min_step = s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let tol = tol.unwrap_or_else(|| default_tol_sep(max_abs_arg, min_step));
    let verdict = Verdict::from_bool(best.0 < tol);
    let mut report = NullPhaseReport::empty(verdict);
    report.mixed_partial_max = Some(best.0);
    report.tol_sep = Some(tol);
    report.excluded_rows = excluded_rows;
    if m >= 3 {
        report.witness =
            Some(Witness { test: "separability".into(), params: vec![s[best.1], s[best.2]], value: best.0 });
    }
    Ok(report)
}

fn unwrap_near(x: f64, reference: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    x + tau * ((reference - x) / tau).round()
}

/// Which triples of nodes to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleSampling {
    /// Up to this many nodes every triple is evaluated.
    pub exhaustive_limit: usize,
    /// Random triples drawn beyond the limit.
    pub random_triples: usize,
    pub seed: u64,
    pub tol_im: f64,
}

impl Default for TripleSampling {
    fn default() -> Self {
        TripleSampling {
            exhaustive_limit: 40,
            random_triples: 10_000,
            seed: sampling::DEFAULT_SEED,
            tol_im: DEFAULT_TOL_IM,
        }
    }
}

/// Statistics of `Tr(ρ(s)ρ(s′)ρ(s″))` over sampled node triples.
pub fn bargmann_reality_test<P: PureState>(c: &SampledCurve<P>, spec: &TripleSampling) -> Result<NullPhaseReport> {
    let m = c.len();
    let triples: Vec<[usize; 3]> = if m <= spec.exhaustive_limit {
        let mut t = vec![];
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    t.push([i, j, k]);
                }
            }
        }
        t
    } else {
        let mut rng = sampling::rng(spec.seed);
        (0..spec.random_triples)
            .map(|_| [rng.random_range(0..m), rng.random_range(0..m), rng.random_range(0..m)])
            .collect()
    };
    let st = c.states();
    let values: Vec<Complex64> = triples
        .par_iter()
        .map(|&[i, j, k]| Ok(st[i].overlap(&st[j])? * st[j].overlap(&st[k])? * st[k].overlap(&st[i])?))
        .collect::<Result<_>>()?;
    let mut max_imag = (0.0, 0usize);
    let mut min_real = (f64::INFINITY, 0usize);
    for (n, v) in values.iter().enumerate() {
        if v.im.abs() > max_imag.0 {
            max_imag = (v.im.abs(), n);
        }
        if v.re < min_real.0 {
            min_real = (v.re, n);
        }
    }
    let min_real_value = if values.is_empty() { 1.0 } else { min_real.0 };
    let ok = max_imag.0 < spec.tol_im && min_real_value > -spec.tol_im;
    let mut report = NullPhaseReport::empty(Verdict::from_bool(ok));
    report.triple_max_imag = Some(max_imag.0);
    report.triple_min_real = Some(min_real_value);
    report.tol_im = Some(spec.tol_im);
    report.triples_evaluated = values.len();
    if !values.is_empty() {
        let (which, value) = if max_imag.0 >= spec.tol_im || min_real_value > -spec.tol_im {
            (max_imag.1, max_imag.0)
        } else {
            (min_real.1, min_real.0)
        };
        let p = c.params();
        let t = triples[which];
        report.witness =
            Some(Witness { test: "bargmann-reality".into(), params: vec![p[t[0]], p[t[1]], p[t[2]]], value });
    }
    Ok(report)
}

/// Both certificates, merged.
pub fn null_phase_check<P: PureState>(
    c: &SampledCurve<P>,
    tol_sep: Option<f64>,
    spec: &TripleSampling,
) -> Result<NullPhaseReport> {
    Ok(separability_test(c, tol_sep)?.merge(bargmann_reality_test(c, spec)?))
}

#[derive(Debug, Clone)]
pub struct Reduction<P> {
    pub closed: SampledCurve<P>,
    pub phi_open: f64,
    pub phi_closed: f64,
}

/// Closes an open curve with a null-phase return curve from its end to its start.
pub fn open_to_closed_reduction<P, C>(c_open: &SampledCurve<P>, connector: &C, nodes: usize) -> Result<Reduction<P>>
where
    P: PureState,
    C: Connector<P> + ?Sized,
{
    let phi_open = c_open.geometric_phase()?;
    if c_open.is_closed()? {
        return Ok(Reduction { closed: c_open.clone(), phi_open, phi_closed: phi_open });
    }
    let back = connector.connect(c_open.end(), c_open.start(), nodes)?;
    let closed = SampledCurve::concat(&[c_open.clone(), back])?;
    let phi_closed = closed.geometric_phase()?;
    Ok(Reduction { closed, phi_open, phi_closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::FreeGeodesicConnector;
    use crate::charts::{chart_curve, CoherentChart, PathSpec, TwoModeSphereChart};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_geodesic_examples() {
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap().rephased(0.3);
        assert!(free_geodesic(&e0, &e1, 11).is_err());
        let b = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let g = free_geodesic(&e0, &b, 101).unwrap();
        assert!((g.params()[100] - FRAC_PI_4).abs() < 1e-15);
        let mid = &g.states()[50];
        assert!((mid.amplitudes()[0] - c((PI / 8.0).cos(), 0.0)).norm() < 1e-15);
        assert!((mid.amplitudes()[1] - c((PI / 8.0).sin(), 0.0)).norm() < 1e-15);
        let same = free_geodesic(&b, &b.rephased(1.0), 5).unwrap();
        assert_eq!(same.curve_length().unwrap(), 0.0);
        assert!((g.curve_length().unwrap() - FRAC_PI_4).abs() < 1e-14);
    }

    #[test]
    fn free_geodesics_pass_both_tests_and_have_no_phase() {
        let mut rng = sampling::rng(5);
        for _ in 0..5 {
            let a = sampling::random_state(&mut rng, 4);
            let b = sampling::random_state_near(&mut rng, &a, 0.2);
            let g = free_geodesic(&a, &b, 201).unwrap();
            assert!(g.geometric_phase().unwrap().abs() < 1e-12);
            let r = null_phase_check(&g, None, &TripleSampling::default()).unwrap();
            assert!(r.verdict.passed(), "{r:?}");
            assert!(r.triple_max_imag.unwrap() < 1e-10 && r.triple_min_real.unwrap() > -1e-10);
        }
    }

    #[test]
    fn coherent_line_passes_and_circle_fails() {
        let chart = Arc::new(CoherentChart::default());
        let line = PathSpec::Line { from: vec![0.2, -0.4], to: vec![1.5, 0.9] };
        let curve = chart_curve(&chart, &line, &uniform_grid(0.0, 1.0, 201)).unwrap();
        let r = separability_test(&curve, None).unwrap();
        assert!(r.verdict.passed() && r.mixed_partial_max.unwrap() < 1e-7, "{r:?}");
        // z(s) = e^{is}: ξ = √2 (cos s, sin s).
        let s2 = std::f64::consts::SQRT_2;
        let circle = move |s: f64| (vec![s2 * s.cos(), s2 * s.sin()], vec![-s2 * s.sin(), s2 * s.cos()]);
        // arg(ψ(s), ψ(s′)) = sin(s′ − s), whose mixed partial reaches 1 on a full turn.
        let curve = chart_curve(&chart, &circle, &uniform_grid(0.0, 2.0 * PI, 401)).unwrap();
        let r = separability_test(&curve, None).unwrap();
        assert!(!r.verdict.passed());
        assert!((r.mixed_partial_max.unwrap() - 1.0).abs() < 1e-3, "{r:?}");
        assert!(!bargmann_reality_test(&curve, &TripleSampling::default()).unwrap().verdict.passed());
    }

    #[test]
    fn tilted_great_circle_fails_with_half_wedge() {
        // Great circle through â = x̂ and b̂ = (0, ½, √3/2): (â∧b̂)₃ = ½.
        let chart = Arc::new(TwoModeSphereChart::default());
        let (a, b) = ([1.0, 0.0, 0.0], [0.0, 0.5, 3f64.sqrt() / 2.0]);
        let path = PathSpec::SphereCircle { center: [0.0; 3], u: a, v: b, from: 0.0, to: FRAC_PI_2 };
        let curve = chart_curve(&chart, &path, &uniform_grid(0.0, 1.0, 201)).unwrap();
        let r = separability_test(&curve, None).unwrap();
        // In terms of the arc angle t = (π/2)s the mixed partial is ½ cos(t′ − t).
        let scale = FRAC_PI_2 * FRAC_PI_2;
        assert!((r.mixed_partial_max.unwrap() / scale - 0.5).abs() < 1e-3, "{r:?}");
        assert!(!r.verdict.passed());
    }

    #[test]
    fn latitude_witness_on_the_bloch_sphere() {
        // θ = π/3 latitude: not a great circle, so not null phase.
        let theta = PI / 3.0;
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let curve = SampledCurve::sample_states(&uniform_grid(0.0, 1.5, 31), |s| {
            StateVector::from_unit(vec![c(ct, 0.0), Complex64::from_polar(st, s)])
        })
        .unwrap();
        let r = bargmann_reality_test(&curve, &TripleSampling::default()).unwrap();
        assert!(!r.verdict.passed() && r.witness.as_ref().unwrap().value > 1e-3);
        assert!(!separability_test(&curve, None).unwrap().verdict.passed());
        // The equator is a great circle and passes.
        let eq = SampledCurve::sample_states(&uniform_grid(0.0, 1.5, 31), |s| {
            StateVector::from_unit(vec![c(FRAC_1_SQRT_2, 0.0), Complex64::from_polar(FRAC_1_SQRT_2, s)])
        })
        .unwrap();
        assert!(null_phase_check(&eq, None, &TripleSampling::default()).unwrap().verdict.passed());
    }

    #[test]
    fn open_to_closed_examples() {
        let mut rng = sampling::rng(11);
        let a = sampling::random_state(&mut rng, 3);
        let b = sampling::random_state_near(&mut rng, &a, 0.3);
        let g = free_geodesic(&a, &b, 101).unwrap();
        let red = open_to_closed_reduction(&g, &FreeGeodesicConnector, 101).unwrap();
        assert!(red.phi_closed.abs() < 1e-8);
        // Quarter latitude on the equatorial great circle θ = π/2 versus a genuine latitude.
        let theta = PI / 3.0;
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let open = SampledCurve::sample(&uniform_grid(0.0, FRAC_PI_2, 1001), |s| {
            let psi = StateVector::from_unit(vec![c(ct, 0.0), Complex64::from_polar(st, s)])?;
            let d = vec![c(0.0, 0.0), Complex64::from_polar(st, s) * Complex64::i()];
            Ok((psi.clone(), crate::state::tangent_from_derivative(&psi, &d)))
        })
        .unwrap();
        let red = open_to_closed_reduction(&open, &FreeGeodesicConnector, 1001).unwrap();
        assert!((red.phi_open - red.phi_closed).abs() < 1e-6);
        let loop_ = red.closed.clone();
        let again = open_to_closed_reduction(&loop_, &FreeGeodesicConnector, 11).unwrap();
        assert_eq!(again.phi_open, again.phi_closed);
        assert_eq!(again.closed.len(), loop_.len());
    }

    #[test]
    fn subsample_keeps_ends() {
        assert_eq!(subsample(5, 257), vec![0, 1, 2, 3, 4]);
        let idx = subsample(1001, 257);
        assert!(idx.len() <= 257 && idx[0] == 0 && *idx.last().unwrap() == 1000);
    }
}
