//! Paths `s ↦ ξ(s)` in chart coordinates and the catalogued null-phase connectors.

use serde::{Deserialize, Serialize};

use super::ChartId;
use crate::error::{Error, Result};

/// A parametrized path in chart coordinates, returning `(ξ(s), ξ̇(s))`.
pub trait Path: Send + Sync {
    fn eval(&self, s: f64) -> (Vec<f64>, Vec<f64>);

    /// Samples the path on a grid; paths with coordinate branches keep them continuous.
    fn sample(&self, grid: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        grid.iter().map(|&s| self.eval(s)).collect()
    }
}

impl<F> Path for F
where
    F: Fn(f64) -> (Vec<f64>, Vec<f64>) + Send + Sync,
{
    fn eval(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        self(s)
    }
}

/// Serializable paths, all parametrized by `s ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum PathSpec {
    /// `ξ = from + s·(to − from)`.
    Line { from: Vec<f64>, to: Vec<f64> },
    /// `ξ = (c + R cos t, R sin t)` with `t` running linearly from `from_angle` to `to_angle`.
    Semicircle { center: f64, radius: f64, from_angle: f64, to_angle: f64 },
    /// Sphere-chart circle `n̂ = center + cos t·u + sin t·v`, `t` linear from `from` to `to`.
    SphereCircle { center: [f64; 3], u: [f64; 3], v: [f64; 3], from: f64, to: f64 },
    /// A single point.
    Constant { at: Vec<f64> },
}

impl PathSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PathSpec::Line { .. } => "line",
            PathSpec::Semicircle { .. } => "semicircle",
            PathSpec::SphereCircle { .. } => "sphere-circle",
            PathSpec::Constant { .. } => "constant",
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PathSpec::Constant { .. })
    }

    fn sample_continuous(&self, grid: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        match self {
            PathSpec::SphereCircle { .. } => {
                let mut prev: Option<Vec<f64>> = None;
                grid.iter()
                    .map(|&s| {
                        let (xi, dxi) = self.sphere_eval(s, prev.as_deref());
                        prev = Some(xi.clone());
                        (xi, dxi)
                    })
                    .collect()
            }
            _ => grid.iter().map(|&s| self.eval(s)).collect(),
        }
    }

    fn sphere_eval(&self, s: f64, prev: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        let PathSpec::SphereCircle { center, u, v, from, to } = self else { unreachable!() };
        let t = from + s * (to - from);
        let rate = to - from;
        let n: Vec<f64> = (0..3).map(|k| center[k] + t.cos() * u[k] + t.sin() * v[k]).collect();
        let dn: Vec<f64> = (0..3).map(|k| rate * (-t.sin() * u[k] + t.cos() * v[k])).collect();
        let rho = n[0].hypot(n[1]);
        let mut theta = rho.atan2(n[2]);
        let mut phi = if rho < 1e-12 { prev.map(|p| p[1]).unwrap_or(0.0) } else { n[1].atan2(n[0]) };
        if let Some(p) = prev {
            // Pick among (θ, φ + 2πk) and (−θ, φ + π + 2πk) the one closest to the previous point.
            let tau = 2.0 * std::f64::consts::PI;
            let near = |x: f64| x + tau * ((p[1] - x) / tau).round();
            let a = (theta, near(phi));
            let b = (-theta, near(phi + std::f64::consts::PI));
            let d = |c: (f64, f64)| (c.0 - p[0]).powi(2) + (c.1 - p[1]).powi(2);
            (theta, phi) = if d(a) <= d(b) { a } else { b };
        }
        let e_theta = [theta.cos() * phi.cos(), theta.cos() * phi.sin(), -theta.sin()];
        let e_phi = [-phi.sin(), phi.cos(), 0.0];
        let theta_dot: f64 = (0..3).map(|k| dn[k] * e_theta[k]).sum();
        let st = theta.sin();
        let phi_dot = if st.abs() < 1e-12 { 0.0 } else { (0..3).map(|k| dn[k] * e_phi[k]).sum::<f64>() / st };
        (vec![theta, phi], vec![theta_dot, phi_dot])
    }

    /// Checks that a sphere circle lies on the unit sphere.
    pub fn validate(&self) -> Result<()> {
        match self {
            PathSpec::Line { from, to } if from.len() != to.len() => {
                Err(Error::DimensionMismatch(from.len(), to.len()))
            }
            PathSpec::Semicircle { radius, .. } if *radius <= 0.0 => {
                Err(Error::InvalidInput(format!("semicircle radius {radius} must be positive")))
            }
            PathSpec::SphereCircle { center, u, v, .. } => {
                let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                let r2 = dot(u, u);
                let ok = (r2 - dot(v, v)).abs() < 1e-12
                    && dot(u, v).abs() < 1e-12
                    && dot(center, u).abs() < 1e-12
                    && dot(center, v).abs() < 1e-12
                    && (dot(center, center) + r2 - 1.0).abs() < 1e-12;
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidInput("sphere circle does not lie on the unit sphere".into()))
                }
            }
            _ => Ok(()),
        }
    }
}

impl Path for PathSpec {
    fn eval(&self, s: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            PathSpec::Line { from, to } => {
                let xi = from.iter().zip(to).map(|(a, b)| a + s * (b - a)).collect();
                let d = from.iter().zip(to).map(|(a, b)| b - a).collect();
                (xi, d)
            }
            PathSpec::Semicircle { center, radius, from_angle, to_angle } => {
                let rate = to_angle - from_angle;
                let t = from_angle + s * rate;
                (
                    vec![center + radius * t.cos(), radius * t.sin()],
                    vec![-radius * rate * t.sin(), radius * rate * t.cos()],
                )
            }
            PathSpec::SphereCircle { .. } => self.sphere_eval(s, None),
            PathSpec::Constant { at } => (at.clone(), vec![0.0; at.len()]),
        }
    }

    fn sample(&self, grid: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.sample_continuous(grid)
    }
}

/// The chart's catalogued null-phase curve between two points.
pub fn null_phase_family(chart: ChartId, a: &[f64], b: &[f64]) -> Result<PathSpec> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    if a.iter().zip(b).all(|(x, y)| x == y) {
        return Ok(PathSpec::Constant { at: a.to_vec() });
    }
    match chart {
        ChartId::Coherent | ChartId::Realsphere => Ok(PathSpec::Line { from: a.to_vec(), to: b.to_vec() }),
        ChartId::Gaussian => {
            if a[1] <= 0.0 || b[1] <= 0.0 {
                return Err(Error::DomainViolation("Gaussian endpoints need ξ₂ > 0".into()));
            }
            if a[0] == b[0] {
                return Ok(PathSpec::Line { from: a.to_vec(), to: b.to_vec() });
            }
            let c = (b[0] * b[0] + b[1] * b[1] - a[0] * a[0] - a[1] * a[1]) / (2.0 * (b[0] - a[0]));
            let radius = (a[0] - c).hypot(a[1]);
            Ok(PathSpec::Semicircle {
                center: c,
                radius,
                from_angle: a[1].atan2(a[0] - c),
                to_angle: b[1].atan2(b[0] - c),
            })
        }
        ChartId::Sphere2mode => sphere_latitude(a, b),
    }
}

/// Arc of the circle `d̂·n̂ = h` with `d̂` in the 1-2 plane through both endpoints.
fn sphere_latitude(a: &[f64], b: &[f64]) -> Result<PathSpec> {
    let na = super::sphere::unit_vector(a[0], a[1]);
    let nb = super::sphere::unit_vector(b[0], b[1]);
    let diff = [na[0] - nb[0], na[1] - nb[1], na[2] - nb[2]];
    if diff.iter().map(|x| x * x).sum::<f64>() < 1e-28 {
        return Ok(PathSpec::Constant { at: a.to_vec() });
    }
    // d̂ = ê₃ × (n̂_a − n̂_b), or any horizontal normal if the difference is vertical.
    let mut d = [-diff[1], diff[0], 0.0];
    let mut dn = d[0].hypot(d[1]);
    if dn < 1e-12 {
        d = [-na[1], na[0], 0.0];
        dn = d[0].hypot(d[1]);
        if dn < 1e-12 {
            return Err(Error::InvalidInput("antipodal poles: no unique latitude connector".into()));
        }
    }
    let d = [d[0] / dn, d[1] / dn, 0.0];
    let h = d[0] * na[0] + d[1] * na[1];
    let r = (1.0 - h * h).max(0.0).sqrt();
    let ea = [-d[1], d[0], 0.0];
    let eb = [0.0, 0.0, 1.0];
    let angle = |n: &[f64; 3]| {
        let p = [n[0] - h * d[0], n[1] - h * d[1], n[2]];
        let x = p[0] * ea[0] + p[1] * ea[1];
        let y = p[2] * eb[2];
        y.atan2(x)
    };
    let ta = angle(&na);
    let tb = ta + crate::state::wrap_phase(angle(&nb) - ta);
    let scale = |e: [f64; 3]| [r * e[0], r * e[1], r * e[2]];
    Ok(PathSpec::SphereCircle { center: [h * d[0], h * d[1], 0.0], u: scale(ea), v: scale(eb), from: ta, to: tb })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn gaussian_connectors() {
        let p = null_phase_family(ChartId::Gaussian, &[-1.0, 1.0], &[1.0, 1.0]).unwrap();
        let PathSpec::Semicircle { center, radius, from_angle, to_angle } = p else { panic!("{p:?}") };
        assert!(center.abs() < 1e-15 && (radius - 2f64.sqrt()).abs() < 1e-15);
        assert!((from_angle - 3.0 * PI / 4.0).abs() < 1e-15 && (to_angle - PI / 4.0).abs() < 1e-15);
        let p = null_phase_family(ChartId::Gaussian, &[0.0, 1.0], &[0.0, 3.0]).unwrap();
        assert_eq!(p, PathSpec::Line { from: vec![0.0, 1.0], to: vec![0.0, 3.0] });
    }

    #[test]
    fn sphere_connector_from_pole_to_equator_is_a_meridian() {
        let p = null_phase_family(ChartId::Sphere2mode, &[0.0, 0.0], &[FRAC_PI_2, 0.0]).unwrap();
        p.validate().unwrap();
        let PathSpec::SphereCircle { center, .. } = &p else { panic!() };
        assert!(center.iter().all(|x| x.abs() < 1e-15));
        for (xi, _) in p.sample(&crate::curve::uniform_grid(0.0, 1.0, 11)) {
            let n = super::super::sphere::unit_vector(xi[0], xi[1]);
            assert!(n[1].abs() < 1e-15);
        }
        let (start, _) = p.eval(0.0);
        let (end, _) = p.eval(1.0);
        let (ns, ne) =
            (super::super::sphere::unit_vector(start[0], start[1]), super::super::sphere::unit_vector(end[0], end[1]));
        assert!((ns[2] - 1.0).abs() < 1e-14 && (ne[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_connector_hits_both_endpoints() {
        let (a, b) = ([0.7, 0.3], [2.1, -1.9]);
        let p = null_phase_family(ChartId::Sphere2mode, &a, &b).unwrap();
        p.validate().unwrap();
        let pts = p.sample(&[0.0, 1.0]);
        for (xi, target) in pts.iter().zip([a, b]) {
            let (n, m) = (
                super::super::sphere::unit_vector(xi.0[0], xi.0[1]),
                super::super::sphere::unit_vector(target[0], target[1]),
            );
            assert!((0..3).all(|k| (n[k] - m[k]).abs() < 1e-13));
        }
    }

    #[test]
    fn path_spec_json_shape() {
        let p = PathSpec::Line { from: vec![0.0, 0.0], to: vec![1.0, 0.0] };
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["kind"], "line");
        assert_eq!(serde_json::from_value::<PathSpec>(v).unwrap(), p);
    }
}
