//! Gaussian-regularized oscillatory integrals
//! `J¹_ε(p, p′) = ∫ dx dy/(2π) e^{−εx² − εy²} e^{−i(xy + px − p′y)}`,
//! their closed form, and the regularizer identity for `D_j`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{metric, FourVector, WarpingMatrix};

/// Tensor trapezoid grid on `[−R, R]²` with a Gaussian regulator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    radius: f64,
    points: usize,
    eps: f64,
}

impl QuadratureSpec {
    pub fn new(radius: f64, points: usize, eps: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", "must be positive"));
        }
        if points < 64 {
            return Err(invalid("points", format!("need at least 64, got {points}")));
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid("eps", format!("must lie in (0, 1], got {eps}")));
        }
        Ok(QuadratureSpec { radius, points, eps })
    }

    /// Radius `10/√ε + 2`, wide enough for the Gaussian tail to drop below
    /// double precision.
    pub fn for_eps(eps: f64, points: usize) -> Result<Self> {
        QuadratureSpec::new(10.0 / eps.sqrt() + 2.0, points, eps)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// `(1+4ε²)^{−1/2} exp((−ipp′ − ε(p² + p′²))/(1+4ε²))`.
pub fn j1_closed(eps: f64, p: f64, pp: f64) -> Result<Complex64> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", "must be >= 0"));
    }
    let s = 1.0 + 4.0 * eps * eps;
    Ok(Complex64::new(-eps * (p * p + pp * pp), -p * pp).scale(1.0 / s).exp() / s.sqrt())
}

fn trapezoid_2d(
    radius: f64,
    points: usize,
    max_freq: f64,
    weight: impl Fn(f64) -> f64,
    p: f64,
    pp: f64,
) -> Result<Complex64> {
    let h = 2.0 * radius / (points - 1) as f64;
    if h * max_freq >= PI {
        return Err(Error::UnderResolved(format!(
            "grid step {h:.3e} cannot resolve frequency {max_freq:.3e}"
        )));
    }
    let nodes: Vec<(f64, f64)> = (0..points)
        .map(|k| {
            let x = -radius + h * k as f64;
            let edge = if k == 0 || k == points - 1 { 0.5 } else { 1.0 };
            (x, edge * h * weight(x))
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, wx) in &nodes {
        if wx == 0.0 {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for &(y, wy) in &nodes {
            if wy == 0.0 {
                continue;
            }
            row += Complex64::from_polar(wy, -(x * y - pp * y));
        }
        total += row * Complex64::from_polar(wx, -p * x);
    }
    Ok(total / (2.0 * PI))
}

/// Trapezoid evaluation of the damped integral on the spec's grid.
pub fn j1_quadrature(spec: &QuadratureSpec, p: f64, pp: f64) -> Result<Complex64> {
    let eps = spec.eps;
    let max_freq = spec.radius + p.abs().max(pp.abs());
    trapezoid_2d(spec.radius, spec.points, max_freq, |x| (-eps * x * x).exp(), p, pp)
}

/// `∏_μ J¹_ε(p^μ, (Qq)_μ)` with the second argument index-lowered by the metric.
/// Tends to `e^{−ip·Qq}` as `ε → 0`.
pub fn jd_product(eps: f64, p: &FourVector, q: &FourVector, warping: &WarpingMatrix) -> Result<Complex64> {
    if p.dim() != q.dim() || p.dim() != warping.dim() {
        return Err(Error::DimensionMismatch {
            expected: warping.dim(),
            found: p.dim().min(q.dim()),
        });
    }
    let lowered = metric(p.dim()) * warping.apply(q).to_dvector();
    p.components()
        .iter()
        .zip(lowered.iter())
        .try_fold(Complex64::new(1.0, 0.0), |acc, (&a, &b)| Ok(acc * j1_closed(eps, a, b)?))
}

/// One point of an `ε` scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsSample {
    pub eps: f64,
    pub abs_err: f64,
}

/// `|J_ε − e^{−ipp′}|` by quadrature for each `ε`, radius from
/// [`QuadratureSpec::for_eps`].
pub fn eps_scan(eps_values: &[f64], p: f64, pp: f64, points: usize) -> Result<Vec<EpsSample>> {
    let limit = Complex64::from_polar(1.0, -p * pp);
    eps_values
        .iter()
        .map(|&eps| {
            let spec = QuadratureSpec::for_eps(eps, points)?;
            Ok(EpsSample {
                eps,
                abs_err: (j1_quadrature(&spec, p, pp)? - limit).norm(),
            })
        })
        .collect()
}

/// Least-squares slope of `log |err|` against `log ε`.
pub fn eps_slope(samples: &[EpsSample]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.abs_err > 0.0)
        .map(|s| (s.eps.ln(), s.abs_err.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Smooth plateau: 1 on `|t| ≤ 1`, 0 for `|t| ≥ 2`.
pub fn flat_top(t: f64) -> f64 {
    let a = (t.abs() - 1.0).clamp(0.0, 1.0);
    let g = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let (lo, hi) = (g(1.0 - a), g(a));
    lo / (lo + hi)
}

/// The oscillatory integral regularized by `η(x/L)η(y/L)` with the flat-top
/// plateau instead of a Gaussian, on `[−2L, 2L]²`.
pub fn j1_flat_top(scale: f64, points: usize, p: f64, pp: f64) -> Result<Complex64> {
    if !(scale > 0.0) {
        return Err(invalid("scale", "must be positive"));
    }
    if points < 64 {
        return Err(invalid("points", format!("need at least 64, got {points}")));
    }
    let radius = 2.0 * scale;
    trapezoid_2d(radius, points, radius + p.abs().max(pp.abs()), |x| flat_top(x / scale), p, pp)
}

/// Residuals of `(1 + x² + y²)⁻¹ (1 − ∂x² − ∂y²) e^{±ixy} = e^{±ixy}` on the
/// square `[−half_width, half_width]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DregReport {
    pub analytic: f64,
    pub finite_difference: f64,
}

pub fn dreg_identity_check(half_width: f64, points: usize, h: f64, sign: f64) -> Result<DregReport> {
    if points < 2 || !(half_width > 0.0) || !(h > 0.0) {
        return Err(invalid("grid", "need at least two points, positive width and step"));
    }
    if sign.abs() != 1.0 {
        return Err(invalid("sign", "must be +1 or -1"));
    }
    let e = |x: f64, y: f64| Complex64::from_polar(1.0, sign * x * y);
    let mut analytic: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for a in 0..points {
        let x = -half_width + 2.0 * half_width * a as f64 / (points - 1) as f64;
        for b in 0..points {
            let y = -half_width + 2.0 * half_width * b as f64 / (points - 1) as f64;
            let base = e(x, y);
            let weight = 1.0 + x * x + y * y;
            // ∂x² e^{±ixy} = −y² e^{±ixy}, likewise in y
            let exact = base - base * (-y * y) - base * (-x * x);
            analytic = analytic.max((exact / weight - base).norm());
            let dxx = (e(x + h, y) - base * 2.0 + e(x - h, y)) / (h * h);
            let dyy = (e(x, y + h) - base * 2.0 + e(x, y - h)) / (h * h);
            fd = fd.max(((base - dxx - dyy) / weight - base).norm());
        }
    }
    Ok(DregReport {
        analytic,
        finite_difference: fd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::standard_warping;

    #[test]
    fn closed_form_values() {
        let v = j1_closed(0.5, 0.0, 0.0).unwrap();
        assert!((v.re - 0.5f64.sqrt()).abs() < 1e-15 && v.im == 0.0);
        let z = j1_closed(0.0, 1.3, -0.7).unwrap();
        assert!((z - Complex64::from_polar(1.0, 0.91)).norm() < 1e-15);
        assert!(j1_closed(-0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(12.0, 63, 0.5).is_err());
        assert!(QuadratureSpec::new(12.0, 64, 0.0).is_err());
        assert!(QuadratureSpec::new(0.0, 64, 0.5).is_err());
        assert!(QuadratureSpec::new(12.0, 64, 1.0).is_ok());
    }

    #[test]
    fn coarse_grid_is_reported() {
        let spec = QuadratureSpec::new(40.0, 64, 0.5).unwrap();
        assert!(matches!(j1_quadrature(&spec, 0.0, 0.0), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let spec = QuadratureSpec::new(12.0, 256, 0.5).unwrap();
        for (p, pp) in [(0.0, 0.0), (1.0, 0.5), (-1.5, 2.0)] {
            let err = (j1_quadrature(&spec, p, pp).unwrap() - j1_closed(0.5, p, pp).unwrap()).norm();
            assert!(err < 1e-6, "{p} {pp} {err}");
        }
    }

    #[test]
    fn jd_limit_is_the_deformation_phase() {
        let q = standard_warping(2, 1.0, None).unwrap();
        let p = FourVector::new(vec![2f64.sqrt(), 1.0]).unwrap();
        let k = FourVector::new(vec![2f64.sqrt(), -1.0]).unwrap();
        let v = jd_product(0.0, &p, &k, &q).unwrap();
        assert!((v - Complex64::from_polar(1.0, 2.0 * 2f64.sqrt())).norm() < 1e-15);
        let z = jd_product(0.3, &p, &k, &WarpingMatrix::zero(2)).unwrap();
        assert!(z.norm() <= 1.0);
    }

    #[test]
    fn dreg_identity() {
        for sign in [1.0, -1.0] {
            let r = dreg_identity_check(2.0, 41, 1e-3, sign).unwrap();
            assert!(r.analytic < 1e-14 && r.finite_difference < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn flat_top_shape() {
        assert_eq!(flat_top(0.5), 1.0);
        assert_eq!(flat_top(2.5), 0.0);
        assert!((flat_top(1.5) - 0.5).abs() < 1e-15);
    }
}
