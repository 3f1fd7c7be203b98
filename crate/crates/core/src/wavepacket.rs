//! Positive-energy Klein-Gordon wave packets with compactly supported momentum
//! profiles, their velocity supports and propagation-cone decay.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{precursor, ConvexRegion, FourVector, LorentzMap, TimeDirection, Wedge};

/// Boundary samples per support edge when building velocity hulls.
pub const DEFAULT_EDGE_SAMPLES: usize = 8;

/// Minimum quadrature points per axis across the support diameter.
pub const MIN_GRID_POINTS: usize = 16;

/// `√(k² + m²)`.
pub fn dispersion(mass: f64, k: &[f64]) -> Result<f64> {
    check_mass(mass)?;
    Ok(omega(mass, k))
}

/// `k / ω_m(k)`; always subluminal.
pub fn velocity(mass: f64, k: &[f64]) -> Result<Vec<f64>> {
    check_mass(mass)?;
    let w = omega(mass, k);
    Ok(k.iter().map(|c| c / w).collect())
}

/// On-shell momentum `(ω_m(k), k)`.
pub fn on_shell(mass: f64, k: &[f64]) -> FourVector {
    FourVector::from_time_space(omega(mass, k), k)
}

pub(crate) fn omega(mass: f64, k: &[f64]) -> f64 {
    (k.iter().map(|c| c * c).sum::<f64>() + mass * mass).sqrt()
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass.is_finite() {
        Ok(())
    } else {
        Err(invalid("mass", format!("must be positive, got {mass}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Amplitude {
    /// `exp(−(δ²/(δ² − |k − k₀|²))^σ)` inside the ball, zero outside.
    Bump {
        center: Vec<f64>,
        radius: f64,
        smoothness: f64,
    },
    /// Values on a uniform grid with the given spacing.
    Tabulated {
        spacing: f64,
        samples: Vec<(Vec<f64>, Complex64)>,
    },
}

/// Momentum-space amplitude `f̃` of a wave packet.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumProfile {
    amplitude: Amplitude,
}

impl MomentumProfile {
    pub fn bump(center: Vec<f64>, radius: f64, smoothness: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(invalid("center", "need at least one spatial component"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        if !(smoothness > 0.0) {
            return Err(invalid("smoothness", "must be positive"));
        }
        Ok(MomentumProfile {
            amplitude: Amplitude::Bump {
                center,
                radius,
                smoothness,
            },
        })
    }

    pub fn tabulated(spacing: f64, samples: Vec<(Vec<f64>, Complex64)>) -> Result<Self> {
        let Some((first, _)) = samples.first() else {
            return Err(invalid("samples", "empty table"));
        };
        let s = first.len();
        if s == 0 || samples.iter().any(|(k, _)| k.len() != s) {
            return Err(invalid("samples", "inconsistent momentum dimension"));
        }
        if !(spacing > 0.0) {
            return Err(invalid("spacing", "must be positive"));
        }
        Ok(MomentumProfile {
            amplitude: Amplitude::Tabulated { spacing, samples },
        })
    }

    pub fn spatial_dim(&self) -> usize {
        match &self.amplitude {
            Amplitude::Bump { center, .. } => center.len(),
            Amplitude::Tabulated { samples, .. } => samples[0].0.len(),
        }
    }

    /// `f̃(k)`, or `None` where a tabulated profile has no value.
    pub fn amplitude(&self, k: &[f64]) -> Option<Complex64> {
        match &self.amplitude {
            Amplitude::Bump {
                center,
                radius,
                smoothness,
            } => {
                let r2: f64 = k.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                let d2 = radius * radius;
                if r2 >= d2 {
                    return Some(Complex64::new(0.0, 0.0));
                }
                Some(Complex64::new((-(d2 / (d2 - r2)).powf(*smoothness)).exp(), 0.0))
            }
            Amplitude::Tabulated { spacing, samples } => {
                let tol = 1e-9 * spacing;
                if let Some((_, v)) = samples.iter().find(|(p, _)| {
                    p.iter().zip(k).all(|(a, b)| (a - b).abs() <= tol)
                }) {
                    return Some(*v);
                }
                let (lo, hi) = self.support_box();
                let outside = k
                    .iter()
                    .zip(lo.iter().zip(&hi))
                    .any(|(c, (l, h))| *c < *l - tol || *c > *h + tol);
                outside.then_some(Complex64::new(0.0, 0.0))
            }
        }
    }

    /// Axis-aligned box containing the support.
    pub fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.amplitude {
            Amplitude::Bump { center, radius, .. } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Amplitude::Tabulated { samples, .. } => {
                let s = samples[0].0.len();
                let mut lo = vec![f64::INFINITY; s];
                let mut hi = vec![f64::NEG_INFINITY; s];
                for (k, v) in samples {
                    if v.norm() == 0.0 {
                        continue;
                    }
                    for i in 0..s {
                        lo[i] = lo[i].min(k[i]);
                        hi[i] = hi[i].max(k[i]);
                    }
                }
                if lo[0] > hi[0] {
                    // All-zero table: degenerate support at the first sample.
                    return (samples[0].0.clone(), samples[0].0.clone());
                }
                (lo, hi)
            }
        }
    }

    /// Corners of the support box plus `per_edge` interior points on every edge.
    pub fn support_boundary_samples(&self, per_edge: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.support_box();
        let s = lo.len();
        let corner = |mask: usize| -> Vec<f64> {
            (0..s)
                .map(|i| if (mask >> i) & 1 == 1 { hi[i] } else { lo[i] })
                .collect()
        };
        let mut out = Vec::new();
        for mask in 0..(1usize << s) {
            out.push(corner(mask));
            for axis in 0..s {
                if (mask >> axis) & 1 == 1 {
                    continue;
                }
                let a = corner(mask);
                let b = corner(mask | (1 << axis));
                for j in 1..=per_edge {
                    let t = j as f64 / (per_edge + 1) as f64;
                    out.push(a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect());
                }
            }
        }
        out
    }
}

/// A regular positive-energy Klein-Gordon solution with mass `m > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KgSolution {
    profile: MomentumProfile,
    mass: f64,
}

impl KgSolution {
    pub fn new(profile: MomentumProfile, mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(KgSolution { profile, mass })
    }

    pub fn profile(&self) -> &MomentumProfile {
        &self.profile
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spatial_dim(&self) -> usize {
        self.profile.spatial_dim()
    }
}

/// Asymptotic velocities of a packet, on the time-1 slice of a Lorentz frame.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocitySupport {
    pub region: ConvexRegion,
    pub frame: LorentzMap,
}

/// Intersects the on-shell rays through the support with the hyperplane `ΛT₁`.
///
/// Each sampled support point `k` gives `(ω_m(k), k) / c` with `c` the time
/// component of `Λ⁻¹(ω_m(k), k)`.
pub fn velocity_support(f: &KgSolution, frame: &LorentzMap) -> Result<VelocitySupport> {
    velocity_support_sampled(f, frame, DEFAULT_EDGE_SAMPLES)
}

pub fn velocity_support_sampled(
    f: &KgSolution,
    frame: &LorentzMap,
    per_edge: usize,
) -> Result<VelocitySupport> {
    let d = f.spatial_dim() + 1;
    if frame.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: frame.dim(),
        });
    }
    let inverse = frame.inverse();
    let points = f
        .profile
        .support_boundary_samples(per_edge)
        .iter()
        .map(|k| {
            let p = on_shell(f.mass, k);
            let c = inverse.apply(&p).time();
            if !(c > 0.0) {
                return Err(Error::Internal(format!(
                    "on-shell ray does not meet the frame hyperplane (c = {c})"
                )));
            }
            Ok(p.scale(1.0 / c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VelocitySupport {
        region: ConvexRegion::new(points)?,
        frame: frame.clone(),
    })
}

/// Velocity support of a single mode `k`, as a point region.
pub fn point_velocity_support(mass: f64, k: &[f64], frame: &LorentzMap) -> FourVector {
    let p = on_shell(mass, k);
    let c = frame.inverse().apply(&p).time();
    p.scale(1.0 / c)
}

/// Quadrature resolution for evaluating packets in position space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentumGrid {
    /// Trapezoid points per axis across the support box.
    pub points_per_axis: usize,
}

impl Default for MomentumGrid {
    fn default() -> Self {
        MomentumGrid {
            points_per_axis: 4096,
        }
    }
}

/// `f(t, x) = ∫ dˢk/(2π)ˢ e^{i k·x − i ω_m(k) t} f̃(k)`.
///
/// Bump profiles use a tensor trapezoid rule on the support box; tabulated
/// profiles use the Riemann sum over their samples.
pub fn evaluate(f: &KgSolution, t: f64, x: &[f64], grid: &MomentumGrid) -> Result<Complex64> {
    let s = f.spatial_dim();
    if x.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: x.len(),
        });
    }
    let norm = (2.0 * PI).powi(s as i32);
    let phase = |k: &[f64]| -> Complex64 {
        let kx: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, kx - omega(f.mass, k) * t)
    };
    match &f.profile.amplitude {
        Amplitude::Tabulated { spacing, samples } => {
            let sum: Complex64 = samples.iter().map(|(k, v)| v * phase(k)).sum();
            Ok(sum * spacing.powi(s as i32) / norm)
        }
        Amplitude::Bump { .. } => {
            let n = grid.points_per_axis;
            if n < MIN_GRID_POINTS {
                return Err(Error::UnderResolved(format!(
                    "{n} points per axis, need at least {MIN_GRID_POINTS}"
                )));
            }
            let (lo, hi) = f.profile.support_box();
            let h: Vec<f64> = lo.iter().zip(&hi).map(|(l, u)| (u - l) / (n - 1) as f64).collect();
            let reach = x.iter().fold(0.0f64, |m, c| m.max(c.abs())) + t.abs();
            let hmax = h.iter().cloned().fold(0.0, f64::max);
            if hmax * reach >= PI {
                return Err(Error::UnderResolved(format!(
                    "phase advances {:.3} rad per grid step at |x|+|t| = {reach}",
                    hmax * reach
                )));
            }
            let total = n.pow(s as u32);
            let mut k = vec![0.0; s];
            let mut sum = Complex64::new(0.0, 0.0);
            for flat in 0..total {
                let mut rem = flat;
                let mut weight = 1.0;
                for axis in 0..s {
                    let i = rem % n;
                    rem /= n;
                    k[axis] = lo[axis] + i as f64 * h[axis];
                    weight *= if i == 0 || i == n - 1 { 0.5 * h[axis] } else { h[axis] };
                }
                let amp = f.profile.amplitude(&k).unwrap_or_default();
                if amp.norm() != 0.0 {
                    sum += amp * phase(&k) * weight;
                }
            }
            Ok(sum / norm)
        }
    }
}

/// One sample of a decay scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecaySample {
    pub tau: f64,
    pub abs_f: f64,
}

/// Samples `|f(τ, uτ)|` along the ray with velocity `u`.
pub fn decay_scan(
    f: &KgSolution,
    ray_velocity: &[f64],
    times: &[f64],
    grid: &MomentumGrid,
) -> Result<Vec<DecaySample>> {
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| *t < 0.0) {
        return Err(invalid("times", "must be non-negative and strictly increasing"));
    }
    times
        .iter()
        .map(|&tau| {
            let x: Vec<f64> = ray_velocity.iter().map(|u| u * tau).collect();
            Ok(DecaySample {
                tau,
                abs_f: evaluate(f, tau, &x, grid)?.norm(),
            })
        })
        .collect()
}

/// Least-squares slope of `log|f|` against `log τ` over the last decade of
/// sampled times.
pub fn loglog_slope(samples: &[DecaySample]) -> Option<f64> {
    let last = samples.last()?.tau;
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.tau > 0.0 && s.tau >= last / 10.0 && s.abs_f > 0.0)
        .map(|s| (s.tau.ln(), s.abs_f.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Logarithmically spaced times from `start` to `end` inclusive.
pub fn log_times(start: f64, end: f64, count: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), end.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp())
        .collect()
}

/// Whether consecutive velocity supports form a precursor chain.
///
/// Outgoing: `𝒱_{f_{j+1}} ≺_W 𝒱_{f_j}`; incoming: `𝒱_{f_j} ≺_W 𝒱_{f_{j+1}}`.
pub fn ordered(
    fs: &[KgSolution],
    wedge: &Wedge,
    frame: &LorentzMap,
    direction: TimeDirection,
    margin: f64,
) -> Result<bool> {
    let supports = fs
        .iter()
        .map(|f| velocity_support(f, frame))
        .collect::<Result<Vec<_>>>()?;
    for pair in supports.windows(2) {
        let (earlier, later) = (&pair[0].region, &pair[1].region);
        let ok = match direction {
            TimeDirection::Outgoing => precursor(later, earlier, wedge, margin)?,
            TimeDirection::Incoming => precursor(earlier, later, wedge, margin)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(∂_t² − Δ + m²) f` by central second differences with step `h`.
pub fn kg_residual(
    f: &KgSolution,
    t: f64,
    x: &[f64],
    h: f64,
    grid: &MomentumGrid,
) -> Result<Complex64> {
    let centre = evaluate(f, t, x, grid)?;
    let d2t = (evaluate(f, t + h, x, grid)? - centre * 2.0 + evaluate(f, t - h, x, grid)?) / (h * h);
    let mut lap = Complex64::new(0.0, 0.0);
    for axis in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[axis] += h;
        xm[axis] -= h;
        lap += (evaluate(f, t, &xp, grid)? - centre * 2.0 + evaluate(f, t, &xm, grid)?) / (h * h);
    }
    Ok(d2t - lap + centre * (f.mass * f.mass))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(center: f64, radius: f64) -> KgSolution {
        KgSolution::new(MomentumProfile::bump(vec![center], radius, 1.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion(1.0, &[0.0]).unwrap(), 1.0);
        assert!((dispersion(1.0, &[1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(dispersion(2.0, &[0.0, 0.0]).unwrap(), 2.0);
        assert!(dispersion(0.0, &[1.0]).is_err());
        assert!(velocity(-1.0, &[1.0]).is_err());
    }

    #[test]
    fn velocity_examples() {
        assert_eq!(velocity(1.0, &[0.0]).unwrap(), vec![0.0]);
        assert!((velocity(1.0, &[1.0]).unwrap()[0] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let p = MomentumProfile::bump(vec![0.5], 0.2, 1.0).unwrap();
        assert_eq!(p.amplitude(&[0.71]).unwrap().norm(), 0.0);
        assert!((p.amplitude(&[0.5]).unwrap().re - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn tabulated_lookup() {
        let p = MomentumProfile::tabulated(
            0.5,
            vec![(vec![0.0], Complex64::new(1.0, 0.0)), (vec![0.5], Complex64::new(0.0, 2.0))],
        )
        .unwrap();
        assert_eq!(p.amplitude(&[0.5]), Some(Complex64::new(0.0, 2.0)));
        assert_eq!(p.amplitude(&[3.0]), Some(Complex64::new(0.0, 0.0)));
        assert_eq!(p.amplitude(&[0.25]), None);
    }

    #[test]
    fn point_support_velocity() {
        let tab = MomentumProfile::tabulated(1.0, vec![(vec![0.7], Complex64::new(1.0, 0.0))]).unwrap();
        let f = KgSolution::new(tab, 1.0).unwrap();
        let vs = velocity_support(&f, &LorentzMap::identity(2)).unwrap();
        assert_eq!(vs.region.vertices().len(), 1);
        let v = &vs.region.vertices()[0];
        assert!((v.time() - 1.0).abs() < 1e-15);
        assert!((v.spatial()[0] - 0.7 / (0.49f64 + 1.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn interval_support_velocity_endpoints() {
        let f = packet(0.15, 0.05);
        let vs = velocity_support(&f, &LorentzMap::identity(2)).unwrap();
        let mut vels: Vec<f64> = vs.region.vertices().iter().map(|v| v.spatial()[0]).collect();
        vels.sort_by(f64::total_cmp);
        assert_eq!(vels.len(), 2);
        assert!((vels[0] - 0.1 / 1.01f64.sqrt()).abs() < 1e-15);
        assert!((vels[1] - 0.2 / 1.04f64.sqrt()).abs() < 1e-15);
        assert!((vels[0] - 0.0995037).abs() < 1e-6);
        assert!((vels[1] - 0.1961161).abs() < 1e-6);
    }

    #[test]
    fn boosted_frame_point_support() {
        let k = [0.4];
        let lambda = LorentzMap::boost(2, 1, 0.6).unwrap();
        let p = on_shell(1.0, &k);
        // Oracle: rest-frame velocity of Λ⁻¹p, mapped back by Λ.
        let q = lambda.inverse().apply(&p);
        let rest = FourVector::from_time_space(1.0, &[q.spatial()[0] / q.time()]);
        let expected = lambda.apply(&rest);
        let got = point_velocity_support(1.0, &k, &lambda);
        assert!((&got - &expected).euclidean_norm() < 1e-14);
        let back = lambda.inverse().apply(&got);
        assert!((back.time() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evaluate_at_origin_is_mean_profile() {
        let f = packet(0.3, 0.4);
        let v = evaluate(&f, 0.0, &[0.0], &MomentumGrid { points_per_axis: 2048 }).unwrap();
        assert!(v.im.abs() < 1e-16);
        assert!(v.re > 0.0);
    }

    #[test]
    fn coarse_grid_is_reported() {
        let f = packet(0.3, 0.4);
        let r = evaluate(&f, 0.0, &[0.0], &MomentumGrid { points_per_axis: 8 });
        assert!(matches!(r, Err(Error::UnderResolved(_))));
        let r = evaluate(&f, 1e4, &[0.0], &MomentumGrid { points_per_axis: 64 });
        assert!(matches!(r, Err(Error::UnderResolved(_))));
    }

    #[test]
    fn decay_scan_starts_at_origin_value() {
        let f = packet(0.0, 1.0);
        let grid = MomentumGrid { points_per_axis: 512 };
        let scan = decay_scan(&f, &[0.5], &[0.0, 1.0, 2.0], &grid).unwrap();
        let origin = evaluate(&f, 0.0, &[0.0], &grid).unwrap().norm();
        assert_eq!(scan[0].abs_f, origin);
        assert!(decay_scan(&f, &[0.5], &[2.0, 1.0], &grid).is_err());
    }

    #[test]
    fn ordering_examples() {
        // Velocities 0.6 and 0.1: k = v/√(1−v²).
        let k = |v: f64| v / (1.0 - v * v).sqrt();
        let tab = |v: f64| {
            KgSolution::new(
                MomentumProfile::tabulated(1.0, vec![(vec![k(v)], Complex64::new(1.0, 0.0))]).unwrap(),
                1.0,
            )
            .unwrap()
        };
        let fs = vec![tab(0.6), tab(0.1)];
        let w = Wedge::right(2);
        let id = LorentzMap::identity(2);
        assert!(ordered(&fs[..1], &w, &id, TimeDirection::Outgoing, 0.0).unwrap());
        assert!(ordered(&fs, &w, &id, TimeDirection::Outgoing, 0.0).unwrap());
        assert!(!ordered(&fs, &w, &id, TimeDirection::Incoming, 0.0).unwrap());
        let rev: Vec<_> = fs.iter().rev().cloned().collect();
        assert!(ordered(&rev, &w.complement(), &id, TimeDirection::Outgoing, 0.0).unwrap());
    }

    #[test]
    fn log_times_endpoints() {
        let t = log_times(10.0, 100.0, 5);
        assert_eq!(t.len(), 5);
        assert!((t[0] - 10.0).abs() < 1e-12 && (t[4] - 100.0).abs() < 1e-12);
    }
}
