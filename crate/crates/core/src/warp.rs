//! Warped convolutions `A_Q = Σ_p α_{Qp}(A) E(p)` over the finite joint
//! spectrum of the truncated model, together with spectral smearing and
//! Haag-Ruelle approximants.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{translation_phases, FockOperator, FockSpace, FockVector};
use crate::geometry::{FourVector, LorentzMap, WarpingMatrix};
use crate::wavepacket::{omega, KgSolution};

/// Eigenvalues closer than this (componentwise) share a spectral projection.
pub const EIGENVALUE_TOL: f64 = 1e-12;

/// Joint energy-momentum spectrum of a truncated space, grouped into
/// eigenvalues with their basis tuples `(sector, index)`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    space: FockSpace,
    eigenvalues: Vec<FourVector>,
    members: Vec<Vec<(usize, usize)>>,
}

impl SpectralDecomposition {
    pub fn new(space: &FockSpace) -> Self {
        let mut eigenvalues: Vec<FourVector> = Vec::new();
        let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
        for n in 0..=space.n_max() {
            for idx in 0..space.sector_dim(n) {
                let p = space.momentum(n, idx);
                let hit = eigenvalues.iter().position(|q| {
                    p.components()
                        .iter()
                        .zip(q.components())
                        .all(|(a, b)| (a - b).abs() <= EIGENVALUE_TOL)
                });
                match hit {
                    Some(g) => members[g].push((n, idx)),
                    None => {
                        eigenvalues.push(p.clone());
                        members.push(vec![(n, idx)]);
                    }
                }
            }
        }
        SpectralDecomposition {
            space: space.clone(),
            eigenvalues,
            members,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalue(&self, g: usize) -> &FourVector {
        &self.eigenvalues[g]
    }

    pub fn members(&self, g: usize) -> &[(usize, usize)] {
        &self.members[g]
    }

    /// `E(p_g)` as a diagonal 0/1 operator.
    pub fn projection(&self, g: usize) -> FockOperator {
        let mut diag: Vec<_> = (0..=self.space.n_max())
            .map(|n| nalgebra::DVector::zeros(self.space.sector_dim(n)))
            .collect();
        for &(n, idx) in &self.members[g] {
            diag[n][idx] = Complex64::new(1.0, 0.0);
        }
        FockOperator::from_diagonal(&self.space, &diag).expect("sector shapes match")
    }

    /// `‖Σ_g E(p_g) − 1‖` and `max_{g≠h} ‖E(p_g)E(p_h)‖`, entrywise.
    ///
    /// The projections are diagonal in the number basis, so both reduce to how
    /// many groups claim each basis vector.
    pub fn completeness_residuals(&self) -> (f64, f64) {
        let mut count: Vec<Vec<usize>> = (0..=self.space.n_max())
            .map(|n| vec![0; self.space.sector_dim(n)])
            .collect();
        for members in &self.members {
            for &(n, idx) in members {
                count[n][idx] += 1;
            }
        }
        let mut complete: f64 = 0.0;
        let mut overlap: f64 = 0.0;
        for &c in count.iter().flatten() {
            complete = complete.max((c as f64 - 1.0).abs());
            if c > 1 {
                overlap = 1.0;
            }
        }
        (complete, overlap)
    }

    /// Whether every eigenvalue lies in the closed forward cone.
    pub fn spectral_condition(&self) -> bool {
        self.eigenvalues.iter().all(|p| {
            let spatial = p.spatial().iter().map(|x| x * x).sum::<f64>().sqrt();
            p.time() + EIGENVALUE_TOL >= spatial
        })
    }
}

fn check_warping(space: &FockSpace, q: &WarpingMatrix) -> Result<()> {
    if q.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

/// `A_Q` by the spectral sum: each column in the range of `E(p)` is conjugated
/// with the translation phases of `U(Qp)`.
pub fn warp(a: &FockOperator, q: &WarpingMatrix) -> Result<FockOperator> {
    let space = a.space().clone();
    check_warping(&space, q)?;
    let spectrum = SpectralDecomposition::new(&space);
    let top = space.n_max() + 1;
    let mut group: Vec<Vec<usize>> = (0..=space.n_max())
        .map(|n| vec![0; space.sector_dim(n)])
        .collect();
    let mut shifts = Vec::with_capacity(spectrum.len());
    let mut phases = Vec::with_capacity(spectrum.len());
    for g in 0..spectrum.len() {
        for &(n, idx) in spectrum.members(g) {
            group[n][idx] = g;
        }
        let y = q.apply(spectrum.eigenvalue(g));
        phases.push(translation_phases(&space, &y)?);
        shifts.push(y);
    }
    let mut out = a.clone();
    for (&(o, i), block) in out.blocks.iter_mut() {
        for col in 0..block.ncols() {
            let u = &phases[group[i][col]];
            let back = u[i][col].conj();
            for r in 0..block.nrows() {
                block[(r, col)] *= u[o][r] * back;
            }
        }
    }
    for (&n_in, entries) in out.overflow.iter_mut() {
        for (r, c, v) in entries.iter_mut() {
            let g = group[n_in][*c];
            let phase = shifts[g].minkowski(space.momentum(top, *r));
            *v *= Complex64::from_polar(1.0, phase) * phases[g][n_in][*c].conj();
        }
    }
    Ok(out)
}

/// `A_Q` from the closed phase form `⟨o|A_Q|i⟩ = e^{i(Qp_in)·(p_out − p_in)} A_oi`.
pub fn warp_phase_form(a: &FockOperator, q: &WarpingMatrix) -> Result<FockOperator> {
    check_warping(a.space(), q)?;
    Ok(a.map_by_momenta(|po, pi| {
        Complex64::from_polar(1.0, q.apply(pi).minkowski(&(po - pi)))
    }))
}

/// The left form `Σ_p E(p) α_{Qp}(A)`, phases from the outgoing eigenvalue.
pub fn warp_left(a: &FockOperator, q: &WarpingMatrix) -> Result<FockOperator> {
    check_warping(a.space(), q)?;
    Ok(a.map_by_momenta(|po, pi| Complex64::from_polar(1.0, q.apply(po).minkowski(&(po - pi)))))
}

/// `α_x(A) = U(x) A U(x)*`.
pub fn translated(a: &FockOperator, x: &FourVector) -> Result<FockOperator> {
    let space = a.space();
    let u = translation_phases(space, x)?;
    Ok(a.map_entries(|o, r, i, c, v| {
        let out = if o <= space.n_max() {
            u[o][r]
        } else {
            Complex64::from_polar(1.0, x.minkowski(space.momentum(o, r)))
        };
        v * out * u[i][c].conj()
    }))
}

/// `(2π)^{d/2} χ̂(p_out − p_in)` applied to every matrix element.
pub fn smear(a: &FockOperator, chi: impl Fn(&FourVector) -> Complex64) -> FockOperator {
    let norm = (2.0 * PI).powf(a.space().dim() as f64 / 2.0);
    a.map_by_momenta(|po, pi| chi(&(po - pi)) * norm)
}

/// `(2π)^{−d/2}` on the positive mass shell (to `tol` in `p·p − m²`), zero
/// elsewhere.
pub fn on_shell_symbol(dim: usize, mass: f64, tol: f64) -> impl Fn(&FourVector) -> Complex64 {
    let c = (2.0 * PI).powf(-(dim as f64) / 2.0);
    move |p: &FourVector| {
        if p.time() > 0.0 && (p.minkowski(p) - mass * mass).abs() <= tol {
            Complex64::new(c, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// `(2π)^{−d/2} exp(−((p·p − m²)/w)²)` for `p⁰ > 0`: a smooth symbol peaked on
/// the mass shell, leaking onto nearby transfers.
pub fn near_shell_symbol(dim: usize, mass: f64, width: f64) -> impl Fn(&FourVector) -> Complex64 {
    let c = (2.0 * PI).powf(-(dim as f64) / 2.0);
    move |p: &FourVector| {
        if p.time() > 0.0 {
            let z = (p.minkowski(p) - mass * mass) / width;
            Complex64::new(c * (-z * z).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

/// Haag-Ruelle approximant `B_τ(f) = ∫ dˢx f(τ, x) α_{(τ,x)}(B)`, evaluated
/// exactly on the mode lattice: each element is multiplied by
/// `f̃(Δp⃗) e^{i(Δp⁰ − ω(Δp⃗))τ}`.
///
/// Only the rest frame is supported.
pub fn haag_ruelle(
    b: &FockOperator,
    f: &KgSolution,
    tau: f64,
    lambda: &LorentzMap,
) -> Result<FockOperator> {
    if !lambda.is_identity(1e-14) {
        return Err(Error::Unsupported(
            "Haag-Ruelle approximants are implemented in the rest frame only".into(),
        ));
    }
    let space = b.space();
    if f.spatial_dim() + 1 != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim() - 1,
            found: f.spatial_dim(),
        });
    }
    for (&(o, i), block) in b.blocks() {
        for r in 0..block.nrows() {
            for c in 0..block.ncols() {
                if block[(r, c)].norm() == 0.0 {
                    continue;
                }
                let d = space.momentum(o, r) - space.momentum(i, c);
                if f.profile().amplitude(d.spatial()).is_none() {
                    return Err(Error::DomainMismatch(format!(
                        "profile undefined at momentum transfer {:?}",
                        d.spatial()
                    )));
                }
            }
        }
    }
    let mass = f.mass();
    Ok(b.map_by_momenta(|po, pi| {
        let d = po - pi;
        let amp = f
            .profile()
            .amplitude(d.spatial())
            .unwrap_or(Complex64::new(0.0, 0.0));
        amp * Complex64::from_polar(1.0, (d.time() - omega(mass, d.spatial())) * tau)
    }))
}

/// Deviations of the warped-convolution identities, one per property.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WarpReport {
    /// `‖A_QΩ − AΩ‖`.
    pub vacuum: f64,
    /// `(A_Q)* − (A*)_Q`.
    pub adjoint: f64,
    /// `A_0 − A`.
    pub zero: f64,
    /// `α_x(A_Q) − (α_x A)_Q`, worst over the sampled translations.
    pub translation: f64,
    /// `α_λ(A_Q) − (α_λ A)_{ΛQΛ⁻¹}`, worst over the sampled Lorentz maps.
    pub lorentz: f64,
    /// Spectral-sum route against the closed phase form.
    pub spectral_vs_phase: f64,
    /// Right form against the left form.
    pub left_right: f64,
}

impl WarpReport {
    pub fn max(&self) -> f64 {
        [
            self.vacuum,
            self.adjoint,
            self.zero,
            self.translation,
            self.lorentz,
            self.spectral_vs_phase,
            self.left_right,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn merge(&mut self, other: &WarpReport) {
        self.vacuum = self.vacuum.max(other.vacuum);
        self.adjoint = self.adjoint.max(other.adjoint);
        self.zero = self.zero.max(other.zero);
        self.translation = self.translation.max(other.translation);
        self.lorentz = self.lorentz.max(other.lorentz);
        self.spectral_vs_phase = self.spectral_vs_phase.max(other.spectral_vs_phase);
        self.left_right = self.left_right.max(other.left_right);
    }

    /// Worst case over several reports.
    pub fn worst<'a>(reports: impl IntoIterator<Item = &'a WarpReport>) -> WarpReport {
        let mut out = WarpReport::default();
        for r in reports {
            out.merge(r);
        }
        out
    }
}

/// Checks the warped-convolution identities for one operator.
///
/// Lorentz covariance is tested by transport: `α_λ` maps the mode set onto
/// the boosted mode set, so `α_λ(B)` on the boosted space has the same matrix
/// as `B` on the original one.
pub fn verify_warp_properties(
    a: &FockOperator,
    q: &WarpingMatrix,
    translations: &[FourVector],
    boosts: &[LorentzMap],
) -> Result<WarpReport> {
    let space = a.space();
    let aq = warp(a, q)?;
    let vac = FockVector::vacuum(space);
    let mut report = WarpReport {
        vacuum: aq.apply(&vac).distance(&a.apply(&vac)),
        adjoint: aq.adjoint().max_abs_diff(&warp(&a.adjoint(), q)?),
        zero: warp(a, &WarpingMatrix::zero(space.dim()))?.max_abs_diff(a),
        spectral_vs_phase: aq.max_abs_diff(&warp_phase_form(a, q)?),
        left_right: aq.max_abs_diff(&warp_left(a, q)?),
        ..WarpReport::default()
    };
    for x in translations {
        let lhs = translated(&aq, x)?;
        let rhs = warp(&translated(a, x)?, q)?;
        report.translation = report.translation.max(lhs.max_abs_diff(&rhs));
    }
    for lambda in boosts {
        let boosted = space.with_modes(space.modes().boosted(lambda)?)?;
        let lhs = aq.transported(&boosted)?;
        let rhs = warp(&a.transported(&boosted)?, &q.conjugated(lambda))?;
        report.lorentz = report.lorentz.max(lhs.max_abs_diff(&rhs));
    }
    Ok(report)
}
