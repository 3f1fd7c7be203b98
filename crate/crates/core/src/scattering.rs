//! Wave operators of the truncated free field, deformed multi-particle
//! scattering states, and the checks relating them to `S_Q`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::deformation::{
    compose_wedge_transition, deformed_tensor, s_q, SMatrix,
};
use crate::error::{Error, Result};
use crate::fock::{
    annihilate, create, distinct_symmetric_basis, distinct_symmetric_dim, embed_ordered,
    embedding_matrix, ordered_basis, FockOperator, FockSpace, FockVector, OrderedBasis,
};
use crate::geometry::{warping_for_wedge, LorentzMap, TimeDirection, WarpingMatrix, Wedge};
use crate::warp::{haag_ruelle, near_shell_symbol, on_shell_symbol, smear, warp};
use crate::wavepacket::{omega, ordered, KgSolution, MomentumProfile};

/// Mass-shell tolerance of the on-shell smearing symbol.
pub const ON_SHELL_TOL: f64 = 1e-9;

/// Relative singular-value cutoff for numerical ranks.
pub const RANK_TOL: f64 = 1e-10;

/// `I^{≻_W}` (outgoing) or `I^{≺_W}` (incoming) on one sector, as a matrix
/// from the ordered tuples into the unordered tensor sector.
#[derive(Clone, Debug)]
pub struct WaveOperator {
    pub basis: OrderedBasis,
    pub matrix: DMatrix<Complex64>,
}

impl WaveOperator {
    /// `max |W*W − 1|`.
    pub fn isometry_residual(&self) -> f64 {
        let k = self.matrix.ncols();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(k, k)).camax()
    }
}

pub fn wave_operator_free(
    space: &FockSpace,
    direction: TimeDirection,
    wedge: &Wedge,
    n: usize,
    margin: f64,
) -> Result<WaveOperator> {
    let basis = ordered_basis(space, wedge, direction, n, margin)?;
    let matrix = embedding_matrix(space, &basis);
    Ok(WaveOperator { basis, matrix })
}

/// The field `Σ_i (a*(i) + a(i))` over all modes.
pub fn field_operator(space: &FockSpace) -> Result<FockOperator> {
    let mut a = FockOperator::zero(space);
    for i in 0..space.num_modes() {
        a = a.add(&create(space, i)?).add(&annihilate(space, i)?);
    }
    Ok(a)
}

/// One-particle vector `Σ_i f̃(k_i) e_i` of a packet on the mode lattice.
pub fn packet_vector(space: &FockSpace, f: &KgSolution) -> Result<FockVector> {
    let amps = space
        .modes()
        .momenta()
        .iter()
        .map(|k| {
            f.profile()
                .amplitude(k)
                .ok_or_else(|| Error::DomainMismatch(format!("profile undefined at mode {k:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    FockVector::one_particle(space, &amps)
}

/// Packet concentrated on a single mode.
pub fn mode_packet(space: &FockSpace, i: usize) -> Result<KgSolution> {
    let k = space.modes().momentum(i).to_vec();
    KgSolution::new(
        MomentumProfile::tabulated(1.0, vec![(k, Complex64::new(1.0, 0.0))])?,
        space.modes().mass(),
    )
}

fn gate(
    fs: &[KgSolution],
    wedge: &Wedge,
    direction: TimeDirection,
    margin: f64,
) -> Result<()> {
    if !ordered(fs, wedge, wedge.lorentz(), direction, margin)? {
        return Err(Error::OrderingViolation {
            direction: direction.name(),
        });
    }
    Ok(())
}

/// `B_{1,τ}(f₁) ⋯ B_{n,τ}(fₙ)Ω` with `B_j` the warped, on-shell smeared
/// Haag-Ruelle approximant of the field.
///
/// The packets must be velocity-ordered for the wedge and direction.
pub fn deformed_product_state(
    space: &FockSpace,
    fs: &[KgSolution],
    wedge: &Wedge,
    q0: &WarpingMatrix,
    tau: f64,
    direction: TimeDirection,
    margin: f64,
) -> Result<FockVector> {
    if fs.len() > space.n_max() {
        return Err(Error::TruncationOverflow {
            needed: fs.len(),
            n_max: space.n_max(),
        });
    }
    gate(fs, wedge, direction, margin)?;
    let qw = warping_for_wedge(wedge, q0);
    let chi = on_shell_symbol(space.dim(), space.modes().mass(), ON_SHELL_TOL);
    let b = smear(&warp(&field_operator(space)?, &qw)?, chi);
    let rest = LorentzMap::identity(space.dim());
    let mut state = FockVector::vacuum(space);
    for f in fs.iter().rev() {
        state = haag_ruelle(&b, f, tau, &rest)?.apply(&state);
    }
    Ok(state)
}

/// Residuals of the deformed wave-operator identity for one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct DefwReport {
    pub n: usize,
    pub direction: TimeDirection,
    /// Against `I·S_{Q_W}(ψ₁ ⊗ … ⊗ ψₙ)`.
    pub phase_operator: f64,
    /// Against `I(ψ₁ ⊗_{Q_W} … ⊗_{Q_W} ψₙ)`.
    pub deformed_chain: f64,
    pub discarded_norm_sq: f64,
    pub state_norm: f64,
}

impl DefwReport {
    pub fn max(&self) -> f64 {
        self.phase_operator.max(self.deformed_chain)
    }
}

pub fn verify_defw(
    space: &FockSpace,
    fs: &[KgSolution],
    wedge: &Wedge,
    q0: &WarpingMatrix,
    tau: f64,
    direction: TimeDirection,
    margin: f64,
) -> Result<DefwReport> {
    let lhs = deformed_product_state(space, fs, wedge, q0, tau, direction, margin)?;
    let qw = warping_for_wedge(wedge, q0);
    let psis = fs
        .iter()
        .map(|f| packet_vector(space, f))
        .collect::<Result<Vec<_>>>()?;
    let mut plain = FockVector::vacuum(space);
    let mut chain = FockVector::vacuum(space);
    for psi in &psis {
        plain = plain.tensor(psi, space.n_max())?;
        chain = deformed_tensor(space.modes(), &chain, psi, &qw)?;
    }
    let via_phase = embed_ordered(space, wedge, direction, &s_q(space, &qw)?.apply(&plain), margin)?;
    let via_chain = embed_ordered(space, wedge, direction, &chain, margin)?;
    Ok(DefwReport {
        n: fs.len(),
        direction,
        phase_operator: lhs.distance(&via_phase),
        deformed_chain: lhs.distance(&via_chain),
        discarded_norm_sq: lhs.discarded_norm_sq(),
        state_norm: lhs.norm(),
    })
}

/// Rank data of the ordered scattering states in one sector.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletenessReport {
    pub n: usize,
    pub distinct_dim: usize,
    pub ordered_count: usize,
    pub rank: usize,
    pub rank_undeformed: usize,
    /// Component of the images outside the distinct-mode symmetric sector.
    pub leakage: f64,
}

impl CompletenessReport {
    pub fn complete(&self) -> bool {
        self.rank == self.distinct_dim
    }

    pub fn stable(&self) -> bool {
        self.rank == self.rank_undeformed
    }
}

fn numerical_rank(m: DMatrix<Complex64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > RANK_TOL * top.max(1.0)).count()
}

/// Images `I·S_{Q_W} e_t` of all ordered tuples, in coordinates of the
/// orthonormal distinct-mode symmetric basis.
fn ordered_images(
    space: &FockSpace,
    basis: &OrderedBasis,
    qw: &WarpingMatrix,
) -> Result<(DMatrix<Complex64>, f64)> {
    let embed = embedding_matrix(space, basis);
    let phases = s_q(space, qw)?.restricted(basis);
    let images = DMatrix::from_fn(embed.nrows(), embed.ncols(), |r, c| embed[(r, c)] * phases[c]);
    let sym = distinct_symmetric_basis(space, basis.n());
    let coords = sym.adjoint() * &images;
    let leakage = (&images - &sym * &coords).camax();
    Ok((coords, leakage))
}

pub fn completeness_check(
    space: &FockSpace,
    wedge: &Wedge,
    direction: TimeDirection,
    n: usize,
    q0: &WarpingMatrix,
    margin: f64,
) -> Result<CompletenessReport> {
    let basis = ordered_basis(space, wedge, direction, n, margin)?;
    let (coords, leakage) = ordered_images(space, &basis, &warping_for_wedge(wedge, q0))?;
    let (coords0, _) = ordered_images(space, &basis, &WarpingMatrix::zero(space.dim()))?;
    Ok(CompletenessReport {
        n,
        distinct_dim: distinct_symmetric_dim(space.num_modes(), n),
        ordered_count: basis.len(),
        rank: numerical_rank(coords),
        rank_undeformed: numerical_rank(coords0),
        leakage,
    })
}

/// Columns `𝐖⁺_{Q,W} e_t` built from single-mode deformed product states.
fn deformed_wave_columns(
    space: &FockSpace,
    basis: &OrderedBasis,
    wedge: &Wedge,
    q0: &WarpingMatrix,
    margin: f64,
) -> Result<DMatrix<Complex64>> {
    let n = basis.n();
    let offset = space.sector_dim(n);
    let mut out = DMatrix::zeros(offset, basis.len());
    for (c, t) in basis.tuples().iter().enumerate() {
        let fs = t
            .iter()
            .map(|&i| mode_packet(space, i))
            .collect::<Result<Vec<_>>>()?;
        let state = deformed_product_state(space, &fs, wedge, q0, 0.0, basis.direction(), margin)?;
        out.column_mut(c).copy_from(state.sector(n));
    }
    Ok(out)
}

/// Wedge-transition matrix `(𝐖⁺_{Q,W₂})* 𝐖⁺_{Q,W₁}` from deformed product
/// states, against the sandwich of the free transition with `S_Q` phases.
pub fn wedge_transition_check(
    space: &FockSpace,
    w_final: &Wedge,
    w_initial: &Wedge,
    q0: &WarpingMatrix,
    n: usize,
    margin: f64,
) -> Result<f64> {
    let out_basis = ordered_basis(space, w_final, TimeDirection::Outgoing, n, margin)?;
    let in_basis = ordered_basis(space, w_initial, TimeDirection::Outgoing, n, margin)?;
    let direct = deformed_wave_columns(space, &out_basis, w_final, q0, margin)?.adjoint()
        * deformed_wave_columns(space, &in_basis, w_initial, q0, margin)?;
    let s0 = SMatrix {
        matrix: embedding_matrix(space, &out_basis).adjoint() * embedding_matrix(space, &in_basis),
        out_basis,
        in_basis,
    };
    let sandwich = compose_wedge_transition(space, &s0, w_final, w_initial, q0, margin)?;
    Ok((direct - sandwich.matrix).camax())
}

/// One point of the illustrative Cesàro scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CesaroSample {
    pub horizon: f64,
    pub distance: f64,
}

/// Cesàro means `T⁻¹∫₀ᵀ B_τ(f)Ω dτ` for an operator with one- and
/// two-particle creation parts, smeared with a near-shell symbol of the given
/// width, compared with the on-shell one-particle limit.
///
/// Off-shell transfers carry the phase `e^{iδτ}` with `δ ≠ 0`; its mean over
/// `[0, T]` is `(e^{iδT} − 1)/(iδT)`, taken in closed form.
pub fn cesaro_diagnostic(
    space: &FockSpace,
    f: &KgSolution,
    width: f64,
    horizons: &[f64],
) -> Result<Vec<CesaroSample>> {
    if space.n_max() < 2 {
        return Err(Error::TruncationOverflow {
            needed: 2,
            n_max: space.n_max(),
        });
    }
    let m = space.num_modes();
    let mut b = FockOperator::zero(space);
    for i in 0..m {
        let ci = create(space, i)?;
        b = b.add(&ci);
        for j in 0..m {
            b = b.add(&ci.mul(&create(space, j)?).scaled(Complex64::new(0.5, 0.0)));
        }
    }
    let mass = space.modes().mass();
    let vac = FockVector::vacuum(space);
    let rest = LorentzMap::identity(space.dim());
    let limit = haag_ruelle(
        &smear(&b, on_shell_symbol(space.dim(), mass, ON_SHELL_TOL)),
        f,
        0.0,
        &rest,
    )?
    .apply(&vac);
    let smeared = smear(&b, near_shell_symbol(space.dim(), mass, width));
    let mut out = Vec::with_capacity(horizons.len());
    for &t in horizons {
        if !(t > 0.0) {
            return Err(crate::error::invalid("horizon", "must be positive"));
        }
        let mean = smeared.map_by_momenta(|po, pi| {
            let d = po - pi;
            let amp = f.profile().amplitude(d.spatial()).unwrap_or(Complex64::new(0.0, 0.0));
            let delta = d.time() - omega(mass, d.spatial());
            let avg = if (delta * t).abs() < 1e-12 {
                Complex64::new(1.0, 0.0)
            } else {
                (Complex64::from_polar(1.0, delta * t) - 1.0) / Complex64::new(0.0, delta * t)
            };
            amp * avg
        });
        out.push(CesaroSample {
            horizon: t,
            distance: mean.apply(&vac).distance(&limit),
        });
    }
    Ok(out)
}
