//! Deformed tensor products, the multi-particle phase operator `S_Q`, and the
//! S-matrices of the deformed free field.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    decode, embedding_matrix, ordered_basis, FockOperator, FockSpace, FockVector, ModeSet,
    OrderedBasis,
};
use crate::geometry::{warping_for_wedge, TimeDirection, WarpingMatrix, Wedge};

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `k̂_i·Q k̂_j`.
pub fn pair_phase(modes: &ModeSet, q: &WarpingMatrix, i: usize, j: usize) -> f64 {
    q.contract(modes.on_shell(i), modes.on_shell(j))
}

/// `Σ_{a<b} k̂_{t_a}·Q k̂_{t_b}` for a slot tuple.
pub fn tuple_phase(modes: &ModeSet, q: &WarpingMatrix, tuple: &[usize]) -> f64 {
    compensated_sum(
        (0..tuple.len())
            .flat_map(|a| (a + 1..tuple.len()).map(move |b| (a, b)))
            .map(|(a, b)| pair_phase(modes, q, tuple[a], tuple[b])),
    )
}

/// `ψ ⊗_Q φ`: every cross pair of a slot from `ψ` and a slot from `φ`
/// contributes `e^{i k̂·Qk̂′}`.
pub fn deformed_tensor(
    modes: &ModeSet,
    psi: &FockVector,
    phi: &FockVector,
    q: &WarpingMatrix,
) -> Result<FockVector> {
    if q.dim() != modes.dim() {
        return Err(Error::DimensionMismatch {
            expected: modes.dim(),
            found: q.dim(),
        });
    }
    psi.twisted_tensor(phi, psi.n_max(), |l, r| {
        let angle = compensated_sum(
            l.iter()
                .flat_map(|&a| r.iter().map(move |&b| (a, b)))
                .map(|(a, b)| pair_phase(modes, q, a, b)),
        );
        Complex64::from_polar(1.0, angle)
    })
}

/// `S_Q` kept as its diagonal: one phase per slot tuple and sector.
#[derive(Clone, Debug)]
pub struct PhaseOperator {
    space: FockSpace,
    phases: Vec<DVector<Complex64>>,
}

impl PhaseOperator {
    pub fn phases(&self) -> &[DVector<Complex64>] {
        &self.phases
    }

    pub fn phase(&self, tuple: &[usize]) -> Complex64 {
        self.phases[tuple.len()][self.space.index(tuple)]
    }

    pub fn to_operator(&self) -> FockOperator {
        FockOperator::from_diagonal(&self.space, &self.phases).expect("sector shapes match")
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        self.to_operator().apply(v)
    }

    pub fn adjoint(&self) -> PhaseOperator {
        PhaseOperator {
            space: self.space.clone(),
            phases: self.phases.iter().map(|p| p.map(|z| z.conj())).collect(),
        }
    }

    pub fn compose(&self, other: &PhaseOperator) -> PhaseOperator {
        PhaseOperator {
            space: self.space.clone(),
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a.component_mul(b))
                .collect(),
        }
    }

    /// Diagonal restricted to an ordered basis.
    pub fn restricted(&self, basis: &OrderedBasis) -> DVector<Complex64> {
        DVector::from_iterator(basis.len(), basis.tuples().iter().map(|t| self.phase(t)))
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &PhaseOperator) -> f64 {
        self.phases
            .iter()
            .zip(&other.phases)
            .map(|(a, b)| (a - b).camax())
            .fold(0.0, f64::max)
    }
}

/// `S_Q = ∏_{a<b} e^{iP_a·QP_b}` on the unordered tensor space.
pub fn s_q(space: &FockSpace, q: &WarpingMatrix) -> Result<PhaseOperator> {
    if q.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: q.dim(),
        });
    }
    let m = space.num_modes();
    let phases = (0..=space.n_max())
        .map(|n| {
            DVector::from_fn(space.sector_dim(n), |idx, _| {
                Complex64::from_polar(1.0, tuple_phase(space.modes(), q, &decode(idx, n, m)))
            })
        })
        .collect();
    Ok(PhaseOperator {
        space: space.clone(),
        phases,
    })
}

/// Which wedge the final states are localized in, relative to the initial one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinalWedge {
    Same,
    Opposite,
}

/// An `n`-particle S-matrix between ordered bases: rows are outgoing tuples,
/// columns incoming ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SMatrix {
    pub out_basis: OrderedBasis,
    pub in_basis: OrderedBasis,
    pub matrix: DMatrix<Complex64>,
}

impl SMatrix {
    /// `max |S*S − 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let k = self.matrix.ncols();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(k, k)).camax()
    }

    pub fn max_abs_diff(&self, other: &SMatrix) -> Result<f64> {
        if self.out_basis != other.out_basis || self.in_basis != other.in_basis {
            return Err(Error::DomainMismatch("S-matrices act between different bases".into()));
        }
        Ok((&self.matrix - &other.matrix).camax())
    }

    /// The single nonzero entry of column `c`, with its row.
    pub fn column_entry(&self, c: usize) -> Option<(usize, Complex64)> {
        let col = self.matrix.column(c);
        let (r, v) = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        Some((r, *v))
    }
}

fn margin_basis(
    space: &FockSpace,
    wedge: &Wedge,
    direction: TimeDirection,
    n: usize,
    margin: f64,
) -> Result<OrderedBasis> {
    ordered_basis(space, wedge, direction, n, margin)
}

/// Grosse-Lechner S-matrix on the incoming-ordered `n`-particle basis of `W`.
///
/// Opposite final wedge: `S_{2Q_W}`. Same final wedge: `Z·S_{2Q_W}`, so the
/// rows are the reversed (outgoing-ordered) tuples.
pub fn gl_smatrix(
    space: &FockSpace,
    wedge: &Wedge,
    final_wedge: FinalWedge,
    q0: &WarpingMatrix,
    n: usize,
    margin: f64,
) -> Result<SMatrix> {
    let qw = warping_for_wedge(wedge, q0);
    let in_basis = margin_basis(space, wedge, TimeDirection::Incoming, n, margin)?;
    let phases = s_q(space, &qw.scaled(2.0))?.restricted(&in_basis);
    let k = in_basis.len();
    match final_wedge {
        FinalWedge::Opposite => Ok(SMatrix {
            out_basis: margin_basis(space, &wedge.complement(), TimeDirection::Outgoing, n, margin)?,
            in_basis,
            matrix: DMatrix::from_diagonal(&phases),
        }),
        FinalWedge::Same => {
            let out_basis = margin_basis(space, wedge, TimeDirection::Outgoing, n, margin)?;
            let mut matrix = DMatrix::zeros(out_basis.len(), k);
            for (c, t) in in_basis.tuples().iter().enumerate() {
                let rev: Vec<usize> = t.iter().rev().copied().collect();
                let r = out_basis
                    .position(&rev)
                    .ok_or_else(|| Error::Internal(format!("reversed tuple {rev:?} not outgoing")))?;
                matrix[(r, c)] = phases[c];
            }
            Ok(SMatrix {
                out_basis,
                in_basis,
                matrix,
            })
        }
    }
}

/// Undeformed free S-matrix `(I^{≻_{W_f}})* I^{≺_{W_i}}` on the `n`-particle
/// ordered bases.
pub fn free_smatrix(
    space: &FockSpace,
    w_final: &Wedge,
    w_initial: &Wedge,
    n: usize,
    margin: f64,
) -> Result<SMatrix> {
    let out_basis = margin_basis(space, w_final, TimeDirection::Outgoing, n, margin)?;
    let in_basis = margin_basis(space, w_initial, TimeDirection::Incoming, n, margin)?;
    let matrix = embedding_matrix(space, &out_basis).adjoint() * embedding_matrix(space, &in_basis);
    Ok(SMatrix {
        out_basis,
        in_basis,
        matrix,
    })
}

/// `(S_{Q_{W_f}}^{≻})* S₀ S_{Q_{W_i}}^{≺}`, with `S₀` given between the
/// outgoing basis of `W_f` and the incoming basis of `W_i`.
pub fn compose_deformed_smatrix(
    space: &FockSpace,
    s0: &SMatrix,
    w_final: &Wedge,
    w_initial: &Wedge,
    q0: &WarpingMatrix,
    margin: f64,
) -> Result<SMatrix> {
    sandwich(space, s0, w_final, w_initial, q0, margin, TimeDirection::Incoming)
}

/// Wedge-transition variant `(S_{Q_{W₂}}^{≻})* S₀ S_{Q_{W₁}}^{≻}` between two
/// outgoing bases.
pub fn compose_wedge_transition(
    space: &FockSpace,
    s0: &SMatrix,
    w_final: &Wedge,
    w_initial: &Wedge,
    q0: &WarpingMatrix,
    margin: f64,
) -> Result<SMatrix> {
    sandwich(space, s0, w_final, w_initial, q0, margin, TimeDirection::Outgoing)
}

fn sandwich(
    space: &FockSpace,
    s0: &SMatrix,
    w_final: &Wedge,
    w_initial: &Wedge,
    q0: &WarpingMatrix,
    margin: f64,
    initial_direction: TimeDirection,
) -> Result<SMatrix> {
    let n = s0.in_basis.n();
    let expected_out = margin_basis(space, w_final, TimeDirection::Outgoing, n, margin)?;
    let expected_in = margin_basis(space, w_initial, initial_direction, n, margin)?;
    if s0.out_basis != expected_out || s0.in_basis != expected_in {
        return Err(Error::DomainMismatch(
            "S0 does not map between the ordered bases of the given wedges".into(),
        ));
    }
    let left = s_q(space, &warping_for_wedge(w_final, q0))?.restricted(&expected_out);
    let right = s_q(space, &warping_for_wedge(w_initial, q0))?.restricted(&expected_in);
    let matrix = DMatrix::from_fn(s0.matrix.nrows(), s0.matrix.ncols(), |r, c| {
        left[r].conj() * s0.matrix[(r, c)] * right[c]
    });
    Ok(SMatrix {
        out_basis: expected_out,
        in_basis: expected_in,
        matrix,
    })
}

/// Worst `|S_t − ∏_{a<b} S_{(t_a, t_b)}|` over the columns of an `n`-particle
/// S-matrix, with the pair factors read off the two-particle S-matrix.
pub fn factorization_residual(s: &SMatrix, two: &SMatrix) -> Result<f64> {
    if two.in_basis.n() != 2 {
        return Err(Error::DomainMismatch("pair factors need the two-particle S-matrix".into()));
    }
    let mut worst: f64 = 0.0;
    for (c, t) in s.in_basis.tuples().iter().enumerate() {
        let Some((_, entry)) = s.column_entry(c) else { continue };
        let mut product = Complex64::new(1.0, 0.0);
        for a in 0..t.len() {
            for b in a + 1..t.len() {
                let pc = two
                    .in_basis
                    .position(&[t[a], t[b]])
                    .ok_or_else(|| Error::Internal("sub-pair of an ordered tuple is unordered".into()))?;
                product *= two.column_entry(pc).expect("nonempty column").1;
            }
        }
        worst = worst.max((entry - product).norm());
    }
    Ok(worst)
}

/// `I^{≻_W} − I^{≻_{W′}}Z` on the outgoing basis of `W`.
pub fn wedge_swap_check(space: &FockSpace, wedge: &Wedge, n: usize, margin: f64) -> Result<f64> {
    let here = margin_basis(space, wedge, TimeDirection::Outgoing, n, margin)?;
    let there = margin_basis(space, &wedge.complement(), TimeDirection::Outgoing, n, margin)?;
    let e_here = embedding_matrix(space, &here);
    let e_there = embedding_matrix(space, &there);
    let mut worst: f64 = 0.0;
    for (c, t) in here.tuples().iter().enumerate() {
        let rev: Vec<usize> = t.iter().rev().copied().collect();
        let r = there
            .position(&rev)
            .ok_or_else(|| Error::Internal(format!("reversed tuple {rev:?} not ordered for W'")))?;
        worst = worst.max((e_here.column(c) - e_there.column(r)).camax());
    }
    Ok(worst)
}

/// `‖(ψ ⊗_Q φ) ⊗ χ − ψ ⊗_Q (φ ⊗ χ)‖` for one-particle basis states of modes
/// `i, j, k`. Nonzero unless `k̂_i·Qk̂_k` is a multiple of `2π`.
pub fn mixed_associativity_gap(
    space: &FockSpace,
    q: &WarpingMatrix,
    modes: [usize; 3],
) -> Result<f64> {
    let [psi, phi, chi] = modes.map(|i| FockVector::basis(space, &[i]));
    let (psi, phi, chi) = (psi?, phi?, chi?);
    let m = space.modes();
    let left = deformed_tensor(m, &psi, &phi, q)?.tensor(&chi, space.n_max())?;
    let right = deformed_tensor(m, &psi, &phi.tensor(&chi, space.n_max())?, q)?;
    Ok(left.distance(&right))
}
