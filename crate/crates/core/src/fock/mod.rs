//! Truncated multi-particle spaces over a finite set of momentum modes.
//!
//! Every `n`-particle sector is stored as an unordered tensor over `Mⁿ`
//! slot-basis tuples `(i₁, …, iₙ)`, flattened with the first slot most
//! significant. Bosonic states are the permutation-symmetric vectors inside
//! the same layout, so the embeddings into the bosonic space are plain
//! symmetrizations.

mod ladder;
mod ordered;

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::geometry::{FourVector, LorentzMap};
use crate::wavepacket::{omega, point_velocity_support};

pub use ladder::{
    annihilate, create, reversal_z, slot_momentum, symmetrizer, tensor_create, total_momentum,
    translate, translation_phases,
};
pub use ordered::{
    distinct_symmetric_basis, distinct_symmetric_dim, embed_ordered, embedding_matrix,
    is_ordered_tuple, ordered_basis, symmetrize_sector, OrderedBasis, DEFAULT_ORDER_MARGIN,
};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A finite set of distinct spatial momenta on the mass shell.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    dim: usize,
    mass: f64,
    momenta: Vec<Vec<f64>>,
    on_shell: Vec<FourVector>,
}

impl ModeSet {
    pub fn new(dim: usize, mass: f64, momenta: Vec<Vec<f64>>) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("dimension", "need d >= 2"));
        }
        if !(mass > 0.0) {
            return Err(invalid("mass", format!("must be positive, got {mass}")));
        }
        if momenta.is_empty() {
            return Err(invalid("momenta", "need at least one mode"));
        }
        if let Some(bad) = momenta.iter().find(|k| k.len() != dim - 1) {
            return Err(Error::DimensionMismatch {
                expected: dim - 1,
                found: bad.len(),
            });
        }
        for (i, a) in momenta.iter().enumerate() {
            for b in &momenta[i + 1..] {
                if a == b {
                    return Err(invalid("momenta", format!("duplicate mode {a:?}")));
                }
            }
        }
        let on_shell = momenta
            .iter()
            .map(|k| FourVector::from_time_space(omega(mass, k), k))
            .collect();
        Ok(ModeSet {
            dim,
            mass,
            momenta,
            on_shell,
        })
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum(&self, i: usize) -> &[f64] {
        &self.momenta[i]
    }

    pub fn momenta(&self) -> &[Vec<f64>] {
        &self.momenta
    }

    /// `(ω_m(kᵢ), kᵢ)`.
    pub fn on_shell(&self, i: usize) -> &FourVector {
        &self.on_shell[i]
    }

    /// The mode set seen from a Lorentz-transformed frame: `k̂ᵢ ↦ Λk̂ᵢ`.
    pub fn boosted(&self, lambda: &LorentzMap) -> Result<ModeSet> {
        let momenta = self
            .on_shell
            .iter()
            .map(|p| lambda.apply(p).spatial().to_vec())
            .collect();
        ModeSet::new(self.dim, self.mass, momenta)
    }

    /// `max |k̂·k̂ − m²|` over the modes.
    pub fn mass_shell_residual(&self) -> f64 {
        self.on_shell
            .iter()
            .map(|p| (p.minkowski(p) - self.mass * self.mass).abs())
            .fold(0.0, f64::max)
    }

    /// Point velocity support of mode `i` in the given frame.
    pub fn velocity_point(&self, i: usize, frame: &LorentzMap) -> FourVector {
        point_velocity_support(self.mass, &self.momenta[i], frame)
    }

    /// Smallest Euclidean distance between two modes.
    pub fn min_spacing(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.momenta.iter().enumerate() {
            for b in &self.momenta[i + 1..] {
                let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                best = best.min(d);
            }
        }
        best
    }
}

#[derive(Debug)]
struct SpaceInner {
    modes: ModeSet,
    n_max: usize,
    /// Total momentum of every tuple in sectors `0..=n_max + 1`.
    momenta: Vec<Vec<FourVector>>,
}

/// The truncated unordered Fock space `⊕_{n ≤ n_max} ℋ₁^{⊗n}` over a mode set.
#[derive(Clone, Debug)]
pub struct FockSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.modes == other.inner.modes && self.inner.n_max == other.inner.n_max)
    }
}

impl FockSpace {
    pub fn new(modes: ModeSet, n_max: usize) -> Self {
        let m = modes.len();
        let momenta = (0..=n_max + 1)
            .map(|n| {
                (0..m.pow(n as u32))
                    .map(|idx| {
                        let mut t = decode(idx, n, m);
                        t.sort_unstable();
                        t.iter().fold(FourVector::zeros(modes.dim()), |acc, &i| {
                            &acc + modes.on_shell(i)
                        })
                    })
                    .collect()
            })
            .collect();
        FockSpace {
            inner: Arc::new(SpaceInner {
                modes,
                n_max,
                momenta,
            }),
        }
    }

    pub fn modes(&self) -> &ModeSet {
        &self.inner.modes
    }

    pub fn n_max(&self) -> usize {
        self.inner.n_max
    }

    pub fn num_modes(&self) -> usize {
        self.inner.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.inner.modes.dim()
    }

    pub fn sector_dim(&self, n: usize) -> usize {
        self.num_modes().pow(n as u32)
    }

    pub fn total_dim(&self) -> usize {
        (0..=self.n_max()).map(|n| self.sector_dim(n)).sum()
    }

    pub fn offset(&self, n: usize) -> usize {
        (0..n).map(|k| self.sector_dim(k)).sum()
    }

    pub fn tuple(&self, n: usize, index: usize) -> Vec<usize> {
        decode(index, n, self.num_modes())
    }

    pub fn index(&self, tuple: &[usize]) -> usize {
        encode(tuple, self.num_modes())
    }

    /// Joint energy-momentum eigenvalue of a basis tuple; `n` may be `n_max + 1`.
    pub fn momentum(&self, n: usize, index: usize) -> &FourVector {
        &self.inner.momenta[n][index]
    }

    /// Same space with the modes replaced, e.g. by a boosted copy.
    pub fn with_modes(&self, modes: ModeSet) -> Result<FockSpace> {
        if modes.len() != self.num_modes() || modes.dim() != self.dim() {
            return Err(Error::DomainMismatch("mode sets differ in shape".into()));
        }
        Ok(FockSpace::new(modes, self.n_max()))
    }
}

/// Slot tuple of a flat sector index; slot 0 is the most significant digit.
pub fn decode(mut index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut t = vec![0; n];
    for slot in (0..n).rev() {
        t[slot] = index % m;
        index /= m;
    }
    t
}

/// Inverse of [`decode`].
pub fn encode(tuple: &[usize], m: usize) -> usize {
    tuple.iter().fold(0, |acc, &i| acc * m + i)
}

/// Whether amplitudes are general tensors or permutation-symmetric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Unordered,
    Bosonic,
}

/// A vector in the truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    modes: usize,
    sectors: Vec<DVector<Complex64>>,
    representation: Representation,
    discarded_norm_sq: f64,
}

impl FockVector {
    pub fn zero(space: &FockSpace) -> Self {
        FockVector {
            modes: space.num_modes(),
            sectors: (0..=space.n_max())
                .map(|n| DVector::zeros(space.sector_dim(n)))
                .collect(),
            representation: Representation::Unordered,
            discarded_norm_sq: 0.0,
        }
    }

    /// `Ω`: sector-0 amplitude 1.
    pub fn vacuum(space: &FockSpace) -> Self {
        let mut v = FockVector::zero(space);
        v.sectors[0][0] = ONE;
        v.representation = Representation::Bosonic;
        v
    }

    pub fn one_particle(space: &FockSpace, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != space.num_modes() {
            return Err(Error::DimensionMismatch {
                expected: space.num_modes(),
                found: amplitudes.len(),
            });
        }
        if space.n_max() < 1 {
            return Err(Error::TruncationOverflow { needed: 1, n_max: 0 });
        }
        let mut v = FockVector::zero(space);
        v.sectors[1] = DVector::from_column_slice(amplitudes);
        v.representation = Representation::Bosonic;
        Ok(v)
    }

    /// A single basis tuple `e_{i₁} ⊗ … ⊗ e_{iₙ}`.
    pub fn basis(space: &FockSpace, tuple: &[usize]) -> Result<Self> {
        if tuple.len() > space.n_max() {
            return Err(Error::TruncationOverflow {
                needed: tuple.len(),
                n_max: space.n_max(),
            });
        }
        if tuple.iter().any(|&i| i >= space.num_modes()) {
            return Err(invalid("tuple", "mode index out of range"));
        }
        let mut v = FockVector::zero(space);
        v.sectors[tuple.len()][space.index(tuple)] = ONE;
        if tuple.len() <= 1 {
            v.representation = Representation::Bosonic;
        }
        Ok(v)
    }

    pub fn from_sectors(
        modes: usize,
        sectors: Vec<DVector<Complex64>>,
        representation: Representation,
    ) -> Result<Self> {
        for (n, s) in sectors.iter().enumerate() {
            if s.len() != modes.pow(n as u32) {
                return Err(Error::DimensionMismatch {
                    expected: modes.pow(n as u32),
                    found: s.len(),
                });
            }
        }
        let v = FockVector {
            modes,
            sectors,
            representation,
            discarded_norm_sq: 0.0,
        };
        if representation == Representation::Bosonic && v.symmetry_defect() > 1e-12 {
            return Err(invalid("representation", "amplitudes are not symmetric"));
        }
        Ok(v)
    }

    pub fn num_modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub(crate) fn set_representation(&mut self, r: Representation) {
        self.representation = r;
    }

    pub fn sector(&self, n: usize) -> &DVector<Complex64> {
        &self.sectors[n]
    }

    pub fn sectors(&self) -> &[DVector<Complex64>] {
        &self.sectors
    }

    /// Squared norm that operators pushed beyond `n_max`.
    pub fn discarded_norm_sq(&self) -> f64 {
        self.discarded_norm_sq
    }

    pub fn norm(&self) -> f64 {
        self.sectors.iter().map(|s| s.norm_squared()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .map(|(a, b)| a.dotc(b))
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> FockVector {
        FockVector {
            sectors: self.sectors.iter().map(|s| s * c).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        FockVector {
            modes: self.modes,
            sectors: self.sectors.iter().zip(&other.sectors).map(|(a, b)| a + b).collect(),
            representation: if self.representation == other.representation {
                self.representation
            } else {
                Representation::Unordered
            },
            discarded_norm_sq: self.discarded_norm_sq + other.discarded_norm_sq,
        }
    }

    /// Largest amplitude difference; sectors beyond the shorter vector count
    /// with their full size.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let n = self.sectors.len().max(other.sectors.len());
        (0..n)
            .map(|k| match (self.sectors.get(k), other.sectors.get(k)) {
                (Some(a), Some(b)) => (a - b).camax(),
                (Some(a), None) | (None, Some(a)) => a.camax(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &FockVector) -> f64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation from permutation symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        self.sectors
            .iter()
            .enumerate()
            .map(|(n, s)| (symmetrize_sector(s, n, self.modes) - s).camax())
            .fold(0.0, f64::max)
    }

    /// Ordinary tensor product, truncated to `n_max`. Overflowing amplitudes
    /// are an error.
    pub fn tensor(&self, other: &FockVector, n_max: usize) -> Result<FockVector> {
        self.twisted_tensor(other, n_max, |_, _| ONE)
    }

    /// Tensor product with every product basis pair weighted by
    /// `weight(left tuple, right tuple)`.
    pub(crate) fn twisted_tensor(
        &self,
        other: &FockVector,
        n_max: usize,
        weight: impl Fn(&[usize], &[usize]) -> Complex64,
    ) -> Result<FockVector> {
        if self.modes != other.modes {
            return Err(Error::DomainMismatch("different mode counts".into()));
        }
        let m = self.modes;
        let mut sectors: Vec<DVector<Complex64>> = (0..=n_max)
            .map(|n| DVector::zeros(m.pow(n as u32)))
            .collect();
        for (a, left) in self.sectors.iter().enumerate() {
            for (b, right) in other.sectors.iter().enumerate() {
                let nonzero = left.camax() > 0.0 && right.camax() > 0.0;
                if !nonzero {
                    continue;
                }
                if a + b > n_max {
                    return Err(Error::TruncationOverflow {
                        needed: a + b,
                        n_max,
                    });
                }
                let target = &mut sectors[a + b];
                let stride = m.pow(b as u32);
                for (i, l) in left.iter().enumerate() {
                    if *l == ZERO {
                        continue;
                    }
                    let lt = decode(i, a, m);
                    for (j, r) in right.iter().enumerate() {
                        if *r == ZERO {
                            continue;
                        }
                        let rt = decode(j, b, m);
                        target[i * stride + j] += l * r * weight(&lt, &rt);
                    }
                }
            }
        }
        Ok(FockVector {
            modes: m,
            sectors,
            representation: Representation::Unordered,
            discarded_norm_sq: self.discarded_norm_sq + other.discarded_norm_sq,
        })
    }

    /// Nonzero amplitudes keyed by slot tuple, in basis order.
    pub fn entries(&self, tol: f64) -> Vec<(Vec<usize>, Complex64)> {
        let mut out = Vec::new();
        for (n, s) in self.sectors.iter().enumerate() {
            for (i, v) in s.iter().enumerate() {
                if v.norm() > tol {
                    out.push((decode(i, n, self.modes), *v));
                }
            }
        }
        out
    }
}

/// Sparse entries from an input sector into the first sector beyond `n_max`.
pub(crate) type OverflowBlock = Vec<(usize, usize, Complex64)>;

/// A linear map on the truncated Fock space, stored as dense blocks between
/// particle-number sectors.
///
/// Blocks that would land in sector `n_max + 1` are kept sparsely so that
/// [`FockOperator::apply`] can report the norm lost to truncation.
#[derive(Clone, Debug)]
pub struct FockOperator {
    space: FockSpace,
    pub(crate) blocks: BTreeMap<(usize, usize), DMatrix<Complex64>>,
    pub(crate) overflow: BTreeMap<usize, OverflowBlock>,
    /// Set when a product dropped an overflow contribution it could not follow.
    overflow_lost: bool,
}

impl FockOperator {
    pub fn zero(space: &FockSpace) -> Self {
        FockOperator {
            space: space.clone(),
            blocks: BTreeMap::new(),
            overflow: BTreeMap::new(),
            overflow_lost: false,
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let mut op = FockOperator::zero(space);
        for n in 0..=space.n_max() {
            let d = space.sector_dim(n);
            op.blocks.insert((n, n), DMatrix::identity(d, d));
        }
        op
    }

    /// Diagonal operator from per-sector entries.
    pub fn from_diagonal(space: &FockSpace, diag: &[DVector<Complex64>]) -> Result<Self> {
        if diag.len() != space.n_max() + 1 {
            return Err(Error::DimensionMismatch {
                expected: space.n_max() + 1,
                found: diag.len(),
            });
        }
        let mut op = FockOperator::zero(space);
        for (n, d) in diag.iter().enumerate() {
            if d.len() != space.sector_dim(n) {
                return Err(Error::DimensionMismatch {
                    expected: space.sector_dim(n),
                    found: d.len(),
                });
            }
            op.blocks.insert((n, n), DMatrix::from_diagonal(d));
        }
        Ok(op)
    }

    /// Builds an operator from a full matrix over all sectors.
    pub fn from_dense(space: &FockSpace, m: &DMatrix<Complex64>) -> Result<Self> {
        let total = space.total_dim();
        if m.nrows() != total || m.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: m.nrows(),
            });
        }
        let mut op = FockOperator::zero(space);
        for o in 0..=space.n_max() {
            for i in 0..=space.n_max() {
                let block = m
                    .view(
                        (space.offset(o), space.offset(i)),
                        (space.sector_dim(o), space.sector_dim(i)),
                    )
                    .into_owned();
                if block.camax() > 0.0 {
                    op.blocks.insert((o, i), block);
                }
            }
        }
        Ok(op)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn block(&self, out: usize, inp: usize) -> Option<&DMatrix<Complex64>> {
        self.blocks.get(&(out, inp))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &DMatrix<Complex64>)> {
        self.blocks.iter()
    }

    pub(crate) fn insert_block(&mut self, out: usize, inp: usize, m: DMatrix<Complex64>) {
        self.blocks.insert((out, inp), m);
    }

    pub(crate) fn insert_overflow(&mut self, inp: usize, entries: OverflowBlock) {
        if !entries.is_empty() {
            self.overflow.insert(inp, entries);
        }
    }

    pub fn has_overflow(&self) -> bool {
        !self.overflow.is_empty() || self.overflow_lost
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let total = self.space.total_dim();
        let mut m = DMatrix::zeros(total, total);
        for (&(o, i), b) in &self.blocks {
            m.view_mut((self.space.offset(o), self.space.offset(i)), b.shape())
                .copy_from(b);
        }
        m
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            space: self.space.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|(&(o, i), b)| ((i, o), b.adjoint()))
                .collect(),
            overflow: BTreeMap::new(),
            overflow_lost: false,
        }
    }

    pub fn scaled(&self, c: Complex64) -> FockOperator {
        FockOperator {
            space: self.space.clone(),
            blocks: self.blocks.iter().map(|(k, b)| (*k, b * c)).collect(),
            overflow: self
                .overflow
                .iter()
                .map(|(k, e)| (*k, e.iter().map(|(r, c2, v)| (*r, *c2, v * c)).collect()))
                .collect(),
            overflow_lost: self.overflow_lost,
        }
    }

    pub fn add(&self, other: &FockOperator) -> FockOperator {
        let mut out = self.clone();
        for (k, b) in &other.blocks {
            out.blocks
                .entry(*k)
                .and_modify(|a| *a += b)
                .or_insert_with(|| b.clone());
        }
        for (k, e) in &other.overflow {
            out.overflow.entry(*k).or_default().extend(e.iter().copied());
        }
        out.overflow_lost |= other.overflow_lost;
        out
    }

    pub fn sub(&self, other: &FockOperator) -> FockOperator {
        self.add(&other.scaled(-ONE))
    }

    /// Truncated composition `self ∘ other`.
    pub fn mul(&self, other: &FockOperator) -> FockOperator {
        let mut blocks: BTreeMap<(usize, usize), DMatrix<Complex64>> = BTreeMap::new();
        for (&(o, k), a) in &self.blocks {
            for (&(k2, i), b) in other.blocks.range((k, 0)..=(k, usize::MAX)) {
                debug_assert_eq!(k, k2);
                let prod = a * b;
                blocks
                    .entry((o, i))
                    .and_modify(|acc| *acc += &prod)
                    .or_insert(prod);
            }
        }
        let top = self.space.n_max();
        let mut overflow: BTreeMap<usize, OverflowBlock> = BTreeMap::new();
        if let Some(entries) = self.overflow.get(&top) {
            for (&(k, i), b) in &other.blocks {
                if k != top {
                    continue;
                }
                let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
                for &(r, c, v) in entries {
                    for col in 0..b.ncols() {
                        let w = b[(c, col)];
                        if w != ZERO {
                            *acc.entry((r, col)).or_insert(ZERO) += v * w;
                        }
                    }
                }
                overflow.entry(i).or_default().extend(
                    acc.into_iter()
                        .filter(|(_, v)| *v != ZERO)
                        .map(|((r, c), v)| (r, c, v)),
                );
            }
        }
        let other_leaks = !other.overflow.is_empty() && !self.blocks.is_empty();
        FockOperator {
            space: self.space.clone(),
            blocks,
            overflow,
            overflow_lost: self.overflow_lost || other.overflow_lost || other_leaks,
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &FockOperator) -> FockOperator {
        self.mul(other).sub(&other.mul(self))
    }

    /// Applies the operator; norm pushed beyond `n_max` is added to the
    /// vector's discarded-norm accumulator (NaN if it could not be tracked).
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let space = &self.space;
        let mut sectors: Vec<DVector<Complex64>> = (0..=space.n_max())
            .map(|n| DVector::zeros(space.sector_dim(n)))
            .collect();
        for (&(o, i), b) in &self.blocks {
            if let Some(x) = v.sectors.get(i) {
                sectors[o] += b * x;
            }
        }
        let mut discarded = v.discarded_norm_sq;
        if self.overflow_lost && v.sectors.iter().any(|s| s.camax() > 0.0) {
            discarded = f64::NAN;
        }
        for (&i, entries) in &self.overflow {
            let Some(x) = v.sectors.get(i) else { continue };
            let mut acc: BTreeMap<usize, Complex64> = BTreeMap::new();
            for &(r, c, val) in entries {
                *acc.entry(r).or_insert(ZERO) += val * x[c];
            }
            discarded += acc.values().map(|z| z.norm_sqr()).sum::<f64>();
        }
        FockVector {
            modes: space.num_modes(),
            sectors,
            representation: Representation::Unordered,
            discarded_norm_sq: discarded,
        }
    }

    /// Multiplies every matrix element `⟨out|A|in⟩` (and overflow entry) by
    /// `factor(p_out, p_in)`, where `p` are the tuples' total momenta.
    pub fn map_by_momenta(&self, factor: impl Fn(&FourVector, &FourVector) -> Complex64) -> FockOperator {
        self.map_entries(|o, oi, i, ii, v| {
            v * factor(self.space.momentum(o, oi), self.space.momentum(i, ii))
        })
    }

    /// Entry-wise map `(out sector, out index, in sector, in index, value)`.
    pub(crate) fn map_entries(
        &self,
        f: impl Fn(usize, usize, usize, usize, Complex64) -> Complex64,
    ) -> FockOperator {
        let blocks = self
            .blocks
            .iter()
            .map(|(&(o, i), b)| {
                let m = DMatrix::from_fn(b.nrows(), b.ncols(), |r, c| {
                    let v = b[(r, c)];
                    if v == ZERO {
                        ZERO
                    } else {
                        f(o, r, i, c, v)
                    }
                });
                ((o, i), m)
            })
            .collect();
        let top = self.space.n_max() + 1;
        let overflow = self
            .overflow
            .iter()
            .map(|(&i, e)| (i, e.iter().map(|&(r, c, v)| (r, c, f(top, r, i, c, v))).collect()))
            .collect();
        FockOperator {
            space: self.space.clone(),
            blocks,
            overflow,
            overflow_lost: self.overflow_lost,
        }
    }

    /// Same matrix on another space of identical shape (transport of the
    /// basis `e_t ↦ e_t`).
    pub fn transported(&self, space: &FockSpace) -> Result<FockOperator> {
        if space.num_modes() != self.space.num_modes() || space.n_max() != self.space.n_max() {
            return Err(Error::DomainMismatch("spaces differ in shape".into()));
        }
        Ok(FockOperator {
            space: space.clone(),
            ..self.clone()
        })
    }

    /// Largest entry of `self − other` over all blocks.
    pub fn max_abs_diff(&self, other: &FockOperator) -> f64 {
        let mut keys: Vec<_> = self.blocks.keys().chain(other.blocks.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| match (self.blocks.get(&k), other.blocks.get(&k)) {
                (Some(a), Some(b)) => (a - b).camax(),
                (Some(a), None) | (None, Some(a)) => a.camax(),
                (None, None) => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry.
    pub fn max_abs(&self) -> f64 {
        self.blocks.values().map(|b| b.camax()).fold(0.0, f64::max)
    }

    /// Restriction to sectors `0..=n` on both sides.
    pub fn restricted_to(&self, n: usize) -> FockOperator {
        FockOperator {
            space: self.space.clone(),
            blocks: self
                .blocks
                .iter()
                .filter(|(&(o, i), _)| o <= n && i <= n)
                .map(|(k, b)| (*k, b.clone()))
                .collect(),
            overflow: BTreeMap::new(),
            overflow_lost: false,
        }
    }
}
