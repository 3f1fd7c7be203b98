use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{decode, encode, FockSpace, FockVector, ModeSet, Representation, ZERO};
use crate::error::{Error, Result};
use crate::geometry::{precursor, ConvexRegion, TimeDirection, Wedge};

pub const DEFAULT_ORDER_MARGIN: f64 = 1e-9;

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Distinct rearrangements of a multiset, lexicographic.
pub(crate) fn distinct_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Symmetrization `P_sym` of one `n`-particle sector.
pub fn symmetrize_sector(v: &DVector<Complex64>, n: usize, m: usize) -> DVector<Complex64> {
    let perms = permutations(n);
    let w = 1.0 / perms.len() as f64;
    DVector::from_fn(v.len(), |idx, _| {
        let t = decode(idx, n, m);
        let mut acc = ZERO;
        for p in &perms {
            let s: Vec<usize> = p.iter().map(|&k| t[k]).collect();
            acc += v[encode(&s, m)];
        }
        acc * w
    })
}

/// `C(M, n)`, the dimension of the symmetric `n`-particle space without
/// repeated modes.
pub fn distinct_symmetric_dim(m: usize, n: usize) -> usize {
    if n > m {
        return 0;
    }
    (0..n).fold(1usize, |acc, k| acc * (m - k) / (k + 1))
}

/// Orthonormal basis (as columns) of the distinct-mode symmetric sector.
pub fn distinct_symmetric_basis(space: &FockSpace, n: usize) -> DMatrix<Complex64> {
    let m = space.num_modes();
    let combos: Vec<Vec<usize>> = (0..space.sector_dim(n))
        .map(|idx| decode(idx, n, m))
        .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
        .collect();
    let w = Complex64::new(1.0 / factorial(n).sqrt(), 0.0);
    let mut basis = DMatrix::zeros(space.sector_dim(n), combos.len());
    for (c, t) in combos.iter().enumerate() {
        for p in distinct_permutations(t) {
            basis[(encode(&p, m), c)] = w;
        }
    }
    basis
}

/// Whether the point velocity supports of a tuple form a precursor chain:
/// outgoing `𝒱_{i₁} ≻ … ≻ 𝒱_{iₙ}`, incoming the reverse.
pub fn is_ordered_tuple(
    modes: &ModeSet,
    wedge: &Wedge,
    direction: TimeDirection,
    tuple: &[usize],
    margin: f64,
) -> Result<bool> {
    let frame = wedge.lorentz();
    for pair in tuple.windows(2) {
        let earlier = ConvexRegion::point(modes.velocity_point(pair[0], frame));
        let later = ConvexRegion::point(modes.velocity_point(pair[1], frame));
        let ok = match direction {
            TimeDirection::Outgoing => precursor(&later, &earlier, wedge, margin)?,
            TimeDirection::Incoming => precursor(&earlier, &later, wedge, margin)?,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Velocity-ordered slot tuples of one sector, in basis-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedBasis {
    n: usize,
    direction: TimeDirection,
    tuples: Vec<Vec<usize>>,
}

impl OrderedBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> TimeDirection {
        self.direction
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.tuples.iter().position(|t| t == tuple)
    }

    /// Unordered-tensor vector supported on the tuple at `pos`.
    pub fn column(&self, space: &FockSpace, pos: usize) -> FockVector {
        FockVector::basis(space, &self.tuples[pos]).expect("ordered tuples fit the space")
    }
}

pub fn ordered_basis(
    space: &FockSpace,
    wedge: &Wedge,
    direction: TimeDirection,
    n: usize,
    margin: f64,
) -> Result<OrderedBasis> {
    if n > space.n_max() {
        return Err(Error::TruncationOverflow {
            needed: n,
            n_max: space.n_max(),
        });
    }
    let m = space.num_modes();
    let mut tuples = Vec::new();
    for idx in 0..space.sector_dim(n) {
        let t = decode(idx, n, m);
        let distinct = (0..n).all(|a| (a + 1..n).all(|b| t[a] != t[b]));
        if distinct && is_ordered_tuple(space.modes(), wedge, direction, &t, margin)? {
            tuples.push(t);
        }
    }
    Ok(OrderedBasis {
        n,
        direction,
        tuples,
    })
}

/// Matrix of `I = √n!·P_sym` restricted to the ordered tuples: column `c` is
/// the image of `e_{tuples[c]}` in the `n`-particle sector.
pub fn embedding_matrix(space: &FockSpace, basis: &OrderedBasis) -> DMatrix<Complex64> {
    let n = basis.n();
    let m = space.num_modes();
    let mut out = DMatrix::zeros(space.sector_dim(n), basis.len());
    let w = Complex64::new(1.0 / factorial(n).sqrt(), 0.0);
    for (c, t) in basis.tuples().iter().enumerate() {
        for p in permutations(n) {
            let s: Vec<usize> = p.iter().map(|&k| t[k]).collect();
            out[(encode(&s, m), c)] += w;
        }
    }
    out
}

/// `I^{≻/≺}ψ = √n!·P_sym ψ` sector by sector, for `ψ` supported on the
/// ordered tuples of the given wedge and direction.
pub fn embed_ordered(
    space: &FockSpace,
    wedge: &Wedge,
    direction: TimeDirection,
    psi: &FockVector,
    margin: f64,
) -> Result<FockVector> {
    if psi.num_modes() != space.num_modes() || psi.n_max() != space.n_max() {
        return Err(Error::DomainMismatch("vector does not live on this space".into()));
    }
    let m = space.num_modes();
    let mut sectors = Vec::with_capacity(space.n_max() + 1);
    for (n, s) in psi.sectors().iter().enumerate() {
        let basis = ordered_basis(space, wedge, direction, n, margin)?;
        for (idx, v) in s.iter().enumerate() {
            if *v != ZERO && basis.position(&decode(idx, n, m)).is_none() {
                return Err(Error::DomainMismatch(format!(
                    "amplitude on non-ordered tuple {:?}",
                    decode(idx, n, m)
                )));
            }
        }
        sectors.push(symmetrize_sector(s, n, m) * Complex64::new(factorial(n).sqrt(), 0.0));
    }
    let mut out = FockVector::from_sectors(m, sectors, Representation::Unordered)?;
    out.set_representation(Representation::Bosonic);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::LorentzMap;

    fn space(momenta: &[f64], n_max: usize) -> FockSpace {
        let modes = ModeSet::new(2, 1.0, momenta.iter().map(|&k| vec![k]).collect()).unwrap();
        FockSpace::new(modes, n_max)
    }

    fn k_for_velocity(v: f64) -> f64 {
        v / (1.0 - v * v).sqrt()
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(distinct_permutations(&[1, 0, 1]).len(), 3);
        assert_eq!(distinct_symmetric_dim(4, 2), 6);
        assert_eq!(distinct_symmetric_dim(3, 4), 0);
    }

    #[test]
    fn outgoing_pair_is_fast_then_slow() {
        let s = space(&[k_for_velocity(0.1), k_for_velocity(0.5)], 2);
        let w = Wedge::right(2);
        let b = ordered_basis(&s, &w, TimeDirection::Outgoing, 2, DEFAULT_ORDER_MARGIN).unwrap();
        assert_eq!(b.tuples(), &[vec![1, 0]]);
        let b1 = ordered_basis(&s, &w, TimeDirection::Outgoing, 1, DEFAULT_ORDER_MARGIN).unwrap();
        assert_eq!(b1.len(), 2);
    }

    #[test]
    fn repeated_modes_are_never_ordered() {
        let s = space(&[0.3, 0.9], 2);
        let w = Wedge::right(2);
        assert!(!is_ordered_tuple(s.modes(), &w, TimeDirection::Outgoing, &[1, 1], 0.0).unwrap());
    }

    #[test]
    fn embedding_is_isometric() {
        let s = space(&[-1.0, 0.0, 0.7], 3);
        let w = Wedge::right(2);
        let b = ordered_basis(&s, &w, TimeDirection::Incoming, 3, DEFAULT_ORDER_MARGIN).unwrap();
        assert_eq!(b.tuples(), &[vec![0, 1, 2]]);
        let e = embedding_matrix(&s, &b);
        let gram = e.adjoint() * &e;
        assert!((gram - DMatrix::identity(1, 1)).camax() < 1e-15);
        let psi = b.column(&s, 0);
        let out = embed_ordered(&s, &w, TimeDirection::Incoming, &psi, DEFAULT_ORDER_MARGIN).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-15);
        assert!(out.symmetry_defect() < 1e-15);
    }

    #[test]
    fn embedding_rejects_unordered_support() {
        let s = space(&[-1.0, 0.7], 2);
        let w = Wedge::right(2);
        let psi = FockVector::basis(&s, &[0, 1]).unwrap();
        assert!(embed_ordered(&s, &w, TimeDirection::Outgoing, &psi, DEFAULT_ORDER_MARGIN).is_err());
        assert!(embed_ordered(&s, &w, TimeDirection::Incoming, &psi, DEFAULT_ORDER_MARGIN).is_ok());
    }

    #[test]
    fn boosted_frame_keeps_d2_ordering() {
        let s = space(&[-0.4, 0.3, 1.0], 2);
        let w = Wedge::new(LorentzMap::boost(2, 1, 0.8).unwrap(), crate::geometry::FourVector::zeros(2)).unwrap();
        let a = ordered_basis(&s, &w, TimeDirection::Outgoing, 2, DEFAULT_ORDER_MARGIN).unwrap();
        let b = ordered_basis(&s, &Wedge::right(2), TimeDirection::Outgoing, 2, DEFAULT_ORDER_MARGIN).unwrap();
        assert_eq!(a, b);
    }
}
