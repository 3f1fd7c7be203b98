use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ordered::{distinct_permutations, permutations};
use super::{decode, encode, FockOperator, FockSpace, ONE, ZERO};
use crate::error::{invalid, Result};
use crate::geometry::FourVector;

fn check_mode(space: &FockSpace, i: usize) -> Result<()> {
    if i >= space.num_modes() {
        return Err(invalid(
            "mode",
            format!("index {i} out of range for {} modes", space.num_modes()),
        ));
    }
    Ok(())
}

/// Column entries of `√(n+1) P_sym (e_i ⊗ e_t)` for an `n`-tuple `t`.
fn symmetric_prepend(i: usize, t: &[usize], m: usize) -> Vec<(usize, Complex64)> {
    let mut s = Vec::with_capacity(t.len() + 1);
    s.push(i);
    s.extend_from_slice(t);
    let perms = distinct_permutations(&s);
    let w = ((t.len() + 1) as f64).sqrt() / perms.len() as f64;
    perms
        .iter()
        .map(|p| (encode(p, m), Complex64::new(w, 0.0)))
        .collect()
}

fn ladder(space: &FockSpace, entries: impl Fn(&[usize]) -> Vec<(usize, Complex64)>) -> FockOperator {
    let m = space.num_modes();
    let top = space.n_max();
    let mut op = FockOperator::zero(space);
    for n in 0..=top {
        let rows = space.sector_dim(n + 1);
        let cols = space.sector_dim(n);
        if n < top {
            let mut block = DMatrix::zeros(rows, cols);
            for c in 0..cols {
                for (r, v) in entries(&decode(c, n, m)) {
                    block[(r, c)] += v;
                }
            }
            op.insert_block(n + 1, n, block);
        } else {
            let sparse = (0..cols)
                .flat_map(|c| {
                    entries(&decode(c, n, m))
                        .into_iter()
                        .map(move |(r, v)| (r, c, v))
                })
                .collect();
            op.insert_overflow(n, sparse);
        }
    }
    op
}

/// Bosonic creation operator `a*(i) = √(n+1) P_sym (e_i ⊗ ·)`.
///
/// It annihilates non-symmetric inputs and maps symmetric tensors to
/// symmetric tensors with the usual `√(occupation)` factors.
pub fn create(space: &FockSpace, i: usize) -> Result<FockOperator> {
    check_mode(space, i)?;
    let m = space.num_modes();
    Ok(ladder(space, |t| symmetric_prepend(i, t, m)))
}

/// Bosonic annihilation operator, the adjoint of [`create`].
pub fn annihilate(space: &FockSpace, i: usize) -> Result<FockOperator> {
    Ok(create(space, i)?.adjoint())
}

/// Unsymmetrized creation on the unordered tensor space: prepends `e_i`.
pub fn tensor_create(space: &FockSpace, i: usize) -> Result<FockOperator> {
    check_mode(space, i)?;
    let m = space.num_modes();
    Ok(ladder(space, |t| {
        let mut s = vec![i];
        s.extend_from_slice(t);
        vec![(encode(&s, m), ONE)]
    }))
}

/// Diagonal entries `e^{i x·p}` of `U(x)` in each sector.
pub fn translation_phases(space: &FockSpace, x: &FourVector) -> Result<Vec<DVector<Complex64>>> {
    if x.dim() != space.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: space.dim(),
            found: x.dim(),
        });
    }
    Ok((0..=space.n_max())
        .map(|n| {
            DVector::from_fn(space.sector_dim(n), |idx, _| {
                Complex64::from_polar(1.0, x.minkowski(space.momentum(n, idx)))
            })
        })
        .collect())
}

/// `U(x) = e^{i x·P}`.
pub fn translate(space: &FockSpace, x: &FourVector) -> Result<FockOperator> {
    FockOperator::from_diagonal(space, &translation_phases(space, x)?)
}

/// Components `P_slot^μ`, `μ = 0..d`, acting on the 0-based tensor slot.
/// Zero on sectors with too few particles.
pub fn slot_momentum(space: &FockSpace, slot: usize) -> Vec<FockOperator> {
    let m = space.num_modes();
    (0..space.dim())
        .map(|mu| {
            let diag: Vec<DVector<Complex64>> = (0..=space.n_max())
                .map(|n| {
                    DVector::from_fn(space.sector_dim(n), |idx, _| {
                        if n <= slot {
                            ZERO
                        } else {
                            let mode = decode(idx, n, m)[slot];
                            Complex64::new(space.modes().on_shell(mode).components()[mu], 0.0)
                        }
                    })
                })
                .collect();
            FockOperator::from_diagonal(space, &diag).expect("sector shapes match")
        })
        .collect()
}

/// Components of the total energy-momentum operator.
pub fn total_momentum(space: &FockSpace) -> Vec<FockOperator> {
    (0..space.dim())
        .map(|mu| {
            let diag: Vec<DVector<Complex64>> = (0..=space.n_max())
                .map(|n| {
                    DVector::from_fn(space.sector_dim(n), |idx, _| {
                        Complex64::new(space.momentum(n, idx).components()[mu], 0.0)
                    })
                })
                .collect();
            FockOperator::from_diagonal(space, &diag).expect("sector shapes match")
        })
        .collect()
}

/// Slot reversal `Z: (i₁, …, iₙ) ↦ (iₙ, …, i₁)`.
pub fn reversal_z(space: &FockSpace) -> FockOperator {
    let m = space.num_modes();
    let mut op = FockOperator::zero(space);
    for n in 0..=space.n_max() {
        let d = space.sector_dim(n);
        let mut block = DMatrix::zeros(d, d);
        for c in 0..d {
            let mut t = decode(c, n, m);
            t.reverse();
            block[(encode(&t, m), c)] = ONE;
        }
        op.insert_block(n, n, block);
    }
    op
}

/// Orthogonal projection onto permutation-symmetric tensors.
pub fn symmetrizer(space: &FockSpace) -> FockOperator {
    let m = space.num_modes();
    let mut op = FockOperator::zero(space);
    for n in 0..=space.n_max() {
        let d = space.sector_dim(n);
        let perms = permutations(n);
        let w = Complex64::new(1.0 / perms.len() as f64, 0.0);
        let mut block = DMatrix::zeros(d, d);
        for c in 0..d {
            let t = decode(c, n, m);
            for p in &perms {
                let s: Vec<usize> = p.iter().map(|&k| t[k]).collect();
                block[(encode(&s, m), c)] += w;
            }
        }
        op.insert_block(n, n, block);
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockVector, ModeSet};

    fn space(n_max: usize) -> FockSpace {
        let modes = ModeSet::new(2, 1.0, vec![vec![-0.5], vec![0.2], vec![1.1]]).unwrap();
        FockSpace::new(modes, n_max)
    }

    #[test]
    fn annihilation_kills_vacuum() {
        let s = space(2);
        let vac = FockVector::vacuum(&s);
        for i in 0..3 {
            assert_eq!(annihilate(&s, i).unwrap().apply(&vac).norm(), 0.0);
            let a = annihilate(&s, i).unwrap();
            let c = create(&s, i).unwrap();
            let amp = vac.inner(&a.apply(&c.apply(&vac)));
            assert!((amp - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_commutation_below_truncation() {
        let s = space(3);
        let sym = symmetrizer(&s).restricted_to(2);
        for i in 0..3 {
            for j in 0..3 {
                let comm = annihilate(&s, i)
                    .unwrap()
                    .commutator(&create(&s, j).unwrap())
                    .restricted_to(2);
                let expected = if i == j { sym.clone() } else { FockOperator::zero(&s) };
                assert!(comm.max_abs_diff(&expected) < 1e-14, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn creation_overflow_is_reported() {
        let s = space(1);
        let psi = create(&s, 0).unwrap().apply(&FockVector::vacuum(&s));
        assert_eq!(psi.discarded_norm_sq(), 0.0);
        let out = create(&s, 0).unwrap().apply(&psi);
        assert!((out.discarded_norm_sq() - 2.0).abs() < 1e-14);
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn translation_is_a_representation() {
        let s = space(2);
        let x = FourVector::new(vec![0.3, -1.2]).unwrap();
        let y = FourVector::new(vec![2.0, 0.7]).unwrap();
        let ux = translate(&s, &x).unwrap();
        let uy = translate(&s, &y).unwrap();
        let uxy = translate(&s, &(&x + &y)).unwrap();
        assert!(ux.mul(&uy).max_abs_diff(&uxy) < 1e-12);
        let vac = FockVector::vacuum(&s);
        assert_eq!(ux.apply(&vac).max_abs_diff(&vac), 0.0);
    }

    #[test]
    fn slot_momenta_sum_to_total() {
        let s = space(3);
        let total = total_momentum(&s);
        for (mu, t) in total.iter().enumerate() {
            let mut sum = FockOperator::zero(&s);
            for slot in 0..3 {
                sum = sum.add(&slot_momentum(&s, slot)[mu]);
            }
            assert!(sum.max_abs_diff(t) < 1e-14);
        }
        let p2 = &slot_momentum(&s, 1)[0];
        let one = FockVector::basis(&s, &[2]).unwrap();
        assert_eq!(p2.apply(&one).norm(), 0.0);
    }

    #[test]
    fn reversal_is_an_involution() {
        let s = space(3);
        let z = reversal_z(&s);
        assert_eq!(z.mul(&z).max_abs_diff(&FockOperator::identity(&s)), 0.0);
        let v = FockVector::basis(&s, &[0, 1, 2]).unwrap();
        let w = z.apply(&v);
        assert_eq!(w.sector(3)[s.index(&[2, 1, 0])], ONE);
    }
}
