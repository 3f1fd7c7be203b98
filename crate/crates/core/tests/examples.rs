//! Worked values for each module, checked against direct arithmetic.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use wedgeqft::deformation::{
    compose_deformed_smatrix, deformed_tensor, free_smatrix, gl_smatrix, s_q, wedge_swap_check,
    FinalWedge,
};
use wedgeqft::fock::{
    embed_ordered, ordered_basis, slot_momentum, FockSpace, FockVector, ModeSet,
    DEFAULT_ORDER_MARGIN,
};
use wedgeqft::geometry::{
    minkowski_dot, precursor, standard_warping, warping_for_wedge, ConvexRegion, FourVector,
    LorentzMap, TimeDirection, WarpingMatrix, Wedge,
};
use wedgeqft::oscillatory::{dreg_identity_check, j1_closed, jd_product};
use wedgeqft::scattering::{completeness_check, mode_packet, verify_defw};
use wedgeqft::wavepacket::{
    dispersion, ordered, point_velocity_support, velocity, velocity_support, KgSolution,
    MomentumProfile,
};
use wedgeqft::warp::smear;

const M: f64 = DEFAULT_ORDER_MARGIN;

fn fv(c: &[f64]) -> FourVector {
    FourVector::new(c.to_vec()).unwrap()
}

fn space(momenta: &[f64], n_max: usize) -> FockSpace {
    FockSpace::new(
        ModeSet::new(2, 1.0, momenta.iter().map(|&k| vec![k]).collect()).unwrap(),
        n_max,
    )
}

#[test]
fn minkowski_products() {
    assert_eq!(minkowski_dot(&fv(&[1.0, 0.0]), &fv(&[0.0, 1.0])).unwrap(), 0.0);
    assert_eq!(minkowski_dot(&fv(&[2.0, 1.0]), &fv(&[1.0, 1.0])).unwrap(), 1.0);
    let q = standard_warping(4, 1.3, Some(-0.7)).unwrap();
    let p = fv(&[2.0, 0.3, -1.1, 0.4]);
    assert_abs_diff_eq!(q.contract(&p, &p), 0.0, epsilon = 1e-15);
}

#[test]
fn standard_forms() {
    let q = standard_warping(2, 1.0, None).unwrap();
    assert_eq!(q.matrix().as_slice(), &[0.0, 1.0, 1.0, 0.0]);
    assert_eq!(standard_warping(4, 0.0, Some(0.0)).unwrap().matrix().amax(), 0.0);
    let q4 = standard_warping(4, 2.0, Some(3.0)).unwrap();
    let rows = [[0.0, 2.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 3.0], [0.0, 0.0, -3.0, 0.0]];
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert_eq!(q4.matrix()[(r, c)], *v);
        }
    }
}

#[test]
fn wedge_warping_examples() {
    let q0 = standard_warping(4, 1.0, Some(0.5)).unwrap();
    assert_eq!(warping_for_wedge(&Wedge::right(4), &q0).matrix(), q0.matrix());
    let rotated = Wedge::new(
        LorentzMap::rotation(4, 1, 2, std::f64::consts::PI).unwrap(),
        FourVector::zeros(4),
    )
    .unwrap();
    let flipped = warping_for_wedge(&rotated, &q0);
    assert_abs_diff_eq!(flipped.matrix()[(0, 1)], -1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(flipped.matrix()[(1, 0)], -1.0, epsilon = 1e-15);

    let q2 = standard_warping(2, 1.0, None).unwrap();
    let boosted = Wedge::new(LorentzMap::boost(2, 1, 1.3).unwrap(), FourVector::zeros(2)).unwrap();
    assert!((warping_for_wedge(&boosted, &q2).matrix() - q2.matrix()).amax() < 1e-14);
}

#[test]
fn precursor_examples() {
    let w = Wedge::right(2);
    let left = ConvexRegion::new(vec![fv(&[1.0, 0.1]), fv(&[1.0, 0.2])]).unwrap();
    let right = ConvexRegion::new(vec![fv(&[1.0, 0.5]), fv(&[1.0, 0.6])]).unwrap();
    assert!(precursor(&left, &right, &w, 0.0).unwrap());
    assert!(!precursor(&left, &left, &w, 0.0).unwrap());
    assert!(!precursor(&right, &left, &w, 0.0).unwrap());
}

#[test]
fn dispersion_and_velocity() {
    assert_eq!(dispersion(1.0, &[0.0]).unwrap(), 1.0);
    assert_abs_diff_eq!(dispersion(1.0, &[1.0]).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
    assert_eq!(dispersion(2.0, &[0.0, 0.0]).unwrap(), 2.0);
    assert_eq!(velocity(1.0, &[0.0]).unwrap(), vec![0.0]);
    assert_abs_diff_eq!(velocity(1.0, &[1.0]).unwrap()[0], 0.5f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn velocity_support_of_a_box() {
    let f = KgSolution::new(MomentumProfile::bump(vec![0.15], 0.05, 1.0).unwrap(), 1.0).unwrap();
    let vs = velocity_support(&f, &LorentzMap::identity(2)).unwrap();
    let v: Vec<f64> = vs.region.vertices().iter().map(|p| p.spatial()[0]).collect();
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_abs_diff_eq!(lo, 0.1 / 1.01f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(hi, 0.2 / 1.04f64.sqrt(), epsilon = 1e-12);
    assert!(vs.region.vertices().iter().all(|p| p.time() == 1.0));
}

#[test]
fn boosted_point_support() {
    let lambda = LorentzMap::boost(2, 1, 0.6).unwrap();
    let got = point_velocity_support(1.0, &[0.4], &lambda);
    // velocity computed in frame coordinates, mapped back by the boost
    let k = fv(&[1.16f64.sqrt(), 0.4]);
    let framed = lambda.inverse().apply(&k);
    let expected = lambda.apply(&fv(&[1.0, framed.spatial()[0] / framed.time()]));
    assert!((&got - &expected).euclidean_norm() < 1e-14);
}

#[test]
fn ordering_of_two_packets() {
    // momenta with velocities 0.6 and 0.1
    let f1 = KgSolution::new(MomentumProfile::bump(vec![0.75], 0.005, 1.0).unwrap(), 1.0).unwrap();
    let k2 = 0.1 / 0.99f64.sqrt();
    let f2 = KgSolution::new(MomentumProfile::bump(vec![k2], 0.005, 1.0).unwrap(), 1.0).unwrap();
    let w = Wedge::right(2);
    let id = LorentzMap::identity(2);
    let fs = [f1.clone(), f2];
    assert!(ordered(&fs, &w, &id, TimeDirection::Outgoing, M).unwrap());
    assert!(!ordered(&fs, &w, &id, TimeDirection::Incoming, M).unwrap());
    assert!(ordered(&[f1], &w, &id, TimeDirection::Incoming, M).unwrap());
}

#[test]
fn slot_momenta() {
    let s = space(&[-0.5, 0.3, 1.0], 2);
    let psi = FockVector::basis(&s, &[1]).unwrap();
    let p1 = slot_momentum(&s, 0);
    let k = s.modes().on_shell(1).clone();
    for (mu, op) in p1.iter().enumerate() {
        let got = op.apply(&psi);
        assert!(got.max_abs_diff(&psi.scaled(Complex64::new(k.components()[mu], 0.0))) < 1e-15);
    }
    for op in slot_momentum(&s, 1) {
        assert_eq!(op.apply(&psi).norm(), 0.0);
    }
}

#[test]
fn ordered_bases_and_embedding() {
    let s = space(&[-0.8, -0.1, 0.5], 3);
    let w = Wedge::right(2);
    let singles = ordered_basis(&s, &w, TimeDirection::Outgoing, 1, M).unwrap();
    assert_eq!(singles.len(), 3);
    let pairs = ordered_basis(&s, &w, TimeDirection::Incoming, 2, M).unwrap();
    assert!(pairs.tuples().iter().all(|t| t[0] != t[1]));
    assert_eq!(pairs.len(), 3);

    let one = FockVector::basis(&s, &[2]).unwrap();
    let embedded = embed_ordered(&s, &w, TimeDirection::Outgoing, &one, M).unwrap();
    assert!(embedded.max_abs_diff(&one) < 1e-15);
    let pair = FockVector::basis(&s, &pairs.tuples()[0]).unwrap();
    let sym = embed_ordered(&s, &w, TimeDirection::Incoming, &pair, M).unwrap();
    assert_abs_diff_eq!(sym.norm(), 1.0, epsilon = 1e-14);
    assert!(sym.symmetry_defect() < 1e-15);
}

#[test]
fn constant_symbol_leaves_operators_alone() {
    let s = space(&[-0.4, 0.6], 2);
    let a = wedgeqft::scattering::field_operator(&s).unwrap();
    let c = (2.0 * std::f64::consts::PI).powf(-1.0);
    let smeared = smear(&a, |_| Complex64::new(c, 0.0));
    assert!(smeared.max_abs_diff(&a) < 1e-15);
}

#[test]
fn deformed_tensor_with_zero_warping_is_plain() {
    let s = space(&[-0.4, 0.6], 2);
    let a = FockVector::basis(&s, &[0]).unwrap();
    let b = FockVector::basis(&s, &[1]).unwrap();
    let twisted = deformed_tensor(s.modes(), &a, &b, &WarpingMatrix::zero(2)).unwrap();
    assert_eq!(twisted.max_abs_diff(&a.tensor(&b, 2).unwrap()), 0.0);
}

#[test]
fn phase_operator_examples() {
    let s = space(&[-0.4, 0.2, 0.9], 3);
    let q = standard_warping(2, 1.0, None).unwrap();
    let sq = s_q(&s, &q).unwrap();
    for i in 0..3 {
        assert_eq!(sq.phase(&[i]), Complex64::new(1.0, 0.0));
    }
    assert!(sq.adjoint().max_abs_diff(&s_q(&s, &(-&q)).unwrap()) < 1e-15);
}

#[test]
fn smatrix_examples() {
    let s = space(&[-1.0, -0.2, 0.5, 1.2], 3);
    let w = Wedge::right(2);
    let zero = WarpingMatrix::zero(2);
    for n in 1..=3 {
        let trivial = gl_smatrix(&s, &w, FinalWedge::Opposite, &zero, n, M).unwrap();
        let k = trivial.matrix.nrows();
        assert_eq!((&trivial.matrix - nalgebra::DMatrix::<Complex64>::identity(k, k)).camax(), 0.0);

        let s0 = free_smatrix(&s, &w.complement(), &w, n, M).unwrap();
        let same = compose_deformed_smatrix(&s, &s0, &w.complement(), &w, &zero, M).unwrap();
        assert_eq!(same.max_abs_diff(&s0).unwrap(), 0.0);

        let q = standard_warping(2, 1.0, None).unwrap();
        let composed = compose_deformed_smatrix(&s, &s0, &w.complement(), &w, &q, M).unwrap();
        let gl = gl_smatrix(&s, &w, FinalWedge::Opposite, &q, n, M).unwrap();
        assert!(composed.max_abs_diff(&gl).unwrap() < 1e-13);
    }
}

#[test]
fn wedge_swap_examples() {
    let s = space(&[-1.0, -0.2, 0.5], 3);
    let w = Wedge::right(2);
    assert_eq!(wedge_swap_check(&s, &w, 1, M).unwrap(), 0.0);
    assert_eq!(wedge_swap_check(&s, &w, 2, M).unwrap(), 0.0);
    assert!(wedge_swap_check(&s, &w, 3, M).unwrap() < 1e-13);
}

#[test]
fn defw_examples() {
    let s = space(&[-1.0, -0.2, 0.5, 1.2], 3);
    let w = Wedge::right(2);
    let q = standard_warping(2, 1.0, None).unwrap();
    let one = [mode_packet(&s, 2).unwrap()];
    let r1 = verify_defw(&s, &one, &w, &q, 3.0, TimeDirection::Incoming, M).unwrap();
    assert_eq!(r1.max(), 0.0);
    let two = [mode_packet(&s, 0).unwrap(), mode_packet(&s, 3).unwrap()];
    let r2 = verify_defw(&s, &two, &w, &q, 3.0, TimeDirection::Incoming, M).unwrap();
    assert!(r2.max() < 1e-12, "{r2:?}");
    let three: Vec<_> = [3, 1, 0].iter().map(|&i| mode_packet(&s, i).unwrap()).collect();
    let r3 = verify_defw(&s, &three, &w, &q, 3.0, TimeDirection::Outgoing, M).unwrap();
    assert!(r3.max() < 1e-11, "{r3:?}");
    let reversed: Vec<_> = three.iter().rev().cloned().collect();
    let r4 = verify_defw(&s, &reversed, &w, &q, 3.0, TimeDirection::Incoming, M).unwrap();
    assert!(r4.max() < 1e-11, "{r4:?}");
    assert!(matches!(
        verify_defw(&s, &three, &w, &q, 3.0, TimeDirection::Incoming, M),
        Err(wedgeqft::Error::OrderingViolation { .. })
    ));
}

#[test]
fn completeness_for_three_modes() {
    let s = space(&[-0.7, 0.0, 0.8], 2);
    let q = standard_warping(2, 1.0, None).unwrap();
    let r = completeness_check(&s, &Wedge::right(2), TimeDirection::Outgoing, 2, &q, M).unwrap();
    assert_eq!((r.distinct_dim, r.ordered_count, r.rank), (3, 3, 3));
    assert!(r.complete() && r.stable());
}

#[test]
fn oscillatory_examples() {
    assert_abs_diff_eq!(j1_closed(0.5, 0.0, 0.0).unwrap().re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    let z = j1_closed(0.0, 0.7, -1.9).unwrap();
    assert!((z - Complex64::from_polar(1.0, 0.7 * 1.9)).norm() < 1e-15);

    let p = fv(&[1.1, 0.3]);
    let q = fv(&[1.4, -0.9]);
    let eps: f64 = 0.2;
    let flat = jd_product(eps, &p, &q, &WarpingMatrix::zero(2)).unwrap();
    assert_abs_diff_eq!(flat.norm(), (1.0 + 4.0 * eps * eps).powf(-1.0) * (-eps * (1.21 + 0.09) / 1.16).exp(), epsilon = 1e-15);

    let k = standard_warping(2, 1.0, None).unwrap();
    let limit = jd_product(0.0, &fv(&[2f64.sqrt(), 1.0]), &fv(&[2f64.sqrt(), -1.0]), &k).unwrap();
    assert!((limit - Complex64::from_polar(1.0, 2.0 * 2f64.sqrt())).norm() < 1e-15);

    for sign in [1.0, -1.0] {
        let r = dreg_identity_check(2.0, 41, 1e-3, sign).unwrap();
        assert!(r.analytic < 1e-14 && r.finite_difference < 1e-6, "{r:?}");
    }
}
