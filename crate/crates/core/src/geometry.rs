//! Minkowski kinematics: metric contraction, Lorentz maps, wedges, warping
//! matrices and the precursor ordering on convex regions.
//!
//! Signature is `(+, -, ..., -)` and every vector is contravariant. Warping
//! matrices act as `(1,1)`-tensors, so the deformation phases are always
//! written `minkowski_dot(p, Q q)`.

use std::ops::{Add, Neg, Sub};

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

/// Tolerance for `ΛᵀgΛ = g` when validating Lorentz maps.
pub const LORENTZ_TOL: f64 = 1e-12;

/// Tolerance for the g-antisymmetry of a warping matrix, relative to its size.
pub const WARPING_TOL: f64 = 1e-14;

/// A point or momentum in `d`-dimensional Minkowski space. Component 0 is time.
#[derive(Clone, Debug, PartialEq)]
pub struct FourVector(Vec<f64>);

impl FourVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(invalid("components", "need d >= 2 components"));
        }
        Ok(FourVector(components))
    }

    pub fn from_time_space(time: f64, space: &[f64]) -> Self {
        let mut c = Vec::with_capacity(space.len() + 1);
        c.push(time);
        c.extend_from_slice(space);
        FourVector(c)
    }

    pub fn zeros(d: usize) -> Self {
        FourVector(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    /// Metric contraction. Both vectors must have the same dimension.
    pub fn minkowski(&self, other: &FourVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let space: f64 = self.0[1..]
            .iter()
            .zip(&other.0[1..])
            .map(|(a, b)| a * b)
            .sum();
        self.0[0] * other.0[0] - space
    }

    pub fn scale(&self, s: f64) -> FourVector {
        FourVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub(crate) fn from_dvector(v: &nalgebra::DVector<f64>) -> Self {
        FourVector(v.iter().copied().collect())
    }

    pub(crate) fn to_dvector(&self) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_column_slice(&self.0)
    }
}

impl Add for &FourVector {
    type Output = FourVector;
    fn add(self, rhs: &FourVector) -> FourVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        FourVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &FourVector {
    type Output = FourVector;
    fn sub(self, rhs: &FourVector) -> FourVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        FourVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector(self.0.iter().map(|c| -c).collect())
    }
}

/// Time direction of a scattering configuration: outgoing (`τ → +∞`) or
/// incoming (`τ → −∞`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeDirection {
    Outgoing,
    Incoming,
}

impl TimeDirection {
    pub fn name(self) -> &'static str {
        match self {
            TimeDirection::Outgoing => "out",
            TimeDirection::Incoming => "in",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            TimeDirection::Outgoing => TimeDirection::Incoming,
            TimeDirection::Incoming => TimeDirection::Outgoing,
        }
    }
}

/// `p⁰q⁰ − Σ pⁱqⁱ`.
pub fn minkowski_dot(p: &FourVector, q: &FourVector) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(p.minkowski(q))
}

/// `diag(+1, −1, …, −1)`.
pub fn metric(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (i, j) if i == j => -1.0,
        _ => 0.0,
    })
}

/// A proper orthochronous Lorentz transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct LorentzMap {
    matrix: DMatrix<f64>,
}

impl LorentzMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d < 2 || matrix.ncols() != d {
            return Err(Error::NotLorentz(format!(
                "shape {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let g = metric(d);
        let residual = (matrix.transpose() * &g * &matrix - &g).amax();
        let scale = matrix.amax().max(1.0);
        if residual > LORENTZ_TOL * scale * scale {
            return Err(Error::NotLorentz(format!(
                "metric residual {residual:e}"
            )));
        }
        if matrix[(0, 0)] < 1.0 - LORENTZ_TOL * scale {
            return Err(Error::NotLorentz("not orthochronous".into()));
        }
        if matrix.clone().determinant() <= 0.0 {
            return Err(Error::NotLorentz("not proper".into()));
        }
        Ok(LorentzMap { matrix })
    }

    pub fn identity(d: usize) -> Self {
        LorentzMap {
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Boost of the given rapidity along spatial axis `axis` (1-based).
    pub fn boost(d: usize, axis: usize, rapidity: f64) -> Result<Self> {
        if axis == 0 || axis >= d {
            return Err(invalid("axis", format!("spatial axis must be in 1..{d}")));
        }
        let mut m = DMatrix::identity(d, d);
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = ch;
        m[(axis, axis)] = ch;
        m[(0, axis)] = sh;
        m[(axis, 0)] = sh;
        Ok(LorentzMap { matrix: m })
    }

    /// Rotation by `angle` in the plane of spatial axes `a` and `b` (1-based).
    pub fn rotation(d: usize, a: usize, b: usize, angle: f64) -> Result<Self> {
        if a == 0 || b == 0 || a >= d || b >= d || a == b {
            return Err(invalid("axes", "need two distinct spatial axes"));
        }
        let mut m = DMatrix::identity(d, d);
        let (c, s) = (angle.cos(), angle.sin());
        m[(a, a)] = c;
        m[(b, b)] = c;
        m[(a, b)] = -s;
        m[(b, a)] = s;
        Ok(LorentzMap { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LorentzMap) -> LorentzMap {
        LorentzMap {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `g Λᵀ g`, exact for Lorentz maps.
    pub fn inverse(&self) -> LorentzMap {
        let g = metric(self.dim());
        LorentzMap {
            matrix: &g * self.matrix.transpose() * &g,
        }
    }

    pub fn apply(&self, x: &FourVector) -> FourVector {
        FourVector::from_dvector(&(&self.matrix * x.to_dvector()))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (&self.matrix - DMatrix::identity(self.dim(), self.dim())).amax() <= tol
    }
}

/// A g-antisymmetric deformation matrix in `(1,1)`-tensor form.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpingMatrix {
    matrix: DMatrix<f64>,
    kappa: f64,
    eta: Option<f64>,
}

impl WarpingMatrix {
    /// Wraps an arbitrary matrix after checking g-antisymmetry.
    pub fn from_matrix(matrix: DMatrix<f64>, kappa: f64, eta: Option<f64>) -> Result<Self> {
        let w = WarpingMatrix { matrix, kappa, eta };
        let residual = w.antisymmetry_residual();
        if residual > WARPING_TOL * w.matrix.amax().max(1.0) {
            return Err(Error::NotWarping(residual));
        }
        Ok(w)
    }

    pub fn zero(d: usize) -> Self {
        WarpingMatrix {
            matrix: DMatrix::zeros(d, d),
            kappa: 0.0,
            eta: if d == 4 { Some(0.0) } else { None },
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn eta(&self) -> Option<f64> {
        self.eta
    }

    pub fn apply(&self, q: &FourVector) -> FourVector {
        FourVector::from_dvector(&(&self.matrix * q.to_dvector()))
    }

    /// `p · Q q`.
    pub fn contract(&self, p: &FourVector, q: &FourVector) -> f64 {
        p.minkowski(&self.apply(q))
    }

    /// Max over basis pairs of `|⟨e_a, Q e_b⟩ + ⟨Q e_a, e_b⟩|`; zero on `gQ + (gQ)ᵀ`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let gq = metric(self.dim()) * &self.matrix;
        (&gq + gq.transpose()).amax()
    }

    /// `s·Q`; parameters scale along.
    pub fn scaled(&self, s: f64) -> WarpingMatrix {
        WarpingMatrix {
            matrix: &self.matrix * s,
            kappa: self.kappa * s,
            eta: self.eta.map(|e| e * s),
        }
    }

    /// `Λ Q Λ⁻¹`.
    pub fn conjugated(&self, lambda: &LorentzMap) -> WarpingMatrix {
        WarpingMatrix {
            matrix: lambda.matrix() * &self.matrix * lambda.inverse().matrix(),
            kappa: self.kappa,
            eta: self.eta,
        }
    }
}

impl Neg for &WarpingMatrix {
    type Output = WarpingMatrix;
    fn neg(self) -> WarpingMatrix {
        self.scaled(-1.0)
    }
}

/// Warping matrix of the right wedge: a `κ` block in the (0,1) plane and, for
/// `d = 4` only, an `η` rotation block in the (2,3) plane.
pub fn standard_warping(d: usize, kappa: f64, eta: Option<f64>) -> Result<WarpingMatrix> {
    if d < 2 {
        return Err(invalid("dimension", "need d >= 2"));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(invalid("kappa", format!("must be finite and >= 0, got {kappa}")));
    }
    if eta.is_some() && d != 4 {
        return Err(invalid("eta", format!("only allowed for d = 4, got d = {d}")));
    }
    let mut m = DMatrix::zeros(d, d);
    m[(0, 1)] = kappa;
    m[(1, 0)] = kappa;
    let eta = if d == 4 { Some(eta.unwrap_or(0.0)) } else { None };
    if let Some(e) = eta {
        m[(2, 3)] = e;
        m[(3, 2)] = -e;
    }
    Ok(WarpingMatrix {
        matrix: m,
        kappa,
        eta,
    })
}

/// A wedge `Λ W + a`, where `W` is the right wedge `{|x⁰| < x¹}` or, when
/// `opposite` is set, the left wedge `−W_R`.
///
/// In `d = 2` the left wedge is not in the proper orthochronous orbit of the
/// right one, so the flag is needed to represent complements.
#[derive(Clone, Debug, PartialEq)]
pub struct Wedge {
    lorentz: LorentzMap,
    translation: FourVector,
    opposite: bool,
}

impl Wedge {
    pub fn new(lorentz: LorentzMap, translation: FourVector) -> Result<Self> {
        if lorentz.dim() != translation.dim() {
            return Err(Error::DimensionMismatch {
                expected: lorentz.dim(),
                found: translation.dim(),
            });
        }
        Ok(Wedge {
            lorentz,
            translation,
            opposite: false,
        })
    }

    pub fn right(d: usize) -> Self {
        Wedge {
            lorentz: LorentzMap::identity(d),
            translation: FourVector::zeros(d),
            opposite: false,
        }
    }

    pub fn left(d: usize) -> Self {
        Wedge::right(d).complement()
    }

    pub fn dim(&self) -> usize {
        self.lorentz.dim()
    }

    pub fn lorentz(&self) -> &LorentzMap {
        &self.lorentz
    }

    pub fn translation(&self) -> &FourVector {
        &self.translation
    }

    pub fn is_opposite(&self) -> bool {
        self.opposite
    }

    /// Causal complement; same apex, reflected cone.
    pub fn complement(&self) -> Wedge {
        Wedge {
            opposite: !self.opposite,
            ..self.clone()
        }
    }

    /// The wedge with its translation removed.
    pub fn centered(&self) -> Wedge {
        Wedge {
            translation: FourVector::zeros(self.dim()),
            ..self.clone()
        }
    }

    /// Image under the Poincaré map `x ↦ Λx + a`.
    pub fn transformed(&self, lambda: &LorentzMap, a: &FourVector) -> Wedge {
        Wedge {
            lorentz: lambda.compose(&self.lorentz),
            translation: &lambda.apply(&self.translation) + a,
            opposite: self.opposite,
        }
    }

    /// Pulls a difference vector back to right-wedge coordinates.
    pub fn to_reference(&self, x: &FourVector) -> FourVector {
        let y = self.lorentz.inverse().apply(x);
        if self.opposite {
            -&y
        } else {
            y
        }
    }

    /// Whether `x` lies in the centered wedge with clearance `margin`.
    pub fn centered_contains(&self, x: &FourVector, margin: f64) -> bool {
        let y = self.to_reference(x);
        y.components()[1] - y.time().abs() > margin
    }

    /// Whether `x` lies in the (translated) wedge region.
    pub fn contains(&self, x: &FourVector, margin: f64) -> bool {
        self.centered_contains(&(x - &self.translation), margin)
    }
}

/// `Λ Q₀ Λ⁻¹` for `W = ΛW_R + a`, and its negative for the opposite wedge.
pub fn warping_for_wedge(wedge: &Wedge, q0: &WarpingMatrix) -> WarpingMatrix {
    let q = q0.conjugated(wedge.lorentz());
    if wedge.is_opposite() {
        -&q
    } else {
        q
    }
}

/// Convex hull of finitely many points, stored by its extreme points.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexRegion {
    vertices: Vec<FourVector>,
}

impl ConvexRegion {
    pub fn new(points: Vec<FourVector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::EmptyRegion);
        };
        let d = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(ConvexRegion {
            vertices: extreme_points(points)?,
        })
    }

    pub fn point(p: FourVector) -> Self {
        ConvexRegion { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[FourVector] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn transformed(&self, lambda: &LorentzMap, a: &FourVector) -> ConvexRegion {
        ConvexRegion {
            vertices: self
                .vertices
                .iter()
                .map(|v| &lambda.apply(v) + a)
                .collect(),
        }
    }
}

fn extreme_points(points: Vec<FourVector>) -> Result<Vec<FourVector>> {
    let mut unique: Vec<FourVector> = Vec::with_capacity(points.len());
    for p in points {
        if !unique.iter().any(|u| (u - &p).euclidean_norm() <= 1e-12) {
            unique.push(p);
        }
    }
    if unique.len() <= 2 {
        return Ok(unique);
    }

    // Coordinates within the affine hull.
    let d = unique[0].dim();
    let n = unique.len();
    let centroid = unique
        .iter()
        .fold(FourVector::zeros(d), |acc, p| &acc + p)
        .scale(1.0 / n as f64);
    let centered = DMatrix::from_fn(d, n, |i, j| {
        unique[j].components()[i] - centroid.components()[i]
    });
    let svd = centered.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Internal("svd failed".into()))?;
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > 1e-10 * smax.max(1.0))
        .count();
    if rank == 0 {
        return Ok(vec![unique.swap_remove(0)]);
    }
    let basis = u.columns(0, rank).into_owned();
    let coords = basis.transpose() * centered;

    let keep: Vec<bool> = match rank {
        1 => {
            let row: Vec<f64> = coords.row(0).iter().copied().collect();
            let by = |a: &usize, b: &usize| row[*a].total_cmp(&row[*b]);
            let lo = (0..n).min_by(by).unwrap_or(0);
            let hi = (0..n).max_by(by).unwrap_or(0);
            (0..n).map(|j| j == lo || j == hi).collect()
        }
        2 => planar_hull(&coords),
        _ => (0..n)
            .map(|j| is_extreme_lp(&coords, j))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(unique
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect())
}

/// Andrew's monotone chain; collinear boundary points are dropped.
fn planar_hull(coords: &DMatrix<f64>) -> Vec<bool> {
    let n = coords.ncols();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        coords[(0, a)]
            .total_cmp(&coords[(0, b)])
            .then(coords[(1, a)].total_cmp(&coords[(1, b)]))
    });
    let cross = |o: usize, a: usize, b: usize| {
        (coords[(0, a)] - coords[(0, o)]) * (coords[(1, b)] - coords[(1, o)])
            - (coords[(1, a)] - coords[(1, o)]) * (coords[(0, b)] - coords[(0, o)])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-14
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut keep = vec![false; n];
    for h in hull {
        keep[h] = true;
    }
    keep
}

/// A point is extreme iff it is not a convex combination of the others.
fn is_extreme_lp(coords: &DMatrix<f64>, j: usize) -> Result<bool> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let others: Vec<usize> = (0..coords.ncols()).filter(|&i| i != j).collect();
    let vars: Vec<_> = others
        .iter()
        .map(|_| problem.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let ones: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
    problem.add_constraint(ones, ComparisonOp::Eq, 1.0);
    for r in 0..coords.nrows() {
        let row: Vec<_> = vars
            .iter()
            .zip(&others)
            .map(|(&v, &i)| (v, coords[(r, i)]))
            .collect();
        problem.add_constraint(row, ComparisonOp::Eq, coords[(r, j)]);
    }
    match problem.solve() {
        Ok(_) => Ok(false),
        Err(minilp::Error::Infeasible) => Ok(true),
        Err(e) => Err(Error::Internal(format!("hull LP: {e}"))),
    }
}

/// `left ≺_W right`: every vertex difference `right − left` lies in the
/// centered wedge with clearance `margin`. Convexity of both the regions and
/// the cone makes the vertex test exact.
pub fn precursor(
    left: &ConvexRegion,
    right: &ConvexRegion,
    wedge: &Wedge,
    margin: f64,
) -> Result<bool> {
    if !(margin >= 0.0) {
        return Err(invalid("margin", "must be >= 0"));
    }
    for r in [left, right] {
        if r.dim() != wedge.dim() {
            return Err(Error::DimensionMismatch {
                expected: wedge.dim(),
                found: r.dim(),
            });
        }
    }
    Ok(left.vertices().iter().all(|v1| {
        right
            .vertices()
            .iter()
            .all(|v2| wedge.centered_contains(&(v2 - v1), margin))
    }))
}

/// Compares `precursor(left, right, W)` with the same relation after applying
/// the Poincaré map `x ↦ Λx + a` to both regions and the wedge.
pub fn precursor_covariance_check(
    left: &ConvexRegion,
    right: &ConvexRegion,
    wedge: &Wedge,
    lambda: &LorentzMap,
    a: &FourVector,
    margin: f64,
) -> Result<bool> {
    let before = precursor(left, right, wedge, margin)?;
    let after = precursor(
        &left.transformed(lambda, a),
        &right.transformed(lambda, a),
        &wedge.transformed(lambda, a),
        margin,
    )?;
    Ok(before == after)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(c: &[f64]) -> FourVector {
        FourVector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn dot_examples() {
        assert_eq!(minkowski_dot(&fv(&[1.0, 0.0]), &fv(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(minkowski_dot(&fv(&[2.0, 1.0]), &fv(&[1.0, 1.0])).unwrap(), 1.0);
        assert!(matches!(
            minkowski_dot(&fv(&[1.0, 0.0]), &fv(&[1.0, 0.0, 0.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standard_warping_forms() {
        let q = standard_warping(2, 1.0, None).unwrap();
        assert_eq!(q.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));

        let q = standard_warping(4, 0.0, Some(0.0)).unwrap();
        assert_eq!(q.matrix().amax(), 0.0);

        let q = standard_warping(4, 2.0, Some(3.0)).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 2.0, 0.0, 0.0,
            2.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 3.0,
            0.0, 0.0, -3.0, 0.0,
        ]);
        assert_eq!(q.matrix(), &expected);
        assert_eq!(q.antisymmetry_residual(), 0.0);
    }

    #[test]
    fn standard_warping_rejects_bad_parameters() {
        assert!(standard_warping(2, 1.0, Some(0.5)).is_err());
        assert!(standard_warping(3, -1.0, None).is_err());
        assert!(standard_warping(1, 1.0, None).is_err());
    }

    #[test]
    fn p_dot_qp_vanishes() {
        let q = standard_warping(4, 1.3, Some(-0.7)).unwrap();
        let p = fv(&[2.0, 0.3, -1.1, 0.4]);
        assert!(q.contract(&p, &p).abs() < 1e-15);
    }

    #[test]
    fn lorentz_validation() {
        assert!(LorentzMap::new(DMatrix::identity(3, 3)).is_ok());
        let mut flip = DMatrix::identity(2, 2);
        flip[(0, 0)] = -1.0;
        assert!(LorentzMap::new(flip).is_err());
        let mut parity = DMatrix::identity(2, 2);
        parity[(1, 1)] = -1.0;
        assert!(LorentzMap::new(parity).is_err());
        let b = LorentzMap::boost(3, 2, 0.8).unwrap();
        assert!(LorentzMap::new(b.matrix().clone()).is_ok());
        assert!(b.compose(&b.inverse()).is_identity(1e-13));
    }

    #[test]
    fn warping_for_reference_and_complement() {
        let q0 = standard_warping(4, 1.5, Some(0.5)).unwrap();
        assert_eq!(warping_for_wedge(&Wedge::right(4), &q0), q0);

        let r = LorentzMap::rotation(4, 1, 2, std::f64::consts::PI).unwrap();
        let rotated = Wedge::new(r, FourVector::zeros(4)).unwrap();
        let q_rot = warping_for_wedge(&rotated, &q0);
        let q_comp = warping_for_wedge(&Wedge::left(4), &q0);
        assert!((q_rot.matrix() - q_comp.matrix()).amax() < 1e-15);
        assert!((q_rot.matrix()[(0, 1)] + 1.5).abs() < 1e-15);
    }

    #[test]
    fn boosts_preserve_reference_warping_in_two_dimensions() {
        let q0 = standard_warping(2, 1.0, None).unwrap();
        let w = Wedge::new(LorentzMap::boost(2, 1, 0.9).unwrap(), FourVector::zeros(2)).unwrap();
        assert!((warping_for_wedge(&w, &q0).matrix() - q0.matrix()).amax() < 1e-14);
    }

    #[test]
    fn translation_is_ignored_by_warping() {
        let q0 = standard_warping(3, 2.0, None).unwrap();
        let w = Wedge::new(LorentzMap::identity(3), fv(&[1.0, 5.0, -2.0])).unwrap();
        assert_eq!(warping_for_wedge(&w, &q0), q0);
    }

    #[test]
    fn precursor_examples() {
        let w = Wedge::right(2);
        let left = ConvexRegion::new(vec![fv(&[1.0, 0.1]), fv(&[1.0, 0.2])]).unwrap();
        let right = ConvexRegion::new(vec![fv(&[1.0, 0.5]), fv(&[1.0, 0.6])]).unwrap();
        assert!(precursor(&left, &right, &w, 0.0).unwrap());
        assert!(!precursor(&left, &left, &w, 0.0).unwrap());
        assert!(!precursor(&right, &left, &w, 0.0).unwrap());
        assert!(precursor(&right, &left, &w.complement(), 0.0).unwrap());
    }

    #[test]
    fn empty_region_rejected() {
        assert!(matches!(ConvexRegion::new(vec![]), Err(Error::EmptyRegion)));
    }

    #[test]
    fn hull_reduction_drops_interior_points() {
        // Square plus centre and an edge midpoint, in a d = 3 slice x⁰ = 1.
        let pts = vec![
            fv(&[1.0, 0.0, 0.0]),
            fv(&[1.0, 1.0, 0.0]),
            fv(&[1.0, 1.0, 1.0]),
            fv(&[1.0, 0.0, 1.0]),
            fv(&[1.0, 0.5, 0.5]),
            fv(&[1.0, 0.5, 0.0]),
        ];
        assert_eq!(ConvexRegion::new(pts).unwrap().vertices().len(), 4);

        // Cube corners plus centre in d = 4, exercising the LP path.
        let mut cube = Vec::new();
        for i in 0..8 {
            let b = |k: usize| ((i >> k) & 1) as f64;
            cube.push(fv(&[1.0, b(0), b(1), b(2)]));
        }
        cube.push(fv(&[1.0, 0.5, 0.5, 0.5]));
        cube.push(fv(&[1.0, 0.5, 0.5, 0.0]));
        assert_eq!(ConvexRegion::new(cube).unwrap().vertices().len(), 8);

        let seg = vec![fv(&[1.0, 0.1]), fv(&[1.0, 0.3]), fv(&[1.0, 0.2])];
        let r = ConvexRegion::new(seg).unwrap();
        assert_eq!(r.vertices(), &[fv(&[1.0, 0.1]), fv(&[1.0, 0.3])]);
    }

    #[test]
    fn covariance_under_identity_and_translation() {
        let w = Wedge::right(2);
        let left = ConvexRegion::new(vec![fv(&[1.0, 0.1]), fv(&[1.0, 0.2])]).unwrap();
        let right = ConvexRegion::new(vec![fv(&[1.0, 0.5]), fv(&[1.0, 0.6])]).unwrap();
        let id = LorentzMap::identity(2);
        assert!(precursor_covariance_check(&left, &right, &w, &id, &FourVector::zeros(2), 0.0).unwrap());
        assert!(precursor_covariance_check(&left, &right, &w, &id, &fv(&[3.0, -7.0]), 0.0).unwrap());
    }
}
