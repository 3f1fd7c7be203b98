//! Warping matrices, wedge covariance and the precursor relation.
//!
//! ```bash
//! cargo run --example wedge_geometry
//! ```

use wedgeqft::geometry::{
    precursor, standard_warping, warping_for_wedge, ConvexRegion, FourVector, LorentzMap, Wedge,
};

fn main() -> wedgeqft::Result<()> {
    let q4 = standard_warping(4, 2.0, Some(3.0))?;
    println!("Q for d=4, kappa=2, eta=3:\n{}", q4.matrix());
    println!("g-antisymmetry residual: {:e}", q4.antisymmetry_residual());

    let q0 = standard_warping(2, 1.0, None)?;
    let w = Wedge::right(2);
    println!("Q_W' = -Q_W: {}", warping_for_wedge(&w.complement(), &q0).matrix() == (-&q0).matrix());

    let boost = LorentzMap::boost(2, 1, 0.8)?;
    let boosted = w.transformed(&boost, &FourVector::zeros(2));
    println!("Q unchanged by a boost along the wedge: {}", warping_for_wedge(&boosted, &q0).matrix());

    let slow = ConvexRegion::new(vec![
        FourVector::new(vec![1.0, 0.1])?,
        FourVector::new(vec![1.0, 0.2])?,
    ])?;
    let fast = ConvexRegion::new(vec![
        FourVector::new(vec![1.0, 0.5])?,
        FourVector::new(vec![1.0, 0.6])?,
    ])?;
    println!("slow precedes fast in W_R: {}", precursor(&slow, &fast, &w, 0.0)?);
    println!("fast precedes slow in W_R: {}", precursor(&fast, &slow, &w, 0.0)?);
    println!("fast precedes slow in W_R': {}", precursor(&fast, &slow, &w.complement(), 0.0)?);
    Ok(())
}
