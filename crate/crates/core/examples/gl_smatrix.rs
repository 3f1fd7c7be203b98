//! Factorizing S-matrix of the deformed free field on velocity-ordered tuples.
//!
//! ```bash
//! cargo run --example gl_smatrix
//! ```

use wedgeqft::deformation::{factorization_residual, gl_smatrix, FinalWedge};
use wedgeqft::fock::{FockSpace, ModeSet, DEFAULT_ORDER_MARGIN};
use wedgeqft::geometry::{standard_warping, Wedge};

fn main() -> wedgeqft::Result<()> {
    let modes = ModeSet::new(2, 1.0, vec![vec![-1.2], vec![-0.4], vec![0.3], vec![1.0]])?;
    let space = FockSpace::new(modes, 4);
    let q0 = standard_warping(2, 1.0, None)?;
    let w = Wedge::right(2);

    let two = gl_smatrix(&space, &w, FinalWedge::Opposite, &q0, 2, DEFAULT_ORDER_MARGIN)?;
    println!("two-particle phases:");
    for c in 0..two.in_basis.len() {
        if let Some((_, z)) = two.column_entry(c) {
            println!("  {:?}  arg = {:+.6}", two.in_basis.tuples()[c], z.arg());
        }
    }
    for n in 3..=4 {
        let s = gl_smatrix(&space, &w, FinalWedge::Opposite, &q0, n, DEFAULT_ORDER_MARGIN)?;
        println!(
            "n = {n}: {} ordered tuples, unitarity {:e}, factorization {:e}",
            s.in_basis.len(),
            s.unitarity_residual(),
            factorization_residual(&s, &two)?
        );
    }
    let same = gl_smatrix(&space, &w, FinalWedge::Same, &q0, 3, DEFAULT_ORDER_MARGIN)?;
    println!("same-wedge n = 3 maps {:?} to row {:?}", same.in_basis.tuples()[0], same.column_entry(0).map(|e| e.0));
    Ok(())
}
