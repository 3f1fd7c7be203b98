//! Truncated Fock space: ladder operators, commutators and truncation loss.
//!
//! ```bash
//! cargo run --example fock_ladder
//! ```

use wedgeqft::fock::{annihilate, create, symmetrizer, FockSpace, FockVector, ModeSet};

fn main() -> wedgeqft::Result<()> {
    let modes = ModeSet::new(2, 1.0, vec![vec![-0.5], vec![0.0], vec![0.7]])?;
    let space = FockSpace::new(modes, 3);
    println!("sector dimensions: {:?}", (0..=3).map(|n| space.sector_dim(n)).collect::<Vec<_>>());

    let vac = FockVector::vacuum(&space);
    let one = create(&space, 2)?.apply(&vac);
    let two = create(&space, 2)?.apply(&one);
    println!("|a*(2)a*(2) Omega|^2 = {:.12}", two.norm().powi(2));
    println!("a(1) Omega = 0: {}", annihilate(&space, 1)?.apply(&vac).norm() == 0.0);

    let ccr = annihilate(&space, 0)?
        .mul(&create(&space, 0)?)
        .sub(&create(&space, 0)?.mul(&annihilate(&space, 0)?))
        .restricted_to(space.n_max() - 1);
    let expected = symmetrizer(&space).restricted_to(space.n_max() - 1);
    println!("[a(0), a*(0)] - P_sym below the top sector: {:e}", ccr.max_abs_diff(&expected));

    let full = FockVector::basis(&space, &[0, 0, 0])?;
    let pushed = create(&space, 1)?.apply(&full);
    println!("norm^2 pushed past the truncation: {}", pushed.discarded_norm_sq());
    Ok(())
}
