//! Warped convolution of a field operator and its structural identities.
//!
//! ```bash
//! cargo run --release --example warped_convolution
//! ```

use wedgeqft::fock::{FockSpace, FockVector, ModeSet};
use wedgeqft::geometry::{standard_warping, FourVector, LorentzMap};
use wedgeqft::scattering::field_operator;
use wedgeqft::warp::{verify_warp_properties, warp};

fn main() -> wedgeqft::Result<()> {
    let modes = ModeSet::new(2, 1.0, vec![vec![-1.0], vec![-0.2], vec![0.4], vec![1.1]])?;
    let space = FockSpace::new(modes, 3);
    let q = standard_warping(2, 1.0, None)?;
    let phi = field_operator(&space)?;
    let warped = warp(&phi, &q)?;

    let vac = FockVector::vacuum(&space);
    println!("|phi_Q Omega - phi Omega| = {:e}", warped.apply(&vac).distance(&phi.apply(&vac)));
    println!("|phi_Q - phi| entrywise  = {:.4}", warped.max_abs_diff(&phi));

    let shifts = [FourVector::new(vec![0.3, -1.2])?, FourVector::new(vec![2.0, 0.5])?];
    let boosts = [LorentzMap::boost(2, 1, 0.4)?];
    let report = verify_warp_properties(&phi, &q, &shifts, &boosts)?;
    println!("{report:#?}");
    Ok(())
}
