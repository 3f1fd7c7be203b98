//! Deformed Haag-Ruelle product states against the phase operator on the
//! undeformed product.
//!
//! ```bash
//! cargo run --release --example deformed_scattering
//! ```

use wedgeqft::fock::{FockSpace, ModeSet, DEFAULT_ORDER_MARGIN};
use wedgeqft::geometry::{standard_warping, TimeDirection, Wedge};
use wedgeqft::scattering::{mode_packet, verify_defw};

fn main() -> wedgeqft::Result<()> {
    let modes = ModeSet::new(2, 1.0, vec![vec![-1.0], vec![-0.3], vec![0.5], vec![1.4]])?;
    let space = FockSpace::new(modes, 3);
    let w = Wedge::right(2);
    // slowest first is in-ordered for the right wedge
    let fs = [0, 2, 3]
        .iter()
        .map(|&i| mode_packet(&space, i))
        .collect::<wedgeqft::Result<Vec<_>>>()?;
    let reversed: Vec<_> = fs.iter().rev().cloned().collect();
    for kappa in [0.3, 1.0, 5.0] {
        let q0 = standard_warping(2, kappa, None)?;
        let inc = verify_defw(&space, &fs, &w, &q0, 10.0, TimeDirection::Incoming, DEFAULT_ORDER_MARGIN)?;
        let out = verify_defw(&space, &reversed, &w, &q0, 10.0, TimeDirection::Outgoing, DEFAULT_ORDER_MARGIN)?;
        println!("kappa = {kappa}: in {:e}, out {:e}", inc.max(), out.max());
    }
    match verify_defw(
        &space,
        &reversed,
        &w,
        &standard_warping(2, 1.0, None)?,
        0.0,
        TimeDirection::Incoming,
        DEFAULT_ORDER_MARGIN,
    ) {
        Err(e) => println!("wrong ordering is refused: {e}"),
        Ok(_) => println!("unexpected: unordered list accepted"),
    }
    Ok(())
}
