//! Ranks of velocity-ordered scattering states inside the symmetric sectors.
//!
//! ```bash
//! cargo run --example ordered_completeness
//! ```

use wedgeqft::fock::{FockSpace, ModeSet, DEFAULT_ORDER_MARGIN};
use wedgeqft::geometry::{standard_warping, TimeDirection, Wedge};
use wedgeqft::scattering::completeness_check;

fn main() -> wedgeqft::Result<()> {
    let w = Wedge::right(2);
    for m in 3..=5 {
        let momenta = (0..m).map(|i| vec![-1.0 + 0.55 * i as f64]).collect();
        let space = FockSpace::new(ModeSet::new(2, 1.0, momenta)?, 3);
        for n in 2..=3 {
            let q0 = standard_warping(2, 1.0, None)?;
            let r = completeness_check(&space, &w, TimeDirection::Outgoing, n, &q0, DEFAULT_ORDER_MARGIN)?;
            println!(
                "M = {m}, n = {n}: dim {} ordered {} rank {} (undeformed {})",
                r.distinct_dim, r.ordered_count, r.rank, r.rank_undeformed
            );
        }
    }
    Ok(())
}
