//! Klein-Gordon packets: velocity supports, ordering and decay off the
//! propagation cone.
//!
//! ```bash
//! cargo run --release --example wave_packets
//! ```

use wedgeqft::geometry::{LorentzMap, TimeDirection, Wedge};
use wedgeqft::wavepacket::{
    decay_scan, dispersion, log_times, loglog_slope, ordered, velocity, velocity_support,
    KgSolution, MomentumGrid, MomentumProfile,
};

fn main() -> wedgeqft::Result<()> {
    println!("omega(1) = {}", dispersion(1.0, &[1.0])?);
    println!("v(1)     = {:?}", velocity(1.0, &[1.0])?);

    let rest = LorentzMap::identity(2);
    let f = KgSolution::new(MomentumProfile::bump(vec![0.15], 0.05, 1.0)?, 1.0)?;
    let vs = velocity_support(&f, &rest)?;
    let speeds: Vec<f64> = vs.region.vertices().iter().map(|v| v.spatial()[0]).collect();
    println!("velocity support of a bump on [0.1, 0.2]: {speeds:?}");

    let fast = KgSolution::new(MomentumProfile::bump(vec![0.75], 0.01, 1.0)?, 1.0)?;
    let slow = KgSolution::new(MomentumProfile::bump(vec![0.1], 0.01, 1.0)?, 1.0)?;
    let pair = [fast, slow];
    let w = Wedge::right(2);
    for dir in [TimeDirection::Outgoing, TimeDirection::Incoming] {
        println!("(fast, slow) ordered {}: {}", dir.name(), ordered(&pair, &w, &rest, dir, 1e-9)?);
    }

    let g = KgSolution::new(MomentumProfile::bump(vec![0.0], 1.0, 1.0)?, 1.0)?;
    let times = log_times(10.0, 100.0, 16);
    let grid = MomentumGrid::default();
    for u in [0.0, 3.0] {
        let scan = decay_scan(&g, &[u], &times, &grid)?;
        println!("ray u = {u}: log-log slope {:.3}", loglog_slope(&scan).unwrap_or(f64::NAN));
    }
    Ok(())
}
