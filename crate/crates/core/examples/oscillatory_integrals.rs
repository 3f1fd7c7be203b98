//! Gaussian-regularized oscillatory integrals and their zero-regulator limit.
//!
//! ```bash
//! cargo run --release --example oscillatory_integrals
//! ```

use wedgeqft::oscillatory::{
    dreg_identity_check, eps_scan, eps_slope, j1_closed, j1_flat_top, j1_quadrature, QuadratureSpec,
};

fn main() -> wedgeqft::Result<()> {
    let spec = QuadratureSpec::new(12.0, 1024, 0.5)?;
    for (p, pp) in [(0.0, 0.0), (1.0, 0.5), (-1.5, 2.0)] {
        let quad = j1_quadrature(&spec, p, pp)?;
        let exact = j1_closed(0.5, p, pp)?;
        println!("J(p={p}, p'={pp}) = {exact:.10}  quadrature error {:e}", (quad - exact).norm());
    }

    let scan = eps_scan(&[0.4, 0.2, 0.1], 0.8, 0.4, 2048)?;
    for s in &scan {
        println!("eps = {:.1}: |J - limit| = {:.6e}", s.eps, s.abs_err);
    }
    println!("fitted order in eps: {:.4}", eps_slope(&scan).unwrap_or(f64::NAN));

    let flat = j1_flat_top(4.0, 512, 0.8, 0.4)?;
    println!("flat-top regularizer: {flat:.6}");
    let d = dreg_identity_check(2.0, 41, 1e-3, 1.0)?;
    println!("regularizer identity: analytic {:e}, stencil {:e}", d.analytic, d.finite_difference);
    Ok(())
}
