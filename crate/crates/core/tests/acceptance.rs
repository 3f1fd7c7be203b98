//! Acceptance suite: one PASS/FAIL line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wedgeqft::cli::{execute, Command};
use wedgeqft::config::Config;
use wedgeqft::deformation::{
    compose_deformed_smatrix, factorization_residual, free_smatrix, gl_smatrix, s_q,
    wedge_swap_check, FinalWedge,
};
use wedgeqft::fock::{ordered_basis, FockSpace, ModeSet, DEFAULT_ORDER_MARGIN};
use wedgeqft::geometry::{
    standard_warping, warping_for_wedge, FourVector, LorentzMap, TimeDirection, Wedge,
};
use wedgeqft::oscillatory::{
    dreg_identity_check, eps_scan, eps_slope, j1_closed, j1_quadrature, QuadratureSpec,
};
use wedgeqft::scattering::{completeness_check, mode_packet, verify_defw};
use wedgeqft::wavepacket::{
    decay_scan, log_times, loglog_slope, on_shell, KgSolution, MomentumGrid, MomentumProfile,
};
use wedgeqft::Result;

const MARGIN: f64 = DEFAULT_ORDER_MARGIN;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { ok, detail })
}

fn modes(momenta: &[f64]) -> ModeSet {
    ModeSet::new(2, 1.0, momenta.iter().map(|&k| vec![k]).collect()).unwrap()
}

fn evenly_spaced(m: usize) -> Vec<f64> {
    (0..m).map(|i| -1.2 + 2.4 * i as f64 / (m - 1) as f64).collect()
}

fn random_lorentz(rng: &mut ChaCha8Rng, d: usize) -> LorentzMap {
    let boost = LorentzMap::boost(d, rng.gen_range(1..d), rng.gen_range(-1.5..1.5)).unwrap();
    if d < 3 {
        return boost;
    }
    LorentzMap::rotation(d, 1, 2, rng.gen_range(-3.0..3.0))
        .unwrap()
        .compose(&boost)
}

fn warping_suite() -> Result<Outcome> {
    let mut exact = true;
    let q2 = standard_warping(2, 1.0, None)?;
    exact &= q2.matrix() == &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let q3 = standard_warping(3, 0.7, None)?;
    exact &= q3.matrix()
        == &DMatrix::from_row_slice(3, 3, &[0.0, 0.7, 0.0, 0.7, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let q4 = standard_warping(4, 2.0, Some(3.0))?;
    exact &= q4.matrix()
        == &DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 2.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, -3.0, 0.0,
            ],
        );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut antisym = 0.0f64;
    let mut covariance = 0.0f64;
    for d in 2..=4 {
        for _ in 0..100 {
            let eta = (d == 4).then(|| rng.gen_range(-5.0..5.0));
            let q0 = standard_warping(d, rng.gen_range(0.0..5.0), eta)?;
            antisym = antisym.max(q0.antisymmetry_residual());
            let base = Wedge::new(random_lorentz(&mut rng, d), FourVector::zeros(d))?;
            let lambda = random_lorentz(&mut rng, d);
            let qw = warping_for_wedge(&base, &q0);
            let moved = warping_for_wedge(&base.transformed(&lambda, &FourVector::zeros(d)), &q0);
            let explicit = lambda.matrix() * qw.matrix() * lambda.inverse().matrix();
            let scale = qw.matrix().amax().max(1.0);
            covariance = covariance.max((moved.matrix() - explicit).amax() / scale);
        }
    }
    outcome(
        exact && antisym <= 1e-14 && covariance <= 1e-12,
        format!("exact forms {exact}, antisymmetry {antisym:.2e}, covariance {covariance:.2e}"),
    )
}

fn warp_properties() -> Result<Outcome> {
    let mut cfg = Config::default_experiment();
    cfg.modes.n_max = 3;
    let out = execute(Command::WarpVerify, &cfg, 0);
    let section = out.section(Command::WarpVerify).expect("section present");
    let worst = section
        .checks
        .iter()
        .filter(|c| c.limit > 0.0 && c.limit < 1.0)
        .map(|c| c.value)
        .fold(0.0, f64::max);
    outcome(
        section.passed() && worst <= 1e-12,
        format!("20 random ladder polynomials, M=4, N=3, max residual {worst:.2e}"),
    )
}

fn deformed_wave_operators() -> Result<Outcome> {
    let space = FockSpace::new(modes(&[-1.2, -0.4, 0.3, 1.0]), 3);
    let w = Wedge::right(2);
    let mut worst = 0.0f64;
    let mut runs = 0;
    for kappa in [0.3, 1.0, 5.0] {
        let q0 = standard_warping(2, kappa, None)?;
        for n in 2..=3 {
            let basis = ordered_basis(&space, &w, TimeDirection::Incoming, n, MARGIN)?;
            for t in basis.tuples() {
                let fs = t.iter().map(|&i| mode_packet(&space, i)).collect::<Result<Vec<_>>>()?;
                let rev: Vec<KgSolution> = fs.iter().rev().cloned().collect();
                for (list, dir) in [(&fs, TimeDirection::Incoming), (&rev, TimeDirection::Outgoing)] {
                    let r = verify_defw(&space, list, &w, &q0, 5.0, dir, MARGIN)?;
                    worst = worst.max(r.max());
                    runs += 1;
                }
            }
        }
    }
    outcome(worst <= 1e-11, format!("{runs} ordered configurations, max residual {worst:.2e}"))
}

fn gl_suite() -> Result<Outcome> {
    let space = FockSpace::new(modes(&evenly_spaced(6)), 4);
    let w = Wedge::right(2);
    let wc = w.complement();
    let q0 = standard_warping(2, 1.0, None)?;
    let qw = warping_for_wedge(&w, &q0);
    let two = gl_smatrix(&space, &w, FinalWedge::Opposite, &q0, 2, MARGIN)?;
    let (mut unitarity, mut factor, mut calcs, mut calcsww) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let lhs_phase = s_q(&space, &warping_for_wedge(&wc, &q0))?.adjoint().compose(&s_q(&space, &qw)?);
    let rhs_phase = s_q(&space, &qw.scaled(2.0))?;
    for n in 1..=4 {
        let opp = gl_smatrix(&space, &w, FinalWedge::Opposite, &q0, n, MARGIN)?;
        let same = gl_smatrix(&space, &w, FinalWedge::Same, &q0, n, MARGIN)?;
        unitarity = unitarity.max(opp.unitarity_residual()).max(same.unitarity_residual());
        if n >= 2 {
            factor = factor.max(factorization_residual(&opp, &two)?);
        }
        let basis = ordered_basis(&space, &w, TimeDirection::Incoming, n, MARGIN)?;
        calcs = calcs.max((lhs_phase.restricted(&basis) - rhs_phase.restricted(&basis)).camax());
        let s0 = free_smatrix(&space, &wc, &w, n, MARGIN)?;
        calcs = calcs.max(compose_deformed_smatrix(&space, &s0, &wc, &w, &q0, MARGIN)?.max_abs_diff(&opp)?);
        let s0 = free_smatrix(&space, &w, &w, n, MARGIN)?;
        calcsww = calcsww.max(compose_deformed_smatrix(&space, &s0, &w, &w, &q0, MARGIN)?.max_abs_diff(&same)?);
    }
    outcome(
        unitarity <= 1e-12 && factor <= 1e-13 && calcs <= 1e-13 && calcsww <= 1e-13,
        format!(
            "M=6, n<=4: unitarity {unitarity:.2e}, factorization {factor:.2e}, opposite wedge {calcs:.2e}, same wedge {calcsww:.2e}"
        ),
    )
}

fn reversal_identities() -> Result<Outcome> {
    let space = FockSpace::new(modes(&evenly_spaced(6)), 4);
    let q = warping_for_wedge(&Wedge::right(2), &standard_warping(2, 1.0, None)?);
    let adjoint = s_q(&space, &q)?.adjoint().max_abs_diff(&s_q(&space, &-&q)?);
    let mut swap = 0.0f64;
    for theta in [0.0, 0.4] {
        let w = Wedge::new(LorentzMap::boost(2, 1, theta)?, FourVector::zeros(2))?;
        for n in 1..=4 {
            swap = swap.max(wedge_swap_check(&space, &w, n, MARGIN)?);
        }
    }
    outcome(
        adjoint <= 1e-13 && swap <= 1e-13,
        format!("adjoint {adjoint:.2e}, wedge swap {swap:.2e}"),
    )
}

fn ordered_completeness() -> Result<Outcome> {
    let w = Wedge::right(2);
    let mut ok = true;
    let mut cases = 0;
    for m in 3..=5 {
        let space = FockSpace::new(modes(&evenly_spaced(m)), 3);
        for n in 2..=3 {
            for dir in [TimeDirection::Outgoing, TimeDirection::Incoming] {
                let mut ranks = Vec::new();
                for kappa in [0.0, 1.0, 5.0] {
                    let r = completeness_check(&space, &w, dir, n, &standard_warping(2, kappa, None)?, MARGIN)?;
                    ok &= r.complete() && r.stable();
                    ranks.push(r.rank);
                }
                ok &= ranks.windows(2).all(|p| p[0] == p[1]);
                cases += 1;
            }
        }
    }
    outcome(ok, format!("{cases} (M, n, direction) cases, ranks equal symmetric dimension"))
}

fn oscillatory() -> Result<Outcome> {
    let spec = QuadratureSpec::new(12.0, 1024, 0.5)?;
    let mut quad = 0.0f64;
    for p in [-2.0, 0.0, 2.0] {
        for pp in [-2.0, 0.5, 2.0] {
            quad = quad.max((j1_quadrature(&spec, p, pp)? - j1_closed(0.5, p, pp)?).norm());
        }
    }
    let slope = eps_slope(&eps_scan(&[0.4, 0.2, 0.1], 0.8, 0.4, 2048)?).unwrap_or(f64::NAN);
    let mut dreg = 0.0f64;
    for sign in [1.0, -1.0] {
        dreg = dreg.max(dreg_identity_check(2.0, 41, 1e-3, sign)?.finite_difference);
    }
    outcome(
        quad <= 1e-6 && (slope - 1.0).abs() <= 0.15 && dreg <= 1e-6,
        format!("quadrature {quad:.2e}, eps slope {slope:.4}, regularizer identity {dreg:.2e}"),
    )
}

fn packet_geometry() -> Result<Outcome> {
    let mut shell = modes(&evenly_spaced(6)).mass_shell_residual();
    let f = KgSolution::new(MomentumProfile::bump(vec![0.0], 1.0, 1.0)?, 1.0)?;
    for k in f.profile().support_boundary_samples(32) {
        let p = on_shell(1.0, &k);
        shell = shell.max((p.minkowski(&p) - 1.0).abs());
    }
    let times = log_times(10.0, 100.0, 24);
    let grid = MomentumGrid { points_per_axis: 4096 };
    let outside = loglog_slope(&decay_scan(&f, &[3.0], &times, &grid)?).unwrap_or(f64::NAN);
    let inside = loglog_slope(&decay_scan(&f, &[0.0], &times, &grid)?).unwrap_or(f64::NAN);
    outcome(
        shell <= 1e-12 && outside <= -4.0 && inside >= -1.0,
        format!("mass shell {shell:.2e}, outside slope {outside:.3}, inside slope {inside:.3}"),
    )
}

fn determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let mut bytes = Vec::new();
    for run_dir in ["a", "b"] {
        let out = dir.path().join(run_dir);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_wedgeqft"))
            .args(["all", "--seed", "11", "--out"])
            .arg(&out)
            .output()?
            .status;
        if !status.success() {
            return outcome(false, format!("`all` exited with {status}"));
        }
        let mut files = vec![std::fs::read(out.join("report.json"))?];
        for csv in ["decay_outside.csv", "decay_inside.csv", "eps_scan.csv"] {
            files.push(std::fs::read(out.join(csv))?);
        }
        bytes.push(files);
    }
    outcome(
        bytes[0] == bytes[1],
        format!("two `all` runs, report.json of {} bytes", bytes[0][0].len()),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "warping matrices", Duration::from_secs(1), warping_suite),
        (2, "warped convolution", Duration::from_secs(30), warp_properties),
        (3, "deformed wave operators", Duration::from_secs(60), deformed_wave_operators),
        (4, "factorizing S-matrix", Duration::from_secs(10), gl_suite),
        (5, "phase adjoint and wedge swap", Duration::from_secs(5), reversal_identities),
        (6, "ordered completeness", Duration::from_secs(30), ordered_completeness),
        (7, "oscillatory integrals", Duration::from_secs(60), oscillatory),
        (8, "wave-packet geometry", Duration::from_secs(120), packet_geometry),
        (9, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(Ok(o)) => (o.ok, o.detail),
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        let in_time = elapsed <= budget;
        let pass = ok && in_time;
        failures += usize::from(!pass);
        println!(
            "{} criterion {id} ({name}): {detail}; {:.2}s of {}s",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
