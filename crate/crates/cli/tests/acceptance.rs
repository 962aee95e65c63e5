//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::DVector;
use num_complex::Complex64;

use renyi_cli::commands::{self, bounds_rows, render_fuzz, Context};
use renyi_cli::{PriorMode, RegionArgs};
use renyi_core::channel::{Ensemble, Povm};
use renyi_core::coding::{binary_pure_channel, burnashev_holevo_e0, charbit_cutoff, quantum_bound_e};
use renyi_core::divergence::{
    alpha_z_divergence, fidelity, in_dpi_region, renyi_classical, renyi_relative_entropy, sandwiched_divergence,
    ProbVector,
};
use renyi_core::fuzz::{collect_checks, run_suite, Check, FuzzConfig, Suite};
use renyi_core::holevo::{holevo_information, mutual_information};
use renyi_core::matcore::{ComplexMatrix, DensityMatrix};
use renyi_core::sampler::{Sampler, Seed};

const SEED: u64 = 42;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn min_slack(checks: &[Check], label: &str) -> f64 {
    checks
        .iter()
        .filter(|c| c.label == label)
        .map(|c| c.slack)
        .fold(f64::INFINITY, f64::min)
}

/// `U diag(p) U†` for a shared unitary.
fn rotated(u: &ComplexMatrix, p: &ProbVector) -> DensityMatrix {
    let d = DVector::from_iterator(p.len(), p.as_slice().iter().map(|&x| Complex64::new(x, 0.0)));
    let m = u * ComplexMatrix::from_diagonal(&d) * u.adjoint();
    DensityMatrix::new(m).unwrap()
}

fn c1_classical_reduction() -> Outcome {
    let start = Instant::now();
    let alphas = [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0];
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| (1..=40).map(move |k| (a, k as f64 * 0.1)))
        .filter(|&(a, z)| in_dpi_region(a, z))
        .collect();
    let mut worst = 0.0f64;
    for i in 0..500 {
        let mut rng = Sampler::new(Seed::new(SEED, i));
        let u = rng.unitary(4);
        let (p, q) = (rng.probability(4), rng.probability(4));
        let (rho, sigma) = (rotated(&u, &p), rotated(&u, &q));
        for &(a, z) in &points {
            let quantum = alpha_z_divergence(&rho, &sigma, a, z).unwrap().value;
            let classical = renyi_classical(&p, &q, a).unwrap().value;
            worst = worst.max((quantum - classical).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!(
            "500 pairs x {} grid points, max |d - D| = {worst:.3e}, {:.2} s",
            points.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_special_cases() -> Outcome {
    let (mut rre_gap, mut sw_gap, mut fid_gap) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..500 {
        let mut rng = Sampler::new(Seed::new(SEED, 1000 + i));
        let rho = rng.hs_density(3, 3).unwrap();
        let sigma = rng.hs_density(3, 3).unwrap();
        for a in [0.3, 0.5, 0.7, 0.9] {
            let z1 = alpha_z_divergence(&rho, &sigma, a, 1.0).unwrap().value;
            rre_gap = rre_gap.max((z1 - renyi_relative_entropy(&rho, &sigma, a).unwrap().value).abs());
        }
        for a in [0.5, 0.7, 0.9, 1.5, 2.0, 3.0] {
            let za = alpha_z_divergence(&rho, &sigma, a, a).unwrap().value;
            sw_gap = sw_gap.max((za - sandwiched_divergence(&rho, &sigma, a).unwrap().value).abs());
        }
        let half = sandwiched_divergence(&rho, &sigma, 0.5).unwrap().value;
        fid_gap = fid_gap.max((half + fidelity(&rho, &sigma).unwrap().log2()).abs());
    }
    outcome(
        rre_gap <= 1e-10 && sw_gap <= 1e-10 && fid_gap <= 1e-9,
        format!("z=1 vs RRE {rre_gap:.3e}, z=alpha vs sandwiched {sw_gap:.3e}, half-order vs -log F {fid_gap:.3e}"),
    )
}

fn c3_dpi() -> Outcome {
    let start = Instant::now();
    let r = run_suite(&FuzzConfig::new(Suite::Dpi, 1000, 3, SEED)).unwrap();
    let elapsed = start.elapsed();
    outcome(
        r.violations.is_empty() && r.min_slack >= -1e-9 && elapsed < Duration::from_secs(60),
        format!(
            "{} checks, {} violations, min slack {:.3e}, {:.2} s",
            r.checks,
            r.violations.len(),
            r.min_slack,
            elapsed.as_secs_f64()
        ),
    )
}

fn c4_ordering() -> Outcome {
    let mut cfg = FuzzConfig::new(Suite::Ordering, 200, 3, SEED);
    cfg.tolerance = 1e-10;
    let r = run_suite(&cfg).unwrap();
    outcome(
        r.violations.is_empty(),
        format!("{} consecutive grid comparisons, min slack {:.3e}", r.checks, r.min_slack),
    )
}

fn c5_holevo_renyi() -> Outcome {
    let checks = collect_checks(&FuzzConfig::new(Suite::HolevoRenyi, 1000, 4, SEED)).unwrap();
    let ineq = min_slack(&checks, "holevo_renyi");
    let eq = min_slack(&checks, "holevo_renyi_equality");
    let commuting = checks.iter().filter(|c| c.label == "holevo_renyi_equality").count();
    outcome(
        ineq >= -1e-9 && eq >= -1e-9 && commuting > 0,
        format!(
            "{} inequality checks, min slack {ineq:.3e}; {commuting} commuting checks, max |lhs - rhs| {:.3e}",
            checks.len() - commuting,
            -eq
        ),
    )
}

fn c6_sibson() -> Outcome {
    let checks = collect_checks(&FuzzConfig::new(Suite::SibsonBound, 1000, 4, SEED)).unwrap();
    let bound = min_slack(&checks, "sibson_bound");
    let identity = min_slack(&checks, "gallager_identity");
    outcome(
        bound >= -1e-9 && identity >= -1e-10,
        format!("bound min slack {bound:.3e}, max |E0 - s I| {:.3e}", -identity),
    )
}

fn c7_binary_bounds() -> Outcome {
    let rows = bounds_rows(0.05, &[1.0], PriorMode::Uniform).unwrap();
    let mut closed = 0.0f64;
    let mut dominance = f64::INFINITY;
    let mut coincide = 0.0f64;
    for r in &rows {
        let c = r.c;
        let script = -((1.0 + c) / 2.0).log2();
        let tilde = -((1.0 + c.sqrt()) / 2.0).log2();
        let e_tilde = r.e_tilde_sq.unwrap();
        closed = closed.max(max_abs([r.e_script - script, e_tilde - tilde, r.e0_q - script]));
        dominance = dominance.min(r.e_script - e_tilde);
        coincide = coincide.max((r.e_script - r.e0_q).abs());
    }
    let mut extended = 0.0f64;
    for (k, row) in rows.iter().enumerate() {
        let e = binary_pure_channel(k as f64 * 0.05).unwrap().uniform_ensemble();
        for j in 1..=10 {
            let s = j as f64 / 10.0;
            extended = extended.max((quantum_bound_e(&e, s).unwrap() - burnashev_holevo_e0(&e, s).unwrap()).abs());
        }
        let direct = charbit_cutoff(&e).unwrap().value;
        closed = closed.max((direct - row.e_tilde_sq.unwrap()).abs());
    }
    outcome(
        rows.len() == 21 && closed <= 1e-9 && dominance >= -1e-9 && coincide <= 1e-9 && extended <= 1e-9,
        format!(
            "21 overlaps, closed-form gap {closed:.3e}, min(E - E~) {dominance:.3e}, |E - E0q| {coincide:.3e}, s-grid {extended:.3e}"
        ),
    )
}

fn c8_holevo_classic() -> Outcome {
    let ket = |v: [f64; 2]| DVector::from_vec(vec![Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)]);
    let orth = Ensemble::uniform(vec![
        DensityMatrix::pure(&ket([1.0, 0.0])).unwrap(),
        DensityMatrix::pure(&ket([0.0, 1.0])).unwrap(),
    ])
    .unwrap();
    let c_orth = holevo_information(&orth);
    let joint = renyi_core::channel::joint_distribution(&orth, &Povm::computational(2)).unwrap();
    let i_orth = mutual_information(&joint);
    let half = binary_pure_channel(0.25).unwrap().uniform_ensemble();
    let c_half = holevo_information(&half);
    let h2 = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
    let oracle = h2(0.75);
    outcome(
        (c_orth - 1.0).abs() <= 1e-12 && (i_orth - 1.0).abs() <= 1e-12 && (c_half - oracle).abs() <= 1e-9,
        format!("orthogonal C = {c_orth}, I = {i_orth}; overlap 1/2 C = {c_half:.12} vs h2(3/4) = {oracle:.12}"),
    )
}

/// Membership by integer arithmetic on grid indices (α = i/100, z = j/100).
fn region_oracle(i: i64, j: i64) -> bool {
    if i < 100 {
        j >= i.max(100 - i)
    } else if i == 100 {
        false
    } else if i <= 200 {
        i <= 2 * j && j <= i
    } else {
        i - 100 <= j && j <= i
    }
}

fn c9_region() -> Outcome {
    let mut buf = Vec::new();
    commands::region(&Context::default(), &RegionArgs::default(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header_ok = rows.next() == Some("alpha,z,in_region");
    let (mut count, mut mismatches, mut area) = (0usize, 0usize, 0usize);
    let mut expected = Vec::new();
    for i in 1..=400 {
        for j in 1..=400 {
            expected.push((i, j));
        }
    }
    for (row, &(i, j)) in rows.zip(&expected) {
        count += 1;
        let oracle = region_oracle(i, j);
        let want = format!("{},{},{}", i as f64 / 100.0, j as f64 / 100.0, u8::from(oracle));
        if row != want {
            mismatches += 1;
        }
        area += usize::from(row.ends_with(",1"));
    }
    let oracle_area = expected.iter().filter(|&&(i, j)| region_oracle(i, j)).count();
    let spots = text.lines().any(|l| l == "0.5,0.5,1")
        && text.lines().any(|l| l == "1.5,0.6,0")
        && text.lines().any(|l| l == "3,2.5,1");
    outcome(
        header_ok && count == expected.len() && mismatches == 0 && area == oracle_area && spots,
        format!("{count} grid rows, {mismatches} mismatches, area {area} vs recount {oracle_area}, spot points {spots}"),
    )
}

fn c10_determinism() -> Outcome {
    let ctx = Context {
        seed: SEED,
        ..Context::default()
    };
    let mut identical = 0;
    for suite in Suite::ALL {
        let render = || {
            let report = run_suite(&FuzzConfig::new(suite, 100, 3, SEED)).unwrap();
            let mut buf = Vec::new();
            render_fuzz(&ctx, &report, &mut buf).unwrap();
            buf
        };
        if render() == render() {
            identical += 1;
        }
    }
    let checks = || format!("{:?}", collect_checks(&FuzzConfig::new(Suite::Dpi, 100, 3, SEED)).unwrap());
    let detailed = checks() == checks();
    outcome(
        identical == Suite::ALL.len() && detailed,
        format!("{identical}/{} suite reports byte-identical, per-check dump identical {detailed}", Suite::ALL.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("classical reduction", c1_classical_reduction),
        ("special-case identities", c2_special_cases),
        ("data-processing fuzz", c3_dpi),
        ("z-ordering monotonicity", c4_ordering),
        ("Holevo-Renyi inequality fuzz", c5_holevo_renyi),
        ("Sibson bound and Gallager identity", c6_sibson),
        ("binary pure-channel bounds", c7_binary_bounds),
        ("Holevo information examples", c8_holevo_classic),
        ("region map recount", c9_region),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2} {name}: {}", k + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
