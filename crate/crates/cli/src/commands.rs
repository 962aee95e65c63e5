//! Command implementations. Each writes '#' comment lines (version, seed,
//! log base) followed by a header and its rows.

use std::io::Write;

use serde::Serialize;

use renyi_core::coding::{binary_pure_channel, burnashev_holevo_e0, charbit_cutoff, quantum_bound_e};
use renyi_core::divergence::{
    alpha_z_divergence, fidelity, in_dpi_region, kl_divergence, renyi_classical, renyi_relative_entropy,
    sandwiched_divergence, umegaki_relative_entropy, DivergenceValue, LogBase, ProbVector,
};
use renyi_core::fuzz::{run_suite, Check, FuzzConfig, FuzzReport, Suite};
use renyi_core::holevo::{generalized_holevo_check, holevo_renyi_check, optimal_z, renyi_bound};
use renyi_core::matcore::DensityMatrix;

use crate::format::{num, opt_num};
use crate::io::{load_ensemble, load_povm, load_state};
use crate::{BoundsArgs, CheckArgs, CliError, EvalArgs, FuzzArgs, Measure, Outcome, PriorMode, RegionArgs, VERSION};

/// Settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Context {
    pub seed: u64,
    pub base: LogBase,
}

impl Default for Context {
    fn default() -> Self {
        Self {
            seed: 0,
            base: LogBase::Two,
        }
    }
}

fn preamble(out: &mut dyn Write, ctx: &Context, command: &str) -> std::io::Result<()> {
    writeln!(out, "# renyi {VERSION} {command}")?;
    writeln!(out, "# seed: {}", ctx.seed)?;
    writeln!(out, "# log_base: {}", ctx.base)
}

/// Points `k·step` lying in `(lo, hi]`, skipping non-positive values.
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!("empty range ({lo}, {hi}]")));
    }
    // index arithmetic keeps grid points exact multiples of the step
    let first = ((lo.max(0.0) / step) + 1e-9).floor() as i64 + 1;
    let last = ((hi / step) + 1e-9).floor() as i64;
    Ok((first..=last).map(|k| k as f64 * step).collect())
}

pub fn region(ctx: &Context, args: &RegionArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let alphas = grid(args.alpha_min, args.alpha_max, args.step)?;
    let zs = grid(args.z_min, args.z_max, args.step)?;
    preamble(out, ctx, "region")?;
    writeln!(out, "# step: {}", num(args.step))?;
    writeln!(out, "alpha,z,in_region")?;
    for &a in &alphas {
        for &z in &zs {
            writeln!(out, "{},{},{}", num(a), num(z), u8::from(in_dpi_region(a, z)))?;
        }
    }
    Ok(Outcome::Pass)
}

/// One row of the binary pure-channel bound comparison, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow {
    pub c: f64,
    pub s: f64,
    pub e_script: f64,
    /// The cutoff bound exists only at `s = 1`.
    pub e_tilde_sq: Option<f64>,
    pub e0_q: f64,
}

pub fn bounds_rows(step: f64, s_values: &[f64], mode: PriorMode) -> Result<Vec<BoundsRow>, CliError> {
    if !(step > 0.0 && step < 1.0) {
        return Err(CliError::Usage(format!("overlap step must lie in (0, 1), got {step}")));
    }
    if let Some(s) = s_values.iter().find(|s| !(0.0..=1.0).contains(*s)) {
        return Err(CliError::Usage(format!("s must lie in [0, 1], got {s}")));
    }
    let mut cs = vec![0.0];
    cs.extend(grid(0.0, 1.0, step)?);
    let mut rows = Vec::new();
    for c in cs {
        let ch = binary_pure_channel(c)?;
        let uniform = ch.uniform_ensemble();
        // the cutoff bound already minimises over the prior
        let tilde = charbit_cutoff(&uniform)?.value;
        for &s in s_values {
            let (e_script, e0_q) = match mode {
                PriorMode::Uniform => (quantum_bound_e(&uniform, s)?, burnashev_holevo_e0(&uniform, s)?),
                PriorMode::Optimized => (
                    ch.best_prior(|e| quantum_bound_e(e, s)).1,
                    ch.best_prior(|e| burnashev_holevo_e0(e, s)).1,
                ),
            };
            rows.push(BoundsRow {
                c,
                s,
                e_script,
                e_tilde_sq: (s == 1.0).then_some(tilde),
                e0_q,
            });
        }
    }
    Ok(rows)
}

pub fn bounds(ctx: &Context, args: &BoundsArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let rows = bounds_rows(args.step, &args.s, args.prior_mode)?;
    preamble(out, ctx, "bounds")?;
    writeln!(out, "# prior_mode: {}", args.prior_mode)?;
    writeln!(out, "c,s,E_script,E_tilde_sq,E0_q")?;
    let b = |v: f64| num(ctx.base.from_bits(v));
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            num(r.c),
            num(r.s),
            b(r.e_script),
            r.e_tilde_sq.map(b).unwrap_or_default(),
            b(r.e0_q)
        )?;
    }
    Ok(Outcome::Pass)
}

/// Suites whose two sides are logarithmic quantities.
fn log_valued(suite: Suite) -> bool {
    suite != Suite::HolevoRenyi
}

fn check_line(kind: &str, report: &FuzzReport, c: &Check, base: LogBase) -> String {
    let scale = |v: f64| {
        if log_valued(report.config.suite) {
            base.from_bits(v)
        } else {
            v
        }
    };
    format!(
        "{kind} instance={} seed={} stream={} label={} alpha={} z={} s={} lhs={} rhs={} slack={}",
        c.instance,
        report.config.seed,
        c.instance,
        c.label,
        opt_num(c.alpha),
        opt_num(c.z),
        opt_num(c.s),
        num(scale(c.lhs)),
        num(scale(c.rhs)),
        num(scale(c.slack)),
    )
}

/// Renders a fuzz report: one line per violation and anomaly, then a summary.
pub fn render_fuzz(ctx: &Context, report: &FuzzReport, out: &mut dyn Write) -> std::io::Result<()> {
    let cfg = &report.config;
    preamble(out, ctx, "fuzz")?;
    writeln!(
        out,
        "# suite: {} n: {} dim: {} alpha: {} z: {} letters: {} tolerance: {}",
        cfg.suite,
        cfg.n,
        cfg.dim,
        opt_num(cfg.alpha),
        opt_num(cfg.z),
        cfg.letters.map(|l| l.to_string()).unwrap_or_default(),
        num(cfg.tolerance)
    )?;
    for c in &report.violations {
        writeln!(out, "{}", check_line("violation", report, c, ctx.base))?;
    }
    for c in &report.anomalies {
        writeln!(out, "{}", check_line("anomaly", report, c, ctx.base))?;
    }
    let worst = report.worst.as_ref();
    let min_slack = if log_valued(cfg.suite) {
        ctx.base.from_bits(report.min_slack)
    } else {
        report.min_slack
    };
    writeln!(
        out,
        "summary suite={} n={} checks={} violations={} anomalies={} min_slack={} worst_instance={} worst_seed={}",
        cfg.suite,
        cfg.n,
        report.checks,
        report.violations.len(),
        report.anomalies.len(),
        num(min_slack),
        worst.map(|c| c.instance.to_string()).unwrap_or_default(),
        worst.map(|c| format!("{}:{}", cfg.seed, c.instance)).unwrap_or_default(),
    )
}

pub fn fuzz_config(ctx: &Context, args: &FuzzArgs) -> FuzzConfig {
    let mut cfg = FuzzConfig::new(args.suite, args.n, args.dim, ctx.seed);
    cfg.alpha = args.alpha;
    cfg.z = args.z;
    cfg.letters = args.letters;
    cfg.tolerance = args.tolerance;
    cfg
}

pub fn fuzz(ctx: &Context, args: &FuzzArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let report = run_suite(&fuzz_config(ctx, args))?;
    render_fuzz(ctx, &report, out)?;
    Ok(if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Violation
    })
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    measure: &'static str,
    alpha: Option<f64>,
    z: Option<f64>,
    value: serde_json::Value,
    log_base: Option<&'static str>,
}

fn json_number(x: f64) -> serde_json::Value {
    if x == f64::INFINITY {
        return "inf".into();
    }
    // round-trip through the 12-digit rendering so output is byte-stable
    let rounded: f64 = num(x).parse().expect("formatted number parses");
    serde_json::Number::from_f64(rounded).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn diagonal_of(rho: &DensityMatrix, which: &str) -> Result<ProbVector, CliError> {
    let m = rho.matrix();
    let d = rho.dim();
    for i in 0..d {
        for j in 0..d {
            if i != j && m[(i, j)].norm() > 1e-10 {
                return Err(CliError::Usage(format!(
                    "classical measure needs diagonal states; {which} has entry ({i}, {j}) = {}",
                    m[(i, j)]
                )));
            }
        }
    }
    Ok(ProbVector::new((0..d).map(|i| m[(i, i)].re.max(0.0)).collect())?)
}

fn need(v: Option<f64>, flag: &str, measure: Measure) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("measure {} requires --{flag}", measure.name())))
}

/// Evaluates the requested measure; the value is in bits except for fidelity.
pub fn evaluate(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    measure: Measure,
    alpha: Option<f64>,
    z: Option<f64>,
) -> Result<f64, CliError> {
    let value = |d: DivergenceValue| d.value;
    Ok(match measure {
        Measure::Classical => {
            let p = diagonal_of(rho, "first state")?;
            let q = diagonal_of(sigma, "second state")?;
            let a = need(alpha, "alpha", measure)?;
            if a == 1.0 {
                value(kl_divergence(&p, &q)?)
            } else {
                value(renyi_classical(&p, &q, a)?)
            }
        }
        Measure::Rre => value(renyi_relative_entropy(rho, sigma, need(alpha, "alpha", measure)?)?),
        Measure::Sandwiched => value(sandwiched_divergence(rho, sigma, need(alpha, "alpha", measure)?)?),
        Measure::Alphaz => value(alpha_z_divergence(
            rho,
            sigma,
            need(alpha, "alpha", measure)?,
            need(z, "z", measure)?,
        )?),
        Measure::Umegaki => value(umegaki_relative_entropy(rho, sigma)?),
        Measure::Fidelity => fidelity(rho, sigma)?,
    })
}

pub fn eval(ctx: &Context, args: &EvalArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let rho = load_state(&args.state_a)?;
    let sigma = load_state(&args.state_b)?;
    if rho.dim() != sigma.dim() {
        return Err(CliError::Usage(format!(
            "states have different dimensions ({} and {})",
            rho.dim(),
            sigma.dim()
        )));
    }
    let bits = evaluate(&rho, &sigma, args.measure, args.alpha, args.z)?;
    let logarithmic = args.measure != Measure::Fidelity;
    let uses_alpha = !matches!(args.measure, Measure::Umegaki | Measure::Fidelity);
    let record = EvalOutput {
        measure: args.measure.name(),
        alpha: args.alpha.filter(|_| uses_alpha),
        z: args.z.filter(|_| args.measure == Measure::Alphaz),
        value: json_number(if logarithmic { ctx.base.from_bits(bits) } else { bits }),
        log_base: logarithmic.then_some(ctx.base.label()),
    };
    writeln!(out, "{}", serde_json::to_string(&record).expect("serialisable"))?;
    Ok(Outcome::Pass)
}

pub fn check(ctx: &Context, args: &CheckArgs, out: &mut dyn Write) -> Result<Outcome, CliError> {
    const TOL: f64 = renyi_core::fuzz::FUZZ_TOL;
    let e = load_ensemble(&args.ensemble)?;
    let m = load_povm(&args.povm)?;
    if e.dim() != m.dim() {
        return Err(CliError::Usage(format!(
            "ensemble dimension {} does not match POVM dimension {}",
            e.dim(),
            m.dim()
        )));
    }
    let mut reports = vec![(generalized_holevo_check(&e, &m)?, true)];
    for &alpha in &args.alpha {
        let z = args.z.unwrap_or_else(|| optimal_z(alpha));
        reports.push((holevo_renyi_check(&e, &m, alpha, z)?, false));
        reports.push((renyi_bound(&e, &m, alpha)?, true));
    }
    preamble(out, ctx, "check")?;
    writeln!(out, "label,alpha,z,lhs,rhs,slack,status")?;
    let mut outcome = Outcome::Pass;
    for (r, logarithmic) in reports {
        let status = if r.holds(TOL) {
            "ok"
        } else if r.label == "renyi_bound" && r.alpha.is_some_and(|a| a > 1.0) {
            "anomaly"
        } else {
            outcome = Outcome::Violation;
            "violation"
        };
        let v = |x: f64| num(if logarithmic { ctx.base.from_bits(x) } else { x });
        writeln!(
            out,
            "{},{},{},{},{},{},{status}",
            r.label,
            opt_num(r.alpha),
            opt_num(r.z),
            v(r.lhs),
            v(r.rhs),
            v(r.slack)
        )?;
    }
    Ok(outcome)
}
