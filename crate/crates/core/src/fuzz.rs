//! Randomised verification suites for the inequalities in this crate.
//!
//! Instance `i` of a run draws all of its randomness from
//! `Seed { master: seed, stream: i }`, so a run is a pure function of the
//! master seed and any single instance can be replayed on its own.
//! Instances are evaluated in parallel and reduced in index order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{induced_channel, Ensemble, Povm};
use crate::coding::{gallager_e0_sq, quantum_bound_e, sibson_mi};
use crate::divergence::{alpha_z_divergence, in_dpi_region, renyi_from_sum};
use crate::error::{Error, Result};
use crate::holevo::{f_sq, holevo_renyi_check, optimal_z, renyi_bound};
use crate::matcore::DensityMatrix;
use crate::sampler::{Sampler, Seed};

/// Default violation threshold.
pub const FUZZ_TOL: f64 = 1e-9;

/// Orders used by the ordering suite when none is forced.
pub const ORDERING_ALPHAS: [f64; 4] = [0.3, 0.7, 1.5, 3.0];
/// Orders used by the Holevo-Rényi family of suites when none is forced.
pub const BOUND_ALPHAS: [f64; 6] = [0.3, 0.5, 0.7, 1.5, 2.0, 3.0];
pub const PROPOSITION_S: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
/// Points in each z-grid of the ordering suite.
pub const ORDERING_GRID_POINTS: usize = 50;

const MAX_LETTERS: usize = 4;
const MAX_OUTCOMES: usize = 5;
/// Every `COMMUTING_EVERY`-th ensemble instance is diagonal and measured in
/// the computational basis.
const COMMUTING_EVERY: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Dpi,
    Ordering,
    HolevoRenyi,
    RenyiBound,
    SibsonBound,
    Proposition,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Dpi,
        Suite::Ordering,
        Suite::HolevoRenyi,
        Suite::RenyiBound,
        Suite::SibsonBound,
        Suite::Proposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dpi => "dpi",
            Suite::Ordering => "ordering",
            Suite::HolevoRenyi => "holevo_renyi",
            Suite::RenyiBound => "renyi_bound",
            Suite::SibsonBound => "sibson_bound",
            Suite::Proposition => "proposition",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub suite: Suite,
    pub n: usize,
    /// Fixed dimension for `dpi`/`ordering`, maximum dimension otherwise.
    pub dim: usize,
    pub seed: u64,
    /// Forces a single Rényi order.
    pub alpha: Option<f64>,
    /// Forces `z` (otherwise `optimal_z(α)`, or sampled for `dpi`).
    pub z: Option<f64>,
    /// Forces the alphabet size of sampled ensembles.
    pub letters: Option<usize>,
    pub tolerance: f64,
}

impl FuzzConfig {
    pub fn new(suite: Suite, n: usize, dim: usize, seed: u64) -> Self {
        Self {
            suite,
            n,
            dim,
            seed,
            alpha: None,
            z: None,
            letters: None,
            tolerance: FUZZ_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        if !(2..=8).contains(&self.dim) {
            return Err(Error::Parameter(format!("dimension must lie in 2..=8, got {}", self.dim)));
        }
        if let Some(l) = self.letters {
            if l == 0 {
                return Err(Error::Parameter("letters must be at least 1".into()));
            }
        }
        if let Some(a) = self.alpha {
            crate::divergence::check_alpha(a)?;
        }
        Ok(())
    }
}

/// One evaluated inequality inside a fuzz run.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub instance: usize,
    pub label: &'static str,
    pub alpha: Option<f64>,
    pub z: Option<f64>,
    pub s: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Non-negative when the check passes; equality checks use `−|lhs − rhs|`.
    pub slack: f64,
}

impl Check {
    fn le(instance: usize, label: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = if lhs == rhs { 0.0 } else { rhs - lhs };
        Self {
            instance,
            label,
            alpha: None,
            z: None,
            s: None,
            lhs,
            rhs,
            slack,
        }
    }

    fn eq(instance: usize, label: &'static str, lhs: f64, rhs: f64) -> Self {
        Self {
            slack: -(lhs - rhs).abs(),
            ..Self::le(instance, label, lhs, rhs)
        }
    }

    fn alpha(mut self, alpha: f64, z: Option<f64>) -> Self {
        self.alpha = Some(alpha);
        self.z = z;
        self
    }

    fn at_s(mut self, s: f64) -> Self {
        self.s = Some(s);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub checks: usize,
    pub min_slack: f64,
    /// The check with the smallest slack.
    pub worst: Option<Check>,
    /// Checks with `slack < −tolerance`.
    pub violations: Vec<Check>,
    /// Failures that are reported but not counted as violations.
    pub anomalies: Vec<Check>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs a suite and returns its report.
pub fn run_suite(cfg: &FuzzConfig) -> Result<FuzzReport> {
    let checks = collect_checks(cfg)?;
    Ok(summarise(cfg, checks))
}

/// Evaluates every instance of a suite and returns all checks in order.
pub fn collect_checks(cfg: &FuzzConfig) -> Result<Vec<Check>> {
    cfg.validate()?;
    let per_instance: Vec<Result<Vec<Check>>> = (0..cfg.n)
        .into_par_iter()
        .map(|i| run_instance(cfg, i))
        .collect();
    let mut all = Vec::new();
    for r in per_instance {
        all.extend(r?);
    }
    Ok(all)
}

fn summarise(cfg: &FuzzConfig, checks: Vec<Check>) -> FuzzReport {
    let mut report = FuzzReport {
        config: cfg.clone(),
        checks: checks.len(),
        min_slack: f64::INFINITY,
        worst: None,
        violations: Vec::new(),
        anomalies: Vec::new(),
    };
    for c in checks {
        let failed = c.slack.is_nan() || c.slack < -cfg.tolerance;
        // Above-one orders of the log-form bound are reported separately.
        let anomaly = failed && c.label == "renyi_bound" && c.alpha.is_some_and(|a| a > 1.0);
        if !anomaly && (c.slack < report.min_slack || c.slack.is_nan()) {
            report.min_slack = c.slack;
            report.worst = Some(c.clone());
        }
        if anomaly {
            report.anomalies.push(c);
        } else if failed {
            report.violations.push(c);
        }
    }
    report
}

fn run_instance(cfg: &FuzzConfig, i: usize) -> Result<Vec<Check>> {
    let mut rng = Sampler::new(Seed::new(cfg.seed, i as u64));
    match cfg.suite {
        Suite::Dpi => dpi_instance(cfg, i, &mut rng),
        Suite::Ordering => ordering_instance(cfg, i, &mut rng),
        Suite::HolevoRenyi | Suite::RenyiBound | Suite::SibsonBound | Suite::Proposition => {
            let inst = sample_instance(cfg, i, &mut rng)?;
            match cfg.suite {
                Suite::HolevoRenyi => holevo_renyi_instance(cfg, i, &inst),
                Suite::RenyiBound => renyi_bound_instance(cfg, i, &inst),
                Suite::SibsonBound => sibson_instance(cfg, i, &inst),
                _ => proposition_instance(i, &inst),
            }
        }
    }
}

/// Samples `(α, z)` uniformly over a bounded part of the DPI region,
/// keeping α at least 0.02 away from 1.
pub fn sample_region_point(rng: &mut Sampler) -> (f64, f64) {
    if rng.uniform() < 0.5 {
        let alpha = rng.range(0.05, 0.98);
        let lo = alpha.max(1.0 - alpha);
        (alpha, rng.range(lo, lo + 2.0))
    } else {
        let alpha = rng.range(1.02, 4.0);
        let lo = if alpha <= 2.0 { alpha / 2.0 } else { alpha - 1.0 };
        (alpha, rng.range(lo, alpha))
    }
}

fn dpi_instance(cfg: &FuzzConfig, i: usize, rng: &mut Sampler) -> Result<Vec<Check>> {
    let d = cfg.dim;
    let rho = rng.hs_density(d, d)?;
    let sigma = rng.hs_density(d, d)?;
    let k = rng.int(1, 3);
    let map = rng.cptp(d, k)?;
    let (alpha, z) = match (cfg.alpha, cfg.z) {
        (Some(a), Some(z)) => (a, z),
        (Some(a), None) => (a, optimal_z(a)),
        _ => sample_region_point(rng),
    };
    let before = alpha_z_divergence(&rho, &sigma, alpha, z)?.value;
    let after = alpha_z_divergence(&map.apply(&rho)?, &map.apply(&sigma)?, alpha, z)?.value;
    Ok(vec![Check::le(i, "dpi", after, before).alpha(alpha, Some(z))])
}

/// The z-grid swept by the ordering suite: 50 points evenly spaced on
/// `[0.2, 4]`.
pub fn ordering_grid() -> Vec<f64> {
    let (lo, hi) = (0.2, 4.0);
    let n = ORDERING_GRID_POINTS;
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn ordering_instance(cfg: &FuzzConfig, i: usize, rng: &mut Sampler) -> Result<Vec<Check>> {
    let d = cfg.dim;
    let rho = rng.hs_density(d, d)?;
    let sigma = rng.hs_density(d, d)?;
    let alphas: Vec<f64> = cfg.alpha.map_or(ORDERING_ALPHAS.to_vec(), |a| vec![a]);
    let grid = ordering_grid();
    let mut out = Vec::new();
    for alpha in alphas {
        let values = grid
            .iter()
            .map(|&z| alpha_z_divergence(&rho, &sigma, alpha, z).map(|v| v.value))
            .collect::<Result<Vec<_>>>()?;
        for k in 0..grid.len() - 1 {
            // non-increasing in z above one, non-decreasing below
            let (lhs, rhs) = if alpha > 1.0 {
                (values[k + 1], values[k])
            } else {
                (values[k], values[k + 1])
            };
            out.push(Check::le(i, "ordering", lhs, rhs).alpha(alpha, Some(grid[k + 1])));
        }
    }
    Ok(out)
}

/// A sampled ensemble with a measurement.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ensemble: Ensemble,
    pub povm: Povm,
    /// Diagonal states measured in the computational basis.
    pub commuting: bool,
}

/// Draws an ensemble of up to four letters in dimension `2..=dim` with a
/// POVM of up to five outcomes. Every fourth instance is commuting.
pub fn sample_instance(cfg: &FuzzConfig, i: usize, rng: &mut Sampler) -> Result<Instance> {
    let d = rng.int(2, cfg.dim);
    let letters = cfg.letters.unwrap_or_else(|| rng.int(1, MAX_LETTERS));
    let prior = rng.probability(letters);
    if i % COMMUTING_EVERY == COMMUTING_EVERY - 1 {
        let states = (0..letters)
            .map(|_| {
                let mut p = rng.probability(d).into_vec();
                // occasional zero entries exercise the support conventions
                if rng.uniform() < 0.3 {
                    let j = rng.int(0, d - 1);
                    let lost = p[j];
                    p[j] = 0.0;
                    let rest: f64 = 1.0 - lost;
                    p.iter_mut().for_each(|x| *x /= rest);
                }
                DensityMatrix::diagonal(&p)
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Instance {
            ensemble: Ensemble::new(prior, states)?,
            povm: Povm::computational(d),
            commuting: true,
        });
    }
    let states = (0..letters)
        .map(|_| {
            let rank = rng.int(1, d);
            rng.hs_density(d, rank)
        })
        .collect::<Result<Vec<_>>>()?;
    let outcomes = rng.int(1, MAX_OUTCOMES);
    let povm = if outcomes == d && rng.uniform() < 0.5 {
        rng.projective_povm(d)
    } else {
        rng.povm(d, outcomes)?
    };
    Ok(Instance {
        ensemble: Ensemble::new(prior, states)?,
        povm,
        commuting: false,
    })
}

fn bound_alphas(cfg: &FuzzConfig) -> Vec<f64> {
    cfg.alpha.map_or(BOUND_ALPHAS.to_vec(), |a| vec![a])
}

fn holevo_renyi_instance(cfg: &FuzzConfig, i: usize, inst: &Instance) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for alpha in bound_alphas(cfg) {
        let z = cfg.z.unwrap_or_else(|| optimal_z(alpha));
        if !in_dpi_region(alpha, z) {
            return Err(Error::Parameter(format!("(alpha, z) = ({alpha}, {z}) is outside the region")));
        }
        let r = holevo_renyi_check(&inst.ensemble, &inst.povm, alpha, z)?;
        out.push(Check {
            slack: r.slack,
            ..Check::le(i, "holevo_renyi", r.lhs, r.rhs).alpha(alpha, Some(z))
        });
        if inst.commuting {
            out.push(Check::eq(i, "holevo_renyi_equality", r.lhs, r.rhs).alpha(alpha, Some(z)));
        }
    }
    Ok(out)
}

fn renyi_bound_instance(cfg: &FuzzConfig, i: usize, inst: &Instance) -> Result<Vec<Check>> {
    bound_alphas(cfg)
        .into_iter()
        .map(|alpha| {
            let r = renyi_bound(&inst.ensemble, &inst.povm, alpha)?;
            Ok(Check::le(i, "renyi_bound", r.lhs, r.rhs).alpha(alpha, r.z))
        })
        .collect()
}

fn sibson_instance(cfg: &FuzzConfig, i: usize, inst: &Instance) -> Result<Vec<Check>> {
    let e = &inst.ensemble;
    let w = induced_channel(e, &inst.povm)?;
    let mut out = Vec::new();
    for alpha in bound_alphas(cfg) {
        let lhs = sibson_mi(e.prior(), &w, alpha)?;
        let rhs = renyi_from_sum(Some(f_sq(e, alpha)?), alpha);
        out.push(Check::le(i, "sibson_bound", lhs, rhs).alpha(alpha, Some(optimal_z(alpha))));
    }
    for s in PROPOSITION_S {
        let e0 = gallager_e0_sq(e.prior(), &w, s)?;
        let scaled = s * sibson_mi(e.prior(), &w, 1.0 / (1.0 + s))?;
        out.push(Check::eq(i, "gallager_identity", e0, scaled).at_s(s));
    }
    Ok(out)
}

fn proposition_instance(i: usize, inst: &Instance) -> Result<Vec<Check>> {
    let e = &inst.ensemble;
    let w = induced_channel(e, &inst.povm)?;
    PROPOSITION_S
        .iter()
        .map(|&s| {
            let lhs = gallager_e0_sq(e.prior(), &w, s)?;
            let rhs = quantum_bound_e(e, s)?;
            Ok(Check::le(i, "proposition", lhs, rhs).at_s(s))
        })
        .collect()
}
