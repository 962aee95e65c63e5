//! Coding-theoretic consequences: Sibson's α-mutual information, order-α
//! capacity, Gallager exponents for product measurements, the quantum bound
//! `ℰ(s)` on them, the pure-state cutoff bound and the Burnashev-Holevo
//! exponent for collective measurements.
//!
//! All exponents are in bits.

use std::fmt;

use nalgebra::DVector;

use crate::channel::{average_state, induced_channel, ClassicalChannel, Ensemble, Povm};
use crate::divergence::{check_alpha, ProbVector};
use crate::error::{Error, Result};
use crate::matcore::{c64, gram_trace_power, DensityMatrix, HermitianOperator};
use crate::simplex::{golden_section_max, maximize, SimplexOptions};

fn check_prior(p: &ProbVector, w: &ClassicalChannel) -> Result<()> {
    if p.len() != w.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: w.n_inputs(),
            found: p.len(),
        });
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Parameter(format!("s must lie in [0, 1], got {s}")));
    }
    Ok(())
}

fn pow0(w: f64, t: f64) -> f64 {
    if w > 0.0 {
        w.powf(t)
    } else {
        0.0
    }
}

/// `Σ_x p(x) W(y|x)^α` for each outcome.
fn inner_sums(p: &[f64], w: &ClassicalChannel, alpha: f64) -> Vec<f64> {
    (0..w.n_outputs())
        .map(|y| p.iter().enumerate().map(|(x, px)| px * pow0(w.w(y, x), alpha)).sum())
        .collect()
}

/// `ln Σ_y [Σ_x p(x) W(y|x)^α]^{1/α}`, evaluated through `S − 1` so that
/// orders close to one keep full relative precision. `p` is assumed
/// normalised.
fn log_sibson_sum(p: &[f64], w: &ClassicalChannel, alpha: f64) -> f64 {
    let mut excess = 0.0;
    for y in 0..w.n_outputs() {
        let mut q = 0.0;
        let mut delta = 0.0;
        for (x, px) in p.iter().enumerate() {
            let wyx = w.w(y, x);
            if wyx > 0.0 && *px > 0.0 {
                q += px * wyx;
                delta += px * wyx * ((alpha - 1.0) * wyx.ln()).exp_m1();
            }
        }
        if q > 0.0 {
            excess += q * ((1.0 / alpha - 1.0) * q.ln() + (delta / q).ln_1p() / alpha).exp_m1();
        }
    }
    excess.ln_1p()
}

fn sibson_raw(p: &[f64], w: &ClassicalChannel, alpha: f64) -> f64 {
    alpha / (alpha - 1.0) * log_sibson_sum(p, w, alpha) / std::f64::consts::LN_2
}

fn sibson_gradient(p: &[f64], w: &ClassicalChannel, alpha: f64) -> Vec<f64> {
    let g = inner_sums(p, w, alpha);
    let s: f64 = g.iter().map(|v| pow0(*v, 1.0 / alpha)).sum();
    let scale = 1.0 / ((alpha - 1.0) * s * std::f64::consts::LN_2);
    (0..w.n_inputs())
        .map(|x| {
            let acc: f64 = g
                .iter()
                .enumerate()
                .map(|(y, gy)| gy.max(1e-12).powf(1.0 / alpha - 1.0) * pow0(w.w(y, x), alpha))
                .sum();
            scale * acc
        })
        .collect()
}

/// Sibson's α-mutual information
/// `(α/(α−1)) log₂ Σ_y [Σ_x p(x) W(y|x)^α]^{1/α}`.
pub fn sibson_mi(p: &ProbVector, w: &ClassicalChannel, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_prior(p, w)?;
    Ok(sibson_raw(p.as_slice(), w, alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Best `I_α` found; a lower bound on the true maximum.
    pub value: f64,
    pub prior: ProbVector,
}

/// Order-α capacity `max_p I_α(p, W)` with default optimiser settings.
pub fn capacity_alpha(w: &ClassicalChannel, alpha: f64) -> Result<CapacityResult> {
    capacity_alpha_with(w, alpha, &SimplexOptions::default())
}

pub fn capacity_alpha_with(w: &ClassicalChannel, alpha: f64, opts: &SimplexOptions) -> Result<CapacityResult> {
    check_alpha(alpha)?;
    let opt = maximize(
        w.n_inputs(),
        |p| sibson_raw(p, w, alpha),
        |p| sibson_gradient(p, w, alpha),
        opts,
    );
    let total: f64 = opt.point.iter().sum();
    let prior = ProbVector::new(opt.point.iter().map(|x| x / total).collect())?;
    Ok(CapacityResult {
        value: opt.value,
        prior,
    })
}

/// Gallager's function for the induced classical channel,
/// `−log₂ Σ_y [Σ_x p(x) W(y|x)^{1/(1+s)}]^{1+s}`.
pub fn gallager_e0_sq(p: &ProbVector, w: &ClassicalChannel, s: f64) -> Result<f64> {
    check_s(s)?;
    check_prior(p, w)?;
    Ok(-log_sibson_sum(p.as_slice(), w, 1.0 / (1.0 + s)) / std::f64::consts::LN_2)
}

/// [`gallager_e0_sq`] for the channel induced by measuring `e` with `m`.
pub fn gallager_e0_measured(e: &Ensemble, m: &Povm, s: f64) -> Result<f64> {
    gallager_e0_sq(e.prior(), &induced_channel(e, m)?, s)
}

fn max_e0(w: &ClassicalChannel, s: f64, opts: &SimplexOptions) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(s * capacity_alpha_with(w, 1.0 / (1.0 + s), opts)?.value)
}

/// Random-coding reliability `max_{0≤s≤1} {max_p E₀(s) − sR}`.
pub fn reliability_sq(w: &ClassicalChannel, rate: f64) -> Result<f64> {
    reliability_sq_with(w, rate, &SimplexOptions::default())
}

pub fn reliability_sq_with(w: &ClassicalChannel, rate: f64, opts: &SimplexOptions) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Parameter(format!("rate must be non-negative, got {rate}")));
    }
    const GRID: usize = 64;
    let s_at = |k: usize| k as f64 / (GRID - 1) as f64;
    let mut values = Vec::with_capacity(GRID);
    for k in 0..GRID {
        let s = s_at(k);
        values.push(max_e0(w, s, opts)? - s * rate);
    }
    let (k_best, &v_best) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let lo = s_at(k_best.saturating_sub(1));
    let hi = s_at((k_best + 1).min(GRID - 1));
    let (_, v_refined) = golden_section_max(
        |s| max_e0(w, s, opts).map(|e| e - s * rate).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-9,
    );
    Ok(v_best.max(v_refined).max(0.0))
}

/// [`reliability_sq`] for the channel induced by measuring `e` with `m`.
pub fn reliability_sq_measured(e: &Ensemble, m: &Povm, rate: f64) -> Result<f64> {
    reliability_sq(&induced_channel(e, m)?, rate)
}

/// The quantum upper bound on the product-measurement Gallager function,
/// `ℰ(s) = −(1+s) log₂ Σ_x p(x) Tr[(ρ̄^{s/2} ρ_x ρ̄^{s/2})^{1/(1+s)}]`.
pub fn quantum_bound_e(e: &Ensemble, s: f64) -> Result<f64> {
    check_s(s)?;
    let avg = average_state(e);
    let half = avg.power(s / 2.0);
    let mut acc = 0.0;
    for (p, rho) in e.prior().as_slice().iter().zip(e.states()) {
        if *p > 0.0 {
            acc += p * gram_trace_power(&(half.matrix() * rho.power(0.5).matrix()), 1.0 / (1.0 + s));
        }
    }
    Ok(-(1.0 + s) * acc.log2())
}

/// Result of the pure-state cutoff bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffBound {
    pub value: f64,
    /// Minimising prior.
    pub prior: Vec<f64>,
    /// False when some signal state is mixed, where the bound is not
    /// established.
    pub pure_states: bool,
}

/// `−log₂ min_p Σ_{x,x'} p_x p_x' √Tr(ρ_x ρ_x')`.
pub fn charbit_cutoff(e: &Ensemble) -> Result<CutoffBound> {
    let n = e.len();
    let k: Vec<Vec<f64>> = e
        .states()
        .iter()
        .map(|a| {
            e.states()
                .iter()
                .map(|b| a.operator().trace_product(b.operator()).max(0.0).sqrt())
                .collect()
        })
        .collect();
    let quad = |p: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += p[i] * p[j] * k[i][j];
            }
        }
        acc
    };
    let (prior, min) = if n == 1 {
        (vec![1.0], quad(&[1.0]))
    } else if n == 2 {
        // q(p) = a p² + b p + K11
        let a = k[0][0] + k[1][1] - 2.0 * k[0][1];
        let b = 2.0 * k[0][1] - 2.0 * k[1][1];
        let mut cands = vec![0.0, 1.0];
        if a > 0.0 {
            cands.push((-b / (2.0 * a)).clamp(0.0, 1.0));
        }
        cands
            .into_iter()
            .map(|p| (vec![p, 1.0 - p], quad(&[p, 1.0 - p])))
            .fold((vec![], f64::INFINITY), |best, c| if c.1 < best.1 { c } else { best })
    } else {
        let opt = maximize(
            n,
            |p| -quad(p),
            |p| {
                (0..n)
                    .map(|i| -2.0 * (0..n).map(|j| k[i][j] * p[j]).sum::<f64>())
                    .collect()
            },
            &SimplexOptions::default(),
        );
        (opt.point, -opt.value)
    };
    Ok(CutoffBound {
        value: -min.log2(),
        prior,
        pure_states: e.is_pure(),
    })
}

/// Burnashev-Holevo function for collective measurements,
/// `−log₂ Tr[(Σ_x p(x) ρ_x^{1/(1+s)})^{1+s}]`.
pub fn burnashev_holevo_e0(e: &Ensemble, s: f64) -> Result<f64> {
    check_s(s)?;
    let d = e.dim();
    let mut acc = HermitianOperator::zeros(d);
    for (p, rho) in e.prior().as_slice().iter().zip(e.states()) {
        if *p > 0.0 {
            acc = acc.add(&rho.power(1.0 / (1.0 + s)).scale(*p));
        }
    }
    Ok(-acc.spectrum().trace_power(1.0 + s).log2())
}

/// Binary pure-state channel `0 → |ψ₀⟩`, `1 → |ψ₁⟩` with
/// `|⟨ψ₀|ψ₁⟩|² = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPureChannel {
    pub overlap: f64,
    pub states: [DensityMatrix; 2],
}

impl BinaryPureChannel {
    pub fn ensemble(&self, p0: f64) -> Result<Ensemble> {
        Ensemble::new(ProbVector::new(vec![p0, 1.0 - p0])?, self.states.to_vec())
    }

    pub fn uniform_ensemble(&self) -> Ensemble {
        self.ensemble(0.5).expect("uniform prior")
    }

    /// Maximises `f` over the binary prior by golden section; returns
    /// `(p0, value)`.
    pub fn best_prior<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(&Ensemble) -> Result<f64>,
    {
        golden_section_max(
            |p0| self.ensemble(p0).and_then(|e| f(&e)).unwrap_or(f64::NEG_INFINITY),
            0.0,
            1.0,
            1e-10,
        )
    }
}

/// `|ψ₀⟩ = (1, 0)`, `|ψ₁⟩ = (√c, √(1−c))`.
pub fn binary_pure_channel(c: f64) -> Result<BinaryPureChannel> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Parameter(format!("overlap must lie in [0, 1], got {c}")));
    }
    let psi0 = DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]);
    let psi1 = DVector::from_vec(vec![c64(c.sqrt(), 0.0), c64((1.0 - c).sqrt(), 0.0)]);
    Ok(BinaryPureChannel {
        overlap: c,
        states: [DensityMatrix::pure(&psi0)?, DensityMatrix::pure(&psi1)?],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    /// `E₀^sq(s)` for a fixed product measurement.
    GallagerSemiQuantum,
    /// `ℰ(s)`.
    QuantumBound,
    /// `E₀^q(s)`.
    BurnashevHolevo,
}

impl fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentKind::GallagerSemiQuantum => "E0_sq",
            ExponentKind::QuantumBound => "E_script",
            ExponentKind::BurnashevHolevo => "E0_q",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCurve {
    pub kind: ExponentKind,
    pub s: Vec<f64>,
    pub values: Vec<f64>,
}

/// Evaluates one exponent on an `s` grid. The semi-quantum Gallager curve
/// needs the measurement.
pub fn exponent_curve(kind: ExponentKind, e: &Ensemble, m: Option<&Povm>, grid: &[f64]) -> Result<ExponentCurve> {
    let values = grid
        .iter()
        .map(|&s| match kind {
            ExponentKind::GallagerSemiQuantum => {
                let m = m.ok_or_else(|| Error::Parameter("the E0_sq curve needs a POVM".into()))?;
                gallager_e0_measured(e, m, s)
            }
            ExponentKind::QuantumBound => quantum_bound_e(e, s),
            ExponentKind::BurnashevHolevo => burnashev_holevo_e0(e, s),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentCurve {
        kind,
        s: grid.to_vec(),
        values,
    })
}
