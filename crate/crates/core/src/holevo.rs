//! Holevo quantities and the Holevo-Rényi inequality.
//!
//! For an ensemble `{p(x), ρ_x}` measured with a POVM `{M_y}`, the classical
//! Rényi sum between the joint distribution `p_M(x,y)` and the product
//! `p(x) q_M(y)` is bounded by the prior-averaged α-z overlap of each signal
//! state against the average state `ρ̄`. The bound is tightest at
//! `z = optimal_z(α)`, which gives [`f_sq`].

use std::fmt;

use crate::channel::{
    average_state, joint_distribution, separable_from_joint, Ensemble, JointDistribution, Povm,
};
use crate::divergence::{
    alpha_z_overlap, check_alpha, in_dpi_region, renyi_from_sum, renyi_slices, renyi_sum,
    shannon_entropy, umegaki_relative_entropy, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::sampler::{Sampler, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LhsLeRhs,
    LhsGeRhs,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::LhsLeRhs => "<=",
            Direction::LhsGeRhs => ">=",
        })
    }
}

/// One evaluated instance of an inequality.
///
/// `slack` is the signed margin in the asserted direction: non-negative
/// exactly when the inequality holds.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub direction: Direction,
    pub slack: f64,
    pub alpha: Option<f64>,
    pub z: Option<f64>,
}

impl InequalityReport {
    pub fn new(label: &'static str, lhs: f64, rhs: f64, direction: Direction) -> Self {
        let slack = match direction {
            Direction::LhsLeRhs => rhs - lhs,
            Direction::LhsGeRhs => lhs - rhs,
        };
        // ∞ ≤ ∞ holds with zero margin
        let slack = if slack.is_nan() && lhs == rhs { 0.0 } else { slack };
        Self {
            label,
            lhs,
            rhs,
            direction,
            slack,
            alpha: None,
            z: None,
        }
    }

    pub fn with_params(mut self, alpha: f64, z: Option<f64>) -> Self {
        self.alpha = Some(alpha);
        self.z = z;
        self
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol
    }
}

/// `C(p) = S(ρ̄) − Σ p(x) S(ρ_x)` in bits.
pub fn holevo_information(e: &Ensemble) -> f64 {
    let avg = average_state(e);
    let mixed: f64 = e
        .prior()
        .as_slice()
        .iter()
        .zip(e.states())
        .map(|(p, rho)| p * von_neumann_entropy(rho))
        .sum();
    (von_neumann_entropy(&avg) - mixed).max(0.0)
}

/// `Σ p(x) S_r(ρ_x ‖ ρ̄)`, the relative-entropy form of [`holevo_information`].
pub fn holevo_information_relative(e: &Ensemble) -> f64 {
    let avg = average_state(e);
    e.prior()
        .as_slice()
        .iter()
        .zip(e.states())
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, rho)| p * umegaki_relative_entropy(rho, &avg).expect("same dimension").value)
        .sum()
}

/// `I(X;Y) = H(X) + H(Y) − H(X,Y)` in bits.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let hx = shannon_entropy(&j.marginal_x());
    let hy = shannon_entropy(&j.marginal_y());
    let hxy = shannon_entropy(&j.flatten());
    (hx + hy - hxy).max(0.0)
}

/// Holevo's bound `I(X;Y) ≤ C(p)` for one measurement.
pub fn generalized_holevo_check(e: &Ensemble, m: &Povm) -> Result<InequalityReport> {
    let joint = joint_distribution(e, m)?;
    Ok(InequalityReport::new(
        "holevo",
        mutual_information(&joint),
        holevo_information(e),
        Direction::LhsLeRhs,
    ))
}

/// `Σ_{x,y} p_M(x,y)^α [p(x) q_M(y)]^{1−α}`.
pub fn classical_renyi_sum(e: &Ensemble, m: &Povm, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let joint = joint_distribution(e, m)?;
    let sep = separable_from_joint(&joint);
    Ok(renyi_sum(&joint.flatten(), &sep.flatten(), alpha).unwrap_or(f64::INFINITY))
}

/// `Σ_x p(x) f_{α,z}(ρ_x ‖ ρ̄)`; letters with zero prior are skipped.
pub fn averaged_overlap(e: &Ensemble, alpha: f64, z: f64) -> Result<f64> {
    let avg = average_state(e);
    let mut acc = 0.0;
    for (p, rho) in e.prior().as_slice().iter().zip(e.states()) {
        if *p > 0.0 {
            acc += p * alpha_z_overlap(rho, &avg, alpha, z)?;
        }
    }
    Ok(acc)
}

/// Both sides of the Holevo-Rényi inequality at `(α, z)`:
/// the classical sum is `≤` the averaged overlap for `α > 1` and `≥` it
/// for `α < 1`.
pub fn holevo_renyi_check(e: &Ensemble, m: &Povm, alpha: f64, z: f64) -> Result<InequalityReport> {
    check_alpha(alpha)?;
    if !in_dpi_region(alpha, z) {
        return Err(Error::Parameter(format!(
            "(alpha, z) = ({alpha}, {z}) is outside the data-processing region"
        )));
    }
    let lhs = classical_renyi_sum(e, m, alpha)?;
    let rhs = averaged_overlap(e, alpha, z)?;
    let direction = if alpha > 1.0 {
        Direction::LhsLeRhs
    } else {
        Direction::LhsGeRhs
    };
    Ok(InequalityReport::new("holevo_renyi", lhs, rhs, direction).with_params(alpha, Some(z)))
}

/// The `z` giving the tightest Holevo-Rényi bound: `α` for `α ≥ 1/2`,
/// `1 − α` below.
pub fn optimal_z(alpha: f64) -> f64 {
    if alpha >= 0.5 {
        alpha
    } else {
        1.0 - alpha
    }
}

/// Tightest averaged overlap, `Σ_x p(x) f_{α,z*}(ρ_x ‖ ρ̄)` with
/// `z* = optimal_z(α)`.
pub fn f_sq(e: &Ensemble, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    averaged_overlap(e, alpha, optimal_z(alpha))
}

/// `D_α(p_M ‖ p × q_M) ≤ (1/(α−1)) log₂ f_sq(α)`.
pub fn renyi_bound(e: &Ensemble, m: &Povm, alpha: f64) -> Result<InequalityReport> {
    check_alpha(alpha)?;
    let joint = joint_distribution(e, m)?;
    let sep = separable_from_joint(&joint);
    let lhs = renyi_slices(&joint.flatten(), &sep.flatten(), alpha);
    let rhs = renyi_from_sum(Some(f_sq(e, alpha)?), alpha);
    Ok(InequalityReport::new("renyi_bound", lhs, rhs, Direction::LhsLeRhs)
        .with_params(alpha, Some(optimal_z(alpha))))
}

/// Heuristic accessible information.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessibleEstimate {
    /// Best mutual information found, in bits.
    pub value: f64,
    /// Always true: the value is attained by an explicit measurement and
    /// is therefore only a lower bound on the maximum over all POVMs.
    pub lower_bound: bool,
    /// `None` for the eigenbasis of `ρ̄`, otherwise the index of the
    /// sampled POVM that achieved the value.
    pub best_sample: Option<usize>,
}

/// Best of the projective measurement in `ρ̄`'s eigenbasis and `samples`
/// random measurements (alternating projective and `2d`-outcome POVMs).
pub fn accessible_information_lower_bound(e: &Ensemble, samples: usize, seed: Seed) -> Result<AccessibleEstimate> {
    let d = e.dim();
    let avg = average_state(e);
    let eig = Povm::projective(avg.spectrum().eigenvectors())?;
    let mut best = AccessibleEstimate {
        value: mutual_information(&joint_distribution(e, &eig)?),
        lower_bound: true,
        best_sample: None,
    };
    for i in 0..samples {
        let mut s = Sampler::new(seed.with_stream(seed.stream.wrapping_add(i as u64)));
        let m = if i % 2 == 0 {
            s.projective_povm(d)
        } else {
            s.povm(d, 2 * d)?
        };
        let v = mutual_information(&joint_distribution(e, &m)?);
        if v > best.value {
            best.value = v;
            best.best_sample = Some(i);
        }
    }
    Ok(best)
}
