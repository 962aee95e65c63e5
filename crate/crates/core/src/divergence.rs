//! Classical and quantum Rényi divergence families.
//!
//! All logarithms are taken base 2. Every quantity in this crate is the
//! logarithm of something, so switching to nats is a single rescaling by
//! `ln 2`, applied through [`LogBase`] at the output boundary.

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::{gram_trace_power, supports_compatible, DensityMatrix, SupportRelation};

/// Absolute slack applied at the boundaries of the DPI region.
pub const REGION_EPS: f64 = 1e-12;
/// Tolerance for probability vector normalisation.
pub const PROB_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    /// Converts a value computed in bits into this base.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Two => bits,
            LogBase::E => bits * std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A divergence value, possibly `+∞`, tagged with its logarithm base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceValue {
    pub value: f64,
    pub log_base: LogBase,
}

impl DivergenceValue {
    pub fn bits(value: f64) -> Self {
        Self {
            value,
            log_base: LogBase::Two,
        }
    }

    pub fn infinite() -> Self {
        Self::bits(f64::INFINITY)
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }

    pub fn in_base(self, base: LogBase) -> Self {
        let bits = match self.log_base {
            LogBase::Two => self.value,
            LogBase::E => self.value / std::f64::consts::LN_2,
        };
        Self {
            value: base.from_bits(bits),
            log_base: base,
        }
    }
}

/// A probability distribution on a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::BadProbability("empty alphabet".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::BadProbability(format!("weight {i} is {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::BadProbability(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Parameter(format!(
            "Renyi order must be positive and different from 1, got {alpha}"
        )));
    }
    Ok(())
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Parameter(format!("z must be positive, got {z}")));
    }
    Ok(())
}

/// Membership in the region where the α-z divergence obeys data processing:
/// `α<1, z ≥ max(α, 1−α)`, or `1<α≤2, α/2 ≤ z ≤ α`, or `α≥2, α−1 ≤ z ≤ α`.
///
/// Boundaries are closed and compared with [`REGION_EPS`] slack so that
/// decimal grid points land on the correct side.
pub fn in_dpi_region(alpha: f64, z: f64) -> bool {
    let e = REGION_EPS;
    if !(alpha > 0.0 && z > 0.0) || (alpha - 1.0).abs() <= e {
        return false;
    }
    if alpha < 1.0 {
        return z >= alpha.max(1.0 - alpha) - e;
    }
    let upper = z <= alpha + e;
    (alpha <= 2.0 + e && z >= alpha / 2.0 - e && upper)
        || (alpha >= 2.0 - e && z >= alpha - 1.0 - e && upper)
}

/// A validated `(α, z)` pair with its region classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaZ {
    pub alpha: f64,
    pub z: f64,
    pub in_region: bool,
}

impl AlphaZ {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_z(z)?;
        Ok(Self {
            alpha,
            z,
            in_region: in_dpi_region(alpha, z),
        })
    }
}

/// `Σ p^α q^{1−α}` with the boundary conventions used throughout:
/// `p = 0` terms vanish; `p > 0, q = 0` vanishes for `α < 1` and returns
/// `None` (divergence forced to `+∞`) for `α > 1`.
pub(crate) fn renyi_sum(p: &[f64], q: &[f64], alpha: f64) -> Option<f64> {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            if alpha > 1.0 {
                return None;
            }
            continue;
        }
        acc += pi.powf(alpha) * qi.powf(1.0 - alpha);
    }
    Some(acc)
}

/// `(1/(α−1)) log₂ S`, with an empty sum mapped to `+∞`.
pub(crate) fn renyi_from_sum(sum: Option<f64>, alpha: f64) -> f64 {
    match sum {
        Some(s) if s > 0.0 => s.log2() / (alpha - 1.0),
        _ => f64::INFINITY,
    }
}

pub(crate) fn renyi_slices(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    renyi_from_sum(renyi_sum(p, q, alpha), alpha)
}

/// Classical Rényi divergence `D_α(p‖q)` in bits.
pub fn renyi_classical(p: &ProbVector, q: &ProbVector, alpha: f64) -> Result<DivergenceValue> {
    if alpha == 1.0 {
        return Err(Error::Parameter(
            "alpha = 1 is the Kullback-Leibler divergence; use kl_divergence".into(),
        ));
    }
    check_alpha(alpha)?;
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    Ok(DivergenceValue::bits(renyi_slices(p.as_slice(), q.as_slice(), alpha)))
}

/// Kullback-Leibler divergence in bits.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<DivergenceValue> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(DivergenceValue::infinite());
        }
        acc += pi * (pi / qi).log2();
    }
    Ok(DivergenceValue::bits(acc))
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn check_dims(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// Whether the support condition forces `+∞` for order `alpha`.
fn diverges(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> bool {
    match supports_compatible(rho, sigma) {
        SupportRelation::Contained => false,
        SupportRelation::Overlapping => alpha > 1.0,
        SupportRelation::Orthogonal => true,
    }
}

fn overlap_rho_outside(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> f64 {
    let left = rho.power(alpha / (2.0 * z));
    let right = sigma.power((1.0 - alpha) / (2.0 * z));
    gram_trace_power(&(left.matrix() * right.matrix()), z)
}

/// The α-z overlap `Tr[(ρ^{α/2z} σ^{(1−α)/z} ρ^{α/2z})^z]`.
///
/// Returns `+∞` when `α > 1` and `supp ρ ⊄ supp σ`.
pub fn alpha_z_overlap(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_z(z)?;
    check_dims(rho, sigma)?;
    if alpha > 1.0 && supports_compatible(rho, sigma) != SupportRelation::Contained {
        return Ok(f64::INFINITY);
    }
    Ok(overlap_rho_outside(rho, sigma, alpha, z))
}

/// The same trace functional evaluated with σ on the outside,
/// `Tr[(σ^{(1−α)/2z} ρ^{α/z} σ^{(1−α)/2z})^z]`.
///
/// Both orderings have the same non-zero spectrum; this one is kept as an
/// independent evaluation route.
pub fn alpha_z_overlap_sigma_outside(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    z: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_z(z)?;
    check_dims(rho, sigma)?;
    if alpha > 1.0 && supports_compatible(rho, sigma) != SupportRelation::Contained {
        return Ok(f64::INFINITY);
    }
    let outer = sigma.power((1.0 - alpha) / (2.0 * z));
    let inner = rho.power(alpha / z);
    Ok(inner.sandwiched_by(&outer).spectrum().trace_power(z))
}

/// α-z-Rényi relative entropy `d_{α,z}(ρ‖σ)`.
pub fn alpha_z_divergence(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    alpha: f64,
    z: f64,
) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    check_z(z)?;
    check_dims(rho, sigma)?;
    if diverges(rho, sigma, alpha) {
        return Ok(DivergenceValue::infinite());
    }
    let f = overlap_rho_outside(rho, sigma, alpha, z);
    Ok(DivergenceValue::bits(renyi_from_sum(Some(f), alpha)))
}

/// Petz-type Rényi relative entropy `(1/(α−1)) log Tr[ρ^α σ^{1−α}]` for
/// `α ∈ (0, 1)`. Orders above one go through [`alpha_z_divergence`] with
/// `z = 1`.
pub fn renyi_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<DivergenceValue> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "Renyi relative entropy is defined here for alpha in (0,1), got {alpha}"
        )));
    }
    check_dims(rho, sigma)?;
    if supports_compatible(rho, sigma) == SupportRelation::Orthogonal {
        return Ok(DivergenceValue::infinite());
    }
    let tr = rho.power(alpha).trace_product(&sigma.power(1.0 - alpha));
    Ok(DivergenceValue::bits(renyi_from_sum(Some(tr), alpha)))
}

/// Sandwiched Rényi divergence
/// `(1/(α−1)) log Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α]`.
pub fn sandwiched_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64) -> Result<DivergenceValue> {
    check_alpha(alpha)?;
    check_dims(rho, sigma)?;
    if diverges(rho, sigma, alpha) {
        return Ok(DivergenceValue::infinite());
    }
    let left = sigma.power((1.0 - alpha) / (2.0 * alpha));
    let f = gram_trace_power(&(left.matrix() * rho.power(0.5).matrix()), alpha);
    Ok(DivergenceValue::bits(renyi_from_sum(Some(f), alpha)))
}

/// Uhlmann fidelity `(Tr √(σ^{1/2} ρ σ^{1/2}))²`, clamped into `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho, sigma)?;
    let s = gram_trace_power(&(sigma.power(0.5).matrix() * rho.power(0.5).matrix()), 0.5);
    Ok((s * s).clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let spec = rho.spectrum();
    -spec
        .eigenvalues()
        .iter()
        .filter(|&&l| spec.in_support(l))
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

/// Umegaki relative entropy `Tr[ρ(log₂ρ − log₂σ)]`; `+∞` unless
/// `supp ρ ⊆ supp σ`.
pub fn umegaki_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho, sigma)?;
    if supports_compatible(rho, sigma) != SupportRelation::Contained {
        return Ok(DivergenceValue::infinite());
    }
    let neg_entropy = -von_neumann_entropy(rho);
    let spec = sigma.spectrum();
    let vecs = spec.eigenvectors();
    let mut cross = 0.0;
    for (j, &mu) in spec.eigenvalues().iter().enumerate() {
        if !spec.in_support(mu) {
            continue;
        }
        let v = vecs.column(j);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        cross += weight * mu.log2();
    }
    Ok(DivergenceValue::bits((neg_entropy - cross).max(0.0)))
}

/// The monotone distance `f_{α,z} − 1` (α > 1) or `1 − f_{α,z}` (α < 1).
///
/// Only defined on the DPI region, where it is non-negative.
pub fn alternate_distance(rho: &DensityMatrix, sigma: &DensityMatrix, alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_z(z)?;
    if !in_dpi_region(alpha, z) {
        return Err(Error::Parameter(format!(
            "(alpha, z) = ({alpha}, {z}) is outside the data-processing region"
        )));
    }
    let f = alpha_z_overlap(rho, sigma, alpha, z)?;
    Ok(if alpha > 1.0 { f - 1.0 } else { 1.0 - f })
}
