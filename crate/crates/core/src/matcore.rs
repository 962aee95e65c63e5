//! Hermitian spectral calculus.
//!
//! Every divergence in this crate reduces to traces of fractional powers of
//! positive semi-definite matrices. This module owns the eigendecomposition,
//! the support-restricted power map `A^t = V f(Λ) V†`, support projectors and
//! the validated operator types ([`HermitianOperator`], [`DensityMatrix`]).
//!
//! Eigenvalues at or below `SUPPORT_CUTOFF · λ_max` are treated as exact
//! zeros, so negative exponents are taken on the support only.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Maximum tolerated `|A - A†|` entry.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` count as rounding noise.
pub const PSD_TOL: f64 = 1e-10;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Relative eigenvalue gate defining the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Threshold used by [`supports_compatible`].
pub const SUPPORT_RELATION_TOL: f64 = 1e-10;

const PHASE_TOL: f64 = 1e-10;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::Parameter("matrix dimension must be positive".into()));
    }
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A square complex matrix equal to its adjoint within [`HERMITICITY_TOL`].
///
/// The stored matrix is exactly Hermitian: construction replaces the input
/// by `(A + A†)/2` once the tolerance check has passed.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let asymmetry = max_abs_diff(&matrix, &matrix.adjoint());
        if asymmetry > HERMITICITY_TOL {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    /// Hermitian part of a product that is Hermitian up to rounding.
    pub(crate) fn from_product(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c64(x, 0.0)));
        Self {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    /// Rank-one operator `|v⟩⟨v|` (no normalisation).
    pub fn outer(v: &DVector<Complex64>) -> Self {
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn spectrum(&self) -> Spectrum {
        spectral_decompose(self)
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    /// `outer · self · outer`, re-symmetrised.
    pub fn sandwiched_by(&self, outer: &HermitianOperator) -> HermitianOperator {
        Self::from_product(&outer.matrix * &self.matrix * &outer.matrix)
    }

    /// `Re Tr(self · other)`.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        trace_of_product(&self.matrix, &other.matrix).re
    }
}

/// `Tr[(X X†)^t]` from the singular values of `X`, keeping only
/// `s > 1e-12·s_max`.
///
/// For `X = A·B` with PSD factors this equals `Tr[(A B² A)^t]` but works with
/// `s_i` instead of `s_i²`, so small eigenvalues of the sandwich keep their
/// relative accuracy.
pub fn gram_trace_power(x: &ComplexMatrix, t: f64) -> f64 {
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max.is_nan() || max <= 0.0 {
        return 0.0;
    }
    sv.iter()
        .filter(|&&v| v > SUPPORT_CUTOFF * max)
        .map(|&v| v.powf(2.0 * t))
        .sum()
}

/// `Tr(A·B)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Eigenvalues strictly above this value span the support.
    pub fn support_threshold(&self) -> f64 {
        SUPPORT_CUTOFF * self.max().max(0.0)
    }

    pub fn in_support(&self, lambda: f64) -> bool {
        let max = self.max();
        max > 0.0 && lambda > SUPPORT_CUTOFF * max
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&l| self.in_support(l))
            .count()
    }

    /// `V f(Λ) V†` for an arbitrary real function of the eigenvalues.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> HermitianOperator {
        let d = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            for i in 0..d {
                scaled[(i, j)] *= w;
            }
        }
        HermitianOperator::from_product(scaled * self.eigenvectors.adjoint())
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|l| l)
    }

    /// Support-restricted power; eigenvalues off the support map to zero.
    pub fn power(&self, t: f64) -> HermitianOperator {
        self.map(|l| if self.in_support(l) { l.powf(t) } else { 0.0 })
    }

    /// `Σ λ^t` over the support.
    pub fn trace_power(&self, t: f64) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|&&l| self.in_support(l))
            .map(|&l| l.powf(t))
            .sum()
    }

    pub fn support_projector(&self) -> HermitianOperator {
        self.map(|l| if self.in_support(l) { 1.0 } else { 0.0 })
    }

    fn clipped(mut self) -> Self {
        for l in self.eigenvalues.iter_mut() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        self
    }
}

fn fix_phase(v: &mut [Complex64]) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > PHASE_TOL).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

fn lexicographic(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Eigendecomposition of a Hermitian operator.
///
/// Output is ordered by ascending eigenvalue (ties broken by the
/// lexicographic order of the eigenvectors) and every eigenvector has its
/// first non-negligible component real and positive, so the result is
/// bit-stable for a given input.
pub fn spectral_decompose(a: &HermitianOperator) -> Spectrum {
    let d = a.dim();
    let eig = nalgebra::SymmetricEigen::new(a.matrix.clone());
    let mut columns: Vec<(f64, Vec<Complex64>)> = (0..d)
        .map(|j| {
            let mut v: Vec<Complex64> = eig.eigenvectors.column(j).iter().copied().collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= norm;
            }
            fix_phase(&mut v);
            (eig.eigenvalues[j], v)
        })
        .collect();
    columns.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lexicographic(&a.1, &b.1)));
    let eigenvalues = columns.iter().map(|c| c.0).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, d, |i, j| columns[j].1[i]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

fn check_psd(spec: &Spectrum) -> Result<()> {
    let scale = spec
        .eigenvalues
        .iter()
        .fold(1.0_f64, |m, l| m.max(l.abs()));
    let min = spec.min();
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// `a^t` restricted to the support of `a`.
pub fn matrix_power(a: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    if !t.is_finite() {
        return Err(Error::Parameter(format!("exponent must be finite, got {t}")));
    }
    let spec = a.spectrum();
    check_psd(&spec)?;
    Ok(spec.power(t))
}

/// Orthogonal projector onto the support of a PSD operator.
pub fn support_projector(a: &HermitianOperator) -> Result<HermitianOperator> {
    let spec = a.spectrum();
    check_psd(&spec)?;
    Ok(spec.support_projector())
}

/// A positive semi-definite, unit-trace Hermitian operator.
///
/// The spectrum is computed once at construction and reused by every power
/// and projector taken afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    operator: HermitianOperator,
    spectrum: Spectrum,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(matrix)?)
    }

    /// Validates an operator as a state. Eigenvalues in `[-PSD_TOL, 0)`
    /// are clipped to zero.
    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let spectrum = op.spectrum();
        if spectrum.min() < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: spectrum.min(),
            });
        }
        let trace = op.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        if spectrum.min() < 0.0 {
            let spectrum = spectrum.clipped();
            let operator = spectrum.reconstruct();
            return Ok(Self { operator, spectrum });
        }
        Ok(Self {
            operator: op,
            spectrum,
        })
    }

    /// `|ψ⟩⟨ψ|` for the normalised input vector.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Parameter("state vector must be non-zero".into()));
        }
        Self::from_operator(HermitianOperator::outer(&psi.unscale(norm)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_operator(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
            .expect("I/d is a state")
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::from_operator(HermitianOperator::from_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn power(&self, t: f64) -> HermitianOperator {
        self.spectrum.power(t)
    }

    pub fn support_projector(&self) -> HermitianOperator {
        self.spectrum.support_projector()
    }

    pub fn rank(&self) -> usize {
        self.spectrum.rank()
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues().iter().map(|l| l * l).sum()
    }
}

/// How the support of one state sits relative to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportRelation {
    /// `supp ρ ⊆ supp σ`
    Contained,
    Overlapping,
    Orthogonal,
}

pub fn supports_compatible(rho: &DensityMatrix, sigma: &DensityMatrix) -> SupportRelation {
    let d = rho.dim();
    let pi_sigma = sigma.support_projector();
    let complement = ComplexMatrix::identity(d, d) - pi_sigma.matrix();
    let leak = &complement * rho.matrix() * &complement;
    if max_abs(&leak) <= SUPPORT_RELATION_TOL {
        return SupportRelation::Contained;
    }
    let overlap = rho.support_projector().trace_product(&pi_sigma);
    if overlap <= SUPPORT_RELATION_TOL {
        SupportRelation::Orthogonal
    } else {
        SupportRelation::Overlapping
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_hermitian(d: usize, seed: u64) -> HermitianOperator {
        // xorshift keeps this test independent of the sampler module.
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = ComplexMatrix::from_fn(d, d, |_, _| c64(next(), next()));
        HermitianOperator::new(hermitian_part(&g)).unwrap()
    }

    fn random_state(d: usize, rank: usize, seed: u64) -> DensityMatrix {
        let mut s = seed.wrapping_mul(0x2545_F491_4F6C_DD1D) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = ComplexMatrix::from_fn(d, rank, |_, _| c64(next(), next()));
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.unscale(tr)).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let s = spectral_decompose(&HermitianOperator::identity(3));
        assert_eq!(s.eigenvalues(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let s = spectral_decompose(&HermitianOperator::from_diagonal(&[1.0, -1.0]));
        assert_abs_diff_eq!(s.eigenvalues()[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        for seed in 0..20 {
            let a = random_hermitian(4, seed);
            let s = a.spectrum();
            let scale = 1.0 + max_abs(a.matrix());
            assert!(max_abs_diff(s.reconstruct().matrix(), a.matrix()) <= 1e-9 * scale);
            let v = s.eigenvectors();
            let gram = v.adjoint() * v;
            assert!(max_abs_diff(&gram, &ComplexMatrix::identity(4, 4)) <= 1e-10);
            assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn decomposition_is_deterministic_and_phase_fixed() {
        let a = random_hermitian(5, 99);
        let s1 = spectral_decompose(&a);
        let s2 = spectral_decompose(&a.clone());
        assert_eq!(s1, s2);
        for j in 0..5 {
            let col = s1.eigenvectors().column(j);
            let pivot = col.iter().find(|z| z.norm() > PHASE_TOL).unwrap();
            assert!(pivot.im == 0.0 && pivot.re > 0.0);
        }
    }

    #[test]
    fn non_hermitian_rejected_with_asymmetry() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        match HermitianOperator::new(m) {
            Err(Error::NotHermitian { asymmetry }) => assert_abs_diff_eq!(asymmetry, 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_square_and_non_finite_rejected() {
        assert!(matches!(
            HermitianOperator::new(ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
        let mut m = ComplexMatrix::identity(2, 2);
        m[(1, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NonFinite { row: 1, col: 1 })));
    }

    #[test]
    fn identity_power() {
        let p = matrix_power(&HermitianOperator::identity(3), 0.37).unwrap();
        assert!(max_abs_diff(p.matrix(), &ComplexMatrix::identity(3, 3)) <= 1e-14);
    }

    #[test]
    fn rank_deficient_square_root() {
        let p = matrix_power(&HermitianOperator::from_diagonal(&[4.0, 0.0]), 0.5).unwrap();
        let expected = HermitianOperator::from_diagonal(&[2.0, 0.0]);
        assert!(max_abs_diff(p.matrix(), expected.matrix()) <= 1e-14);
        // negative exponents act on the support only
        let inv = matrix_power(&HermitianOperator::from_diagonal(&[4.0, 0.0]), -1.0).unwrap();
        let expected = HermitianOperator::from_diagonal(&[0.25, 0.0]);
        assert!(max_abs_diff(inv.matrix(), expected.matrix()) <= 1e-14);
    }

    #[test]
    fn cube_of_cube_root() {
        for seed in 0..10 {
            let rho = random_state(4, 4, seed);
            let r = rho.power(1.0 / 3.0);
            let cube = r.matrix() * r.matrix() * r.matrix();
            assert!(max_abs_diff(&cube, rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn power_rejects_negative_operator() {
        let a = HermitianOperator::from_diagonal(&[1.0, -1e-3]);
        assert!(matches!(matrix_power(&a, 0.5), Err(Error::NotPsd { .. })));
        assert!(matches!(support_projector(&a), Err(Error::NotPsd { .. })));
        assert!(matrix_power(&HermitianOperator::identity(2), f64::NAN).is_err());
    }

    #[test]
    fn projector_examples() {
        let p = support_projector(&HermitianOperator::from_diagonal(&[0.5, 0.5, 0.0])).unwrap();
        let expected = HermitianOperator::from_diagonal(&[1.0, 1.0, 0.0]);
        assert!(max_abs_diff(p.matrix(), expected.matrix()) <= 1e-14);

        let psi = DVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let pure = DensityMatrix::pure(&psi).unwrap();
        assert!(max_abs_diff(pure.support_projector().matrix(), pure.matrix()) <= 1e-12);
    }

    #[test]
    fn projector_is_idempotent() {
        for seed in 0..10 {
            let rho = random_state(5, 2, seed);
            let p = rho.support_projector();
            let p2 = p.matrix() * p.matrix();
            assert!(max_abs_diff(&p2, p.matrix()) <= 1e-10);
            assert_eq!(rho.rank(), 2);
        }
    }

    #[test]
    fn power_composition_and_unit_power() {
        for seed in 0..10 {
            let rho = random_state(4, 3, seed);
            let a = rho.power(0.7);
            let composed = matrix_power(&a, -1.3).unwrap();
            let direct = rho.power(0.7 * -1.3);
            let scale = 1.0 + max_abs(direct.matrix());
            assert!(max_abs_diff(composed.matrix(), direct.matrix()) <= 1e-9 * scale);

            let one = rho.power(1.0);
            let projected = rho.matrix() * rho.support_projector().matrix();
            assert!(max_abs_diff(one.matrix(), &projected) <= 1e-10);
        }
    }

    #[test]
    fn density_clips_small_negatives() {
        let rho = DensityMatrix::new(HermitianOperator::from_diagonal(&[1.0 + 5e-11, -5e-11]).into_matrix()).unwrap();
        assert!(rho.spectrum().min() >= 0.0);
        assert!(DensityMatrix::diagonal(&[1.1, -0.1]).is_err());
        assert!(matches!(DensityMatrix::diagonal(&[0.5, 0.4]), Err(Error::BadTrace { .. })));
    }

    #[test]
    fn support_relations() {
        let rho = random_state(3, 2, 7);
        assert_eq!(supports_compatible(&rho, &rho), SupportRelation::Contained);
        let zero = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let one = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(supports_compatible(&zero, &one), SupportRelation::Orthogonal);
        assert_eq!(
            supports_compatible(&zero, &DensityMatrix::maximally_mixed(2)),
            SupportRelation::Contained
        );
        assert_eq!(
            supports_compatible(&DensityMatrix::maximally_mixed(2), &zero),
            SupportRelation::Overlapping
        );
    }
}
