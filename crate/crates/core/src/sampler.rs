//! Reproducible random instances: Haar pure states, Hilbert-Schmidt density
//! matrices, random POVMs and random CPTP maps.
//!
//! Every draw is keyed by a [`Seed`] = (master seed, stream index). The
//! generator is ChaCha20 with the stream index selecting an independent
//! keystream, so instance `i` of a fuzz run is reproducible on its own and
//! parallel workers never share a stream.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::Povm;
use crate::divergence::ProbVector;
use crate::error::{Error, Result};
use crate::matcore::{max_abs_diff, ComplexMatrix, DensityMatrix, HermitianOperator};

/// Trace-preservation tolerance for [`KrausMap`].
pub const TP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }
}

/// Random source for one stream.
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn new(seed: Seed) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.master);
        rng.set_stream(seed.stream);
        Self { rng }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Standard complex normal, `E|z|² = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.gaussian() * s, self.gaussian() * s)
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        // column-major fill keeps the draw order fixed
        let mut m = ComplexMatrix::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m[(r, c)] = self.complex_gaussian();
            }
        }
        m
    }

    /// Flat Dirichlet sample on `n` letters.
    pub fn probability(&mut self, n: usize) -> ProbVector {
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let total: f64 = raw.iter().sum();
        ProbVector::new(raw.iter().map(|w| w / total).collect()).expect("normalised weights")
    }

    pub fn pure_vector(&mut self, d: usize) -> DVector<Complex64> {
        let v = DVector::from_iterator(d, (0..d).map(|_| self.complex_gaussian()));
        let n = v.norm();
        v.unscale(n)
    }

    pub fn pure_state(&mut self, d: usize) -> DensityMatrix {
        DensityMatrix::pure(&self.pure_vector(d)).expect("non-zero Gaussian vector")
    }

    /// `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre matrix.
    pub fn hs_density(&mut self, d: usize, rank: usize) -> Result<DensityMatrix> {
        if rank == 0 || rank > d {
            return Err(Error::Parameter(format!("rank must lie in 1..={d}, got {rank}")));
        }
        let g = self.ginibre(d, rank);
        let m = &g * g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::from_operator(HermitianOperator::from_product(m.unscale(tr)))
    }

    /// Haar-random `rows × cols` isometry (`rows ≥ cols`) from the QR
    /// factorisation of a Ginibre matrix, with `R` made real-positive on the
    /// diagonal.
    pub fn isometry(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(rows >= cols, "isometry needs rows >= cols");
        let g = self.ginibre(rows, cols);
        let qr = g.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..cols {
            let rjj = r[(j, j)];
            let n = rjj.norm();
            if n > 0.0 {
                let phase = rjj / n;
                for i in 0..rows {
                    q[(i, j)] *= phase;
                }
            }
        }
        q
    }

    pub fn unitary(&mut self, d: usize) -> ComplexMatrix {
        self.isometry(d, d)
    }

    /// Random POVM with `n` outcomes: `M_y = S^{-1/2} G_y G_y† S^{-1/2}`,
    /// `S = Σ G_y G_y†`.
    pub fn povm(&mut self, d: usize, n: usize) -> Result<Povm> {
        if n == 0 {
            return Err(Error::Parameter("a POVM needs at least one outcome".into()));
        }
        if n == 1 {
            return Ok(Povm::trivial(d));
        }
        for _attempt in 0..2 {
            let parts: Vec<HermitianOperator> = (0..n)
                .map(|_| {
                    let g = self.ginibre(d, d);
                    HermitianOperator::from_product(&g * g.adjoint())
                })
                .collect();
            let mut total = HermitianOperator::zeros(d);
            for p in &parts {
                total = total.add(p);
            }
            let spec = total.spectrum();
            if spec.rank() < d {
                continue;
            }
            let inv_root = spec.power(-0.5);
            let elements = parts.iter().map(|a| a.sandwiched_by(&inv_root)).collect();
            return Povm::new(elements);
        }
        Err(Error::Sampling("singular POVM normalisation twice in a row".into()))
    }

    /// Projective measurement in a Haar-random basis.
    pub fn projective_povm(&mut self, d: usize) -> Povm {
        let u = self.unitary(d);
        Povm::projective(&u).expect("unitary columns form a projective measurement")
    }

    /// Random channel `C^d → C^d` with `k` Kraus operators cut from a
    /// Haar-random `(d·k) × d` isometry.
    pub fn cptp(&mut self, d: usize, k: usize) -> Result<KrausMap> {
        if k == 0 {
            return Err(Error::Parameter("need at least one Kraus operator".into()));
        }
        let v = self.isometry(d * k, d);
        let ops = (0..k).map(|i| v.rows(i * d, d).into_owned()).collect();
        KrausMap::new(ops)
    }
}

pub fn haar_pure_state(d: usize, seed: Seed) -> DensityMatrix {
    Sampler::new(seed).pure_state(d)
}

pub fn hs_random_density(d: usize, rank: usize, seed: Seed) -> Result<DensityMatrix> {
    Sampler::new(seed).hs_density(d, rank)
}

pub fn random_povm(d: usize, n_outcomes: usize, seed: Seed) -> Result<Povm> {
    Sampler::new(seed).povm(d, n_outcomes)
}

pub fn random_cptp(d: usize, kraus_count: usize, seed: Seed) -> Result<KrausMap> {
    Sampler::new(seed).cptp(d, kraus_count)
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    ops: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::Parameter("need at least one Kraus operator".into()));
        };
        let (d_out, d_in) = first.shape();
        let mut total = ComplexMatrix::zeros(d_in, d_in);
        for k in &ops {
            if k.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_out,
                    found: k.nrows(),
                });
            }
            total += k.adjoint() * k;
        }
        let deviation = max_abs_diff(&total, &ComplexMatrix::identity(d_in, d_in));
        if deviation > TP_TOL {
            return Err(Error::Parameter(format!(
                "Kraus operators are not trace preserving (deviation {deviation:e})"
            )));
        }
        Ok(Self { ops })
    }

    /// `ρ ↦ I/d`, via the `d²` operators `|i⟩⟨j|/√d`.
    pub fn depolarizing(d: usize) -> Self {
        let s = 1.0 / (d as f64).sqrt();
        let mut ops = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = Complex64::new(s, 0.0);
                ops.push(k);
            }
        }
        Self { ops }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn input_dim(&self) -> usize {
        self.ops[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: rho.dim(),
            });
        }
        let d = self.output_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in &self.ops {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityMatrix::from_operator(HermitianOperator::from_product(out))
    }
}
