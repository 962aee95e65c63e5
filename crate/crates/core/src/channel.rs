//! Classical-quantum channels: ensembles `x → ρ_x`, measurements, and the
//! classical channels and joint distributions they induce.

use nalgebra::DMatrix;

use crate::divergence::{ProbVector, PROB_TOL};
use crate::error::{Error, Result};
use crate::matcore::{max_abs_diff, ComplexMatrix, DensityMatrix, HermitianOperator, PSD_TOL};

/// Maximum tolerated `|Σ M_y − I|` entry.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Prior-weighted signal states of a classical-quantum channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    prior: ProbVector,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(prior: ProbVector, states: Vec<DensityMatrix>) -> Result<Self> {
        if prior.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: prior.len(),
                found: states.len(),
            });
        }
        let d = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self { prior, states })
    }

    pub fn uniform(states: Vec<DensityMatrix>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::BadProbability("empty alphabet".into()));
        }
        Self::new(ProbVector::uniform(states.len()), states)
    }

    /// Same states, different prior.
    pub fn with_prior(&self, prior: ProbVector) -> Result<Self> {
        Self::new(prior, self.states.clone())
    }

    pub fn prior(&self) -> &ProbVector {
        &self.prior
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn is_pure(&self) -> bool {
        self.states.iter().all(|s| s.rank() == 1)
    }
}

/// A positive operator-valued measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::Parameter("a POVM needs at least one element".into()));
        };
        let d = first.dim();
        let mut total = ComplexMatrix::zeros(d, d);
        for m in &elements {
            if m.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.dim(),
                });
            }
            let min = m.spectrum().min();
            if min < -PSD_TOL {
                return Err(Error::NotPsd {
                    min_eigenvalue: min,
                });
            }
            total += m.matrix();
        }
        let deviation = max_abs_diff(&total, &ComplexMatrix::identity(d, d));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::Incomplete { deviation });
        }
        Ok(Self { elements })
    }

    /// The single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix) -> Result<Self> {
        let elements = (0..basis.ncols())
            .map(|j| HermitianOperator::outer(&basis.column(j).into_owned()))
            .collect();
        Self::new(elements)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self::projective(&ComplexMatrix::identity(dim, dim)).expect("identity basis")
    }

    /// Merges outcomes `a` and `b` into one element, placed at `min(a, b)`.
    pub fn coarse_grain(&self, a: usize, b: usize) -> Result<Self> {
        let n = self.elements.len();
        if a == b || a >= n || b >= n {
            return Err(Error::Parameter(format!("cannot merge outcomes {a} and {b} of {n}")));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut elements = self.elements.clone();
        let merged = elements[lo].add(&elements[hi]);
        elements[lo] = merged;
        elements.remove(hi);
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Column-stochastic matrix `W(y|x)`; rows are outcomes, columns are inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannel {
    matrix: DMatrix<f64>,
}

impl ClassicalChannel {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::BadChannel("empty channel matrix".into()));
        }
        if matrix.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::BadChannel("entries must be finite and non-negative".into()));
        }
        for (x, col) in matrix.column_iter().enumerate() {
            let s = col.sum();
            if (s - 1.0).abs() > PROB_TOL {
                return Err(Error::BadChannel(format!("column {x} sums to {s}")));
            }
        }
        Ok(Self { matrix })
    }

    /// Builds a channel from rows `W(·|x)` given per input letter.
    pub fn from_conditionals(rows: &[Vec<f64>]) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::BadChannel("ragged conditional distributions".into()));
        }
        Self::new(DMatrix::from_fn(ny, nx, |y, x| rows[x][y]))
    }

    /// The noiseless channel on `n` letters.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Binary symmetric channel with crossover probability `eps`.
    pub fn binary_symmetric(eps: f64) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(2, 2, &[1.0 - eps, eps, eps, 1.0 - eps]))
    }

    pub fn n_inputs(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn n_outputs(&self) -> usize {
        self.matrix.nrows()
    }

    /// `W(y|x)`.
    pub fn w(&self, y: usize, x: usize) -> f64 {
        self.matrix[(y, x)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Joint distribution `P(x, y)`; rows are inputs, columns are outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    matrix: DMatrix<f64>,
}

impl JointDistribution {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::BadProbability("joint entries must be non-negative".into()));
        }
        let total = matrix.sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::BadProbability(format!("joint mass is {total}")));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.matrix[(x, y)]
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        self.matrix.row_iter().map(|r| r.sum()).collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }

    /// Entries in row-major `(x, y)` order.
    pub fn flatten(&self) -> Vec<f64> {
        self.matrix.transpose().iter().copied().collect()
    }
}

fn check_measurement(e: &Ensemble, m: &Povm) -> Result<()> {
    if e.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: m.dim(),
        });
    }
    Ok(())
}

/// `W(y|x) = Tr(ρ_x M_y)`, clipped into `[0, 1]` and column-normalised.
pub fn induced_channel(e: &Ensemble, m: &Povm) -> Result<ClassicalChannel> {
    check_measurement(e, m)?;
    let mut matrix = DMatrix::from_fn(m.len(), e.len(), |y, x| {
        e.states()[x]
            .operator()
            .trace_product(&m.elements()[y])
            .clamp(0.0, 1.0)
    });
    for mut col in matrix.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    ClassicalChannel::new(matrix)
}

/// `p_M(x, y) = p(x) W(y|x)`.
pub fn joint_distribution(e: &Ensemble, m: &Povm) -> Result<JointDistribution> {
    let w = induced_channel(e, m)?;
    Ok(joint_from_channel(e.prior(), &w))
}

pub(crate) fn joint_from_channel(p: &ProbVector, w: &ClassicalChannel) -> JointDistribution {
    JointDistribution {
        matrix: DMatrix::from_fn(w.n_inputs(), w.n_outputs(), |x, y| p[x] * w.w(y, x)),
    }
}

/// `(p × q_M)(x, y) = p(x) q_M(y)` with `q_M` the outcome marginal.
pub fn separable_distribution(e: &Ensemble, m: &Povm) -> Result<JointDistribution> {
    let joint = joint_distribution(e, m)?;
    Ok(separable_from_joint(&joint))
}

pub(crate) fn separable_from_joint(joint: &JointDistribution) -> JointDistribution {
    let px = joint.marginal_x();
    let qy = joint.marginal_y();
    JointDistribution {
        matrix: DMatrix::from_fn(px.len(), qy.len(), |x, y| px[x] * qy[y]),
    }
}

/// `ρ̄ = Σ_x p(x) ρ_x`.
pub fn average_state(e: &Ensemble) -> DensityMatrix {
    let d = e.dim();
    let mut acc = HermitianOperator::zeros(d);
    for (p, rho) in e.prior().as_slice().iter().zip(e.states()) {
        acc = acc.add(&rho.operator().scale(*p));
    }
    DensityMatrix::from_operator(acc).expect("convex combination of states is a state")
}
