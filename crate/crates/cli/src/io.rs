//! JSON file formats for states, ensembles and measurements.
//!
//! A matrix is `{"dim": d, "re": [...], "im": [...]}` with `re`/`im` either
//! flat row-major arrays of length d² or nested d×d arrays; `im` may be
//! omitted for real matrices. Ensembles are `{"prior": [...], "states":
//! [matrix, ...]}` and POVMs are `{"elements": [matrix, ...]}`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use renyi_core::channel::{Ensemble, Povm};
use renyi_core::divergence::ProbVector;
use renyi_core::matcore::{ComplexMatrix, DensityMatrix, HermitianOperator};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

impl Entries {
    fn flatten(&self, dim: usize, what: &str) -> Result<Vec<f64>, String> {
        let flat: Vec<f64> = match self {
            Entries::Flat(v) => v.clone(),
            Entries::Nested(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(format!("'{what}' must be a {dim}x{dim} array"));
                }
                rows.concat()
            }
        };
        if flat.len() != dim * dim {
            return Err(format!("'{what}' has {} entries, expected {}", flat.len(), dim * dim));
        }
        Ok(flat)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Entries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Entries>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.nrows();
        let (mut re, mut im) = (Vec::with_capacity(d * d), Vec::with_capacity(d * d));
        for i in 0..d {
            for j in 0..d {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        let im = im.iter().any(|v| *v != 0.0).then_some(Entries::Flat(im));
        Self {
            dim: d,
            re: Entries::Flat(re),
            im,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.dim == 0 {
            return Err("'dim' must be positive".into());
        }
        let re = self.re.flatten(self.dim, "re")?;
        let im = match &self.im {
            Some(e) => e.flatten(self.dim, "im")?,
            None => vec![0.0; re.len()],
        };
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let k = i * self.dim + j;
            Complex64::new(re[k], im[k])
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub prior: Vec<f64>,
    pub states: Vec<MatrixFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub elements: Vec<MatrixFile>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix, String> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    state_from(&file)
}

fn state_from(file: &MatrixFile) -> Result<DensityMatrix, String> {
    DensityMatrix::new(file.to_matrix()?).map_err(|e| e.to_string())
}

pub fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let file: MatrixFile = read_json(path)?;
    state_from(&file).map_err(|e| CliError::input(path, e))
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble, CliError> {
    let file: EnsembleFile = read_json(path)?;
    let states = file
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| state_from(s).map_err(|e| CliError::input(path, format!("state {i}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let prior = ProbVector::new(file.prior).map_err(|e| CliError::input(path, format!("prior: {e}")))?;
    Ensemble::new(prior, states).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn load_povm(path: &Path) -> Result<Povm, CliError> {
    let file: PovmFile = read_json(path)?;
    let elements = file
        .elements
        .iter()
        .enumerate()
        .map(|(i, m)| {
            m.to_matrix()
                .and_then(|m| HermitianOperator::new(m).map_err(|e| e.to_string()))
                .map_err(|e| CliError::input(path, format!("element {i}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Povm::new(elements).map_err(|e| CliError::input(path, e.to_string()))
}

pub fn state_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(rho.matrix())).expect("serialisable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_nested_agree() {
        let a = parse_state(r#"{"dim": 2, "re": [0.5, 0, 0, 0.5]}"#).unwrap();
        let b = parse_state(r#"{"dim": 2, "re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}"#).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn complex_entries_are_row_major() {
        let rho = parse_state(r#"{"dim": 2, "re": [0.5, 0, 0, 0.5], "im": [0, -0.5, 0.5, 0]}"#).unwrap();
        assert_eq!(rho.matrix()[(0, 1)], Complex64::new(0.0, -0.5));
        assert_eq!(rho.matrix()[(1, 0)], Complex64::new(0.0, 0.5));
    }

    #[test]
    fn violated_invariants_are_named() {
        let e = parse_state(r#"{"dim": 2, "re": [1, 0, 0, 1]}"#).unwrap_err();
        assert!(e.contains("trace"), "{e}");
        let e = parse_state(r#"{"dim": 2, "re": [0.5, 0.3, 0, 0.5]}"#).unwrap_err();
        assert!(e.contains("Hermitian"), "{e}");
        let e = parse_state(r#"{"dim": 2, "re": [1.5, 0, 0, -0.5]}"#).unwrap_err();
        assert!(e.contains("positive semi-definite"), "{e}");
        let e = parse_state(r#"{"dim": 2, "re": [1, 0, 0]}"#).unwrap_err();
        assert!(e.contains("3 entries"), "{e}");
        let e = parse_state(r#"{"dim": 2, "re": [1, 0, 0, 0], "extra": 1}"#).unwrap_err();
        assert!(e.contains("unknown field"), "{e}");
    }

    #[test]
    fn round_trip() {
        let rho = parse_state(r#"{"dim": 2, "re": [0.75, 0.25, 0.25, 0.25], "im": [0, 0.1, -0.1, 0]}"#).unwrap();
        assert_eq!(parse_state(&state_json(&rho)).unwrap(), rho);
    }
}
