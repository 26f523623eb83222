//! Gate file format: JSON with party dimensions and a row-major matrix of
//! `[re, im]` pairs. Serialisation round-trips values exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::linalg::structure::PartyStructure;
use crate::linalg::unitary::UnitaryGate;
use crate::tol::Tolerances;

/// On-disk gate representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateFile {
    pub dims: Vec<usize>,
    /// Row-major entries as `[re, im]` pairs.
    pub matrix: Vec<[f64; 2]>,
}

impl GateFile {
    pub fn from_gate(gate: &UnitaryGate) -> Self {
        GateFile {
            dims: gate.structure().dims().to_vec(),
            matrix: gate
                .matrix()
                .data()
                .iter()
                .map(|v| [v.re, v.im])
                .collect(),
        }
    }

    pub fn to_gate(&self, tol: &Tolerances) -> Result<UnitaryGate> {
        let structure = PartyStructure::new(self.dims.clone())?;
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Parse("every local dimension must be at least 2".into()));
        }
        let d = structure.total_dim();
        if self.matrix.len() != d * d {
            return Err(Error::Parse(format!(
                "matrix has {} entries, expected {}",
                self.matrix.len(),
                d * d
            )));
        }
        if self
            .matrix
            .iter()
            .any(|e| !e[0].is_finite() || !e[1].is_finite())
        {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        let m = Matrix::from_fn(d, d, |i, j| {
            let e = self.matrix[i * d + j];
            Complex64::new(e[0], e[1])
        });
        UnitaryGate::new(m, structure, tol)
    }
}

pub fn parse_gate_json(text: &str, tol: &Tolerances) -> Result<UnitaryGate> {
    let gf: GateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("gate file: {e}")))?;
    gf.to_gate(tol)
}

pub fn serialize_gate(gate: &UnitaryGate) -> String {
    serde_json::to_string_pretty(&GateFile::from_gate(gate)).expect("gate serialises")
}

pub fn load_gate_file(path: &std::path::Path, tol: &Tolerances) -> Result<UnitaryGate> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_gate_json(&text, tol)
}
