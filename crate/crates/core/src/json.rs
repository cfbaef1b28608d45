//! JSON wire formats for matrices, maps, assignments and generators.
//!
//! A matrix is `{"dim": rows, "re": [[..]], "im": [[..]]}`. Column counts
//! are read from the rows, so rectangular Kraus operators use the same
//! format. Reader errors carry serde's line and column.

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channels::{kraus_from_choi, transfer_from_choi, transfer_from_kraus, ChoiMatrix, KrausSet, Superoperator};
use crate::error::{Error, Result};
use crate::matcore::CMatrix;
use crate::opendyn::{AssignmentMap, Generator, TablePair};
use crate::states::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let part = |f: fn(&Complex64) -> f64| (0..m.rows()).map(|i| m.row(i).iter().map(f).collect()).collect();
        Self {
            dim: m.rows(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "matrix declares dim {} but has {} real and {} imaginary rows",
                self.dim,
                self.re.len(),
                self.im.len()
            )));
        }
        let cols = self.re.first().map_or(0, Vec::len);
        if cols == 0 {
            return Err(Error::InvalidInput("matrix has no columns".into()));
        }
        if self.re.iter().chain(&self.im).any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(a, b)| Complex64::new(*a, *b)))
            .collect();
        CMatrix::new(self.dim, cols, data)
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperoperatorKind {
    Kraus,
    Transfer,
    Choi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperoperatorJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kind: SuperoperatorKind,
    pub data: Vec<MatrixJson>,
}

impl SuperoperatorJson {
    pub fn transfer(t: &Superoperator) -> Self {
        Self {
            dim_in: t.dim_in(),
            dim_out: t.dim_out(),
            kind: SuperoperatorKind::Transfer,
            data: vec![t.transfer().into()],
        }
    }

    pub fn kraus(k: &KrausSet) -> Self {
        Self {
            dim_in: k.dim_in(),
            dim_out: k.dim_out(),
            kind: SuperoperatorKind::Kraus,
            data: k.ops().iter().map(MatrixJson::from).collect(),
        }
    }

    pub fn choi(c: &ChoiMatrix) -> Self {
        Self {
            dim_in: c.dim_in,
            dim_out: c.dim_out,
            kind: SuperoperatorKind::Choi,
            data: vec![(&c.mat).into()],
        }
    }

    fn single(&self) -> Result<CMatrix> {
        match self.data.as_slice() {
            [m] => m.to_matrix(),
            _ => Err(Error::InvalidInput(format!("{:?} data must hold exactly one matrix", self.kind))),
        }
    }

    pub fn to_superoperator(&self) -> Result<Superoperator> {
        match self.kind {
            SuperoperatorKind::Transfer => Superoperator::new(self.dim_in, self.dim_out, self.single()?),
            SuperoperatorKind::Choi => {
                transfer_from_choi(&ChoiMatrix::new(self.dim_in, self.dim_out, self.single()?)?)
            }
            SuperoperatorKind::Kraus => Ok(transfer_from_kraus(&self.to_kraus()?)),
        }
    }

    /// Kraus operators, read directly or derived from the Choi matrix.
    pub fn to_kraus(&self) -> Result<KrausSet> {
        if self.kind != SuperoperatorKind::Kraus {
            return kraus_from_choi(&self.to_superoperator()?.choi());
        }
        let ops = self.data.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        if ops.iter().any(|w| w.shape() != (self.dim_out, self.dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must be {}x{}",
                self.dim_out, self.dim_in
            )));
        }
        KrausSet::infer(ops)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TablePairJson {
    pub system: MatrixJson,
    pub joint: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum AssignmentJson {
    Product {
        d_s: usize,
        d_r: usize,
        reservoir: MatrixJson,
    },
    Affine {
        d_s: usize,
        d_r: usize,
        linear: SuperoperatorJson,
        constant: MatrixJson,
    },
    Tabulated {
        d_s: usize,
        d_r: usize,
        table: Vec<TablePairJson>,
        #[serde(default)]
        inconsistent: bool,
    },
}

impl From<&AssignmentMap> for AssignmentJson {
    fn from(phi: &AssignmentMap) -> Self {
        let (d_s, d_r) = phi.dims();
        match phi {
            AssignmentMap::Product { reservoir, .. } => AssignmentJson::Product {
                d_s,
                d_r,
                reservoir: reservoir.matrix().into(),
            },
            AssignmentMap::Affine(a) => AssignmentJson::Affine {
                d_s,
                d_r,
                linear: SuperoperatorJson::transfer(a.linear()),
                constant: a.constant().into(),
            },
            AssignmentMap::Tabulated(t) => AssignmentJson::Tabulated {
                d_s,
                d_r,
                table: t
                    .pairs()
                    .iter()
                    .map(|p| TablePairJson {
                        system: p.system.matrix().into(),
                        joint: p.joint.matrix().into(),
                    })
                    .collect(),
                inconsistent: t.is_flagged_inconsistent(),
            },
        }
    }
}

impl AssignmentJson {
    pub fn to_assignment(&self) -> Result<AssignmentMap> {
        match self {
            AssignmentJson::Product { d_s, d_r, reservoir } => {
                let tau = reservoir.to_density()?;
                if tau.dim() != *d_r {
                    return Err(Error::DimensionMismatch(format!("reservoir must be {d_r}x{d_r}")));
                }
                Ok(AssignmentMap::product(*d_s, tau))
            }
            AssignmentJson::Affine { d_s, d_r, linear, constant } => {
                AssignmentMap::affine(*d_s, *d_r, linear.to_superoperator()?, constant.to_matrix()?)
            }
            AssignmentJson::Tabulated { d_s, d_r, table, inconsistent } => {
                let pairs = table
                    .iter()
                    .map(|p| {
                        Ok(TablePair {
                            system: p.system.to_density()?,
                            joint: p.joint.to_density()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                AssignmentMap::tabulated(*d_s, *d_r, pairs, *inconsistent)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Unitary,
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub kind: GeneratorKind,
    pub matrix: MatrixJson,
}

impl From<&Generator> for GeneratorJson {
    fn from(g: &Generator) -> Self {
        match g {
            Generator::Unitary(u) => Self { kind: GeneratorKind::Unitary, matrix: u.into() },
            Generator::Hamiltonian(h) => Self { kind: GeneratorKind::Hamiltonian, matrix: h.into() },
        }
    }
}

impl GeneratorJson {
    pub fn to_generator(&self) -> Result<Generator> {
        let m = self.matrix.to_matrix()?;
        let g = match self.kind {
            GeneratorKind::Unitary => Generator::Unitary(m),
            GeneratorKind::Hamiltonian => Generator::Hamiltonian(m),
        };
        g.validate()?;
        Ok(g)
    }
}

/// Deserializes `text`, reporting the position of the first error.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("wire types serialize")
}

pub fn parse_superoperator(text: &str) -> Result<Superoperator> {
    from_str::<SuperoperatorJson>(text)?.to_superoperator()
}

pub fn parse_assignment(text: &str) -> Result<AssignmentMap> {
    from_str::<AssignmentJson>(text)?.to_assignment()
}

pub fn parse_generator(text: &str) -> Result<Generator> {
    from_str::<GeneratorJson>(text)?.to_generator()
}

pub fn parse_density(text: &str) -> Result<DensityMatrix> {
    from_str::<MatrixJson>(text)?.to_density()
}
