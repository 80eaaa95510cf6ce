//! JSON form of a problem: `{d1, d2, n, components: [{A, B, C, t}]}` with
//! matrices as arrays of rows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{FiniteSumProblem, QuadraticComponent};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub d1: usize,
    pub d2: usize,
    pub n: usize,
    pub components: Vec<ComponentDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub t: Vec<f64>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(name: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return invalid(format!("{name} must be {nrows}x{ncols}"));
    }
    Ok(DMatrix::from_row_iterator(nrows, ncols, rows.iter().flatten().copied()))
}

impl From<&FiniteSumProblem> for ProblemDoc {
    fn from(p: &FiniteSumProblem) -> Self {
        Self {
            d1: p.d1(),
            d2: p.d2(),
            n: p.n(),
            components: p
                .components()
                .iter()
                .map(|c| ComponentDoc {
                    a: rows(c.a()),
                    b: rows(c.b()),
                    c: rows(c.c()),
                    t: c.t().iter().copied().collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<ProblemDoc> for FiniteSumProblem {
    type Error = Error;

    fn try_from(doc: ProblemDoc) -> Result<Self> {
        if doc.components.len() != doc.n {
            return invalid(format!(
                "n = {} but {} components given",
                doc.n,
                doc.components.len()
            ));
        }
        let comps = doc
            .components
            .iter()
            .map(|c| {
                QuadraticComponent::new(
                    matrix("A", &c.a, doc.d1, doc.d1)?,
                    matrix("B", &c.b, doc.d1, doc.d2)?,
                    matrix("C", &c.c, doc.d2, doc.d2)?,
                    DVector::from_column_slice(&c.t),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteSumProblem::new(comps)
    }
}

impl FiniteSumProblem {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProblemDoc::from(self)).expect("finite doubles serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDoc =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad problem JSON: {e}")))?;
        doc.try_into()
    }
}
