use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Dims, Interval, PiError, PiOperator};
use crate::polyalg::{format_poly, parse_poly, parse_poly_as, Params, PolyError, PolyMatrix, TextCoeff};

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("block {block}: {source}")]
    Entry { block: &'static str, source: PolyError },
    #[error("block {block} has ragged rows")]
    Ragged { block: &'static str },
    #[error(transparent)]
    Operator(#[from] PiError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsDoc {
    pub m_out: usize,
    pub n_out: usize,
    pub m_in: usize,
    pub n_in: usize,
}

/// JSON shape of an operator; entries are polynomial text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub interval: [String; 2],
    pub dims: DimsDoc,
    #[serde(rename = "P")]
    pub p: Vec<Vec<String>>,
    #[serde(rename = "Q1")]
    pub q1: Vec<Vec<String>>,
    #[serde(rename = "Q2")]
    pub q2: Vec<Vec<String>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<String>>,
    #[serde(rename = "R1")]
    pub r1: Vec<Vec<String>>,
    #[serde(rename = "R2")]
    pub r2: Vec<Vec<String>>,
}

fn matrix_doc<C: TextCoeff>(m: &PolyMatrix<C>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| format_poly(m.get(i, j))).collect()).collect()
}

fn matrix_from_doc<C: TextCoeff>(
    block: &'static str,
    rows: &[Vec<String>],
    shape: (usize, usize),
) -> Result<PolyMatrix<C>, SerialError> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(SerialError::Ragged { block });
    }
    let mut data = Vec::with_capacity(shape.0 * shape.1);
    for r in rows {
        for e in r {
            data.push(parse_poly_as::<C>(e).map_err(|source| SerialError::Entry { block, source })?);
        }
    }
    PolyMatrix::new(shape.0, shape.1, data).map_err(|source| SerialError::Entry { block, source })
}

impl<C: TextCoeff> PiOperator<C> {
    pub fn to_doc(&self) -> OperatorDoc {
        let d = self.dims();
        OperatorDoc {
            interval: [self.interval().a.to_string(), self.interval().b.to_string()],
            dims: DimsDoc { m_out: d.m_out, n_out: d.n_out, m_in: d.m_in, n_in: d.n_in },
            p: matrix_doc(&self.p),
            q1: matrix_doc(&self.q1),
            q2: matrix_doc(&self.q2),
            s: matrix_doc(&self.s),
            r1: matrix_doc(&self.r1),
            r2: matrix_doc(&self.r2),
        }
    }

    pub fn from_doc(doc: &OperatorDoc) -> Result<Self, SerialError> {
        let bound = |k: usize| -> Result<_, SerialError> {
            let p = parse_poly(&doc.interval[k], &Params::new())
                .map_err(|source| SerialError::Entry { block: "interval", source })?;
            if !p.is_constant() {
                return Err(SerialError::Entry { block: "interval", source: PolyError::NotConstant });
            }
            Ok(p.constant_term())
        };
        let interval = Interval::new(bound(0)?, bound(1)?)?;
        let DimsDoc { m_out, n_out, m_in, n_in } = doc.dims;
        let op = PiOperator::new(
            interval,
            matrix_from_doc("P", &doc.p, (m_out, m_in))?,
            matrix_from_doc("Q1", &doc.q1, (m_out, n_in))?,
            matrix_from_doc("Q2", &doc.q2, (n_out, m_in))?,
            matrix_from_doc("S", &doc.s, (n_out, n_in))?,
            matrix_from_doc("R1", &doc.r1, (n_out, n_in))?,
            matrix_from_doc("R2", &doc.r2, (n_out, n_in))?,
        )?;
        debug_assert_eq!(op.dims(), Dims { m_out, n_out, m_in, n_in });
        Ok(op)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("operator documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, SerialError> {
        Self::from_doc(&serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_poly;

    #[test]
    fn json_roundtrip_exact() {
        let m = |t: &str| PolyMatrix::new(1, 1, vec![parse_poly(t, &Params::new()).unwrap()]).unwrap();
        let op = PiOperator::new(Interval::unit(), m("3/2"), m("s - 1"), m("-s^2"), m("1"), m("s*eta + 1/7"), m("eta"))
            .unwrap();
        let back = PiOperator::<crate::polyalg::Scalar>::from_json(&op.to_json()).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn json_roundtrip_float() {
        let op: PiOperator<f64> =
            PiOperator::identity(Interval::unit(), 1, 2).map_blocks(|b| b.scale(&crate::polyalg::ratio(1, 3)));
        let back = PiOperator::<f64>::from_json(&op.to_json()).unwrap();
        assert_eq!(back, op);
    }
}
