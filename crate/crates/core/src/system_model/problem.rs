use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CoupledSystem, Interconnection, ModelError, OdeModel, PdeModel, PortDims};
use crate::pi_operator::Interval;
use crate::polyalg::{parse_poly, Params, Poly, PolyMatrix, Scalar};

/// Matrix written as rows of numbers or polynomial strings.
pub type MatrixDoc = Vec<Vec<Value>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPreset {
    DirichletDirichlet,
    DirichletNeumann,
    NeumannDirichlet,
}

impl BoundaryPreset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "dirichlet-dirichlet" => Some(Self::DirichletDirichlet),
            "dirichlet-neumann" => Some(Self::DirichletNeumann),
            "neumann-dirichlet" => Some(Self::NeumannDirichlet),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::DirichletDirichlet => "dirichlet-dirichlet",
            Self::DirichletNeumann => "dirichlet-neumann",
            Self::NeumannDirichlet => "neumann-dirichlet",
        }
    }

    pub const ALL: [BoundaryPreset; 3] = [Self::DirichletDirichlet, Self::DirichletNeumann, Self::NeumannDirichlet];

    /// `Bc` for `n` components, acting on `col(z(a), z(b), z_s(a), z_s(b))`.
    pub fn matrix(self, n: usize) -> PolyMatrix {
        // Which block of z_b each of the two constraint rows selects.
        let (first, second) = match self {
            Self::DirichletDirichlet => (0, 1),
            Self::DirichletNeumann => (0, 3),
            Self::NeumannDirichlet => (2, 1),
        };
        PolyMatrix::from_fn(2 * n, 4 * n, |i, j| {
            let (blk, k) = (i / n, i % n);
            let target = if blk == 0 { first } else { second };
            if j == target * n + k {
                Poly::one()
            } else {
                Poly::zero()
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BcDoc {
    Preset(String),
    Matrix(MatrixDoc),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeDoc {
    #[serde(rename = "A", default)]
    pub a: Option<MatrixDoc>,
    #[serde(rename = "B", default)]
    pub b: Option<MatrixDoc>,
    #[serde(rename = "C", default)]
    pub c: Option<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeDoc {
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(rename = "A0", default)]
    pub a0: Option<MatrixDoc>,
    #[serde(rename = "A1", default)]
    pub a1: Option<MatrixDoc>,
    #[serde(rename = "A2", default)]
    pub a2: Option<MatrixDoc>,
    #[serde(rename = "B1", default)]
    pub b1: Option<MatrixDoc>,
    #[serde(rename = "C1", default)]
    pub c1: Option<MatrixDoc>,
    #[serde(rename = "Ca", default)]
    pub ca: Option<MatrixDoc>,
    #[serde(rename = "Cb", default)]
    pub cb: Option<MatrixDoc>,
    #[serde(rename = "Bc")]
    pub bc: BcDoc,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    #[serde(rename = "L", default)]
    pub l: Option<MatrixDoc>,
    #[serde(default)]
    pub dims: PortDims,
}

/// A problem file as written on disk. Blocks that are omitted are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub interval: [Value; 2],
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub ode: OdeDoc,
    #[serde(default)]
    pub pde: Option<PdeDoc>,
    #[serde(default)]
    pub link: LinkDoc,
}

fn value_text(path: &str, v: &Value) -> Result<String, ModelError> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(ModelError::Input(format!("{path}: expected a number or polynomial string"))),
    }
}

fn parse_entry(path: &str, v: &Value, params: &Params) -> Result<Poly, ModelError> {
    let text = value_text(path, v)?;
    parse_poly(&text, params).map_err(|source| ModelError::Entry { path: path.to_string(), source })
}

fn parse_constant(path: &str, v: &Value, params: &Params) -> Result<Scalar, ModelError> {
    let p = parse_entry(path, v, params)?;
    if !p.is_constant() {
        return Err(ModelError::Input(format!("{path}: expected a constant")));
    }
    Ok(p.constant_term())
}

fn parse_matrix(
    path: &str,
    doc: Option<&MatrixDoc>,
    shape: (usize, usize),
    params: &Params,
) -> Result<PolyMatrix, ModelError> {
    let Some(rows) = doc else {
        return Ok(PolyMatrix::zeros(shape.0, shape.1));
    };
    let empty = rows.iter().all(Vec::is_empty);
    if empty && (shape.0 == 0 || shape.1 == 0) {
        return Ok(PolyMatrix::zeros(shape.0, shape.1));
    }
    let found_cols = rows.first().map_or(0, Vec::len);
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(ModelError::Shape {
            path: path.to_string(),
            expected: format!("{}x{}", shape.0, shape.1),
            found: format!("{}x{}", rows.len(), found_cols),
        });
    }
    let mut data = Vec::with_capacity(shape.0 * shape.1);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            data.push(parse_entry(&format!("{path}[{i}][{j}]"), v, params)?);
        }
    }
    Ok(PolyMatrix::new(shape.0, shape.1, data)?)
}

impl ProblemDoc {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parameter values declared in the file.
    pub fn params(&self) -> Result<Params, ModelError> {
        let mut out = Params::new();
        for (name, v) in &self.params {
            if matches!(name.as_str(), "s" | "eta" | "theta") {
                return Err(ModelError::Input(format!("params.{name}: reserved variable name")));
            }
            let value = parse_constant(&format!("params.{name}"), v, &Params::new())?;
            out.insert(name.clone(), value);
        }
        Ok(out)
    }

    /// Build the system, with `overrides` replacing declared parameter values.
    pub fn build(&self, overrides: &Params) -> Result<CoupledSystem, ModelError> {
        let mut params = self.params()?;
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(ModelError::Input(format!("parameter '{k}' is not declared in the problem file")));
            }
            params.insert(k.clone(), v.clone());
        }
        let a = parse_constant("interval[0]", &self.interval[0], &params)?;
        let b = parse_constant("interval[1]", &self.interval[1], &params)?;
        let interval = Interval::new(a, b).map_err(|_| ModelError::Input("interval must satisfy a < b".into()))?;

        let n_o = self.ode.a.as_ref().map_or(0, Vec::len);
        let n_p = match &self.pde {
            None => 0,
            Some(p) => match p.n {
                Some(n) => n,
                None => [&p.a2, &p.a1, &p.a0]
                    .into_iter()
                    .flatten()
                    .map(Vec::len)
                    .next()
                    .ok_or_else(|| ModelError::Input("pde: give 'n' or at least one of A0, A1, A2".into()))?,
            },
        };
        let ports = self.link.dims;
        let PortDims { m_o, m_p, p_o, p_p } = ports;

        let ode = OdeModel {
            a: parse_matrix("ode.A", self.ode.a.as_ref(), (n_o, n_o), &params)?,
            b: parse_matrix("ode.B", self.ode.b.as_ref(), (n_o, m_o), &params)?,
            c: parse_matrix("ode.C", self.ode.c.as_ref(), (p_o, n_o), &params)?,
        };
        let empty = PdeDoc {
            n: Some(0),
            a0: None,
            a1: None,
            a2: None,
            b1: None,
            c1: None,
            ca: None,
            cb: None,
            bc: BcDoc::Matrix(vec![]),
        };
        let pd = self.pde.as_ref().unwrap_or(&empty);
        let bc = match &pd.bc {
            BcDoc::Preset(name) => BoundaryPreset::from_name(name)
                .ok_or_else(|| ModelError::Input(format!("pde.Bc: unknown boundary preset '{name}'")))?
                .matrix(n_p),
            BcDoc::Matrix(m) => parse_matrix("pde.Bc", Some(m), (2 * n_p, 4 * n_p), &params)?,
        };
        let pde = PdeModel {
            interval,
            a0: parse_matrix("pde.A0", pd.a0.as_ref(), (n_p, n_p), &params)?,
            a1: parse_matrix("pde.A1", pd.a1.as_ref(), (n_p, n_p), &params)?,
            a2: parse_matrix("pde.A2", pd.a2.as_ref(), (n_p, n_p), &params)?,
            b1: parse_matrix("pde.B1", pd.b1.as_ref(), (n_p, m_p), &params)?,
            c1: parse_matrix("pde.C1", pd.c1.as_ref(), (p_p, 4 * n_p), &params)?,
            ca: parse_matrix("pde.Ca", pd.ca.as_ref(), (p_p, n_p), &params)?,
            cb: parse_matrix("pde.Cb", pd.cb.as_ref(), (p_p, n_p), &params)?,
            bc,
        };
        let link = Interconnection {
            l: parse_matrix("link.L", self.link.l.as_ref(), (m_o + m_p, p_o + p_p), &params)?,
            ports,
        };
        Ok(CoupledSystem { ode, pde, link })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn heat_system() -> CoupledSystem {
        let doc = ProblemDoc::from_json(r#"{"interval": [0, 1], "pde": {"A2": [[1]], "Bc": "dirichlet-dirichlet"}}"#)
            .unwrap();
        doc.build(&Params::new()).unwrap()
    }

    #[test]
    fn presets_expand() {
        let m = BoundaryPreset::NeumannDirichlet.matrix(1);
        let row = |i: usize| (0..4).map(|j| m.get(i, j).constant_term()).collect::<Vec<_>>();
        let one = crate::polyalg::int(1);
        let zero = crate::polyalg::int(0);
        assert_eq!(row(0), vec![zero.clone(), zero.clone(), one.clone(), zero.clone()]);
        assert_eq!(row(1), vec![zero.clone(), one, zero.clone(), zero]);
        assert_eq!(BoundaryPreset::DirichletNeumann.matrix(2).dims(), (4, 8));
    }

    #[test]
    fn shape_errors_name_the_block() {
        let doc = ProblemDoc::from_json(r#"{"interval": [0, 1], "ode": {"A": [[1, 2]]}}"#).unwrap();
        let err = doc.build(&Params::new()).unwrap_err().to_string();
        assert!(err.contains("ode.A"), "{err}");
    }

    #[test]
    fn entry_errors_carry_path() {
        let doc =
            ProblemDoc::from_json(r#"{"interval": [0, 1], "pde": {"A2": [["1 +"]], "Bc": "dirichlet-dirichlet"}}"#)
                .unwrap();
        let err = doc.build(&Params::new()).unwrap_err().to_string();
        assert!(err.contains("pde.A2[0][0]"), "{err}");
    }

    #[test]
    fn params_and_overrides() {
        let doc = ProblemDoc::from_json(
            r#"{"interval": [0, 1], "params": {"lambda": 2.5},
                "pde": {"A0": [["lambda"]], "A2": [[1]], "Bc": "dirichlet-dirichlet"}}"#,
        )
        .unwrap();
        let sys = doc.build(&Params::new()).unwrap();
        assert_eq!(sys.pde.a0.get(0, 0).constant_term(), crate::polyalg::ratio(5, 2));
        let mut o = Params::new();
        o.insert("lambda".into(), crate::polyalg::int(7));
        assert_eq!(doc.build(&o).unwrap().pde.a0.get(0, 0).constant_term(), crate::polyalg::int(7));
        o.insert("mu".into(), crate::polyalg::int(1));
        assert!(doc.build(&o).is_err());
    }

    #[test]
    fn decimals_are_exact() {
        let doc = ProblemDoc::from_json(r#"{"interval": [0, 1], "ode": {"A": [[-1.2142]]}}"#).unwrap();
        let sys = doc.build(&Params::new()).unwrap();
        assert_eq!(sys.ode.a.get(0, 0).constant_term(), crate::polyalg::ratio(-12142, 10000));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(ProblemDoc::from_json(r#"{"interval": [0, 1], "odee": {}}"#).is_err());
    }
}
