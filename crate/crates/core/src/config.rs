//! JSON run configurations and element serialization shared with the CLI.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::Matrix;
use crate::npharness::ExtensionSpec;
use crate::quadext::ZElem;
use crate::quadform::QuadSpace;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Q,
    Qsqrt { d: i64 },
    Fp { p: u64 },
    Fq { p: u64, m: u32 },
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        match self {
            FieldSpec::Q => Ok(Field::rationals()),
            FieldSpec::Qsqrt { d } => Field::quad_ext_of_rationals(*d),
            FieldSpec::Fp { p } => Field::prime(*p),
            FieldSpec::Fq { p, m } => Field::finite(*p, *m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormSpec {
    pub field: FieldSpec,
    pub diagonal: Vec<i64>,
}

impl FormSpec {
    pub fn build(&self) -> Result<QuadSpace> {
        if let Some(i) = self.diagonal.iter().position(|&c| c == 0) {
            return Err(Error::InvalidConfig(format!("diagonal[{i}] is zero")));
        }
        let field = self.field.build()?;
        let diag: Vec<FieldElement> = self
            .diagonal
            .iter()
            .map(|&c| field.from_int(c))
            .collect();
        if let Some(i) = diag.iter().position(|c| c.is_zero()) {
            return Err(Error::InvalidConfig(format!(
                "diagonal[{i}] vanishes in the chosen field"
            )));
        }
        QuadSpace::new(&field, diag)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionConfig {
    QuadraticOfQ { m: i64 },
    Finite { r: u32 },
}

impl ExtensionConfig {
    pub fn build(&self, base: &Field) -> Result<ExtensionSpec> {
        match self {
            ExtensionConfig::QuadraticOfQ { m } => {
                if base != &Field::rationals() {
                    return Err(Error::InvalidConfig(
                        "quadratic_of_q extension requires base field Q".into(),
                    ));
                }
                ExtensionSpec::quadratic_of_q(*m)
            }
            ExtensionConfig::Finite { r } => {
                if !base.is_finite() {
                    return Err(Error::InvalidConfig(
                        "finite extension requires a finite base field".into(),
                    ));
                }
                ExtensionSpec::finite(base, *r)
            }
        }
    }
}

/// A full run configuration; commands validate the subset of fields they
/// use and reject configs they cannot interpret.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[i64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema {:?}, expected {:?}",
                cfg.schema, SCHEMA_VERSION
            )));
        }
        Ok(cfg)
    }

    pub fn require_form(&self) -> Result<QuadSpace> {
        self.form
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing \"form\"".into()))?
            .build()
    }

    pub fn require_matrix(&self, space: &QuadSpace) -> Result<Matrix> {
        let rows = self
            .matrix
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("missing \"matrix\"".into()))?;
        let n = space.dim();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidConfig(format!(
                "matrix must be {n} x {n}"
            )));
        }
        Ok(Matrix::from_int_rows(space.field(), rows))
    }
}

/// Canonical JSON rendering of a field element (deterministic per field).
pub fn element_repr(x: &FieldElement) -> Value {
    if let Some(v) = x.fp_value() {
        return json!(v);
    }
    if let Some(cs) = x.fq_coeffs() {
        return json!(cs);
    }
    if let Some(r) = x.as_rational() {
        return json!(r.to_string());
    }
    if let Some((a, b)) = x.quad_coords() {
        return json!([a.to_string(), b.to_string()]);
    }
    unreachable!("every field element has a representation")
}

pub fn z_repr(z: &ZElem) -> Value {
    let (a, b) = z.coords();
    json!({ "a": element_repr(a), "b": element_repr(b) })
}
