//! Job description, read from TOML or JSON.

use serde::{Deserialize, Serialize};
use stablered::numfield::{make_field, Field};
use stablered::polyalg::{Poly, Var};

use crate::parse::{parse_element, parse_poly};
use crate::pipeline::RunError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub e: u32,
    /// Ascending coefficients of the residue modulus over F_p.
    #[serde(default = "linear")]
    pub residue_modulus: Vec<u64>,
}

fn one() -> u32 {
    1
}

fn linear() -> Vec<u64> {
    vec![0, 1]
}

/// f as one expression or as ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Text(String),
    Coefficients(Vec<String>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobOptions {
    /// Working precision cap in p-adic digits, a rational.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<String>,
    /// Largest e*k times the degree of a root block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_extension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dot: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub field: FieldSpec,
    pub f: PolySpec,
    #[serde(default)]
    pub options: JobOptions,
}

impl JobSpec {
    /// JSON when the text starts with '{', TOML otherwise.
    pub fn from_text(text: &str) -> Result<Self, RunError> {
        let res = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| e.to_string())
        } else {
            toml::from_str(text).map_err(|e| e.to_string())
        };
        res.map_err(|msg| RunError::input("parse", msg))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("job serializes")
    }

    pub fn build_field(&self) -> Result<Field, RunError> {
        make_field(self.field.p, self.field.e, &self.field.residue_modulus).map_err(|e| RunError::input("parse", e.to_string()))
    }

    pub fn build_poly(&self, field: &Field) -> Result<Poly, RunError> {
        match &self.f {
            PolySpec::Text(t) => parse_poly(t, field).map_err(|e| RunError::input("parse", e.to_string())),
            PolySpec::Coefficients(cs) => {
                let mut c = Vec::new();
                for s in cs {
                    c.push(parse_element(s, field).map_err(|e| RunError::input("parse", e.to_string()))?);
                }
                Ok(Poly::new(field, Var::X0, c))
            }
        }
    }
}
