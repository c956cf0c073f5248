use serde::{Deserialize, Serialize};

use super::FilterSpec;
use crate::error::{Error, Result};
use crate::linalg::Cx;

/// On-disk filter description:
/// `{"variant": "polynomial"|"rational"|"cayley"|"per_index", "coeffs": [[re, im], ..], "den": [[re, im], ..]?, "real_part": bool?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterFile {
    pub variant: String,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_part: Option<bool>,
}

fn to_cx(v: &[[f64; 2]]) -> Vec<Cx> {
    v.iter().map(|&[re, im]| Cx::new(re, im)).collect()
}

fn to_pairs(v: &[Cx]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl FilterFile {
    pub fn into_spec(self) -> Result<FilterSpec> {
        let spec = match self.variant.as_str() {
            "polynomial" => FilterSpec::polynomial(to_cx(&self.coeffs))?,
            "rational" => {
                let den = self.den.ok_or_else(|| {
                    Error::InvalidArgument("rational filter needs \"den\"".into())
                })?;
                FilterSpec::rational(to_cx(&self.coeffs), to_cx(&den))?
            }
            "cayley" => FilterSpec::cayley(to_cx(&self.coeffs), self.real_part.unwrap_or(false))?,
            "per_index" => FilterSpec::per_index(to_cx(&self.coeffs)),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown filter variant {other:?}"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&FilterSpec> for FilterFile {
    fn from(spec: &FilterSpec) -> Self {
        let variant = spec.variant_name().to_string();
        match spec {
            FilterSpec::PerIndex(c) | FilterSpec::Polynomial(c) => FilterFile {
                variant,
                coeffs: to_pairs(c),
                den: None,
                real_part: None,
            },
            FilterSpec::Rational { num, den } => FilterFile {
                variant,
                coeffs: to_pairs(num),
                den: Some(to_pairs(den)),
                real_part: None,
            },
            FilterSpec::Cayley { coeffs, real_part } => FilterFile {
                variant,
                coeffs: to_pairs(coeffs),
                den: None,
                real_part: Some(*real_part),
            },
        }
    }
}
