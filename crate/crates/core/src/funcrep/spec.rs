use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::piecewise::PiecewiseFunction;
use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub coeffs: Vec<f64>,
}

/// JSON form of a [`PiecewiseFunction`]:
/// `{"domain": [a, b], "breakpoints": [...], "pieces": [{"coeffs": [...]}], "values": {"i": v}}`.
///
/// `breakpoints` includes both ends and defaults to `[a, b]`; `values` lists
/// only point values that differ from the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub domain: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    pub pieces: Vec<PieceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<usize, f64>,
}

impl FunctionSpec {
    pub fn build(&self) -> Result<PiecewiseFunction> {
        let [a, b] = self.domain;
        let bps = self.breakpoints.clone().unwrap_or_else(|| vec![a, b]);
        if bps.first() != Some(&a) || bps.last() != Some(&b) {
            return Err(Error::InvalidFunction(format!("breakpoints must start at {a} and end at {b}")));
        }
        let pieces = self.pieces.iter().map(|p| Poly::new(p.coeffs.iter().copied())).collect();
        PiecewiseFunction::with_values(bps, pieces, &self.values)
    }

    pub fn from_function(f: &PiecewiseFunction) -> Self {
        let bps = f.breakpoints().to_vec();
        let defaults =
            PiecewiseFunction::new(bps.clone(), f.pieces().to_vec()).map(|d| d.values().to_vec()).unwrap_or_default();
        let values =
            f.values().iter().enumerate().filter(|&(i, v)| defaults.get(i) != Some(v)).map(|(i, &v)| (i, v)).collect();
        FunctionSpec {
            domain: [f.a(), f.b()],
            breakpoints: if bps.len() > 2 { Some(bps) } else { None },
            pieces: f.pieces().iter().map(|p| PieceSpec { coeffs: p.coeffs().to_vec() }).collect(),
            values,
        }
    }
}

impl TryFrom<&FunctionSpec> for PiecewiseFunction {
    type Error = Error;

    fn try_from(s: &FunctionSpec) -> Result<Self> {
        s.build()
    }
}

impl From<&PiecewiseFunction> for FunctionSpec {
    fn from(f: &PiecewiseFunction) -> Self {
        FunctionSpec::from_function(f)
    }
}
