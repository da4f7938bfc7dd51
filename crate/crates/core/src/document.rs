//! JSON input documents: named function slots plus certificates.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundInputs;
use crate::error::{Error, Result};
use crate::funcrep::{CertificateSpec, FunctionSpec, PiecewiseFunction, RegularityCertificate};

fn default_slot() -> String {
    "f".to_string()
}

/// A certificate attached to one of the function slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateEntry {
    #[serde(default = "default_slot")]
    pub function: String,
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl CertificateEntry {
    pub fn new(function: &str, cert: RegularityCertificate) -> Self {
        let spec = CertificateSpec::from(cert);
        CertificateEntry { function: function.to_string(), kind: spec.kind, params: spec.params }
    }

    pub fn certificate(&self) -> Result<RegularityCertificate> {
        RegularityCertificate::try_from(CertificateSpec { kind: self.kind.clone(), params: self.params.clone() })
    }
}

/// `{"f": {...}, "g": {...}, "u": {...}, "w": {...}, "certificates": [...], "p": 2, "x": 0.5}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

impl InputDocument {
    /// Parses JSON, reporting the offending field path and position.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::InvalidFunction(format!(
                "schema error at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    /// The function in `slot`, if present.
    pub fn function(&self, slot: &str) -> Result<Option<PiecewiseFunction>> {
        let spec = match slot {
            "f" => &self.f,
            "g" => &self.g,
            "u" => &self.u,
            "w" => &self.w,
            other => return Err(Error::InvalidFunction(format!("unknown function slot `{other}`"))),
        };
        spec.as_ref().map(|s| s.build().map_err(|e| Error::InvalidFunction(format!("`{slot}`: {e}")))).transpose()
    }

    pub fn require(&self, slot: &str) -> Result<PiecewiseFunction> {
        self.function(slot)?.ok_or_else(|| Error::InvalidFunction(format!("missing function `{slot}`")))
    }

    /// Certificates stated for `slot`, in document order.
    pub fn certificates_for(&self, slot: &str) -> Result<Vec<RegularityCertificate>> {
        for c in &self.certificates {
            if !matches!(c.function.as_str(), "f" | "g" | "u" | "w") {
                return Err(Error::MalformedCertificate(format!("unknown function slot `{}`", c.function)));
            }
        }
        self.certificates.iter().filter(|c| c.function == slot).map(|c| c.certificate()).collect()
    }

    pub fn bound_inputs(&self) -> Result<BoundInputs> {
        let mut inp = BoundInputs::new(self.require("f")?);
        inp.g = self.function("g")?;
        inp.u = self.function("u")?;
        inp.w = self.function("w")?;
        inp.cert_f = self.certificates_for("f")?;
        inp.cert_u = self.certificates_for("u")?;
        inp.p = self.p;
        inp.x = self.x;
        Ok(inp)
    }

    pub fn from_bound_inputs(inp: &BoundInputs) -> Self {
        let spec = |f: &Option<PiecewiseFunction>| f.as_ref().map(FunctionSpec::from_function);
        let certificates = inp
            .cert_f
            .iter()
            .map(|&c| CertificateEntry::new("f", c))
            .chain(inp.cert_u.iter().map(|&c| CertificateEntry::new("u", c)))
            .collect();
        InputDocument {
            f: Some(FunctionSpec::from_function(&inp.f)),
            g: spec(&inp.g),
            u: spec(&inp.u),
            w: spec(&inp.w),
            certificates,
            p: inp.p,
            x: inp.x,
        }
    }
}
