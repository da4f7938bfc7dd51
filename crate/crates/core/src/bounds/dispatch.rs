//! Evaluates any bound by its [`TheoremId`].

use super::dfunc::{bound_d_corollaries, bound_d_kernel, bound_d_prior, positivity_check_d, Corollary, FClass};
use super::gruss::{
    bound_t_bv, bound_t_holder_bv, bound_t_holder_lipschitz, bound_t_holder_monotone, bound_t_lipschitz_u,
    bound_t_monotone, weighted_bounds, WeightedItem, DEFAULT_P,
};
use super::monotone::{bound_d_monotone_k, bound_d_monotone_q, bound_ostrowski, OstrowskiKind};
use super::report::{BoundReport, TheoremId};
use crate::error::{Error, Result};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};

/// Everything a bound may need; unused slots are ignored.
#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub f: PiecewiseFunction,
    pub g: Option<PiecewiseFunction>,
    pub u: Option<PiecewiseFunction>,
    pub w: Option<PiecewiseFunction>,
    pub cert_f: Vec<RegularityCertificate>,
    pub cert_u: Vec<RegularityCertificate>,
    /// exponent of the `L^p` branches
    pub p: Option<f64>,
    /// evaluation point of the Ostrowski bounds
    pub x: Option<f64>,
}

impl BoundInputs {
    pub fn new(f: PiecewiseFunction) -> Self {
        BoundInputs { f, g: None, u: None, w: None, cert_f: Vec::new(), cert_u: Vec::new(), p: None, x: None }
    }

    fn slot<'a>(&self, v: &'a Option<PiecewiseFunction>, name: &str) -> Result<&'a PiecewiseFunction> {
        v.as_ref().ok_or_else(|| Error::ClassMismatch(format!("this bound needs the function `{name}`")))
    }
}

fn pick<'a>(certs: &'a [RegularityCertificate], who: &str, accept: &[&str]) -> Result<&'a RegularityCertificate> {
    certs
        .iter()
        .find(|c| accept.contains(&c.kind_name()))
        .ok_or_else(|| Error::ClassMismatch(format!("needs a {} certificate for {who}", accept.join(" or "))))
}

const HOLDER: &[&str] = &["holder", "lipschitz"];

/// Runs the bound `id` on `inputs`.
pub fn evaluate(id: TheoremId, inputs: &BoundInputs) -> Result<BoundReport> {
    use TheoremId::*;
    let f = &inputs.f;
    let g = || inputs.slot(&inputs.g, "g");
    let u = || inputs.slot(&inputs.u, "u");
    let cf = |accept: &[&str]| pick(&inputs.cert_f, "f", accept);
    let cu = |accept: &[&str]| pick(&inputs.cert_u, "u", accept);
    let p = inputs.p.unwrap_or(DEFAULT_P);
    match id {
        Thm2_1a => bound_t_bv(f, g()?, u()?, cf(&["bounds"])?),
        Thm2_2 => bound_t_monotone(f, g()?, u()?, cf(&["bounds"])?),
        Thm2_3a => bound_t_lipschitz_u(f, g()?, u()?, cf(&["bounds"])?, cu(&["lipschitz"])?),
        Thm2_1 | Cor2_2 => bound_t_holder_bv(f, g()?, u()?, cf(HOLDER)?),
        Thm2_3 | Cor2_4 => bound_t_holder_monotone(f, g()?, u()?, cf(HOLDER)?),
        Thm2_5 | Cor2_6 => bound_t_holder_lipschitz(f, g()?, u()?, cf(HOLDER)?, cu(&["lipschitz"])?, p),
        WeightedItem1 | WeightedItem2 | WeightedItem3 | WeightedItem4 | WeightedItem5 | WeightedItem6 => {
            let item = WeightedItem::from_theorem(id).expect("weighted id");
            let accept: &[&str] = match item {
                WeightedItem::Item1 | WeightedItem::Item2 | WeightedItem::Item3 => &["bounds"],
                _ => HOLDER,
            };
            weighted_bounds(f, g()?, inputs.slot(&inputs.w, "w")?, cf(accept)?, item, p)
        }
        ThmA1 => {
            let certs = [*cf(&["bounds"])?];
            bound_d_prior(f, u()?, &certs, &[*cu(&["lipschitz"])?])
        }
        ThmA2 => {
            let certs = [*cf(&["lipschitz"])?];
            let bv: Vec<_> = inputs.cert_u.iter().filter(|c| c.kind_name() == "bounded_variation").copied().collect();
            bound_d_prior(f, u()?, &certs, &bv)
        }
        ThmA6i => bound_d_kernel(f, u()?, FClass::from_certificate(cf(&["bounded_variation"])?)?),
        ThmA6ii => bound_d_kernel(f, u()?, FClass::from_certificate(cf(&["lipschitz"])?)?),
        ThmA6iii => bound_d_kernel(f, u()?, FClass::from_certificate(cf(&["monotone"])?)?),
        CorA7 => bound_d_corollaries(f, u()?, Corollary::BoundedVariation, cf(&["bounded_variation"])?, inputs.p),
        CorA8 => bound_d_corollaries(f, u()?, Corollary::Lipschitz, cf(&["lipschitz"])?, inputs.p),
        CorA9 => bound_d_corollaries(f, u()?, Corollary::Monotone, cf(&["monotone"])?, inputs.p),
        ThmA11 => positivity_check_d(f, u()?),
        ThmB1 => bound_d_monotone_k(f, u()?, cf(&["lipschitz"])?),
        ThmB2 => bound_d_monotone_q(f, u()?, cf(&["bounded_variation"])?),
        OstrowskiLipschitz | OstrowskiBv => {
            let accept: &[&str] = if id == OstrowskiLipschitz { &["lipschitz"] } else { &["bounded_variation"] };
            let x = inputs.x.unwrap_or(0.5 * (f.a() + f.b()));
            bound_ostrowski(f, x, OstrowskiKind::from_certificate(cf(accept)?)?)
        }
    }
}
