//! Catalogue of extremal inputs: each one attains its bound, so the constant
//! in front of it cannot be lowered.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bounds::{
    bound_d_monotone_k, bound_d_monotone_q, bound_t_bv, bound_t_holder_bv, bound_t_holder_lipschitz,
    bound_t_holder_monotone, bound_t_lipschitz_u, bound_t_monotone, BoundReport, TheoremId,
};
use crate::error::{Error, Result};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};
use crate::poly::Poly;

/// Tolerance on `|ratio - expected_ratio|`.
pub const RATIO_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Witness {
    pub id: String,
    pub theorem_id: TheoremId,
    pub a: f64,
    pub b: f64,
    pub f: PiecewiseFunction,
    pub g: PiecewiseFunction,
    pub u: PiecewiseFunction,
    pub cert_f: RegularityCertificate,
    pub cert_u: Option<RegularityCertificate>,
    /// tier whose ratio is compared, `None` for the primary bound
    pub tier: Option<String>,
    pub p: Option<f64>,
    pub expected_ratio: f64,
}

/// `-1` at `a`, `0` inside, `1` at `b`.
pub fn endpoint_jump_integrator(a: f64, b: f64) -> Result<PiecewiseFunction> {
    let vals = BTreeMap::from([(0, -1.0), (1, 1.0)]);
    PiecewiseFunction::with_values(vec![a, b], vec![Poly::zero()], &vals)
}

/// `0` on `[a, b)`, `1` at `b`.
pub fn jump_at_end(a: f64, b: f64) -> Result<PiecewiseFunction> {
    PiecewiseFunction::with_values(vec![a, b], vec![Poly::zero()], &BTreeMap::from([(1, 1.0)]))
}

/// `-1` on `[a, mid]`, `1` on `(mid, b]`.
pub fn sign_step(a: f64, b: f64) -> Result<PiecewiseFunction> {
    PiecewiseFunction::step(a, b, 0.5 * (a + b), -1.0, 1.0)
}

/// Ids of all catalogued witnesses.
pub const WITNESS_IDS: &[&str] =
    &["thm_2_1a", "thm_2_2", "thm_2_3a", "cor_2_2", "cor_2_4", "cor_2_6", "thm_b_1", "thm_b_2"];

/// The witness `id` on `[0, 1]`.
pub fn witness(id: &str) -> Result<Witness> {
    witness_on(id, 0.0, 1.0)
}

/// The witness `id` on `[a, b]`.
pub fn witness_on(id: &str, a: f64, b: f64) -> Result<Witness> {
    if !(a < b) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let mid = 0.5 * (a + b);
    let t = PiecewiseFunction::identity(a, b)?;
    let centered = t.add_constant(-mid);
    let lip1 = RegularityCertificate::Lipschitz { l: 1.0 };
    let base = |theorem_id, f: PiecewiseFunction, g, u, cert_f| Witness {
        id: id.to_string(),
        theorem_id,
        a,
        b,
        f,
        g,
        u,
        cert_f,
        cert_u: None,
        tier: None,
        p: None,
        expected_ratio: 1.0,
    };
    let bounds_t = RegularityCertificate::Bounds { m: a, big_m: b };
    let w = match id {
        "thm_2_1a" => base(TheoremId::Thm2_1a, t.clone(), t, endpoint_jump_integrator(a, b)?, bounds_t),
        "thm_2_2" => base(TheoremId::Thm2_2, t.clone(), t, endpoint_jump_integrator(a, b)?, bounds_t),
        "thm_2_3a" => {
            let s = sign_step(a, b)?;
            Witness {
                cert_u: Some(lip1),
                ..base(TheoremId::Thm2_3a, s.clone(), s, t, RegularityCertificate::Bounds { m: -1.0, big_m: 1.0 })
            }
        }
        "cor_2_2" => base(TheoremId::Cor2_2, t.clone(), t, endpoint_jump_integrator(a, b)?, lip1),
        "cor_2_4" => Witness {
            tier: Some("first".into()),
            ..base(TheoremId::Cor2_4, t.clone(), t, endpoint_jump_integrator(a, b)?, lip1)
        },
        "cor_2_6" => Witness {
            cert_u: Some(lip1),
            tier: Some("inf_branch".into()),
            ..base(TheoremId::Cor2_6, centered, sign_step(a, b)?, t, lip1)
        },
        "thm_b_1" => {
            let g = PiecewiseFunction::constant(a, b, 0.0)?;
            base(TheoremId::ThmB1, centered, g, jump_at_end(a, b)?, lip1)
        }
        "thm_b_2" => {
            let g = PiecewiseFunction::constant(a, b, 0.0)?;
            let u = PiecewiseFunction::step(a, b, mid, 0.0, 1.0)?;
            base(TheoremId::ThmB2, centered, g, u, RegularityCertificate::BoundedVariation { v: b - a })
        }
        other => return Err(Error::UnknownWitness(other.to_string())),
    };
    Ok(w)
}

/// Evaluates the bound the witness is built for.
pub fn witness_report(w: &Witness) -> Result<BoundReport> {
    let (f, g, u) = (&w.f, &w.g, &w.u);
    match w.theorem_id {
        TheoremId::Thm2_1a => bound_t_bv(f, g, u, &w.cert_f),
        TheoremId::Thm2_2 => bound_t_monotone(f, g, u, &w.cert_f),
        TheoremId::Thm2_3a => bound_t_lipschitz_u(f, g, u, &w.cert_f, &w.cert_u.expect("u certificate")),
        TheoremId::Cor2_2 => bound_t_holder_bv(f, g, u, &w.cert_f),
        TheoremId::Cor2_4 => bound_t_holder_monotone(f, g, u, &w.cert_f),
        TheoremId::Cor2_6 => {
            bound_t_holder_lipschitz(f, g, u, &w.cert_f, &w.cert_u.expect("u certificate"), w.p.unwrap_or(2.0))
        }
        TheoremId::ThmB1 => bound_d_monotone_k(f, u, &w.cert_f),
        TheoremId::ThmB2 => bound_d_monotone_q(f, u, &w.cert_f),
        other => Err(Error::UnknownWitness(other.to_string())),
    }
}

/// Ratio `lhs / rhs` of the witnessed tier.
pub fn sharpness_ratio(w: &Witness) -> Result<f64> {
    let r = witness_report(w)?;
    Ok(match &w.tier {
        None => r.ratio,
        Some(name) => r.tier(name).ok_or_else(|| Error::UnknownWitness(format!("{}: no tier {name}", w.id)))?.ratio,
    })
}

/// One line of the sharpness table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub id: String,
    pub theorem_id: TheoremId,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub expected: f64,
    pub pass: bool,
}

pub fn sharpness_row(w: &Witness) -> Result<SharpnessRow> {
    let r = witness_report(w)?;
    let (rhs, ratio) = match &w.tier {
        None => (r.rhs, r.ratio),
        Some(name) => {
            let t = r.tier(name).ok_or_else(|| Error::UnknownWitness(format!("{}: no tier {name}", w.id)))?;
            (t.value, t.ratio)
        }
    };
    Ok(SharpnessRow {
        id: w.id.clone(),
        theorem_id: w.theorem_id,
        lhs: r.lhs,
        rhs,
        ratio,
        expected: w.expected_ratio,
        pass: (ratio - w.expected_ratio).abs() <= RATIO_TOL,
    })
}

/// The full catalogue on `[a, b]`.
pub fn sharpness_table(a: f64, b: f64) -> Result<Vec<SharpnessRow>> {
    WITNESS_IDS.iter().map(|id| sharpness_row(&witness_on(id, a, b)?)).collect()
}

/// Ratio of the `L^p` branch on the `cor_2_6` witness, for `q` the
/// conjugate exponent. Equals `(q+1)^{1/q} / 2`, which tends to 1 as
/// `q → 1`.
pub fn p_branch_ratio(q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::BadExponent(q));
    }
    let mut w = witness("cor_2_6")?;
    w.p = Some(q / (q - 1.0));
    w.tier = Some("p_branch".into());
    sharpness_ratio(&w)
}

/// Smallest admissible constant in front of the `L^p` branch implied by the
/// witness: the stated constant `½` times the ratio, i.e. `(q+1)^{1/q}/4`,
/// which tends to `½` as `q → 1`.
pub fn p_branch_constant(q: f64) -> Result<f64> {
    Ok(0.5 * p_branch_ratio(q)?)
}

#[cfg(test)]
fn p_branch_ratio_closed(q: f64) -> f64 {
    (q + 1.0).powf(1.0 / q) / 2.0
}

/// A family approaching equality in the bound with `Q(u)`: `u` jumps at
/// `b`, `f = -½` on `[a, c]` and `½` after, so the ratio is `(c-a)/(b-a)`.
pub fn q_limit_witness(a: f64, b: f64, c: f64) -> Result<Witness> {
    if !(c > a && c < b) {
        return Err(Error::Domain(format!("c = {c} must lie in ({a}, {b})")));
    }
    let f = PiecewiseFunction::step(a, b, c, -0.5, 0.5)?;
    Ok(Witness {
        id: "thm_b_2_limit".into(),
        theorem_id: TheoremId::ThmB2,
        a,
        b,
        f,
        g: PiecewiseFunction::constant(a, b, 0.0)?,
        u: jump_at_end(a, b)?,
        cert_f: RegularityCertificate::BoundedVariation { v: 1.0 },
        cert_u: None,
        tier: None,
        p: None,
        expected_ratio: (c - a) / (b - a),
    })
}
