use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::Error;
use crate::funcrep::RegularityCertificate;

/// Relative slack when deciding whether `lhs <= rhs`.
pub const HOLDS_RTOL: f64 = 1e-9;
/// Absolute slack when deciding whether `lhs <= rhs`.
pub const HOLDS_ATOL: f64 = 1e-13;

macro_rules! theorem_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// Identifier of a bound, used in reports and on the command line.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum TheoremId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl TheoremId {
            pub const ALL: &'static [TheoremId] = &[$(TheoremId::$variant),*];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(TheoremId::$variant => $name,)*
                }
            }
        }

        impl FromStr for TheoremId {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Error> {
                match s {
                    $($name => Ok(TheoremId::$variant),)*
                    other => Err(Error::UnknownTheorem(other.to_string())),
                }
            }
        }
    };
}

theorem_ids! {
    Thm2_1a => "thm_2_1a",
    Thm2_2 => "thm_2_2",
    Thm2_3a => "thm_2_3a",
    Thm2_1 => "thm_2_1",
    Cor2_2 => "cor_2_2",
    Thm2_3 => "thm_2_3",
    Cor2_4 => "cor_2_4",
    Thm2_5 => "thm_2_5",
    Cor2_6 => "cor_2_6",
    WeightedItem1 => "weighted_item1",
    WeightedItem2 => "weighted_item2",
    WeightedItem3 => "weighted_item3",
    WeightedItem4 => "weighted_item4",
    WeightedItem5 => "weighted_item5",
    WeightedItem6 => "weighted_item6",
    ThmA1 => "thm_a_1",
    ThmA2 => "thm_a_2",
    ThmA6i => "thm_a_6_i",
    ThmA6ii => "thm_a_6_ii",
    ThmA6iii => "thm_a_6_iii",
    CorA7 => "cor_a_7",
    CorA8 => "cor_a_8",
    CorA9 => "cor_a_9",
    ThmA11 => "thm_a_11",
    ThmB1 => "thm_b_1",
    ThmB2 => "thm_b_2",
    OstrowskiLipschitz => "ostrowski_lipschitz",
    OstrowskiBv => "ostrowski_bv",
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the functional is bounded from above (`|lhs| <= rhs`) or from
/// below (`lhs >= rhs`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod float_or_inf {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got \"{other}\""))),
            },
        }
    }
}

/// One bound of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tier {
    pub name: String,
    #[serde(with = "float_or_inf")]
    pub value: f64,
    #[serde(with = "float_or_inf")]
    pub error: f64,
    #[serde(with = "float_or_inf")]
    pub ratio: f64,
    pub holds: bool,
}

impl Tier {
    pub fn enclosure(&self) -> Enclosure {
        if self.value.is_infinite() {
            Enclosure::point(self.value)
        } else {
            Enclosure::around(self.value, self.error)
        }
    }
}

/// A certificate together with the function it was stated for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateUse {
    pub function: String,
    pub certificate: RegularityCertificate,
}

/// Outcome of evaluating one inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub direction: Direction,
    /// `|functional|` for upper bounds, the functional itself for lower ones
    pub lhs: f64,
    pub lhs_error: f64,
    /// the primary (sharpest stated) bound
    #[serde(with = "float_or_inf")]
    pub rhs: f64,
    #[serde(with = "float_or_inf")]
    pub rhs_error: f64,
    #[serde(with = "float_or_inf")]
    pub ratio: f64,
    /// every tier holds
    pub holds: bool,
    /// every stated ordering between tiers holds
    pub chain_holds: bool,
    pub tiers: Vec<Tier>,
    pub extras: BTreeMap<String, f64>,
    pub certificates: Vec<CertificateUse>,
}

impl BoundReport {
    pub fn tier(&self, name: &str) -> Option<&Tier> {
        self.tiers.iter().find(|t| t.name == name)
    }

    /// `holds && chain_holds`
    pub fn sound(&self) -> bool {
        self.holds && self.chain_holds
    }
}

fn slack(rhs: &Enclosure) -> f64 {
    let m = rhs.mid();
    if m.is_finite() {
        HOLDS_RTOL * m.abs() + HOLDS_ATOL
    } else {
        0.0
    }
}

/// `lhs <= rhs` up to the combined tolerance: both enclosure widths plus
/// the relative and absolute slack.
pub fn upper_holds(lhs: &Enclosure, rhs: &Enclosure) -> bool {
    if rhs.hi == f64::INFINITY {
        return true;
    }
    lhs.lo <= rhs.hi + slack(rhs)
}

/// `lhs.hi / rhs.lo`; `0` when `lhs` is indistinguishable from zero or
/// `rhs` is infinite, `inf` when only `rhs` vanishes.
pub fn tightness(lhs: &Enclosure, rhs: &Enclosure) -> f64 {
    if rhs.lo.is_infinite() && rhs.lo > 0.0 {
        return 0.0;
    }
    if lhs.lo <= 0.0 || lhs.hi <= HOLDS_ATOL {
        return 0.0;
    }
    if rhs.lo > 0.0 {
        return lhs.hi / rhs.lo;
    }
    f64::INFINITY
}

/// Accumulates the tiers of one bound evaluation.
pub(crate) struct ReportBuilder {
    theorem_id: TheoremId,
    direction: Direction,
    lhs: Enclosure,
    tiers: Vec<(String, Enclosure)>,
    chain: Vec<(usize, usize)>,
    extras: BTreeMap<String, f64>,
    certificates: Vec<CertificateUse>,
    extra_checks: bool,
}

impl ReportBuilder {
    /// `lhs` is an enclosure of the functional; its absolute value is taken.
    pub fn upper(theorem_id: TheoremId, functional: Enclosure) -> Self {
        ReportBuilder {
            theorem_id,
            direction: Direction::Upper,
            lhs: functional.abs(),
            tiers: Vec::new(),
            chain: Vec::new(),
            extras: BTreeMap::new(),
            certificates: Vec::new(),
            extra_checks: true,
        }
    }

    /// A lower bound: every tier must not exceed the functional itself.
    pub fn lower(theorem_id: TheoremId, functional: Enclosure) -> Self {
        ReportBuilder { direction: Direction::Lower, lhs: functional, ..Self::upper(theorem_id, functional) }
    }

    pub fn tier(mut self, name: &str, value: Enclosure) -> Self {
        self.tiers.push((name.to_string(), value));
        self
    }

    /// Records that tier `lower` must not exceed tier `upper`.
    pub fn chain(mut self, lower: &str, upper: &str) -> Self {
        let find = |n: &str| self.tiers.iter().position(|(t, _)| t == n).expect("tier registered before chaining");
        let pair = (find(lower), find(upper));
        self.chain.push(pair);
        self
    }

    pub fn extra(mut self, name: &str, value: f64) -> Self {
        self.extras.insert(name.to_string(), value);
        self
    }

    /// A side condition stated by the theorem (e.g. `K(u) >= 0`); a failure
    /// marks the chain as broken.
    pub fn check(mut self, ok: bool) -> Self {
        self.extra_checks &= ok;
        self
    }

    pub fn cert(mut self, function: &str, certificate: RegularityCertificate) -> Self {
        self.certificates.push(CertificateUse { function: function.to_string(), certificate });
        self
    }

    pub fn build(self) -> BoundReport {
        let lhs = self.lhs;
        let lower = self.direction == Direction::Lower;
        let tiers: Vec<Tier> = self
            .tiers
            .iter()
            .map(|(name, rhs)| {
                let (small, big) = if lower { (rhs, &lhs) } else { (&lhs, rhs) };
                Tier {
                    name: name.clone(),
                    value: rhs.mid(),
                    error: if rhs.is_finite() { rhs.radius() } else { 0.0 },
                    ratio: tightness(small, big),
                    holds: upper_holds(small, big),
                }
            })
            .collect();
        let chain_holds =
            self.extra_checks && self.chain.iter().all(|&(lo, hi)| upper_holds(&self.tiers[lo].1, &self.tiers[hi].1));
        let primary = &tiers[0];
        BoundReport {
            theorem_id: self.theorem_id,
            direction: self.direction,
            lhs: lhs.mid(),
            lhs_error: lhs.radius(),
            rhs: primary.value,
            rhs_error: primary.error,
            ratio: primary.ratio,
            holds: tiers.iter().all(|t| t.holds),
            chain_holds,
            tiers,
            extras: self.extras,
            certificates: self.certificates,
        }
    }
}
