//! JSON wire format shared by every module.
//!
//! Complex numbers travel as `[re, im]` (a bare number is accepted as a real
//! value on input). Weighted spaces are `{"weights": [...]}` and operators are
//! `{"rows": [[...]]}` with optional `"domain"` / `"codomain"` spaces, which
//! default to the counting measure.

use nalgebra::DMatrix;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpcore::{LpVector, Operator, WeightedSpace, C64};

/// Complex number in `[re, im]` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CxRepr {
    Pair([f64; 2]),
    Real(f64),
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match CxRepr::deserialize(d)? {
            CxRepr::Pair([re, im]) => Cx(C64::new(re, im)),
            CxRepr::Real(re) => Cx(C64::new(re, 0.0)),
        })
    }
}

pub fn to_cx(v: &[C64]) -> Vec<Cx> {
    v.iter().copied().map(Cx).collect()
}

pub fn from_cx(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|c| c.0).collect()
}

/// Serde adapter for `Vec<C64>` fields.
pub mod cvec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        to_cx(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        Ok(from_cx(&Vec::<Cx>::deserialize(d)?))
    }
}

/// Serde adapter for a single `C64` field.
pub mod cnum {
    use super::*;

    pub fn serialize<S: Serializer>(v: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        Cx(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        Ok(Cx::deserialize(d)?.0)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    rows: Vec<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<WeightedSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    codomain: Option<WeightedSpace>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let weights = |w: &WeightedSpace| (!w.is_uniform()).then(|| w.clone());
        OperatorRepr {
            rows: self.rows().iter().map(|r| to_cx(r)).collect(),
            domain: weights(self.domain()),
            codomain: weights(self.codomain()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(d)?;
        operator_from_repr(repr).map_err(serde::de::Error::custom)
    }
}

fn operator_from_repr(repr: OperatorRepr) -> Result<Operator> {
    let nrows = repr.rows.len();
    let ncols = repr.rows.first().map_or(0, |r| r.len());
    if let Some(bad) = repr.rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            found: bad.len(),
        });
    }
    let m = DMatrix::from_fn(nrows, ncols, |i, j| repr.rows[i][j].0);
    // a square matrix with only one space given acts on that space
    let (domain, codomain) = match (repr.domain, repr.codomain) {
        (Some(d), None) if nrows == ncols => (d.clone(), d),
        (None, Some(c)) if nrows == ncols => (c.clone(), c),
        (d, c) => (
            d.unwrap_or_else(|| WeightedSpace::uniform(ncols)),
            c.unwrap_or_else(|| WeightedSpace::uniform(nrows)),
        ),
    };
    Operator::new(domain, codomain, m)
}

impl Serialize for LpVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_cx(self.entries()).serialize(s)
    }
}

pub fn operator_from_str(s: &str) -> Result<Operator> {
    Ok(serde_json::from_str(s)?)
}
