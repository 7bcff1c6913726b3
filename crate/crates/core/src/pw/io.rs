//! JSON schemas for piecewise functions and interval unions, and a CSV sampler.
//!
//! Scalars are written as strings: `p/q` for exact rationals, shortest
//! round-trip decimals for floats. Piece coefficients are in the local variable
//! `x - breakpoints[i]`, lowest power first.

use serde::{Deserialize, Serialize};

use super::function::{PiecewiseFn, Smoothness};
use super::interval::IntervalUnion;
use super::poly::Poly;
use super::segment::PiecewisePoly;
use super::PwError;
use crate::scalar::Scalar;

pub const PIECEWISE_SCHEMA: &str = "piecewise_v1";
pub const INTERVAL_UNION_SCHEMA: &str = "interval_union_v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseJson {
    pub schema: String,
    pub smoothness: Smoothness,
    pub breakpoints: Vec<String>,
    pub pieces: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnionJson {
    pub schema: String,
    pub components: Vec<[String; 2]>,
    pub measure: String,
}

fn parse<S: Scalar>(s: &str) -> Result<S, PwError> {
    S::parse_decimal(s).map_err(|e| PwError::Json(e.to_string()))
}

impl<S: Scalar> PiecewiseFn<S> {
    pub fn to_json_value(&self) -> PiecewiseJson {
        PiecewiseJson {
            schema: PIECEWISE_SCHEMA.into(),
            smoothness: self.smoothness(),
            breakpoints: self.breaks().iter().map(Scalar::to_decimal_string).collect(),
            pieces: self
                .segment()
                .polys()
                .iter()
                .map(|p| p.coeffs().iter().map(Scalar::to_decimal_string).collect())
                .collect(),
        }
    }

    pub fn from_json_value(v: &PiecewiseJson) -> Result<Self, PwError> {
        if v.schema != PIECEWISE_SCHEMA {
            return Err(PwError::Json(format!("expected schema {PIECEWISE_SCHEMA}, got {}", v.schema)));
        }
        let breaks = v.breakpoints.iter().map(|s| parse(s)).collect::<Result<Vec<S>, _>>()?;
        let polys = v
            .pieces
            .iter()
            .map(|c| c.iter().map(|s| parse(s)).collect::<Result<Vec<S>, _>>().map(Poly::new))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(PiecewisePoly::new(breaks, polys)?, v.smoothness)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PwError> {
        let v: PiecewiseJson = serde_json::from_str(s).map_err(|e| PwError::Json(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

impl<S: Scalar> IntervalUnion<S> {
    pub fn to_json_value(&self) -> IntervalUnionJson {
        IntervalUnionJson {
            schema: INTERVAL_UNION_SCHEMA.into(),
            components: self.components().iter().map(|(l, r)| [l.to_decimal_string(), r.to_decimal_string()]).collect(),
            measure: self.measure().to_decimal_string(),
        }
    }

    pub fn from_json_value(v: &IntervalUnionJson) -> Result<Self, PwError> {
        if v.schema != INTERVAL_UNION_SCHEMA {
            return Err(PwError::Json(format!("expected schema {INTERVAL_UNION_SCHEMA}, got {}", v.schema)));
        }
        let comps = v.components.iter().map(|[l, r]| Ok((parse(l)?, parse(r)?))).collect::<Result<Vec<_>, PwError>>()?;
        Self::new(comps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, PwError> {
        let v: IntervalUnionJson = serde_json::from_str(s).map_err(|e| PwError::Json(e.to_string()))?;
        Self::from_json_value(&v)
    }
}

/// `t,value` rows on a uniform grid of `n` points, 17 significant digits.
pub fn sample_csv<S: Scalar>(f: &PiecewiseFn<S>, n: usize) -> String {
    let mut out = String::from("t,value\n");
    for (t, y) in f.sample(n) {
        out.push_str(&format!("{t:.16e},{y:.16e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pw::svc_set;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn piecewise_round_trip() {
        let f = PiecewiseFn::piecewise_linear(&[(q(0, 1), q(1, 3)), (q(2, 7), q(-5, 2)), (q(1, 1), q(0, 1))]).unwrap();
        let back = PiecewiseFn::<Q>::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let v = f.to_json_value();
        assert_eq!(v.breakpoints[1], "2/7");
    }

    #[test]
    fn interval_union_round_trip() {
        let k = svc_set(3).unwrap();
        let back = IntervalUnion::<Q>::from_json(&k.to_json()).unwrap();
        assert_eq!(back, k);
        assert_eq!(k.to_json_value().measure, "9/16");
    }

    #[test]
    fn schema_tag_is_checked() {
        let mut v = PiecewiseFn::<Q>::one().to_json_value();
        v.schema = "other".into();
        assert!(PiecewiseFn::<Q>::from_json_value(&v).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = sample_csv(&PiecewiseFn::<Q>::identity(), 3);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,value");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "5.0000000000000000e-1,5.0000000000000000e-1");
    }
}
