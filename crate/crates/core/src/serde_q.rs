//! Serialize exact rationals as `p/q` strings.

use serde::Serializer;

use crate::scalar::{format_rational, Q};

pub fn ser<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn ser_vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}
