//! Published reference constants, bundled as `data/paper_values.json`.
//!
//! The reproduction suites compare recomputed values against these; the only
//! value consumed by an evaluator is the n = 7 lemma's cap on Δ, which fixes the
//! lemma's stated threshold (see [`crate::criteria::check_n7`]).

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const BUNDLED_VALUES: &str = include_str!("../data/paper_values.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublishedValues {
    pub version: u32,
    pub r: u64,
    pub k: usize,
    pub threshold_table: ThresholdTable,
    pub single_window_constants: Vec<ThresholdRow>,
    pub n7_lemma: N7Published,
    pub corollary_11: Corollary11Published,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub citation: String,
    pub rows: Vec<ThresholdRow>,
}

/// One threshold: single window `t` when `u` is absent, else the pair `(t, u)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub id: String,
    pub t: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<String>,
    pub n: usize,
    /// The row covers every `n' >= n`.
    #[serde(default)]
    pub n_open: bool,
    pub q_min: String,
    pub citation: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct N7Published {
    pub citation: String,
    pub product_bound: String,
    pub v_max: usize,
    pub inverse_sum_bound: String,
    pub q_floor: String,
    pub delta_bound: String,
    pub delta_cap: String,
    pub t: String,
    pub threshold: String,
}

/// Pairs are `(s, n)` with `q = 11^s`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corollary11Published {
    pub citation: String,
    pub direct_exceptions: Vec<(u32, usize)>,
    pub n7_direct_passes: Vec<u32>,
    pub sieve_successes: Vec<(u32, usize)>,
    pub residual: Vec<(u32, usize)>,
}

impl PublishedValues {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The bundled values, parsed once.
pub fn bundled() -> &'static PublishedValues {
    static VALUES: OnceLock<PublishedValues> = OnceLock::new();
    VALUES.get_or_init(|| PublishedValues::parse(BUNDLED_VALUES).expect("bundled paper_values.json is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numth::parse_decimal;

    #[test]
    fn bundled_values_parse() {
        let v = bundled();
        assert_eq!(v.threshold_table.rows.len(), 10);
        assert_eq!(v.corollary_11.direct_exceptions.len(), 10);
        assert_eq!(v.corollary_11.residual.len(), 5);
        for row in v.threshold_table.rows.iter().chain(&v.single_window_constants) {
            parse_decimal(&row.q_min).unwrap();
            parse_decimal(&row.t).unwrap();
        }
        parse_decimal(&v.n7_lemma.delta_cap).unwrap();
    }
}
