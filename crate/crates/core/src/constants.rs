//! Measured implied constants for the congruence bound (`K_r`) and the l1
//! bound (`C_{r,s}`), with the exhaustive families that produce them.
//!
//! The values live in `data/constants.json`, written by
//! `cargo run --release -p gapsum-core --example measure_constants`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::congruence::{self, RatioMaximum};
use crate::error::{Error, Result};
use crate::fourier::{self, L1FamilyStats};
use crate::gap::family::{all_generator_tuples, generator_classes};

/// Largest modulus of the exhaustive families with `r <= 2`.
pub const FAMILY_MAX_Q: u64 = 30;
/// Largest modulus of the congruence family with `r = 3` (`s = 1`).
pub const RANK_THREE_MAX_Q: u64 = 10;

const RAW: &str = include_str!("../data/constants.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub script: String,
    pub script_sha256: String,
    pub congruence_family: String,
    pub fourier_family: String,
    pub rounding: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConstants {
    /// `K_r`, keyed by `r`.
    #[serde(rename = "K")]
    pub k: BTreeMap<String, f64>,
    /// `C_{r,s}`, keyed by `r` then `s`.
    #[serde(rename = "C")]
    pub c: BTreeMap<String, BTreeMap<String, f64>>,
    pub provenance: Provenance,
}

impl MeasuredConstants {
    pub fn k(&self, r: usize) -> Result<f64> {
        self.k
            .get(&r.to_string())
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no measured K for r = {r}")))
    }

    pub fn c(&self, r: usize, s: usize) -> Result<f64> {
        self.c
            .get(&r.to_string())
            .and_then(|m| m.get(&s.to_string()))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no measured C for r = {r}, s = {s}")))
    }
}

/// The constants shipped with the crate.
pub fn measured() -> &'static MeasuredConstants {
    static CELL: OnceLock<MeasuredConstants> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(RAW).expect("bundled constants file is valid"))
}

/// Rounds up to the next multiple of `1e-6`.
pub fn round_up(x: f64) -> f64 {
    (x * 1e6).ceil() / 1e6
}

fn tuples(q: u64, s: usize, r: usize) -> Result<Vec<Vec<Vec<u64>>>> {
    if s == 1 && r == 3 {
        Ok(all_generator_tuples(q, s, r, true))
    } else {
        generator_classes(q, s, r, true)
    }
}

/// `max N / bound` over the congruence family of rank `r`: `s in {1, 2}`
/// and `q <= 30` for `r <= 2`; `s = 1` and `q <= 10` for `r = 3`.
pub fn congruence_family_maximum(r: usize) -> Result<RatioMaximum> {
    let (q_max, dims): (u64, &[usize]) = match r {
        1 | 2 => (FAMILY_MAX_Q, &[1, 2]),
        3 => (RANK_THREE_MAX_Q, &[1]),
        _ => return Err(Error::InvalidArgument(format!("no family for r = {r}"))),
    };
    let jobs: Vec<(u64, usize)> = (2..=q_max)
        .flat_map(|q| dims.iter().map(move |&s| (q, s)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|&(q, s)| congruence::ratio_maximum(q, &tuples(q, s, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .into_iter()
        .fold(RatioMaximum::empty(), RatioMaximum::merge))
}

/// l1 statistics over every proper GAP with `q <= 30`, dimension `s` and rank `r`.
pub fn l1_family(r: usize, s: usize) -> Result<L1FamilyStats> {
    if !(1..=2).contains(&r) || !(1..=2).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "no family for r = {r}, s = {s}"
        )));
    }
    let parts = (2..=FAMILY_MAX_Q)
        .into_par_iter()
        .map(|q| fourier::l1_family_stats(q, &tuples(q, s, r)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts
        .into_iter()
        .fold(L1FamilyStats::empty(), L1FamilyStats::merge))
}
