// SPDX-License-Identifier: MIT OR Apache-2.0
//! Transform stages given on the command line as `name[:key=value,...]`.

use serde::Serialize;

use crate::circuits::VerifierSpec;
use crate::error::{Error, Result};
use crate::protocols::{
    complement_output, parallel_repetition, perfect_completeness_transform, scale_acceptance, sequential_repetition,
    single_coin_qmaml, turn_halving,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "transform", rename_all = "snake_case")]
pub enum Stage {
    PerfectCompleteness { c: f64, s: f64 },
    SequentialRepetition { r: usize },
    ParallelRepetition { k: usize },
    TurnHalving,
    SingleCoin,
    ScaleAcceptance { p: f64 },
    Complement,
}

/// What the value after a stage is expected to satisfy, given the value
/// before it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageBound {
    pub relation: &'static str,
    pub value: f64,
}

/// Accepts `a/b` fractions as well as decimals.
fn number(key: &str, text: &str) -> Result<f64> {
    let bad = || Error::Argument(format!("{key} = {text:?} is not a number"));
    match text.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => text.trim().parse().map_err(|_| bad()),
    }
}

fn count(key: &str, text: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| Error::Argument(format!("{key} = {text:?} is not a count")))
}

pub fn parse_stage(spec: &str) -> Result<Stage> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params = Vec::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("stage parameter {item:?} is not key=value")))?;
        params.push((k.trim().to_string(), v.trim().to_string()));
    }
    let get = |key: &str| {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Argument(format!("stage {name} needs {key}")))
    };
    let allowed: &[&str] = match name {
        "perfect_completeness" => &["c", "s"],
        "sequential_repetition" => &["r"],
        "parallel_repetition" => &["k"],
        "scale_acceptance" => &["p"],
        _ => &[],
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::Argument(format!("stage {name} has no parameter {k}")));
    }
    Ok(match name {
        "perfect_completeness" => Stage::PerfectCompleteness { c: number("c", get("c")?)?, s: number("s", get("s")?)? },
        "sequential_repetition" => Stage::SequentialRepetition { r: count("r", get("r")?)? },
        "parallel_repetition" => Stage::ParallelRepetition { k: count("k", get("k")?)? },
        "turn_halving" => Stage::TurnHalving,
        "single_coin" => Stage::SingleCoin,
        "scale_acceptance" => Stage::ScaleAcceptance { p: number("p", get("p")?)? },
        "complement" => Stage::Complement,
        _ => return Err(Error::Argument(format!("unknown transform {name:?}"))),
    })
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::PerfectCompleteness { .. } => "perfect_completeness",
            Stage::SequentialRepetition { .. } => "sequential_repetition",
            Stage::ParallelRepetition { .. } => "parallel_repetition",
            Stage::TurnHalving => "turn_halving",
            Stage::SingleCoin => "single_coin",
            Stage::ScaleAcceptance { .. } => "scale_acceptance",
            Stage::Complement => "complement",
        }
    }

    pub fn apply(&self, v: &VerifierSpec) -> Result<VerifierSpec> {
        match *self {
            Stage::PerfectCompleteness { c, s } => perfect_completeness_transform(v, c, s),
            Stage::SequentialRepetition { r } => sequential_repetition(v, r),
            Stage::ParallelRepetition { k } => parallel_repetition(v, k),
            Stage::TurnHalving => turn_halving(v),
            Stage::SingleCoin => single_coin_qmaml(v),
            Stage::ScaleAcceptance { p } => scale_acceptance(v, p),
            Stage::Complement => complement_output(v),
        }
    }

    /// Expected relation between the output value and `before`, or `None`
    /// when the input lies outside the stage's promise.
    pub fn bound(&self, before: f64, tol: f64) -> Option<StageBound> {
        let at_most = |value: f64| Some(StageBound { relation: "at_most", value });
        let equal = |value: f64| Some(StageBound { relation: "equal", value });
        match *self {
            Stage::PerfectCompleteness { c, s } => {
                if before >= c - tol {
                    equal(1.0)
                } else if before <= s + tol {
                    at_most(1.0 - (c - s).powi(2) / 2.0)
                } else {
                    None
                }
            }
            Stage::SequentialRepetition { r } => at_most(before.powi(r as i32)),
            Stage::ParallelRepetition { k } => equal(before.powi(k as i32)),
            Stage::TurnHalving | Stage::SingleCoin => {
                if before >= 1.0 - tol {
                    equal(1.0)
                } else {
                    at_most((1.0 + before.sqrt()) / 2.0)
                }
            }
            Stage::ScaleAcceptance { p } => equal(p * before),
            Stage::Complement => None,
        }
    }
}
