//! Traversal policies for the encoder.
//!
//! Each policy resolves three kinds of decision: where the first trail
//! starts, which neighbor extends the current trail, and where a new segment
//! restarts after a dead end. Degrees are those of the original graph. Ties
//! are broken uniformly at random from the supplied stream.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LabeledGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrategyError {
    #[error("no candidates for {0} choice")]
    EmptyCandidates(&'static str),
    #[error("unknown strategy {0:?} (expected random, min-degree, max-degree or anchor)")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Random,
    MinDegree,
    MaxDegree,
    Anchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pick {
    Uniform,
    MinDegree,
    MaxDegree,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Random, Strategy::MinDegree, Strategy::MaxDegree, Strategy::Anchor];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::MinDegree => "min-degree",
            Strategy::MaxDegree => "max-degree",
            Strategy::Anchor => "anchor",
        }
    }

    pub fn choose_start<R: Rng + ?Sized>(
        self,
        g: &LabeledGraph,
        candidates: &[usize],
        rng: &mut R,
    ) -> Result<usize, StrategyError> {
        let rule = match self {
            Strategy::Random => Pick::Uniform,
            Strategy::MinDegree => Pick::MinDegree,
            Strategy::MaxDegree | Strategy::Anchor => Pick::MaxDegree,
        };
        pick(g, candidates, rule, rng).ok_or(StrategyError::EmptyCandidates("start"))
    }

    pub fn choose_extension<R: Rng + ?Sized>(
        self,
        g: &LabeledGraph,
        _current: usize,
        candidates: &[usize],
        rng: &mut R,
    ) -> Result<usize, StrategyError> {
        let rule = match self {
            Strategy::Random => Pick::Uniform,
            Strategy::MinDegree | Strategy::Anchor => Pick::MinDegree,
            Strategy::MaxDegree => Pick::MaxDegree,
        };
        pick(g, candidates, rule, rng).ok_or(StrategyError::EmptyCandidates("extension"))
    }

    pub fn choose_restart<R: Rng + ?Sized>(
        self,
        g: &LabeledGraph,
        candidates: &[usize],
        rng: &mut R,
    ) -> Result<usize, StrategyError> {
        let rule = match self {
            Strategy::Random => Pick::Uniform,
            Strategy::MinDegree => Pick::MinDegree,
            Strategy::MaxDegree | Strategy::Anchor => Pick::MaxDegree,
        };
        pick(g, candidates, rule, rng).ok_or(StrategyError::EmptyCandidates("restart"))
    }
}

fn pick<R: Rng + ?Sized>(g: &LabeledGraph, candidates: &[usize], rule: Pick, rng: &mut R) -> Option<usize> {
    if candidates.is_empty() {
        return None;
    }
    let degree = |v: usize| g.neighbors(v).len();
    let pool: Vec<usize> = match rule {
        Pick::Uniform => candidates.to_vec(),
        Pick::MinDegree => {
            let best = candidates.iter().map(|&v| degree(v)).min()?;
            candidates.iter().copied().filter(|&v| degree(v) == best).collect()
        }
        Pick::MaxDegree => {
            let best = candidates.iter().map(|&v| degree(v)).max()?;
            candidates.iter().copied().filter(|&v| degree(v) == best).collect()
        }
    };
    Some(pool[rng.gen_range(0..pool.len())])
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Strategy::Random),
            "min-degree" => Ok(Strategy::MinDegree),
            "max-degree" => Ok(Strategy::MaxDegree),
            "anchor" => Ok(Strategy::Anchor),
            other => Err(StrategyError::Unknown(other.to_string())),
        }
    }
}
