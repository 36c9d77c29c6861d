//! Round-by-round FSYNC execution of the planned robot algorithm against an
//! adversary that resolves every destination choice.

use std::collections::HashMap;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonize::canonize;
use crate::error::{Error, Result};
use crate::graph::Configuration;
use crate::moves::{placements, validate_move, Scheduler};
use crate::problems::ProblemSpec;
use crate::solver::{DecisionStatus, MoveDecision, Planner};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryStrategy {
    /// Pick a placement whose class is furthest from the final set (ties:
    /// smallest canonical encoding, then smallest placement).
    Worst,
    /// Uniform choice among the placements, reproducible from the seed.
    Random(u64),
    /// Lexicographically smallest placement.
    First,
}

impl FromStr for AdversaryStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worst" => Ok(AdversaryStrategy::Worst),
            "first" => Ok(AdversaryStrategy::First),
            _ => s
                .strip_prefix("random:")
                .and_then(|seed| seed.parse().ok())
                .map(AdversaryStrategy::Random)
                .ok_or_else(|| {
                    Error::InvalidName(format!(
                        "adversary must be worst, first or random:<seed>, got {s:?}"
                    ))
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    ReachedFinal,
    Unsolvable,
    MaxRoundsExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub lambda: Vec<u32>,
    pub decision: MoveDecision,
    /// Placement after the move; equal to `lambda` when nobody moves.
    pub outcome_lambda: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub status: TerminalStatus,
    pub rounds: Vec<RoundRecord>,
}

impl ExecutionTrace {
    /// Rounds in which robots executed a move.
    pub fn moves_executed(&self) -> usize {
        self.rounds
            .iter()
            .filter(|r| r.decision.status == DecisionStatus::Step)
            .count()
    }

    pub fn final_lambda(&self) -> Option<&[u32]> {
        self.rounds.last().map(|r| r.outcome_lambda.as_slice())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_value(self)?.to_string())
    }
}

struct Adversary {
    strategy: AdversaryStrategy,
    rng: Option<ChaCha8Rng>,
}

impl Adversary {
    fn new(strategy: AdversaryStrategy) -> Self {
        let rng = match strategy {
            AdversaryStrategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Adversary { strategy, rng }
    }

    fn choose(&mut self, planner: &Planner, options: &[Vec<u32>]) -> Result<Vec<u32>> {
        let chosen = match self.strategy {
            AdversaryStrategy::First => &options[0],
            AdversaryStrategy::Random(_) => {
                let rng = self.rng.as_mut().expect("seeded in new");
                &options[rng.gen_range(0..options.len())]
            }
            AdversaryStrategy::Worst => {
                let mut best: Option<(usize, Vec<u8>, &Vec<u32>)> = None;
                for option in options {
                    let distance = planner.distance(option)?.unwrap_or(usize::MAX);
                    let encoding = canonize(planner.hypergraph().graph(), option)
                        .form
                        .encoding()
                        .to_vec();
                    let better = match &best {
                        None => true,
                        Some((d, e, _)) => distance > *d || (distance == *d && encoding < *e),
                    };
                    if better {
                        best = Some((distance, encoding, option));
                    }
                }
                best.expect("outcome sets are non-empty").2
            }
        };
        Ok(chosen.clone())
    }
}

/// Every placement the adversary may pick after the robots of `lambda` play `decision`.
fn successors(planner: &Planner, lambda: &[u32], decision: &MoveDecision) -> Result<Vec<Vec<u32>>> {
    let m = decision
        .mv
        .as_ref()
        .ok_or_else(|| Error::Internal("step decision without a move".into()))?;
    let g = planner.hypergraph().graph();
    let orbits = canonize(g, lambda).orbits;
    validate_move(g, lambda, &orbits, m)?;
    Ok(placements(g, lambda, &orbits, m, Scheduler::Fsync)?
        .into_iter()
        .collect())
}

pub fn run_fsync(
    c0: &Configuration,
    spec: &ProblemSpec,
    adversary: AdversaryStrategy,
    max_rounds: Option<usize>,
) -> Result<ExecutionTrace> {
    let planner = Planner::for_configuration(c0, spec)?;
    run_with_planner(&planner, c0.lambda(), adversary, max_rounds)
}

/// Runs from `lambda` using a precomputed planner.
///
/// Each round's decision is looked up from the class of the current
/// placement only. Without `max_rounds` the budget is the planned distance
/// plus one (one for unsolvable starts).
pub fn run_with_planner(
    planner: &Planner,
    lambda: &[u32],
    adversary: AdversaryStrategy,
    max_rounds: Option<usize>,
) -> Result<ExecutionTrace> {
    let limit = match max_rounds {
        Some(limit) => limit,
        None => planner.distance(lambda)?.map_or(1, |d| d + 1),
    };
    let mut adversary = Adversary::new(adversary);
    let mut current = lambda.to_vec();
    let mut rounds = Vec::new();
    for round in 0.. {
        let decision = planner.decide(&current)?;
        let status = match decision.status {
            DecisionStatus::Final => Some(TerminalStatus::ReachedFinal),
            DecisionStatus::Unsolvable => Some(TerminalStatus::Unsolvable),
            DecisionStatus::Step if round >= limit => {
                return Ok(ExecutionTrace {
                    status: TerminalStatus::MaxRoundsExceeded,
                    rounds,
                })
            }
            DecisionStatus::Step => None,
        };
        if let Some(status) = status {
            rounds.push(RoundRecord {
                round,
                lambda: current.clone(),
                decision,
                outcome_lambda: current,
            });
            return Ok(ExecutionTrace { status, rounds });
        }
        let options = successors(planner, &current, &decision)?;
        let next = adversary.choose(planner, &options)?;
        rounds.push(RoundRecord {
            round,
            lambda: std::mem::replace(&mut current, next.clone()),
            decision,
            outcome_lambda: next,
        });
    }
    unreachable!("the loop only exits by returning")
}

/// Extremes over every adversary play under optimal robot play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaySummary {
    pub max_rounds_used: usize,
    pub min_rounds_used: usize,
    pub all_reach_final: bool,
}

pub fn enumerate_adversary_plays(
    c0: &Configuration,
    spec: &ProblemSpec,
    bound: usize,
    node_cap: usize,
) -> Result<PlaySummary> {
    let planner = Planner::for_configuration(c0, spec)?;
    explore_plays(&planner, c0.lambda(), bound, node_cap)
}

/// Exhaustive search over adversary resolutions from `lambda`.
///
/// Plays longer than `bound` rounds, plays that hit an unsolvable
/// placement and plays that revisit a placement do not reach the final set.
/// Fails with [`Error::BudgetExceeded`] once more than `node_cap` distinct
/// placements have been expanded.
pub fn explore_plays(
    planner: &Planner,
    lambda: &[u32],
    bound: usize,
    node_cap: usize,
) -> Result<PlaySummary> {
    let mut explorer = Explorer {
        planner,
        memo: HashMap::new(),
        node_cap,
    };
    let s = explorer.visit(lambda)?;
    Ok(PlaySummary {
        max_rounds_used: s.max,
        min_rounds_used: s.min,
        all_reach_final: s.all && s.max <= bound,
    })
}

#[derive(Clone, Copy)]
struct Subtree {
    min: usize,
    max: usize,
    all: bool,
}

struct Explorer<'a> {
    planner: &'a Planner,
    /// `None` while a placement is on the current path.
    memo: HashMap<Vec<u32>, Option<Subtree>>,
    node_cap: usize,
}

impl Explorer<'_> {
    fn visit(&mut self, lambda: &[u32]) -> Result<Subtree> {
        match self.memo.get(lambda) {
            Some(Some(done)) => return Ok(*done),
            Some(None) => {
                return Ok(Subtree {
                    min: 0,
                    max: 0,
                    all: false,
                })
            }
            None => {}
        }
        if self.memo.len() >= self.node_cap {
            return Err(Error::BudgetExceeded(self.node_cap));
        }
        self.memo.insert(lambda.to_vec(), None);
        let decision = self.planner.decide(lambda)?;
        let result = match decision.status {
            DecisionStatus::Final => Subtree {
                min: 0,
                max: 0,
                all: true,
            },
            DecisionStatus::Unsolvable => Subtree {
                min: 0,
                max: 0,
                all: false,
            },
            DecisionStatus::Step => {
                let mut acc: Option<Subtree> = None;
                for next in successors(self.planner, lambda, &decision)? {
                    let s = self.visit(&next)?;
                    acc = Some(match acc {
                        None => Subtree {
                            min: s.min + 1,
                            max: s.max + 1,
                            all: s.all,
                        },
                        Some(a) => Subtree {
                            min: a.min.min(s.min + 1),
                            max: a.max.max(s.max + 1),
                            all: a.all && s.all,
                        },
                    });
                }
                acc.expect("a move has at least one outcome")
            }
        };
        self.memo.insert(lambda.to_vec(), Some(result));
        Ok(result)
    }
}
