//! Solvability, worst-case distances and the per-round robot decision.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Configuration;
use crate::hypergraph::{build, ConfigHypergraph, Scheduler};
use crate::moves::Move;
use crate::problems::{resolve_final_set, ProblemSpec};

/// `solvable` is the set of configs from which `finals` can be forced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolvabilityResult {
    pub solvable: BTreeSet<usize>,
    pub finals: BTreeSet<usize>,
}

impl SolvabilityResult {
    pub fn is_solvable(&self, config: usize) -> bool {
        self.solvable.contains(&config)
    }

    pub fn is_final(&self, config: usize) -> bool {
        self.finals.contains(&config)
    }
}

/// The successive sets of the solvability iteration, starting from `finals`
/// and ending with the fixed point. A pass adds `C` when some hyperarc
/// `(C, Δ)` has `Δ` inside the previous pass's set.
pub fn solve_iterations(h: &ConfigHypergraph, finals: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut passes = vec![finals.clone()];
    loop {
        let previous = passes.last().expect("starts non-empty");
        let mut current = previous.clone();
        for arc in h.hyperarcs() {
            if arc.delta.iter().all(|d| previous.contains(d)) {
                current.insert(arc.source);
            }
        }
        if current == *previous {
            return passes;
        }
        passes.push(current);
    }
}

pub fn solve(h: &ConfigHypergraph, finals: &BTreeSet<usize>) -> SolvabilityResult {
    let solvable = solve_iterations(h, finals)
        .pop()
        .expect("at least the initial set");
    SolvabilityResult {
        solvable,
        finals: finals.clone(),
    }
}

/// Worst-case number of rounds to a final config and the move to play.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub distance: usize,
    /// `None` is the nil move, played exactly on final configs.
    #[serde(rename = "move")]
    pub mv: Option<Move>,
}

/// Plan for every config, `None` where unsolvable.
///
/// Distances are filled level by level: finals get 0, and a config is
/// settled once one of its hyperarcs has every target settled, at one more
/// than the worst target. Among the arcs settled in that pass the pair
/// `(worst distance, smallest move of the arc)` is minimised.
pub fn plan(
    h: &ConfigHypergraph,
    finals: &BTreeSet<usize>,
    solvability: &SolvabilityResult,
) -> Vec<Option<PlanEntry>> {
    let mut entries: Vec<Option<PlanEntry>> = vec![None; h.config_count()];
    for &f in finals {
        entries[f] = Some(PlanEntry {
            distance: 0,
            mv: None,
        });
    }
    loop {
        let mut settled = Vec::new();
        for &c in &solvability.solvable {
            if entries[c].is_some() {
                continue;
            }
            let best = h
                .arcs_from(c)
                .iter()
                .filter_map(|arc| {
                    arc.delta
                        .iter()
                        .map(|&d| entries[d].as_ref().map(|e| e.distance))
                        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
                        .map(|worst| (worst, arc.min_move()))
                })
                .min();
            if let Some((worst, mv)) = best {
                settled.push((
                    c,
                    PlanEntry {
                        distance: worst + 1,
                        mv: Some(mv.clone()),
                    },
                ));
            }
        }
        if settled.is_empty() {
            break;
        }
        for (c, entry) in settled {
            entries[c] = Some(entry);
        }
    }
    debug_assert!(solvability.solvable.iter().all(|&c| entries[c].is_some()));
    entries
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionStatus {
    Final,
    Unsolvable,
    Step,
}

/// What every robot of a configuration does this round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveDecision {
    pub status: DecisionStatus,
    #[serde(rename = "move", default, skip_serializing_if = "Option::is_none")]
    pub mv: Option<Move>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
}

impl MoveDecision {
    fn from_entry(entry: Option<&PlanEntry>) -> Self {
        match entry {
            None => MoveDecision {
                status: DecisionStatus::Unsolvable,
                mv: None,
                distance: None,
            },
            Some(PlanEntry { mv: None, .. }) => MoveDecision {
                status: DecisionStatus::Final,
                mv: None,
                distance: None,
            },
            Some(PlanEntry {
                distance,
                mv: Some(m),
            }) => MoveDecision {
                status: DecisionStatus::Step,
                mv: Some(m.clone()),
                distance: Some(*distance),
            },
        }
    }
}

/// A hypergraph with its problem resolved, solved and planned.
#[derive(Clone, Debug)]
pub struct Planner {
    hypergraph: ConfigHypergraph,
    solvability: SolvabilityResult,
    plan: Vec<Option<PlanEntry>>,
}

impl Planner {
    pub fn new(hypergraph: ConfigHypergraph, spec: &ProblemSpec) -> Result<Self> {
        let finals = resolve_final_set(spec, &hypergraph)?;
        let solvability = solve(&hypergraph, &finals);
        let plan = plan(&hypergraph, &finals, &solvability);
        Ok(Planner {
            hypergraph,
            solvability,
            plan,
        })
    }

    pub fn for_configuration(c: &Configuration, spec: &ProblemSpec) -> Result<Self> {
        let h = build(c.graph(), c.total_robots(), Scheduler::Fsync)?;
        Planner::new(h, spec)
    }

    pub fn hypergraph(&self) -> &ConfigHypergraph {
        &self.hypergraph
    }

    pub fn solvability(&self) -> &SolvabilityResult {
        &self.solvability
    }

    pub fn entry(&self, config: usize) -> Option<&PlanEntry> {
        self.plan[config].as_ref()
    }

    pub fn entries(&self) -> &[Option<PlanEntry>] {
        &self.plan
    }

    /// Config index of a placement, rejecting ones foreign to this hypergraph.
    pub fn locate(&self, lambda: &[u32]) -> Result<usize> {
        let h = &self.hypergraph;
        if lambda.len() != h.graph().vertex_count() {
            return Err(Error::LengthMismatch {
                expected: h.graph().vertex_count(),
                got: lambda.len(),
            });
        }
        if lambda.iter().sum::<u32>() != h.k() {
            return Err(Error::DimensionMismatch(format!(
                "placement holds {} robots, hypergraph is built for {}",
                lambda.iter().sum::<u32>(),
                h.k()
            )));
        }
        h.index_of_lambda(lambda)
            .ok_or_else(|| Error::Internal("placement class missing from hypergraph".into()))
    }

    pub fn decide(&self, lambda: &[u32]) -> Result<MoveDecision> {
        let index = self.locate(lambda)?;
        Ok(MoveDecision::from_entry(self.entry(index)))
    }

    pub fn distance(&self, lambda: &[u32]) -> Result<Option<usize>> {
        Ok(self.entry(self.locate(lambda)?).map(|e| e.distance))
    }
}

/// One round of the robot algorithm: build, solve, plan, then read off the
/// decision for `c`. Nothing is cached between calls.
pub fn move_to(c: &Configuration, spec: &ProblemSpec) -> Result<MoveDecision> {
    Planner::for_configuration(c, spec)?.decide(c.lambda())
}
