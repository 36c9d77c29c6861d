//! Formation problems, given as predicates on configurations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonize::{canonize, CanonicalForm};
use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};
use crate::hypergraph::ConfigHypergraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ProblemSpec {
    /// All robots on one vertex.
    Gathering,
    /// Any placement isomorphic to one of the targets.
    Pattern { targets: Vec<Vec<u32>> },
    /// Exactly the classes of the listed placements.
    Explicit {
        #[serde(rename = "final")]
        finals: Vec<Vec<u32>>,
    },
    /// At most one robot per vertex, and every two robots joined by a
    /// shortest path with no robot inside.
    GeodesicMutualVisibility,
}

/// Parses a problem document; fields the kind does not use are warned about.
pub fn load_problem(source: &str) -> Result<ProblemSpec> {
    let value: Value = serde_json::from_str(source)?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Malformed("problem document must be an object".into()))?;
    let known: &[&str] = match obj.get("type").and_then(Value::as_str) {
        Some("pattern") => &["type", "targets"],
        Some("explicit") => &["type", "final"],
        _ => &["type"],
    };
    let mut clean = serde_json::Map::new();
    for (key, v) in obj {
        if known.contains(&key.as_str()) {
            clean.insert(key.clone(), v.clone());
        } else {
            warn!("ignoring unknown field {key:?} in problem document");
        }
    }
    Ok(serde_json::from_value(Value::Object(clean))?)
}

impl ProblemSpec {
    fn targets(&self) -> &[Vec<u32>] {
        match self {
            ProblemSpec::Pattern { targets } => targets,
            ProblemSpec::Explicit { finals } => finals,
            _ => &[],
        }
    }

    fn check_targets(&self, g: &Graph, k: u32) -> Result<()> {
        for t in self.targets() {
            if t.len() != g.vertex_count() {
                return Err(Error::DimensionMismatch(format!(
                    "target {t:?} has length {}, graph has {} vertices",
                    t.len(),
                    g.vertex_count()
                )));
            }
            let sum: u32 = t.iter().sum();
            if sum != k {
                return Err(Error::DimensionMismatch(format!(
                    "target {t:?} holds {sum} robots, expected {k}"
                )));
            }
        }
        Ok(())
    }

    fn target_forms(&self, g: &Graph) -> BTreeSet<CanonicalForm> {
        self.targets().iter().map(|t| canonize(g, t).form).collect()
    }
}

/// Predicate prepared for one graph and robot count.
struct FinalTest<'a> {
    spec: &'a ProblemSpec,
    k: u32,
    forms: BTreeSet<CanonicalForm>,
}

impl<'a> FinalTest<'a> {
    fn new(spec: &'a ProblemSpec, g: &Graph, k: u32) -> Result<Self> {
        spec.check_targets(g, k)?;
        Ok(FinalTest {
            spec,
            k,
            forms: spec.target_forms(g),
        })
    }

    fn holds(&self, g: &Graph, lambda: &[u32]) -> bool {
        match self.spec {
            ProblemSpec::Gathering => lambda.contains(&self.k),
            ProblemSpec::Pattern { .. } | ProblemSpec::Explicit { .. } => {
                self.forms.contains(&canonize(g, lambda).form)
            }
            ProblemSpec::GeodesicMutualVisibility => mutually_visible(g, lambda),
        }
    }
}

pub fn is_final(spec: &ProblemSpec, c: &Configuration) -> Result<bool> {
    let test = FinalTest::new(spec, c.graph(), c.total_robots())?;
    Ok(test.holds(c.graph(), c.lambda()))
}

pub fn resolve_final_set(spec: &ProblemSpec, h: &ConfigHypergraph) -> Result<BTreeSet<usize>> {
    let test = FinalTest::new(spec, h.graph(), h.k())?;
    Ok(h.configs()
        .iter()
        .enumerate()
        .filter(|(_, c)| test.holds(h.graph(), &c.lambda))
        .map(|(i, _)| i)
        .collect())
}

/// Geodesic mutual visibility of a placement.
///
/// For each occupied `u`, a breadth-first search that only passes through
/// empty vertices reaches an occupied `v` at the true distance exactly when
/// some shortest `u`-`v` path has an empty interior.
pub fn mutually_visible(g: &Graph, lambda: &[u32]) -> bool {
    if lambda.iter().any(|&l| l > 1) {
        return false;
    }
    let occupied: Vec<usize> = (0..g.vertex_count()).filter(|&v| lambda[v] > 0).collect();
    occupied.iter().all(|&u| {
        let dist = g.bfs_distances(u);
        let clear = clear_distances(g, lambda, u);
        occupied
            .iter()
            .all(|&v| v == u || (dist[v].is_some() && clear.get(&v) == dist[v].as_ref()))
    })
}

/// Distances from `source` along paths whose interior vertices are empty.
fn clear_distances(g: &Graph, lambda: &[u32], source: usize) -> BTreeMap<usize, usize> {
    let mut dist = BTreeMap::from([(source, 0)]);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        if u != source && lambda[u] > 0 {
            continue;
        }
        let d = dist[&u];
        for &w in g.neighbors(u) {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}
