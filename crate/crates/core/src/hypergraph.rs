//! The configuration hypergraph of a graph and a robot count.
//!
//! Vertices are the placements of `k` robots up to isomorphism. A hyperarc
//! `(C, Δ)` exists when some move of `C` lets the adversary reach exactly the
//! classes in `Δ`; it carries every such move.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::canonize::{canonize, CanonicalForm, OrbitPartition};
use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};
use crate::moves::{moves_of, placements, validate_move, Move};

pub use crate::moves::Scheduler;

pub const FORMAT_VERSION: u64 = 1;

/// One isomorphism class, stored through a representative placement.
#[derive(Clone, Debug)]
pub struct ConfigEntry {
    pub form: CanonicalForm,
    /// Lexicographically smallest placement of the class.
    pub lambda: Vec<u32>,
    /// Orbits of the representative; move ranks refer to these.
    pub orbits: OrbitPartition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperarc {
    pub source: usize,
    /// Sorted config indices.
    pub delta: Vec<usize>,
    /// Sorted, never empty, never the nil move.
    pub moves: Vec<Move>,
}

impl Hyperarc {
    /// The move robots agree on when they pick this hyperarc.
    pub fn min_move(&self) -> &Move {
        &self.moves[0]
    }
}

#[derive(Clone, Debug)]
pub struct ConfigHypergraph {
    graph: Graph,
    k: u32,
    scheduler: Scheduler,
    configs: Vec<ConfigEntry>,
    hyperarcs: Vec<Hyperarc>,
    index: HashMap<Vec<u8>, usize>,
    by_source: Vec<Range<usize>>,
}

impl PartialEq for ConfigHypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
            && self.k == other.k
            && self.scheduler == other.scheduler
            && self.hyperarcs == other.hyperarcs
            && self.configs.len() == other.configs.len()
            && self
                .configs
                .iter()
                .zip(&other.configs)
                .all(|(a, b)| a.lambda == b.lambda)
    }
}

impl ConfigHypergraph {
    fn assemble(
        graph: Graph,
        k: u32,
        scheduler: Scheduler,
        configs: Vec<ConfigEntry>,
        hyperarcs: Vec<Hyperarc>,
    ) -> Self {
        let index = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.form.encoding().to_vec(), i))
            .collect();
        let mut by_source = vec![0..0; configs.len()];
        let mut start = 0;
        while start < hyperarcs.len() {
            let source = hyperarcs[start].source;
            let end = start
                + hyperarcs[start..]
                    .iter()
                    .take_while(|a| a.source == source)
                    .count();
            by_source[source] = start..end;
            start = end;
        }
        ConfigHypergraph {
            graph,
            k,
            scheduler,
            configs,
            hyperarcs,
            index,
            by_source,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn scheduler(&self) -> Scheduler {
        self.scheduler
    }

    pub fn configs(&self) -> &[ConfigEntry] {
        &self.configs
    }

    pub fn config_count(&self) -> usize {
        self.configs.len()
    }

    pub fn hyperarcs(&self) -> &[Hyperarc] {
        &self.hyperarcs
    }

    /// Hyperarcs leaving `source`, sorted by `delta`.
    pub fn arcs_from(&self, source: usize) -> &[Hyperarc] {
        &self.hyperarcs[self.by_source[source].clone()]
    }

    pub fn index_of(&self, form: &CanonicalForm) -> Option<usize> {
        self.index.get(form.encoding()).copied()
    }

    /// Position of the class of `lambda` (a placement on this graph).
    pub fn index_of_lambda(&self, lambda: &[u32]) -> Option<usize> {
        if lambda.len() != self.graph.vertex_count() {
            return None;
        }
        self.index_of(&canonize(&self.graph, lambda).form)
    }

    pub fn representative(&self, index: usize) -> Configuration {
        Configuration::new(self.graph.clone(), self.configs[index].lambda.clone())
            .expect("stored representatives are valid")
    }
}

/// Every placement of `k` robots on `g` up to isomorphism, in canonical
/// encoding order, each with its lexicographically smallest placement.
pub fn enumerate_configurations(g: &Graph, k: u32) -> Result<Vec<(CanonicalForm, Configuration)>> {
    Ok(classes(g, k)?
        .into_iter()
        .map(|e| {
            let c = Configuration::new(g.clone(), e.lambda).expect("k >= 1");
            (e.form, c)
        })
        .collect())
}

fn classes(g: &Graph, k: u32) -> Result<Vec<ConfigEntry>> {
    if k == 0 {
        return Err(Error::InvalidRobotCount);
    }
    let mut seen: BTreeMap<CanonicalForm, ConfigEntry> = BTreeMap::new();
    for lambda in weak_compositions(g.vertex_count(), k) {
        let canon = canonize(g, &lambda);
        seen.entry(canon.form.clone()).or_insert(ConfigEntry {
            form: canon.form,
            lambda,
            orbits: canon.orbits,
        });
    }
    Ok(seen.into_values().collect())
}

/// Placements of `k` robots on `n` vertices in lexicographic order.
pub fn weak_compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0u32; n];
    cur[n - 1] = k;
    loop {
        out.push(cur.clone());
        // next composition in lexicographic order: move one unit from the
        // tail into the rightmost position that can still grow
        let Some(i) = (0..n - 1)
            .rev()
            .find(|&i| cur[i + 1..].iter().any(|&x| x > 0))
        else {
            return out;
        };
        let tail: u32 = cur[i + 1..].iter().sum();
        cur[i] += 1;
        for x in &mut cur[i + 1..] {
            *x = 0;
        }
        cur[n - 1] = tail - 1;
    }
}

pub fn build(g: &Graph, k: u32, scheduler: Scheduler) -> Result<ConfigHypergraph> {
    let configs = classes(g, k)?;
    let index: HashMap<&[u8], usize> = configs
        .iter()
        .enumerate()
        .map(|(i, c)| (c.form.encoding(), i))
        .collect();
    let per_source: Vec<Vec<Hyperarc>> = configs
        .par_iter()
        .enumerate()
        .map(|(source, entry)| {
            let mut grouped: BTreeMap<Vec<usize>, Vec<Move>> = BTreeMap::new();
            for m in moves_of(g, &entry.lambda, &entry.orbits)? {
                let delta: BTreeSet<usize> =
                    placements(g, &entry.lambda, &entry.orbits, &m, scheduler)?
                        .iter()
                        .map(|l| {
                            index
                                .get(canonize(g, l).form.encoding())
                                .copied()
                                .ok_or_else(|| {
                                    Error::Internal("outcome outside the class list".into())
                                })
                        })
                        .collect::<Result<_>>()?;
                grouped
                    .entry(delta.into_iter().collect())
                    .or_default()
                    .push(m);
            }
            Ok(grouped
                .into_iter()
                .map(|(delta, moves)| Hyperarc {
                    source,
                    delta,
                    moves,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let hyperarcs = per_source.into_iter().flatten().collect();
    Ok(ConfigHypergraph::assemble(
        g.clone(),
        k,
        scheduler,
        configs,
        hyperarcs,
    ))
}

#[derive(Serialize, Deserialize)]
struct HypergraphDocument {
    format_version: u64,
    graph: Graph,
    k: u32,
    scheduler: Scheduler,
    configs: Vec<ConfigDocument>,
    hyperarcs: Vec<Hyperarc>,
}

#[derive(Serialize, Deserialize)]
struct ConfigDocument {
    lambda: Vec<u32>,
}

/// Renders `h` as `"json"` (the exchange format, keys sorted) or `"dot"`.
pub fn export(h: &ConfigHypergraph, format: &str) -> Result<String> {
    match format {
        "json" => to_json(h),
        "dot" => Ok(to_dot(h)),
        other => Err(Error::UnknownFormat(other.to_string())),
    }
}

fn to_json(h: &ConfigHypergraph) -> Result<String> {
    let doc = HypergraphDocument {
        format_version: FORMAT_VERSION,
        graph: h.graph.clone(),
        k: h.k,
        scheduler: h.scheduler,
        configs: h
            .configs
            .iter()
            .map(|c| ConfigDocument {
                lambda: c.lambda.clone(),
            })
            .collect(),
        hyperarcs: h.hyperarcs.clone(),
    };
    // going through Value sorts object keys
    Ok(serde_json::to_value(doc)?.to_string())
}

fn lambda_label(lambda: &[u32]) -> String {
    let parts: Vec<String> = lambda.iter().map(u32::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn to_dot(h: &ConfigHypergraph) -> String {
    let mut out = String::from("digraph hypergraph {\n  node [shape=box];\n");
    for (i, c) in h.configs.iter().enumerate() {
        let _ = writeln!(out, "  c{i} [label=\"C{i} {}\"];", lambda_label(&c.lambda));
    }
    for (j, arc) in h.hyperarcs.iter().enumerate() {
        let _ = writeln!(
            out,
            "  h{j} [shape=point, xlabel=\"{} move{}\"];",
            arc.moves.len(),
            if arc.moves.len() == 1 { "" } else { "s" }
        );
        let _ = writeln!(out, "  c{} -> h{j} [arrowhead=none];", arc.source);
        for d in &arc.delta {
            let _ = writeln!(out, "  h{j} -> c{d};");
        }
    }
    out.push_str("}\n");
    out
}

/// Reads a JSON export back, re-deriving canonical forms and checking the
/// structural invariants.
pub fn import(document: &str) -> Result<ConfigHypergraph> {
    let value: Value = serde_json::from_str(document)?;
    match value.get("format_version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(Error::VersionMismatch(v)),
        None => return Err(Error::Malformed("missing format_version".into())),
    }
    let doc: HypergraphDocument = serde_json::from_value(value)?;
    let graph = doc.graph;
    if doc.k == 0 {
        return Err(Error::InvalidRobotCount);
    }
    let mut configs = Vec::with_capacity(doc.configs.len());
    let mut seen = BTreeSet::new();
    for c in doc.configs {
        let conf = Configuration::new(graph.clone(), c.lambda)?;
        if conf.total_robots() != doc.k {
            return Err(Error::Invariant(format!(
                "config {:?} does not hold {} robots",
                conf.lambda(),
                doc.k
            )));
        }
        let canon = canonize(&graph, conf.lambda());
        if !seen.insert(canon.form.clone()) {
            return Err(Error::Invariant(format!(
                "configs {:?} repeat an isomorphism class",
                conf.lambda()
            )));
        }
        configs.push(ConfigEntry {
            form: canon.form,
            lambda: conf.lambda().to_vec(),
            orbits: canon.orbits,
        });
    }
    let expected: BTreeSet<CanonicalForm> = classes(&graph, doc.k)?
        .into_iter()
        .map(|e| e.form)
        .collect();
    if expected != seen {
        return Err(Error::Invariant(
            "configs do not cover every placement class".into(),
        ));
    }
    let mut pairs = BTreeSet::new();
    for arc in &doc.hyperarcs {
        let entry = configs
            .get(arc.source)
            .ok_or_else(|| Error::Invariant(format!("source {} out of range", arc.source)))?;
        if arc.delta.is_empty()
            || arc.delta.windows(2).any(|w| w[0] >= w[1])
            || arc.delta.iter().any(|&d| d >= configs.len())
        {
            return Err(Error::Invariant(format!("bad delta {:?}", arc.delta)));
        }
        if !pairs.insert((arc.source, arc.delta.clone())) {
            return Err(Error::Invariant(format!(
                "duplicate hyperarc ({}, {:?})",
                arc.source, arc.delta
            )));
        }
        if arc.moves.is_empty() || arc.moves.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invariant(format!(
                "moves of ({}, {:?}) must be non-empty and sorted",
                arc.source, arc.delta
            )));
        }
        for m in &arc.moves {
            Move::new(m.assignments().to_vec())?;
            validate_move(&graph, &entry.lambda, &entry.orbits, m)?;
        }
    }
    let mut hyperarcs = doc.hyperarcs;
    hyperarcs.sort_by(|a, b| (a.source, &a.delta).cmp(&(b.source, &b.delta)));
    Ok(ConfigHypergraph::assemble(
        graph,
        doc.k,
        doc.scheduler,
        configs,
        hyperarcs,
    ))
}
