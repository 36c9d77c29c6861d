//! Graphs, robot configurations and their JSON documents.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Finite undirected simple graph on vertices `0..n`.
///
/// Edges are kept as sorted `(u, v)` pairs with `u < v`, so two graphs
/// compare equal exactly when they have the same vertex count and edge set,
/// whatever order the edges were listed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphDocument", into = "GraphDocument")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for endpoint in [u, v] {
                if endpoint >= n {
                    return Err(Error::EndpointOutOfRange { endpoint, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !set.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or_default();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Graph obtained by renaming every vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("a permutation preserves simplicity")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(flatten, skip_serializing)]
    extra: BTreeMap<String, Value>,
}

impl TryFrom<GraphDocument> for Graph {
    type Error = Error;

    fn try_from(doc: GraphDocument) -> Result<Self> {
        warn_unknown("graph", &doc.extra);
        Graph::new(doc.n, doc.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl From<Graph> for GraphDocument {
    fn from(g: Graph) -> Self {
        GraphDocument {
            name: None,
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            extra: BTreeMap::new(),
        }
    }
}

fn warn_unknown(what: &str, extra: &BTreeMap<String, Value>) {
    for key in extra.keys() {
        warn!("ignoring unknown field {key:?} in {what} document");
    }
}

/// Parses and validates a graph document `{"name"?, "n", "edges"}`.
pub fn load_graph(source: &str) -> Result<Graph> {
    // parse the document first so structural errors keep their own variant
    let doc: GraphDocument = serde_json::from_str(source)?;
    Graph::try_from(doc)
}

/// Robot count per vertex, used as the vertex colouring handed to the canonizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexColoring(pub Vec<u32>);

impl VertexColoring {
    pub fn uniform(n: usize) -> Self {
        VertexColoring(vec![0; n])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

/// A graph together with the number of robots sitting on each vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    graph: Graph,
    lambda: Vec<u32>,
}

impl Configuration {
    pub fn new(graph: Graph, lambda: Vec<u32>) -> Result<Self> {
        validate_configuration(&graph, &lambda)?;
        Ok(Configuration { graph, lambda })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    pub fn total_robots(&self) -> u32 {
        total_robots(&self.lambda)
    }

    pub fn coloring(&self) -> VertexColoring {
        VertexColoring(self.lambda.clone())
    }

    /// Same graph, different placement.
    pub fn with_lambda(&self, lambda: Vec<u32>) -> Result<Self> {
        Configuration::new(self.graph.clone(), lambda)
    }

    /// Uncoloured encoding of the configuration: every vertex `v` gets
    /// `lambda[v] + 1` fresh pendant neighbours, numbered after the original
    /// vertices in vertex order.
    pub fn configuration_graph(&self) -> Graph {
        let n = self.graph.vertex_count();
        let mut edges = self.graph.edges().to_vec();
        let mut next = n;
        for (v, &l) in self.lambda.iter().enumerate() {
            for _ in 0..=l {
                edges.push((v, next));
                next += 1;
            }
        }
        Graph::new(next, edges).expect("pendant vertices are fresh")
    }
}

pub fn validate_configuration(graph: &Graph, lambda: &[u32]) -> Result<()> {
    if lambda.len() != graph.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: graph.vertex_count(),
            got: lambda.len(),
        });
    }
    if total_robots(lambda) == 0 {
        return Err(Error::ZeroRobots);
    }
    Ok(())
}

pub fn total_robots(lambda: &[u32]) -> u32 {
    lambda.iter().sum()
}

#[derive(Deserialize)]
struct ConfigurationDocument {
    graph: Value,
    lambda: Vec<u32>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

/// Parses a configuration document `{"graph": <object or path>, "lambda": [...]}`.
///
/// A string `graph` is a path, resolved against `base_dir` when relative.
pub fn load_configuration(source: &str, base_dir: Option<&Path>) -> Result<Configuration> {
    let doc: ConfigurationDocument = serde_json::from_str(source)?;
    warn_unknown("configuration", &doc.extra);
    let graph = match doc.graph {
        Value::String(path) => {
            let path = match base_dir {
                Some(base) => base.join(&path),
                None => path.into(),
            };
            let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            load_graph(&text)?
        }
        obj @ Value::Object(_) => Graph::try_from(serde_json::from_value::<GraphDocument>(obj)?)?,
        other => {
            return Err(Error::Malformed(format!(
                "\"graph\" must be an object or a path, got {other}"
            )))
        }
    };
    Configuration::new(graph, doc.lambda)
}
