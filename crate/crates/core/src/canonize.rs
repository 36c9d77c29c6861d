//! Canonical labelling of vertex-coloured graphs and automorphism orbits.
//!
//! The canonizer is a small individualisation-refinement search. The root
//! partition groups vertices by colour (larger colours first), every node is
//! refined to the coarsest equitable partition, and discrete leaves are
//! compared by their byte encoding; the smallest leaf wins. Leaves with the
//! same encoding yield automorphisms, which prune sibling subtrees and
//! generate the orbit partition.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph, VertexColoring};

/// Isomorphism-invariant encoding of a coloured graph.
///
/// Equality, ordering and hashing look at the encoding only; the labeling is
/// the particular permutation that produced it for this input.
#[derive(Clone)]
pub struct CanonicalForm {
    encoding: Vec<u8>,
    labeling: Vec<usize>,
}

impl CanonicalForm {
    pub fn encoding(&self) -> &[u8] {
        &self.encoding
    }

    /// `labeling()[v]` is the canonical label of input vertex `v`.
    pub fn labeling(&self) -> &[usize] {
        &self.labeling
    }

    pub fn to_hex(&self) -> String {
        self.encoding.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.encoding == other.encoding
    }
}

impl Eq for CanonicalForm {}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.encoding.cmp(&other.encoding)
    }
}

impl Hash for CanonicalForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.encoding.hash(state);
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CanonicalForm")
            .field("encoding", &self.to_hex())
            .field("labeling", &self.labeling)
            .finish()
    }
}

/// Vertex orbits under the colour-preserving automorphism group, sorted by
/// rank (the smallest canonical label inside the orbit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    orbits: Vec<Vec<usize>>,
    ranks: Vec<usize>,
    orbit_of: Vec<usize>,
}

impl OrbitPartition {
    fn from_classes(mut classes: Vec<Vec<usize>>, labeling: &[usize]) -> Self {
        for class in &mut classes {
            class.sort_unstable();
        }
        let rank_of = |class: &Vec<usize>| class.iter().map(|&v| labeling[v]).min().unwrap();
        classes.sort_by_key(rank_of);
        let ranks = classes.iter().map(rank_of).collect();
        let mut orbit_of = vec![0; labeling.len()];
        for (i, class) in classes.iter().enumerate() {
            for &v in class {
                orbit_of[v] = i;
            }
        }
        OrbitPartition {
            orbits: classes,
            ranks,
            orbit_of,
        }
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Orbits in rank order; each orbit's vertices are sorted.
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn vertices(&self, index: usize) -> &[usize] {
        &self.orbits[index]
    }

    pub fn rank(&self, index: usize) -> usize {
        self.ranks[index]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Position (in rank order) of the orbit holding `v`.
    pub fn orbit_of(&self, v: usize) -> usize {
        self.orbit_of[v]
    }

    pub fn index_of_rank(&self, rank: usize) -> Option<usize> {
        self.ranks.binary_search(&rank).ok()
    }
}

/// Everything one canonizer run produces.
#[derive(Clone, Debug)]
pub struct Canonization {
    pub form: CanonicalForm,
    pub orbits: OrbitPartition,
    /// Non-identity automorphisms found while searching, as vertex maps.
    pub generators: Vec<Vec<usize>>,
}

pub fn canonize(graph: &Graph, colors: &[u32]) -> Canonization {
    assert_eq!(colors.len(), graph.vertex_count(), "colouring length");
    let mut search = Search::new(graph, colors);
    search.run();
    let best = search.best.expect("search visits at least one leaf");
    let labeling = best.labeling;
    let mut uf = UnionFind::new(graph.vertex_count());
    for g in &search.generators {
        for (v, &w) in g.iter().enumerate() {
            uf.union(v, w);
        }
    }
    let orbits = OrbitPartition::from_classes(uf.classes(), &labeling);
    Canonization {
        form: CanonicalForm {
            encoding: best.code,
            labeling,
        },
        orbits,
        generators: search.generators,
    }
}

pub fn canonical_form(graph: &Graph, coloring: &VertexColoring) -> CanonicalForm {
    canonize(graph, coloring.as_slice()).form
}

pub fn canonical_configuration(c: &Configuration) -> CanonicalForm {
    canonize(c.graph(), c.lambda()).form
}

pub fn automorphism_orbits(c: &Configuration) -> OrbitPartition {
    canonize(c.graph(), c.lambda()).orbits
}

pub fn is_isomorphic(a: &Configuration, b: &Configuration) -> bool {
    canonical_configuration(a) == canonical_configuration(b)
}

/// Indices (rank order) of orbits holding robots.
///
/// Fails if an orbit mixes vertices with different robot counts, which no
/// automorphism of the configuration can do.
pub fn occupied_orbits(p: &OrbitPartition, c: &Configuration) -> Result<Vec<usize>> {
    occupied_orbit_indices(p, c.lambda())
}

pub(crate) fn occupied_orbit_indices(p: &OrbitPartition, lambda: &[u32]) -> Result<Vec<usize>> {
    let mut occupied = Vec::new();
    for (i, orbit) in p.orbits().iter().enumerate() {
        let l = lambda[orbit[0]];
        if let Some(&v) = orbit.iter().find(|&&v| lambda[v] != l) {
            return Err(Error::Internal(format!(
                "orbit {i} mixes robot counts at vertices {} and {v}",
                orbit[0]
            )));
        }
        if l > 0 {
            occupied.push(i);
        }
    }
    Ok(occupied)
}

struct Leaf {
    labeling: Vec<usize>,
    code: Vec<u8>,
}

type Cells = Vec<Vec<usize>>;

struct Search<'a> {
    graph: &'a Graph,
    colors: &'a [u32],
    first: Option<Leaf>,
    first_path: Vec<usize>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a Graph, colors: &'a [u32]) -> Self {
        Search {
            graph,
            colors,
            first: None,
            first_path: Vec::new(),
            best: None,
            generators: Vec::new(),
        }
    }

    fn run(&mut self) {
        let n = self.graph.vertex_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.colors[v]));
        let mut cells: Cells = Vec::new();
        for v in order {
            match cells.last_mut() {
                Some(cell) if self.colors[cell[0]] == self.colors[v] => cell.push(v),
                _ => cells.push(vec![v]),
            }
        }
        let mut prefix = Vec::new();
        self.visit(cells, &mut prefix);
    }

    /// Returns `Some(depth)` to abandon every node deeper than `depth`.
    fn visit(&mut self, mut cells: Cells, prefix: &mut Vec<usize>) -> Option<usize> {
        self.refine(&mut cells);
        let target = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.len() > 1)
            .min_by_key(|(i, c)| (c.len(), *i))
            .map(|(i, _)| i);
        let Some(target) = target else {
            return self.leaf(&cells, prefix);
        };
        let candidates = cells[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &candidates {
            if !explored.is_empty() {
                let uf = self.stabilizer_orbits(prefix);
                if explored.iter().any(|&u| uf.same(u, v)) {
                    continue;
                }
            }
            let mut child = cells.clone();
            let rest: Vec<usize> = child[target].iter().copied().filter(|&w| w != v).collect();
            child[target] = vec![v];
            child.insert(target + 1, rest);
            prefix.push(v);
            let jump = self.visit(child, prefix);
            prefix.pop();
            explored.push(v);
            if let Some(depth) = jump {
                if depth < prefix.len() {
                    return Some(depth);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: &Cells, prefix: &[usize]) -> Option<usize> {
        let n = self.graph.vertex_count();
        let mut labeling = vec![0; n];
        for (label, cell) in cells.iter().enumerate() {
            labeling[cell[0]] = label;
        }
        let code = self.encode(cells);
        let Some(first) = &self.first else {
            self.first = Some(Leaf {
                labeling: labeling.clone(),
                code: code.clone(),
            });
            self.first_path = prefix.to_vec();
            self.best = Some(Leaf { labeling, code });
            return None;
        };
        if code == first.code {
            let g = automorphism_between(&first.labeling, &labeling);
            self.push_generator(g);
            let depth = prefix
                .iter()
                .zip(&self.first_path)
                .take_while(|(a, b)| a == b)
                .count();
            return Some(depth);
        }
        let best = self.best.as_ref().expect("set with first leaf");
        match code.cmp(&best.code) {
            Ordering::Equal => {
                let g = automorphism_between(&best.labeling, &labeling);
                self.push_generator(g);
            }
            Ordering::Less => self.best = Some(Leaf { labeling, code }),
            Ordering::Greater => {}
        }
        None
    }

    fn push_generator(&mut self, g: Vec<usize>) {
        if g.iter().enumerate().any(|(v, &w)| v != w) {
            self.generators.push(g);
        }
    }

    fn stabilizer_orbits(&self, fixed: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.graph.vertex_count());
        for g in &self.generators {
            if fixed.iter().all(|&v| g[v] == v) {
                for (v, &w) in g.iter().enumerate() {
                    uf.union(v, w);
                }
            }
        }
        uf
    }

    /// Splits cells by neighbour counts into every cell until stable.
    fn refine(&self, cells: &mut Cells) {
        let n = self.graph.vertex_count();
        let mut cell_of = vec![0; n];
        loop {
            for (i, cell) in cells.iter().enumerate() {
                for &v in cell {
                    cell_of[v] = i;
                }
            }
            let mut split = false;
            let mut next: Cells = Vec::with_capacity(cells.len());
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut keyed: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut counts = vec![0u32; cells.len()];
                        for &w in self.graph.neighbors(v) {
                            counts[cell_of[w]] += 1;
                        }
                        (counts, v)
                    })
                    .collect();
                keyed.sort();
                let start = next.len();
                for (i, (_, v)) in keyed.iter().enumerate() {
                    if i > 0 && keyed[i - 1].0 == keyed[i].0 {
                        next.last_mut().expect("pushed above").push(*v);
                    } else {
                        next.push(vec![*v]);
                    }
                }
                if next.len() - start > 1 {
                    split = true;
                }
            }
            *cells = next;
            if !split {
                return;
            }
        }
    }

    /// `n`, then colours in label order, then the upper triangle of the
    /// relabelled adjacency matrix as packed bits; each field is prefixed by
    /// its byte length.
    fn encode(&self, cells: &Cells) -> Vec<u8> {
        let n = self.graph.vertex_count();
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let mut out = Vec::new();
        push_field(&mut out, &(n as u32).to_le_bytes());
        let colors: Vec<u8> = order
            .iter()
            .flat_map(|&v| self.colors[v].to_le_bytes())
            .collect();
        push_field(&mut out, &colors);
        let mut bits = vec![0u8; (n * n.saturating_sub(1) / 2).div_ceil(8)];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.graph.has_edge(order[i], order[j]) {
                    bits[k / 8] |= 0x80 >> (k % 8);
                }
                k += 1;
            }
        }
        push_field(&mut out, &bits);
        out
    }
}

fn push_field(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

/// Given two labelings producing the same encoding, the map sending each
/// vertex of the second to the vertex with the same label in the first.
fn automorphism_between(reference: &[usize], other: &[usize]) -> Vec<usize> {
    let mut vertex_with_label = vec![0; reference.len()];
    for (v, &l) in reference.iter().enumerate() {
        vertex_with_label[l] = v;
    }
    other.iter().map(|&l| vertex_with_label[l]).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            by_root[self.find(v)].push(v);
        }
        by_root.into_iter().filter(|c| !c.is_empty()).collect()
    }
}
