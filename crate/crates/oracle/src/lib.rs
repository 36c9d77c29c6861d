//! Brute-force reference implementations.
//!
//! Everything here works on plain vertex counts, edge lists and robot-count
//! vectors and enumerates permutations or per-robot choices exhaustively.
//! Nothing in this crate shares code with `oblot-core`; it exists so the
//! tests there have an independent route to every expected value.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use itertools::Itertools;

pub type Edges = [(usize, usize)];

pub fn adjacency(n: usize, edges: &Edges) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    adj
}

pub fn neighbors(n: usize, edges: &Edges) -> Vec<Vec<usize>> {
    let adj = adjacency(n, edges);
    (0..n)
        .map(|u| (0..n).filter(|&v| adj[u][v]).collect())
        .collect()
}

/// All permutations of `0..n` as vertex maps `perm[v]`.
pub fn permutations(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).permutations(n)
}

pub fn is_automorphism(adj: &[Vec<bool>], colors: &[u32], perm: &[usize]) -> bool {
    let n = adj.len();
    (0..n).all(|v| colors[v] == colors[perm[v]])
        && (0..n).all(|u| (0..n).all(|v| adj[u][v] == adj[perm[u]][perm[v]]))
}

pub fn automorphisms(n: usize, edges: &Edges, colors: &[u32]) -> Vec<Vec<usize>> {
    let adj = adjacency(n, edges);
    permutations(n)
        .filter(|p| is_automorphism(&adj, colors, p))
        .collect()
}

/// Exhaustive colour-preserving isomorphism test.
pub fn isomorphic(
    n: usize,
    edges_a: &Edges,
    colors_a: &[u32],
    edges_b: &Edges,
    colors_b: &[u32],
) -> bool {
    if edges_a.len() != edges_b.len() {
        return false;
    }
    let a = adjacency(n, edges_a);
    let b = adjacency(n, edges_b);
    permutations(n).any(|p| {
        (0..n).all(|v| colors_a[v] == colors_b[p[v]])
            && (0..n).all(|u| (0..n).all(|v| a[u][v] == b[p[u]][p[v]]))
    })
}

/// Minimum over all relabelings of (relabelled colours, adjacency bits).
/// Equal keys exactly for isomorphic coloured graphs.
pub fn canonical_key(n: usize, edges: &Edges, colors: &[u32]) -> (Vec<u32>, Vec<bool>) {
    let adj = adjacency(n, edges);
    permutations(n)
        .map(|p| {
            // p[v] is the new name of v
            let mut inv = vec![0; n];
            for (v, &pv) in p.iter().enumerate() {
                inv[pv] = v;
            }
            let cols: Vec<u32> = (0..n).map(|i| colors[inv[i]]).collect();
            let mut bits = Vec::with_capacity(n * n / 2);
            for i in 0..n {
                for j in i + 1..n {
                    bits.push(adj[inv[i]][inv[j]]);
                }
            }
            (cols, bits)
        })
        .min()
        .unwrap_or_default()
}

/// Orbits under all colour-preserving automorphisms, each sorted, listed by
/// smallest member.
pub fn orbits(n: usize, edges: &Edges, colors: &[u32]) -> Vec<Vec<usize>> {
    let autos = automorphisms(n, edges, colors);
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let orbit: BTreeSet<usize> = autos.iter().map(|p| p[v]).collect();
        for &w in &orbit {
            seen[w] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

/// All placements of `k` robots on `n` vertices, lexicographic.
pub fn weak_compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(i + 1, n, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Every connected graph on `n` vertices up to isomorphism (edge lists).
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if !is_connected(n, &edges) {
            continue;
        }
        if seen.insert(canonical_key(n, &edges, &vec![0; n])) {
            out.push(edges);
        }
    }
    out
}

pub fn is_connected(n: usize, edges: &Edges) -> bool {
    if n == 0 {
        return true;
    }
    let nb = neighbors(n, edges);
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for &w in &nb[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// An orbit-level move: for each orbit id (index into an orbit list), the
/// target orbit id, `None` to stay. Orbits absent from the map hold no robots.
pub type OrbitMove = BTreeMap<usize, Option<usize>>;

/// Moves of a raw configuration under brute-force orbits: every map from
/// occupied orbits to nil-or-adjacent orbit, except all-nil.
pub fn raw_moves(n: usize, edges: &Edges, lambda: &[u32]) -> (Vec<Vec<usize>>, Vec<OrbitMove>) {
    let orbs = orbits(n, edges, lambda);
    let adj = adjacency(n, edges);
    let occupied: Vec<usize> = (0..orbs.len())
        .filter(|&i| lambda[orbs[i][0]] > 0)
        .collect();
    let options: Vec<Vec<Option<usize>>> = occupied
        .iter()
        .map(|&i| {
            let mut opts = vec![None];
            for j in 0..orbs.len() {
                if orbs[i].iter().any(|&x| orbs[j].iter().any(|&y| adj[x][y])) {
                    opts.push(Some(j));
                }
            }
            opts
        })
        .collect();
    let moves = options
        .iter()
        .multi_cartesian_product()
        .filter(|choice| choice.iter().any(|t| t.is_some()))
        .map(|choice| {
            occupied
                .iter()
                .copied()
                .zip(choice.into_iter().copied())
                .collect()
        })
        .collect();
    (orbs, moves)
}

/// Raw placements reachable by `mv`: every robot independently picks a
/// neighbour of its vertex inside its target orbit. With `ssync`, every
/// robot with a target may also stay, except all of them staying at once.
pub fn raw_outcomes(
    n: usize,
    edges: &Edges,
    lambda: &[u32],
    orbs: &[Vec<usize>],
    mv: &OrbitMove,
    ssync: bool,
) -> BTreeSet<Vec<u32>> {
    let adj = adjacency(n, edges);
    let mut orbit_of = vec![0; n];
    for (i, o) in orbs.iter().enumerate() {
        for &v in o {
            orbit_of[v] = i;
        }
    }
    // one entry per robot: (home vertex, destinations, may stay)
    let mut robots: Vec<(usize, Vec<Option<usize>>)> = Vec::new();
    for v in 0..n {
        for _ in 0..lambda[v] {
            let choices = match mv.get(&orbit_of[v]).copied().flatten() {
                None => vec![None],
                Some(t) => {
                    let mut c: Vec<Option<usize>> = orbs[t]
                        .iter()
                        .filter(|&&w| adj[v][w])
                        .map(|&w| Some(w))
                        .collect();
                    assert!(!c.is_empty(), "orbit symmetry guarantees a neighbour");
                    if ssync {
                        c.insert(0, None);
                    }
                    c
                }
            };
            robots.push((v, choices));
        }
    }
    let has_mover = robots.iter().any(|(_, c)| c.iter().any(|d| d.is_some()));
    let mut out = BTreeSet::new();
    for pick in robots
        .iter()
        .map(|(_, c)| c.iter())
        .multi_cartesian_product()
    {
        if ssync && has_mover && pick.iter().all(|d| d.is_none()) {
            continue;
        }
        let mut next = vec![0u32; n];
        for ((home, _), dest) in robots.iter().zip(pick) {
            next[dest.unwrap_or(*home)] += 1;
        }
        out.insert(next);
    }
    out
}

/// Minimax distances of the raw robot game (no canonical grouping).
///
/// `dist[λ] = 0` for final placements, otherwise `1 + min over moves of max
/// over raw outcomes`, as a least fixed point; `None` marks unsolvable ones.
pub fn raw_game_distances(
    n: usize,
    edges: &Edges,
    k: u32,
    is_final: impl Fn(&[u32]) -> bool,
) -> BTreeMap<Vec<u32>, Option<usize>> {
    let states = weak_compositions(n, k);
    let transitions: HashMap<Vec<u32>, Vec<BTreeSet<Vec<u32>>>> = states
        .iter()
        .map(|l| {
            let (orbs, moves) = raw_moves(n, edges, l);
            let outs = moves
                .iter()
                .map(|m| raw_outcomes(n, edges, l, &orbs, m, false))
                .collect();
            (l.clone(), outs)
        })
        .collect();
    let mut dist: BTreeMap<Vec<u32>, Option<usize>> = states
        .iter()
        .map(|l| (l.clone(), is_final(l).then_some(0)))
        .collect();
    loop {
        let mut next = dist.clone();
        for l in &states {
            if dist[l] == Some(0) {
                continue;
            }
            let best = transitions[l]
                .iter()
                .filter_map(|outs| {
                    outs.iter()
                        .map(|o| dist[o])
                        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
                })
                .min();
            next.insert(l.clone(), best.map(|d| d + 1));
        }
        if next == dist {
            return dist;
        }
        dist = next;
    }
}

/// Literal recursive minimum-worst-case search with a visited set.
///
/// `arcs` lists `(source, delta, sorted moves)` triples. Returns the
/// distance and the chosen move (`None` for the nil move).
pub fn recursive_plan<M: Ord + Clone>(
    config: usize,
    arcs: &[(usize, Vec<usize>, Vec<M>)],
    visited: &BTreeSet<usize>,
    finals: &BTreeSet<usize>,
    solvable: &BTreeSet<usize>,
) -> Option<(usize, Option<M>)> {
    if finals.contains(&config) {
        return Some((0, None));
    }
    let mut visited = visited.clone();
    visited.insert(config);
    let mut candidates: Vec<(usize, M)> = Vec::new();
    for (src, delta, moves) in arcs {
        if *src != config
            || !delta.iter().all(|d| solvable.contains(d))
            || delta.iter().any(|d| visited.contains(d))
        {
            continue;
        }
        let mut d_max: Option<usize> = Some(0);
        for &d in delta {
            d_max = match (d_max, recursive_plan(d, arcs, &visited, finals, solvable)) {
                (Some(a), Some((b, _))) => Some(a.max(b)),
                _ => None,
            };
        }
        if let Some(d) = d_max {
            candidates.push((d, moves.iter().min().cloned().expect("non-empty move set")));
        }
    }
    candidates.into_iter().min().map(|(d, m)| (d + 1, Some(m)))
}

/// Geodesic mutual visibility by explicit shortest-path enumeration.
pub fn geodesic_mutual_visibility(n: usize, edges: &Edges, lambda: &[u32]) -> bool {
    if lambda.iter().any(|&l| l > 1) {
        return false;
    }
    let nb = neighbors(n, edges);
    let occupied: Vec<usize> = (0..n).filter(|&v| lambda[v] == 1).collect();
    occupied.iter().tuple_combinations().all(|(&u, &v)| {
        let paths = all_shortest_paths(&nb, u, v);
        paths
            .iter()
            .any(|p| p[1..p.len() - 1].iter().all(|&w| lambda[w] == 0))
    })
}

/// Every shortest `u`-`v` path, found by enumerating all simple paths.
pub fn all_shortest_paths(nb: &[Vec<usize>], u: usize, v: usize) -> Vec<Vec<usize>> {
    fn rec(nb: &[Vec<usize>], path: &mut Vec<usize>, target: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        if last == target {
            out.push(path.clone());
            return;
        }
        for &w in &nb[last] {
            if !path.contains(&w) {
                path.push(w);
                rec(nb, path, target, out);
                path.pop();
            }
        }
    }
    let mut all = Vec::new();
    rec(nb, &mut vec![u], v, &mut all);
    let Some(shortest) = all.iter().map(Vec::len).min() else {
        return all;
    };
    all.retain(|p| p.len() == shortest);
    all
}
