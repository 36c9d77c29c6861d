#![allow(dead_code)]

use oblot_core::Graph;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::new(n, edges.iter().copied()).unwrap()
}

pub fn k23() -> Graph {
    graph(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
}

pub fn cycle(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

/// Every labelled graph on `n` vertices, one per edge subset.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            graph(n, &edges)
        })
        .collect()
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected(n: usize) -> Vec<Graph> {
    oblot_oracle::connected_graphs(n)
        .into_iter()
        .map(|e| graph(n, &e))
        .collect()
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    graph(n, &edges)
}

pub fn random_connected(rng: &mut impl Rng, n: usize) -> Graph {
    loop {
        let p = rng.gen_range(0.3..0.9);
        let g = random_graph(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `lambda` moved along `perm`, matching [`Graph::relabel`].
pub fn permute(lambda: &[u32], perm: &[usize]) -> Vec<u32> {
    let mut out = vec![0; lambda.len()];
    for (v, &l) in lambda.iter().enumerate() {
        out[perm[v]] = l;
    }
    out
}

pub fn random_lambda(rng: &mut impl Rng, n: usize, k: u32) -> Vec<u32> {
    let mut l = vec![0; n];
    for _ in 0..k {
        l[rng.gen_range(0..n)] += 1;
    }
    l
}
