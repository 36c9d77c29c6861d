//! Orbit-level moves and the placements an adversary can resolve them into.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::canonize::{canonize, occupied_orbit_indices, CanonicalForm, OrbitPartition};
use crate::error::{Error, Result};
use crate::graph::{Configuration, Graph};

/// Activation model used when resolving a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheduler {
    /// Every robot acts in every round.
    Fsync,
    /// The adversary activates a non-empty subset of the robots that would move.
    Ssync,
}

impl std::str::FromStr for Scheduler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fsync" => Ok(Scheduler::Fsync),
            "ssync" => Ok(Scheduler::Ssync),
            other => Err(Error::InvalidName(format!("unknown scheduler {other:?}"))),
        }
    }
}

impl std::fmt::Display for Scheduler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheduler::Fsync => "fsync",
            Scheduler::Ssync => "ssync",
        })
    }
}

/// One instruction per occupied orbit: `(source rank, target rank)`, with
/// `None` meaning the robots of that orbit stay put.
///
/// Orbits are named by rank, the smallest canonical label they contain, so a
/// move computed on one configuration applies verbatim to every isomorphic
/// one. The derived ordering is the lexicographic move order, with nil below
/// every rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Move {
    assignments: Vec<(usize, Option<usize>)>,
}

impl Move {
    /// Rejects the all-nil function and unsorted or repeated sources.
    pub fn new(assignments: Vec<(usize, Option<usize>)>) -> Result<Self> {
        if assignments.iter().all(|(_, t)| t.is_none()) {
            return Err(Error::Invariant("the all-nil move is not a move".into()));
        }
        if assignments.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Invariant(
                "move sources must be strictly increasing ranks".into(),
            ));
        }
        Ok(Move { assignments })
    }

    pub fn assignments(&self) -> &[(usize, Option<usize>)] {
        &self.assignments
    }

    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.assignments.iter().map(|&(s, _)| s)
    }

    pub fn target_of(&self, source_rank: usize) -> Option<usize> {
        self.assignments
            .iter()
            .find(|&&(s, _)| s == source_rank)
            .and_then(|&(_, t)| t)
    }
}

/// Lexicographic move order; only moves over the same occupied orbits compare.
pub fn compare_moves(a: &Move, b: &Move) -> Result<Ordering> {
    if !a.sources().eq(b.sources()) {
        return Err(Error::IncomparableMoves);
    }
    Ok(a.cmp(b))
}

/// Canonical classes reachable from a configuration by one move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeSet {
    pub outcomes: BTreeSet<CanonicalForm>,
}

impl OutcomeSet {
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn is_subset(&self, other: &OutcomeSet) -> bool {
        self.outcomes.is_subset(&other.outcomes)
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.outcomes.contains(form)
    }
}

/// Ranks of orbits joined to orbit `rank` by at least one edge (possibly
/// `rank` itself).
pub fn adjacent_orbits(p: &OrbitPartition, g: &Graph, rank: usize) -> BTreeSet<usize> {
    let Some(index) = p.index_of_rank(rank) else {
        return BTreeSet::new();
    };
    p.vertices(index)
        .iter()
        .flat_map(|&v| g.neighbors(v))
        .map(|&w| p.rank(p.orbit_of(w)))
        .collect()
}

/// Every move of `c`, sorted and without the nil move.
pub fn enumerate_moves(c: &Configuration, p: &OrbitPartition) -> Result<Vec<Move>> {
    moves_of(c.graph(), c.lambda(), p)
}

pub(crate) fn moves_of(g: &Graph, lambda: &[u32], p: &OrbitPartition) -> Result<Vec<Move>> {
    let occupied = occupied_orbit_indices(p, lambda)?;
    let mut options: Vec<(usize, Vec<Option<usize>>)> = Vec::with_capacity(occupied.len());
    for &i in &occupied {
        let source = p.rank(i);
        let adjacent = adjacent_orbits(p, g, source);
        for &t in &adjacent {
            check_feasible(g, p, i, p.index_of_rank(t).expect("rank from partition"))?;
        }
        let mut targets = vec![None];
        targets.extend(adjacent.into_iter().map(Some));
        options.push((source, targets));
    }
    // Odometer over the option lists; nil comes first in each, so the output
    // is already in lexicographic order and the first tuple is the nil move.
    let mut moves = Vec::new();
    let mut digits = vec![0usize; options.len()];
    loop {
        let assignments: Vec<(usize, Option<usize>)> = options
            .iter()
            .zip(&digits)
            .map(|((s, ts), &d)| (*s, ts[d]))
            .collect();
        if assignments.iter().any(|(_, t)| t.is_some()) {
            moves.push(Move { assignments });
        }
        let mut pos = options.len();
        loop {
            if pos == 0 {
                return Ok(moves);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < options[pos].1.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn check_feasible(g: &Graph, p: &OrbitPartition, source: usize, target: usize) -> Result<()> {
    for &v in p.vertices(source) {
        if !g.neighbors(v).iter().any(|&w| p.orbit_of(w) == target) {
            return Err(Error::Internal(format!(
                "vertex {v} has no neighbour in orbit of rank {}",
                p.rank(target)
            )));
        }
    }
    Ok(())
}

/// Checks that `m` assigns exactly the occupied orbits of `c` to adjacent orbits.
pub fn validate_move(g: &Graph, lambda: &[u32], p: &OrbitPartition, m: &Move) -> Result<()> {
    let occupied = occupied_orbit_indices(p, lambda)?;
    if !occupied.iter().map(|&i| p.rank(i)).eq(m.sources()) {
        return Err(Error::Invariant(format!(
            "move {:?} does not cover the occupied orbits",
            m.assignments()
        )));
    }
    for &(s, t) in m.assignments() {
        if let Some(t) = t {
            if !adjacent_orbits(p, g, s).contains(&t) {
                return Err(Error::Invariant(format!(
                    "orbit {t} is not adjacent to orbit {s}"
                )));
            }
        }
    }
    Ok(())
}

/// Raw placements reachable by `m`, deduplicated and sorted.
///
/// Robots sharing a vertex choose independently, so each vertex contributes
/// every multiset of destinations of its size. Under [`Scheduler::Ssync`] a
/// robot with a target may also stay, as long as some robot with a target
/// moves.
pub fn placements(
    g: &Graph,
    lambda: &[u32],
    p: &OrbitPartition,
    m: &Move,
    scheduler: Scheduler,
) -> Result<BTreeSet<Vec<u32>>> {
    let n = g.vertex_count();
    let mut base = vec![0u32; n];
    let mut groups: Vec<Group> = Vec::new();
    for v in 0..n {
        if lambda[v] == 0 {
            continue;
        }
        let source = p.rank(p.orbit_of(v));
        match m.target_of(source) {
            None => base[v] += lambda[v],
            Some(t) => {
                let target = p
                    .index_of_rank(t)
                    .ok_or_else(|| Error::Invariant(format!("no orbit with rank {t}")))?;
                let mut options: Vec<Option<usize>> = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| p.orbit_of(w) == target)
                    .map(|&w| Some(w))
                    .collect();
                if options.is_empty() {
                    return Err(Error::Internal(format!(
                        "vertex {v} has no neighbour in orbit of rank {t}"
                    )));
                }
                if scheduler == Scheduler::Ssync {
                    options.insert(0, None);
                }
                groups.push(Group {
                    home: v,
                    robots: lambda[v],
                    options,
                });
            }
        }
    }
    let mut out = BTreeSet::new();
    let mut current = base;
    spread(&groups, 0, true, scheduler, &mut current, &mut out);
    Ok(out)
}

/// Robots on one vertex that have somewhere to go.
struct Group {
    home: usize,
    robots: u32,
    /// Destinations; `None` (SSYNC only) leaves the robot idle.
    options: Vec<Option<usize>>,
}

fn spread(
    groups: &[Group],
    at: usize,
    all_idle: bool,
    scheduler: Scheduler,
    current: &mut Vec<u32>,
    out: &mut BTreeSet<Vec<u32>>,
) {
    if at == groups.len() {
        if !(scheduler == Scheduler::Ssync && all_idle) {
            out.insert(current.clone());
        }
        return;
    }
    let Group {
        home,
        robots,
        options,
    } = &groups[at];
    let home = *home;
    for split in multisets(*robots, options.len()) {
        let mut idle = true;
        for (option, &c) in options.iter().zip(&split) {
            if c > 0 {
                match option {
                    Some(w) => {
                        current[*w] += c;
                        idle = false;
                    }
                    None => current[home] += c,
                }
            }
        }
        spread(groups, at + 1, all_idle && idle, scheduler, current, out);
        for (option, &c) in options.iter().zip(&split) {
            current[option.unwrap_or(home)] -= c;
        }
    }
}

/// All ways to distribute `count` identical robots over `bins` options.
fn multisets(count: u32, bins: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, bins: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == bins {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, bins, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(count, bins, &mut Vec::new(), &mut out);
    out
}

fn outcomes(c: &Configuration, p: &OrbitPartition, m: &Move, s: Scheduler) -> Result<OutcomeSet> {
    let raw = placements(c.graph(), c.lambda(), p, m, s)?;
    Ok(OutcomeSet {
        outcomes: raw.iter().map(|l| canonize(c.graph(), l).form).collect(),
    })
}

pub fn fsync_outcomes(c: &Configuration, p: &OrbitPartition, m: &Move) -> Result<OutcomeSet> {
    outcomes(c, p, m, Scheduler::Fsync)
}

pub fn ssync_outcomes(c: &Configuration, p: &OrbitPartition, m: &Move) -> Result<OutcomeSet> {
    outcomes(c, p, m, Scheduler::Ssync)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonize::{automorphism_orbits, canonical_configuration};

    fn k23() -> Graph {
        Graph::new(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap()
    }

    fn conf(g: &Graph, l: &[u32]) -> Configuration {
        Configuration::new(g.clone(), l.to_vec()).unwrap()
    }

    fn form(g: &Graph, l: &[u32]) -> CanonicalForm {
        canonical_configuration(&conf(g, l))
    }

    /// Rank of the orbit containing `v`.
    fn rank_of(p: &OrbitPartition, v: usize) -> usize {
        p.rank(p.orbit_of(v))
    }

    #[test]
    fn adjacency_examples() {
        let g = k23();
        let p = canonize(&g, &[0; 5]).orbits;
        let two = rank_of(&p, 0);
        let three = rank_of(&p, 2);
        assert_eq!(adjacent_orbits(&p, &g, two), BTreeSet::from([three]));

        let c4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = canonize(&c4, &[0; 4]).orbits;
        assert_eq!(adjacent_orbits(&p, &c4, 0), BTreeSet::from([0]));

        let lone = Graph::new(2, []).unwrap();
        let p = canonize(&lone, &[1, 0]).orbits;
        assert!(adjacent_orbits(&p, &lone, rank_of(&p, 0)).is_empty());
    }

    #[test]
    fn mixed_config_has_eight_moves() {
        let c = conf(&k23(), &[1, 0, 1, 0, 0]);
        let p = automorphism_orbits(&c);
        let moves = enumerate_moves(&c, &p).unwrap();
        assert_eq!(moves.len(), 8);
        assert!(moves.windows(2).all(|w| w[0] < w[1]));
        let a = rank_of(&p, 0);
        let x = rank_of(&p, 2);
        for m in &moves {
            assert_eq!(m.sources().collect::<Vec<_>>(), {
                let mut s = vec![a, x];
                s.sort_unstable();
                s
            });
        }
    }

    #[test]
    fn small_move_counts() {
        let k2 = Graph::new(2, [(0, 1)]).unwrap();
        let c = conf(&k2, &[1, 1]);
        let moves = enumerate_moves(&c, &automorphism_orbits(&c)).unwrap();
        assert_eq!(moves.len(), 1);
        assert_eq!(moves[0].assignments(), &[(0, Some(0))]);

        let lone = Graph::new(2, []).unwrap();
        let c = conf(&lone, &[1, 0]);
        assert!(enumerate_moves(&c, &automorphism_orbits(&c))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn move_order() {
        let a = Move::new(vec![(0, None), (1, Some(0))]).unwrap();
        let b = Move::new(vec![(0, Some(1)), (1, Some(0))]).unwrap();
        assert_eq!(compare_moves(&a, &b).unwrap(), Ordering::Less);
        assert_eq!(compare_moves(&b, &b).unwrap(), Ordering::Equal);
        let c = Move::new(vec![(0, Some(1))]).unwrap();
        assert!(matches!(
            compare_moves(&a, &c),
            Err(Error::IncomparableMoves)
        ));
    }

    #[test]
    fn move_constructor_rejects_bad_input() {
        assert!(Move::new(vec![(0, None), (2, None)]).is_err());
        assert!(Move::new(vec![(2, Some(0)), (0, None)]).is_err());
        assert!(Move::new(vec![(1, Some(0)), (1, Some(0))]).is_err());
        assert!(Move::new(vec![]).is_err());
    }

    #[test]
    fn move_json_shape() {
        let m = Move::new(vec![(0, None), (1, Some(0))]).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[0,null],[1,0]]");
        let back: Move = serde_json::from_str("[[0,null],[1,0]]").unwrap();
        assert_eq!(back, m);
    }

    /// Both robots on distinct 3-side vertices, heading to the 2-side.
    fn two_side_move(g: &Graph) -> (Configuration, OrbitPartition, Move) {
        let c = conf(g, &[0, 0, 0, 1, 1]);
        let p = automorphism_orbits(&c);
        let m = Move::new(vec![(rank_of(&p, 3), Some(rank_of(&p, 0)))]).unwrap();
        (c, p, m)
    }

    #[test]
    fn fsync_two_outcomes() {
        let g = k23();
        let (c, p, m) = two_side_move(&g);
        let out = fsync_outcomes(&c, &p, &m).unwrap();
        let expected = BTreeSet::from([form(&g, &[2, 0, 0, 0, 0]), form(&g, &[1, 1, 0, 0, 0])]);
        assert_eq!(out.outcomes, expected);
    }

    #[test]
    fn ssync_adds_one_class() {
        let g = k23();
        let (c, p, m) = two_side_move(&g);
        let fsync = fsync_outcomes(&c, &p, &m).unwrap();
        let ssync = ssync_outcomes(&c, &p, &m).unwrap();
        assert!(fsync.is_subset(&ssync));
        assert_eq!(ssync.len(), fsync.len() + 1);
        assert!(ssync.contains(&form(&g, &[1, 0, 0, 0, 1])));
    }

    #[test]
    fn swap_in_mixed_config() {
        let g = k23();
        let c = conf(&g, &[1, 0, 1, 0, 0]);
        let p = automorphism_orbits(&c);
        let (a, x) = (rank_of(&p, 0), rank_of(&p, 2));
        let mut pairs = vec![(a, Some(x)), (x, Some(a))];
        pairs.sort_unstable();
        let out = fsync_outcomes(&c, &p, &Move::new(pairs).unwrap()).unwrap();
        assert_eq!(out.outcomes, BTreeSet::from([canonical_configuration(&c)]));
    }

    #[test]
    fn k2_swap() {
        let k2 = Graph::new(2, [(0, 1)]).unwrap();
        let c = conf(&k2, &[1, 1]);
        let p = automorphism_orbits(&c);
        let m = Move::new(vec![(0, Some(0))]).unwrap();
        let fsync = fsync_outcomes(&c, &p, &m).unwrap();
        assert_eq!(
            fsync.outcomes,
            BTreeSet::from([canonical_configuration(&c)])
        );
        let ssync = ssync_outcomes(&c, &p, &m).unwrap();
        assert_eq!(ssync.len(), 2);
        assert!(ssync.contains(&form(&k2, &[2, 0])));
    }

    #[test]
    fn multiplicity_splits() {
        // two robots on the middle of P3 may split or go together
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let c = conf(&p3, &[0, 2, 0]);
        let p = automorphism_orbits(&c);
        let mid = rank_of(&p, 1);
        let end = rank_of(&p, 0);
        let m = Move::new(vec![(mid, Some(end))]).unwrap();
        let raw = placements(&p3, c.lambda(), &p, &m, Scheduler::Fsync).unwrap();
        assert_eq!(
            raw,
            BTreeSet::from([vec![0, 0, 2], vec![1, 0, 1], vec![2, 0, 0]])
        );
        let raw = placements(&p3, c.lambda(), &p, &m, Scheduler::Ssync).unwrap();
        assert_eq!(raw.len(), 5);
        assert!(!raw.contains(&vec![0, 2, 0]));
    }

    #[test]
    fn validation() {
        let g = k23();
        let (c, p, _) = two_side_move(&g);
        let m = Move::new(vec![(rank_of(&p, 3), Some(rank_of(&p, 3)))]).unwrap();
        assert!(validate_move(&g, c.lambda(), &p, &m).is_err());
        let m = Move::new(vec![(rank_of(&p, 0), Some(rank_of(&p, 3)))]).unwrap();
        assert!(validate_move(&g, c.lambda(), &p, &m).is_err());
    }

    #[test]
    fn scheduler_names() {
        assert_eq!("ssync".parse::<Scheduler>().unwrap(), Scheduler::Ssync);
        assert_eq!(Scheduler::Fsync.to_string(), "fsync");
        assert!("async".parse::<Scheduler>().is_err());
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(2, 3).len(), 6);
        assert_eq!(multisets(0, 2), vec![vec![0, 0]]);
        assert_eq!(multisets(3, 1), vec![vec![3]]);
    }
}
