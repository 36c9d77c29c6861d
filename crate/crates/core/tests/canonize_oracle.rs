mod common;

use std::collections::HashMap;

use common::*;
use oblot_core::canonize::{
    automorphism_orbits, canonical_configuration, canonical_form, canonize, is_isomorphic,
};
use oblot_core::{CanonicalForm, Configuration, Graph, VertexColoring};
use oblot_oracle as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Key = (Vec<u32>, Vec<bool>);

fn key(g: &Graph, colors: &[u32]) -> Key {
    oracle::canonical_key(g.vertex_count(), g.edges(), colors)
}

/// Equality of canonical forms must be exactly equality of brute-force keys.
fn assert_same_partition(items: &[(CanonicalForm, Key)]) {
    let mut by_form: HashMap<&CanonicalForm, &Key> = HashMap::new();
    let mut by_key: HashMap<&Key, &CanonicalForm> = HashMap::new();
    for (form, k) in items {
        assert_eq!(
            *by_form.entry(form).or_insert(k),
            k,
            "one form, two classes"
        );
        assert_eq!(
            *by_key.entry(k).or_insert(form),
            form,
            "one class, two forms"
        );
    }
}

#[test]
fn random_graphs_up_to_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut items = Vec::new();
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let g = random_graph(&mut rng, n, 0.5);
        let colors = if rng.gen_bool(0.5) {
            vec![0; n]
        } else {
            {
                let k = rng.gen_range(1..=3);
                random_lambda(&mut rng, n, k)
            }
        };
        // a relabelled copy lands in the same class
        let perm = random_perm(&mut rng, n);
        let h = g.relabel(&perm);
        let hc = permute(&colors, &perm);
        items.push((canonize(&g, &colors).form, key(&g, &colors)));
        items.push((canonize(&h, &hc).form, key(&h, &hc)));
    }
    assert_same_partition(&items);
}

#[test]
fn every_graph_up_to_four() {
    for n in 1..=4 {
        let items: Vec<_> = all_graphs(n)
            .iter()
            .map(|g| {
                (
                    canonical_form(g, &VertexColoring::uniform(n)),
                    key(g, &vec![0; n]),
                )
            })
            .collect();
        assert_same_partition(&items);
    }
}

fn placements_on(graphs: &[Graph]) -> Vec<Configuration> {
    let mut out = Vec::new();
    for g in graphs {
        let n = g.vertex_count();
        for k in 1..=3 {
            for l in oracle::weak_compositions(n, k) {
                out.push(Configuration::new(g.clone(), l).unwrap());
            }
        }
    }
    out
}

#[test]
fn every_configuration_up_to_five() {
    for n in 1..=5 {
        let graphs = if n <= 4 { all_graphs(n) } else { connected(n) };
        for k in 1..=3u32 {
            let items: Vec<_> = placements_on(&graphs)
                .into_iter()
                .filter(|c| c.total_robots() == k)
                .map(|c| (canonical_configuration(&c), key(c.graph(), c.lambda())))
                .collect();
            assert_same_partition(&items);
        }
    }
}

#[test]
fn pendant_encoding_is_the_same_equivalence() {
    for n in 1..=5 {
        for g in connected(n) {
            for k in 1..=3 {
                let configs: Vec<Configuration> = oracle::weak_compositions(n, k)
                    .into_iter()
                    .map(|l| Configuration::new(g.clone(), l).unwrap())
                    .collect();
                let forms: Vec<CanonicalForm> =
                    configs.iter().map(canonical_configuration).collect();
                let pendants: Vec<CanonicalForm> = configs
                    .iter()
                    .map(|c| {
                        let gamma = c.configuration_graph();
                        canonical_form(&gamma, &VertexColoring::uniform(gamma.vertex_count()))
                    })
                    .collect();
                for i in 0..configs.len() {
                    for j in i..configs.len() {
                        assert_eq!(
                            forms[i] == forms[j],
                            pendants[i] == pendants[j],
                            "{:?} vs {:?} on {:?}",
                            configs[i].lambda(),
                            configs[j].lambda(),
                            g.edges()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn orbits_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=5 {
        let graphs = if n <= 4 { all_graphs(n) } else { connected(n) };
        for g in graphs {
            let k = rng.gen_range(0..=3);
            let l = random_lambda(&mut rng, n, k);
            let mut ours = canonize(&g, &l).orbits.orbits().to_vec();
            ours.sort();
            assert_eq!(
                ours,
                oracle::orbits(n, g.edges(), &l),
                "{:?} {:?}",
                g.edges(),
                l
            );
        }
    }
}

#[test]
fn generators_are_automorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n, 0.4);
        let l = random_lambda(&mut rng, n, 2);
        let adj = oracle::adjacency(n, g.edges());
        for gen in canonize(&g, &l).generators {
            assert!(oracle::is_automorphism(&adj, &l, &gen));
        }
    }
}

#[test]
fn labeling_rebuilds_the_canonical_graph() {
    // relabelling by the canonical labeling is a fixed point of canonization
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, n, 0.4);
        let k = rng.gen_range(0..=3);
        let l = random_lambda(&mut rng, n, k);
        let c = canonize(&g, &l);
        let h = g.relabel(c.form.labeling());
        let hl = permute(&l, c.form.labeling());
        let d = canonize(&h, &hl);
        assert_eq!(d.form, c.form);
        assert_eq!(d.form.labeling(), (0..n).collect::<Vec<_>>().as_slice());
    }
}

/// Larger regular graphs with rich automorphism groups, where pruning matters.
fn named() -> Vec<(&'static str, Graph)> {
    let petersen = graph(
        10,
        &[
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 0),
            (0, 5),
            (1, 6),
            (2, 7),
            (3, 8),
            (4, 9),
            (5, 7),
            (7, 9),
            (9, 6),
            (6, 8),
            (8, 5),
        ],
    );
    let cube = graph(
        8,
        &(0..8usize)
            .flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))))
            .filter(|(u, v)| u < v)
            .collect::<Vec<_>>(),
    );
    let k33 = graph(
        6,
        &[
            (0, 3),
            (0, 4),
            (0, 5),
            (1, 3),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ],
    );
    let prism = graph(
        6,
        &[
            (0, 1),
            (1, 2),
            (2, 0),
            (3, 4),
            (4, 5),
            (5, 3),
            (0, 3),
            (1, 4),
            (2, 5),
        ],
    );
    let two_triangles = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
    vec![
        ("petersen", petersen),
        ("cube", cube),
        ("k33", k33),
        ("prism", prism),
        ("c6", cycle(6)),
        ("two triangles", two_triangles),
        ("c8", cycle(8)),
    ]
}

#[test]
fn symmetric_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let graphs = named();
    for (name, g) in &graphs {
        let n = g.vertex_count();
        let base = canonize(g, &vec![0; n]);
        assert_eq!(base.orbits.len(), 1, "{name} is vertex transitive");
        for _ in 0..20 {
            let perm = random_perm(&mut rng, n);
            assert_eq!(
                canonize(&g.relabel(&perm), &vec![0; n]).form,
                base.form,
                "{name}"
            );
        }
    }
    let forms: Vec<_> = graphs
        .iter()
        .map(|(_, g)| canonize(g, &vec![0; g.vertex_count()]).form)
        .collect();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            assert_ne!(forms[i], forms[j], "{} vs {}", graphs[i].0, graphs[j].0);
        }
    }
}

#[test]
fn petersen_orbits_with_robots() {
    let (_, g) = named().remove(0);
    // a robot on an outer vertex: its 3 neighbours, 6 at distance two
    let mut l = vec![0; 10];
    l[0] = 1;
    let p = canonize(&g, &l).orbits;
    let mut sizes: Vec<usize> = p.orbits().iter().map(Vec::len).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![1, 3, 6]);
}

#[test]
fn isomorphism_helper() {
    let g = k23();
    let a = Configuration::new(g.clone(), vec![0, 0, 1, 1, 0]).unwrap();
    let b = Configuration::new(g.clone(), vec![0, 0, 0, 1, 1]).unwrap();
    let c = Configuration::new(g, vec![1, 1, 0, 0, 0]).unwrap();
    assert!(is_isomorphic(&a, &b));
    assert!(!is_isomorphic(&a, &c));
    assert_eq!(automorphism_orbits(&a).len(), 3);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn instance() -> impl Strategy<Value = (usize, Vec<bool>, Vec<u32>, Vec<usize>)> {
        (1usize..=7).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
                proptest::collection::vec(0u32..3, n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    }

    proptest! {
        #[test]
        fn relabelling_preserves_form((n, bits, colors, perm) in instance()) {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let edges: Vec<_> = pairs.into_iter().zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
            let g = graph(n, &edges);
            let a = canonize(&g, &colors);
            let b = canonize(&g.relabel(&perm), &permute(&colors, &perm));
            prop_assert_eq!(&a.form, &b.form);
            // orbit sizes and ranks carry over too
            let sizes = |p: &oblot_core::OrbitPartition| {
                (0..p.len()).map(|i| (p.rank(i), p.vertices(i).len())).collect::<Vec<_>>()
            };
            prop_assert_eq!(sizes(&a.orbits), sizes(&b.orbits));
        }
    }
}
