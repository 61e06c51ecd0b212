//! Compact brute-force recheck of the graph algorithms on small random graphs.

use std::collections::BTreeSet;

use hammock_core::jump::{bridge_edges, triangles};
use hammock_core::metrics::{
    clustering_coefficient, connected_components, path_length, PathLengthMode,
};
use hammock_core::{
    cooccurrence_counts, induce_social_network, BipartiteRatingGraph, JumpSpec, RatingScale,
};
use hammock_core::{PersonId, Topology, UndirectedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: u64 = 1000;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn distances(n: usize, m: &[Vec<bool>]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for v in 0..n {
            if m[u][v] {
                d[u][v] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn components(n: usize, d: &[Vec<Option<u32>>]) -> usize {
    (0..n)
        .filter(|&u| (0..u).all(|v| d[u][v].is_none()))
        .count()
}

fn check_graph(seed: u64, problems: &mut Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=12);
    let p: f64 = rng.gen();
    let mut m = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                m[u][v] = true;
                m[v][u] = true;
                edges.push((u, v));
            }
        }
    }
    let g = UndirectedGraph::from_edges(n, edges.clone());
    let d = distances(n, &m);
    let base = components(n, &d);
    if connected_components(&g).component_count != base {
        problems.push(format!("components seed {seed}"));
    }

    let mut bridges = Vec::new();
    for &(u, v) in &edges {
        let mut cut = m.clone();
        cut[u][v] = false;
        cut[v][u] = false;
        if components(n, &distances(n, &cut)) > base {
            bridges.push((u, v));
        }
    }
    if bridge_edges(&g) != bridges {
        problems.push(format!("bridges seed {seed}"));
    }

    let mut tri = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if m[i][j] && m[j][k] && m[i][k] {
                    tri.push([i, j, k]);
                }
            }
        }
    }
    let mut got = triangles(&g);
    got.sort_unstable();
    if got != tri {
        problems.push(format!("triads seed {seed}"));
    }

    let pairs: Vec<u32> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .filter_map(|(u, v)| d[u][v])
        .collect();
    if g.edge_count() > 0 {
        let mean = pairs.iter().map(|&x| f64::from(x)).sum::<f64>() / pairs.len() as f64;
        let harmonic =
            (n * (n - 1)) as f64 / pairs.iter().map(|&x| 1.0 / f64::from(x)).sum::<f64>();
        if !close(
            path_length(&g, PathLengthMode::ConnectedPairs).unwrap(),
            mean,
        ) || !close(path_length(&g, PathLengthMode::Harmonic).unwrap(), harmonic)
        {
            problems.push(format!("L seed {seed}"));
        }
    }

    let mut local = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| m[v][u]).collect();
        if nb.len() >= 2 {
            let links = nb
                .iter()
                .flat_map(|&a| nb.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a < b && m[a][b])
                .count();
            local += links as f64 / (nb.len() * (nb.len() - 1) / 2) as f64;
        }
    }
    if !close(clustering_coefficient(&g), local / n as f64) {
        problems.push(format!("C seed {seed}"));
    }
}

fn ratings(rng: &mut ChaCha8Rng, max_people: u32, max_artifacts: u32) -> BipartiteRatingGraph {
    let people = rng.gen_range(1..=max_people);
    let artifacts = rng.gen_range(1..=max_artifacts);
    let density: f64 = rng.gen_range(0.05..0.9);
    let mut triples = Vec::new();
    for p in 1..=people {
        for a in 1..=artifacts {
            if rng.gen_bool(density) {
                triples.push((p, a, rng.gen_range(1..=5)));
            }
        }
    }
    BipartiteRatingGraph::from_ratings(RatingScale::default(), triples).unwrap()
}

fn edge_set(g: &BipartiteRatingGraph, jump: JumpSpec) -> BTreeSet<(PersonId, PersonId)> {
    induce_social_network(g, jump)
        .edges()
        .into_iter()
        .map(|(a, b, _)| (a, b))
        .collect()
}

fn check_cooccurrence(seed: u64, problems: &mut Vec<String>) {
    let g = ratings(&mut ChaCha8Rng::seed_from_u64(seed), 12, 10);
    let counts = cooccurrence_counts(&g);
    for &u in g.people() {
        for &v in g.people() {
            if u >= v {
                continue;
            }
            let c = g
                .artifacts()
                .iter()
                .filter(|&&a| g.rating(u, a).is_some() && g.rating(v, a).is_some())
                .count() as u32;
            if counts.get(u, v) != c || counts.get(v, u) != c {
                problems.push(format!("co-occurrence seed {seed}"));
                return;
            }
        }
    }
}

fn check_monotone(seed: u64, problems: &mut Vec<String>) {
    let g = ratings(&mut ChaCha8Rng::seed_from_u64(seed), 30, 25);
    let mut prev = edge_set(&g, JumpSpec::skip());
    for w in 2..=26 {
        let next = edge_set(&g, JumpSpec::hammock(w).unwrap());
        if !next.is_subset(&prev) {
            problems.push(format!("monotonicity seed {seed} w {w}"));
        }
        prev = next;
    }
}

/// Returns the number of seeded cases and a description of every mismatch.
pub fn run() -> (u64, Vec<String>) {
    let mut problems = Vec::new();
    for seed in 0..CASES {
        check_graph(seed, &mut problems);
        check_cooccurrence(50_000 + seed, &mut problems);
    }
    for seed in 0..100 {
        check_monotone(90_000 + seed, &mut problems);
    }
    (2 * CASES + 100, problems)
}
