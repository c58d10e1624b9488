//! Helpers shared by the integration test suites.

#![allow(dead_code)]

use kanon::graph::{Graph, NodeId};
use kanon::models::{generate, ModelFamily, ModelSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random simple graph with independent edge probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        for j in (i + 1)..n as u32 {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Rotates through ER/BA/WS with small sizes; every graph is preprocessed
/// the same way the loaders do (no isolated nodes).
pub fn random_model_graph(round: u64) -> Graph {
    let mut rng = StdRng::seed_from_u64(round.wrapping_mul(0x9e37_79b9));
    let family = match round % 3 {
        0 => ModelFamily::Er,
        1 => ModelFamily::Ba,
        _ => ModelFamily::Ws,
    };
    let n = rng.gen_range(6..=30usize);
    let degree_param = match family {
        ModelFamily::Er => rng.gen_range(1.0..5.0f64),
        ModelFamily::Ba => rng.gen_range(1..=3u32) as f64,
        ModelFamily::Ws => *[2.0, 4.0].get(rng.gen_range(0..2usize)).unwrap(),
    };
    let spec = ModelSpec {
        family,
        n,
        degree_param: degree_param.min((n - 2) as f64),
        rewiring_p: 0.5,
        seed: rng.gen(),
    };
    generate(&spec).expect("feasible spec")
}

/// The same graph under a random relabeling of its nodes.
pub fn permuted(g: &Graph, seed: u64) -> Graph {
    use rand::seq::SliceRandom;
    let mut rng = StdRng::seed_from_u64(seed);
    let n = g.node_count();
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let edges: Vec<(u32, u32)> = g
        .edges()
        .map(|(u, v)| (perm[u.index()], perm[v.index()]))
        .collect();
    Graph::from_edges(n, edges)
}

/// All connected labeled graphs on exactly `n` nodes (n <= 5 stays cheap).
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, edges);
        if is_connected(&g) {
            out.push(g);
        }
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![NodeId(0)];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in g.neighbors(v) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}
