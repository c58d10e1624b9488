//! Brute-force ground truth for differential testing: anchored isomorphism
//! by permutation search and naive reference implementations of every
//! measure. Nothing in this module touches the certificate machinery; it is
//! the independent authority the optimized pipelines are checked against.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use thiserror::Error;

use crate::cascade::{CascadeBudget, CascadeResult};
use crate::equivalence::EquivalencePartition;
use crate::graph::{Graph, NodeId};
use crate::neighborhood::{closed_neighborhood, NeighborhoodView};
use crate::twins::TwinSets;

/// Permutation enumeration is capped at this many view nodes.
pub const PERMUTATION_BOUND: usize = 10;

/// Reference measures are capped at this many graph nodes.
pub const REFERENCE_BOUND: usize = 30;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("view with {nodes} nodes exceeds the oracle bound of {bound}")]
    TooLarge { nodes: usize, bound: usize },
}

/// Decides focal-preserving isomorphism by enumerating every bijection that
/// maps focal to focal and checking it edge-exactly.
pub fn anchored_isomorphic(
    h1: &NeighborhoodView,
    h2: &NeighborhoodView,
) -> Result<bool, OracleError> {
    for view in [h1, h2] {
        if view.node_count() > PERMUTATION_BOUND {
            return Err(OracleError::TooLarge {
                nodes: view.node_count(),
                bound: PERMUTATION_BOUND,
            });
        }
    }
    Ok(anchored_isomorphic_by_permutations(
        &h1.local,
        h1.focal.index(),
        &h2.local,
        h2.focal.index(),
    ))
}

fn anchored_isomorphic_by_permutations(a: &Graph, fa: usize, b: &Graph, fb: usize) -> bool {
    let n = a.node_count();
    if n != b.node_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    if n == 1 {
        return true;
    }
    let rest_a: Vec<u32> = (0..n as u32).filter(|&v| v as usize != fa).collect();
    let rest_b: Vec<u32> = (0..n as u32).filter(|&v| v as usize != fb).collect();
    for image in rest_b.iter().copied().permutations(rest_b.len()) {
        let mut map = vec![0u32; n];
        map[fa] = fb as u32;
        for (src, dst) in rest_a.iter().zip(&image) {
            map[*src as usize] = *dst;
        }
        if is_edge_exact(a, b, &map) {
            return true;
        }
    }
    false
}

fn is_edge_exact(a: &Graph, b: &Graph, map: &[u32]) -> bool {
    for u in a.nodes() {
        for v in a.nodes() {
            if u < v {
                let mapped = b.contains_edge(NodeId(map[u.index()]), NodeId(map[v.index()]));
                if a.contains_edge(u, v) != mapped {
                    return false;
                }
            }
        }
    }
    true
}

/// The same exhaustive search expressed as backtracking: partial bijections
/// that already violate adjacency are abandoned early, which makes graphs up
/// to [`REFERENCE_BOUND`] nodes tractable without changing the semantics.
fn anchored_isomorphic_backtracking(a: &Graph, fa: usize, b: &Graph, fb: usize) -> bool {
    let n = a.node_count();
    if n != b.node_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    if a.degree(NodeId(fa as u32)) != b.degree(NodeId(fb as u32)) {
        return false;
    }
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    map[fa] = fb as u32;
    used[fb] = true;
    let order: Vec<u32> = (0..n as u32).filter(|&v| v as usize != fa).collect();
    extend(a, b, &order, 0, &mut map, &mut used)
}

fn extend(
    a: &Graph,
    b: &Graph,
    order: &[u32],
    pos: usize,
    map: &mut [u32],
    used: &mut [bool],
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos] as usize;
    'candidate: for w in 0..b.node_count() {
        if used[w] || a.degree(NodeId(v as u32)) != b.degree(NodeId(w as u32)) {
            continue;
        }
        // consistency with everything already mapped
        for u in a.nodes() {
            let mu = map[u.index()];
            if mu == u32::MAX || u.index() == v {
                continue;
            }
            if a.contains_edge(u, NodeId(v as u32)) != b.contains_edge(NodeId(mu), NodeId(w as u32))
            {
                continue 'candidate;
            }
        }
        map[v] = w as u32;
        used[w] = true;
        if extend(a, b, order, pos + 1, map, used) {
            return true;
        }
        map[v] = u32::MAX;
        used[w] = false;
    }
    false
}

/// Every measure computed the most direct way: pairwise isomorphism for the
/// partitions, a literal transcription of the cascading procedure, and
/// quadratic twin grouping. No caching, no prefilter, no reduction.
pub struct ReferenceMeasures {
    /// Partitions for d = 1, 2, 3 (in that order).
    pub partitions: Vec<EquivalencePartition>,
    /// Exhaustive-budget cascade seeded from the d=1 partition.
    pub cascade: CascadeResult,
    pub twins: TwinSets,
}

pub fn reference_measures(g: &Graph) -> Result<ReferenceMeasures, OracleError> {
    let n = g.node_count();
    if n > REFERENCE_BOUND {
        return Err(OracleError::TooLarge {
            nodes: n,
            bound: REFERENCE_BOUND,
        });
    }
    let partitions: Vec<EquivalencePartition> =
        (1..=3).map(|d| reference_partition(g, d)).collect();
    let cascade = reference_cascade(g, &partitions[0], CascadeBudget::Exhaust);
    let twins = reference_twins(g);
    Ok(ReferenceMeasures {
        partitions,
        cascade,
        twins,
    })
}

/// Pairwise-isomorphism partition: compare every node pair directly.
pub fn reference_partition(g: &Graph, d: u32) -> EquivalencePartition {
    let n = g.node_count();
    let views: Vec<NeighborhoodView> = g.nodes().map(|v| closed_neighborhood(g, v, d)).collect();
    let mut class_of: Vec<u32> = vec![u32::MAX; n];
    let mut next_class = 0u32;
    for v in 0..n {
        if class_of[v] != u32::MAX {
            continue;
        }
        class_of[v] = next_class;
        for w in (v + 1)..n {
            if class_of[w] != u32::MAX {
                continue;
            }
            if anchored_isomorphic_backtracking(
                &views[v].local,
                0,
                &views[w].local,
                0,
            ) {
                class_of[w] = next_class;
            }
        }
        next_class += 1;
    }
    EquivalencePartition::from_class_ids(d, &class_of)
}

/// Literal transcription of the cascading procedure: set-valued state,
/// explicit inner search for an equivalent co-neighbor.
pub fn reference_cascade(
    g: &Graph,
    p1: &EquivalencePartition,
    budget: CascadeBudget,
) -> CascadeResult {
    assert_eq!(p1.d(), 1);
    let n = g.node_count();
    let mut level_of: Vec<Option<u32>> = vec![None; n];
    let mut identified: HashSet<u32> = HashSet::new();
    let mut current: HashSet<u32> = HashSet::new();
    for v in g.nodes() {
        if p1.class_size_of(v) == 1 {
            identified.insert(v.0);
            current.insert(v.0);
            level_of[v.index()] = Some(0);
        }
    }
    let mut per_level_counts: Vec<u64> = vec![identified.len() as u64];
    let mut level = 1u32;
    loop {
        match budget {
            CascadeBudget::Levels(max) if level > max => break,
            _ => {}
        }
        if current.is_empty() {
            break;
        }
        let mut newly: HashSet<u32> = HashSet::new();
        for &u in &current {
            let u = NodeId(u);
            for &v in g.neighbors(u) {
                let mut has_equivalent_other = false;
                for &v2 in g.neighbors(u) {
                    if v2 != v && p1.class_of(v2) == p1.class_of(v) {
                        has_equivalent_other = true;
                        break;
                    }
                }
                if !has_equivalent_other {
                    newly.insert(v.0);
                }
            }
        }
        let fresh: Vec<u32> = newly
            .iter()
            .copied()
            .filter(|v| !identified.contains(v))
            .collect();
        for &v in &fresh {
            identified.insert(v);
            level_of[v as usize] = Some(level);
        }
        per_level_counts.push(fresh.len() as u64);
        current = fresh.into_iter().collect();
        level += 1;
    }
    CascadeResult::from_levels(level_of, per_level_counts)
}

/// Quadratic twin detection: group by literal neighbor-set equality.
pub fn reference_twins(g: &Graph) -> TwinSets {
    let n = g.node_count();
    let open_of = |v: u32| -> Vec<NodeId> { g.neighbors(NodeId(v)).to_vec() };
    let closed_of = |v: u32| -> Vec<NodeId> {
        let mut s = g.neighbors(NodeId(v)).to_vec();
        s.push(NodeId(v));
        s.sort();
        s
    };
    let mut open_groups: HashMap<Vec<NodeId>, Vec<NodeId>> = HashMap::new();
    let mut closed_groups: HashMap<Vec<NodeId>, Vec<NodeId>> = HashMap::new();
    for v in 0..n as u32 {
        open_groups.entry(open_of(v)).or_default().push(NodeId(v));
        closed_groups
            .entry(closed_of(v))
            .or_default()
            .push(NodeId(v));
    }
    let collect = |groups: HashMap<Vec<NodeId>, Vec<NodeId>>| -> Vec<Vec<NodeId>> {
        let mut sets: Vec<Vec<NodeId>> = groups
            .into_values()
            .filter(|members| members.len() >= 2)
            .collect();
        for set in &mut sets {
            set.sort();
        }
        sets.sort();
        sets
    };
    let open_sets = collect(open_groups);
    let closed_sets = collect(closed_groups);
    TwinSets::from_sets(n, open_sets, closed_sets)
}
