//! Twin-node detection, twin-aware partitioning support, and twin-unique
//! variants of the measures.
//!
//! Two nodes are open twins when their neighbor sets are identical (which
//! forces them non-adjacent) and closed twins when their neighbor sets plus
//! themselves are identical (which forces them adjacent). Twins are swapped
//! by an automorphism fixing every other node, so no structural measure can
//! tell them apart; when all remaining candidates for a node are twins of
//! each other, pinning any of them down reveals the same connections as a
//! unique identification would.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cascade::{CascadeBudget, CascadeResult};
use crate::equivalence::EquivalencePartition;
use crate::graph::{Graph, NodeId};

/// Maximal sets of mutually twin nodes. A node belongs to at most one set.
#[derive(Clone, Debug, PartialEq)]
pub struct TwinSets {
    node_count: usize,
    /// Sets of size >= 2 with identical open neighbor sets, pairwise
    /// non-adjacent members. Sorted, as are their members.
    pub open_sets: Vec<Vec<NodeId>>,
    /// Sets of size >= 2 with identical closed neighbor sets, pairwise
    /// adjacent members.
    pub closed_sets: Vec<Vec<NodeId>>,
    /// Fraction of nodes belonging to any twin set.
    pub twin_fraction: f64,
}

impl TwinSets {
    pub(crate) fn from_sets(
        node_count: usize,
        open_sets: Vec<Vec<NodeId>>,
        closed_sets: Vec<Vec<NodeId>>,
    ) -> TwinSets {
        let members: usize = open_sets.iter().chain(&closed_sets).map(Vec::len).sum();
        TwinSets {
            node_count,
            open_sets,
            closed_sets,
            twin_fraction: if node_count == 0 {
                0.0
            } else {
                members as f64 / node_count as f64
            },
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn twin_node_count(&self) -> usize {
        self.open_sets.iter().chain(&self.closed_sets).map(Vec::len).sum()
    }

    /// Per-node twin set membership for O(1) pairwise-twin checks.
    pub fn membership(&self) -> TwinMembership {
        let mut set_of = vec![u32::MAX; self.node_count];
        for (id, set) in self.open_sets.iter().chain(&self.closed_sets).enumerate() {
            for &v in set {
                debug_assert_eq!(set_of[v.index()], u32::MAX);
                set_of[v.index()] = id as u32;
            }
        }
        TwinMembership { set_of }
    }

    /// Histogram of set sizes (size -> number of sets), open and closed
    /// combined.
    pub fn size_histogram(&self) -> Vec<(usize, usize)> {
        let mut hist: HashMap<usize, usize> = HashMap::new();
        for set in self.open_sets.iter().chain(&self.closed_sets) {
            *hist.entry(set.len()).or_default() += 1;
        }
        let mut out: Vec<(usize, usize)> = hist.into_iter().collect();
        out.sort_unstable();
        out
    }

    pub fn summary(&self) -> TwinSummary {
        TwinSummary {
            twin_fraction: self.twin_fraction,
            open_set_count: self.open_sets.len(),
            closed_set_count: self.closed_sets.len(),
            twin_node_count: self.twin_node_count() as u64,
            size_histogram: self
                .size_histogram()
                .into_iter()
                .map(|(size, count)| SizeBucket { size, count })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwinSummary {
    pub twin_fraction: f64,
    pub open_set_count: usize,
    pub closed_set_count: usize,
    pub twin_node_count: u64,
    pub size_histogram: Vec<SizeBucket>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeBucket {
    pub size: usize,
    pub count: usize,
}

/// Twin set id per node (`None` for non-twins). Two nodes are pairwise
/// twins exactly when they share a set id.
pub struct TwinMembership {
    set_of: Vec<u32>,
}

impl TwinMembership {
    #[inline]
    pub fn set_of(&self, v: NodeId) -> Option<u32> {
        match self.set_of[v.index()] {
            u32::MAX => None,
            s => Some(s),
        }
    }

    pub fn are_twins(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.set_of[u.index()] != u32::MAX && self.set_of[u.index()] == self.set_of[v.index()]
    }
}

/// Finds all maximal open and closed twin sets by grouping nodes on their
/// (hashed) sorted neighbor lists; hash collisions are resolved by full key
/// comparison. Nodes are grouped in both maps independently and groups of
/// size >= 2 are kept.
pub fn find_twins(g: &Graph) -> TwinSets {
    let n = g.node_count();
    let chunk = 16 * 1024;
    let ranges: Vec<(u32, u32)> = (0..n as u32)
        .step_by(chunk)
        .map(|start| (start, ((start as usize + chunk).min(n)) as u32))
        .collect();

    type OpenMap<'g> = HashMap<&'g [NodeId], Vec<NodeId>>;
    type ClosedMap = HashMap<Vec<NodeId>, Vec<NodeId>>;

    let (open_map, closed_map): (OpenMap<'_>, ClosedMap) = ranges
        .par_iter()
        .map(|&(start, end)| {
            let mut open: OpenMap<'_> = HashMap::new();
            let mut closed: ClosedMap = HashMap::new();
            for v in start..end {
                let v = NodeId(v);
                let row = g.neighbors(v);
                open.entry(row).or_default().push(v);
                let mut key = Vec::with_capacity(row.len() + 1);
                key.extend_from_slice(row);
                let pos = key.partition_point(|&w| w < v);
                key.insert(pos, v);
                closed.entry(key).or_default().push(v);
            }
            (open, closed)
        })
        .reduce(
            || (HashMap::new(), HashMap::new()),
            |(mut open_a, mut closed_a), (open_b, closed_b)| {
                for (k, mut v) in open_b {
                    open_a.entry(k).or_default().append(&mut v);
                }
                for (k, mut v) in closed_b {
                    closed_a.entry(k).or_default().append(&mut v);
                }
                (open_a, closed_a)
            },
        );

    let collect = |groups: Vec<Vec<NodeId>>| -> Vec<Vec<NodeId>> {
        let mut sets: Vec<Vec<NodeId>> = groups
            .into_iter()
            .filter(|members| members.len() >= 2)
            .map(|mut members| {
                members.sort_unstable();
                members
            })
            .collect();
        sets.sort_unstable();
        sets
    };
    let open_sets = collect(open_map.into_values().collect());
    let closed_sets = collect(closed_map.into_values().collect());
    TwinSets::from_sets(n, open_sets, closed_sets)
}

/// Representative selection for twin-aware partitioning: the smallest node
/// of each twin set stands in for the whole set.
pub struct TwinReduction {
    /// All non-twin nodes plus one representative per set, ascending.
    pub representatives: Vec<NodeId>,
    rep_of: Vec<u32>,
}

impl TwinReduction {
    #[inline]
    pub fn representative_of(&self, v: NodeId) -> NodeId {
        NodeId(self.rep_of[v.index()])
    }

    /// Pairs (omitted node, its representative).
    pub fn expansion(&self) -> Vec<(NodeId, NodeId)> {
        self.rep_of
            .iter()
            .enumerate()
            .filter(|&(v, &r)| v as u32 != r)
            .map(|(v, &r)| (NodeId(v as u32), NodeId(r)))
            .collect()
    }
}

pub fn twin_reduce(g: &Graph, t: &TwinSets) -> TwinReduction {
    let n = g.node_count();
    debug_assert_eq!(n, t.node_count);
    let mut rep_of: Vec<u32> = (0..n as u32).collect();
    for set in t.open_sets.iter().chain(&t.closed_sets) {
        let rep = set[0];
        for &v in &set[1..] {
            rep_of[v.index()] = rep.0;
        }
    }
    let representatives: Vec<NodeId> = (0..n as u32)
        .filter(|&v| rep_of[v as usize] == v)
        .map(NodeId)
        .collect();
    TwinReduction {
        representatives,
        rep_of,
    }
}

/// Nodes that are unique or whose entire equivalence class is one set of
/// pairwise twins. Sorted ascending.
pub fn twin_unique_classes(p: &EquivalencePartition, t: &TwinSets) -> Vec<NodeId> {
    assert_eq!(p.node_count(), t.node_count);
    let membership = t.membership();
    let mut out = Vec::new();
    for class in p.classes() {
        if class.len() == 1 {
            out.push(class[0]);
            continue;
        }
        let first = membership.set_of(class[0]);
        if first.is_some() && class[1..].iter().all(|&v| membership.set_of(v) == first) {
            out.extend(class);
        }
    }
    out.sort_unstable();
    out
}

/// Fraction of twin-unique nodes under the given partition.
pub fn twin_unique_fraction(p: &EquivalencePartition, t: &TwinSets) -> f64 {
    twin_unique_classes(p, t).len() as f64 / p.node_count() as f64
}

/// Cascade variant that seeds from all twin-unique nodes of the d=1
/// partition and, whenever every candidate for a neighbor is pairwise twin,
/// marks the entire candidate set identified and keeps cascading from each
/// of them.
pub fn twin_cascade(
    g: &Graph,
    p1: &EquivalencePartition,
    t: &TwinSets,
    budget: CascadeBudget,
) -> CascadeResult {
    assert_eq!(p1.d(), 1, "twin cascade is seeded from the d=1 partition");
    assert_eq!(p1.node_count(), g.node_count());
    let n = g.node_count();
    let membership = t.membership();
    const UNSET: u32 = u32::MAX;
    let mut level_of: Vec<u32> = vec![UNSET; n];
    let mut frontier: Vec<u32> = twin_unique_classes(p1, t).iter().map(|v| v.0).collect();
    for &v in &frontier {
        level_of[v as usize] = 0;
    }
    let mut per_level_counts: Vec<u64> = vec![frontier.len() as u64];

    let mut level = 1u32;
    let mut scratch: Vec<(u32, u32)> = Vec::new();
    loop {
        if let CascadeBudget::Levels(max) = budget {
            if level > max {
                break;
            }
        }
        if frontier.is_empty() {
            break;
        }
        let mut newly: Vec<u32> = Vec::new();
        for &u in &frontier {
            let u = NodeId(u);
            scratch.clear();
            scratch.extend(g.neighbors(u).iter().map(|&v| (p1.class_of(v), v.0)));
            scratch.sort_unstable();
            let mut i = 0;
            while i < scratch.len() {
                let mut j = i + 1;
                while j < scratch.len() && scratch[j].0 == scratch[i].0 {
                    j += 1;
                }
                let candidates = &scratch[i..j];
                let qualifies = candidates.len() == 1 || {
                    let first = membership.set_of(NodeId(candidates[0].1));
                    first.is_some()
                        && candidates[1..]
                            .iter()
                            .all(|&(_, v)| membership.set_of(NodeId(v)) == first)
                };
                if qualifies {
                    for &(_, v) in candidates {
                        if level_of[v as usize] == UNSET {
                            level_of[v as usize] = level;
                            newly.push(v);
                        }
                    }
                }
                i = j;
            }
        }
        per_level_counts.push(newly.len() as u64);
        let done = newly.is_empty();
        frontier = newly;
        level += 1;
        if done {
            break;
        }
    }

    let levels: Vec<Option<u32>> = level_of
        .into_iter()
        .map(|l| if l == UNSET { None } else { Some(l) })
        .collect();
    CascadeResult::from_levels(levels, per_level_counts)
}

/// Twin-unique fractions next to the plain fractions they extend.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwinUniqueReport {
    pub entries: Vec<TwinUniqueEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwinUniqueEntry {
    /// Which measure the fractions belong to, e.g. "d=1" or "c1".
    pub measure: String,
    pub plain: f64,
    pub twin_unique: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::cascade;
    use crate::equivalence::partition;
    use crate::graph::load_edge_list_str;

    fn star_pendant() -> Graph {
        load_edge_list_str("h l1\nh l2\nh l3\nl3 p").unwrap().graph
    }

    #[test]
    fn star_leaves_are_open_twins() {
        let g = load_edge_list_str("h a\nh b\nh c").unwrap().graph;
        let t = find_twins(&g);
        assert_eq!(t.open_sets, vec![vec![NodeId(1), NodeId(2), NodeId(3)]]);
        assert!(t.closed_sets.is_empty());
        assert_eq!(t.twin_fraction, 0.75);
    }

    #[test]
    fn triangle_is_all_closed_twins() {
        let g = load_edge_list_str("x y\ny z\nz x").unwrap().graph;
        let t = find_twins(&g);
        assert!(t.open_sets.is_empty());
        assert_eq!(t.closed_sets, vec![vec![NodeId(0), NodeId(1), NodeId(2)]]);
        assert_eq!(t.twin_fraction, 1.0);
    }

    #[test]
    fn path_has_no_twins() {
        let g = load_edge_list_str("a b\nb c\nc d").unwrap().graph;
        let t = find_twins(&g);
        assert!(t.open_sets.is_empty());
        assert!(t.closed_sets.is_empty());
        assert_eq!(t.twin_fraction, 0.0);
    }

    #[test]
    fn open_and_closed_adjacency_dichotomy() {
        let g = load_edge_list_str("a b\nb c\nc a\nc d\na d\nb e\ne f\nb f").unwrap().graph;
        let t = find_twins(&g);
        for set in &t.open_sets {
            for (i, &u) in set.iter().enumerate() {
                for &v in &set[i + 1..] {
                    assert!(!g.contains_edge(u, v), "open twins must be non-adjacent");
                }
            }
        }
        for set in &t.closed_sets {
            for (i, &u) in set.iter().enumerate() {
                for &v in &set[i + 1..] {
                    assert!(g.contains_edge(u, v), "closed twins must be adjacent");
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let tri = load_edge_list_str("x y\ny z\nz x").unwrap().graph;
        let t = find_twins(&tri);
        let r = twin_reduce(&tri, &t);
        assert_eq!(r.representatives, vec![NodeId(0)]);
        assert_eq!(r.expansion().len(), 2);

        let star = load_edge_list_str("h l1\nh l2\nh l3").unwrap().graph;
        let t = find_twins(&star);
        let r = twin_reduce(&star, &t);
        assert_eq!(r.representatives, vec![NodeId(0), NodeId(1)]);
        assert_eq!(r.representative_of(NodeId(3)), NodeId(1));

        let path = load_edge_list_str("a b\nb c\nc d").unwrap().graph;
        let t = find_twins(&path);
        let r = twin_reduce(&path, &t);
        assert_eq!(r.representatives.len(), 4);
        assert!(r.expansion().is_empty());
    }

    #[test]
    fn twin_unique_examples() {
        let tri = load_edge_list_str("x y\ny z\nz x").unwrap().graph;
        let t = find_twins(&tri);
        let p = partition(&tri, 1);
        assert_eq!(twin_unique_classes(&p, &t).len(), 3);

        let cycle = load_edge_list_str("a b\nb c\nc d\nd e\ne a").unwrap().graph;
        let t = find_twins(&cycle);
        let p = partition(&cycle, 1);
        assert!(twin_unique_classes(&p, &t).is_empty());
    }

    #[test]
    fn twin_cascade_star_pendant_reaches_everyone() {
        let g = star_pendant();
        let t = find_twins(&g);
        let p1 = partition(&g, 1);
        let r = twin_cascade(&g, &p1, &t, CascadeBudget::Exhaust);
        // l1, l2 are open twins; from h their candidate set {l1, l2} is all
        // twins, so both become twin-unique at level 1.
        assert_eq!(r.uniqueness_final(), 1.0);
        assert_eq!(r.max_level_reached(), 1);
        assert_eq!(r.level_of(NodeId(1)), Some(1));
        assert_eq!(r.level_of(NodeId(2)), Some(1));
        assert_eq!(r.level_of(NodeId(4)), Some(1));
    }

    #[test]
    fn twin_cascade_on_twin_free_graph_equals_cascade() {
        let g = load_edge_list_str("a b\nb c\nc d\nd e\nb e\nc f").unwrap().graph;
        let t = find_twins(&g);
        assert_eq!(t.twin_fraction, 0.0);
        let p1 = partition(&g, 1);
        assert_eq!(
            twin_cascade(&g, &p1, &t, CascadeBudget::Exhaust),
            cascade(&g, &p1, CascadeBudget::Exhaust)
        );
    }

    #[test]
    fn twin_cascade_triangle_stops_at_seeds() {
        let g = load_edge_list_str("x y\ny z\nz x").unwrap().graph;
        let t = find_twins(&g);
        let p1 = partition(&g, 1);
        let r = twin_cascade(&g, &p1, &t, CascadeBudget::Exhaust);
        assert_eq!(r.per_level_counts()[0], 3);
        assert_eq!(r.max_level_reached(), 0);
        assert_eq!(r.uniqueness_final(), 1.0);
    }

    #[test]
    fn twin_unique_fraction_dominates_uniqueness() {
        let g = star_pendant();
        let t = find_twins(&g);
        for d in 1..=3 {
            let p = partition(&g, d);
            assert!(twin_unique_fraction(&p, &t) >= p.uniqueness());
        }
    }

    #[test]
    fn twins_share_equivalence_classes() {
        let g = load_edge_list_str("h l1\nh l2\nh l3\nl3 p\na h\na b\nb p").unwrap().graph;
        let t = find_twins(&g);
        for d in 1..=3 {
            let p = partition(&g, d);
            for set in t.open_sets.iter().chain(&t.closed_sets) {
                for &v in &set[1..] {
                    assert_eq!(p.class_of(set[0]), p.class_of(v));
                }
            }
        }
    }

    #[test]
    fn reduced_partition_equals_full() {
        let g = load_edge_list_str("h l1\nh l2\nh l3\nl3 p\nx y\ny h\nx h").unwrap().graph;
        let t = find_twins(&g);
        let cache = crate::canonical::CertificateCache::new();
        for d in 1..=3 {
            let full = partition(&g, d);
            let reduced = crate::equivalence::partition_with(
                &g,
                d,
                &cache,
                &crate::canonical::CertifyOptions::default(),
                Some(&t),
            );
            assert_eq!(full, reduced);
        }
    }
}
