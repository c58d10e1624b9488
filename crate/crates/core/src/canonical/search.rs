//! Individualization-refinement search for the canonical certificate of an
//! anchored graph.
//!
//! The search descends an ordered-partition tree: at each node the smallest
//! non-singleton cell is chosen, each of its vertices is individualized in
//! turn, and the partition is refined again. Leaves are discrete partitions,
//! read off as labelings. The certificate is the serialization of the leaf
//! minimizing (refinement trace, serialized adjacency), compared
//! lexicographically; both components are label-independent, so isomorphic
//! anchored graphs produce identical bytes.
//!
//! Four prunings keep the tree small without affecting the minimum:
//! - trace pruning: a node whose refinement trace exceeds the best leaf's
//!   trace at the same depth cannot contain the minimum;
//! - twin pruning: vertices of a cell with identical neighbor sets are
//!   automorphic via a swap fixing everything else, so one representative
//!   per twin group is branched on;
//! - component-swap pruning: after removing the focal node the view often
//!   falls apart into many small components (ego networks of hubs are the
//!   extreme case); two candidates whose components are isomorphic by a map
//!   that matches the candidates and preserves focal adjacency are related
//!   by an automorphism swapping the components and fixing everything else.
//!   This is only used while no individualized vertex lies in either
//!   component, which the search tracks along its path;
//! - equivalent-leaf backjump: a leaf serializing identically to the
//!   incumbent best exposes an automorphism between the two search paths,
//!   so everything below their deepest common ancestor is equivalent to
//!   already-explored ground and the search unwinds straight to it.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::refine::{anchored_colors, cell_sizes, individualize, refine_to_stable, twin_classes};
use crate::graph::{Graph, NodeId};

/// Row-major adjacency bitmap for O(1) edge tests during serialization.
pub(crate) struct BitMatrix {
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(g: &Graph) -> BitMatrix {
        let n = g.node_count();
        let words_per_row = n.div_ceil(64);
        let mut bits = vec![0u64; words_per_row * n];
        for v in g.nodes() {
            for &w in g.neighbors(v) {
                let idx = v.index() * words_per_row + w.index() / 64;
                bits[idx] |= 1 << (w.index() % 64);
            }
        }
        BitMatrix {
            words_per_row,
            bits,
        }
    }

    #[inline]
    pub(crate) fn get(&self, u: u32, v: u32) -> bool {
        let idx = u as usize * self.words_per_row + v as usize / 64;
        self.bits[idx] >> (v as usize % 64) & 1 == 1
    }
}

const NONE: u32 = u32::MAX;

/// Only components this small are certified for swap pruning, and only
/// when they are small relative to the view (otherwise the recursive
/// certification would cost as much as the search it serves).
const MODULE_NODE_LIMIT: usize = 64;

/// Candidate-collapsing data computed once per view.
struct BranchPruning {
    twin: Vec<u32>,
    /// Component of `view - focal` containing each vertex (NONE for focal).
    component: Vec<u32>,
    /// Swap class: vertices with equal ids sit at corresponding positions
    /// of isomorphic small components (NONE when not classified).
    module: Vec<u32>,
}

fn branch_pruning(g: &Graph, focal: usize) -> BranchPruning {
    let n = g.node_count();
    let twin = twin_classes(g);
    let mut component = vec![NONE; n];
    let mut comps: Vec<Vec<NodeId>> = Vec::new();
    let mut queue: Vec<u32> = Vec::new();
    for start in 0..n {
        if start == focal || component[start] != NONE {
            continue;
        }
        let id = comps.len() as u32;
        component[start] = id;
        queue.clear();
        queue.push(start as u32);
        let mut members = vec![NodeId(start as u32)];
        while let Some(v) = queue.pop() {
            for &w in g.neighbors(NodeId(v)) {
                if w.index() != focal && component[w.index()] == NONE {
                    component[w.index()] = id;
                    members.push(w);
                    queue.push(w.0);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }

    let mut size_count: HashMap<usize, usize> = HashMap::new();
    for c in &comps {
        *size_count.entry(c.len()).or_default() += 1;
    }
    let mut module = vec![NONE; n];
    let mut intern: HashMap<Vec<u8>, u32> = HashMap::new();
    let focal_id = NodeId(focal as u32);
    for comp in &comps {
        let len = comp.len();
        // A swap needs a partner component of the same size; singleton
        // components are already collapsed by twin pruning.
        if !(2..=MODULE_NODE_LIMIT).contains(&len) || 4 * len > n || size_count[&len] < 2 {
            continue;
        }
        let (sub, to_parent) = g.induced_subgraph(comp);
        for candidate in 0..len {
            // candidate / focal-adjacent / other, compacted to dense colors
            let mut color: Vec<u32> = to_parent
                .iter()
                .map(|&v| if g.contains_edge(focal_id, v) { 1 } else { 2 })
                .collect();
            color[candidate] = 0;
            let count = compact_colors(&mut color);
            let count = refine_to_stable(&sub, &mut color, count);
            let bytes = canonical_bytes_refined(&sub, candidate, &color, count);
            let next = intern.len() as u32;
            let id = *intern.entry(bytes).or_insert(next);
            module[to_parent[candidate].index()] = id;
        }
    }
    BranchPruning {
        twin,
        component,
        module,
    }
}

fn compact_colors(color: &mut [u32]) -> u32 {
    let mut used: Vec<u32> = color.to_vec();
    used.sort_unstable();
    used.dedup();
    for c in color.iter_mut() {
        *c = used.binary_search(c).expect("color present") as u32;
    }
    used.len() as u32
}

struct Best {
    traces: Vec<Vec<u32>>,
    bytes: Vec<u8>,
    /// Individualized vertices along the best leaf's path.
    path: Vec<u32>,
}

struct Search<'g> {
    g: &'g Graph,
    n: usize,
    focal: usize,
    adj: BitMatrix,
    pruning: BranchPruning,
    path_traces: Vec<Vec<u32>>,
    current_path: Vec<u32>,
    /// Components of the individualized vertices; swap pruning is disabled
    /// for components on this stack.
    path_components: Vec<u32>,
    best: Option<Best>,
}

impl<'g> Search<'g> {
    /// Returns the depth of the node the search should unwind to after an
    /// equivalent leaf, or `None` to continue normally.
    fn descend(&mut self, color: &[u32], count: u32, depth: usize) -> Option<usize> {
        let trace = cell_sizes(color, count);
        if let Some(best) = &self.best {
            debug_assert!(depth < best.traces.len());
            match trace.cmp(&best.traces[depth]) {
                Ordering::Greater => return None,
                Ordering::Less => self.best = None,
                Ordering::Equal => {}
            }
        }
        self.path_traces.push(trace);

        if count as usize == self.n {
            let bytes = self.serialize(color);
            let result = match &mut self.best {
                None => {
                    self.best = Some(Best {
                        traces: self.path_traces.clone(),
                        bytes,
                        path: self.current_path.clone(),
                    });
                    None
                }
                Some(best) => match bytes.cmp(&best.bytes) {
                    Ordering::Less => {
                        best.traces = self.path_traces.clone();
                        best.bytes = bytes;
                        best.path = self.current_path.clone();
                        None
                    }
                    Ordering::Equal => {
                        // This leaf and the best leaf are related by an
                        // automorphism; the subtrees between here and the
                        // deepest common ancestor of the two paths only
                        // repeat explored ground.
                        let common = self
                            .current_path
                            .iter()
                            .zip(&best.path)
                            .take_while(|(a, b)| a == b)
                            .count();
                        Some(common)
                    }
                    Ordering::Greater => None,
                },
            };
            self.path_traces.pop();
            return result;
        }

        let target = {
            let sizes = self.path_traces.last().expect("pushed above");
            let (color_id, _) = sizes
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > 1)
                .min_by_key(|&(c, &s)| (s, c))
                .expect("non-discrete partition has a non-singleton cell");
            color_id as u32
        };

        let mut seen_twins: Vec<u32> = Vec::new();
        let mut seen_modules: Vec<u32> = Vec::new();
        for v in 0..self.n {
            if color[v] != target {
                continue;
            }
            let twin = self.pruning.twin[v];
            if seen_twins.contains(&twin) {
                continue;
            }
            let module = self.pruning.module[v];
            let swappable = module != NONE
                && !self.path_components.contains(&self.pruning.component[v]);
            if swappable && seen_modules.contains(&module) {
                // a branched candidate sits at the matching position of an
                // isomorphic untouched component
                seen_twins.push(twin);
                continue;
            }
            seen_twins.push(twin);
            if swappable {
                seen_modules.push(module);
            }
            let mut child = color.to_vec();
            let count = individualize(&mut child, v, count);
            let count = refine_to_stable(self.g, &mut child, count);
            self.current_path.push(v as u32);
            let comp = self.pruning.component[v];
            self.path_components.push(comp);
            let jump = self.descend(&child, count, depth + 1);
            self.path_components.pop();
            self.current_path.pop();
            if let Some(target_depth) = jump {
                if target_depth < depth {
                    self.path_traces.pop();
                    return Some(target_depth);
                }
                // target_depth == depth: resume with the next candidate here
            }
        }
        self.path_traces.pop();
        None
    }

    /// (node count, focal position, bit-packed upper triangle), all counts
    /// little-endian.
    fn serialize(&self, color: &[u32]) -> Vec<u8> {
        let n = self.n;
        let mut vertex_at = vec![0u32; n];
        for (v, &c) in color.iter().enumerate() {
            vertex_at[c as usize] = v as u32;
        }
        let bit_count = n * (n - 1) / 2;
        let mut bytes = vec![0u8; 8 + bit_count.div_ceil(8)];
        bytes[0..4].copy_from_slice(&(n as u32).to_le_bytes());
        bytes[4..8].copy_from_slice(&color[self.focal].to_le_bytes());
        let mut k = 0usize;
        for i in 0..n {
            let vi = vertex_at[i];
            for &vj in &vertex_at[i + 1..n] {
                if self.adj.get(vi, vj) {
                    bytes[8 + k / 8] |= 1 << (k % 8);
                }
                k += 1;
            }
        }
        bytes
    }
}

/// Canonical certificate bytes for `g` anchored at `focal`, starting from an
/// already-stable anchored coloring.
pub(crate) fn canonical_bytes_refined(
    g: &Graph,
    focal: usize,
    color: &[u32],
    count: u32,
) -> Vec<u8> {
    let mut search = Search {
        g,
        n: g.node_count(),
        focal,
        adj: BitMatrix::new(g),
        pruning: branch_pruning(g, focal),
        path_traces: Vec::new(),
        current_path: Vec::new(),
        path_components: Vec::new(),
        best: None,
    };
    let jump = search.descend(color, count, 0);
    debug_assert!(jump.is_none(), "root has no ancestor to unwind to");
    search.best.expect("search always reaches a leaf").bytes
}

/// Canonical certificate bytes for `g` anchored at `focal`.
pub(crate) fn canonical_bytes(g: &Graph, focal: usize) -> Vec<u8> {
    let (mut color, count) = anchored_colors(g.node_count(), focal);
    let count = refine_to_stable(g, &mut color, count);
    canonical_bytes_refined(g, focal, &color, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list_str;

    #[test]
    fn path_anchoring() {
        let g = load_edge_list_str("a b\nb c").unwrap().graph;
        let end1 = canonical_bytes(&g, 0);
        let end2 = canonical_bytes(&g, 2);
        let center = canonical_bytes(&g, 1);
        assert_eq!(end1, end2);
        assert_ne!(end1, center);
    }

    #[test]
    fn relabeling_does_not_change_bytes() {
        let g1 = load_edge_list_str("a b\nb c\nc d\nd a\na c").unwrap().graph;
        // Same graph with vertices listed in a different order.
        let g2 = load_edge_list_str("d c\nc a\nb a\nd a\nc b").unwrap().graph;
        assert_eq!(g1.edge_count(), g2.edge_count());
        let mut b1: Vec<Vec<u8>> = g1.nodes().map(|v| canonical_bytes(&g1, v.index())).collect();
        let mut b2: Vec<Vec<u8>> = g2.nodes().map(|v| canonical_bytes(&g2, v.index())).collect();
        b1.sort();
        b2.sort();
        assert_eq!(b1, b2);
    }

    #[test]
    fn star_collapses_via_twins() {
        // All leaves are open twins; the search must stay linear.
        let mut lines = String::new();
        for i in 0..200 {
            lines.push_str(&format!("h l{i}\n"));
        }
        let g = load_edge_list_str(&lines).unwrap().graph;
        let hub = canonical_bytes(&g, 0);
        assert_eq!(hub.len(), 8 + (200usize * 201 / 2).div_ceil(8));
        let leaf1 = canonical_bytes(&g, 1);
        let leaf2 = canonical_bytes(&g, 7);
        assert_eq!(leaf1, leaf2);
        assert_ne!(hub, leaf1);
    }

    #[test]
    fn singleton_view() {
        let g = Graph::from_edges(1, Vec::<(u32, u32)>::new());
        let bytes = canonical_bytes(&g, 0);
        assert_eq!(bytes, vec![1, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn hub_with_many_isomorphic_components_stays_tractable() {
        // 40 path components x-y-z hanging off one hub, plus 25 pairs.
        // Component-swap pruning must collapse the per-component branch
        // classes that twin pruning cannot.
        let mut edges = Vec::new();
        let mut next = 1u32;
        for _ in 0..40 {
            let (x, y, z) = (next, next + 1, next + 2);
            next += 3;
            edges.extend([(0, x), (0, y), (0, z), (x, y), (y, z)]);
        }
        for _ in 0..25 {
            let (a, b) = (next, next + 1);
            next += 2;
            edges.extend([(0, a), (0, b), (a, b)]);
        }
        let g = Graph::from_edges(next as usize, edges);
        let started = std::time::Instant::now();
        let hub = canonical_bytes(&g, 0);
        // anchored certificates agree across corresponding positions
        assert_eq!(canonical_bytes(&g, 2), canonical_bytes(&g, 5)); // y of two chains
        assert_eq!(canonical_bytes(&g, 1), canonical_bytes(&g, 6)); // x of two chains
        assert_ne!(hub, canonical_bytes(&g, 1));
        assert!(
            started.elapsed() < std::time::Duration::from_secs(10),
            "search blew up: {:?}",
            started.elapsed()
        );
    }

    #[test]
    fn disjoint_triangle_pairs_stay_tractable() {
        // Hub plus p triangles sharing only the hub. The pair members are
        // closed twins within their pair but across pairs they form one
        // refinement cell with p distinct twin classes, which twin pruning
        // alone cannot collapse; only the equivalent-leaf backjump keeps
        // this out of factorial territory.
        let p = 40u32;
        let mut edges = Vec::new();
        for i in 0..p {
            let (a, b) = (1 + 2 * i, 2 + 2 * i);
            edges.push((0, a));
            edges.push((0, b));
            edges.push((a, b));
        }
        let g = Graph::from_edges(1 + 2 * p as usize, edges);
        let started = std::time::Instant::now();
        let hub = canonical_bytes(&g, 0);
        let a0 = canonical_bytes(&g, 1);
        let b7 = canonical_bytes(&g, 16);
        assert_eq!(a0, b7);
        assert_ne!(hub, a0);
        assert!(
            started.elapsed() < std::time::Duration::from_secs(20),
            "search blew up: {:?}",
            started.elapsed()
        );
    }
}
