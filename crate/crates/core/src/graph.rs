//! Immutable undirected simple graphs in compressed adjacency form,
//! edge-list ingestion, and preprocessing (self-loop removal, duplicate
//! merging, isolated-node dropping).

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

/// Dense node index, contiguous in `0..n`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Immutable undirected simple graph. Neighbor lists are sorted ascending
/// and never contain self-loops or duplicates.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from undirected edges over nodes `0..n`. Self-loops
    /// are dropped and duplicate edges merged; isolated nodes are kept.
    pub fn from_edges<I>(n: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut pairs: Vec<(u32, u32)> = edges
            .into_iter()
            .filter(|&(u, v)| u != v)
            .map(|(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        for &(u, v) in &pairs {
            assert!((v as usize) < n, "edge endpoint {v} out of range 0..{n}");
            let _ = u;
        }
        Self::from_normalized_edges(n, &pairs)
    }

    /// `pairs` must be sorted, deduplicated, loop-free, with `u < v`.
    pub(crate) fn from_normalized_edges(n: usize, pairs: &[(u32, u32)]) -> Graph {
        let mut degree = vec![0usize; n];
        for &(u, v) in pairs {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![NodeId(0); acc];
        for &(u, v) in pairs {
            neighbors[cursor[u as usize]] = NodeId(v);
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = NodeId(u);
            cursor[v as usize] += 1;
        }
        // Each row was filled in ascending order of the opposite endpoint
        // only for the `u < v` direction; rows mixing both directions need
        // a sort.
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            offsets,
            neighbors,
            edge_count: pairs.len(),
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v.index() + 1] - self.offsets[v.index()]
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    /// Induced subgraph on `keep` (ascending, deduplicated). Returns the
    /// subgraph and the map from new local index to old node id.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> (Graph, Vec<NodeId>) {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut local_of: HashMap<NodeId, u32> = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            local_of.insert(v, i as u32);
        }
        let mut pairs = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &w in self.neighbors(v) {
                if w > v {
                    if let Some(&j) = local_of.get(&w) {
                        pairs.push((i as u32, j));
                    }
                }
            }
        }
        pairs.sort_unstable();
        (
            Graph::from_normalized_edges(keep.len(), &pairs),
            keep.to_vec(),
        )
    }

    /// Node set of the largest connected component; ties broken toward the
    /// component containing the smallest node id. Result is sorted.
    pub fn largest_component(&self) -> Vec<NodeId> {
        let n = self.node_count();
        let mut component = vec![u32::MAX; n];
        let mut best: Option<(usize, u32)> = None; // (size, component id)
        let mut queue = Vec::new();
        let mut next_component = 0u32;
        for start in 0..n {
            if component[start] != u32::MAX {
                continue;
            }
            let c = next_component;
            next_component += 1;
            component[start] = c;
            queue.clear();
            queue.push(start as u32);
            let mut size = 0usize;
            while let Some(v) = queue.pop() {
                size += 1;
                for &w in self.neighbors(NodeId(v)) {
                    if component[w.index()] == u32::MAX {
                        component[w.index()] = c;
                        queue.push(w.0);
                    }
                }
            }
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, c));
            }
        }
        let Some((_, c)) = best else {
            return Vec::new();
        };
        (0..n as u32)
            .map(NodeId)
            .filter(|v| component[v.index()] == c)
            .collect()
    }

    /// Writes the canonical edge list: one `u v` pair per line with
    /// `u < v` by dense index, lines sorted, LF terminated.
    pub fn write_canonical_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u, v)?;
        }
        Ok(())
    }

    pub fn canonical_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_canonical_edge_list(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii output")
    }

    #[cfg(test)]
    pub(crate) fn check_invariants(&self) {
        let n = self.node_count();
        let mut total = 0usize;
        for v in self.nodes() {
            let row = self.neighbors(v);
            total += row.len();
            assert!(row.windows(2).all(|w| w[0] < w[1]), "row not strictly sorted");
            for &w in row {
                assert!(w.index() < n);
                assert_ne!(w, v, "self-loop");
                assert!(self.contains_edge(w, v), "asymmetric edge");
            }
        }
        assert_eq!(total, 2 * self.edge_count);
    }
}

/// Tally of the transformations applied while loading an edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct LoadReport {
    pub nodes_kept: u64,
    pub nodes_dropped_isolated: u64,
    pub self_loops_removed: u64,
    /// Data edges dropped because their unordered pair was already present.
    pub duplicate_edges_merged: u64,
    /// Subset of the merged duplicates that arrived with the opposite
    /// orientation to the first occurrence.
    pub direction_collapsed: u64,
}

#[derive(Clone, Debug)]
pub struct LoadOptions {
    /// Lines starting with any of these are skipped.
    pub comment_prefixes: Vec<char>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            comment_prefixes: vec!['#', '%'],
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: expected at least two whitespace-separated labels")]
    MalformedLine { line: usize },
    #[error("empty graph after preprocessing")]
    EmptyGraph,
    #[error("edge list exceeds {max} distinct node labels", max = u32::MAX)]
    TooManyNodes,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A loaded graph together with the original labels (index → label) and
/// the preprocessing report.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
    pub report: LoadReport,
}

/// Parses a whitespace-separated edge list. Each data line carries two node
/// labels; extra columns (weights, timestamps) are ignored, as is edge
/// direction. Self-loops are removed, duplicate and reverse-duplicate edges
/// merged, and nodes left without edges dropped. Node indices are assigned
/// by first appearance among surviving nodes.
pub fn load_edge_list<R: BufRead>(
    reader: R,
    options: &LoadOptions,
) -> Result<LoadedGraph, LoadError> {
    let mut id_of: HashMap<String, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut intern = |token: &str, labels: &mut Vec<String>| -> Result<u32, LoadError> {
        if let Some(&id) = id_of.get(token) {
            return Ok(id);
        }
        if labels.len() > u32::MAX as usize {
            return Err(LoadError::TooManyNodes);
        }
        let id = labels.len() as u32;
        id_of.insert(token.to_string(), id);
        labels.push(token.to_string());
        Ok(id)
    };

    let mut report = LoadReport::default();
    let mut seen: HashMap<(u32, u32), bool> = HashMap::new(); // pair -> first orientation was (min,max)
    let mut pairs: Vec<(u32, u32)> = Vec::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if options
            .comment_prefixes
            .iter()
            .any(|&c| trimmed.starts_with(c))
        {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(LoadError::MalformedLine { line: lineno + 1 });
        };
        let u = intern(a, &mut labels)?;
        let v = intern(b, &mut labels)?;
        if u == v {
            report.self_loops_removed += 1;
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        let forward = u < v;
        match seen.get(&key) {
            Some(&first_forward) => {
                report.duplicate_edges_merged += 1;
                if forward != first_forward {
                    report.direction_collapsed += 1;
                }
            }
            None => {
                seen.insert(key, forward);
                pairs.push(key);
            }
        }
    }

    // Drop nodes that ended up with no edges and reindex the survivors by
    // first appearance.
    let mut has_edge = vec![false; labels.len()];
    for &(u, v) in &pairs {
        has_edge[u as usize] = true;
        has_edge[v as usize] = true;
    }
    let mut new_id = vec![u32::MAX; labels.len()];
    let mut kept_labels = Vec::new();
    for (old, label) in labels.iter().enumerate() {
        if has_edge[old] {
            new_id[old] = kept_labels.len() as u32;
            kept_labels.push(label.clone());
        } else {
            report.nodes_dropped_isolated += 1;
        }
    }
    if kept_labels.is_empty() {
        return Err(LoadError::EmptyGraph);
    }
    let mut remapped: Vec<(u32, u32)> = pairs
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (new_id[u as usize], new_id[v as usize]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    remapped.sort_unstable();
    report.nodes_kept = kept_labels.len() as u64;
    let graph = Graph::from_normalized_edges(kept_labels.len(), &remapped);
    Ok(LoadedGraph {
        graph,
        labels: kept_labels,
        report,
    })
}

/// Convenience wrapper over [`load_edge_list`] for in-memory text.
pub fn load_edge_list_str(text: &str) -> Result<LoadedGraph, LoadError> {
    load_edge_list(text.as_bytes(), &LoadOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(lines: &[&str]) -> LoadedGraph {
        load_edge_list_str(&lines.join("\n")).expect("load")
    }

    #[test]
    fn merges_duplicates_and_drops_loops() {
        let loaded = load(&["a b", "b a", "c c"]);
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.report.self_loops_removed, 1);
        assert_eq!(loaded.report.duplicate_edges_merged, 1);
        assert_eq!(loaded.report.direction_collapsed, 1);
        assert_eq!(loaded.report.nodes_dropped_isolated, 1);
        assert_eq!(loaded.report.nodes_kept, 2);
        assert_eq!(loaded.labels, vec!["a", "b"]);
    }

    #[test]
    fn ignores_extra_columns() {
        let loaded = load(&["1 2 0.7 163423", "2 3"]);
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.report, LoadReport {
            nodes_kept: 3,
            ..LoadReport::default()
        });
    }

    #[test]
    fn empty_input_is_an_error() {
        match load_edge_list_str("") {
            Err(LoadError::EmptyGraph) => {}
            other => panic!("expected EmptyGraph, got {other:?}"),
        }
    }

    #[test]
    fn all_isolated_is_an_error() {
        match load_edge_list_str("x x\ny y") {
            Err(LoadError::EmptyGraph) => {}
            other => panic!("expected EmptyGraph, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load_edge_list_str("a b\nc\n") {
            Err(LoadError::MalformedLine { line }) => assert_eq!(line, 2),
            other => panic!("expected MalformedLine, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let loaded = load(&["# header", "% other header", "", "  a b"]);
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edge_count(), 1);
    }

    #[test]
    fn degrees_on_small_fixtures() {
        let path = load(&["a b", "b c"]);
        assert_eq!(path.graph.degree(NodeId(1)), 2);
        assert_eq!(path.graph.degree(NodeId(0)), 1);
        let star = load(&["h l1", "h l2", "h l3"]);
        assert_eq!(star.graph.degree(NodeId(0)), 3);
    }

    #[test]
    fn first_appearance_indexing() {
        let loaded = load(&["b a", "c a"]);
        assert_eq!(loaded.labels, vec!["b", "a", "c"]);
        assert!(loaded.graph.contains_edge(NodeId(0), NodeId(1)));
        assert!(loaded.graph.contains_edge(NodeId(2), NodeId(1)));
    }

    #[test]
    fn canonical_export_round_trip() {
        let loaded = load(&["b a", "c a", "c b", "d c"]);
        let text = loaded.graph.canonical_edge_list();
        let reloaded = load_edge_list_str(&text).expect("reload");
        assert_eq!(loaded.graph, reloaded.graph);
        // Exporting the reloaded graph is a fixed point.
        assert_eq!(text, reloaded.graph.canonical_edge_list());
    }

    #[test]
    fn degree_sum_equals_twice_edges() {
        let loaded = load(&["a b", "b c", "c d", "d a", "a c"]);
        let g = &loaded.graph;
        g.check_invariants();
        let sum: usize = g.nodes().map(|v| g.degree(v)).sum();
        assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn largest_component_prefers_bigger() {
        let loaded = load(&["a b", "b c", "x y"]);
        let comp = loaded.graph.largest_component();
        assert_eq!(comp, vec![NodeId(0), NodeId(1), NodeId(2)]);
        let (sub, map) = loaded.graph.induced_subgraph(&comp);
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(map.len(), 3);
    }

    #[test]
    fn loading_is_deterministic() {
        let text = "5 1\n2 5\n3 4\n1 2\n";
        let a = load_edge_list_str(text).unwrap();
        let b = load_edge_list_str(text).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.report, b.report);
        assert_eq!(a.labels, b.labels);
    }
}
