//! Extraction of d-neighborhoods as induced subgraphs with a distinguished
//! focal node.

use crate::graph::{Graph, NodeId};

/// Induced subgraph of all nodes within `radius` hops of a focal node.
/// Local ids are assigned in BFS-visit order, so the focal node is always
/// local id 0.
#[derive(Clone, Debug)]
pub struct NeighborhoodView {
    pub local: Graph,
    pub focal: NodeId,
    pub to_global: Vec<NodeId>,
    pub radius: u32,
}

impl NeighborhoodView {
    #[inline]
    pub fn node_count(&self) -> usize {
        self.local.node_count()
    }
}

/// Reusable scratch space for neighborhood extraction. Extracting many
/// views through one extractor avoids reallocating the visited map.
pub struct NeighborhoodExtractor {
    local_of: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl NeighborhoodExtractor {
    pub fn new(g: &Graph) -> Self {
        NeighborhoodExtractor {
            local_of: vec![UNSEEN; g.node_count()],
        }
    }

    pub fn extract(&mut self, g: &Graph, v: NodeId, radius: u32) -> NeighborhoodView {
        assert!(radius >= 1, "neighborhood radius must be at least 1");
        assert!(v.index() < g.node_count(), "node {v} out of range");
        let mut to_global: Vec<NodeId> = vec![v];
        self.local_of[v.index()] = 0;
        let mut level_start = 0usize;
        for _ in 0..radius {
            let level_end = to_global.len();
            if level_start == level_end {
                break;
            }
            for i in level_start..level_end {
                let u = to_global[i];
                for &w in g.neighbors(u) {
                    if self.local_of[w.index()] == UNSEEN {
                        self.local_of[w.index()] = to_global.len() as u32;
                        to_global.push(w);
                    }
                }
            }
            level_start = level_end;
        }

        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (i, &gu) in to_global.iter().enumerate() {
            for &w in g.neighbors(gu) {
                let j = self.local_of[w.index()];
                if j != UNSEEN && (i as u32) < j {
                    pairs.push((i as u32, j));
                }
            }
        }
        pairs.sort_unstable();
        let local = Graph::from_normalized_edges(to_global.len(), &pairs);

        for &gv in &to_global {
            self.local_of[gv.index()] = UNSEEN;
        }
        NeighborhoodView {
            local,
            focal: NodeId(0),
            to_global,
            radius,
        }
    }
}

/// The closed d-neighborhood of `v`: the induced subgraph on all nodes at
/// distance at most `d` from `v`, with `v` itself included.
pub fn closed_neighborhood(g: &Graph, v: NodeId, d: u32) -> NeighborhoodView {
    NeighborhoodExtractor::new(g).extract(g, v, d)
}

/// The open neighbor set of `v`: its adjacency list, sorted, excluding `v`.
pub fn open_neighbor_set(g: &Graph, v: NodeId) -> Vec<NodeId> {
    g.neighbors(v).to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list_str;

    fn path5() -> Graph {
        load_edge_list_str("a b\nb c\nc d\nd e").unwrap().graph
    }

    fn global_set(view: &NeighborhoodView) -> Vec<NodeId> {
        let mut v = view.to_global.clone();
        v.sort();
        v
    }

    #[test]
    fn path_center_radius_one() {
        let g = path5();
        let view = closed_neighborhood(&g, NodeId(2), 1);
        assert_eq!(global_set(&view), vec![NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(view.local.edge_count(), 2);
        assert_eq!(view.focal, NodeId(0));
        assert_eq!(view.to_global[0], NodeId(2));
    }

    #[test]
    fn path_end_radius_two() {
        let g = path5();
        let view = closed_neighborhood(&g, NodeId(0), 2);
        assert_eq!(global_set(&view), vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert_eq!(view.local.edge_count(), 2);
    }

    #[test]
    fn cycle_radius_two_covers_all() {
        let g = load_edge_list_str("a b\nb c\nc d\nd e\ne a").unwrap().graph;
        for v in g.nodes() {
            let view = closed_neighborhood(&g, v, 2);
            assert_eq!(view.node_count(), 5);
            assert_eq!(view.local.edge_count(), 5);
        }
    }

    #[test]
    fn open_neighbor_set_examples() {
        let tri = load_edge_list_str("x y\ny z\nz x").unwrap().graph;
        assert_eq!(open_neighbor_set(&tri, NodeId(0)), vec![NodeId(1), NodeId(2)]);
        let star = load_edge_list_str("h l1\nh l2\nh l3").unwrap().graph;
        assert_eq!(open_neighbor_set(&star, NodeId(1)), vec![NodeId(0)]);
        for v in star.nodes() {
            assert!(!open_neighbor_set(&star, v).is_empty());
        }
    }

    #[test]
    fn closed_neighborhood_size_at_radius_one() {
        let g = load_edge_list_str("a b\nb c\nc d\nd a\na c\nd e").unwrap().graph;
        for v in g.nodes() {
            let view = closed_neighborhood(&g, v, 1);
            assert_eq!(view.node_count(), g.degree(v) + 1);
        }
    }

    #[test]
    fn monotone_nesting_and_component_limit() {
        let g = load_edge_list_str("a b\nb c\nc d\nd e\nc f\nf g\nx y").unwrap().graph;
        for v in g.nodes() {
            let mut previous: Option<Vec<NodeId>> = None;
            for d in 1..=6 {
                let nodes = global_set(&closed_neighborhood(&g, v, d));
                if let Some(prev) = &previous {
                    assert!(prev.iter().all(|x| nodes.contains(x)));
                }
                previous = Some(nodes);
            }
            // Beyond the eccentricity the view is the whole component.
            let comp: Vec<NodeId> = bfs_component(&g, v);
            assert_eq!(previous.unwrap(), comp);
        }
    }

    #[test]
    fn induced_edges_are_exact() {
        let g = load_edge_list_str("a b\nb c\nc a\nc d\nd e\ne b").unwrap().graph;
        for v in g.nodes() {
            let view = closed_neighborhood(&g, v, 2);
            for i in view.local.nodes() {
                for j in view.local.nodes() {
                    if i < j {
                        let expected =
                            g.contains_edge(view.to_global[i.index()], view.to_global[j.index()]);
                        assert_eq!(view.local.contains_edge(i, j), expected);
                    }
                }
            }
        }
    }

    fn bfs_component(g: &Graph, v: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; g.node_count()];
        let mut queue = vec![v];
        seen[v.index()] = true;
        let mut i = 0;
        while i < queue.len() {
            let u = queue[i];
            i += 1;
            for &w in g.neighbors(u) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push(w);
                }
            }
        }
        let mut out: Vec<NodeId> = queue;
        out.sort();
        out
    }
}
