//! Pairwise anchored-isomorphism testing for views too large to serialize
//! into certificates. Works on the same refinement machinery as the
//! canonical search: individualize corresponding cells on both sides and
//! recurse while the refined signatures agree.

use super::refine::{
    anchored_colors, equitable_signature, individualize, refine_to_stable, twin_classes,
};
use crate::graph::Graph;

pub(crate) struct AnchoredSide<'g> {
    pub g: &'g Graph,
    pub color: Vec<u32>,
    pub count: u32,
    twin_class: Vec<u32>,
}

impl<'g> AnchoredSide<'g> {
    pub(crate) fn new(g: &'g Graph, focal: usize) -> AnchoredSide<'g> {
        let (mut color, count) = anchored_colors(g.node_count(), focal);
        let count = refine_to_stable(g, &mut color, count);
        AnchoredSide {
            g,
            color,
            count,
            twin_class: twin_classes(g),
        }
    }

    pub(crate) fn signature(&self) -> Vec<u32> {
        equitable_signature(self.g, &self.color, self.count)
    }
}

/// Decides focal-preserving isomorphism between two anchored graphs whose
/// stable refinement signatures already agree.
pub(crate) fn anchored_isomorphic_refined(a: &AnchoredSide<'_>, b: &AnchoredSide<'_>) -> bool {
    if a.g.node_count() != b.g.node_count() || a.g.edge_count() != b.g.edge_count() {
        return false;
    }
    recurse(a, b, &a.color, a.count, &b.color, b.count)
}

fn recurse(
    a: &AnchoredSide<'_>,
    b: &AnchoredSide<'_>,
    color_a: &[u32],
    count_a: u32,
    color_b: &[u32],
    count_b: u32,
) -> bool {
    if count_a != count_b {
        return false;
    }
    if equitable_signature(a.g, color_a, count_a) != equitable_signature(b.g, color_b, count_b) {
        return false;
    }
    let n = a.g.node_count();
    if count_a as usize == n {
        return discrete_match(a.g, color_a, b.g, color_b);
    }

    // Smallest non-singleton cell; equal signatures make the choice agree
    // on both sides.
    let mut sizes = vec![0u32; count_a as usize];
    for &c in color_a {
        sizes[c as usize] += 1;
    }
    let target = sizes
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 1)
        .min_by_key(|&(c, &s)| (s, c))
        .map(|(c, _)| c as u32)
        .expect("non-discrete partition has a non-singleton cell");

    // Fix the first vertex of the cell on side A; any isomorphism must map
    // it somewhere into B's corresponding cell, so trying every B vertex
    // (one per twin group) is exhaustive.
    let x = (0..n).find(|&v| color_a[v] == target).expect("cell member");
    let mut refined_a = color_a.to_vec();
    let count_x = individualize(&mut refined_a, x, count_a);
    let count_x = refine_to_stable(a.g, &mut refined_a, count_x);

    let mut tried: Vec<u32> = Vec::new();
    for y in 0..n {
        if color_b[y] != target {
            continue;
        }
        let t = b.twin_class[y];
        if tried.contains(&t) {
            continue;
        }
        tried.push(t);
        let mut refined_b = color_b.to_vec();
        let count_y = individualize(&mut refined_b, y, count_b);
        let count_y = refine_to_stable(b.g, &mut refined_b, count_y);
        if recurse(a, b, &refined_a, count_x, &refined_b, count_y) {
            return true;
        }
    }
    false
}

/// Both colorings discrete: the color-aligned vertex map is the only
/// candidate; verify it edge-exactly.
fn discrete_match(ga: &Graph, color_a: &[u32], gb: &Graph, color_b: &[u32]) -> bool {
    let n = ga.node_count();
    let mut b_at = vec![0u32; n];
    for (v, &c) in color_b.iter().enumerate() {
        b_at[c as usize] = v as u32;
    }
    if ga.edge_count() != gb.edge_count() {
        return false;
    }
    for (u, v) in ga.edges() {
        let mu = crate::graph::NodeId(b_at[color_a[u.index()] as usize]);
        let mv = crate::graph::NodeId(b_at[color_a[v.index()] as usize]);
        if !gb.contains_edge(mu, mv) {
            return false;
        }
    }
    true
}
