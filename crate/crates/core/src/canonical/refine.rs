//! Equitable color refinement (one-dimensional Weisfeiler-Lehman) over an
//! ordered partition, plus the small helpers the certificate search needs.
//!
//! Colors are dense `0..count` and the color order is canonical: refinement
//! splits a cell into sub-cells ordered by neighbor-color signature, so two
//! isomorphic colored graphs always refine to correspondingly ordered
//! partitions regardless of vertex labels.

use std::collections::HashMap;

use crate::graph::{Graph, NodeId};

/// Initial anchored coloring: the focal node gets the reserved color 0,
/// everything else color 1.
pub(crate) fn anchored_colors(n: usize, focal: usize) -> (Vec<u32>, u32) {
    debug_assert!(focal < n);
    if n == 1 {
        return (vec![0], 1);
    }
    let mut color = vec![1u32; n];
    color[focal] = 0;
    (color, 2)
}

/// Refines `color` to the coarsest stable (equitable) partition that
/// refines it. Returns the resulting color count.
pub(crate) fn refine_to_stable(g: &Graph, color: &mut [u32], mut count: u32) -> u32 {
    let n = g.node_count();
    if n == 0 {
        return 0;
    }
    let mut sigs: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut new_color = vec![0u32; n];
    loop {
        if count as usize == n {
            return count;
        }
        for (v, sig) in sigs.iter_mut().enumerate() {
            sig.clear();
            sig.extend(
                g.neighbors(NodeId(v as u32))
                    .iter()
                    .map(|w| color[w.index()]),
            );
            sig.sort_unstable();
        }
        order.sort_unstable_by(|&a, &b| {
            let (a, b) = (a as usize, b as usize);
            (color[a], &sigs[a]).cmp(&(color[b], &sigs[b]))
        });
        let mut next = 0u32;
        new_color[order[0] as usize] = 0;
        for i in 1..n {
            let (p, q) = (order[i - 1] as usize, order[i] as usize);
            if color[p] != color[q] || sigs[p] != sigs[q] {
                next += 1;
            }
            new_color[q] = next;
        }
        let new_count = next + 1;
        if new_count == count {
            return count;
        }
        color.copy_from_slice(&new_color);
        count = new_count;
    }
}

/// Splits vertex `v` out of its cell, placing its new singleton cell
/// immediately before the remainder of the old cell. Returns the new count.
pub(crate) fn individualize(color: &mut [u32], v: usize, count: u32) -> u32 {
    let cv = color[v];
    for (u, c) in color.iter_mut().enumerate() {
        if *c > cv || (*c == cv && u != v) {
            *c += 1;
        }
    }
    count + 1
}

/// Cell sizes in color order.
pub(crate) fn cell_sizes(color: &[u32], count: u32) -> Vec<u32> {
    let mut sizes = vec![0u32; count as usize];
    for &c in color {
        sizes[c as usize] += 1;
    }
    sizes
}

/// Groups vertices that are open or closed twins inside `g` (identical
/// neighbor sets, with or without the vertices themselves). Twin vertices
/// are automorphic by the swap that fixes everything else, which makes a
/// single representative per group sufficient when branching over a cell.
pub(crate) fn twin_classes(g: &Graph) -> Vec<u32> {
    let n = g.node_count();
    let mut class: Vec<u32> = (0..n as u32).collect();

    let mut open: HashMap<&[NodeId], u32> = HashMap::with_capacity(n);
    for (v, slot) in class.iter_mut().enumerate() {
        let row = g.neighbors(NodeId(v as u32));
        match open.entry(row) {
            std::collections::hash_map::Entry::Occupied(e) => *slot = *e.get(),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(v as u32);
            }
        }
    }

    let mut closed: HashMap<Vec<NodeId>, u32> = HashMap::with_capacity(n);
    let mut key = Vec::new();
    for v in 0..n {
        if class[v] != v as u32 {
            continue; // already grouped as an open twin
        }
        key.clear();
        key.extend_from_slice(g.neighbors(NodeId(v as u32)));
        let pos = key.partition_point(|&w| w.0 < v as u32);
        key.insert(pos, NodeId(v as u32));
        match closed.entry(key.clone()) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let rep = *e.get();
                if class[rep as usize] == rep {
                    class[v] = rep;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(v as u32);
            }
        }
    }
    class
}

/// Exact, label-independent description of a stable coloring: the cell
/// sizes plus, per cell, the common neighbor-color profile of its members.
/// Equal signatures are a necessary condition for color-respecting
/// isomorphism; the serialized form is used to group large views before
/// pairwise confirmation.
pub(crate) fn equitable_signature(g: &Graph, color: &[u32], count: u32) -> Vec<u32> {
    let mut rep: Vec<u32> = vec![u32::MAX; count as usize];
    for (v, &c) in color.iter().enumerate() {
        if rep[c as usize] == u32::MAX {
            rep[c as usize] = v as u32;
        }
    }
    let sizes = cell_sizes(color, count);
    let mut sig = Vec::with_capacity(count as usize * 4);
    sig.push(count);
    let mut profile: Vec<u32> = Vec::new();
    for c in 0..count as usize {
        sig.push(sizes[c]);
        profile.clear();
        profile.extend(
            g.neighbors(NodeId(rep[c]))
                .iter()
                .map(|w| color[w.index()]),
        );
        profile.sort_unstable();
        // run-length encode (neighbor color, multiplicity)
        let mut i = 0;
        while i < profile.len() {
            let mut j = i + 1;
            while j < profile.len() && profile[j] == profile[i] {
                j += 1;
            }
            sig.push(profile[i]);
            sig.push((j - i) as u32);
            i = j;
        }
        sig.push(u32::MAX); // cell terminator
    }
    sig
}
