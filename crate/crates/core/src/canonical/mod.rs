//! Anchored canonical certificates.
//!
//! A certificate is a byte string computed from a neighborhood view such
//! that two views get equal bytes exactly when there is an isomorphism
//! between them mapping focal to focal. Certificates are deterministic across
//! runs and platforms: no randomized hashing participates in their bytes.

mod pairwise;
mod refine;
mod search;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;
use rayon::prelude::*;

use crate::graph::{Graph, NodeId};
use crate::neighborhood::{NeighborhoodExtractor, NeighborhoodView};
use pairwise::{anchored_isomorphic_refined, AnchoredSide};
use refine::{anchored_colors, cell_sizes, refine_to_stable};

/// Canonical byte string of an anchored neighborhood. Equality of
/// certificates coincides with focal-preserving isomorphism of the views.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Certificate {
    bytes: Vec<u8>,
}

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }
}

impl std::fmt::Debug for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Certificate({} bytes)", self.bytes.len())
    }
}

/// Cheap isomorphism-invariant fingerprint of a view, used to avoid
/// canonical labeling between provably non-equivalent nodes. Anchored
/// isomorphic views always produce equal keys.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct InvariantKey {
    pub node_count: u32,
    pub edge_count: u32,
    pub focal_degree_in_view: u32,
    pub sorted_degree_sequence_hash: u64,
    pub refinement_color_histogram_hash: u64,
}

fn fnv1a64<I: IntoIterator<Item = u32>>(values: I) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for v in values {
        for byte in v.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    }
    hash
}

fn key_from_refined(g: &Graph, focal: usize, color: &[u32], count: u32) -> InvariantKey {
    let mut degrees: Vec<u32> = g.nodes().map(|v| g.degree(v) as u32).collect();
    degrees.sort_unstable();
    let histogram = cell_sizes(color, count);
    InvariantKey {
        node_count: g.node_count() as u32,
        edge_count: g.edge_count() as u32,
        focal_degree_in_view: g.degree(NodeId(focal as u32)) as u32,
        sorted_degree_sequence_hash: fnv1a64(degrees),
        refinement_color_histogram_hash: fnv1a64(
            std::iter::once(count).chain(histogram.iter().copied()),
        ),
    }
}

/// Computes the invariant prefilter key of a view.
pub fn invariant_key(view: &NeighborhoodView) -> InvariantKey {
    let g = &view.local;
    let (mut color, count) = anchored_colors(g.node_count(), view.focal.index());
    let count = refine_to_stable(g, &mut color, count);
    key_from_refined(g, view.focal.index(), &color, count)
}

/// Computes the canonical certificate of a view via anchored color
/// refinement and individualization-refinement backtracking.
pub fn canonical_certificate(view: &NeighborhoodView) -> Certificate {
    Certificate {
        bytes: search::canonical_bytes(&view.local, view.focal.index()),
    }
}

/// Interned certificate identifier, stable within a run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CertId(pub u64);

/// Concurrent interning cache mapping (radius, invariant key, certificate
/// bytes) to compact ids. Sharded by key hash; entries are never evicted
/// within a run.
pub struct CertificateCache {
    map: DashMap<(u32, InvariantKey, Box<[u8]>), CertId>,
    next_id: AtomicU64,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl Default for CertificateCache {
    fn default() -> Self {
        Self::new()
    }
}

impl CertificateCache {
    pub fn new() -> CertificateCache {
        CertificateCache {
            map: DashMap::new(),
            next_id: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn intern(&self, d: u32, key: InvariantKey, bytes: Vec<u8>) -> CertId {
        use dashmap::mapref::entry::Entry;
        match self.map.entry((d, key, bytes.into_boxed_slice())) {
            Entry::Occupied(e) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                *e.get()
            }
            Entry::Vacant(e) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                let id = CertId(self.next_id.fetch_add(1, Ordering::Relaxed));
                e.insert(id);
                id
            }
        }
    }

    /// Fresh id for a certificate class established by pairwise testing
    /// (large views whose bytes are never materialized).
    pub fn fresh_class_id(&self) -> CertId {
        self.misses.fetch_add(1, Ordering::Relaxed);
        CertId(self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn unique_certificates(&self) -> u64 {
        self.next_id.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Views with more nodes than this skip byte serialization and are
    /// classified by refinement signature plus pairwise isomorphism
    /// confirmation instead.
    pub large_view_threshold: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            large_view_threshold: 4096,
        }
    }
}

enum Slot {
    Done(CertId),
    Large(InvariantKey),
}

/// Certifies the d-neighborhood of every node in `nodes`. Equivalent to
/// extracting each closed neighborhood and interning its canonical
/// certificate, with invariant-key bucketing so that only views that could
/// possibly be equivalent are compared.
pub fn certify_all(
    g: &Graph,
    d: u32,
    nodes: &[NodeId],
    cache: &CertificateCache,
    opts: &CertifyOptions,
) -> Vec<CertId> {
    assert!(d >= 1, "neighborhood radius must be at least 1");
    let slots: Vec<Slot> = nodes
        .par_iter()
        .map_init(
            || NeighborhoodExtractor::new(g),
            |extractor, &v| {
                let view = extractor.extract(g, v, d);
                let local = &view.local;
                let (mut color, count) = anchored_colors(local.node_count(), 0);
                let count = refine_to_stable(local, &mut color, count);
                let key = key_from_refined(local, 0, &color, count);
                if local.node_count() <= opts.large_view_threshold {
                    let bytes = search::canonical_bytes_refined(local, 0, &color, count);
                    Slot::Done(cache.intern(d, key, bytes))
                } else {
                    Slot::Large(key)
                }
            },
        )
        .collect();

    let mut large_buckets: HashMap<InvariantKey, Vec<usize>> = HashMap::new();
    for (i, slot) in slots.iter().enumerate() {
        if let Slot::Large(key) = slot {
            large_buckets.entry(*key).or_default().push(i);
        }
    }
    let mut out: Vec<CertId> = slots
        .iter()
        .map(|s| match s {
            Slot::Done(id) => *id,
            Slot::Large(_) => CertId(u64::MAX),
        })
        .collect();

    if large_buckets.is_empty() {
        return out;
    }

    let buckets: Vec<Vec<usize>> = large_buckets.into_values().collect();
    let resolved: Vec<Vec<(usize, CertId)>> = buckets
        .par_iter()
        .map(|bucket| resolve_large_bucket(g, d, nodes, bucket, cache))
        .collect();
    for group in resolved {
        for (i, id) in group {
            out[i] = id;
        }
    }
    out
}

/// Two-phase classification of one invariant bucket of oversized views:
/// group by exact refinement signature, then confirm membership against one
/// representative per class with pairwise backtracking isomorphism.
fn resolve_large_bucket(
    g: &Graph,
    d: u32,
    nodes: &[NodeId],
    bucket: &[usize],
    cache: &CertificateCache,
) -> Vec<(usize, CertId)> {
    let mut extractor = NeighborhoodExtractor::new(g);
    let views: Vec<NeighborhoodView> = bucket
        .iter()
        .map(|&i| extractor.extract(g, nodes[i], d))
        .collect();
    let sides: Vec<AnchoredSide<'_>> = views
        .iter()
        .map(|view| AnchoredSide::new(&view.local, 0))
        .collect();

    let mut by_signature: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (local_idx, side) in sides.iter().enumerate() {
        by_signature.entry(side.signature()).or_default().push(local_idx);
    }

    let mut out = Vec::with_capacity(bucket.len());
    for members in by_signature.into_values() {
        let mut reps: Vec<(usize, CertId)> = Vec::new();
        for local_idx in members {
            let mut assigned = None;
            for &(rep_idx, id) in &reps {
                if anchored_isomorphic_refined(&sides[rep_idx], &sides[local_idx]) {
                    assigned = Some(id);
                    break;
                }
            }
            let id = assigned.unwrap_or_else(|| {
                let id = cache.fresh_class_id();
                reps.push((local_idx, id));
                id
            });
            out.push((bucket[local_idx], id));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list_str;
    use crate::neighborhood::closed_neighborhood;

    fn star_pendant() -> Graph {
        // h;l1,l2,l3;p with edges h-l1, h-l2, h-l3, l3-p
        load_edge_list_str("h l1\nh l2\nh l3\nl3 p").unwrap().graph
    }

    #[test]
    fn invariant_key_examples() {
        let p3 = load_edge_list_str("a b\nb c").unwrap().graph;
        let end1 = invariant_key(&closed_neighborhood(&p3, NodeId(0), 2));
        let end2 = invariant_key(&closed_neighborhood(&p3, NodeId(2), 2));
        let center = invariant_key(&closed_neighborhood(&p3, NodeId(1), 2));
        assert_eq!(end1, end2);
        assert_ne!(end1.focal_degree_in_view, center.focal_degree_in_view);

        let tri = load_edge_list_str("a b\nb c\nc a").unwrap().graph;
        let tri_key = invariant_key(&closed_neighborhood(&tri, NodeId(0), 2));
        assert_ne!(tri_key.edge_count, end1.edge_count);
    }

    #[test]
    fn certificate_examples() {
        let p3 = load_edge_list_str("a b\nb c").unwrap().graph;
        let cert = |v: u32| canonical_certificate(&closed_neighborhood(&p3, NodeId(v), 2));
        assert_eq!(cert(0), cert(2));
        assert_ne!(cert(0), cert(1));
    }

    fn classes_of(g: &Graph, d: u32) -> Vec<Vec<u32>> {
        let cache = CertificateCache::new();
        let nodes: Vec<NodeId> = g.nodes().collect();
        let ids = certify_all(g, d, &nodes, &cache, &CertifyOptions::default());
        let mut groups: HashMap<CertId, Vec<u32>> = HashMap::new();
        for (v, id) in ids.iter().enumerate() {
            groups.entry(*id).or_default().push(v as u32);
        }
        let mut out: Vec<Vec<u32>> = groups.into_values().collect();
        out.sort();
        out
    }

    #[test]
    fn certify_all_examples() {
        let cycle = load_edge_list_str("a b\nb c\nc d\nd e\ne a").unwrap().graph;
        assert_eq!(classes_of(&cycle, 1), vec![vec![0, 1, 2, 3, 4]]);

        let p3 = load_edge_list_str("a b\nb c").unwrap().graph;
        assert_eq!(classes_of(&p3, 1), vec![vec![0, 2], vec![1]]);

        // star+pendant at d=1: hub, l3, and {l1, l2, p} (both plain leaves
        // and the pendant see a two-node path anchored at its end)
        let g = star_pendant();
        assert_eq!(classes_of(&g, 1), vec![vec![0], vec![1, 2, 4], vec![3]]);
    }

    #[test]
    fn cache_counts_hits() {
        let cycle = load_edge_list_str("a b\nb c\nc d\nd e\ne a").unwrap().graph;
        let cache = CertificateCache::new();
        let nodes: Vec<NodeId> = cycle.nodes().collect();
        let ids = certify_all(&cycle, 1, &nodes, &cache, &CertifyOptions::default());
        assert!(ids.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(cache.misses(), 1);
        assert_eq!(cache.hits(), 4);
        assert_eq!(cache.unique_certificates(), 1);
    }

    #[test]
    fn two_phase_fallback_matches_direct_path() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        for round in 0..20 {
            let n = rng.gen_range(6..20usize);
            let mut edges = Vec::new();
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    if rng.gen_bool(0.25) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, edges);
            let nodes: Vec<NodeId> = g.nodes().collect();
            for d in 1..=2 {
                let direct = {
                    let cache = CertificateCache::new();
                    certify_all(&g, d, &nodes, &cache, &CertifyOptions::default())
                };
                let fallback = {
                    let cache = CertificateCache::new();
                    let opts = CertifyOptions {
                        large_view_threshold: 2,
                    };
                    certify_all(&g, d, &nodes, &cache, &opts)
                };
                // Same partition of nodes, possibly different id values.
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(
                            direct[a] == direct[b],
                            fallback[a] == fallback[b],
                            "round={round} d={d} a={a} b={b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn prefilter_is_sound() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(4..12usize);
            let mut edges = Vec::new();
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    if rng.gen_bool(0.3) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, edges);
            let views: Vec<_> = g.nodes().map(|v| closed_neighborhood(&g, v, 2)).collect();
            for a in &views {
                for b in &views {
                    if invariant_key(a) != invariant_key(b) {
                        assert_ne!(canonical_certificate(a), canonical_certificate(b));
                    }
                }
            }
        }
    }
}
