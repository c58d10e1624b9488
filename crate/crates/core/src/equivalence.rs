//! d-equivalence partitions and k-anonymity statistics.
//!
//! Two nodes are d-equivalent when their closed d-neighborhoods admit an
//! isomorphism mapping one focal node onto the other; the partition groups
//! all nodes by interned certificate. A node in a class of size k is
//! k-anonymous; k = 1 means unique.

use serde::Serialize;

use crate::canonical::{certify_all, CertId, CertificateCache, CertifyOptions};
use crate::graph::{Graph, NodeId};
use crate::twins::{twin_reduce, TwinSets};

/// Grouping of all nodes into d-equivalence classes. Class ids are dense and
/// ordered by each class's smallest member, which makes partitions of the
/// same graph directly comparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalencePartition {
    d: u32,
    class_of: Vec<u32>,
    class_sizes: Vec<u32>,
}

impl EquivalencePartition {
    /// Builds a partition from arbitrary per-node group ids, renumbering
    /// classes by smallest member.
    pub(crate) fn from_class_ids(d: u32, raw: &[u32]) -> EquivalencePartition {
        let mut renumber: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        let mut class_of = Vec::with_capacity(raw.len());
        let mut class_sizes: Vec<u32> = Vec::new();
        for &r in raw {
            let next = renumber.len() as u32;
            let id = *renumber.entry(r).or_insert(next);
            if id as usize == class_sizes.len() {
                class_sizes.push(0);
            }
            class_sizes[id as usize] += 1;
            class_of.push(id);
        }
        EquivalencePartition {
            d,
            class_of,
            class_sizes,
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn node_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_sizes.len()
    }

    #[inline]
    pub fn class_of(&self, v: NodeId) -> u32 {
        self.class_of[v.index()]
    }

    #[inline]
    pub fn class_size_of(&self, v: NodeId) -> u32 {
        self.class_sizes[self.class_of(v) as usize]
    }

    pub fn class_sizes(&self) -> &[u32] {
        &self.class_sizes
    }

    pub fn class_sizes_sorted(&self) -> Vec<u32> {
        let mut sizes = self.class_sizes.clone();
        sizes.sort_unstable();
        sizes
    }

    /// Members of each class, classes in id order, members ascending.
    pub fn classes(&self) -> Vec<Vec<NodeId>> {
        let mut out: Vec<Vec<NodeId>> = vec![Vec::new(); self.class_sizes.len()];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(NodeId(v as u32));
        }
        out
    }

    pub fn singletons(&self) -> Vec<NodeId> {
        (0..self.class_of.len() as u32)
            .map(NodeId)
            .filter(|&v| self.class_size_of(v) == 1)
            .collect()
    }

    /// Fraction of nodes in singleton classes.
    pub fn uniqueness(&self) -> f64 {
        self.fraction_at_most(1)
    }

    /// Fraction of nodes in classes of size at most `k`.
    pub fn fraction_at_most(&self, k: u32) -> f64 {
        if self.class_of.is_empty() {
            return 0.0;
        }
        let covered: u64 = self
            .class_sizes
            .iter()
            .filter(|&&s| s <= k)
            .map(|&s| s as u64)
            .sum();
        covered as f64 / self.class_of.len() as f64
    }

    /// True when every class of `self` is contained in a single class of
    /// `coarser`.
    pub fn refines(&self, coarser: &EquivalencePartition) -> bool {
        if self.node_count() != coarser.node_count() {
            return false;
        }
        let mut image: Vec<u32> = vec![u32::MAX; self.class_count()];
        for v in 0..self.class_of.len() {
            let c = self.class_of[v] as usize;
            let target = coarser.class_of[v];
            if image[c] == u32::MAX {
                image[c] = target;
            } else if image[c] != target {
                return false;
            }
        }
        true
    }
}

/// Computes the d-equivalence partition of all nodes.
pub fn partition(g: &Graph, d: u32) -> EquivalencePartition {
    let cache = CertificateCache::new();
    partition_with(g, d, &cache, &CertifyOptions::default(), None)
}

/// Partition with an explicit cache, certification options, and optional
/// twin-representative reduction. With twins supplied, only one member per
/// twin set is certified and the omitted members are expanded back into
/// their representative's class afterwards; the result is identical to the
/// unreduced partition.
pub fn partition_with(
    g: &Graph,
    d: u32,
    cache: &CertificateCache,
    opts: &CertifyOptions,
    twins: Option<&TwinSets>,
) -> EquivalencePartition {
    assert!(d >= 1, "d-k-anonymity requires d >= 1");
    let n = g.node_count();
    match twins {
        None => {
            let nodes: Vec<NodeId> = g.nodes().collect();
            let ids = certify_all(g, d, &nodes, cache, opts);
            from_cert_ids(d, &ids)
        }
        Some(t) => {
            let reduction = twin_reduce(g, t);
            let ids = certify_all(g, d, &reduction.representatives, cache, opts);
            let mut id_of_rep: std::collections::HashMap<NodeId, CertId> =
                std::collections::HashMap::with_capacity(reduction.representatives.len());
            for (rep, id) in reduction.representatives.iter().zip(&ids) {
                id_of_rep.insert(*rep, *id);
            }
            let full: Vec<CertId> = (0..n as u32)
                .map(|v| id_of_rep[&reduction.representative_of(NodeId(v))])
                .collect();
            let raw: Vec<u32> = dense_ids(&full);
            EquivalencePartition::from_class_ids(d, &raw)
        }
    }
}

fn from_cert_ids(d: u32, ids: &[CertId]) -> EquivalencePartition {
    EquivalencePartition::from_class_ids(d, &dense_ids(ids))
}

fn dense_ids(ids: &[CertId]) -> Vec<u32> {
    let mut seen: std::collections::HashMap<CertId, u32> = std::collections::HashMap::new();
    ids.iter()
        .map(|id| {
            let next = seen.len() as u32;
            *seen.entry(*id).or_insert(next)
        })
        .collect()
}

/// Fractions of nodes that are at most k-anonymous, for k = 1..=k_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnonymityReport {
    pub d: u32,
    pub n: u64,
    pub k_max: u32,
    /// `fractions[k-1]` = fraction of nodes in classes of size <= k.
    pub fractions: Vec<f64>,
    pub uniqueness: f64,
}

pub fn report(p: &EquivalencePartition, k_max: u32) -> AnonymityReport {
    assert!(k_max >= 1);
    let fractions: Vec<f64> = (1..=k_max).map(|k| p.fraction_at_most(k)).collect();
    AnonymityReport {
        d: p.d(),
        n: p.node_count() as u64,
        k_max,
        uniqueness: fractions[0],
        fractions,
    }
}
