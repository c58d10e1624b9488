//! The anonymity-cascade: uniqueness propagates from nodes with unique ego
//! networks across links. A neighbor v of an identified node u becomes
//! identified when no other neighbor of u is 1-equivalent to v, i.e. v's
//! 1-equivalence class occurs exactly once among u's neighbors.

use serde::Serialize;

use crate::equivalence::{partition, EquivalencePartition};
use crate::graph::{Graph, NodeId};

/// How many cascading levels to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CascadeBudget {
    Levels(u32),
    /// Iterate until a level identifies nothing new.
    Exhaust,
}

const UNIDENTIFIED: u32 = u32::MAX;

/// Per-node identification status. Level 0 holds the seeds (nodes unique at
/// d = 1); level i >= 1 holds nodes first identified at cascading level i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CascadeResult {
    level_of: Vec<u32>,
    per_level_counts: Vec<u64>,
    max_level_reached: u32,
    identified: u64,
}

impl CascadeResult {
    pub(crate) fn from_levels(level_of: Vec<Option<u32>>, per_level_counts: Vec<u64>) -> Self {
        let compact: Vec<u32> = level_of
            .iter()
            .map(|l| l.unwrap_or(UNIDENTIFIED))
            .collect();
        let identified: u64 = compact.iter().filter(|&&l| l != UNIDENTIFIED).count() as u64;
        debug_assert_eq!(identified, per_level_counts.iter().sum::<u64>());
        let max_level_reached = per_level_counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(l, _)| l as u32)
            .max()
            .unwrap_or(0);
        CascadeResult {
            level_of: compact,
            per_level_counts,
            max_level_reached,
            identified,
        }
    }

    pub fn node_count(&self) -> usize {
        self.level_of.len()
    }

    /// Level at which `v` was first identified, if at all.
    pub fn level_of(&self, v: NodeId) -> Option<u32> {
        match self.level_of[v.index()] {
            UNIDENTIFIED => None,
            l => Some(l),
        }
    }

    /// Newly identified node counts per level; index 0 counts the seeds.
    pub fn per_level_counts(&self) -> &[u64] {
        &self.per_level_counts
    }

    /// Last level that identified at least one new node (0 when cascading
    /// never got past the seeds).
    pub fn max_level_reached(&self) -> u32 {
        self.max_level_reached
    }

    pub fn identified_count(&self) -> u64 {
        self.identified
    }

    pub fn identified_within(&self, level: u32) -> u64 {
        self.level_of
            .iter()
            .filter(|&&l| l != UNIDENTIFIED && l <= level)
            .count() as u64
    }

    pub fn identified_nodes(&self) -> Vec<NodeId> {
        (0..self.level_of.len() as u32)
            .map(NodeId)
            .filter(|&v| self.level_of[v.index()] != UNIDENTIFIED)
            .collect()
    }

    /// Fraction of nodes identified at levels 0..=1.
    pub fn uniqueness_c1(&self) -> f64 {
        self.identified_within(1) as f64 / self.level_of.len() as f64
    }

    /// Fraction of nodes identified at any level.
    pub fn uniqueness_final(&self) -> f64 {
        self.identified as f64 / self.level_of.len() as f64
    }

    /// Serializable summary per the report schema.
    pub fn summary(&self) -> CascadeSummary {
        CascadeSummary {
            seeds: self.per_level_counts.first().copied().unwrap_or(0),
            per_level_counts: self.per_level_counts.clone(),
            max_level: self.max_level_reached,
            uniqueness_c1: self.uniqueness_c1(),
            uniqueness_final: self.uniqueness_final(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CascadeSummary {
    pub seeds: u64,
    pub per_level_counts: Vec<u64>,
    pub max_level: u32,
    pub uniqueness_c1: f64,
    pub uniqueness_final: f64,
}

/// Runs the cascade from the singleton classes of the given d=1 partition.
pub fn cascade(g: &Graph, p1: &EquivalencePartition, budget: CascadeBudget) -> CascadeResult {
    cascade_impl(g, p1, budget, |_| {})
}

/// Shared driver; `reorder` lets tests permute each level's frontier to
/// check order independence.
pub(crate) fn cascade_impl<F>(
    g: &Graph,
    p1: &EquivalencePartition,
    budget: CascadeBudget,
    mut reorder: F,
) -> CascadeResult
where
    F: FnMut(&mut Vec<u32>),
{
    assert_eq!(p1.d(), 1, "cascade is seeded from the d=1 partition");
    assert_eq!(p1.node_count(), g.node_count());
    let n = g.node_count();
    let mut level_of: Vec<u32> = vec![UNIDENTIFIED; n];
    let mut frontier: Vec<u32> = Vec::new();
    for v in g.nodes() {
        if p1.class_size_of(v) == 1 {
            level_of[v.index()] = 0;
            frontier.push(v.0);
        }
    }
    let mut per_level_counts: Vec<u64> = vec![frontier.len() as u64];

    let mut level = 1u32;
    let mut scratch: Vec<(u32, u32)> = Vec::new(); // (class, node)
    loop {
        if let CascadeBudget::Levels(max) = budget {
            if level > max {
                break;
            }
        }
        if frontier.is_empty() {
            break;
        }
        reorder(&mut frontier);
        let mut newly: Vec<u32> = Vec::new();
        for &u in &frontier {
            let u = NodeId(u);
            scratch.clear();
            scratch.extend(
                g.neighbors(u)
                    .iter()
                    .map(|&v| (p1.class_of(v), v.0)),
            );
            scratch.sort_unstable();
            let mut i = 0;
            while i < scratch.len() {
                let mut j = i + 1;
                while j < scratch.len() && scratch[j].0 == scratch[i].0 {
                    j += 1;
                }
                if j - i == 1 {
                    // v is the only neighbor of u in its 1-equivalence class
                    let v = scratch[i].1 as usize;
                    if level_of[v] == UNIDENTIFIED {
                        level_of[v] = level;
                        newly.push(v as u32);
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
        .map(|l| if l == UNIDENTIFIED { None } else { Some(l) })
        .collect();
    CascadeResult::from_levels(levels, per_level_counts)
}

/// Fraction of nodes identified by one cascading step, computed from
/// scratch (d=1 partition plus a one-level cascade).
pub fn c1_uniqueness(g: &Graph) -> f64 {
    let p1 = partition(g, 1);
    cascade(g, &p1, CascadeBudget::Levels(1)).uniqueness_c1()
}
