//! Erdős–Rényi, Barabási–Albert, and Watts–Strogatz generators with fully
//! reproducible seeding (ChaCha8, one stream per generated graph).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Er,
    Ba,
    Ws,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Er => "er",
            ModelFamily::Ba => "ba",
            ModelFamily::Ws => "ws",
        }
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(ModelFamily::Er),
            "ba" => Ok(ModelFamily::Ba),
            "ws" => Ok(ModelFamily::Ws),
            other => Err(ModelError::Invalid(format!("unknown model family '{other}'"))),
        }
    }
}

/// One generated graph: family, size, density knob, and seed.
///
/// `degree_param` is the target average degree for ER, the number of
/// connections per arriving node (m) for BA, and the (even) ring-lattice
/// neighbor count for WS.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub n: usize,
    pub degree_param: f64,
    /// WS rewiring probability; ignored by ER and BA.
    #[serde(default = "default_rewiring")]
    pub rewiring_p: f64,
    pub seed: u64,
}

fn default_rewiring() -> f64 {
    0.5
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("infeasible model spec: {0}")]
    Infeasible(String),
    #[error("invalid model spec: {0}")]
    Invalid(String),
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 2 {
            return Err(ModelError::Invalid("n must be at least 2".into()));
        }
        if !self.degree_param.is_finite() || self.degree_param < 1.0 {
            return Err(ModelError::Invalid(
                "degree_param must be at least 1".into(),
            ));
        }
        match self.family {
            ModelFamily::Er => {
                if self.degree_param > (self.n - 1) as f64 {
                    return Err(ModelError::Infeasible(format!(
                        "ER average degree {} exceeds n-1 = {}",
                        self.degree_param,
                        self.n - 1
                    )));
                }
            }
            ModelFamily::Ba => {
                let m = self.degree_param;
                if m.fract() != 0.0 {
                    return Err(ModelError::Invalid("BA m must be an integer".into()));
                }
                if m as usize >= self.n {
                    return Err(ModelError::Infeasible(format!(
                        "BA m = {m} must be smaller than n = {}",
                        self.n
                    )));
                }
            }
            ModelFamily::Ws => {
                let k = self.degree_param;
                if k.fract() != 0.0 {
                    return Err(ModelError::Invalid("WS k must be an integer".into()));
                }
                if !(k as usize).is_multiple_of(2) {
                    return Err(ModelError::Invalid("WS k must be even".into()));
                }
                if k as usize >= self.n {
                    return Err(ModelError::Infeasible(format!(
                        "WS k = {k} must be smaller than n = {}",
                        self.n
                    )));
                }
                if !(0.0..=1.0).contains(&self.rewiring_p) {
                    return Err(ModelError::Invalid(
                        "WS rewiring probability must be in [0, 1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generates a graph from the spec. Nodes that end up without edges are
/// dropped (mirroring edge-list preprocessing), so the returned node count
/// may be smaller than `spec.n`.
pub fn generate(spec: &ModelSpec) -> Result<Graph, ModelError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = match spec.family {
        ModelFamily::Er => erdos_renyi(spec.n, spec.degree_param, &mut rng),
        ModelFamily::Ba => barabasi_albert(spec.n, spec.degree_param as usize, &mut rng),
        ModelFamily::Ws => watts_strogatz(
            spec.n,
            spec.degree_param as usize,
            spec.rewiring_p,
            &mut rng,
        ),
    };
    let g = Graph::from_edges(spec.n, edges);
    Ok(drop_isolated(&g))
}

fn drop_isolated(g: &Graph) -> Graph {
    let keep: Vec<NodeId> = g.nodes().filter(|&v| g.degree(v) > 0).collect();
    if keep.len() == g.node_count() {
        return g.clone();
    }
    g.induced_subgraph(&keep).0
}

/// G(n, p) with p = degree / (n-1), sampled by geometric edge skipping so
/// sparse graphs cost O(n + m).
fn erdos_renyi(n: usize, degree: f64, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let p = degree / (n - 1) as f64;
    let mut edges = Vec::with_capacity((degree * n as f64 / 2.0) as usize + 16);
    if p >= 1.0 {
        for v in 0..n as u32 {
            for w in 0..v {
                edges.push((w, v));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen_range(0.0..1.0);
        let skip = ((1.0 - r).ln() / log_q).floor() as i64;
        w += 1 + skip;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    edges
}

/// Preferential attachment over a seed clique on m nodes: each arriving
/// node connects to m distinct existing nodes chosen proportionally to
/// degree (by uniform sampling from the endpoint pool).
fn barabasi_albert(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m * (n - m) + m * (m - 1) / 2);
    let mut pool: Vec<u32> = Vec::with_capacity(2 * m * n);
    for i in 0..m as u32 {
        for j in 0..i {
            edges.push((j, i));
            pool.push(j);
            pool.push(i);
        }
    }
    let mut targets: Vec<u32> = Vec::with_capacity(m);
    for v in m as u32..n as u32 {
        targets.clear();
        while targets.len() < m {
            // Uniform over the endpoint pool is degree-proportional; the
            // pool is empty only for m = 1's first arrival, where the only
            // node is 0.
            let candidate = if pool.is_empty() {
                rng.gen_range(0..v)
            } else {
                pool[rng.gen_range(0..pool.len())]
            };
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            pool.push(t);
            pool.push(v);
        }
    }
    edges
}

/// Ring lattice with k neighbors per node; each original edge is rewired
/// with probability p to a uniform target, skipping self-loops and existing
/// edges (kept in place when no valid target is found).
fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(u32, u32)> {
    use std::collections::HashSet;
    let mut present: HashSet<(u32, u32)> = HashSet::with_capacity(n * k / 2);
    let norm = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };
    for j in 1..=(k / 2) {
        for u in 0..n {
            let t = ((u + j) % n) as u32;
            present.insert(norm(u as u32, t));
        }
    }
    if p > 0.0 {
        for j in 1..=(k / 2) {
            for u in 0..n {
                let u32u = u as u32;
                let t = ((u + j) % n) as u32;
                if !rng.gen_bool(p) {
                    continue;
                }
                let key = norm(u32u, t);
                if !present.contains(&key) {
                    continue; // already rewired away by an earlier pass
                }
                let mut replaced = None;
                for _ in 0..n {
                    let w = rng.gen_range(0..n as u32);
                    if w == u32u {
                        continue;
                    }
                    if !present.contains(&norm(u32u, w)) {
                        replaced = Some(w);
                        break;
                    }
                }
                if let Some(w) = replaced {
                    present.remove(&key);
                    present.insert(norm(u32u, w));
                }
            }
        }
    }
    present.into_iter().collect()
}
