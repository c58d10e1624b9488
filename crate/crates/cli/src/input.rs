//! Input resolution: edge-list files or inline model specs, with optional
//! giant-component restriction.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{bail, Context, Result};
use kanon::graph::{load_edge_list, Graph, LoadOptions, LoadReport};
use kanon::models::{generate, ModelFamily, ModelSpec};

pub struct ResolvedInput {
    pub graph: Graph,
    /// Original node labels (dense index -> label).
    pub labels: Vec<String>,
    pub report: Option<LoadReport>,
    /// Human-readable description of where the graph came from.
    pub source: String,
    /// Number of nodes outside the giant component that were dropped, when
    /// `--giant` was given.
    pub giant_dropped: Option<usize>,
}

pub fn resolve(
    input: Option<&Path>,
    model: Option<&str>,
    seed: u64,
    giant: bool,
) -> Result<ResolvedInput> {
    let mut resolved = match (input, model) {
        (Some(path), None) => {
            let file = File::open(path)
                .with_context(|| format!("cannot open input file {}", path.display()))?;
            let loaded = load_edge_list(BufReader::new(file), &LoadOptions::default())
                .with_context(|| format!("cannot parse edge list {}", path.display()))?;
            ResolvedInput {
                graph: loaded.graph,
                labels: loaded.labels,
                report: Some(loaded.report),
                source: path.display().to_string(),
                giant_dropped: None,
            }
        }
        (None, Some(spec_text)) => {
            let spec = parse_model_spec(spec_text, seed)?;
            let graph = generate(&spec).context("model generation failed")?;
            let labels = (0..graph.node_count()).map(|i| i.to_string()).collect();
            ResolvedInput {
                graph,
                labels,
                report: None,
                source: format!("model:{spec_text}"),
                giant_dropped: None,
            }
        }
        (Some(_), Some(_)) => bail!("--input and --model are mutually exclusive"),
        (None, None) => bail!("exactly one of --input or --model is required"),
    };

    if giant {
        let keep = resolved.graph.largest_component();
        let dropped = resolved.graph.node_count() - keep.len();
        if dropped > 0 {
            let (sub, to_old) = resolved.graph.induced_subgraph(&keep);
            resolved.labels = to_old
                .iter()
                .map(|&old| resolved.labels[old.index()].clone())
                .collect();
            resolved.graph = sub;
        }
        resolved.giant_dropped = Some(dropped);
    }
    Ok(resolved)
}

/// Model spec syntax: `er:n=1000,deg=5`, `ba:n=1000,m=5`,
/// `ws:n=1000,k=6,p=0.5`, each optionally with `,seed=42` (which overrides
/// the global `--seed`).
pub fn parse_model_spec(text: &str, default_seed: u64) -> Result<ModelSpec> {
    let (family_text, rest) = text
        .split_once(':')
        .with_context(|| format!("model spec '{text}' is missing the 'family:' prefix"))?;
    let family: ModelFamily = family_text
        .parse()
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut n = None;
    let mut degree = None;
    let mut rewiring = 0.5f64;
    let mut seed = default_seed;
    for part in rest.split(',') {
        let (key, value) = part
            .split_once('=')
            .with_context(|| format!("expected key=value, got '{part}'"))?;
        match key.trim() {
            "n" => n = Some(value.parse::<usize>().context("bad n")?),
            "deg" | "m" | "k" => degree = Some(value.parse::<f64>().context("bad degree")?),
            "p" => rewiring = value.parse::<f64>().context("bad rewiring probability")?,
            "seed" => seed = value.parse::<u64>().context("bad seed")?,
            other => bail!("unknown model parameter '{other}'"),
        }
    }
    let spec = ModelSpec {
        family,
        n: n.context("model spec requires n=<nodes>")?,
        degree_param: degree.context("model spec requires deg=/m=/k=<degree>")?,
        rewiring_p: rewiring,
        seed,
    };
    spec.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_model_specs() {
        let s = parse_model_spec("ba:n=100,m=2", 7).unwrap();
        assert_eq!(s.family, ModelFamily::Ba);
        assert_eq!(s.n, 100);
        assert_eq!(s.degree_param, 2.0);
        assert_eq!(s.seed, 7);

        let s = parse_model_spec("ws:n=50,k=4,p=0.25,seed=9", 7).unwrap();
        assert_eq!(s.rewiring_p, 0.25);
        assert_eq!(s.seed, 9);

        assert!(parse_model_spec("zz:n=10,deg=2", 0).is_err());
        assert!(parse_model_spec("er:n=10", 0).is_err());
        assert!(parse_model_spec("er:deg=2", 0).is_err());
        assert!(parse_model_spec("ws:n=10,k=3", 0).is_err());
    }
}
