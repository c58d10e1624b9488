//! Grid sweeps over graph models: one row per (family, n, degree, measure)
//! with mean and standard deviation over repeated generation, producing the
//! plot-ready tables behind uniqueness maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{cascade, CascadeBudget};
use crate::equivalence::partition;
use crate::graph::Graph;
use crate::models::{generate, ModelFamily, ModelSpec};
use crate::twins::{find_twins, twin_cascade, twin_unique_fraction};

/// Budget value as it appears in sweep configuration and output: a level
/// count or "exhaust".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BudgetSpec {
    Levels(u32),
    Word(ExhaustWord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExhaustWord {
    Exhaust,
}

impl BudgetSpec {
    pub fn to_budget(self) -> CascadeBudget {
        match self {
            BudgetSpec::Levels(l) => CascadeBudget::Levels(l),
            BudgetSpec::Word(_) => CascadeBudget::Exhaust,
        }
    }

    fn label(self) -> String {
        match self {
            BudgetSpec::Levels(l) => l.to_string(),
            BudgetSpec::Word(_) => "exhaust".to_string(),
        }
    }
}

/// The full sweep configuration. Every axis is explicit so arbitrary grids
/// can be run from a config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepGrid {
    pub families: Vec<ModelFamily>,
    pub n_values: Vec<usize>,
    pub degree_values: Vec<f64>,
    /// d values for the d-k-anonymity uniqueness measure.
    #[serde(default)]
    pub d_values: Vec<u32>,
    /// Cascade budgets; "exhaust" additionally reports max-level.
    #[serde(default)]
    pub cascade_budgets: Vec<BudgetSpec>,
    /// Also compute twin-unique variants of every measure.
    #[serde(default)]
    pub twin_variants: bool,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rewiring")]
    pub rewiring_p: f64,
}

fn default_repetitions() -> u32 {
    10
}

fn default_rewiring() -> f64 {
    0.5
}

/// One output row: mean/std of one measure over the repetitions of one grid
/// cell. `reps = 0` with an error message records a failed cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub degree: f64,
    pub measure: String,
    pub d_or_level: String,
    pub mean: f64,
    pub std: f64,
    pub reps: u32,
    pub error: Option<String>,
}

/// Derives the per-graph seed from the grid seed and the cell coordinates,
/// so every repetition of every cell has its own deterministic stream.
pub fn cell_seed(grid_seed: u64, family: ModelFamily, n: usize, degree: f64, rep: u32) -> u64 {
    let mut h = splitmix64(grid_seed);
    h = splitmix64(h ^ family.name().as_bytes().iter().fold(0u64, |a, &b| a << 8 | b as u64));
    h = splitmix64(h ^ n as u64);
    h = splitmix64(h ^ degree.to_bits());
    h = splitmix64(h ^ rep as u64);
    h
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

struct MeasureValues {
    measure: &'static str,
    d_or_level: String,
    values: Vec<f64>,
}

/// Runs the grid. Cells execute independently (in parallel) and rows come
/// back sorted by (family, n, degree, measure, d_or_level) regardless of
/// execution order. A failing cell yields rows with `reps = 0` and the
/// error recorded; the sweep continues.
pub fn sweep(grid: &SweepGrid) -> Vec<SweepRow> {
    let mut cells = Vec::new();
    for &family in &grid.families {
        for &n in &grid.n_values {
            for &degree in &grid.degree_values {
                cells.push((family, n, degree));
            }
        }
    }
    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .flat_map_iter(|&(family, n, degree)| run_cell(grid, family, n, degree))
        .collect();
    rows.sort_by(|a, b| {
        (&a.family, a.n, ordered(a.degree), &a.measure, &a.d_or_level).cmp(&(
            &b.family,
            b.n,
            ordered(b.degree),
            &b.measure,
            &b.d_or_level,
        ))
    });
    rows
}

fn ordered(x: f64) -> u64 {
    // degrees are non-negative finite config values; bit order matches
    // numeric order for those
    x.to_bits()
}

fn run_cell(grid: &SweepGrid, family: ModelFamily, n: usize, degree: f64) -> Vec<SweepRow> {
    let mut collected: Vec<MeasureValues> = Vec::new();
    for rep in 0..grid.repetitions {
        let spec = ModelSpec {
            family,
            n,
            degree_param: degree,
            rewiring_p: grid.rewiring_p,
            seed: cell_seed(grid.seed, family, n, degree, rep),
        };
        let g = match generate(&spec) {
            Ok(g) => g,
            Err(e) => {
                return measure_labels(grid)
                    .into_iter()
                    .map(|(measure, d_or_level)| SweepRow {
                        family: family.name().to_string(),
                        n,
                        degree,
                        measure: measure.to_string(),
                        d_or_level,
                        mean: f64::NAN,
                        std: f64::NAN,
                        reps: 0,
                        error: Some(e.to_string()),
                    })
                    .collect();
            }
        };
        for m in measure_graph(grid, &g) {
            match collected
                .iter_mut()
                .find(|c| c.measure == m.measure && c.d_or_level == m.d_or_level)
            {
                Some(c) => c.values.extend(m.values),
                None => collected.push(m),
            }
        }
    }
    collected
        .into_iter()
        .map(|c| {
            let (mean, std) = mean_std(&c.values);
            SweepRow {
                family: family.name().to_string(),
                n,
                degree,
                measure: c.measure.to_string(),
                d_or_level: c.d_or_level,
                mean,
                std,
                reps: c.values.len() as u32,
                error: None,
            }
        })
        .collect()
}

fn measure_labels(grid: &SweepGrid) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    for &d in &grid.d_values {
        out.push(("dk_uniqueness", d.to_string()));
        if grid.twin_variants {
            out.push(("twin_dk_uniqueness", d.to_string()));
        }
    }
    for &b in &grid.cascade_budgets {
        out.push(("cascade_uniqueness", b.label()));
        if grid.twin_variants {
            out.push(("twin_cascade_uniqueness", b.label()));
        }
        if matches!(b, BudgetSpec::Word(_)) {
            out.push(("cascade_max_level", b.label()));
        }
    }
    out
}

fn measure_graph(grid: &SweepGrid, g: &Graph) -> Vec<MeasureValues> {
    let mut out = Vec::new();
    let twins = if grid.twin_variants {
        Some(find_twins(g))
    } else {
        None
    };
    let needs_p1 = !grid.cascade_budgets.is_empty();
    let mut p1 = None;
    for &d in &grid.d_values {
        let p = partition(g, d);
        if let Some(t) = &twins {
            out.push(MeasureValues {
                measure: "twin_dk_uniqueness",
                d_or_level: d.to_string(),
                values: vec![twin_unique_fraction(&p, t)],
            });
        }
        let uniqueness = p.uniqueness();
        if d == 1 && needs_p1 {
            p1 = Some(p);
        }
        out.push(MeasureValues {
            measure: "dk_uniqueness",
            d_or_level: d.to_string(),
            values: vec![uniqueness],
        });
    }
    if needs_p1 && p1.is_none() {
        p1 = Some(partition(g, 1));
    }
    if let Some(p1) = &p1 {
        for &b in &grid.cascade_budgets {
            let result = cascade(g, p1, b.to_budget());
            out.push(MeasureValues {
                measure: "cascade_uniqueness",
                d_or_level: b.label(),
                values: vec![result.uniqueness_final()],
            });
            if matches!(b, BudgetSpec::Word(_)) {
                out.push(MeasureValues {
                    measure: "cascade_max_level",
                    d_or_level: b.label(),
                    values: vec![result.max_level_reached() as f64],
                });
            }
            if let Some(t) = &twins {
                let tr = twin_cascade(g, p1, t, b.to_budget());
                out.push(MeasureValues {
                    measure: "twin_cascade_uniqueness",
                    d_or_level: b.label(),
                    values: vec![tr.uniqueness_final()],
                });
            }
        }
    }
    out
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// CSV rendering: `family,n,degree,measure,d_or_level,mean,std,reps`, with
/// fractions in fixed 6-decimal form. Failed cells carry `nan` fields.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("family,n,degree,measure,d_or_level,mean,std,reps\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{}\n",
            r.family, r.n, r.degree, r.measure, r.d_or_level, r.mean, r.std, r.reps
        ));
    }
    out
}
