//! Config-driven sweeps over boxes of join parameters.
//!
//! Cells are independent; they run on a bounded rayon pool and are merged
//! in cell-key order, so the files written do not depend on the worker
//! count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sasaki_core::cone::{find_csc_rays, ke_ray_solve};
use sasaki_core::join::{contact_invariants, relative_fano_indices, validate_join, BaseGeometry, JoinSpec};
use sasaki_core::topology::{enumerate_bouquet, gcd_invariant, graded_groups_from_presentation, sphere_join_cohomology};

use crate::error::{CliError, CliResult};

pub const MIN_PRECISION_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseSpec {
    Name(String),
    Geometry(BaseGeometry),
}

impl BaseSpec {
    pub fn resolve(&self) -> CliResult<BaseGeometry> {
        match self {
            BaseSpec::Name(n) => Ok(BaseGeometry::by_name(n)?),
            BaseSpec::Geometry(g) => {
                g.validate()?;
                Ok(g.clone())
            }
        }
    }
}

/// Inclusive integer ranges `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boxes {
    pub l1: [u64; 2],
    pub l2: [u64; 2],
    pub w1: [u64; 2],
    pub w2: [u64; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Scan,
    Einstein,
    Bouquet,
    Topology,
}

fn default_bits() -> u32 {
    64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusConfig {
    pub base: BaseSpec,
    pub boxes: Boxes,
    pub tasks: Vec<Task>,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    /// Relative paths are taken from the config file's directory.
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl CensusConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: CensusConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        for (name, [lo, hi]) in [
            ("l1", self.boxes.l1),
            ("l2", self.boxes.l2),
            ("w1", self.boxes.w1),
            ("w2", self.boxes.w2),
        ] {
            if lo == 0 || lo > hi {
                return Err(CliError::Config(format!("range {name} = [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
            }
        }
        if self.precision_bits < MIN_PRECISION_BITS {
            return Err(CliError::Config(format!("precision_bits must be at least {MIN_PRECISION_BITS}")));
        }
        if self.tasks.is_empty() {
            return Err(CliError::Config("tasks must not be empty".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        Ok(())
    }

    fn tasks(&self) -> Vec<Task> {
        let mut t = self.tasks.clone();
        t.sort();
        t.dedup();
        t
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellError {
    pub task: Task,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellResult {
    pub cell: [u64; 4],
    pub join: JoinSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub einstein: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bouquet: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topology: Option<Value>,
    pub errors: Vec<CellError>,
    #[serde(skip)]
    summary: SummaryRow,
}

#[derive(Clone, Debug, Default, Serialize)]
struct SummaryRow {
    root_count: Option<usize>,
    bound: Option<bool>,
    positivity_failures: Option<usize>,
    einstein_t: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusSummary {
    pub cells: usize,
    pub skipped_invalid: usize,
    pub cells_with_errors: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_root_count: Option<usize>,
    pub positivity_failure_cells: Vec<[u64; 4]>,
    pub output_dir: PathBuf,
    pub summary_csv: String,
}

fn cell_error(task: Task, e: sasaki_core::Error) -> CellError {
    CellError {
        task,
        kind: if e.is_mathematical() { "mathematical" } else { "validation" },
        message: e.to_string(),
    }
}

fn run_cell(join: &JoinSpec, tasks: &[Task], bits: u32) -> CellResult {
    let mut res = CellResult {
        cell: join.key().into(),
        join: join.clone(),
        scan: None,
        einstein: None,
        bouquet: None,
        topology: None,
        errors: Vec::new(),
        summary: SummaryRow::default(),
    };
    for &task in tasks {
        match task {
            Task::Scan => match find_csc_rays(join, bits) {
                Ok(scan) => {
                    res.summary.root_count = Some(scan.root_count());
                    res.summary.bound = Some(scan.bound_check);
                    res.summary.positivity_failures = Some(scan.positivity_failures.len());
                    res.scan = Some(serde_json::to_value(&scan).expect("scan serializes"));
                }
                Err(e) => res.errors.push(cell_error(task, e)),
            },
            Task::Einstein => {
                let applicable = join.base.kahler_einstein
                    && join.base.fano_index.is_some_and(|i| i > 0)
                    && relative_fano_indices(join.base.fano_index.unwrap_or(0) as u64, &join.w) == (join.l1, join.l2);
                if !applicable {
                    res.einstein = Some(json!({ "applicable": false }));
                    continue;
                }
                match ke_ray_solve(&join.base, &join.w, bits) {
                    Ok(ke) => {
                        res.summary.einstein_t = Some(ke.root.approx.clone());
                        res.einstein = Some(serde_json::to_value(&ke).expect("ke serializes"));
                    }
                    Err(e) => res.errors.push(cell_error(task, e)),
                }
            }
            Task::Bouquet => match enumerate_bouquet(join.chern_key(), join.l2) {
                Ok(recs) => {
                    let g = gcd_invariant(join);
                    let group = recs.into_iter().find(|r| r.gcd_invariant == g);
                    res.bouquet = Some(json!({
                        "chern_key": join.chern_key(),
                        "gcd_invariant": g,
                        "group_size": group.as_ref().map_or(0, |r| r.members.len()),
                        "regular": group.as_ref().is_some_and(|r| r.regular),
                    }));
                }
                Err(e) => res.errors.push(cell_error(task, e)),
            },
            Task::Topology => {
                let ring = sphere_join_cohomology(2, join).expect("p = 2 is supported");
                let groups = graded_groups_from_presentation(&ring);
                res.topology = Some(json!({
                    "contact": contact_invariants(join).ok(),
                    "gcd_invariant": gcd_invariant(join),
                    "sphere_join_p2": ring.to_string(),
                    "groups_p2": groups,
                }));
            }
        }
    }
    res
}

/// Valid joins in the box, in key order, and the number of skipped tuples.
pub fn enumerate_cells(base: &BaseGeometry, boxes: &Boxes) -> (Vec<JoinSpec>, usize) {
    let mut cells = Vec::new();
    let mut skipped = 0;
    for l1 in boxes.l1[0]..=boxes.l1[1] {
        for l2 in boxes.l2[0]..=boxes.l2[1] {
            for w1 in boxes.w1[0]..=boxes.w1[1] {
                for w2 in boxes.w2[0]..=boxes.w2[1].min(w1) {
                    match validate_join(base.clone(), l1, l2, (w1, w2)) {
                        Ok(j) => cells.push(j),
                        Err(_) => skipped += 1,
                    }
                }
            }
        }
    }
    (cells, skipped)
}

/// Runs every cell and returns results in cell-key order.
pub fn compute_census(config: &CensusConfig, workers: usize) -> CliResult<(Vec<CellResult>, usize)> {
    let base = config.base.resolve()?;
    let (cells, skipped) = enumerate_cells(&base, &config.boxes);
    let tasks = config.tasks();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let bits = config.precision_bits;
    let results = pool.install(|| cells.par_iter().map(|j| run_cell(j, &tasks, bits)).collect());
    Ok((results, skipped))
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

pub fn summary_csv(results: &[CellResult]) -> CliResult<String> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    wtr.write_record(["l1", "l2", "w1", "w2", "root_count", "bound", "positivity_failures", "einstein_t", "errors"])
        .map_err(io)?;
    for r in results {
        let errors: Vec<String> = r.errors.iter().map(|e| format!("{:?}: {}", e.task, e.message)).collect();
        let [l1, l2, w1, w2] = r.cell;
        wtr.write_record([
            l1.to_string(),
            l2.to_string(),
            w1.to_string(),
            w2.to_string(),
            opt(&r.summary.root_count),
            opt(&r.summary.bound),
            opt(&r.summary.positivity_failures),
            opt(&r.summary.einstein_t),
            errors.join("; "),
        ])
        .map_err(io)?;
    }
    let bytes = wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 output"))
}

pub fn cell_file_name(cell: &[u64; 4]) -> String {
    format!("cell_l{}-{}_w{}-{}.json", cell[0], cell[1], cell[2], cell[3])
}

/// Computes the census and writes `cells/*.json` and `summary.csv` under
/// `output_dir` (resolved against `config_dir` when relative).
pub fn run_census(config: &CensusConfig, config_dir: &Path, workers: Option<usize>) -> CliResult<CensusSummary> {
    config.validate()?;
    let workers = workers
        .or(config.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let (results, skipped) = compute_census(config, workers)?;

    let out = if config.output_dir.is_absolute() {
        config.output_dir.clone()
    } else {
        config_dir.join(&config.output_dir)
    };
    let cells_dir = out.join("cells");
    fs::create_dir_all(&cells_dir)?;
    for r in &results {
        let mut text = serde_json::to_string_pretty(r).expect("cell serializes");
        text.push('\n');
        fs::write(cells_dir.join(cell_file_name(&r.cell)), text)?;
    }
    fs::write(out.join("summary.csv"), summary_csv(&results)?)?;

    Ok(CensusSummary {
        cells: results.len(),
        skipped_invalid: skipped,
        cells_with_errors: results.iter().filter(|r| !r.errors.is_empty()).count(),
        min_root_count: results.iter().filter_map(|r| r.summary.root_count).min(),
        positivity_failure_cells: results
            .iter()
            .filter(|r| r.summary.positivity_failures.is_some_and(|n| n > 0))
            .map(|r| r.cell)
            .collect(),
        output_dir: config.output_dir.clone(),
        summary_csv: "summary.csv".into(),
    })
}

pub fn load_config(path: &Path) -> CliResult<(CensusConfig, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg = CensusConfig::from_json(&text)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, dir))
}
