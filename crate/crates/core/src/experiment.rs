//! Multi-seed, multi-n consistency sweeps.
//!
//! A plan names one generator (a chain or a lattice field), a grid of sample
//! sizes, a seed count and a list of estimators. Every `(n, seed)` cell draws
//! one sample and runs every estimator on it. Cells may run in parallel;
//! rows are always emitted in plan order, so the CSV depends only on the
//! plan.
//!
//! ```toml
//! name = "two-state"
//! n = [1000, 10000, 100000]
//! seeds = 100
//! base_seed = 1
//!
//! [model]
//! kind = "two_state"
//! p = 0.1
//! q = 0.1
//!
//! [[estimators]]
//! method = "fluctuation"
//! window = { kind = "fixed", k_max = 4 }
//!
//! [[estimators]]
//! method = "bic"
//! ```

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::methods::MethodConfig;
use crate::model_spec::{lattice_from_toml, ChainSpec};
use crate::simulate::{derive_seed, sample_lattice, sample_markov, stationary_distribution, LatticeModel, MarkovModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Written to the `model` column; defaults to the generator kind.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub model: Option<ChainSpec>,
    /// Chain spec file, relative to the plan file.
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default)]
    pub lattice: Option<LatticeModel>,
    #[serde(default)]
    pub lattice_file: Option<PathBuf>,
    /// Sequence lengths, or lattice sides for a lattice generator.
    pub n: Vec<usize>,
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    pub estimators: Vec<MethodConfig>,
    /// Fill `elapsed_ms`. Off by default because timings differ between
    /// runs.
    #[serde(default)]
    pub timing: bool,
    /// Where the CLI writes the CSV; stdout when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// The generator a plan resolves to.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Chain(MarkovModel),
    Lattice(LatticeModel),
}

impl Generator {
    /// The order (or range) estimators should find.
    pub fn true_order(&self) -> usize {
        match self {
            Generator::Chain(m) => m.effective_order(),
            Generator::Lattice(l) => l.declared_range(),
        }
    }
}

impl ExperimentPlan {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(format!("experiment plan: {e}")))
    }

    /// Reads a plan and inlines any referenced model files.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut plan = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        if let Some(f) = plan.model_file.take() {
            plan.model = Some(ChainSpec::from_toml(&std::fs::read_to_string(dir.join(f))?)?);
        }
        if let Some(f) = plan.lattice_file.take() {
            plan.lattice = Some(lattice_from_toml(&std::fs::read_to_string(dir.join(f))?)?);
        }
        Ok(plan)
    }

    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match (&self.model, &self.lattice) {
            (Some(m), _) => m.kind().to_owned(),
            (_, Some(LatticeModel::Iid { .. })) => "lattice_iid".into(),
            (_, Some(LatticeModel::NearestNeighborGibbs { .. })) => "nearest_neighbor_gibbs".into(),
            _ => "unnamed".into(),
        }
    }

    /// Checks the plan and builds its generator.
    pub fn validate(&self) -> Result<Generator> {
        let bad = |m: &str| Err(Error::Precondition(format!("experiment plan: {m}")));
        if self.model_file.is_some() || self.lattice_file.is_some() {
            return bad("model files must be resolved (load the plan with from_file)");
        }
        if self.n.is_empty() {
            return bad("n grid is empty");
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n grid must be strictly increasing");
        }
        if self.seeds == 0 {
            return bad("seed count must be at least 1");
        }
        if self.estimators.is_empty() {
            return bad("estimator list is empty");
        }
        let generator = match (&self.model, &self.lattice) {
            (Some(spec), None) => {
                let model = spec.build()?;
                // Fail here rather than in every cell.
                stationary_distribution(&model)?;
                Generator::Chain(model)
            }
            (None, Some(lattice)) => {
                lattice.validate()?;
                Generator::Lattice(lattice.clone())
            }
            _ => return bad("exactly one of model / lattice is required"),
        };
        let lattice = matches!(generator, Generator::Lattice(_));
        if let Some(e) = self.estimators.iter().find(|e| e.is_lattice() != lattice) {
            return bad(&format!(
                "method {} does not apply to a {} generator",
                e.method(),
                if lattice { "lattice" } else { "chain" }
            ));
        }
        Ok(generator)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub method: String,
    pub chosen_order: Option<usize>,
    pub true_order: usize,
    pub correct: Option<bool>,
    pub elapsed_ms: Option<u64>,
    pub error: Option<String>,
}

/// Fraction correct per method and `n`. Failed runs count as incorrect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub n: usize,
    pub runs: usize,
    pub correct: usize,
    pub errors: usize,
    pub fraction_correct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResult {
    pub fn rows_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("in-memory CSV write");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV flush")).unwrap()
    }

    pub fn summary_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["method", "n", "runs", "correct", "errors", "fraction_correct"])
            .unwrap();
        for s in &self.summary {
            w.write_record([
                s.method.clone(),
                s.n.to_string(),
                s.runs.to_string(),
                s.correct.to_string(),
                s.errors.to_string(),
                format!("{:.4}", s.fraction_correct),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Result rows, a blank line, then the summary table.
    pub fn to_csv(&self) -> String {
        format!("{}\n{}", self.rows_csv(), self.summary_csv())
    }

    /// Parses the result rows back from [`Self::rows_csv`] output.
    pub fn parse_rows(csv_text: &str) -> Result<Vec<ResultRow>> {
        let mut r = csv::Reader::from_reader(csv_text.as_bytes());
        r.deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("result CSV: {e}")))
    }
}

enum Drawn {
    Chain(crate::seqcore::Sequence),
    Lattice(crate::mrf::LatticeConfiguration),
}

/// Runs every cell. `exec` chooses whether cells run in parallel; each
/// estimator runs sequentially inside its cell.
pub fn run_experiment(plan: &ExperimentPlan, exec: Execution) -> Result<ExperimentResult> {
    let generator = plan.validate()?;
    let truth = generator.true_order();
    let label = plan.label();
    let cells: Vec<(usize, u64)> = plan
        .n
        .iter()
        .flat_map(|&n| (0..plan.seeds).map(move |i| (n, i)))
        .collect();

    let per_cell = exec.map(cells, |(n, i)| {
        let seed = derive_seed(plan.base_seed, i);
        let sample = match &generator {
            Generator::Chain(m) => sample_markov(m, n, seed).map(Drawn::Chain),
            Generator::Lattice(l) => sample_lattice(l, n, seed).map(Drawn::Lattice),
        };
        plan.estimators
            .iter()
            .map(|est| {
                let start = Instant::now();
                let outcome = sample.as_ref().map_err(|e| e.to_string()).and_then(|s| {
                    match s {
                        Drawn::Chain(x) => est.run_sequence(x, Execution::Sequential),
                        Drawn::Lattice(x) => est.run_lattice(x, Execution::Sequential),
                    }
                    .map_err(|e| e.to_string())
                });
                let elapsed = plan.timing.then(|| start.elapsed().as_millis() as u64);
                let (chosen, error) = match outcome {
                    Ok(r) => (Some(r.chosen_order), None),
                    Err(e) => (None, Some(e)),
                };
                ResultRow {
                    model: label.clone(),
                    n,
                    seed,
                    method: est.method().to_string(),
                    chosen_order: chosen,
                    true_order: truth,
                    correct: chosen.map(|c| c == truth),
                    elapsed_ms: elapsed,
                    error,
                }
            })
            .collect::<Vec<_>>()
    });
    let rows: Vec<ResultRow> = per_cell.into_iter().flatten().collect();

    let mut summary = Vec::new();
    for est in &plan.estimators {
        let method = est.method().to_string();
        for &n in &plan.n {
            if summary.iter().any(|s: &SummaryRow| s.method == method && s.n == n) {
                continue;
            }
            let sel: Vec<&ResultRow> = rows.iter().filter(|r| r.method == method && r.n == n).collect();
            let correct = sel.iter().filter(|r| r.correct == Some(true)).count();
            summary.push(SummaryRow {
                method: method.clone(),
                n,
                runs: sel.len(),
                correct,
                errors: sel.iter().filter(|r| r.error.is_some()).count(),
                fraction_correct: correct as f64 / sel.len() as f64,
            });
        }
    }
    Ok(ExperimentResult { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = r#"
n = [200, 400]
seeds = 3
base_seed = 9

[model]
kind = "two_state"
p = 0.1
q = 0.1

[[estimators]]
method = "bic"
k_max = 3

[[estimators]]
method = "fluctuation"
"#;

    #[test]
    fn plan_parses_and_runs() {
        let plan = ExperimentPlan::from_toml(PLAN).unwrap();
        assert_eq!(plan.label(), "two_state");
        let res = run_experiment(&plan, Execution::Sequential).unwrap();
        assert_eq!(res.rows.len(), 2 * 3 * 2);
        assert_eq!(res.summary.len(), 4);
        assert!(res.rows.iter().all(|r| r.true_order == 1 && r.elapsed_ms.is_none()));
        let csv = res.to_csv();
        assert!(csv.starts_with("model,n,seed,method,chosen_order,true_order,correct,elapsed_ms,error\n"));
        assert_eq!(ExperimentResult::parse_rows(&res.rows_csv()).unwrap(), res.rows);
        let again = run_experiment(&plan, Execution::Parallel).unwrap();
        assert_eq!(again.to_csv(), csv);
    }

    #[test]
    fn plan_validation() {
        let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
        plan.estimators.clear();
        assert!(plan.validate().is_err());
        let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
        plan.n = vec![400, 200];
        assert!(plan.validate().is_err());
        let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
        plan.seeds = 0;
        assert!(plan.validate().is_err());
        let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
        plan.estimators
            .push(MethodConfig::default_for(crate::report::Method::Mrf));
        assert!(plan.validate().is_err());
    }

    #[test]
    fn failures_become_rows() {
        let mut plan = ExperimentPlan::from_toml(PLAN).unwrap();
        plan.n = vec![2];
        let res = run_experiment(&plan, Execution::Sequential).unwrap();
        assert!(res.rows.iter().all(|r| r.error.is_some() && r.chosen_order.is_none()));
        assert!(res.summary.iter().all(|s| s.fraction_correct == 0.0 && s.errors == 3));
    }
}
