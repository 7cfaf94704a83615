//! Method runners and the multi-seed comparison experiment.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::aeda;
use crate::classifier::{evaluate, train, TrainConfig};
use crate::error::{Error, Result};
use crate::harness::dataset::{load_dataset, DataFormat, LabeledDataset, LabeledText};
use crate::harness::report::{CellFailure, EvalReport, ReportCell};
use crate::harness::sampling::{make_val_split, subsample};
use crate::harness::{to_jsonl, write_atomic};
use crate::labels::smooth_label;
use crate::policy::{apply_policy, AugmentationPolicy, AugmentedExample, PolicySpace, Provenance};
use crate::rng::{derive_seed, stream, tags};
use crate::search::{optimize, run_seeds, SearchConfig, SearchData, TrialRecord};
use crate::textops::{detokenize, load_lexicon, tokenize, SynonymLexicon};

/// The compared augmentation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Originals only, hard labels.
    Baseline,
    /// Fixed uniform EDA, hard labels.
    Eda,
    /// Fixed AEDA copies, hard labels.
    Aeda,
    /// Fixed EDA with smoothed labels on augmented copies.
    SoftedaFixed,
    /// Searched policy.
    Ours,
    /// Searched policy with both smoothing factors pinned to zero.
    OursNoLs,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Baseline,
        Method::Eda,
        Method::Aeda,
        Method::SoftedaFixed,
        Method::Ours,
        Method::OursNoLs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Eda => "eda",
            Method::Aeda => "aeda",
            Method::SoftedaFixed => "softeda_fixed",
            Method::Ours => "ours",
            Method::OursNoLs => "ours_no_ls",
        }
    }
}

/// Hyperparameters of the fixed-setting methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedParams {
    pub alpha: f64,
    pub n_aug: u32,
    pub eps_aug: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            alpha: 0.1,
            n_aug: 4,
            eps_aug: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: DataFormat,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub label_names: Option<Vec<String>>,
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

fn default_fraction() -> f64 {
    0.2
}

/// Everything `compare` needs; relative paths resolve against the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub n_train: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub space: PolicySpace,
    #[serde(default)]
    pub train: TrainConfig,
    /// Lexicon file; the bundled lexicon when absent.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
    /// Share of each subsample held out for validation.
    #[serde(default = "default_fraction")]
    pub val_fraction: f64,
    /// Share of the file held out as test data when it has no test split.
    #[serde(default = "default_fraction")]
    pub test_fraction: f64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.dataset.path);
        resolve(&mut cfg.output_dir);
        if let Some(l) = cfg.lexicon.as_mut() {
            resolve(l);
        }
        Ok(cfg)
    }

    pub fn validate(&self, n_class: usize) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::domain("seeds must be non-empty"));
        }
        let mut s = self.seeds.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != self.seeds.len() {
            return Err(Error::domain("seeds must be distinct"));
        }
        if self.methods.is_empty() {
            return Err(Error::domain("methods must be non-empty"));
        }
        if self.n_train < n_class {
            return Err(Error::domain(format!("n_train {} < n_class {n_class}", self.n_train)));
        }
        self.train.validate()?;
        self.search.validate()?;
        self.space.validate()
    }
}

/// The splits one experiment seed works on.
#[derive(Debug, Clone)]
pub struct ExperimentSplits {
    pub n_class: usize,
    pub train: Vec<LabeledText>,
    pub val: Vec<LabeledText>,
    pub test: Vec<LabeledText>,
}

/// Method settings shared by every cell.
#[derive(Debug, Clone, Default)]
pub struct MethodSettings {
    pub fixed: FixedParams,
    pub search: SearchConfig,
    pub space: PolicySpace,
    pub train: TrainConfig,
}

impl MethodSettings {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        MethodSettings {
            fixed: cfg.fixed,
            search: SearchConfig { train: cfg.train, ..cfg.search },
            space: cfg.space.clone(),
            train: cfg.train,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    /// Test accuracy in `[0, 1]`.
    pub accuracy: f64,
    /// The policy used for the final training run, if the method has one.
    pub policy: Option<AugmentationPolicy>,
    pub trials: Vec<TrialRecord>,
}

fn aeda_examples(
    data: &[LabeledText],
    n_class: usize,
    n_aug: u32,
    seed: u64,
) -> Result<Vec<AugmentedExample>> {
    let mut rng = stream(seed);
    let mut out = Vec::with_capacity(data.len() * (1 + n_aug as usize));
    let mut copies = Vec::new();
    for (i, ex) in data.iter().enumerate() {
        let label = smooth_label(ex.label, n_class, 0.0)?;
        out.push(AugmentedExample {
            text: ex.text.clone(),
            soft_label: label.clone(),
            provenance: Provenance::Original,
            source_index: i,
        });
        let seq = tokenize(&ex.text);
        if seq.is_empty() {
            continue;
        }
        for _ in 0..n_aug {
            copies.push(AugmentedExample {
                text: detokenize(&aeda(&seq, &mut rng)?),
                soft_label: label.clone(),
                provenance: Provenance::AedaAugmented,
                source_index: i,
            });
        }
    }
    out.extend(copies);
    Ok(out)
}

fn write_trials(path: &Path, trials: &[TrialRecord]) -> Result<()> {
    write_atomic(path, to_jsonl(trials)?.as_bytes())
}

/// Trains with one method and returns its accuracy on the untouched test split.
///
/// All methods share the augmentation and training seeds derived from
/// `seed`, so the comparison within one seed is paired. When `artifacts` is
/// given, searched methods persist `trials.jsonl` (appended per trial) and
/// `best_policy.json` there.
pub fn run_method(
    method: Method,
    splits: &ExperimentSplits,
    lex: &SynonymLexicon,
    settings: &MethodSettings,
    seed: u64,
    artifacts: Option<&Path>,
) -> Result<MethodResult> {
    let base = derive_seed(seed, tags::METHOD);
    let (aug_seed, train_seed) = run_seeds(base, 0);
    let fixed = settings.fixed;
    let mut trials = Vec::new();
    let policy = match method {
        Method::Baseline => Some(AugmentationPolicy::no_augmentation()),
        Method::Eda => Some(AugmentationPolicy::fixed_eda(fixed.alpha, fixed.n_aug, 0.0)),
        Method::SoftedaFixed => Some(AugmentationPolicy::fixed_eda(fixed.alpha, fixed.n_aug, fixed.eps_aug)),
        Method::Aeda => None,
        Method::Ours | Method::OursNoLs => {
            let cfg = SearchConfig {
                seed: derive_seed(base, tags::SUGGEST),
                fix_smoothing_to_zero: method == Method::OursNoLs,
                train: settings.train,
                ..settings.search
            };
            let data = SearchData {
                train: &splits.train,
                val: &splits.val,
                n_class: splits.n_class,
            };
            let log_path = artifacts.map(|d| d.join("trials.jsonl"));
            if let Some(p) = &log_path {
                write_atomic(p, b"")?;
            }
            let outcome = optimize(data, &settings.space, lex, &cfg, |t| {
                if let Some(p) = &log_path {
                    use std::io::Write;
                    let mut f = std::fs::OpenOptions::new()
                        .append(true)
                        .open(p)
                        .map_err(|e| Error::io(p, e))?;
                    writeln!(f, "{}", serde_json::to_string(t)?).map_err(|e| Error::io(p, e))?;
                }
                Ok(())
            })?;
            if let Some(p) = &log_path {
                write_trials(p, &outcome.trials)?;
            }
            trials = outcome.trials;
            Some(outcome.best.policy)
        }
    };

    let train_set = match &policy {
        Some(p) => apply_policy(&splits.train, splits.n_class, p, lex, &mut stream(aug_seed))?.examples,
        None => aeda_examples(&splits.train, splits.n_class, fixed.n_aug, aug_seed)?,
    };
    if let (Some(dir), Some(p)) = (artifacts, &policy) {
        let mut json = serde_json::to_string_pretty(p)?;
        json.push('\n');
        write_atomic(&dir.join("best_policy.json"), json.as_bytes())?;
    }
    let outcome = train(&train_set, &splits.val, &settings.train, &mut stream(train_seed))?;
    let accuracy = evaluate(&outcome.model, &splits.test)?;
    Ok(MethodResult {
        accuracy,
        policy,
        trials,
    })
}

/// Loads the configured dataset, carving a stratified test split when the
/// file has none.
pub fn prepare_dataset(cfg: &ExperimentConfig) -> Result<LabeledDataset> {
    let mut ds = load_dataset(&cfg.dataset.path, cfg.dataset.format, cfg.dataset.label_names.as_deref())?;
    if let Some(name) = &cfg.dataset.name {
        ds.name = name.clone();
    }
    if ds.test.is_empty() {
        let (train, test) = make_val_split(&ds.train, ds.n_class, cfg.test_fraction, 0)?;
        ds.train = train;
        ds.test = test;
    }
    ds.validate()?;
    Ok(ds)
}

/// Subsample and validation holdout for one experiment seed.
pub fn splits_for_seed(ds: &LabeledDataset, n_train: usize, val_fraction: f64, seed: u64) -> Result<ExperimentSplits> {
    let sub = subsample(ds, n_train, seed)?;
    let (train, val) = make_val_split(&sub.train, ds.n_class, val_fraction, seed)?;
    Ok(ExperimentSplits {
        n_class: ds.n_class,
        train,
        val,
        test: ds.test.clone(),
    })
}

/// Runs every (method, seed) cell and aggregates test accuracy (in points).
///
/// Cells run in parallel; results are reduced in config order, so the report
/// does not depend on scheduling. Failed cells are recorded and excluded.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvalReport> {
    let ds = prepare_dataset(cfg)?;
    cfg.validate(ds.n_class)?;
    let lex_owned;
    let lex = match &cfg.lexicon {
        Some(p) => {
            lex_owned = load_lexicon(p)?;
            &lex_owned
        }
        None => SynonymLexicon::bundled(),
    };
    let settings = MethodSettings::from_config(cfg);
    let splits: Vec<ExperimentSplits> = cfg
        .seeds
        .iter()
        .map(|&s| splits_for_seed(&ds, cfg.n_train, cfg.val_fraction, s))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, Method)> = (0..cfg.seeds.len())
        .flat_map(|si| cfg.methods.iter().map(move |&m| (si, m)))
        .collect();
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(si, m)| {
            let seed = cfg.seeds[si];
            let dir = cfg.output_dir.join("runs").join(format!("seed-{seed}")).join(m.name());
            let res = run_method(m, &splits[si], lex, &settings, seed, Some(&dir))?;
            let record = serde_json::json!({
                "method": m,
                "seed": seed,
                "test_accuracy": res.accuracy,
                "policy": res.policy,
            });
            write_atomic(&dir.join("result.json"), format!("{record:#}\n").as_bytes())?;
            Ok(res.accuracy)
        })
        .collect();

    let mut cells = Vec::new();
    for &m in &cfg.methods {
        let mut seeds = Vec::new();
        let mut accs = Vec::new();
        let mut failures = Vec::new();
        for (job, res) in jobs.iter().zip(&results) {
            if job.1 != m {
                continue;
            }
            let seed = cfg.seeds[job.0];
            match res {
                Ok(a) => {
                    seeds.push(seed);
                    accs.push(a * 100.0);
                }
                Err(e) => failures.push(CellFailure {
                    seed,
                    error: e.to_string(),
                }),
            }
        }
        let mut cell = ReportCell::new(m, ds.name.clone(), cfg.n_train, seeds, accs);
        cell.failures = failures;
        cells.push(cell);
    }
    let report = EvalReport::new(cells);
    write_report(&report, &cfg.output_dir)?;
    Ok(report)
}

/// Writes `report.json` and `report.txt` atomically.
pub fn write_report(report: &EvalReport, dir: &Path) -> Result<()> {
    let (text, json) = crate::harness::report::render_report(report);
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    write_atomic(&dir.join("report.txt"), text.as_bytes())
}
