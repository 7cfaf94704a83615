use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use autoaug::classifier::{evaluate, train, LinearModel, TrainConfig};
use autoaug::harness::dataset::{load_dataset, DataFormat, LabeledDataset};
use autoaug::harness::experiment::{run_experiment, ExperimentConfig};
use autoaug::harness::report::render_report;
use autoaug::harness::sampling::{make_val_split, subsample};
use autoaug::harness::{to_jsonl, write_atomic};
use autoaug::policy::{apply_policy, validate_policy, AugmentationPolicy, PolicySpace};
use autoaug::rng::{derive_seed, stream};
use autoaug::search::{optimize, run_seeds, SearchConfig, SearchData};
use autoaug::textops::{load_lexicon, SynonymLexicon};
use autoaug::Error;

#[derive(Parser)]
#[command(name = "autoaug", version, about = "Text augmentation with searched policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a policy file to a dataset and write augmented JSONL.
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<DataFormat>,
        /// Synonym lexicon (TSV); the bundled lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Search a policy on a low-resource subsample.
    Search {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<DataFormat>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        n_train: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fix both smoothing strengths to zero.
        #[arg(long)]
        no_label_smoothing: bool,
        #[arg(long, default_value_t = 0.2)]
        val_fraction: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Train one model on the train split with a policy.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<DataFormat>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Holdout share used when the file has no val split.
        #[arg(long, default_value_t = 0.2)]
        val_fraction: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the accuracy of a checkpoint on a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: Option<DataFormat>,
    },
    /// Run a multi-seed method comparison from a JSON config.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn format_of(path: &Path, format: Option<DataFormat>) -> CliResult<DataFormat> {
    format
        .or_else(|| DataFormat::from_path(path))
        .ok_or_else(|| Failure::Usage(format!("cannot infer format of {}; pass --format", path.display())))
}

fn load(path: &Path, format: Option<DataFormat>, labels: Option<&[String]>) -> CliResult<LabeledDataset> {
    let ds = load_dataset(path, format_of(path, format)?, labels)?;
    ds.validate()?;
    Ok(ds)
}

fn lexicon(path: &Option<PathBuf>) -> CliResult<SynonymLexicon> {
    Ok(match path {
        Some(p) => load_lexicon(p)?,
        None => SynonymLexicon::bundled().clone(),
    })
}

fn read_policy(path: &Path) -> CliResult<AugmentationPolicy> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    let policy: AugmentationPolicy = serde_json::from_str(&text).map_err(Error::from)?;
    let violations = validate_policy(&policy);
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::Format(format!("{}: {}", path.display(), msg.join("; "))).into());
    }
    Ok(policy)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut json = serde_json::to_string_pretty(value).map_err(Error::from)?;
    json.push('\n');
    write_atomic(path, json.as_bytes())?;
    Ok(())
}

fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| {
        Failure::Lib(Error::Io {
            path: path.into(),
            source: e,
        })
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Augment {
            input,
            format,
            lexicon: lex_path,
            policy,
            seed,
            output,
        } => {
            let ds = load(&input, format, None)?;
            let policy = read_policy(&policy)?;
            let lex = lexicon(&lex_path)?;
            let rows: Vec<_> = ds.all_rows().cloned().collect();
            let out = apply_policy(&rows, ds.n_class, &policy, &lex, &mut stream(seed))?;
            for w in &out.warnings {
                eprintln!("warning: example {}: {}", w.source_index, w.message);
            }
            write_atomic(&output, to_jsonl(&out.examples)?.as_bytes())?;
            eprintln!("wrote {} examples to {}", out.examples.len(), output.display());
        }
        Command::Search {
            input,
            format,
            lexicon: lex_path,
            n_train,
            trials,
            seed,
            no_label_smoothing,
            val_fraction,
            output,
        } => {
            let ds = load(&input, format, None)?;
            let lex = lexicon(&lex_path)?;
            let sub = subsample(&ds, n_train, seed)?;
            let (train_rows, val_rows) = make_val_split(&sub.train, ds.n_class, val_fraction, seed)?;
            let cfg = SearchConfig {
                n_trials: trials,
                n_startup: SearchConfig::default().n_startup.min(trials),
                seed,
                fix_smoothing_to_zero: no_label_smoothing,
                ..SearchConfig::default()
            };
            cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            create_dir(&output)?;
            let data = SearchData {
                train: &train_rows,
                val: &val_rows,
                n_class: ds.n_class,
            };
            let outcome = optimize(data, &PolicySpace::default(), &lex, &cfg, |t| {
                eprintln!("trial {:>3}: score {:.4}", t.trial_index, t.score);
                Ok(())
            })?;
            write_atomic(&output.join("trials.jsonl"), to_jsonl(&outcome.trials)?.as_bytes())?;
            write_json(&output.join("best_policy.json"), &outcome.best.policy)?;
            println!(
                "best trial {} with validation accuracy {:.4}",
                outcome.best.trial_index, outcome.best.score
            );
        }
        Command::Train {
            input,
            format,
            lexicon: lex_path,
            policy,
            seed,
            val_fraction,
            output,
        } => {
            let ds = load(&input, format, None)?;
            let policy = read_policy(&policy)?;
            let lex = lexicon(&lex_path)?;
            let (train_rows, val_rows) = if ds.val.is_empty() {
                make_val_split(&ds.train, ds.n_class, val_fraction, seed)?
            } else {
                (ds.train.clone(), ds.val.clone())
            };
            let (aug_seed, train_seed) = run_seeds(derive_seed(seed, 0), 0);
            let augmented = apply_policy(&train_rows, ds.n_class, &policy, &lex, &mut stream(aug_seed))?;
            let outcome = train(&augmented.examples, &val_rows, &TrainConfig::default(), &mut stream(train_seed))?;
            let model = outcome.model.with_label_names(ds.label_names.clone());
            model.save(&output)?;
            println!(
                "best epoch {} with validation accuracy {:.4}",
                outcome.best_epoch, outcome.best_val_accuracy
            );
        }
        Command::Eval { model, input, format } => {
            let model = LinearModel::load(&model)?;
            let ds = load(&input, format, model.label_names())?;
            if ds.n_class != model.n_class() {
                return Err(Error::Format(format!(
                    "model has {} classes, dataset has {}",
                    model.n_class(),
                    ds.n_class
                ))
                .into());
            }
            let rows: Vec<_> = if ds.test.is_empty() {
                ds.all_rows().cloned().collect()
            } else {
                ds.test.clone()
            };
            println!("{:.4}", evaluate(&model, &rows)?);
        }
        Command::Compare { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let report = run_experiment(&cfg)?;
            let (text, _) = render_report(&report);
            print!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) => 1,
                Error::Training { .. } => 3,
                e if e.is_data_error() => 2,
                _ => 3,
            })
        }
    }
}
