use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dyadcode::corpus::{generate_synthetic, load_corpus, SynthConfig};
use dyadcode::error::{Error, Result};
use dyadcode::evalstats::WilcoxonMethod;
use dyadcode::experiment::config::ExperimentConfig;
use dyadcode::experiment::report::{format_table, read_outputs, write_outputs};
use dyadcode::experiment::{compare_models, run_experiment, FeatureData, ResultsRow, ResultsTable};
use dyadcode::lexicon::{parse_lexicon, Lexicon};
use dyadcode::vectors::VectorTable;

#[derive(Parser)]
#[command(
    name = "dyadcode",
    version,
    about = "Behavior-code prediction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write lexicon features of every non-empty sequence as a vector table.
    Featurize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the nested cross-validation experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Paired signed-rank test between two result directories.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Feature set to use from --a when it holds several.
        #[arg(long)]
        set_a: Option<String>,
        /// Feature set to use from --b when it holds several.
        #[arg(long)]
        set_b: Option<String>,
    },
    /// Generate a synthetic corpus with a lexicon-planted signal.
    Synth {
        #[arg(long)]
        couples: usize,
        #[arg(long)]
        seqs: usize,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Planting lexicon (DIC); defaults to a small built-in one.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 0.7)]
        positive_rate: f64,
    },
}

fn read_lexicon(path: &Path) -> Result<Lexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_lexicon(&text)
}

fn featurize(corpus: &Path, lexicon: &Path, out: &Path) -> Result<()> {
    let corpus = load_corpus(corpus)?.drop_empty();
    let lexicon = read_lexicon(lexicon)?;
    let mut table = VectorTable::new(lexicon.num_categories().max(1), "lexicon")?;
    for s in corpus.sequences() {
        table.insert(s.id(), lexicon.featurize(&s.transcript)?.values)?;
    }
    table.save(out)?;
    eprintln!(
        "wrote {} rows x {} features to {}",
        table.len(),
        table.dim(),
        out.display()
    );
    Ok(())
}

fn run(config: &Path, out_dir: &Path) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let mut corpus = load_corpus(&cfg.corpus_path)?.drop_empty();
    if let Some(seed) = cfg.shuffle_labels_seed {
        corpus = corpus.shuffle_labels(seed);
    }
    let stats = corpus.stats();
    eprintln!(
        "corpus: {} sequences ({} positive, {} negative) from {} couples",
        stats.n_total, stats.n_positive, stats.n_negative, stats.n_couples
    );
    let mut table = ResultsTable::default();
    for spec in &cfg.feature_sets {
        let data = FeatureData::resolve(spec, &corpus)?;
        eprintln!("running {} ({} runs)", spec.label, cfg.n_runs);
        let row = run_experiment(
            &corpus,
            &data,
            &spec.label,
            &cfg.cv,
            cfg.n_runs,
            cfg.base_seed,
        )?;
        table.rows.push(row);
    }
    write_outputs(out_dir, &table)?;
    print!("{}", format_table(&table));
    Ok(())
}

fn select(table: ResultsTable, name: Option<&str>, dir: &Path) -> Result<ResultsRow> {
    let mut rows = table.rows;
    match name {
        Some(n) => rows
            .into_iter()
            .find(|r| r.feature_set == n)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("no feature set {n:?} in {}", dir.display()))
            }),
        None if rows.len() == 1 => Ok(rows.remove(0)),
        None => Err(Error::InvalidArgument(format!(
            "{} holds {} feature sets; pick one with --set-a/--set-b",
            dir.display(),
            rows.len()
        ))),
    }
}

fn compare(a: &Path, b: &Path, set_a: Option<&str>, set_b: Option<&str>) -> Result<()> {
    let ra = select(read_outputs(a)?, set_a, a)?;
    let rb = select(read_outputs(b)?, set_b, b)?;
    match compare_models(&ra, &rb) {
        Ok(w) => {
            let method = match w.method {
                WilcoxonMethod::Exact => "exact",
                WilcoxonMethod::NormalApprox => "normal-approx",
            };
            println!("{} vs {}", ra.feature_set, rb.feature_set);
            println!("W = {}", w.statistic);
            println!("p = {:e}", w.p_value);
            println!("method = {method}");
            println!("n = {}", w.n_effective);
        }
        Err(Error::InsufficientData(msg)) => {
            println!("{} vs {}", ra.feature_set, rb.feature_set);
            println!("W = n/a");
            println!("p = n/a ({msg})");
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn synth(args: &Command) -> Result<()> {
    let Command::Synth {
        couples,
        seqs,
        noise,
        seed,
        out,
        lexicon,
        positive_rate,
    } = args
    else {
        unreachable!()
    };
    let lex = match lexicon {
        Some(p) => read_lexicon(p)?,
        None => Lexicon::planted_default(),
    };
    let cfg = SynthConfig {
        positive_rate: *positive_rate,
        ..SynthConfig::new(*couples, *seqs, *noise, *seed)
    };
    let corpus = generate_synthetic(&cfg, &lex)?;
    corpus.save(out)?;
    eprintln!("wrote {} sequences to {}", corpus.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Featurize {
            corpus,
            lexicon,
            out,
        } => featurize(corpus, lexicon, out),
        Command::Run { config, out_dir } => run(config, out_dir),
        Command::Compare { a, b, set_a, set_b } => {
            compare(a, b, set_a.as_deref(), set_b.as_deref())
        }
        cmd @ Command::Synth { .. } => synth(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
