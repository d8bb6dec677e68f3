//! Couple-grouped nested cross-validation with repeated runs.
//!
//! One run: an outer grouped k-fold split; on each outer-train partition an
//! inner grouped k-fold picks C by mean inner balanced accuracy (smallest C
//! on ties); the model refit with that C predicts the outer-test couples.
//! The run's score is the balanced accuracy of the pooled outer predictions.
//! Run `r` uses seed `base_seed + r`, so two feature sets with the same base
//! seed see identical fold randomizations.

pub mod config;
mod features;
mod folds;
pub mod report;

use rayon::prelude::*;

pub use features::{FeatureData, FeatureKind, FeatureSetSpec, FoldFeatures};
pub use folds::{grouped_kfold, FoldPlan};

use crate::corpus::{Code, Corpus};
use crate::error::{Error, Result};
use crate::evalstats::{self, ConfusionMatrix, RunScore, WilcoxonResult};
use crate::svm::{balanced_weights_for, train_svm, KernelSpec, SolverConfig};

pub const DEFAULT_C_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub c_grid: Vec<f64>,
    pub k_outer: usize,
    pub k_inner: usize,
    /// Tolerance, iteration cap and cache size; `c` is ignored.
    pub solver: SolverConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            c_grid: DEFAULT_C_GRID.to_vec(),
            k_outer: 5,
            k_inner: 3,
            solver: SolverConfig::default(),
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_outer < 2 || self.k_inner < 2 {
            return Err(Error::Config("k_outer and k_inner must be >= 2".into()));
        }
        if self.c_grid.is_empty() {
            return Err(Error::Config("c_grid is empty".into()));
        }
        if let Some(c) = self.c_grid.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::Config(format!("C value {c} is not positive")));
        }
        if self.solver.tol.is_nan() || self.solver.tol <= 0.0 {
            return Err(Error::Config("solver tol must be > 0".into()));
        }
        Ok(())
    }

    fn sorted_grid(&self) -> Vec<f64> {
        let mut grid = self.c_grid.clone();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }
}

fn inner_seed(run_seed: u64, outer_fold: usize) -> u64 {
    run_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(outer_fold as u64 + 1)
        .rotate_left(17)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub chosen_c: f64,
    /// (C, mean inner balanced accuracy) in ascending C.
    pub inner_scores: Vec<(f64, f64)>,
    pub train_couples: Vec<String>,
    pub test_couples: Vec<String>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub score: RunScore,
    pub folds: Vec<FoldOutcome>,
    /// Prediction per sequence, in corpus order.
    pub predictions: Vec<Code>,
    /// Outer fold that held each sequence out.
    pub test_fold: Vec<usize>,
}

fn fit_predict(
    feats: &FoldFeatures,
    y_train: &[Code],
    c: f64,
    solver: &SolverConfig,
) -> Result<(Vec<Code>, bool)> {
    let weights = balanced_weights_for(y_train)?;
    let cfg = SolverConfig { c, ..*solver };
    let model = train_svm(
        &feats.x_train,
        y_train,
        &cfg,
        KernelSpec::rbf(feats.gamma)?,
        weights,
    )?;
    Ok((model.predict_all(&feats.x_test)?, model.info().converged))
}

fn pick<T: Copy>(values: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| values[i]).collect()
}

fn outer_fold(
    corpus: &Corpus,
    data: &FeatureData,
    cv: &CvConfig,
    plan: &FoldPlan,
    run_seed: u64,
    fold: usize,
) -> Result<(FoldOutcome, Vec<usize>, Vec<Code>)> {
    let labels = corpus.labels();
    let couples = corpus.couple_ids();
    let (train, test) = plan.split(&couples, fold);
    let y_train = pick(&labels, &train);
    balanced_weights_for(&y_train)
        .map_err(|e| e.in_context(format!("outer fold {fold} training partition")))?;

    let grid = cv.sorted_grid();
    let train_couples = pick(&couples, &train);
    let inner = grouped_kfold(&train_couples, cv.k_inner, inner_seed(run_seed, fold))
        .map_err(|e| e.in_context(format!("inner split of outer fold {fold}")))?;
    let mut sums = vec![0.0; grid.len()];
    for inner_fold in 0..cv.k_inner {
        let ctx = || format!("outer fold {fold}, inner fold {inner_fold}");
        let (itrain, itest) = inner.split(&train_couples, inner_fold);
        let gtrain = pick(&train, &itrain);
        let gtest = pick(&train, &itest);
        let feats = data
            .prepare(&gtrain, &gtest)
            .map_err(|e| e.in_context(ctx()))?;
        let y_itrain = pick(&labels, &gtrain);
        let y_itest = pick(&labels, &gtest);
        for (ci, &c) in grid.iter().enumerate() {
            let (pred, _) =
                fit_predict(&feats, &y_itrain, c, &cv.solver).map_err(|e| e.in_context(ctx()))?;
            let cm = ConfusionMatrix::from_predictions(&y_itest, &pred)?;
            sums[ci] += cm.balanced_accuracy().map_err(|e| e.in_context(ctx()))?;
        }
    }
    let inner_scores: Vec<(f64, f64)> = grid
        .iter()
        .zip(&sums)
        .map(|(&c, s)| (c, s / cv.k_inner as f64))
        .collect();
    let mut best = inner_scores[0];
    for &(c, s) in &inner_scores[1..] {
        if s > best.1 {
            best = (c, s);
        }
    }

    let feats = data
        .prepare(&train, &test)
        .map_err(|e| e.in_context(format!("outer fold {fold}")))?;
    let (pred, converged) = fit_predict(&feats, &y_train, best.0, &cv.solver)
        .map_err(|e| e.in_context(format!("outer fold {fold}")))?;
    let outcome = FoldOutcome {
        fold,
        chosen_c: best.0,
        inner_scores,
        train_couples: {
            let mut v: Vec<String> = train_couples.iter().map(|s| s.to_string()).collect();
            v.dedup();
            v
        },
        test_couples: plan
            .couples_in(fold)
            .into_iter()
            .map(str::to_string)
            .collect(),
        converged,
    };
    Ok((outcome, test, pred))
}

/// One nested-CV run with all details retained.
pub fn nested_cv_detailed(
    corpus: &Corpus,
    data: &FeatureData,
    cv: &CvConfig,
    seed: u64,
) -> Result<RunOutcome> {
    cv.validate()?;
    if data.len() != corpus.len() {
        return Err(Error::DimensionMismatch {
            expected: corpus.len(),
            got: data.len(),
        });
    }
    let couples = corpus.couple_ids();
    let plan = grouped_kfold(&couples, cv.k_outer, seed)?;
    let results: Vec<Result<_>> = (0..cv.k_outer)
        .into_par_iter()
        .map(|f| outer_fold(corpus, data, cv, &plan, seed, f))
        .collect();

    let labels = corpus.labels();
    let mut predictions = vec![Code::Positive; corpus.len()];
    let mut test_fold = vec![usize::MAX; corpus.len()];
    let mut folds = Vec::with_capacity(cv.k_outer);
    let mut confusion = ConfusionMatrix::default();
    for r in results {
        let (outcome, test, pred) = r?;
        for (&i, &p) in test.iter().zip(&pred) {
            predictions[i] = p;
            test_fold[i] = outcome.fold;
            confusion.add(labels[i], p);
        }
        folds.push(outcome);
    }
    let balanced_accuracy = confusion.balanced_accuracy()?;
    Ok(RunOutcome {
        score: RunScore {
            run_index: 0,
            seed,
            balanced_accuracy,
            confusion,
        },
        folds,
        predictions,
        test_fold,
    })
}

pub fn nested_cv(
    corpus: &Corpus,
    data: &FeatureData,
    cv: &CvConfig,
    seed: u64,
) -> Result<RunScore> {
    Ok(nested_cv_detailed(corpus, data, cv, seed)?.score)
}

/// Per-feature-set summary with the run scores it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsRow {
    pub feature_set: String,
    pub runs: Vec<RunScore>,
}

impl ResultsRow {
    pub fn scores(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.balanced_accuracy).collect()
    }

    pub fn mean(&self) -> f64 {
        evalstats::mean(&self.scores())
    }

    /// `None` with fewer than two runs.
    pub fn standard_error(&self) -> Option<f64> {
        evalstats::standard_error(&self.scores()).ok()
    }

    pub fn n_runs(&self) -> usize {
        self.runs.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    pub fn row(&self, feature_set: &str) -> Option<&ResultsRow> {
        self.rows.iter().find(|r| r.feature_set == feature_set)
    }
}

/// `n_runs` nested-CV runs with seeds `base_seed + run`.
pub fn run_experiment(
    corpus: &Corpus,
    data: &FeatureData,
    label: &str,
    cv: &CvConfig,
    n_runs: usize,
    base_seed: u64,
) -> Result<ResultsRow> {
    if n_runs == 0 {
        return Err(Error::Config("n_runs must be >= 1".into()));
    }
    cv.validate()?;
    let results: Vec<Result<RunScore>> = (0..n_runs)
        .into_par_iter()
        .map(|run| {
            let seed = base_seed.wrapping_add(run as u64);
            nested_cv(corpus, data, cv, seed)
                .map(|s| RunScore {
                    run_index: run,
                    ..s
                })
                .map_err(|e| e.in_context(format!("{label}, run {run}")))
        })
        .collect();
    Ok(ResultsRow {
        feature_set: label.to_string(),
        runs: results.into_iter().collect::<Result<_>>()?,
    })
}

/// Paired signed-rank test over run-level balanced accuracies. Both rows
/// must come from the same run seeds.
pub fn compare_models(a: &ResultsRow, b: &ResultsRow) -> Result<WilcoxonResult> {
    if a.n_runs() != b.n_runs() {
        return Err(Error::InvalidArgument(format!(
            "run counts differ: {} vs {}",
            a.n_runs(),
            b.n_runs()
        )));
    }
    for (ra, rb) in a.runs.iter().zip(&b.runs) {
        if ra.seed != rb.seed || ra.run_index != rb.run_index {
            return Err(Error::InvalidArgument(format!(
                "runs are not seed-matched (run {} seed {} vs run {} seed {})",
                ra.run_index, ra.seed, rb.run_index, rb.seed
            )));
        }
    }
    evalstats::wilcoxon_signed_rank(&a.scores(), &b.scores())
}
