//! `dyadexp/1` experiment configuration (TOML).
//!
//! ```toml
//! format = "dyadexp/1"
//! corpus = "corpus.txt"          # relative to this file
//! n_runs = 20
//! base_seed = 0
//! k_outer = 5
//! k_inner = 3
//! c_grid = [0.1, 1.0, 10.0, 100.0]
//! # shuffle_labels_seed = 7     # permute codes first (chance-level control)
//!
//! [solver]
//! tol = 1e-3
//! max_iter = 100000
//! cache_size = 4194304
//!
//! [[feature_set]]
//! kind = "lexicon"               # lexicon | tfidf | embeddings | acoustic | embeddings-plus-acoustic
//! label = "LIWC"
//! lexicon = "lexicon.dic"
//!
//! [[feature_set]]
//! kind = "tfidf"
//! max_features = 1000
//! ```
//!
//! Everything except `format`, `corpus` and at least one `feature_set` has
//! a default.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{CvConfig, FeatureKind, FeatureSetSpec, DEFAULT_C_GRID};
use crate::error::{Error, Result};
use crate::svm::SolverConfig;
use crate::tfidf::DEFAULT_MAX_FEATURES;

pub const CONFIG_FORMAT: &str = "dyadexp/1";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus_path: PathBuf,
    pub feature_sets: Vec<FeatureSetSpec>,
    pub cv: CvConfig,
    pub n_runs: usize,
    pub base_seed: u64,
    pub shuffle_labels_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    format: String,
    corpus: PathBuf,
    #[serde(default = "default_runs")]
    n_runs: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_outer")]
    k_outer: usize,
    #[serde(default = "default_inner")]
    k_inner: usize,
    #[serde(default = "default_grid")]
    c_grid: Vec<f64>,
    shuffle_labels_seed: Option<u64>,
    #[serde(default)]
    solver: RawSolver,
    #[serde(default)]
    feature_set: Vec<RawFeatureSet>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    max_iter: Option<usize>,
    cache_size: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeatureSet {
    kind: FeatureKind,
    label: Option<String>,
    lexicon: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    acoustic: Option<PathBuf>,
    max_features: Option<usize>,
}

fn default_runs() -> usize {
    20
}
fn default_outer() -> usize {
    5
}
fn default_inner() -> usize {
    3
}
fn default_grid() -> Vec<f64> {
    DEFAULT_C_GRID.to_vec()
}

impl ExperimentConfig {
    /// Parses config text; relative paths are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if raw.format != CONFIG_FORMAT {
            return Err(Error::Config(format!(
                "format must be {CONFIG_FORMAT:?}, got {:?}",
                raw.format
            )));
        }
        if raw.feature_set.is_empty() {
            return Err(Error::Config(
                "at least one [[feature_set]] is required".into(),
            ));
        }
        if raw.n_runs == 0 {
            return Err(Error::Config("n_runs must be >= 1".into()));
        }
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };
        let defaults = SolverConfig::default();
        let cv = CvConfig {
            c_grid: raw.c_grid,
            k_outer: raw.k_outer,
            k_inner: raw.k_inner,
            solver: SolverConfig {
                tol: raw.solver.tol.unwrap_or(defaults.tol),
                max_iter: raw.solver.max_iter.unwrap_or(defaults.max_iter),
                cache_size: raw.solver.cache_size.unwrap_or(defaults.cache_size),
                ..defaults
            },
        };
        cv.validate()?;

        let mut feature_sets = Vec::with_capacity(raw.feature_set.len());
        for f in raw.feature_set {
            let spec = FeatureSetSpec {
                kind: f.kind,
                label: f
                    .label
                    .unwrap_or_else(|| f.kind.default_label().to_string()),
                lexicon: f.lexicon.map(resolve),
                embeddings: f.embeddings.map(resolve),
                acoustic: f.acoustic.map(resolve),
                max_features: f.max_features.unwrap_or(DEFAULT_MAX_FEATURES),
            };
            spec.validate()?;
            if feature_sets
                .iter()
                .any(|s: &FeatureSetSpec| s.label == spec.label)
            {
                return Err(Error::Config(format!(
                    "duplicate feature set label {:?}",
                    spec.label
                )));
            }
            feature_sets.push(spec);
        }
        Ok(ExperimentConfig {
            corpus_path: resolve(raw.corpus),
            feature_sets,
            cv,
            n_runs: raw.n_runs,
            base_seed: raw.base_seed,
            shuffle_labels_seed: raw.shuffle_labels_seed,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults() {
        let cfg = ExperimentConfig::parse(
            "format = \"dyadexp/1\"\ncorpus = \"c.txt\"\n[[feature_set]]\nkind = \"tfidf\"\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(cfg.corpus_path, PathBuf::from("/data/c.txt"));
        assert_eq!(cfg.n_runs, 20);
        assert_eq!(cfg.cv.k_outer, 5);
        assert_eq!(cfg.cv.k_inner, 3);
        assert_eq!(cfg.cv.c_grid, vec![0.1, 1.0, 10.0, 100.0]);
        assert_eq!(cfg.cv.solver.tol, 1e-3);
        assert_eq!(cfg.feature_sets[0].label, "TF-IDF + ngrams");
        assert_eq!(cfg.feature_sets[0].max_features, 1000);
    }

    #[test]
    fn full_config() {
        let text = r#"
format = "dyadexp/1"
corpus = "/abs/corpus.txt"
n_runs = 3
base_seed = 42
c_grid = [1.0]
shuffle_labels_seed = 9
[solver]
tol = 1e-4
max_iter = 500
[[feature_set]]
kind = "embeddings-plus-acoustic"
label = "fused"
embeddings = "e.vec"
acoustic = "a.vec"
"#;
        let cfg = ExperimentConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.corpus_path, PathBuf::from("/abs/corpus.txt"));
        assert_eq!(cfg.base_seed, 42);
        assert_eq!(cfg.shuffle_labels_seed, Some(9));
        assert_eq!(cfg.cv.solver.max_iter, 500);
        let f = &cfg.feature_sets[0];
        assert_eq!(f.kind, FeatureKind::EmbeddingsPlusAcoustic);
        assert_eq!(f.acoustic.as_deref(), Some(Path::new("/cfg/a.vec")));
    }

    #[test]
    fn config_errors() {
        let cases = [
            "format = \"dyadexp/2\"\ncorpus = \"c\"\n[[feature_set]]\nkind = \"tfidf\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\nc_grid = []\n[[feature_set]]\nkind = \"tfidf\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\n[[feature_set]]\nkind = \"lexicon\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\n[[feature_set]]\nkind = \"bogus\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\ntypo = 1\n[[feature_set]]\nkind = \"tfidf\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\nk_outer = 1\n[[feature_set]]\nkind = \"tfidf\"\n",
            "format = \"dyadexp/1\"\ncorpus = \"c\"\n[[feature_set]]\nkind = \"tfidf\"\n[[feature_set]]\nkind = \"tfidf\"\n",
        ];
        for text in cases {
            let err = ExperimentConfig::parse(text, Path::new(".")).unwrap_err();
            assert!(err.is_config(), "{text}: {err}");
        }
    }
}
