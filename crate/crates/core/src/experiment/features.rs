use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lexicon::{parse_lexicon, Lexicon};
use crate::matrix::Matrix;
use crate::svm::default_gamma;
use crate::tfidf::{Vocabulary, DEFAULT_MAX_FEATURES};
use crate::vectors::{align, load_vector_table, Scaler, VectorTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Acoustic,
    #[serde(alias = "tf-idf")]
    Tfidf,
    Lexicon,
    Embeddings,
    #[serde(alias = "embeddings+acoustic")]
    EmbeddingsPlusAcoustic,
}

impl FeatureKind {
    pub fn default_label(self) -> &'static str {
        match self {
            FeatureKind::Acoustic => "Acoustic",
            FeatureKind::Tfidf => "TF-IDF + ngrams",
            FeatureKind::Lexicon => "Lexicon",
            FeatureKind::Embeddings => "Embeddings",
            FeatureKind::EmbeddingsPlusAcoustic => "Embeddings + Acoustic",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.default_label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSetSpec {
    pub kind: FeatureKind,
    pub label: String,
    pub lexicon: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub acoustic: Option<PathBuf>,
    pub max_features: usize,
}

impl FeatureSetSpec {
    pub fn new(kind: FeatureKind) -> Self {
        FeatureSetSpec {
            kind,
            label: kind.default_label().to_string(),
            lexicon: None,
            embeddings: None,
            acoustic: None,
            max_features: DEFAULT_MAX_FEATURES,
        }
    }

    /// Checks that the resources the kind needs are named.
    pub fn validate(&self) -> Result<()> {
        let need = |p: &Option<PathBuf>, what: &str| {
            if p.is_none() {
                Err(Error::Config(format!(
                    "feature set {:?} needs a {what} path",
                    self.label
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            FeatureKind::Lexicon => need(&self.lexicon, "lexicon"),
            FeatureKind::Embeddings => need(&self.embeddings, "embeddings"),
            FeatureKind::Acoustic => need(&self.acoustic, "acoustic"),
            FeatureKind::EmbeddingsPlusAcoustic => {
                need(&self.embeddings, "embeddings")?;
                need(&self.acoustic, "acoustic")
            }
            FeatureKind::Tfidf if self.max_features == 0 => {
                Err(Error::Config("max_features must be >= 1".into()))
            }
            FeatureKind::Tfidf => Ok(()),
        }
    }
}

/// Resolved per-sequence feature source, in corpus order.
#[derive(Debug, Clone)]
pub enum FeatureData {
    /// Fixed vectors, z-scored with training-fold statistics.
    Dense(Matrix),
    /// Transcripts; the TF-IDF vocabulary is fitted per training fold.
    Text {
        texts: Vec<String>,
        max_features: usize,
    },
}

/// Features for one train/test split. Everything fitted here (vocabulary,
/// scaler, gamma) has seen only the training rows.
#[derive(Debug, Clone)]
pub struct FoldFeatures {
    pub x_train: Matrix,
    pub x_test: Matrix,
    pub gamma: f64,
    pub scaler: Option<Scaler>,
    pub vocabulary: Option<Vocabulary>,
}

impl FeatureData {
    pub fn resolve(spec: &FeatureSetSpec, corpus: &Corpus) -> Result<FeatureData> {
        spec.validate()?;
        let load = |p: &Option<PathBuf>| -> Result<VectorTable> {
            load_vector_table(p.as_ref().expect("validated"))
        };
        match spec.kind {
            FeatureKind::Lexicon => {
                let path = spec.lexicon.as_ref().expect("validated");
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                FeatureData::from_lexicon(&parse_lexicon(&text)?, corpus)
            }
            FeatureKind::Tfidf => Ok(FeatureData::Text {
                texts: corpus
                    .sequences()
                    .iter()
                    .map(|s| s.transcript.clone())
                    .collect(),
                max_features: spec.max_features,
            }),
            FeatureKind::Embeddings => Ok(FeatureData::Dense(
                align(corpus, &[&load(&spec.embeddings)?])?.x,
            )),
            FeatureKind::Acoustic => Ok(FeatureData::Dense(
                align(corpus, &[&load(&spec.acoustic)?])?.x,
            )),
            FeatureKind::EmbeddingsPlusAcoustic => {
                let e = load(&spec.embeddings)?;
                let a = load(&spec.acoustic)?;
                Ok(FeatureData::Dense(align(corpus, &[&e, &a])?.x))
            }
        }
    }

    pub fn from_lexicon(lexicon: &Lexicon, corpus: &Corpus) -> Result<FeatureData> {
        let mut x = Matrix::zeros(corpus.len(), lexicon.num_categories());
        for (i, s) in corpus.sequences().iter().enumerate() {
            let f = lexicon
                .featurize(&s.transcript)
                .map_err(|e| e.in_context(format!("sequence {}", s.id())))?;
            x.row_mut(i).copy_from_slice(&f.values);
        }
        Ok(FeatureData::Dense(x))
    }

    pub fn len(&self) -> usize {
        match self {
            FeatureData::Dense(x) => x.rows(),
            FeatureData::Text { texts, .. } => texts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn prepare(&self, train: &[usize], test: &[usize]) -> Result<FoldFeatures> {
        match self {
            FeatureData::Dense(x) => {
                let scaler = Scaler::fit(&x.select_rows(train))?;
                let x_train = scaler.apply(&x.select_rows(train))?;
                let x_test = scaler.apply(&x.select_rows(test))?;
                Ok(FoldFeatures {
                    gamma: default_gamma(&x_train)?,
                    x_train,
                    x_test,
                    scaler: Some(scaler),
                    vocabulary: None,
                })
            }
            FeatureData::Text {
                texts,
                max_features,
            } => {
                let pick =
                    |idx: &[usize]| idx.iter().map(|&i| texts[i].as_str()).collect::<Vec<_>>();
                let vocab = Vocabulary::fit(&pick(train), *max_features)?;
                let x_train = vocab.transform_all(&pick(train));
                let x_test = vocab.transform_all(&pick(test));
                Ok(FoldFeatures {
                    gamma: default_gamma(&x_train)?,
                    x_train,
                    x_test,
                    scaler: None,
                    vocabulary: Some(vocab),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Code, Partner, Sequence};
    use std::collections::BTreeMap;

    fn corpus(texts: &[&str]) -> Corpus {
        let seqs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Sequence {
                couple_id: format!("c{i}"),
                partner: Partner::A,
                seq_index: 0,
                transcript: t.to_string(),
                code: if i % 2 == 0 {
                    Code::Positive
                } else {
                    Code::Negative
                },
            })
            .collect();
        Corpus::new(seqs, BTreeMap::new()).unwrap()
    }

    #[test]
    fn missing_resource_is_config_error() {
        let spec = FeatureSetSpec::new(FeatureKind::EmbeddingsPlusAcoustic);
        assert!(spec.validate().unwrap_err().is_config());
        let spec = FeatureSetSpec::new(FeatureKind::Lexicon);
        assert!(spec.validate().unwrap_err().is_config());
        assert!(FeatureSetSpec::new(FeatureKind::Tfidf).validate().is_ok());
    }

    #[test]
    fn vocabulary_sees_train_rows_only() {
        let c = corpus(&["alpha beta", "alpha gamma", "zulu yankee"]);
        let data = FeatureData::resolve(&FeatureSetSpec::new(FeatureKind::Tfidf), &c).unwrap();
        let f = data.prepare(&[0, 1], &[2]).unwrap();
        let v = f.vocabulary.unwrap();
        assert!(v.index_of("alpha").is_some());
        assert!(v.index_of("zulu").is_none());
        assert_eq!(v.n_docs_fit(), 2);
        assert!(f.x_test.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn scaler_sees_train_rows_only() {
        let x = Matrix::from_rows(&[[1.0], [3.0], [100.0]]).unwrap();
        let f = FeatureData::Dense(x).prepare(&[0, 1], &[2]).unwrap();
        let s = f.scaler.unwrap();
        assert_eq!(s.means, vec![2.0]);
        assert_eq!(s.stds, vec![1.0]);
        assert_eq!(f.x_test.as_slice(), &[98.0]);
        // training block is z-scored, so pooled variance 1 and gamma 1/d
        assert_eq!(f.gamma, 1.0);
    }

    #[test]
    fn lexicon_features_in_corpus_order() {
        let lex = crate::lexicon::parse_lexicon("%\n1 a\n%\nja 1\n").unwrap();
        let c = corpus(&["ja ja", "nein ja", "nein"]);
        let FeatureData::Dense(x) = FeatureData::from_lexicon(&lex, &c).unwrap() else {
            panic!("dense expected");
        };
        assert_eq!(x.as_slice(), &[1.0, 0.5, 0.0]);
    }

    #[test]
    fn empty_transcript_reports_sequence() {
        let lex = crate::lexicon::parse_lexicon("%\n1 a\n%\nja 1\n").unwrap();
        let c = corpus(&["ja", "..."]);
        let err = FeatureData::from_lexicon(&lex, &c).unwrap_err();
        assert!(err.to_string().contains("c1/A/0"), "{err}");
    }
}
