//! Unigram + bigram TF-IDF with a frequency-capped vocabulary.
//!
//! The vocabulary keeps the `max_features` terms with the highest total count
//! over the training texts (ties broken by ascending term). Columns follow
//! ascending term order. Weights use the smoothed
//! `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1` and rows are L2-normalized.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tokenize::tokenize;

pub const VOCAB_HEADER: &str = "dyadvocab/1";
pub const DEFAULT_MAX_FEATURES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: BTreeMap<String, usize>,
    idf: Vec<f64>,
    n_docs_fit: usize,
}

/// Unigrams followed by space-joined bigrams of consecutive tokens.
pub fn terms_of(text: &str) -> Vec<String> {
    let tokens = tokenize(text);
    let mut terms = tokens.clone();
    terms.extend(tokens.windows(2).map(|w| format!("{} {}", w[0], w[1])));
    terms
}

impl Vocabulary {
    pub fn fit<S: AsRef<str>>(train_texts: &[S], max_features: usize) -> Result<Vocabulary> {
        if train_texts.is_empty() {
            return Err(Error::InsufficientData("empty TF-IDF training set".into()));
        }
        if max_features == 0 {
            return Err(Error::InvalidArgument("max_features must be >= 1".into()));
        }
        let mut counts: HashMap<String, usize> = HashMap::new();
        let mut df: HashMap<String, usize> = HashMap::new();
        for text in train_texts {
            let terms = terms_of(text.as_ref());
            let unique: HashSet<&String> = terms.iter().collect();
            for t in unique {
                *df.entry(t.clone()).or_default() += 1;
            }
            for t in terms {
                *counts.entry(t).or_default() += 1;
            }
        }
        let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(max_features);

        let mut kept: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
        kept.sort_unstable();
        let n_docs = train_texts.len();
        let idf = kept
            .iter()
            .map(|t| ((1.0 + n_docs as f64) / (1.0 + df[t] as f64)).ln() + 1.0)
            .collect();
        let terms = kept.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(Vocabulary {
            terms,
            idf,
            n_docs_fit: n_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs_fit(&self) -> usize {
        self.n_docs_fit
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.get(term).copied()
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.terms.iter().map(|(t, &i)| (t.as_str(), i))
    }

    pub fn transform(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.terms.len()];
        for t in terms_of(text) {
            if let Some(&i) = self.terms.get(&t) {
                v[i] += 1.0;
            }
        }
        for (x, idf) in v.iter_mut().zip(&self.idf) {
            *x *= idf;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    pub fn transform_all<S: AsRef<str>>(&self, texts: &[S]) -> Matrix {
        let mut m = Matrix::zeros(texts.len(), self.len());
        for (i, t) in texts.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&self.transform(t.as_ref()));
        }
        m
    }

    /// `dyadvocab/1 n_docs=<n>` header, then `term<TAB>index<TAB>idf` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("{VOCAB_HEADER} n_docs={}\n", self.n_docs_fit);
        for (t, &i) in &self.terms {
            out.push_str(&format!("{t}\t{i}\t{:?}\n", self.idf[i]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Vocabulary> {
        const WHAT: &str = "vocabulary";
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let header = lines.next().map(|(_, l)| l).unwrap_or_default();
        let n_docs_fit = header
            .strip_prefix(VOCAB_HEADER)
            .and_then(|rest| rest.trim().strip_prefix("n_docs="))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::parse(WHAT, 1, "expected 'dyadvocab/1 n_docs=<n>' header"))?;
        let mut entries = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [term, index, idf] = fields[..] else {
                return Err(Error::parse(WHAT, n, "expected term<TAB>index<TAB>idf"));
            };
            let index: usize = index
                .parse()
                .map_err(|_| Error::parse(WHAT, n, "bad index"))?;
            let idf: f64 = idf.parse().map_err(|_| Error::parse(WHAT, n, "bad idf"))?;
            if !(idf >= 1.0 && idf.is_finite()) {
                return Err(Error::parse(WHAT, n, "idf must be finite and >= 1"));
            }
            entries.push((term.to_string(), index, idf));
        }
        let mut idf = vec![f64::NAN; entries.len()];
        let mut terms = BTreeMap::new();
        for (term, index, value) in entries {
            if index >= idf.len() || !idf[index].is_nan() {
                return Err(Error::parse(
                    WHAT,
                    0,
                    "column indices must be 0..n without repeats",
                ));
            }
            idf[index] = value;
            if terms.insert(term.clone(), index).is_some() {
                return Err(Error::parse(WHAT, 0, format!("term {term:?} repeated")));
            }
        }
        Ok(Vocabulary {
            terms,
            idf,
            n_docs_fit,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
