//! Precomputed dense feature vectors (`dyadvec/1` tables), their alignment to
//! a corpus, block-wise fusion and train-fold standardization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const VECTOR_HEADER: &str = "dyadvec/1";

#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable {
    dim: usize,
    source_label: String,
    rows: BTreeMap<String, Vec<f64>>,
}

impl VectorTable {
    pub fn new(dim: usize, source_label: impl Into<String>) -> Result<Self> {
        let source_label = source_label.into();
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "vector table dim must be > 0".into(),
            ));
        }
        if source_label.is_empty() || source_label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "source label {source_label:?}"
            )));
        }
        Ok(VectorTable {
            dim,
            source_label,
            rows: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, id: impl Into<String>, row: Vec<f64>) -> Result<()> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("row id {id:?}")));
        }
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "row {id} has a non-finite value"
            )));
        }
        if self.rows.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.rows.insert(id, row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.rows.get(id).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.rows.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{VECTOR_HEADER} dim={} source={}\n",
            self.dim, self.source_label
        );
        for (id, row) in &self.rows {
            out.push_str(id);
            for v in row {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

pub fn parse_vector_table(text: &str) -> Result<VectorTable> {
    const WHAT: &str = "vector table";
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = lines.next().map(|(_, l)| l).unwrap_or_default();
    let mut parts = header.split_whitespace();
    if parts.next() != Some(VECTOR_HEADER) {
        return Err(Error::parse(
            WHAT,
            1,
            format!("expected {VECTOR_HEADER:?} header"),
        ));
    }
    let mut dim = None;
    let mut source = None;
    for p in parts {
        match p.split_once('=') {
            Some(("dim", d)) => {
                dim = Some(
                    d.parse::<usize>()
                        .map_err(|_| Error::parse(WHAT, 1, format!("bad dim {d:?}")))?,
                )
            }
            Some(("source", s)) => source = Some(s.to_string()),
            _ => return Err(Error::parse(WHAT, 1, format!("unknown header field {p:?}"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::parse(WHAT, 1, "header lacks dim="))?;
    let source = source.ok_or_else(|| Error::parse(WHAT, 1, "header lacks source="))?;
    let mut table =
        VectorTable::new(dim, source).map_err(|e| Error::parse(WHAT, 1, e.to_string()))?;

    for (n, line) in lines {
        let mut fields = line.split_whitespace();
        let Some(id) = fields.next() else { continue };
        let mut row = Vec::with_capacity(dim);
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(WHAT, n, format!("bad number {f:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(WHAT, n, format!("non-finite value {f:?}")));
            }
            row.push(v);
        }
        if row.len() != dim {
            return Err(Error::parse(
                WHAT,
                n,
                format!("row {id} has {} values, header says dim={dim}", row.len()),
            ));
        }
        if table.get(id).is_some() {
            return Err(Error::DuplicateId(id.to_string()));
        }
        table.insert(id, row)?;
    }
    Ok(table)
}

pub fn load_vector_table(path: impl AsRef<Path>) -> Result<VectorTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vector_table(&text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpan {
    pub source_label: String,
    pub start: usize,
    pub end: usize,
}

/// Rows in corpus order, columns as concatenated blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub ids: Vec<String>,
    pub x: Matrix,
    pub block_spans: Vec<BlockSpan>,
}

impl FeatureMatrix {
    pub fn block(&self, source_label: &str) -> Option<Matrix> {
        self.block_spans
            .iter()
            .find(|b| b.source_label == source_label)
            .map(|b| self.x.slice_cols(b.start, b.end))
    }
}

/// Looks up every corpus sequence in every table and concatenates the rows.
pub fn align(corpus: &Corpus, tables: &[&VectorTable]) -> Result<FeatureMatrix> {
    if tables.is_empty() {
        return Err(Error::InvalidArgument(
            "align needs at least one table".into(),
        ));
    }
    let mut block_spans = Vec::with_capacity(tables.len());
    let mut start = 0;
    for t in tables {
        block_spans.push(BlockSpan {
            source_label: t.source_label().to_string(),
            start,
            end: start + t.dim(),
        });
        start += t.dim();
    }
    let d = start;
    let ids = corpus.ids();
    let mut data = Vec::with_capacity(ids.len() * d);
    for id in &ids {
        for t in tables {
            let row = t.get(id).ok_or_else(|| Error::MissingId {
                table: t.source_label().to_string(),
                id: id.clone(),
            })?;
            data.extend_from_slice(row);
        }
    }
    Ok(FeatureMatrix {
        x: Matrix::from_vec(ids.len(), d, data)?,
        ids,
        block_spans,
    })
}

/// Per-column z-scoring with population statistics of the training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(x_train: &Matrix) -> Result<Scaler> {
        if x_train.rows() < 2 {
            return Err(Error::InsufficientData(format!(
                "scaler needs >= 2 training rows, got {}",
                x_train.rows()
            )));
        }
        let n = x_train.rows() as f64;
        let d = x_train.cols();
        let mut means = vec![0.0; d];
        for r in x_train.iter_rows() {
            for (m, v) in means.iter_mut().zip(r) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut vars = vec![0.0; d];
        for r in x_train.iter_rows() {
            for ((s, v), m) in vars.iter_mut().zip(r).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let stds = vars
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Scaler { means, stds })
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: x.cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.stds) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }
}
