//! Imbalance-aware scoring and paired model comparison.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::corpus::Code;
use crate::error::{Error, Result};

/// Counts indexed `[true][predicted]`, index 0 = Positive, 1 = Negative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 2]; 2],
}

fn idx(c: Code) -> usize {
    match c {
        Code::Positive => 0,
        Code::Negative => 1,
    }
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 2]; 2]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn from_predictions(truth: &[Code], predicted: &[Code]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                got: predicted.len(),
            });
        }
        let mut cm = ConfusionMatrix::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.add(t, p);
        }
        Ok(cm)
    }

    pub fn add(&mut self, truth: Code, predicted: Code) {
        self.counts[idx(truth)][idx(predicted)] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for t in 0..2 {
            for p in 0..2 {
                self.counts[t][p] += other.counts[t][p];
            }
        }
    }

    pub fn get(&self, truth: Code, predicted: Code) -> u64 {
        self.counts[idx(truth)][idx(predicted)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Swaps the roles of the two labels.
    pub fn transposed_labels(&self) -> Self {
        let c = self.counts;
        ConfusionMatrix {
            counts: [[c[1][1], c[1][0]], [c[0][1], c[0][0]]],
        }
    }

    pub fn recall(&self, label: Code) -> Option<f64> {
        let row = self.counts[idx(label)];
        let n = row[0] + row[1];
        (n > 0).then(|| row[idx(label)] as f64 / n as f64)
    }

    pub fn balanced_accuracy(&self) -> Result<f64> {
        balanced_accuracy(self)
    }
}

/// Unweighted mean of the per-label recalls.
pub fn balanced_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let pos = cm.recall(Code::Positive).ok_or(Error::InsufficientData(
        "no Positive sequences in evaluation set".into(),
    ))?;
    let neg = cm.recall(Code::Negative).ok_or(Error::InsufficientData(
        "no Negative sequences in evaluation set".into(),
    ))?;
    Ok((pos + neg) / 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunScore {
    pub run_index: usize,
    pub seed: u64,
    pub balanced_accuracy: f64,
    pub confusion: ConfusionMatrix,
}

/// Sample standard deviation over sqrt(n).
pub fn standard_error(scores: &[f64]) -> Result<f64> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "standard error needs >= 2 scores, got {n}"
        )));
    }
    if scores.iter().all(|&s| s == scores[0]) {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mean = scores.iter().sum::<f64>() / nf;
    let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (nf - 1.0);
    Ok(var.sqrt() / nf.sqrt())
}

pub fn mean(scores: &[f64]) -> f64 {
    scores.iter().sum::<f64>() / scores.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// min(W+, W-)
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub method: WilcoxonMethod,
    pub has_ties: bool,
}

/// Largest sample handled by full enumeration of the sign distribution.
pub const EXACT_MAX_N: usize = 25;
pub const MIN_PAIRS: usize = 5;

/// Average ranks (1-based) of `values`, ties sharing the mean of their ranks.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Two-sided paired signed-rank test on `a - b`.
///
/// Zero differences are dropped. Samples with at most [`EXACT_MAX_N`]
/// non-zero differences get an exact p-value from the permutation
/// distribution of the (mid)rank sum over all sign assignments; larger
/// samples use the normal approximation with continuity and tie correction.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite paired difference".into(),
        ));
    }
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "Wilcoxon test needs >= {MIN_PAIRS} non-zero differences, got {n}"
        )));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let statistic = w_plus.min(w_minus);
    let has_ties = ranks.iter().any(|r| r.fract() != 0.0) || {
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.windows(2).any(|w| w[0] == w[1])
    };

    let (p_value, method) = if n <= EXACT_MAX_N {
        (exact_p(&ranks, statistic), WilcoxonMethod::Exact)
    } else {
        (normal_p(&ranks, statistic), WilcoxonMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        statistic,
        w_plus,
        w_minus,
        p_value,
        n_effective: n,
        method,
        has_ties,
    })
}

/// 2 * P(W+ <= statistic) under random signs, capped at 1. Ranks are
/// doubled to integers so midranks are counted exactly.
fn exact_p(ranks: &[f64], statistic: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max_sum + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * statistic).round() as usize;
    let tail: f64 = counts[..=limit.min(max_sum)].iter().sum();
    let total = 2f64.powi(ranks.len() as i32);
    (2.0 * tail / total).min(1.0)
}

fn normal_p(ranks: &[f64], statistic: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((mean - statistic).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * normal.sf(z)).min(1.0)
}
