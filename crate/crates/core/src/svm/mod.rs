//! Class-weighted soft-margin kernel SVM.
//!
//! Training solves the dual with per-sample box bounds `C * w_label`, so the
//! "balanced" weighting lives inside the solver. Positive maps to +1 and
//! Negative to -1; `predict` returns Positive when the decision value is
//! `>= 0`.

mod cache;
mod smo;

use std::fmt::Write as _;
use std::path::Path;

pub use cache::KernelCache;
pub use smo::{solve_dual, DualSolution};

use crate::corpus::Code;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MODEL_HEADER: &str = "dyadsvm/1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Rbf { gamma: f64 },
    Linear,
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Result<KernelSpec> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "RBF gamma must be > 0, got {gamma}"
            )));
        }
        Ok(KernelSpec::Rbf { gamma })
    }

    /// Unchecked evaluation; both slices must have equal length.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
            KernelSpec::Linear => x.iter().zip(z).map(|(a, b)| a * b).sum(),
        }
    }
}

/// exp(-gamma * |x - z|^2)
pub fn rbf_kernel(x: &[f64], z: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    Ok(KernelSpec::rbf(gamma)?.eval(x, z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightScheme {
    pub positive: f64,
    pub negative: f64,
}

impl WeightScheme {
    pub fn uniform() -> Self {
        WeightScheme {
            positive: 1.0,
            negative: 1.0,
        }
    }

    pub fn new(positive: f64, negative: f64) -> Result<Self> {
        if !(positive > 0.0 && negative > 0.0 && positive.is_finite() && negative.is_finite()) {
            return Err(Error::InvalidArgument(
                "class weights must be positive".into(),
            ));
        }
        Ok(WeightScheme { positive, negative })
    }

    pub fn weight(&self, code: Code) -> f64 {
        match code {
            Code::Positive => self.positive,
            Code::Negative => self.negative,
        }
    }
}

/// w_c = (n_pos + n_neg) / (2 * n_c)
pub fn balanced_weights(n_pos: usize, n_neg: usize) -> Result<WeightScheme> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleLabel(if n_pos == 0 {
            "Negative"
        } else {
            "Positive"
        }));
    }
    let total = (n_pos + n_neg) as f64;
    Ok(WeightScheme {
        positive: total / (2.0 * n_pos as f64),
        negative: total / (2.0 * n_neg as f64),
    })
}

pub fn balanced_weights_for(labels: &[Code]) -> Result<WeightScheme> {
    let n_pos = labels.iter().filter(|&&c| c == Code::Positive).count();
    balanced_weights(n_pos, labels.len() - n_pos)
}

/// `1 / (d * var)` over all entries pooled, or `1 / d` when the variance is 0.
pub fn default_gamma(x: &Matrix) -> Result<f64> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::InsufficientData(
            "default_gamma on an empty matrix".into(),
        ));
    }
    let d = x.cols() as f64;
    let values = x.as_slice();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(if var > 0.0 { 1.0 / (d * var) } else { 1.0 / d })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub c: f64,
    pub tol: f64,
    /// Maximum number of pair updates.
    pub max_iter: usize,
    /// Kernel cache capacity in matrix entries.
    pub cache_size: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            c: 1.0,
            tol: 1e-3,
            max_iter: 100_000,
            cache_size: 1 << 22,
        }
    }
}

impl SolverConfig {
    pub fn with_c(c: f64) -> Self {
        SolverConfig {
            c,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "C must be > 0, got {}",
                self.c
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainInfo {
    pub iterations: usize,
    pub converged: bool,
    pub max_violation: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    support_vectors: Matrix,
    dual_coefs: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    info: TrainInfo,
}

pub fn train_svm(
    x: &Matrix,
    y: &[Code],
    config: &SolverConfig,
    kernel: KernelSpec,
    weights: WeightScheme,
) -> Result<TrainedModel> {
    config.validate()?;
    if let KernelSpec::Rbf { gamma } = kernel {
        KernelSpec::rbf(gamma)?;
    }
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if !y.contains(&Code::Positive) {
        return Err(Error::SingleLabel("Negative"));
    }
    if !y.contains(&Code::Negative) {
        return Err(Error::SingleLabel("Positive"));
    }
    if !x.all_finite() {
        return Err(Error::InvalidArgument(
            "training matrix has non-finite entries".into(),
        ));
    }
    let signs: Vec<f64> = y.iter().map(|c| c.sign()).collect();
    let upper: Vec<f64> = y.iter().map(|&c| config.c * weights.weight(c)).collect();
    let sol = solve_dual(x, &signs, &upper, &kernel, config);

    let sv: Vec<usize> = (0..sol.alpha.len())
        .filter(|&i| sol.alpha[i] > 0.0)
        .collect();
    Ok(TrainedModel {
        support_vectors: x.select_rows(&sv),
        dual_coefs: sv.iter().map(|&i| sol.alpha[i] * signs[i]).collect(),
        bias: -sol.rho,
        kernel,
        info: TrainInfo {
            iterations: sol.iterations,
            converged: sol.converged,
            max_violation: sol.max_violation,
            objective: sol.objective,
        },
    })
}

impl TrainedModel {
    pub fn support_vectors(&self) -> &Matrix {
        &self.support_vectors
    }

    /// alpha_i * y_i for each support vector.
    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn info(&self) -> &TrainInfo {
        &self.info
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.cols()
    }

    pub fn decision_function(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let s: f64 = self
            .support_vectors
            .iter_rows()
            .zip(&self.dual_coefs)
            .map(|(sv, c)| c * self.kernel.eval(sv, x))
            .sum();
        Ok(s + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Code> {
        Ok(if self.decision_function(x)? >= 0.0 {
            Code::Positive
        } else {
            Code::Negative
        })
    }

    pub fn predict_all(&self, x: &Matrix) -> Result<Vec<Code>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MODEL_HEADER}\n");
        match self.kernel {
            KernelSpec::Rbf { gamma } => {
                let _ = writeln!(out, "kernel rbf {gamma:?}");
            }
            KernelSpec::Linear => out.push_str("kernel linear\n"),
        }
        let _ = writeln!(out, "bias {:?}", self.bias);
        let i = &self.info;
        let _ = writeln!(
            out,
            "info {} {} {:?} {:?}",
            i.iterations, i.converged, i.max_violation, i.objective
        );
        let _ = writeln!(out, "sv {} {}", self.dual_coefs.len(), self.dim());
        for (c, sv) in self.dual_coefs.iter().zip(self.support_vectors.iter_rows()) {
            let _ = write!(out, "{c:?}");
            for v in sv {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<TrainedModel> {
        const WHAT: &str = "model";
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |expect: &str| -> Result<(usize, Vec<String>)> {
            let (n, line) = lines
                .next()
                .ok_or_else(|| Error::parse(WHAT, 0, format!("missing {expect} line")))?;
            Ok((n, line.split_whitespace().map(str::to_string).collect()))
        };
        let num = |s: &str, n: usize| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(WHAT, n, format!("bad number {s:?}")))
        };
        let (_, header) = next("header")?;
        if header != [MODEL_HEADER] {
            return Err(Error::parse(WHAT, 1, format!("expected {MODEL_HEADER:?}")));
        }
        let (n, k) = next("kernel")?;
        let kernel = match k.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["kernel", "rbf", g] => KernelSpec::rbf(num(g, n)?)?,
            ["kernel", "linear"] => KernelSpec::Linear,
            _ => return Err(Error::parse(WHAT, n, "bad kernel line")),
        };
        let (n, b) = next("bias")?;
        let bias = match &b[..] {
            [tag, v] if tag == "bias" => num(v, n)?,
            _ => return Err(Error::parse(WHAT, n, "bad bias line")),
        };
        let (n, inf) = next("info")?;
        let info = match &inf[..] {
            [tag, it, conv, viol, obj] if tag == "info" => TrainInfo {
                iterations: it
                    .parse()
                    .map_err(|_| Error::parse(WHAT, n, "bad iterations"))?,
                converged: conv
                    .parse()
                    .map_err(|_| Error::parse(WHAT, n, "bad flag"))?,
                max_violation: num(viol, n)?,
                objective: num(obj, n)?,
            },
            _ => return Err(Error::parse(WHAT, n, "bad info line")),
        };
        let (n, s) = next("sv")?;
        let (n_sv, dim) = match &s[..] {
            [tag, a, b] if tag == "sv" => (
                a.parse::<usize>()
                    .map_err(|_| Error::parse(WHAT, n, "bad count"))?,
                b.parse::<usize>()
                    .map_err(|_| Error::parse(WHAT, n, "bad dim"))?,
            ),
            _ => return Err(Error::parse(WHAT, n, "bad sv line")),
        };
        let mut coefs = Vec::with_capacity(n_sv);
        let mut data = Vec::with_capacity(n_sv * dim);
        for _ in 0..n_sv {
            let (n, row) = next("support vector")?;
            if row.len() != dim + 1 {
                return Err(Error::parse(WHAT, n, "support vector has wrong length"));
            }
            coefs.push(num(&row[0], n)?);
            for v in &row[1..] {
                data.push(num(v, n)?);
            }
        }
        Ok(TrainedModel {
            support_vectors: Matrix::from_vec(n_sv, dim, data)?,
            dual_coefs: coefs,
            bias,
            kernel,
            info,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TrainedModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedModel::from_text(&text)
    }
}
