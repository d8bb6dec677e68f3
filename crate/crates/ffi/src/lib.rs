//! C ABI over `dyadcode`.
//!
//! Objects cross the boundary as opaque handles (`DcCorpus`, `DcLexicon`,
//! `DcModel`) created by `*_load`/`*_parse`/`*_train` functions and released
//! with the matching `*_free`. Every fallible function returns a
//! [`DcStatus`]; on failure a description is available from
//! [`dc_last_error`] on the same thread. Panics never unwind into C: they
//! are reported as `DC_STATUS_PANIC`.
//!
//! Labels use the corpus encoding: 1 = positive, 2 = negative.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dyadcode::corpus::{load_corpus, parse_corpus};
use dyadcode::evalstats::{wilcoxon_signed_rank, ConfusionMatrix, WilcoxonMethod};
use dyadcode::lexicon::{parse_lexicon, Lexicon};
use dyadcode::svm::{
    balanced_weights_for, default_gamma, train_svm, KernelSpec, SolverConfig, TrainedModel,
    WeightScheme,
};
use dyadcode::{Code, Corpus, Error, Matrix};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    /// The data cannot support the request (one label only, too few pairs, ...).
    Data = 5,
    Config = 6,
    Panic = 99,
}

pub struct DcCorpus(Corpus);
pub struct DcLexicon(Lexicon);
pub struct DcModel(TrainedModel);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DcCorpusStats {
    pub n_total: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_couples: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DcWilcoxon {
    /// min(W+, W-)
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    /// 1 when the exact null distribution was used, 0 for the normal approximation.
    pub exact: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DcStatus {
    match err {
        Error::Io { .. } => DcStatus::Io,
        Error::Parse { .. } | Error::UnknownCode(_) | Error::DuplicateId(_) => DcStatus::Parse,
        Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => DcStatus::InvalidArgument,
        Error::Config(_) => DcStatus::Config,
        Error::Fold { source, .. } => status_of(source),
        Error::MissingId { .. }
        | Error::EmptyText
        | Error::SingleLabel(_)
        | Error::InsufficientData(_) => DcStatus::Data,
    }
}

enum Failure {
    Null(&'static str),
    Arg(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer passed for {what}"));
            DcStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(msg);
            DcStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            let status = status_of(&e);
            set_last_error(e.to_string());
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {msg}"));
            DcStatus::Panic
        }
    }
}

unsafe fn nonnull<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{what} is not valid UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the most recent failure on this thread, or NULL. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- corpus ---------------------------------------------------------------

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_load(path: *const c_char, out: *mut *mut DcCorpus) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let path = PathBuf::from(c_str(path, "path")?);
        *out = boxed(DcCorpus(load_corpus(path)?));
        Ok(())
    })
}

/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_parse(text: *const c_char, out: *mut *mut DcCorpus) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DcCorpus(parse_corpus(c_str(text, "text")?)?));
        Ok(())
    })
}

/// Number of sequences; 0 for a NULL handle.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_len(corpus: *const DcCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_stats(
    corpus: *const DcCorpus,
    out: *mut DcCorpusStats,
) -> DcStatus {
    guard(|| {
        let s = nonnull(corpus, "corpus")?.0.stats();
        *out_ptr(out, "out")? = DcCorpusStats {
            n_total: s.n_total,
            n_positive: s.n_positive,
            n_negative: s.n_negative,
            n_couples: s.n_couples,
        };
        Ok(())
    })
}

/// New corpus without the sequences whose transcript has no words.
///
/// # Safety
/// `corpus` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_drop_empty(
    corpus: *const DcCorpus,
    out: *mut *mut DcCorpus,
) -> DcStatus {
    guard(|| {
        let c = nonnull(corpus, "corpus")?;
        *out_ptr(out, "out")? = boxed(DcCorpus(c.0.drop_empty()));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_corpus_free(corpus: *mut DcCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

// ---- lexicon --------------------------------------------------------------

/// Parses a DIC-format lexicon.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_lexicon_parse(
    text: *const c_char,
    out: *mut *mut DcLexicon,
) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DcLexicon(parse_lexicon(c_str(text, "text")?)?));
        Ok(())
    })
}

/// Number of feature columns (one per category).
///
/// # Safety
/// `lexicon` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_lexicon_num_categories(lexicon: *const DcLexicon) -> usize {
    lexicon.as_ref().map_or(0, |l| l.0.num_categories())
}

/// Writes the category proportions (count / word count) of `text` into `values` (capacity
/// `capacity`, which must be at least the number of categories) and the
/// token count into `word_count` (may be NULL).
///
/// # Safety
/// Pointers must be valid; `values` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn dc_lexicon_featurize(
    lexicon: *const DcLexicon,
    text: *const c_char,
    values: *mut f64,
    capacity: usize,
    word_count: *mut usize,
) -> DcStatus {
    guard(|| {
        let lex = nonnull(lexicon, "lexicon")?;
        let text = c_str(text, "text")?;
        let n = lex.0.num_categories();
        if capacity < n {
            return Err(Failure::Arg(format!(
                "capacity {capacity} < {n} categories"
            )));
        }
        if values.is_null() && n > 0 {
            return Err(Failure::Null("values"));
        }
        let feats = lex.0.featurize(text)?;
        if n > 0 {
            std::slice::from_raw_parts_mut(values, n).copy_from_slice(&feats.values);
        }
        if let Some(wc) = word_count.as_mut() {
            *wc = feats.word_count;
        }
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_lexicon_free(lexicon: *mut DcLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

// ---- svm ------------------------------------------------------------------

/// Trains an RBF-kernel SVM on the row-major `rows x cols` matrix `x`.
///
/// `gamma <= 0` selects `1 / (cols * variance of x)`. With `balanced != 0`
/// each class's box bound is scaled by `rows / (2 * class size)`.
///
/// # Safety
/// `x` must hold `rows * cols` doubles, `labels` `rows` bytes, and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_train(
    x: *const f64,
    rows: usize,
    cols: usize,
    labels: *const u8,
    c: f64,
    gamma: f64,
    balanced: i32,
    out: *mut *mut DcModel,
) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| Failure::Arg("rows * cols overflows".into()))?;
        let x = Matrix::from_vec(rows, cols, slice(x, len, "x")?.to_vec())?;
        let y = slice(labels, rows, "labels")?
            .iter()
            .map(|&v| Code::from_int(v as i64))
            .collect::<Result<Vec<_>, _>>()?;
        let gamma = if gamma > 0.0 {
            gamma
        } else {
            default_gamma(&x)?
        };
        let weights = if balanced != 0 {
            balanced_weights_for(&y)?
        } else {
            WeightScheme::uniform()
        };
        let model = train_svm(
            &x,
            &y,
            &SolverConfig::with_c(c),
            KernelSpec::rbf(gamma)?,
            weights,
        )?;
        *out = boxed(DcModel(model));
        Ok(())
    })
}

/// Input dimension of the model; 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_dim(model: *const DcModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `model` must be a live handle, `x` must hold `len` doubles and `out`
/// must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_decision(
    model: *const DcModel,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> DcStatus {
    guard(|| {
        let m = nonnull(model, "model")?;
        *out_ptr(out, "out")? = m.0.decision_function(slice(x, len, "x")?)?;
        Ok(())
    })
}

/// Predicted label (1 = positive, 2 = negative).
///
/// # Safety
/// Same contract as [`dc_svm_decision`].
#[no_mangle]
pub unsafe extern "C" fn dc_svm_predict(
    model: *const DcModel,
    x: *const f64,
    len: usize,
    out: *mut u8,
) -> DcStatus {
    guard(|| {
        let m = nonnull(model, "model")?;
        *out_ptr(out, "out")? = m.0.predict(slice(x, len, "x")?)?.as_int();
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_save(model: *const DcModel, path: *const c_char) -> DcStatus {
    guard(|| {
        let m = nonnull(model, "model")?;
        m.0.save(c_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_load(path: *const c_char, out: *mut *mut DcModel) -> DcStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(DcModel(TrainedModel::load(c_str(path, "path")?)?));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dc_svm_free(model: *mut DcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

// ---- statistics -----------------------------------------------------------

/// Balanced accuracy of a confusion matrix given as
/// `{pos->pos, pos->neg, neg->pos, neg->neg}` (true label first).
///
/// # Safety
/// `counts` must point to 4 integers and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_balanced_accuracy(counts: *const u64, out: *mut f64) -> DcStatus {
    guard(|| {
        let c = slice(counts, 4, "counts")?;
        let cm = ConfusionMatrix::from_counts([[c[0], c[1]], [c[2], c[3]]]);
        *out_ptr(out, "out")? = cm.balanced_accuracy()?;
        Ok(())
    })
}

/// Two-sided Wilcoxon signed-rank test on the pairs `(a[i], b[i])`.
///
/// # Safety
/// `a` and `b` must hold `n` doubles and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dc_wilcoxon(
    a: *const f64,
    b: *const f64,
    n: usize,
    out: *mut DcWilcoxon,
) -> DcStatus {
    guard(|| {
        let r = wilcoxon_signed_rank(slice(a, n, "a")?, slice(b, n, "b")?)?;
        *out_ptr(out, "out")? = DcWilcoxon {
            statistic: r.statistic,
            w_plus: r.w_plus,
            w_minus: r.w_minus,
            p_value: r.p_value,
            n_effective: r.n_effective,
            exact: (r.method == WilcoxonMethod::Exact) as i32,
        };
        Ok(())
    })
}
