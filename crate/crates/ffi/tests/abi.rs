use std::ffi::{CStr, CString};
use std::ptr;

use dyadcode_ffi::*;

fn last_error() -> String {
    let p = dc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const CORPUS: &str = "dyadcorpus/1\n\
c001\tA\t0\t1\t\"we love this\"\n\
c001\tB\t0\t2\t\"you never listen\"\n\
c002\tA\t0\t1\t\"...\"\n";

#[test]
fn corpus_lifecycle() {
    let text = CString::new(CORPUS).unwrap();
    let mut corpus = ptr::null_mut();
    unsafe {
        assert_eq!(dc_corpus_parse(text.as_ptr(), &mut corpus), DcStatus::Ok);
        assert_eq!(dc_corpus_len(corpus), 3);
        let mut kept = ptr::null_mut();
        assert_eq!(dc_corpus_drop_empty(corpus, &mut kept), DcStatus::Ok);
        let mut stats = DcCorpusStats::default();
        assert_eq!(dc_corpus_stats(kept, &mut stats), DcStatus::Ok);
        assert_eq!(
            (
                stats.n_total,
                stats.n_positive,
                stats.n_negative,
                stats.n_couples
            ),
            (2, 1, 1, 1)
        );
        dc_corpus_free(kept);
        dc_corpus_free(corpus);
        dc_corpus_free(ptr::null_mut());
        assert_eq!(dc_corpus_len(ptr::null()), 0);
    }
}

#[test]
fn corpus_errors_map_to_status() {
    let mut corpus = ptr::null_mut();
    let bad = CString::new("not a corpus\n").unwrap();
    let missing = CString::new("/nonexistent/dir/corpus.txt").unwrap();
    unsafe {
        assert_eq!(dc_corpus_parse(bad.as_ptr(), &mut corpus), DcStatus::Parse);
        assert!(corpus.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(dc_corpus_load(missing.as_ptr(), &mut corpus), DcStatus::Io);
        assert!(last_error().contains("/nonexistent/dir"));
        assert_eq!(
            dc_corpus_parse(ptr::null(), &mut corpus),
            DcStatus::NullPointer
        );
        assert_eq!(
            dc_corpus_parse(bad.as_ptr(), ptr::null_mut()),
            DcStatus::NullPointer
        );
    }
}

#[test]
fn lexicon_featurize() {
    let dic = CString::new("%\n1\tposemo\n2\tnegemo\n%\nlove\t1\nhat*\t2\n").unwrap();
    let text = CString::new("I love you but I hate that").unwrap();
    let mut lex = ptr::null_mut();
    unsafe {
        assert_eq!(dc_lexicon_parse(dic.as_ptr(), &mut lex), DcStatus::Ok);
        assert_eq!(dc_lexicon_num_categories(lex), 2);
        let mut values = [0.0; 2];
        let mut wc = 0usize;
        assert_eq!(
            dc_lexicon_featurize(lex, text.as_ptr(), values.as_mut_ptr(), 2, &mut wc),
            DcStatus::Ok
        );
        assert_eq!(wc, 7);
        assert!((values[0] - 1.0 / 7.0).abs() < 1e-12);
        assert!((values[1] - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(
            dc_lexicon_featurize(lex, text.as_ptr(), values.as_mut_ptr(), 1, ptr::null_mut()),
            DcStatus::InvalidArgument
        );
        let empty = CString::new("!!!").unwrap();
        assert_eq!(
            dc_lexicon_featurize(lex, empty.as_ptr(), values.as_mut_ptr(), 2, ptr::null_mut()),
            DcStatus::Data
        );
        dc_lexicon_free(lex);
    }
}

#[test]
fn svm_train_predict_save_load() {
    let x = [0.0, 0.0, 0.2, 0.1, 3.0, 3.0, 3.1, 2.8];
    let labels = [1u8, 1, 2, 2];
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(
            dc_svm_train(x.as_ptr(), 4, 2, labels.as_ptr(), 10.0, 0.0, 1, &mut model),
            DcStatus::Ok
        );
        assert_eq!(dc_svm_dim(model), 2);
        let mut label = 0u8;
        assert_eq!(
            dc_svm_predict(model, [0.1, 0.0].as_ptr(), 2, &mut label),
            DcStatus::Ok
        );
        assert_eq!(label, 1);
        assert_eq!(
            dc_svm_predict(model, [3.0, 2.9].as_ptr(), 2, &mut label),
            DcStatus::Ok
        );
        assert_eq!(label, 2);
        let mut f = 0.0;
        assert_eq!(
            dc_svm_decision(model, [0.1].as_ptr(), 1, &mut f),
            DcStatus::InvalidArgument
        );

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.svm").to_str().unwrap()).unwrap();
        assert_eq!(dc_svm_save(model, path.as_ptr()), DcStatus::Ok);
        let mut loaded = ptr::null_mut();
        assert_eq!(dc_svm_load(path.as_ptr(), &mut loaded), DcStatus::Ok);
        let (mut f1, mut f2) = (0.0, 0.0);
        dc_svm_decision(model, [1.0, 1.5].as_ptr(), 2, &mut f1);
        dc_svm_decision(loaded, [1.0, 1.5].as_ptr(), 2, &mut f2);
        assert_eq!(f1, f2);
        dc_svm_free(loaded);
        dc_svm_free(model);
    }
}

#[test]
fn svm_rejects_bad_labels() {
    let x = [0.0, 1.0];
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(
            dc_svm_train(x.as_ptr(), 2, 1, [1u8, 1].as_ptr(), 1.0, 1.0, 0, &mut model),
            DcStatus::Data
        );
        assert_eq!(
            dc_svm_train(x.as_ptr(), 2, 1, [1u8, 0].as_ptr(), 1.0, 1.0, 0, &mut model),
            DcStatus::Parse
        );
        assert!(model.is_null());
    }
}

#[test]
fn statistics() {
    let mut ba = 0.0;
    let mut w = DcWilcoxon::default();
    unsafe {
        assert_eq!(
            dc_balanced_accuracy([8, 2, 1, 9].as_ptr(), &mut ba),
            DcStatus::Ok
        );
        assert!((ba - 0.85).abs() < 1e-12);
        let a: Vec<f64> = (0..20).map(|i| 0.70 + i as f64 * 1e-3).collect();
        let b: Vec<f64> = a.iter().map(|v| v - 0.01).collect();
        assert_eq!(
            dc_wilcoxon(a.as_ptr(), b.as_ptr(), 20, &mut w),
            DcStatus::Ok
        );
        assert_eq!(w.exact, 1);
        assert_eq!(w.n_effective, 20);
        assert!((w.p_value - 2.0 / 2f64.powi(20)).abs() < 1e-12);
        assert_eq!(
            dc_wilcoxon(a.as_ptr(), a.as_ptr(), 20, &mut w),
            DcStatus::Data
        );
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/dyadcode.h");
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(!dc_version().is_null());
}

/// Builds `tests/c/smoke.c` against the generated header and the static
/// library and runs it. Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_and_runs() {
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&compiler)
        .arg("--version")
        .output()
        .is_err()
    {
        eprintln!("skipping: no C compiler ({compiler})");
        return;
    }
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdyadcode_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let build = std::process::Command::new(&compiler)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "{}",
        String::from_utf8_lossy(&build.stderr)
    );
    let run = std::process::Command::new(&bin).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
