//! The synthetic generator against an independent simulation of its token
//! model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyadcode::corpus::{generate_synthetic, SynthConfig};
use dyadcode::lexicon::Lexicon;
use dyadcode::Code;

/// Accuracy of "more own-category than other-category words" (ties go to
/// Positive) when every token independently is own/other/neither.
fn simulated_rule_accuracy(cfg: &SynthConfig, draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut correct = [0usize; 2];
    let mut total = [0usize; 2];
    for _ in 0..draws {
        let positive = rng.gen_bool(cfg.positive_rate);
        let n = rng.gen_range(cfg.min_tokens..=cfg.max_tokens);
        let (mut own, mut other) = (0, 0);
        for _ in 0..n {
            let r: f64 = rng.gen();
            if r < cfg.p_own {
                own += 1;
            } else if r < cfg.p_own + cfg.p_other {
                other += 1;
            }
        }
        let (pos_words, neg_words) = if positive { (own, other) } else { (other, own) };
        let predicted_positive = pos_words >= neg_words;
        let k = usize::from(!positive);
        total[k] += 1;
        correct[k] += usize::from(predicted_positive == positive);
    }
    (
        correct[0] as f64 / total[0] as f64,
        correct[1] as f64 / total[1] as f64,
    )
}

fn corpus_rule_recalls(cfg: &SynthConfig) -> (f64, f64) {
    let lex = Lexicon::planted_default();
    let corpus = generate_synthetic(cfg, &lex).unwrap();
    let mut correct = [0usize; 2];
    let mut total = [0usize; 2];
    for s in corpus.sequences() {
        let f = lex.featurize(&s.transcript).unwrap();
        let predicted_positive = f.values[0] >= f.values[1];
        let k = usize::from(s.code == Code::Negative);
        total[k] += 1;
        correct[k] += usize::from(predicted_positive == (s.code == Code::Positive));
    }
    (
        correct[0] as f64 / total[0] as f64,
        correct[1] as f64 / total[1] as f64,
    )
}

#[test]
fn noiseless_corpus_matches_token_model() {
    let cfg = SynthConfig::new(400, 12, 0.0, 31);
    let (sim_pos, sim_neg) = simulated_rule_accuracy(&cfg, 400_000, 5);
    let (pos, neg) = corpus_rule_recalls(&cfg);
    // ~6700 positive and ~2900 negative sequences: 4 binomial SEs
    let se = |p: f64, n: f64| (p * (1.0 - p) / n).sqrt();
    assert!(
        (pos - sim_pos).abs() < 4.0 * se(sim_pos, 6700.0),
        "positive recall {pos} vs {sim_pos}"
    );
    assert!(
        (neg - sim_neg).abs() < 4.0 * se(sim_neg, 2900.0),
        "negative recall {neg} vs {sim_neg}"
    );
}

#[test]
fn label_noise_and_class_ratio() {
    let lex = Lexicon::planted_default();
    let clean = generate_synthetic(&SynthConfig::new(300, 12, 0.0, 9), &lex).unwrap();
    let noisy = generate_synthetic(&SynthConfig::new(300, 12, 0.05, 9), &lex).unwrap();
    let n = clean.len() as f64;
    let pos_rate = clean
        .labels()
        .iter()
        .filter(|&&c| c == Code::Positive)
        .count() as f64
        / n;
    assert!(
        (pos_rate - 0.7).abs() < 4.0 * (0.21 / n).sqrt(),
        "positive rate {pos_rate}"
    );

    // The noisy corpus keeps each transcript's intended code with p = 0.95.
    let lex_rule = |t: &str| {
        let f = lex.featurize(t).unwrap();
        f.values[0] >= f.values[1]
    };
    let agree = |c: &dyadcode::Corpus| {
        c.sequences()
            .iter()
            .filter(|s| lex_rule(&s.transcript) == (s.code == Code::Positive))
            .count() as f64
            / c.len() as f64
    };
    let (a_clean, a_noisy) = (agree(&clean), agree(&noisy));
    // agreement drops by noise * (2 * a_clean - 1) in expectation
    let expected = a_clean - 0.05 * (2.0 * a_clean - 1.0);
    assert!(
        (a_noisy - expected).abs() < 0.015,
        "noisy agreement {a_noisy} vs {expected}"
    );
}

#[test]
fn shape_and_determinism() {
    let lex = Lexicon::planted_default();
    let cfg = SynthConfig::new(200, 12, 0.05, 77);
    let a = generate_synthetic(&cfg, &lex).unwrap();
    let b = generate_synthetic(&cfg, &lex).unwrap();
    assert_eq!(a, b);
    let stats = a.stats();
    assert_eq!(stats.n_total, 4800);
    assert_eq!(stats.n_couples, 200);
    assert_eq!(a.drop_empty().len(), 4800);
}
