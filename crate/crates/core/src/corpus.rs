//! Coded interaction sequences and the `dyadcorpus/1` line format.
//!
//! ```text
//! dyadcorpus/1
//! @channel_map  "A=left B=right"
//! c1  A  0  1  "ja gut"
//! ```
//!
//! Fields are separated by single tabs. After the header, `@key<TAB>value`
//! lines carry metadata and every other non-blank line is a record
//! `couple_id partner seq_index code transcript`, with the transcript as a
//! JSON string literal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::tokenize::has_tokens;

pub const CORPUS_HEADER: &str = "dyadcorpus/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Positive,
    Negative,
}

impl Code {
    pub fn as_int(self) -> u8 {
        match self {
            Code::Positive => 1,
            Code::Negative => 2,
        }
    }

    pub fn from_int(v: i64) -> Result<Code> {
        match v {
            1 => Ok(Code::Positive),
            2 => Ok(Code::Negative),
            other => Err(Error::UnknownCode(other.to_string())),
        }
    }

    /// +1 for Positive, -1 for Negative.
    pub fn sign(self) -> f64 {
        match self {
            Code::Positive => 1.0,
            Code::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Code {
        match self {
            Code::Positive => Code::Negative,
            Code::Negative => Code::Positive,
        }
    }
}

impl FromStr for Code {
    type Err = Error;

    fn from_str(s: &str) -> Result<Code> {
        match s {
            "1" => Ok(Code::Positive),
            "2" => Ok(Code::Negative),
            other => Err(Error::UnknownCode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partner {
    A,
    B,
}

impl fmt::Display for Partner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Partner::A => "A",
            Partner::B => "B",
        })
    }
}

impl FromStr for Partner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partner> {
        match s {
            "A" => Ok(Partner::A),
            "B" => Ok(Partner::B),
            other => Err(Error::InvalidArgument(format!("partner {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub couple_id: String,
    pub partner: Partner,
    pub seq_index: u32,
    pub transcript: String,
    pub code: Code,
}

impl Sequence {
    /// Canonical id `couple_id/partner/seq_index`.
    pub fn id(&self) -> String {
        format!("{}/{}/{}", self.couple_id, self.partner, self.seq_index)
    }

    fn sort_key(&self) -> (&str, Partner, u32) {
        (&self.couple_id, self.partner, self.seq_index)
    }
}

fn validate_couple_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains('/') || id.chars().any(char::is_whitespace) {
        return Err(Error::InvalidArgument(format!(
            "couple id {id:?} must be non-empty without '/' or whitespace"
        )));
    }
    Ok(())
}

/// Immutable, id-unique collection of sequences sorted by
/// (couple_id, partner, seq_index).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    sequences: Vec<Sequence>,
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub n_total: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub n_couples: usize,
}

impl Corpus {
    pub fn new(mut sequences: Vec<Sequence>, metadata: BTreeMap<String, String>) -> Result<Self> {
        for s in &sequences {
            validate_couple_id(&s.couple_id)?;
        }
        for k in metadata.keys() {
            if k.is_empty() || k.contains(['\t', '\n', '\r']) {
                return Err(Error::InvalidArgument(format!("metadata key {k:?}")));
            }
        }
        sequences.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        if let Some(w) = sequences
            .windows(2)
            .find(|w| w[0].sort_key() == w[1].sort_key())
        {
            return Err(Error::DuplicateId(w[0].id()));
        }
        Ok(Corpus {
            sequences,
            metadata,
        })
    }

    pub fn sequences(&self) -> &[Sequence] {
        &self.sequences
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.sequences.iter().map(Sequence::id).collect()
    }

    pub fn labels(&self) -> Vec<Code> {
        self.sequences.iter().map(|s| s.code).collect()
    }

    pub fn couple_ids(&self) -> Vec<&str> {
        self.sequences
            .iter()
            .map(|s| s.couple_id.as_str())
            .collect()
    }

    pub fn with_metadata(
        mut self,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<Self> {
        let key = key.into();
        if key.is_empty() || key.contains(['\t', '\n', '\r']) {
            return Err(Error::InvalidArgument(format!("metadata key {key:?}")));
        }
        self.metadata.insert(key, value.into());
        Ok(self)
    }

    /// Keeps sequences whose transcript has at least one token.
    pub fn drop_empty(&self) -> Corpus {
        Corpus {
            sequences: self
                .sequences
                .iter()
                .filter(|s| has_tokens(&s.transcript))
                .cloned()
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn stats(&self) -> CorpusStats {
        let n_positive = self
            .sequences
            .iter()
            .filter(|s| s.code == Code::Positive)
            .count();
        let couples: BTreeSet<&str> = self.couple_ids().into_iter().collect();
        CorpusStats {
            n_total: self.sequences.len(),
            n_positive,
            n_negative: self.sequences.len() - n_positive,
            n_couples: couples.len(),
        }
    }

    /// Randomly permutes the codes across sequences, keeping the class counts.
    /// Used for chance-level control experiments.
    pub fn shuffle_labels(&self, seed: u64) -> Corpus {
        let mut codes = self.labels();
        codes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let sequences = self
            .sequences
            .iter()
            .zip(codes)
            .map(|(s, code)| Sequence { code, ..s.clone() })
            .collect();
        Corpus {
            sequences,
            metadata: self.metadata.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(CORPUS_HEADER);
        out.push('\n');
        for (k, v) in &self.metadata {
            out.push('@');
            out.push_str(k);
            out.push('\t');
            out.push_str(&serde_json::to_string(v).expect("string serializes"));
            out.push('\n');
        }
        for s in &self.sequences {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                s.couple_id,
                s.partner,
                s.seq_index,
                s.code.as_int(),
                serde_json::to_string(&s.transcript).expect("string serializes"),
            ));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

pub fn parse_corpus(text: &str) -> Result<Corpus> {
    const WHAT: &str = "corpus";
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let Some((_, header)) = lines.by_ref().find(|(_, l)| !l.trim().is_empty()) else {
        return Ok(Corpus::default());
    };
    if header.trim() != CORPUS_HEADER {
        return Err(Error::parse(
            WHAT,
            1,
            format!("expected header {CORPUS_HEADER:?}"),
        ));
    }

    let mut sequences = Vec::new();
    let mut metadata = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('@') {
            let (key, value) = meta
                .split_once('\t')
                .ok_or_else(|| Error::parse(WHAT, n, "metadata line needs key<TAB>value"))?;
            let value: String = serde_json::from_str(value)
                .map_err(|e| Error::parse(WHAT, n, format!("metadata value: {e}")))?;
            metadata.insert(key.to_string(), value);
            continue;
        }
        let fields: Vec<&str> = line.splitn(5, '\t').collect();
        let [couple_id, partner, seq_index, code, transcript] = fields[..] else {
            return Err(Error::parse(
                WHAT,
                n,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        };
        validate_couple_id(couple_id).map_err(|e| Error::parse(WHAT, n, e.to_string()))?;
        let partner: Partner = partner
            .parse()
            .map_err(|e: Error| Error::parse(WHAT, n, e.to_string()))?;
        let seq_index: u32 = seq_index
            .parse()
            .map_err(|_| Error::parse(WHAT, n, format!("bad seq_index {seq_index:?}")))?;
        let code: Code = code.trim().parse()?;
        let transcript: String = serde_json::from_str(transcript)
            .map_err(|e| Error::parse(WHAT, n, format!("transcript: {e}")))?;
        let seq = Sequence {
            couple_id: couple_id.to_string(),
            partner,
            seq_index,
            transcript,
            code,
        };
        if !seen.insert(seq.id()) {
            return Err(Error::DuplicateId(seq.id()));
        }
        sequences.push(seq);
    }
    Corpus::new(sequences, metadata)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

/// Parameters of the synthetic corpus generator.
///
/// Each transcript has a uniform number of tokens in
/// `min_tokens..=max_tokens`. Every token independently comes from the
/// sequence's own signal category with probability `p_own`, from the opposite
/// signal category with `p_other`, from the remaining lexicon categories with
/// `p_background`, and otherwise from a filler vocabulary that no lexicon
/// entry matches. The first lexicon category carries the positive signal,
/// the second the negative one. Labels are drawn with `positive_rate` and
/// then flipped with probability `label_noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_couples: usize,
    pub seqs_per_partner: usize,
    pub label_noise: f64,
    pub seed: u64,
    pub positive_rate: f64,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub p_own: f64,
    pub p_other: f64,
    pub p_background: f64,
}

impl SynthConfig {
    pub fn new(n_couples: usize, seqs_per_partner: usize, label_noise: f64, seed: u64) -> Self {
        SynthConfig {
            n_couples,
            seqs_per_partner,
            label_noise,
            seed,
            ..Default::default()
        }
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_couples: 200,
            seqs_per_partner: 12,
            label_noise: 0.05,
            seed: 0,
            positive_rate: 0.7,
            min_tokens: 8,
            max_tokens: 16,
            p_own: 0.40,
            p_other: 0.05,
            p_background: 0.20,
        }
    }
}

const FILLER: &[&str] = &[
    "und",
    "also",
    "ja",
    "so",
    "das",
    "ist",
    "eben",
    "halt",
    "dann",
    "mal",
    "was",
    "wo",
    "jetzt",
    "auch",
    "noch",
    "schon",
    "einfach",
    "genau",
    "irgendwie",
    "gestern",
    "morgen",
    "zeit",
    "haus",
    "arbeit",
    "auto",
    "essen",
    "woche",
    "abend",
];

const PREFIX_SUFFIXES: &[&str] = &["", "e", "en", "t", "st", "er"];

fn prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "{name} = {p} is not a probability"
        )));
    }
    Ok(())
}

/// Deterministic labeled corpus with a signal planted through `lexicon`.
pub fn generate_synthetic(config: &SynthConfig, lexicon: &Lexicon) -> Result<Corpus> {
    if config.n_couples == 0 {
        return Err(Error::InvalidArgument("n_couples must be >= 1".into()));
    }
    prob("label_noise", config.label_noise)?;
    if config.label_noise > 0.5 {
        return Err(Error::InvalidArgument("label_noise must be <= 0.5".into()));
    }
    prob("positive_rate", config.positive_rate)?;
    prob("p_own", config.p_own)?;
    prob("p_other", config.p_other)?;
    prob("p_background", config.p_background)?;
    if config.p_own + config.p_other + config.p_background > 1.0 {
        return Err(Error::InvalidArgument(
            "token probabilities sum above 1".into(),
        ));
    }
    if config.min_tokens == 0 || config.min_tokens > config.max_tokens {
        return Err(Error::InvalidArgument(
            "need 1 <= min_tokens <= max_tokens".into(),
        ));
    }

    let cat_ids: Vec<u32> = lexicon.categories().keys().copied().collect();
    if cat_ids.len() < 2 {
        return Err(Error::InvalidArgument(
            "planted lexicon needs at least 2 categories".into(),
        ));
    }
    let words_of = |cats: &[u32]| -> Vec<usize> {
        lexicon
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.categories.iter().any(|c| cats.contains(c)))
            .map(|(i, _)| i)
            .collect()
    };
    let pos_words = words_of(&cat_ids[..1]);
    let neg_words = words_of(&cat_ids[1..2]);
    let bg_words = words_of(&cat_ids[2..]);
    if pos_words.is_empty() || neg_words.is_empty() {
        return Err(Error::InvalidArgument(
            "first two lexicon categories need at least one entry each".into(),
        ));
    }

    let filler: Vec<&str> = FILLER
        .iter()
        .copied()
        .filter(|w| lexicon.matching_entries(w).is_empty())
        .collect();
    if filler.is_empty() {
        return Err(Error::InvalidArgument(
            "lexicon matches every filler word".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draw_word = |rng: &mut ChaCha8Rng, pool: &[usize]| -> String {
        let e = &lexicon.entries()[pool[rng.gen_range(0..pool.len())]];
        if e.is_prefix {
            format!(
                "{}{}",
                e.pattern,
                PREFIX_SUFFIXES[rng.gen_range(0..PREFIX_SUFFIXES.len())]
            )
        } else {
            e.pattern.clone()
        }
    };

    let width = config.n_couples.to_string().len().max(3);
    let mut sequences = Vec::with_capacity(config.n_couples * 2 * config.seqs_per_partner);
    for c in 0..config.n_couples {
        let couple_id = format!("c{c:0width$}");
        for partner in [Partner::A, Partner::B] {
            for idx in 0..config.seqs_per_partner {
                let truth = if rng.gen_bool(config.positive_rate) {
                    Code::Positive
                } else {
                    Code::Negative
                };
                let (own, other) = match truth {
                    Code::Positive => (&pos_words, &neg_words),
                    Code::Negative => (&neg_words, &pos_words),
                };
                let n_tokens = rng.gen_range(config.min_tokens..=config.max_tokens);
                let mut words = Vec::with_capacity(n_tokens);
                for _ in 0..n_tokens {
                    let r: f64 = rng.gen();
                    let word = if r < config.p_own {
                        draw_word(&mut rng, own)
                    } else if r < config.p_own + config.p_other {
                        draw_word(&mut rng, other)
                    } else if r < config.p_own + config.p_other + config.p_background
                        && !bg_words.is_empty()
                    {
                        draw_word(&mut rng, &bg_words)
                    } else {
                        filler[rng.gen_range(0..filler.len())].to_string()
                    };
                    words.push(word);
                }
                let code = if rng.gen_bool(config.label_noise) {
                    truth.flipped()
                } else {
                    truth
                };
                sequences.push(Sequence {
                    couple_id: couple_id.clone(),
                    partner,
                    seq_index: idx as u32,
                    transcript: words.join(" "),
                    code,
                });
            }
        }
    }

    let metadata = BTreeMap::from([
        ("synth.seed".to_string(), config.seed.to_string()),
        (
            "synth.label_noise".to_string(),
            config.label_noise.to_string(),
        ),
        (
            "synth.positive_rate".to_string(),
            config.positive_rate.to_string(),
        ),
    ]);
    Corpus::new(sequences, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(c: &str, p: Partner, i: u32, t: &str, code: Code) -> Sequence {
        Sequence {
            couple_id: c.into(),
            partner: p,
            seq_index: i,
            transcript: t.into(),
            code,
        }
    }

    #[test]
    fn code_integers() {
        assert_eq!(Code::Positive.as_int(), 1);
        assert_eq!(Code::Negative.as_int(), 2);
        assert_eq!("2".parse::<Code>().unwrap(), Code::Negative);
        assert!(matches!("3".parse::<Code>(), Err(Error::UnknownCode(_))));
        assert!(matches!("0".parse::<Code>(), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn single_record() {
        let c = parse_corpus("dyadcorpus/1\nc1\tA\t0\t1\t\"ja gut\"\n").unwrap();
        assert_eq!(c.len(), 1);
        let s = &c.sequences()[0];
        assert_eq!(s.code, Code::Positive);
        assert_eq!(s.id(), "c1/A/0");
        assert_eq!(s.transcript, "ja gut");
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = "dyadcorpus/1\nc1\tA\t0\t1\t\"ja\"\nc1\tA\t0\t2\t\"nein\"\n";
        assert!(matches!(parse_corpus(text), Err(Error::DuplicateId(id)) if id == "c1/A/0"));
    }

    #[test]
    fn empty_file() {
        let c = parse_corpus("").unwrap();
        assert!(c.is_empty());
        assert_eq!(c.stats(), CorpusStats::default());
        assert!(parse_corpus("dyadcorpus/1\n").unwrap().is_empty());
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_corpus("dyadcorpus/1\nc1\tA\t0\t1\t\"a\"\nc1\tA\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_corpus("dyadcorpus/1\nc1\tC\t0\t1\t\"a\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_corpus("dyadcorpus/1\nc1\tA\tx\t1\t\"a\"\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_corpus("dyadcorpus/1\nc1\tA\t1\t1\tunquoted\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn neutral_code_rejected() {
        let err = parse_corpus("dyadcorpus/1\nc1\tA\t0\t0\t\"a\"\n").unwrap_err();
        assert!(matches!(err, Error::UnknownCode(_)));
    }

    #[test]
    fn wrong_header() {
        assert!(parse_corpus("dyadcorpus/2\n").is_err());
    }

    #[test]
    fn sorted_by_id_components() {
        let c = Corpus::new(
            vec![
                seq("c2", Partner::A, 0, "a", Code::Positive),
                seq("c1", Partner::B, 10, "a", Code::Positive),
                seq("c1", Partner::B, 2, "a", Code::Positive),
                seq("c1", Partner::A, 5, "a", Code::Positive),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(c.ids(), ["c1/A/5", "c1/B/2", "c1/B/10", "c2/A/0"]);
    }

    #[test]
    fn drop_empty_cases() {
        let c = Corpus::new(
            vec![
                seq("c1", Partner::A, 0, "ja gut", Code::Positive),
                seq("c1", Partner::A, 1, "   ", Code::Positive),
                seq("c1", Partner::A, 2, "...", Code::Negative),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let d = c.drop_empty();
        assert_eq!(d.ids(), ["c1/A/0"]);
        assert_eq!(d.drop_empty(), d);
    }

    #[test]
    fn stats_counts() {
        let c = Corpus::new(
            vec![
                seq("c1", Partner::A, 0, "a", Code::Positive),
                seq("c1", Partner::B, 0, "a", Code::Negative),
                seq("c2", Partner::A, 0, "a", Code::Positive),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let s = c.stats();
        assert_eq!(
            (s.n_total, s.n_positive, s.n_negative, s.n_couples),
            (3, 2, 1, 2)
        );
    }

    #[test]
    fn synth_size_and_determinism() {
        let lex = Lexicon::planted_default();
        let cfg = SynthConfig::new(200, 12, 0.05, 7);
        let a = generate_synthetic(&cfg, &lex).unwrap();
        let b = generate_synthetic(&cfg, &lex).unwrap();
        assert_eq!(a.len(), 4800);
        assert_eq!(a.to_text(), b.to_text());
        let c = generate_synthetic(&SynthConfig { seed: 8, ..cfg }, &lex).unwrap();
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn synth_class_ratio() {
        let lex = Lexicon::planted_default();
        let c = generate_synthetic(&SynthConfig::new(200, 12, 0.05, 1), &lex).unwrap();
        let s = c.stats();
        let rate = s.n_positive as f64 / s.n_total as f64;
        // expected 0.7 * 0.95 + 0.3 * 0.05 = 0.68
        assert!((rate - 0.68).abs() < 0.03, "{rate}");
        assert_eq!(s.n_couples, 200);
    }

    #[test]
    fn synth_rejects_bad_args() {
        let lex = Lexicon::planted_default();
        assert!(generate_synthetic(&SynthConfig::new(0, 12, 0.05, 1), &lex).is_err());
        assert!(generate_synthetic(&SynthConfig::new(2, 12, 0.6, 1), &lex).is_err());
        assert!(generate_synthetic(&SynthConfig::new(2, 12, -0.1, 1), &lex).is_err());
        assert!(generate_synthetic(&SynthConfig::new(2, 12, f64::NAN, 1), &lex).is_err());
    }

    #[test]
    fn shuffle_labels_keeps_counts() {
        let lex = Lexicon::planted_default();
        let c = generate_synthetic(&SynthConfig::new(10, 12, 0.05, 3), &lex).unwrap();
        let s = c.shuffle_labels(9);
        assert_eq!(c.stats(), s.stats());
        assert_eq!(c.ids(), s.ids());
        assert_ne!(c.labels(), s.labels());
    }

    fn arb_sequence() -> impl Strategy<Value = Sequence> {
        (
            "[a-z][a-z0-9_]{0,4}",
            prop_oneof![Just(Partner::A), Just(Partner::B)],
            0u32..48,
            "\\PC{0,20}",
            prop_oneof![Just(Code::Positive), Just(Code::Negative)],
        )
            .prop_map(|(c, p, i, t, code)| seq(&c, p, i, &t, code))
    }

    proptest! {
        #[test]
        fn text_round_trip(
            seqs in proptest::collection::vec(arb_sequence(), 0..20),
            meta in proptest::collection::btree_map("[a-z.]{1,8}", "\\PC{0,12}", 0..3),
        ) {
            let mut seen = BTreeSet::new();
            let seqs: Vec<_> = seqs.into_iter().filter(|s| seen.insert(s.id())).collect();
            let c = Corpus::new(seqs, meta).unwrap();
            prop_assert_eq!(parse_corpus(&c.to_text()).unwrap(), c);
        }

        #[test]
        fn drop_empty_idempotent(seqs in proptest::collection::vec(arb_sequence(), 0..20)) {
            let mut seen = BTreeSet::new();
            let seqs: Vec<_> = seqs.into_iter().filter(|s| seen.insert(s.id())).collect();
            let c = Corpus::new(seqs, BTreeMap::new()).unwrap();
            let d = c.drop_empty();
            prop_assert_eq!(d.drop_empty(), d.clone());
            prop_assert!(d.stats().n_total <= c.stats().n_total);
            let s = c.stats();
            prop_assert_eq!(s.n_total, s.n_positive + s.n_negative);
        }
    }
}
