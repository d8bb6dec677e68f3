//! Dictionary-based featurization over DIC-format lexica.
//!
//! A DIC file has a category header between two `%` lines (`id name` per
//! line) followed by entry lines `pattern id [id ...]`. A pattern ending in
//! `*` matches any token with that prefix. Lines starting with `#` are
//! comments.
//!
//! A token matches an exact entry if one exists; otherwise it matches the
//! longest prefix entry. The matched entry adds 1 to each of its categories.
//! Feature values are category counts divided by the token count.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::tokenize::tokenize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Lowercased pattern without the trailing `*`.
    pub pattern: String,
    pub is_prefix: bool,
    pub categories: BTreeSet<u32>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    categories: BTreeMap<u32, String>,
    entries: Vec<LexiconEntry>,
    column_of: HashMap<u32, usize>,
    exact: HashMap<String, Vec<usize>>,
    prefix: HashMap<String, Vec<usize>>,
    max_prefix_chars: usize,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.categories == other.categories && self.entries == other.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconFeatures {
    /// One value per category in ascending category-id order.
    pub values: Vec<f64>,
    pub word_count: usize,
}

impl Lexicon {
    pub fn new(categories: BTreeMap<u32, String>, entries: Vec<LexiconEntry>) -> Result<Self> {
        for e in &entries {
            if e.is_prefix && e.pattern.is_empty() {
                return Err(Error::InvalidArgument("prefix pattern is empty".into()));
            }
            if e.pattern.contains('*') {
                return Err(Error::InvalidArgument(format!(
                    "pattern {:?} has '*' outside the final position",
                    e.pattern
                )));
            }
            if let Some(c) = e.categories.iter().find(|c| !categories.contains_key(c)) {
                return Err(Error::InvalidArgument(format!(
                    "entry {:?} references undeclared category {c}",
                    e.pattern
                )));
            }
        }
        let column_of = categories
            .keys()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        let mut exact: HashMap<String, Vec<usize>> = HashMap::new();
        let mut prefix: HashMap<String, Vec<usize>> = HashMap::new();
        let mut max_prefix_chars = 0;
        for (i, e) in entries.iter().enumerate() {
            if e.is_prefix {
                max_prefix_chars = max_prefix_chars.max(e.pattern.chars().count());
                prefix.entry(e.pattern.clone()).or_default().push(i);
            } else {
                exact.entry(e.pattern.clone()).or_default().push(i);
            }
        }
        Ok(Lexicon {
            categories,
            entries,
            column_of,
            exact,
            prefix,
            max_prefix_chars,
        })
    }

    pub fn categories(&self) -> &BTreeMap<u32, String> {
        &self.categories
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn num_categories(&self) -> usize {
        self.categories.len()
    }

    /// Category names in feature-column order.
    pub fn feature_names(&self) -> Vec<&str> {
        self.categories.values().map(String::as_str).collect()
    }

    /// Entries matched by a (lowercased) token: every exact entry with that
    /// pattern, or else every prefix entry with the longest matching prefix.
    pub fn matching_entries(&self, token: &str) -> &[usize] {
        if let Some(ids) = self.exact.get(token) {
            return ids;
        }
        let bounds: Vec<usize> = token
            .char_indices()
            .map(|(i, _)| i)
            .skip(1)
            .chain(std::iter::once(token.len()))
            .take(self.max_prefix_chars)
            .collect();
        for &end in bounds.iter().rev() {
            if let Some(ids) = self.prefix.get(&token[..end]) {
                return ids;
            }
        }
        &[]
    }

    fn categories_of(&self, token: &str) -> BTreeSet<u32> {
        self.matching_entries(token)
            .iter()
            .flat_map(|&i| self.entries[i].categories.iter().copied())
            .collect()
    }

    pub fn featurize(&self, text: &str) -> Result<LexiconFeatures> {
        self.featurize_tokens(&tokenize(text))
    }

    pub fn featurize_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Result<LexiconFeatures> {
        if tokens.is_empty() {
            return Err(Error::EmptyText);
        }
        let mut counts = vec![0usize; self.categories.len()];
        for t in tokens {
            for c in self.categories_of(t.as_ref()) {
                counts[self.column_of[&c]] += 1;
            }
        }
        let n = tokens.len() as f64;
        Ok(LexiconFeatures {
            values: counts.into_iter().map(|c| c as f64 / n).collect(),
            word_count: tokens.len(),
        })
    }

    /// Renders the lexicon back to DIC text.
    pub fn to_dic(&self) -> String {
        let mut out = String::from("%\n");
        for (id, name) in &self.categories {
            let _ = writeln!(out, "{id}\t{name}");
        }
        out.push_str("%\n");
        for e in &self.entries {
            out.push_str(&e.pattern);
            if e.is_prefix {
                out.push('*');
            }
            for c in &e.categories {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Small built-in lexicon used by the synthetic corpus generator when no
    /// lexicon file is supplied. Category 1 carries the positive signal and
    /// category 2 the negative one.
    pub fn planted_default() -> Lexicon {
        parse_lexicon(PLANTED_DIC).expect("built-in lexicon parses")
    }
}

const PLANTED_DIC: &str = "\
%
1\tposemo
2\tnegemo
3\tpronoun
4\tsocial
5\tcogproc
6\tnegate
%
lieb*\t1
gut\t1
schön*\t1
danke\t1
freu*\t1
super\t1
toll\t1
lach*\t1
ärger*\t2
blöd*\t2
schlecht\t2
hass*\t2
nerv*\t2
wütend\t2
streit*\t2
vorwurf\t2
ich\t3
du\t3
wir\t3
uns\t3
mama\t4
freunde\t4
familie\t4
besuch*\t4
weil\t5
denk*\t5
vielleicht\t5
wiss*\t5
nicht\t6
nie\t6
kein*\t6
";

pub fn parse_lexicon(text: &str) -> Result<Lexicon> {
    const WHAT: &str = "lexicon";
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, "%")) => {}
        Some((n, _)) => return Err(Error::parse(WHAT, n, "expected opening '%' line")),
        None => return Err(Error::parse(WHAT, 0, "missing '%' category header")),
    }

    let mut categories = BTreeMap::new();
    let mut closed = false;
    for (n, line) in lines.by_ref() {
        if line == "%" {
            closed = true;
            break;
        }
        let mut parts = line.splitn(2, char::is_whitespace);
        let id = parse_id(parts.next().unwrap_or(""), n)?;
        let name = parts.next().map(str::trim).unwrap_or("");
        if name.is_empty() {
            return Err(Error::parse(WHAT, n, "category line without a name"));
        }
        if categories.insert(id, name.to_string()).is_some() {
            return Err(Error::parse(
                WHAT,
                n,
                format!("category {id} declared twice"),
            ));
        }
    }
    if !closed {
        return Err(Error::parse(
            WHAT,
            0,
            "missing closing '%' after categories",
        ));
    }

    let mut entries = Vec::new();
    for (n, line) in lines {
        let mut parts = line.split_whitespace();
        let raw = parts.next().unwrap_or_default().to_lowercase();
        let (pattern, is_prefix) = match raw.strip_suffix('*') {
            Some(p) => (p.to_string(), true),
            None => (raw, false),
        };
        if pattern.contains('*') {
            return Err(Error::parse(
                WHAT,
                n,
                "'*' is only allowed at the end of a pattern",
            ));
        }
        if pattern.is_empty() {
            return Err(Error::parse(WHAT, n, "empty prefix pattern"));
        }
        let mut cats = BTreeSet::new();
        for p in parts {
            let id = parse_id(p, n)?;
            if !categories.contains_key(&id) {
                return Err(Error::parse(WHAT, n, format!("undeclared category {id}")));
            }
            cats.insert(id);
        }
        if cats.is_empty() {
            return Err(Error::parse(WHAT, n, "entry without categories"));
        }
        entries.push(LexiconEntry {
            pattern,
            is_prefix,
            categories: cats,
        });
    }
    Lexicon::new(categories, entries)
}

fn parse_id(s: &str, line: usize) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::parse("lexicon", line, format!("malformed category id {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "%\n1 Pronoun\n2 Posemo\n%\nich 1\nlieb* 2\n";

    #[test]
    fn parses_standard_layout() {
        let lex = parse_lexicon(SMALL).unwrap();
        assert_eq!(lex.num_categories(), 2);
        assert_eq!(lex.entries().len(), 2);
        assert!(!lex.entries()[0].is_prefix);
        assert!(lex.entries()[1].is_prefix);
        assert_eq!(lex.entries()[1].pattern, "lieb");
        assert_eq!(lex.feature_names(), ["Pronoun", "Posemo"]);
    }

    #[test]
    fn undeclared_category_is_error() {
        let err = parse_lexicon("%\n1 a\n2 b\n%\ngut 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
    }

    #[test]
    fn header_only_is_valid() {
        let lex = parse_lexicon("%\n1 a\n%\n").unwrap();
        assert!(lex.entries().is_empty());
        assert_eq!(lex.num_categories(), 1);
    }

    #[test]
    fn missing_delimiters() {
        assert!(parse_lexicon("1 a\n%\n").is_err());
        assert!(parse_lexicon("%\n1 a\n").is_err());
        assert!(parse_lexicon("").is_err());
    }

    #[test]
    fn malformed_patterns_and_ids() {
        assert!(parse_lexicon("%\n1 a\n%\n* 1\n").is_err());
        assert!(parse_lexicon("%\n1 a\n%\na*b 1\n").is_err());
        assert!(parse_lexicon("%\nx a\n%\n").is_err());
        assert!(parse_lexicon("%\n1 a\n%\nwort eins\n").is_err());
        assert!(parse_lexicon("%\n1 a\n1 b\n%\n").is_err());
    }

    #[test]
    fn comments_and_tabs() {
        let lex = parse_lexicon("# header\n%\n1\tPron oun\n%\n# entries\nIch\t1\n").unwrap();
        assert_eq!(lex.categories()[&1], "Pron oun");
        assert_eq!(lex.entries()[0].pattern, "ich");
    }

    #[test]
    fn featurize_hand_count() {
        let lex = parse_lexicon(SMALL).unwrap();
        let f = lex.featurize("ich liebe dich sehr").unwrap();
        assert_eq!(f.word_count, 4);
        assert_eq!(f.values, vec![0.25, 0.25]);
    }

    #[test]
    fn no_hits_gives_zero_vector() {
        let lex = parse_lexicon(SMALL).unwrap();
        assert_eq!(lex.featurize("was denn").unwrap().values, vec![0.0, 0.0]);
    }

    #[test]
    fn exact_beats_prefix() {
        let lex = parse_lexicon("%\n1 a\n2 b\n%\nlieb* 2\nliebe 1\n").unwrap();
        assert_eq!(lex.featurize("liebe").unwrap().values, vec![1.0, 0.0]);
        assert_eq!(lex.featurize("lieber").unwrap().values, vec![0.0, 1.0]);
    }

    #[test]
    fn longest_prefix_wins() {
        let lex = parse_lexicon("%\n1 a\n2 b\n%\nli* 1\nlieb* 2\n").unwrap();
        assert_eq!(lex.featurize("liebe").unwrap().values, vec![0.0, 1.0]);
        assert_eq!(lex.featurize("linie").unwrap().values, vec![1.0, 0.0]);
        // a prefix pattern also matches the bare stem
        assert_eq!(lex.featurize("lieb").unwrap().values, vec![0.0, 1.0]);
    }

    #[test]
    fn multi_category_entry_counts_once_each() {
        let lex = parse_lexicon("%\n1 a\n2 b\n%\nwir 1 2\nwir 1\n").unwrap();
        let f = lex.featurize("wir wir").unwrap();
        assert_eq!(f.values, vec![1.0, 1.0]);
    }

    #[test]
    fn empty_text_is_error() {
        let lex = parse_lexicon(SMALL).unwrap();
        assert!(matches!(lex.featurize(" ... "), Err(Error::EmptyText)));
    }

    #[test]
    fn dic_round_trip() {
        let lex = Lexicon::planted_default();
        assert_eq!(parse_lexicon(&lex.to_dic()).unwrap(), lex);
    }
}
