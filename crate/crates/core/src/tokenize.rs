//! Word tokenizer shared by empty-sequence filtering, the lexicon featurizer
//! and the TF-IDF featurizer.

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '-')
}

/// Lowercased maximal runs of letters. An apostrophe or hyphen is kept only
/// when it sits between two letters; digits, punctuation and whitespace split.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else if is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphabetic())
        {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Cheaper check than `!tokenize(text).is_empty()`.
pub fn has_tokens(text: &str) -> bool {
    text.chars().any(char::is_alphabetic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_sentence() {
        assert_eq!(tokenize("Ich liebe dich!"), ["ich", "liebe", "dich"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn joiners_and_digits() {
        assert_eq!(tokenize("geht's gut-so 123"), ["geht's", "gut-so"]);
    }

    #[test]
    fn dangling_joiners_split() {
        assert_eq!(tokenize("'so- -ja' a--b"), ["so", "ja", "a", "b"]);
    }

    #[test]
    fn umlauts_and_eszett() {
        assert_eq!(
            tokenize("Schöne GRÜSSE, Straße"),
            ["schöne", "grüsse", "straße"]
        );
    }

    #[test]
    fn punctuation_only() {
        assert!(tokenize("...").is_empty());
        assert!(!has_tokens("..."));
    }

    proptest! {
        #[test]
        fn has_tokens_agrees(s in "\\PC{0,24}") {
            prop_assert_eq!(has_tokens(&s), !tokenize(&s).is_empty());
        }

        #[test]
        fn tokens_are_lowercase_and_nonempty(s in "\\PC{0,24}") {
            for t in tokenize(&s) {
                prop_assert!(!t.is_empty());
                prop_assert_eq!(t.to_lowercase(), t.clone());
                prop_assert!(t.chars().next().unwrap().is_alphabetic());
                prop_assert!(t.chars().last().unwrap().is_alphabetic());
            }
        }
    }
}
