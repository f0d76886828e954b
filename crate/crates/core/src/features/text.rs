//! Plain-text statistics: tokenization, sentence splitting, syllable
//! counting, stopwords, and the easy-word list.

use std::collections::HashSet;
use std::sync::OnceLock;

/// 174-entry stopword list, one word per line.
const STOPWORDS_RAW: &str = include_str!("../../data/stopwords.txt");
/// Easy-word list used for the difficult-words count and Dale-Chall.
const EASY_WORDS_RAW: &str = include_str!("../../data/easy_words.txt");

pub fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS_RAW.lines().filter(|l| !l.is_empty()).collect())
}

pub fn easy_words() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| EASY_WORDS_RAW.lines().filter(|l| !l.is_empty()).collect())
}

/// Lowercased word tokens: maximal runs of alphanumeric characters and
/// in-word apostrophes, split on whitespace and punctuation.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || (ch == '\'' && !current.is_empty()) {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    // Trim trailing apostrophes left by closing quotes.
    for t in &mut tokens {
        while t.ends_with('\'') {
            t.pop();
        }
    }
    tokens.retain(|t| !t.is_empty());
    tokens
}

/// Number of sentences: runs of `.`, `!`, `?` terminate a sentence.
/// Non-empty text always counts at least one sentence.
pub fn count_sentences(text: &str) -> usize {
    let mut sentences = 0usize;
    let mut has_content = false;
    let mut prev_terminator = false;
    for ch in text.chars() {
        if matches!(ch, '.' | '!' | '?') {
            if has_content && !prev_terminator {
                sentences += 1;
            }
            prev_terminator = true;
        } else {
            if ch.is_alphanumeric() {
                has_content = true;
            }
            prev_terminator = false;
        }
    }
    if sentences == 0 && text.chars().any(char::is_alphanumeric) {
        1
    } else {
        sentences.max(usize::from(text.chars().any(char::is_alphanumeric)))
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u' | b'y')
}

/// Vowel-group syllable heuristic with a silent-e rule: count maximal vowel
/// runs; a trailing `e` (not `le` after a consonant) drops one; minimum 1.
pub fn count_syllables(word: &str) -> usize {
    let w: Vec<u8> = word
        .chars()
        .filter(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_lowercase() as u8)
        .collect();
    if w.is_empty() {
        return 0;
    }
    let mut groups = 0usize;
    let mut in_group = false;
    for &b in &w {
        if is_vowel(b) {
            if !in_group {
                groups += 1;
                in_group = true;
            }
        } else {
            in_group = false;
        }
    }
    let n = w.len();
    if groups > 1 && w[n - 1] == b'e' && !is_vowel(w[n - 2]) {
        let silent_le = n >= 3 && w[n - 2] == b'l' && !is_vowel(w[n - 3]);
        if !silent_le {
            groups -= 1;
        }
    }
    groups.max(1)
}

/// Aggregate statistics readability formulas consume.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TextStats {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
    pub letters: usize,
    /// Words with three or more syllables.
    pub polysyllables: usize,
    /// Word occurrences outside the easy-word list (length > 2).
    pub difficult_occurrences: usize,
    /// Distinct word types outside the easy-word list (length > 2).
    pub difficult_types: usize,
}

pub fn text_stats(text: &str) -> TextStats {
    let tokens = tokenize(text);
    let easy = easy_words();
    let mut stats = TextStats {
        words: tokens.len(),
        sentences: if tokens.is_empty() {
            0
        } else {
            count_sentences(text)
        },
        ..Default::default()
    };
    let mut difficult_seen: HashSet<&str> = HashSet::new();
    for t in &tokens {
        let syl = count_syllables(t);
        stats.syllables += syl;
        stats.letters += t.chars().filter(|c| c.is_alphanumeric()).count();
        if syl >= 3 {
            stats.polysyllables += 1;
        }
        if t.chars().count() > 2 && !easy.contains(t.as_str()) {
            stats.difficult_occurrences += 1;
            if difficult_seen.insert(t.as_str()) {
                stats.difficult_types += 1;
            }
        }
    }
    stats
}

/// Information-to-noise ratio: fraction of tokens surviving stopword
/// removal; 0 for empty text.
pub fn information_to_noise(text: &str) -> f64 {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return 0.0;
    }
    let stop = stopwords();
    let kept = tokens.iter().filter(|t| !stop.contains(t.as_str())).count();
    kept as f64 / tokens.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopword_list_has_174_entries() {
        assert_eq!(stopwords().len(), 174);
    }

    #[test]
    fn tokenize_lowercases_and_splits_punctuation() {
        assert_eq!(tokenize("The cat, sat!"), vec!["the", "cat", "sat"]);
        assert_eq!(tokenize("don't stop"), vec!["don't", "stop"]);
        assert!(tokenize("  \n\t ").is_empty());
    }

    #[test]
    fn sentence_counting() {
        assert_eq!(count_sentences("The cat sat."), 1);
        assert_eq!(count_sentences("One. Two! Three?"), 3);
        assert_eq!(count_sentences("No terminator"), 1);
        assert_eq!(count_sentences("Ellipsis... done."), 2);
        assert_eq!(count_sentences(""), 0);
    }

    #[test]
    fn syllable_fixtures() {
        for (word, n) in [
            ("cat", 1),
            ("sat", 1),
            ("the", 1),
            ("table", 2),
            ("make", 1),
            ("syllable", 3),
            ("beautiful", 3),
            // Vowel-group heuristic: "ia" is one group, so one under the
            // dictionary count.
            ("encyclopedia", 5),
            ("rhythm", 1),
            ("readability", 5),
        ] {
            assert_eq!(count_syllables(word), n, "word {word:?}");
        }
    }

    #[test]
    fn info_to_noise_hand_count() {
        // "the" and "on" are stopwords; 6 tokens, two "the" and one "on" removed.
        let r = information_to_noise("the cat sat on the mat");
        assert!((r - 0.5).abs() < 1e-12);
        assert_eq!(information_to_noise(""), 0.0);
    }

    #[test]
    fn difficult_words_counted_once_per_type() {
        let stats = text_stats("Epilepsy epilepsy cat xenon.");
        assert_eq!(stats.difficult_types, 2); // epilepsy, xenon
        assert_eq!(stats.difficult_occurrences, 3);
    }

    #[test]
    fn the_cat_sat_stats() {
        let stats = text_stats("The cat sat.");
        assert_eq!(stats.words, 3);
        assert_eq!(stats.sentences, 1);
        assert_eq!(stats.syllables, 3);
        assert_eq!(stats.polysyllables, 0);
    }
}
