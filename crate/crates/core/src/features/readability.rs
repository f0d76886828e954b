//! The nine readability scores (F26..F34).
//!
//! All formulas are computed over the whole text from rate statistics, so
//! scores are invariant under paragraph duplication. The difficult-words
//! count (F32) counts word types, which is likewise duplication-invariant.

use super::text::{text_stats, TextStats};

/// Readability feature block, in fixed F26..F34 order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReadabilityScores {
    pub flesch_reading_ease: f64,   // F26
    pub flesch_kincaid_grade: f64,  // F27
    pub automated_readability: f64, // F28
    pub coleman_liau: f64,          // F29
    pub gunning_fog: f64,           // F30
    pub smog: f64,                  // F31
    pub difficult_words: f64,       // F32
    pub dale_chall: f64,            // F33
    pub linsear_write: f64,         // F34
}

impl ReadabilityScores {
    pub fn as_array(&self) -> [f64; 9] {
        [
            self.flesch_reading_ease,
            self.flesch_kincaid_grade,
            self.automated_readability,
            self.coleman_liau,
            self.gunning_fog,
            self.smog,
            self.difficult_words,
            self.dale_chall,
            self.linsear_write,
        ]
    }
}

/// Computes all nine scores; empty text yields all zeros.
pub fn readability_features(plain_text: &str) -> ReadabilityScores {
    let stats = text_stats(plain_text);
    readability_from_stats(&stats)
}

pub fn readability_from_stats(stats: &TextStats) -> ReadabilityScores {
    if stats.words == 0 || stats.sentences == 0 {
        return ReadabilityScores::default();
    }
    let words = stats.words as f64;
    let sentences = stats.sentences as f64;
    let wps = words / sentences;
    let syl_per_word = stats.syllables as f64 / words;
    let letters_per_word = stats.letters as f64 / words;
    let poly = stats.polysyllables as f64;

    let flesch_reading_ease = 206.835 - 1.015 * wps - 84.6 * syl_per_word;
    let flesch_kincaid_grade = 0.39 * wps + 11.8 * syl_per_word - 15.59;
    let automated_readability = 4.71 * letters_per_word + 0.5 * wps - 21.43;
    let l = letters_per_word * 100.0;
    let s = sentences / words * 100.0;
    let coleman_liau = 0.0588 * l - 0.296 * s - 15.8;
    let gunning_fog = 0.4 * (wps + 100.0 * poly / words);
    let smog = 1.0430 * (poly * 30.0 / sentences).sqrt() + 3.1291;
    let difficult_words = stats.difficult_types as f64;
    let difficult_pct = stats.difficult_occurrences as f64 / words * 100.0;
    let mut dale_chall = 0.1579 * difficult_pct + 0.0496 * wps;
    if difficult_pct > 5.0 {
        dale_chall += 3.6365;
    }
    let easy = words - poly;
    let r = (easy + 3.0 * poly) / sentences;
    let linsear_write = if r > 20.0 { r / 2.0 } else { (r - 2.0) / 2.0 };

    ReadabilityScores {
        flesch_reading_ease,
        flesch_kincaid_grade,
        automated_readability,
        coleman_liau,
        gunning_fog,
        smog,
        difficult_words,
        dale_chall,
        linsear_write,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flesch_reading_ease_fixture() {
        // 3 words, 1 sentence, 3 syllables:
        // 206.835 - 1.015*3 - 84.6*1 = 119.19
        let r = readability_features("The cat sat.");
        assert!((r.flesch_reading_ease - 119.19).abs() < 0.01);
    }

    #[test]
    fn empty_text_all_zero() {
        assert_eq!(readability_features("").as_array(), [0.0; 9]);
        assert_eq!(readability_features("   \n ").as_array(), [0.0; 9]);
    }

    #[test]
    fn smog_with_zero_polysyllables() {
        let text = "The cat sat. ".repeat(30);
        let r = readability_features(&text);
        assert!((r.smog - 3.1291).abs() < 0.001);
    }

    #[test]
    fn duplication_invariance_to_1e9_relative() {
        let para = "The quick brown fox jumps over a lazy dog near the riverbank. \
                    Careful observers documented extraordinary behaviour repeatedly.";
        let once = readability_features(para);
        let tripled = readability_features(&format!("{para} {para} {para}"));
        for (a, b) in once.as_array().iter().zip(tripled.as_array()) {
            let scale = a.abs().max(1.0);
            assert!((a - b).abs() / scale < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn dale_chall_adjustment_applies_above_five_percent() {
        // All-easy text stays below the adjustment threshold.
        let easy = readability_features("The cat sat on a mat. The dog ran to the tree.");
        let hard = readability_features("Xenon carfilzomib epilepsy anole touchdown pipeline.");
        assert!(hard.dale_chall > easy.dale_chall + 3.0);
    }
}
