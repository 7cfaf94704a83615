//! Synthetic two-class review corpus used as a stand-in for public
//! sentiment datasets.
//!
//! Each sentence carries two sentiment cue words drawn from class-specific
//! synonym groups with a Zipf-like preference for the first group members, so
//! a small training sample sees mostly the common cue words while test
//! sentences also use the rare ones. The rest of the sentence is
//! class-independent filler from neutral synonym groups. Labels are
//! noise-free.

use rand::Rng;
use serde::Serialize;

use crate::rng::stream;

const POSITIVE: &[&[&str]] = &[
    &["good", "great", "fine", "excellent", "superb", "terrific", "splendid"],
    &["enjoyable", "fun", "entertaining", "delightful", "pleasant", "amusing", "agreeable"],
    &["beautiful", "gorgeous", "lovely", "stunning", "elegant", "graceful", "exquisite"],
    &["clever", "smart", "witty", "brilliant", "sharp", "ingenious", "inventive"],
    &["moving", "touching", "poignant", "stirring", "heartfelt", "affecting", "tender"],
    &["exciting", "thrilling", "gripping", "riveting", "electrifying", "exhilarating", "rousing"],
    &["charming", "appealing", "endearing", "engaging", "winning", "captivating", "enchanting"],
    &["impressive", "remarkable", "outstanding", "exceptional", "extraordinary", "striking", "notable"],
];

const NEGATIVE: &[&[&str]] = &[
    &["bad", "awful", "terrible", "dreadful", "horrible", "lousy", "atrocious"],
    &["boring", "dull", "tedious", "tiresome", "monotonous", "bland", "uninspired"],
    &["ugly", "hideous", "unsightly", "grotesque", "repulsive", "unattractive", "homely"],
    &["stupid", "dumb", "foolish", "silly", "idiotic", "inane", "senseless"],
    &["weak", "feeble", "flimsy", "limp", "lame", "frail", "anemic"],
    &["confusing", "muddled", "baffling", "bewildering", "perplexing", "puzzling", "incoherent"],
    &["clumsy", "awkward", "ungainly", "inept", "bumbling", "gawky", "maladroit"],
    &["disappointing", "unsatisfying", "underwhelming", "lackluster", "mediocre", "unimpressive", "middling"],
];

const NOUNS: &[&[&str]] = &[
    &["movie", "film", "picture", "feature", "flick"],
    &["story", "plot", "narrative", "tale", "storyline"],
    &["actor", "performer", "player", "thespian", "star"],
    &["director", "filmmaker", "auteur", "helmer", "moviemaker"],
    &["scene", "sequence", "episode", "segment", "passage"],
    &["ending", "finale", "conclusion", "climax", "denouement"],
    &["script", "screenplay", "dialogue", "scenario", "lines"],
    &["music", "score", "soundtrack", "melody", "tune"],
];

const NEUTRAL_ADJ: &[&[&str]] = &[
    &["long", "lengthy", "extended", "prolonged", "protracted"],
    &["short", "brief", "concise", "succinct", "terse"],
    &["old", "ancient", "aged", "antique", "vintage"],
    &["new", "recent", "modern", "current", "contemporary"],
    &["big", "large", "huge", "enormous", "vast"],
    &["quiet", "silent", "hushed", "muted", "soundless"],
];

const ADVERBS: &[&str] = &["really", "truly", "quite", "rather", "mostly", "simply", "certainly", "almost"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateRow {
    pub text: String,
    pub label: &'static str,
    pub split: &'static str,
}

fn zipf_pick<'a, R: Rng + ?Sized>(words: &[&'a str], rng: &mut R) -> &'a str {
    let weights: Vec<f64> = (0..words.len()).map(|r| 1.0 / ((r + 1) as f64).powf(1.5)).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (w, word) in weights.iter().zip(words) {
        if u < *w {
            return word;
        }
        u -= w;
    }
    words[words.len() - 1]
}

fn pick<R: Rng + ?Sized, T: Copy>(xs: &[T], rng: &mut R) -> T {
    xs[rng.random_range(0..xs.len())]
}

fn sentence<R: Rng + ?Sized>(positive: bool, rng: &mut R) -> String {
    let groups = if positive { POSITIVE } else { NEGATIVE };
    let cue = zipf_pick(pick(groups, rng), rng);
    let cue2 = zipf_pick(pick(groups, rng), rng);
    let noun = zipf_pick(pick(NOUNS, rng), rng);
    let noun2 = zipf_pick(pick(NOUNS, rng), rng);
    let adj = zipf_pick(pick(NEUTRAL_ADJ, rng), rng);
    let adv = pick(ADVERBS, rng);
    match rng.random_range(0..4) {
        0 => format!("the {noun} was {adv} {cue} and the {noun2} was {cue2}"),
        1 => format!("a {adj} {noun} with a {adv} {cue} and {cue2} {noun2}"),
        2 => format!("the {noun2} felt {adj} but the {noun} is {adv} {cue} and {cue2}"),
        _ => format!("{adv} {cue} {noun} , the {noun2} is {cue2}"),
    }
}

/// Generates `n_train + n_test` rows deterministically from `seed`.
pub fn generate(seed: u64, n_train: usize, n_test: usize) -> Vec<SurrogateRow> {
    let mut rng = stream(seed);
    (0..n_train + n_test)
        .map(|i| {
            let positive = i % 2 == 0;
            let text = sentence(positive, &mut rng);
            SurrogateRow {
                text,
                label: if positive { "positive" } else { "negative" },
                split: if i < n_train { "train" } else { "test" },
            }
        })
        .collect()
}

/// The bundled corpus: 2,000 train and 1,000 test rows from seed 2023.
pub fn bundled_rows() -> Vec<SurrogateRow> {
    generate(2023, 2000, 1000)
}

pub fn to_jsonl(rows: &[SurrogateRow]) -> String {
    crate::harness::to_jsonl(rows).expect("rows serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textops::{is_stopword, SynonymLexicon};

    #[test]
    fn deterministic_and_balanced() {
        let a = generate(1, 200, 100);
        assert_eq!(a, generate(1, 200, 100));
        let pos = a.iter().filter(|r| r.label == "positive").count();
        assert_eq!(pos, 150);
        assert_eq!(a.iter().filter(|r| r.split == "test").count(), 100);
    }

    #[test]
    fn cue_words_are_in_the_bundled_lexicon() {
        let lex = SynonymLexicon::bundled();
        for group in POSITIVE.iter().chain(NEGATIVE).chain(NOUNS).chain(NEUTRAL_ADJ) {
            for w in group.iter() {
                assert!(!lex.synonyms(w).is_empty(), "{w}");
                assert!(!is_stopword(w), "{w}");
            }
        }
    }
}
