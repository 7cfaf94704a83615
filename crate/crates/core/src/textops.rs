//! Tokenization, stopwords and the synonym lexicon backing SR and RI.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Ordered word tokens of one sentence.
///
/// Tokens are never empty and never contain whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    /// Builds a sequence from pre-split words, re-splitting any that carry whitespace.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        TokenSeq(
            words
                .into_iter()
                .flat_map(|w| {
                    w.as_ref()
                        .split_whitespace()
                        .map(str::to_owned)
                        .collect::<Vec<_>>()
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, String> {
        self.0.iter()
    }

    pub(crate) fn into_inner(self) -> Vec<String> {
        self.0
    }

    pub(crate) fn from_vec_unchecked(tokens: Vec<String>) -> Self {
        debug_assert!(tokens
            .iter()
            .all(|t| !t.is_empty() && !t.contains(char::is_whitespace)));
        TokenSeq(tokens)
    }
}

impl std::ops::Index<usize> for TokenSeq {
    type Output = String;

    fn index(&self, i: usize) -> &String {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a TokenSeq {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Splits on runs of Unicode whitespace.
pub fn tokenize(text: &str) -> TokenSeq {
    TokenSeq(text.split_whitespace().map(str::to_owned).collect())
}

/// Joins tokens with single spaces.
pub fn detokenize(seq: &TokenSeq) -> String {
    seq.0.join(" ")
}

/// Mapping from lowercase headword to its synonyms, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    entries: HashMap<String, Vec<String>>,
}

impl SynonymLexicon {
    /// Parses the tab-separated lexicon format: `headword<TAB>syn1,syn2,...`.
    ///
    /// `#` lines are comments and blank lines are skipped. Duplicate headwords
    /// are merged (union, first occurrence wins the position) and a headword is
    /// never its own synonym.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries: HashMap<String, Vec<String>> = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let (head, syns) = trimmed.split_once('\t').ok_or_else(|| Error::Parse {
                line: line_no,
                message: "missing tab between headword and synonyms".into(),
            })?;
            let head = head.trim().to_lowercase();
            if head.is_empty() || head.contains(char::is_whitespace) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("invalid headword {head:?}"),
                });
            }
            let words: Vec<String> = syns
                .split(',')
                .map(|s| s.trim().to_lowercase())
                .filter(|s| !s.is_empty())
                .collect();
            if words.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "empty synonym field".into(),
                });
            }
            if let Some(bad) = words.iter().find(|w| w.contains(char::is_whitespace)) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("synonym {bad:?} contains whitespace"),
                });
            }
            let list = entries.entry(head.clone()).or_default();
            for w in words {
                if w != head && !list.contains(&w) {
                    list.push(w);
                }
            }
        }
        entries.retain(|_, v| !v.is_empty());
        Ok(SynonymLexicon { entries })
    }

    /// The lexicon shipped with the crate (~1.3k headwords).
    pub fn bundled() -> &'static SynonymLexicon {
        static LEX: OnceLock<SynonymLexicon> = OnceLock::new();
        LEX.get_or_init(|| {
            SynonymLexicon::from_reader(include_str!("../data/lexicon.tsv").as_bytes())
                .expect("bundled lexicon parses")
        })
    }

    /// Case-insensitive lookup; absent words yield an empty slice.
    pub fn synonyms(&self, word: &str) -> &[String] {
        match self.entries.get(word) {
            Some(v) => v,
            None => self
                .entries
                .get(&word.to_lowercase())
                .map(Vec::as_slice)
                .unwrap_or(&[]),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads a lexicon from a file.
pub fn load_lexicon(path: &std::path::Path) -> Result<SynonymLexicon> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    SynonymLexicon::from_reader(std::io::BufReader::new(f))
}

/// A set of lowercase stopwords.
#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// Reads one word per line; blank lines are ignored.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut set = HashSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let w = line.trim();
            if !w.is_empty() {
                set.insert(w.to_lowercase());
            }
        }
        Ok(Stopwords(set))
    }

    /// The standard 179-word English list.
    pub fn bundled() -> &'static Stopwords {
        static SW: OnceLock<Stopwords> = OnceLock::new();
        SW.get_or_init(|| {
            Stopwords::from_reader(include_str!("../data/stopwords.txt").as_bytes())
                .expect("bundled stopwords parse")
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word) || self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// True iff the lowercased word is in the bundled stopword list.
pub fn is_stopword(word: &str) -> bool {
    Stopwords::bundled().contains(word)
}
