//! Pronunciation/frequency lexicon with a prefix index, plus
//! simplified→traditional character conversion.
//!
//! The on-disk form is a TSV: `headword<TAB>romanisation<TAB>weight`, one
//! entry per line, where the romanisation column holds space-separated
//! syllables (one per character) and may be empty. Lines starting with `#`
//! are comments. The weight column may be empty or absent, in which case a
//! caller-supplied default applies (used when patching Shanghainese-specific
//! words that carry no frequency data).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::text::nfc;

/// A row-level problem encountered while parsing a data file. Loading
/// continues past these; callers report them as diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line number in the source.
    pub line: usize,
    pub message: String,
}

impl core::fmt::Display for RowError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// One dictionary row: a headword with optional per-character romanisation
/// and a nonnegative frequency weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Traditional-form, NFC-normalized, whitespace-free.
    pub headword: String,
    /// One romanised syllable per character; empty when the source row has
    /// no romanisation.
    pub romanisation: Vec<String>,
    pub weight: u64,
}

impl LexiconEntry {
    pub fn has_romanisation(&self) -> bool {
        !self.romanisation.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    /// Weight of the headword ending at this node, if one is stored.
    terminal: Option<u64>,
}

/// Character trie over headwords; answers "which stored words start at
/// position i of this text?" in one walk.
#[derive(Debug, Clone)]
struct PrefixTrie {
    nodes: Vec<TrieNode>,
}

impl PrefixTrie {
    fn new() -> Self {
        PrefixTrie {
            nodes: vec![TrieNode::default()],
        }
    }

    fn insert(&mut self, word: &str, weight: u64) {
        let mut node = 0;
        for c in word.chars() {
            node = match self.nodes[node].children.get(&c) {
                Some(&next) => next,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].children.insert(c, next);
                    next
                }
            };
        }
        self.nodes[node].terminal = Some(weight);
    }
}

/// A headword found to start at a given text position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrefixMatch {
    /// Exclusive end index (in characters) of the match.
    pub end: usize,
    pub weight: u64,
}

/// Immutable after load/merge; safe to share across concurrent readers.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    total_weight: u64,
    trie: PrefixTrie,
    chars: BTreeSet<char>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon {
            entries: BTreeMap::new(),
            total_weight: 0,
            trie: PrefixTrie::new(),
            chars: BTreeSet::new(),
        }
    }

    pub fn from_entries<I: IntoIterator<Item = LexiconEntry>>(entries: I) -> Self {
        let mut lex = Lexicon::new();
        for e in entries {
            lex.insert_dedup(e);
        }
        lex.rebuild_index();
        lex
    }

    /// Duplicate headwords keep the maximum weight and the first non-empty
    /// romanisation.
    fn insert_dedup(&mut self, entry: LexiconEntry) {
        match self.entries.get_mut(&entry.headword) {
            Some(existing) => {
                if entry.weight > existing.weight {
                    existing.weight = entry.weight;
                }
                if !existing.has_romanisation() && entry.has_romanisation() {
                    existing.romanisation = entry.romanisation;
                }
            }
            None => {
                self.entries.insert(entry.headword.clone(), entry);
            }
        }
    }

    fn rebuild_index(&mut self) {
        self.trie = PrefixTrie::new();
        self.chars.clear();
        self.total_weight = 0;
        for entry in self.entries.values() {
            self.trie.insert(&entry.headword, entry.weight);
            self.chars.extend(entry.headword.chars());
            self.total_weight += entry.weight;
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all entry weights; the denominator of segmentation
    /// probabilities.
    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn lookup(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// True when the single character is itself a stored headword.
    pub fn contains_char_word(&self, c: char) -> bool {
        let mut buf = [0u8; 4];
        self.entries.contains_key(c.encode_utf8(&mut buf))
    }

    /// True when the character occurs anywhere in a stored headword. Used to
    /// decide whether a non-Han character is segmentable at all.
    pub fn contains_char(&self, c: char) -> bool {
        self.chars.contains(&c)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// All stored headwords that `chars[start..]` begins with, shortest
    /// first. Every hit corresponds to exactly one stored entry.
    pub fn prefix_matches(&self, chars: &[char], start: usize) -> Vec<PrefixMatch> {
        let mut out = Vec::new();
        let mut node = 0;
        for (offset, &c) in chars[start..].iter().enumerate() {
            match self.trie.nodes[node].children.get(&c) {
                Some(&next) => {
                    node = next;
                    if let Some(weight) = self.trie.nodes[node].terminal {
                        out.push(PrefixMatch {
                            end: start + offset + 1,
                            weight,
                        });
                    }
                }
                None => break,
            }
        }
        out
    }

    /// Overlay semantics: every base entry is kept; an overlay headword is
    /// inserted or has its weight replaced by the overlay weight, and its
    /// romanisation replaced where the overlay provides one.
    pub fn merge_weights(base: &Lexicon, overlay: &Lexicon) -> Lexicon {
        let mut merged = base.clone();
        for entry in overlay.entries.values() {
            match merged.entries.get_mut(&entry.headword) {
                Some(existing) => {
                    existing.weight = entry.weight;
                    if entry.has_romanisation() {
                        existing.romanisation = entry.romanisation.clone();
                    }
                }
                None => {
                    merged.entries.insert(entry.headword.clone(), entry.clone());
                }
            }
        }
        merged.rebuild_index();
        merged
    }

    /// Serialize back to the TSV form. `parse_tsv` of the output yields an
    /// entry-identical lexicon.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            out.push_str(&entry.headword);
            out.push('\t');
            out.push_str(&entry.romanisation.join(" "));
            out.push('\t');
            out.push_str(&entry.weight.to_string());
            out.push('\n');
        }
        out
    }
}

/// Result of parsing a lexicon TSV: the valid rows, plus per-row diagnostics
/// for the rest.
#[derive(Debug, Clone)]
pub struct LexiconLoad {
    pub lexicon: Lexicon,
    pub errors: Vec<RowError>,
}

/// Parse lexicon TSV text. Rows missing a weight get `default_weight`.
/// Malformed rows (wrong column count, invalid weight, syllable-count
/// mismatch, whitespace in headword) are skipped and reported.
pub fn parse_lexicon_tsv(source: &str, default_weight: u64) -> LexiconLoad {
    let mut lexicon = Lexicon::new();
    let mut errors = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() < 2 || cols.len() > 3 {
            errors.push(RowError {
                line: line_no,
                message: format!("expected 2 or 3 tab-separated columns, found {}", cols.len()),
            });
            continue;
        }
        let headword = nfc(cols[0].trim());
        if headword.is_empty() {
            errors.push(RowError {
                line: line_no,
                message: "empty headword".to_string(),
            });
            continue;
        }
        if headword.chars().any(char::is_whitespace) {
            errors.push(RowError {
                line: line_no,
                message: format!("headword '{headword}' contains whitespace"),
            });
            continue;
        }
        let romanisation: Vec<String> = cols[1]
            .split_whitespace()
            .map(|s| nfc(s))
            .collect();
        if !romanisation.is_empty() {
            let n_chars = headword.chars().count();
            if romanisation.len() != n_chars {
                errors.push(RowError {
                    line: line_no,
                    message: format!(
                        "'{headword}' has {n_chars} characters but {} romanised syllables",
                        romanisation.len()
                    ),
                });
                continue;
            }
        }
        let weight = match cols.get(2).map(|s| s.trim()) {
            None | Some("") => default_weight,
            Some(text) => match text.parse::<u64>() {
                Ok(w) => w,
                Err(_) => {
                    errors.push(RowError {
                        line: line_no,
                        message: format!("'{text}' is not a nonnegative integer weight"),
                    });
                    continue;
                }
            },
        };
        lexicon.insert_dedup(LexiconEntry {
            headword,
            romanisation,
            weight,
        });
    }
    lexicon.rebuild_index();
    LexiconLoad { lexicon, errors }
}

/// Simplified→traditional character mapping. Single-character pairs plus
/// multi-character exception rules, applied longest-match first.
#[derive(Debug, Clone, Default)]
pub struct CharMapping {
    rules: BTreeMap<String, String>,
    max_rule_chars: usize,
}

impl CharMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn insert(&mut self, from: &str, to: &str) {
        let from = nfc(from);
        self.max_rule_chars = self.max_rule_chars.max(from.chars().count());
        self.rules.insert(from, nfc(to));
    }

    /// Parse `from<TAB>to` rows; `#` comments and blank lines are skipped.
    pub fn parse_tsv(source: &str) -> (CharMapping, Vec<RowError>) {
        let mut mapping = CharMapping::new();
        let mut errors = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut cols = raw.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(from), Some(to), None) if !from.is_empty() && !to.is_empty() => {
                    mapping.insert(from, to);
                }
                _ => errors.push(RowError {
                    line: idx + 1,
                    message: "expected exactly 2 non-empty tab-separated columns".to_string(),
                }),
            }
        }
        (mapping, errors)
    }

    /// Convert text to traditional form. Characters without a rule pass
    /// through; multi-character rules win over their single-character
    /// prefixes.
    pub fn convert(&self, text: &str) -> String {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut i = 0;
        while i < chars.len() {
            let max_len = self.max_rule_chars.min(chars.len() - i);
            let mut matched = None;
            for len in (1..=max_len).rev() {
                let key: String = chars[i..i + len].iter().collect();
                if let Some(to) = self.rules.get(&key) {
                    matched = Some((len, to));
                    break;
                }
            }
            match matched {
                Some((len, to)) => {
                    out.push_str(to);
                    i += len;
                }
                None => {
                    out.push(chars[i]);
                    i += 1;
                }
            }
        }
        out
    }
}

/// Convert a string to traditional form under `mapping`.
pub fn to_traditional(text: &str, mapping: &CharMapping) -> String {
    mapping.convert(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(head: &str, rom: &str, weight: u64) -> LexiconEntry {
        LexiconEntry {
            headword: head.to_string(),
            romanisation: rom.split_whitespace().map(|s| s.to_string()).collect(),
            weight,
        }
    }

    #[test]
    fn parse_basic_row() {
        let load = parse_lexicon_tsv("上海\tzaon he\t5000\n", 1);
        assert!(load.errors.is_empty());
        let e = load.lexicon.lookup("上海").unwrap();
        assert_eq!(e.romanisation, vec!["zaon", "he"]);
        assert_eq!(e.weight, 5000);
        assert_eq!(load.lexicon.total_weight(), 5000);
    }

    #[test]
    fn parse_empty_file() {
        let load = parse_lexicon_tsv("", 1);
        assert_eq!(load.lexicon.len(), 0);
        assert_eq!(load.lexicon.total_weight(), 0);
    }

    #[test]
    fn duplicate_rows_keep_max_weight_first_romanisation() {
        let load = parse_lexicon_tsv("人\tnyin\t10\n人\tnyin2\t7\n", 1);
        let e = load.lexicon.lookup("人").unwrap();
        assert_eq!(e.weight, 10);
        assert_eq!(e.romanisation, vec!["nyin"]);
        // romanisation-less first row picks up the later romanisation
        let load = parse_lexicon_tsv("人\t\t7\n人\tnyin\t3\n", 1);
        let e = load.lexicon.lookup("人").unwrap();
        assert_eq!(e.weight, 7);
        assert_eq!(e.romanisation, vec!["nyin"]);
    }

    #[test]
    fn malformed_rows_are_reported_not_fatal() {
        let src = "好\thau\t10\n坏\thua\t-3\n多列\ta b\t4\textra\n字数\tdo\t5\n空白 字\tx y z\t1\n";
        let load = parse_lexicon_tsv(src, 1);
        assert_eq!(load.lexicon.len(), 1);
        assert!(load.lexicon.contains("好"));
        let lines: Vec<usize> = load.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5]);
    }

    #[test]
    fn missing_weight_uses_default() {
        let load = parse_lexicon_tsv("弗二弗三\t\t\n啥\tsa\n", 1000);
        assert_eq!(load.lexicon.lookup("弗二弗三").unwrap().weight, 1000);
        assert_eq!(load.lexicon.lookup("啥").unwrap().weight, 1000);
        assert!(load.errors.is_empty());
    }

    #[test]
    fn merge_disjoint_and_replacement() {
        let base = Lexicon::from_entries([entry("AB", "", 5)]);
        let overlay = Lexicon::from_entries([entry("BC", "", 3)]);
        let merged = Lexicon::merge_weights(&base, &overlay);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.total_weight(), 8);

        let overlay = Lexicon::from_entries([entry("AB", "", 9)]);
        let merged = Lexicon::merge_weights(&base, &overlay);
        assert_eq!(merged.lookup("AB").unwrap().weight, 9);
        assert_eq!(merged.total_weight(), 9);
    }

    #[test]
    fn merge_inserts_patched_word() {
        let base = Lexicon::new();
        let overlay = Lexicon::from_entries([entry("弗二弗三", "", 1000)]);
        let merged = Lexicon::merge_weights(&base, &overlay);
        assert!(merged.contains("弗二弗三"));
    }

    #[test]
    fn merge_is_idempotent() {
        let base = Lexicon::from_entries([entry("AB", "a b", 5), entry("C", "c", 2)]);
        let overlay = Lexicon::from_entries([entry("AB", "", 9), entry("D", "d", 4)]);
        let once = Lexicon::merge_weights(&base, &overlay);
        let twice = Lexicon::merge_weights(&once, &overlay);
        let a: Vec<_> = once.entries().collect();
        let b: Vec<_> = twice.entries().collect();
        assert_eq!(a, b);
        assert_eq!(once.total_weight(), twice.total_weight());
    }

    #[test]
    fn merge_overlay_wins_lookup() {
        let base = Lexicon::from_entries([entry("上海", "zaon he", 100)]);
        let overlay = Lexicon::from_entries([entry("上海", "", 9000)]);
        let merged = Lexicon::merge_weights(&base, &overlay);
        let e = merged.lookup("上海").unwrap();
        assert_eq!(e.weight, 9000);
        assert_eq!(e.romanisation, vec!["zaon", "he"]);
    }

    #[test]
    fn lookup_misses_empty_lexicon() {
        assert!(Lexicon::new().lookup("x").is_none());
    }

    #[test]
    fn prefix_matches_enumerate_starts() {
        let lex = Lexicon::from_entries([
            entry("上海", "", 10),
            entry("上", "", 2),
            entry("海", "", 3),
            entry("是", "", 4),
        ]);
        let chars: Vec<char> = "上海是".chars().collect();
        let at0: Vec<usize> = lex.prefix_matches(&chars, 0).iter().map(|m| m.end).collect();
        assert_eq!(at0, vec![1, 2]);
        let at1: Vec<usize> = lex.prefix_matches(&chars, 1).iter().map(|m| m.end).collect();
        assert_eq!(at1, vec![2]);
        let at2: Vec<usize> = lex.prefix_matches(&chars, 2).iter().map(|m| m.end).collect();
        assert_eq!(at2, vec![3]);
        // every hit corresponds to exactly one stored entry
        for m in lex.prefix_matches(&chars, 0) {
            let word: String = chars[0..m.end].iter().collect();
            assert_eq!(lex.lookup(&word).unwrap().weight, m.weight);
        }
    }

    #[test]
    fn prefix_matches_against_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let alphabet = ['a', 'b', 'c'];
        for _ in 0..200 {
            let mut entries = Vec::new();
            for _ in 0..rng.gen_range(0..6) {
                let len = rng.gen_range(1..4);
                let word: String = (0..len).map(|_| alphabet[rng.gen_range(0..3)]).collect();
                entries.push(entry(&word, "", rng.gen_range(1..50)));
            }
            let lex = Lexicon::from_entries(entries);
            let text: String = (0..rng.gen_range(0..8))
                .map(|_| alphabet[rng.gen_range(0..3)])
                .collect();
            let chars: Vec<char> = text.chars().collect();
            for i in 0..chars.len() {
                let got: Vec<usize> = lex.prefix_matches(&chars, i).iter().map(|m| m.end).collect();
                let want: Vec<usize> = (i + 1..=chars.len())
                    .filter(|&j| {
                        let w: String = chars[i..j].iter().collect();
                        lex.contains(&w)
                    })
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn tsv_round_trip() {
        let src = "上海\tzaon he\t5000\n人\tnyin\t10\n弗二弗三\t\t1000\n";
        let first = parse_lexicon_tsv(src, 1).lexicon;
        let second = parse_lexicon_tsv(&first.to_tsv(), 1).lexicon;
        let a: Vec<_> = first.entries().collect();
        let b: Vec<_> = second.entries().collect();
        assert_eq!(a, b);
        assert_eq!(first.total_weight(), second.total_weight());
    }

    #[test]
    fn char_mapping_basics() {
        let (m, errs) = CharMapping::parse_tsv("国\t國\n际\t際\n头发\t頭髮\n发\t發\n头\t頭\n");
        assert!(errs.is_empty());
        assert_eq!(m.convert("国际"), "國際");
        assert_eq!(m.convert("上海"), "上海");
        // longest-match exception rule
        assert_eq!(m.convert("头发"), "頭髮");
        assert_eq!(m.convert("发现"), "發现");
    }

    #[test]
    fn char_mapping_idempotent() {
        let (m, _) = CharMapping::parse_tsv("国\t國\n际\t際\n头发\t頭髮\n发\t發\n头\t頭\n个\t個\n");
        for text in ["国际", "头发", "发头发", "個个", "plain ascii", "上海是一座国际化大都市。"] {
            let once = m.convert(text);
            assert_eq!(m.convert(&once), once);
        }
    }
}
