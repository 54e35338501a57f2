//! Phonemisation: romanised syllables with tone categories, then broad-IPA
//! symbol strings with unambiguous tokenization.
//!
//! Tone categories are derived from the romanisation's shape: the initial's
//! voicing class picks the register and a final `q` marks a checked
//! (glottal-coda) syllable. A trailing digit `1`–`5` in the lexicon
//! romanisation selects the category directly and overrides the derivation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lexicon::{Lexicon, RowError};
use crate::segment::{Token, TokenOrigin};

/// The five citation tone categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ToneCategory {
    /// Falling 53 (voiceless initial, open syllable).
    T1,
    /// Rising 334 (voiceless initial, marked by an explicit digit).
    T2,
    /// Low rising 23 (voiced initial, open syllable).
    T3,
    /// High checked 5ʔ (voiceless initial, glottal coda).
    T4,
    /// Low checked 12ʔ (voiced initial, glottal coda).
    T5,
}

pub const TONE_CATEGORIES: [ToneCategory; 5] = [
    ToneCategory::T1,
    ToneCategory::T2,
    ToneCategory::T3,
    ToneCategory::T4,
    ToneCategory::T5,
];

impl ToneCategory {
    pub fn citation_contour(self) -> &'static str {
        match self {
            ToneCategory::T1 => "53",
            ToneCategory::T2 => "334",
            ToneCategory::T3 => "23",
            ToneCategory::T4 => "5",
            ToneCategory::T5 => "12",
        }
    }

    /// Contours accepted as the same citation category in table data (the
    /// literature varies, e.g. 51 for 53 and 34 for 334).
    pub fn contour_aliases(self) -> &'static [&'static str] {
        match self {
            ToneCategory::T1 => &["53", "51", "52"],
            ToneCategory::T2 => &["334", "34"],
            ToneCategory::T3 => &["23", "13", "14"],
            ToneCategory::T4 => &["5", "55", "44"],
            ToneCategory::T5 => &["12", "23", "24"],
        }
    }

    pub fn is_checked(self) -> bool {
        matches!(self, ToneCategory::T4 | ToneCategory::T5)
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        match d {
            1 => Some(ToneCategory::T1),
            2 => Some(ToneCategory::T2),
            3 => Some(ToneCategory::T3),
            4 => Some(ToneCategory::T4),
            5 => Some(ToneCategory::T5),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ToneCategory::T1 => "T1",
            ToneCategory::T2 => "T2",
            ToneCategory::T3 => "T3",
            ToneCategory::T4 => "T4",
            ToneCategory::T5 => "T5",
        }
    }

    pub fn parse_label(s: &str) -> Option<Self> {
        match s {
            "T1" => Some(ToneCategory::T1),
            "T2" => Some(ToneCategory::T2),
            "T3" => Some(ToneCategory::T3),
            "T4" => Some(ToneCategory::T4),
            "T5" => Some(ToneCategory::T5),
            _ => None,
        }
    }
}

/// A citation or surface tone: Chao digits plus the checked (glottal-coda)
/// flag.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ToneValue {
    pub category: ToneCategory,
    pub contour: String,
    pub checked: bool,
}

impl ToneValue {
    pub fn citation(category: ToneCategory) -> Self {
        ToneValue {
            category,
            contour: category.citation_contour().to_string(),
            checked: category.is_checked(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum RomanSource {
    /// Covered by a lexicon romanisation row.
    Lexicon,
    /// Romanised character-by-character.
    CharFallback,
}

/// A romanised syllable with its citation tone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RomanSyllable {
    /// As stored in the lexicon, including any explicit tone digit.
    pub text: String,
    pub tone: ToneValue,
    pub source: RomanSource,
    /// Syllables sharing a unit came from one lexicon romanisation row;
    /// rendering joins within a unit with `-` and across units with `=`.
    pub unit: usize,
}

impl RomanSyllable {
    /// The explicit tone digit, if the romanisation carries one.
    pub fn explicit_digit(&self) -> Option<char> {
        self.text.chars().last().filter(|c| ('1'..='5').contains(c))
    }
}

/// A broad-IPA syllable. The concatenated segments re-tokenize uniquely into
/// the same symbol list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpaSyllable {
    pub segments: Vec<String>,
    pub tone: ToneValue,
}

impl IpaSyllable {
    pub fn joined(&self) -> String {
        self.segments.concat()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhonemizeError {
    #[error("no romanisation available for '{ch}' at character {position}")]
    UnromanisableCharacter { ch: char, position: usize },
    #[error("cannot derive a tone category for '{syllable}'")]
    ToneUnderivable { syllable: String },
    #[error("no IPA mapping covers '{remainder}' of '{syllable}'")]
    MappingGap { syllable: String, remainder: String },
    #[error("punctuation token '{text}' has no pronunciation")]
    PunctuationToken { text: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Voicing {
    Voiceless,
    Voiced,
}

// Initial spellings by length; longer spellings are tried first so e.g.
// `gh` (voiced) wins over `g`, and `ngh` (yin sonorant) over `ng`.
const INITIALS_3: &[(&str, Voicing)] = &[
    ("ngh", Voicing::Voiceless),
    ("tsh", Voicing::Voiceless),
];
const INITIALS_2: &[(&str, Voicing)] = &[
    ("ch", Voicing::Voiceless),
    ("dz", Voicing::Voiced),
    ("gh", Voicing::Voiced),
    ("kh", Voicing::Voiceless),
    ("lh", Voicing::Voiceless),
    ("mh", Voicing::Voiceless),
    ("ng", Voicing::Voiced),
    ("nh", Voicing::Voiceless),
    ("ny", Voicing::Voiced),
    ("ph", Voicing::Voiceless),
    ("sh", Voicing::Voiceless),
    ("th", Voicing::Voiceless),
    ("ts", Voicing::Voiceless),
];
const INITIALS_1: &[(&str, Voicing)] = &[
    ("b", Voicing::Voiced),
    ("c", Voicing::Voiceless),
    ("d", Voicing::Voiced),
    ("f", Voicing::Voiceless),
    ("g", Voicing::Voiced),
    ("h", Voicing::Voiceless),
    ("j", Voicing::Voiced),
    ("k", Voicing::Voiceless),
    ("l", Voicing::Voiced),
    ("m", Voicing::Voiced),
    ("n", Voicing::Voiced),
    ("p", Voicing::Voiceless),
    ("s", Voicing::Voiceless),
    ("t", Voicing::Voiceless),
    ("v", Voicing::Voiced),
    ("w", Voicing::Voiced),
    ("y", Voicing::Voiced),
    ("z", Voicing::Voiced),
];

fn initial_voicing(base: &str) -> Voicing {
    for (table, len) in [(INITIALS_3, 3), (INITIALS_2, 2), (INITIALS_1, 1)] {
        if base.len() >= len {
            let prefix = &base[..len];
            if let Some(&(_, v)) = table.iter().find(|(s, _)| *s == prefix) {
                return v;
            }
        }
    }
    // bare-vowel syllables default to the yin register
    Voicing::Voiceless
}

/// Derive the tone category from a romanised syllable. A trailing digit
/// selects the category directly; otherwise the initial's voicing class and
/// a final `q` (glottal coda) determine it.
pub fn assign_tone(syllable: &str) -> Result<ToneValue, PhonemizeError> {
    let underivable = || PhonemizeError::ToneUnderivable {
        syllable: syllable.to_string(),
    };
    if syllable.is_empty() {
        return Err(underivable());
    }
    let mut base = syllable;
    let mut explicit = None;
    if let Some(last) = syllable.chars().last() {
        if last.is_ascii_digit() {
            let digit = last as u8 - b'0';
            explicit = Some(ToneCategory::from_digit(digit).ok_or_else(underivable)?);
            base = &syllable[..syllable.len() - 1];
        }
    }
    if base.is_empty() || !base.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(underivable());
    }
    if let Some(category) = explicit {
        return Ok(ToneValue::citation(category));
    }
    let checked = base.ends_with('q');
    let category = match (initial_voicing(base), checked) {
        (Voicing::Voiceless, false) => ToneCategory::T1,
        (Voicing::Voiceless, true) => ToneCategory::T4,
        (Voicing::Voiced, false) => ToneCategory::T3,
        (Voicing::Voiced, true) => ToneCategory::T5,
    };
    Ok(ToneValue::citation(category))
}

/// Romanise a token: a whole-token lexicon romanisation if present,
/// otherwise a greedy longest-match cover by romanised lexicon sub-words,
/// falling back to character-by-character romanisation. The syllable count
/// always equals the token's character count.
pub fn romanise(token: &Token, lex: &Lexicon) -> Result<Vec<RomanSyllable>, PhonemizeError> {
    if token.origin == TokenOrigin::Punctuation {
        return Err(PhonemizeError::PunctuationToken {
            text: token.text.clone(),
        });
    }
    let mut out = Vec::new();
    if let Some(entry) = lex.lookup(&token.text).filter(|e| e.has_romanisation()) {
        for text in &entry.romanisation {
            out.push(RomanSyllable {
                text: text.clone(),
                tone: assign_tone(text)?,
                source: RomanSource::Lexicon,
                unit: 0,
            });
        }
        return Ok(out);
    }
    let chars: Vec<char> = token.text.chars().collect();
    let mut unit = 0;
    let mut i = 0;
    while i < chars.len() {
        // longest romanised sub-word starting here
        let sub = lex
            .prefix_matches(&chars, i)
            .into_iter()
            .rev()
            .find_map(|m| {
                if m.end - i < 2 {
                    return None;
                }
                let word: String = chars[i..m.end].iter().collect();
                lex.lookup(&word)
                    .filter(|e| e.has_romanisation())
                    .map(|e| (m.end, e.romanisation.clone()))
            });
        if let Some((end, romanisation)) = sub {
            for text in romanisation {
                out.push(RomanSyllable {
                    tone: assign_tone(&text)?,
                    text,
                    source: RomanSource::Lexicon,
                    unit,
                });
            }
            unit += 1;
            i = end;
            continue;
        }
        let ch = chars[i];
        let mut buf = [0u8; 4];
        let single = lex
            .lookup(ch.encode_utf8(&mut buf))
            .filter(|e| e.has_romanisation())
            .ok_or(PhonemizeError::UnromanisableCharacter {
                ch,
                position: token.span.0 + i,
            })?;
        let text = single.romanisation[0].clone();
        out.push(RomanSyllable {
            tone: assign_tone(&text)?,
            text,
            source: RomanSource::CharFallback,
            unit,
        });
        unit += 1;
        i += 1;
    }
    Ok(out)
}

/// Romanisation-grapheme → IPA-symbol substitution table, applied longest
/// match first. The on-disk form is `grapheme<TAB>space-separated symbols`.
#[derive(Debug, Clone, Default)]
pub struct IpaTable {
    rules: BTreeMap<String, Vec<String>>,
    max_rule_chars: usize,
}

impl IpaTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, grapheme: &str, symbols: &[&str]) {
        self.max_rule_chars = self.max_rule_chars.max(grapheme.chars().count());
        self.rules.insert(
            grapheme.to_string(),
            symbols.iter().map(|s| s.to_string()).collect(),
        );
    }

    pub fn parse_tsv(source: &str) -> (IpaTable, Vec<RowError>) {
        let mut table = IpaTable::new();
        let mut errors = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let mut cols = raw.split('\t');
            match (cols.next(), cols.next(), cols.next()) {
                (Some(from), Some(to), None) if !from.is_empty() && !to.trim().is_empty() => {
                    let symbols: Vec<&str> = to.split_whitespace().collect();
                    table.insert(from, &symbols);
                }
                _ => errors.push(RowError {
                    line: idx + 1,
                    message: "expected 'grapheme<TAB>symbols'".to_string(),
                }),
            }
        }
        (table, errors)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Every distinct output symbol the table can produce.
    pub fn symbol_inventory(&self) -> BTreeSet<String> {
        self.rules.values().flatten().cloned().collect()
    }

    fn convert(&self, syllable: &str, base: &str) -> Result<Vec<String>, PhonemizeError> {
        let chars: Vec<char> = base.chars().collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let max_len = self.max_rule_chars.min(chars.len() - i);
            let mut matched = None;
            for len in (1..=max_len).rev() {
                let key: String = chars[i..i + len].iter().collect();
                if let Some(symbols) = self.rules.get(&key) {
                    matched = Some((len, symbols));
                    break;
                }
            }
            match matched {
                Some((len, symbols)) => {
                    out.extend(symbols.iter().cloned());
                    i += len;
                }
                None => {
                    return Err(PhonemizeError::MappingGap {
                        syllable: syllable.to_string(),
                        remainder: chars[i..].iter().collect(),
                    })
                }
            }
        }
        Ok(out)
    }
}

/// Convert a romanised syllable to broad IPA; the tone (and its checked
/// flag) carries through unchanged. Any explicit tone digit is not part of
/// the mapped material.
pub fn to_ipa(syl: &RomanSyllable, table: &IpaTable) -> Result<IpaSyllable, PhonemizeError> {
    let base = match syl.explicit_digit() {
        Some(_) => &syl.text[..syl.text.len() - 1],
        None => syl.text.as_str(),
    };
    Ok(IpaSyllable {
        segments: table.convert(&syl.text, base)?,
        tone: syl.tone.clone(),
    })
}

/// Greedy longest-match re-tokenization of a concatenated symbol string
/// against a symbol inventory. `None` when no parse exists.
pub fn retokenize(concat: &str, inventory: &BTreeSet<String>) -> Option<Vec<String>> {
    let max_len = inventory.iter().map(|s| s.chars().count()).max()?;
    let chars: Vec<char> = concat.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let mut matched = None;
        for len in (1..=max_len.min(chars.len() - i)).rev() {
            let key: String = chars[i..i + len].iter().collect();
            if inventory.contains(&key) {
                matched = Some((len, key));
                break;
            }
        }
        let (len, key) = matched?;
        out.push(key);
        i += len;
    }
    Some(out)
}

/// A token with its phonemisation, the unit the later stages consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemisedToken {
    pub token: Token,
    /// Empty for punctuation tokens.
    pub roman: Vec<RomanSyllable>,
    pub ipa: Vec<IpaSyllable>,
    /// Replacement syllables used when this token attaches as a clitic
    /// (e.g. the initial lenites).
    pub cliticised: Option<Vec<IpaSyllable>>,
}

impl PhonemisedToken {
    pub fn punctuation(token: Token) -> Self {
        PhonemisedToken {
            token,
            roman: Vec::new(),
            ipa: Vec::new(),
            cliticised: None,
        }
    }

    pub fn syllable_count(&self) -> usize {
        self.ipa.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse_lexicon_tsv;

    fn test_lexicon() -> Lexicon {
        let tsv = "上海\tzaon he2\t5000\n弗\tveq\t50\n二\tnyi\t80\n三\tse1\t90\n\
                   弗二\tveq nyi\t20\n弗三\t\t20\n弗二弗三\t\t1000\n個\tgeq\t250\n";
        parse_lexicon_tsv(tsv, 1).lexicon
    }

    fn test_table() -> IpaTable {
        let tsv = "z\tz\naon\tã\nh\th\ne\te\nv\tv\neq\tə ʔ\nny\tn\ni\ti\ns\ts\ng\tg\ngh\tɦ\n";
        let (table, errors) = IpaTable::parse_tsv(tsv);
        assert!(errors.is_empty());
        table
    }

    fn known(text: &str) -> Token {
        Token {
            text: text.to_string(),
            origin: TokenOrigin::KnownWord,
            span: (0, text.chars().count()),
        }
    }

    #[test]
    fn tone_derivation_from_shape() {
        // voiced initial, open syllable
        let t = assign_tone("zaon").unwrap();
        assert_eq!(t.category, ToneCategory::T3);
        assert_eq!(t.contour, "23");
        assert!(!t.checked);
        // voiceless initial, glottal coda
        let t = assign_tone("koq").unwrap();
        assert_eq!(t.category, ToneCategory::T4);
        assert_eq!(t.contour, "5");
        assert!(t.checked);
        // voiced initial, glottal coda
        let t = assign_tone("veq").unwrap();
        assert_eq!(t.category, ToneCategory::T5);
        assert_eq!(t.contour, "12");
        assert!(t.checked);
        // explicit digit overrides the shape
        let t = assign_tone("he2").unwrap();
        assert_eq!(t.category, ToneCategory::T2);
        assert_eq!(t.contour, "334");
        // digraph initials classify by the longer spelling
        assert_eq!(assign_tone("gheq").unwrap().category, ToneCategory::T5);
        assert_eq!(assign_tone("tshy").unwrap().category, ToneCategory::T1);
        assert_eq!(assign_tone("nyi").unwrap().category, ToneCategory::T3);
        // bare vowels sit in the yin register
        assert_eq!(assign_tone("iq").unwrap().category, ToneCategory::T4);
        assert_eq!(assign_tone("iau").unwrap().category, ToneCategory::T1);
    }

    #[test]
    fn tone_underivable() {
        assert!(matches!(
            assign_tone(""),
            Err(PhonemizeError::ToneUnderivable { .. })
        ));
        assert!(matches!(
            assign_tone("12"),
            Err(PhonemizeError::ToneUnderivable { .. })
        ));
        assert!(matches!(
            assign_tone("Zaon"),
            Err(PhonemizeError::ToneUnderivable { .. })
        ));
    }

    #[test]
    fn romanise_whole_word() {
        let lex = test_lexicon();
        let syls = romanise(&known("上海"), &lex).unwrap();
        assert_eq!(syls.len(), 2);
        assert_eq!(syls[0].text, "zaon");
        assert_eq!(syls[0].tone.category, ToneCategory::T3);
        assert_eq!(syls[1].text, "he2");
        assert_eq!(syls[1].tone.category, ToneCategory::T2);
        assert!(syls.iter().all(|s| s.source == RomanSource::Lexicon));
        assert!(syls.iter().all(|s| s.unit == 0));
    }

    #[test]
    fn romanise_clitic_word() {
        let lex = test_lexicon();
        let syls = romanise(&known("個"), &lex).unwrap();
        assert_eq!(syls.len(), 1);
        assert_eq!(syls[0].text, "geq");
        assert_eq!(syls[0].tone.category, ToneCategory::T5);
    }

    #[test]
    fn romanise_covers_with_subwords() {
        // 弗二弗三 has no romanisation of its own: the cover is the
        // romanised sub-word 弗二 plus the single characters 弗 and 三.
        let lex = test_lexicon();
        let syls = romanise(&known("弗二弗三"), &lex).unwrap();
        let texts: Vec<&str> = syls.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(texts, vec!["veq", "nyi", "veq", "se1"]);
        let units: Vec<usize> = syls.iter().map(|s| s.unit).collect();
        assert_eq!(units, vec![0, 0, 1, 2]);
        assert_eq!(syls[0].source, RomanSource::Lexicon);
        assert_eq!(syls[2].source, RomanSource::CharFallback);
        // syllable count always equals character count
        assert_eq!(syls.len(), 4);
    }

    #[test]
    fn romanise_rejects_unromanisable() {
        let lex = test_lexicon();
        let err = romanise(&known("弗😀"), &lex).unwrap_err();
        assert_eq!(
            err,
            PhonemizeError::UnromanisableCharacter {
                ch: '😀',
                position: 1
            }
        );
    }

    #[test]
    fn romanise_rejects_punctuation() {
        let lex = test_lexicon();
        let token = Token {
            text: "。".to_string(),
            origin: TokenOrigin::Punctuation,
            span: (0, 1),
        };
        assert!(matches!(
            romanise(&token, &lex),
            Err(PhonemizeError::PunctuationToken { .. })
        ));
    }

    #[test]
    fn ipa_conversion_examples() {
        let table = test_table();
        let zaon = RomanSyllable {
            text: "zaon".to_string(),
            tone: assign_tone("zaon").unwrap(),
            source: RomanSource::Lexicon,
            unit: 0,
        };
        let ipa = to_ipa(&zaon, &table).unwrap();
        assert_eq!(ipa.segments, vec!["z", "ã"]);
        assert_eq!(ipa.tone.contour, "23");

        let he = RomanSyllable {
            text: "he2".to_string(),
            tone: assign_tone("he2").unwrap(),
            source: RomanSource::Lexicon,
            unit: 0,
        };
        let ipa = to_ipa(&he, &table).unwrap();
        assert_eq!(ipa.segments, vec!["h", "e"]);
        assert_eq!(ipa.tone.contour, "334");

        // checked flag survives the conversion
        let veq = RomanSyllable {
            text: "veq".to_string(),
            tone: assign_tone("veq").unwrap(),
            source: RomanSource::CharFallback,
            unit: 0,
        };
        let ipa = to_ipa(&veq, &table).unwrap();
        assert_eq!(ipa.joined(), "vəʔ");
        assert!(ipa.tone.checked);
    }

    #[test]
    fn ipa_mapping_gap_is_reported() {
        let (table, _) = IpaTable::parse_tsv("z\tz\n");
        let syl = RomanSyllable {
            text: "zaon".to_string(),
            tone: ToneValue::citation(ToneCategory::T3),
            source: RomanSource::Lexicon,
            unit: 0,
        };
        let err = to_ipa(&syl, &table).unwrap_err();
        assert_eq!(
            err,
            PhonemizeError::MappingGap {
                syllable: "zaon".to_string(),
                remainder: "aon".to_string(),
            }
        );
    }

    #[test]
    fn longest_match_beats_prefix() {
        let (table, _) = IpaTable::parse_tsv("g\tg\ngh\tɦ\neq\tə ʔ\ne\te\nq\tʔ\n");
        let gheq = RomanSyllable {
            text: "gheq".to_string(),
            tone: assign_tone("gheq").unwrap(),
            source: RomanSource::Lexicon,
            unit: 0,
        };
        assert_eq!(to_ipa(&gheq, &table).unwrap().joined(), "ɦəʔ");
        let geq = RomanSyllable {
            text: "geq".to_string(),
            tone: assign_tone("geq").unwrap(),
            source: RomanSource::Lexicon,
            unit: 0,
        };
        assert_eq!(to_ipa(&geq, &table).unwrap().joined(), "gəʔ");
    }

    #[test]
    fn retokenization_is_identity_on_table_output() {
        let table = test_table();
        let inventory = table.symbol_inventory();
        for rom in ["zaon", "he2", "veq", "nyi", "se1", "geq", "gheq"] {
            let syl = RomanSyllable {
                text: rom.to_string(),
                tone: assign_tone(rom).unwrap(),
                source: RomanSource::Lexicon,
                unit: 0,
            };
            let ipa = to_ipa(&syl, &table).unwrap();
            let retok = retokenize(&ipa.joined(), &inventory).unwrap();
            assert_eq!(retok, ipa.segments, "syllable {rom}");
        }
    }
}
