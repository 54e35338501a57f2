//! Left-dominant sandhi: domain formation from token boundaries (with
//! clitic attachment) and surface-tone computation from a pattern table.
//!
//! A domain opens at the left edge of each lexical word; the citation tone
//! of its first syllable picks the pitch pattern for the whole domain, and
//! the citation tones of the remaining syllables are ignored. Checked
//! syllables additionally carry a shortening marker on their surface target.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::phonemize::{IpaSyllable, PhonemisedToken, ToneCategory, TONE_CATEGORIES};
use crate::lexicon::RowError;

/// Default upper bound on domain length (syllables) in the shipped table.
pub const DEFAULT_MAX_DOMAIN_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SandhiError {
    #[error("domain of {len} syllables exceeds the pattern table maximum of {max}")]
    DomainTooLong { len: usize, max: usize },
    #[error("pattern table has no row for {category} at length {len}", category = .category.label())]
    MissingRow { category: ToneCategory, len: usize },
    #[error("pattern table is incomplete: missing {}", format_missing(.missing))]
    IncompleteTable { missing: Vec<(ToneCategory, usize)> },
    #[error("length-1 row for {category} must equal the citation contour, found '{found}'", category = .category.label())]
    BadCitationRow { category: ToneCategory, found: String },
    #[error("row {len} for {category} has {targets} targets", category = .category.label())]
    RowLengthMismatch {
        category: ToneCategory,
        len: usize,
        targets: usize,
    },
    #[error("analyses cover different syllable sequences")]
    IncomparableAnalyses,
}

fn format_missing(missing: &[(ToneCategory, usize)]) -> String {
    let shown: Vec<String> = missing
        .iter()
        .take(5)
        .map(|(c, l)| format!("{}x{}", c.label(), l))
        .collect();
    if missing.len() > shown.len() {
        format!("{} rows ({}, …)", missing.len(), shown.join(", "))
    } else {
        format!("{} rows ({})", missing.len(), shown.join(", "))
    }
}

/// Mapping (initial tone category, domain length) → surface pitch targets.
/// Complete over lengths `1..=max_len` for all five categories; the
/// length-1 row is the citation contour (sandhi is vacuous on
/// monosyllables).
#[derive(Debug, Clone)]
pub struct SandhiTable {
    rows: alloc::collections::BTreeMap<(ToneCategory, usize), Vec<String>>,
    pub max_len: usize,
}

impl SandhiTable {
    /// Parse `category<TAB>length<TAB>space-separated pitch targets` rows
    /// and validate completeness up to the largest length present.
    pub fn parse_tsv(source: &str) -> Result<(SandhiTable, Vec<RowError>), SandhiError> {
        let mut rows = alloc::collections::BTreeMap::new();
        let mut errors = Vec::new();
        let mut max_len = 0usize;
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                errors.push(RowError {
                    line,
                    message: "expected 'category<TAB>length<TAB>targets'".to_string(),
                });
                continue;
            }
            let Some(category) = ToneCategory::parse_label(cols[0].trim()) else {
                errors.push(RowError {
                    line,
                    message: format!("unknown tone category '{}'", cols[0]),
                });
                continue;
            };
            let Ok(len) = cols[1].trim().parse::<usize>() else {
                errors.push(RowError {
                    line,
                    message: format!("'{}' is not a length", cols[1]),
                });
                continue;
            };
            if len == 0 {
                errors.push(RowError {
                    line,
                    message: "length must be at least 1".to_string(),
                });
                continue;
            }
            let targets: Vec<String> = cols[2].split_whitespace().map(String::from).collect();
            if targets.len() != len {
                return Err(SandhiError::RowLengthMismatch {
                    category,
                    len,
                    targets: targets.len(),
                });
            }
            if targets
                .iter()
                .any(|t| t.is_empty() || !t.chars().all(|c| ('1'..='5').contains(&c)))
            {
                errors.push(RowError {
                    line,
                    message: format!("targets must be Chao digit strings, found '{}'", cols[2]),
                });
                continue;
            }
            max_len = max_len.max(len);
            rows.insert((category, len), targets);
        }

        let mut missing = Vec::new();
        for &category in &TONE_CATEGORIES {
            for len in 1..=max_len {
                if !rows.contains_key(&(category, len)) {
                    missing.push((category, len));
                }
            }
        }
        if !missing.is_empty() {
            return Err(SandhiError::IncompleteTable { missing });
        }
        for &category in &TONE_CATEGORIES {
            let row = &rows[&(category, 1)];
            let found = row[0].as_str();
            if !category.contour_aliases().contains(&found) {
                return Err(SandhiError::BadCitationRow {
                    category,
                    found: found.to_string(),
                });
            }
        }
        Ok((SandhiTable { rows, max_len }, errors))
    }

    pub fn row(&self, category: ToneCategory, len: usize) -> Option<&[String]> {
        self.rows.get(&(category, len)).map(|v| v.as_slice())
    }
}

/// A syllable inside a domain, remembering which token it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSyllable {
    pub ipa: IpaSyllable,
    /// Index into the utterance's token list.
    pub token: usize,
}

/// A contiguous span of syllables realized under one left-dominant pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdDomain {
    pub syllables: Vec<DomainSyllable>,
    /// Token whose left edge opens the domain.
    pub head_token: usize,
    pub has_clitic: bool,
    /// Flat syllable index of the first syllable (over non-punctuation
    /// syllables of the utterance).
    pub start_syllable: usize,
    /// Optional right-dominant grouping label; annotation metadata only, no
    /// tonal realization is computed from it.
    pub rd_group: Option<u32>,
}

impl LdDomain {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn initial_category(&self) -> ToneCategory {
        self.syllables[0].ipa.tone.category
    }
}

/// One surface pitch target, aligned with a syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SurfaceTone {
    /// Chao digit string.
    pub pitch: String,
    /// Checked-syllable shortening marker (the glottal coda is often
    /// realised as a shortened nucleus).
    pub shortened: bool,
}

/// A clitic and the form it takes when attached (space-separated romanised
/// syllables; `None` keeps the standalone pronunciation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliticRule {
    pub word: String,
    pub cliticised: Option<String>,
}

/// Form left-dominant domains from phonemised tokens. One domain per
/// non-punctuation token, except that a token in the clitic set attaches to
/// the preceding domain (utterance-initial clitics, or clitics right after
/// punctuation, open their own domain). Punctuation closes any open domain.
pub fn mark_ld_domains(tokens: &[PhonemisedToken], clitics: &BTreeSet<String>) -> Vec<LdDomain> {
    let mut domains: Vec<LdDomain> = Vec::new();
    let mut open: Option<usize> = None; // index into domains
    let mut syllable_cursor = 0usize;
    for (idx, pt) in tokens.iter().enumerate() {
        if pt.token.is_punctuation() {
            open = None;
            continue;
        }
        let attachable = open.is_some() && clitics.contains(&pt.token.text);
        let syllables = if attachable {
            pt.cliticised.as_ref().unwrap_or(&pt.ipa)
        } else {
            &pt.ipa
        };
        let wrapped = syllables.iter().map(|ipa| DomainSyllable {
            ipa: ipa.clone(),
            token: idx,
        });
        if attachable {
            let domain = &mut domains[open.unwrap()];
            domain.syllables.extend(wrapped);
            domain.has_clitic = true;
        } else {
            domains.push(LdDomain {
                syllables: wrapped.collect(),
                head_token: idx,
                has_clitic: false,
                start_syllable: syllable_cursor,
                rd_group: None,
            });
            open = Some(domains.len() - 1);
        }
        syllable_cursor += syllables.len();
    }
    domains
}

/// Surface tones for a domain: the table row selected by the first
/// syllable's citation category and the domain length, with the shortening
/// marker set wherever the corresponding syllable is checked. Non-initial
/// citation tones are ignored.
pub fn apply_ld(domain: &LdDomain, table: &SandhiTable) -> Result<Vec<SurfaceTone>, SandhiError> {
    let len = domain.len();
    if len > table.max_len {
        return Err(SandhiError::DomainTooLong {
            len,
            max: table.max_len,
        });
    }
    let category = domain.initial_category();
    let row = table
        .row(category, len)
        .ok_or(SandhiError::MissingRow { category, len })?;
    Ok(row
        .iter()
        .zip(&domain.syllables)
        .map(|(pitch, syl)| SurfaceTone {
            pitch: pitch.clone(),
            shortened: syl.ipa.tone.checked,
        })
        .collect())
}

/// Insertions and deletions of interior domain boundaries between two
/// analyses of the same syllable sequence. Positions count syllables before
/// the boundary.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DomainDiff {
    /// Boundaries present in `b` but not `a`.
    pub insertions: Vec<usize>,
    /// Boundaries present in `a` but not `b`.
    pub deletions: Vec<usize>,
}

impl DomainDiff {
    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty() && self.deletions.is_empty()
    }
}

fn interior_boundaries(domains: &[LdDomain]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut cursor = 0usize;
    for (idx, d) in domains.iter().enumerate() {
        cursor += d.len();
        if idx + 1 < domains.len() {
            out.insert(cursor);
        }
    }
    out
}

/// Compare two domain analyses of the same syllable sequence.
pub fn diff_domains(a: &[LdDomain], b: &[LdDomain]) -> Result<DomainDiff, SandhiError> {
    let flatten = |domains: &[LdDomain]| -> Vec<String> {
        domains
            .iter()
            .flat_map(|d| d.syllables.iter().map(|s| s.ipa.joined()))
            .collect()
    };
    if flatten(a) != flatten(b) {
        return Err(SandhiError::IncomparableAnalyses);
    }
    let ba = interior_boundaries(a);
    let bb = interior_boundaries(b);
    Ok(DomainDiff {
        insertions: bb.difference(&ba).copied().collect(),
        deletions: ba.difference(&bb).copied().collect(),
    })
}
