//! The stages wired end to end: normalize → traditional form → segment →
//! romanise → IPA → sandhi domains → surface tones → renderings and symbol
//! sequence, with every stage's output kept in the record for inspection.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::emit::{emit_symbols, render_contour, render_segmentation, RenderMode, SymbolSequence};
use crate::lexicon::{CharMapping, Lexicon};
use crate::phonemize::{
    assign_tone, romanise, to_ipa, IpaSyllable, IpaTable, PhonemisedToken, RomanSource,
    RomanSyllable,
};
use crate::sandhi::{apply_ld, mark_ld_domains, CliticRule, LdDomain, SandhiTable, SurfaceTone};
use crate::segment::{segment, HmmParams, SegmentOptions, TokenOrigin};
use crate::text::nfc;

/// An error from one stage, with the stage named.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl StageError {
    fn new(stage: &'static str, message: impl core::fmt::Display) -> Self {
        StageError {
            stage,
            message: message.to_string(),
        }
    }
}

/// What to do with a domain longer than the pattern table covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongDomainPolicy {
    /// Split at the rightmost interior token boundary (at the table maximum
    /// when the domain is a single overlong token) and retry.
    Split,
    /// Propagate the error.
    Error,
}

/// Everything the pipeline needs, loaded and immutable.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub lexicon: Lexicon,
    pub char_map: CharMapping,
    pub hmm: Option<HmmParams>,
    pub ipa_table: IpaTable,
    pub sandhi_table: SandhiTable,
    pub clitics: Vec<CliticRule>,
    pub use_hmm: bool,
    pub interleave_blank: bool,
    pub long_domain_policy: LongDomainPolicy,
}

/// One utterance's full analysis.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub input: String,
    pub traditional: String,
    pub tokens: Vec<PhonemisedToken>,
    pub domains: Vec<LdDomain>,
    pub surface: Vec<SurfaceTone>,
}

impl Analysis {
    pub fn contour(&self) -> String {
        render_contour(&self.tokens, &self.domains, &self.surface)
    }

    pub fn segmentation(&self, mode: RenderMode) -> String {
        render_segmentation(&self.tokens, mode)
    }

    pub fn symbols(&self, interleave_blank: bool) -> SymbolSequence {
        emit_symbols(&self.tokens, &self.domains, &self.surface, interleave_blank)
    }

    pub fn total_syllables(&self) -> usize {
        self.domains.iter().map(LdDomain::len).sum()
    }
}

/// The inspection record for one utterance: every stage's output.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PipelineRecord {
    pub input: String,
    pub traditional: String,
    pub tokens: Vec<TokenRecord>,
    pub romanisation: Vec<Vec<RomanRecord>>,
    /// Per token, the effective IPA syllables (cliticised form where the
    /// clitic rule applied). Empty for punctuation.
    pub ipa: Vec<Vec<String>>,
    pub domains: Vec<DomainRecord>,
    /// Flat, aligned with domain syllables in order.
    pub surface: Vec<SurfaceTone>,
    pub contour: String,
    pub segmentation: String,
    pub symbols: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TokenRecord {
    pub text: String,
    pub origin: TokenOrigin,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RomanRecord {
    pub text: String,
    pub tone: String,
    pub contour: String,
    pub checked: bool,
    pub source: RomanSource,
    pub unit: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DomainRecord {
    pub start_syllable: usize,
    pub end_syllable: usize,
    pub head_token: usize,
    pub has_clitic: bool,
    pub initial_tone: String,
}

impl Pipeline {
    fn clitic_set(&self) -> BTreeSet<String> {
        self.clitics.iter().map(|c| c.word.clone()).collect()
    }

    fn cliticised_syllables(
        &self,
        rule: &CliticRule,
        standalone: &[IpaSyllable],
    ) -> Result<Option<Vec<IpaSyllable>>, StageError> {
        let Some(spelling) = &rule.cliticised else {
            return Ok(None);
        };
        let mut syllables = Vec::new();
        for part in spelling.split_whitespace() {
            let tone = assign_tone(part).map_err(|e| StageError::new("phonemize", e))?;
            let roman = RomanSyllable {
                text: part.to_string(),
                tone,
                source: RomanSource::Lexicon,
                unit: 0,
            };
            syllables.push(to_ipa(&roman, &self.ipa_table).map_err(|e| StageError::new("phonemize", e))?);
        }
        if syllables.len() != standalone.len() {
            return Err(StageError::new(
                "phonemize",
                format!(
                    "cliticised form of '{}' has {} syllables, standalone has {}",
                    rule.word,
                    syllables.len(),
                    standalone.len()
                ),
            ));
        }
        Ok(Some(syllables))
    }

    /// Run the full pipeline over one utterance.
    pub fn analyse(&self, input: &str) -> Result<Analysis, StageError> {
        let normalized = nfc(input);
        let traditional = self.char_map.convert(&normalized);

        let opts = SegmentOptions {
            use_hmm: self.use_hmm,
            oov_log_prob: None,
        };
        let tokens = segment(&traditional, &self.lexicon, self.hmm.as_ref(), &opts);

        let mut phonemised = Vec::with_capacity(tokens.len());
        for token in tokens {
            if token.is_punctuation() {
                phonemised.push(PhonemisedToken::punctuation(token));
                continue;
            }
            let roman = romanise(&token, &self.lexicon).map_err(|e| StageError::new("phonemize", e))?;
            let mut ipa = Vec::with_capacity(roman.len());
            for syl in &roman {
                ipa.push(to_ipa(syl, &self.ipa_table).map_err(|e| StageError::new("phonemize", e))?);
            }
            let cliticised = match self.clitics.iter().find(|c| c.word == token.text) {
                Some(rule) => self.cliticised_syllables(rule, &ipa)?,
                None => None,
            };
            phonemised.push(PhonemisedToken {
                token,
                roman,
                ipa,
                cliticised,
            });
        }

        let mut domains = mark_ld_domains(&phonemised, &self.clitic_set());
        if self.long_domain_policy == LongDomainPolicy::Split {
            domains = split_long_domains(domains, self.sandhi_table.max_len);
        }

        let mut surface = Vec::new();
        for domain in &domains {
            surface.extend(apply_ld(domain, &self.sandhi_table).map_err(|e| StageError::new("sandhi", e))?);
        }

        Ok(Analysis {
            input: input.to_string(),
            traditional,
            tokens: phonemised,
            domains,
            surface,
        })
    }

    /// Run the pipeline and build the inspection record.
    pub fn run(&self, input: &str) -> Result<PipelineRecord, StageError> {
        let analysis = self.analyse(input)?;
        Ok(self.record(&analysis))
    }

    pub fn record(&self, analysis: &Analysis) -> PipelineRecord {
        let tokens: Vec<TokenRecord> = analysis
            .tokens
            .iter()
            .map(|pt| TokenRecord {
                text: pt.token.text.clone(),
                origin: pt.token.origin,
                start: pt.token.span.0,
                end: pt.token.span.1,
            })
            .collect();
        let romanisation: Vec<Vec<RomanRecord>> = analysis
            .tokens
            .iter()
            .map(|pt| {
                pt.roman
                    .iter()
                    .map(|r| RomanRecord {
                        text: r.text.clone(),
                        tone: r.tone.category.label().to_string(),
                        contour: r.tone.contour.clone(),
                        checked: r.tone.checked,
                        source: r.source,
                        unit: r.unit,
                    })
                    .collect()
            })
            .collect();
        let mut ipa: Vec<Vec<String>> = vec![Vec::new(); analysis.tokens.len()];
        for domain in &analysis.domains {
            for syl in &domain.syllables {
                ipa[syl.token].push(syl.ipa.joined());
            }
        }
        let domains: Vec<DomainRecord> = analysis
            .domains
            .iter()
            .map(|d| DomainRecord {
                start_syllable: d.start_syllable,
                end_syllable: d.start_syllable + d.len(),
                head_token: d.head_token,
                has_clitic: d.has_clitic,
                initial_tone: d.initial_category().label().to_string(),
            })
            .collect();
        PipelineRecord {
            input: analysis.input.clone(),
            traditional: analysis.traditional.clone(),
            tokens,
            romanisation,
            ipa,
            domains,
            surface: analysis.surface.clone(),
            contour: analysis.contour(),
            segmentation: analysis.segmentation(RenderMode::Ipa),
            symbols: analysis.symbols(self.interleave_blank).rendered(),
        }
    }
}

/// Split any domain longer than `max_len` at its rightmost interior token
/// boundary (falling back to a hard split at `max_len` for a single
/// overlong token), repeatedly, so every resulting domain fits the table.
fn split_long_domains(domains: Vec<LdDomain>, max_len: usize) -> Vec<LdDomain> {
    let mut out = Vec::with_capacity(domains.len());
    let mut queue: Vec<LdDomain> = domains.into_iter().rev().collect();
    while let Some(domain) = queue.pop() {
        if domain.len() <= max_len {
            out.push(domain);
            continue;
        }
        let split_at = domain
            .syllables
            .windows(2)
            .enumerate()
            .rev()
            .find(|(_, pair)| pair[0].token != pair[1].token)
            .map(|(i, _)| i + 1)
            .unwrap_or(max_len);
        let right_syllables = domain.syllables[split_at..].to_vec();
        let right = LdDomain {
            head_token: right_syllables[0].token,
            has_clitic: right_syllables
                .windows(2)
                .any(|pair| pair[0].token != pair[1].token),
            start_syllable: domain.start_syllable + split_at,
            rd_group: domain.rd_group,
            syllables: right_syllables,
        };
        let left_syllables = domain.syllables[..split_at].to_vec();
        let left = LdDomain {
            head_token: domain.head_token,
            has_clitic: left_syllables
                .windows(2)
                .any(|pair| pair[0].token != pair[1].token),
            start_syllable: domain.start_syllable,
            rd_group: domain.rd_group,
            syllables: left_syllables,
        };
        queue.push(right);
        queue.push(left);
    }
    out
}


#[cfg(test)]
mod tests {
    use super::testdata;
    use super::*;

    #[test]
    fn shanghai_analysis() {
        let p = testdata::pipeline();
        let analysis = p.analyse("上海").unwrap();
        assert_eq!(analysis.domains.len(), 1);
        assert_eq!(analysis.domains[0].len(), 2);
        let pitches: Vec<&str> = analysis.surface.iter().map(|s| s.pitch.as_str()).collect();
        assert_eq!(pitches, vec!["2", "4"]);
        assert_eq!(analysis.contour(), "[zã2 he4]");
    }

    #[test]
    fn sentence_five_analysis() {
        let p = testdata::pipeline();
        let analysis = p.analyse("儂弗要弗二弗三個").unwrap();
        let texts: Vec<&str> = analysis
            .tokens
            .iter()
            .map(|t| t.token.text.as_str())
            .collect();
        assert_eq!(texts, vec!["儂", "弗要", "弗二弗三", "個"]);
        // pentasyllabic domain with the clitic attached
        let last = analysis.domains.last().unwrap();
        assert_eq!(last.len(), 5);
        assert!(last.has_clitic);
        let pitches: Vec<&str> = analysis.surface[analysis.surface.len() - 5..]
            .iter()
            .map(|s| s.pitch.as_str())
            .collect();
        assert_eq!(pitches, vec!["1", "3", "2", "2", "1"]);
        assert!(analysis.contour().contains("[vəʔ1 ni3 vəʔ2 se2 ɦəʔ1]"));
        assert!(analysis
            .segmentation(RenderMode::Ipa)
            .contains("vəʔ-ni=vəʔ=se1 gəʔ"));
    }

    #[test]
    fn simplified_input_is_converted() {
        let p = testdata::pipeline();
        let analysis = p.analyse("国际化").unwrap();
        assert_eq!(analysis.traditional, "國際化");
        assert_eq!(analysis.tokens.len(), 1);
    }

    #[test]
    fn empty_input_empty_record() {
        let p = testdata::pipeline();
        let record = p.run("").unwrap();
        assert!(record.tokens.is_empty());
        assert!(record.domains.is_empty());
        assert!(record.surface.is_empty());
        assert_eq!(record.contour, "");
        assert!(record.symbols.is_empty());
    }

    #[test]
    fn stage_error_carries_stage_name() {
        let p = testdata::pipeline();
        let err = p.analyse("上龜").unwrap_err();
        assert_eq!(err.stage, "phonemize");
        assert!(err.message.contains('龜'));
    }

    #[test]
    fn long_domain_splits_at_clitic_joint() {
        let mut p = testdata::pipeline();
        // shrink the table so the pentasyllabic domain no longer fits
        let small = testdata::SANDHI_TSV
            .lines()
            .filter(|l| {
                let len: usize = l.split('\t').nth(1).unwrap().parse().unwrap();
                len <= 4
            })
            .map(|l| format!("{l}\n"))
            .collect::<String>();
        p.sandhi_table = crate::sandhi::SandhiTable::parse_tsv(&small).unwrap().0;
        let analysis = p.analyse("弗二弗三個").unwrap();
        let lens: Vec<usize> = analysis.domains.iter().map(LdDomain::len).collect();
        assert_eq!(lens, vec![4, 1]);
        // with the error policy instead, the stage fails
        p.long_domain_policy = LongDomainPolicy::Error;
        let err = p.analyse("弗二弗三個").unwrap_err();
        assert_eq!(err.stage, "sandhi");
    }

    #[test]
    fn records_are_deterministic() {
        let p = testdata::pipeline();
        let a = p.run("儂弗要弗二弗三個。").unwrap();
        let b = p.run("儂弗要弗二弗三個。").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn surface_length_matches_syllable_count() {
        let p = testdata::pipeline();
        for text in ["上海", "上海是一座國際化大都市。", "儂弗要弗二弗三個。"] {
            let analysis = p.analyse(text).unwrap();
            assert_eq!(analysis.surface.len(), analysis.total_syllables());
        }
    }

    #[test]
    fn sentence_two_tokens() {
        let p = testdata::pipeline();
        let analysis = p.analyse("上海是一座國際化大都市。").unwrap();
        let texts: Vec<&str> = analysis
            .tokens
            .iter()
            .map(|t| t.token.text.as_str())
            .collect();
        assert!(texts.contains(&"上海"));
        assert!(texts.contains(&"國際化"));
        assert!(texts.contains(&"大都市"));
        assert_eq!(*texts.last().unwrap(), "。");
        let record = p.run("上海是一座國際化大都市。").unwrap();
        assert_eq!(record.tokens.last().unwrap().origin, TokenOrigin::Punctuation);
    }
}
