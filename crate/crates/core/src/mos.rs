//! MOS questionnaire statistics: means, 95% confidence intervals, and
//! pairwise Welch tests over rating records.
//!
//! The rating file is a CSV with header
//! `participant,speaker,sentence,metric,score`: three speakers, five
//! sentences, four metrics, scores 1–5. A participant missing any
//! (speaker, sentence, metric) cell is dropped entirely and reported.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::lexicon::RowError;
use crate::stats::{mean_variance, sqrt_f64, t_quantile, welch_test};

pub const SPEAKERS: [u8; 3] = [1, 2, 3];
pub const SENTENCES: [u8; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Metric {
    Comprehensibility,
    Naturalness,
    Accuracy,
    Intelligibility,
}

pub const METRICS: [Metric; 4] = [
    Metric::Comprehensibility,
    Metric::Naturalness,
    Metric::Accuracy,
    Metric::Intelligibility,
];

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Comprehensibility => "comprehensibility",
            Metric::Naturalness => "naturalness",
            Metric::Accuracy => "accuracy",
            Metric::Intelligibility => "intelligibility",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "comprehensibility" => Some(Metric::Comprehensibility),
            "naturalness" => Some(Metric::Naturalness),
            "accuracy" => Some(Metric::Accuracy),
            "intelligibility" => Some(Metric::Intelligibility),
            _ => None,
        }
    }
}

/// One opinion score.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RatingRecord {
    pub participant: String,
    pub speaker: u8,
    pub sentence: u8,
    pub metric: Metric,
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MosError {
    #[error("ratings file must start with the header 'participant,speaker,sentence,metric,score'")]
    BadHeader,
    #[error("cell ({a}) or ({b}) has fewer than 2 scores")]
    InsufficientData { a: String, b: String },
    #[error("no records for the requested cell")]
    EmptyCell,
}

/// Parsed ratings: complete participants only, with diagnostics for bad
/// rows and for participants dropped as incomplete.
#[derive(Debug, Clone)]
pub struct RatingsLoad {
    pub records: Vec<RatingRecord>,
    pub errors: Vec<RowError>,
    pub dropped_participants: Vec<String>,
}

/// Parse the ratings CSV. Row-level problems (wrong field count,
/// out-of-range values, duplicate cells) are reported and skipped; a
/// participant without all 3×5×4 cells is dropped entirely.
pub fn parse_ratings_csv(source: &str) -> Result<RatingsLoad, MosError> {
    let mut lines = source.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((_, line)) => break line,
            None => return Err(MosError::BadHeader),
        }
    };
    if header.trim() != "participant,speaker,sentence,metric,score" {
        return Err(MosError::BadHeader);
    }
    let mut errors = Vec::new();
    let mut raw: Vec<RatingRecord> = Vec::new();
    let mut seen: BTreeSet<(String, u8, u8, Metric)> = BTreeSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            errors.push(RowError {
                line: line_no,
                message: format!("expected 5 comma-separated fields, found {}", cols.len()),
            });
            continue;
        }
        let participant = cols[0].trim().to_string();
        if participant.is_empty() {
            errors.push(RowError {
                line: line_no,
                message: "empty participant id".to_string(),
            });
            continue;
        }
        let speaker = match cols[1].trim().parse::<u8>() {
            Ok(s) if SPEAKERS.contains(&s) => s,
            _ => {
                errors.push(RowError {
                    line: line_no,
                    message: format!("speaker '{}' is not in 1..=3", cols[1]),
                });
                continue;
            }
        };
        let sentence = match cols[2].trim().parse::<u8>() {
            Ok(s) if SENTENCES.contains(&s) => s,
            _ => {
                errors.push(RowError {
                    line: line_no,
                    message: format!("sentence '{}' is not in 1..=5", cols[2]),
                });
                continue;
            }
        };
        let metric = match Metric::parse(cols[3]) {
            Some(m) => m,
            None => {
                errors.push(RowError {
                    line: line_no,
                    message: format!("unknown metric '{}'", cols[3]),
                });
                continue;
            }
        };
        let score = match cols[4].trim().parse::<u8>() {
            Ok(s) if (1..=5).contains(&s) => s,
            _ => {
                errors.push(RowError {
                    line: line_no,
                    message: format!("score '{}' is not in 1..=5", cols[4]),
                });
                continue;
            }
        };
        let key = (participant.clone(), speaker, sentence, metric);
        if !seen.insert(key) {
            errors.push(RowError {
                line: line_no,
                message: format!(
                    "duplicate cell for participant '{participant}' (speaker {speaker}, sentence {sentence}, {})",
                    metric.label()
                ),
            });
            continue;
        }
        raw.push(RatingRecord {
            participant,
            speaker,
            sentence,
            metric,
            score,
        });
    }

    // completeness: every participant needs all 3×5×4 cells
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &raw {
        *counts.entry(r.participant.as_str()).or_default() += 1;
    }
    let full = SPEAKERS.len() * SENTENCES.len() * METRICS.len();
    let dropped: Vec<String> = counts
        .iter()
        .filter(|&(_, &n)| n != full)
        .map(|(p, _)| p.to_string())
        .collect();
    let records = raw
        .into_iter()
        .filter(|r| !dropped.contains(&r.participant))
        .collect();
    Ok(RatingsLoad {
        records,
        errors,
        dropped_participants: dropped,
    })
}

/// A table cell: mean opinion score with its 95% confidence half-width
/// (t distribution, df = n−1).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MosCell {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
}

/// Compute a cell from raw scores. Zero-variance cells get a half-width of
/// exactly 0; so do single-score cells (no spread to estimate).
pub fn mos_cell(scores: &[f64]) -> Option<MosCell> {
    if scores.is_empty() {
        return None;
    }
    let (mean, variance) = mean_variance(scores);
    let n = scores.len();
    let ci_halfwidth = if n < 2 || variance == 0.0 {
        0.0
    } else {
        t_quantile(0.975, (n - 1) as f64) * sqrt_f64(variance) / sqrt_f64(n as f64)
    };
    Some(MosCell {
        mean,
        ci_halfwidth,
        n,
    })
}

/// Table groupings mirroring the three report layouts: overall by speaker,
/// speaker × metric, speaker × sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Speaker,
    SpeakerMetric,
    SpeakerSentence,
}

/// A speaker-by-column MOS table. Empty cells are absent from `cells`
/// (reported as missing, never as zero).
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct MosTable {
    pub columns: Vec<String>,
    /// Keyed by (speaker, column index).
    pub cells: BTreeMap<(u8, usize), MosCell>,
}

/// Group records and compute one MOS cell per (speaker, column).
pub fn mos(records: &[RatingRecord], grouping: Grouping) -> MosTable {
    let columns: Vec<String> = match grouping {
        Grouping::Speaker => alloc::vec!["overall".to_string()],
        Grouping::SpeakerMetric => METRICS.iter().map(|m| m.label().to_string()).collect(),
        Grouping::SpeakerSentence => SENTENCES.iter().map(|s| s.to_string()).collect(),
    };
    let column_of = |r: &RatingRecord| -> usize {
        match grouping {
            Grouping::Speaker => 0,
            Grouping::SpeakerMetric => METRICS.iter().position(|m| *m == r.metric).unwrap(),
            Grouping::SpeakerSentence => SENTENCES.iter().position(|s| *s == r.sentence).unwrap(),
        }
    };
    let mut scores: BTreeMap<(u8, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        scores
            .entry((r.speaker, column_of(r)))
            .or_default()
            .push(r.score as f64);
    }
    let cells = scores
        .into_iter()
        .filter_map(|(key, values)| mos_cell(&values).map(|cell| (key, cell)))
        .collect();
    MosTable { columns, cells }
}

/// Selects one cell of the rating grid: a speaker, optionally restricted to
/// one metric or one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSelector {
    pub speaker: u8,
    pub metric: Option<Metric>,
    pub sentence: Option<u8>,
}

impl CellSelector {
    pub fn speaker(speaker: u8) -> Self {
        CellSelector {
            speaker,
            metric: None,
            sentence: None,
        }
    }

    fn matches(&self, r: &RatingRecord) -> bool {
        r.speaker == self.speaker
            && self.metric.map_or(true, |m| m == r.metric)
            && self.sentence.map_or(true, |s| s == r.sentence)
    }

    fn describe(&self) -> String {
        let mut s = format!("speaker {}", self.speaker);
        if let Some(m) = self.metric {
            s.push_str(", ");
            s.push_str(m.label());
        }
        if let Some(x) = self.sentence {
            s.push_str(&format!(", sentence {x}"));
        }
        s
    }
}

pub fn cell_scores(records: &[RatingRecord], selector: &CellSelector) -> Vec<f64> {
    records
        .iter()
        .filter(|r| selector.matches(r))
        .map(|r| r.score as f64)
        .collect()
}

/// Two-sided Welch two-sample t-test between two cells. The test choice is
/// a reporting default; the p-value is labelled as such by callers.
pub fn pairwise_test(
    records: &[RatingRecord],
    a: &CellSelector,
    b: &CellSelector,
) -> Result<f64, MosError> {
    let sa = cell_scores(records, a);
    let sb = cell_scores(records, b);
    if sa.len() < 2 || sb.len() < 2 {
        return Err(MosError::InsufficientData {
            a: a.describe(),
            b: b.describe(),
        });
    }
    let (_, _, p) = welch_test(&sa, &sb);
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn synthetic_csv(participants: usize) -> String {
        let mut csv = String::from("participant,speaker,sentence,metric,score\n");
        for p in 0..participants {
            for speaker in SPEAKERS {
                for sentence in SENTENCES {
                    for (mi, metric) in METRICS.iter().enumerate() {
                        // deterministic but varied scores in 1..=5
                        let score = 1 + (p + speaker as usize * 2 + sentence as usize + mi) % 5;
                        csv.push_str(&format!(
                            "p{p},{speaker},{sentence},{},{score}\n",
                            metric.label()
                        ));
                    }
                }
            }
        }
        csv
    }

    #[test]
    fn load_complete_participants() {
        let csv = synthetic_csv(10);
        let load = parse_ratings_csv(&csv).unwrap();
        assert_eq!(load.records.len(), 600);
        assert!(load.errors.is_empty());
        assert!(load.dropped_participants.is_empty());
    }

    #[test]
    fn incomplete_participant_is_dropped() {
        let csv = synthetic_csv(10);
        // drop one data line belonging to p3
        let cut: Vec<&str> = csv
            .lines()
            .enumerate()
            .filter(|(i, line)| !(*i > 0 && line.starts_with("p3,1,1,")) || *i == 0)
            .map(|(_, l)| l)
            .collect();
        let mut shortened = cut.join("\n");
        shortened.push('\n');
        let load = parse_ratings_csv(&shortened).unwrap();
        assert_eq!(load.dropped_participants, vec!["p3".to_string()]);
        assert_eq!(load.records.len(), 540);
    }

    #[test]
    fn empty_file_is_header_error_and_header_only_is_empty() {
        assert!(matches!(parse_ratings_csv(""), Err(MosError::BadHeader)));
        let load = parse_ratings_csv("participant,speaker,sentence,metric,score\n").unwrap();
        assert!(load.records.is_empty());
    }

    #[test]
    fn out_of_range_rows_are_reported() {
        let csv = "participant,speaker,sentence,metric,score\n\
                   p0,4,1,accuracy,3\n\
                   p0,1,9,accuracy,3\n\
                   p0,1,1,vibes,3\n\
                   p0,1,1,accuracy,6\n\
                   p0,1,1,accuracy,3\n\
                   p0,1,1,accuracy,4\n";
        let load = parse_ratings_csv(csv).unwrap();
        let lines: Vec<usize> = load.errors.iter().map(|e| e.line).collect();
        // the last row duplicates the cell from the row before it
        assert_eq!(lines, vec![2, 3, 4, 5, 7]);
    }

    #[test]
    fn zero_variance_cell() {
        let cell = mos_cell(&[5.0, 5.0, 5.0, 5.0]).unwrap();
        assert_eq!(cell.mean, 5.0);
        assert_eq!(cell.ci_halfwidth, 0.0);
        assert_eq!(cell.n, 4);
    }

    #[test]
    fn textbook_halfwidth() {
        // [4,5,4,5]: s = sqrt(1/3), halfwidth = t(0.975,3) * s / 2 ≈ 0.9187
        let cell = mos_cell(&[4.0, 5.0, 4.0, 5.0]).unwrap();
        assert_eq!(cell.mean, 4.5);
        assert!((cell.ci_halfwidth - 0.919).abs() < 1e-3, "{}", cell.ci_halfwidth);
    }

    #[test]
    fn mean_stays_within_score_range() {
        let csv = synthetic_csv(7);
        let load = parse_ratings_csv(&csv).unwrap();
        for grouping in [Grouping::Speaker, Grouping::SpeakerMetric, Grouping::SpeakerSentence] {
            let table = mos(&load.records, grouping);
            for cell in table.cells.values() {
                assert!(cell.mean >= 1.0 && cell.mean <= 5.0);
                assert!(cell.ci_halfwidth >= 0.0);
            }
        }
    }

    #[test]
    fn mos_is_permutation_invariant() {
        let csv = synthetic_csv(5);
        let load = parse_ratings_csv(&csv).unwrap();
        let table = mos(&load.records, Grouping::SpeakerMetric);
        let mut reversed = load.records.clone();
        reversed.reverse();
        let table_rev = mos(&reversed, Grouping::SpeakerMetric);
        assert_eq!(table.cells, table_rev.cells);
    }

    #[test]
    fn table_shapes() {
        let csv = synthetic_csv(4);
        let load = parse_ratings_csv(&csv).unwrap();
        let t1 = mos(&load.records, Grouping::Speaker);
        assert_eq!(t1.columns.len(), 1);
        assert_eq!(t1.cells.len(), 3);
        let t2 = mos(&load.records, Grouping::SpeakerMetric);
        assert_eq!(t2.columns.len(), 4);
        assert_eq!(t2.cells.len(), 12);
        let t3 = mos(&load.records, Grouping::SpeakerSentence);
        assert_eq!(t3.columns.len(), 5);
        assert_eq!(t3.cells.len(), 15);
        // missing cells stay missing
        let speaker1_only: Vec<RatingRecord> = load
            .records
            .iter()
            .filter(|r| r.speaker == 1)
            .cloned()
            .collect();
        let partial = mos(&speaker1_only, Grouping::Speaker);
        assert_eq!(partial.cells.len(), 1);
        assert!(partial.cells.contains_key(&(1, 0)));
    }

    #[test]
    fn pairwise_identical_cells() {
        let csv = synthetic_csv(6);
        let load = parse_ratings_csv(&csv).unwrap();
        let a = CellSelector::speaker(1);
        let p = pairwise_test(&load.records, &a, &a).unwrap();
        assert_eq!(p, 1.0);
        // symmetry
        let b = CellSelector::speaker(2);
        let pab = pairwise_test(&load.records, &a, &b).unwrap();
        let pba = pairwise_test(&load.records, &b, &a).unwrap();
        assert!((pab - pba).abs() < 1e-15);
    }

    #[test]
    fn pairwise_insufficient_data() {
        let records = vec![RatingRecord {
            participant: "p0".to_string(),
            speaker: 1,
            sentence: 1,
            metric: Metric::Accuracy,
            score: 5,
        }];
        let err = pairwise_test(
            &records,
            &CellSelector::speaker(1),
            &CellSelector::speaker(2),
        )
        .unwrap_err();
        assert!(matches!(err, MosError::InsufficientData { .. }));
    }
}
