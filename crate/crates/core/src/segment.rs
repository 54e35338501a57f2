//! Word segmentation: a maximum-probability path over a DAG of dictionary
//! matches, with an HMM/Viterbi fallback that labels spans of unknown
//! characters.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::lexicon::Lexicon;
use crate::text::{is_han, ln};

/// Where a token came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum TokenOrigin {
    /// The span is a stored headword.
    KnownWord,
    /// Produced by the HMM fallback over unknown characters.
    InferredWord,
    /// A single character not stored in the lexicon (the fallback edge).
    SingleCharFallback,
    /// A maximal run of non-segmentable characters (punctuation, spaces,
    /// anything outside the Han ranges and the lexicon alphabet).
    Punctuation,
}

/// A maximal lexical unit from segmentation. Concatenating token texts in
/// order reproduces the input exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub origin: TokenOrigin,
    /// Character span `(start, end)` in the segmented text.
    pub span: (usize, usize),
}

impl Token {
    pub fn is_punctuation(&self) -> bool {
        self.origin == TokenOrigin::Punctuation
    }

    pub fn char_len(&self) -> usize {
        self.span.1 - self.span.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DagEdge {
    /// Exclusive end index of the word this edge spans.
    pub end: usize,
    /// `ln(weight / total_weight)` for stored words, the OOV floor otherwise.
    pub log_prob: f64,
    /// True when the spanned text is a stored headword.
    pub known: bool,
}

/// For each start index, the candidate words beginning there. Every position
/// has at least one outgoing edge (the single-character edge is always
/// present).
#[derive(Debug, Clone)]
pub struct SegmentationDag {
    pub len: usize,
    edges: Vec<Vec<DagEdge>>,
}

impl SegmentationDag {
    pub fn edges_at(&self, i: usize) -> &[DagEdge] {
        &self.edges[i]
    }
}

/// Knobs for [`segment`].
#[derive(Debug, Clone)]
pub struct SegmentOptions {
    /// Run the HMM fallback over spans of unknown characters.
    pub use_hmm: bool,
    /// Log-probability of a single character absent from the lexicon.
    /// Defaults to `ln(1 / total_weight)`, strictly below any stored word.
    pub oov_log_prob: Option<f64>,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions {
            use_hmm: true,
            oov_log_prob: None,
        }
    }
}

/// Build the segmentation DAG for a run of segmentable characters.
pub fn build_dag(chars: &[char], lex: &Lexicon, oov_log_prob: Option<f64>) -> SegmentationDag {
    let n = chars.len();
    let total = lex.total_weight();
    let ln_total = if total > 0 { ln(total as f64) } else { 0.0 };
    let floor = oov_log_prob.unwrap_or(-ln_total);
    let mut edges = vec![Vec::new(); n];
    for i in 0..n {
        let mut has_single = false;
        for m in lex.prefix_matches(chars, i) {
            // weight-0 entries behave like the OOV floor rather than -inf
            let lp = ln(m.weight.max(1) as f64) - ln_total;
            edges[i].push(DagEdge {
                end: m.end,
                log_prob: lp,
                known: true,
            });
            if m.end == i + 1 {
                has_single = true;
            }
        }
        if !has_single {
            edges[i].push(DagEdge {
                end: i + 1,
                log_prob: floor,
                known: false,
            });
            edges[i].sort_by_key(|e| e.end);
        }
    }
    SegmentationDag { len: n, edges }
}

/// The path `0 → n` maximizing the sum of edge log-probabilities. Ties are
/// broken by preferring the longer edge at the leftmost divergence point.
pub fn max_prob_segment(dag: &SegmentationDag) -> Vec<(usize, usize)> {
    let n = dag.len;
    if n == 0 {
        return Vec::new();
    }
    // route[i] = (best score from i to n, chosen next index)
    let mut route = vec![(0.0f64, n); n + 1];
    for i in (0..n).rev() {
        let mut best: Option<(f64, usize)> = None;
        for e in &dag.edges[i] {
            let score = e.log_prob + route[e.end].0;
            let better = match best {
                None => true,
                Some((bs, bj)) => score > bs || (score == bs && e.end > bj),
            };
            if better {
                best = Some((score, e.end));
            }
        }
        route[i] = best.expect("every position has an outgoing edge");
    }
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        let j = route[i].1;
        spans.push((i, j));
        i = j;
    }
    spans
}

/// BMES states for the HMM fallback.
pub const STATE_B: usize = 0;
pub const STATE_M: usize = 1;
pub const STATE_E: usize = 2;
pub const STATE_S: usize = 3;
pub const STATE_COUNT: usize = 4;
pub const STATE_NAMES: [char; STATE_COUNT] = ['B', 'M', 'E', 'S'];

/// Transitions a BMES tagging can legally make: a word begun must be
/// continued or ended, a finished word must be followed by a new one.
pub const LEGAL_TRANSITIONS: [[bool; STATE_COUNT]; STATE_COUNT] = [
    // to:  B      M      E      S
    [false, true, true, false], // from B
    [false, true, true, false], // from M
    [true, false, false, true], // from E
    [true, false, false, true], // from S
];

/// Default log-probability for (state, character) pairs absent from the
/// emission table.
pub const DEFAULT_UNSEEN_LOGP: f64 = -20.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HmmError {
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("transition {from}->{to} is illegal for BMES tagging")]
    IllegalTransition { from: char, to: char },
    #[error("log-probability {value} on line {line} exceeds 0")]
    NotAProbability { line: usize, value: f64 },
}

/// Start, transition, and emission log-probabilities for the BMES tagger.
/// Parameters are an input, not a constant: they ship as a data file.
#[derive(Debug, Clone)]
pub struct HmmParams {
    pub start: [f64; STATE_COUNT],
    pub trans: [[f64; STATE_COUNT]; STATE_COUNT],
    emit: BTreeMap<char, [f64; STATE_COUNT]>,
    pub unseen_logp: f64,
}

impl HmmParams {
    pub fn new(
        start: [f64; STATE_COUNT],
        trans: [[f64; STATE_COUNT]; STATE_COUNT],
        unseen_logp: f64,
    ) -> Self {
        let mut trans = trans;
        for (from, row) in trans.iter_mut().enumerate() {
            for (to, cell) in row.iter_mut().enumerate() {
                if !LEGAL_TRANSITIONS[from][to] {
                    *cell = f64::NEG_INFINITY;
                }
            }
        }
        HmmParams {
            start,
            trans,
            emit: BTreeMap::new(),
            unseen_logp,
        }
    }

    pub fn set_emission(&mut self, state: usize, c: char, logp: f64) {
        let row = self
            .emit
            .entry(c)
            .or_insert([self.unseen_logp; STATE_COUNT]);
        row[state] = logp;
    }

    pub fn emit_logp(&self, state: usize, c: char) -> f64 {
        match self.emit.get(&c) {
            Some(row) => row[state],
            None => self.unseen_logp,
        }
    }

    /// Parse the parameter file: three sections `[start]`, `[transition]`,
    /// `[emission]`, tab-separated rows, natural-log probabilities. States
    /// are `B`, `M`, `E`, `S`. Omitted start or transition cells are
    /// impossible (-inf); explicitly listing an illegal transition is an
    /// error. An `[emission]` row with state and character both `*` sets the
    /// floor applied to unseen (state, character) pairs.
    pub fn parse(source: &str) -> Result<HmmParams, HmmError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Start,
            Transition,
            Emission,
        }
        fn state_index(s: &str, line: usize) -> Result<usize, HmmError> {
            match s {
                "B" => Ok(STATE_B),
                "M" => Ok(STATE_M),
                "E" => Ok(STATE_E),
                "S" => Ok(STATE_S),
                _ => Err(HmmError::Row {
                    line,
                    message: format!("unknown state '{s}'"),
                }),
            }
        }
        fn logp(s: &str, line: usize) -> Result<f64, HmmError> {
            let value: f64 = s.trim().parse().map_err(|_| HmmError::Row {
                line,
                message: format!("'{s}' is not a number"),
            })?;
            if value > 0.0 || value.is_nan() {
                return Err(HmmError::NotAProbability { line, value });
            }
            Ok(value)
        }

        let mut section = Section::None;
        let mut start = [f64::NEG_INFINITY; STATE_COUNT];
        let mut trans = [[f64::NEG_INFINITY; STATE_COUNT]; STATE_COUNT];
        let mut emissions: Vec<(usize, char, f64)> = Vec::new();
        let mut unseen = DEFAULT_UNSEEN_LOGP;

        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match trimmed {
                "[start]" => {
                    section = Section::Start;
                    continue;
                }
                "[transition]" => {
                    section = Section::Transition;
                    continue;
                }
                "[emission]" => {
                    section = Section::Emission;
                    continue;
                }
                _ => {}
            }
            let cols: Vec<&str> = trimmed.split('\t').collect();
            match section {
                Section::None => {
                    return Err(HmmError::Row {
                        line,
                        message: "data before any [start]/[transition]/[emission] section"
                            .to_string(),
                    })
                }
                Section::Start => {
                    if cols.len() != 2 {
                        return Err(HmmError::Row {
                            line,
                            message: "start rows are STATE<TAB>LOGP".to_string(),
                        });
                    }
                    start[state_index(cols[0], line)?] = logp(cols[1], line)?;
                }
                Section::Transition => {
                    if cols.len() != 3 {
                        return Err(HmmError::Row {
                            line,
                            message: "transition rows are FROM<TAB>TO<TAB>LOGP".to_string(),
                        });
                    }
                    let from = state_index(cols[0], line)?;
                    let to = state_index(cols[1], line)?;
                    if !LEGAL_TRANSITIONS[from][to] {
                        return Err(HmmError::IllegalTransition {
                            from: STATE_NAMES[from],
                            to: STATE_NAMES[to],
                        });
                    }
                    trans[from][to] = logp(cols[2], line)?;
                }
                Section::Emission => {
                    if cols.len() != 3 {
                        return Err(HmmError::Row {
                            line,
                            message: "emission rows are STATE<TAB>CHAR<TAB>LOGP".to_string(),
                        });
                    }
                    if cols[0] == "*" && cols[1] == "*" {
                        unseen = logp(cols[2], line)?;
                        continue;
                    }
                    let state = state_index(cols[0], line)?;
                    let mut chars = cols[1].chars();
                    let c = match (chars.next(), chars.next()) {
                        (Some(c), None) => c,
                        _ => {
                            return Err(HmmError::Row {
                                line,
                                message: format!("'{}' is not a single character", cols[1]),
                            })
                        }
                    };
                    emissions.push((state, c, logp(cols[2], line)?));
                }
            }
        }

        let mut params = HmmParams {
            start,
            trans,
            emit: BTreeMap::new(),
            unseen_logp: unseen,
        };
        for (state, c, value) in emissions {
            params.set_emission(state, c, value);
        }
        Ok(params)
    }
}

/// Decode the BMES state sequence of maximal joint log-probability for a
/// span of characters, then group it into tokens (`B..E` runs and `S`
/// singletons, all labelled [`TokenOrigin::InferredWord`]).
///
/// The final state is constrained to `E` or `S` so every word is completed.
/// Ties take the smaller state in `B < M < E < S` order at each backpointer
/// choice and at the final state.
pub fn viterbi_label(chars: &[char], offset: usize, hmm: &HmmParams) -> Vec<Token> {
    let n = chars.len();
    if n == 0 {
        return Vec::new();
    }
    let mut delta = vec![[f64::NEG_INFINITY; STATE_COUNT]; n];
    let mut psi = vec![[0usize; STATE_COUNT]; n];
    for s in 0..STATE_COUNT {
        delta[0][s] = hmm.start[s] + hmm.emit_logp(s, chars[0]);
    }
    for t in 1..n {
        for s in 0..STATE_COUNT {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for p in 0..STATE_COUNT {
                let v = delta[t - 1][p] + hmm.trans[p][s];
                if v > best {
                    best = v;
                    arg = p;
                }
            }
            delta[t][s] = best + hmm.emit_logp(s, chars[t]);
            psi[t][s] = arg;
        }
    }
    let last = if delta[n - 1][STATE_E] >= delta[n - 1][STATE_S] {
        STATE_E
    } else {
        STATE_S
    };
    let mut states = vec![0usize; n];
    states[n - 1] = last;
    for t in (1..n).rev() {
        states[t - 1] = psi[t][states[t]];
    }
    decode_bmes(chars, offset, &states)
}

fn decode_bmes(chars: &[char], offset: usize, states: &[usize]) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut open: Option<usize> = None;
    let push = |tokens: &mut Vec<Token>, from: usize, to: usize| {
        tokens.push(Token {
            text: chars[from..to].iter().collect(),
            origin: TokenOrigin::InferredWord,
            span: (offset + from, offset + to),
        });
    };
    for (idx, &state) in states.iter().enumerate() {
        match state {
            STATE_B => {
                if let Some(from) = open.take() {
                    push(&mut tokens, from, idx);
                }
                open = Some(idx);
            }
            STATE_M => {
                if open.is_none() {
                    open = Some(idx);
                }
            }
            STATE_E => {
                let from = open.take().unwrap_or(idx);
                push(&mut tokens, from, idx + 1);
            }
            _ => {
                if let Some(from) = open.take() {
                    push(&mut tokens, from, idx);
                }
                push(&mut tokens, idx, idx + 1);
            }
        }
    }
    if let Some(from) = open.take() {
        push(&mut tokens, from, chars.len());
    }
    tokens
}

fn is_segmentable(c: char, lex: &Lexicon) -> bool {
    is_han(c) || lex.contains_char(c)
}

/// Segment text into tokens. Maximal runs of non-segmentable characters
/// become punctuation tokens; segmentable runs are DAG-segmented; when
/// `use_hmm` is set, maximal runs of single-character fallback spans are
/// re-labelled by [`viterbi_label`]. Token spans tile the input.
pub fn segment(
    text: &str,
    lex: &Lexicon,
    hmm: Option<&HmmParams>,
    opts: &SegmentOptions,
) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let segmentable = is_segmentable(chars[i], lex);
        let mut j = i + 1;
        while j < chars.len() && is_segmentable(chars[j], lex) == segmentable {
            j += 1;
        }
        if segmentable {
            segment_run(&chars, i, j, lex, hmm, opts, &mut tokens);
        } else {
            tokens.push(Token {
                text: chars[i..j].iter().collect(),
                origin: TokenOrigin::Punctuation,
                span: (i, j),
            });
        }
        i = j;
    }
    tokens
}

fn segment_run(
    chars: &[char],
    from: usize,
    to: usize,
    lex: &Lexicon,
    hmm: Option<&HmmParams>,
    opts: &SegmentOptions,
    out: &mut Vec<Token>,
) {
    let dag = build_dag(&chars[from..to], lex, opts.oov_log_prob);
    let spans = max_prob_segment(&dag);
    let mut k = 0;
    while k < spans.len() {
        let (s, e) = spans[k];
        let is_fallback = e - s == 1 && !lex.contains_char_word(chars[from + s]);
        if is_fallback {
            let run_start = s;
            let mut run_end = e;
            while k + 1 < spans.len() {
                let (ns, ne) = spans[k + 1];
                if ne - ns == 1 && !lex.contains_char_word(chars[from + ns]) {
                    run_end = ne;
                    k += 1;
                } else {
                    break;
                }
            }
            let abs_start = from + run_start;
            let abs_end = from + run_end;
            match hmm {
                Some(params) if opts.use_hmm => {
                    out.extend(viterbi_label(&chars[abs_start..abs_end], abs_start, params));
                }
                _ => {
                    for idx in abs_start..abs_end {
                        out.push(Token {
                            text: chars[idx].to_string(),
                            origin: TokenOrigin::SingleCharFallback,
                            span: (idx, idx + 1),
                        });
                    }
                }
            }
        } else {
            out.push(Token {
                text: chars[from + s..from + e].iter().collect(),
                origin: TokenOrigin::KnownWord,
                span: (from + s, from + e),
            });
        }
        k += 1;
    }
}
