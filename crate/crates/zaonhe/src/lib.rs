//! IO, configuration, and file formats for the Shanghainese text front end.
//! The algorithms live in `zaonhe-core`; this crate reads the data files,
//! assembles the pipeline, and exposes the batch helpers the CLI uses.

pub mod config;
pub mod evalfmt;
pub mod load;

use zaonhe_core::emit::RenderMode;
use zaonhe_core::pipeline::Pipeline;

/// What a line-oriented command prints for one input line.
pub enum LineOutput {
    Line(String),
    /// Diagnostic for this line; processing continues with the next line.
    Error(String),
}

/// Apply `f` to every input line, producing one output (or one diagnostic)
/// per line, in input order.
pub fn process_lines<F>(input: &str, f: F) -> Vec<LineOutput>
where
    F: Fn(&str) -> Result<String, String>,
{
    input
        .lines()
        .map(|line| match f(line) {
            Ok(out) => LineOutput::Line(out),
            Err(message) => LineOutput::Error(message),
        })
        .collect()
}

/// One segmented line in the rendering notation.
pub fn segment_line(pipeline: &Pipeline, line: &str, mode: RenderMode) -> Result<String, String> {
    let analysis = pipeline.analyse(line).map_err(|e| e.to_string())?;
    Ok(analysis.segmentation(mode))
}

/// One line's phonemisation: `syllable/ipa/citation-contour` tokens.
pub fn phonemize_line(pipeline: &Pipeline, line: &str) -> Result<String, String> {
    let analysis = pipeline.analyse(line).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for pt in &analysis.tokens {
        if pt.token.is_punctuation() {
            parts.push(pt.token.text.clone());
            continue;
        }
        for (roman, ipa) in pt.roman.iter().zip(&pt.ipa) {
            parts.push(format!("{}/{}/{}", roman.text, ipa.joined(), roman.tone.contour));
        }
    }
    Ok(parts.join(" "))
}

/// One line's bracketed surface-tone contour.
pub fn contour_line(pipeline: &Pipeline, line: &str) -> Result<String, String> {
    let analysis = pipeline.analyse(line).map_err(|e| e.to_string())?;
    Ok(analysis.contour())
}

/// One line's full record as a JSON object.
pub fn record_line(pipeline: &Pipeline, line: &str) -> Result<String, String> {
    let record = pipeline.run(line).map_err(|e| e.to_string())?;
    serde_json::to_string(&record).map_err(|e| e.to_string())
}
