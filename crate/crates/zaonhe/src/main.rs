//! Command-line front end: every pipeline stage and the MOS evaluator, for
//! batch (file) and interactive (stdin/stdout) use.

use std::io::Read;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use zaonhe::config::{Config, OutputFormat};
use zaonhe::load::{build_pipeline, load_ratings};
use zaonhe::{contour_line, phonemize_line, process_lines, record_line, segment_line, LineOutput};
use zaonhe_core::emit::RenderMode;
use zaonhe_core::mos::{mos, pairwise_test, CellSelector, Grouping, Metric, MosTable, METRICS, SENTENCES};
use zaonhe_core::pipeline::Pipeline;

#[derive(Parser)]
#[command(name = "zaonhe", version, about = "Shanghainese TTS text front end")]
struct Cli {
    /// Configuration file (defaults to data/config.toml).
    #[arg(long, global = true, default_value = "data/config.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Input files, one utterance per line; stdin when omitted.
    files: Vec<PathBuf>,
    /// Disable the HMM fallback for unknown spans.
    #[arg(long)]
    no_hmm: bool,
    /// Interleave BLANK between adjacent symbols in emitted sequences.
    #[arg(long)]
    blank: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Word-segment each line and render it (`-` joins syllables within one
    /// lexicon unit, `=` joins the rest).
    Segment {
        #[command(flatten)]
        input: InputArgs,
        /// Render the romanisation instead of broad IPA.
        #[arg(long)]
        roman: bool,
    },
    /// Romanise and IPA-convert each line (`syllable/ipa/contour`).
    Phonemize {
        #[command(flatten)]
        input: InputArgs,
        /// Emit JSON records instead of the compact notation.
        #[arg(long)]
        json: bool,
    },
    /// Render each line's surface-tone contour in bracketed domains.
    Sandhi {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run the full pipeline; one structured record per line.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        /// Print only the Chao-letter contour rendering.
        #[arg(long)]
        contour: bool,
        /// Force JSON records (the default unless the config says otherwise).
        #[arg(long)]
        json: bool,
    },
    /// MOS statistics over a ratings CSV.
    Eval {
        /// Ratings file (`participant,speaker,sentence,metric,score`).
        ratings: PathBuf,
        /// Grouping: speaker, metric, or sentence.
        #[arg(long, value_parser = parse_grouping, default_value = "speaker")]
        by: Grouping,
        /// Welch-test two speakers, e.g. `--test 1:2`.
        #[arg(long, value_parser = parse_test_pair)]
        test: Option<(u8, u8)>,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
    },
}

fn parse_grouping(s: &str) -> Result<Grouping, String> {
    match s {
        "speaker" => Ok(Grouping::Speaker),
        "metric" => Ok(Grouping::SpeakerMetric),
        "sentence" => Ok(Grouping::SpeakerSentence),
        _ => Err("expected one of: speaker, metric, sentence".to_string()),
    }
}

fn parse_test_pair(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| "expected A:B, e.g. 1:2".to_string())?;
    let parse = |x: &str| -> Result<u8, String> {
        x.trim()
            .parse::<u8>()
            .ok()
            .filter(|s| (1..=3).contains(s))
            .ok_or_else(|| format!("'{x}' is not a speaker in 1..=3"))
    };
    Ok((parse(a)?, parse(b)?))
}

fn read_inputs(files: &[PathBuf]) -> Result<String> {
    if files.is_empty() {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("cannot read stdin")?;
        return Ok(buf);
    }
    let mut out = String::new();
    for path in files {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        out.push_str(&text);
        if !text.ends_with('\n') && !text.is_empty() {
            out.push('\n');
        }
    }
    Ok(out)
}

fn load(cli_config: &PathBuf, input: &InputArgs) -> Result<Pipeline> {
    let config = Config::load(cli_config)?;
    let loaded = build_pipeline(&config)?;
    for diagnostic in &loaded.diagnostics {
        eprintln!("warning: {diagnostic}");
    }
    let mut pipeline = loaded.pipeline;
    if input.no_hmm {
        pipeline.use_hmm = false;
    }
    if input.blank {
        pipeline.interleave_blank = true;
    }
    Ok(pipeline)
}

fn emit<F>(input: &InputArgs, f: F) -> Result<()>
where
    F: Fn(&str) -> Result<String, String>,
{
    let text = read_inputs(&input.files)?;
    for (idx, output) in process_lines(&text, f).into_iter().enumerate() {
        match output {
            LineOutput::Line(line) => println!("{line}"),
            LineOutput::Error(message) => {
                println!();
                eprintln!("line {}: {message}", idx + 1);
            }
        }
    }
    Ok(())
}

fn run_eval(ratings: &PathBuf, by: Grouping, test: Option<(u8, u8)>, json: bool) -> Result<()> {
    let load = load_ratings(ratings)?;
    for e in &load.errors {
        eprintln!("warning: {}: {e}", ratings.display());
    }
    for p in &load.dropped_participants {
        eprintln!("warning: participant '{p}' dropped as incomplete");
    }
    if load.records.is_empty() {
        bail!("no complete participants in {}", ratings.display());
    }
    let table = mos(&load.records, by);
    if json {
        println!("{}", serde_json::to_string(&json_table(&table, by))?);
    } else {
        let title = match by {
            Grouping::Speaker => "Overall MOS by speaker (95% CI)",
            Grouping::SpeakerMetric => "MOS by speaker and metric (95% CI)",
            Grouping::SpeakerSentence => "MOS by speaker and sentence (95% CI)",
        };
        print!("{}", zaonhe::evalfmt::render_table(&table, title));
    }
    if let Some((a, b)) = test {
        run_pairwise(&load.records, by, a, b, json)?;
    }
    Ok(())
}

fn json_table(table: &MosTable, by: Grouping) -> serde_json::Value {
    let grouping = match by {
        Grouping::Speaker => "speaker",
        Grouping::SpeakerMetric => "speaker_metric",
        Grouping::SpeakerSentence => "speaker_sentence",
    };
    let cells: Vec<serde_json::Value> = table
        .cells
        .iter()
        .map(|(&(speaker, col), cell)| {
            serde_json::json!({
                "speaker": speaker,
                "column": table.columns[col],
                "mean": cell.mean,
                "ci_halfwidth": cell.ci_halfwidth,
                "n": cell.n,
            })
        })
        .collect();
    serde_json::json!({ "grouping": grouping, "cells": cells })
}

fn run_pairwise(
    records: &[zaonhe_core::mos::RatingRecord],
    by: Grouping,
    a: u8,
    b: u8,
    json: bool,
) -> Result<()> {
    let selectors: Vec<(String, CellSelector, CellSelector)> = match by {
        Grouping::Speaker => vec![(
            "overall".to_string(),
            CellSelector::speaker(a),
            CellSelector::speaker(b),
        )],
        Grouping::SpeakerMetric => METRICS
            .iter()
            .map(|&m| {
                (
                    m.label().to_string(),
                    selector(a, Some(m), None),
                    selector(b, Some(m), None),
                )
            })
            .collect(),
        Grouping::SpeakerSentence => SENTENCES
            .iter()
            .map(|&s| {
                (
                    format!("sentence {s}"),
                    selector(a, None, Some(s)),
                    selector(b, None, Some(s)),
                )
            })
            .collect(),
    };
    for (label, sel_a, sel_b) in selectors {
        let p = pairwise_test(records, &sel_a, &sel_b)?;
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "test": "welch_two_sample_two_sided",
                    "speakers": [a, b],
                    "cell": label,
                    "p_value": p,
                })
            );
        } else {
            println!("Welch two-sample test (two-sided), speakers {a} vs {b}, {label}: p = {p:.4}");
        }
    }
    Ok(())
}

fn selector(speaker: u8, metric: Option<Metric>, sentence: Option<u8>) -> CellSelector {
    CellSelector {
        speaker,
        metric,
        sentence,
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Segment { input, roman } => {
            let pipeline = load(&cli.config, input)?;
            let mode = if *roman {
                RenderMode::Romanised
            } else {
                RenderMode::Ipa
            };
            emit(input, |line| segment_line(&pipeline, line, mode))
        }
        Command::Phonemize { input, json } => {
            let pipeline = load(&cli.config, input)?;
            if *json {
                emit(input, |line| record_line(&pipeline, line))
            } else {
                emit(input, |line| phonemize_line(&pipeline, line))
            }
        }
        Command::Sandhi { input } => {
            let pipeline = load(&cli.config, input)?;
            emit(input, |line| contour_line(&pipeline, line))
        }
        Command::Pipeline {
            input,
            contour,
            json,
        } => {
            let config = Config::load(&cli.config)?;
            let text_output = config.options.output == OutputFormat::Text && !*json;
            let pipeline = load(&cli.config, input)?;
            if *contour {
                emit(input, |line| contour_line(&pipeline, line))
            } else if text_output {
                emit(input, |line| segment_line(&pipeline, line, RenderMode::Ipa))
            } else {
                emit(input, |line| record_line(&pipeline, line))
            }
        }
        Command::Eval {
            ratings,
            by,
            test,
            json,
        } => run_eval(ratings, *by, *test, *json),
    }
}
