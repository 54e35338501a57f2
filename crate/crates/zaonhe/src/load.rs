//! File loading: read the configured data files, parse them with the core
//! routines, and assemble a ready-to-run pipeline.

use std::path::Path;

use anyhow::{bail, Context, Result};
use zaonhe_core::lexicon::{parse_lexicon_tsv, CharMapping, Lexicon};
use zaonhe_core::mos::{parse_ratings_csv, RatingsLoad};
use zaonhe_core::phonemize::IpaTable;
use zaonhe_core::pipeline::{LongDomainPolicy, Pipeline};
use zaonhe_core::sandhi::{CliticRule, SandhiTable};
use zaonhe_core::segment::HmmParams;

use crate::config::{Config, LongDomainPolicyName};

/// A built pipeline plus the row-level diagnostics collected while loading.
pub struct LoadedPipeline {
    pub pipeline: Pipeline,
    pub diagnostics: Vec<String>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Load one lexicon file; row errors become printable diagnostics.
pub fn load_lexicon(path: &Path, default_weight: u64) -> Result<(Lexicon, Vec<String>)> {
    let source = read(path)?;
    let load = parse_lexicon_tsv(&source, default_weight);
    let diagnostics = load
        .errors
        .iter()
        .map(|e| format!("{}: {e}", path.display()))
        .collect();
    Ok((load.lexicon, diagnostics))
}

/// Load the ratings CSV for the evaluator.
pub fn load_ratings(path: &Path) -> Result<RatingsLoad> {
    let source = read(path)?;
    parse_ratings_csv(&source).with_context(|| format!("cannot parse {}", path.display()))
}

/// Read every configured file and build the pipeline.
pub fn build_pipeline(config: &Config) -> Result<LoadedPipeline> {
    let mut diagnostics = Vec::new();

    let (base, diags) = load_lexicon(&config.paths.base_lexicon, config.options.base_default_weight)?;
    diagnostics.extend(diags);
    let lexicon = match &config.paths.overlay_lexicon {
        Some(path) => {
            let (overlay, diags) = load_lexicon(path, config.options.overlay_default_weight)?;
            diagnostics.extend(diags);
            Lexicon::merge_weights(&base, &overlay)
        }
        None => base,
    };

    let char_map_src = read(&config.paths.char_map)?;
    let (char_map, errors) = CharMapping::parse_tsv(&char_map_src);
    diagnostics.extend(
        errors
            .iter()
            .map(|e| format!("{}: {e}", config.paths.char_map.display())),
    );

    let hmm = match &config.paths.hmm_params {
        Some(path) => {
            let source = read(path)?;
            Some(HmmParams::parse(&source).with_context(|| format!("cannot parse {}", path.display()))?)
        }
        None => None,
    };

    let ipa_src = read(&config.paths.ipa_table)?;
    let (ipa_table, errors) = IpaTable::parse_tsv(&ipa_src);
    diagnostics.extend(
        errors
            .iter()
            .map(|e| format!("{}: {e}", config.paths.ipa_table.display())),
    );

    let sandhi_src = read(&config.paths.sandhi_table)?;
    let (mut sandhi_table, errors) = SandhiTable::parse_tsv(&sandhi_src)
        .with_context(|| format!("cannot load {}", config.paths.sandhi_table.display()))?;
    diagnostics.extend(
        errors
            .iter()
            .map(|e| format!("{}: {e}", config.paths.sandhi_table.display())),
    );
    if sandhi_table.max_len < config.options.domain_max_len {
        bail!(
            "sandhi table covers domains up to {} syllables, domain_max_len asks for {}",
            sandhi_table.max_len,
            config.options.domain_max_len
        );
    }
    sandhi_table.max_len = config.options.domain_max_len;

    let pipeline = Pipeline {
        lexicon,
        char_map,
        hmm,
        ipa_table,
        sandhi_table,
        clitics: config
            .clitics
            .iter()
            .map(|c| CliticRule {
                word: c.word.clone(),
                cliticised: c.cliticised.clone(),
            })
            .collect(),
        use_hmm: config.options.use_hmm,
        interleave_blank: config.options.interleave_blank,
        long_domain_policy: match config.options.long_domain_policy {
            LongDomainPolicyName::Split => LongDomainPolicy::Split,
            LongDomainPolicyName::Error => LongDomainPolicy::Error,
        },
    };
    Ok(LoadedPipeline {
        pipeline,
        diagnostics,
    })
}
