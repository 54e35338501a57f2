//! Pipeline configuration: a TOML file naming the data files plus options,
//! with command-line flags layered on top by the caller.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub paths: Paths,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub clitics: Vec<CliticEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub base_lexicon: PathBuf,
    pub overlay_lexicon: Option<PathBuf>,
    pub char_map: PathBuf,
    pub hmm_params: Option<PathBuf>,
    pub ipa_table: PathBuf,
    pub sandhi_table: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub overlay_default_weight: u64,
    pub base_default_weight: u64,
    pub domain_max_len: usize,
    pub use_hmm: bool,
    pub interleave_blank: bool,
    pub output: OutputFormat,
    pub long_domain_policy: LongDomainPolicyName,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            overlay_default_weight: 1000,
            base_default_weight: 1,
            domain_max_len: 8,
            use_hmm: true,
            interleave_blank: false,
            output: OutputFormat::Json,
            long_domain_policy: LongDomainPolicyName::Split,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LongDomainPolicyName {
    Split,
    Error,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliticEntry {
    pub word: String,
    /// Space-separated romanised syllables used when attached; absent keeps
    /// the standalone pronunciation.
    pub cliticised: Option<String>,
}

impl Config {
    /// Load a config file; relative data paths resolve against the file's
    /// directory. Referenced files must exist and numeric settings must be
    /// positive.
    pub fn load(path: &Path) -> Result<Config> {
        let source = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: Config = toml::from_str(&source)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(dir);
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&p);
            }
        };
        resolve(&mut self.paths.base_lexicon);
        if let Some(p) = &mut self.paths.overlay_lexicon {
            resolve(p);
        }
        resolve(&mut self.paths.char_map);
        if let Some(p) = &mut self.paths.hmm_params {
            resolve(p);
        }
        resolve(&mut self.paths.ipa_table);
        resolve(&mut self.paths.sandhi_table);
    }

    fn validate(&self) -> Result<()> {
        let mut required: Vec<&Path> = vec![
            &self.paths.base_lexicon,
            &self.paths.char_map,
            &self.paths.ipa_table,
            &self.paths.sandhi_table,
        ];
        if let Some(p) = &self.paths.overlay_lexicon {
            required.push(p);
        }
        if let Some(p) = &self.paths.hmm_params {
            required.push(p);
        }
        for path in required {
            if !path.is_file() {
                bail!("configured file does not exist: {}", path.display());
            }
        }
        if self.options.domain_max_len == 0 {
            bail!("domain_max_len must be positive");
        }
        if self.options.overlay_default_weight == 0 {
            bail!("overlay_default_weight must be positive");
        }
        Ok(())
    }
}
