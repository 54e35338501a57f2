//! Rendering: segmentation notation, Chao-letter contours, and model-ready
//! symbol sequences.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::phonemize::PhonemisedToken;
use crate::sandhi::{LdDomain, SurfaceTone};

/// How [`render_segmentation`] spells syllables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// Broad-IPA segments (explicit tone digits preserved).
    Ipa,
    /// The lexicon romanisation as-is.
    Romanised,
}

/// Render a segmentation: tokens separated by spaces, syllables joined with
/// `-` inside one romanisation unit (one lexicon row) and with `=` across
/// units — so known words read `a-b`, inferred or character-by-character
/// material reads `a=b`, and a known sub-word inside a patched word keeps
/// its hyphens. Punctuation tokens pass through verbatim.
pub fn render_segmentation(tokens: &[PhonemisedToken], mode: RenderMode) -> String {
    let mut parts: Vec<String> = Vec::new();
    for pt in tokens {
        if pt.token.is_punctuation() {
            parts.push(pt.token.text.clone());
            continue;
        }
        let mut rendered = String::new();
        for (idx, roman) in pt.roman.iter().enumerate() {
            if idx > 0 {
                let same_unit = roman.unit == pt.roman[idx - 1].unit;
                rendered.push(if same_unit { '-' } else { '=' });
            }
            match mode {
                RenderMode::Romanised => rendered.push_str(&roman.text),
                RenderMode::Ipa => {
                    rendered.push_str(&pt.ipa[idx].joined());
                    if let Some(digit) = roman.explicit_digit() {
                        rendered.push(digit);
                    }
                }
            }
        }
        parts.push(rendered);
    }
    parts.join(" ")
}

/// Render surface tones as bracketed domains of `syllable<pitch digits>`,
/// e.g. `[zã2 he4]`. Punctuation tokens pass through between domains.
pub fn render_contour(
    tokens: &[PhonemisedToken],
    domains: &[LdDomain],
    surface: &[SurfaceTone],
) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut next_domain = 0usize;
    let mut surface_cursor = 0usize;
    for (idx, pt) in tokens.iter().enumerate() {
        if pt.token.is_punctuation() {
            parts.push(pt.token.text.clone());
            continue;
        }
        if next_domain < domains.len() && domains[next_domain].head_token == idx {
            let domain = &domains[next_domain];
            let mut rendered = String::from("[");
            for (k, syl) in domain.syllables.iter().enumerate() {
                if k > 0 {
                    rendered.push(' ');
                }
                rendered.push_str(&syl.ipa.joined());
                rendered.push_str(&surface[surface_cursor + k].pitch);
            }
            rendered.push(']');
            parts.push(rendered);
            surface_cursor += domain.len();
            next_domain += 1;
        }
        // clitic tokens were rendered inside their domain
    }
    parts.join(" ")
}

/// One model-input symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Symbol {
    Ipa(String),
    Tone(u8),
    Blank,
    WordBoundary,
    DomainOpen,
    DomainClose,
}

impl Symbol {
    /// Stable text form: IPA symbols and digits as themselves, `_` for
    /// BLANK, `|` for a word boundary, `⟨`/`⟩` for domain edges.
    pub fn render(&self) -> String {
        match self {
            Symbol::Ipa(s) => s.clone(),
            Symbol::Tone(d) => char::from(b'0' + d).to_string(),
            Symbol::Blank => "_".to_string(),
            Symbol::WordBoundary => "|".to_string(),
            Symbol::DomainOpen => "⟨".to_string(),
            Symbol::DomainClose => "⟩".to_string(),
        }
    }
}

impl core::fmt::Display for Symbol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.render())
    }
}

/// A model-input symbol sequence. With `blank_interleaved` set, the length
/// is odd and every even index holds BLANK.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub symbols: Vec<Symbol>,
    pub blank_interleaved: bool,
}

impl SymbolSequence {
    pub fn rendered(&self) -> Vec<String> {
        self.symbols.iter().map(Symbol::render).collect()
    }
}

/// Emit the model input: per syllable its IPA segments then its surface
/// pitch digits, domain-boundary symbols at domain edges, a word-boundary
/// symbol at token joints inside a domain and for punctuation. With
/// `interleave_blank`, BLANK goes between every pair of adjacent symbols and
/// at both ends.
pub fn emit_symbols(
    tokens: &[PhonemisedToken],
    domains: &[LdDomain],
    surface: &[SurfaceTone],
    interleave_blank: bool,
) -> SymbolSequence {
    let mut symbols: Vec<Symbol> = Vec::new();
    let mut next_domain = 0usize;
    let mut surface_cursor = 0usize;
    for (idx, pt) in tokens.iter().enumerate() {
        if pt.token.is_punctuation() {
            symbols.push(Symbol::WordBoundary);
            continue;
        }
        if next_domain < domains.len() && domains[next_domain].head_token == idx {
            let domain = &domains[next_domain];
            symbols.push(Symbol::DomainOpen);
            for (k, syl) in domain.syllables.iter().enumerate() {
                if k > 0 && syl.token != domain.syllables[k - 1].token {
                    symbols.push(Symbol::WordBoundary);
                }
                for segment in &syl.ipa.segments {
                    symbols.push(Symbol::Ipa(segment.clone()));
                }
                for c in surface[surface_cursor + k].pitch.chars() {
                    symbols.push(Symbol::Tone(c as u8 - b'0'));
                }
            }
            symbols.push(Symbol::DomainClose);
            surface_cursor += domain.len();
            next_domain += 1;
        }
    }
    if interleave_blank {
        let mut interleaved = Vec::with_capacity(symbols.len() * 2 + 1);
        interleaved.push(Symbol::Blank);
        for s in symbols {
            interleaved.push(s);
            interleaved.push(Symbol::Blank);
        }
        symbols = interleaved;
    }
    SymbolSequence {
        symbols,
        blank_interleaved: interleave_blank,
    }
}
