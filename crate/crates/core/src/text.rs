//! Small text utilities shared across the pipeline.

use alloc::string::String;

use unicode_normalization::UnicodeNormalization;

/// Normalize a string to NFC. Applied once at ingestion; every stage after
/// that assumes NFC input.
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// True for characters in the unified CJK ideograph ranges (the same ranges
/// a dictionary headword can be written in).
pub fn is_han(c: char) -> bool {
    matches!(u32::from(c),
        0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2B73F
        | 0x2B740..=0x2B81F
        | 0x2B820..=0x2CEAF
        | 0x2CEB0..=0x2EBEF
        | 0x2F800..=0x2FA1F)
}

/// Natural log, exp, sqrt via libm so the crate behaves identically with and
/// without `std`.
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nfc_composes() {
        // e + combining acute -> precomposed
        assert_eq!(nfc("e\u{0301}"), "\u{00e9}");
    }

    #[test]
    fn han_ranges() {
        assert!(is_han('上'));
        assert!(is_han('海'));
        assert!(is_han('\u{20000}'));
        assert!(!is_han('。'));
        assert!(!is_han('a'));
        assert!(!is_han(' '));
    }
}
