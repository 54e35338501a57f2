//! Core text processing for a Shanghainese speech-synthesis front end.
//!
//! The pipeline turns raw character text into word-segmented, phonemised,
//! tone-sandhi-annotated symbol sequences:
//!
//! 1. [`lexicon`] — pronunciation/frequency dictionary with a prefix index,
//!    plus simplified→traditional character conversion;
//! 2. [`segment`] — maximum-probability word segmentation over a DAG of
//!    dictionary matches, with an HMM/Viterbi fallback for unknown spans;
//! 3. [`phonemize`] — romanisation, tone-category derivation, and broad-IPA
//!    conversion;
//! 4. [`sandhi`] — left-dominant sandhi domain formation (with clitic
//!    attachment) and surface-tone computation from a pattern table;
//! 5. [`emit`] — rendering in segmentation/contour notations and as
//!    model-ready symbol sequences;
//! 6. [`pipeline`] — the stages wired end to end.
//!
//! [`mos`] is a small, independent evaluator for MOS questionnaire
//! statistics (means, 95% confidence intervals, Welch tests).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature is
//! on by default. All tables and dictionaries are parsed from in-memory
//! strings here; file I/O lives in the companion `zaonhe` crate.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod emit;
pub mod lexicon;
pub mod mos;
pub mod phonemize;
pub mod pipeline;
pub mod sandhi;
pub mod segment;
pub mod stats;
pub mod text;

pub use lexicon::RowError;
