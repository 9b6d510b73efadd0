//! Harmonic codeword analysis for MIDI corpora.
//!
//! A score is sliced into beat-sized frames; each frame becomes a 12-bit
//! codeword recording which pitch classes sound in it. Pieces are key-found
//! and transposed to a common tonic, composers aggregate into frequency
//! tables, and the library fits Heaps' law across the corpus to measure
//! each composer's vocabulary richness relative to it, alongside entropy,
//! type-token indices, chronological trends, correlation matrices, and the
//! tail behaviour of the codeword-usage distribution.
//!
//! Numeric routines are generic over the scalar via [`real::Real`]
//! (`f32` or `f64`); the aliases at the crate root pin `f64`.

pub mod analysis;
pub mod chroma;
pub mod corpus;
pub mod heaps;
pub mod key;
pub mod midi;
pub mod pipeline;
pub mod real;
pub mod report;
pub mod stats;
pub mod synth;

pub use analysis::{analyze, per_piece_datasets, split_untransposable, Analysis, Level};
pub use chroma::{
    build_chromas, discretize, trim_edge_silence, Chromagram, Codeword, ALPHABET_SIZE,
};
pub use corpus::{
    aggregate, cache_file_name, check_cache_params, load_manifest, parse_cache, parse_unit,
    read_cache, render_cache, render_unit, write_cache, Aggregation, ComposerDataset, CorpusError,
    EncodedPiece, FrequencyTable, ManifestEntry,
};
pub use heaps::{
    correlation_matrix, fit_heaps, fit_powerlaw_tail, fit_trend, log_binned_pmf, richness,
    CorrelationMatrix, CorrelationMethod, HeapsError, DEFAULT_BINS_PER_DECADE, METRIC_LABELS,
    MIN_TAIL_POINTS,
};
pub use key::{average_chroma, find_key, key_histogram, transpose, KeyError, Mode, PieceKey};
pub use midi::{
    build_frame_grid, parse_smf, ticks_per_unit, FrameGrid, MidiError, NoteEvent, ParseWarnings,
    PieceScore, TimeSignatureSegment, UnitBeats,
};
pub use pipeline::{encode_bytes, encode_score, EncodeOutcome, EncodeParams};
pub use report::{
    aggregate_csv, heaps_scatter_tsv, key_histogram_csv, metrics_csv, pmf_tsv, report_json,
    richness_vs_year_tsv, sweep_csv, RunMeta, SweepRow, METRICS_CSV_HEADER,
};
pub use stats::{
    composer_year, entropy, guiraud, herdan, mean_filling, ttr, MetricsRow, StatsError,
};
pub use synth::{
    sample_corpus, write_midi_fixture, zipf_probabilities, FixtureNote, FixtureSpec, SynthError,
    ZipfSpec, GENERATOR_NAME,
};

/// `f64` instantiations of the generic numeric types.
pub type Chroma = chroma::Chroma<f64>;
pub type KeyEstimate = key::KeyEstimate<f64>;
pub type HeapsFit = heaps::HeapsFit<f64>;
pub type TrendFit = heaps::TrendFit<f64>;
pub type LogBinnedPmf = heaps::LogBinnedPmf<f64>;
pub type TailFit = heaps::TailFit<f64>;
