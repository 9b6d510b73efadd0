//! End-to-end encoding of one piece: parse, frame, chromatize, discretize,
//! trim, key-find, transpose.

use crate::chroma::{build_chromas, discretize, trim_edge_silence, Chroma, Chromagram};
use crate::key::{average_chroma, find_key, transpose, KeyError, KeyEstimate};
use crate::midi::{build_frame_grid, parse_smf, MidiError, ParseWarnings, PieceScore, UnitBeats};

/// Encoding parameters; defaults are one beat per frame, threshold 0.1,
/// transposition on, percussion kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodeParams {
    pub unit_beats: UnitBeats,
    pub threshold: f64,
    pub transpose: bool,
    pub drop_percussion: bool,
}

impl Default for EncodeParams {
    fn default() -> Self {
        EncodeParams {
            unit_beats: UnitBeats::new(1, 1),
            threshold: 0.1,
            transpose: true,
            drop_percussion: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOutcome {
    pub chromagram: Chromagram,
    pub parse_warnings: ParseWarnings,
    /// Detected key with its profile correlation, when one was found.
    pub key_estimate: Option<KeyEstimate<f64>>,
    /// Non-empty piece whose average chroma had zero variance: no key,
    /// passed through untransposed.
    pub untransposable: bool,
}

pub fn encode_bytes(
    bytes: &[u8],
    source_id: &str,
    params: &EncodeParams,
) -> Result<EncodeOutcome, MidiError> {
    let score = parse_smf(bytes, source_id)?;
    encode_score(score, params)
}

pub fn encode_score(
    mut score: PieceScore,
    params: &EncodeParams,
) -> Result<EncodeOutcome, MidiError> {
    if params.drop_percussion {
        score.drop_percussion();
    }
    let grid = build_frame_grid(&score, params.unit_beats)?;
    let chromas: Vec<Chroma<f64>> = build_chromas(&score, &grid);
    let discretized: Vec<_> = chromas
        .iter()
        .map(|c| discretize(c, params.threshold))
        .collect();

    let mut chromagram = Chromagram {
        codewords: trim_edge_silence(&discretized).to_vec(),
        unit_beats: params.unit_beats,
        threshold: params.threshold,
        key: None,
        transposed: false,
        source_id: score.source_id,
    };

    let mut key_estimate = None;
    let mut untransposable = false;
    if !chromagram.is_empty() {
        match average_chroma::<f64>(&chromagram.codewords).and_then(|avg| find_key(&avg)) {
            Ok(estimate) => {
                key_estimate = Some(estimate);
                if params.transpose {
                    chromagram =
                        transpose(chromagram, estimate.key).expect("freshly encoded chromagram");
                } else {
                    chromagram.key = Some(estimate.key);
                }
            }
            Err(KeyError::ZeroVariance) => untransposable = true,
            Err(other) => unreachable!("non-empty piece cannot fail with {other}"),
        }
    }

    Ok(EncodeOutcome {
        chromagram,
        parse_warnings: score.warnings,
        key_estimate,
        untransposable,
    })
}
