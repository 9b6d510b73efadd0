//! Synthetic data: Zipf-distributed codeword corpora for exercising the
//! statistical pipeline, and minimal format-0 MIDI fixtures for exercising
//! the parser and chroma stages.

use crate::chroma::{Codeword, ALPHABET_SIZE};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Name of the generator algorithm, recorded in report headers so runs are
/// reproducible across machines.
pub const GENERATOR_NAME: &str = "ChaCha8";

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("rank exponent gamma must exceed 1, got {0}")]
    BadGamma(f64),
    #[error("note at {position} beats does not land on an integer tick at {ticks_per_quarter} ticks per quarter")]
    UnrepresentableDuration {
        position: Ratio<u64>,
        ticks_per_quarter: u32,
    },
}

/// Parameters of a Zipf-distributed codeword corpus: token probabilities
/// p_r ∝ r^(−gamma) over ranks 1..=vocab_size, rank r mapped to codeword
/// id r−1.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipfSpec {
    pub gamma: f64,
    pub vocab_size: usize,
    pub piece_lengths: Vec<u64>,
    pub seed: u64,
}

/// Normalized rank probabilities for the spec's distribution.
pub fn zipf_probabilities(gamma: f64, vocab_size: usize) -> Result<Vec<f64>, SynthError> {
    if !(gamma > 1.0) {
        return Err(SynthError::BadGamma(gamma));
    }
    assert!(
        (1..=ALPHABET_SIZE).contains(&vocab_size),
        "vocab size must be in 1..=4096"
    );
    let raw: Vec<f64> = (1..=vocab_size).map(|r| (r as f64).powf(-gamma)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / total).collect())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw each piece independently from the Zipf distribution by inverse CDF.
/// Pieces get their own seeds derived from the corpus seed and the piece
/// index, so generation order (or parallelism) cannot change the output.
pub fn sample_corpus(spec: &ZipfSpec) -> Result<Vec<Vec<Codeword>>, SynthError> {
    let probabilities = zipf_probabilities(spec.gamma, spec.vocab_size)?;
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0f64;
    for p in &probabilities {
        acc += p;
        cumulative.push(acc);
    }
    *cumulative.last_mut().unwrap() = 1.0;

    Ok(spec
        .piece_lengths
        .iter()
        .enumerate()
        .map(|(index, &length)| {
            let piece_seed =
                splitmix64(spec.seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let mut rng = ChaCha8Rng::seed_from_u64(piece_seed);
            (0..length)
                .map(|_| {
                    let u = rng.random::<f64>();
                    let rank0 = cumulative.partition_point(|&c| c <= u);
                    Codeword::from_id(rank0.min(spec.vocab_size - 1) as u16)
                })
                .collect()
        })
        .collect())
}

/// One fixture note: pitch plus onset and duration in quarter-note units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixtureNote {
    pub pitch: u8,
    pub onset_beats: Ratio<u64>,
    pub duration_beats: Ratio<u64>,
    pub channel: u8,
}

impl FixtureNote {
    pub fn new(pitch: u8, onset_beats: Ratio<u64>, duration_beats: Ratio<u64>) -> Self {
        FixtureNote {
            pitch,
            onset_beats,
            duration_beats,
            channel: 0,
        }
    }

    pub fn on_channel(mut self, channel: u8) -> Self {
        self.channel = channel;
        self
    }
}

/// A minimal single-track MIDI file description.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub ticks_per_quarter: u32,
    pub numerator: u32,
    pub denominator: u32,
    pub notes: Vec<FixtureNote>,
}

impl FixtureSpec {
    pub fn common_time(notes: Vec<FixtureNote>) -> Self {
        FixtureSpec {
            ticks_per_quarter: 480,
            numerator: 4,
            denominator: 4,
            notes,
        }
    }
}

fn encode_vlq(mut value: u32, out: &mut Vec<u8>) {
    let mut stack = [0u8; 4];
    let mut n = 0;
    loop {
        stack[n] = (value & 0x7F) as u8;
        value >>= 7;
        n += 1;
        if value == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        let byte = stack[i] | if i > 0 { 0x80 } else { 0 };
        out.push(byte);
    }
}

/// Emit a format-0 SMF whose parse reproduces the fixture's note list.
pub fn write_midi_fixture(spec: &FixtureSpec) -> Result<Vec<u8>, SynthError> {
    assert!(spec.denominator.is_power_of_two() && spec.denominator <= 32);
    assert!(spec.numerator >= 1 && spec.numerator <= 255);

    let to_ticks = |beats: Ratio<u64>| -> Result<u64, SynthError> {
        let ticks = beats * Ratio::from_integer(u64::from(spec.ticks_per_quarter));
        if *ticks.denom() != 1 {
            return Err(SynthError::UnrepresentableDuration {
                position: beats,
                ticks_per_quarter: spec.ticks_per_quarter,
            });
        }
        Ok(*ticks.numer())
    };

    // (tick, 0=off/1=on, pitch, channel); offs sort before ons at the same
    // tick so back-to-back repeats of a pitch keep their durations
    let mut events: Vec<(u64, u8, u8, u8)> = Vec::with_capacity(spec.notes.len() * 2);
    for note in &spec.notes {
        assert!(note.duration_beats > Ratio::from_integer(0), "durations must be positive");
        let onset = to_ticks(note.onset_beats)?;
        let end = to_ticks(note.onset_beats + note.duration_beats)?;
        events.push((onset, 1, note.pitch, note.channel));
        events.push((end, 0, note.pitch, note.channel));
    }
    events.sort_unstable();

    let mut track = Vec::new();
    track.extend_from_slice(&[0x00, 0xFF, 0x58, 0x04]);
    track.push(spec.numerator as u8);
    track.push(spec.denominator.trailing_zeros() as u8);
    track.extend_from_slice(&[0x18, 0x08]);

    let mut tick = 0u64;
    for &(at, kind, pitch, channel) in &events {
        encode_vlq((at - tick) as u32, &mut track);
        tick = at;
        let status = if kind == 1 { 0x90 } else { 0x80 } | channel;
        track.extend_from_slice(&[status, pitch, 0x40]);
    }
    track.extend_from_slice(&[0x00, 0xFF, 0x2F, 0x00]);

    let mut bytes = Vec::with_capacity(14 + 8 + track.len());
    bytes.extend_from_slice(b"MThd");
    bytes.extend_from_slice(&6u32.to_be_bytes());
    bytes.extend_from_slice(&0u16.to_be_bytes());
    bytes.extend_from_slice(&1u16.to_be_bytes());
    bytes.extend_from_slice(&(spec.ticks_per_quarter as u16).to_be_bytes());
    bytes.extend_from_slice(b"MTrk");
    bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
    bytes.extend_from_slice(&track);
    Ok(bytes)
}
