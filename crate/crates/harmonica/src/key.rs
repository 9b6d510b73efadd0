//! Key estimation and transposition.
//!
//! Krumhansl-Schmuckler key finding: correlate the piece's average
//! discretized chroma against all 24 rotations of the empirical major and
//! minor key profiles, then rotate pitch classes so major keys land on
//! C major and minor keys on A minor.

use crate::chroma::{Chromagram, Codeword};
use crate::real::Real;
use thiserror::Error;

/// Krumhansl-Kessler probe-tone ratings, index 0 = tonic.
pub const MAJOR_PROFILE: [f64; 12] = [
    6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88,
];
pub const MINOR_PROFILE: [f64; 12] = [
    6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17,
];

const PITCH_NAMES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("piece has no codewords after trimming")]
    EmptyPiece,
    #[error("average chroma has zero variance; key undefined")]
    ZeroVariance,
    #[error("chromagram is already transposed")]
    AlreadyTransposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Major,
    Minor,
}

/// A detected key: mode plus tonic pitch class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PieceKey {
    pub mode: Mode,
    pub tonic: u8,
}

impl PieceKey {
    /// 0..11 = C..B major, 12..23 = C..B minor.
    pub fn index(self) -> u8 {
        match self.mode {
            Mode::Major => self.tonic,
            Mode::Minor => self.tonic + 12,
        }
    }

    pub fn from_index(index: u8) -> Option<PieceKey> {
        match index {
            0..=11 => Some(PieceKey {
                mode: Mode::Major,
                tonic: index,
            }),
            12..=23 => Some(PieceKey {
                mode: Mode::Minor,
                tonic: index - 12,
            }),
            _ => None,
        }
    }

    /// Rotation that maps this key's tonic to C (major) or A (minor).
    pub fn shift(self) -> u8 {
        match self.mode {
            Mode::Major => (12 - self.tonic) % 12,
            Mode::Minor => (21 - self.tonic) % 12,
        }
    }

    pub fn name(self) -> String {
        let suffix = match self.mode {
            Mode::Major => "maj",
            Mode::Minor => "min",
        };
        format!("{}{}", PITCH_NAMES[usize::from(self.tonic)], suffix)
    }

    pub fn from_name(name: &str) -> Option<PieceKey> {
        let (pitch, mode) = if let Some(p) = name.strip_suffix("maj") {
            (p, Mode::Major)
        } else if let Some(p) = name.strip_suffix("min") {
            (p, Mode::Minor)
        } else {
            return None;
        };
        let tonic = PITCH_NAMES.iter().position(|&n| n == pitch)? as u8;
        Some(PieceKey { mode, tonic })
    }
}

/// Key finding result: the winning key and its profile correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyEstimate<R> {
    pub key: PieceKey,
    pub correlation: R,
}

/// Component i = fraction of codewords with bit i set.
pub fn average_chroma<R: Real>(codewords: &[Codeword]) -> Result<[R; 12], KeyError> {
    if codewords.is_empty() {
        return Err(KeyError::EmptyPiece);
    }
    let n = R::of_usize(codewords.len());
    let mut avg = [R::zero(); 12];
    for (pc, slot) in avg.iter_mut().enumerate() {
        let count = codewords.iter().filter(|w| w.bit(pc as u8)).count();
        *slot = R::of_usize(count) / n;
    }
    Ok(avg)
}

/// Pick the (mode, tonic) whose rotated profile correlates best with the
/// average chroma. Ties break major before minor, then lowest tonic.
pub fn find_key<R: Real>(avg: &[R; 12]) -> Result<KeyEstimate<R>, KeyError> {
    let (lo, hi) = avg
        .iter()
        .fold((avg[0], avg[0]), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    if lo == hi {
        return Err(KeyError::ZeroVariance);
    }

    let mut best: Option<KeyEstimate<R>> = None;
    for mode in [Mode::Major, Mode::Minor] {
        let profile = match mode {
            Mode::Major => &MAJOR_PROFILE,
            Mode::Minor => &MINOR_PROFILE,
        };
        for tonic in 0u8..12 {
            let mut rotated = [R::zero(); 12];
            for (pc, slot) in rotated.iter_mut().enumerate() {
                *slot = R::of_f64(profile[(pc + 12 - usize::from(tonic)) % 12]);
            }
            let correlation = pearson12(avg, &rotated);
            let candidate = KeyEstimate {
                key: PieceKey { mode, tonic },
                correlation,
            };
            if best.map_or(true, |b| correlation > b.correlation) {
                best = Some(candidate);
            }
        }
    }
    Ok(best.expect("24 candidates examined"))
}

fn pearson12<R: Real>(x: &[R; 12], y: &[R; 12]) -> R {
    let n = R::of_usize(12);
    let mx = x.iter().fold(R::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(R::zero(), |a, &v| a + v) / n;
    let mut sxy = R::zero();
    let mut sxx = R::zero();
    let mut syy = R::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    sxy / (sxx * syy).sqrt()
}

/// Rotate every codeword by the key's shift and mark the chromagram
/// transposed. Length and type counts are preserved (bijective relabeling).
pub fn transpose(mut chromagram: Chromagram, key: PieceKey) -> Result<Chromagram, KeyError> {
    if chromagram.transposed {
        return Err(KeyError::AlreadyTransposed);
    }
    let shift = key.shift();
    for word in &mut chromagram.codewords {
        *word = word.shifted(shift);
    }
    chromagram.key = Some(key);
    chromagram.transposed = true;
    Ok(chromagram)
}

/// Piece counts per key index (0..23).
pub fn key_histogram<I: IntoIterator<Item = PieceKey>>(keys: I) -> [u64; 24] {
    let mut counts = [0u64; 24];
    for key in keys {
        counts[usize::from(key.index())] += 1;
    }
    counts
}
