//! Chroma extraction and 12-bit codeword coding.
//!
//! A chroma is the per-frame vector of pitch-class durations measured in
//! time units; thresholding it yields a codeword, the 12-bit "word" all
//! vocabulary statistics are built on.

use crate::key::PieceKey;
use crate::midi::{FrameGrid, PieceScore, UnitBeats};
use crate::real::Real;

pub const ALPHABET_SIZE: usize = 4096;

/// Per-frame pitch-class weight vector, index 0 = C .. 11 = B, in units of
/// the frame's nominal length. A single note contributes at most 1 to any
/// frame; simultaneous notes add up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chroma<R> {
    pub weights: [R; 12],
}

impl<R: Real> Chroma<R> {
    pub fn zero() -> Self {
        Self {
            weights: [R::zero(); 12],
        }
    }

    pub fn from_weights(weights: [R; 12]) -> Self {
        Self { weights }
    }
}

impl<R: Real> Default for Chroma<R> {
    fn default() -> Self {
        Self::zero()
    }
}

/// A 12-bit pitch-class set. The id reads the bits MSB-first with C as the
/// most significant bit, so "100010010000" (C, E, G) is id 2192.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Codeword(u16);

impl Codeword {
    pub const EMPTY: Codeword = Codeword(0);

    pub fn from_id(id: u16) -> Codeword {
        assert!((id as usize) < ALPHABET_SIZE, "codeword id out of range");
        Codeword(id)
    }

    pub fn id(self) -> u16 {
        self.0
    }

    pub fn from_pitch_classes<I: IntoIterator<Item = u8>>(classes: I) -> Codeword {
        let mut id = 0u16;
        for pc in classes {
            id |= 1 << (11 - (pc % 12));
        }
        Codeword(id)
    }

    pub fn bit(self, pitch_class: u8) -> bool {
        self.0 >> (11 - (pitch_class % 12)) & 1 == 1
    }

    pub fn pitch_classes(self) -> impl Iterator<Item = u8> {
        (0u8..12).filter(move |&pc| self.bit(pc))
    }

    /// Number of sounding pitch classes (set bits).
    pub fn filling(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Rotate every pitch class p to (p + shift) mod 12.
    pub fn shifted(self, shift: u8) -> Codeword {
        let s = u32::from(shift % 12);
        Codeword((self.0 >> s | self.0 << (12 - s)) & 0x0FFF)
    }

    pub fn bitstring(self) -> String {
        (0u8..12)
            .map(|pc| if self.bit(pc) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Option<Codeword> {
        if s.len() != 12 {
            return None;
        }
        let mut id = 0u16;
        for c in s.chars() {
            id = id << 1
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        Some(Codeword(id))
    }
}

impl std::fmt::Display for Codeword {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.bitstring())
    }
}

/// The codeword sequence of one piece together with the parameters it was
/// produced under.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromagram {
    pub codewords: Vec<Codeword>,
    pub unit_beats: UnitBeats,
    pub threshold: f64,
    pub key: Option<PieceKey>,
    pub transposed: bool,
    pub source_id: String,
}

impl Chromagram {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }
}

/// Apportion each note's duration to the frames it overlaps and fold
/// pitches into pitch classes. Weights are overlap ticks divided by the
/// frame's nominal (full-unit) tick length, so a partial frame is
/// normalized as if it were full.
pub fn build_chromas<R: Real>(score: &PieceScore, grid: &FrameGrid) -> Vec<Chroma<R>> {
    let mut chromas = vec![Chroma::zero(); grid.frame_count()];
    for note in &score.notes {
        let start = note.onset;
        let end = note.end();
        let mut frame = grid.boundaries.partition_point(|&b| b <= start).max(1) - 1;
        while frame < chromas.len() && grid.boundaries[frame] < end {
            let lo = grid.boundaries[frame].max(start);
            let hi = grid.boundaries[frame + 1].min(end);
            if hi > lo {
                let weight = R::of_u64(hi - lo) / R::of_u64(grid.nominal_ticks[frame]);
                chromas[frame].weights[usize::from(note.pitch_class())] += weight;
            }
            frame += 1;
        }
    }
    chromas
}

/// Binarize a chroma: a bit is set where the weight reaches the threshold
/// and is positive (so threshold 0 keeps exact zeros clear).
pub fn discretize<R: Real>(chroma: &Chroma<R>, threshold: R) -> Codeword {
    debug_assert!(threshold >= R::zero() && threshold < R::one());
    Codeword::from_pitch_classes((0u8..12).filter(|&pc| {
        let w = chroma.weights[usize::from(pc)];
        w > R::zero() && w >= threshold
    }))
}

/// Strip leading and trailing runs of the empty codeword. Interior empty
/// codewords are genuine tokens and stay.
pub fn trim_edge_silence(codewords: &[Codeword]) -> &[Codeword] {
    let first = match codewords.iter().position(|c| !c.is_empty()) {
        Some(i) => i,
        None => return &[],
    };
    let last = codewords.iter().rposition(|c| !c.is_empty()).unwrap();
    &codewords[first..=last]
}
