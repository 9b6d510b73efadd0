//! Standard MIDI File ingestion.
//!
//! Parses SMF format 0 and 1 files with metrical (PPQN) timing into a flat,
//! sorted note-event list plus the time-signature map, and derives the beat
//! grid that the chroma stage frames notes against. Tempo is irrelevant
//! here: all timing stays in ticks and beats, never seconds.

use num_rational::Ratio;
use thiserror::Error;

/// Frames-per-beat multiplier. `1` frames at the beat, `1/2` at half a beat,
/// `4` at four beats.
pub type UnitBeats = Ratio<u64>;

#[derive(Debug, Error)]
pub enum MidiError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("SMPTE timing is not supported")]
    SmpteTimingUnsupported,
    #[error("unsupported SMF format {0}")]
    UnsupportedFormat(u16),
    #[error("no time-signature event in any track")]
    NoTimeSignature,
    #[error("unsupported time signature {numerator}/{denominator}")]
    UnsupportedTimeSignature { numerator: u32, denominator: u32 },
    #[error("track {track}: {reason}")]
    MalformedTrack { track: usize, reason: String },
    #[error("time unit rounds to zero ticks")]
    ZeroUnit,
}

/// One sounding note, flattened out of the on/off event stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteEvent {
    pub pitch: u8,
    pub onset: u64,
    pub duration: u64,
    pub channel: u8,
    pub track: u16,
}

impl NoteEvent {
    pub fn end(&self) -> u64 {
        self.onset + self.duration
    }

    /// Pitch class under octave folding (0 = C .. 11 = B).
    pub fn pitch_class(&self) -> u8 {
        self.pitch % 12
    }
}

/// A stretch of the piece governed by one time signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeSignatureSegment {
    pub start_tick: u64,
    pub numerator: u32,
    pub denominator: u32,
}

/// Counters for recoverable oddities found while parsing; the pipeline
/// surfaces them as per-piece warnings rather than rejecting the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseWarnings {
    /// Note-ons never closed; they were ended at end-of-track.
    pub dangling_note_ons: u32,
    /// Note-offs with no open note; dropped.
    pub stray_note_offs: u32,
    /// Notes whose off landed on their onset tick; dropped (zero duration).
    pub zero_duration_notes: u32,
}

impl ParseWarnings {
    pub fn any(&self) -> bool {
        self.dangling_note_ons > 0 || self.stray_note_offs > 0 || self.zero_duration_notes > 0
    }
}

/// Parsed piece: note events sorted by (onset, pitch, channel), the
/// time-signature map starting at tick 0, and the header tick resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceScore {
    pub ticks_per_quarter: u32,
    pub notes: Vec<NoteEvent>,
    pub signatures: Vec<TimeSignatureSegment>,
    pub source_id: String,
    pub warnings: ParseWarnings,
}

impl PieceScore {
    /// Tick of the last note end, 0 for an empty piece.
    pub fn end_tick(&self) -> u64 {
        self.notes.iter().map(NoteEvent::end).max().unwrap_or(0)
    }

    /// Drop channel-10 (index 9) percussion events.
    pub fn drop_percussion(&mut self) {
        self.notes.retain(|n| n.channel != 9);
    }
}

/// The frame tiling of a piece: `boundaries` has one entry per frame edge
/// (so `boundaries.len() - 1` frames) and `nominal_ticks[i]` is the full
/// time-unit length of frame `i` in ticks. A partial frame (at the end of
/// the piece, or cut short by a signature change) keeps the nominal length
/// of its governing segment; chroma weights are normalized by it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameGrid {
    pub boundaries: Vec<u64>,
    pub nominal_ticks: Vec<u64>,
    pub unit_beats: UnitBeats,
}

impl FrameGrid {
    pub fn frame_count(&self) -> usize {
        self.boundaries.len().saturating_sub(1)
    }
}

/// Tick length of one time unit under `segment`: the beat is the note value
/// of the signature denominator (quarter in x/4, eighth in x/8), scaled by
/// `unit_beats` and rounded half-up.
pub fn ticks_per_unit(
    segment: &TimeSignatureSegment,
    ticks_per_quarter: u32,
    unit_beats: UnitBeats,
) -> Result<u64, MidiError> {
    let num = u64::from(ticks_per_quarter) * 4 * unit_beats.numer();
    let den = u64::from(segment.denominator) * unit_beats.denom();
    let ticks = (2 * num + den) / (2 * den);
    if ticks == 0 {
        return Err(MidiError::ZeroUnit);
    }
    Ok(ticks)
}

/// Tile the piece into frames of one time unit each, restarting the tiling
/// at every signature change and extending past the last note end so the
/// grid covers the whole piece.
pub fn build_frame_grid(score: &PieceScore, unit_beats: UnitBeats) -> Result<FrameGrid, MidiError> {
    assert!(
        !score.signatures.is_empty(),
        "PieceScore invariant: signatures non-empty"
    );
    let end = score.end_tick();
    let mut boundaries = vec![0u64];
    let mut nominal_ticks = Vec::new();

    let mut tick = 0u64;
    while tick < end {
        let seg_idx = match score.signatures.iter().rposition(|s| s.start_tick <= tick) {
            Some(i) => i,
            None => 0,
        };
        let segment = &score.signatures[seg_idx];
        let unit = ticks_per_unit(segment, score.ticks_per_quarter, unit_beats)?;
        let seg_end = score
            .signatures
            .get(seg_idx + 1)
            .map(|s| s.start_tick)
            .unwrap_or(u64::MAX);
        let next = (tick + unit).min(seg_end);
        boundaries.push(next);
        nominal_ticks.push(unit);
        tick = next;
    }

    Ok(FrameGrid {
        boundaries,
        nominal_ticks,
        unit_beats,
    })
}

/// Parse an SMF image into a [`PieceScore`].
///
/// Format 0 and 1 only; metrical division only. Note-on with velocity 0 is
/// note-off. Notes are closed FIFO per (track, channel, pitch); note-ons
/// still open at end-of-track are closed there and counted as warnings.
/// Every meta and sysex event other than time signature and end-of-track is
/// skipped.
pub fn parse_smf(bytes: &[u8], source_id: &str) -> Result<PieceScore, MidiError> {
    let mut cursor = Cursor::new(bytes);
    let header = parse_header(&mut cursor)?;

    let mut notes = Vec::new();
    let mut raw_signatures: Vec<(u64, u32, u32)> = Vec::new();
    let mut warnings = ParseWarnings::default();

    let mut tracks_seen = 0usize;
    while tracks_seen < header.n_tracks {
        let chunk_type = match cursor.take(4) {
            Some(t) => t,
            None => break, // fewer chunks than the header promised; tolerate
        };
        let chunk_len = cursor
            .take(4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
            .ok_or_else(|| MidiError::MalformedHeader("truncated chunk length".into()))?;
        let chunk = cursor.take(chunk_len).ok_or(MidiError::MalformedTrack {
            track: tracks_seen,
            reason: "chunk shorter than declared length".into(),
        })?;
        if chunk_type != b"MTrk" {
            continue; // unknown chunk types are skipped per the SMF spec
        }
        parse_track(
            chunk,
            tracks_seen as u16,
            &mut notes,
            &mut raw_signatures,
            &mut warnings,
        )?;
        tracks_seen += 1;
    }

    if raw_signatures.is_empty() {
        return Err(MidiError::NoTimeSignature);
    }
    let signatures = normalize_signatures(raw_signatures);

    notes.sort_by_key(|n| (n.onset, n.pitch, n.channel, n.track, n.duration));

    Ok(PieceScore {
        ticks_per_quarter: header.ticks_per_quarter,
        notes,
        signatures,
        source_id: source_id.to_string(),
        warnings,
    })
}

struct Header {
    n_tracks: usize,
    ticks_per_quarter: u32,
}

fn parse_header(cursor: &mut Cursor) -> Result<Header, MidiError> {
    let magic = cursor
        .take(4)
        .ok_or_else(|| MidiError::MalformedHeader("file shorter than a header".into()))?;
    if magic != b"MThd" {
        return Err(MidiError::MalformedHeader("missing MThd chunk".into()));
    }
    let len = cursor
        .take(4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]) as usize)
        .ok_or_else(|| MidiError::MalformedHeader("truncated header length".into()))?;
    if len < 6 {
        return Err(MidiError::MalformedHeader(format!(
            "header length {len}, expected at least 6"
        )));
    }
    let body = cursor
        .take(len)
        .ok_or_else(|| MidiError::MalformedHeader("header shorter than declared".into()))?;
    let format = u16::from_be_bytes([body[0], body[1]]);
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let n_tracks = u16::from_be_bytes([body[2], body[3]]) as usize;
    let division = u16::from_be_bytes([body[4], body[5]]);
    if division & 0x8000 != 0 {
        return Err(MidiError::SmpteTimingUnsupported);
    }
    if division == 0 {
        return Err(MidiError::MalformedHeader("zero ticks per quarter".into()));
    }
    Ok(Header {
        n_tracks,
        ticks_per_quarter: u32::from(division),
    })
}

fn parse_track(
    chunk: &[u8],
    track: u16,
    notes: &mut Vec<NoteEvent>,
    signatures: &mut Vec<(u64, u32, u32)>,
    warnings: &mut ParseWarnings,
) -> Result<(), MidiError> {
    let mut cursor = Cursor::new(chunk);
    let mut tick = 0u64;
    let mut running_status: Option<u8> = None;
    // FIFO per (channel, pitch) within the track
    let mut open: Vec<Vec<u64>> = vec![Vec::new(); 16 * 128];

    let err = |reason: &str| MidiError::MalformedTrack {
        track: track as usize,
        reason: reason.to_string(),
    };

    let mut ended = false;
    while !ended && !cursor.at_end() {
        let delta = cursor.read_vlq().ok_or_else(|| err("truncated delta time"))?;
        tick += u64::from(delta);

        let first = cursor.peek().ok_or_else(|| err("missing status byte"))?;
        let status = if first >= 0x80 {
            cursor.advance(1);
            if first < 0xF0 {
                running_status = Some(first);
            } else {
                running_status = None;
            }
            first
        } else {
            running_status.ok_or_else(|| err("data byte with no running status"))?
        };

        match status & 0xF0 {
            0x80 | 0x90 => {
                let pitch = cursor.read_data_byte().ok_or_else(|| err("truncated note event"))?;
                let velocity = cursor.read_data_byte().ok_or_else(|| err("truncated note event"))?;
                let channel = status & 0x0F;
                let slot = usize::from(channel) * 128 + usize::from(pitch);
                let is_on = (status & 0xF0) == 0x90 && velocity > 0;
                if is_on {
                    open[slot].push(tick);
                } else {
                    match (!open[slot].is_empty()).then(|| open[slot].remove(0)) {
                        Some(onset) if tick > onset => notes.push(NoteEvent {
                            pitch,
                            onset,
                            duration: tick - onset,
                            channel,
                            track,
                        }),
                        Some(_) => warnings.zero_duration_notes += 1,
                        None => warnings.stray_note_offs += 1,
                    }
                }
            }
            0xA0 | 0xB0 | 0xE0 => {
                cursor.read_data_byte().ok_or_else(|| err("truncated channel event"))?;
                cursor.read_data_byte().ok_or_else(|| err("truncated channel event"))?;
            }
            0xC0 | 0xD0 => {
                cursor.read_data_byte().ok_or_else(|| err("truncated channel event"))?;
            }
            0xF0 => match status {
                0xFF => {
                    let meta_type = cursor.next_byte().ok_or_else(|| err("truncated meta event"))?;
                    let len = cursor.read_vlq().ok_or_else(|| err("truncated meta length"))? as usize;
                    let data = cursor.take(len).ok_or_else(|| err("truncated meta data"))?;
                    match meta_type {
                        0x58 => {
                            if data.len() < 2 {
                                return Err(err("time-signature event shorter than 2 bytes"));
                            }
                            let numerator = u32::from(data[0]);
                            let dd = u32::from(data[1]);
                            if numerator == 0 || dd > 5 {
                                return Err(MidiError::UnsupportedTimeSignature {
                                    numerator,
                                    denominator: 1u32 << dd.min(31),
                                });
                            }
                            signatures.push((tick, numerator, 1u32 << dd));
                        }
                        0x2F => ended = true,
                        _ => {}
                    }
                }
                0xF0 | 0xF7 => {
                    let len = cursor.read_vlq().ok_or_else(|| err("truncated sysex length"))? as usize;
                    cursor.take(len).ok_or_else(|| err("truncated sysex data"))?;
                }
                other => return Err(err(&format!("unexpected status byte {other:#04x}"))),
            },
            _ => unreachable!("status high nybble covered above"),
        }
    }

    // Close anything still sounding at end-of-track.
    for (slot, onsets) in open.iter().enumerate() {
        for &onset in onsets {
            warnings.dangling_note_ons += 1;
            if tick > onset {
                notes.push(NoteEvent {
                    pitch: (slot % 128) as u8,
                    onset,
                    duration: tick - onset,
                    channel: (slot / 128) as u8,
                    track,
                });
            } else {
                warnings.zero_duration_notes += 1;
            }
        }
    }
    Ok(())
}

/// Merge per-track signature events into sorted, non-overlapping segments
/// starting at tick 0. The last event at a given tick wins; consecutive
/// identical signatures coalesce; an event after tick 0 is extended back.
fn normalize_signatures(mut raw: Vec<(u64, u32, u32)>) -> Vec<TimeSignatureSegment> {
    raw.sort_by_key(|&(tick, ..)| tick);
    let mut segments: Vec<TimeSignatureSegment> = Vec::new();
    for (tick, numerator, denominator) in raw {
        let seg = TimeSignatureSegment {
            start_tick: tick,
            numerator,
            denominator,
        };
        match segments.last_mut() {
            Some(last) if last.start_tick == tick => *last = seg,
            Some(last) if last.numerator == numerator && last.denominator == denominator => {}
            _ => segments.push(seg),
        }
    }
    if let Some(first) = segments.first_mut() {
        first.start_tick = 0;
    }
    // The backward extension can make the first two segments share tick 0.
    segments.dedup_by(|b, a| a.start_tick == b.start_tick && {
        a.numerator = b.numerator;
        a.denominator = b.denominator;
        true
    });
    segments
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn next_byte(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn read_data_byte(&mut self) -> Option<u8> {
        let b = self.next_byte()?;
        (b < 0x80).then_some(b)
    }

    fn advance(&mut self, n: usize) {
        self.pos += n;
    }

    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return None;
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Some(slice)
    }

    /// Variable-length quantity, at most 4 bytes.
    fn read_vlq(&mut self) -> Option<u32> {
        let mut value = 0u32;
        for _ in 0..4 {
            let b = self.next_byte()?;
            value = (value << 7) | u32::from(b & 0x7F);
            if b & 0x80 == 0 {
                return Some(value);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: u64, d: u64) -> UnitBeats {
        Ratio::new(n, d)
    }

    /// Hand-built format-0 file: tpq 480, 4/4, one C4 quarter note.
    fn minimal_format0(note_off_as_velocity_zero: bool) -> Vec<u8> {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes()); // format 0
        bytes.extend_from_slice(&1u16.to_be_bytes()); // one track
        bytes.extend_from_slice(&480u16.to_be_bytes());

        let mut track = vec![];
        track.extend_from_slice(&[0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08]); // 4/4
        track.extend_from_slice(&[0x00, 0x90, 60, 0x40]); // C4 on
        if note_off_as_velocity_zero {
            track.extend_from_slice(&[0x83, 0x60, 0x90, 60, 0x00]); // delta 480, vel 0
        } else {
            track.extend_from_slice(&[0x83, 0x60, 0x80, 60, 0x40]); // delta 480, off
        }
        track.extend_from_slice(&[0x00, 0xFF, 0x2F, 0x00]);

        bytes.extend_from_slice(b"MTrk");
        bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&track);
        bytes
    }

    #[test]
    fn minimal_file_decodes_one_note() {
        let score = parse_smf(&minimal_format0(false), "fixture").unwrap();
        assert_eq!(score.ticks_per_quarter, 480);
        assert_eq!(
            score.notes,
            vec![NoteEvent {
                pitch: 60,
                onset: 0,
                duration: 480,
                channel: 0,
                track: 0
            }]
        );
        assert_eq!(
            score.signatures,
            vec![TimeSignatureSegment {
                start_tick: 0,
                numerator: 4,
                denominator: 4
            }]
        );
        assert!(!score.warnings.any());
    }

    #[test]
    fn velocity_zero_note_on_is_note_off() {
        let explicit = parse_smf(&minimal_format0(false), "a").unwrap();
        let implied = parse_smf(&minimal_format0(true), "a").unwrap();
        assert_eq!(explicit.notes, implied.notes);
    }

    #[test]
    fn missing_time_signature_is_rejected() {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&1u16.to_be_bytes());
        bytes.extend_from_slice(&480u16.to_be_bytes());
        let track = [
            0x00, 0x90, 60, 0x40, 0x83, 0x60, 0x80, 60, 0x40, 0x00, 0xFF, 0x2F, 0x00,
        ];
        bytes.extend_from_slice(b"MTrk");
        bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&track);
        assert!(matches!(
            parse_smf(&bytes, "x"),
            Err(MidiError::NoTimeSignature)
        ));
    }

    #[test]
    fn bad_magic_is_malformed_header() {
        assert!(matches!(
            parse_smf(b"RIFFxxxx", "x"),
            Err(MidiError::MalformedHeader(_))
        ));
    }

    #[test]
    fn smpte_division_is_rejected() {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&0xE728u16.to_be_bytes()); // -25 fps
        assert!(matches!(
            parse_smf(&bytes, "x"),
            Err(MidiError::SmpteTimingUnsupported)
        ));
    }

    #[test]
    fn running_status_is_honored() {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&1u16.to_be_bytes());
        bytes.extend_from_slice(&480u16.to_be_bytes());
        let track = [
            0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08, //
            0x00, 0x90, 60, 0x40, // C4 on
            0x00, 64, 0x40, // E4 on via running status
            0x83, 0x60, 60, 0x00, // C4 off via running status + vel 0
            0x00, 64, 0x00, // E4 off
            0x00, 0xFF, 0x2F, 0x00,
        ];
        bytes.extend_from_slice(b"MTrk");
        bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&track);
        let score = parse_smf(&bytes, "x").unwrap();
        assert_eq!(score.notes.len(), 2);
        assert!(score.notes.iter().all(|n| n.duration == 480));
    }

    #[test]
    fn dangling_note_on_closes_at_end_of_track() {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&1u16.to_be_bytes());
        bytes.extend_from_slice(&480u16.to_be_bytes());
        let track = [
            0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08, //
            0x00, 0x90, 60, 0x40, // never released
            0x83, 0x60, 0xFF, 0x2F, 0x00, // EOT at tick 480
        ];
        bytes.extend_from_slice(b"MTrk");
        bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&track);
        let score = parse_smf(&bytes, "x").unwrap();
        assert_eq!(score.warnings.dangling_note_ons, 1);
        assert_eq!(score.notes[0].duration, 480);
    }

    #[test]
    fn overlapping_same_pitch_closes_fifo() {
        let mut bytes = vec![];
        bytes.extend_from_slice(b"MThd");
        bytes.extend_from_slice(&6u32.to_be_bytes());
        bytes.extend_from_slice(&0u16.to_be_bytes());
        bytes.extend_from_slice(&1u16.to_be_bytes());
        bytes.extend_from_slice(&480u16.to_be_bytes());
        let track = [
            0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08, //
            0x00, 0x90, 60, 0x40, // first C4 at 0
            0x81, 0x70, 0x90, 60, 0x40, // second C4 at 240
            0x81, 0x70, 0x80, 60, 0x40, // off at 480 -> closes the tick-0 note
            0x83, 0x60, 0x80, 60, 0x40, // off at 960 -> closes the tick-240 note
            0x00, 0xFF, 0x2F, 0x00,
        ];
        bytes.extend_from_slice(b"MTrk");
        bytes.extend_from_slice(&(track.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&track);
        let score = parse_smf(&bytes, "x").unwrap();
        assert_eq!(
            score
                .notes
                .iter()
                .map(|n| (n.onset, n.duration))
                .collect::<Vec<_>>(),
            vec![(0, 480), (240, 720)]
        );
    }

    #[test]
    fn ticks_per_unit_matches_meter() {
        let four_four = TimeSignatureSegment {
            start_tick: 0,
            numerator: 4,
            denominator: 4,
        };
        let three_eight = TimeSignatureSegment {
            start_tick: 0,
            numerator: 3,
            denominator: 8,
        };
        assert_eq!(ticks_per_unit(&four_four, 480, ratio(1, 1)).unwrap(), 480);
        assert_eq!(ticks_per_unit(&three_eight, 480, ratio(1, 1)).unwrap(), 240);
        assert_eq!(ticks_per_unit(&four_four, 480, ratio(4, 1)).unwrap(), 1920);
        assert_eq!(ticks_per_unit(&four_four, 480, ratio(1, 2)).unwrap(), 240);
        assert_eq!(ticks_per_unit(&four_four, 480, ratio(3, 2)).unwrap(), 720);
        assert!(matches!(
            ticks_per_unit(&four_four, 1, ratio(1, 10)),
            Err(MidiError::ZeroUnit)
        ));
    }

    fn score_with(notes: Vec<NoteEvent>, signatures: Vec<TimeSignatureSegment>) -> PieceScore {
        PieceScore {
            ticks_per_quarter: 480,
            notes,
            signatures,
            source_id: "test".into(),
            warnings: ParseWarnings::default(),
        }
    }

    #[test]
    fn grid_tiles_eight_beats() {
        let score = score_with(
            vec![NoteEvent {
                pitch: 60,
                onset: 0,
                duration: 3840,
                channel: 0,
                track: 0,
            }],
            vec![TimeSignatureSegment {
                start_tick: 0,
                numerator: 4,
                denominator: 4,
            }],
        );
        let grid = build_frame_grid(&score, ratio(1, 1)).unwrap();
        assert_eq!(
            grid.boundaries,
            (0..=8).map(|i| i * 480).collect::<Vec<u64>>()
        );
        assert_eq!(grid.frame_count(), 8);
    }

    #[test]
    fn grid_keeps_partial_final_frame() {
        let score = score_with(
            vec![NoteEvent {
                pitch: 60,
                onset: 0,
                duration: 700,
                channel: 0,
                track: 0,
            }],
            vec![TimeSignatureSegment {
                start_tick: 0,
                numerator: 4,
                denominator: 4,
            }],
        );
        let grid = build_frame_grid(&score, ratio(1, 1)).unwrap();
        assert_eq!(grid.boundaries, vec![0, 480, 960]);
        assert_eq!(grid.frame_count(), 2);
        assert!(*grid.boundaries.last().unwrap() >= score.end_tick());
    }

    #[test]
    fn grid_follows_signature_change() {
        // 4/4 -> 3/8 at tick 1920: 480-tick frames before, 240 after.
        let score = score_with(
            vec![NoteEvent {
                pitch: 60,
                onset: 0,
                duration: 2880,
                channel: 0,
                track: 0,
            }],
            vec![
                TimeSignatureSegment {
                    start_tick: 0,
                    numerator: 4,
                    denominator: 4,
                },
                TimeSignatureSegment {
                    start_tick: 1920,
                    numerator: 3,
                    denominator: 8,
                },
            ],
        );
        let grid = build_frame_grid(&score, ratio(1, 1)).unwrap();
        assert_eq!(
            grid.boundaries,
            vec![0, 480, 960, 1440, 1920, 2160, 2400, 2640, 2880]
        );
        assert_eq!(grid.nominal_ticks, vec![480, 480, 480, 480, 240, 240, 240, 240]);
    }

    #[test]
    fn grid_splits_frame_cut_by_signature_change() {
        // change mid-frame at tick 600: the 4/4 frame [480, 600) is partial
        // but keeps nominal length 480.
        let score = score_with(
            vec![NoteEvent {
                pitch: 60,
                onset: 0,
                duration: 1080,
                channel: 0,
                track: 0,
            }],
            vec![
                TimeSignatureSegment {
                    start_tick: 0,
                    numerator: 4,
                    denominator: 4,
                },
                TimeSignatureSegment {
                    start_tick: 600,
                    numerator: 3,
                    denominator: 8,
                },
            ],
        );
        let grid = build_frame_grid(&score, ratio(1, 1)).unwrap();
        assert_eq!(grid.boundaries, vec![0, 480, 600, 840, 1080]);
        assert_eq!(grid.nominal_ticks, vec![480, 480, 240, 240]);
    }

    #[test]
    fn empty_score_yields_zero_frames() {
        let score = score_with(
            vec![],
            vec![TimeSignatureSegment {
                start_tick: 0,
                numerator: 4,
                denominator: 4,
            }],
        );
        let grid = build_frame_grid(&score, ratio(1, 1)).unwrap();
        assert_eq!(grid.frame_count(), 0);
    }

    #[test]
    fn late_first_signature_extends_to_zero() {
        let raw = vec![(960, 3, 4), (1920, 4, 4)];
        let segments = normalize_signatures(raw);
        assert_eq!(segments[0].start_tick, 0);
        assert_eq!(segments[0].numerator, 3);
        assert_eq!(segments.len(), 2);
    }
}
