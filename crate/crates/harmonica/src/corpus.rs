//! Corpus bookkeeping: manifests, per-piece chromagram caches, and
//! per-composer aggregation into frequency tables.

use crate::chroma::{Chromagram, Codeword, ALPHABET_SIZE};
use crate::key::PieceKey;
use crate::midi::UnitBeats;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("manifest line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate manifest path: {0}")]
    DuplicatePath(String),
    #[error("composer {0} listed with conflicting years")]
    InconsistentYears(String),
    #[error("corpus mixes transposed and untransposed chromagrams")]
    MixedTranspositionMode,
    #[error("cache file {path}: {reason}")]
    CacheFormatMismatch { path: String, reason: String },
    #[error("cache file {path}: stale {field} (cached {cached}, requested {requested})")]
    StaleParameters {
        path: String,
        field: &'static str,
        cached: String,
        requested: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One manifest row: a MIDI file and the composer it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub composer: String,
    pub birth: i32,
    pub death: i32,
}

/// Parse the corpus manifest (CSV with header `path,composer,birth,death`).
pub fn load_manifest(text: &str) -> Result<Vec<ManifestEntry>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::MalformedRow {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["path", "composer", "birth", "death"] {
        return Err(CorpusError::MalformedRow {
            line: 1,
            reason: "header must be path,composer,birth,death".into(),
        });
    }

    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| CorpusError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |reason: String| CorpusError::MalformedRow { line, reason };

        if record.len() != 4 {
            return Err(row_err(format!("expected 4 fields, got {}", record.len())));
        }
        let path = record[0].to_string();
        let composer = record[1].to_string();
        let birth: i32 = record[2]
            .trim()
            .parse()
            .map_err(|_| row_err(format!("birth year {:?} is not an integer", &record[2])))?;
        let death: i32 = record[3]
            .trim()
            .parse()
            .map_err(|_| row_err(format!("death year {:?} is not an integer", &record[3])))?;
        if composer.is_empty() {
            return Err(row_err("composer is empty".into()));
        }
        if birth >= death {
            return Err(row_err(format!("birth {birth} not before death {death}")));
        }
        if !seen.insert(path.clone()) {
            return Err(CorpusError::DuplicatePath(path));
        }
        entries.push(ManifestEntry {
            path,
            composer,
            birth,
            death,
        });
    }
    Ok(entries)
}

/// Codeword counts n_r for one dataset; L = Σ n_r, V = #{r : n_r > 0}.
#[derive(Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Box<[u64; ALPHABET_SIZE]>,
    tokens: u64,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self {
            counts: Box::new([0; ALPHABET_SIZE]),
            tokens: 0,
        }
    }

    pub fn from_codewords(codewords: &[Codeword]) -> Self {
        let mut table = Self::new();
        for &word in codewords {
            table.add(word);
        }
        table
    }

    pub fn add(&mut self, word: Codeword) {
        self.add_count(word, 1);
    }

    pub fn add_count(&mut self, word: Codeword, n: u64) {
        self.counts[usize::from(word.id())] += n;
        self.tokens += n;
    }

    pub fn merge(&mut self, other: &FrequencyTable) {
        for (slot, &count) in self.counts.iter_mut().zip(other.counts.iter()) {
            *slot += count;
        }
        self.tokens += other.tokens;
    }

    pub fn count(&self, word: Codeword) -> u64 {
        self.counts[usize::from(word.id())]
    }

    /// Token count L.
    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    /// Type count V.
    pub fn types(&self) -> u32 {
        self.counts.iter().filter(|&&c| c > 0).count() as u32
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (Codeword, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(id, &c)| (Codeword::from_id(id as u16), c))
    }

    pub fn is_empty(&self) -> bool {
        self.tokens == 0
    }
}

impl Default for FrequencyTable {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for FrequencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyTable")
            .field("tokens", &self.tokens)
            .field("types", &self.types())
            .finish()
    }
}

/// All pieces of one composer concatenated into a single dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposerDataset {
    pub composer: String,
    pub birth: i32,
    pub death: i32,
    pub pieces: u32,
    pub table: FrequencyTable,
}

/// A manifest entry paired with its encoded chromagram.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedPiece {
    pub entry: ManifestEntry,
    pub chromagram: Chromagram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregation {
    pub datasets: Vec<ComposerDataset>,
    /// Pieces that were empty after trimming; they count toward `pieces`
    /// but contribute no tokens.
    pub empty_pieces: u32,
}

/// Group pieces by composer and sum their frequency tables. Output is
/// sorted by (birth, death, composer) and independent of piece order.
pub fn aggregate(pieces: &[EncodedPiece]) -> Result<Aggregation, CorpusError> {
    let mut mode: Option<bool> = None;
    for piece in pieces {
        if piece.chromagram.is_empty() {
            continue; // transposition is vacuous on an empty sequence
        }
        match mode {
            None => mode = Some(piece.chromagram.transposed),
            Some(m) if m != piece.chromagram.transposed => {
                return Err(CorpusError::MixedTranspositionMode)
            }
            Some(_) => {}
        }
    }

    let mut groups: BTreeMap<String, ComposerDataset> = BTreeMap::new();
    let mut empty_pieces = 0u32;
    for piece in pieces {
        if piece.chromagram.is_empty() {
            empty_pieces += 1;
        }
        let entry = &piece.entry;
        let dataset = groups
            .entry(entry.composer.clone())
            .or_insert_with(|| ComposerDataset {
                composer: entry.composer.clone(),
                birth: entry.birth,
                death: entry.death,
                pieces: 0,
                table: FrequencyTable::new(),
            });
        if dataset.birth != entry.birth || dataset.death != entry.death {
            return Err(CorpusError::InconsistentYears(entry.composer.clone()));
        }
        dataset.pieces += 1;
        for &word in &piece.chromagram.codewords {
            dataset.table.add(word);
        }
    }

    let mut datasets: Vec<ComposerDataset> = groups.into_values().collect();
    datasets.sort_by(|a, b| {
        (a.birth, a.death, &a.composer).cmp(&(b.birth, b.death, &b.composer))
    });
    Ok(Aggregation {
        datasets,
        empty_pieces,
    })
}

/// Cache file name for a manifest path: SHA-256 of the path string.
pub fn cache_file_name(source_path: &str) -> String {
    let digest = Sha256::digest(source_path.as_bytes());
    let mut name = String::with_capacity(68);
    for byte in digest {
        name.push_str(&format!("{byte:02x}"));
    }
    name.push_str(".cgm");
    name
}

pub fn render_unit(unit: UnitBeats) -> String {
    if *unit.denom() == 1 {
        format!("{}", unit.numer())
    } else {
        format!("{}/{}", unit.numer(), unit.denom())
    }
}

pub fn parse_unit(text: &str) -> Option<UnitBeats> {
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.parse().ok()?, d.parse().ok()?),
        None => (text.parse().ok()?, 1u64),
    };
    if denom == 0 || numer == 0 {
        return None;
    }
    Some(UnitBeats::new(numer, denom))
}

pub fn render_cache(chromagram: &Chromagram) -> String {
    let mut out = String::new();
    out.push_str(&format!("#source={}\n", chromagram.source_id));
    out.push_str(&format!("#unit={}\n", render_unit(chromagram.unit_beats)));
    out.push_str(&format!("#threshold={}\n", chromagram.threshold));
    out.push_str(&format!(
        "#key={}\n",
        chromagram.key.map_or_else(|| "none".to_string(), PieceKey::name)
    ));
    out.push_str(&format!(
        "#shift={}\n",
        chromagram.key.map_or(0, PieceKey::shift)
    ));
    out.push_str(&format!(
        "#transposed={}\n",
        if chromagram.transposed { 1 } else { 0 }
    ));
    for word in &chromagram.codewords {
        out.push_str(&word.bitstring());
        out.push('\n');
    }
    out
}

pub fn write_cache(chromagram: &Chromagram, path: &Path) -> Result<(), CorpusError> {
    std::fs::write(path, render_cache(chromagram))?;
    Ok(())
}

pub fn parse_cache(text: &str, path_label: &str) -> Result<Chromagram, CorpusError> {
    let bad = |reason: String| CorpusError::CacheFormatMismatch {
        path: path_label.to_string(),
        reason,
    };
    let mut lines = text.lines();
    let mut header = |prefix: &'static str| -> Result<String, CorpusError> {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("missing header line {prefix}")))?;
        line.strip_prefix(prefix)
            .map(str::to_string)
            .ok_or_else(|| bad(format!("expected header {prefix}, found {line:?}")))
    };

    let source_id = header("#source=")?;
    let unit_text = header("#unit=")?;
    let threshold_text = header("#threshold=")?;
    let key_text = header("#key=")?;
    let shift_text = header("#shift=")?;
    let transposed_text = header("#transposed=")?;

    let unit_beats =
        parse_unit(&unit_text).ok_or_else(|| bad(format!("bad unit {unit_text:?}")))?;
    let threshold: f64 = threshold_text
        .parse()
        .map_err(|_| bad(format!("bad threshold {threshold_text:?}")))?;
    let key = match key_text.as_str() {
        "none" => None,
        name => Some(
            PieceKey::from_name(name).ok_or_else(|| bad(format!("bad key name {name:?}")))?,
        ),
    };
    let shift: u8 = shift_text
        .parse()
        .map_err(|_| bad(format!("bad shift {shift_text:?}")))?;
    if shift != key.map_or(0, PieceKey::shift) {
        return Err(bad(format!("shift {shift} inconsistent with key {key_text}")));
    }
    let transposed = match transposed_text.as_str() {
        "0" => false,
        "1" => true,
        other => return Err(bad(format!("bad transposed flag {other:?}"))),
    };
    if transposed && key.is_none() {
        return Err(bad("transposed without a key".into()));
    }

    let mut codewords = Vec::new();
    for line in lines {
        let word = Codeword::from_bitstring(line)
            .ok_or_else(|| bad(format!("bad codeword line {line:?}")))?;
        codewords.push(word);
    }

    Ok(Chromagram {
        codewords,
        unit_beats,
        threshold,
        key,
        transposed,
        source_id,
    })
}

pub fn read_cache(path: &Path) -> Result<Chromagram, CorpusError> {
    let text = std::fs::read_to_string(path)?;
    parse_cache(&text, &path.display().to_string())
}

/// Verify a cached chromagram was produced under the requested parameters.
/// An untransposed cache entry with no key is acceptable under transpose
/// mode: it marks a piece whose key is undefined.
pub fn check_cache_params(
    chromagram: &Chromagram,
    path_label: &str,
    unit_beats: UnitBeats,
    threshold: f64,
    transpose: bool,
) -> Result<(), CorpusError> {
    let stale = |field: &'static str, cached: String, requested: String| {
        Err(CorpusError::StaleParameters {
            path: path_label.to_string(),
            field,
            cached,
            requested,
        })
    };
    if chromagram.unit_beats != unit_beats {
        return stale(
            "unit",
            render_unit(chromagram.unit_beats),
            render_unit(unit_beats),
        );
    }
    if chromagram.threshold != threshold {
        return stale(
            "threshold",
            chromagram.threshold.to_string(),
            threshold.to_string(),
        );
    }
    let mode_matches = if transpose {
        chromagram.transposed || chromagram.key.is_none()
    } else {
        !chromagram.transposed
    };
    if !mode_matches {
        return stale(
            "transposition",
            chromagram.transposed.to_string(),
            transpose.to_string(),
        );
    }
    Ok(())
}
