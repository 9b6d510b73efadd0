use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use harmonica::key::{Mode, PieceKey};
use harmonica::{
    aggregate, aggregate_csv, analyze, cache_file_name, check_cache_params, encode_bytes,
    fit_heaps, heaps_scatter_tsv, key_histogram, key_histogram_csv, load_manifest, metrics_csv,
    per_piece_datasets, pmf_tsv, read_cache, report_json, richness_vs_year_tsv,
    sample_corpus, split_untransposable, sweep_csv, write_cache, Chromagram, ComposerDataset,
    EncodeParams, EncodedPiece, Level, ManifestEntry, RunMeta, SweepRow, UnitBeats,
    ZipfSpec, DEFAULT_BINS_PER_DECADE, GENERATOR_NAME,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "harmonica",
    version,
    about = "MIDI corpora as 12-bit harmonic codewords: encoding, Heaps'-law fits, and vocabulary-richness reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and encode every manifest piece into the cache
    Encode(EncodeCmd),
    /// Aggregate the corpus and write metrics, report, and plot data
    Analyze(AnalyzeCmd),
    /// Fit the corpus across a threshold × unit grid
    Sweep(SweepCmd),
    /// Generate a synthetic Zipf corpus straight into the cache
    Synth(SynthCmd),
    /// Histogram of detected keys across the corpus
    Keys(KeysCmd),
}

#[derive(Args, Clone)]
struct CorpusOpts {
    /// Manifest CSV listing path,composer,birth,death
    #[arg(long)]
    manifest: PathBuf,
    /// Directory holding encoded-piece caches
    #[arg(long, env = "HARMONICA_CACHE")]
    cache: PathBuf,
}

#[derive(Args, Clone)]
struct EncodingOpts {
    /// Frame length in beats: an integer, a fraction like 3/2, or a decimal
    #[arg(long, default_value = "1", value_parser = parse_unit_arg)]
    unit: UnitBeats,
    /// Per-frame pitch-class weight required to set a codeword bit
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    /// Keep pieces in their original keys (keys are still detected and recorded)
    #[arg(long)]
    no_transpose: bool,
    /// Drop channel-10 percussion notes before framing
    #[arg(long)]
    drop_percussion: bool,
}

impl EncodingOpts {
    fn params(&self) -> EncodeParams {
        EncodeParams {
            unit_beats: self.unit,
            threshold: self.threshold,
            transpose: !self.no_transpose,
            drop_percussion: self.drop_percussion,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Composer,
    Piece,
}

impl LevelArg {
    fn level(self) -> Level {
        match self {
            LevelArg::Composer => Level::Composer,
            LevelArg::Piece => Level::Piece,
        }
    }
}

#[derive(Args)]
struct EncodeCmd {
    #[command(flatten)]
    corpus: CorpusOpts,
    #[command(flatten)]
    encoding: EncodingOpts,
    /// Worker threads for piece encoding (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AnalyzeCmd {
    #[command(flatten)]
    corpus: CorpusOpts,
    #[command(flatten)]
    encoding: EncodingOpts,
    /// Aggregate per composer or per piece before fitting
    #[arg(long, value_enum, default_value_t = LevelArg::Composer)]
    level: LevelArg,
    /// Directory the reports are written into
    #[arg(long, default_value = "harmonica-out")]
    out: PathBuf,
    /// Worker threads for piece encoding (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    corpus: CorpusOpts,
    /// Thresholds to scan
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.0, 0.025, 0.05, 0.1, 0.2, 0.3, 0.5]
    )]
    thresholds: Vec<f64>,
    /// Frame lengths in beats to scan
    #[arg(
        long,
        value_delimiter = ',',
        default_values = ["0.5", "1", "1.5", "4"],
        value_parser = parse_unit_arg
    )]
    units: Vec<UnitBeats>,
    /// Keep pieces in their original keys
    #[arg(long)]
    no_transpose: bool,
    /// Drop channel-10 percussion notes before framing
    #[arg(long)]
    drop_percussion: bool,
    /// Aggregate per composer or per piece before fitting
    #[arg(long, value_enum, default_value_t = LevelArg::Composer)]
    level: LevelArg,
    /// Directory the sweep table is written into
    #[arg(long, default_value = "harmonica-out")]
    out: PathBuf,
    /// Worker threads for piece encoding (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SynthCmd {
    /// Directory the synthetic caches are written into
    #[arg(long, env = "HARMONICA_CACHE")]
    cache: PathBuf,
    /// Directory for the generated manifest and the generation log
    #[arg(long, default_value = "harmonica-out")]
    out: PathBuf,
    /// Rank exponent of the codeword distribution (must exceed 1)
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Number of distinct codewords available to the sampler (≤ 4096)
    #[arg(long, default_value_t = 4096)]
    vocab: usize,
    /// Number of pieces to generate
    #[arg(long, default_value_t = 200)]
    pieces: usize,
    /// Shortest piece in tokens; lengths are drawn log-uniformly
    #[arg(long, default_value_t = 100)]
    min_len: u64,
    /// Longest piece in tokens
    #[arg(long, default_value_t = 100_000)]
    max_len: u64,
    /// Generator seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Frame length stamped into the cache headers
    #[arg(long, default_value = "1", value_parser = parse_unit_arg)]
    unit: UnitBeats,
    /// Threshold stamped into the cache headers
    #[arg(long, default_value_t = 0.1)]
    threshold: f64,
    /// Stamp the caches for an untransposed corpus
    #[arg(long)]
    no_transpose: bool,
}

#[derive(Args)]
struct KeysCmd {
    #[command(flatten)]
    corpus: CorpusOpts,
    /// Directory the histogram is written into
    #[arg(long, default_value = "harmonica-out")]
    out: PathBuf,
}

fn parse_unit_arg(text: &str) -> Result<UnitBeats, String> {
    if let Some(unit) = harmonica::parse_unit(text) {
        return Ok(unit);
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let decimal = !whole.is_empty()
            && !frac.is_empty()
            && frac.len() <= 6
            && whole.chars().all(|c| c.is_ascii_digit())
            && frac.chars().all(|c| c.is_ascii_digit());
        if decimal {
            let scale = 10u64.pow(frac.len() as u32);
            let numer = whole
                .parse::<u64>()
                .ok()
                .and_then(|w| w.checked_mul(scale))
                .and_then(|w| w.checked_add(frac.parse::<u64>().unwrap()));
            if let Some(numer) = numer {
                if numer > 0 {
                    return Ok(UnitBeats::new(numer, scale));
                }
            }
        }
    }
    Err(format!(
        "expected a positive beat count as an integer, fraction, or decimal, got {text:?}"
    ))
}

fn main() {
    if let Err(error) = run() {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Encode(cmd) => run_encode(cmd),
        Command::Analyze(cmd) => run_analyze(cmd),
        Command::Sweep(cmd) => run_sweep(cmd),
        Command::Synth(cmd) => run_synth(cmd),
        Command::Keys(cmd) => run_keys(cmd),
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("building the worker pool")?;
            Ok(pool.install(work))
        }
    }
}

fn read_manifest(path: &Path) -> Result<(Vec<ManifestEntry>, PathBuf)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading manifest {}", path.display()))?;
    let entries = load_manifest(&text)
        .with_context(|| format!("parsing manifest {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Ok((entries, base))
}

fn resolve_piece_path(base: &Path, piece: &str) -> PathBuf {
    let path = Path::new(piece);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

enum PieceStatus {
    Encoded(Chromagram),
    CacheHit(Chromagram),
    Failed(String),
}

/// Reuse a valid cache entry or encode from the source file, writing the
/// cache back on success.
fn load_or_encode(
    entry: &ManifestEntry,
    base: &Path,
    cache_dir: &Path,
    params: &EncodeParams,
) -> PieceStatus {
    let cache_path = cache_dir.join(cache_file_name(&entry.path));
    if cache_path.exists() {
        match read_cache(&cache_path) {
            Ok(chromagram) => {
                if check_cache_params(
                    &chromagram,
                    &entry.path,
                    params.unit_beats,
                    params.threshold,
                    params.transpose,
                )
                .is_ok()
                {
                    return PieceStatus::CacheHit(chromagram);
                }
            }
            Err(error) => {
                eprintln!("warning: {}: unreadable cache rebuilt ({error})", entry.path);
            }
        }
    }
    let source = resolve_piece_path(base, &entry.path);
    let bytes = match fs::read(&source) {
        Ok(bytes) => bytes,
        Err(error) => return PieceStatus::Failed(format!("reading {}: {error}", source.display())),
    };
    match encode_bytes(&bytes, &entry.path, params) {
        Ok(outcome) => {
            let w = &outcome.parse_warnings;
            if w.any() {
                eprintln!(
                    "warning: {}: {} dangling note-ons, {} stray note-offs, {} zero-duration notes",
                    entry.path, w.dangling_note_ons, w.stray_note_offs, w.zero_duration_notes
                );
            }
            if outcome.untransposable {
                eprintln!(
                    "warning: {}: flat pitch-class profile, no key assigned",
                    entry.path
                );
            }
            match write_cache(&outcome.chromagram, &cache_path) {
                Ok(()) => PieceStatus::Encoded(outcome.chromagram),
                Err(error) => PieceStatus::Failed(format!("writing cache: {error}")),
            }
        }
        Err(error) => PieceStatus::Failed(error.to_string()),
    }
}

fn run_encode(cmd: EncodeCmd) -> Result<()> {
    let (entries, base) = read_manifest(&cmd.corpus.manifest)?;
    fs::create_dir_all(&cmd.corpus.cache)
        .with_context(|| format!("creating cache dir {}", cmd.corpus.cache.display()))?;
    let params = cmd.encoding.params();
    let cache_dir = cmd.corpus.cache.clone();

    let statuses: Vec<(String, PieceStatus)> = with_pool(cmd.jobs, || {
        entries
            .par_iter()
            .map(|entry| {
                let status = load_or_encode(entry, &base, &cache_dir, &params);
                (entry.path.clone(), status)
            })
            .collect()
    })?;

    let mut encoded = 0usize;
    let mut hits = 0usize;
    let mut rejected = 0usize;
    let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
    for (path, status) in &statuses {
        match status {
            PieceStatus::Encoded(chromagram) => {
                encoded += 1;
                let key = chromagram
                    .key
                    .map(|k| k.name())
                    .unwrap_or_else(|| "none".into());
                println!("encoded {path}: {} frames, key {key}", chromagram.len());
            }
            PieceStatus::CacheHit(_) => {
                hits += 1;
                println!("cached  {path}");
            }
            PieceStatus::Failed(reason) => {
                rejected += 1;
                *reasons.entry(reason.clone()).or_default() += 1;
                eprintln!("rejected {path}: {reason}");
            }
        }
    }

    println!(
        "{encoded} encoded, {hits} cache hits, {rejected} rejected of {} pieces",
        statuses.len()
    );
    for (reason, count) in &reasons {
        println!("  rejected — {reason}: {count}");
    }
    if rejected * 2 > statuses.len() {
        bail!("{rejected} of {} pieces failed to encode", statuses.len());
    }
    Ok(())
}

/// Load the corpus for analysis-style commands, skipping failed pieces.
fn load_corpus(
    entries: Vec<ManifestEntry>,
    base: &Path,
    cache_dir: &Path,
    params: &EncodeParams,
    jobs: Option<usize>,
) -> Result<Vec<EncodedPiece>> {
    fs::create_dir_all(cache_dir)
        .with_context(|| format!("creating cache dir {}", cache_dir.display()))?;
    let statuses: Vec<(ManifestEntry, PieceStatus)> = with_pool(jobs, || {
        entries
            .into_par_iter()
            .map(|entry| {
                let status = load_or_encode(&entry, base, cache_dir, params);
                (entry, status)
            })
            .collect()
    })?;

    let mut pieces = Vec::with_capacity(statuses.len());
    let mut failed = 0usize;
    for (entry, status) in statuses {
        match status {
            PieceStatus::Encoded(chromagram) | PieceStatus::CacheHit(chromagram) => {
                pieces.push(EncodedPiece { entry, chromagram });
            }
            PieceStatus::Failed(reason) => {
                failed += 1;
                eprintln!("warning: skipping {}: {reason}", entry.path);
            }
        }
    }
    if failed > 0 {
        eprintln!("warning: {failed} pieces skipped");
    }
    Ok(pieces)
}

fn write_report(path: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let file = path.join(name);
    fs::write(&file, contents).with_context(|| format!("writing {}", file.display()))?;
    Ok(file)
}

fn run_analyze(cmd: AnalyzeCmd) -> Result<()> {
    let (entries, base) = read_manifest(&cmd.corpus.manifest)?;
    let params = cmd.encoding.params();
    let pieces = load_corpus(entries, &base, &cmd.corpus.cache, &params, cmd.jobs)?;
    if pieces.is_empty() {
        bail!("empty corpus: no piece could be loaded");
    }

    let split = split_untransposable(pieces, params.transpose);
    if !split.untransposable.is_empty() {
        eprintln!(
            "warning: {} untransposable pieces left out of the transposed corpus",
            split.untransposable.len()
        );
    }
    let aggregation = aggregate(&split.included).context("aggregating the corpus")?;
    if aggregation.empty_pieces > 0 {
        eprintln!(
            "warning: {} pieces were empty after trimming",
            aggregation.empty_pieces
        );
    }
    if aggregation.datasets.is_empty() {
        bail!("empty corpus: nothing to analyze after exclusions");
    }

    fs::create_dir_all(&cmd.out)
        .with_context(|| format!("creating output dir {}", cmd.out.display()))?;
    let aggregate_table = aggregate_csv(&aggregation.datasets);

    let level = cmd.level.level();
    let datasets: Vec<ComposerDataset> = match level {
        Level::Composer => aggregation.datasets,
        Level::Piece => per_piece_datasets(&split.included),
    };
    let analysis = analyze(&datasets, level, DEFAULT_BINS_PER_DECADE);
    let meta = RunMeta {
        unit_beats: params.unit_beats,
        threshold: params.threshold,
        transpose: params.transpose,
        drop_percussion: params.drop_percussion,
    };

    write_report(&cmd.out, "aggregate.csv", &aggregate_table)?;
    write_report(&cmd.out, "metrics.csv", &metrics_csv(&analysis.rows))?;
    write_report(&cmd.out, "report.json", &report_json(&analysis, &meta))?;
    write_report(
        &cmd.out,
        "heaps_scatter.tsv",
        &heaps_scatter_tsv(&analysis.rows, analysis.heaps.as_ref()),
    )?;
    write_report(
        &cmd.out,
        "richness_vs_year.tsv",
        &richness_vs_year_tsv(&analysis.rows),
    )?;
    if let Some(pmf) = &analysis.pmf_tokens {
        write_report(&cmd.out, "pmf_tokens.tsv", &pmf_tsv(pmf))?;
    }
    if let Some(pmf) = &analysis.pmf_types {
        write_report(&cmd.out, "pmf_types.tsv", &pmf_tsv(pmf))?;
    }

    println!(
        "analyzed {} {} datasets into {}",
        analysis.rows.len(),
        level.name(),
        cmd.out.display()
    );
    match (&analysis.heaps, &analysis.heaps_refusal) {
        (Some(fit), _) => println!(
            "heaps: alpha {:.4}, log10K {:.4}, rho {:.4}, sigma_c {:.4} over {} points",
            fit.alpha, fit.log10k, fit.rho, fit.sigma_c, fit.n_points
        ),
        (None, Some(reason)) => println!("heaps fit refused: {reason}"),
        (None, None) => {}
    }
    Ok(())
}

fn run_sweep(cmd: SweepCmd) -> Result<()> {
    let (entries, base) = read_manifest(&cmd.corpus.manifest)?;
    if cmd.thresholds.is_empty() || cmd.units.is_empty() {
        bail!("the sweep grid is empty");
    }

    // Sources are read once; every grid cell re-encodes from bytes rather
    // than disturbing the cache.
    let sources: Vec<(ManifestEntry, Vec<u8>)> = entries
        .into_iter()
        .filter_map(|entry| {
            let path = resolve_piece_path(&base, &entry.path);
            match fs::read(&path) {
                Ok(bytes) => Some((entry, bytes)),
                Err(error) => {
                    eprintln!("warning: skipping {}: {error}", entry.path);
                    None
                }
            }
        })
        .collect();
    if sources.is_empty() {
        bail!("empty corpus: no piece could be read");
    }

    let level = cmd.level.level();
    let mut rows = Vec::with_capacity(cmd.thresholds.len() * cmd.units.len());
    for &threshold in &cmd.thresholds {
        for &unit in &cmd.units {
            let params = EncodeParams {
                unit_beats: unit,
                threshold,
                transpose: !cmd.no_transpose,
                drop_percussion: cmd.drop_percussion,
            };
            let pieces: Vec<EncodedPiece> = with_pool(cmd.jobs, || {
                sources
                    .par_iter()
                    .filter_map(|(entry, bytes)| {
                        match encode_bytes(bytes, &entry.path, &params) {
                            Ok(outcome) => Some(EncodedPiece {
                                entry: entry.clone(),
                                chromagram: outcome.chromagram,
                            }),
                            Err(error) => {
                                eprintln!(
                                    "warning: {} at threshold {threshold}, unit {}: {error}",
                                    entry.path, unit
                                );
                                None
                            }
                        }
                    })
                    .collect()
            })?;
            let split = split_untransposable(pieces, params.transpose);
            let fit = (|| {
                let datasets = match level {
                    Level::Composer => aggregate(&split.included).ok()?.datasets,
                    Level::Piece => per_piece_datasets(&split.included),
                };
                let points: Vec<(u64, u64)> = datasets
                    .iter()
                    .map(|d| (d.table.tokens(), u64::from(d.table.types())))
                    .collect();
                fit_heaps(&points).ok()
            })();
            if let Some(fit) = &fit {
                println!(
                    "threshold {threshold}, unit {unit}: alpha {:.4}, rho {:.4}",
                    fit.alpha, fit.rho
                );
            } else {
                println!("threshold {threshold}, unit {unit}: no fit");
            }
            rows.push(SweepRow {
                threshold,
                unit_beats: unit,
                fit,
            });
        }
    }

    fs::create_dir_all(&cmd.out)
        .with_context(|| format!("creating output dir {}", cmd.out.display()))?;
    let file = write_report(&cmd.out, "sweep.csv", &sweep_csv(&rows))?;
    println!("{} grid cells written to {}", rows.len(), file.display());
    Ok(())
}

fn run_synth(cmd: SynthCmd) -> Result<()> {
    if cmd.pieces == 0 {
        bail!("at least one piece is required");
    }
    if cmd.vocab == 0 || cmd.vocab > 4096 {
        bail!("vocab must be between 1 and 4096, got {}", cmd.vocab);
    }
    if !(cmd.gamma > 1.0) {
        bail!("gamma must exceed 1, got {}", cmd.gamma);
    }
    if cmd.min_len == 0 || cmd.min_len > cmd.max_len {
        bail!(
            "piece lengths must satisfy 1 <= min-len <= max-len, got {}..{}",
            cmd.min_len,
            cmd.max_len
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cmd.seed);
    let log_min = (cmd.min_len as f64).log10();
    let log_max = (cmd.max_len as f64).log10();
    let piece_lengths: Vec<u64> = (0..cmd.pieces)
        .map(|_| {
            let exponent = log_min + (log_max - log_min) * rng.random::<f64>();
            (10f64.powf(exponent).round() as u64).clamp(cmd.min_len, cmd.max_len)
        })
        .collect();
    let total_tokens: u64 = piece_lengths.iter().sum();

    let spec = ZipfSpec {
        gamma: cmd.gamma,
        vocab_size: cmd.vocab,
        piece_lengths,
        seed: cmd.seed,
    };
    let corpus = sample_corpus(&spec).context("sampling the corpus")?;

    fs::create_dir_all(&cmd.cache)
        .with_context(|| format!("creating cache dir {}", cmd.cache.display()))?;
    fs::create_dir_all(&cmd.out)
        .with_context(|| format!("creating output dir {}", cmd.out.display()))?;

    // Synthetic streams carry no key of their own; they are stamped as
    // already sitting on the reference tonic so a transposed analysis
    // accepts them unchanged.
    let (key, transposed) = (
        Some(PieceKey {
            mode: Mode::Major,
            tonic: 0,
        }),
        !cmd.no_transpose,
    );

    let mut manifest = String::from("path,composer,birth,death\n");
    for (index, codewords) in corpus.into_iter().enumerate() {
        let path = format!("synth-{}/piece-{index:04}.mid", cmd.seed);
        let birth = 1500 + (index * 400 / cmd.pieces) as i32;
        let chromagram = Chromagram {
            codewords,
            unit_beats: cmd.unit,
            threshold: cmd.threshold,
            key,
            transposed,
            source_id: path.clone(),
        };
        write_cache(&chromagram, &cmd.cache.join(cache_file_name(&path)))
            .with_context(|| format!("writing cache for {path}"))?;
        manifest.push_str(&format!(
            "{path},synth-{index:04},{birth},{}\n",
            birth + 60
        ));
    }

    let manifest_path = write_report(&cmd.out, "manifest.csv", &manifest)?;
    let log = serde_json::json!({
        "generator": GENERATOR_NAME,
        "seed": cmd.seed,
        "gamma": cmd.gamma,
        "vocab_size": cmd.vocab,
        "pieces": cmd.pieces,
        "min_length": cmd.min_len,
        "max_length": cmd.max_len,
        "total_tokens": total_tokens,
        "unit": harmonica::render_unit(cmd.unit),
        "threshold": cmd.threshold,
        "transposed": transposed,
    });
    let mut log_text = serde_json::to_string_pretty(&log).expect("string keys only");
    log_text.push('\n');
    write_report(&cmd.out, "synth.json", &log_text)?;

    println!(
        "{} pieces, {total_tokens} tokens sampled with {GENERATOR_NAME} seed {} into {}",
        cmd.pieces,
        cmd.seed,
        cmd.cache.display()
    );
    println!("manifest at {}", manifest_path.display());
    Ok(())
}

fn run_keys(cmd: KeysCmd) -> Result<()> {
    let (entries, _) = read_manifest(&cmd.corpus.manifest)?;
    let mut keys: Vec<PieceKey> = Vec::new();
    let mut keyless = 0usize;
    let mut missing = 0usize;
    for entry in &entries {
        let cache_path = cmd.corpus.cache.join(cache_file_name(&entry.path));
        match read_cache(&cache_path) {
            Ok(chromagram) => match chromagram.key {
                Some(key) => keys.push(key),
                None => keyless += 1,
            },
            Err(error) => {
                missing += 1;
                eprintln!("warning: {}: {error}", entry.path);
            }
        }
    }
    if keys.is_empty() && keyless == 0 {
        bail!("no cached pieces found; run `harmonica encode` first");
    }

    let histogram = key_histogram(keys.iter().copied());
    fs::create_dir_all(&cmd.out)
        .with_context(|| format!("creating output dir {}", cmd.out.display()))?;
    let file = write_report(&cmd.out, "keys.csv", &key_histogram_csv(&histogram))?;

    let top = histogram
        .iter()
        .enumerate()
        .max_by_key(|&(_, count)| count)
        .map(|(index, &count)| (PieceKey::from_index(index as u8).unwrap().name(), count))
        .unwrap();
    println!(
        "{} keyed pieces ({keyless} keyless, {missing} unreadable); most common key {} with {} pieces; histogram at {}",
        keys.len(),
        top.0,
        top.1,
        file.display()
    );
    Ok(())
}
