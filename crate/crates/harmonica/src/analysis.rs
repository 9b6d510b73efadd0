//! Corpus-level analysis: metric rows per dataset, the Heaps fit with
//! richness residuals, chronological trends, correlation matrices,
//! distributions, and the tail fit.

use crate::corpus::{ComposerDataset, EncodedPiece, FrequencyTable};
use crate::heaps::{
    correlation_matrix, fit_heaps, fit_powerlaw_tail, fit_trend, log_binned_pmf, richness,
    CorrelationMatrix, CorrelationMethod, HeapsFit, LogBinnedPmf, TailFit, TrendFit,
    METRIC_LABELS,
};
use crate::stats::{composer_year, entropy, guiraud, herdan, mean_filling, ttr, MetricsRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Composer,
    Piece,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Composer => "composer",
            Level::Piece => "piece",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub level: Level,
    pub rows: Vec<MetricsRow>,
    pub heaps: Option<HeapsFit<f64>>,
    /// Why the Heaps fit is absent, when it is.
    pub heaps_refusal: Option<String>,
    pub trends: Vec<(&'static str, Option<TrendFit<f64>>)>,
    pub correlations: Vec<CorrelationMatrix>,
    pub pmf_tokens: Option<LogBinnedPmf<f64>>,
    pub pmf_types: Option<LogBinnedPmf<f64>>,
    pub tail_tokens: Option<TailFit<f64>>,
    /// Datasets skipped because they held no tokens at all.
    pub skipped_datasets: u32,
}

/// Split an encoded corpus into the pieces that enter analysis and the
/// ones excluded from a transposed corpus because their key is undefined.
pub struct CorpusSplit {
    pub included: Vec<EncodedPiece>,
    pub untransposable: Vec<EncodedPiece>,
}

pub fn split_untransposable(pieces: Vec<EncodedPiece>, transpose: bool) -> CorpusSplit {
    let mut included = Vec::new();
    let mut untransposable = Vec::new();
    for piece in pieces {
        let keyless = !piece.chromagram.is_empty() && piece.chromagram.key.is_none();
        if transpose && keyless {
            untransposable.push(piece);
        } else {
            included.push(piece);
        }
    }
    CorpusSplit {
        included,
        untransposable,
    }
}

/// Reshape pieces into one single-piece dataset each, labeled by path, for
/// piece-level fits.
pub fn per_piece_datasets(pieces: &[EncodedPiece]) -> Vec<ComposerDataset> {
    pieces
        .iter()
        .map(|piece| ComposerDataset {
            composer: piece.entry.path.clone(),
            birth: piece.entry.birth,
            death: piece.entry.death,
            pieces: 1,
            table: FrequencyTable::from_codewords(&piece.chromagram.codewords),
        })
        .collect()
}

fn metrics_row(dataset: &ComposerDataset) -> Option<MetricsRow> {
    let tokens = dataset.table.tokens();
    let types = dataset.table.types();
    if tokens == 0 {
        return None;
    }
    // L = 1 forces V = 1, where Herdan's index takes its boundary value 0
    let herdan_value = if tokens >= 2 {
        herdan(tokens, types).ok()?
    } else {
        0.0
    };
    Some(MetricsRow {
        composer: dataset.composer.clone(),
        year: composer_year(dataset.birth, dataset.death).ok()?,
        pieces: dataset.pieces,
        tokens,
        types,
        ttr: ttr(tokens, types).ok()?,
        guiraud: guiraud(tokens, types).ok()?,
        herdan: herdan_value,
        entropy_bits: entropy(&dataset.table).ok()?,
        mean_filling: mean_filling(&dataset.table).ok()?,
        richness: None,
    })
}

pub fn analyze(datasets: &[ComposerDataset], level: Level, bins_per_decade: u32) -> Analysis {
    let mut rows = Vec::with_capacity(datasets.len());
    let mut skipped = 0u32;
    for dataset in datasets {
        match metrics_row(dataset) {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }

    let points: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r.tokens, u64::from(r.types)))
        .collect();
    let (heaps, heaps_refusal) = match fit_heaps::<f64>(&points) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    if let Some(fit) = &heaps {
        for row in &mut rows {
            row.richness = richness(u64::from(row.types), row.tokens, fit).ok();
        }
    }

    let trends = METRIC_LABELS[1..]
        .iter()
        .map(|&label| {
            let pairs: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| {
                    let y = match label {
                        "log10_L" => Some((r.tokens as f64).log10()),
                        "log10_V" => Some(f64::from(r.types).log10()),
                        "ttr" => Some(r.ttr),
                        "guiraud" => Some(r.guiraud),
                        "herdan" => Some(r.herdan),
                        "entropy_bits" => Some(r.entropy_bits),
                        "mean_filling" => Some(r.mean_filling),
                        "richness" => r.richness,
                        _ => unreachable!(),
                    };
                    y.map(|y| (r.year, y))
                })
                .collect();
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            (label, fit_trend(&xs, &ys).ok())
        })
        .collect();

    let correlations = if rows.len() >= 3 {
        [
            CorrelationMethod::Pearson,
            CorrelationMethod::Spearman,
            CorrelationMethod::Kendall,
        ]
        .iter()
        .filter_map(|&m| correlation_matrix(&rows, m).ok())
        .collect()
    } else {
        Vec::new()
    };

    let token_values: Vec<f64> = rows.iter().map(|r| r.tokens as f64).collect();
    let type_values: Vec<f64> = rows.iter().map(|r| f64::from(r.types)).collect();
    let pmf_tokens = log_binned_pmf(&token_values, bins_per_decade).ok();
    let pmf_types = log_binned_pmf(&type_values, bins_per_decade).ok();
    let tail_tokens = fit_powerlaw_tail(&token_values, None).ok();

    Analysis {
        level,
        rows,
        heaps,
        heaps_refusal,
        trends,
        correlations,
        pmf_tokens,
        pmf_types,
        tail_tokens,
        skipped_datasets: skipped,
    }
}
