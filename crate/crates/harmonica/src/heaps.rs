//! Inter-text Heaps' law fitting and the statistics built on top of it:
//! relative richness, chronological trends, cross-metric correlation
//! matrices, log-binned distributions, and power-law tail fits.

use crate::real::{KahanSum, Real};
use crate::stats::MetricsRow;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeapsError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("all x values are equal; slope undefined")]
    DegenerateX,
    #[error("sigma_c is zero (perfectly collinear corpus); richness undefined")]
    ZeroSigmaC,
    #[error("values must be positive")]
    NonPositiveValue,
    #[error("fewer than {min} points in the tail")]
    TooFewTailPoints { min: usize },
    #[error("tail values are all equal; exponent undefined")]
    DegenerateTail,
}

/// Least-squares fit of log10 V against log10 L.
///
/// `sigma_y` and `sigma_c` are population (divide-by-n) statistics, which
/// makes the richness residuals come out with mean 0 and standard
/// deviation exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeapsFit<R> {
    pub alpha: R,
    pub log10k: R,
    pub rho: R,
    pub sigma_y: R,
    pub sigma_c: R,
    pub n_points: usize,
    /// Points dropped because L or V was zero.
    pub excluded: usize,
}

impl<R: Real> HeapsFit<R> {
    /// Assemble a fit from externally given coefficients (e.g. published
    /// regression results) so richness can be evaluated against them.
    pub fn from_coefficients(alpha: R, log10k: R, sigma_c: R) -> Self {
        HeapsFit {
            alpha,
            log10k,
            rho: R::nan(),
            sigma_y: R::nan(),
            sigma_c,
            n_points: 0,
            excluded: 0,
        }
    }
}

pub fn fit_heaps<R: Real>(points: &[(u64, u64)]) -> Result<HeapsFit<R>, HeapsError> {
    let excluded = points.iter().filter(|&&(l, v)| l == 0 || v == 0).count();
    let logs: Vec<(R, R)> = points
        .iter()
        .filter(|&&(l, v)| l > 0 && v > 0)
        .map(|&(l, v)| (R::of_u64(l).log10(), R::of_u64(v).log10()))
        .collect();
    let n = logs.len();
    if n < 3 {
        return Err(HeapsError::TooFewPoints(n));
    }

    let nr = R::of_usize(n);
    let mx = logs.iter().fold(R::zero(), |a, &(x, _)| a + x) / nr;
    let my = logs.iter().fold(R::zero(), |a, &(_, y)| a + y) / nr;
    let mut sxx = KahanSum::new();
    let mut syy = KahanSum::new();
    let mut sxy = KahanSum::new();
    for &(x, y) in &logs {
        let dx = x - mx;
        let dy = y - my;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let sxx = sxx.total() / nr;
    let syy = syy.total() / nr;
    let sxy = sxy.total() / nr;

    if sxx <= R::zero() {
        return Err(HeapsError::DegenerateX);
    }
    let alpha = sxy / sxx;
    let log10k = my - alpha * mx;
    let sigma_y = syy.sqrt();
    let rho = if syy > R::zero() {
        sxy / (sxx * syy).sqrt()
    } else {
        R::zero()
    };
    let sigma_c = sigma_y * (R::one() - rho * rho).max(R::zero()).sqrt();
    Ok(HeapsFit {
        alpha,
        log10k,
        rho,
        sigma_y,
        sigma_c,
        n_points: n,
        excluded,
    })
}

/// Relative richness: the residual of log10 V from the regression line, in
/// units of the conditional standard deviation.
pub fn richness<R: Real>(types: u64, tokens: u64, fit: &HeapsFit<R>) -> Result<R, HeapsError> {
    if !(fit.sigma_c > R::zero()) {
        return Err(HeapsError::ZeroSigmaC);
    }
    if types == 0 || tokens == 0 {
        return Err(HeapsError::NonPositiveValue);
    }
    let y = R::of_u64(types).log10();
    let x = R::of_u64(tokens).log10();
    Ok((y - fit.log10k - fit.alpha * x) / fit.sigma_c)
}

/// Linear trend of a metric against time, slope scaled to centuries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit<R> {
    pub slope_per_century: R,
    pub intercept: R,
    pub rho: R,
}

pub fn fit_trend<R: Real>(xs: &[R], ys: &[R]) -> Result<TrendFit<R>, HeapsError> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(HeapsError::TooFewPoints(xs.len().min(ys.len())));
    }
    let n = R::of_usize(xs.len());
    let mx = xs.iter().fold(R::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(R::zero(), |a, &y| a + y) / n;
    let mut sxx = KahanSum::new();
    let mut syy = KahanSum::new();
    let mut sxy = KahanSum::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    let (sxx, syy, sxy) = (sxx.total(), syy.total(), sxy.total());
    if sxx <= R::zero() {
        return Err(HeapsError::DegenerateX);
    }
    let slope = sxy / sxx;
    let rho = if syy > R::zero() {
        sxy / (sxx * syy).sqrt()
    } else {
        R::zero()
    };
    Ok(TrendFit {
        slope_per_century: slope * R::of_f64(100.0),
        intercept: my - slope * mx,
        rho,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
    Kendall,
}

impl CorrelationMethod {
    pub fn name(self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
            CorrelationMethod::Kendall => "kendall",
        }
    }
}

/// Symmetric cross-metric correlation matrix with unit diagonal. Cells
/// touching a constant column are 0 and flagged degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub labels: Vec<&'static str>,
    pub method: CorrelationMethod,
    pub values: Vec<Vec<f64>>,
    pub degenerate_columns: Vec<bool>,
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson<R: Real>(xs: &[R], ys: &[R]) -> Option<R> {
    assert_eq!(xs.len(), ys.len());
    let n = R::of_usize(xs.len());
    let mx = xs.iter().fold(R::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(R::zero(), |a, &y| a + y) / n;
    let mut sxx = R::zero();
    let mut syy = R::zero();
    let mut sxy = R::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= R::zero() || syy <= R::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Average ranks (ties share the mean of the rank range they cover).
pub fn average_ranks<R: Real>(xs: &[R]) -> Vec<R> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("no NaN in ranked data"));
    let mut ranks = vec![R::zero(); xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // ranks are 1-based; a tie block spanning sorted positions i..=j
        // shares the mean rank (i + j)/2 + 1
        let shared = (R::of_usize(i) + R::of_usize(j)) / R::of_f64(2.0) + R::one();
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson on average ranks.
pub fn spearman<R: Real>(xs: &[R], ys: &[R]) -> Option<R> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Kendall tau-b with tie corrections.
pub fn kendall<R: Real>(xs: &[R], ys: &[R]) -> Option<R> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_x = 0i64;
    let mut ties_y = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let cx = xs[i].partial_cmp(&xs[j]).expect("no NaN");
            let cy = ys[i].partial_cmp(&ys[j]).expect("no NaN");
            match (cx, cy) {
                (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => {
                    ties_x += 1;
                    ties_y += 1;
                }
                (std::cmp::Ordering::Equal, _) => ties_x += 1,
                (_, std::cmp::Ordering::Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom_x = n0 - ties_x;
    let denom_y = n0 - ties_y;
    if denom_x == 0 || denom_y == 0 {
        return None;
    }
    let denom = (R::of_f64(denom_x as f64) * R::of_f64(denom_y as f64)).sqrt();
    Some(R::of_f64((concordant - discordant) as f64) / denom)
}

pub const METRIC_LABELS: [&str; 9] = [
    "year",
    "log10_L",
    "log10_V",
    "ttr",
    "guiraud",
    "herdan",
    "entropy_bits",
    "mean_filling",
    "richness",
];

fn metric_columns(rows: &[MetricsRow]) -> (Vec<&'static str>, Vec<Vec<f64>>) {
    let with_richness = rows.iter().all(|r| r.richness.is_some());
    let mut labels: Vec<&'static str> = METRIC_LABELS.to_vec();
    if !with_richness {
        labels.pop();
    }
    let columns = labels
        .iter()
        .map(|&label| {
            rows.iter()
                .map(|r| match label {
                    "year" => r.year,
                    "log10_L" => (r.tokens as f64).log10(),
                    "log10_V" => f64::from(r.types).log10(),
                    "ttr" => r.ttr,
                    "guiraud" => r.guiraud,
                    "herdan" => r.herdan,
                    "entropy_bits" => r.entropy_bits,
                    "mean_filling" => r.mean_filling,
                    "richness" => r.richness.expect("checked above"),
                    _ => unreachable!(),
                })
                .collect()
        })
        .collect();
    (labels, columns)
}

/// Pairwise correlations of the standard metric set over composer rows.
pub fn correlation_matrix(
    rows: &[MetricsRow],
    method: CorrelationMethod,
) -> Result<CorrelationMatrix, HeapsError> {
    if rows.len() < 3 {
        return Err(HeapsError::TooFewPoints(rows.len()));
    }
    let (labels, columns) = metric_columns(rows);
    let correlate = |a: &[f64], b: &[f64]| match method {
        CorrelationMethod::Pearson => pearson(a, b),
        CorrelationMethod::Spearman => spearman(a, b),
        CorrelationMethod::Kendall => kendall(a, b),
    };
    let k = labels.len();
    let mut values = vec![vec![0.0f64; k]; k];
    let mut degenerate = vec![false; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in (i + 1)..k {
            let cell = match correlate(&columns[i], &columns[j]) {
                Some(c) => c,
                None => {
                    // at least one side is constant; record which
                    if pearson(&columns[i], &columns[i]).is_none() {
                        degenerate[i] = true;
                    }
                    if pearson(&columns[j], &columns[j]).is_none() {
                        degenerate[j] = true;
                    }
                    0.0
                }
            };
            values[i][j] = cell;
            values[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix {
        labels,
        method,
        values,
        degenerate_columns: degenerate,
    })
}

/// Probability mass split into geometric bins; `densities[i]` is the bin's
/// probability mass divided by its linear width, so Σ density·width = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBinnedPmf<R> {
    pub bin_edges: Vec<R>,
    pub densities: Vec<R>,
    pub counts: Vec<u64>,
    pub sample_count: usize,
}

pub const DEFAULT_BINS_PER_DECADE: u32 = 5;

pub fn log_binned_pmf<R: Real>(
    values: &[R],
    bins_per_decade: u32,
) -> Result<LogBinnedPmf<R>, HeapsError> {
    assert!(bins_per_decade >= 1);
    if values.is_empty() || values.iter().any(|&v| !(v > R::zero())) {
        return Err(HeapsError::NonPositiveValue);
    }
    let min = values.iter().copied().fold(values[0], R::min);
    let max = values.iter().copied().fold(values[0], R::max);
    let per_decade = R::of_u64(u64::from(bins_per_decade));
    let span = (max / min).log10() * per_decade;
    let bins = span.ceil().to_f64().unwrap_or(1.0).max(1.0) as usize;

    let ratio = (R::of_f64(10.0)).powf(R::one() / per_decade);
    let mut edges = Vec::with_capacity(bins + 1);
    let mut edge = min;
    for _ in 0..=bins {
        edges.push(edge);
        edge = edge * ratio;
    }
    if *edges.last().unwrap() < max {
        *edges.last_mut().unwrap() = max;
    }

    let mut counts = vec![0u64; bins];
    for &v in values {
        let pos = edges.partition_point(|&e| e <= v);
        let bin = pos.saturating_sub(1).min(bins - 1);
        counts[bin] += 1;
    }
    let n = R::of_usize(values.len());
    let densities = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| R::of_u64(c) / (n * (edges[i + 1] - edges[i])))
        .collect();
    Ok(LogBinnedPmf {
        bin_edges: edges,
        densities,
        counts,
        sample_count: values.len(),
    })
}

impl<R: Real> LogBinnedPmf<R> {
    pub fn total_mass(&self) -> R {
        let mut sum = KahanSum::new();
        for (i, &d) in self.densities.iter().enumerate() {
            sum.add(d * (self.bin_edges[i + 1] - self.bin_edges[i]));
        }
        sum.total()
    }

    /// Geometric midpoints, one per bin.
    pub fn bin_centers(&self) -> Vec<R> {
        (0..self.densities.len())
            .map(|i| (self.bin_edges[i] * self.bin_edges[i + 1]).sqrt())
            .collect()
    }
}

/// Continuous power-law tail fit by maximum likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit<R> {
    pub exponent: R,
    pub xmin: R,
    pub n_tail: usize,
    pub ks_stat: R,
}

pub const MIN_TAIL_POINTS: usize = 10;

fn tail_ks<R: Real>(sorted_tail: &[R], xmin: R, exponent: R) -> R {
    let m = R::of_usize(sorted_tail.len());
    let mut worst = R::zero();
    for (k, &x) in sorted_tail.iter().enumerate() {
        let model = R::one() - (x / xmin).powf(R::one() - exponent);
        let hi = R::of_usize(k + 1) / m - model;
        let lo = model - R::of_usize(k) / m;
        worst = worst.max(hi).max(lo);
    }
    worst
}

/// MLE exponent 1 + n/Σ ln(x/xmin) over the tail x ≥ xmin. Without an
/// explicit xmin, every observed value is tried as the cutoff and the one
/// minimizing the Kolmogorov–Smirnov distance wins.
pub fn fit_powerlaw_tail<R: Real>(
    values: &[R],
    xmin: Option<R>,
) -> Result<TailFit<R>, HeapsError> {
    if values.is_empty() || values.iter().any(|&v| !(v > R::zero())) {
        return Err(HeapsError::NonPositiveValue);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));

    let fit_at = |tail: &[R], cutoff: R| -> Option<TailFit<R>> {
        let mut lnsum = KahanSum::new();
        for &x in tail {
            lnsum.add((x / cutoff).ln());
        }
        let total = lnsum.total();
        if !(total > R::zero()) {
            return None; // all tail values at the cutoff; exponent diverges
        }
        let exponent = R::one() + R::of_usize(tail.len()) / total;
        Some(TailFit {
            exponent,
            xmin: cutoff,
            n_tail: tail.len(),
            ks_stat: tail_ks(tail, cutoff, exponent),
        })
    };

    match xmin {
        Some(cutoff) => {
            if !(cutoff > R::zero()) {
                return Err(HeapsError::NonPositiveValue);
            }
            let start = sorted.partition_point(|&v| v < cutoff);
            let tail = &sorted[start..];
            if tail.len() < MIN_TAIL_POINTS {
                return Err(HeapsError::TooFewTailPoints {
                    min: MIN_TAIL_POINTS,
                });
            }
            fit_at(tail, cutoff).ok_or(HeapsError::DegenerateTail)
        }
        None => {
            let mut best: Option<TailFit<R>> = None;
            for i in 0..sorted.len() {
                if i > 0 && sorted[i] == sorted[i - 1] {
                    continue; // same cutoff, same tail
                }
                let tail = &sorted[i..];
                if tail.len() < MIN_TAIL_POINTS {
                    break;
                }
                if let Some(fit) = fit_at(tail, sorted[i]) {
                    if best.as_ref().map_or(true, |b| fit.ks_stat < b.ks_stat) {
                        best = Some(fit);
                    }
                }
            }
            best.ok_or(HeapsError::TooFewTailPoints {
                min: MIN_TAIL_POINTS,
            })
        }
    }
}
