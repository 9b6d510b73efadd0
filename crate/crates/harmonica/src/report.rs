//! Serialization of analysis results: CSV tables, a JSON report, and
//! tab-separated plot data. All writers are deterministic so reruns with
//! identical inputs produce byte-identical files.

use crate::analysis::Analysis;
use crate::corpus::{render_unit, ComposerDataset};
use crate::heaps::{HeapsFit, LogBinnedPmf};
use crate::key::PieceKey;
use crate::midi::UnitBeats;
use crate::stats::MetricsRow;
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy)]
pub struct RunMeta {
    pub unit_beats: UnitBeats,
    pub threshold: f64,
    pub transpose: bool,
    pub drop_percussion: bool,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub threshold: f64,
    pub unit_beats: UnitBeats,
    pub fit: Option<HeapsFit<f64>>,
}

pub const METRICS_CSV_HEADER: &str =
    "composer,year,pieces,L,V,ttr,guiraud,herdan,entropy_bits,mean_filling,richness";

fn csv_quote(field: &str) -> String {
    if field.contains(['"', ',', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let richness = row
            .richness
            .map(|r| r.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_quote(&row.composer),
            row.year,
            row.pieces,
            row.tokens,
            row.types,
            row.ttr,
            row.guiraud,
            row.herdan,
            row.entropy_bits,
            row.mean_filling,
            richness
        );
    }
    out
}

pub fn aggregate_csv(datasets: &[ComposerDataset]) -> String {
    let mut out = String::from("composer,birth,death,pieces,L,V\n");
    for d in datasets {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_quote(&d.composer),
            d.birth,
            d.death,
            d.pieces,
            d.table.tokens(),
            d.table.types()
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("threshold,unit,alpha,log10K,rho\n");
    for row in rows {
        let unit = *row.unit_beats.numer() as f64 / *row.unit_beats.denom() as f64;
        match &row.fit {
            Some(fit) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.threshold, unit, fit.alpha, fit.log10k, fit.rho
                );
            }
            None => {
                let _ = writeln!(out, "{},{},,,", row.threshold, unit);
            }
        }
    }
    out
}

pub fn key_histogram_csv(histogram: &[u64; 24]) -> String {
    let mut out = String::from("key_index,key,count\n");
    for (index, &count) in histogram.iter().enumerate() {
        let key = PieceKey::from_index(index as u8).expect("index below 24");
        let _ = writeln!(out, "{},{},{}", index, key.name(), count);
    }
    out
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn heaps_value(fit: &HeapsFit<f64>) -> Value {
    let mut m = Map::new();
    m.insert("alpha".into(), finite(fit.alpha));
    m.insert("log10K".into(), finite(fit.log10k));
    m.insert("rho".into(), finite(fit.rho));
    m.insert("sigma_y".into(), finite(fit.sigma_y));
    m.insert("sigma_c".into(), finite(fit.sigma_c));
    m.insert("n".into(), json!(fit.n_points));
    Value::Object(m)
}

fn pmf_value(pmf: &LogBinnedPmf<f64>) -> Value {
    json!({
        "bin_edges": pmf.bin_edges.iter().map(|&e| finite(e)).collect::<Vec<_>>(),
        "bin_centers": pmf.bin_centers().iter().map(|&c| finite(c)).collect::<Vec<_>>(),
        "densities": pmf.densities.iter().map(|&d| finite(d)).collect::<Vec<_>>(),
        "counts": pmf.counts,
        "sample_count": pmf.sample_count,
    })
}

pub fn report_json(analysis: &Analysis, meta: &RunMeta) -> String {
    let rows: Vec<Value> = analysis
        .rows
        .iter()
        .map(|r| {
            json!({
                "composer": r.composer,
                "year": finite(r.year),
                "pieces": r.pieces,
                "L": r.tokens,
                "V": r.types,
                "ttr": finite(r.ttr),
                "guiraud": finite(r.guiraud),
                "herdan": finite(r.herdan),
                "entropy_bits": finite(r.entropy_bits),
                "mean_filling": finite(r.mean_filling),
                "richness": r.richness.map(finite).unwrap_or(Value::Null),
            })
        })
        .collect();

    let trends: Map<String, Value> = analysis
        .trends
        .iter()
        .map(|(label, trend)| {
            let value = match trend {
                Some(t) => json!({
                    "slope_per_century": finite(t.slope_per_century),
                    "intercept": finite(t.intercept),
                    "rho": finite(t.rho),
                }),
                None => Value::Null,
            };
            (label.to_string(), value)
        })
        .collect();

    let correlations: Map<String, Value> = analysis
        .correlations
        .iter()
        .map(|matrix| {
            let value = json!({
                "labels": matrix.labels,
                "values": matrix.values,
                "degenerate_columns": matrix.degenerate_columns,
            });
            (matrix.method.name().to_string(), value)
        })
        .collect();

    let report = json!({
        "meta": {
            "level": analysis.level.name(),
            "unit": render_unit(meta.unit_beats),
            "threshold": meta.threshold,
            "transpose": meta.transpose,
            "drop_percussion": meta.drop_percussion,
            "datasets": analysis.rows.len(),
            "skipped_datasets": analysis.skipped_datasets,
        },
        "rows": rows,
        "heaps": analysis.heaps.as_ref().map(heaps_value).unwrap_or(Value::Null),
        "heaps_refusal": analysis.heaps_refusal,
        "trends": trends,
        "correlations": correlations,
        "pmf_tokens": analysis.pmf_tokens.as_ref().map(pmf_value).unwrap_or(Value::Null),
        "pmf_types": analysis.pmf_types.as_ref().map(pmf_value).unwrap_or(Value::Null),
        "tail_tokens": analysis.tail_tokens.as_ref().map(|t| json!({
            "exponent": finite(t.exponent),
            "xmin": finite(t.xmin),
            "n_tail": t.n_tail,
            "ks_stat": finite(t.ks_stat),
        })).unwrap_or(Value::Null),
    });
    let mut text = serde_json::to_string_pretty(&report).expect("no non-string keys");
    text.push('\n');
    text
}

pub fn heaps_scatter_tsv(rows: &[MetricsRow], fit: Option<&HeapsFit<f64>>) -> String {
    let mut out = String::from("label\tL\tV\tlog10_L\tlog10_V\tfit_log10_V\n");
    for row in rows {
        let log_l = (row.tokens as f64).log10();
        let log_v = f64::from(row.types).log10();
        let fitted = fit
            .map(|f| (f.log10k + f.alpha * log_l).to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            row.composer, row.tokens, row.types, log_l, log_v, fitted
        );
    }
    out
}

pub fn richness_vs_year_tsv(rows: &[MetricsRow]) -> String {
    let mut out = String::from("label\tyear\trichness\n");
    for row in rows {
        if let Some(r) = row.richness {
            let _ = writeln!(out, "{}\t{}\t{}", row.composer, row.year, r);
        }
    }
    out
}

pub fn pmf_tsv(pmf: &LogBinnedPmf<f64>) -> String {
    let mut out = String::from("bin_lo\tbin_hi\tbin_center\tcount\tdensity\n");
    let centers = pmf.bin_centers();
    for i in 0..pmf.counts.len() {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            pmf.bin_edges[i],
            pmf.bin_edges[i + 1],
            centers[i],
            pmf.counts[i],
            pmf.densities[i]
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze, Level};
    use crate::chroma::Codeword;
    use crate::corpus::FrequencyTable;
    use crate::heaps::DEFAULT_BINS_PER_DECADE;

    fn dataset(composer: &str, years: (i32, i32), tokens: u64, stride: u16) -> ComposerDataset {
        let mut table = FrequencyTable::new();
        let mut id = 1u16;
        for i in 0..tokens {
            table.add_count(Codeword::from_id(id % 4096), 1 + i % 3);
            id = id.wrapping_add(stride);
        }
        ComposerDataset {
            composer: composer.into(),
            birth: years.0,
            death: years.1,
            pieces: 3,
            table,
        }
    }

    fn corpus() -> Vec<ComposerDataset> {
        vec![
            dataset("Asher", (1680, 1750), 80, 7),
            dataset("Brook", (1756, 1791), 400, 11),
            dataset("Cole", (1810, 1856), 1500, 13),
            dataset("Dane", (1862, 1918), 5000, 17),
        ]
    }

    fn analysis() -> Analysis {
        analyze(&corpus(), Level::Composer, DEFAULT_BINS_PER_DECADE)
    }

    fn meta() -> RunMeta {
        RunMeta {
            unit_beats: UnitBeats::new(1, 1),
            threshold: 0.1,
            transpose: true,
            drop_percussion: false,
        }
    }

    #[test]
    fn metrics_csv_header_and_shape() {
        let text = metrics_csv(&analysis().rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), METRICS_CSV_HEADER);
        let first = lines.next().unwrap();
        assert!(first.starts_with("Asher,1725,3,"));
        assert_eq!(first.split(',').count(), 11);
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn metrics_csv_blank_richness_when_unfitted() {
        let single = vec![corpus().remove(0)];
        let text = metrics_csv(&analyze(&single, Level::Composer, 5).rows);
        let row = text.lines().nth(1).unwrap();
        assert!(row.ends_with(','), "row should end with empty richness: {row}");
    }

    #[test]
    fn metrics_csv_quotes_commas_in_labels() {
        let mut rows = analysis().rows;
        rows[0].composer = "Family, Given".into();
        let text = metrics_csv(&rows);
        assert!(text.contains("\"Family, Given\",1725"));
    }

    #[test]
    fn aggregate_csv_shape() {
        let text = aggregate_csv(&corpus());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "composer,birth,death,pieces,L,V");
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields[0], "Asher");
        assert_eq!(fields[1], "1680");
        assert_eq!(fields[2], "1750");
        assert_eq!(fields[3], "3");
        let l: u64 = fields[4].parse().unwrap();
        let v: u64 = fields[5].parse().unwrap();
        assert!(l >= v && v > 0);
    }

    #[test]
    fn sweep_csv_renders_fit_and_blank_cells() {
        let rows = vec![
            SweepRow {
                threshold: 0.1,
                unit_beats: UnitBeats::new(1, 2),
                fit: Some(HeapsFit::from_coefficients(0.5, 1.0, 0.2)),
            },
            SweepRow {
                threshold: 0.2,
                unit_beats: UnitBeats::new(3, 2),
                fit: None,
            },
        ];
        let text = sweep_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "threshold,unit,alpha,log10K,rho");
        let with_fit = lines.next().unwrap();
        assert!(with_fit.starts_with("0.1,0.5,0.5,1,"));
        assert_eq!(lines.next().unwrap(), "0.2,1.5,,,");
    }

    #[test]
    fn key_histogram_has_24_rows_in_index_order() {
        let mut hist = [0u64; 24];
        hist[7] = 4;
        hist[21] = 2;
        let text = key_histogram_csv(&hist);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 25);
        assert_eq!(lines[0], "key_index,key,count");
        assert_eq!(lines[1], "0,Cmaj,0");
        assert_eq!(lines[8], "7,Gmaj,4");
        assert_eq!(lines[22], "21,Amin,2");
    }

    #[test]
    fn report_json_round_trips_with_expected_keys() {
        let analysis = analysis();
        let text = report_json(&analysis, &meta());
        let value: Value = serde_json::from_str(&text).unwrap();
        let heaps = value.get("heaps").unwrap();
        for key in ["alpha", "log10K", "rho", "sigma_y", "sigma_c", "n"] {
            assert!(heaps.get(key).is_some(), "missing heaps key {key}");
        }
        assert_eq!(
            heaps.get("n").unwrap().as_u64().unwrap(),
            analysis.rows.len() as u64
        );
        assert_eq!(value["meta"]["unit"], "1");
        assert_eq!(value["meta"]["level"], "composer");
        assert!(value["trends"].get("richness").is_some());
        assert!(value["correlations"].get("pearson").is_some());
        assert!(value["correlations"].get("kendall").is_some());
        assert!(value["pmf_tokens"]["densities"].is_array());
        assert_eq!(value["heaps_refusal"], Value::Null);
    }

    #[test]
    fn report_json_refusal_for_single_dataset() {
        let single = vec![corpus().remove(0)];
        let analysis = analyze(&single, Level::Composer, 5);
        let value: Value =
            serde_json::from_str(&report_json(&analysis, &meta())).unwrap();
        assert_eq!(value["heaps"], Value::Null);
        assert!(value["heaps_refusal"].is_string());
    }

    #[test]
    fn report_json_is_deterministic() {
        let analysis = analysis();
        assert_eq!(
            report_json(&analysis, &meta()),
            report_json(&analysis, &meta())
        );
    }

    #[test]
    fn scatter_tsv_has_fit_column() {
        let analysis = analysis();
        let text = heaps_scatter_tsv(&analysis.rows, analysis.heaps.as_ref());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label\tL\tV\tlog10_L\tlog10_V\tfit_log10_V");
        assert_eq!(lines.len(), 5);
        let fields: Vec<&str> = lines[1].split('\t').collect();
        assert_eq!(fields.len(), 6);
        let fitted: f64 = fields[5].parse().unwrap();
        let fit = analysis.heaps.unwrap();
        let expect = fit.log10k + fit.alpha * fields[3].parse::<f64>().unwrap();
        assert!((fitted - expect).abs() < 1e-12);
    }

    #[test]
    fn richness_tsv_skips_missing_values() {
        let mut rows = analysis().rows;
        rows[2].richness = None;
        let text = richness_vs_year_tsv(&rows);
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn pmf_tsv_one_line_per_bin() {
        let analysis = analysis();
        let pmf = analysis.pmf_tokens.unwrap();
        let text = pmf_tsv(&pmf);
        assert_eq!(text.lines().count(), pmf.counts.len() + 1);
        let total: f64 = text
            .lines()
            .skip(1)
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                let lo: f64 = f[0].parse().unwrap();
                let hi: f64 = f[1].parse().unwrap();
                let density: f64 = f[4].parse().unwrap();
                density * (hi - lo)
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
