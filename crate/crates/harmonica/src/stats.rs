//! Per-dataset vocabulary metrics: entropy, mean codeword filling, and the
//! classical richness indices (type-token ratio, Guiraud, Herdan).

use crate::corpus::FrequencyTable;
use crate::real::{KahanSum, Real};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("invalid domain: {0}")]
    DomainError(String),
    #[error("invalid years: birth {birth} not before death {death}")]
    InvalidYears { birth: i32, death: i32 },
}

/// One output row of the per-composer metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub composer: String,
    pub year: f64,
    pub pieces: u32,
    pub tokens: u64,
    pub types: u32,
    pub ttr: f64,
    pub guiraud: f64,
    pub herdan: f64,
    pub entropy_bits: f64,
    pub mean_filling: f64,
    /// Residual richness from the Heaps fit; absent when no fit was made.
    pub richness: Option<f64>,
}

/// Shannon entropy S = −Σ (n_r/L) log2(n_r/L), in bits.
pub fn entropy<R: Real>(table: &FrequencyTable) -> Result<R, StatsError> {
    if table.is_empty() {
        return Err(StatsError::EmptyTable);
    }
    let total = R::of_u64(table.tokens());
    let mut sum = KahanSum::new();
    for (_, count) in table.iter_nonzero() {
        let p = R::of_u64(count) / total;
        sum.add(p * p.log2());
    }
    let bits = -sum.total();
    // A single-type table sums to exactly zero; negation must not leak -0.
    Ok(if bits == R::zero() { R::zero() } else { bits })
}

/// Token-weighted mean number of set bits, ⟨F⟩ = Σ (n_r/L) F_r.
pub fn mean_filling<R: Real>(table: &FrequencyTable) -> Result<R, StatsError> {
    if table.is_empty() {
        return Err(StatsError::EmptyTable);
    }
    let total = R::of_u64(table.tokens());
    let mut sum = KahanSum::new();
    for (word, count) in table.iter_nonzero() {
        sum.add(R::of_u64(count) / total * R::of_u64(u64::from(word.filling())));
    }
    Ok(sum.total())
}

fn check_lv(tokens: u64, types: u32) -> Result<(), StatsError> {
    if types < 1 {
        return Err(StatsError::DomainError("V must be at least 1".into()));
    }
    if u64::from(types) > tokens {
        return Err(StatsError::DomainError(format!(
            "V = {types} exceeds L = {tokens}"
        )));
    }
    Ok(())
}

/// Type-token ratio V/L.
pub fn ttr<R: Real>(tokens: u64, types: u32) -> Result<R, StatsError> {
    check_lv(tokens, types)?;
    Ok(R::of_u64(u64::from(types)) / R::of_u64(tokens))
}

/// Guiraud's index V/√L.
pub fn guiraud<R: Real>(tokens: u64, types: u32) -> Result<R, StatsError> {
    check_lv(tokens, types)?;
    Ok(R::of_u64(u64::from(types)) / R::of_u64(tokens).sqrt())
}

/// Herdan's index log V / log L (base-invariant; computed base-10).
/// V = 1 gives 0, the boundary value.
pub fn herdan<R: Real>(tokens: u64, types: u32) -> Result<R, StatsError> {
    check_lv(tokens, types)?;
    if tokens < 2 {
        return Err(StatsError::DomainError(
            "herdan needs L of at least 2".into(),
        ));
    }
    Ok(R::of_u64(u64::from(types)).log10() / R::of_u64(tokens).log10())
}

/// Chronological placement of a composer: (birth + 20 + death) / 2.
pub fn composer_year<R: Real>(birth: i32, death: i32) -> Result<R, StatsError> {
    if birth >= death {
        return Err(StatsError::InvalidYears { birth, death });
    }
    let sum = i64::from(birth) + 20 + i64::from(death);
    Ok(R::of_f64(sum as f64) / R::of_f64(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chroma::Codeword;
    use proptest::prelude::*;

    fn table_from_counts(counts: &[(u16, u64)]) -> FrequencyTable {
        let mut table = FrequencyTable::new();
        for &(id, n) in counts {
            table.add_count(Codeword::from_id(id), n);
        }
        table
    }

    #[test]
    fn single_type_has_zero_entropy() {
        let table = table_from_counts(&[(42, 17)]);
        assert_eq!(entropy::<f64>(&table).unwrap(), 0.0);
    }

    #[test]
    fn uniform_alphabet_has_exactly_twelve_bits() {
        let mut table = FrequencyTable::new();
        for id in 0..4096u16 {
            table.add(Codeword::from_id(id));
        }
        assert_eq!(entropy::<f64>(&table).unwrap(), 12.0);
    }

    #[test]
    fn two_equal_types_have_one_bit() {
        let table = table_from_counts(&[(1, 1), (2, 1)]);
        assert_eq!(entropy::<f64>(&table).unwrap(), 1.0);
    }

    #[test]
    fn empty_table_is_an_error() {
        let table = FrequencyTable::new();
        assert_eq!(entropy::<f64>(&table), Err(StatsError::EmptyTable));
        assert_eq!(mean_filling::<f64>(&table), Err(StatsError::EmptyTable));
    }

    #[test]
    fn entropy_is_label_invariant_filling_is_not() {
        let ceg = Codeword::from_pitch_classes([0, 4, 7]).id();
        let c = Codeword::from_pitch_classes([0]).id();
        let a = table_from_counts(&[(ceg, 3), (0, 1)]);
        let b = table_from_counts(&[(c, 3), (0, 1)]);
        assert_eq!(entropy::<f64>(&a).unwrap(), entropy::<f64>(&b).unwrap());
        assert!(mean_filling::<f64>(&a).unwrap() > mean_filling::<f64>(&b).unwrap());
    }

    #[test]
    fn mean_filling_examples() {
        let ceg = Codeword::from_pitch_classes([0, 4, 7]).id();
        let half_and_half = table_from_counts(&[(0, 1), (ceg, 1)]);
        assert_eq!(mean_filling::<f64>(&half_and_half).unwrap(), 1.5);
        let triads_only = table_from_counts(&[(ceg, 5)]);
        assert_eq!(mean_filling::<f64>(&triads_only).unwrap(), 3.0);
    }

    #[test]
    fn entropy_of_disjoint_equal_merge_matches_mixing_formula() {
        let a = table_from_counts(&[(1, 6), (2, 2)]);
        let b = table_from_counts(&[(3, 4), (4, 3), (5, 1)]);
        let sa: f64 = entropy(&a).unwrap();
        let sb: f64 = entropy(&b).unwrap();
        let mut merged = a.clone();
        merged.merge(&b);
        let sm: f64 = entropy(&merged).unwrap();
        assert!((sm - ((sa + sb) / 2.0 + 1.0)).abs() < 1e-12);
        assert!(sm <= 1.0 + sa.max(sb) + 1e-12);
        assert!(sm >= sa.min(sb));
    }

    #[test]
    fn index_examples() {
        assert_eq!(ttr::<f64>(100, 50).unwrap(), 0.5);
        assert_eq!(guiraud::<f64>(100, 50).unwrap(), 5.0);
        assert!((herdan::<f64>(10_000, 100).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(ttr::<f64>(10, 10).unwrap(), 1.0);
        assert_eq!(herdan::<f64>(10, 10).unwrap(), 1.0);
        assert_eq!(herdan::<f64>(50, 1).unwrap(), 0.0);
    }

    #[test]
    fn index_domain_errors() {
        assert!(matches!(ttr::<f64>(10, 0), Err(StatsError::DomainError(_))));
        assert!(matches!(ttr::<f64>(5, 6), Err(StatsError::DomainError(_))));
        assert!(matches!(
            herdan::<f64>(1, 1),
            Err(StatsError::DomainError(_))
        ));
    }

    #[test]
    fn composer_year_examples() {
        assert_eq!(composer_year::<f64>(1685, 1750).unwrap(), 1727.5);
        assert_eq!(composer_year::<f64>(1397, 1474).unwrap(), 1445.5);
        for y in [1500, 1701, 1888] {
            assert_eq!(composer_year::<f64>(y, y + 2).unwrap(), f64::from(y) + 11.0);
        }
        assert_eq!(
            composer_year::<f64>(1750, 1685),
            Err(StatsError::InvalidYears {
                birth: 1750,
                death: 1685
            })
        );
    }

    proptest! {
        #[test]
        fn entropy_is_bounded_by_log_types(
            counts in prop::collection::vec((0u16..4096, 1u64..1000), 1..200)
        ) {
            let table = table_from_counts(&counts);
            let s: f64 = entropy(&table).unwrap();
            let v = f64::from(table.types());
            prop_assert!(s >= -1e-12);
            prop_assert!(s <= v.log2() + 1e-9);
            let f: f64 = mean_filling(&table).unwrap();
            prop_assert!((0.0..=12.0).contains(&f));
        }

        #[test]
        fn guiraud_is_ttr_times_root_l(tokens in 1u64..1_000_000, types in 1u32..4096) {
            prop_assume!(u64::from(types) <= tokens);
            let g: f64 = guiraud(tokens, types).unwrap();
            let t: f64 = ttr(tokens, types).unwrap();
            prop_assert!((g - t * (tokens as f64).sqrt()).abs() < 1e-9 * g.max(1.0));
        }

        #[test]
        fn herdan_is_base_invariant(tokens in 2u64..1_000_000, types in 1u32..4096) {
            prop_assume!(u64::from(types) <= tokens);
            let h: f64 = herdan(tokens, types).unwrap();
            let natural = (types as f64).ln() / (tokens as f64).ln();
            prop_assert!((h - natural).abs() < 1e-12);
        }
    }
}
