#![allow(dead_code)]

use harmonica::synth::{FixtureNote, FixtureSpec};
use harmonica::{Codeword, UnitBeats};

/// Composer datasets with published token and type counts, used as ground
/// truth for the corpus-scale fits: (name, birth, death, L, V).
pub const REFERENCE_COMPOSERS: [(&str, i32, i32, u64, u64); 46] = [
    ("Dufay", 1397, 1474, 3008, 190),
    ("Desprez", 1450, 1521, 7118, 250),
    ("Morales", 1500, 1553, 40_380, 333),
    ("Palestrina", 1525, 1594, 20_369, 292),
    ("Lassus", 1532, 1594, 10_988, 304),
    ("Victoria", 1548, 1611, 113_162, 423),
    ("Dowland", 1563, 1626, 12_376, 372),
    ("Gesualdo", 1566, 1613, 8347, 396),
    ("Scheidt", 1587, 1654, 3878, 233),
    ("Lully", 1632, 1687, 17_917, 477),
    ("Pachelbel", 1653, 1706, 48_081, 892),
    ("Bach", 1685, 1750, 757_945, 2630),
    ("D. Scarlatti", 1685, 1757, 12_874, 747),
    ("Haydn", 1732, 1809, 401_162, 2155),
    ("Albrechtsberger", 1736, 1809, 4760, 511),
    ("Clementi", 1752, 1832, 41_458, 1250),
    ("Mozart", 1756, 1791, 504_386, 2516),
    ("Beethoven", 1770, 1827, 670_380, 3146),
    ("Cramer", 1771, 1858, 3949, 657),
    ("Paganini", 1782, 1840, 7692, 713),
    ("Schubert", 1797, 1828, 292_007, 2356),
    ("Berlioz", 1803, 1869, 9333, 805),
    ("Mendelssohn", 1809, 1847, 48_262, 1506),
    ("Chopin", 1810, 1849, 128_373, 2947),
    ("Schumann", 1810, 1856, 103_432, 2423),
    ("Liszt", 1811, 1886, 116_044, 2739),
    ("Gottschalk", 1829, 1869, 19_675, 1035),
    ("Brahms", 1833, 1897, 159_998, 2612),
    ("Guilmant", 1837, 1911, 3397, 522),
    ("Bizet", 1838, 1875, 12_955, 783),
    ("Tchaikovsky", 1840, 1893, 156_749, 2748),
    ("Dvorak", 1841, 1904, 110_855, 2350),
    ("Grieg", 1843, 1907, 43_033, 1430),
    ("Faure", 1845, 1924, 49_608, 1704),
    ("Mahler", 1860, 1911, 43_877, 3034),
    ("Debussy", 1862, 1918, 91_600, 2728),
    ("Busoni", 1866, 1924, 26_898, 2370),
    ("Satie", 1866, 1925, 14_179, 913),
    ("Reger", 1873, 1916, 12_205, 1725),
    ("Rachmaninoff", 1873, 1943, 13_783, 2231),
    ("Medtner", 1880, 1951, 4653, 1233),
    ("Bartok", 1881, 1945, 9203, 1766),
    ("Stravinsky", 1882, 1971, 20_481, 2443),
    ("Hindemith", 1895, 1963, 10_626, 2039),
    ("Gershwin", 1898, 1937, 9988, 1827),
    ("Messiaen", 1908, 1992, 4386, 541),
];

pub fn reference_points() -> Vec<(u64, u64)> {
    REFERENCE_COMPOSERS
        .iter()
        .map(|&(_, _, _, l, v)| (l, v))
        .collect()
}

pub fn beats(numer: u64, denom: u64) -> UnitBeats {
    UnitBeats::new(numer, denom)
}

/// Two voices over four 4/4 beats; hand-computed frame weights give
/// codewords {C,E}, {C,G,A}, {C,F}, {C,G}.
pub fn two_voice_fixture() -> FixtureSpec {
    FixtureSpec::common_time(vec![
        FixtureNote::new(64, beats(0, 1), beats(1, 1)),
        FixtureNote::new(67, beats(1, 1), beats(1, 2)),
        FixtureNote::new(69, beats(3, 2), beats(1, 2)),
        FixtureNote::new(72, beats(2, 1), beats(2, 1)),
        FixtureNote::new(48, beats(0, 1), beats(2, 1)).on_channel(1),
        FixtureNote::new(53, beats(2, 1), beats(1, 1)).on_channel(1),
        FixtureNote::new(55, beats(3, 1), beats(1, 1)).on_channel(1),
    ])
}

pub fn expected_two_voice_codewords() -> Vec<Codeword> {
    vec![
        Codeword::from_pitch_classes([0, 4]),
        Codeword::from_pitch_classes([0, 7, 9]),
        Codeword::from_pitch_classes([0, 5]),
        Codeword::from_pitch_classes([0, 7]),
    ]
}

/// Eight beats of a root-position G major triad.
pub fn g_major_triads() -> FixtureSpec {
    let mut notes = Vec::new();
    for beat in 0..8u64 {
        for pitch in [55u8, 59, 62] {
            notes.push(FixtureNote::new(pitch, beats(beat, 1), beats(1, 1)));
        }
    }
    FixtureSpec::common_time(notes)
}

/// Textbook least-squares via raw normal equations, kept deliberately
/// different from the library's centered-moment implementation so the two
/// can cross-check each other: returns (alpha, log10k, rho, sigma_c).
pub fn normal_equation_fit(points: &[(u64, u64)]) -> (f64, f64, f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(l, v) in points {
        let x = (l as f64).log10();
        let y = (v as f64).log10();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    let alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let log10k = (sy - alpha * sx) / n;
    let rho = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
    let sigma_y = (syy / n - (sy / n) * (sy / n)).sqrt();
    let sigma_c = sigma_y * (1.0 - rho * rho).max(0.0).sqrt();
    (alpha, log10k, rho, sigma_c)
}
