//! Published expansion coefficients of `κ_km`, stored as exact rationals.
//!
//! Powers are exponents of `r` (always even); the series module works in
//! `u = r²`, so `u^p` corresponds to `power = 2p`.

use num_bigint::BigInt;
use num_rational::BigRational;

/// One printed term `value · r^power` of `κ_km`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedCoefficient {
    pub k: usize,
    pub m: usize,
    pub power: i64,
    pub value: BigRational,
}

impl PrintedCoefficient {
    pub fn u_power(&self) -> i64 {
        self.power / 2
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

type TableRow = (usize, [(i64, i64, i64); 6]);

/// Point-case expansions `κ_11, …, κ_66`.
pub fn point_table() -> Vec<PrintedCoefficient> {
    #[rustfmt::skip]
    let rows: [TableRow; 6] = [
        (1, [(2, 1, 2), (6, -1, 36), (10, 1, 720), (14, -1, 16800), (18, 1, 435456), (22, -691, 8382528000)]),
        (2, [(0, 3, 4), (4, 1, 24), (8, -1, 288), (12, 1, 4800), (16, -1, 96768), (20, 691, 1524096000)]),
        (3, [(-2, 1, 1), (2, 1, 4), (6, -11, 2160), (10, -1, 50400), (14, 1, 80640), (18, -4871, 5029516800)]),
        (4, [(-4, 5, 4), (0, 95, 144), (4, 19, 576), (8, -79, 40320), (12, 7, 82944), (16, -6049, 2235340800)]),
        (5, [(-6, 3, 2), (-2, 4, 3), (2, 55, 288), (6, -19, 16800), (10, -257, 1451520), (14, 21337, 1397088000)]),
        (6, [(-8, 7, 4), (-4, 7, 3), (0, 5257, 8640), (4, 407, 14400), (8, -103, 82944), (12, 38177, 1197504000)]),
    ];
    rows.iter()
        .flat_map(|(m, terms)| {
            terms.iter().map(move |&(power, n, d)| PrintedCoefficient {
                k: *m,
                m: *m,
                power,
                value: rat(n, d),
            })
        })
        .collect()
}

/// Codimension 1–3 expansion coefficients as functions of `m`, evaluated at
/// one admissible `m` (`k ≤ m`). Empty for other `k`.
pub fn low_codim_terms(k: usize, m: usize) -> Vec<PrintedCoefficient> {
    if k == 0 || k > 3 || m < k {
        return Vec::new();
    }
    let x = m as i64;
    let terms: Vec<(i64, i64, i64)> = match k {
        1 => vec![
            (-2, x - 1, x),
            (0, x - 1, 2 * x),
            (2, (x + 2) * (x + 1), 12 * x * x),
            (6, -(x + 4) * (x + 3), 720 * x * x),
            (10, (x + 6) * (x + 5), 30240 * x * x),
            (14, -(x + 8) * (x + 7), 1209600 * x * x),
        ],
        2 => vec![
            (-4, x - 2, x),
            (-2, x - 2, x),
            (0, 5 * x * x - 7 * x + 12, 12 * (x - 1) * x),
            (2, (x - 2) * (x + 2) * (x + 1), 12 * (x - 1) * x * x),
            (4, (x + 3) * (x + 2), 240 * (x - 1) * x),
            (6, -(x - 2) * (x + 4) * (x + 3), 720 * (x - 1) * x * x),
        ],
        _ => vec![
            (-6, x - 3, x),
            (-4, 3 * (x - 3), 2 * x),
            (-2, x * x - 4 * x + 6, (x - 2) * x),
            (0, (x - 3) * (3 * x * x - x + 8), 8 * x * (x - 1) * (x - 2)),
            (
                2,
                (x + 2) * (x + 1) * (19 * x * x - 79 * x + 120),
                240 * x * x * (x - 1) * (x - 2),
            ),
            (4, (x - 3) * (x + 3) * (x + 2), 160 * x * (x - 1) * (x - 2)),
        ],
    };
    terms
        .into_iter()
        .map(|(power, n, d)| PrintedCoefficient {
            k,
            m,
            power,
            value: rat(n, d),
        })
        .collect()
}

/// `low_codim_terms` for `k ∈ {1, 2, 3}` and every admissible `m ≤ m_max`.
pub fn low_codim_table(m_max: usize) -> Vec<PrintedCoefficient> {
    (1..=3)
        .flat_map(|k| (k..=m_max).flat_map(move |m| low_codim_terms(k, m)))
        .collect()
}
