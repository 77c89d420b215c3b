//! The cross-validation suite behind `zcorr validate`.
//!
//! Each check is a self-contained function returning a [`CheckOutcome`];
//! [`run_validation`] runs the fast set, or the fast set plus the seeded
//! stochastic checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlators::wick::{g_wick_summary, kappa_point_wick};
use crate::correlators::{
    g_lemma, k_npoint_berezin, kappa_curve, kappa_low_codim_closed, kappa_pair_berezin,
    kappa_pair_expansion, kappa_point_closed, kappa_point_kmm, CorrelationQuery,
};
use crate::error::{Error, Result};
use crate::kernel::{pair_kernel, PointConfig};
use crate::linalg::CMatrix;
use crate::montecarlo::{ensemble_su2, estimate_kappa_mc, EnsembleConfig, MCConfig};
use crate::reference::{low_codim_table, point_table, PrintedCoefficient};
use crate::series::{kappa_series, parity_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::domain(format!("level must be fast or full, got {s:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

/// A deliberate corruption of one stored coefficient: `κ_km` at `r^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fault {
    pub k: usize,
    pub m: usize,
    pub power: i64,
}

impl FromStr for Fault {
    type Err = Error;

    /// Parses `K,M,POWER`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::domain(format!("fault must be K,M,POWER, got {s:?}"));
        let [k, m, power] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(Fault {
            k: k.parse().map_err(|_| bad())?,
            m: m.parse().map_err(|_| bad())?,
            power: power.parse().map_err(|_| bad())?,
        })
    }
}

impl Fault {
    fn apply(&self, table: &mut [PrintedCoefficient]) -> bool {
        let mut hit = false;
        for c in table.iter_mut() {
            if (c.k, c.m, c.power) == (self.k, self.m, self.power) {
                c.value += BigRational::one();
                hit = true;
            }
        }
        hit
    }

    /// Whether some stored coefficient is addressed by this fault.
    pub fn is_stored(&self) -> bool {
        let mut all = point_table();
        all.extend(low_codim_table(CODIM_M_MAX));
        self.apply(&mut all)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidateOptions {
    pub level: Level,
    pub seed: u64,
    pub workers: usize,
    pub fault: Option<Fault>,
}

impl ValidateOptions {
    pub fn new(level: Level, seed: u64) -> Self {
        Self {
            level,
            seed,
            workers: 0,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: &str, name: &str, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            summary
        } else {
            let shown: Vec<&str> = failures.iter().take(3).map(String::as_str).collect();
            let more = failures.len().saturating_sub(3);
            let tail = if more > 0 { format!(" (+{more} more)") } else { String::new() };
            format!("{}{tail}", shown.join("; "))
        };
        Self {
            id: id.to_string(),
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{:<3} {status}  {:<width$}  {}", c.id, c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

const SERIES_ORDER: usize = 12;
const CODIM_M_MAX: usize = 8;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn compare_table(table: &[PrintedCoefficient]) -> Vec<String> {
    let mut groups: Vec<(usize, usize)> = table.iter().map(|c| (c.k, c.m)).collect();
    groups.dedup();
    let mut failures = Vec::new();
    for (k, m) in groups {
        let series = match kappa_series(k, m, SERIES_ORDER) {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("κ_{k}{m}: {e}"));
                continue;
            }
        };
        for c in table.iter().filter(|c| (c.k, c.m) == (k, m)) {
            match series.coeff(c.u_power()) {
                Some(v) if v == c.value => {}
                Some(v) => failures.push(format!(
                    "κ_{k}{m} r^{}: stored {}, computed {v}",
                    c.power, c.value
                )),
                None => failures.push(format!("κ_{k}{m} r^{}: beyond computed order", c.power)),
            }
        }
    }
    failures
}

/// Every stored point-case coefficient equals the exact series.
pub fn check_point_series(fault: Option<Fault>) -> CheckOutcome {
    let mut table = point_table();
    if let Some(f) = fault {
        f.apply(&mut table);
    }
    let n = table.len();
    CheckOutcome::new(
        "1",
        "exact series κ_11..κ_66",
        compare_table(&table),
        format!("{n} coefficients exact"),
    )
}

/// The codimension 1–3 coefficient formulas at `m = k..8` equal the exact
/// series.
pub fn check_low_codim_series(fault: Option<Fault>) -> CheckOutcome {
    let mut table = low_codim_table(CODIM_M_MAX);
    if let Some(f) = fault {
        f.apply(&mut table);
    }
    let n = table.len();
    CheckOutcome::new(
        "2",
        "exact series codim 1-3",
        compare_table(&table),
        format!("{n} coefficients exact"),
    )
}

pub const ROUTE_RADII: [f64; 6] = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];

/// All routes to `κ_km(r)` for `k ≤ m ≤ 4` agree to `1e−10` relative.
pub fn check_routes() -> CheckOutcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for m in 1..=4 {
        for k in 1..=m {
            for &r in &ROUTE_RADII {
                let routes = (|| -> Result<Vec<(&str, f64)>> {
                    let cfg = PointConfig::standard_pair(r, m)?;
                    let mut v = vec![
                        ("theorem", k_npoint_berezin(&cfg, k)?),
                        ("pair", kappa_pair_berezin(r, k, m)?),
                        ("expansion", kappa_pair_expansion(r, k, m)?),
                    ];
                    if k <= 3 {
                        v.push(("codim", kappa_low_codim_closed(r, k, m)?));
                    }
                    if k == m {
                        v.push(("point", kappa_point_closed(r, m)?));
                        v.push(("point-f", kappa_point_kmm(r, m)?));
                    }
                    Ok(v)
                })();
                match routes {
                    Err(e) => failures.push(format!("κ_{k}{m}({r}): {e}")),
                    Ok(v) => {
                        let base = v[0].1;
                        for (name, x) in &v[1..] {
                            let e = rel_err(*x, base);
                            worst = worst.max(e);
                            if !(e <= 1e-10) {
                                failures.push(format!("κ_{k}{m}({r}) {name}: rel err {e:.2e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    CheckOutcome::new("3", "cross-route equality", failures, format!("max rel err {worst:.1e}"))
}

/// Permanent enumeration equals the lemma formula and the point closed form.
pub fn check_wick() -> CheckOutcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for m in 1..=4 {
        for r in [0.5, 1.0, 2.0] {
            let outcome = (|| -> Result<(f64, f64)> {
                let pk = pair_kernel(r)?;
                let g = g_wick_summary(&pk, m)?.g;
                let e1 = rel_err(g, g_lemma(&pk, m));
                let e2 = rel_err(kappa_point_wick(&pk, m)?, kappa_point_closed(r, m)?);
                Ok((e1, e2))
            })();
            match outcome {
                Err(e) => failures.push(format!("m={m} r={r}: {e}")),
                Ok((e1, e2)) => {
                    worst = worst.max(e1).max(e2);
                    if !(e1 <= 1e-12) {
                        failures.push(format!("G_{m}({r}) enumeration vs lemma: {e1:.2e}"));
                    }
                    if !(e2 <= 1e-12) {
                        failures.push(format!("κ_{m}{m}({r}) Wick vs closed: {e2:.2e}"));
                    }
                }
            }
        }
    }
    CheckOutcome::new("4", "Wick enumeration", failures, format!("max rel err {worst:.1e}, signs positive"))
}

fn random_unitary(rng: &mut impl Rng) -> CMatrix<f64> {
    let (t, p1, p2, g) = (
        rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
        rng.random_range(0.0..std::f64::consts::TAU),
        rng.random_range(0.0..std::f64::consts::TAU),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let a = Complex64::from_polar(t.cos(), p1);
    let b = Complex64::from_polar(t.sin(), p2);
    let phase = Complex64::from_polar(1.0, g);
    let rows = [[a, -b.conj()], [b, a.conj()]];
    CMatrix::from_fn(2, 2, |i, j| rows[i][j] * phase)
}

fn random_triangle(rng: &mut impl Rng, scale: f64) -> Vec<Vec<Complex64>> {
    (0..3)
        .map(|_| {
            (0..2)
                .map(|_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
                .collect()
        })
        .collect()
}

const PERMUTATIONS_3: [[usize; 3]; 5] = [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `n = 1` normalization and the symmetries of three-point functions in `C²`.
pub fn check_npoint(seed: u64) -> CheckOutcome {
    let mut failures = Vec::new();
    for (k, m) in [(1, 1), (1, 2), (2, 2), (1, 3), (3, 3)] {
        let one = PointConfig::new(vec![vec![Complex64::new(0.3, -0.2); m]])
            .and_then(|cfg| k_npoint_berezin(&cfg, k));
        match one {
            Ok(v) if (v - 1.0).abs() <= 1e-12 => {}
            Ok(v) => failures.push(format!("n=1 (k,m)=({k},{m}): {v}")),
            Err(e) => failures.push(format!("n=1 (k,m)=({k},{m}): {e}")),
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..10 {
        let points = random_triangle(&mut rng, 1.0);
        let u = random_unitary(&mut rng);
        let shift: Vec<Complex64> = (0..2)
            .map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
            .collect();
        let far = random_triangle(&mut rng, 1.0);
        for k in [1, 2] {
            let outcome = (|| -> Result<Vec<String>> {
                let mut bad = Vec::new();
                let cfg = PointConfig::new(points.clone())?;
                let v = k_npoint_berezin(&cfg, k)?;
                for order in PERMUTATIONS_3 {
                    let e = rel_err(k_npoint_berezin(&cfg.reordered(&order)?, k)?, v);
                    if !(e <= 1e-12) {
                        bad.push(format!("config {trial} k={k} permutation {order:?}: {e:.2e}"));
                    }
                }
                let moved = cfg.transformed(&u)?.translated(&shift)?;
                let e = rel_err(k_npoint_berezin(&moved, k)?, v);
                if !(e <= 1e-9) {
                    bad.push(format!("config {trial} k={k} rigid motion: {e:.2e}"));
                }
                let spread = PointConfig::new(far.clone())?;
                let stretch = 8.0 / spread.min_distance();
                let sep: Vec<Vec<Complex64>> =
                    far.iter().map(|z| z.iter().map(|c| c * stretch).collect()).collect();
                let w = k_npoint_berezin(&PointConfig::new(sep)?, k)?;
                if !((w - 1.0).abs() <= 1e-8) {
                    bad.push(format!("config {trial} k={k} separated: {w}"));
                }
                Ok(bad)
            })();
            match outcome {
                Ok(bad) => failures.extend(bad),
                Err(e) => failures.push(format!("config {trial} k={k}: {e}")),
            }
        }
    }
    CheckOutcome::new("5", "n-point normalization and symmetry", failures, "10 configurations, k = 1, 2".into())
}

/// Leading small-distance behaviour, `κ_22(0.01)`, and the parity rule.
pub fn check_short_distance() -> CheckOutcome {
    let mut failures = Vec::new();
    let r = 0.05f64;
    for m in 1..=6 {
        match kappa_point_closed(r, m) {
            Ok(v) => {
                let scaled = v * r.powi(2 * m as i32 - 4);
                let want = (m as f64 + 1.0) / 4.0;
                if !(rel_err(scaled, want) <= 0.02) {
                    failures.push(format!("κ_{m}{m}(0.05)·r^{}: {scaled} vs {want}", 2 * m as i32 - 4));
                }
            }
            Err(e) => failures.push(format!("κ_{m}{m}(0.05): {e}")),
        }
    }
    match kappa_point_closed(0.01f64, 2) {
        Ok(v) if (v - 0.75).abs() <= 1e-3 => {}
        Ok(v) => failures.push(format!("κ_22(0.01) = {v}")),
        Err(e) => failures.push(format!("κ_22(0.01): {e}")),
    }
    for m in 1..=8 {
        match parity_check(m, SERIES_ORDER) {
            Ok(true) => {}
            Ok(false) => failures.push(format!("parity fails for m = {m}")),
            Err(e) => failures.push(format!("parity m = {m}: {e}")),
        }
    }
    CheckOutcome::new("6", "short-distance laws", failures, "leading terms, κ_22(0.01), parity m ≤ 8".into())
}

pub const MC_CASES: [(usize, usize, f64); 4] = [(1, 1, 1.0), (2, 2, 1.0), (1, 3, 0.5), (3, 3, 2.0)];
pub const MC_SAMPLES: u64 = 1_000_000;

/// Monte-Carlo estimates within `4σ` of the deterministic value, `σ/mean < 1%`.
pub fn check_monte_carlo(seed: u64, workers: usize) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut zs = Vec::new();
    for (k, m, r) in MC_CASES {
        let outcome = (|| -> Result<(f64, f64)> {
            let q = CorrelationQuery::pair(r, k, m)?;
            let est = estimate_kappa_mc(&q, &MCConfig::new(MC_SAMPLES, seed)?.with_workers(workers))?;
            let exact = q.evaluate()?;
            Ok((est.z_score(exact), est.stderr / est.mean))
        })();
        match outcome {
            Ok((z, rel)) => {
                zs.push(format!("{z:.2}"));
                if !(z <= 4.0 && rel < 0.01) {
                    failures.push(format!("κ_{k}{m}({r}): z = {z:.2}, σ/mean = {rel:.4}"));
                }
            }
            Err(e) => failures.push(format!("κ_{k}{m}({r}): {e}")),
        }
    }
    CheckOutcome::new("7", "Monte-Carlo oracle", failures, format!("z-scores {}", zs.join(", ")))
}

pub const ENSEMBLE_DEGREE: usize = 200;
pub const ENSEMBLE_TRIALS: usize = 2000;

/// SU(2) ensemble: `κ̂` within 10% of `κ_11` at `r ∈ {0.5, 1, 1.5, 2}`, and
/// within one standard error of 1 at `r = 3`.
pub fn check_ensemble(seed: u64, workers: usize) -> Vec<CheckOutcome> {
    let report = EnsembleConfig::new(ENSEMBLE_DEGREE, ENSEMBLE_TRIALS, EnsembleConfig::default_edges(), seed)
        .map(|c| c.with_workers(workers))
        .and_then(|c| ensemble_su2(&c));
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            return vec![
                CheckOutcome::new("8a", "ensemble vs κ_11", vec![e.to_string()], String::new()),
                CheckOutcome::new("8b", "ensemble → 1 at r ≈ 3", vec![e.to_string()], String::new()),
            ]
        }
    };
    let bin = |r: f64| report.bins.iter().find(|b| (b.bin_center - r).abs() < 1e-9);
    let mut failures = Vec::new();
    let mut rels = Vec::new();
    for r in [0.5, 1.0, 1.5, 2.0] {
        match (bin(r), kappa_point_closed(r, 1)) {
            (Some(b), Ok(exact)) => {
                let e = rel_err(b.kappa_hat, exact);
                rels.push(format!("{e:.3}"));
                if !(e <= 0.1) {
                    failures.push(format!("r = {r}: κ̂ = {:.4}, κ_11 = {exact:.4}", b.kappa_hat));
                }
            }
            _ => failures.push(format!("no bin centred at r = {r}")),
        }
    }
    let a = CheckOutcome::new(
        "8a",
        "ensemble vs κ_11",
        failures,
        format!("rel err {} ({} discarded)", rels.join(", "), report.discarded),
    );
    let b = match bin(3.0) {
        Some(b) => {
            let dev = (b.kappa_hat - 1.0).abs();
            let line = format!("κ̂(3) = {:.4} ± {:.4}", b.kappa_hat, b.stderr);
            let failures = if dev <= b.stderr { vec![] } else { vec![format!("{line}, |κ̂ − 1| = {dev:.4}")] };
            CheckOutcome::new("8b", "ensemble → 1 at r ≈ 3", failures, line)
        }
        None => CheckOutcome::new("8b", "ensemble → 1 at r ≈ 3", vec!["no bin centred at r = 3".into()], String::new()),
    };
    vec![a, b]
}

/// The `κ_33` curve on `[0.2, 4]`: finite, positive, `≈ r^{−2}` at 0.2 and
/// `≈ 1` at 4.
pub fn check_curve() -> CheckOutcome {
    let mut failures = Vec::new();
    let mut summary = String::new();
    match kappa_curve(3, 3, 0.2f64, 4.0, 200) {
        Err(e) => failures.push(e.to_string()),
        Ok(curve) => {
            if let Some((r, v)) = curve.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
                failures.push(format!("κ_33({r}) = {v}"));
            }
            let (first, last) = (curve[0].1, curve[curve.len() - 1].1);
            if !(first > 20.0 && rel_err(first, 25.0) <= 0.2) {
                failures.push(format!("κ_33(0.2) = {first}"));
            }
            if !((last - 1.0).abs() <= 1e-6) {
                failures.push(format!("κ_33(4) = {last}"));
            }
            summary = format!("κ_33(0.2) = {first:.4}, |κ_33(4) − 1| = {:.1e}", (last - 1.0).abs());
        }
    }
    CheckOutcome::new("9", "κ_33 curve", failures, summary)
}

pub fn run_validation(opts: &ValidateOptions) -> ValidationReport {
    let mut checks = vec![
        check_point_series(opts.fault),
        check_low_codim_series(opts.fault),
        check_routes(),
        check_wick(),
        check_npoint(opts.seed),
        check_short_distance(),
    ];
    if opts.level == Level::Full {
        checks.push(check_monte_carlo(opts.seed, opts.workers));
        checks.extend(check_ensemble(opts.seed, opts.workers));
    }
    checks.push(check_curve());
    ValidationReport {
        level: opts.level,
        seed: opts.seed,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_parsing() {
        let f: Fault = "1,1,22".parse().unwrap();
        assert_eq!(f, Fault { k: 1, m: 1, power: 22 });
        assert!(" 2, 5, -4 ".parse::<Fault>().is_ok());
        assert!("1,1".parse::<Fault>().is_err());
        assert!("a,1,2".parse::<Fault>().is_err());
        assert!(f.is_stored());
        assert!(!Fault { k: 1, m: 1, power: 4 }.is_stored());
    }

    #[test]
    fn injected_fault_is_named() {
        let fault = Fault { k: 2, m: 2, power: 4 };
        let out = check_point_series(Some(fault));
        assert!(!out.passed);
        assert!(out.detail.contains("κ_22 r^4"), "{}", out.detail);
        let out = check_low_codim_series(Some(Fault { k: 3, m: 7, power: -2 }));
        assert!(!out.passed);
        assert!(out.detail.contains("κ_37 r^-2"), "{}", out.detail);
    }

    #[test]
    fn level_round_trip() {
        for l in [Level::Fast, Level::Full] {
            assert_eq!(l.to_string().parse::<Level>().unwrap(), l);
        }
        assert!("slow".parse::<Level>().is_err());
    }
}
