use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;
use zcorr::correlators::wick::kappa_point_wick;
use zcorr::correlators::{
    k_npoint_berezin, kappa_curve, kappa_low_codim_closed, kappa_pair_berezin, kappa_pair_expansion,
    kappa_point_closed, CorrelationQuery, Geometry,
};
use zcorr::kernel::pair_kernel;
use zcorr::montecarlo::{ensemble_su2, estimate_kappa_mc, EnsembleConfig, MCConfig};
use zcorr::series::kappa_series;
use zcorr::validate::{run_validation, Fault, Level, ValidateOptions};

use crate::args::{
    Cli, Command, CurveArgs, EnsembleArgs, EvalArgs, GeometryArgs, LevelArg, McArgs, Method, SeriesArgs,
    ValidateArgs,
};
use crate::output::{config_line, envelope, num, round15};

pub const THREADS_VAR: &str = "ZCORR_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] zcorr::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use zcorr::Error as E;
        match self {
            CliError::Io { .. } => 3,
            CliError::Usage(_) => 2,
            CliError::Core(
                E::Domain(_)
                | E::Capacity(_)
                | E::IllConditioned { .. }
                | E::NotPositiveDefinite
                | E::UnsupportedSeries { .. }
                | E::MismatchedGenerators { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn threads() -> Result<usize> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {s:?}"))),
        },
    }
}

pub fn dispatch(cli: &Cli) -> Result<ExitCode> {
    let workers = threads()?;
    if workers > 0 {
        // Only fails if a global pool already exists, which never happens here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let json = cli.json;
    match &cli.command {
        Command::Eval(a) => eval(a, json, workers),
        Command::Curve(a) => curve(a, json),
        Command::Series(a) => series(a, json),
        Command::Mc(a) => mc(a, json, workers),
        Command::Ensemble(a) => ensemble(a, json, workers),
        Command::Validate(a) => validate(a, json, workers),
    }
}

fn announce(command: &str, config: &Value) {
    eprintln!("{}", config_line(command, config));
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn read_points(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        action: "read",
        path: path.to_path_buf(),
        source,
    })?;
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "points file {} must be an array of points, each an array of [re, im] pairs: {e}",
            path.display()
        ))
    })?;
    Ok(raw
        .into_iter()
        .map(|z| z.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        .collect())
}

fn query(g: &GeometryArgs) -> Result<CorrelationQuery<f64>> {
    match (&g.r, &g.points) {
        (Some(r), None) => {
            let m = g.m.ok_or_else(|| CliError::Usage("--m is required with --r".into()))?;
            Ok(CorrelationQuery::pair(*r, g.k, m)?)
        }
        (None, Some(path)) => {
            let q = CorrelationQuery::points(read_points(path)?, g.k)?;
            if let Some(m) = g.m.filter(|&m| m != q.m()) {
                return Err(CliError::Usage(format!(
                    "--m {m} disagrees with the points file, whose points lie in C^{}",
                    q.m()
                )));
            }
            Ok(q)
        }
        _ => Err(CliError::Usage("give exactly one of --r or --points".into())),
    }
}

fn geometry_config(q: &CorrelationQuery<f64>, g: &GeometryArgs) -> Value {
    json!({
        "n": q.n(),
        "k": q.k,
        "m": q.m(),
        "r": g.r,
        "points": g.points.as_ref().map(|p| p.display().to_string()),
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Berezin => "berezin",
        Method::Expansion => "expansion",
        Method::Closed => "closed",
        Method::Wick => "wick",
        Method::Mc => "mc",
    }
}

fn eval(a: &EvalArgs, json: bool, workers: usize) -> Result<ExitCode> {
    let q = query(&a.geometry)?;
    let mut config = geometry_config(&q, &a.geometry);
    config["method"] = json!(method_name(a.method));
    if a.method == Method::Mc {
        config["samples"] = json!(a.samples);
        config["seed"] = json!(a.seed);
        config["threads"] = json!(workers);
    }
    announce("eval", &config);
    let (k, m) = (q.k, q.m());
    let need_pair = |name: &str| -> Result<f64> {
        match q.geometry {
            Geometry::Pair { r, .. } => Ok(r),
            Geometry::Points(_) => Err(CliError::Usage(format!(
                "method {name} evaluates the pair correlation and needs --r"
            ))),
        }
    };
    let mut stderr = None;
    let value = match a.method {
        Method::Berezin => match &q.geometry {
            Geometry::Pair { r, .. } => kappa_pair_berezin(*r, k, m)?,
            Geometry::Points(cfg) => k_npoint_berezin(cfg, k)?,
        },
        Method::Expansion => kappa_pair_expansion(need_pair("expansion")?, k, m)?,
        Method::Closed => {
            let r = need_pair("closed")?;
            if k == m {
                kappa_point_closed(r, m)?
            } else if k <= 3 {
                kappa_low_codim_closed(r, k, m)?
            } else {
                return Err(CliError::Usage(format!(
                    "no closed form for (k, m) = ({k}, {m}): need k = m or k <= 3"
                )));
            }
        }
        Method::Wick => {
            let r = need_pair("wick")?;
            if k != m {
                return Err(CliError::Usage(format!("method wick needs k = m, got k = {k}, m = {m}")));
            }
            kappa_point_wick(&pair_kernel(r)?, m)?
        }
        Method::Mc => {
            let est = estimate_kappa_mc(&q, &MCConfig::new(a.samples, a.seed)?.with_workers(workers))?;
            stderr = Some(est.stderr);
            est.mean
        }
    };
    if json {
        let mut result = json!({ "value": round15(value) });
        if let Some(s) = stderr {
            result["stderr"] = json!(round15(s));
        }
        emit(&envelope("eval", &config, result));
    } else {
        emit(&num(value));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        action: "write",
        path: path.to_path_buf(),
        source,
    })
}

fn curve(a: &CurveArgs, json: bool) -> Result<ExitCode> {
    let config = json!({
        "k": a.k,
        "m": a.m,
        "rmin": a.rmin,
        "rmax": a.rmax,
        "steps": a.steps,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    announce("curve", &config);
    let points = kappa_curve(a.k, a.m, a.rmin, a.rmax, a.steps)?;
    let text = if json {
        let rows: Vec<Value> = points
            .iter()
            .map(|&(r, kappa)| json!({ "r": round15(r), "kappa": round15(kappa) }))
            .collect();
        envelope("curve", &config, rows)
    } else {
        let mut csv = String::from("r,kappa\n");
        for &(r, kappa) in &points {
            csv.push_str(&format!("{},{}\n", num(r), num(kappa)));
        }
        csv
    };
    match &a.out {
        Some(path) => write_out(path, &text)?,
        None => emit(&text),
    }
    Ok(ExitCode::SUCCESS)
}

fn series(a: &SeriesArgs, json: bool) -> Result<ExitCode> {
    let config = json!({ "k": a.k, "m": a.m, "order": a.order, "var": "u" });
    announce("series", &config);
    let s = kappa_series(a.k, a.m, a.order)?;
    if json {
        emit(&envelope("series", &config, s.to_record()));
    } else {
        let mut text = String::from("r_power,coefficient\n");
        for (i, c) in s.coeffs().iter().enumerate() {
            text.push_str(&format!("{},{c}\n", 2 * (s.valuation() + i as i64)));
        }
        emit(&text);
    }
    Ok(ExitCode::SUCCESS)
}

fn mc(a: &McArgs, json: bool, workers: usize) -> Result<ExitCode> {
    let q = query(&a.geometry)?;
    let mut config = geometry_config(&q, &a.geometry);
    config["samples"] = json!(a.samples);
    config["seed"] = json!(a.seed);
    config["threads"] = json!(workers);
    announce("mc", &config);
    let est = estimate_kappa_mc(&q, &MCConfig::new(a.samples, a.seed)?.with_workers(workers))?;
    if json {
        let result = json!({
            "mean": round15(est.mean),
            "stderr": round15(est.stderr),
            "samples": est.samples,
        });
        emit(&envelope("mc", &config, result));
    } else {
        emit(&format!("mean,stderr,samples\n{},{},{}", num(est.mean), num(est.stderr), est.samples));
    }
    Ok(ExitCode::SUCCESS)
}

fn ensemble(a: &EnsembleArgs, json: bool, workers: usize) -> Result<ExitCode> {
    let edges = a.edges.clone().unwrap_or_else(EnsembleConfig::default_edges);
    let mut cfg = EnsembleConfig::new(a.degree, a.trials, edges, a.seed)?.with_workers(workers);
    if let Some(rho) = a.cap {
        cfg = cfg.with_cap_radius(rho)?;
    }
    let config = json!({
        "degree": cfg.degree,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "edges": cfg.bin_edges,
        "cap": cfg.cap_radius,
        "threads": workers,
    });
    announce("ensemble", &config);
    let report = ensemble_su2(&cfg)?;
    if json {
        let bins: Vec<Value> = report
            .bins
            .iter()
            .map(|b| {
                json!({
                    "bin_center": round15(b.bin_center),
                    "kappa_hat": round15(b.kappa_hat),
                    "stderr": round15(b.stderr),
                    "pairs_counted": b.pairs_counted,
                })
            })
            .collect();
        let result = json!({
            "degree": report.degree,
            "trials_used": report.trials_used,
            "discarded": report.discarded,
            "bins": bins,
        });
        emit(&envelope("ensemble", &config, result));
    } else {
        let mut csv = String::from("r,kappa_hat,stderr,pairs\n");
        for b in &report.bins {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                num(b.bin_center),
                num(b.kappa_hat),
                num(b.stderr),
                b.pairs_counted
            ));
        }
        emit(&csv);
        eprintln!("# trials used {}, discarded {}", report.trials_used, report.discarded);
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(a: &ValidateArgs, json: bool, workers: usize) -> Result<ExitCode> {
    let level = match a.level {
        LevelArg::Fast => Level::Fast,
        LevelArg::Full => Level::Full,
    };
    let fault = match &a.perturb {
        None => None,
        Some(s) => {
            let f: Fault = s.parse()?;
            if !f.is_stored() {
                return Err(CliError::Usage(format!(
                    "no stored coefficient at (k, m, power) = ({}, {}, {})",
                    f.k, f.m, f.power
                )));
            }
            Some(f)
        }
    };
    let config = json!({
        "level": level.to_string(),
        "seed": a.seed,
        "threads": workers,
        "perturb": fault.map(|f| format!("{},{},{}", f.k, f.m, f.power)),
    });
    announce("validate", &config);
    let opts = ValidateOptions {
        level,
        seed: a.seed,
        workers,
        fault,
    };
    let report = run_validation(&opts);
    if json {
        emit(&envelope("validate", &config, &report));
    } else {
        emit(&report.to_string());
    }
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
