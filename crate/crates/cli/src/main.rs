use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use upadic_core::charseries::{
    certify_pair, char_series_trunc, newton_polygon, nhat_prime0, secant_upper, serre_row_bound, stable_valuations,
    CertifiedValuation, NewtonPolygon,
};
use upadic_core::modcurve::{format_ip_text, modular_equation_ip, practical_ip_fit};
use upadic_core::umatrix::{
    build_matrix_genfun, build_matrix_oracle_with_qprec, default_qprec, scaled_matrix_p3, UMatrix,
};
use upadic_core::verify::{self, Suite, VerifyConfig};
use upadic_core::{check_prime, weights, Error, ExecMode};

#[derive(Parser)]
#[command(name = "upadic", version, about = "Exact U-operator matrices, characteristic series and slope checks")]
struct Cli {
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Genfun,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IpMethod {
    Modeq,
    Fit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Matrix of U on powers of d_p.
    UMatrix {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        size: usize,
        /// Columns (defaults to size).
        #[arg(long)]
        cols: Option<usize>,
        /// Emit M′ over Z[√3] in the basis 3^{3m/2}d^m (p = 3 only).
        #[arg(long)]
        scaled: bool,
        #[arg(long, value_enum, default_value = "genfun")]
        method: Method,
        /// q-precision for the oracle (default p·size + size + 16).
        #[arg(long)]
        qprec: Option<usize>,
        /// Output file; a `.valuations.csv` sidecar is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The polynomial I_p(x, y).
    Ipoly {
        #[arg(long)]
        prime: u64,
        #[arg(long, value_enum, default_value = "modeq")]
        method: IpMethod,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characteristic series det(1 − tU) of the leading size × size block.
    Charpoly {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        size: usize,
        /// Weight (p = 3, multiple of 6) via the (S/V(S))^{k/3} twist.
        #[arg(long, default_value_t = 0)]
        weight: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Newton polygon of the certified characteristic series.
    Newton {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        terms: usize,
        /// Output JSON file; a `.csv` with (m, v, N̂′_0, L) is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The p = 3 weight twist and the resulting characteristic series.
    Twist {
        #[arg(long)]
        weight: i64,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exit 1 if any claim fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 45)]
        terms: usize,
        #[arg(long, default_value_t = 40)]
        weight_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Claims(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedPrime(_) | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("UPADIC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // A second initialisation only happens in tests; ignore it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let mode = if cli.sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    match run(cli.cmd, mode) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Claims(m)) => {
            eprintln!("{m}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, body: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, body)?,
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{body}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(cmd: Cmd, mode: ExecMode) -> Res<()> {
    match cmd {
        Cmd::UMatrix { prime, size, cols, scaled, method, qprec, out } => {
            cmd_u_matrix(prime, size, cols.unwrap_or(size), scaled, method, qprec, out.as_deref(), mode)
        }
        Cmd::Ipoly { prime, method, format, out } => {
            check_prime(prime)?;
            let ip = match method {
                IpMethod::Modeq => modular_equation_ip(prime)?,
                IpMethod::Fit => practical_ip_fit(prime)?,
            };
            let body = match format {
                Format::Json => json(&ip.to_json()),
                Format::Text => format_ip_text(prime, &ip),
            };
            emit(out.as_deref(), &body)
        }
        Cmd::Charpoly { prime, size, weight, out } => {
            check_prime(prime)?;
            let m = if weight == 0 {
                build_matrix_genfun(prime, size, size)?
            } else {
                if prime != 3 {
                    return Err(Failure::Usage("--weight is supported for --prime 3".into()));
                }
                let base = weights::twist_base(size)?;
                weights::uk_matrix(&base, &weights::twist_matrix(weight, 3 * size)?, size)?
            };
            let cs = char_series_trunc(&m, size, mode);
            #[derive(Serialize)]
            struct Out {
                series: upadic_core::charseries::CharSeries,
                valuations: Vec<String>,
            }
            let valuations = cs.valuations().iter().map(ToString::to_string).collect();
            emit(out.as_deref(), &json(&Out { series: cs, valuations }))
        }
        Cmd::Newton { prime, terms, out } => cmd_newton(prime, terms, out.as_deref(), mode),
        Cmd::Twist { weight, size, out } => {
            let tw = weights::twist_matrix(weight, 3 * (size + 10))?;
            let base = weights::twist_base(size + 10)?;
            let ws = weights::weight_series(weight, size, size, &base, mode)?;
            #[derive(Serialize)]
            struct Out {
                checks: weights::TwistChecks,
                r: Vec<String>,
                valuations: Vec<CertifiedValuation>,
                polygon: NewtonPolygon,
            }
            let o = Out {
                checks: tw.checks(),
                r: tw.r.iter().take(size).map(ToString::to_string).collect(),
                polygon: ws.polygon(),
                valuations: ws.vals,
            };
            emit(out.as_deref(), &json(&o))
        }
        Cmd::Verify { suite, terms, weight_size, out } => {
            let suite: Suite = suite.parse()?;
            let report = verify::run(suite, &VerifyConfig { terms, weight_size, mode })?;
            emit(out.as_deref(), &json(&report))?;
            for c in report.claims() {
                eprintln!("[{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.id);
            }
            match report.first_failure() {
                None => Ok(()),
                Some(c) => Err(Failure::Claims(format!(
                    "claim {} failed: {}\n  observed: {}\n  expected: {}",
                    c.id, c.anchor, c.observed, c.expected
                ))),
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_u_matrix(
    p: u64,
    rows: usize,
    cols: usize,
    scaled: bool,
    method: Method,
    qprec: Option<usize>,
    out: Option<&Path>,
    mode: ExecMode,
) -> Res<()> {
    check_prime(p)?;
    if rows == 0 || cols == 0 {
        return Err(Failure::Usage("size must be positive".into()));
    }
    if scaled && p != 3 {
        return Err(Failure::Usage("--scaled is supported for --prime 3".into()));
    }
    let auto = default_qprec(p, rows, cols);
    let q = qprec.unwrap_or(auto);
    if q < auto {
        return Err(Failure::Usage(format!("--qprec {q} below the minimum {auto}")));
    }
    let oracle = || build_matrix_oracle_with_qprec(p, rows, cols, q, mode);
    let m: UMatrix = match method {
        Method::Genfun => build_matrix_genfun(p, rows, cols)?,
        Method::Oracle => {
            eprintln!("q-precision {q} (auto p·size + size + 16 = {auto})");
            oracle()?
        }
        Method::Both => {
            eprintln!("q-precision {q} (auto p·size + size + 16 = {auto})");
            let a = oracle()?;
            let b = build_matrix_genfun(p, rows, cols)?;
            if a.entries != b.entries {
                return Err(Failure::Claims("oracle and generating-function matrices differ".into()));
            }
            b
        }
    };
    let mut csv = String::from("i,j,valuation\n");
    let body = if scaled {
        let s = scaled_matrix_p3(&m)?;
        #[derive(Serialize)]
        struct Out {
            p: u64,
            rows: usize,
            cols: usize,
            basis: &'static str,
            entries: Vec<Vec<String>>,
        }
        for i in 1..=rows {
            for j in 1..=cols {
                writeln!(csv, "{i},{j},{}", upadic_core::arith::val_quad3(s.get(i, j))).unwrap();
            }
        }
        json(&Out {
            p,
            rows,
            cols,
            basis: "scaled",
            entries: s.entries.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        })
    } else {
        for (i, r) in m.valuations().iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                writeln!(csv, "{},{},{v}", i + 1, j + 1).unwrap();
            }
        }
        json(&m.to_json())
    };
    emit(out, &body)?;
    if let Some(o) = out {
        fs::write(sidecar(o, ".valuations.csv"), csv)?;
    }
    Ok(())
}

fn cmd_newton(p: u64, terms: usize, out: Option<&Path>, mode: ExecMode) -> Res<()> {
    check_prime(p)?;
    let vals = if terms == 0 {
        let m = build_matrix_genfun(p, 1, 1)?;
        let cs = char_series_trunc(&m, 0, mode);
        certify_pair(&cs, &cs, &|i| serre_row_bound(p, i), 0)
    } else {
        stable_valuations(p, terms, mode)?
    };
    let pts: Vec<_> = vals.iter().filter(|c| c.certified).map(|c| (c.m as u64, c.valuation.clone())).collect();
    let polygon = newton_polygon(&pts);
    let uncertified: Vec<usize> = vals.iter().filter(|c| !c.certified).map(|c| c.m).collect();
    if !uncertified.is_empty() {
        eprintln!("warning: uncertified coefficients {uncertified:?} are flagged and left out of the polygon");
    }
    #[derive(Serialize)]
    struct Out {
        p: u64,
        terms: usize,
        polygon: NewtonPolygon,
        slopes: Vec<String>,
        valuations: Vec<CertifiedValuation>,
    }
    let slopes = polygon.slope_list().iter().map(upadic_core::arith::rat_to_string).collect();
    let mut csv = String::from("m,valuation,certified,nhat_prime0,secant\n");
    for c in &vals {
        let m = c.m as u64;
        let (nh, sec) = if p == 3 {
            let i = (0..).find(|&i| upadic_core::charseries::m_index(i + 1) >= m.max(1)).unwrap();
            (nhat_prime0(m).to_string(), upadic_core::arith::rat_to_string(&secant_upper(i, m)))
        } else {
            (String::new(), String::new())
        };
        writeln!(csv, "{m},{},{},{nh},{sec}", c.valuation, c.certified).unwrap();
    }
    emit(out, &json(&Out { p, terms, polygon, slopes, valuations: vals }))?;
    if let Some(o) = out {
        fs::write(sidecar(o, ".csv"), csv)?;
    }
    Ok(())
}
