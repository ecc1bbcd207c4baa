//! Command line: argument parsing, dispatch and output.
//!
//! Exit codes: 0 on success, 1 on validation or domain errors (and failed
//! verification checks), 2 when a size cap is exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{abt_bound_check, default_kmax, ratio_report, resolve_mode, tv_report, tv_scaling_study};
use crate::asymptotics::{hq, hwang_main_term, new_main_term, r_of, warlimont_main_term};
use crate::exact_dist::{omega_dist_exact, omega_dist_float, stirling_row, stirling_row_float};
use crate::prime_tab::{check_prime_power, prime_counts};
use crate::report::{
    serialize, AbtRecord, DecompositionRecord, DistRecord, Format, HqRecord, MainTermRecord, PrimeCountRecord,
    Tabular,
};
use crate::verify::{run_suite, Suite};
use crate::{Error, Mode, Result};

const ABOUT: &str = "Prime-factor counts of random polynomials over F_q versus cycle counts of random \
permutations. All logarithms are natural: r = (k-1)/ln n.";

#[derive(Debug, Parser)]
#[command(name = "ffdist", version, about = ABOUT)]
struct Cli {
    /// Output format
    #[arg(long, global = true, default_value = "csv", value_parser = parse_format)]
    format: Format,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (FFDIST_THREADS overrides)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of monic irreducibles of each degree d ≤ dmax
    Pi {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        dmax: usize,
    },
    /// P(Ω(f_n) = k) or P(K(π_n) = k) for k = 1..n
    Dist {
        #[arg(long, value_parser = ["omega", "cycles"])]
        kind: String,
        /// Required for --kind omega
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: usize,
        /// exact (default for n ≤ 400) or float
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Float-mode cutoff for the omega row (certified)
        #[arg(long)]
        kcap: Option<usize>,
    },
    /// h_q(x) for 0 ≤ x < q
    Hq {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Absolute tolerance in (0, 1e-3]
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Hwang, Warlimont and new main terms for k = 1..kmax (or one k)
    Mainterm {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with = "kmax")]
        k: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Pointwise ratio P(Ω=k)/P(K=k) against h_q(r)
    Compare {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        /// Defaults to min(n, ⌈3 ln n⌉)
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Report |ratio − 1|·q(ln n − k)/k for k < ln n instead
        #[arg(long)]
        abt: bool,
    },
    /// Total variation distance between the two distributions
    Tv {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Report the split over I_1, I_2, I_3
        #[arg(long)]
        decompose: bool,
    },
    /// Total variation over a grid of (q, n)
    Scaling {
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
    },
    /// Run the invariant suites
    Verify {
        #[arg(long, default_value = "fast", value_parser = parse_suite)]
        suite: Suite,
    },
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        _ => Err(format!("unknown mode '{s}' (expected exact or float)")),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    Ok(())
}

fn emit<T: Tabular + Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    serialize(rows, format, &mut buf)?;
    Ok(buf)
}

/// The rendered output, plus a failure message for the verify suites.
fn run(command: &Command, format: Format) -> Result<(Vec<u8>, Option<String>)> {
    let bytes = match command {
        Command::Pi { q, dmax } => {
            check_prime_power(*q)?;
            let table = prime_counts(*q, *dmax)?;
            let rows: Vec<PrimeCountRecord> = (1..=*dmax)
                .map(|d| PrimeCountRecord { d, count: table.count(d).to_string() })
                .collect();
            emit(&rows, format)?
        }
        Command::Dist { kind, q, n, mode, kcap } => {
            check_n(*n)?;
            let rows = if kind == "omega" {
                let q = q.ok_or_else(|| Error::Validation("--kind omega needs --q".into()))?;
                check_prime_power(q)?;
                match resolve_mode(*n, *mode) {
                    Mode::Exact => DistRecord::from_row(&omega_dist_exact(q, *n)?),
                    Mode::Float => DistRecord::from_row(&omega_dist_float(q, *n, *kcap)?),
                }
            } else {
                if let Some(q) = q {
                    check_prime_power(*q)?;
                }
                match resolve_mode(*n, *mode) {
                    Mode::Exact => DistRecord::from_row(&stirling_row(*n)?),
                    Mode::Float => DistRecord::from_row(&stirling_row_float(*n)?),
                }
            };
            emit(&rows, format)?
        }
        Command::Hq { q, x, tol } => {
            check_prime_power(*q)?;
            if !(*tol > 0.0 && *tol <= 1e-3) {
                return Err(Error::Validation(format!("tol must lie in (0, 1e-3] (got {tol})")));
            }
            let value = hq(*q, *x, *tol)?;
            emit(&[HqRecord { q: *q, x: *x, tol: *tol, hq: value }], format)?
        }
        Command::Mainterm { q, n, k, kmax } => {
            check_prime_power(*q)?;
            if *n < 2 {
                return Err(Error::Validation("main terms need n >= 2".into()));
            }
            let ks: Vec<usize> = match (k, kmax) {
                (Some(k), _) => vec![*k],
                (None, m) => (1..=m.unwrap_or_else(|| default_kmax(*n))).collect(),
            };
            let cycles = stirling_row_float(*n)?;
            let rows = ks
                .iter()
                .map(|&k| {
                    let hwang = hwang_main_term(*n, k)?;
                    let r = r_of(*n, k);
                    let p_cycles = cycles.prob(k);
                    let (warlimont, new) = if r < *q as f64 {
                        (Some(warlimont_main_term(*n, k, *q)?), Some(new_main_term(p_cycles, r, *q)?))
                    } else {
                        (None, None)
                    };
                    Ok(MainTermRecord { n: *n, k, q: *q, r, p_cycles, hwang, warlimont, new })
                })
                .collect::<Result<Vec<_>>>()?;
            emit(&rows, format)?
        }
        Command::Compare { q, n, kmax, mode, abt } => {
            if *abt {
                emit(&AbtRecord::from_report(&abt_bound_check(*q, *n, *mode)?), format)?
            } else {
                emit(&ratio_report(*q, *n, *kmax, *mode)?, format)?
            }
        }
        Command::Tv { q, n, mode, decompose } => {
            check_n(*n)?;
            let r = tv_report(*q, *n, *mode)?;
            if *decompose {
                if *n < 2 {
                    return Err(Error::Validation("the decomposition needs n >= 2".into()));
                }
                emit(&[DecompositionRecord::from_report(&r)], format)?
            } else {
                emit(&[r], format)?
            }
        }
        Command::Scaling { q, n, mode } => {
            for &v in n {
                check_n(v)?;
            }
            emit(&tv_scaling_study(q, n, *mode)?, format)?
        }
        Command::Verify { suite } => {
            let results = run_suite(*suite);
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
            let msg = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")));
            return Ok((emit(&results, format)?, msg));
        }
    };
    Ok((bytes, None))
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("FFDIST_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Validation(format!("FFDIST_THREADS must be a positive integer (got '{v}')"))),
        Err(_) => Ok(flag),
    }
}

fn execute(cli: &Cli) -> Result<(Vec<u8>, Option<String>)> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count(cli.threads)? {
        if t == 0 {
            return Err(Error::Validation("thread count must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Error::Resource(e.to_string()))?;
    pool.install(|| run(&cli.command, cli.format))
}

fn one_line(text: &str) -> &str {
    text.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim()
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code. Output goes to `--out` or `stdout`; diagnostics to `stderr`.
pub fn parse_and_dispatch(argv: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let _ = writeln!(stderr, "{}", one_line(&e.render().to_string()));
            return 1;
        }
    };
    let (bytes, failure) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => stdout.write_all(&bytes).and_then(|_| stdout.flush()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {}", Error::Io(e));
        return 1;
    }
    if let Some(msg) = failure {
        let _ = writeln!(stderr, "error: {msg}");
        return 1;
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let argv = std::iter::once("ffdist").chain(args.iter().copied()).map(OsString::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = parse_and_dispatch(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn prime_counts_csv() {
        let (code, out, _) = run_args(&["pi", "--q", "2", "--dmax", "5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "d,count\n1,2\n2,1\n3,2\n4,3\n5,6\n");
    }

    #[test]
    fn hq_at_one() {
        let (code, out, _) = run_args(&["hq", "--q", "7", "--x", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Vec<HqRecord> = serde_json::from_str(&out).unwrap();
        assert!((v[0].hq - 1.0).abs() < 1e-10);
    }

    #[test]
    fn errors_and_codes() {
        let (code, out, err) = run_args(&["dist", "--kind", "omega", "--q", "6", "--n", "3"]);
        assert_eq!(code, 1);
        assert!(out.is_empty());
        assert!(err.contains("q must be a prime power"));
        assert_eq!(err.lines().count(), 1);
        assert_eq!(run_args(&["dist", "--kind", "omega", "--q", "2", "--n", "500", "--mode", "exact"]).0, 2);
        assert_eq!(run_args(&["hq", "--q", "3", "--x", "3"]).0, 1);
        assert_eq!(run_args(&["hq", "--q", "3", "--x", "0.5", "--tol", "0.1"]).0, 1);
        assert_eq!(run_args(&["bogus"]).0, 1);
        assert_eq!(run_args(&["tv", "--q", "2", "--n", "0"]).0, 1);
        assert_eq!(run_args(&["--help"]).0, 0);
    }
}
