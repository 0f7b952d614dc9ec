use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use kpcst::exec::{with_threads, Exec};
use kpcst::growth::parse_tau;
use kpcst::oracle::{exact_solve_with, DEFAULT_LIMIT};
use kpcst::picking::pv_run;
use kpcst::report::write_exact;
use kpcst::solver::solve_with;
use kpcst::threshold::{gw_run, verify_threshold};
use kpcst::{check_result, generate_random, parse_instance, serialize_instance, write_solution, Error, Instance};
use kpcst::{Rational, SolveOptions, WriteOptions};

#[derive(Parser)]
#[command(name = "kpcst", version, about = "k-prize-collecting Steiner tree solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and print the result.
    Solve {
        file: PathBuf,
        /// Also write the full result with run certificates to this path.
        #[arg(long, value_name = "PATH")]
        certificate: Option<PathBuf>,
        /// Add a rounded column next to every number.
        #[arg(long)]
        decimal: bool,
    },
    /// Exhaustive optimum for a small instance.
    Exact {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        oracle_limit: usize,
        #[arg(long)]
        decimal: bool,
    },
    /// Re-verify a stored result against its instance.
    Check { file: PathBuf, result: PathBuf },
    /// Write a random connected instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        max_cost: u64,
        #[arg(long, default_value_t = 20)]
        max_penalty: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; standard output if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the growth trace at a potential, with an optional list such as
    /// `E#3,S{1 2}`.
    Trace {
        file: PathBuf,
        #[arg(long)]
        lambda: Rational,
        #[arg(long, default_value = "")]
        tau: String,
    },
    /// Solve every `.kpcst` file in a directory.
    Bench {
        dir: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Compare with the exact optimum up to this many vertices.
        #[arg(long, default_value_t = 12)]
        oracle_limit: usize,
        /// Leave out wall times so that output is reproducible.
        #[arg(long)]
        no_time: bool,
    },
}

fn load(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_instance(&text)?)
}

fn run(cli: Cli) -> anyhow::Result<String> {
    match cli.cmd {
        Cmd::Solve { file, certificate, decimal } => {
            let inst = load(&file)?;
            let opts = SolveOptions { certificates: true, check: false, exec: Exec::Sequential };
            let sol = solve_with(&inst, &opts)?;
            if let Some(path) = certificate {
                let full = write_solution(&sol, &WriteOptions { certificates: true, decimal });
                fs::write(&path, full).with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(write_solution(&sol, &WriteOptions { certificates: false, decimal }))
        }
        Cmd::Exact { file, oracle_limit, decimal } => {
            let inst = load(&file)?;
            let res = exact_solve_with(&inst, oracle_limit, Exec::Sequential)?;
            Ok(write_exact(&inst, &res, decimal))
        }
        Cmd::Check { file, result } => {
            let inst = load(&file)?;
            let text = fs::read_to_string(&result).with_context(|| format!("cannot read {}", result.display()))?;
            let r = check_result(&inst, &text)?;
            Ok(format!("ok: spans {} vertices, {} certificates verified\n", r.spans, r.certificates))
        }
        Cmd::Gen { n, m, k, max_cost, max_penalty, seed, output } => {
            let text = serialize_instance(&generate_random(n, m, max_cost, max_penalty, k, seed)?);
            match output {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Cmd::Trace { file, lambda, tau } => trace(&load(&file)?, &lambda, &tau),
        Cmd::Bench { dir, jobs, oracle_limit, no_time } => bench(&dir, jobs, oracle_limit, no_time),
    }
}

fn trace(inst: &Instance, lambda: &Rational, tau: &str) -> anyhow::Result<String> {
    let tau = if tau.trim().is_empty() { vec![] } else { parse_tau(tau)? };
    let gw = gw_run(inst, lambda, &tau)?;
    let mut out = gw.gp.dump_trace();
    let pruned: Vec<String> = gw.pruned.vertices().iter().map(|&v| inst.label(v).to_string()).collect();
    writeln!(out, "pruned {} vertices: {}", gw.spans(), pruned.join(" "))?;
    if !tau.is_empty() && verify_threshold(inst, lambda, &tau).ok() {
        out.push_str(&pv_run(inst, lambda, &tau)?.dump(inst));
    }
    Ok(out)
}

fn bench(dir: &Path, jobs: usize, oracle_limit: usize, no_time: bool) -> anyhow::Result<String> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "kpcst"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .kpcst files in {}", dir.display());
    }
    let lines = with_threads(jobs, || Exec::Auto.map(&files, |f| bench_one(f, oracle_limit, no_time)));
    let mut out = String::new();
    let mut failed = 0;
    for (f, line) in files.iter().zip(lines) {
        let name = f.file_name().unwrap_or_default().to_string_lossy();
        match line {
            Ok(l) => writeln!(out, "{name} {l}")?,
            Err(e) => {
                failed += 1;
                writeln!(out, "{name} error: {e}")?;
            }
        }
    }
    if failed > 0 {
        print!("{out}");
        bail!("{failed} of {} instances failed", files.len());
    }
    Ok(out)
}

fn bench_one(path: &Path, oracle_limit: usize, no_time: bool) -> anyhow::Result<String> {
    let inst = load(path)?;
    let start = Instant::now();
    let sol = solve_with(&inst, &SolveOptions { certificates: true, check: false, exec: Exec::Sequential })?;
    let took = start.elapsed();
    let mut line = format!("n={} m={} k={} objective={}", inst.n(), inst.m(), inst.k(), sol.objective);
    if inst.n() <= oracle_limit {
        let opt = exact_solve_with(&inst, oracle_limit, Exec::Sequential)?.opt;
        if opt.is_zero() {
            write!(line, " opt=0 ratio={}", if sol.objective.is_zero() { "1" } else { "inf" })?;
        } else {
            write!(line, " opt={opt} ratio={:.4}", (&sol.objective / &opt).to_f64())?;
        }
    }
    if !no_time {
        write!(line, " time={:.3}s", took.as_secs_f64())?;
    }
    Ok(line)
}

/// Exit code and label per failure class.
fn classify(e: &anyhow::Error) -> (u8, &'static str) {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Number(_) | Error::ZeroDenominator) => (2, "parse"),
        Some(Error::Invalid(_) | Error::Precondition(_)) => (3, "validation"),
        Some(Error::Certificate { .. } | Error::Mismatch { .. } | Error::Inconsistent(_)) => (4, "check"),
        Some(Error::OverLimit { .. }) => (5, "over-limit"),
        Some(Error::Internal(_) | Error::NotRespected(_) | Error::NotSubsetPath(_)) => (6, "internal"),
        None => (1, "io"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (code, class) = classify(&e);
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("kpcst: {class} error: {msg}");
            ExitCode::from(code)
        }
    }
}
