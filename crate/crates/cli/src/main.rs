use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stablered_cli::{run, JobSpec, RunError};

/// Stable reduction of Z^p = f(X) with equidistant branch locus.
#[derive(Parser, Debug)]
#[command(name = "stablered", version)]
struct Args {
    /// Job file, TOML or JSON
    #[arg(long)]
    input: PathBuf,
    /// JSON report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// DOT file for the reduction tree
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Working precision cap in p-adic digits (rational)
    #[arg(long)]
    precision_cap: Option<String>,
    /// Largest e*k times degree of a root block
    #[arg(long)]
    max_extension: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn threads() {
    if let Some(n) = std::env::var("STABLERED_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn go(args: &Args) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| RunError::input("parse", format!("{}: {e}", args.input.display())))?;
    let mut job = JobSpec::from_text(&text)?;
    if let Some(c) = &args.precision_cap {
        job.options.precision_cap = Some(c.clone());
    }
    if args.max_extension.is_some() {
        job.options.max_extension = args.max_extension;
    }
    let (report, a) = run(&job)?;
    let json = report.to_json();
    match args.out.as_ref().or(job.options.out.as_ref().map(PathBuf::from).as_ref()) {
        Some(p) => std::fs::write(p, &json).map_err(|e| RunError::internal("output", e.to_string()))?,
        None => println!("{json}"),
    }
    if let Some(p) = args.dot.as_ref().or(job.options.dot.as_ref().map(PathBuf::from).as_ref()) {
        std::fs::write(p, a.tree.to_dot()).map_err(|e| RunError::internal("output", e.to_string()))?;
    }
    if args.verbose {
        eprintln!("L = {}", a.md.l);
        for c in &report.components {
            eprintln!("class {}: v(rho) = {}, conductor {}, genus {}, copies {}", c.class, c.radius_valuation, c.conductor, c.genus, c.copies);
        }
        if let Some(t) = report.reduction_type {
            eprintln!("reduction type {t}");
        }
        eprintln!("degree bound {}", report.monodromy_bound.degree_bound);
        eprintln!("checks {:?}", report.checks);
        for (k, v) in &report.timing_ms {
            eprintln!("{k}: {v} ms");
        }
    }
    if !report.checks.all_pass() {
        return Err(RunError::internal("checks", format!("invariant check failed: {:?}", report.checks)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    threads();
    match std::panic::catch_unwind(|| go(&args)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("error: internal panic");
            ExitCode::from(2)
        }
    }
}
