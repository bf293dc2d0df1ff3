//! Driver for the stable-reduction pipeline.

pub mod job;
pub mod parse;
pub mod pipeline;
pub mod report;

use num_rational::BigRational;
use num_bigint::BigInt;

pub use job::{JobSpec, PolySpec};
pub use pipeline::{analyze, Analysis, RunError, RunOptions};
pub use report::Report;

/// Precision cap in p-adic digits, given as an integer or a/b; rounded up.
pub fn parse_cap(text: &str) -> Result<u32, RunError> {
    let bad = || RunError::input("parse", format!("bad precision cap '{text}'"));
    let t = text.trim();
    let q: BigRational = match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            BigRational::new(a, b)
        }
        None => BigRational::from_integer(t.parse().map_err(|_| bad())?),
    };
    let c = q.ceil().to_integer();
    u32::try_from(c).ok().filter(|&c| c > 0).ok_or_else(bad)
}

pub fn options_for(job: &JobSpec) -> Result<RunOptions, RunError> {
    let mut opts = RunOptions::default();
    if let Some(c) = &job.options.precision_cap {
        opts.roots.cap_digits = parse_cap(c)?;
        opts.roots.start_digits = opts.roots.start_digits.min(opts.roots.cap_digits);
    }
    if let Some(m) = job.options.max_extension {
        opts.roots.max_extension = m;
    }
    Ok(opts)
}

/// Parses the job and runs the pipeline.
pub fn run(job: &JobSpec) -> Result<(Report, Analysis), RunError> {
    let field = job.build_field()?;
    let f = job.build_poly(&field)?;
    let opts = options_for(job)?;
    let a = analyze(&f, &opts)?;
    Ok((Report::build(job, &a), a))
}
