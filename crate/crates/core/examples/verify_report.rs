//! Runs a verification suite and prints its reports as CSV.

use ruijsenaars::cli::report::{write_reports, OutputFormat, SuiteRun};
use ruijsenaars::cli::suites::{run_named, SuiteOptions};

fn main() -> ruijsenaars::error::Result<()> {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "s2".to_string());
    let opts = SuiteOptions::seeded(1);
    let run = SuiteRun::new(&suite, opts.seed, run_named(&suite, &opts)?);
    write_reports(&mut std::io::stdout().lock(), &run, OutputFormat::Csv)?;
    std::process::exit(if run.pass { 0 } else { 1 });
}
