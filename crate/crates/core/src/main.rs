use clap::Parser;

use levy_invariance::cli::{execute, exit_code_for, Args};

fn main() {
    let args = Args::parse();
    let config = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for(&e));
        }
    };
    let outcome = execute(&config, args.threads);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
        if let levy_invariance::Error::ConditionFailed(c) = e {
            if let Some(x) = c.first_violation {
                eprintln!("first violation at {x}; condition report written to the output");
            }
        }
    }
    if let Some(report) = &outcome.report {
        if config.output.verbosity > 0 {
            for c in &report.checks {
                let verdict = if c.passed {
                    "PASS"
                } else if c.gating {
                    "FAIL"
                } else {
                    "info"
                };
                eprintln!("{verdict:>4}  {:<40} {:>12.6} vs {}", c.name, c.statistic, c.threshold);
            }
            eprintln!(
                "{} in {:.2}s",
                if report.passed { "passed" } else { "failed" },
                report.duration_secs
            );
        }
    }
    std::process::exit(outcome.exit_code);
}
