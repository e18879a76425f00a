use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use qdt_core::attraction::quantized_attraction_set;
use qdt_core::experiment::{
    bundled, digest, render_csv, render_table, AttractionSetRecord, ExperimentFile, ReportRecord,
    RunRecord, RunResult,
};
use qdt_core::simulate::{damping_sweep, render_sweep_csv, render_sweep_table, SimulateOptions};
use qdt_core::verify::{run_suite, Suite, VerifyOptions};
use qdt_core::{DecoyMode, ProspectDims, QdtError};

const EXIT_ERROR: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;

/// Prospect probabilities, attraction sets and decoy-effect predictions.
#[derive(Parser, Debug)]
#[command(name = "qdt", version)]
struct Cli {
    /// Also write the machine-readable run record (JSON) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Stamp the run record with the current Unix time.
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Record,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DecoyArg {
    Excluded,
    Included,
}

impl From<DecoyArg> for DecoyMode {
    fn from(d: DecoyArg) -> Self {
        match d {
            DecoyArg::Excluded => DecoyMode::Excluded,
            DecoyArg::Included => DecoyMode::Included,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predict choice probabilities for an experiment file.
    ///
    /// If the path does not exist and names a bundled experiment
    /// (microwave, frogs), the bundled copy is used.
    Predict {
        file: String,
        #[arg(long, value_enum, default_value_t = DecoyArg::Excluded)]
        decoy_mode: DecoyArg,
    },
    /// Print the quantized attraction set for N prospects.
    AttractionSet {
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Run a seeded verification suite: quarter-law, gaps, entropy or quantum-identity.
    Verify {
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Prospect count for the gaps suite.
        #[arg(long, default_value_t = 5)]
        n_prospects: usize,
        /// Conclusive,inconclusive dimensions for the quantum-identity suite.
        #[arg(long, default_value = "4,3", value_parser = parse_dims)]
        dims: ProspectDims,
    },
    /// Sweep decoherence damping from 0 to 1 on a random strategic state.
    Simulate {
        #[arg(long, default_value = "3,2", value_parser = parse_dims)]
        dims: ProspectDims,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        sweep_steps: usize,
    },
}

fn parse_dims(s: &str) -> Result<ProspectDims, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected CONCLUSIVE,INCONCLUSIVE, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("conclusive dimension: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("inconclusive dimension: {e}"))?;
    ProspectDims::new(a, b).map_err(|e| e.to_string())
}

struct Output {
    text: String,
    record: RunRecord,
    failed_verification: bool,
}

fn load_experiment(file: &str) -> Result<(String, String), QdtError> {
    let path = Path::new(file);
    if path.exists() {
        let text = fs::read_to_string(path)
            .map_err(|e| QdtError::Parse(format!("{}: {e}", path.display())))?;
        return Ok((text, file.to_string()));
    }
    match bundled(file) {
        Some(text) => Ok((text.to_string(), file.to_string())),
        None => Err(QdtError::Parse(format!("{file}: no such file or bundled experiment"))),
    }
}

fn run(cli: &Cli) -> Result<Output, QdtError> {
    let (command, digest_of, seeds, result) = match &cli.command {
        Command::Predict { file, decoy_mode } => {
            let (text, _) = load_experiment(file)?;
            let experiment = ExperimentFile::parse(&text)?;
            let mode = DecoyMode::from(*decoy_mode);
            let report = experiment.predict(mode)?;
            let record = ReportRecord::from_report(&report, Some(&experiment.name), mode);
            ("predict", Some(text), vec![], RunResult::Prediction(record))
        }
        Command::AttractionSet { n } => {
            if *n <= 0 {
                return Err(QdtError::Domain(format!("N must be a positive integer, got {n}")));
            }
            let n = usize::try_from(*n).map_err(|e| QdtError::Domain(e.to_string()))?;
            let set = quantized_attraction_set(n)?;
            ("attraction-set", None, vec![], RunResult::AttractionSet(AttractionSetRecord::from_set(&set)))
        }
        Command::Verify {
            suite,
            samples,
            seed,
            n_prospects,
            dims,
        } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions {
                samples: *samples,
                seed: *seed,
                n_prospects: *n_prospects,
                dims: *dims,
            };
            ("verify", None, vec![*seed], RunResult::Verification(run_suite(suite, &opts)?))
        }
        Command::Simulate {
            dims,
            seed,
            sweep_steps,
        } => {
            let opts = SimulateOptions {
                dims: *dims,
                seed: *seed,
                sweep_steps: *sweep_steps,
                ..Default::default()
            };
            ("simulate", None, vec![*seed], RunResult::Simulation { rows: damping_sweep(&opts)? })
        }
    };

    let timestamp = cli.timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let record = RunRecord {
        timestamp,
        command: command.to_string(),
        input_digest: digest_of.map(|t| digest(t.as_bytes())),
        seeds,
        result,
    };
    let failed_verification = matches!(&record.result, RunResult::Verification(v) if !v.passed);
    let text = match cli.format {
        Format::Record => record.to_json(),
        Format::Table => render_table_for(&record.result),
        Format::Csv => render_csv_for(&record.result)?,
    };
    Ok(Output {
        text,
        record,
        failed_verification,
    })
}

fn render_table_for(result: &RunResult) -> String {
    match result {
        RunResult::Prediction(r) => render_table(r),
        RunResult::AttractionSet(a) => {
            let mut out = format!("N = {}\n", a.n_prospects);
            out.push_str(&format!("{:>6} {:>12} {:>22}\n", "rank", "q (exact)", "q"));
            for (i, (exact, v)) in a.values_exact.iter().zip(&a.values).enumerate() {
                out.push_str(&format!("{:>6} {:>12} {:>22}\n", i + 1, exact, v));
            }
            out.push_str(&format!("gap = {} ({})\n", a.gap_exact, a.gap));
            out.push_str(&format!("q_max = {} ({})\n", a.q_max_exact, a.q_max));
            out
        }
        RunResult::Verification(v) => v.render(),
        RunResult::Simulation { rows } => render_sweep_table(rows),
    }
}

fn render_csv_for(result: &RunResult) -> Result<String, QdtError> {
    Ok(match result {
        RunResult::Prediction(r) => render_csv(r)?,
        RunResult::AttractionSet(a) => {
            let mut out = String::from("rank,q_exact,q\n");
            for (i, (exact, v)) in a.values_exact.iter().zip(&a.values).enumerate() {
                out.push_str(&format!("{},{},{}\n", i + 1, exact, v));
            }
            out
        }
        RunResult::Verification(v) => {
            let mut out = String::from("statistic,value,bound,passed\n");
            for s in &v.statistics {
                out.push_str(&format!(
                    "\"{}\",{},\"{}\",{}\n",
                    s.name,
                    s.value,
                    s.bound.clone().unwrap_or_default(),
                    s.passed
                ));
            }
            out
        }
        RunResult::Simulation { rows } => render_sweep_csv(rows),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, out.record.to_json()) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(EXIT_ERROR);
                }
            }
            print!("{}", out.text);
            if out.failed_verification {
                ExitCode::from(EXIT_VERIFY_FAILED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
