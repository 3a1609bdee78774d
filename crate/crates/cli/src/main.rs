//! `farch`: generate, analyze and simulate channel-hopping sequence pairs.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 invariant
//! violation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use farch_core::format::{read_sequence, to_text};
use farch_core::report::{write_mttr_h_csv, write_sweep_csv};
use farch_core::sim::SweepRow;
use farch_core::{
    analyze, farch_pair, mttr_h_oracle, random_permutation, sweep, Error, Scenario, SequencePair,
    SweepConfig, TrafficMode,
};

#[derive(Parser)]
#[command(
    name = "farch",
    version,
    about = "Channel-hopping rendezvous sequences: build, measure, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a FARCH sender/receiver pair from a seeded random permutation.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure diversity, MTTR, MCTTR and MTTR_h of a sequence pair.
    Analyze {
        #[arg(long)]
        sender: PathBuf,
        #[arg(long)]
        receiver: PathBuf,
        /// Output directory for report.json and mttr_h.csv.
        #[arg(long)]
        out: PathBuf,
        /// Last h written to the CSV curve.
        #[arg(long)]
        h_max: Option<usize>,
    },
    /// Check the FARCH metric guarantees over a range of N and permutations.
    Verify {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        /// Random permutations per N.
        #[arg(long, default_value_t = 20)]
        perms: usize,
        #[arg(long)]
        seed: u64,
        /// Largest N cross-checked against the subset-enumeration oracle.
        #[arg(long, default_value_t = 8)]
        oracle_max_n: usize,
        /// JSON output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average TTR for one PU-traffic scenario.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "per-slot", value_parser = parse_traffic)]
        traffic: TrafficMode,
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long)]
        max_slots: Option<usize>,
        /// CSV output, or JSON when the name ends in `.json`; standard output
        /// (CSV) when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average TTR over a grid of scenarios read from a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_traffic(s: &str) -> Result<TrafficMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Input(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { n, seed, out } => generate(n, seed, &out),
        Command::Analyze {
            sender,
            receiver,
            out,
            h_max,
        } => analyze_files(&sender, &receiver, &out, h_max),
        Command::Verify {
            n_min,
            n_max,
            perms,
            seed,
            oracle_max_n,
            out,
        } => verify(n_min, n_max, perms, seed, oracle_max_n, out.as_deref()),
        Command::Simulate {
            n,
            x,
            p,
            trials,
            seed,
            traffic,
            pairs,
            max_slots,
            out,
        } => {
            let scenario = Scenario {
                n_channels: n,
                n_pus: x,
                transmit_prob: p,
                traffic_mode: traffic,
                n_su_pairs: pairs,
                trials,
                seed,
                max_slots,
            };
            scenario.validate()?;
            let config = SweepConfig {
                n_channels: vec![n],
                n_pus: Some(vec![x]),
                n_pus_fraction: None,
                transmit_prob: vec![p],
                traffic_mode: traffic,
                n_su_pairs: pairs,
                trials,
                seed,
                max_slots,
            };
            run_sweep(&config, out.as_deref())
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config)?;
            let config: SweepConfig = serde_json::from_str(&text)?;
            run_sweep(&config, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct Manifest {
    n: usize,
    seed: u64,
    period: usize,
    permutation: Vec<usize>,
    sender: &'static str,
    receiver: &'static str,
}

fn generate(n: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    let w = random_permutation(n, seed)?;
    let pair = farch_pair(&w)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("sender.txt"), to_text(pair.sender()))?;
    fs::write(out.join("receiver.txt"), to_text(pair.receiver()))?;
    let manifest = Manifest {
        n,
        seed,
        period: pair.period(),
        permutation: w.image().to_vec(),
        sender: "sender.txt",
        receiver: "receiver.txt",
    };
    write_json(&out.join("manifest.json"), &manifest)
}

fn analyze_files(
    sender: &Path,
    receiver: &Path,
    out: &Path,
    h_max: Option<usize>,
) -> Result<(), Failure> {
    let input = |e: Error| Failure::Input(e.to_string());
    let s = read_sequence(sender).map_err(input)?;
    let r = read_sequence(receiver).map_err(input)?;
    let pair = SequencePair::new(s, r).map_err(input)?;
    let analysis = analyze(&pair);
    fs::create_dir_all(out)?;
    write_json(&out.join("report.json"), &analysis)?;
    let file = fs::File::create(out.join("mttr_h.csv"))?;
    write_mttr_h_csv(&analysis.metrics, h_max, io::BufWriter::new(file)).map_err(input)?;
    Ok(())
}

#[derive(Serialize)]
struct VerifyRow {
    n: usize,
    permutations: usize,
    mcttr_is_n_squared: bool,
    mttr_expected: usize,
    mttr_matches: bool,
    bounds_pass: bool,
    uniform_and_distinct: bool,
    oracle_checked: bool,
    oracle_matches: bool,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct VerifySummary {
    seed: u64,
    all_pass: bool,
    rows: Vec<VerifyRow>,
}

fn verify(
    n_min: usize,
    n_max: usize,
    perms: usize,
    seed: u64,
    oracle_max_n: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if n_min < 2 || n_min > n_max {
        return Err(Failure::Usage(format!(
            "need 2 <= n-min <= n-max, got {n_min}..{n_max}"
        )));
    }
    if perms == 0 {
        return Err(Failure::Usage("perms must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let expected_mttr = if n % 2 == 0 { n + 1 } else { n };
        let oracle_checked = n <= oracle_max_n;
        let mut row = VerifyRow {
            n,
            permutations: perms,
            mcttr_is_n_squared: true,
            mttr_expected: expected_mttr,
            mttr_matches: true,
            bounds_pass: true,
            uniform_and_distinct: true,
            oracle_checked,
            oracle_matches: true,
            failures: Vec::new(),
        };
        for i in 0..perms {
            let w = random_permutation(n, seed.wrapping_add(i as u64))?;
            let pair = farch_pair(&w)?;
            let a = analyze(&pair);
            let tag = format!("w={:?}", w.image());
            if a.metrics.mcttr != Some(n * n) {
                row.mcttr_is_n_squared = false;
                row.failures
                    .push(format!("{tag}: mcttr {:?}", a.metrics.mcttr));
            }
            if a.metrics.mttr != Some(expected_mttr) {
                row.mttr_matches = false;
                row.failures
                    .push(format!("{tag}: mttr {:?}", a.metrics.mttr));
            }
            match &a.bounds {
                Some(b) => {
                    if !b.all_pass() {
                        row.bounds_pass = false;
                        row.failures.push(format!("{tag}: bound violated"));
                    }
                    if !(b.uniform_frequency && b.distinctness) {
                        row.uniform_and_distinct = false;
                        row.failures.push(format!("{tag}: not uniform/distinct"));
                    }
                }
                None => {
                    row.bounds_pass = false;
                    row.failures.push(format!("{tag}: no maximal diversity"));
                }
            }
            if oracle_checked {
                for h in 0..n {
                    if mttr_h_oracle(&pair, h).ok() != a.metrics.mttr_h[h] {
                        row.oracle_matches = false;
                        row.failures
                            .push(format!("{tag}: oracle mismatch at h={h}"));
                    }
                }
            }
        }
        eprintln!("verify n={n}: {} failure(s)", row.failures.len());
        rows.push(row);
    }
    let summary = VerifySummary {
        seed,
        all_pass: rows.iter().all(|r| r.failures.is_empty()),
        rows,
    };
    match out {
        Some(path) => write_json(path, &summary)?,
        None => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    if summary.all_pass {
        Ok(())
    } else {
        Err(Failure::Invariant(
            "FARCH guarantees violated; see report".into(),
        ))
    }
}

fn run_sweep(config: &SweepConfig, out: Option<&Path>) -> Result<(), Failure> {
    let rows = sweep(config, |done, total, row: &SweepRow| match &row.error {
        Some(e) => eprintln!(
            "[{done}/{total}] n={} x={} p={}: skipped ({e})",
            row.n, row.x, row.p
        ),
        None => eprintln!("[{done}/{total}] n={} x={} p={}", row.n, row.x, row.p),
    })?;
    match out {
        Some(path) if path.extension().is_some_and(|e| e == "json") => write_json(path, &rows),
        Some(path) => {
            let file = fs::File::create(path)?;
            write_sweep_csv(&rows, io::BufWriter::new(file))
                .map_err(|e| Failure::Input(e.to_string()))
        }
        None => {
            let stdout = io::stdout();
            write_sweep_csv(&rows, stdout.lock()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}
