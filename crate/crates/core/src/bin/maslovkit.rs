use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use maslovkit::harness::commands::{
    bott_command, index_command, iterate_command, jump_command, parse_omega, selftest_command,
    splitting_command, CommandError, InputFile,
};
use maslovkit::harness::{ReportDocument, SelftestOptions};
use maslovkit::index::IndexEngine;

#[derive(Parser)]
#[command(name = "maslovkit", version, about = "Index theory of symplectic paths")]
struct Cli {
    /// Add wall-clock time to the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ω-index and ω-nullity of a system's fundamental solution.
    Index {
        file: PathBuf,
        /// `p/q` of a full turn, or an angle in radians.
        #[arg(long, default_value = "0")]
        omega: String,
        /// Refine the path mesh to this bound before scanning.
        #[arg(long)]
        mesh: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Iteration table with the precise formula and the inequalities.
    Iterate {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_m: u32,
        #[arg(long)]
        json: bool,
    },
    /// Both sides of the Bott-type formula.
    Bott {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "0")]
        z: String,
        #[arg(long)]
        json: bool,
    },
    /// Splitting numbers of the endpoint.
    Splitting {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Common index jump tuples for one or more systems.
    Jump {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long = "max-N", default_value_t = 40)]
        max_n: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        json: bool,
    },
    /// Property suite over a seeded corpus.
    Selftest {
        #[arg(long, default_value_t = 50)]
        corpus_size: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Use a wrong crossing sign rule; the suite is expected to fail.
        #[arg(long)]
        mutate: bool,
        #[arg(long)]
        json: bool,
    },
}

fn read(path: &PathBuf) -> Result<InputFile, CommandError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError::Usage(format!("{}: {e}", path.display())))?;
    Ok(InputFile {
        name: path.display().to_string(),
        text,
    })
}

fn summary(report: &ReportDocument) -> String {
    let mut lines = Vec::new();
    for r in &report.omega {
        lines.push(format!("i = {}, nu = {}", r.index, r.nullity));
    }
    for row in &report.iterations {
        lines.push(format!(
            "m = {:>3}  i = {:>4}  nu = {}  formula = {}  inequalities = {}",
            row.m,
            row.index,
            row.nullity,
            row.formula.map_or("-".into(), |f| f.to_string()),
            if row.inequalities.all_pass() { "pass" } else { "FAIL" }
        ));
    }
    if let Some(s) = &report.splitting {
        for e in &s.entries {
            lines.push(format!("theta = {:.6}  S+ = {}  S- = {}", e.angle.radians, e.plus, e.minus));
        }
        lines.push(format!("C = {}", s.c));
    }
    if let Some(m) = &report.mean_index {
        lines.push(format!("mean index = {}", m.exact.clone().unwrap_or(m.value.to_string())));
    }
    if let Some(b) = &report.bott {
        lines.push(format!(
            "direct = ({}, {})  sum = ({}, {})  {}",
            b.direct.index,
            b.direct.nullity,
            b.sum.index,
            b.sum.nullity,
            if b.agree { "agree" } else { "DISAGREE" }
        ));
    }
    if let Some(j) = &report.jump {
        lines.push(format!("kappa1 = {}, kappa2 = {}", j.kappa1, j.kappa2));
        for t in &j.tuples {
            lines.push(format!("N = {}  m = {:?}  [{}, {}]", t.n_value, t.m, t.interval.0, t.interval.1));
        }
    }
    if let Some(s) = &report.selftest {
        for p in &s.properties {
            lines.push(format!("{:<24} {:>6} checked  {} violations", p.name, p.checked, p.violations));
        }
        lines.push(if s.pass { "selftest: pass".into() } else { format!("selftest: FAIL ({})", s.reason.clone().unwrap_or_default()) });
    }
    lines.join("\n")
}

fn run(cli: Cli) -> Result<(ReportDocument, bool), CommandError> {
    let engine = IndexEngine::default();
    let started = Instant::now();
    let (mut report, json) = match cli.command {
        Command::Index { file, omega, mesh, json } => {
            let omega = parse_omega(&omega)?;
            (index_command(&engine, &read(&file)?, &omega, mesh)?, json)
        }
        Command::Iterate { file, max_m, json } => (iterate_command(&engine, &read(&file)?, max_m)?, json),
        Command::Bott { file, m, z, json } => {
            let z = parse_omega(&z)?;
            (bott_command(&engine, &read(&file)?, m, &z)?, json)
        }
        Command::Splitting { file, json } => (splitting_command(&engine, &read(&file)?)?, json),
        Command::Jump { files, max_n, count, json } => {
            let inputs = files.iter().map(read).collect::<Result<Vec<_>, _>>()?;
            (jump_command(&engine, &inputs, max_n, count)?, json)
        }
        Command::Selftest { corpus_size, seed, mutate, json } => {
            let options = SelftestOptions {
                corpus_size,
                seed,
                mutate,
                ..SelftestOptions::default()
            };
            (selftest_command(&options)?, json)
        }
    };
    if cli.timing {
        report.wall_clock_seconds = Some(started.elapsed().as_secs_f64());
    }
    Ok((report, json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("MASLOVKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only the first configuration wins; later calls are harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli) {
        Ok((report, json)) => {
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{}", summary(&report));
            }
            let failed = report.selftest.as_ref().is_some_and(|s| !s.pass);
            if failed {
                eprintln!("{}", report.selftest.as_ref().and_then(|s| s.reason.clone()).unwrap_or_default());
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
