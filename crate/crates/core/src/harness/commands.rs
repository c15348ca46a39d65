//! The subcommands of the `maslovkit` tool as library functions returning
//! reports.

use thiserror::Error;

use crate::circle::{AngleRecord, UnitCirclePoint};
use crate::error::Error;
use crate::index::IndexEngine;
use crate::iteration::{
    bott_sum, check_inequalities, mean_index, splitting_table, precise_index, IndexSequence,
};
use crate::jump::search_common_jumps;
use crate::path::SymplecticPath;

use super::document::{DocumentError, SystemDocument};
use super::oracle::oracle_index;
use super::report::{
    sha256_hex, BottRecord, InputDigest, IterationRow, OmegaResult, OracleCheck, ReportDocument,
    RootTerm,
};
use super::selftest::{run_selftest, SelftestOptions};

/// Grid used for the oracle cross-check embedded in `index` reports.
pub const REPORT_ORACLE_GRID: usize = 20_000;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{file}: {source}")]
    Parse {
        file: String,
        source: DocumentError,
    },
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] Error),
    #[error("selftest failed: {0}")]
    Selftest(String),
}

impl CommandError {
    /// 2 for unusable input, 3 for numeric failures, 1 for failed properties.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Parse { .. } | CommandError::Usage(_) => 2,
            CommandError::Numeric(_) => 3,
            CommandError::Selftest(_) => 1,
        }
    }
}

/// A system file as read from disk.
#[derive(Clone, Debug)]
pub struct InputFile {
    pub name: String,
    pub text: String,
}

struct Loaded {
    digest: InputDigest,
    path: SymplecticPath,
}

fn load(input: &InputFile, mesh: Option<f64>) -> Result<Loaded, CommandError> {
    let doc = SystemDocument::from_json(&input.text).map_err(|source| CommandError::Parse {
        file: input.name.clone(),
        source,
    })?;
    let mut path = doc.path()?;
    if let Some(bound) = mesh {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(CommandError::Usage(format!("--mesh must be positive, got {bound}")));
        }
        path = path.refined(bound);
    }
    Ok(Loaded {
        digest: InputDigest {
            file: input.name.clone(),
            sha256: sha256_hex(input.text.as_bytes()),
            label: doc.label.clone(),
            provenance: path.provenance().to_string(),
        },
        path,
    })
}

/// `p/q` is `p/q` of a full turn; anything else is an angle in radians.
pub fn parse_omega(text: &str) -> Result<UnitCirclePoint, CommandError> {
    let bad = || CommandError::Usage(format!("cannot read {text:?} as p/q or an angle"));
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(UnitCirclePoint::from_fraction(p, q));
    }
    let radians: f64 = text.trim().parse().map_err(|_| bad())?;
    if !radians.is_finite() {
        return Err(bad());
    }
    Ok(UnitCirclePoint::snapped(radians))
}

pub fn index_command(
    engine: &IndexEngine,
    input: &InputFile,
    omega: &UnitCirclePoint,
    mesh: Option<f64>,
) -> Result<ReportDocument, CommandError> {
    let loaded = load(input, mesh)?;
    let mut report = ReportDocument::new("index");
    report.inputs.push(loaded.digest);
    let outcome = engine.omega_index_detailed(&loaded.path, omega)?;
    let mut result = OmegaResult {
        angle: AngleRecord::from(omega),
        index: outcome.pair.index,
        nullity: outcome.pair.nullity,
        scanned_radians: None,
        crossings: Vec::new(),
        degenerate: outcome.degenerate,
    };
    if outcome.pair.nullity == 0 {
        let scan = engine.scan(&loaded.path, omega)?;
        result.scanned_radians = Some(scan.scanned_radians);
        result.crossings = scan.crossings;
        let oracle = oracle_index(&loaded.path, omega, REPORT_ORACLE_GRID)?;
        report.oracle.push(OracleCheck {
            what: format!("i at {omega}"),
            grid: REPORT_ORACLE_GRID,
            engine: outcome.pair.index,
            oracle,
            agree: oracle == outcome.pair.index,
        });
    }
    report.omega.push(result);
    Ok(report)
}

pub fn iterate_command(
    engine: &IndexEngine,
    input: &InputFile,
    max_m: u32,
) -> Result<ReportDocument, CommandError> {
    if max_m == 0 {
        return Err(CommandError::Usage("--max-m must be positive".into()));
    }
    let loaded = load(input, None)?;
    let path = &loaded.path;
    let mut report = ReportDocument::new("iterate");
    report.inputs.push(loaded.digest);
    let table = splitting_table(engine, &path.endpoint(), path)?;
    let mean = mean_index(engine, path)?;
    let mut seq = IndexSequence::new(engine, path);
    let i1 = seq.index(1)?;
    for m in 1..=max_m {
        let pair = seq.get(m)?;
        let formula = match precise_index(i1, &table, m) {
            Ok(v) => Some(v),
            Err(Error::AmbiguousCeiling { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let inequalities = check_inequalities(&mut seq, &mean, m)?;
        report.iterations.push(IterationRow {
            m,
            index: pair.index,
            nullity: pair.nullity,
            formula,
            formula_agrees: formula.map(|f| f == pair.index),
            inequalities,
        });
    }
    report.splitting = Some(table);
    report.mean_index = Some(mean);
    Ok(report)
}

pub fn bott_command(
    engine: &IndexEngine,
    input: &InputFile,
    m: u32,
    z: &UnitCirclePoint,
) -> Result<ReportDocument, CommandError> {
    if m == 0 {
        return Err(CommandError::Usage("--m must be positive".into()));
    }
    let loaded = load(input, None)?;
    let path = &loaded.path;
    let mut report = ReportDocument::new("bott");
    report.inputs.push(loaded.digest);
    let direct = engine.omega_index(&path.iterate(m), z)?;
    let mut roots = Vec::new();
    for omega in z.roots(m) {
        let p = engine.omega_index(path, &omega)?;
        roots.push(RootTerm {
            angle: AngleRecord::from(&omega),
            index: p.index,
            nullity: p.nullity,
        });
    }
    let sum = bott_sum(engine, path, m, z)?;
    report.bott = Some(BottRecord {
        m,
        z: AngleRecord::from(z),
        direct,
        sum,
        roots,
        agree: direct == sum,
    });
    Ok(report)
}

pub fn splitting_command(
    engine: &IndexEngine,
    input: &InputFile,
) -> Result<ReportDocument, CommandError> {
    let loaded = load(input, None)?;
    let mut report = ReportDocument::new("splitting");
    let table = splitting_table(engine, &loaded.path.endpoint(), &loaded.path)?;
    report.inputs.push(loaded.digest);
    report.splitting = Some(table);
    Ok(report)
}

pub fn jump_command(
    engine: &IndexEngine,
    inputs: &[InputFile],
    max_n: u64,
    count: usize,
) -> Result<ReportDocument, CommandError> {
    if inputs.is_empty() {
        return Err(CommandError::Usage("jump needs at least one system file".into()));
    }
    if max_n == 0 || count == 0 {
        return Err(CommandError::Usage("--max-N and --count must be positive".into()));
    }
    let mut report = ReportDocument::new("jump");
    let mut paths = Vec::new();
    for input in inputs {
        let loaded = load(input, None)?;
        report.inputs.push(loaded.digest);
        paths.push(loaded.path);
    }
    report.jump = Some(search_common_jumps(engine, &paths, max_n, count)?);
    Ok(report)
}

pub fn selftest_command(options: &SelftestOptions) -> Result<ReportDocument, CommandError> {
    if options.corpus_size == 0 {
        return Err(CommandError::Usage("--corpus-size must be positive".into()));
    }
    let result = run_selftest(options)?;
    let mut report = ReportDocument::new("selftest");
    report.seed = Some(options.seed);
    report.selftest = Some(result);
    Ok(report)
}
