//! Property suite over a seeded corpus.

use serde::{Deserialize, Serialize};

use crate::circle::UnitCirclePoint;
use crate::error::{Error, Result};
use crate::index::{EngineConfig, IndexEngine, SignRule};
use crate::iteration::{
    bott_sum, check_inequalities, mean_index, splitting_table, precise_index, IndexSequence,
};
use crate::jump::minimal_period_forced;

use super::corpus::{corpus, CorpusEntry};
use super::oracle::oracle_index;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestOptions {
    pub corpus_size: usize,
    pub seed: u64,
    /// Run with a deliberately wrong crossing sign rule; the suite must fail.
    pub mutate: bool,
    pub max_m: u32,
    pub oracle_grid: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            corpus_size: 50,
            seed: 7,
            mutate: false,
            max_m: 4,
            oracle_grid: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub corpus_size: usize,
    pub seed: u64,
    pub mutated: bool,
    pub properties: Vec<PropertyResult>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

struct Tally {
    result: PropertyResult,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            result: PropertyResult {
                name: name.into(),
                checked: 0,
                violations: 0,
                first_violation: None,
            },
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.result.checked += 1;
        if !ok {
            self.fail(detail());
        }
    }

    fn fail(&mut self, detail: String) {
        self.result.violations += 1;
        if self.result.first_violation.is_none() {
            self.result.first_violation = Some(detail);
        }
    }

    fn record<T>(&mut self, label: &str, value: Result<T>) -> Option<T> {
        match value {
            Ok(v) => Some(v),
            Err(e) => {
                self.result.checked += 1;
                self.fail(format!("{label}: {e}"));
                None
            }
        }
    }
}

fn bott_property(engine: &IndexEngine, entries: &[CorpusEntry], max_m: u32) -> PropertyResult {
    let mut t = Tally::new("bott");
    let zs = [
        UnitCirclePoint::one(),
        UnitCirclePoint::minus_one(),
        UnitCirclePoint::from_fraction(1, 4),
    ];
    for e in entries {
        for m in 1..=max_m.min(3) {
            let iterated = e.path.iterate(m);
            for z in &zs {
                let Some(direct) = t.record(&e.label, engine.omega_index(&iterated, z)) else {
                    continue;
                };
                let Some(sum) = t.record(&e.label, bott_sum(engine, &e.path, m, z)) else {
                    continue;
                };
                t.check(direct == sum, || {
                    format!(
                        "{}: m = {m}, z = {z}: direct {direct:?} != sum {sum:?}",
                        e.label
                    )
                });
            }
        }
    }
    t.result
}

fn conjugate_property(engine: &IndexEngine, entries: &[CorpusEntry]) -> PropertyResult {
    let mut t = Tally::new("conjugate-symmetry");
    for e in entries {
        for omega in [UnitCirclePoint::from_fraction(1, 8), UnitCirclePoint::from_radians(2.2)] {
            let a = t.record(&e.label, engine.omega_index(&e.path, &omega));
            let b = t.record(&e.label, engine.omega_index(&e.path, &omega.conj()));
            if let (Some(a), Some(b)) = (a, b) {
                t.check(a == b, || format!("{}: {omega}: {a:?} vs {b:?}", e.label));
            }
        }
    }
    t.result
}

fn iteration_properties(
    engine: &IndexEngine,
    entries: &[CorpusEntry],
    max_m: u32,
) -> Vec<PropertyResult> {
    let mut formula = Tally::new("iteration-formula");
    let mut ineq = Tally::new("iteration-inequalities");
    let mut period = Tally::new("minimal-period");
    let mut split = Tally::new("splitting-numbers");
    for e in entries {
        let path = &e.path;
        let Some(table) = split.record(&e.label, splitting_table(engine, &path.endpoint(), path))
        else {
            continue;
        };
        let eig_tol = engine.config().eig_tol;
        let spectrum = crate::symplectic::spectrum_on_unit_circle(&path.endpoint(), eig_tol);
        for entry in &table.entries {
            let nullity = spectrum.nullity_at(&entry.point(), 1e-9) as u32;
            split.check(entry.plus <= nullity && entry.minus <= nullity, || {
                format!("{}: splitting numbers exceed nullity", e.label)
            });
            let mirror = table.entry_at(&entry.point().conj());
            split.check(mirror.is_some_and(|m| m.plus == entry.minus), || {
                format!("{}: conjugate relation fails at {}", e.label, entry.point())
            });
        }
        let Some(mean) = ineq.record(&e.label, mean_index(engine, path)) else {
            continue;
        };
        let mut seq = IndexSequence::new(engine, path);
        let Some(one) = ineq.record(&e.label, seq.get(1)) else {
            continue;
        };
        for m in 1..=max_m {
            let Some(at) = ineq.record(&e.label, seq.get(m)) else {
                break;
            };
            if e.has_rational_spectrum() {
                if let Some(v) = formula.record(&e.label, precise_index(one.index, &table, m)) {
                    formula.check(v == at.index, || {
                        format!("{}: m = {m}: formula {v} vs direct {}", e.label, at.index)
                    });
                }
            }
            if let Some(r) = ineq.record(&e.label, check_inequalities(&mut seq, &mean, m)) {
                ineq.check(r.all_pass(), || format!("{}: m = {m}: {r:?}", e.label));
            }
            let forced =
                minimal_period_forced(at.index, one.index, one.nullity as i64, path.n());
            period.check(!forced || m == 1, || {
                format!("{}: hypotheses hold at m = {m}", e.label)
            });
        }
    }
    vec![formula.result, ineq.result, period.result, split.result]
}

fn mesh_property(engine: &IndexEngine, entries: &[CorpusEntry]) -> PropertyResult {
    let mut t = Tally::new("mesh-doubling");
    let omegas = [UnitCirclePoint::one(), UnitCirclePoint::from_fraction(3, 8)];
    for e in entries {
        let Some(fine) = t.record(&e.label, e.doubled()) else {
            continue;
        };
        for omega in &omegas {
            let a = t.record(&e.label, engine.omega_index(&e.path, omega));
            let b = t.record(&e.label, engine.omega_index(&fine, omega));
            if let (Some(a), Some(b)) = (a, b) {
                t.check(a == b, || format!("{}: {omega}: {a:?} vs {b:?}", e.label));
            }
        }
    }
    t.result
}

fn oracle_property(engine: &IndexEngine, entries: &[CorpusEntry], grid: usize) -> PropertyResult {
    let mut t = Tally::new("oracle-agreement");
    let omegas = [UnitCirclePoint::one(), UnitCirclePoint::from_fraction(3, 8)];
    for e in entries {
        for omega in &omegas {
            if engine.omega_nullity(&e.path, omega) > 0 {
                continue;
            }
            let a = t.record(&e.label, engine.omega_index_nondegenerate(&e.path, omega));
            let b = t.record(&e.label, oracle_index(&e.path, omega, grid));
            if let (Some(a), Some(b)) = (a, b) {
                t.check(a == b, || format!("{}: {omega}: engine {a} vs oracle {b}", e.label));
            }
        }
    }
    t.result
}

/// Runs every property; `pass` is false as soon as one property has a
/// violation, and `reason` names the first failing property.
pub fn run_selftest(options: &SelftestOptions) -> Result<SelftestReport> {
    if options.corpus_size == 0 {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let config = EngineConfig {
        sign_rule: if options.mutate {
            SignRule::PathSlope
        } else {
            SignRule::Coorientation
        },
        ..EngineConfig::default()
    };
    let engine = IndexEngine::new(config);
    let entries = corpus(options.corpus_size, options.seed)?;
    let mut properties = vec![bott_property(&engine, &entries, options.max_m)];
    properties.push(conjugate_property(&engine, &entries));
    properties.extend(iteration_properties(&engine, &entries, options.max_m));
    properties.push(mesh_property(&engine, &entries));
    properties.push(oracle_property(&engine, &entries, options.oracle_grid));
    let reason = properties.iter().find(|p| p.violations > 0).map(|p| {
        format!(
            "{} mismatch: {}",
            p.name,
            p.first_violation.as_deref().unwrap_or("")
        )
    });
    Ok(SelftestReport {
        corpus_size: options.corpus_size,
        seed: options.seed,
        mutated: options.mutate,
        pass: reason.is_none(),
        properties,
        reason,
    })
}
