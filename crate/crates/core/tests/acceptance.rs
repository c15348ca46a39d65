//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance -- jump` runs only the criteria
//! whose name contains `jump`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maslovkit::circle::UnitCirclePoint;
use maslovkit::harness::corpus::{analytic_family, corpus, CorpusEntry, Family};
use maslovkit::index::{IndexEngine, IndexPair};
use maslovkit::iteration::{
    check_inequalities, mean_index, splitting_numbers, splitting_table, precise_index,
    IndexSequence,
};
use maslovkit::jump::{jump_interval, minimal_period_forced, search_common_jumps};
use maslovkit::path::SymplecticPath;

const SEED: u64 = 7;
const CORPUS: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

/// Violation counter keeping the first message.
#[derive(Default)]
struct Violations {
    checked: usize,
    count: usize,
    first: Option<String>,
}

impl Violations {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.count += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn summary(&self) -> String {
        match &self.first {
            None => format!("{} checks, 0 violations", self.checked),
            Some(f) => format!("{} checks, {} violations, first: {f}", self.checked, self.count),
        }
    }
}

fn full_corpus() -> Vec<CorpusEntry> {
    corpus(CORPUS, SEED).expect("corpus builds")
}

fn full_turn() -> SymplecticPath {
    SymplecticPath::rotation(1, TAU, 1.0)
}

fn timed(limit: Duration, started: Instant, v: &Violations) -> Outcome {
    let took = started.elapsed();
    Outcome::new(
        v.count == 0 && took < limit,
        format!("{}, {:.1} s (limit {} s)", v.summary(), took.as_secs_f64(), limit.as_secs()),
    )
}

fn bott() -> Outcome {
    let started = Instant::now();
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    let zs: Vec<UnitCirclePoint> = (0..8).map(|k| UnitCirclePoint::from_fraction(k, 8)).collect();
    for e in full_corpus() {
        let mut roots: HashMap<(i64, i64), IndexPair> = HashMap::new();
        for m in 1..=6u32 {
            let iterated = e.path.iterate(m);
            for z in &zs {
                let direct = engine.omega_index(&iterated, z);
                let mut sum = Ok(IndexPair::new(0, 0));
                for omega in z.roots(m) {
                    let turns = omega.turns().expect("roots of 8th roots are rational");
                    let key = (*turns.numer(), *turns.denom());
                    let pair = match roots.get(&key) {
                        Some(p) => Ok(*p),
                        None => engine.omega_index(&e.path, &omega).inspect(|p| {
                            roots.insert(key, *p);
                        }),
                    };
                    sum = match (sum, pair) {
                        (Ok(s), Ok(p)) => Ok(IndexPair::new(s.index + p.index, s.nullity + p.nullity)),
                        (Err(x), _) | (_, Err(x)) => Err(x),
                    };
                }
                match (direct, sum) {
                    (Ok(d), Ok(s)) => v.check(d == s, || {
                        format!("{}: m = {m}, z = {z}: direct {d:?}, sum {s:?}", e.label)
                    }),
                    (Err(x), _) | (_, Err(x)) => v.check(false, || format!("{}: {x}", e.label)),
                }
            }
        }
    }
    timed(Duration::from_secs(120), started, &v)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

fn precise_formula() -> Outcome {
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    for e in analytic_family() {
        let path = &e.path;
        let table = match splitting_table(&engine, &path.endpoint(), path) {
            Ok(t) => t,
            Err(x) => {
                v.check(false, || format!("{}: {x}", e.label));
                continue;
            }
        };
        let mut seq = IndexSequence::new(&engine, path);
        let i1 = match seq.index(1) {
            Ok(i) => i,
            Err(x) => {
                v.check(false, || format!("{}: {x}", e.label));
                continue;
            }
        };
        for m in 1..=12 {
            match (precise_index(i1, &table, m), seq.index(m)) {
                (Ok(f), Ok(d)) => {
                    v.check(f == d, || format!("{}: m = {m}: formula {f}, direct {d}", e.label))
                }
                (Err(x), _) | (_, Err(x)) => v.check(false, || format!("{}: m = {m}: {x}", e.label)),
            }
        }
    }
    let full = full_turn();
    let third = SymplecticPath::rotation(1, TAU / 3.0, 1.0);
    let (mut a, mut b) = (IndexSequence::new(&engine, &full), IndexSequence::new(&engine, &third));
    for m in 1..=12u32 {
        let mi = i64::from(m);
        let got = a.index(m).ok();
        v.check(got == Some(2 * mi - 1), || format!("i(full turn, {m}) = {got:?}"));
        let got = b.index(m).ok();
        v.check(got == Some(2 * ceil_div(mi, 3) - 1), || format!("i(third turn, {m}) = {got:?}"));
    }
    Outcome::new(v.count == 0, v.summary())
}

fn inequalities() -> Outcome {
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    for e in full_corpus() {
        let path = &e.path;
        let mean = match mean_index(&engine, path) {
            Ok(m) => m,
            Err(x) => {
                v.check(false, || format!("{}: {x}", e.label));
                continue;
            }
        };
        let mut seq = IndexSequence::new(&engine, path);
        for m in 1..=20 {
            match check_inequalities(&mut seq, &mean, m) {
                Ok(r) => v.check(r.all_pass(), || format!("{}: m = {m}: {r:?}", e.label)),
                Err(x) => v.check(false, || format!("{}: m = {m}: {x}", e.label)),
            }
        }
    }
    let full = full_turn();
    let tight = mean_index(&engine, &full).and_then(|mean| {
        let mut seq = IndexSequence::new(&engine, &full);
        check_inequalities(&mut seq, &mean, 3)
    });
    match tight {
        Ok(r) => {
            let c = &r.mean_estimate;
            v.check(c.pass && c.lower == 5.0 && c.value == 5 && c.upper == 5.0, || {
                format!("full turn at m = 3: {} <= {} <= {}", c.lower, c.value, c.upper)
            })
        }
        Err(x) => v.check(false, || format!("full turn at m = 3: {x}")),
    }
    Outcome::new(v.count == 0, v.summary())
}

fn degenerate() -> Outcome {
    let engine = IndexEngine::default();
    match engine.omega_index_detailed(&full_turn(), &UnitCirclePoint::one()) {
        Ok(out) => {
            let d = out.degenerate.as_ref();
            let rungs = d.map_or(0, |d| d.rungs_used);
            let neighbours = d.map_or(0, |d| d.neighbors_checked);
            let pass = out.pair == IndexPair::new(1, 2) && neighbours == 50 && (1..=6).contains(&rungs);
            Outcome::new(
                pass,
                format!(
                    "(i, nu) = ({}, {}), {rungs} rungs, {neighbours} neighbours, min {:?}",
                    out.pair.index,
                    out.pair.nullity,
                    d.and_then(|d| d.neighbor_min)
                ),
            )
        }
        Err(x) => Outcome::new(false, x.to_string()),
    }
}

fn splitting() -> Outcome {
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    let identity = SymplecticPath::identity(1, 1.0);
    let got = splitting_numbers(&engine, &identity.endpoint(), &UnitCirclePoint::one(), &identity);
    v.check(matches!(got, Ok((1, 1))), || format!("identity at 1: {got:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let hyperbolic: Vec<CorpusEntry> = analytic_family()
        .into_iter()
        .filter(|e| e.family == Family::Hyperbolic)
        .collect();
    for e in &hyperbolic {
        for _ in 0..10 {
            let omega = UnitCirclePoint::from_radians(rng.random_range(0.0..TAU));
            let got = splitting_numbers(&engine, &e.path.endpoint(), &omega, &e.path);
            v.check(matches!(got, Ok((0, 0))), || format!("{} at {omega}: {got:?}", e.label));
        }
    }

    // an unstable ε-halving surfaces as an error from the table
    for e in full_corpus() {
        match splitting_table(&engine, &e.path.endpoint(), &e.path) {
            Ok(table) => {
                for entry in &table.entries {
                    let mirror = table.entry_at(&entry.point().conj());
                    v.check(mirror.is_some_and(|m| m.plus == entry.minus), || {
                        format!("{}: conjugate relation at {}", e.label, entry.point())
                    });
                }
            }
            Err(x) => v.check(false, || format!("{}: {x}", e.label)),
        }
    }
    Outcome::new(v.count == 0, v.summary())
}

fn common_jump() -> Outcome {
    let started = Instant::now();
    let engine = IndexEngine::default();
    let paths = [full_turn()];
    let search = match search_common_jumps(&engine, &paths, 40, 20) {
        Ok(s) => s,
        Err(x) => return Outcome::new(false, x.to_string()),
    };
    let took = started.elapsed();
    let mut v = Violations::default();
    let got: Vec<(u64, Vec<u32>)> = search.tuples.iter().map(|t| (t.n_value, t.m.clone())).collect();
    let want: Vec<(u64, Vec<u32>)> = (1..=20u32).map(|m| (2 * u64::from(m), vec![m])).collect();
    v.check(got == want, || format!("tuples {got:?}"));
    let mut seq = IndexSequence::new(&engine, &paths[0]);
    for t in &search.tuples {
        let two_n = 2 * t.n_value as i64;
        let (a, b) = (two_n - search.kappa1, two_n + search.kappa2);
        for &m in &t.m {
            let ok = jump_interval(&mut seq, 2 * m - 1).is_ok_and(|g| g.contains_closed(a, b));
            v.check(ok, || format!("[{a}, {b}] not inside G_{}", 2 * m - 1));
        }
    }
    Outcome::new(
        v.count == 0 && took < Duration::from_secs(30),
        format!("{}, search {:.1} s (limit 30 s)", v.summary(), took.as_secs_f64()),
    )
}

fn minimal_period() -> Outcome {
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    for e in full_corpus() {
        let mut seq = IndexSequence::new(&engine, &e.path);
        let one = match seq.get(1) {
            Ok(p) => p,
            Err(x) => {
                v.check(false, || format!("{}: {x}", e.label));
                continue;
            }
        };
        for m in 1..=10 {
            match seq.index(m) {
                Ok(im) => {
                    let forced = minimal_period_forced(im, one.index, one.nullity as i64, e.path.n());
                    v.check(!forced || m == 1, || format!("{}: hypotheses hold at m = {m}", e.label));
                }
                Err(x) => v.check(false, || format!("{}: m = {m}: {x}", e.label)),
            }
        }
    }
    Outcome::new(v.count == 0, v.summary())
}

fn mesh_doubling() -> Outcome {
    let engine = IndexEngine::default();
    let mut v = Violations::default();
    let omegas = [
        UnitCirclePoint::one(),
        UnitCirclePoint::minus_one(),
        UnitCirclePoint::from_fraction(3, 8),
    ];
    for e in full_corpus() {
        let fine = match e.doubled() {
            Ok(f) => f,
            Err(x) => {
                v.check(false, || format!("{}: {x}", e.label));
                continue;
            }
        };
        for omega in &omegas {
            let (a, b) = (engine.omega_index(&e.path, omega), engine.omega_index(&fine, omega));
            v.check(matches!((&a, &b), (Ok(x), Ok(y)) if x == y), || {
                format!("{} at {omega}: {a:?} vs {b:?}", e.label)
            });
        }
        let (a, b) = (engine.index_pair(&e.path, 2), engine.index_pair(&fine, 2));
        v.check(matches!((&a, &b), (Ok(x), Ok(y)) if x == y), || {
            format!("{} at m = 2: {a:?} vs {b:?}", e.label)
        });
    }
    Outcome::new(v.count == 0, v.summary())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_maslovkit"))
            .args(["selftest", "--seed", "7", "--json"])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let pass = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    Outcome::new(
        pass,
        format!(
            "exit {:?} and {:?}, {} and {} bytes, identical: {}",
            a.status.code(),
            b.status.code(),
            a.stdout.len(),
            b.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("bott-formula", bott),
        ("precise-iteration-formula", precise_formula),
        ("iteration-inequalities", inequalities),
        ("degenerate-index", degenerate),
        ("splitting-numbers", splitting),
        ("common-index-jump", common_jump),
        ("minimal-period-audit", minimal_period),
        ("mesh-doubling", mesh_doubling),
        ("selftest-determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {name}: {}", k + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
