//! Self-check suite behind `queens-lab verify`.
//!
//! Every check recomputes its quantity through two independent routes (a
//! fast path and an oracle, or a computation and a frozen reference) and
//! records the measured values, so a failing run says what disagreed.
//! The validators are injectable so tests can check that a broken
//! validator makes the suite fail.

use serde::Serialize;
use serde_json::{json, Value};

use crate::board::{validate_classical, validate_toroidal, QueensConfig, ValidityReport};
use crate::bounds::{
    abc_profile, classical_alpha, concentric_lower_bound, concentric_sum, d_value, hypergraph_integral_check, log_gap,
    queen_d_sum, AlphaMethod,
};
use crate::construction::{base_config, check_units, BaseParams};
use crate::counting::{count, enumerate_solutions, oracle_count_with, Mode};
use crate::error::Result;
use crate::flips::{
    apply_flips, enumerate_flips, flips_disjoint, greedy_disjoint_flips, intersection_counts, reconstruct_flips,
    FlipSet,
};
use crate::hypergraph::{
    build_flip_hg, build_steiner_aux_hg, build_sudoku_hg, build_torus_queens_hg, build_transversal_hg,
    count_perfect_matchings, stats, LatinSquare,
};
use crate::limits::Limits;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn max_n(self) -> usize {
        match self {
            Level::Quick => 7,
            Level::Full => 9,
        }
    }

    fn max_k(self) -> u32 {
        match self {
            Level::Quick => 2,
            Level::Full => 3,
        }
    }
}

pub type Validator = fn(&QueensConfig) -> ValidityReport;

#[derive(Clone, Copy)]
pub struct Validators {
    pub toroidal: Validator,
    pub classical: Validator,
}

impl Default for Validators {
    fn default() -> Self {
        Validators {
            toroidal: validate_toroidal,
            classical: validate_classical,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<Check>,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, name: &str, outcome: Result<(bool, Value)>) {
        let (passed, measured) = outcome.unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            measured,
        });
    }
}

pub fn run_verification_suite(level: Level, limits: &Limits) -> VerificationReport {
    run_verification_suite_with(level, limits, &Validators::default())
}

pub fn run_verification_suite_with(level: Level, limits: &Limits, v: &Validators) -> VerificationReport {
    let mut s = Suite { checks: Vec::new() };
    let max_n = level.max_n().min(limits.oracle).min(limits.board);
    let max_k = level.max_k().min(limits.k);

    for (mode, name, validator) in [
        (
            Mode::Classical,
            "classical counter matches permutation oracle",
            v.classical,
        ),
        (
            Mode::Toroidal,
            "toroidal counter matches permutation oracle",
            v.toroidal,
        ),
    ] {
        s.record(name, counter_vs_oracle(mode, max_n, limits, validator));
    }
    s.record("toroidal count is zero exactly when gcd(n, 6) > 1", polya(limits));
    s.record("toroidal count never exceeds classical count", containment(limits));
    s.record(
        "base configuration is toroidal",
        base_configs(level, limits, v.toroidal),
    );
    s.record("flip count is n(n-1)/4", flip_counts(max_k));
    s.record("single flips are valid and reversible", single_flips(max_k, v.toroidal));
    s.record(
        "each flip meets at most 4(n-1) others",
        flip_intersections(max_k.min(2)),
    );
    s.record("greedy flip sets reconstruct", greedy_round_trips(max_k));
    s.record(
        "torus hypergraph matchings equal toroidal counts",
        torus_matchings(level, limits),
    );
    s.record("hypergraph constructor statistics", constructor_stats(limits));
    s.record("hypergraph perfect-matching counts", matching_counts(level, limits));
    s.record("ring matrix reproduces the n = 5 table", ring_matrix());
    s.record(
        "row profile identity and ring inequality",
        profile_identities(max_n, limits),
    );
    s.record("alpha closed form agrees with quadrature", alpha());
    s.record("hypergraph integral matches ln k - (d - 1)", hypergraph_integrals());
    s.record("log gap is at most 2 / sqrt(n)", log_gaps());

    let passed = s.checks.iter().all(|c| c.passed);
    VerificationReport {
        level,
        passed,
        checks: s.checks,
    }
}

fn counter_vs_oracle(mode: Mode, max_n: usize, limits: &Limits, validator: Validator) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let fast = count(n, mode, limits)?.count;
        let oracle = oracle_count_with(n, mode, limits, &|c| validator(c).is_valid)?.count;
        ok &= fast == oracle;
        rows.push(json!({ "n": n, "count": fast, "oracle": oracle }));
    }
    Ok((ok, Value::Array(rows)))
}

fn polya(limits: &Limits) -> Result<(bool, Value)> {
    let gcd6 = |n: usize| (1..=6).rev().find(|d| n % d == 0 && 6 % d == 0).unwrap_or(1);
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=12.min(limits.board) {
        let t = count(n, Mode::Toroidal, limits)?.count;
        ok &= (t == 0) == (gcd6(n) > 1);
        rows.push(json!({ "n": n, "count": t }));
    }
    Ok((ok, Value::Array(rows)))
}

fn containment(limits: &Limits) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=12.min(limits.board) {
        let t = count(n, Mode::Toroidal, limits)?.count;
        let q = count(n, Mode::Classical, limits)?.count;
        ok &= t <= q;
        rows.push(json!({ "n": n, "toroidal": t, "classical": q }));
    }
    Ok((ok, Value::Array(rows)))
}

fn base_configs(level: Level, limits: &Limits, validator: Validator) -> Result<(bool, Value)> {
    let top = match level {
        Level::Quick => 2,
        Level::Full => 4,
    }
    .min(limits.k);
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 1..=top {
        let params = BaseParams::new(k)?;
        let valid = validator(&base_config(&params)?).is_valid;
        let units = check_units(&params);
        ok &= valid && units;
        rows.push(json!({ "k": k, "n": params.n, "toroidal": valid, "units": units }));
    }
    Ok((ok, Value::Array(rows)))
}

fn flip_counts(max_k: u32) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 1..=max_k {
        let params = BaseParams::new(k)?;
        let found = enumerate_flips(&params)?.len();
        let expected = params.n * (params.n - 1) / 4;
        ok &= found == expected;
        rows.push(json!({ "k": k, "flips": found, "expected": expected }));
    }
    Ok((ok, Value::Array(rows)))
}

const SAMPLE_SEED: u64 = 0x5eed;

fn single_flips(max_k: u32, validator: Validator) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 1..=max_k {
        let params = BaseParams::new(k)?;
        let base = base_config(&params)?;
        let mut flips = enumerate_flips(&params)?;
        if k >= 3 {
            flips.shuffle(&mut ChaCha8Rng::seed_from_u64(SAMPLE_SEED));
            flips.truncate(500);
        }
        let mut bad = 0usize;
        for f in &flips {
            let fs = FlipSet::new(vec![f.clone()])?;
            let out = apply_flips(&base, &fs)?;
            if !validator(&out).is_valid || out == base || reconstruct_flips(&base, &out)? != fs {
                bad += 1;
            }
        }
        ok &= bad == 0;
        rows.push(json!({ "k": k, "checked": flips.len(), "failures": bad }));
    }
    Ok((ok, Value::Array(rows)))
}

fn flip_intersections(max_k: u32) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 1..=max_k {
        let params = BaseParams::new(k)?;
        let flips = enumerate_flips(&params)?;
        let fast = intersection_counts(params.n, &flips);
        let mut max_seen = 0;
        for (i, a) in flips.iter().enumerate() {
            let pairwise = flips
                .iter()
                .enumerate()
                .filter(|(j, b)| *j != i && !flips_disjoint(a, b))
                .count();
            ok &= pairwise == fast[i];
            max_seen = max_seen.max(pairwise);
        }
        ok &= max_seen <= 4 * (params.n - 1);
        rows.push(json!({ "k": k, "max_intersections": max_seen, "limit": 4 * (params.n - 1) }));
    }
    Ok((ok, Value::Array(rows)))
}

fn greedy_round_trips(max_k: u32) -> Result<(bool, Value)> {
    let params = BaseParams::new(max_k)?;
    let base = base_config(&params)?;
    let t = (params.n / 16).max(1);
    let mut failures = 0;
    for seed in 0..100u64 {
        let fs = greedy_disjoint_flips(&params, t, Some(seed))?;
        let out = apply_flips(&base, &fs)?;
        if reconstruct_flips(&base, &out)?.canonical_ids() != fs.canonical_ids() {
            failures += 1;
        }
    }
    Ok((
        failures == 0,
        json!({ "k": max_k, "t": t, "sets": 100, "failures": failures }),
    ))
}

fn torus_matchings(level: Level, limits: &Limits) -> Result<(bool, Value)> {
    let ns: &[usize] = match level {
        Level::Quick => &[1, 3, 5],
        Level::Full => &[1, 3, 5, 7],
    };
    let mut ok = true;
    let mut rows = Vec::new();
    for &n in ns {
        let pm = count_perfect_matchings(&build_torus_queens_hg(n)?, limits)?.count;
        let t = count(n, Mode::Toroidal, limits)?.count;
        ok &= pm == t;
        rows.push(json!({ "n": n, "perfect_matchings": pm, "toroidal": t }));
    }
    Ok((ok, Value::Array(rows)))
}

fn constructor_stats(limits: &Limits) -> Result<(bool, Value)> {
    // (name, hypergraph, vertices, edges, d, k, codegree ceiling)
    let cases = [
        ("torus n=5", build_torus_queens_hg(5)?, 20, 25, 4, 5, 1),
        (
            "transversal cyclic 3",
            build_transversal_hg(&LatinSquare::cyclic(3)?)?,
            9,
            9,
            3,
            3,
            1,
        ),
        ("sudoku b=2", build_sudoku_hg(2)?, 64, 64, 4, 4, 2),
        (
            "steiner (7,3,2)",
            build_steiner_aux_hg(7, 3, 2, limits)?,
            21,
            35,
            3,
            5,
            1,
        ),
        ("flip k=1", build_flip_hg(1)?, 5, 5, 4, 4, 4),
        ("flip k=2", build_flip_hg(2)?, 17, 68, 4, 16, 16),
    ];
    let mut ok = true;
    let mut rows = Vec::new();
    for (name, h, nv, ne, d, k, codegree) in cases {
        let s = stats(&h);
        let matches = s.num_vertices == nv
            && s.num_edges == ne
            && s.d == Some(d)
            && s.k == Some(k)
            && s.max_codegree <= codegree
            && nv * k == d * ne;
        ok &= matches;
        rows.push(json!({ "family": name, "stats": s, "matches": matches }));
    }
    Ok((ok, Value::Array(rows)))
}

fn matching_counts(level: Level, limits: &Limits) -> Result<(bool, Value)> {
    let mut cases = vec![
        (
            "transversal cyclic 3",
            build_transversal_hg(&LatinSquare::cyclic(3)?)?,
            3u64,
        ),
        (
            "transversal cyclic 2",
            build_transversal_hg(&LatinSquare::cyclic(2)?)?,
            0,
        ),
        ("steiner (7,3,2)", build_steiner_aux_hg(7, 3, 2, limits)?, 30),
        ("steiner (6,3,2)", build_steiner_aux_hg(6, 3, 2, limits)?, 0),
        ("flip k=1", build_flip_hg(1)?, 0),
    ];
    if level == Level::Full {
        cases.push(("sudoku b=2", build_sudoku_hg(2)?, 288));
    }
    let mut ok = true;
    let mut rows = Vec::new();
    for (name, h, expected) in cases {
        let found = count_perfect_matchings(&h, limits)?.count;
        ok &= found == expected;
        rows.push(json!({ "family": name, "perfect_matchings": found, "expected": expected }));
    }
    Ok((ok, Value::Array(rows)))
}

fn ring_matrix() -> Result<(bool, Value)> {
    const TABLE: [[usize; 5]; 5] = [
        [4, 4, 4, 4, 4],
        [4, 6, 6, 6, 4],
        [4, 6, 8, 6, 4],
        [4, 6, 6, 6, 4],
        [4, 4, 4, 4, 4],
    ];
    let mut ok = true;
    for (i, row) in TABLE.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            ok &= d_value(5, i, j)? == want;
        }
    }
    Ok((ok, json!({ "n": 5 })))
}

fn profile_identities(max_n: usize, limits: &Limits) -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 4..=max_n {
        let sols = enumerate_solutions(n, Mode::Classical, None, limits)?;
        let bound = concentric_lower_bound(n);
        let mut min_sum = u64::MAX;
        for c in &sols {
            let profile = abc_profile(c)?;
            ok &= profile.iter().all(|p| p.a + p.b + p.c == n - 1);
            let lhs = concentric_sum(c)?;
            ok &= lhs == queen_d_sum(c) && lhs as f64 >= bound;
            min_sum = min_sum.min(lhs);
        }
        rows.push(json!({ "n": n, "solutions": sols.len(), "min_sum": min_sum, "lower_bound": bound }));
    }
    Ok((ok, Value::Array(rows)))
}

fn alpha() -> Result<(bool, Value)> {
    let closed = classical_alpha(AlphaMethod::ClosedForm)?;
    let quad = classical_alpha(AlphaMethod::Quadrature)?;
    let ok = (closed - quad).abs() <= 1e-9 && closed > 1.587 && closed < 1.588;
    Ok((ok, json!({ "closed_form": closed, "quadrature": quad })))
}

fn hypergraph_integrals() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for k in [5.0f64, 17.0, 100.0] {
        for d in [2u32, 3, 4] {
            let value = hypergraph_integral_check(k, d, 0.0, 1e-9)?.value;
            let closed = k.ln() - (d as f64 - 1.0);
            ok &= (value - closed).abs() <= 1e-6;
            rows.push(json!({ "k": k, "d": d, "quadrature": value, "closed_form": closed }));
        }
    }
    Ok((ok, Value::Array(rows)))
}

fn log_gaps() -> Result<(bool, Value)> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in [16usize, 64, 256, 1024] {
        let g = log_gap(0.0, 0.0, (n - 1) as f64, 1e-11)?;
        let limit = 2.0 / (n as f64).sqrt();
        ok &= g.gap <= limit;
        rows.push(json!({ "n": n, "gap": g.gap, "limit": limit, "gap_times_sqrt_n": g.gap * (n as f64).sqrt() }));
    }
    Ok((ok, Value::Array(rows)))
}
