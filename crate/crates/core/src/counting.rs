//! Exact counts of classical (`Q(n)`) and toroidal (`T(n)`) solutions.
//!
//! Both counters walk the board row by row with three occupancy words. In
//! the classical search the diagonal words shift by one bit per row and
//! drop bits that leave the board; on the torus they rotate inside an
//! `n`-bit ring instead, since no diagonal ever leaves the board.
//!
//! The top level splits on the column chosen in row 0 and sums the
//! subtrees, so totals and node counts do not depend on the thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::board::{validate_classical, validate_toroidal, QueensConfig};
use crate::error::{Error, Result};
use crate::limits::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Toroidal,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Mode::Classical),
            "toroidal" => Ok(Mode::Toroidal),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountResult {
    pub n: usize,
    pub mode: Mode,
    pub count: u64,
    pub nodes_visited: u64,
    /// Wall time; left out of the JSON form so output stays reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Copy)]
struct Masks {
    n: usize,
    full: u64,
    mode: Mode,
}

impl Masks {
    fn new(n: usize, mode: Mode) -> Self {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Masks { n, full, mode }
    }

    /// Diagonal words for the next row after placing `bit`.
    #[inline]
    fn advance(&self, plus: u64, minus: u64, bit: u64) -> (u64, u64) {
        let (plus, minus) = (plus | bit, minus | bit);
        match self.mode {
            // square (x, y+1) shares x + y with (x + 1, y) and x - y with (x - 1, y).
            Mode::Classical => (plus >> 1, (minus << 1) & self.full),
            Mode::Toroidal => {
                let top = self.n - 1;
                (
                    (plus >> 1) | ((plus & 1) << top),
                    ((minus << 1) & self.full) | (minus >> top),
                )
            }
        }
    }

    fn count(&self, cols: u64, plus: u64, minus: u64, nodes: &mut u64) -> Option<u64> {
        *nodes += 1;
        if cols == self.full {
            return Some(1);
        }
        let mut avail = self.full & !(cols | plus | minus);
        let mut total = 0u64;
        while avail != 0 {
            let bit = avail & avail.wrapping_neg();
            avail ^= bit;
            let (p, m) = self.advance(plus, minus, bit);
            total = total.checked_add(self.count(cols | bit, p, m, nodes)?)?;
        }
        Some(total)
    }

    fn enumerate(&self, cols: u64, plus: u64, minus: u64, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if cols == self.full {
            out.push(p.clone());
            return;
        }
        let mut avail = self.full & !(cols | plus | minus);
        while avail != 0 && out.len() < limit {
            let bit = avail & avail.wrapping_neg();
            avail ^= bit;
            let (np, nm) = self.advance(plus, minus, bit);
            p.push(bit.trailing_zeros() as usize);
            self.enumerate(cols | bit, np, nm, p, out, limit);
            p.pop();
        }
    }
}

/// Counts solutions with the backtracking counter, subject to `limits.board`.
pub fn count(n: usize, mode: Mode, limits: &Limits) -> Result<CountResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("board size must be positive".into()));
    }
    limits.check_board(n)?;
    let start = Instant::now();
    let masks = Masks::new(n, mode);
    let branches = (0..n)
        .into_par_iter()
        .map(|x| {
            let bit = 1u64 << x;
            let (p, m) = masks.advance(0, 0, bit);
            let mut nodes = 0u64;
            let c = masks.count(bit, p, m, &mut nodes);
            (c, nodes)
        })
        .collect::<Vec<_>>();
    let mut total = 0u64;
    let mut nodes = 1u64;
    for (c, k) in branches {
        total = total.checked_add(c.ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
        nodes += k;
    }
    Ok(CountResult {
        n,
        mode,
        count: total,
        nodes_visited: nodes,
        elapsed: start.elapsed(),
    })
}

pub fn count_classical(n: usize) -> Result<CountResult> {
    count(n, Mode::Classical, &Limits::default())
}

pub fn count_toroidal(n: usize) -> Result<CountResult> {
    count(n, Mode::Toroidal, &Limits::default())
}

/// Brute-force oracle: every permutation of `0..n`, filtered by the board
/// validator for `mode`.
pub fn oracle_count(n: usize, mode: Mode) -> Result<CountResult> {
    let validator = match mode {
        Mode::Classical => validate_classical,
        Mode::Toroidal => validate_toroidal,
    };
    oracle_count_with(n, mode, &Limits::default(), &|c| validator(c).is_valid)
}

/// Oracle with an explicit acceptance predicate.
pub fn oracle_count_with(
    n: usize,
    mode: Mode,
    limits: &Limits,
    accept: &(dyn Fn(&QueensConfig) -> bool + Sync),
) -> Result<CountResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("board size must be positive".into()));
    }
    if n > limits.oracle {
        return Err(Error::SizeLimit {
            what: "n",
            value: n as u64,
            cap: limits.oracle as u64,
        });
    }
    let start = Instant::now();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let c = QueensConfig::new(perm.clone())?;
        if accept(&c) {
            count += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(CountResult {
        n,
        mode,
        count,
        nodes_visited: visited,
        elapsed: start.elapsed(),
    })
}

/// Lexicographic successor in place; false once `p` is the last permutation.
fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// All solutions in lexicographic order of `p`, truncated at `limit`.
pub fn enumerate_solutions(n: usize, mode: Mode, limit: Option<usize>, limits: &Limits) -> Result<Vec<QueensConfig>> {
    if n == 0 {
        return Err(Error::InvalidArgument("board size must be positive".into()));
    }
    limits.check_board(n)?;
    let masks = Masks::new(n, mode);
    let mut out = Vec::new();
    masks.enumerate(
        0,
        0,
        0,
        &mut Vec::with_capacity(n),
        &mut out,
        limit.unwrap_or(usize::MAX),
    );
    out.into_iter().map(QueensConfig::new).collect()
}
