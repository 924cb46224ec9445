//! Board representation and validity checks.
//!
//! A configuration stores one queen per row: `p[y] = x` puts a queen on the
//! square `(x, y)`. Coordinates are residues `0..n`. Because `p` is required
//! to be a permutation, row and column constraints hold by construction and
//! the validators only have to look at diagonals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Square {
    pub x: usize,
    pub y: usize,
}

impl Square {
    pub fn new(x: usize, y: usize) -> Self {
        Square { x, y }
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A placement of `n` queens, one per row and one per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct QueensConfig {
    n: usize,
    p: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    n: usize,
    p: Vec<usize>,
}

impl TryFrom<RawConfig> for QueensConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        QueensConfig::with_size(raw.n, raw.p)
    }
}

impl From<QueensConfig> for RawConfig {
    fn from(c: QueensConfig) -> Self {
        RawConfig { n: c.n, p: c.p }
    }
}

fn malformed(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::MalformedConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

impl QueensConfig {
    /// Builds a configuration from the row-to-column map; `n = p.len()`.
    pub fn new(p: Vec<usize>) -> Result<Self> {
        Self::with_size(p.len(), p)
    }

    /// Builds a configuration and checks that `p` has length `n` and is a
    /// permutation of `0..n`.
    pub fn with_size(n: usize, p: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(malformed("n", "board size must be positive"));
        }
        if p.len() != n {
            return Err(malformed("p", format!("expected {n} entries, found {}", p.len())));
        }
        let mut seen = vec![false; n];
        for (y, &x) in p.iter().enumerate() {
            if x >= n {
                return Err(malformed(format!("p[{y}]"), format!("{x} is outside 0..{n}")));
            }
            if seen[x] {
                return Err(malformed(
                    format!("p[{y}]"),
                    format!("column {x} repeated; p is not a permutation"),
                ));
            }
            seen[x] = true;
        }
        Ok(QueensConfig { n, p })
    }

    /// Builds a configuration from a set of `n` squares.
    pub fn from_squares(n: usize, squares: impl IntoIterator<Item = Square>) -> Result<Self> {
        let mut p = vec![usize::MAX; n];
        for s in squares {
            if s.y >= n || s.x >= n {
                return Err(malformed("squares", format!("{s} is off the board")));
            }
            if p[s.y] != usize::MAX {
                return Err(malformed("squares", format!("row {} holds two queens", s.y)));
            }
            p[s.y] = s.x;
        }
        if let Some(y) = p.iter().position(|&x| x == usize::MAX) {
            return Err(malformed("squares", format!("row {y} is empty")));
        }
        Self::with_size(n, p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The row-to-column map.
    pub fn columns(&self) -> &[usize] {
        &self.p
    }

    pub fn column_of(&self, y: usize) -> usize {
        self.p[y]
    }

    pub fn contains(&self, s: Square) -> bool {
        s.y < self.n && self.p[s.y] == s.x
    }

    pub fn squares(&self) -> impl Iterator<Item = Square> + '_ {
        self.p.iter().enumerate().map(|(y, &x)| Square { x, y })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
            let field = if e.is_syntax() || e.is_eof() { "json" } else { "schema" };
            malformed(field, e.to_string())
        })?;
        raw.try_into()
    }
}

impl fmt::Display for QueensConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Row,
    Column,
    PlusDiagonal,
    MinusDiagonal,
}

/// One over-occupied line: `index` identifies the line within its kind
/// (`x + y` or `x - y`, reduced mod n in the toroidal case).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub index: i64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub is_valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidityReport {
            is_valid: violations.is_empty(),
            violations,
        }
    }
}

fn collect_violations(kind: ConstraintKind, counts: &[usize], offset: i64, out: &mut Vec<Violation>) {
    for (i, &m) in counts.iter().enumerate() {
        if m > 1 {
            out.push(Violation {
                kind,
                index: i as i64 - offset,
                multiplicity: m,
            });
        }
    }
}

/// Toroidal check: every class `x + y mod n` and `x - y mod n` must hold
/// exactly one queen.
pub fn validate_toroidal(c: &QueensConfig) -> ValidityReport {
    let n = c.n;
    let mut sums = vec![0usize; n];
    let mut diffs = vec![0usize; n];
    for (y, &x) in c.p.iter().enumerate() {
        sums[(x + y) % n] += 1;
        diffs[(x + n - y) % n] += 1;
    }
    let mut violations = Vec::new();
    collect_violations(ConstraintKind::PlusDiagonal, &sums, 0, &mut violations);
    collect_violations(ConstraintKind::MinusDiagonal, &diffs, 0, &mut violations);
    ValidityReport::from_violations(violations)
}

/// Classical check: `x + y` and `x - y` distinct as integers.
pub fn validate_classical(c: &QueensConfig) -> ValidityReport {
    let n = c.n;
    let mut sums = vec![0usize; 2 * n - 1];
    let mut diffs = vec![0usize; 2 * n - 1];
    for (y, &x) in c.p.iter().enumerate() {
        sums[x + y] += 1;
        diffs[x + n - 1 - y] += 1;
    }
    let mut violations = Vec::new();
    collect_violations(ConstraintKind::PlusDiagonal, &sums, 0, &mut violations);
    collect_violations(ConstraintKind::MinusDiagonal, &diffs, n as i64 - 1, &mut violations);
    ValidityReport::from_violations(violations)
}
