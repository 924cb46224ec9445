//! Size caps shared by the counters, constructors and searches.
//!
//! Defaults keep every exact computation at desk scale. The `QUEENS_LAB_CAP`
//! environment variable overrides them: a bare integer sets the board-size
//! cap of the counters, and `key=value` pairs separated by commas set
//! individual caps (`board`, `oracle`, `k`, `pm_nodes`, `edges`).

use crate::error::{Error, Result};

pub const ENV_VAR: &str = "QUEENS_LAB_CAP";

/// Hard ceiling for the board size; the bitmask counters use 64-bit words.
pub const MAX_BOARD: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest n accepted by the backtracking counters and the enumerator.
    pub board: usize,
    /// Largest n accepted by the permutation oracle.
    pub oracle: usize,
    /// Largest k accepted by the base construction (n = 4^k + 1).
    pub k: u32,
    /// Node budget for the perfect-matching search.
    pub pm_nodes: u64,
    /// Largest edge count a hypergraph constructor may produce.
    pub edges: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            board: 16,
            oracle: 10,
            k: 8,
            pm_nodes: 2_000_000_000,
            edges: 1 << 22,
        }
    }
}

impl Limits {
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(spec) => Self::default().with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidArgument(format!("{ENV_VAR}: {msg}"));
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(board) = spec.parse::<usize>() {
            self.board = board;
        } else {
            for item in spec.split(',') {
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, got `{item}`")))?;
                let value: u64 = value
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("`{value}` is not a non-negative integer")))?;
                match key.trim() {
                    "board" => self.board = value as usize,
                    "oracle" => self.oracle = value as usize,
                    "k" => self.k = value as u32,
                    "pm_nodes" => self.pm_nodes = value,
                    "edges" => self.edges = value,
                    other => return Err(bad(format!("unknown cap `{other}`"))),
                }
            }
        }
        if self.board > MAX_BOARD {
            return Err(bad(format!("board cap {} above hard limit {MAX_BOARD}", self.board)));
        }
        if self.k > 15 {
            return Err(bad(format!("k cap {} above hard limit 15", self.k)));
        }
        Ok(self)
    }

    pub fn check_board(&self, n: usize) -> Result<()> {
        if n > self.board {
            return Err(Error::SizeLimit {
                what: "n",
                value: n as u64,
                cap: self.board as u64,
            });
        }
        Ok(())
    }
}
