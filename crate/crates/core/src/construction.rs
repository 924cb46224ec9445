//! The multiplicative base configuration for `n = 4^k + 1`.
//!
//! With `m = 2^k` we have `m^2 = -1 (mod n)`, which makes `m - 1`, `m` and
//! `m + 1` units of `Z_n` even when `n` is composite. The configuration
//! `p[y] = m * y mod n` then hits every column, every `x + y` class (since
//! `(m + 1) y` is a bijection) and every `x - y` class (since `(m - 1) y` is).

use serde::Serialize;

use crate::board::QueensConfig;
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Parameters of the base configuration: `n = 4^k + 1` and the multiplier
/// `m = 2^k`, with the inverses the flip algebra needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BaseParams {
    pub k: u32,
    pub n: usize,
    pub m: usize,
    #[serde(skip)]
    m_inv: usize,
    #[serde(skip)]
    m_plus_one_inv: usize,
}

impl BaseParams {
    pub fn new(k: u32) -> Result<Self> {
        Self::with_limits(k, &Limits::default())
    }

    pub fn with_limits(k: u32, limits: &Limits) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if k > limits.k {
            return Err(Error::SizeLimit {
                what: "k",
                value: k as u64,
                cap: limits.k as u64,
            });
        }
        let n = (1u64 << (2 * k)) + 1;
        let m = 1u64 << k;
        let m_inv = mod_inverse(m, n)?;
        let m_plus_one_inv = mod_inverse(m + 1, n)?;
        Ok(BaseParams {
            k,
            n: n as usize,
            m: m as usize,
            m_inv: m_inv as usize,
            m_plus_one_inv: m_plus_one_inv as usize,
        })
    }

    /// Recovers `k` from a board size of the form `4^k + 1`.
    pub fn k_for_size(n: usize) -> Option<u32> {
        let q = n.checked_sub(1)?;
        if q < 4 || !q.is_power_of_two() || q.trailing_zeros() % 2 != 0 {
            return None;
        }
        Some(q.trailing_zeros() / 2)
    }

    pub(crate) fn mul(&self, a: usize, b: usize) -> usize {
        ((a as u64 * b as u64) % self.n as u64) as usize
    }

    /// Column of the base queen in row `y`.
    pub fn column_of_row(&self, y: usize) -> usize {
        self.mul(self.m, y)
    }

    /// Row of the base queen in column `x`.
    pub fn row_of_column(&self, x: usize) -> usize {
        self.mul(self.m_inv, x)
    }

    pub(crate) fn m_plus_one_inv(&self) -> usize {
        self.m_plus_one_inv
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `modulus` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let (mut old_r, mut r) = ((a % modulus) as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    // old_r = gcd(a mod m, m); a gcd of 0 only happens for m = 1.
    let g = old_r as u64;
    if g != 1 && modulus != 1 {
        return Err(Error::NotInvertible {
            a,
            modulus,
            gcd: gcd(a, modulus),
        });
    }
    Ok(old_s.rem_euclid(modulus as i128) as u64)
}

/// True iff `2^k - 1`, `2^k` and `2^k + 1` are all units mod `n`.
pub fn check_units(params: &BaseParams) -> bool {
    let (m, n) = (params.m as u64, params.n as u64);
    [m - 1, m, m + 1].into_iter().all(|u| mod_inverse(u, n).is_ok())
}

/// The base configuration `p[y] = 2^k * y mod (4^k + 1)`.
pub fn build_base_config(k: u32) -> Result<QueensConfig> {
    base_config(&BaseParams::new(k)?)
}

pub fn base_config(params: &BaseParams) -> Result<QueensConfig> {
    let p = (0..params.n).map(|y| params.column_of_row(y)).collect();
    QueensConfig::new(p)
}
