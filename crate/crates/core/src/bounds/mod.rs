//! Numeric side of the entropy upper bounds.
//!
//! For a classical solution, row `i` has `n - 1` empty positions. Each one
//! is attacked by the queen in its column and by zero, one or two queens on
//! its diagonals, so it is "ruled out" by 1, 2 or 3 other rows; `a_i`, `b_i`
//! and `c_i` count the positions in each case. Counting diagonal
//! incidences queen by queen gives the exact identity
//!
//! ```text
//! sum_i (2 a_i + b_i) = sum_{queens (x, y)} D(x, y)
//! ```
//!
//! where `D` is the number of other squares on the two diagonals through a
//! square. `D` is constant on concentric rings, which yields the lower bound
//! `(5/4) n^2 - 6n` on the left side.
//!
//! The rest of the module evaluates the constants and integrals that turn
//! those counts into the bounds `T(n) <= (n / e^3)^n` and
//! `Q(n) <= (n / e^alpha)^n` (up to `1 + o(1)` factors).

pub mod quadrature;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::board::{validate_classical, QueensConfig};
use crate::error::{Error, Result};

pub use quadrature::{QuadratureResult, DEFAULT_TOLERANCE};

/// Number of other squares sharing a diagonal with `(i, j)`, 0-based.
pub fn d_value(n: usize, i: usize, j: usize) -> Result<usize> {
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!("({i}, {j}) is off the {n}x{n} board")));
    }
    let ring = (i + 1).min(j + 1).min(n - i).min(n - j);
    Ok(n + 2 * ring - 3)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DMatrix {
    pub n: usize,
    pub values: Vec<Vec<usize>>,
}

impl DMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("board size must be positive".into()));
        }
        let values = (0..n)
            .map(|i| (0..n).map(|j| d_value(n, i, j)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix { n, values })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.values {
            let line = row.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            writeln!(out, "{line}").expect("write to string");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowProfile {
    pub row: usize,
    /// Positions ruled out by three other rows.
    pub a: usize,
    /// ... by two.
    pub b: usize,
    /// ... by one (the column alone).
    pub c: usize,
}

/// Per-row `(a, b, c)` counts relative to the fixed solution `c`.
pub fn abc_profile(config: &QueensConfig) -> Result<Vec<RowProfile>> {
    if !validate_classical(config).is_valid {
        return Err(Error::NotASolution);
    }
    let n = config.n();
    let mut sums = vec![false; 2 * n - 1];
    let mut diffs = vec![false; 2 * n - 1];
    for s in config.squares() {
        sums[s.x + s.y] = true;
        diffs[s.x + n - 1 - s.y] = true;
    }
    let profiles = (0..n)
        .map(|y| {
            let mut p = RowProfile {
                row: y,
                a: 0,
                b: 0,
                c: 0,
            };
            for x in (0..n).filter(|&x| x != config.column_of(y)) {
                // The column queen always attacks; diagonal queens cannot
                // sit in row y, which holds only its own queen.
                match 1 + sums[x + y] as usize + diffs[x + n - 1 - y] as usize {
                    3 => p.a += 1,
                    2 => p.b += 1,
                    _ => p.c += 1,
                }
            }
            p
        })
        .collect();
    Ok(profiles)
}

/// `sum_i (2 a_i + b_i)` for a classical solution.
pub fn concentric_sum(config: &QueensConfig) -> Result<u64> {
    Ok(abc_profile(config)?.iter().map(|p| (2 * p.a + p.b) as u64).sum())
}

/// `sum D` over the queens of `config`.
pub fn queen_d_sum(config: &QueensConfig) -> u64 {
    let n = config.n();
    config
        .squares()
        .map(|s| d_value(n, s.x, s.y).expect("queen is on the board") as u64)
        .sum()
}

/// `(5/4) n^2 - 6n`.
pub fn concentric_lower_bound(n: usize) -> f64 {
    1.25 * (n * n) as f64 - 6.0 * n as f64
}

/// `int_0^1 log(w + a x^3 + b x^2 + c x) dx` with `w = 1` or `0`.
pub fn log_poly_integral(a: f64, b: f64, c: f64, with_one: bool, tol: f64) -> Result<QuadratureResult> {
    if a < 0.0 || b < 0.0 || c < 0.0 {
        return Err(Error::InvalidArgument("coefficients must be non-negative".into()));
    }
    if with_one {
        quadrature::integrate(|x| (1.0 + x * (c + x * (b + x * a))).ln(), 0.0, 1.0, tol)
    } else {
        if a + b + c <= 0.0 {
            return Err(Error::InvalidArgument(
                "a + b + c must be positive without the 1".into(),
            ));
        }
        // log(x (a x^2 + b x + c)) split so tiny x never underflows.
        quadrature::integrate_unit_left_singular(|x| x.ln() + (c + x * (b + x * a)).ln(), tol)
    }
}

/// The log gap: integral with the `1` minus the integral without it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGap {
    pub with_one: f64,
    pub without_one: f64,
    pub gap: f64,
}

pub fn log_gap(a: f64, b: f64, c: f64, tol: f64) -> Result<LogGap> {
    let with_one = log_poly_integral(a, b, c, true, tol)?.value;
    let without_one = log_poly_integral(a, b, c, false, tol)?.value;
    Ok(LogGap {
        with_one,
        without_one,
        gap: with_one - without_one,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMethod {
    ClosedForm,
    Quadrature,
}

const ALPHA_QUADRATURE_TOLERANCE: f64 = 1e-13;

/// The classical-case constant `alpha = 3 - 2 sqrt(3/5) atan(sqrt(5/3))`,
/// about 1.5876, computed in closed form or as
/// `1 - int_0^1 log((5/8) x^2 + 3/8) dx`.
pub fn classical_alpha(method: AlphaMethod) -> Result<f64> {
    match method {
        AlphaMethod::ClosedForm => Ok(3.0 - 2.0 * (3.0f64 / 5.0).sqrt() * (5.0f64 / 3.0).sqrt().atan()),
        AlphaMethod::Quadrature => {
            let r = quadrature::integrate(|x| (0.625 * x * x + 0.375).ln(), 0.0, 1.0, ALPHA_QUADRATURE_TOLERANCE)?;
            Ok(1.0 - r.value)
        }
    }
}

/// `n (ln n - 3)`: log of the toroidal bound without its `1 + o(1)` factor.
pub fn torus_bound_log(n: usize) -> f64 {
    let n = n as f64;
    n * (n.ln() - 3.0)
}

/// `n (ln n - alpha)`: log of the classical bound without its `1 + o(1)`.
pub fn classical_bound_log(n: usize) -> f64 {
    let alpha = classical_alpha(AlphaMethod::ClosedForm).expect("closed form is infallible");
    let n = n as f64;
    n * (n.ln() - alpha)
}

/// `d * int_0^1 x^(d-1) log(k x^(d(d-1)) + c_bad) dx`; equals
/// `ln k - (d - 1)` when `c_bad = 0`.
pub fn hypergraph_integral_check(k: f64, d: u32, c_bad: f64, tol: f64) -> Result<QuadratureResult> {
    if !(k >= 1.0) || d == 0 || !(c_bad >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need k >= 1, d >= 1, c_bad >= 0; got {k}, {d}, {c_bad}"
        )));
    }
    let df = d as f64;
    let power = (d * (d - 1)) as i32;
    let weight = move |x: f64| df * x.powi(d as i32 - 1);
    if c_bad == 0.0 {
        quadrature::integrate_unit_left_singular(move |x| weight(x) * (k.ln() + power as f64 * x.ln()), tol)
    } else {
        quadrature::integrate_unit_left_singular(move |x| weight(x) * (k * x.powi(power) + c_bad).ln(), tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Walks both diagonals; independent of the ring formula.
    fn d_brute(n: usize, i: usize, j: usize) -> usize {
        let (n, i, j) = (n as i64, i as i64, j as i64);
        let mut count = 0;
        for a in 0..n {
            for b in 0..n {
                if (a, b) != (i, j) && ((a - i) == (b - j) || (a - i) == -(b - j)) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn d_matrix_n5() {
        let expected = [
            [4, 4, 4, 4, 4],
            [4, 6, 6, 6, 4],
            [4, 6, 8, 6, 4],
            [4, 6, 6, 6, 4],
            [4, 4, 4, 4, 4],
        ];
        let m = DMatrix::new(5).unwrap();
        for i in 0..5 {
            assert_eq!(m.values[i], expected[i]);
        }
        assert_eq!(d_value(5, 0, 0).unwrap(), 4);
        assert_eq!(d_value(5, 2, 2).unwrap(), 8);
        assert_eq!(d_value(5, 1, 2).unwrap(), 6);
        assert!(d_value(5, 5, 0).is_err());
        assert_eq!(m.to_csv().lines().next().unwrap(), "4,4,4,4,4");
    }

    #[test]
    fn d_matches_brute_force() {
        for n in 1..=12 {
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(d_value(n, i, j).unwrap(), d_brute(n, i, j), "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn profile_basics() {
        let one = QueensConfig::new(vec![0]).unwrap();
        assert_eq!(
            abc_profile(&one).unwrap(),
            vec![RowProfile {
                row: 0,
                a: 0,
                b: 0,
                c: 0
            }]
        );
        assert_eq!(concentric_sum(&one).unwrap(), 0);
        let four = QueensConfig::new(vec![1, 3, 0, 2]).unwrap();
        let prof = abc_profile(&four).unwrap();
        assert!(prof.iter().all(|p| p.a + p.b + p.c == 3));
        assert_eq!(concentric_sum(&four).unwrap(), queen_d_sum(&four));
        let brute: usize = four.squares().map(|s| d_brute(4, s.x, s.y)).sum();
        assert_eq!(queen_d_sum(&four), brute as u64);
        assert_eq!(brute, 12);
        let bad = QueensConfig::new(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(abc_profile(&bad).unwrap_err(), Error::NotASolution);
    }

    #[test]
    fn toroidal_five_solutions() {
        for p in [[0, 2, 4, 1, 3], [0, 3, 1, 4, 2]] {
            let c = QueensConfig::new(p.to_vec()).unwrap();
            assert_eq!(concentric_sum(&c).unwrap(), queen_d_sum(&c));
        }
    }

    #[test]
    fn log_integrals() {
        let r = log_poly_integral(0.0, 0.0, 1.0, false, 1e-10).unwrap();
        assert!((r.value + 1.0).abs() < 1e-9);
        let r = log_poly_integral(1.0, 0.0, 0.0, false, 1e-10).unwrap();
        assert!((r.value + 3.0).abs() < 1e-9);
        let r = log_poly_integral(0.0, 0.0, 0.0, true, 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(log_poly_integral(0.0, 0.0, 0.0, false, 1e-10).is_err());
        assert!(log_poly_integral(-1.0, 0.0, 1.0, true, 1e-10).is_err());
        // int_0^1 log(x^2 + x) dx = 2 ln 2 - 2.
        let r = log_poly_integral(0.0, 1.0, 1.0, false, 1e-10).unwrap();
        assert!((r.value - (2.0 * 2f64.ln() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn log_gap_closed_form() {
        for n in [16usize, 64, 256, 1024] {
            let c = (n - 1) as f64;
            let g = log_gap(0.0, 0.0, c, 1e-11).unwrap();
            let with_one = ((1.0 + c) * (1.0 + c).ln() - c) / c;
            assert!((g.with_one - with_one).abs() < 1e-9);
            assert!((g.without_one - (c.ln() - 1.0)).abs() < 1e-9);
            assert!(g.gap > 0.0 && g.gap <= 2.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn alpha() {
        let closed = classical_alpha(AlphaMethod::ClosedForm).unwrap();
        let quad = classical_alpha(AlphaMethod::Quadrature).unwrap();
        assert!(closed > 1.587 && closed < 1.588, "{closed}");
        assert!((closed - quad).abs() < 1e-9);
        let integral = 1.0 - quad;
        assert!((integral + 0.5876).abs() < 1e-4);
    }

    #[test]
    fn bound_logs() {
        assert_eq!(torus_bound_log(1), -3.0);
        let alpha = classical_alpha(AlphaMethod::ClosedForm).unwrap();
        assert!((classical_bound_log(1) + alpha).abs() < 1e-15);
        for n in 1..200 {
            assert!(classical_bound_log(n) > torus_bound_log(n));
        }
        assert!(torus_bound_log(20) < 0.0 && torus_bound_log(21) > 0.0);
    }

    #[test]
    fn hypergraph_integral() {
        for k in [5.0f64, 17.0, 100.0] {
            for d in [2u32, 3, 4] {
                let r = hypergraph_integral_check(k, d, 0.0, 1e-9).unwrap();
                assert!((r.value - (k.ln() - (d as f64 - 1.0))).abs() < 1e-6, "k={k} d={d}");
            }
        }
        let r = hypergraph_integral_check(1.0, 1, 0.0, 1e-9).unwrap();
        assert!(r.value.abs() < 1e-9);
        let r = hypergraph_integral_check(100.0, 2, 1.0, 1e-9).unwrap();
        // u = x^2 turns it into the integral of ln(100u + 1) over [0, 1].
        let exact = (101.0 * 101f64.ln() - 100.0) / 100.0;
        assert!((r.value - exact).abs() < 1e-6);
        assert!(r.value > 100f64.ln() - 1.0);
        assert!(hypergraph_integral_check(0.5, 2, 0.0, 1e-9).is_err());
    }
}
