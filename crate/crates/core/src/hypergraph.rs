//! Uniform hypergraphs and perfect matchings.
//!
//! Several counting problems are perfect-matching counts in a regular
//! hypergraph with small codegrees:
//!
//! | family        | vertices                                   | edges                    |
//! |---------------|--------------------------------------------|--------------------------|
//! | `torus`       | rows, columns, `x+y`, `x-y` classes (4n)   | one per square (n^2)     |
//! | `transversal` | rows, columns, symbols (3n)                | one per cell (n^2)       |
//! | `sudoku`      | (row,col), (col,sym), (row,sym), (box,sym) | one per cell/symbol (n^3)|
//! | `steiner`     | r-subsets of an n-set                      | one per q-subset         |
//! | `flip`        | queens of the base configuration           | one per flip             |
//!
//! For a `d`-uniform `k`-regular hypergraph on `n` vertices with codegrees
//! `o(k)`, the number of perfect matchings is at most
//! `((1 + o(1)) k / e^(d-1))^(n/d)`; [`entropy_bound_log`] evaluates the
//! logarithm of that bound with the `1 + o(1)` factor dropped.
//!
//! New families only need a constructor returning a [`Hypergraph`] and an
//! entry in [`Family`].

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::BaseParams;
use crate::error::{Error, Result};
use crate::flips::enumerate_flips;
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    pub family: String,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
    labels: Option<Labels>,
}

/// JSON exchange form: `{"n": <vertices>, "edges": [[ids]...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct Exchange {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Sorts every edge and rejects empty edges, repeated or out-of-range
    /// vertices, and duplicate edges.
    pub fn new(num_vertices: usize, mut edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, e) in edges.iter_mut().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidHypergraph(format!("edge {i} is empty")));
            }
            e.sort_unstable();
            if let Some(w) = e.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidHypergraph(format!("edge {i} repeats vertex {}", w[0])));
            }
            if let Some(&v) = e.last().filter(|&&v| v >= num_vertices) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} uses vertex {v} but there are only {num_vertices}"
                )));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::InvalidHypergraph(format!("edge {i} {e:?} is a duplicate")));
            }
        }
        Ok(Hypergraph {
            num_vertices,
            edges,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.vertices.len() != self.num_vertices || labels.edges.len() != self.edges.len() {
            return Err(Error::InvalidHypergraph("label counts do not match".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// Copy with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_vertices {
            return Err(Error::InvalidArgument("relabeling has the wrong length".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        Hypergraph::new(self.num_vertices, edges)
    }

    pub fn to_exchange_json(&self) -> String {
        serde_json::to_string(&Exchange {
            n: self.num_vertices,
            edges: self.edges.clone(),
        })
        .expect("hypergraph serializes")
    }

    pub fn from_exchange_json(text: &str) -> Result<Self> {
        let ex: Exchange =
            serde_json::from_str(text).map_err(|e| Error::InvalidHypergraph(format!("bad exchange JSON: {e}")))?;
        Hypergraph::new(ex.n, ex.edges)
    }
}

fn labelled(num_vertices: usize, edges: Vec<Vec<usize>>, labels: Labels) -> Result<Hypergraph> {
    Hypergraph::new(num_vertices, edges)?.with_labels(labels)
}

/// Toroidal n-queens as perfect matchings: vertex ids are rows `0..n`,
/// columns `n..2n`, `x+y` classes `2n..3n` and `x-y` classes `3n..4n`.
pub fn build_torus_queens_hg(n: usize) -> Result<Hypergraph> {
    if n == 0 {
        return Err(Error::InvalidArgument("board size must be positive".into()));
    }
    let mut vertices = Vec::with_capacity(4 * n);
    for class in ["row", "col", "sum", "diff"] {
        vertices.extend((0..n).map(|i| format!("{class} {i}")));
    }
    let mut edges = Vec::with_capacity(n * n);
    let mut edge_labels = Vec::with_capacity(n * n);
    for y in 0..n {
        for x in 0..n {
            edges.push(vec![y, n + x, 2 * n + (x + y) % n, 3 * n + (x + n - y) % n]);
            edge_labels.push(format!("square ({x}, {y})"));
        }
    }
    labelled(
        4 * n,
        edges,
        Labels {
            family: "torus".into(),
            vertices,
            edges: edge_labels,
        },
    )
}

/// A Latin square: every row and every column is a permutation of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct LatinSquare {
    cells: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for LatinSquare {
    type Error = Error;

    fn try_from(cells: Vec<Vec<usize>>) -> Result<Self> {
        LatinSquare::new(cells)
    }
}

impl From<LatinSquare> for Vec<Vec<usize>> {
    fn from(l: LatinSquare) -> Self {
        l.cells
    }
}

impl LatinSquare {
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self> {
        let n = cells.len();
        if n == 0 {
            return Err(Error::InvalidLatinSquare("order must be positive".into()));
        }
        for (i, row) in cells.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidLatinSquare(format!(
                    "row {i} has {} cells, expected {n}",
                    row.len()
                )));
            }
            if let Some((j, &s)) = row.iter().enumerate().find(|(_, &s)| s >= n) {
                return Err(Error::InvalidLatinSquare(format!("cell ({i}, {j}) holds {s} >= {n}")));
            }
        }
        for i in 0..n {
            let mut row_seen = vec![None; n];
            let mut col_seen = vec![None; n];
            for j in 0..n {
                let s = cells[i][j];
                if let Some(prev) = row_seen[s].replace(j) {
                    return Err(Error::InvalidLatinSquare(format!(
                        "row {i} repeats symbol {s} in columns {prev} and {j}"
                    )));
                }
                let s = cells[j][i];
                if let Some(prev) = col_seen[s].replace(j) {
                    return Err(Error::InvalidLatinSquare(format!(
                        "column {i} repeats symbol {s} in rows {prev} and {j}"
                    )));
                }
            }
        }
        Ok(LatinSquare { cells })
    }

    /// The Cayley table of `Z_n`: `L(i, j) = i + j mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        LatinSquare::new((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
    }

    pub fn order(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i][j]
    }
}

/// Transversals as perfect matchings: rows `0..n`, columns `n..2n`,
/// symbols `2n..3n`, one edge per cell.
pub fn build_transversal_hg(l: &LatinSquare) -> Result<Hypergraph> {
    let n = l.order();
    let mut vertices = Vec::with_capacity(3 * n);
    for class in ["row", "col", "sym"] {
        vertices.extend((0..n).map(|i| format!("{class} {i}")));
    }
    let mut edges = Vec::with_capacity(n * n);
    let mut edge_labels = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            edges.push(vec![i, n + j, 2 * n + l.get(i, j)]);
            edge_labels.push(format!("cell ({i}, {j}) = {}", l.get(i, j)));
        }
    }
    labelled(
        3 * n,
        edges,
        Labels {
            family: "transversal".into(),
            vertices,
            edges: edge_labels,
        },
    )
}

/// Sudoku squares of order `n = b^2` as perfect matchings. Vertex classes,
/// `n^2` ids each: (row, col), (col, sym), (row, sym), (box, sym).
pub fn build_sudoku_hg(b: usize) -> Result<Hypergraph> {
    if b < 2 {
        return Err(Error::InvalidArgument("box size must be at least 2".into()));
    }
    let n = b * b;
    let nn = n * n;
    let mut vertices = Vec::with_capacity(4 * nn);
    for (class, a, c) in [
        ("cell", "r", "c"),
        ("colsym", "c", "s"),
        ("rowsym", "r", "s"),
        ("boxsym", "b", "s"),
    ] {
        for i in 0..n {
            for j in 0..n {
                vertices.push(format!("{class} {a}{i} {c}{j}"));
            }
        }
    }
    let mut edges = Vec::with_capacity(nn * n);
    let mut edge_labels = Vec::with_capacity(nn * n);
    for r in 0..n {
        for c in 0..n {
            let bx = (r / b) * b + c / b;
            for s in 0..n {
                edges.push(vec![r * n + c, nn + c * n + s, 2 * nn + r * n + s, 3 * nn + bx * n + s]);
                edge_labels.push(format!("({r}, {c}) = {s}"));
            }
        }
    }
    labelled(
        4 * nn,
        edges,
        Labels {
            family: "sudoku".into(),
            vertices,
            edges: edge_labels,
        },
    )
}

pub(crate) fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(acc).ok()
}

/// The auxiliary hypergraph of `(n, q, r)`-Steiner systems: one vertex per
/// `r`-subset, one edge per `q`-subset holding all of its `r`-subsets.
pub fn build_steiner_aux_hg(n: usize, q: usize, r: usize, limits: &Limits) -> Result<Hypergraph> {
    if !(r < q && q < n) {
        return Err(Error::InvalidArgument(format!("need r < q < n, got ({n}, {q}, {r})")));
    }
    for (what, count) in [("r-subsets", binomial(n, r)), ("q-subsets", binomial(n, q))] {
        let value = count.unwrap_or(u64::MAX);
        if value > limits.edges {
            return Err(Error::SizeLimit {
                what,
                value,
                cap: limits.edges,
            });
        }
    }
    let r_sets: Vec<Vec<usize>> = (0..n).combinations(r).collect();
    let index: HashMap<&[usize], usize> = r_sets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut edges = Vec::new();
    let mut edge_labels = Vec::new();
    for f in (0..n).combinations(q) {
        edges.push(f.iter().copied().combinations(r).map(|s| index[s.as_slice()]).collect());
        edge_labels.push(format!("{f:?}"));
    }
    let vertices = r_sets.iter().map(|s| format!("{s:?}")).collect();
    labelled(
        r_sets.len(),
        edges,
        Labels {
            family: "steiner".into(),
            vertices,
            edges: edge_labels,
        },
    )
}

/// Queens of the base configuration (vertex `y` is the queen in row `y`)
/// with one 4-edge per flip.
pub fn build_flip_hg(k: u32) -> Result<Hypergraph> {
    let params = BaseParams::new(k)?;
    let flips = enumerate_flips(&params)?;
    let vertices = (0..params.n)
        .map(|y| format!("queen ({}, {y})", params.column_of_row(y)))
        .collect();
    let edge_labels = flips.iter().map(|f| format!("flip {}", f.canonical_id())).collect();
    let edges = flips.iter().map(|f| f.rows().to_vec()).collect();
    labelled(
        params.n,
        edges,
        Labels {
            family: "flip".into(),
            vertices,
            edges: edge_labels,
        },
    )
}

/// Parameters for one of the built-in families, as accepted by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Torus {
        n: usize,
    },
    Transversal {
        #[serde(default)]
        cyclic: Option<usize>,
        #[serde(default)]
        square: Option<LatinSquare>,
    },
    Sudoku {
        b: usize,
    },
    Steiner {
        n: usize,
        q: usize,
        r: usize,
    },
    Flip {
        k: u32,
    },
}

impl Family {
    pub fn build(&self, limits: &Limits) -> Result<Hypergraph> {
        match self {
            Family::Torus { n } => build_torus_queens_hg(*n),
            Family::Transversal { cyclic, square } => match (cyclic, square) {
                (Some(n), None) => build_transversal_hg(&LatinSquare::cyclic(*n)?),
                (None, Some(l)) => build_transversal_hg(l),
                _ => Err(Error::InvalidArgument(
                    "transversal needs exactly one of `cyclic` or `square`".into(),
                )),
            },
            Family::Sudoku { b } => build_sudoku_hg(*b),
            Family::Steiner { n, q, r } => build_steiner_aux_hg(*n, *q, *r, limits),
            Family::Flip { k } => {
                if *k > limits.k {
                    return Err(Error::SizeLimit {
                        what: "k",
                        value: *k as u64,
                        cap: limits.k as u64,
                    });
                }
                build_flip_hg(*k)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypergraphStats {
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Common edge size; `None` when edges differ in size (or there are none).
    pub d: Option<usize>,
    /// Per-edge sizes, reported only for non-uniform hypergraphs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_sizes: Option<Vec<usize>>,
    pub is_regular: bool,
    /// Common degree when regular.
    pub k: Option<usize>,
    pub min_degree: usize,
    pub max_degree: usize,
    pub max_codegree: usize,
}

pub fn stats(h: &Hypergraph) -> HypergraphStats {
    let mut degree = vec![0usize; h.num_vertices];
    let mut codegree: HashMap<(usize, usize), usize> = HashMap::new();
    for e in &h.edges {
        for (i, &u) in e.iter().enumerate() {
            degree[u] += 1;
            for &v in &e[i + 1..] {
                *codegree.entry((u, v)).or_default() += 1;
            }
        }
    }
    let sizes: Vec<usize> = h.edges.iter().map(Vec::len).collect();
    let uniform = sizes.first().filter(|&&d| sizes.iter().all(|&s| s == d)).copied();
    let min_degree = degree.iter().copied().min().unwrap_or(0);
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    let is_regular = min_degree == max_degree;
    HypergraphStats {
        num_vertices: h.num_vertices,
        num_edges: h.edges.len(),
        d: uniform,
        edge_sizes: if uniform.is_none() && !sizes.is_empty() {
            Some(sizes)
        } else {
            None
        },
        is_regular,
        k: (is_regular && h.num_vertices > 0).then_some(max_degree),
        min_degree,
        max_degree,
        max_codegree: codegree.values().copied().max().unwrap_or(0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchingCount {
    pub count: u64,
    pub nodes_visited: u64,
}

struct Search<'a> {
    words: usize,
    masks: &'a [u64],
    by_min: &'a [Vec<usize>],
    num_vertices: usize,
    budget: u64,
    shared_nodes: &'a AtomicU64,
}

const FLUSH_EVERY: u64 = 1 << 14;

impl Search<'_> {
    fn mask(&self, e: usize) -> &[u64] {
        &self.masks[e * self.words..(e + 1) * self.words]
    }

    fn lowest_uncovered(&self, covered: &[u64], from_word: usize) -> Option<usize> {
        (from_word..self.words).find_map(|w| {
            let free = !covered[w];
            (free != 0)
                .then(|| w * 64 + free.trailing_zeros() as usize)
                .filter(|&v| v < self.num_vertices)
        })
    }

    fn flush(&self, local: &mut u64) -> Result<()> {
        let total = self.shared_nodes.fetch_add(*local, Ordering::Relaxed) + *local;
        *local = 0;
        if total > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
                visited: total,
            });
        }
        Ok(())
    }

    fn count(&self, covered: &mut [u64], from_word: usize, local: &mut u64) -> Result<u64> {
        *local += 1;
        if *local >= FLUSH_EVERY {
            self.flush(local)?;
        }
        let Some(v) = self.lowest_uncovered(covered, from_word) else {
            return Ok(1);
        };
        let mut total = 0u64;
        for &e in &self.by_min[v] {
            let m = self.mask(e);
            if covered.iter().zip(m).any(|(c, b)| c & b != 0) {
                continue;
            }
            covered.iter_mut().zip(m).for_each(|(c, b)| *c |= b);
            let sub = self.count(covered, v / 64, local);
            covered.iter_mut().zip(m).for_each(|(c, b)| *c ^= b);
            total = total.checked_add(sub?).ok_or(Error::Overflow)?;
        }
        Ok(total)
    }
}

/// Exact number of perfect matchings.
///
/// Always branches on the lowest uncovered vertex. Every vertex below it is
/// already covered, so only edges whose smallest vertex is the pivot can be
/// added; those are tried in edge order. The top-level branches run in
/// parallel and their totals are summed.
pub fn count_perfect_matchings(h: &Hypergraph, limits: &Limits) -> Result<MatchingCount> {
    let n = h.num_vertices;
    if n == 0 {
        return Ok(MatchingCount {
            count: 1,
            nodes_visited: 1,
        });
    }
    let s = stats(h);
    if let Some(d) = s.d {
        if n % d != 0 {
            return Ok(MatchingCount {
                count: 0,
                nodes_visited: 0,
            });
        }
    }
    let words = n.div_ceil(64);
    let mut masks = vec![0u64; words * h.edges.len()];
    let mut by_min = vec![Vec::new(); n];
    for (i, e) in h.edges.iter().enumerate() {
        for &v in e {
            masks[i * words + v / 64] |= 1 << (v % 64);
        }
        by_min[e[0]].push(i);
    }
    let shared = AtomicU64::new(0);
    let search = Search {
        words,
        masks: &masks,
        by_min: &by_min,
        num_vertices: n,
        budget: limits.pm_nodes,
        shared_nodes: &shared,
    };
    let branches = by_min[0]
        .par_iter()
        .map(|&e| {
            let mut covered = search.mask(e).to_vec();
            let mut local = 0u64;
            let c = search.count(&mut covered, 0, &mut local);
            search.flush(&mut local)?;
            c
        })
        .collect::<Vec<_>>();
    let mut count = 0u64;
    for b in branches {
        count = count.checked_add(b?).ok_or(Error::Overflow)?;
    }
    Ok(MatchingCount {
        count,
        nodes_visited: shared.load(Ordering::Relaxed) + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula_name: String,
    pub log_bound: f64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

/// `(n/d) (ln k - (d - 1))`, the log of the matching bound without its
/// `1 + o(1)` factor.
pub fn entropy_bound_log(s: &HypergraphStats) -> Result<BoundReport> {
    let (Some(d), Some(k), true) = (s.d, s.k, s.is_regular) else {
        return Err(Error::Irregular);
    };
    if k == 0 {
        return Err(Error::Irregular);
    }
    let n = s.num_vertices;
    Ok(BoundReport {
        formula_name: "log((k / e^(d-1))^(n/d))".into(),
        log_bound: n as f64 / d as f64 * ((k as f64).ln() - (d as f64 - 1.0)),
        n,
        k,
        d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_toroidal;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pm(h: &Hypergraph) -> u64 {
        count_perfect_matchings(h, &Limits::default()).unwrap().count
    }

    /// Subset enumeration over all edge sets; independent of the pivot search.
    fn brute_force_pm(h: &Hypergraph) -> u64 {
        let m = h.edges().len();
        assert!(m <= 20);
        (0u32..1 << m)
            .filter(|mask| {
                let mut hit = vec![0; h.num_vertices()];
                for (i, e) in h.edges().iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        e.iter().for_each(|&v| hit[v] += 1);
                    }
                }
                hit.iter().all(|&c| c == 1)
            })
            .count() as u64
    }

    #[test]
    fn container_rules() {
        assert!(Hypergraph::new(3, vec![vec![0, 0]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 3]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).is_err());
        let h = Hypergraph::new(3, vec![vec![2, 0]]).unwrap();
        assert_eq!(h.edges(), &[vec![0, 2]]);
        let text = h.to_exchange_json();
        assert_eq!(text, r#"{"n":3,"edges":[[0,2]]}"#);
        assert_eq!(Hypergraph::from_exchange_json(&text).unwrap(), h);
    }

    #[test]
    fn torus_family() {
        let h = build_torus_queens_hg(5).unwrap();
        let s = stats(&h);
        assert_eq!(
            (s.num_vertices, s.num_edges, s.d, s.k, s.max_codegree),
            (20, 25, Some(4), Some(5), 1)
        );
        assert_eq!(pm(&h), 10);
        for n in [1, 3, 5, 7] {
            assert_eq!(pm(&build_torus_queens_hg(n).unwrap()), count_toroidal(n).unwrap().count);
        }
        for n in [2, 4, 6, 8] {
            assert_eq!(pm(&build_torus_queens_hg(n).unwrap()), 0);
            assert_eq!(count_toroidal(n).unwrap().count, 0);
        }
    }

    #[test]
    fn transversal_family() {
        let h = build_transversal_hg(&LatinSquare::cyclic(3).unwrap()).unwrap();
        let s = stats(&h);
        assert_eq!(
            (s.num_vertices, s.num_edges, s.d, s.k, s.max_codegree),
            (9, 9, Some(3), Some(3), 1)
        );
        assert_eq!(pm(&h), 3);
        assert_eq!(brute_force_pm(&h), 3);
        let h2 = build_transversal_hg(&LatinSquare::cyclic(2).unwrap()).unwrap();
        assert_eq!(pm(&h2), 0);
        assert_eq!(brute_force_pm(&h2), 0);
        // Z_4 has no transversal; Z_2 x Z_2 has 8.
        assert_eq!(pm(&build_transversal_hg(&LatinSquare::cyclic(4).unwrap()).unwrap()), 0);
        let klein = LatinSquare::new((0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect()).unwrap();
        assert_eq!(pm(&build_transversal_hg(&klein).unwrap()), 8);
    }

    #[test]
    fn latin_square_errors() {
        let e = LatinSquare::new(vec![vec![0, 1], vec![0, 1]]).unwrap_err();
        assert!(e.to_string().contains("column 0"), "{e}");
        let e = LatinSquare::new(vec![vec![0, 0], vec![1, 1]]).unwrap_err();
        assert!(e.to_string().contains("row 0"), "{e}");
        assert!(LatinSquare::new(vec![vec![0, 2], vec![1, 0]]).is_err());
        assert!(LatinSquare::new(vec![vec![0]; 2]).is_err());
        assert!(LatinSquare::new(vec![]).is_err());
    }

    #[test]
    fn sudoku_family() {
        let h = build_sudoku_hg(2).unwrap();
        let s = stats(&h);
        assert_eq!((s.num_vertices, s.num_edges, s.d, s.k), (64, 64, Some(4), Some(4)));
        assert_eq!(s.max_codegree, 2);
        assert!(build_sudoku_hg(1).is_err());
        let s3 = stats(&build_sudoku_hg(3).unwrap());
        assert_eq!(
            (s3.num_vertices, s3.num_edges, s3.k, s3.max_codegree),
            (324, 729, Some(9), 3)
        );
    }

    #[test]
    fn steiner_family() {
        let l = Limits::default();
        let h = build_steiner_aux_hg(7, 3, 2, &l).unwrap();
        let s = stats(&h);
        assert_eq!(
            (s.num_vertices, s.num_edges, s.d, s.k, s.max_codegree),
            (21, 35, Some(3), Some(5), 1)
        );
        assert_eq!(pm(&h), 30);
        assert_eq!(pm(&build_steiner_aux_hg(6, 3, 2, &l).unwrap()), 0);
        assert!(build_steiner_aux_hg(7, 2, 2, &l).is_err());
        let tiny = Limits { edges: 10, ..l };
        assert!(matches!(
            build_steiner_aux_hg(7, 3, 2, &tiny),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn flip_family() {
        let h = build_flip_hg(1).unwrap();
        let s = stats(&h);
        assert_eq!((s.num_vertices, s.num_edges, s.d, s.k), (5, 5, Some(4), Some(4)));
        assert_eq!(pm(&h), 0);
        let s2 = stats(&build_flip_hg(2).unwrap());
        assert_eq!((s2.num_vertices, s2.num_edges, s2.k), (17, 68, Some(16)));
        assert_eq!(17 * 16, 4 * 68);
    }

    #[test]
    fn stats_edge_cases() {
        let single = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        let s = stats(&single);
        assert_eq!((s.d, s.is_regular, s.k, s.max_codegree), (Some(3), true, Some(1), 1));
        let mixed = Hypergraph::new(3, vec![vec![0, 1, 2], vec![0, 1]]).unwrap();
        let s = stats(&mixed);
        assert_eq!(s.d, None);
        assert_eq!(s.edge_sizes, Some(vec![3, 2]));
        assert!(!s.is_regular);
        assert_eq!(s.max_codegree, 2);
        assert_eq!(entropy_bound_log(&s).unwrap_err(), Error::Irregular);
    }

    #[test]
    fn pm_small_cases() {
        let h = Hypergraph::new(0, vec![]).unwrap();
        assert_eq!(pm(&h), 1);
        let h = Hypergraph::new(5, (0..5).map(|i| vec![i, (i + 1) % 5]).collect()).unwrap();
        assert_eq!(pm(&h), 0);
        let cycle6 = Hypergraph::new(6, (0..6).map(|i| vec![i, (i + 1) % 6]).collect()).unwrap();
        assert_eq!(pm(&cycle6), 2);
        // K_6 has 15 perfect matchings.
        let k6 = Hypergraph::new(6, (0..6).combinations(2).collect()).unwrap();
        assert_eq!(pm(&k6), 15);
        assert_eq!(brute_force_pm(&k6), 15);
        // A vertex beyond 64 exercises multi-word masks.
        let wide = Hypergraph::new(130, (0..65).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap();
        assert_eq!(pm(&wide), 1);
    }

    #[test]
    fn budget() {
        let h = build_steiner_aux_hg(7, 3, 2, &Limits::default()).unwrap();
        let tight = Limits {
            pm_nodes: 10,
            ..Limits::default()
        };
        assert!(matches!(
            count_perfect_matchings(&h, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn relabeling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hs = [
            build_torus_queens_hg(5).unwrap(),
            build_steiner_aux_hg(7, 3, 2, &Limits::default()).unwrap(),
            build_transversal_hg(&LatinSquare::cyclic(5).unwrap()).unwrap(),
        ];
        for h in &hs {
            let base = pm(h);
            for _ in 0..10 {
                let mut perm: Vec<usize> = (0..h.num_vertices()).collect();
                perm.shuffle(&mut rng);
                assert_eq!(pm(&h.relabel(&perm).unwrap()), base);
            }
        }
    }

    #[test]
    fn bound_reports() {
        let s = stats(&build_torus_queens_hg(5).unwrap());
        let b = entropy_bound_log(&s).unwrap();
        assert!((b.log_bound - 5.0 * (5f64.ln() - 3.0)).abs() < 1e-12);
        let one = stats(&Hypergraph::new(1, vec![vec![0]]).unwrap());
        assert_eq!(entropy_bound_log(&one).unwrap().log_bound, 0.0);
        let st = stats(&build_steiner_aux_hg(7, 3, 2, &Limits::default()).unwrap());
        assert!((entropy_bound_log(&st).unwrap().log_bound - 7.0 * (5f64.ln() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn double_counting() {
        let l = Limits::default();
        let hs = [
            build_torus_queens_hg(6).unwrap(),
            build_transversal_hg(&LatinSquare::cyclic(4).unwrap()).unwrap(),
            build_sudoku_hg(2).unwrap(),
            build_steiner_aux_hg(8, 4, 2, &l).unwrap(),
            build_flip_hg(2).unwrap(),
        ];
        for h in &hs {
            let s = stats(h);
            assert!(s.is_regular);
            assert_eq!(s.num_vertices * s.k.unwrap(), s.d.unwrap() * s.num_edges);
        }
    }

    #[test]
    fn family_params() {
        let l = Limits::default();
        let f: Family = serde_json::from_str(r#"{"family":"steiner","n":7,"q":3,"r":2}"#).unwrap();
        assert_eq!(f.build(&l).unwrap().num_vertices(), 21);
        let f: Family = serde_json::from_str(r#"{"family":"transversal","square":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(f.build(&l).unwrap().edges().len(), 4);
        let f: Family = serde_json::from_str(r#"{"family":"transversal"}"#).unwrap();
        assert!(f.build(&l).is_err());
        assert!(serde_json::from_str::<Family>(r#"{"family":"transversal","square":[[0,0],[1,1]]}"#).is_err());
    }
}
