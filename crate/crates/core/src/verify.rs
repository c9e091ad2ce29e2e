//! Construction-agnostic checks for designs, transversals, and holes.
//!
//! Nothing here calls into the constructors. Coverage is recomputed from the
//! raw cells and the host graph's edge enumeration, so this module serves as
//! the oracle for everything else in the crate.

use std::fmt;

use serde::Serialize;

use crate::design::{Block, DesignArray, Edge, Hole, HostGraph, Transversal};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// First concrete witness of failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub non_empty: usize,
    pub per_row: Vec<usize>,
    pub per_col: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    pub counts: Counts,
}

impl VerificationReport {
    fn from_checks(checks: Vec<Check>, counts: Counts) -> Self {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
            counts,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<12} {}", c.name, if c.passed { "ok" } else { "FAIL" })?;
            if let Some(x) = &c.counterexample {
                write!(f, "  ({x})")?;
            }
            writeln!(f)?;
        }
        write!(
            f,
            "non-empty cells: {}  verdict: {}",
            self.counts.non_empty,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

fn check(name: &'static str, failure: Option<String>) -> Check {
    Check { name, passed: failure.is_none(), counterexample: failure }
}

/// Scans a line of cells (a row or a column) and returns the first point that
/// is not covered exactly once, if any.
fn line_failure<'a>(
    n: usize,
    label: &str,
    index: usize,
    blocks: impl Iterator<Item = &'a Block>,
) -> Option<String> {
    let mut hits = vec![0usize; n];
    for b in blocks {
        for p in b.points() {
            if let Some(h) = hits.get_mut(p.index()) {
                *h += 1;
            } else {
                return Some(format!("{label} {index}: point {p} is outside 0..{n}"));
            }
        }
    }
    hits.iter()
        .position(|&h| h != 1)
        .map(|p| format!("{label} {index}: point {p} appears {} times", hits[p]))
}

/// Checks an array against its host graph:
/// every cell is empty or a `k`-edge matching, every row and every column
/// holds each vertex exactly once, and every host edge lies in exactly one
/// block (with no foreign edges).
pub fn verify(arr: &DesignArray) -> VerificationReport {
    let (side, n, k) = (arr.side(), arr.n(), arr.k());
    let host = arr.host();
    let mut checks = Vec::with_capacity(5);

    let shape = if host.vertex_count() != n {
        Some(format!("n = {n} but host {host} has {} vertices", host.vertex_count()))
    } else if k == 0 {
        Some("k must be positive".to_string())
    } else {
        match host.expected_side() {
            Some(expected) if expected == side => None,
            Some(expected) => Some(format!("side {side}, host {host} needs {expected}")),
            None => Some(format!("host {host} is not regular")),
        }
    };
    checks.push(check("shape", shape));

    let mut blocks_bad = None;
    for (r, c, b) in arr.occupied() {
        let mut pts: Vec<usize> = b.points().map(|p| p.index()).collect();
        pts.sort_unstable();
        let problem = if b.len() != k {
            Some(format!("{} edges instead of {k}", b.len()))
        } else if pts.windows(2).any(|w| w[0] == w[1]) {
            Some("edges share a point".to_string())
        } else if pts.last().is_some_and(|&p| p >= n) {
            Some(format!("point {} outside 0..{n}", pts.last().unwrap()))
        } else {
            None
        };
        if let Some(p) = problem {
            blocks_bad = Some(format!("cell ({r}, {c}): {p}"));
            break;
        }
    }
    checks.push(check("blocks", blocks_bad));

    let rows_bad = (0..side).find_map(|r| {
        line_failure(n, "row", r, (0..side).filter_map(|c| arr.get(r, c)))
    });
    checks.push(check("rows", rows_bad));
    let cols_bad = (0..side).find_map(|c| {
        line_failure(n, "column", c, (0..side).filter_map(|r| arr.get(r, c)))
    });
    checks.push(check("columns", cols_bad));

    checks.push(check("pairs", pair_failure(arr, host)));

    let mut counts = Counts {
        non_empty: 0,
        per_row: vec![0; side],
        per_col: vec![0; side],
    };
    for (r, c, _) in arr.occupied() {
        counts.non_empty += 1;
        counts.per_row[r] += 1;
        counts.per_col[c] += 1;
    }
    VerificationReport::from_checks(checks, counts)
}

fn pair_failure(arr: &DesignArray, host: &HostGraph) -> Option<String> {
    let n = arr.n();
    // first cell that covered each pair, and how often
    let mut first: Vec<Option<(usize, usize)>> = vec![None; n * n];
    let mut count = vec![0u32; n * n];
    for (r, c, b) in arr.occupied() {
        for &e in b.edges() {
            let (u, v) = (e.u().index(), e.v().index());
            if v >= n || !host.contains(e) {
                return Some(format!("edge {e} at ({r}, {c}) is not an edge of {host}"));
            }
            let slot = u * n + v;
            count[slot] += 1;
            match first[slot] {
                None => first[slot] = Some((r, c)),
                Some((r0, c0)) => {
                    return Some(format!(
                        "pair {e} covered more than once: ({r0}, {c0}) and ({r}, {c})"
                    ))
                }
            }
        }
    }
    host.edges()
        .find(|e| count[e.u().index() * n + e.v().index()] == 0)
        .map(|e| format!("pair {e} is not covered"))
}

/// Checks that `t` picks one cell per row and per column and that the picked
/// blocks cover every point exactly once.
pub fn verify_transversal(arr: &DesignArray, t: &Transversal) -> VerificationReport {
    let side = arr.side();
    let mut checks = Vec::with_capacity(4);
    checks.push(check(
        "length",
        (t.len() != side).then(|| format!("{} cells for side {side}", t.len())),
    ));

    let permutation = |pick: fn(&(usize, usize)) -> usize, label: &str| {
        let mut seen = vec![false; side];
        for cell in &t.cells {
            let i = pick(cell);
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                Some(_) => return Some(format!("{label} {i} used twice")),
                None => return Some(format!("{label} {i} out of range")),
            }
        }
        seen.iter().position(|s| !s).map(|i| format!("{label} {i} unused"))
    };
    checks.push(check("rows", permutation(|c| c.0, "row")));
    checks.push(check("columns", permutation(|c| c.1, "column")));

    let n = arr.n();
    let mut hits = vec![0usize; n];
    let mut stray = None;
    for &(r, c) in &t.cells {
        for p in arr.get(r, c).into_iter().flat_map(Block::points) {
            match hits.get_mut(p.index()) {
                Some(h) => *h += 1,
                None => stray = Some(format!("point {p} outside 0..{n}")),
            }
        }
    }
    let coverage = stray.or_else(|| {
        hits.iter()
            .position(|&h| h != 1)
            .map(|p| format!("point {p} covered {} times", hits[p]))
    });
    checks.push(check("points", coverage));

    let counts = Counts {
        non_empty: t.cells.iter().filter(|&&(r, c)| arr.get(r, c).is_some()).count(),
        ..Counts::default()
    };
    VerificationReport::from_checks(checks, counts)
}

/// Checks that every cell of `rows x cols` is empty and the hole is square.
pub fn verify_hole(arr: &DesignArray, h: &Hole) -> VerificationReport {
    let side = arr.side();
    let distinct = |v: &[usize]| {
        let mut s = v.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == v.len()
    };
    let shape = if h.rows.len() != h.cols.len() {
        Some(format!("{} rows but {} columns", h.rows.len(), h.cols.len()))
    } else if !distinct(&h.rows) || !distinct(&h.cols) {
        Some("repeated index".to_string())
    } else if let Some(i) = h.rows.iter().chain(&h.cols).find(|&&i| i >= side) {
        Some(format!("index {i} outside 0..{side}"))
    } else {
        None
    };
    let occupied = h
        .rows
        .iter()
        .flat_map(|&r| h.cols.iter().map(move |&c| (r, c)))
        .find(|&(r, c)| arr.get(r, c).is_some())
        .map(|(r, c)| format!("cell ({r}, {c}) is occupied"));
    VerificationReport::from_checks(
        vec![check("shape", shape), check("empty", occupied)],
        Counts::default(),
    )
}

/// Result of an exhaustive search for an OMD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteForce {
    Exists(DesignArray),
    NotExists,
    Exhausted,
}

/// Exhaustive backtracking over arrays of side `n - 1` on `K_n`.
///
/// Edges are placed one at a time. Each step picks the requirement with the
/// fewest ways left to meet it (a point missing from a row or column, or a
/// pair not yet placed) and tries each of them. Row 0 is fixed to the matching
/// `{0,1}, {2,3}, ...` packed into the leftmost cells, and column 0 may only
/// use the top `n / 2k` rows, which loses no designs up to relabelling and
/// line order. A row or column is abandoned when its uncovered points can no
/// longer be split into the missing edges of partial cells plus whole blocks.
///
/// `budget` bounds the number of edge placements. Intended for `n <= 8`.
pub fn brute_force_exists(n: usize, k: usize, budget: u64) -> BruteForce {
    if n < 2 || k == 0 {
        return BruteForce::NotExists;
    }
    let mut s = Brute::new(n, k, budget);
    if !s.feasible() {
        return BruteForce::NotExists;
    }
    // symmetry break: relabel so row 0 is {0,1},{2,3},... packed k edges per
    // cell into columns 0.., then reorder rows 1.. so the other blocks of
    // column 0 sit directly below it
    let m = n / (2 * k);
    for i in 0..n / 2 {
        s.put(0, i / k, Edge::new(2 * i, 2 * i + 1).expect("distinct"));
        s.nodes += 1;
    }
    for r in m..s.side {
        s.blocked[r * s.side] = true;
    }
    let found = s.feasible() && s.search();
    if found {
        BruteForce::Exists(s.to_array())
    } else if s.out_of_budget {
        BruteForce::Exhausted
    } else {
        BruteForce::NotExists
    }
}

struct Brute {
    n: usize,
    k: usize,
    side: usize,
    cells: Vec<Vec<Edge>>,
    blocked: Vec<bool>,
    row_has: Vec<Vec<bool>>,
    col_has: Vec<Vec<bool>>,
    pair_used: Vec<Vec<bool>>,
    row_free: Vec<usize>,
    col_free: Vec<usize>,
    nodes: u64,
    budget: u64,
    out_of_budget: bool,
}

impl Brute {
    fn new(n: usize, k: usize, budget: u64) -> Self {
        let side = n - 1;
        Brute {
            n,
            k,
            side,
            cells: vec![Vec::new(); side * side],
            blocked: vec![false; side * side],
            row_has: vec![vec![false; n]; side],
            col_has: vec![vec![false; n]; side],
            pair_used: vec![vec![false; n]; n],
            row_free: vec![n; side],
            col_free: vec![n; side],
            nodes: 0,
            budget,
            out_of_budget: false,
        }
    }

    fn toggle(&mut self, r: usize, c: usize, e: Edge, on: bool) {
        let (u, v) = (e.u().index(), e.v().index());
        for p in [u, v] {
            self.row_has[r][p] = on;
            self.col_has[c][p] = on;
        }
        self.pair_used[u][v] = on;
        self.pair_used[v][u] = on;
        if on {
            self.row_free[r] -= 2;
            self.col_free[c] -= 2;
        } else {
            self.row_free[r] += 2;
            self.col_free[c] += 2;
        }
    }

    fn put(&mut self, r: usize, c: usize, e: Edge) {
        self.cells[r * self.side + c].push(e);
        self.toggle(r, c, e, true);
    }

    fn take(&mut self, r: usize, c: usize) {
        let e = self.cells[r * self.side + c].pop().expect("placed edge");
        self.toggle(r, c, e, false);
    }

    fn line_ok(&self, free: usize, partial_need: usize) -> bool {
        free >= 2 * partial_need && (free - 2 * partial_need) % (2 * self.k) == 0
    }

    fn feasible(&self) -> bool {
        let need = |len: usize| if len > 0 && len < self.k { self.k - len } else { 0 };
        (0..self.side).all(|r| {
            let partial: usize = (0..self.side).map(|c| need(self.cells[r * self.side + c].len())).sum();
            self.line_ok(self.row_free[r], partial)
        }) && (0..self.side).all(|c| {
            let partial: usize = (0..self.side).map(|r| need(self.cells[r * self.side + c].len())).sum();
            self.line_ok(self.col_free[c], partial)
        })
    }

    fn open(&self, r: usize, c: usize) -> bool {
        let i = r * self.side + c;
        !self.blocked[i] && self.cells[i].len() < self.k
    }

    /// Placements of edge `{p, q}` in row `r` (`by_row`) or column `r`.
    fn line_options(&self, by_row: bool, r: usize, p: usize, q: usize, out: &mut Vec<(usize, usize, usize, usize)>) {
        for x in 0..self.side {
            let (row, col) = if by_row { (r, x) } else { (x, r) };
            let other = if by_row { &self.col_has[col] } else { &self.row_has[row] };
            if !other[p] && !other[q] && self.open(row, col) {
                out.push((row, col, p, q));
            }
        }
    }

    /// Every way to satisfy one requirement: a point missing from a line, or
    /// an unused pair. Returns the requirement with the fewest options.
    fn tightest(&self) -> Option<Vec<(usize, usize, usize, usize)>> {
        let mut best: Option<Vec<_>> = None;
        let mut opts = Vec::new();
        let better = |opts: &Vec<_>, best: &Option<Vec<_>>| best.as_ref().is_none_or(|b: &Vec<_>| opts.len() < b.len());
        for by_row in [true, false] {
            for r in 0..self.side {
                let has = if by_row { &self.row_has[r] } else { &self.col_has[r] };
                for p in (0..self.n).filter(|&p| !has[p]) {
                    opts.clear();
                    for q in (0..self.n).filter(|&q| q != p && !has[q] && !self.pair_used[p][q]) {
                        self.line_options(by_row, r, p, q, &mut opts);
                    }
                    if better(&opts, &best) {
                        best = Some(opts.clone());
                        if opts.is_empty() {
                            return best;
                        }
                    }
                }
            }
        }
        for p in 0..self.n {
            for q in (p + 1..self.n).filter(|&q| !self.pair_used[p][q]) {
                opts.clear();
                for r in (0..self.side).filter(|&r| !self.row_has[r][p] && !self.row_has[r][q]) {
                    self.line_options(true, r, p, q, &mut opts);
                }
                if better(&opts, &best) {
                    best = Some(opts.clone());
                    if opts.is_empty() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn search(&mut self) -> bool {
        let Some(options) = self.tightest() else {
            return self.feasible();
        };
        for (r, c, p, q) in options {
            if self.nodes >= self.budget {
                self.out_of_budget = true;
                return false;
            }
            self.nodes += 1;
            self.put(r, c, Edge::new(p, q).expect("p != q"));
            if self.feasible() && self.search() {
                return true;
            }
            self.take(r, c);
            if self.out_of_budget {
                return false;
            }
        }
        false
    }

    fn to_array(&self) -> DesignArray {
        let mut a = DesignArray::new(self.side, self.n, self.k, HostGraph::complete(self.n));
        for (i, edges) in self.cells.iter().enumerate() {
            if !edges.is_empty() {
                let b = Block::new(edges.iter().copied()).expect("search keeps cells as matchings");
                a.place(i / self.side, i % self.side, b).expect("fresh cell");
            }
        }
        a
    }
}
