//! Room squares, i.e. OMD(n, 1), together with a transversal.
//!
//! Cyclic squares come from strong starters in `Z_r` (`r = n - 1`). Points
//! are `Z_r ∪ {∞}` flattened to `0..r` with `∞ ↦ r`. Row `j` holds `{∞, j}`
//! at `(j, j)` and the translate `{x_i + j, y_i + j}` of starter pair `i` at
//! `(j, j + a_i)`, where the adder is `a_i = x_i + y_i`. Column `c` then holds
//! the pairs `{x_i - a_i, y_i - a_i} + c = {-y_i, -x_i} + c`, which again
//! partition `Z_r \ {0}`.
//!
//! Orders without a strong starter fall back to a cell-by-cell backtracking
//! search. Transversals are always found by exact-cover search and certified.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::{Block, DesignArray, HostGraph, Transversal};
use crate::dlx::ExactCover;
use crate::error::{Error, Result};
use crate::search::{rng, Search, SearchConfig};
use crate::verify::verify_transversal;

/// A starter in `Z_r` together with an adder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarterAdder {
    r: usize,
    starter: Vec<(usize, usize)>,
    adder: Vec<usize>,
}

impl StarterAdder {
    /// Validates and wraps a starter-adder pair.
    ///
    /// Requirements: the pairs partition `Z_r \ {0}` and their differences
    /// `±(x - y)` hit every nonzero residue once; the adder entries are
    /// distinct and nonzero; the shifted pairs `{x_i - a_i, y_i - a_i}` again
    /// partition `Z_r \ {0}`.
    pub fn new(r: usize, starter: Vec<(usize, usize)>, adder: Vec<usize>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidStarter(m));
        if r % 2 == 0 {
            return bad(format!("modulus {r} is even"));
        }
        let half = (r - 1) / 2;
        if starter.len() != half || adder.len() != half {
            return bad(format!("need {half} pairs and adder entries"));
        }
        if !partitions_nonzero(r, starter.iter().copied()) {
            return bad("pairs do not partition the nonzero residues".into());
        }
        let mut diff = vec![false; r];
        for &(x, y) in &starter {
            for d in [(x + r - y) % r, (y + r - x) % r] {
                if std::mem::replace(&mut diff[d], true) {
                    return bad(format!("difference {d} repeated"));
                }
            }
        }
        let mut seen = vec![false; r];
        for &a in &adder {
            if a == 0 || a >= r || std::mem::replace(&mut seen[a], true) {
                return bad(format!("adder entry {a} is zero, out of range, or repeated"));
            }
        }
        let shifted = starter
            .iter()
            .zip(&adder)
            .map(|(&(x, y), &a)| ((x + r - a) % r, (y + r - a) % r));
        if !partitions_nonzero(r, shifted) {
            return bad("shifted pairs do not partition the nonzero residues".into());
        }
        Ok(StarterAdder { r, starter, adder })
    }

    /// Uses `a_i = x_i + y_i`; valid exactly when the starter is strong.
    pub fn from_strong_starter(r: usize, starter: Vec<(usize, usize)>) -> Result<Self> {
        let adder = starter.iter().map(|&(x, y)| (x + y) % r.max(1)).collect();
        StarterAdder::new(r, starter, adder)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn starter(&self) -> &[(usize, usize)] {
        &self.starter
    }

    pub fn adder(&self) -> &[usize] {
        &self.adder
    }
}

fn partitions_nonzero(r: usize, pairs: impl Iterator<Item = (usize, usize)>) -> bool {
    let mut hit = vec![false; r];
    for (x, y) in pairs {
        for z in [x, y] {
            if z == 0 || z >= r || std::mem::replace(&mut hit[z], true) {
                return false;
            }
        }
    }
    hit.iter().skip(1).all(|&h| h)
}

/// Independent check of the three strong-starter conditions.
pub fn is_strong_starter(r: usize, pairs: &[(usize, usize)]) -> bool {
    if r % 2 == 0 || pairs.len() != (r - 1) / 2 || !partitions_nonzero(r, pairs.iter().copied()) {
        return false;
    }
    let mut diffs: Vec<usize> = pairs
        .iter()
        .flat_map(|&(x, y)| [(x + r - y) % r, (y + r - x) % r])
        .collect();
    diffs.sort_unstable();
    let mut sums: Vec<usize> = pairs.iter().map(|&(x, y)| (x + y) % r).collect();
    sums.sort_unstable();
    diffs == (1..r).collect::<Vec<_>>() && sums[0] != 0 && sums.windows(2).all(|w| w[0] != w[1])
}

/// Searches `Z_r` for a strong starter, deterministically.
///
/// Requires odd `r >= 7`. `Infeasible` is a proof that none exists (as for
/// `r = 9`).
pub fn strong_starter_search(r: usize, budget: u64) -> Result<Search<StarterAdder>> {
    strong_starter_search_with(r, 0, budget, |_| true)
}

/// Like [`strong_starter_search`], but candidate order is shuffled by `seed`
/// and every complete starter is offered to `accept`; the search continues
/// past rejected ones.
pub fn strong_starter_search_with(
    r: usize,
    seed: u64,
    budget: u64,
    mut accept: impl FnMut(&StarterAdder) -> bool,
) -> Result<Search<StarterAdder>> {
    if r < 7 || r % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "strong starter search needs an odd modulus >= 7, got {r}"
        )));
    }
    let mut s = StarterSearch {
        r,
        partner: vec![None; r],
        diff_used: vec![false; r / 2 + 1],
        sum_used: vec![false; r],
        pairs: Vec::with_capacity(r / 2),
        nodes: 0,
        budget,
        rng: rng(seed),
        out_of_budget: false,
        found: None,
    };
    s.sum_used[0] = true;
    s.run(&mut accept);
    Ok(match s.found {
        Some(sa) => Search::Found(sa),
        None if s.out_of_budget => Search::Exhausted,
        None => Search::Infeasible,
    })
}

struct StarterSearch {
    r: usize,
    partner: Vec<Option<usize>>,
    diff_used: Vec<bool>,
    sum_used: Vec<bool>,
    pairs: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
    rng: ChaCha8Rng,
    out_of_budget: bool,
    found: Option<StarterAdder>,
}

impl StarterSearch {
    fn diff(&self, x: usize, y: usize) -> usize {
        let d = (x + self.r - y) % self.r;
        d.min(self.r - d)
    }

    fn allowed(&self, x: usize, y: usize) -> bool {
        x != y
            && y != 0
            && self.partner[y].is_none()
            && !self.diff_used[self.diff(x, y)]
            && !self.sum_used[(x + y) % self.r]
    }

    /// The most constrained open element or difference, as its list of
    /// candidate pairs.
    fn branch(&self) -> Option<Vec<(usize, usize)>> {
        let r = self.r;
        let mut best: Option<Vec<(usize, usize)>> = None;
        // returns true when the choice is forced
        let mut consider = |cands: Vec<(usize, usize)>| {
            let forced = cands.len() <= 1;
            if best.as_ref().is_none_or(|b| cands.len() < b.len()) {
                best = Some(cands);
            }
            forced
        };
        for x in 1..r {
            if self.partner[x].is_some() {
                continue;
            }
            if consider((1..r).filter(|&y| self.allowed(x, y)).map(|y| (x, y)).collect()) {
                return best;
            }
        }
        for d in 1..=r / 2 {
            if self.diff_used[d] {
                continue;
            }
            let forced = consider(
                (1..r)
                    .filter(|&x| self.partner[x].is_none())
                    .map(|x| (x, (x + d) % r))
                    .filter(|&(x, y)| self.allowed(x, y))
                    .collect(),
            );
            if forced {
                return best;
            }
        }
        best
    }

    fn set(&mut self, x: usize, y: usize, on: bool) {
        let d = self.diff(x, y);
        self.diff_used[d] = on;
        self.sum_used[(x + y) % self.r] = on;
        self.partner[x] = on.then_some(y);
        self.partner[y] = on.then_some(x);
        if on {
            self.pairs.push((x.min(y), x.max(y)));
        } else {
            self.pairs.pop();
        }
    }

    /// Returns true once the search should stop.
    fn run(&mut self, accept: &mut impl FnMut(&StarterAdder) -> bool) -> bool {
        let Some(mut cands) = self.branch() else {
            let mut pairs = self.pairs.clone();
            pairs.sort_unstable();
            let sa = StarterAdder::from_strong_starter(self.r, pairs)
                .expect("search maintains the strong starter conditions");
            if accept(&sa) {
                self.found = Some(sa);
                return true;
            }
            return false;
        };
        cands.shuffle(&mut self.rng);
        for (x, y) in cands {
            if self.nodes >= self.budget {
                self.out_of_budget = true;
                return true;
            }
            self.nodes += 1;
            self.set(x, y, true);
            let stop = self.run(accept);
            self.set(x, y, false);
            if stop {
                return true;
            }
        }
        false
    }
}

/// The cyclic Room square generated by a starter-adder pair.
pub fn room_from_starter(sa: &StarterAdder) -> DesignArray {
    let r = sa.r;
    let mut a = DesignArray::new(r, r + 1, 1, HostGraph::complete(r + 1));
    for j in 0..r {
        a.place(j, j, Block::from_pairs(&[(r, j)]).expect("distinct"))
            .expect("diagonal is free");
        for (&(x, y), &add) in sa.starter.iter().zip(&sa.adder) {
            let block = Block::from_pairs(&[((x + j) % r, (y + j) % r)]).expect("distinct");
            a.place(j, (j + add) % r, block)
                .expect("distinct nonzero adders give distinct off-diagonal cells");
        }
    }
    a
}

/// Looks for a transversal by exact cover over rows, columns, and points;
/// empty cells cover only their row and column.
pub fn find_transversal(arr: &DesignArray, budget: u64) -> Search<Transversal> {
    let (side, n) = (arr.side(), arr.n());
    let mut ec = ExactCover::new(2 * side + n, 0);
    let mut cells = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let mut items = vec![r, side + c];
            if let Some(b) = arr.get(r, c) {
                if b.points().any(|p| p.index() >= n) {
                    continue;
                }
                items.extend(b.points().map(|p| 2 * side + p.index()));
            }
            ec.add_option(&items);
            cells.push((r, c));
        }
    }
    ec.solve(budget).map(|opts| {
        let mut t: Vec<(usize, usize)> = opts.into_iter().map(|o| cells[o]).collect();
        t.sort_unstable();
        let t = Transversal::new(t);
        let report = verify_transversal(arr, &t);
        assert!(report.passed, "exact cover produced an invalid transversal:\n{report}");
        t
    })
}

/// Backtracking search for a Room square of side `r` (odd, at most 127)
/// that has a transversal.
///
/// Each row must hold every point once, each column likewise, and each pair
/// must land in exactly one empty cell. The search repeatedly picks the
/// most constrained of these requirements and tries its options in an order
/// shuffled by `seed`. Complete squares without a transversal are skipped.
pub fn room_search(r: usize, seed: u64, budget: u64) -> Result<Search<RoomSquare>> {
    if r % 2 == 0 || r > 127 {
        return Err(Error::InvalidParameter(format!(
            "room search needs an odd side of at most 127, got {r}"
        )));
    }
    let n = r + 1;
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut s = CellSearch {
        r,
        n,
        full,
        row_used: vec![0; r],
        col_used: vec![0; r],
        partner: vec![0; n],
        occupied: vec![0; r],
        cells: vec![None; r * r],
        nodes: 0,
        budget,
        rng: rng(seed),
        out_of_budget: false,
    };
    let mut found = None;
    s.run(&mut |arr: DesignArray| match find_transversal(&arr, budget) {
        Search::Found(t) => {
            found = Some(RoomSquare { array: arr, transversal: t });
            true
        }
        _ => false,
    });
    Ok(match found {
        Some(sq) => Search::Found(sq),
        None if s.out_of_budget => Search::Exhausted,
        None => Search::Infeasible,
    })
}

struct CellSearch {
    r: usize,
    n: usize,
    full: u128,
    row_used: Vec<u128>,
    col_used: Vec<u128>,
    partner: Vec<u128>,
    occupied: Vec<u128>,
    cells: Vec<Option<(usize, usize)>>,
    nodes: u64,
    budget: u64,
    rng: ChaCha8Rng,
    out_of_budget: bool,
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

type Move = (usize, usize, usize, usize);

impl CellSearch {
    fn free_partners(&self, p: usize) -> u128 {
        !self.partner[p] & !(1u128 << p) & self.full
    }

    /// Options covering point `p` in row `row`.
    fn row_moves(&self, row: usize, p: usize, out: Option<&mut Vec<Move>>) -> usize {
        let open = !self.row_used[row] & self.free_partners(p);
        let mut count = 0;
        let mut out = out;
        for c in bits(!self.occupied[row] & ((1u128 << self.r) - 1)) {
            if self.col_used[c] >> p & 1 == 1 {
                continue;
            }
            let qs = open & !self.col_used[c];
            count += qs.count_ones() as usize;
            if let Some(o) = out.as_deref_mut() {
                o.extend(bits(qs).map(|q| (row, c, p, q)));
            }
        }
        count
    }

    fn col_moves(&self, col: usize, p: usize, out: Option<&mut Vec<Move>>) -> usize {
        let open = !self.col_used[col] & self.free_partners(p);
        let mut count = 0;
        let mut out = out;
        for row in 0..self.r {
            if self.occupied[row] >> col & 1 == 1 || self.row_used[row] >> p & 1 == 1 {
                continue;
            }
            let qs = open & !self.row_used[row];
            count += qs.count_ones() as usize;
            if let Some(o) = out.as_deref_mut() {
                o.extend(bits(qs).map(|q| (row, col, p, q)));
            }
        }
        count
    }

    fn pair_moves(&self, p: usize, q: usize, out: Option<&mut Vec<Move>>) -> usize {
        let both = (1u128 << p) | (1u128 << q);
        let cols: u128 = (0..self.r)
            .filter(|&c| self.col_used[c] & both == 0)
            .fold(0, |m, c| m | 1u128 << c);
        let mut count = 0;
        let mut out = out;
        for row in 0..self.r {
            if self.row_used[row] & both != 0 {
                continue;
            }
            let cs = cols & !self.occupied[row];
            count += cs.count_ones() as usize;
            if let Some(o) = out.as_deref_mut() {
                o.extend(bits(cs).map(|c| (row, c, p, q)));
            }
        }
        count
    }

    /// Moves for the most constrained open requirement; `None` when the
    /// square is complete.
    fn branch(&self) -> Option<Vec<Move>> {
        #[derive(Clone, Copy)]
        enum Req {
            Row(usize, usize),
            Col(usize, usize),
            Pair(usize, usize),
        }
        let mut best: Option<(usize, Req)> = None;
        let mut consider = |count: usize, req: Req| {
            if best.is_none_or(|(c, _)| count < c) {
                best = Some((count, req));
            }
            count <= 1
        };
        'scan: {
            for row in 0..self.r {
                for p in bits(!self.row_used[row] & self.full) {
                    if consider(self.row_moves(row, p, None), Req::Row(row, p)) {
                        break 'scan;
                    }
                }
            }
            for col in 0..self.r {
                for p in bits(!self.col_used[col] & self.full) {
                    if consider(self.col_moves(col, p, None), Req::Col(col, p)) {
                        break 'scan;
                    }
                }
            }
            for p in 0..self.n {
                for q in bits(self.free_partners(p) & !((1u128 << (p + 1)) - 1)) {
                    if consider(self.pair_moves(p, q, None), Req::Pair(p, q)) {
                        break 'scan;
                    }
                }
            }
        }
        let (_, req) = best?;
        let mut moves = Vec::new();
        match req {
            Req::Row(row, p) => self.row_moves(row, p, Some(&mut moves)),
            Req::Col(col, p) => self.col_moves(col, p, Some(&mut moves)),
            Req::Pair(p, q) => self.pair_moves(p, q, Some(&mut moves)),
        };
        Some(moves)
    }

    fn apply(&mut self, (row, col, p, q): Move) {
        let both = (1u128 << p) | (1u128 << q);
        self.row_used[row] ^= both;
        self.col_used[col] ^= both;
        self.partner[p] ^= 1u128 << q;
        self.partner[q] ^= 1u128 << p;
        self.occupied[row] ^= 1u128 << col;
        let cell = &mut self.cells[row * self.r + col];
        *cell = if cell.is_some() { None } else { Some((p, q)) };
    }

    fn to_array(&self) -> DesignArray {
        let mut a = DesignArray::new(self.r, self.n, 1, HostGraph::complete(self.n));
        for (i, cell) in self.cells.iter().enumerate() {
            if let Some((p, q)) = *cell {
                a.place(i / self.r, i % self.r, Block::from_pairs(&[(p, q)]).expect("p != q"))
                    .expect("fresh cell");
            }
        }
        a
    }

    /// Returns true once the search should stop.
    fn run(&mut self, accept: &mut impl FnMut(DesignArray) -> bool) -> bool {
        let Some(mut moves) = self.branch() else {
            return accept(self.to_array());
        };
        moves.shuffle(&mut self.rng);
        for m in moves {
            if self.nodes >= self.budget {
                self.out_of_budget = true;
                return true;
            }
            self.nodes += 1;
            self.apply(m);
            let stop = self.run(accept);
            self.apply(m);
            if stop {
                return true;
            }
        }
        false
    }
}

/// A Room square with a certified transversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoomSquare {
    pub array: DesignArray,
    pub transversal: Transversal,
}

/// How a Room square was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RoomMethod {
    /// The single cell `{0, 1}` for `n = 2`.
    Trivial,
    StrongStarter { starter: Vec<(usize, usize)>, adder: Vec<usize> },
    CellSearch { seed: u64 },
}

/// An OMD(n, 1) with a transversal.
///
/// Tries strong starters first, skipping any whose square has no
/// transversal, then falls back to [`room_search`].
pub fn build_room(n: usize, cfg: &SearchConfig) -> Result<(RoomSquare, RoomMethod)> {
    let nonexistent = |reason: &str| Error::NonExistent { n, k: 1, reason: reason.to_string() };
    if n % 2 == 1 || n == 0 {
        return Err(nonexistent("a Room square needs an even number of points"));
    }
    if n == 4 || n == 6 {
        return Err(nonexistent("Room squares of side 3 and 5 do not exist"));
    }
    if n == 2 {
        let mut a = DesignArray::new(1, 2, 1, HostGraph::complete(2));
        a.place(0, 0, Block::from_pairs(&[(0, 1)]).expect("distinct"))
            .expect("empty");
        let t = Transversal::new(vec![(0, 0)]);
        return Ok((RoomSquare { array: a, transversal: t }, RoomMethod::Trivial));
    }
    let r = n - 1;
    let mut square = None;
    let starter = strong_starter_search_with(r, cfg.seed, cfg.budget, |sa| {
        let a = room_from_starter(sa);
        match find_transversal(&a, cfg.budget) {
            Search::Found(t) => {
                square = Some(RoomSquare { array: a, transversal: t });
                true
            }
            _ => false,
        }
    })?;
    if let (Search::Found(sa), Some(sq)) = (starter, square) {
        let method = RoomMethod::StrongStarter { starter: sa.starter, adder: sa.adder };
        return Ok((sq, method));
    }
    match room_search(r, cfg.seed, cfg.budget)? {
        Search::Found(sq) => Ok((sq, RoomMethod::CellSearch { seed: cfg.seed })),
        Search::Infeasible => Err(nonexistent(&format!(
            "exhaustive search found no Room square of side {r} with a transversal"
        ))),
        Search::Exhausted => Err(Error::SearchExhausted {
            task: format!("searching for a Room square of side {r}"),
            budget: cfg.budget,
        }),
    }
}
