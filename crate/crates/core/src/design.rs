//! Core domain types: points, edges, matchings, host graphs, and the square
//! design array along with its certified sub-objects (transversals and holes).
//!
//! Points are always dense integers `0..n`. Constructors that work over a
//! structured point set (products of cyclic groups, a point at infinity, ...)
//! flatten it through a fixed bijection documented at the constructor.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the design, identified by its dense index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub u32);

impl Point {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Point {
    fn from(i: usize) -> Self {
        Point(u32::try_from(i).expect("point index exceeds u32"))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An unordered pair of distinct points, stored as `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", try_from = "[u32; 2]")]
pub struct Edge {
    u: Point,
    v: Point,
}

impl Edge {
    /// Builds the canonical edge on `{a, b}`. Fails when `a == b`.
    pub fn new(a: impl Into<Point>, b: impl Into<Point>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::LoopEdge(a.0)),
        }
    }

    pub fn u(self) -> Point {
        self.u
    }

    pub fn v(self) -> Point {
        self.v
    }

    pub fn endpoints(self) -> [Point; 2] {
        [self.u, self.v]
    }

    /// Relabels both endpoints; the result is re-canonicalized.
    pub fn map(self, f: impl Fn(Point) -> Point) -> Result<Self> {
        Edge::new(f(self.u), f(self.v))
    }
}

impl From<Edge> for [u32; 2] {
    fn from(e: Edge) -> Self {
        [e.u.0, e.v.0]
    }
}

impl TryFrom<[u32; 2]> for Edge {
    type Error = Error;

    fn try_from([a, b]: [u32; 2]) -> Result<Self> {
        Edge::new(Point(a), Point(b))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

/// The contents of one non-empty cell: a set of edges, kept sorted.
///
/// [`Block::new`] guarantees a matching (pairwise disjoint edges). Blocks read
/// back from a file skip that check so the verifier can report malformed
/// input instead of refusing to load it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Block {
    edges: Vec<Edge>,
}

impl Block {
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort_unstable();
        let mut points: Vec<Point> = edges.iter().flat_map(|e| e.endpoints()).collect();
        points.sort_unstable();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotAMatching(w[0].0));
        }
        Ok(Block { edges })
    }

    /// Builds a block from raw `(a, b)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .map(|&(a, b)| Edge::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Block::new(edges)
    }

    pub(crate) fn from_edges_unchecked(mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        Block { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.edges.iter().flat_map(|e| e.endpoints())
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| e.map(&f))
            .collect::<Result<Vec<_>>>()?;
        Block::new(edges)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// The graph whose edge set a design decomposes.
///
/// Vertex labels per variant:
/// - `Complete(n)`: `0..n`.
/// - `CompleteBipartite { a, b }`: parts `0..a` and `a..a+b`.
/// - `LexMatching { l, s }` (`M_l[s]`) and `LexMatchingComplete { l, s }`
///   (`M_l[K_s]`): vertex `(p, z)` with `p in 0..2l`, `z in 0..s` is
///   `p*s + z`; groups `2i` and `2i+1` are matched.
/// - `CompleteMultipartite { parts }`: consecutive runs of the given sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HostGraph {
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    LexMatching { l: usize, s: usize },
    LexMatchingComplete { l: usize, s: usize },
    CompleteMultipartite { parts: Vec<usize> },
}

impl HostGraph {
    pub fn complete(n: usize) -> Self {
        HostGraph::Complete { n }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            HostGraph::Complete { n } => n,
            HostGraph::CompleteBipartite { a, b } => a + b,
            HostGraph::LexMatching { l, s } | HostGraph::LexMatchingComplete { l, s } => 2 * l * s,
            HostGraph::CompleteMultipartite { ref parts } => parts.iter().sum(),
        }
    }

    /// Closed-form edge count.
    pub fn edge_count(&self) -> usize {
        match *self {
            HostGraph::Complete { n } => n * n.saturating_sub(1) / 2,
            HostGraph::CompleteBipartite { a, b } => a * b,
            HostGraph::LexMatching { l, s } => l * s * s,
            HostGraph::LexMatchingComplete { l, s } => l * (2 * s) * (2 * s).saturating_sub(1) / 2,
            HostGraph::CompleteMultipartite { ref parts } => {
                let total: usize = parts.iter().sum();
                let squares: usize = parts.iter().map(|p| p * p).sum();
                (total * total - squares) / 2
            }
        }
    }

    /// Part index of a vertex for the multipartite-style variants.
    fn part_of(&self, x: usize) -> usize {
        match *self {
            HostGraph::Complete { .. } => x,
            HostGraph::CompleteBipartite { a, .. } => usize::from(x >= a),
            HostGraph::LexMatching { s, .. } | HostGraph::LexMatchingComplete { s, .. } => x / s,
            HostGraph::CompleteMultipartite { ref parts } => {
                let mut acc = 0;
                for (i, p) in parts.iter().enumerate() {
                    acc += p;
                    if x < acc {
                        return i;
                    }
                }
                parts.len()
            }
        }
    }

    /// Edge-set membership.
    pub fn contains(&self, e: Edge) -> bool {
        let (x, y) = (e.u().index(), e.v().index());
        if y >= self.vertex_count() {
            return false;
        }
        match *self {
            HostGraph::Complete { .. } => true,
            HostGraph::CompleteBipartite { .. } | HostGraph::CompleteMultipartite { .. } => {
                self.part_of(x) != self.part_of(y)
            }
            HostGraph::LexMatching { .. } => {
                let (gx, gy) = (self.part_of(x), self.part_of(y));
                gx != gy && gx / 2 == gy / 2
            }
            HostGraph::LexMatchingComplete { .. } => {
                let (gx, gy) = (self.part_of(x), self.part_of(y));
                gx / 2 == gy / 2
            }
        }
    }

    /// Enumerates every edge in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.vertex_count();
        (0..n).flat_map(move |x| {
            (x + 1..n).filter_map(move |y| {
                let e = Edge::new(x, y).ok()?;
                self.contains(e).then_some(e)
            })
        })
    }

    /// Degree of `x`. Every vertex of a valid design host has the same degree.
    pub fn degree(&self, x: usize) -> usize {
        let n = self.vertex_count();
        (0..n)
            .filter(|&y| y != x && Edge::new(x, y).is_ok_and(|e| self.contains(e)))
            .count()
    }

    /// Side of the square array for a design over this host: the replication
    /// number, which equals the common vertex degree. `None` when the host is
    /// not regular, in which case no resolvable design exists.
    ///
    /// | host                        | side            |
    /// |-----------------------------|-----------------|
    /// | `Complete(n)`               | `n - 1`         |
    /// | `CompleteBipartite(a, a)`   | `a`             |
    /// | `LexMatching(l, s)`         | `s`             |
    /// | `LexMatchingComplete(l, s)` | `2s - 1`        |
    /// | `CompleteMultipartite(w^p)` | `(p - 1) * w`   |
    pub fn expected_side(&self) -> Option<usize> {
        match *self {
            HostGraph::Complete { n } => n.checked_sub(1),
            HostGraph::CompleteBipartite { a, b } => (a == b).then_some(a),
            HostGraph::LexMatching { s, .. } => Some(s),
            HostGraph::LexMatchingComplete { s, .. } => (2 * s).checked_sub(1),
            HostGraph::CompleteMultipartite { ref parts } => {
                let w = *parts.first()?;
                parts
                    .iter()
                    .all(|&p| p == w)
                    .then(|| (parts.len() - 1) * w)
            }
        }
    }

    /// A representative with the same labelled edge set, used to compare hosts
    /// that are written differently (`M_1[K_s]` is `K_{2s}`, `M_1[s]` is
    /// `K_{s,s}`).
    pub fn normalized(&self) -> HostGraph {
        match *self {
            HostGraph::LexMatchingComplete { l: 1, s } => HostGraph::Complete { n: 2 * s },
            HostGraph::LexMatching { l: 1, s } => HostGraph::CompleteBipartite { a: s, b: s },
            HostGraph::CompleteMultipartite { ref parts } if parts.len() == 2 => {
                HostGraph::CompleteBipartite { a: parts[0], b: parts[1] }
            }
            HostGraph::CompleteMultipartite { ref parts } if parts.iter().all(|&p| p == 1) => {
                HostGraph::Complete { n: parts.len() }
            }
            _ => self.clone(),
        }
    }

    pub fn same_edges(&self, other: &HostGraph) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for HostGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostGraph::Complete { n } => write!(f, "K_{n}"),
            HostGraph::CompleteBipartite { a, b } => write!(f, "K_{{{a},{b}}}"),
            HostGraph::LexMatching { l, s } => write!(f, "M_{l}[{s}]"),
            HostGraph::LexMatchingComplete { l, s } => write!(f, "M_{l}[K_{s}]"),
            HostGraph::CompleteMultipartite { parts } => {
                let parts: Vec<String> = parts.iter().map(usize::to_string).collect();
                write!(f, "K_{{{}}}", parts.join(","))
            }
        }
    }
}

/// A square array of optional blocks, plus the parameters of the design it
/// is meant to hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignArray {
    side: usize,
    n: usize,
    k: usize,
    host: HostGraph,
    cells: Vec<Option<Block>>,
}

impl DesignArray {
    pub fn new(side: usize, n: usize, k: usize, host: HostGraph) -> Self {
        DesignArray {
            side,
            n,
            k,
            host,
            cells: vec![None; side * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn host(&self) -> &HostGraph {
        &self.host
    }

    fn slot(&self, row: usize, col: usize) -> Result<usize> {
        if row < self.side && col < self.side {
            Ok(row * self.side + col)
        } else {
            Err(Error::OutOfBounds { row, col, side: self.side })
        }
    }

    /// Cell contents; out-of-range coordinates read as empty.
    pub fn get(&self, row: usize, col: usize) -> Option<&Block> {
        self.slot(row, col).ok().and_then(|i| self.cells[i].as_ref())
    }

    pub fn is_empty_cell(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_none()
    }

    /// Puts `block` into an empty cell.
    pub fn place(&mut self, row: usize, col: usize, block: Block) -> Result<()> {
        let i = self.slot(row, col)?;
        if self.cells[i].is_some() {
            return Err(Error::OccupiedCell { row, col });
        }
        if block.len() != self.k {
            return Err(Error::WrongBlockSize { expected: self.k, found: block.len() });
        }
        if let Some(p) = block.points().find(|p| p.index() >= self.n) {
            return Err(Error::PointOutOfRange { point: p.0, n: self.n });
        }
        self.cells[i] = Some(block);
        Ok(())
    }

    /// Empties a cell, returning what it held.
    pub fn clear(&mut self, row: usize, col: usize) -> Option<Block> {
        let i = self.slot(row, col).ok()?;
        self.cells[i].take()
    }

    /// Exchanges the contents of two cells.
    pub fn swap_cells(&mut self, a: (usize, usize), b: (usize, usize)) -> Result<()> {
        let i = self.slot(a.0, a.1)?;
        let j = self.slot(b.0, b.1)?;
        self.cells.swap(i, j);
        Ok(())
    }

    /// Occupied cells in row-major order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize, &Block)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(i, c)| {
            c.as_ref().map(|b| (i / self.side, i % self.side, b))
        })
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Copies every occupied cell `(i, j)` of `source` to
    /// `(row_map[i], col_map[j])`, relabelling points through `point_map`.
    ///
    /// Nothing is written unless the whole embedding succeeds.
    pub fn embed(
        &mut self,
        source: &DesignArray,
        row_map: &[usize],
        col_map: &[usize],
        point_map: &[Point],
    ) -> Result<()> {
        check_injection("row", row_map, source.side, self.side)?;
        check_injection("column", col_map, source.side, self.side)?;
        let points: Vec<usize> = point_map.iter().map(|p| p.index()).collect();
        check_injection("point", &points, source.n, self.n)?;
        if source.k != self.k {
            return Err(Error::WrongBlockSize { expected: self.k, found: source.k });
        }

        let mut staged = Vec::with_capacity(source.occupied_count());
        for (i, j, block) in source.occupied() {
            let (row, col) = (row_map[i], col_map[j]);
            if !self.is_empty_cell(row, col) {
                return Err(Error::OccupiedCell { row, col });
            }
            let relabelled = block.map(|p| point_map[p.index()])?;
            staged.push((row, col, relabelled));
        }
        for (row, col, block) in staged {
            let i = self.slot(row, col)?;
            self.cells[i] = Some(block);
        }
        Ok(())
    }

    /// Inserts a block without size or range checks. Used when reading files
    /// so that malformed designs still reach the verifier.
    pub(crate) fn put_unchecked(&mut self, row: usize, col: usize, block: Block) -> Result<()> {
        let i = self.slot(row, col)?;
        if self.cells[i].is_some() {
            return Err(Error::OccupiedCell { row, col });
        }
        self.cells[i] = Some(block);
        Ok(())
    }
}

fn check_injection(what: &'static str, map: &[usize], domain: usize, codomain: usize) -> Result<()> {
    if map.len() < domain {
        return Err(Error::MapNotInjective(what));
    }
    let mut seen = vec![false; codomain];
    for &x in &map[..domain] {
        match seen.get_mut(x) {
            Some(s) if !*s => *s = true,
            _ => return Err(Error::MapNotInjective(what)),
        }
    }
    Ok(())
}

/// One cell per row and per column whose blocks jointly cover every point once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transversal {
    pub cells: Vec<(usize, usize)>,
}

impl Transversal {
    pub fn new(cells: Vec<(usize, usize)>) -> Self {
        Transversal { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// An empty `rows x cols` subarray, given by index sets so that it can sit
/// anywhere after rows and columns are permuted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hole {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Hole {
    pub fn new(rows: impl IntoIterator<Item = usize>, cols: impl IntoIterator<Item = usize>) -> Self {
        let mut rows: Vec<usize> = rows.into_iter().collect();
        let mut cols: Vec<usize> = cols.into_iter().collect();
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Hole { rows, cols }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}
