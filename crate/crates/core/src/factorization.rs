//! Deterministic 1-factorizations of `K_m` and `K_{k,k}`.

use crate::design::{Block, Edge, Point};
use crate::error::{Error, Result};

/// A partition of a graph's edges into perfect matchings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneFactorization {
    m: usize,
    factors: Vec<Block>,
}

impl OneFactorization {
    /// Number of points.
    pub fn points(&self) -> usize {
        self.m
    }

    pub fn factors(&self) -> &[Block] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Block {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The factors with point `p` renamed to `labels[p]`.
    pub fn relabel(&self, labels: &[Point]) -> Vec<Block> {
        self.factors
            .iter()
            .map(|f| {
                f.map(|p| labels[p.index()])
                    .expect("relabelling a matching through an injection")
            })
            .collect()
    }
}

/// Circle method on `K_m`: factor `i` holds `{m-1, i}` together with
/// `{(i+j) mod (m-1), (i-j) mod (m-1)}` for `j = 1..m/2`.
pub fn complete(m: usize) -> Result<OneFactorization> {
    if m % 2 == 1 || m == 0 {
        return Err(Error::OddOrder(m));
    }
    let r = m - 1;
    let factors = (0..r)
        .map(|i| {
            let spokes = (1..m / 2).map(|j| Edge::new((i + j) % r, (i + r - j) % r));
            Block::new(std::iter::once(Edge::new(r, i)).chain(spokes).collect::<Result<Vec<_>>>()?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OneFactorization { m, factors })
}

/// Cyclic 1-factorization of `K_{k,k}` with sides `0..k` and `k..2k`:
/// factor `l` is `{ {i, k + (i+l) mod k} }`.
pub fn bipartite(k: usize) -> OneFactorization {
    let factors = (0..k)
        .map(|l| {
            Block::new((0..k).map(|i| Edge::new(i, k + (i + l) % k).expect("sides are disjoint")))
                .expect("cyclic shift is a matching")
        })
        .collect();
    OneFactorization { m: 2 * k, factors }
}
