//! Direct constructions: OMD(M_1[k], k), OMD(2k, k), OMD(4k, k), OMD(6k, k).
//!
//! All of them lay 1-factors along diagonals and superdiagonals of circulant
//! blocks and assemble the blocks along the main diagonal.

use crate::design::{Block, DesignArray, Hole, HostGraph, Point, Transversal};
use crate::error::{Error, Result};
use crate::factorization;

/// OMD(M_1[k], k): factor `i` of the cyclic factorization of `K_{k,k}` in
/// cell `(i, i)`. Sides are `0..k` and `k..2k`.
pub fn build_m1k(k: usize) -> DesignArray {
    let mut a = DesignArray::new(k, 2 * k, k, HostGraph::LexMatching { l: 1, s: k });
    for (i, f) in factorization::bipartite(k).factors().iter().enumerate() {
        a.place(i, i, f.clone()).expect("diagonal cells are distinct");
    }
    a
}

/// OMD(2k, k) with the circle-method factors of `K_{2k}` on the diagonal.
///
/// The back diagonal `(2k-2-i, i)` is a transversal whose only non-empty
/// cell is `(k-1, k-1)`, and rows `0..k-1` by columns `k..2k-1` are empty.
pub fn build_2k(k: usize) -> Result<(DesignArray, Transversal, Hole)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let side = 2 * k - 1;
    let mut a = DesignArray::new(side, 2 * k, k, HostGraph::complete(2 * k));
    for (i, f) in factorization::complete(2 * k)?.factors().iter().enumerate() {
        a.place(i, i, f.clone())?;
    }
    let t = Transversal::new((0..side).map(|i| (side - 1 - i, i)).collect());
    let h = Hole::new(0..k - 1, k..side);
    Ok((a, t, h))
}

fn points(range: std::ops::Range<usize>) -> Vec<Point> {
    range.map(Point::from).collect()
}

/// Places `diag[i]` at `(off+i, off+i)` and `upper[i]` at `(off+i, off+(i+1) mod m)`
/// and likewise further superdiagonals, for a circulant block of side `m`.
fn place_circulant(a: &mut DesignArray, off: usize, stripes: &[&[Block]]) -> Result<()> {
    let m = stripes[0].len();
    for (shift, stripe) in stripes.iter().enumerate() {
        for (i, b) in stripe.iter().enumerate() {
            a.place(off + i, off + (i + shift) % m, b.clone())?;
        }
    }
    Ok(())
}

/// OMD(4k, k) for `k > 1`.
///
/// Points: `(x, t, i)` with `x ∈ Z_k`, `t ∈ {0, 1}` (A or B), `i ∈ {0, 1}`
/// is `x + k*t + 2k*i`, so `A_0 = 0..k`, `B_0 = k..2k`, `A_1 = 2k..3k`,
/// `B_1 = 3k..4k`.
///
/// Three circulants sit on the diagonal: rows/columns `0..k` pair the
/// `K_{k,k}` factors of `A_0B_0` (diagonal) with those of `A_1B_1`
/// (superdiagonal); `k..2k` does the same for `A_0B_1` and `A_1B_0`; the last
/// `2k-1` pair the `K_{2k}` factors of `A_0 ∪ A_1` with those of `B_0 ∪ B_1`.
pub fn build_4k(k: usize) -> Result<DesignArray> {
    if k <= 1 {
        return Err(Error::KTooSmall(k));
    }
    let part = |t: usize, i: usize| points(k * t + 2 * k * i..k * t + 2 * k * i + k);
    let (a0, b0, a1, b1) = (part(0, 0), part(1, 0), part(0, 1), part(1, 1));
    let cross = |left: &[Point], right: &[Point]| {
        let labels: Vec<Point> = left.iter().chain(right).copied().collect();
        factorization::bipartite(k).relabel(&labels)
    };
    let kk = factorization::complete(2 * k)?;
    let a_side: Vec<Point> = a0.iter().chain(&a1).copied().collect();
    let b_side: Vec<Point> = b0.iter().chain(&b1).copied().collect();

    let mut arr = DesignArray::new(4 * k - 1, 4 * k, k, HostGraph::complete(4 * k));
    place_circulant(&mut arr, 0, &[&cross(&a0, &b0), &cross(&a1, &b1)])?;
    place_circulant(&mut arr, k, &[&cross(&a0, &b1), &cross(&a1, &b0)])?;
    place_circulant(&mut arr, 2 * k, &[&kk.relabel(&a_side), &kk.relabel(&b_side)])?;
    Ok(arr)
}

/// Seed square for the OMD(6k, k) construction: an orthogonal 1-factorization
/// of `K_{2,2,2}` on `Z_3 × Z_2`, entries `((p, q), (p', q'))`.
#[rustfmt::skip]
pub const K222_SEED: [[Option<((usize, usize), (usize, usize))>; 4]; 4] = [
    [Some(((0, 0), (1, 0))), Some(((0, 1), (2, 0))), None,                   Some(((1, 1), (2, 1)))],
    [Some(((0, 1), (2, 1))), Some(((0, 0), (1, 1))), Some(((1, 0), (2, 0))), None],
    [Some(((1, 1), (2, 0))), None,                   Some(((0, 0), (2, 1))), Some(((0, 1), (1, 0)))],
    [None,                   Some(((1, 0), (2, 1))), Some(((0, 1), (1, 1))), Some(((0, 0), (2, 0)))],
];

/// The seed square as a design over `K_{2,2,2}` with `(p, q) ↦ 2p + q`.
pub fn k222_seed() -> DesignArray {
    let mut a = DesignArray::new(4, 6, 1, HostGraph::CompleteMultipartite { parts: vec![2, 2, 2] });
    for (r, row) in K222_SEED.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            if let Some(((p, q), (p2, q2))) = *cell {
                let b = Block::from_pairs(&[(2 * p + q, 2 * p2 + q2)]).expect("distinct");
                a.place(r, c, b).expect("fresh cell");
            }
        }
    }
    a
}

/// OMD(6k, k) for `k > 1`.
///
/// Points: `((p, q), z)` with `p ∈ Z_3`, `q ∈ Z_2`, `z ∈ Z_k` is
/// `2k*p + k*q + z`, so part `p` of `K_{2k,2k,2k}` is `2k*p..2k*(p+1)`.
///
/// Each seed cell holding `{u, v}` becomes a copy of OMD(M_1[k], k) on
/// `{u, v} × Z_k` in the matching `k × k` block, giving a `4k × 4k` square.
/// The remaining `2k - 1` rows/columns form a circulant with the `K_{2k}`
/// factors of parts 0, 1, 2 on the diagonal and the first two superdiagonals.
pub fn build_6k(k: usize) -> Result<DesignArray> {
    if k <= 1 {
        return Err(Error::KTooSmall(k));
    }
    let flat = |(p, q): (usize, usize), z: usize| Point::from(2 * k * p + k * q + z);
    let mut arr = DesignArray::new(6 * k - 1, 6 * k, k, HostGraph::complete(6 * k));

    let m1k = build_m1k(k);
    let block_map = |b: usize| (b * k..b * k + k).collect::<Vec<_>>();
    for (r, row) in K222_SEED.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let Some((u, v)) = *cell else { continue };
            let point_map: Vec<Point> = (0..k).map(|z| flat(u, z)).chain((0..k).map(|z| flat(v, z))).collect();
            arr.embed(&m1k, &block_map(r), &block_map(c), &point_map)?;
        }
    }

    let kk = factorization::complete(2 * k)?;
    let parts: Vec<Vec<Block>> = (0..3).map(|p| kk.relabel(&points(2 * k * p..2 * k * (p + 1)))).collect();
    place_circulant(&mut arr, 4 * k, &[&parts[0], &parts[1], &parts[2]])?;
    Ok(arr)
}
