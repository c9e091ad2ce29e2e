//! Recursive composition and the top-level dispatcher.
//!
//! [`compose`] inflates an OMD(n, l) with a transversal by a factor `s`:
//! every cell becomes an `s × s` block and `s - 1` extra rows and columns are
//! appended, for a side of `s(n-1) + s - 1 = sn - 1`. Off-transversal blocks
//! receive a copy of an OMD(M_l[s], k); transversal blocks receive an
//! OMD(M_l[K_s], k) whose hole is moved onto the shared extra rows and
//! columns.

use std::fmt;

use serde::Serialize;

use crate::base::{build_2k, build_4k, build_6k, build_m1k};
use crate::design::{DesignArray, Hole, HostGraph, Point, Transversal};
use crate::error::{Error, Result};
use crate::room::{build_room, find_transversal, RoomMethod};
use crate::search::{SearchConfig, DEFAULT_BUDGET};
use crate::verify::{verify, verify_hole, verify_transversal, VerificationReport};

/// The three designs consumed by [`compose`].
#[derive(Debug, Clone)]
pub struct IngredientSet {
    /// OMD(n, l) over `K_n`.
    pub outer: DesignArray,
    pub outer_transversal: Transversal,
    /// Inflation factor.
    pub s: usize,
    /// OMD(M_l[s], k).
    pub cell: DesignArray,
    /// OMD(M_l[K_s], k) with a transversal and a hole of size `s - 1`.
    pub filler: DesignArray,
    pub filler_transversal: Transversal,
    pub filler_hole: Hole,
}

impl IngredientSet {
    /// Checks parameter coherence and certifies every ingredient.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::IncoherentIngredients(m));
        let (l, s, k) = (self.outer.k(), self.s, self.cell.k());
        if s == 0 {
            return bad("inflation factor must be positive".into());
        }
        if !matches!(self.outer.host(), HostGraph::Complete { .. }) {
            return bad(format!("outer design must be over a complete graph, not {}", self.outer.host()));
        }
        if self.filler.k() != k {
            return bad(format!("ingredient block sizes differ: {k} and {}", self.filler.k()));
        }
        if !self.cell.host().same_edges(&HostGraph::LexMatching { l, s }) {
            return bad(format!("cell ingredient is over {}, expected M_{l}[{s}]", self.cell.host()));
        }
        if !self.filler.host().same_edges(&HostGraph::LexMatchingComplete { l, s }) {
            return bad(format!(
                "transversal ingredient is over {}, expected M_{l}[K_{s}]",
                self.filler.host()
            ));
        }
        if self.filler_hole.size() != s - 1 {
            return bad(format!("hole has size {}, expected {}", self.filler_hole.size(), s - 1));
        }
        let certify = |what: &str, rep: VerificationReport| -> Result<()> {
            match rep.first_failure() {
                None => Ok(()),
                Some(c) => bad(format!(
                    "{what} fails {}: {}",
                    c.name,
                    c.counterexample.as_deref().unwrap_or("-")
                )),
            }
        };
        certify("outer design", verify(&self.outer))?;
        certify("outer transversal", verify_transversal(&self.outer, &self.outer_transversal))?;
        certify("cell ingredient", verify(&self.cell))?;
        certify("transversal ingredient", verify(&self.filler))?;
        certify(
            "transversal ingredient's transversal",
            verify_transversal(&self.filler, &self.filler_transversal),
        )?;
        certify("hole", verify_hole(&self.filler, &self.filler_hole))
    }
}

/// Output of [`compose`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composed {
    pub design: DesignArray,
    /// Certified transversal of the output, when one was found.
    pub transversal: Option<Transversal>,
}

/// Index maps placing the transversal ingredient over outer cell `(i, j)`:
/// hole rows go to the extra rows in order, the other rows fill the block.
fn filler_maps(ing: &IngredientSet, i: usize, j: usize, extra: usize) -> (Vec<usize>, Vec<usize>) {
    let s = ing.s;
    let spread = |hole: &[usize], block: usize| {
        let mut inner = block * s;
        let mut outer = extra;
        (0..ing.filler.side())
            .map(|x| {
                let slot = if hole.contains(&x) { &mut outer } else { &mut inner };
                *slot += 1;
                *slot - 1
            })
            .collect::<Vec<_>>()
    };
    (spread(&ing.filler_hole.rows, i), spread(&ing.filler_hole.cols, j))
}

/// Builds an OMD(sn, k) from the ingredients.
///
/// Point `(x, z)` of `V(K_n) × Z_s` is `x*s + z`. For a block with edges
/// `{u_0, v_0}, ..., {u_{l-1}, v_{l-1}}` (sorted), ingredient point `p*s + z`
/// maps to `u_{p/2}` (even `p`) or `v_{p/2}` (odd `p`), inflated by `z`.
pub fn compose(ing: &IngredientSet) -> Result<Composed> {
    ing.check()?;
    let (n, s, k) = (ing.outer.n(), ing.s, ing.cell.k());
    let outer_side = ing.outer.side();
    let side = s * outer_side + s - 1;
    let extra = s * outer_side;
    let mut out = DesignArray::new(side, s * n, k, HostGraph::complete(s * n));

    let on_transversal = {
        let mut m = vec![false; outer_side * outer_side];
        for &(r, c) in &ing.outer_transversal.cells {
            m[r * outer_side + c] = true;
        }
        m
    };
    let collision = |e: Error| match e {
        Error::OccupiedCell { row, col } => Error::EmbeddingCollision { row, col },
        other => other,
    };

    for (i, j, block) in ing.outer.occupied() {
        let point_map: Vec<Point> = block
            .edges()
            .iter()
            .flat_map(|e| e.endpoints())
            .flat_map(|x| (0..s).map(move |z| Point::from(x.index() * s + z)))
            .collect();
        if on_transversal[i * outer_side + j] {
            let (rows, cols) = filler_maps(ing, i, j, extra);
            out.embed(&ing.filler, &rows, &cols, &point_map).map_err(collision)?;
        } else {
            let rows: Vec<usize> = (i * s..i * s + s).collect();
            let cols: Vec<usize> = (j * s..j * s + s).collect();
            out.embed(&ing.cell, &rows, &cols, &point_map).map_err(collision)?;
        }
    }

    let report = verify(&out);
    if let Some(c) = report.first_failure() {
        return Err(Error::VerificationFailed(format!(
            "composed design fails {}: {}",
            c.name,
            c.counterexample.as_deref().unwrap_or("-")
        )));
    }

    let transversal = lift_transversal(ing, &out).or_else(|| find_transversal(&out, DEFAULT_BUDGET).found());
    Ok(Composed { design: out, transversal })
}

/// Carries the ingredient transversals over to the composed design.
///
/// Each outer transversal cell contributes a permutation of its `s × s`
/// block: the image of the ingredient transversal when the cell is full, the
/// block diagonal when it is empty. The extra rows and columns are covered by
/// their own diagonal, which lies inside every copy's hole. Returns `None`
/// if the ingredient transversal straddles hole and non-hole lines.
fn lift_transversal(ing: &IngredientSet, out: &DesignArray) -> Option<Transversal> {
    let s = ing.s;
    let extra = s * ing.outer.side();
    let mut cells = Vec::with_capacity(out.side());
    for &(i, j) in &ing.outer_transversal.cells {
        if ing.outer.is_empty_cell(i, j) {
            cells.extend((0..s).map(|t| (i * s + t, j * s + t)));
            continue;
        }
        let (rows, cols) = filler_maps(ing, i, j, extra);
        for &(r, c) in &ing.filler_transversal.cells {
            let (r, c) = (rows[r], cols[c]);
            match (r < extra, c < extra) {
                (true, true) => cells.push((r, c)),
                (false, false) => {}
                _ => return None,
            }
        }
    }
    cells.extend((0..s - 1).map(|t| (extra + t, extra + t)));
    cells.sort_unstable();
    let t = Transversal::new(cells);
    verify_transversal(out, &t).passed.then_some(t)
}

/// Which construction produced a design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum Construction {
    Room { method: RoomMethod },
    Diagonal2k,
    Circulant4k,
    Seeded6k,
    Composed { outer_n: usize, s: usize, outer: RoomMethod },
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn room(m: &RoomMethod) -> &'static str {
            match m {
                RoomMethod::Trivial => "single cell",
                RoomMethod::StrongStarter { .. } => "strong starter",
                RoomMethod::CellSearch { .. } => "cell search",
            }
        }
        match self {
            Construction::Room { method } => write!(f, "Room square ({})", room(method)),
            Construction::Diagonal2k => f.write_str("1-factorization of K_2k on the diagonal"),
            Construction::Circulant4k => f.write_str("A/B/C circulant blocks for n = 4k"),
            Construction::Seeded6k => f.write_str("K_{2,2,2} seed square inflated for n = 6k"),
            Construction::Composed { outer_n, s, outer } => write!(
                f,
                "inflation of a Room square of order {outer_n} ({}) by s = {s}",
                room(outer)
            ),
        }
    }
}

/// A verified design together with everything known about it.
#[derive(Debug, Clone)]
pub struct Constructed {
    pub design: DesignArray,
    pub construction: Construction,
    pub transversal: Option<Transversal>,
    pub hole: Option<Hole>,
    pub report: VerificationReport,
}

/// Builds an OMD(n, k), or explains why none exists.
///
/// | case                         | route                                  |
/// |------------------------------|----------------------------------------|
/// | `n mod 2k != 0`              | none exists                            |
/// | `k = 1`                      | Room square (none for `n = 4, 6`)      |
/// | `n = 2k`                     | [`build_2k`]                           |
/// | `n = 4k`                     | [`build_4k`]                           |
/// | `n = 6k`                     | [`build_6k`]                           |
/// | `n >= 8k`                    | [`compose`] on a Room square of order `n/k` with `s = k` |
pub fn construct(n: usize, k: usize, cfg: &SearchConfig) -> Result<Constructed> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and k >= 1, got n = {n}, k = {k}")));
    }
    if n % (2 * k) != 0 {
        return Err(Error::NonExistent {
            n,
            k,
            reason: format!("n = {n} is not a multiple of 2k = {}", 2 * k),
        });
    }
    let (design, construction, transversal, hole) = if k == 1 {
        let (sq, method) = build_room(n, cfg)?;
        (sq.array, Construction::Room { method }, Some(sq.transversal), None)
    } else if n == 2 * k {
        let (a, t, h) = build_2k(k)?;
        (a, Construction::Diagonal2k, Some(t), Some(h))
    } else if n == 4 * k {
        (build_4k(k)?, Construction::Circulant4k, None, None)
    } else if n == 6 * k {
        (build_6k(k)?, Construction::Seeded6k, None, None)
    } else {
        let outer_n = n / k;
        let (outer, method) = build_room(outer_n, cfg)?;
        let (filler, filler_transversal, filler_hole) = build_2k(k)?;
        let ing = IngredientSet {
            outer: outer.array,
            outer_transversal: outer.transversal,
            s: k,
            cell: build_m1k(k),
            filler,
            filler_transversal,
            filler_hole,
        };
        let composed = compose(&ing)?;
        let construction = Construction::Composed { outer_n, s: k, outer: method };
        (composed.design, construction, composed.transversal, None)
    };

    let report = verify(&design);
    if let Some(c) = report.first_failure() {
        return Err(Error::VerificationFailed(format!(
            "{} fails {}: {}",
            construction,
            c.name,
            c.counterexample.as_deref().unwrap_or("-")
        )));
    }
    Ok(Constructed { design, construction, transversal, hole, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Block;
    use crate::room::build_room;

    fn ingredients(outer_n: usize, k: usize) -> IngredientSet {
        let (outer, _) = build_room(outer_n, &SearchConfig::default()).unwrap();
        let (filler, filler_transversal, filler_hole) = build_2k(k).unwrap();
        IngredientSet {
            outer: outer.array,
            outer_transversal: outer.transversal,
            s: k,
            cell: build_m1k(k),
            filler,
            filler_transversal,
            filler_hole,
        }
    }

    #[test]
    fn trivial_outer_reproduces_the_ingredient() {
        for k in 1..=5 {
            let ing = ingredients(2, k);
            let out = compose(&ing).unwrap();
            assert_eq!(out.design.side(), 2 * k - 1);
            assert!(verify(&out.design).passed);
            // the single outer cell is {0,1}, so points map to themselves and
            // only the hole lines move
            let (rows, cols) = filler_maps(&ing, 0, 0, k);
            for r in 0..out.design.side() {
                for c in 0..out.design.side() {
                    assert_eq!(out.design.get(rows[r], cols[c]), ing.filler.get(r, c));
                }
            }
            assert!(out.transversal.is_some());
        }
    }

    #[test]
    fn sixteen_two_and_thirty_three() {
        for (outer_n, k) in [(8, 2), (10, 3)] {
            let ing = ingredients(outer_n, k);
            let out = compose(&ing).unwrap();
            let rep = verify(&out.design);
            assert!(rep.passed, "{rep}");
            assert_eq!(out.design.side(), k * (outer_n - 1) + k - 1);
            assert_eq!(out.design.side(), k * outer_n - 1);
            assert_eq!(out.design.n(), k * outer_n);
            let t = out.transversal.expect("lifted transversal");
            assert!(verify_transversal(&out.design, &t).passed);
        }
    }

    #[test]
    fn lift_needs_no_search() {
        for (outer_n, k) in [(2, 3), (8, 2), (8, 4), (10, 2), (12, 3), (14, 5)] {
            let ing = ingredients(outer_n, k);
            let out = compose(&ing).unwrap();
            assert_eq!(lift_transversal(&ing, &out.design), out.transversal, "({outer_n}, {k})");
        }
    }

    #[test]
    fn incoherent_ingredients_are_rejected() {
        let mut ing = ingredients(8, 2);
        ing.s = 3;
        assert!(matches!(compose(&ing), Err(Error::IncoherentIngredients(_))));

        let mut ing = ingredients(8, 2);
        ing.filler_hole = Hole::new([], []);
        assert!(matches!(compose(&ing), Err(Error::IncoherentIngredients(_))));

        let mut ing = ingredients(8, 2);
        ing.outer_transversal = Transversal::new((0..7).map(|i| (i, i)).collect());
        assert!(matches!(compose(&ing), Err(Error::IncoherentIngredients(_))));

        let mut ing = ingredients(8, 2);
        ing.cell = build_m1k(3);
        assert!(matches!(compose(&ing), Err(Error::IncoherentIngredients(_))));
    }

    /// `l = 2`, `s = 1`: both ingredients are the 1×1 array holding `M_2`,
    /// so the output is the outer design itself.
    #[test]
    fn matching_outer_with_unit_inflation() {
        let (outer, t, _) = build_2k(2).unwrap();
        let mut m2 = DesignArray::new(1, 4, 2, HostGraph::LexMatching { l: 2, s: 1 });
        m2.place(0, 0, Block::from_pairs(&[(0, 1), (2, 3)]).unwrap()).unwrap();
        let mut m2k = DesignArray::new(1, 4, 2, HostGraph::LexMatchingComplete { l: 2, s: 1 });
        m2k.place(0, 0, Block::from_pairs(&[(0, 1), (2, 3)]).unwrap()).unwrap();
        let ing = IngredientSet {
            outer: outer.clone(),
            outer_transversal: t,
            s: 1,
            cell: m2,
            filler: m2k,
            filler_transversal: Transversal::new(vec![(0, 0)]),
            filler_hole: Hole::new([], []),
        };
        let out = compose(&ing).unwrap();
        assert_eq!(out.design, outer);
    }

    #[test]
    fn dispatcher_routes() {
        let cfg = SearchConfig::default();
        let err = construct(10, 2, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonExistent { n: 10, k: 2, .. }), "{err}");
        assert!(matches!(construct(6, 1, &cfg), Err(Error::NonExistent { .. })));
        assert!(matches!(construct(4, 1, &cfg), Err(Error::NonExistent { .. })));
        assert_eq!(construct(6, 3, &cfg).unwrap().construction, Construction::Diagonal2k);
        assert_eq!(construct(12, 3, &cfg).unwrap().construction, Construction::Circulant4k);
        assert_eq!(construct(12, 2, &cfg).unwrap().construction, Construction::Seeded6k);
        let c = construct(24, 3, &cfg).unwrap();
        assert!(matches!(c.construction, Construction::Composed { outer_n: 8, s: 3, .. }));
        assert_eq!(c.design.side(), 23);
        assert!(c.report.passed);
    }

    #[test]
    fn deterministic() {
        let cfg = SearchConfig { seed: 7, budget: 1_000_000 };
        let a = construct(20, 2, &cfg).unwrap();
        let b = construct(20, 2, &cfg).unwrap();
        assert_eq!(a.design, b.design);
        assert_eq!(a.transversal, b.transversal);
    }
}
