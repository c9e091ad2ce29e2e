//! Algorithm X over dancing links, with primary and secondary items.
//!
//! Items are numbered `0..primary + secondary`; the first `primary` must be
//! covered exactly once, the rest at most once. Options are tried in the order
//! they were added, and the branching item is the primary item with the
//! fewest remaining options.

use crate::search::Search;

pub(crate) struct ExactCover {
    items: usize,
    llink: Vec<usize>,
    rlink: Vec<usize>,
    ulink: Vec<usize>,
    dlink: Vec<usize>,
    // item number for option nodes, -(option + 1) for the spacer after an
    // option; headers are unused
    top: Vec<isize>,
    len: Vec<usize>,
    last_spacer: usize,
    options: usize,
    nodes: u64,
}

impl ExactCover {
    pub(crate) fn new(primary: usize, secondary: usize) -> Self {
        let items = primary + secondary;
        // node 0 is the root, 1..=items are item headers
        let mut llink = vec![0; items + 1];
        let mut rlink = vec![0; items + 1];
        for i in 0..=items {
            llink[i] = i;
            rlink[i] = i;
        }
        for i in 1..=primary {
            llink[i] = i - 1;
            rlink[i - 1] = i;
        }
        if primary > 0 {
            llink[0] = primary;
            rlink[primary] = 0;
        }
        let ulink: Vec<usize> = (0..=items).collect();
        let dlink = ulink.clone();
        let mut ec = ExactCover {
            items,
            llink,
            rlink,
            ulink,
            dlink,
            top: vec![0; items + 1],
            len: vec![0; items + 1],
            last_spacer: items + 1,
            options: 0,
            nodes: 0,
        };
        ec.ulink.push(0);
        ec.dlink.push(0);
        ec.top.push(0);
        ec
    }

    pub(crate) fn add_option(&mut self, option: &[usize]) {
        let first = self.top.len();
        for &item in option {
            assert!(item < self.items, "item {item} out of range");
            let header = item + 1;
            let x = self.top.len();
            self.top.push(header as isize);
            self.ulink.push(self.ulink[header]);
            self.dlink.push(header);
            let above = self.ulink[header];
            self.dlink[above] = x;
            self.ulink[header] = x;
            self.len[header] += 1;
        }
        let last = self.top.len() - 1;
        self.options += 1;
        let spacer = self.top.len();
        self.top.push(-(self.options as isize));
        self.ulink.push(first);
        self.dlink.push(0);
        self.dlink[self.last_spacer] = last;
        self.last_spacer = spacer;
    }

    fn hide(&mut self, p: usize) {
        let mut q = p + 1;
        while q != p {
            let x = self.top[q];
            if x <= 0 {
                q = self.ulink[q];
            } else {
                let (u, d) = (self.ulink[q], self.dlink[q]);
                self.dlink[u] = d;
                self.ulink[d] = u;
                self.len[x as usize] -= 1;
                q += 1;
            }
        }
    }

    fn unhide(&mut self, p: usize) {
        let mut q = p - 1;
        while q != p {
            let x = self.top[q];
            if x <= 0 {
                q = self.dlink[q];
            } else {
                let (u, d) = (self.ulink[q], self.dlink[q]);
                self.dlink[u] = q;
                self.ulink[d] = q;
                self.len[x as usize] += 1;
                q -= 1;
            }
        }
    }

    fn cover(&mut self, i: usize) {
        let mut p = self.dlink[i];
        while p != i {
            self.hide(p);
            p = self.dlink[p];
        }
        let (l, r) = (self.llink[i], self.rlink[i]);
        self.rlink[l] = r;
        self.llink[r] = l;
    }

    fn uncover(&mut self, i: usize) {
        let (l, r) = (self.llink[i], self.rlink[i]);
        self.rlink[l] = i;
        self.llink[r] = i;
        let mut p = self.ulink[i];
        while p != i {
            self.unhide(p);
            p = self.ulink[p];
        }
    }

    fn option_of(&self, mut x: usize) -> usize {
        while self.top[x] > 0 {
            x += 1;
        }
        (-self.top[x] - 1) as usize
    }

    /// Covers all items of the option containing `x`, other than `x` itself.
    fn commit(&mut self, x: usize) {
        let mut p = x + 1;
        while p != x {
            let j = self.top[p];
            if j <= 0 {
                p = self.ulink[p];
            } else {
                self.cover(j as usize);
                p += 1;
            }
        }
    }

    fn uncommit(&mut self, x: usize) {
        let mut p = x - 1;
        while p != x {
            let j = self.top[p];
            if j <= 0 {
                p = self.dlink[p];
            } else {
                self.uncover(j as usize);
                p -= 1;
            }
        }
    }

    /// Finds one exact cover, visiting at most `budget` search nodes.
    /// Returns the chosen option indices in the order they were picked. The
    /// links are fully restored afterwards, so the instance can be re-solved.
    pub(crate) fn solve(&mut self, budget: u64) -> Search<Vec<usize>> {
        self.nodes = 0;
        let mut chosen = Vec::new();
        let mut solution = None;
        match self.descend(budget, &mut chosen, &mut solution) {
            Some(true) => Search::Found(solution.expect("recorded on success")),
            Some(false) => Search::Infeasible,
            None => Search::Exhausted,
        }
    }

    /// `None` when the budget runs out.
    fn descend(
        &mut self,
        budget: u64,
        chosen: &mut Vec<usize>,
        solution: &mut Option<Vec<usize>>,
    ) -> Option<bool> {
        if self.rlink[0] == 0 {
            *solution = Some(chosen.iter().map(|&x| self.option_of(x)).collect());
            return Some(true);
        }
        let mut best = self.rlink[0];
        let mut i = best;
        while i != 0 {
            if self.len[i] < self.len[best] {
                best = i;
                if self.len[i] == 0 {
                    break;
                }
            }
            i = self.rlink[i];
        }
        if self.len[best] == 0 {
            return Some(false);
        }
        self.cover(best);
        let mut x = self.dlink[best];
        let mut result = Some(false);
        while x != best {
            if self.nodes >= budget {
                result = None;
                break;
            }
            self.nodes += 1;
            self.commit(x);
            chosen.push(x);
            result = self.descend(budget, chosen, solution);
            chosen.pop();
            self.uncommit(x);
            if result != Some(false) {
                break;
            }
            x = self.dlink[x];
        }
        self.uncover(best);
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example() {
        // items a..g, options from the standard textbook example
        let mut ec = ExactCover::new(7, 0);
        let opts: [&[usize]; 6] = [&[2, 4], &[0, 3, 6], &[1, 2, 5], &[0, 3, 5], &[1, 6], &[3, 4, 6]];
        for o in opts {
            ec.add_option(o);
        }
        let mut sol = ec.solve(1_000).found().unwrap();
        sol.sort_unstable();
        assert_eq!(sol, vec![0, 3, 4]);
    }

    #[test]
    fn infeasible_and_exhausted() {
        let mut ec = ExactCover::new(2, 0);
        ec.add_option(&[0]);
        assert_eq!(ec.solve(100), Search::Infeasible);

        // n-queens style blowup with a tiny budget
        let mut ec = ExactCover::new(3, 0);
        ec.add_option(&[0, 1]);
        ec.add_option(&[1, 2]);
        ec.add_option(&[0]);
        ec.add_option(&[2]);
        assert_eq!(ec.solve(0), Search::Exhausted);
        assert!(ec.solve(100).is_found());
    }

    #[test]
    fn secondary_items_are_at_most_once() {
        // two primaries, options both need secondary 2
        let mut ec = ExactCover::new(2, 1);
        ec.add_option(&[0, 2]);
        ec.add_option(&[1, 2]);
        assert_eq!(ec.solve(100), Search::Infeasible);
        ec.add_option(&[1]);
        assert_eq!(ec.solve(100).found().map(|mut v| { v.sort(); v }), Some(vec![0, 2]));
    }

    #[test]
    fn repeated_solves_restore_links() {
        let mut ec = ExactCover::new(4, 0);
        ec.add_option(&[0, 1]);
        ec.add_option(&[2, 3]);
        ec.add_option(&[0, 2]);
        ec.add_option(&[1, 3]);
        let a = ec.solve(100);
        let b = ec.solve(100);
        assert_eq!(a, b);
    }
}
