//! Exhaustive enumeration of small actions and bibundles.
//!
//! Carriers are `{0..k}`. Moment maps are listed as non-decreasing sequences,
//! which fixes the carrier labelling up to permutations inside a moment
//! fibre. Action tables are filled cell by cell in a fixed order and every
//! candidate value is tried in increasing order, so the enumeration order is
//! deterministic.

use std::ops::ControlFlow;
use std::sync::Arc;

use crate::action::{Action, RawAction, Side};
use crate::bibundle::{Bibundle, RawBibundle};
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjId};

const UNSET: usize = usize::MAX;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Skip tables in which a non-unit arrow fixes a point.
    pub free_only: bool,
    /// Only moment maps that hit every object.
    pub surjective_moments: bool,
}

fn point_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

/// Non-decreasing sequences of length `k` over `0..m`.
pub fn non_decreasing(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, m: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in from..m {
            cur.push(v);
            go(k, m, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, m, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

struct Filler<'a> {
    groupoid: &'a FiniteGroupoid,
    side: Side,
    moment: &'a [ObjId],
    arrows: usize,
    table: Vec<usize>,
    cells: Vec<(ArrowId, usize)>,
    free_only: bool,
}

impl<'a> Filler<'a> {
    fn new(groupoid: &'a FiniteGroupoid, side: Side, moment: &'a [ObjId], free_only: bool) -> Self {
        let arrows = groupoid.num_arrows();
        let mut table = vec![UNSET; moment.len() * arrows];
        let mut cells = Vec::new();
        for (x, &m) in moment.iter().enumerate() {
            table[x * arrows + groupoid.unit(m).0] = x;
            let anchored = match side {
                Side::Left => groupoid.arrows_from(m),
                Side::Right => groupoid.arrows_into(m),
            };
            for &a in anchored {
                if !groupoid.is_unit(a) {
                    cells.push((a, x));
                }
            }
        }
        Filler { groupoid, side, moment, arrows, table, cells, free_only }
    }

    fn get(&self, a: ArrowId, x: usize) -> usize {
        self.table[x * self.arrows + a.0]
    }

    fn anchored(&self, o: ObjId) -> &'a [ArrowId] {
        match self.side {
            Side::Left => self.groupoid.arrows_from(o),
            Side::Right => self.groupoid.arrows_into(o),
        }
    }

    fn landing(&self, a: ArrowId) -> ObjId {
        match self.side {
            Side::Left => self.groupoid.tgt(a),
            Side::Right => self.groupoid.src(a),
        }
    }

    fn then(&self, first: ArrowId, second: ArrowId) -> ArrowId {
        match self.side {
            Side::Left => self.groupoid.compose(second, first),
            Side::Right => self.groupoid.compose(first, second),
        }
        .expect("composable")
    }

    fn agrees(&self, a: ArrowId, x: usize, v: usize) -> bool {
        let cur = self.get(a, x);
        cur == UNSET || cur == v
    }

    /// Local checks after setting `(a, x) ↦ y`.
    fn consistent(&self, a: ArrowId, x: usize, y: usize) -> bool {
        let n = self.moment.len();
        if (0..n).any(|x2| x2 != x && self.get(a, x2) == y) {
            return false;
        }
        for &b in self.anchored(self.moment[y]) {
            let z = self.get(b, y);
            if z != UNSET && !self.agrees(self.then(a, b), x, z) {
                return false;
            }
        }
        for w in 0..n {
            for &f in self.anchored(self.moment[w]) {
                if self.get(f, w) == x && !self.agrees(self.then(f, a), w, y) {
                    return false;
                }
            }
        }
        for &f in self.anchored(self.moment[x]) {
            let w = self.get(f, x);
            if w != UNSET && !self.agrees(self.then(self.groupoid.inv(f), a), w, y) {
                return false;
            }
        }
        true
    }

    fn fill(
        &mut self,
        idx: usize,
        extra: &dyn Fn(ArrowId, usize, usize) -> bool,
        done: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(&(a, x)) = self.cells.get(idx) else { return done(&self.table) };
        let target = self.landing(a);
        for y in 0..self.moment.len() {
            if self.moment[y] != target || (self.free_only && y == x) || !extra(a, x, y) {
                continue;
            }
            self.table[x * self.arrows + a.0] = y;
            if self.consistent(a, x, y) {
                self.fill(idx + 1, extra, done)?;
            }
            self.table[x * self.arrows + a.0] = UNSET;
        }
        ControlFlow::Continue(())
    }
}

fn raw_from_table(groupoid: &FiniteGroupoid, side: Side, moment: &[ObjId], table: &[usize]) -> RawAction {
    let arrows = groupoid.num_arrows();
    let mut entries = Vec::new();
    for (x, &m) in moment.iter().enumerate() {
        let anchored = match side {
            Side::Left => groupoid.arrows_from(m),
            Side::Right => groupoid.arrows_into(m),
        };
        for &a in anchored {
            entries.push((a, x, table[x * arrows + a.0]));
        }
    }
    RawAction { side, labels: point_labels(moment.len()), moment: moment.to_vec(), entries }
}

/// Visits every action of `groupoid` on `{0..k}` whose moment map is
/// non-decreasing.
pub fn for_each_action(
    groupoid: &Arc<FiniteGroupoid>,
    side: Side,
    k: usize,
    options: SearchOptions,
    visit: &mut dyn FnMut(Action) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let m = groupoid.num_objects();
    for moments in non_decreasing(k, m) {
        if options.surjective_moments && (0..m).any(|o| !moments.contains(&o)) {
            continue;
        }
        let moment: Vec<ObjId> = moments.into_iter().map(ObjId).collect();
        let mut filler = Filler::new(groupoid, side, &moment, options.free_only);
        filler.fill(0, &|_, _, _| true, &mut |table| {
            let raw = raw_from_table(groupoid, side, &moment, table);
            visit(Action::from_raw(groupoid.clone(), raw).expect("enumerated tables are actions"))
        })?;
    }
    ControlFlow::Continue(())
}

/// Visits every `(G, H)`-bibundle on `{0..k}` whose moment pairs
/// `(l(x), r(x))` are non-decreasing in lexicographic order.
pub fn for_each_bibundle(
    left: &Arc<FiniteGroupoid>,
    right: &Arc<FiniteGroupoid>,
    k: usize,
    options: SearchOptions,
    visit: &mut dyn FnMut(Bibundle) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let (gm, hm) = (left.num_objects(), right.num_objects());
    for pairs in non_decreasing(k, gm * hm) {
        let l: Vec<ObjId> = pairs.iter().map(|&p| ObjId(p / hm)).collect();
        let r: Vec<ObjId> = pairs.iter().map(|&p| ObjId(p % hm)).collect();
        if options.surjective_moments
            && ((0..gm).any(|o| !l.contains(&ObjId(o))) || (0..hm).any(|o| !r.contains(&ObjId(o))))
        {
            continue;
        }
        let mut lf = Filler::new(left, Side::Left, &l, options.free_only);
        let r_ref = &r;
        lf.fill(0, &|_, x, y| r_ref[x] == r_ref[y], &mut |ltable| {
            let ga = left.num_arrows();
            let mut rf = Filler::new(right, Side::Right, &r, options.free_only);
            let l_ref = &l;
            let commutes = |h: ArrowId, x: usize, y: usize, rtable: &[usize]| {
                let ha = right.num_arrows();
                left.arrows_from(l_ref[x]).iter().all(|&g| {
                    let gx = ltable[x * ga + g.0];
                    let v = rtable[gx * ha + h.0];
                    v == UNSET || v == ltable[y * ga + g.0]
                })
            };
            let mut visit_right = |rtable: &[usize]| {
                let raw = RawBibundle {
                    left_groupoid: left.clone(),
                    right_groupoid: right.clone(),
                    left: raw_from_table(left, Side::Left, &l, ltable),
                    right: raw_from_table(right, Side::Right, &r, rtable),
                };
                visit(Bibundle::from_raw(raw).expect("enumerated tables are bibundles"))
            };
            fill_right(&mut rf, 0, l_ref, &commutes, &mut visit_right)
        })?;
    }
    ControlFlow::Continue(())
}

type Commutes<'a> = &'a dyn Fn(ArrowId, usize, usize, &[usize]) -> bool;

fn fill_right(
    rf: &mut Filler<'_>,
    idx: usize,
    l: &[ObjId],
    commutes: Commutes<'_>,
    done: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(&(h, x)) = rf.cells.get(idx) else { return done(&rf.table) };
    let target = rf.landing(h);
    for y in 0..rf.moment.len() {
        if rf.moment[y] != target || l[y] != l[x] || (rf.free_only && y == x) {
            continue;
        }
        rf.table[x * rf.arrows + h.0] = y;
        if rf.consistent(h, x, y) && commutes(h, x, y, &rf.table) {
            fill_right(rf, idx + 1, l, commutes, done)?;
        }
        rf.table[x * rf.arrows + h.0] = UNSET;
    }
    ControlFlow::Continue(())
}

/// Lexicographically least encoding of the bibundle over all relabellings of
/// its carrier; equal keys mean isomorphic bibundles.
pub fn canonical_key(b: &Bibundle) -> Vec<usize> {
    let n = b.len();
    let (ga, ha) = (b.left_groupoid().num_arrows(), b.right_groupoid().num_arrows());
    let mut best: Option<Vec<usize>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut inverse = vec![0; n];
    loop {
        // perm maps old point -> new point.
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let mut key = Vec::with_capacity(n * (2 + ga + ha));
        for &old in &inverse {
            key.push(b.l(old).0);
            key.push(b.r(old).0);
        }
        for &old in &inverse {
            for g in 0..ga {
                key.push(b.act_left(ArrowId(g), old).map_or(UNSET, |y| perm[y]));
            }
            for h in 0..ha {
                key.push(b.act_right(old, ArrowId(h)).map_or(UNSET, |y| perm[y]));
            }
        }
        if best.as_ref().is_none_or(|k| key < *k) {
            best = Some(key);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Every bibundle on at most `max_carrier` points, one per isomorphism class.
pub fn bibundles_up_to_iso(
    left: &Arc<FiniteGroupoid>,
    right: &Arc<FiniteGroupoid>,
    max_carrier: usize,
    options: SearchOptions,
) -> Vec<Bibundle> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in 0..=max_carrier {
        let _ = for_each_bibundle(left, right, k, options, &mut |b| {
            if seen.insert(canonical_key(&b)) {
                out.push(b);
            }
            ControlFlow::Continue(())
        });
    }
    out
}

/// Like [`canonical_key`] for a single action.
pub fn canonical_action_key(a: &Action) -> Vec<usize> {
    let n = a.len();
    let arrows = a.groupoid().num_arrows();
    let mut best: Option<Vec<usize>> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut inverse = vec![0; n];
    loop {
        for (old, &new) in perm.iter().enumerate() {
            inverse[new] = old;
        }
        let mut key = Vec::with_capacity(n * (1 + arrows));
        key.extend(inverse.iter().map(|&old| a.moment(old).0));
        for &old in &inverse {
            for g in 0..arrows {
                key.push(a.apply(ArrowId(g), old).map_or(UNSET, |y| perm[y]));
            }
        }
        if best.as_ref().is_none_or(|k| key < *k) {
            best = Some(key);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

/// Every action on at most `max_carrier` points, one per isomorphism class.
pub fn actions_up_to_iso(
    groupoid: &Arc<FiniteGroupoid>,
    side: Side,
    max_carrier: usize,
    options: SearchOptions,
) -> Vec<Action> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in 0..=max_carrier {
        let _ = for_each_action(groupoid, side, k, options, &mut |a| {
            if seen.insert(canonical_action_key(&a)) {
                out.push(a);
            }
            ControlFlow::Continue(())
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_as_groupoid, pair_groupoid, unit_groupoid, GroupTable};

    fn count_bibundles(g: &Arc<FiniteGroupoid>, h: &Arc<FiniteGroupoid>, k: usize, options: SearchOptions) -> usize {
        let mut n = 0;
        let _ = for_each_bibundle(g, h, k, options, &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    #[test]
    fn sequences() {
        assert_eq!(non_decreasing(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(non_decreasing(0, 3), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn z2_actions_on_two_points() {
        // Brute force over all maps for the non-unit arrow: involutions of a
        // 2-point set, i.e. identity and the swap.
        let g = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
        let mut n = 0;
        let _ = for_each_action(&g, Side::Left, 2, SearchOptions::default(), &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(n, 2);
    }

    #[test]
    fn z2_bibundles_on_two_points() {
        // Pairs of commuting involutions (a, b) on {0,1}: both from {id, swap}.
        let g = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
        assert_eq!(count_bibundles(&g, &g, 2, SearchOptions::default()), 4);
        let free = SearchOptions { free_only: true, ..Default::default() };
        assert_eq!(count_bibundles(&g, &g, 2, free), 1);
    }

    #[test]
    fn pair_groupoid_actions_match_brute_force() {
        // pair_groupoid(2) acting on k points: the action is determined by a
        // bijection between the two moment fibres, so it exists only for
        // equal fibre sizes.
        let g = Arc::new(pair_groupoid(2));
        let mut n = 0;
        let _ = for_each_action(&g, Side::Left, 2, SearchOptions::default(), &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        // moments [0,0] and [1,1] admit none, [0,1] admits one.
        assert_eq!(n, 1);
    }

    #[test]
    fn z2_actions_up_to_iso() {
        // Z/2-sets with at most 3 points: sizes 0..3 split into fixed points
        // and swapped pairs: 1 + 1 + 2 + 2.
        let g = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
        assert_eq!(actions_up_to_iso(&g, Side::Left, 3, SearchOptions::default()).len(), 6);
    }

    #[test]
    fn iso_classes_of_trivial_bibundles() {
        let u = Arc::new(unit_groupoid(1));
        let all = bibundles_up_to_iso(&u, &u, 3, SearchOptions::default());
        assert_eq!(all.len(), 4);
    }
}
