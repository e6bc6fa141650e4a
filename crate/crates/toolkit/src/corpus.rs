//! Deterministic corpora of small groupoids, actions, bundles and bibundles.

use crate::mutations::Mutant;
use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::Arc;

use morita_core::enumerate::{actions_up_to_iso, bibundles_up_to_iso, SearchOptions};
use morita_core::{Action, Bibundle, Bundle, FiniteGroupoid, GroupTable, ObjId, Side};
use serde::{Deserialize, Serialize};

/// Size bounds for a corpus.
///
/// `seed` rotates every list by a fixed offset; the same spec always yields the
/// same corpus. Bibundles use `max_bibundle_carrier` when given and
/// `max_carrier` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub max_objects: usize,
    pub max_arrows: usize,
    pub max_carrier: usize,
    #[serde(default)]
    pub max_bibundle_carrier: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec { max_objects: 3, max_arrows: 6, max_carrier: 3, max_bibundle_carrier: Some(2), seed: 0 }
    }
}

impl CorpusSpec {
    pub fn bibundle_carrier(&self) -> usize {
        self.max_bibundle_carrier.unwrap_or(self.max_carrier)
    }

    /// Number of moment assignments the bibundle search visits in the worst
    /// case, times the number of groupoid pairs.
    pub fn estimate(&self, groupoids: u128) -> u128 {
        let pairs = (self.max_objects * self.max_objects) as u128;
        let per_pair: u128 =
            (0..=self.bibundle_carrier() as u32).map(|k| pairs.saturating_pow(k)).fold(0, u128::saturating_add);
        groupoids.saturating_pow(2).saturating_mul(per_pair)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("bounds too large: about {0} candidates")]
    BoundsTooLarge(u128),
    #[error("bad corpus spec: {0}")]
    BadSpec(String),
    #[error("groups of order {0} are too slow to enumerate (at most {max} supported)", max = MAX_GROUP_ORDER)]
    GroupOrderTooLarge(usize),
}

pub const MAX_ESTIMATE: u128 = 10_000_000;

/// Largest group order the Cayley table search handles in reasonable time.
pub const MAX_GROUP_ORDER: usize = 7;

/// Number of groups of each order up to 64, up to isomorphism.
const GROUP_COUNTS: [u128; 64] = [
    1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15, 2, 2, 5, 4, 1, 4, 1, 51, 1, 2, 1, 14, 1,
    2, 2, 14, 1, 6, 1, 4, 2, 2, 1, 52, 2, 5, 1, 5, 1, 15, 2, 13, 2, 2, 1, 13, 1, 2, 4, 267,
];

/// How many groupoids `groupoid_classes` would return, counted from the
/// number of groups of each order without building any of them.
pub fn groupoid_class_count(max_objects: usize, max_arrows: usize) -> Option<u128> {
    if max_arrows > GROUP_COUNTS.len() {
        return None;
    }
    let mut dp = vec![vec![0u128; max_arrows + 1]; max_objects + 1];
    dp[0][0] = 1;
    for objects in 1..=max_objects {
        for order in 1..=max_arrows {
            let arrows = objects * objects * order;
            if arrows > max_arrows {
                break;
            }
            for _ in 0..GROUP_COUNTS[order - 1] {
                for o in objects..=max_objects {
                    for a in arrows..=max_arrows {
                        dp[o][a] = dp[o][a].saturating_add(dp[o - objects][a - arrows]);
                    }
                }
            }
        }
    }
    Some(dp.iter().flatten().fold(0u128, |n, &c| n.saturating_add(c)) - 1)
}

impl FromStr for CorpusSpec {
    type Err = CorpusError;

    /// Accepts JSON or a list of `key=value` pairs separated by commas or
    /// whitespace; unspecified keys keep their defaults.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| CorpusError::BadSpec(e.to_string()));
        }
        let mut spec = CorpusSpec::default();
        for item in t.split(|c: char| c == ',' || c.is_whitespace()).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CorpusError::BadSpec(format!("expected key=value, got {item:?}")))?;
            let n: u64 = v.parse().map_err(|_| CorpusError::BadSpec(format!("{k} needs a number")))?;
            match k {
                "max_objects" => spec.max_objects = n as usize,
                "max_arrows" => spec.max_arrows = n as usize,
                "max_carrier" => spec.max_carrier = n as usize,
                "max_bibundle_carrier" => spec.max_bibundle_carrier = Some(n as usize),
                "seed" => spec.seed = n,
                _ => return Err(CorpusError::BadSpec(format!("unknown key {k:?}"))),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_objects={},max_arrows={},max_carrier={},max_bibundle_carrier={},seed={}",
            self.max_objects,
            self.max_arrows,
            self.max_carrier,
            self.bibundle_carrier(),
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

/// Groups of every order up to `max_order`, one per isomorphism class, ordered
/// by order and then by canonical multiplication table.
pub fn small_groups(max_order: usize) -> Vec<GroupTable> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        let mut seen = HashSet::new();
        let mut found = Vec::new();
        let mut table = vec![vec![usize::MAX; n]; n];
        table[0] = (0..n).collect();
        for (a, row) in table.iter_mut().enumerate() {
            row[0] = a;
        }
        fill_group(&mut table, 0, &mut |t| {
            let key = canonical_table(t);
            if seen.insert(key.clone()) {
                found.push(key);
            }
        });
        found.sort();
        for t in found {
            let labels = (0..n).map(|a| a.to_string()).collect();
            out.push(GroupTable::new(labels, t).expect("enumerated tables are groups"));
        }
    }
    out
}

fn fill_group(t: &mut [Vec<usize>], cell: usize, done: &mut dyn FnMut(&[Vec<usize>])) {
    let n = t.len();
    if cell >= (n - 1) * (n - 1) {
        if associative(t) {
            done(t);
        }
        return;
    }
    let (a, b) = (1 + cell / (n - 1), 1 + cell % (n - 1));
    for v in 0..n {
        if (0..n).any(|c| t[a][c] == v) || (0..n).any(|r| t[r][b] == v) {
            continue;
        }
        t[a][b] = v;
        if partially_associative(t) {
            fill_group(t, cell + 1, done);
        }
        t[a][b] = usize::MAX;
    }
}

fn partially_associative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    for a in 0..n {
        for b in 0..n {
            let ab = t[a][b];
            if ab == usize::MAX {
                continue;
            }
            for c in 0..n {
                let bc = t[b][c];
                if bc == usize::MAX {
                    continue;
                }
                let (l, r) = (t[ab][c], t[a][bc]);
                if l != usize::MAX && r != usize::MAX && l != r {
                    return false;
                }
            }
        }
    }
    true
}

fn associative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
}

/// Least relabelled table over permutations fixing the identity `0`.
fn canonical_table(t: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = t.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<Vec<usize>>> = None;
    loop {
        let mut inv = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let r: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| perm[t[inv[a]][inv[b]]]).collect()).collect();
        if best.as_ref().is_none_or(|x| r < *x) {
            best = Some(r);
        }
        if !next_perm(&mut perm[1.min(n)..]) {
            break;
        }
    }
    best.unwrap()
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Connected piece `pair_groupoid(objects) × group`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Component {
    objects: usize,
    group: usize,
}

/// Groupoids with at most `max_objects` objects and `max_arrows` arrows, one
/// per isomorphism class. A finite groupoid is determined up to isomorphism by
/// the multiset of its connected components, and a connected one by its
/// object count and vertex group.
pub fn groupoid_classes(max_objects: usize, max_arrows: usize) -> Vec<Named<Arc<FiniteGroupoid>>> {
    let groups = small_groups(max_arrows);
    let group_names = group_names(&groups);
    let mut components = Vec::new();
    for objects in 1..=max_objects {
        for (gi, g) in groups.iter().enumerate() {
            if objects * objects * g.order() <= max_arrows {
                components.push(Component { objects, group: gi });
            }
        }
    }
    let cost = |c: &Component| (c.objects, c.objects * c.objects * groups[c.group].order());
    let mut multisets: Vec<Vec<Component>> = Vec::new();
    fn go(
        comps: &[Component],
        cost: &dyn Fn(&Component) -> (usize, usize),
        from: usize,
        left: (usize, usize),
        cur: &mut Vec<Component>,
        out: &mut Vec<Vec<Component>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in from..comps.len() {
            let (o, a) = cost(&comps[i]);
            if o <= left.0 && a <= left.1 {
                cur.push(comps[i]);
                go(comps, cost, i, (left.0 - o, left.1 - a), cur, out);
                cur.pop();
            }
        }
    }
    go(&components, &cost, 0, (max_objects, max_arrows), &mut Vec::new(), &mut multisets);
    multisets.sort_by_key(|m| {
        let objects: usize = m.iter().map(|c| c.objects).sum();
        let arrows: usize = m.iter().map(|c| cost(c).1).sum();
        (objects, arrows, m.clone())
    });
    multisets
        .into_iter()
        .map(|m| {
            let parts: Vec<FiniteGroupoid> =
                m.iter().map(|c| FiniteGroupoid::transitive(c.objects, &groups[c.group])).collect();
            let refs: Vec<&FiniteGroupoid> = parts.iter().collect();
            let name = m
                .iter()
                .map(|c| match c.objects {
                    1 => group_names[c.group].clone(),
                    n if groups[c.group].order() == 1 => format!("P{n}"),
                    n => format!("P{n}x{}", group_names[c.group]),
                })
                .collect::<Vec<_>>()
                .join("+");
            Named { name, value: Arc::new(FiniteGroupoid::disjoint_union(&refs)) }
        })
        .collect()
}

/// `G<order>.<index>` in the order of [`small_groups`].
fn group_names(groups: &[GroupTable]) -> Vec<String> {
    let mut out = Vec::new();
    let mut last = (0, 0);
    for g in groups {
        let i = if g.order() == last.0 { last.1 + 1 } else { 1 };
        last = (g.order(), i);
        out.push(format!("G{}.{}", g.order(), i));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub spec: CorpusSpec,
    pub groupoids: Vec<Named<Arc<FiniteGroupoid>>>,
    pub actions: Vec<Named<Action>>,
    pub bundles: Vec<Named<Bundle>>,
    pub bibundles: Vec<Named<Bibundle>>,
    /// Unvalidated objects checked by the axiom suite alongside the rest.
    pub injected: Vec<Named<Mutant>>,
}

fn rotate<T>(v: &mut [T], seed: u64) {
    if !v.is_empty() {
        let k = (seed % v.len() as u64) as usize;
        v.rotate_left(k);
    }
}

/// Every action is projected onto its orbit space; bundles of every
/// bibundle's two sides are included as well.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus, CorpusError> {
    let count = groupoid_class_count(spec.max_objects, spec.max_arrows);
    let estimate = count.map_or(u128::MAX, |n| spec.estimate(n));
    if estimate > MAX_ESTIMATE {
        return Err(CorpusError::BoundsTooLarge(estimate));
    }
    if spec.max_arrows > MAX_GROUP_ORDER {
        return Err(CorpusError::GroupOrderTooLarge(spec.max_arrows));
    }
    let groupoids = groupoid_classes(spec.max_objects, spec.max_arrows);
    let mut actions = Vec::new();
    for g in &groupoids {
        for side in [Side::Left, Side::Right] {
            for (i, a) in
                actions_up_to_iso(&g.value, side, spec.max_carrier, SearchOptions::default()).into_iter().enumerate()
            {
                let s = if side == Side::Left { "L" } else { "R" };
                actions.push(Named { name: format!("{}/{s}{}#{i}", g.name, a.len()), value: a });
            }
        }
    }
    let mut bibundles = Vec::new();
    for g in &groupoids {
        for h in &groupoids {
            let all = bibundles_up_to_iso(&g.value, &h.value, spec.bibundle_carrier(), SearchOptions::default());
            for (i, b) in all.into_iter().enumerate() {
                bibundles.push(Named { name: format!("{}|{}#{i}", g.name, h.name), value: b });
            }
        }
    }
    let mut bundles = Vec::new();
    for a in &actions {
        bundles.push(Named { name: format!("{}/orbits", a.name), value: orbit_bundle(&a.value) });
    }
    for b in &bibundles {
        bundles.push(Named { name: format!("{}/left", b.name), value: b.value.left_bundle() });
        bundles.push(Named { name: format!("{}/right", b.name), value: b.value.right_bundle() });
    }
    let mut corpus = Corpus { spec: *spec, groupoids, actions, bundles, bibundles, injected: Vec::new() };
    rotate(&mut corpus.groupoids, spec.seed);
    rotate(&mut corpus.actions, spec.seed);
    rotate(&mut corpus.bundles, spec.seed);
    rotate(&mut corpus.bibundles, spec.seed);
    Ok(corpus)
}

/// The bundle `X → X/G`.
pub fn orbit_bundle(a: &Action) -> Bundle {
    let orbits = a.orbit_space();
    let base = (0..orbits.num_classes()).map(|c| format!("o{c}")).collect();
    let proj = a.points().map(|x| orbits.class_of(x)).collect();
    Bundle::new(a.clone(), base, proj).expect("orbit projection is invariant")
}

/// All equivariant maps `source → target`, in lexicographic order.
pub fn equivariant_maps(source: &Action, target: &Action) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if source.side() != target.side() || source.groupoid() != target.groupoid() {
        return out;
    }
    let mut map = vec![usize::MAX; source.len()];
    let _ = extend_map(source, target, &mut map, &mut |m| {
        out.push(m.to_vec());
        ControlFlow::Continue(())
    });
    out
}

fn extend_map(
    source: &Action,
    target: &Action,
    map: &mut [usize],
    done: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(x) = map.iter().position(|&v| v == usize::MAX) else {
        return done(map);
    };
    for y in target.points() {
        if target.moment(y) != source.moment(x) {
            continue;
        }
        // x determines its whole orbit.
        let mut assigned = Vec::new();
        let mut ok = true;
        let mut stack = vec![(x, y)];
        while let Some((p, q)) = stack.pop() {
            if map[p] != usize::MAX {
                if map[p] != q {
                    ok = false;
                    break;
                }
                continue;
            }
            if source.moment(p) != target.moment(q) {
                ok = false;
                break;
            }
            map[p] = q;
            assigned.push(p);
            for &g in source.arrows_at(source.moment(p)) {
                stack.push((source.apply(g, p).unwrap(), target.apply(g, q).unwrap()));
            }
        }
        if ok {
            extend_map(source, target, map, done)?;
        }
        for p in assigned {
            map[p] = usize::MAX;
        }
    }
    ControlFlow::Continue(())
}

/// Points labelled by their index, with moments given as object indices.
pub fn points(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// The groupoid `pair_groupoid(n)` acting on `n` points and the point groupoid
/// acting trivially.
pub fn pair_to_point(n: usize) -> Bibundle {
    let g = Arc::new(morita_core::pair_groupoid(n));
    let pt = Arc::new(morita_core::unit_groupoid(1));
    Bibundle::from_fns(&g, &pt, points(n), (0..n).map(ObjId).collect(), vec![ObjId(0); n], |a, _| g.tgt(a).0, |_, x| x)
        .expect("a biprincipal bibundle")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_up_to_order_six() {
        let orders: Vec<usize> = small_groups(6).iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 4, 4, 5, 6, 6]);
    }

    #[test]
    fn spec_parsing() {
        let s: CorpusSpec = "max_objects=2, max_arrows=4 seed=7".parse().unwrap();
        assert_eq!((s.max_objects, s.max_arrows, s.seed), (2, 4, 7));
        let j: CorpusSpec = r#"{"max_objects":1,"max_arrows":2,"max_carrier":1}"#.parse().unwrap();
        assert_eq!(j.max_arrows, 2);
        assert!("bogus=1".parse::<CorpusSpec>().is_err());
    }

    #[test]
    fn groupoid_counts() {
        let small = groupoid_classes(1, 2);
        let names: Vec<&str> = small.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["G1.1", "G2.1"]);
        let two = groupoid_classes(2, 4);
        assert!(two.iter().any(|g| g.name == "P2"));
        assert!(two.iter().any(|g| g.name == "G1.1+G1.1"));
        for (o, a) in [(1, 2), (2, 3), (2, 4), (3, 6), (3, 7), (1, 6)] {
            assert_eq!(groupoid_class_count(o, a), Some(groupoid_classes(o, a).len() as u128), "({o}, {a})");
        }
    }

    #[test]
    fn large_bounds_are_refused_before_enumerating() {
        let huge = CorpusSpec { max_objects: 9, max_arrows: 40, max_carrier: 9, max_bibundle_carrier: None, seed: 0 };
        assert!(matches!(generate_corpus(&huge), Err(CorpusError::BoundsTooLarge(_))));
        let wide = CorpusSpec { max_objects: 1, max_arrows: 12, max_carrier: 1, max_bibundle_carrier: None, seed: 0 };
        assert_eq!(generate_corpus(&wide), Err(CorpusError::GroupOrderTooLarge(12)));
    }
}
