use std::ops::ControlFlow;
use std::sync::{Arc, OnceLock};

use morita_core::enumerate::{actions_up_to_iso, bibundles_up_to_iso, for_each_action, SearchOptions};
use morita_core::{
    associator, compose_bibundles, group_as_groupoid, identity_bibundle, is_bijection, is_biprincipal,
    is_bundle_morphism, is_equivariant, is_injection, is_surjection, left_unitor, pair_groupoid, right_unitor,
    unit_groupoid, Action, Bibundle, Bundle, FiniteGroupoid, GroupTable, Side,
};
use proptest::prelude::*;
use proptest::sample::select;

fn groupoids() -> &'static Vec<Arc<FiniteGroupoid>> {
    static POOL: OnceLock<Vec<Arc<FiniteGroupoid>>> = OnceLock::new();
    POOL.get_or_init(|| {
        let z2 = group_as_groupoid(&GroupTable::cyclic(2));
        vec![
            unit_groupoid(1),
            unit_groupoid(2),
            pair_groupoid(2),
            pair_groupoid(3),
            z2.clone(),
            group_as_groupoid(&GroupTable::cyclic(3)),
            FiniteGroupoid::disjoint_union(&[&pair_groupoid(2), &unit_groupoid(1)]),
            FiniteGroupoid::disjoint_union(&[&z2, &unit_groupoid(1)]),
        ]
        .into_iter()
        .map(Arc::new)
        .collect()
    })
}

fn actions() -> &'static Vec<Action> {
    static POOL: OnceLock<Vec<Action>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for g in groupoids() {
            for side in [Side::Left, Side::Right] {
                out.extend(actions_up_to_iso(g, side, 3, SearchOptions::default()));
            }
        }
        out
    })
}

fn bibundles() -> &'static Vec<Bibundle> {
    static POOL: OnceLock<Vec<Bibundle>> = OnceLock::new();
    POOL.get_or_init(|| {
        let small: Vec<_> = groupoids().iter().filter(|g| g.num_arrows() <= 4).collect();
        let mut out = Vec::new();
        for g in &small {
            for h in &small {
                out.extend(bibundles_up_to_iso(g, h, 2, SearchOptions::default()));
            }
        }
        out
    })
}

fn biprincipal() -> &'static Vec<Bibundle> {
    static POOL: OnceLock<Vec<Bibundle>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out: Vec<Bibundle> = bibundles().iter().filter(|b| is_biprincipal(b)).cloned().collect();
        out.extend(groupoids().iter().map(identity_bibundle));
        out
    })
}

/// The action over its orbit space, or over a single point.
fn bundle(a: &Action, collapse: bool) -> Bundle {
    if collapse {
        return Bundle::new(a.clone(), vec!["*".into()], vec![0; a.len()]).unwrap();
    }
    let orbits = a.orbit_space();
    let base = (0..orbits.num_classes()).map(|c| format!("o{c}")).collect();
    let proj = a.points().map(|x| orbits.class_of(x)).collect();
    Bundle::new(a.clone(), base, proj).unwrap()
}

fn same_fibre(b: &Bundle, x1: usize, x2: usize) -> bool {
    b.proj(x1) == b.proj(x2)
}

/// Arrows carrying `x2` to `x1`, by search.
fn carriers(a: &Action, x1: usize, x2: usize) -> Vec<morita_core::ArrowId> {
    a.arrows_at(a.moment(x2)).iter().copied().filter(|&g| a.apply(g, x2) == Some(x1)).collect()
}

fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |i| [v.clone(), vec![i]].concat())).collect();
    }
    out
}

fn same_groupoid_and_side(a: &Action, b: &Action) -> bool {
    Arc::ptr_eq(a.groupoid(), b.groupoid()) && a.side() == b.side()
}

fn action_pairs() -> &'static Vec<(Action, Action)> {
    static POOL: OnceLock<Vec<(Action, Action)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let all = actions();
        all.iter()
            .flat_map(|a| all.iter().filter(|c| same_groupoid_and_side(a, c)).map(|c| (a.clone(), c.clone())))
            .collect()
    })
}

fn composable(x: &Bibundle, y: &Bibundle) -> bool {
    **x.right_groupoid() == **y.left_groupoid()
}

fn biprincipal_pairs() -> &'static Vec<(Bibundle, Bibundle)> {
    static POOL: OnceLock<Vec<(Bibundle, Bibundle)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let all = biprincipal();
        all.iter().flat_map(|x| all.iter().filter(|y| composable(x, y)).map(|y| (x.clone(), y.clone()))).collect()
    })
}

/// Composable triples; the first factor is kept biprincipal to bound their number.
fn triples() -> &'static Vec<(Bibundle, Bibundle, Bibundle)> {
    static POOL: OnceLock<Vec<(Bibundle, Bibundle, Bibundle)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let all: Vec<&Bibundle> = bibundles().iter().step_by(7).collect();
        let mut out = Vec::new();
        for x in biprincipal() {
            for y in all.iter().filter(|y| composable(x, y)) {
                for z in all.iter().filter(|z| composable(y, z)) {
                    out.push((x.clone(), (*y).clone(), (*z).clone()));
                }
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pre_principal_means_free_and_fibre_transitive(a in select(actions().clone()), collapse in any::<bool>()) {
        let b = bundle(&a, collapse);
        let oracle = a.points().all(|x1| {
            a.points().all(|x2| {
                let n = carriers(&a, x1, x2).len();
                if same_fibre(&b, x1, x2) { n == 1 } else { n == 0 }
            })
        });
        prop_assert_eq!(b.is_pre_principal(), oracle);
        prop_assert_eq!(b.is_free_and_fibre_transitive(), oracle);
    }

    #[test]
    fn division_laws(a in select(actions().clone()), collapse in any::<bool>()) {
        let b = bundle(&a, collapse);
        let Ok(d) = b.division_map() else { return Ok(()) };
        prop_assert!(d.check_laws(&b).is_ok());
        for x1 in a.points() {
            for x2 in a.points() {
                match d.get(x1, x2) {
                    Some(g) => prop_assert_eq!(carriers(&a, x1, x2), vec![g]),
                    None => prop_assert!(!same_fibre(&b, x1, x2)),
                }
            }
        }
    }

    #[test]
    fn free_actions_cancel(a in select(actions().clone())) {
        prop_assume!(a.is_free());
        for x in a.points() {
            let at = a.arrows_at(a.moment(x));
            for &g in at {
                for &h in at {
                    if a.apply(g, x) == a.apply(h, x) {
                        prop_assert_eq!(g, h);
                    }
                }
            }
        }
    }

    #[test]
    fn morphisms_preserve_division((a, c) in select(action_pairs().clone())) {
        let (ba, bc) = (bundle(&a, true), bundle(&c, true));
        let Ok(d) = bc.division_map() else { return Ok(()) };
        let Ok(da) = ba.division_map() else { return Ok(()) };
        for f in all_maps(a.len(), c.len()) {
            if !is_equivariant(&f, &a, &c) {
                continue;
            }
            for (x1, x2, g) in da.defined_pairs() {
                prop_assert_eq!(d.get(f[x1], f[x2]), Some(g));
            }
        }
    }

    #[test]
    fn principal_to_pre_principal_is_bijective((a, c) in select(action_pairs().clone()), collapse in any::<bool>()) {
        let (ba, bc) = (bundle(&a, collapse), bundle(&c, collapse));
        if !(ba.is_principal() && bc.is_pre_principal()) {
            return Ok(());
        }
        for f in all_maps(a.len(), c.len()) {
            if is_bundle_morphism(&f, &ba, &bc) {
                prop_assert!(is_bijection(&f, c.len()));
            }
        }
    }

    #[test]
    fn surjections_compose_and_cancel(
        f in prop::collection::vec(0..4usize, 0..6),
        g in prop::collection::vec(0..3usize, 4),
    ) {
        let gf: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        if is_surjection(&f, 4) && is_surjection(&g, 3) {
            prop_assert!(is_surjection(&gf, 3));
        }
        if is_surjection(&gf, 3) {
            prop_assert!(is_surjection(&g, 3));
        }
        prop_assert_eq!(is_injection(&f) && is_surjection(&f, 4), is_bijection(&f, 4));
    }

    #[test]
    fn opposite_is_an_involution(b in select(bibundles().clone())) {
        let op = b.opposite();
        prop_assert_eq!(&op.opposite(), &b);
        prop_assert_eq!(is_biprincipal(&op), is_biprincipal(&b));
        prop_assert_eq!(op.left_bundle().is_principal(), b.right_bundle().is_principal());
    }

    #[test]
    fn biprincipal_is_closed_under_composition((x, y) in select(biprincipal_pairs().clone())) {
        let c = compose_bibundles(&x, &y).unwrap();
        prop_assert!(is_biprincipal(&c.bibundle));
    }

    #[test]
    fn biprincipal_survives_relabelling(b in select(biprincipal().clone()), shift in 0..4usize) {
        let n = b.len();
        prop_assume!(n > 0);
        let perm: Vec<usize> = (0..n).map(|x| (x + shift) % n).collect();
        let mut inv = vec![0; n];
        for (x, &p) in perm.iter().enumerate() {
            inv[p] = x;
        }
        let (l, r) = (b.left(), b.right());
        let moved = Bibundle::from_fns(
            b.left_groupoid(),
            b.right_groupoid(),
            (0..n).map(|i| b.label(inv[i]).to_string()).collect(),
            (0..n).map(|i| b.l(inv[i])).collect(),
            (0..n).map(|i| b.r(inv[i])).collect(),
            |g, x| perm[l.apply(g, inv[x]).unwrap()],
            |h, x| perm[r.apply(h, inv[x]).unwrap()],
        ).unwrap();
        prop_assert!(is_biprincipal(&moved));
    }

    #[test]
    fn unitors_are_bijections(b in select(bibundles().clone())) {
        for w in [left_unitor(&b).unwrap(), right_unitor(&b).unwrap()] {
            let n = w.composite.bibundle.len();
            prop_assert!(is_bijection(&w.forward, b.len()));
            prop_assert!(w.forward.iter().enumerate().all(|(c, &x)| w.backward[x] == c));
            prop_assert_eq!(w.backward.len(), b.len());
            prop_assert_eq!(n, b.len());
        }
    }

    #[test]
    fn associator_is_a_bijection((x, y, z) in select(triples().clone())) {
        let a = associator(&x, &y, &z).unwrap();
        let n = a.right_nested.bibundle.len();
        prop_assert!(is_bijection(&a.forward, n));
        prop_assert!(a.forward.iter().enumerate().all(|(c, &d)| a.backward[d] == c));
    }
}

#[test]
fn pools_are_populated() {
    assert!(actions().len() > 50);
    assert!(bibundles().len() > 100);
    assert!(biprincipal().len() > groupoids().len());
    assert!(!triples().is_empty() && !biprincipal_pairs().is_empty());
    let principal = action_pairs()
        .iter()
        .filter(|(a, c)| bundle(a, true).is_principal() && bundle(c, true).is_pre_principal() && a.len() > 1)
        .count();
    assert!(principal > 0);
    let mut free = 0;
    let _ = for_each_action(
        &groupoids()[4],
        Side::Left,
        2,
        SearchOptions { free_only: true, ..Default::default() },
        &mut |_| {
            free += 1;
            ControlFlow::Continue(())
        },
    );
    assert_eq!(free, 1);
}
