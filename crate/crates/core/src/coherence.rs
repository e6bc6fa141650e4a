//! Unitors, the associator, and searching for biequivariant isomorphisms.

use std::collections::VecDeque;

use crate::bibundle::{identity_bibundle, is_biequivariant_iso, Bibundle};
use crate::error::CalculusError;
use crate::tensor::{compose_bibundles, Composite};

/// A biequivariant bijection from `composite` to `target` with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceWitness {
    pub composite: Composite,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

fn mutually_inverse(f: &[usize], g: &[usize]) -> bool {
    f.iter().enumerate().all(|(i, &j)| g.get(j) == Some(&i)) && g.iter().enumerate().all(|(j, &i)| f.get(i) == Some(&j))
}

fn finish(
    composite: Composite,
    target: &Bibundle,
    forward: Vec<usize>,
    backward: Vec<usize>,
) -> Result<CoherenceWitness, CalculusError> {
    if !is_biequivariant_iso(&forward, &composite.bibundle, target) {
        return Err(CalculusError::WitnessFailed("forward map is not a biequivariant bijection".into()));
    }
    if !mutually_inverse(&forward, &backward) {
        return Err(CalculusError::WitnessFailed("maps are not mutually inverse".into()));
    }
    Ok(CoherenceWitness { composite, forward, backward })
}

/// `G ⊗_G X → X`, `g⊗x ↦ g·x`, with inverse `x ↦ unit(l(x))⊗x`.
pub fn left_unitor(b: &Bibundle) -> Result<CoherenceWitness, CalculusError> {
    let id = identity_bibundle(b.left_groupoid());
    let composite = compose_bibundles(&id, b)?;
    let g = b.left_groupoid();
    let forward = composite.tensor.descend(|a, x| b.act_left(crate::ArrowId(a), x).unwrap())?;
    let backward =
        b.points().map(|x| composite.tensor.class_of(g.unit(b.l(x)).0, x).expect("units are composable")).collect();
    finish(composite, b, forward, backward)
}

/// `X ⊗_H H → X`, `x⊗h ↦ x·h`, with inverse `x ↦ x⊗unit(r(x))`.
pub fn right_unitor(b: &Bibundle) -> Result<CoherenceWitness, CalculusError> {
    let id = identity_bibundle(b.right_groupoid());
    let composite = compose_bibundles(b, &id)?;
    let h = b.right_groupoid();
    let forward = composite.tensor.descend(|x, a| b.act_right(x, crate::ArrowId(a)).unwrap())?;
    let backward =
        b.points().map(|x| composite.tensor.class_of(x, h.unit(b.r(x)).0).expect("units are composable")).collect();
    finish(composite, b, forward, backward)
}

/// `(X⊗Y)⊗Z → X⊗(Y⊗Z)` together with both iterated composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Associator {
    pub left_nested: Composite,
    pub right_nested: Composite,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

pub fn associator(x: &Bibundle, y: &Bibundle, z: &Bibundle) -> Result<Associator, CalculusError> {
    let xy = compose_bibundles(x, y)?;
    let yz = compose_bibundles(y, z)?;
    let left_nested = compose_bibundles(&xy.bibundle, z)?;
    let right_nested = compose_bibundles(x, &yz.bibundle)?;
    let through = |c: usize| -> Vec<(usize, usize, usize)> {
        left_nested
            .tensor
            .members(c)
            .flat_map(|(cxy, zz)| xy.tensor.members(cxy).map(move |(xx, yy)| (xx, yy, zz)))
            .collect()
    };
    let mut forward = Vec::with_capacity(left_nested.tensor.num_classes());
    for c in left_nested.tensor.classes() {
        let mut image = None;
        for (xx, yy, zz) in through(c) {
            let inner = yz.tensor.class_of(yy, zz).ok_or_else(|| CalculusError::DomainMismatch("y⊗z".into()))?;
            let d = right_nested
                .tensor
                .class_of(xx, inner)
                .ok_or_else(|| CalculusError::DomainMismatch("x⊗(y⊗z)".into()))?;
            if image.is_some_and(|e| e != d) {
                return Err(CalculusError::IllDefined(format!("associator on class {c}")));
            }
            image = Some(d);
        }
        forward.push(image.expect("classes are nonempty"));
    }
    let backward = right_nested.tensor.descend(|xx, cyz| {
        let (yy, zz) = yz.tensor.representative(cyz);
        let cxy = xy.tensor.class_of(xx, yy).unwrap();
        left_nested.tensor.class_of(cxy, zz).unwrap()
    });
    let backward = backward?;
    if !is_biequivariant_iso(&forward, &left_nested.bibundle, &right_nested.bibundle) {
        return Err(CalculusError::WitnessFailed("associator is not a biequivariant bijection".into()));
    }
    if !mutually_inverse(&forward, &backward) {
        return Err(CalculusError::WitnessFailed("associator maps are not mutually inverse".into()));
    }
    Ok(Associator { left_nested, right_nested, forward, backward })
}

/// Searches for a biequivariant bijection `source → target`, returning the
/// lexicographically least one.
pub fn find_biequivariant_iso(source: &Bibundle, target: &Bibundle) -> Option<Vec<usize>> {
    if source.len() != target.len()
        || source.left_groupoid() != target.left_groupoid()
        || source.right_groupoid() != target.right_groupoid()
    {
        return None;
    }
    let mut map = vec![usize::MAX; source.len()];
    let mut used = vec![false; target.len()];
    if extend(source, target, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(source: &Bibundle, target: &Bibundle, map: &mut [usize], used: &mut [bool]) -> bool {
    let Some(x) = map.iter().position(|&v| v == usize::MAX) else { return true };
    for y in target.points() {
        if used[y] || source.l(x) != target.l(y) || source.r(x) != target.r(y) {
            continue;
        }
        let mut assigned = Vec::new();
        if propagate(source, target, map, used, x, y, &mut assigned) && extend(source, target, map, used) {
            return true;
        }
        for p in assigned {
            used[map[p]] = false;
            map[p] = usize::MAX;
        }
    }
    false
}

/// Forces `x ↦ y` and everything it implies along both actions.
fn propagate(
    source: &Bibundle,
    target: &Bibundle,
    map: &mut [usize],
    used: &mut [bool],
    x: usize,
    y: usize,
    assigned: &mut Vec<usize>,
) -> bool {
    let mut queue = VecDeque::from([(x, y)]);
    while let Some((p, q)) = queue.pop_front() {
        if map[p] != usize::MAX {
            if map[p] != q {
                return false;
            }
            continue;
        }
        if used[q] || source.l(p) != target.l(q) || source.r(p) != target.r(q) {
            return false;
        }
        map[p] = q;
        used[q] = true;
        assigned.push(p);
        for &g in source.left().arrows_at(source.l(p)) {
            queue.push_back((source.act_left(g, p).unwrap(), target.act_left(g, q).unwrap()));
        }
        for &h in source.right().arrows_at(source.r(p)) {
            queue.push_back((source.act_right(p, h).unwrap(), target.act_right(q, h).unwrap()));
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_as_groupoid, pair_groupoid, GroupTable};
    use std::sync::Arc;

    #[test]
    fn unitors_of_identity_are_composition() {
        let g = Arc::new(pair_groupoid(2));
        let id = identity_bibundle(&g);
        let lu = left_unitor(&id).unwrap();
        for c in lu.composite.tensor.classes() {
            for (a, b) in lu.composite.tensor.members(c) {
                assert_eq!(Some(crate::ArrowId(lu.forward[c])), g.compose(crate::ArrowId(a), crate::ArrowId(b)));
            }
        }
        right_unitor(&id).unwrap();
    }

    #[test]
    fn associator_of_identities() {
        let g = Arc::new(group_as_groupoid(&GroupTable::cyclic(3)));
        let id = identity_bibundle(&g);
        let a = associator(&id, &id, &id).unwrap();
        assert_eq!(a.forward.len(), 3);
        for (i, &j) in a.forward.iter().enumerate() {
            assert_eq!(a.backward[j], i);
        }
    }

    #[test]
    fn finds_iso_from_composite_to_identity() {
        let g = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
        let id = identity_bibundle(&g);
        let c = compose_bibundles(&id, &id).unwrap();
        let m = find_biequivariant_iso(&c.bibundle, &id).unwrap();
        assert!(is_biequivariant_iso(&m, &c.bibundle, &id));
    }
}
