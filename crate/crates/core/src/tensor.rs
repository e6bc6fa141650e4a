//! Balanced tensor products, induced actions and bibundle composition.

use std::collections::HashMap;
use std::sync::Arc;

use crate::action::{Action, Side};
use crate::bibundle::Bibundle;
use crate::error::CalculusError;
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjId};
use crate::partition::OrbitPartition;

/// `X ⊗_H Y`: the fibred product `{(x, y) : r(x) = l(y)}` modulo
/// `(x, y) ~ (x·h, h⁻¹·y)`.
///
/// Pairs are listed in lexicographic order and classes are numbered by their
/// least pair, so the class representative is the lexicographically least
/// member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedTensor {
    pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    partition: OrbitPartition,
}

fn same_groupoid(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl BalancedTensor {
    /// `x` ranges over a right action and `y` over a left action of the same
    /// groupoid.
    pub fn new(x_side: &Action, y_side: &Action) -> Result<Self, CalculusError> {
        if x_side.side() != Side::Right || y_side.side() != Side::Left {
            return Err(CalculusError::GroupoidMismatch("tensor needs a right then a left action".into()));
        }
        if !same_groupoid(x_side.groupoid(), y_side.groupoid()) {
            return Err(CalculusError::GroupoidMismatch("middle groupoids differ".into()));
        }
        let h = x_side.groupoid();
        let mut pairs = Vec::new();
        for x in x_side.points() {
            for y in y_side.points() {
                if x_side.moment(x) == y_side.moment(y) {
                    pairs.push((x, y));
                }
            }
        }
        let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut links = Vec::new();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            for &a in h.arrows_into(x_side.moment(x)) {
                let xa = x_side.apply(a, x).expect("tgt(a) = r(x)");
                let ay = y_side.apply(h.inv(a), y).expect("src(a⁻¹) = l(y)");
                links.push((i, index[&(xa, ay)]));
            }
        }
        let partition = OrbitPartition::from_pairs(pairs.len(), links);
        Ok(BalancedTensor { pairs, index, partition })
    }

    pub fn num_classes(&self) -> usize {
        self.partition.num_classes()
    }

    pub fn classes(&self) -> std::ops::Range<usize> {
        0..self.num_classes()
    }

    /// The fibred product in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn partition(&self) -> &OrbitPartition {
        &self.partition
    }

    /// `x ⊗ y`, or `None` when `r(x) ≠ l(y)`.
    pub fn class_of(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).map(|&i| self.partition.class_of(i))
    }

    pub fn representative(&self, c: usize) -> (usize, usize) {
        self.pairs[self.partition.representative(c)]
    }

    pub fn members(&self, c: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.partition.class(c).iter().map(|&i| self.pairs[i])
    }

    /// Labels `(x⊗y)` built from the representatives.
    pub fn class_labels(&self, x_labels: &[String], y_labels: &[String]) -> Vec<String> {
        self.classes()
            .map(|c| {
                let (x, y) = self.representative(c);
                format!("({}⊗{})", x_labels[x], y_labels[y])
            })
            .collect()
    }

    /// Checks `x·h ⊗ y = x ⊗ h·y` on every defined triple.
    pub fn is_balanced(&self, x_side: &Action, y_side: &Action) -> bool {
        let h = x_side.groupoid();
        self.pairs.iter().all(|&(x, _)| {
            h.arrows_into(x_side.moment(x)).iter().all(|&a| {
                let xa = x_side.apply(a, x).unwrap();
                y_side
                    .points()
                    .filter(|&y| y_side.moment(y) == h.src(a))
                    .all(|y| self.class_of(xa, y) == self.class_of(x, y_side.apply(a, y).unwrap()))
            })
        })
    }

    /// `[x, y] ↦ [f(x), g(y)]` into another tensor, checked on every member of
    /// every class.
    pub fn map_into(
        &self,
        target: &BalancedTensor,
        f: impl Fn(usize) -> usize,
        g: impl Fn(usize) -> usize,
    ) -> Result<Vec<usize>, CalculusError> {
        self.classes()
            .map(|c| {
                let mut image = None;
                for (x, y) in self.members(c) {
                    let d = target.class_of(f(x), g(y)).ok_or_else(|| {
                        CalculusError::DomainMismatch(format!("image of ({x}, {y}) leaves the fibred product"))
                    })?;
                    match image {
                        None => image = Some(d),
                        Some(e) if e != d => {
                            return Err(CalculusError::IllDefined(format!("class {c} maps to both {e} and {d}")))
                        }
                        _ => {}
                    }
                }
                Ok(image.expect("classes are nonempty"))
            })
            .collect()
    }

    /// Evaluates `f` on every member of every class and demands one answer
    /// per class.
    pub fn descend<T: PartialEq + Clone + std::fmt::Debug>(
        &self,
        f: impl Fn(usize, usize) -> T,
    ) -> Result<Vec<T>, CalculusError> {
        self.classes()
            .map(|c| {
                let mut it = self.members(c);
                let (x, y) = it.next().expect("classes are nonempty");
                let v = f(x, y);
                for (x2, y2) in it {
                    let w = f(x2, y2);
                    if w != v {
                        return Err(CalculusError::IllDefined(format!(
                            "class {c}: ({x}, {y}) gives {v:?} but ({x2}, {y2}) gives {w:?}"
                        )));
                    }
                }
                Ok(v)
            })
            .collect()
    }
}

/// Builds an action on the classes of a tensor from an action on pairs, checking
/// that moments and values do not depend on representatives.
fn induced(
    tensor: &BalancedTensor,
    groupoid: &Arc<FiniteGroupoid>,
    side: Side,
    labels: Vec<String>,
    moment: impl Fn(usize, usize) -> ObjId,
    act: impl Fn(ArrowId, usize, usize) -> (usize, usize),
) -> Result<Action, CalculusError> {
    let moments = tensor.descend(&moment)?;
    let mut table: HashMap<(ArrowId, usize), usize> = HashMap::new();
    for c in tensor.classes() {
        let arrows = match side {
            Side::Left => groupoid.arrows_from(moments[c]),
            Side::Right => groupoid.arrows_into(moments[c]),
        };
        for &a in arrows {
            let mut value = None;
            for (x, y) in tensor.members(c) {
                let (x2, y2) = act(a, x, y);
                let d = tensor.class_of(x2, y2).ok_or_else(|| {
                    CalculusError::IllDefined(format!("acting on ({x}, {y}) leaves the fibred product"))
                })?;
                match value {
                    None => value = Some(d),
                    Some(e) if e != d => {
                        return Err(CalculusError::IllDefined(format!(
                            "arrow {} sends class {c} to both {e} and {d}",
                            groupoid.arrow_label(a)
                        )))
                    }
                    _ => {}
                }
            }
            table.insert((a, c), value.expect("classes are nonempty"));
        }
    }
    Ok(Action::from_fn(groupoid.clone(), side, labels, moments, |a, c| table[&(a, c)])?)
}

/// `g·(x⊗y) = (g·x)⊗y` on `X ⊗_H Y` for a `(G, H)`-bibundle `X` and a left
/// `H`-action `Y`.
pub fn induced_left_action(b: &Bibundle, y: &Action) -> Result<(BalancedTensor, Action), CalculusError> {
    let tensor = BalancedTensor::new(b.right(), y)?;
    let labels = tensor.class_labels(b.labels(), y.labels());
    let action = induced(
        &tensor,
        b.left_groupoid(),
        Side::Left,
        labels,
        |x, _| b.l(x),
        |g, x, yy| (b.act_left(g, x).unwrap(), yy),
    )?;
    Ok((tensor, action))
}

/// `(x⊗y)·k = x⊗(y·k)` on `X ⊗_H Y` for a right `H`-action `X` and an
/// `(H, K)`-bibundle `Y`.
pub fn induced_right_action(x: &Action, b: &Bibundle) -> Result<(BalancedTensor, Action), CalculusError> {
    let tensor = BalancedTensor::new(x, b.left())?;
    let labels = tensor.class_labels(x.labels(), b.labels());
    let action = induced(
        &tensor,
        b.right_groupoid(),
        Side::Right,
        labels,
        |_, y| b.r(y),
        |k, xx, y| (xx, b.act_right(y, k).unwrap()),
    )?;
    Ok((tensor, action))
}

/// A composite bibundle together with the tensor it was built on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composite {
    pub bibundle: Bibundle,
    pub tensor: BalancedTensor,
}

/// `X ⊗_H Y` for a `(G, H)`-bibundle `X` and an `(H, K)`-bibundle `Y`.
pub fn compose_bibundles(first: &Bibundle, second: &Bibundle) -> Result<Composite, CalculusError> {
    if !same_groupoid(first.right_groupoid(), second.left_groupoid()) {
        return Err(CalculusError::GroupoidMismatch(
            "right groupoid of the first bibundle is not the left groupoid of the second".into(),
        ));
    }
    let (tensor, left) = induced_left_action(first, second.left())?;
    let right = induced(
        &tensor,
        second.right_groupoid(),
        Side::Right,
        left.labels().to_vec(),
        |_, y| second.r(y),
        |k, x, y| (x, second.act_right(y, k).unwrap()),
    )?;
    let bibundle = Bibundle::new(left, right)?;
    Ok(Composite { bibundle, tensor })
}
