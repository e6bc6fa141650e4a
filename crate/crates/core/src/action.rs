//! Groupoid actions along moment maps, equivariant maps and orbit spaces.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ActionCondition, CalculusError, ValidationReport, Violation};
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjId};
use crate::partition::OrbitPartition;

const UNDEFINED: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Unvalidated action tables at index level.
///
/// Entries are `(g, x, result)` for both sides; for a right action the triple
/// means `x·g = result`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawAction {
    pub side: Side,
    pub labels: Vec<String>,
    pub moment: Vec<ObjId>,
    pub entries: Vec<(ArrowId, usize, usize)>,
}

/// Unvalidated action keyed by identifier strings. `act` holds
/// `[arrow, point, result]` for left actions and `[point, arrow, result]` for
/// right actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionData {
    pub side: Side,
    pub carrier: Vec<String>,
    pub moment: BTreeMap<String, String>,
    pub act: Vec<[String; 3]>,
}

/// A validated action of a finite groupoid on a finite carrier `{0..n}`.
///
/// A left action `g·x` is defined when `src(g) = moment(x)`; a right action
/// `x·g` when `tgt(g) = moment(x)`. Most of the code treats both uniformly
/// through [`Action::anchor`], [`Action::landing`] and [`Action::then`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    groupoid: Arc<FiniteGroupoid>,
    side: Side,
    labels: Vec<String>,
    moment: Vec<ObjId>,
    /// `table[x * arrows + g]`.
    table: Vec<usize>,
}

pub fn validate_action(groupoid: &Arc<FiniteGroupoid>, data: &ActionData) -> Result<Action, ValidationReport> {
    let raw = resolve_action(groupoid, data)?;
    Action::from_raw(groupoid.clone(), raw)
}

pub(crate) fn resolve_action(groupoid: &FiniteGroupoid, data: &ActionData) -> Result<RawAction, ValidationReport> {
    let mut report = ValidationReport::default();
    let mut point_index = HashMap::new();
    for (i, p) in data.carrier.iter().enumerate() {
        if point_index.insert(p.as_str(), i).is_some() {
            report.push(Violation::DuplicateIdentifier { field: "carrier".into(), id: p.clone() });
        }
    }
    let mut moment = vec![None; data.carrier.len()];
    for (p, o) in &data.moment {
        let point = point_index.get(p.as_str()).copied();
        let obj = groupoid.object_by_label(o);
        if point.is_none() {
            report.push(Violation::DanglingIdentifier { field: "moment".into(), id: p.clone() });
        }
        if obj.is_none() {
            report.push(Violation::DanglingIdentifier { field: "moment".into(), id: o.clone() });
        }
        if let (Some(p), Some(o)) = (point, obj) {
            moment[p] = Some(o);
        }
    }
    for (p, m) in moment.iter().enumerate() {
        if m.is_none() {
            report.push(Violation::MissingEntry { field: "moment".into(), id: data.carrier[p].clone() });
        }
    }
    let mut entries = Vec::with_capacity(data.act.len());
    for triple in &data.act {
        let (arrow, point, result) = match data.side {
            Side::Left => (&triple[0], &triple[1], &triple[2]),
            Side::Right => (&triple[1], &triple[0], &triple[2]),
        };
        let g = groupoid.arrow_by_label(arrow);
        let x = point_index.get(point.as_str()).copied();
        let y = point_index.get(result.as_str()).copied();
        for (found, id) in [(g.is_some(), arrow), (x.is_some(), point), (y.is_some(), result)] {
            if !found {
                report.push(Violation::DanglingIdentifier { field: "act".into(), id: id.clone() });
            }
        }
        if let (Some(g), Some(x), Some(y)) = (g, x, y) {
            entries.push((g, x, y));
        }
    }
    report.clone().into_result()?;
    Ok(RawAction {
        side: data.side,
        labels: data.carrier.clone(),
        moment: moment.into_iter().map(Option::unwrap).collect(),
        entries,
    })
}

/// Checks the action conditions on index-level tables and returns the
/// violations together with the dense table when it could be built.
pub(crate) fn check_action(groupoid: &FiniteGroupoid, raw: &RawAction) -> (ValidationReport, Option<Vec<usize>>) {
    let mut report = ValidationReport::default();
    let n = raw.labels.len();
    let arrows = groupoid.num_arrows();
    if raw.moment.len() != n {
        report.push(Violation::MissingEntry {
            field: "moment".into(),
            id: format!("{} of {n} points", raw.moment.len()),
        });
        return (report, None);
    }
    for (x, m) in raw.moment.iter().enumerate() {
        if m.0 >= groupoid.num_objects() {
            report.push(Violation::DanglingIdentifier {
                field: "moment".into(),
                id: format!("{}→#{}", raw.labels[x], m.0),
            });
        }
    }
    for &(g, x, y) in &raw.entries {
        if g.0 >= arrows || x >= n || y >= n {
            report.push(Violation::DanglingIdentifier { field: "act".into(), id: format!("(#{}, #{x}, #{y})", g.0) });
        }
    }
    if !report.is_ok() {
        return (report, None);
    }
    let pl = |x: usize| raw.labels[x].clone();
    let al = |g: ArrowId| groupoid.arrow_label(g).to_string();
    let anchor = |g: ArrowId| match raw.side {
        Side::Left => groupoid.src(g),
        Side::Right => groupoid.tgt(g),
    };
    let landing = |g: ArrowId| match raw.side {
        Side::Left => groupoid.tgt(g),
        Side::Right => groupoid.src(g),
    };
    let mut table = vec![UNDEFINED; n * arrows];
    for &(g, x, y) in &raw.entries {
        if anchor(g) != raw.moment[x] {
            report.push(Violation::DomainMismatch { witness: vec![al(g), pl(x), pl(y)] });
            continue;
        }
        let slot = &mut table[x * arrows + g.0];
        if *slot != UNDEFINED && *slot != y {
            report.push(Violation::Action {
                condition: ActionCondition::Totality,
                witness: vec![al(g), pl(x), pl(*slot), pl(y)],
            });
        }
        *slot = y;
    }
    for x in 0..n {
        for &g in arrows_anchored(groupoid, raw.side, raw.moment[x]) {
            if table[x * arrows + g.0] == UNDEFINED {
                report.push(Violation::Action { condition: ActionCondition::Totality, witness: vec![al(g), pl(x)] });
            }
        }
    }
    for x in 0..n {
        for &g in arrows_anchored(groupoid, raw.side, raw.moment[x]) {
            let y = table[x * arrows + g.0];
            if y == UNDEFINED {
                continue;
            }
            if raw.moment[y] != landing(g) {
                report
                    .push(Violation::Action { condition: ActionCondition::Moment, witness: vec![al(g), pl(x), pl(y)] });
            }
        }
        let u = groupoid.unit(raw.moment[x]);
        let ux = table[x * arrows + u.0];
        if ux != UNDEFINED && ux != x {
            report.push(Violation::Action { condition: ActionCondition::Unit, witness: vec![al(u), pl(x), pl(ux)] });
        }
    }
    for x in 0..n {
        for &g in arrows_anchored(groupoid, raw.side, raw.moment[x]) {
            let y = table[x * arrows + g.0];
            if y == UNDEFINED {
                continue;
            }
            for &h in arrows_anchored(groupoid, raw.side, raw.moment[y]) {
                let hy = table[y * arrows + h.0];
                let Some(hg) = then_arrow(groupoid, raw.side, g, h) else { continue };
                let hgx = table[x * arrows + hg.0];
                if hy != UNDEFINED && hgx != UNDEFINED && hy != hgx {
                    report.push(Violation::Action {
                        condition: ActionCondition::Composition,
                        witness: vec![al(g), al(h), pl(x), pl(hy), pl(hgx)],
                    });
                }
            }
        }
    }
    (report, Some(table))
}

fn arrows_anchored(groupoid: &FiniteGroupoid, side: Side, x: ObjId) -> &[ArrowId] {
    match side {
        Side::Left => groupoid.arrows_from(x),
        Side::Right => groupoid.arrows_into(x),
    }
}

fn then_arrow(groupoid: &FiniteGroupoid, side: Side, first: ArrowId, second: ArrowId) -> Option<ArrowId> {
    match side {
        Side::Left => groupoid.compose(second, first),
        Side::Right => groupoid.compose(first, second),
    }
}

impl Action {
    pub fn from_raw(groupoid: Arc<FiniteGroupoid>, raw: RawAction) -> Result<Self, ValidationReport> {
        let (report, table) = check_action(&groupoid, &raw);
        report.into_result()?;
        Ok(Action {
            groupoid,
            side: raw.side,
            labels: raw.labels,
            moment: raw.moment,
            table: table.expect("table exists when the report is clean"),
        })
    }

    /// Tabulates `f(g, x)` over every allowed pair and validates the result.
    pub fn from_fn(
        groupoid: Arc<FiniteGroupoid>,
        side: Side,
        labels: Vec<String>,
        moment: Vec<ObjId>,
        f: impl Fn(ArrowId, usize) -> usize,
    ) -> Result<Self, ValidationReport> {
        let mut entries = Vec::new();
        for (x, &m) in moment.iter().enumerate() {
            for &g in arrows_anchored(&groupoid, side, m) {
                entries.push((g, x, f(g, x)));
            }
        }
        Action::from_raw(groupoid, RawAction { side, labels, moment, entries })
    }

    /// The groupoid acting on its own arrows by composition: on the left along
    /// `tgt`, on the right along `src`.
    pub fn on_arrows(groupoid: &Arc<FiniteGroupoid>, side: Side) -> Self {
        let g = groupoid.clone();
        let labels = g.arrows().map(|a| g.arrow_label(a).to_string()).collect();
        let moment = g
            .arrows()
            .map(|a| match side {
                Side::Left => g.tgt(a),
                Side::Right => g.src(a),
            })
            .collect();
        Action::from_fn(groupoid.clone(), side, labels, moment, |a, x| {
            let x = ArrowId(x);
            let r = match side {
                Side::Left => g.compose(a, x),
                Side::Right => g.compose(x, a),
            };
            r.expect("composable by construction").0
        })
        .expect("composition is an action")
    }

    /// Only units act, each trivially. Needs every moment to have trivial
    /// isotropy beyond the unit for the result to be an action, so it is meant
    /// for unit groupoids.
    pub fn trivial(
        groupoid: &Arc<FiniteGroupoid>,
        side: Side,
        labels: Vec<String>,
        moment: Vec<ObjId>,
    ) -> Result<Self, ValidationReport> {
        Action::from_fn(groupoid.clone(), side, labels, moment, |_, x| x)
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn point_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn moment(&self, x: usize) -> ObjId {
        self.moment[x]
    }

    pub fn moments(&self) -> &[ObjId] {
        &self.moment
    }

    /// Object an arrow must start from (left) or end at (right) to act.
    pub fn anchor(&self, g: ArrowId) -> ObjId {
        match self.side {
            Side::Left => self.groupoid.src(g),
            Side::Right => self.groupoid.tgt(g),
        }
    }

    /// Moment of the result of acting by `g`.
    pub fn landing(&self, g: ArrowId) -> ObjId {
        match self.side {
            Side::Left => self.groupoid.tgt(g),
            Side::Right => self.groupoid.src(g),
        }
    }

    /// Arrows that may act on a point with moment `x`.
    pub fn arrows_at(&self, x: ObjId) -> &[ArrowId] {
        arrows_anchored(&self.groupoid, self.side, x)
    }

    /// The single arrow that acts like `first` followed by `second`.
    pub fn then(&self, first: ArrowId, second: ArrowId) -> Option<ArrowId> {
        then_arrow(&self.groupoid, self.side, first, second)
    }

    /// `g·x` (left) or `x·g` (right), when defined.
    pub fn apply(&self, g: ArrowId, x: usize) -> Option<usize> {
        let v = *self.table.get(x * self.groupoid.num_arrows() + g.0)?;
        (v != UNDEFINED).then_some(v)
    }

    /// Like [`Action::apply`], reporting an undefined pair as an error.
    pub fn act(&self, g: ArrowId, x: usize) -> Result<usize, CalculusError> {
        self.apply(g, x).ok_or_else(|| {
            CalculusError::DomainMismatch(format!(
                "{} cannot act on {}",
                self.groupoid.arrow_label(g),
                self.labels.get(x).map(String::as_str).unwrap_or("?")
            ))
        })
    }

    /// All defined `(g, x, result)` triples, grouped by point.
    pub fn entries(&self) -> impl Iterator<Item = (ArrowId, usize, usize)> + '_ {
        self.points()
            .flat_map(move |x| self.arrows_at(self.moment[x]).iter().map(move |&g| (g, x, self.apply(g, x).unwrap())))
    }

    pub fn to_raw(&self) -> RawAction {
        RawAction {
            side: self.side,
            labels: self.labels.clone(),
            moment: self.moment.clone(),
            entries: self.entries().collect(),
        }
    }

    pub fn to_data(&self) -> ActionData {
        let g = &self.groupoid;
        ActionData {
            side: self.side,
            carrier: self.labels.clone(),
            moment: self
                .points()
                .map(|x| (self.labels[x].clone(), g.object_label(self.moment[x]).to_string()))
                .collect(),
            act: self
                .entries()
                .map(|(a, x, y)| {
                    let (a, x, y) = (g.arrow_label(a).to_string(), self.labels[x].clone(), self.labels[y].clone());
                    match self.side {
                        Side::Left => [a, x, y],
                        Side::Right => [x, a, y],
                    }
                })
                .collect(),
        }
    }

    /// Orbits of the carrier.
    pub fn orbit_space(&self) -> OrbitPartition {
        OrbitPartition::from_pairs(self.len(), self.entries().map(|(_, x, y)| (x, y)))
    }

    /// Only units fix points.
    pub fn is_free(&self) -> bool {
        self.entries().all(|(g, x, y)| x != y || self.groupoid.is_unit(g))
    }

    pub(crate) fn relabeled(&self, labels: Vec<String>) -> Action {
        assert_eq!(labels.len(), self.len());
        Action { labels, ..self.clone() }
    }
}

/// Whether `map: X → Y` intertwines the moments and the actions.
pub fn is_equivariant(map: &[usize], source: &Action, target: &Action) -> bool {
    if source.side != target.side
        || source.groupoid != target.groupoid
        || map.len() != source.len()
        || map.iter().any(|&y| y >= target.len())
    {
        return false;
    }
    source.points().all(|x| source.moment(x) == target.moment(map[x]))
        && source.entries().all(|(g, x, gx)| target.apply(g, map[x]) == Some(map[gx]))
}

pub fn is_bijection(map: &[usize], codomain: usize) -> bool {
    if map.len() != codomain {
        return false;
    }
    let mut hit = vec![false; codomain];
    for &y in map {
        if y >= codomain || hit[y] {
            return false;
        }
        hit[y] = true;
    }
    true
}

pub fn is_surjection(map: &[usize], codomain: usize) -> bool {
    let mut hit = vec![false; codomain];
    for &y in map {
        if y >= codomain {
            return false;
        }
        hit[y] = true;
    }
    hit.into_iter().all(|h| h)
}

pub fn is_injection(map: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    map.iter().all(|y| seen.insert(*y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_as_groupoid, pair_groupoid, unit_groupoid, GroupTable};

    fn z2() -> Arc<FiniteGroupoid> {
        Arc::new(group_as_groupoid(&GroupTable::cyclic(2)))
    }

    #[test]
    fn self_action_validates() {
        let g = Arc::new(pair_groupoid(3));
        for side in [Side::Left, Side::Right] {
            let a = Action::on_arrows(&g, side);
            assert!(Action::from_raw(g.clone(), a.to_raw()).is_ok());
            assert!(validate_action(&g, &a.to_data()).is_ok());
        }
    }

    #[test]
    fn moment_violation_is_condition_one() {
        let g = Arc::new(pair_groupoid(2));
        let mut raw = Action::on_arrows(&g, Side::Left).to_raw();
        let (a, b) = (g.arrow_by_label("(0,1)").unwrap(), g.arrow_by_label("(1,1)").unwrap());
        let e = raw.entries.iter_mut().find(|e| e.0 == a && e.1 == b.0).unwrap();
        // (0,1)·(1,1) should be (0,1), whose moment is 0; send it to (1,1) instead.
        e.2 = b.0;
        let report = Action::from_raw(g, raw).unwrap_err();
        assert!(report.has_action(ActionCondition::Moment));
    }

    #[test]
    fn nontrivial_unit_is_condition_two() {
        let g = z2();
        let mut raw = Action::on_arrows(&g, Side::Left).to_raw();
        let e = raw.entries.iter_mut().find(|e| e.0 == ArrowId(0) && e.1 == 0).unwrap();
        e.2 = 1;
        let report = Action::from_raw(g, raw).unwrap_err();
        assert!(report.has_action(ActionCondition::Unit));
    }

    #[test]
    fn entry_on_wrong_anchor_is_domain_mismatch() {
        let g = Arc::new(unit_groupoid(2));
        let mut raw = Action::on_arrows(&g, Side::Left).to_raw();
        raw.entries.push((ArrowId(1), 0, 0));
        let report = Action::from_raw(g, raw).unwrap_err();
        assert!(report.has_domain_mismatch());
    }

    #[test]
    fn missing_entry_is_reported() {
        let g = z2();
        let mut raw = Action::on_arrows(&g, Side::Right).to_raw();
        raw.entries.pop();
        let report = Action::from_raw(g, raw).unwrap_err();
        assert!(report.has_action(ActionCondition::Totality));
    }

    #[test]
    fn orbit_spaces() {
        let g = z2();
        assert_eq!(Action::on_arrows(&g, Side::Left).orbit_space().num_classes(), 1);
        let u = Arc::new(unit_groupoid(1));
        let t = Action::trivial(&u, Side::Left, vec!["a".into(), "b".into(), "c".into()], vec![ObjId(0); 3]).unwrap();
        assert_eq!(t.orbit_space().num_classes(), 3);
        // pair_groupoid(2) on its arrows from the left: one orbit per source.
        let p = Arc::new(pair_groupoid(2));
        let left = Action::on_arrows(&p, Side::Left);
        let orbits = left.orbit_space();
        assert_eq!(orbits.num_classes(), 2);
        for class in orbits.classes() {
            let s = p.src(ArrowId(class[0]));
            assert!(class.iter().all(|&a| p.src(ArrowId(a)) == s));
        }
    }

    #[test]
    fn equivariance_cases() {
        let g = Arc::new(pair_groupoid(2));
        let a = Action::on_arrows(&g, Side::Left);
        let id: Vec<usize> = a.points().collect();
        assert!(is_equivariant(&id, &a, &a));
        // Collapsing everything onto one arrow breaks the moments.
        assert!(!is_equivariant(&vec![0; a.len()], &a, &a));
    }

    #[test]
    fn freeness() {
        assert!(Action::on_arrows(&z2(), Side::Left).is_free());
        let g = z2();
        let fixed = Action::from_fn(g, Side::Left, vec!["p".into()], vec![ObjId(0)], |_, x| x).unwrap();
        assert!(!fixed.is_free());
    }
}
