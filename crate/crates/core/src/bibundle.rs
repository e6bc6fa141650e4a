//! Bibundles: commuting left and right actions on one carrier.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{check_action, is_bijection, is_equivariant, resolve_action, Action, ActionData, RawAction, Side};
use crate::bundle::Bundle;
use crate::error::{BibundleLaw, ValidationReport, Violation};
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjId};

/// Identifier-level bibundle payload. `left_act` triples are
/// `[arrow, point, result]`, `right_act` triples `[point, arrow, result]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibundleData {
    pub carrier: Vec<String>,
    pub left_moment: BTreeMap<String, String>,
    pub right_moment: BTreeMap<String, String>,
    pub left_act: Vec<[String; 3]>,
    pub right_act: Vec<[String; 3]>,
}

/// Index-level bibundle tables that have not been checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBibundle {
    pub left_groupoid: Arc<FiniteGroupoid>,
    pub right_groupoid: Arc<FiniteGroupoid>,
    pub left: RawAction,
    pub right: RawAction,
}

/// A `(G, H)`-bibundle `G ⟲ X ⟳ H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bibundle {
    left: Action,
    right: Action,
}

/// The four principality flags. Left flags describe `G ⟲ X → H₀` (projection
/// `r`), right flags describe `G₀ ← X ⟳ H` (projection `l`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Principality {
    pub left_subductive: bool,
    pub right_subductive: bool,
    pub left_pre_principal: bool,
    pub right_pre_principal: bool,
}

impl Principality {
    pub fn left_principal(&self) -> bool {
        self.left_subductive && self.left_pre_principal
    }

    pub fn right_principal(&self) -> bool {
        self.right_subductive && self.right_pre_principal
    }

    pub fn biprincipal(&self) -> bool {
        self.left_principal() && self.right_principal()
    }

    pub fn swapped(self) -> Principality {
        Principality {
            left_subductive: self.right_subductive,
            right_subductive: self.left_subductive,
            left_pre_principal: self.right_pre_principal,
            right_pre_principal: self.left_pre_principal,
        }
    }
}

/// Runs every check on raw tables; the report is empty exactly when
/// [`Bibundle::from_raw`] succeeds.
pub fn check_bibundle(raw: &RawBibundle) -> ValidationReport {
    let mut report = ValidationReport::default();
    if raw.left.side != Side::Left || raw.right.side != Side::Right || raw.left.labels != raw.right.labels {
        report.push(Violation::Bibundle { law: BibundleLaw::Shape, witness: vec![] });
        return report;
    }
    let (lr, lt) = check_action(&raw.left_groupoid, &raw.left);
    let (rr, rt) = check_action(&raw.right_groupoid, &raw.right);
    report.violations.extend(lr.violations);
    report.violations.extend(rr.violations);
    let (Some(lt), Some(rt)) = (lt, rt) else { return report };
    let (ga, ha) = (raw.left_groupoid.num_arrows(), raw.right_groupoid.num_arrows());
    let defined = |v: usize| (v != usize::MAX).then_some(v);
    let gact = |g: ArrowId, x: usize| defined(lt[x * ga + g.0]);
    let hact = |h: ArrowId, x: usize| defined(rt[x * ha + h.0]);
    let pl = |x: usize| raw.left.labels[x].clone();
    let gl = |g: ArrowId| raw.left_groupoid.arrow_label(g).to_string();
    let hl = |h: ArrowId| raw.right_groupoid.arrow_label(h).to_string();
    let (l, r) = (&raw.left.moment, &raw.right.moment);
    let n = raw.left.labels.len();
    for x in 0..n {
        for &h in raw.right_groupoid.arrows_into(r[x]) {
            if let Some(xh) = hact(h, x) {
                if l[xh] != l[x] {
                    report.push(Violation::Bibundle {
                        law: BibundleLaw::LeftMomentInvariance,
                        witness: vec![pl(x), hl(h), pl(xh)],
                    });
                }
            }
        }
        for &g in raw.left_groupoid.arrows_from(l[x]) {
            if let Some(gx) = gact(g, x) {
                if r[gx] != r[x] {
                    report.push(Violation::Bibundle {
                        law: BibundleLaw::RightMomentInvariance,
                        witness: vec![gl(g), pl(x), pl(gx)],
                    });
                }
            }
        }
    }
    for x in 0..n {
        for &g in raw.left_groupoid.arrows_from(l[x]) {
            for &h in raw.right_groupoid.arrows_into(r[x]) {
                let a = gact(g, x).and_then(|gx| hact(h, gx));
                let b = hact(h, x).and_then(|xh| gact(g, xh));
                if a != b {
                    report.push(Violation::Bibundle {
                        law: BibundleLaw::Commutation,
                        witness: vec![gl(g), pl(x), hl(h)],
                    });
                }
            }
        }
    }
    report
}

pub fn validate_bibundle(
    left_groupoid: &Arc<FiniteGroupoid>,
    right_groupoid: &Arc<FiniteGroupoid>,
    data: &BibundleData,
) -> Result<Bibundle, ValidationReport> {
    let left = ActionData {
        side: Side::Left,
        carrier: data.carrier.clone(),
        moment: data.left_moment.clone(),
        act: data.left_act.clone(),
    };
    let right = ActionData {
        side: Side::Right,
        carrier: data.carrier.clone(),
        moment: data.right_moment.clone(),
        act: data.right_act.clone(),
    };
    let l = resolve_action(left_groupoid, &left);
    let r = resolve_action(right_groupoid, &right);
    let (l, r) = match (l, r) {
        (Ok(l), Ok(r)) => (l, r),
        (l, r) => {
            let mut report = ValidationReport::default();
            for e in [l.err(), r.err()].into_iter().flatten() {
                report.violations.extend(e.violations);
            }
            return Err(report);
        }
    };
    Bibundle::from_raw(RawBibundle {
        left_groupoid: left_groupoid.clone(),
        right_groupoid: right_groupoid.clone(),
        left: l,
        right: r,
    })
}

impl Bibundle {
    pub fn from_raw(raw: RawBibundle) -> Result<Self, ValidationReport> {
        check_bibundle(&raw).into_result()?;
        let left = Action::from_raw(raw.left_groupoid, raw.left)?;
        let right = Action::from_raw(raw.right_groupoid, raw.right)?;
        Ok(Bibundle { left, right })
    }

    pub fn new(left: Action, right: Action) -> Result<Self, ValidationReport> {
        Bibundle::from_raw(RawBibundle {
            left_groupoid: left.groupoid().clone(),
            right_groupoid: right.groupoid().clone(),
            left: left.to_raw(),
            right: right.to_raw(),
        })
    }

    /// Tabulates both actions from closures and validates the result.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        left_groupoid: &Arc<FiniteGroupoid>,
        right_groupoid: &Arc<FiniteGroupoid>,
        labels: Vec<String>,
        left_moment: Vec<ObjId>,
        right_moment: Vec<ObjId>,
        left_act: impl Fn(ArrowId, usize) -> usize,
        right_act: impl Fn(ArrowId, usize) -> usize,
    ) -> Result<Self, ValidationReport> {
        let l = Action::from_fn(left_groupoid.clone(), Side::Left, labels.clone(), left_moment, left_act)?;
        let r = Action::from_fn(right_groupoid.clone(), Side::Right, labels, right_moment, right_act)?;
        Bibundle::new(l, r)
    }

    pub fn to_raw(&self) -> RawBibundle {
        RawBibundle {
            left_groupoid: self.left.groupoid().clone(),
            right_groupoid: self.right.groupoid().clone(),
            left: self.left.to_raw(),
            right: self.right.to_raw(),
        }
    }

    pub fn to_data(&self) -> BibundleData {
        let (l, r) = (self.left.to_data(), self.right.to_data());
        BibundleData {
            carrier: l.carrier,
            left_moment: l.moment,
            right_moment: r.moment,
            left_act: l.act,
            right_act: r.act,
        }
    }

    pub fn left_groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.left.groupoid()
    }

    pub fn right_groupoid(&self) -> &Arc<FiniteGroupoid> {
        self.right.groupoid()
    }

    pub fn left(&self) -> &Action {
        &self.left
    }

    pub fn right(&self) -> &Action {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        self.left.points()
    }

    pub fn labels(&self) -> &[String] {
        self.left.labels()
    }

    pub fn label(&self, x: usize) -> &str {
        self.left.label(x)
    }

    /// Left moment `l(x)`.
    pub fn l(&self, x: usize) -> ObjId {
        self.left.moment(x)
    }

    /// Right moment `r(x)`.
    pub fn r(&self, x: usize) -> ObjId {
        self.right.moment(x)
    }

    /// `g·x`.
    pub fn act_left(&self, g: ArrowId, x: usize) -> Option<usize> {
        self.left.apply(g, x)
    }

    /// `x·h`.
    pub fn act_right(&self, x: usize, h: ArrowId) -> Option<usize> {
        self.right.apply(h, x)
    }

    /// `G ⟲ X → H₀` with projection `r`.
    pub fn left_bundle(&self) -> Bundle {
        let h = self.right_groupoid();
        let base = h.objects().map(|o| h.object_label(o).to_string()).collect();
        let proj = self.points().map(|x| self.r(x).0).collect();
        Bundle::new(self.left.clone(), base, proj).expect("r is G-invariant")
    }

    /// `G₀ ← X ⟳ H` with projection `l`.
    pub fn right_bundle(&self) -> Bundle {
        let g = self.left_groupoid();
        let base = g.objects().map(|o| g.object_label(o).to_string()).collect();
        let proj = self.points().map(|x| self.l(x).0).collect();
        Bundle::new(self.right.clone(), base, proj).expect("l is H-invariant")
    }

    pub fn principality(&self) -> Principality {
        let (lb, rb) = (self.left_bundle(), self.right_bundle());
        Principality {
            left_subductive: lb.is_subductive(),
            right_subductive: rb.is_subductive(),
            left_pre_principal: lb.is_pre_principal(),
            right_pre_principal: rb.is_pre_principal(),
        }
    }

    /// The `(H, G)`-bibundle on the same carrier with `h·x = x·h⁻¹` and
    /// `x·g = g⁻¹·x`.
    pub fn opposite(&self) -> Bibundle {
        let (g, h) = (self.left_groupoid().clone(), self.right_groupoid().clone());
        let labels = self.labels().to_vec();
        let left = Action::from_fn(h.clone(), Side::Left, labels.clone(), self.right.moments().to_vec(), |a, x| {
            self.act_right(x, h.inv(a)).unwrap()
        })
        .expect("opposite of a right action");
        let right = Action::from_fn(g.clone(), Side::Right, labels, self.left.moments().to_vec(), |a, x| {
            self.act_left(g.inv(a), x).unwrap()
        })
        .expect("opposite of a left action");
        Bibundle { left, right }
    }

    /// Same bibundle with new point labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Bibundle {
        Bibundle { left: self.left.relabeled(labels.clone()), right: self.right.relabeled(labels) }
    }
}

/// `G ⟲ G ⟳ G` by composition, with `l = tgt` and `r = src`.
pub fn identity_bibundle(groupoid: &Arc<FiniteGroupoid>) -> Bibundle {
    Bibundle { left: Action::on_arrows(groupoid, Side::Left), right: Action::on_arrows(groupoid, Side::Right) }
}

pub fn opposite_bibundle(b: &Bibundle) -> Bibundle {
    b.opposite()
}

pub fn bibundle_principality(b: &Bibundle) -> Principality {
    b.principality()
}

/// Bijective and equivariant for both actions between bibundles over the same
/// pair of groupoids.
pub fn is_biequivariant_iso(map: &[usize], source: &Bibundle, target: &Bibundle) -> bool {
    is_bijection(map, target.len())
        && is_equivariant(map, &source.left, &target.left)
        && is_equivariant(map, &source.right, &target.right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_as_groupoid, pair_groupoid, unit_groupoid, GroupTable};

    fn z2() -> Arc<FiniteGroupoid> {
        Arc::new(group_as_groupoid(&GroupTable::cyclic(2)))
    }

    #[test]
    fn identity_bibundles() {
        let b = identity_bibundle(&z2());
        assert!(check_bibundle(&b.to_raw()).is_ok());
        assert!(b.principality().biprincipal());
        assert_eq!(identity_bibundle(&Arc::new(unit_groupoid(3))).len(), 3);
        let p = identity_bibundle(&Arc::new(pair_groupoid(2)));
        assert_eq!(p.len(), 4);
        assert!(p.left_bundle().is_pre_principal());
    }

    #[test]
    fn broken_right_moment_invariance() {
        // G = pair_groupoid(2) acting on 2 points, H = Z/2 swapping them.
        let g = Arc::new(pair_groupoid(2));
        let h = z2();
        let raw = RawBibundle {
            left_groupoid: g.clone(),
            right_groupoid: h.clone(),
            left: Action::from_fn(
                g.clone(),
                Side::Left,
                vec!["a".into(), "b".into()],
                vec![ObjId(0), ObjId(1)],
                |a, _| g.tgt(a).0,
            )
            .unwrap()
            .to_raw(),
            right: Action::from_fn(h.clone(), Side::Right, vec!["a".into(), "b".into()], vec![ObjId(0); 2], |a, x| {
                if h.is_unit(a) {
                    x
                } else {
                    1 - x
                }
            })
            .unwrap()
            .to_raw(),
        };
        let report = check_bibundle(&raw);
        assert!(report.has_bibundle(BibundleLaw::LeftMomentInvariance));
    }

    #[test]
    fn broken_commutation() {
        // Left swaps 0↔1 and 2↔3; right swaps 0↔2 and fixes the rest.
        let g = z2();
        let labels: Vec<String> = (0..4).map(|i| i.to_string()).collect();
        let left = Action::from_fn(g.clone(), Side::Left, labels.clone(), vec![ObjId(0); 4], |a, x| {
            if g.is_unit(a) {
                x
            } else {
                x ^ 1
            }
        })
        .unwrap();
        let right = Action::from_fn(g.clone(), Side::Right, labels, vec![ObjId(0); 4], |a, x| {
            if g.is_unit(a) {
                x
            } else {
                [2, 1, 0, 3][x]
            }
        })
        .unwrap();
        let report = check_bibundle(&RawBibundle {
            left_groupoid: g.clone(),
            right_groupoid: g.clone(),
            left: left.to_raw(),
            right: right.to_raw(),
        });
        assert!(report.has_bibundle(BibundleLaw::Commutation));
    }

    #[test]
    fn opposite_is_an_involution() {
        for g in [z2(), Arc::new(pair_groupoid(2)), Arc::new(group_as_groupoid(&GroupTable::cyclic(3)))] {
            let b = identity_bibundle(&g);
            let op = b.opposite();
            assert!(op.principality().biprincipal());
            assert_eq!(op.opposite(), b);
        }
    }

    #[test]
    fn opposite_swaps_flags() {
        // pair_groupoid(2) acting on a single fibre over a point, right action
        // of the unit groupoid on 1 object; left principal but right
        // pre-principality fails because two points share the H-fibre.
        let g = Arc::new(pair_groupoid(2));
        let u = Arc::new(unit_groupoid(1));
        let b = Bibundle::from_fns(
            &g,
            &u,
            vec!["0".into(), "1".into()],
            vec![ObjId(0), ObjId(1)],
            vec![ObjId(0); 2],
            |a, _| g.tgt(a).0,
            |_, x| x,
        )
        .unwrap();
        let flags = b.principality();
        assert_eq!(b.opposite().principality(), flags.swapped());
    }

    #[test]
    fn biequivariant_iso_cases() {
        let b = identity_bibundle(&Arc::new(pair_groupoid(2)));
        let id: Vec<usize> = b.points().collect();
        assert!(is_biequivariant_iso(&id, &b, &b));
        let mut scrambled = id.clone();
        scrambled.swap(0, 1);
        assert!(!is_biequivariant_iso(&scrambled, &b, &b));
    }

    #[test]
    fn data_round_trip() {
        let g = Arc::new(pair_groupoid(2));
        let b = identity_bibundle(&g);
        assert_eq!(validate_bibundle(&g, &g, &b.to_data()).unwrap(), b);
    }
}
