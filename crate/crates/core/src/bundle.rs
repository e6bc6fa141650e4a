//! Groupoid bundles, the action map, principality and division maps.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{is_equivariant, validate_action, Action, ActionData};
use crate::error::{CalculusError, ValidationReport, Violation};
use crate::groupoid::{ArrowId, FiniteGroupoid};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleData {
    pub action: ActionData,
    pub base: Vec<String>,
    pub proj: BTreeMap<String, String>,
}

/// An action together with an invariant projection onto a finite base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    action: Action,
    base: Vec<String>,
    proj: Vec<usize>,
}

impl Bundle {
    pub fn new(action: Action, base: Vec<String>, proj: Vec<usize>) -> Result<Self, ValidationReport> {
        let mut report = ValidationReport::default();
        if proj.len() != action.len() {
            report.push(Violation::MissingEntry {
                field: "proj".into(),
                id: format!("{} of {} points", proj.len(), action.len()),
            });
            return Err(report);
        }
        for (x, &b) in proj.iter().enumerate() {
            if b >= base.len() {
                report.push(Violation::DanglingIdentifier {
                    field: "proj".into(),
                    id: format!("{}→#{b}", action.label(x)),
                });
            }
        }
        report.clone().into_result()?;
        for (g, x, y) in action.entries() {
            if proj[x] != proj[y] {
                report.push(Violation::BundleInvariance {
                    witness: vec![
                        action.groupoid().arrow_label(g).to_string(),
                        action.label(x).to_string(),
                        action.label(y).to_string(),
                    ],
                });
            }
        }
        report.into_result()?;
        Ok(Bundle { action, base, proj })
    }

    /// The groupoid acting on its arrows over its objects; the projection is
    /// `src` for the left action and `tgt` for the right one.
    pub fn on_arrows(groupoid: &Arc<FiniteGroupoid>, side: crate::Side) -> Self {
        let action = Action::on_arrows(groupoid, side);
        let base = groupoid.objects().map(|o| groupoid.object_label(o).to_string()).collect();
        let proj = groupoid
            .arrows()
            .map(|a| match side {
                crate::Side::Left => groupoid.src(a).0,
                crate::Side::Right => groupoid.tgt(a).0,
            })
            .collect();
        Bundle::new(action, base, proj).expect("source and target are invariant")
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn base(&self) -> &[String] {
        &self.base
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn proj(&self, x: usize) -> usize {
        self.proj[x]
    }

    pub fn projection(&self) -> &[usize] {
        &self.proj
    }

    pub fn to_data(&self) -> BundleData {
        BundleData {
            action: self.action.to_data(),
            base: self.base.clone(),
            proj: self
                .action
                .points()
                .map(|x| (self.action.label(x).to_string(), self.base[self.proj[x]].clone()))
                .collect(),
        }
    }

    /// `(g, x) ↦ (g·x, x)` from composable pairs to same-fibre pairs.
    pub fn action_map(&self) -> ActionMap {
        let n = self.action.len();
        let codomain: Vec<(usize, usize)> = (0..n)
            .flat_map(|x1| (0..n).map(move |x2| (x1, x2)))
            .filter(|&(x1, x2)| self.proj[x1] == self.proj[x2])
            .collect();
        let index: HashMap<(usize, usize), usize> = codomain.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let domain: Vec<(ArrowId, usize)> = self.action.entries().map(|(g, x, _)| (g, x)).collect();
        let values = domain.iter().map(|&(g, x)| index[&(self.action.apply(g, x).unwrap(), x)]).collect();
        ActionMap { domain, codomain, values }
    }

    /// The action map is a bijection.
    pub fn is_pre_principal(&self) -> bool {
        let m = self.action_map();
        crate::action::is_bijection(&m.values, m.codomain.len())
    }

    /// The action is free and transitive on each fibre, checked directly.
    pub fn is_free_and_fibre_transitive(&self) -> bool {
        let a = &self.action;
        if !a.is_free() {
            return false;
        }
        a.points().all(|x1| {
            a.points()
                .filter(|&x2| self.proj[x1] == self.proj[x2])
                .all(|x2| a.arrows_at(a.moment(x2)).iter().any(|&g| a.apply(g, x2) == Some(x1)))
        })
    }

    /// The projection is onto.
    pub fn is_subductive(&self) -> bool {
        crate::action::is_surjection(&self.proj, self.base.len())
    }

    pub fn is_principal(&self) -> bool {
        self.is_subductive() && self.is_pre_principal()
    }

    pub fn division_map(&self) -> Result<DivisionMap, CalculusError> {
        if !self.is_pre_principal() {
            return Err(CalculusError::NotPrePrincipal);
        }
        let n = self.action.len();
        let mut table = vec![None; n * n];
        for (g, x2, x1) in self.action.entries() {
            table[x1 * n + x2] = Some(g);
        }
        Ok(DivisionMap { n, table })
    }
}

/// Equivariant and compatible with the projections onto a shared base.
pub fn is_bundle_morphism(map: &[usize], source: &Bundle, target: &Bundle) -> bool {
    source.base == target.base
        && is_equivariant(map, &source.action, &target.action)
        && source.action.points().all(|x| source.proj[x] == target.proj[map[x]])
}

pub fn validate_bundle(groupoid: &Arc<FiniteGroupoid>, data: &BundleData) -> Result<Bundle, ValidationReport> {
    let action = validate_action(groupoid, &data.action)?;
    let mut report = ValidationReport::default();
    let mut proj = vec![usize::MAX; action.len()];
    for (p, b) in &data.proj {
        let x = action.point_by_label(p);
        let base = data.base.iter().position(|l| l == b);
        match (x, base) {
            (Some(x), Some(b)) => proj[x] = b,
            _ => report.push(Violation::DanglingIdentifier { field: "proj".into(), id: format!("{p}→{b}") }),
        }
    }
    for (x, &b) in proj.iter().enumerate() {
        if b == usize::MAX {
            report.push(Violation::MissingEntry { field: "proj".into(), id: action.label(x).to_string() });
        }
    }
    report.into_result()?;
    Bundle::new(action, data.base.clone(), proj)
}

/// Explicit action map of a bundle. `values[i]` indexes `codomain` and is the
/// image of `domain[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMap {
    pub domain: Vec<(ArrowId, usize)>,
    pub codomain: Vec<(usize, usize)>,
    pub values: Vec<usize>,
}

/// `⟨x₁, x₂⟩`: the unique arrow carrying `x₂` to `x₁`, defined on pairs in a
/// common fibre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionMap {
    n: usize,
    table: Vec<Option<ArrowId>>,
}

impl DivisionMap {
    pub fn get(&self, x1: usize, x2: usize) -> Option<ArrowId> {
        if x1 >= self.n || x2 >= self.n {
            return None;
        }
        self.table[x1 * self.n + x2]
    }

    pub fn divide(&self, x1: usize, x2: usize) -> Result<ArrowId, CalculusError> {
        self.get(x1, x2).ok_or_else(|| CalculusError::DomainMismatch(format!("⟨#{x1}, #{x2}⟩ is undefined")))
    }

    pub fn defined_pairs(&self) -> impl Iterator<Item = (usize, usize, ArrowId)> + '_ {
        (0..self.n).flat_map(move |x1| (0..self.n).filter_map(move |x2| self.get(x1, x2).map(|g| (x1, x2, g))))
    }

    /// Checks the division map laws against its bundle and returns the first
    /// failure.
    pub fn check_laws(&self, bundle: &Bundle) -> Result<(), String> {
        let a = bundle.action();
        let g = a.groupoid();
        for x1 in a.points() {
            for x2 in a.points() {
                let same = bundle.proj(x1) == bundle.proj(x2);
                let d = self.get(x1, x2);
                if same != d.is_some() {
                    return Err(format!("domain wrong at ({x1}, {x2})"));
                }
                let Some(d) = d else { continue };
                if a.apply(d, x2) != Some(x1) {
                    return Err(format!("⟨{x1},{x2}⟩ does not carry {x2} to {x1}"));
                }
                if a.anchor(d) != a.moment(x2) || a.landing(d) != a.moment(x1) {
                    return Err(format!("⟨{x1},{x2}⟩ has the wrong endpoints"));
                }
                if self.get(x2, x1) != Some(g.inv(d)) {
                    return Err(format!("⟨{x2},{x1}⟩ is not the inverse of ⟨{x1},{x2}⟩"));
                }
                for &h in a.arrows_at(a.moment(x1)) {
                    let hx1 = a.apply(h, x1).unwrap();
                    if self.get(hx1, x2) != a.then(d, h) {
                        return Err(format!("translating ⟨{x1},{x2}⟩ by {} fails", g.arrow_label(h)));
                    }
                }
            }
            if self.get(x1, x1) != Some(g.unit(a.moment(x1))) {
                return Err(format!("⟨{x1},{x1}⟩ is not a unit"));
            }
        }
        Ok(())
    }
}
