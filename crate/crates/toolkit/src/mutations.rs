//! Single-entry corruptions of valid objects, each aimed at one law.
//!
//! Every mutant is kept only if a brute-force check on its identifier-level
//! tables confirms that the aimed-at law really fails. The validators are then
//! expected to report that law.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use morita_core::{
    validate_action, validate_bibundle, validate_groupoid, Action, ActionCondition, ActionData, Bibundle, BibundleData,
    BibundleLaw, FiniteGroupoid, GroupoidData, GroupoidLaw, Side, ValidationReport, Violation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Groupoid(GroupoidLaw),
    Action(ActionCondition),
    DomainMismatch,
    Bibundle(BibundleLaw),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutant {
    Groupoid(GroupoidData),
    Action(Arc<FiniteGroupoid>, ActionData),
    Bibundle(Arc<FiniteGroupoid>, Arc<FiniteGroupoid>, BibundleData),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub name: String,
    pub target: Target,
    pub mutant: Mutant,
}

impl Mutation {
    pub fn report(&self) -> ValidationReport {
        let r = match &self.mutant {
            Mutant::Groupoid(d) => validate_groupoid(d).map(|_| ()),
            Mutant::Action(g, d) => validate_action(g, d).map(|_| ()),
            Mutant::Bibundle(g, h, d) => validate_bibundle(g, h, d).map(|_| ()),
        };
        r.err().unwrap_or_default()
    }

    /// The validator reports the aimed-at law.
    pub fn detected(&self) -> bool {
        reports(&self.report(), self.target)
    }
}

/// Every law a mutant can aim at.
pub fn all_targets() -> Vec<Target> {
    let mut out: Vec<Target> = GROUPOID_LAWS.into_iter().map(Target::Groupoid).collect();
    out.extend(
        [ActionCondition::Moment, ActionCondition::Unit, ActionCondition::Composition, ActionCondition::Totality]
            .map(Target::Action),
    );
    out.push(Target::DomainMismatch);
    out.extend(
        [BibundleLaw::LeftMomentInvariance, BibundleLaw::RightMomentInvariance, BibundleLaw::Commutation]
            .map(Target::Bibundle),
    );
    out
}

pub fn reports(report: &ValidationReport, target: Target) -> bool {
    match target {
        Target::Groupoid(l) => report.has_axiom(l),
        Target::Action(c) => report.has_action(c),
        Target::DomainMismatch => report.has_domain_mismatch(),
        Target::Bibundle(l) => report.has_bibundle(l),
    }
}

/// Identifier-level view of a groupoid payload.
struct GTables<'a> {
    src: HashMap<&'a str, &'a str>,
    tgt: HashMap<&'a str, &'a str>,
    comp: HashMap<(&'a str, &'a str), Vec<&'a str>>,
    data: &'a GroupoidData,
}

impl<'a> GTables<'a> {
    fn new(data: &'a GroupoidData) -> Self {
        let src = data.arrows.iter().map(|a| (a.id.as_str(), a.src.as_str())).collect();
        let tgt = data.arrows.iter().map(|a| (a.id.as_str(), a.tgt.as_str())).collect();
        let mut comp: HashMap<(&str, &str), Vec<&str>> = HashMap::new();
        for [g, h, gh] in &data.comp {
            comp.entry((g.as_str(), h.as_str())).or_default().push(gh.as_str());
        }
        GTables { src, tgt, comp, data }
    }

    fn c(&self, g: &str, h: &str) -> Option<&'a str> {
        match self.comp.get(&(g, h)).map(Vec::as_slice) {
            Some([v]) => Some(v),
            _ => None,
        }
    }

    fn arrows(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.data.arrows.iter().map(|a| a.id.as_str())
    }

    fn holds(&self, law: GroupoidLaw) -> bool {
        let d = self.data;
        let unit = |o: &str| d.unit.get(o).map(String::as_str);
        let inv = |a: &str| d.inv.get(a).map(String::as_str);
        match law {
            GroupoidLaw::CompositionDomain => self
                .arrows()
                .all(|g| self.arrows().all(|h| (self.src[g] == self.tgt[h]) == self.comp.contains_key(&(g, h)))),
            GroupoidLaw::CompositionFunctional => {
                self.comp.values().all(|v| v.iter().collect::<HashSet<_>>().len() == 1)
            }
            GroupoidLaw::CompositionEndpoints => d.comp.iter().all(|[g, h, gh]| {
                self.src.get(gh.as_str()) == self.src.get(h.as_str())
                    && self.tgt.get(gh.as_str()) == self.tgt.get(g.as_str())
            }),
            GroupoidLaw::Associativity => self.arrows().all(|g| {
                self.arrows().all(|h| {
                    self.arrows().all(|k| {
                        match (self.c(g, h).and_then(|gh| self.c(gh, k)), self.c(h, k).and_then(|hk| self.c(g, hk))) {
                            (Some(a), Some(b)) => a == b,
                            _ => true,
                        }
                    })
                })
            }),
            GroupoidLaw::UnitEndpoints => {
                d.objects.iter().all(|o| unit(o).is_some_and(|u| self.src[u] == o && self.tgt[u] == o))
            }
            GroupoidLaw::UnitLaw => self.arrows().all(|g| {
                let (s, t) = (unit(self.src[g]), unit(self.tgt[g]));
                s.and_then(|s| self.c(g, s)) == Some(g) && t.and_then(|t| self.c(t, g)) == Some(g)
            }),
            GroupoidLaw::InverseEndpoints => {
                self.arrows().all(|g| inv(g).is_some_and(|i| self.src[i] == self.tgt[g] && self.tgt[i] == self.src[g]))
            }
            GroupoidLaw::InverseLaw => self.arrows().all(|g| {
                let Some(i) = inv(g) else { return false };
                self.c(i, g) == unit(self.src[g]) && self.c(g, i) == unit(self.tgt[g])
            }),
            GroupoidLaw::InverseInvolution => self.arrows().all(|g| inv(g).and_then(inv) == Some(g)),
        }
    }
}

const GROUPOID_LAWS: [GroupoidLaw; 9] = [
    GroupoidLaw::CompositionDomain,
    GroupoidLaw::CompositionFunctional,
    GroupoidLaw::CompositionEndpoints,
    GroupoidLaw::Associativity,
    GroupoidLaw::UnitEndpoints,
    GroupoidLaw::UnitLaw,
    GroupoidLaw::InverseEndpoints,
    GroupoidLaw::InverseLaw,
    GroupoidLaw::InverseInvolution,
];

/// Whether the brute-force check finds `law` intact.
pub fn groupoid_law_holds(data: &GroupoidData, law: GroupoidLaw) -> bool {
    GTables::new(data).holds(law)
}

/// Candidate corruptions of a groupoid, one per law where the groupoid is big
/// enough to break it.
pub fn groupoid_mutations(name: &str, g: &FiniteGroupoid) -> Vec<Mutation> {
    let base = g.to_data();
    let arrows: Vec<String> = base.arrows.iter().map(|a| a.id.clone()).collect();
    let mut candidates: Vec<(GroupoidLaw, GroupoidData)> = Vec::new();
    let is_unit = |a: &str| base.unit.values().any(|u| u == a);
    let ends = |a: &str| {
        let d = base.arrows.iter().find(|d| d.id == a).unwrap();
        (d.src.clone(), d.tgt.clone())
    };
    // Composition table entries.
    let mut d = base.clone();
    d.comp.remove(0);
    candidates.push((GroupoidLaw::CompositionDomain, d));
    for other in &arrows {
        if *other != base.comp[0][2] {
            let mut d = base.clone();
            d.comp.push([base.comp[0][0].clone(), base.comp[0][1].clone(), other.clone()]);
            candidates.push((GroupoidLaw::CompositionFunctional, d));
            break;
        }
    }
    'endpoints: for (i, [_, _, gh]) in base.comp.iter().enumerate() {
        for other in &arrows {
            if ends(other) != ends(gh) {
                let mut d = base.clone();
                d.comp[i][2] = other.clone();
                candidates.push((GroupoidLaw::CompositionEndpoints, d));
                break 'endpoints;
            }
        }
    }
    'assoc: for (i, [a, b, ab]) in base.comp.iter().enumerate() {
        if is_unit(a) || is_unit(b) {
            continue;
        }
        for other in &arrows {
            if other != ab && ends(other) == ends(ab) {
                let mut d = base.clone();
                d.comp[i][2] = other.clone();
                if !groupoid_law_holds(&d, GroupoidLaw::Associativity) {
                    candidates.push((GroupoidLaw::Associativity, d));
                    break 'assoc;
                }
            }
        }
    }
    // Units.
    'unit_ends: for o in &base.objects {
        for other in &arrows {
            let (s, t) = ends(other);
            if s != *o || t != *o {
                let mut d = base.clone();
                d.unit.insert(o.clone(), other.clone());
                candidates.push((GroupoidLaw::UnitEndpoints, d));
                break 'unit_ends;
            }
        }
    }
    'unit_law: for o in &base.objects {
        for other in &arrows {
            if ends(other) == (o.clone(), o.clone()) && base.unit[o] != *other {
                let mut d = base.clone();
                d.unit.insert(o.clone(), other.clone());
                candidates.push((GroupoidLaw::UnitLaw, d));
                break 'unit_law;
            }
        }
    }
    // Inverses.
    'inv_ends: for a in &arrows {
        for other in &arrows {
            let (s, t) = ends(a);
            if ends(other) != (t, s) {
                let mut d = base.clone();
                d.inv.insert(a.clone(), other.clone());
                candidates.push((GroupoidLaw::InverseEndpoints, d));
                break 'inv_ends;
            }
        }
    }
    'inv_law: for a in &arrows {
        for other in &arrows {
            let (s, t) = ends(a);
            if ends(other) == (t, s) && base.inv[a] != *other {
                let mut d = base.clone();
                d.inv.insert(a.clone(), other.clone());
                candidates.push((GroupoidLaw::InverseLaw, d.clone()));
                candidates.push((GroupoidLaw::InverseInvolution, d));
                break 'inv_law;
            }
        }
    }
    candidates
        .into_iter()
        .filter(|(law, d)| !groupoid_law_holds(d, *law))
        .map(|(law, d)| Mutation {
            name: format!("{name}~{law:?}"),
            target: Target::Groupoid(law),
            mutant: Mutant::Groupoid(d),
        })
        .collect()
}

/// All laws hold on the payload, by brute force.
pub fn groupoid_oracle_ok(data: &GroupoidData) -> bool {
    GROUPOID_LAWS.iter().all(|&l| groupoid_law_holds(data, l))
}

/// Identifier-level action triples normalised to `(arrow, point, result)`.
fn action_triples(d: &ActionData) -> Vec<(String, String, String)> {
    d.act
        .iter()
        .map(|t| match d.side {
            Side::Left => (t[0].clone(), t[1].clone(), t[2].clone()),
            Side::Right => (t[1].clone(), t[0].clone(), t[2].clone()),
        })
        .collect()
}

fn to_act(side: Side, triples: &[(String, String, String)]) -> Vec<[String; 3]> {
    triples
        .iter()
        .map(|(a, x, y)| match side {
            Side::Left => [a.clone(), x.clone(), y.clone()],
            Side::Right => [x.clone(), a.clone(), y.clone()],
        })
        .collect()
}

/// Brute-force check of one action condition on identifier-level data.
pub fn action_condition_holds(g: &FiniteGroupoid, d: &ActionData, c: ActionCondition) -> bool {
    let t = action_triples(d);
    let lookup: HashMap<(&str, &str), Vec<&str>> = t.iter().fold(HashMap::new(), |mut m, (a, x, y)| {
        m.entry((a.as_str(), x.as_str())).or_default().push(y.as_str());
        m
    });
    let one = |a: &str, x: &str| match lookup.get(&(a, x)).map(Vec::as_slice) {
        Some([y]) => Some(*y),
        _ => None,
    };
    let arrow = |a: &str| g.arrow_by_label(a).unwrap();
    let anchor = |a: &str| {
        let a = arrow(a);
        let o = if d.side == Side::Left { g.src(a) } else { g.tgt(a) };
        g.object_label(o).to_string()
    };
    let landing = |a: &str| {
        let a = arrow(a);
        let o = if d.side == Side::Left { g.tgt(a) } else { g.src(a) };
        g.object_label(o).to_string()
    };
    match c {
        ActionCondition::Moment => t.iter().all(|(a, _, y)| d.moment[y] == landing(a)),
        ActionCondition::Unit => d.carrier.iter().all(|x| {
            let u = g.arrow_label(g.unit(g.object_by_label(&d.moment[x]).unwrap()));
            one(u, x) == Some(x.as_str())
        }),
        ActionCondition::Composition => t.iter().all(|(a, x, y)| {
            g.arrows().all(|b| {
                let b_label = g.arrow_label(b);
                if anchor(b_label) != d.moment[y] {
                    return true;
                }
                let composite = if d.side == Side::Left { g.compose(b, arrow(a)) } else { g.compose(arrow(a), b) };
                let Some(composite) = composite else {
                    return true;
                };
                match (one(b_label, y), one(g.arrow_label(composite), x)) {
                    (Some(p), Some(q)) => p == q,
                    _ => true,
                }
            })
        }),
        ActionCondition::Totality => {
            lookup.values().all(|v| v.iter().collect::<HashSet<_>>().len() == 1)
                && d.carrier.iter().all(|x| {
                    g.arrows()
                        .filter(|&a| anchor(g.arrow_label(a)) == d.moment[x])
                        .all(|a| lookup.contains_key(&(g.arrow_label(a), x.as_str())))
                })
        }
    }
}

fn domain_ok(g: &FiniteGroupoid, d: &ActionData) -> bool {
    action_triples(d).iter().all(|(a, x, _)| {
        let a = g.arrow_by_label(a).unwrap();
        let o = if d.side == Side::Left { g.src(a) } else { g.tgt(a) };
        g.object_label(o) == d.moment[x]
    })
}

pub fn action_mutations(name: &str, a: &Action) -> Vec<Mutation> {
    let g = a.groupoid();
    let base = a.to_data();
    let triples = action_triples(&base);
    let mut out: Vec<(Target, ActionData)> = Vec::new();
    let with = |t: Vec<(String, String, String)>| ActionData { act: to_act(base.side, &t), ..base.clone() };
    let is_unit = |l: &str| g.is_unit(g.arrow_by_label(l).unwrap());
    'moment: for (i, (arrow, _, y)) in triples.iter().enumerate() {
        for p in &base.carrier {
            if base.moment[p] != base.moment[y] && !is_unit(arrow) {
                let mut t = triples.clone();
                t[i].2 = p.clone();
                out.push((Target::Action(ActionCondition::Moment), with(t)));
                break 'moment;
            }
        }
    }
    'unit: for (i, (arrow, x, _)) in triples.iter().enumerate() {
        if !is_unit(arrow) {
            continue;
        }
        for p in &base.carrier {
            if p != x && base.moment[p] == base.moment[x] {
                let mut t = triples.clone();
                t[i].2 = p.clone();
                out.push((Target::Action(ActionCondition::Unit), with(t)));
                break 'unit;
            }
        }
    }
    'comp: for (i, (arrow, _, y)) in triples.iter().enumerate() {
        if is_unit(arrow) {
            continue;
        }
        for p in &base.carrier {
            if p != y && base.moment[p] == base.moment[y] {
                let mut t = triples.clone();
                t[i].2 = p.clone();
                let d = with(t);
                if !action_condition_holds(g, &d, ActionCondition::Composition) {
                    out.push((Target::Action(ActionCondition::Composition), d));
                    break 'comp;
                }
            }
        }
    }
    'domain: for x in &base.carrier {
        for b in g.arrows() {
            let o = if base.side == Side::Left { g.src(b) } else { g.tgt(b) };
            if g.object_label(o) != base.moment[x] {
                let mut t = triples.clone();
                t.push((g.arrow_label(b).to_string(), x.clone(), x.clone()));
                out.push((Target::DomainMismatch, with(t)));
                break 'domain;
            }
        }
    }
    if let Some(i) = triples.iter().position(|(arrow, _, _)| !is_unit(arrow)).or((!triples.is_empty()).then_some(0)) {
        let mut t = triples.clone();
        t.remove(i);
        out.push((Target::Action(ActionCondition::Totality), with(t)));
    }
    out.into_iter()
        .filter(|(target, d)| match target {
            Target::Action(c) => !action_condition_holds(g, d, *c),
            Target::DomainMismatch => !domain_ok(g, d),
            _ => unreachable!(),
        })
        .map(|(target, d)| Mutation {
            name: format!("{name}~{target:?}"),
            target,
            mutant: Mutant::Action(g.clone(), d),
        })
        .collect()
}

/// Brute-force check of one bibundle law on identifier-level data.
pub fn bibundle_law_holds(g: &FiniteGroupoid, h: &FiniteGroupoid, d: &BibundleData, law: BibundleLaw) -> bool {
    let left: HashMap<(&str, &str), &str> =
        d.left_act.iter().map(|[a, x, y]| ((a.as_str(), x.as_str()), y.as_str())).collect();
    let right: HashMap<(&str, &str), &str> =
        d.right_act.iter().map(|[x, a, y]| ((x.as_str(), a.as_str()), y.as_str())).collect();
    match law {
        BibundleLaw::LeftMomentInvariance => d.right_act.iter().all(|[x, _, y]| d.left_moment[x] == d.left_moment[y]),
        BibundleLaw::RightMomentInvariance => d.left_act.iter().all(|[_, x, y]| d.right_moment[x] == d.right_moment[y]),
        BibundleLaw::Commutation => d.carrier.iter().all(|x| {
            g.arrows().all(|a| {
                h.arrows().all(|b| {
                    let (a, b) = (g.arrow_label(a), h.arrow_label(b));
                    let one = left.get(&(a, x.as_str())).and_then(|ax| right.get(&(*ax, b)));
                    let two = right.get(&(x.as_str(), b)).and_then(|xb| left.get(&(a, *xb)));
                    match (one, two) {
                        (Some(p), Some(q)) => p == q,
                        (None, None) => true,
                        _ => left.contains_key(&(a, x.as_str())) != right.contains_key(&(x.as_str(), b)),
                    }
                })
            })
        }),
        BibundleLaw::Shape => true,
    }
}

pub fn bibundle_mutations(name: &str, b: &Bibundle) -> Vec<Mutation> {
    let (g, h) = (b.left_groupoid(), b.right_groupoid());
    let base = b.to_data();
    let mut out: Vec<(BibundleLaw, BibundleData)> = Vec::new();
    'lmi: for (i, [_, _, y]) in base.right_act.iter().enumerate() {
        for p in &base.carrier {
            if base.right_moment[p] == base.right_moment[y] && base.left_moment[p] != base.left_moment[y] {
                let mut d = base.clone();
                d.right_act[i][2] = p.clone();
                out.push((BibundleLaw::LeftMomentInvariance, d));
                break 'lmi;
            }
        }
    }
    'rmi: for (i, [_, _, y]) in base.left_act.iter().enumerate() {
        for p in &base.carrier {
            if base.left_moment[p] == base.left_moment[y] && base.right_moment[p] != base.right_moment[y] {
                let mut d = base.clone();
                d.left_act[i][2] = p.clone();
                out.push((BibundleLaw::RightMomentInvariance, d));
                break 'rmi;
            }
        }
    }
    // Replace the right action by a conjugate that no longer commutes.
    'comm: for (i, [x, a, y]) in base.right_act.iter().enumerate() {
        if h.is_unit(h.arrow_by_label(a).unwrap()) {
            continue;
        }
        for p in &base.carrier {
            if p != y && base.right_moment[p] == base.right_moment[y] && base.left_moment[p] == base.left_moment[y] {
                let mut d = base.clone();
                d.right_act[i][2] = p.clone();
                let _ = x;
                if !bibundle_law_holds(g, h, &d, BibundleLaw::Commutation) {
                    out.push((BibundleLaw::Commutation, d));
                    break 'comm;
                }
            }
        }
    }
    out.into_iter()
        .filter(|(law, d)| !bibundle_law_holds(g, h, d, *law))
        .map(|(law, d)| Mutation {
            name: format!("{name}~{law:?}"),
            target: Target::Bibundle(law),
            mutant: Mutant::Bibundle(g.clone(), h.clone(), d),
        })
        .collect()
}

/// Names of the violations a report contains, for display.
pub fn violation_kinds(report: &ValidationReport) -> Vec<String> {
    report
        .violations
        .iter()
        .map(|v| match v {
            Violation::Axiom { law, .. } => format!("{law:?}"),
            Violation::Action { condition, .. } => format!("{condition:?}"),
            Violation::Bibundle { law, .. } => format!("{law:?}"),
            Violation::DomainMismatch { .. } => "DomainMismatch".to_string(),
            other => other.to_string(),
        })
        .collect()
}
