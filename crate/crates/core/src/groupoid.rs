//! Finite groupoids stored as explicit composition tables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{CalculusError, GroupoidLaw, ValidationReport, Violation};
use crate::partition::OrbitPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrowId(pub usize);

impl ObjId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl ArrowId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Default bound on the number of composable pairs accepted by validation.
pub const DEFAULT_MAX_COMPOSABLE_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationLimits {
    pub max_composable_pairs: usize,
}

impl Default for ValidationLimits {
    fn default() -> Self {
        ValidationLimits { max_composable_pairs: DEFAULT_MAX_COMPOSABLE_PAIRS }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDecl {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Unvalidated groupoid tables keyed by identifier strings.
///
/// This is the only way raw data enters the library: it has to pass
/// [`validate_groupoid`] to become a [`FiniteGroupoid`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupoidData {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    pub unit: BTreeMap<String, String>,
    pub inv: BTreeMap<String, String>,
    /// Triples `[g, h, g∘h]`.
    pub comp: Vec<[String; 3]>,
}

/// A validated finite groupoid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    object_labels: Vec<String>,
    arrow_labels: Vec<String>,
    object_index: HashMap<String, ObjId>,
    arrow_index: HashMap<String, ArrowId>,
    src: Vec<ObjId>,
    tgt: Vec<ObjId>,
    unit: Vec<ArrowId>,
    inv: Vec<ArrowId>,
    /// Arrows grouped by source object.
    from: Vec<Vec<ArrowId>>,
    /// Arrows grouped by target object.
    into: Vec<Vec<ArrowId>>,
    /// Position of each arrow inside `into[tgt(h)]`.
    into_pos: Vec<usize>,
    /// `rows[g][into_pos[h]] = g∘h` for every `h` with `tgt(h) = src(g)`.
    rows: Vec<Vec<ArrowId>>,
}

/// Index-level tables shared by the validating constructors.
struct RawTables {
    object_labels: Vec<String>,
    arrow_labels: Vec<String>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    unit: Vec<usize>,
    inv: Vec<usize>,
    comp: Vec<(usize, usize, usize)>,
}

pub fn validate_groupoid(data: &GroupoidData) -> Result<FiniteGroupoid, ValidationReport> {
    validate_groupoid_with(data, ValidationLimits::default())
}

pub fn validate_groupoid_with(
    data: &GroupoidData,
    limits: ValidationLimits,
) -> Result<FiniteGroupoid, ValidationReport> {
    let mut report = ValidationReport::default();
    let mut object_index = HashMap::new();
    for (i, o) in data.objects.iter().enumerate() {
        if object_index.insert(o.as_str(), i).is_some() {
            report.push(Violation::DuplicateIdentifier { field: "objects".into(), id: o.clone() });
        }
    }
    let mut arrow_index = HashMap::new();
    for (i, a) in data.arrows.iter().enumerate() {
        if arrow_index.insert(a.id.as_str(), i).is_some() {
            report.push(Violation::DuplicateIdentifier { field: "arrows".into(), id: a.id.clone() });
        }
    }
    let mut lookup = |table: &HashMap<&str, usize>, field: &str, id: &str| -> Option<usize> {
        let found = table.get(id).copied();
        if found.is_none() {
            report.push(Violation::DanglingIdentifier { field: field.into(), id: id.into() });
        }
        found
    };
    let mut src = Vec::with_capacity(data.arrows.len());
    let mut tgt = Vec::with_capacity(data.arrows.len());
    for a in &data.arrows {
        src.push(lookup(&object_index, "arrows.src", &a.src).unwrap_or(0));
        tgt.push(lookup(&object_index, "arrows.tgt", &a.tgt).unwrap_or(0));
    }
    let mut unit = vec![None; data.objects.len()];
    for (o, a) in &data.unit {
        let (Some(o), Some(a)) = (lookup(&object_index, "unit", o), lookup(&arrow_index, "unit", a)) else {
            continue;
        };
        unit[o] = Some(a);
    }
    let mut inv = vec![None; data.arrows.len()];
    for (a, b) in &data.inv {
        let (Some(a), Some(b)) = (lookup(&arrow_index, "inv", a), lookup(&arrow_index, "inv", b)) else {
            continue;
        };
        inv[a] = Some(b);
    }
    let mut comp = Vec::with_capacity(data.comp.len());
    for [g, h, gh] in &data.comp {
        let g = lookup(&arrow_index, "comp", g);
        let h = lookup(&arrow_index, "comp", h);
        let gh = lookup(&arrow_index, "comp", gh);
        if let (Some(g), Some(h), Some(gh)) = (g, h, gh) {
            comp.push((g, h, gh));
        }
    }
    for (o, u) in unit.iter().enumerate() {
        if u.is_none() {
            report.push(Violation::MissingEntry { field: "unit".into(), id: data.objects[o].clone() });
        }
    }
    for (a, i) in inv.iter().enumerate() {
        if i.is_none() {
            report.push(Violation::MissingEntry { field: "inv".into(), id: data.arrows[a].id.clone() });
        }
    }
    if !report.is_ok() {
        return Err(report);
    }
    let raw = RawTables {
        object_labels: data.objects.clone(),
        arrow_labels: data.arrows.iter().map(|a| a.id.clone()).collect(),
        src,
        tgt,
        unit: unit.into_iter().map(Option::unwrap).collect(),
        inv: inv.into_iter().map(Option::unwrap).collect(),
        comp,
    };
    FiniteGroupoid::from_raw(raw, limits)
}

impl FiniteGroupoid {
    fn from_raw(raw: RawTables, limits: ValidationLimits) -> Result<Self, ValidationReport> {
        let n_obj = raw.object_labels.len();
        let n_arr = raw.arrow_labels.len();
        let mut from = vec![Vec::new(); n_obj];
        let mut into = vec![Vec::new(); n_obj];
        let mut into_pos = vec![0; n_arr];
        for a in 0..n_arr {
            from[raw.src[a]].push(ArrowId(a));
            into_pos[a] = into[raw.tgt[a]].len();
            into[raw.tgt[a]].push(ArrowId(a));
        }
        let composable: usize = (0..n_obj).map(|x| from[x].len() * into[x].len()).sum();
        let mut report = ValidationReport::default();
        if composable > limits.max_composable_pairs {
            report.push(Violation::TooLarge { composable_pairs: composable, limit: limits.max_composable_pairs });
            return Err(report);
        }
        let al = |a: usize| raw.arrow_labels[a].clone();
        let ol = |o: usize| raw.object_labels[o].clone();

        let mut rows: Vec<Vec<Option<usize>>> = (0..n_arr).map(|g| vec![None; into[raw.src[g]].len()]).collect();
        for &(g, h, gh) in &raw.comp {
            if raw.src[g] != raw.tgt[h] {
                report.push(Violation::Axiom {
                    law: GroupoidLaw::CompositionDomain,
                    witness: vec![al(g), al(h), al(gh)],
                });
                continue;
            }
            let slot = &mut rows[g][into_pos[h]];
            match *slot {
                Some(prev) if prev != gh => report.push(Violation::Axiom {
                    law: GroupoidLaw::CompositionFunctional,
                    witness: vec![al(g), al(h), al(prev), al(gh)],
                }),
                _ => *slot = Some(gh),
            }
        }
        for g in 0..n_arr {
            for (pos, &h) in into[raw.src[g]].iter().enumerate() {
                match rows[g][pos] {
                    None => report
                        .push(Violation::Axiom { law: GroupoidLaw::CompositionDomain, witness: vec![al(g), al(h.0)] }),
                    Some(gh) => {
                        if raw.src[gh] != raw.src[h.0] || raw.tgt[gh] != raw.tgt[g] {
                            report.push(Violation::Axiom {
                                law: GroupoidLaw::CompositionEndpoints,
                                witness: vec![al(g), al(h.0), al(gh)],
                            });
                        }
                    }
                }
            }
        }
        let comp = |g: usize, h: usize| -> Option<usize> {
            if raw.src[g] != raw.tgt[h] {
                return None;
            }
            rows[g][into_pos[h]]
        };
        for x in 0..n_obj {
            let u = raw.unit[x];
            if raw.src[u] != x || raw.tgt[u] != x {
                report.push(Violation::Axiom { law: GroupoidLaw::UnitEndpoints, witness: vec![ol(x), al(u)] });
            }
        }
        for g in 0..n_arr {
            let (s, t) = (raw.src[g], raw.tgt[g]);
            if comp(raw.unit[t], g) != Some(g) || comp(g, raw.unit[s]) != Some(g) {
                report.push(Violation::Axiom {
                    law: GroupoidLaw::UnitLaw,
                    witness: vec![al(g), al(raw.unit[t]), al(raw.unit[s])],
                });
            }
            let i = raw.inv[g];
            if raw.src[i] != t || raw.tgt[i] != s {
                report.push(Violation::Axiom { law: GroupoidLaw::InverseEndpoints, witness: vec![al(g), al(i)] });
            }
            if comp(i, g) != Some(raw.unit[s]) || comp(g, i) != Some(raw.unit[t]) {
                report.push(Violation::Axiom { law: GroupoidLaw::InverseLaw, witness: vec![al(g), al(i)] });
            }
            if raw.inv[i] != g {
                report.push(Violation::Axiom {
                    law: GroupoidLaw::InverseInvolution,
                    witness: vec![al(g), al(i), al(raw.inv[i])],
                });
            }
        }
        for g in 0..n_arr {
            for &h in &into[raw.src[g]] {
                let Some(gh) = comp(g, h.0) else { continue };
                for &k in &into[raw.src[h.0]] {
                    let (Some(hk), Some(gh_k)) = (comp(h.0, k.0), comp(gh, k.0)) else {
                        continue;
                    };
                    if comp(g, hk) != Some(gh_k) {
                        report.push(Violation::Axiom {
                            law: GroupoidLaw::Associativity,
                            witness: vec![al(g), al(h.0), al(k.0)],
                        });
                    }
                }
            }
        }
        report.clone().into_result()?;

        let object_index = raw.object_labels.iter().enumerate().map(|(i, l)| (l.clone(), ObjId(i))).collect();
        let arrow_index = raw.arrow_labels.iter().enumerate().map(|(i, l)| (l.clone(), ArrowId(i))).collect();
        let rows =
            rows.into_iter().map(|r| r.into_iter().map(|v| ArrowId(v.expect("checked above"))).collect()).collect();
        Ok(FiniteGroupoid {
            object_labels: raw.object_labels,
            arrow_labels: raw.arrow_labels,
            object_index,
            arrow_index,
            src: raw.src.into_iter().map(ObjId).collect(),
            tgt: raw.tgt.into_iter().map(ObjId).collect(),
            unit: raw.unit.into_iter().map(ArrowId).collect(),
            inv: raw.inv.into_iter().map(ArrowId).collect(),
            from,
            into,
            into_pos,
            rows,
        })
    }

    /// Builds a groupoid from tables that a constructor believes are correct;
    /// they still go through the full axiom check.
    fn build(raw: RawTables) -> Self {
        match Self::from_raw(raw, ValidationLimits { max_composable_pairs: usize::MAX }) {
            Ok(g) => g,
            Err(report) => panic!("constructor produced an invalid groupoid: {report}"),
        }
    }

    pub fn num_objects(&self) -> usize {
        self.object_labels.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrow_labels.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjId> + '_ {
        (0..self.num_objects()).map(ObjId)
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = ArrowId> + '_ {
        (0..self.num_arrows()).map(ArrowId)
    }

    pub fn src(&self, g: ArrowId) -> ObjId {
        self.src[g.0]
    }

    pub fn tgt(&self, g: ArrowId) -> ObjId {
        self.tgt[g.0]
    }

    pub fn unit(&self, x: ObjId) -> ArrowId {
        self.unit[x.0]
    }

    pub fn inv(&self, g: ArrowId) -> ArrowId {
        self.inv[g.0]
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        self.unit[self.src[g.0].0] == g
    }

    /// `g∘h`, defined when `src(g) = tgt(h)`.
    pub fn compose(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        if self.src[g.0] != self.tgt[h.0] {
            return None;
        }
        Some(self.rows[g.0][self.into_pos[h.0]])
    }

    /// Arrows with source `x`.
    pub fn arrows_from(&self, x: ObjId) -> &[ArrowId] {
        &self.from[x.0]
    }

    /// Arrows with target `x`.
    pub fn arrows_into(&self, x: ObjId) -> &[ArrowId] {
        &self.into[x.0]
    }

    pub fn object_label(&self, x: ObjId) -> &str {
        &self.object_labels[x.0]
    }

    pub fn arrow_label(&self, g: ArrowId) -> &str {
        &self.arrow_labels[g.0]
    }

    pub fn object_by_label(&self, label: &str) -> Option<ObjId> {
        self.object_index.get(label).copied()
    }

    pub fn arrow_by_label(&self, label: &str) -> Option<ArrowId> {
        self.arrow_index.get(label).copied()
    }

    pub fn composable_pairs(&self) -> usize {
        self.objects().map(|x| self.from[x.0].len() * self.into[x.0].len()).sum()
    }

    pub fn to_data(&self) -> GroupoidData {
        let al = |g: ArrowId| self.arrow_labels[g.0].clone();
        let ol = |x: ObjId| self.object_labels[x.0].clone();
        let mut comp = Vec::with_capacity(self.composable_pairs());
        for g in self.arrows() {
            for &h in self.arrows_into(self.src(g)) {
                let gh = self.compose(g, h).expect("composable");
                comp.push([al(g), al(h), al(gh)]);
            }
        }
        GroupoidData {
            objects: self.object_labels.clone(),
            arrows: self
                .arrows()
                .map(|g| ArrowDecl { id: al(g), src: ol(self.src(g)), tgt: ol(self.tgt(g)) })
                .collect(),
            unit: self.objects().map(|x| (ol(x), al(self.unit(x)))).collect(),
            inv: self.arrows().map(|g| (al(g), al(self.inv(g)))).collect(),
            comp,
        }
    }

    pub fn isotropy_group(&self, x: ObjId) -> Result<Vec<ArrowId>, CalculusError> {
        if x.0 >= self.num_objects() {
            return Err(CalculusError::UnknownObject(x.0));
        }
        let group: Vec<ArrowId> = self.arrows_from(x).iter().copied().filter(|&g| self.tgt(g) == x).collect();
        debug_assert!(group.iter().all(|&g| {
            group.contains(&self.inv(g)) && group.iter().all(|&h| group.contains(&self.compose(g, h).unwrap()))
        }));
        Ok(group)
    }

    /// Same objects, only the arrows whose source and target coincide.
    pub fn isotropy_groupoid(&self) -> FiniteGroupoid {
        let keep: Vec<ArrowId> = self.arrows().filter(|&g| self.src(g) == self.tgt(g)).collect();
        let mut new_index = vec![usize::MAX; self.num_arrows()];
        for (i, g) in keep.iter().enumerate() {
            new_index[g.0] = i;
        }
        let mut comp = Vec::new();
        for &g in &keep {
            for &h in &keep {
                if let Some(gh) = self.compose(g, h) {
                    comp.push((new_index[g.0], new_index[h.0], new_index[gh.0]));
                }
            }
        }
        FiniteGroupoid::build(RawTables {
            object_labels: self.object_labels.clone(),
            arrow_labels: keep.iter().map(|&g| self.arrow_labels[g.0].clone()).collect(),
            src: keep.iter().map(|&g| self.src(g).0).collect(),
            tgt: keep.iter().map(|&g| self.tgt(g).0).collect(),
            unit: self.objects().map(|x| new_index[self.unit(x).0]).collect(),
            inv: keep.iter().map(|&g| new_index[self.inv(g).0]).collect(),
            comp,
        })
    }

    /// Objects up to the existence of an arrow between them.
    pub fn orbit_space(&self) -> OrbitPartition {
        OrbitPartition::from_pairs(self.num_objects(), self.arrows().map(|g| (self.src(g).0, self.tgt(g).0)))
    }

    /// Whether `g ↦ (tgt(g), src(g))` hits every pair of objects.
    pub fn is_fibrating(&self) -> bool {
        let n = self.num_objects();
        let mut hit = vec![false; n * n];
        for g in self.arrows() {
            hit[self.tgt(g).0 * n + self.src(g).0] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Disjoint union, with labels prefixed by the component index.
    pub fn disjoint_union(parts: &[&FiniteGroupoid]) -> FiniteGroupoid {
        let mut raw = RawTables {
            object_labels: Vec::new(),
            arrow_labels: Vec::new(),
            src: Vec::new(),
            tgt: Vec::new(),
            unit: Vec::new(),
            inv: Vec::new(),
            comp: Vec::new(),
        };
        for (c, part) in parts.iter().enumerate() {
            let (o_off, a_off) = (raw.object_labels.len(), raw.arrow_labels.len());
            let prefix = |l: &str| if parts.len() == 1 { l.to_string() } else { format!("{c}:{l}") };
            raw.object_labels.extend(part.object_labels.iter().map(|l| prefix(l)));
            raw.arrow_labels.extend(part.arrow_labels.iter().map(|l| prefix(l)));
            raw.src.extend(part.src.iter().map(|x| x.0 + o_off));
            raw.tgt.extend(part.tgt.iter().map(|x| x.0 + o_off));
            raw.unit.extend(part.unit.iter().map(|g| g.0 + a_off));
            raw.inv.extend(part.inv.iter().map(|g| g.0 + a_off));
            for g in part.arrows() {
                for &h in part.arrows_into(part.src(g)) {
                    let gh = part.compose(g, h).expect("composable");
                    raw.comp.push((g.0 + a_off, h.0 + a_off, gh.0 + a_off));
                }
            }
        }
        FiniteGroupoid::build(raw)
    }

    /// The transitive groupoid `pair_groupoid(n) × K` with vertex group `K`.
    pub fn transitive(n: usize, group: &GroupTable) -> FiniteGroupoid {
        assert!(n >= 1, "a transitive groupoid needs at least one object");
        let k = group.order();
        let idx = |i: usize, j: usize, a: usize| (i * n + j) * k + a;
        let mut raw = RawTables {
            object_labels: (0..n).map(|i| i.to_string()).collect(),
            arrow_labels: Vec::with_capacity(n * n * k),
            src: Vec::with_capacity(n * n * k),
            tgt: Vec::with_capacity(n * n * k),
            unit: (0..n).map(|i| idx(i, i, group.identity())).collect(),
            inv: Vec::with_capacity(n * n * k),
            comp: Vec::new(),
        };
        for i in 0..n {
            for j in 0..n {
                for a in 0..k {
                    raw.arrow_labels.push(match (n, k) {
                        (1, _) => group.label(a).to_string(),
                        (_, 1) => format!("({i},{j})"),
                        _ => format!("({i},{j};{})", group.label(a)),
                    });
                    raw.src.push(j);
                    raw.tgt.push(i);
                    raw.inv.push(idx(j, i, group.inverse(a)));
                    for l in 0..n {
                        for b in 0..k {
                            raw.comp.push((idx(i, j, a), idx(j, l, b), idx(i, l, group.mul(a, b))));
                        }
                    }
                }
            }
        }
        FiniteGroupoid::build(raw)
    }
}

/// `n` objects and one arrow `(i,j): j → i` for every ordered pair.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    FiniteGroupoid::transitive(n, &GroupTable::trivial())
}

/// Only identity arrows.
pub fn unit_groupoid(n: usize) -> FiniteGroupoid {
    FiniteGroupoid::build(RawTables {
        object_labels: (0..n).map(|i| i.to_string()).collect(),
        arrow_labels: (0..n).map(|i| format!("({i},{i})")).collect(),
        src: (0..n).collect(),
        tgt: (0..n).collect(),
        unit: (0..n).collect(),
        inv: (0..n).collect(),
        comp: (0..n).map(|i| (i, i, i)).collect(),
    })
}

/// Groupoid of an equivalence relation: arrows are related pairs `(z, y): y → z`
/// and `(z,y)∘(y,x) = (z,x)`.
pub fn relation_groupoid<S: AsRef<str>>(
    carrier: &[S],
    relation: &[(usize, usize)],
) -> Result<FiniteGroupoid, CalculusError> {
    let n = carrier.len();
    let mut related = vec![false; n * n];
    for &(a, b) in relation {
        if a >= n || b >= n {
            return Err(CalculusError::NotAnEquivalence(format!("pair ({a},{b}) leaves the carrier")));
        }
        related[a * n + b] = true;
    }
    let name = |i: usize| carrier[i].as_ref().to_string();
    for a in 0..n {
        if !related[a * n + a] {
            return Err(CalculusError::NotAnEquivalence(format!("not reflexive at {}", name(a))));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if related[a * n + b] && !related[b * n + a] {
                return Err(CalculusError::NotAnEquivalence(format!("not symmetric at ({},{})", name(a), name(b))));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if related[a * n + b] && related[b * n + c] && !related[a * n + c] {
                    return Err(CalculusError::NotAnEquivalence(format!(
                        "not transitive at ({},{},{})",
                        name(a),
                        name(b),
                        name(c)
                    )));
                }
            }
        }
    }
    let mut arrow_of = vec![usize::MAX; n * n];
    let mut pairs = Vec::new();
    for z in 0..n {
        for y in 0..n {
            if related[z * n + y] {
                arrow_of[z * n + y] = pairs.len();
                pairs.push((z, y));
            }
        }
    }
    let mut comp = Vec::new();
    for &(z, y) in &pairs {
        for x in 0..n {
            if related[y * n + x] {
                comp.push((arrow_of[z * n + y], arrow_of[y * n + x], arrow_of[z * n + x]));
            }
        }
    }
    Ok(FiniteGroupoid::build(RawTables {
        object_labels: (0..n).map(name).collect(),
        arrow_labels: pairs.iter().map(|&(z, y)| format!("({},{})", name(z), name(y))).collect(),
        src: pairs.iter().map(|&(_, y)| y).collect(),
        tgt: pairs.iter().map(|&(z, _)| z).collect(),
        unit: (0..n).map(|x| arrow_of[x * n + x]).collect(),
        inv: pairs.iter().map(|&(z, y)| arrow_of[y * n + z]).collect(),
        comp,
    }))
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    labels: Vec<String>,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    pub fn new(labels: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self, CalculusError> {
        let n = labels.len();
        if n == 0 {
            return Err(CalculusError::NotAGroup("empty table".into()));
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(CalculusError::NotAGroup("table is not closed n×n".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(CalculusError::NotAGroup(format!(
                            "associativity fails at ({},{},{})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| CalculusError::NotAGroup("no identity".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let b = (0..n)
                .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                .ok_or_else(|| CalculusError::NotAGroup(format!("{} has no inverse", labels[a])))?;
            inverse.push(b);
        }
        Ok(GroupTable { labels, mul, identity, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n` with elements labelled `0..n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new((0..n).map(|a| a.to_string()).collect(), mul).expect("cyclic group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }
}

/// The one-object groupoid whose arrows are the group elements.
pub fn group_as_groupoid(group: &GroupTable) -> FiniteGroupoid {
    FiniteGroupoid::transitive(1, group)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_small_cases() {
        let g1 = pair_groupoid(1);
        assert_eq!((g1.num_objects(), g1.num_arrows()), (1, 1));
        let g2 = pair_groupoid(2);
        assert_eq!(g2.num_arrows(), 4);
        for x in g2.objects() {
            assert_eq!(g2.isotropy_group(x).unwrap(), vec![g2.unit(x)]);
        }
        let g3 = pair_groupoid(3);
        assert_eq!(g3.num_arrows(), 9);
        assert_eq!(g3.orbit_space().num_classes(), 1);
    }

    #[test]
    fn pair_groupoid_direction_convention() {
        let g = pair_groupoid(3);
        let a = g.arrow_by_label("(0,1)").unwrap();
        assert_eq!((g.src(a), g.tgt(a)), (ObjId(1), ObjId(0)));
        let b = g.arrow_by_label("(1,2)").unwrap();
        assert_eq!(g.arrow_label(g.compose(a, b).unwrap()), "(0,2)");
        assert_eq!(g.compose(b, a), None);
    }

    #[test]
    fn relation_groupoid_cases() {
        let eq = relation_groupoid(&["a", "b", "c"], &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(eq.num_arrows(), 3);
        assert_eq!(eq.orbit_space().num_classes(), 3);
        for x in eq.objects() {
            assert_eq!(eq.isotropy_group(x).unwrap(), vec![eq.unit(x)]);
        }
        let full: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
        let rg = relation_groupoid(&["0", "1", "2"], &full).unwrap();
        assert_eq!(rg, pair_groupoid(3));
        let part = relation_groupoid(&["a", "b", "c"], &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(part.num_arrows(), 5);
        assert_eq!(part.orbit_space().num_classes(), 2);
    }

    #[test]
    fn relation_groupoid_rejects_non_equivalences() {
        let err = relation_groupoid(&["a", "b"], &[(0, 0), (1, 1), (0, 1)]).unwrap_err();
        assert!(matches!(err, CalculusError::NotAnEquivalence(m) if m.contains("symmetric")));
        let err = relation_groupoid(&["a", "b"], &[(0, 0)]).unwrap_err();
        assert!(matches!(err, CalculusError::NotAnEquivalence(m) if m.contains("reflexive")));
        let err =
            relation_groupoid(&["a", "b", "c"], &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]).unwrap_err();
        assert!(matches!(err, CalculusError::NotAnEquivalence(m) if m.contains("transitive")));
    }

    #[test]
    fn groups_as_groupoids() {
        let z2 = group_as_groupoid(&GroupTable::cyclic(2));
        assert_eq!((z2.num_objects(), z2.num_arrows()), (1, 2));
        assert!(z2.is_fibrating());
        let trivial = group_as_groupoid(&GroupTable::trivial());
        assert_eq!(trivial, pair_groupoid(1));
        let z3 = group_as_groupoid(&GroupTable::cyclic(3));
        assert_eq!(z3.isotropy_group(ObjId(0)).unwrap().len(), 3);
        assert_eq!(z3.isotropy_groupoid(), z3);
    }

    #[test]
    fn group_table_rejects_non_groups() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let err = GroupTable::new(labels.clone(), vec![vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, CalculusError::NotAGroup(_)));
        let err = GroupTable::new(labels, vec![vec![0, 1], vec![1, 1]]).unwrap_err();
        assert!(matches!(err, CalculusError::NotAGroup(m) if m.contains("inverse")));
    }

    #[test]
    fn isotropy_groupoid_of_pair_groupoid_is_units() {
        let iso = pair_groupoid(2).isotropy_groupoid();
        assert_eq!(iso.num_objects(), 2);
        assert_eq!(iso.num_arrows(), 2);
        assert!(iso.arrows().all(|g| iso.is_unit(g)));
        let u = unit_groupoid(3);
        assert_eq!(u.isotropy_groupoid(), u);
    }

    #[test]
    fn fibrating_cases() {
        assert!(pair_groupoid(3).is_fibrating());
        assert!(!unit_groupoid(2).is_fibrating());
        assert!(unit_groupoid(1).is_fibrating());
    }

    #[test]
    fn isotropy_of_unknown_object() {
        assert_eq!(pair_groupoid(2).isotropy_group(ObjId(5)), Err(CalculusError::UnknownObject(5)));
    }

    #[test]
    fn data_round_trip() {
        let g = FiniteGroupoid::transitive(2, &GroupTable::cyclic(2));
        assert_eq!(validate_groupoid(&g.to_data()).unwrap(), g);
    }

    #[test]
    fn redirected_composition_is_reported() {
        let g = pair_groupoid(2);
        let mut data = g.to_data();
        let entry = data.comp.iter_mut().find(|t| t[0] == "(0,1)" && t[1] == "(1,0)").unwrap();
        entry[2] = "(1,1)".into();
        let report = validate_groupoid(&data).unwrap_err();
        assert!(report.has_axiom(GroupoidLaw::CompositionEndpoints) || report.has_axiom(GroupoidLaw::Associativity));
    }

    #[test]
    fn bad_unit_target_is_reported() {
        let g = pair_groupoid(2);
        let mut data = g.to_data();
        data.unit.insert("0".into(), "(1,0)".into());
        let report = validate_groupoid(&data).unwrap_err();
        assert!(report.has_axiom(GroupoidLaw::UnitEndpoints));
    }

    #[test]
    fn dangling_identifier_is_reported() {
        let mut data = pair_groupoid(2).to_data();
        data.comp[0][2] = "nope".into();
        let report = validate_groupoid(&data).unwrap_err();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DanglingIdentifier { id, .. } if id == "nope")));
    }

    #[test]
    fn size_guard() {
        let data = pair_groupoid(3).to_data();
        let report = validate_groupoid_with(&data, ValidationLimits { max_composable_pairs: 10 }).unwrap_err();
        assert!(matches!(report.violations[0], Violation::TooLarge { composable_pairs: 27, .. }));
    }
}
