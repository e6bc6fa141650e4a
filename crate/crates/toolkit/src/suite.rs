//! Law suites run over a generated corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use morita_core::{
    associator, bibundle_principality, compose_bibundles, fibrating_invariance_check, find_biequivariant_iso,
    identity_bibundle, is_biprincipal, left_unitor, morita_equivalence_relation_checks, orbit_bijection, right_unitor,
    roundtrip_natural_iso, tensor_action_inverse, transport_action, transport_map, validate_action, validate_bibundle,
    validate_bundle, validate_groupoid, verify_certificate, weak_inverse_witness, Action, ArrowId, Bibundle, Bundle,
    FiniteGroupoid, MoritaCertificate, RoundTrip, Side,
};
use serde::Serialize;

use crate::corpus::{equivariant_maps, Corpus, Named};
use crate::mutations::{
    action_mutations, bibundle_mutations, groupoid_mutations, groupoid_oracle_ok, violation_kinds, Mutant, Target,
};

pub const SUITES: [&str; 9] = [
    "axioms",
    "division",
    "coherence",
    "morita-forward",
    "morita-converse",
    "invariants-orbit",
    "invariants-fibrating",
    "invariants-actions",
    "equivalence",
];

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; expected one of {list}", list = SUITES.join(", "))]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub check: String,
    pub witness: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: BTreeMap<String, CheckCount>,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
    /// Mutants generated per targeted law.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub coverage: BTreeMap<String, usize>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn total(&self) -> usize {
        self.checks.values().map(|c| c.passed + c.failed).sum()
    }

    pub fn count(&self, check: &str) -> CheckCount {
        self.checks.get(check).copied().unwrap_or_default()
    }

    fn record(&mut self, instance: &str, check: &str, outcome: Result<(), String>) {
        let entry = self.checks.entry(check.to_string()).or_default();
        match outcome {
            Ok(()) => entry.passed += 1,
            Err(witness) => {
                entry.failed += 1;
                self.failures.push(Failure { instance: instance.to_string(), check: check.to_string(), witness });
            }
        }
    }

    fn expect(&mut self, instance: &str, check: &str, ok: bool, witness: impl FnOnce() -> String) {
        self.record(instance, check, if ok { Ok(()) } else { Err(witness()) });
    }
}

pub fn run_suite(corpus: &Corpus, name: &str) -> Result<SuiteReport, SuiteError> {
    let mut report = SuiteReport { suite: name.to_string(), ..Default::default() };
    match name {
        "axioms" => axioms(corpus, &mut report),
        "division" => division(corpus, &mut report),
        "coherence" => coherence(corpus, &mut report),
        "morita-forward" => morita_forward(corpus, &mut report),
        "morita-converse" => morita_converse(corpus, &mut report),
        "invariants-orbit" => invariants_orbit(corpus, &mut report),
        "invariants-fibrating" => invariants_fibrating(corpus, &mut report),
        "invariants-actions" => invariants_actions(corpus, &mut report),
        "equivalence" => equivalence(corpus, &mut report),
        other => return Err(SuiteError::UnknownSuite(other.to_string())),
    }
    Ok(report)
}

fn same(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn err_string<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn axioms(corpus: &Corpus, report: &mut SuiteReport) {
    let mut targets = BTreeMap::new();
    let mut mutants = 0;
    for g in &corpus.groupoids {
        let data = g.value.to_data();
        report.record(&g.name, "groupoid-validates", err_string(validate_groupoid(&data).map(|_| ())));
        report.expect(&g.name, "groupoid-oracle", groupoid_oracle_ok(&data), || "brute-force law check failed".into());
        for m in groupoid_mutations(&g.name, &g.value) {
            *targets.entry(format!("{:?}", m.target)).or_insert(0) += 1;
            mutants += 1;
            report.expect(&m.name, "mutation-detected", m.detected(), || {
                format!("reported {:?}", violation_kinds(&m.report()))
            });
        }
    }
    for a in &corpus.actions {
        let outcome = validate_action(a.value.groupoid(), &a.value.to_data()).map(|_| ());
        report.record(&a.name, "action-validates", err_string(outcome));
        for m in action_mutations(&a.name, &a.value) {
            *targets.entry(format!("{:?}", m.target)).or_insert(0) += 1;
            mutants += 1;
            report.expect(&m.name, "mutation-detected", m.detected(), || {
                format!("reported {:?}", violation_kinds(&m.report()))
            });
        }
    }
    for b in &corpus.bundles {
        let outcome = validate_bundle(b.value.action().groupoid(), &b.value.to_data()).map(|_| ());
        report.record(&b.name, "bundle-validates", err_string(outcome));
    }
    for b in &corpus.bibundles {
        let v = &b.value;
        let outcome = validate_bibundle(v.left_groupoid(), v.right_groupoid(), &v.to_data()).map(|_| ());
        report.record(&b.name, "bibundle-validates", err_string(outcome));
        for m in bibundle_mutations(&b.name, v) {
            *targets.entry(format!("{:?}", m.target)).or_insert(0) += 1;
            mutants += 1;
            report.expect(&m.name, "mutation-detected", m.detected(), || {
                format!("reported {:?}", violation_kinds(&m.report()))
            });
        }
    }
    for inj in &corpus.injected {
        let m = crate::mutations::Mutation {
            name: inj.name.clone(),
            target: Target::DomainMismatch,
            mutant: inj.value.clone(),
        };
        let r = m.report();
        let check = match inj.value {
            Mutant::Groupoid(_) => "groupoid-validates",
            Mutant::Action(..) => "action-validates",
            Mutant::Bibundle(..) => "bibundle-validates",
        };
        report.expect(&inj.name, check, r.is_ok(), || violation_kinds(&r).join(", "));
    }
    report.notes.push(format!("{mutants} mutants"));
    report.coverage = targets;
}

/// The arrows carrying `x2` to `x1`, found by trying every arrow.
fn carriers(a: &Action, x1: usize, x2: usize) -> Vec<ArrowId> {
    a.groupoid().arrows().filter(|&g| a.apply(g, x2) == Some(x1)).collect()
}

fn division_laws(name: &str, bundle: &Bundle, report: &mut SuiteReport) {
    let a = bundle.action();
    report.expect(
        name,
        "pre-principal-oracle",
        bundle.is_pre_principal() == bundle.is_free_and_fibre_transitive(),
        || "action map bijectivity disagrees with free and fibre-transitive".into(),
    );
    if !bundle.is_pre_principal() {
        return;
    }
    let d = match bundle.division_map() {
        Ok(d) => d,
        Err(e) => return report.record(name, "division-map", Err(e.to_string())),
    };
    report.record(name, "division-laws", d.check_laws(bundle));
    let mut oracle = Ok(());
    let mut second = Ok(());
    for x1 in a.points() {
        for x2 in a.points() {
            let found = carriers(a, x1, x2);
            let expected = if bundle.proj(x1) == bundle.proj(x2) { found.first().copied() } else { None };
            if found.len() > 1 || d.get(x1, x2) != expected {
                oracle = Err(format!("⟨{},{}⟩ = {:?}, carriers {found:?}", a.label(x1), a.label(x2), d.get(x1, x2)));
            }
            let Some(q) = d.get(x1, x2) else { continue };
            for &g in a.arrows_at(a.moment(x2)) {
                let gx2 = a.apply(g, x2).unwrap();
                if d.get(x1, gx2).and_then(|p| a.then(g, p)) != Some(q) {
                    second = Err(format!("moving {} by {} in ⟨{0},{1}⟩", a.label(x2), a.groupoid().arrow_label(g)));
                }
            }
        }
    }
    report.record(name, "division-oracle", oracle);
    report.record(name, "division-second-argument", second);
}

fn division(corpus: &Corpus, report: &mut SuiteReport) {
    for b in &corpus.bundles {
        division_laws(&b.name, &b.value, report);
    }
    // The division map of one side is invariant under the other side.
    for b in &corpus.bibundles {
        let v = &b.value;
        let (lb, rb) = (v.left_bundle(), v.right_bundle());
        if lb.is_pre_principal() {
            let d = lb.division_map().unwrap();
            let mut outcome = Ok(());
            for (x1, x2, q) in d.defined_pairs() {
                for h in v.right_groupoid().arrows() {
                    if let (Some(y1), Some(y2)) = (v.act_right(x1, h), v.act_right(x2, h)) {
                        if d.get(y1, y2) != Some(q) {
                            outcome = Err(format!("⟨x₁h,x₂h⟩ ≠ ⟨x₁,x₂⟩ at ({x1}, {x2}, {})", h.0));
                        }
                    }
                }
            }
            report.record(&b.name, "left-division-right-invariant", outcome);
        }
        if rb.is_pre_principal() {
            let d = rb.division_map().unwrap();
            let mut outcome = Ok(());
            for (x1, x2, q) in d.defined_pairs() {
                for g in v.left_groupoid().arrows() {
                    if let (Some(y1), Some(y2)) = (v.act_left(g, x1), v.act_left(g, x2)) {
                        if d.get(y1, y2) != Some(q) {
                            outcome = Err(format!("⟨gx₁,gx₂⟩ ≠ ⟨x₁,x₂⟩ at ({x1}, {x2}, {})", g.0));
                        }
                    }
                }
            }
            report.record(&b.name, "right-division-left-invariant", outcome);
        }
    }
}

/// Bijective, moment preserving, and commuting with both actions.
fn biequivariant(f: &[usize], s: &Bibundle, t: &Bibundle) -> Result<(), String> {
    if f.len() != s.len() || s.len() != t.len() {
        return Err(format!("sizes {} → {}", s.len(), t.len()));
    }
    let mut seen = vec![false; t.len()];
    for &y in f {
        if y >= t.len() || std::mem::replace(&mut seen[y], true) {
            return Err("not a bijection".into());
        }
    }
    for x in s.points() {
        if s.l(x) != t.l(f[x]) || s.r(x) != t.r(f[x]) {
            return Err(format!("moments differ at {x}"));
        }
        for g in s.left_groupoid().arrows() {
            if let Some(gx) = s.act_left(g, x) {
                if t.act_left(g, f[x]) != Some(f[gx]) {
                    return Err(format!("left action of {} at {x}", g.0));
                }
            }
        }
        for h in s.right_groupoid().arrows() {
            if let Some(xh) = s.act_right(x, h) {
                if t.act_right(f[x], h) != Some(f[xh]) {
                    return Err(format!("right action of {} at {x}", h.0));
                }
            }
        }
    }
    Ok(())
}

fn unitors(name: &str, b: &Bibundle, report: &mut SuiteReport) {
    let outcome = left_unitor(b).map_err(|e| e.to_string()).and_then(|w| {
        biequivariant(&w.forward, &w.composite.bibundle, b)?;
        for c in w.composite.tensor.classes() {
            for (g, x) in w.composite.tensor.members(c) {
                if b.act_left(ArrowId(g), x) != Some(w.forward[c]) {
                    return Err(format!("g⊗x ↦ g·x fails on class {c}"));
                }
            }
        }
        for x in b.points() {
            let unit = b.left_groupoid().unit(b.l(x)).0;
            if w.composite.tensor.class_of(unit, x) != Some(w.backward[x]) {
                return Err(format!("x ↦ 1⊗x fails at {x}"));
            }
        }
        Ok(())
    });
    report.record(name, "left-unitor", outcome);
    let outcome = right_unitor(b).map_err(|e| e.to_string()).and_then(|w| {
        biequivariant(&w.forward, &w.composite.bibundle, b)?;
        for c in w.composite.tensor.classes() {
            for (x, h) in w.composite.tensor.members(c) {
                if b.act_right(x, ArrowId(h)) != Some(w.forward[c]) {
                    return Err(format!("x⊗h ↦ x·h fails on class {c}"));
                }
            }
        }
        for x in b.points() {
            let unit = b.right_groupoid().unit(b.r(x)).0;
            if w.composite.tensor.class_of(x, unit) != Some(w.backward[x]) {
                return Err(format!("x ↦ x⊗1 fails at {x}"));
            }
        }
        Ok(())
    });
    report.record(name, "right-unitor", outcome);
}

fn associator_check(x: &Bibundle, y: &Bibundle, z: &Bibundle) -> Result<(), String> {
    let a = err_string(associator(x, y, z))?;
    biequivariant(&a.forward, &a.left_nested.bibundle, &a.right_nested.bibundle)?;
    let xy = err_string(compose_bibundles(x, y))?;
    let yz = err_string(compose_bibundles(y, z))?;
    for c in a.left_nested.tensor.classes() {
        for (cxy, zz) in a.left_nested.tensor.members(c) {
            for (xx, yy) in xy.tensor.members(cxy) {
                let inner = yz.tensor.class_of(yy, zz).ok_or("y⊗z undefined")?;
                if a.right_nested.tensor.class_of(xx, inner) != Some(a.forward[c]) {
                    return Err(format!("(x⊗y)⊗z ↦ x⊗(y⊗z) fails on class {c}"));
                }
            }
        }
    }
    if a.backward.iter().enumerate().any(|(d, &c)| a.forward[c] != d) {
        return Err("backward is not the inverse".into());
    }
    Ok(())
}

fn psi_check(x: &Bibundle, y: &Bibundle) -> Result<(), String> {
    let t = err_string(tensor_action_inverse(x, y))?;
    let b = &t.composite.bibundle;
    for (i, &(g, c)) in t.domain.iter().enumerate() {
        if t.codomain.get(t.phi[i]) != b.act_left(g, c).map(|gc| (gc, c)).as_ref() {
            return Err(format!("Φ(g, c) ≠ (g·c, c) at domain entry {i}"));
        }
        if t.psi[t.phi[i]] != i {
            return Err(format!("Ψ∘Φ ≠ id at domain entry {i}"));
        }
    }
    for (j, &i) in t.psi.iter().enumerate() {
        if t.phi[i] != j {
            return Err(format!("Φ∘Ψ ≠ id at codomain entry {j}"));
        }
    }
    Ok(())
}

/// `x₁⊗y = x₂⊗y` forces `x₁ = x₂` when the left action on `Y` is free.
fn cancellation_check(x: &Bibundle, y: &Bibundle) -> Result<(), String> {
    let c = err_string(compose_bibundles(x, y))?;
    for yy in y.points() {
        let mut seen = HashMap::new();
        for xx in x.points() {
            if let Some(class) = c.tensor.class_of(xx, yy) {
                if let Some(other) = seen.insert(class, xx) {
                    return Err(format!("{other}⊗{yy} = {xx}⊗{yy}"));
                }
            }
        }
    }
    Ok(())
}

fn chains(corpus: &Corpus) -> Vec<Vec<usize>> {
    let bibs = &corpus.bibundles;
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); bibs.len()];
    for (i, a) in bibs.iter().enumerate() {
        for (j, b) in bibs.iter().enumerate() {
            if same(a.value.right_groupoid(), b.value.left_groupoid()) {
                after[i].push(j);
            }
        }
    }
    after
}

fn coherence(corpus: &Corpus, report: &mut SuiteReport) {
    let bibs = &corpus.bibundles;
    for b in bibs {
        unitors(&b.name, &b.value, report);
    }
    let after = chains(corpus);
    let pre: Vec<_> = bibs.iter().map(|b| bibundle_principality(&b.value).left_pre_principal).collect();
    let free: Vec<_> = bibs.iter().map(|b| b.value.left().is_free()).collect();
    for (i, x) in bibs.iter().enumerate() {
        for &j in &after[i] {
            let y = &bibs[j];
            let pair = format!("{} ⊗ {}", x.name, y.name);
            if pre[i] && pre[j] {
                report.record(&pair, "tensor-action-inverse", psi_check(&x.value, &y.value));
            }
            if free[j] {
                report.record(&pair, "free-cancellation", cancellation_check(&x.value, &y.value));
            }
            for &k in &after[j] {
                let z = &bibs[k];
                let triple = format!("{pair} ⊗ {}", z.name);
                report.record(&triple, "associator", associator_check(&x.value, &y.value, &z.value));
            }
        }
    }
}

fn biprincipal(corpus: &Corpus) -> impl Iterator<Item = &Named<Bibundle>> {
    corpus.bibundles.iter().filter(|b| is_biprincipal(&b.value))
}

fn morita_forward(corpus: &Corpus, report: &mut SuiteReport) {
    for b in &corpus.bibundles {
        let v = &b.value;
        if !is_biprincipal(v) {
            report.expect(&b.name, "rejects-non-biprincipal", weak_inverse_witness(v).is_err(), || {
                "witness built for a bibundle that is not biprincipal".into()
            });
            continue;
        }
        let cert = match weak_inverse_witness(v) {
            Ok(c) => c,
            Err(e) => {
                report.record(&b.name, "certificate-verifies", Err(e.to_string()));
                continue;
            }
        };
        report.expect(&b.name, "certificate-verifies", verify_certificate(&cert), || "verification failed".into());
        report.record(&b.name, "certificate-formulas", certificate_formulas(v, &cert));
    }
}

/// `iso_G(x₁⊗x₂)` carries `x₂` to `x₁`; `iso_H(x₁⊗x₂)` carries `x₁` to `x₂`.
fn certificate_formulas(b: &Bibundle, cert: &MoritaCertificate) -> Result<(), String> {
    let op = b.opposite();
    if cert.inverse != op.to_raw() {
        return Err("inverse is not the opposite bibundle".into());
    }
    let bc = err_string(compose_bibundles(b, &op))?;
    for c in bc.tensor.classes() {
        for (x1, x2) in bc.tensor.members(c) {
            if b.act_left(cert.iso_g[c], x2) != Some(x1) {
                return Err(format!("iso_G on class {c} does not carry {x2} to {x1}"));
            }
        }
    }
    let cb = err_string(compose_bibundles(&op, b))?;
    for c in cb.tensor.classes() {
        for (x1, x2) in cb.tensor.members(c) {
            if b.act_right(x1, cert.iso_h[c]) != Some(x2) {
                return Err(format!("iso_H on class {c} does not carry {x1} to {x2}"));
            }
        }
    }
    Ok(())
}

fn surjective_moments(b: &Bibundle) -> bool {
    let hit = |n: usize, m: &[morita_core::ObjId]| {
        let seen: BTreeSet<usize> = m.iter().map(|o| o.0).collect();
        seen.len() == n
    };
    hit(b.left_groupoid().num_objects(), b.left().moments())
        && hit(b.right_groupoid().num_objects(), b.right().moments())
}

/// Exhaustive search for weak inverses among the corpus bibundles, which
/// contain every bibundle up to isomorphism within the carrier bound.
fn morita_converse(corpus: &Corpus, report: &mut SuiteReport) {
    let bibs = &corpus.bibundles;
    let index =
        |g: &Arc<FiniteGroupoid>| corpus.groupoids.iter().position(|n| same(&n.value, g)).expect("corpus groupoid");
    let ends: Vec<(usize, usize)> =
        bibs.iter().map(|b| (index(b.value.left_groupoid()), index(b.value.right_groupoid()))).collect();
    let ids: Vec<Bibundle> = corpus.groupoids.iter().map(|g| identity_bibundle(&g.value)).collect();
    let mut by_ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, &e) in ends.iter().enumerate() {
        by_ends.entry(e).or_default().push(i);
    }
    let weak_unit = |b: &Bibundle, c: &Bibundle, target: &Bibundle| -> Option<(Vec<usize>, Vec<ArrowId>)> {
        if b.len() * c.len() < target.len() {
            return None;
        }
        let comp = compose_bibundles(b, c).ok()?;
        if comp.tensor.num_classes() != target.len() {
            return None;
        }
        let f = find_biequivariant_iso(&comp.bibundle, target)?;
        let arrows = f.iter().map(|&a| ArrowId(a)).collect();
        Some((f, arrows))
    };
    let mut pairs = 0usize;
    let mut inverted = vec![false; bibs.len()];
    for (i, b) in bibs.iter().enumerate() {
        let (g, h) = ends[i];
        for &j in by_ends.get(&(h, g)).map(Vec::as_slice).unwrap_or(&[]) {
            pairs += 1;
            let c = &bibs[j];
            let Some((_, iso_g)) = weak_unit(&b.value, &c.value, &ids[g]) else {
                continue;
            };
            let Some((_, iso_h)) = weak_unit(&c.value, &b.value, &ids[h]) else {
                continue;
            };
            let cert = MoritaCertificate { bibundle: b.value.to_raw(), inverse: c.value.to_raw(), iso_g, iso_h };
            let pair = format!("{} / {}", b.name, c.name);
            report
                .expect(&pair, "certificate-verifies", verify_certificate(&cert), || "found maps do not verify".into());
            report.expect(&pair, "biprincipal", is_biprincipal(&b.value) && is_biprincipal(&c.value), || {
                format!("{:?} / {:?}", bibundle_principality(&b.value), bibundle_principality(&c.value))
            });
            report.expect(
                &pair,
                "surjective-moments",
                surjective_moments(&b.value) && surjective_moments(&c.value),
                || "a moment map misses an object".into(),
            );
            let free = |v: &Bibundle| v.left().is_free() && v.right().is_free();
            report.expect(&pair, "free-actions", free(&b.value) && free(&c.value), || "an action is not free".into());
            inverted[i] = true;
        }
    }
    // Within the bounds the converse search must also be complete.
    for (i, b) in bibs.iter().enumerate() {
        if is_biprincipal(&b.value) {
            report.expect(&b.name, "biprincipal-has-inverse", inverted[i], || "no weak inverse found in corpus".into());
        }
    }
    report.notes.push(format!("{pairs} bibundle pairs searched"));
}

fn invariants_orbit(corpus: &Corpus, report: &mut SuiteReport) {
    for b in biprincipal(corpus) {
        let v = &b.value;
        let outcome = err_string(orbit_bijection(v)).and_then(|ob| {
            // Every point decides the image of the orbit under it.
            for x in v.points() {
                if ob.forward[ob.g_orbits.class_of(v.l(x).0)] != ob.h_orbits.class_of(v.r(x).0) {
                    return Err(format!("point {x} disagrees with the forward map"));
                }
                if ob.backward[ob.h_orbits.class_of(v.r(x).0)] != ob.g_orbits.class_of(v.l(x).0) {
                    return Err(format!("point {x} disagrees with the backward map"));
                }
            }
            Ok(())
        });
        report.record(&b.name, "orbit-bijection", outcome);
        for y in left_actions(corpus, v.right_groupoid()) {
            let instance = format!("{} ⊗ {}", b.name, y.name);
            let outcome = err_string(transport_action(v, &y.value)).and_then(|t| {
                let (before, after) = (y.value.orbit_space().num_classes(), t.action.orbit_space().num_classes());
                if before != after {
                    return Err(format!("{before} orbits become {after}"));
                }
                let id: Vec<usize> = y.value.points().collect();
                let mapped = err_string(transport_map(&t, &t, &id))?;
                if mapped.iter().enumerate().any(|(c, &d)| c != d) {
                    return Err("id ⊗ id is not the identity".into());
                }
                Ok(())
            });
            report.record(&instance, "transport-orbits", outcome);
        }
    }
}

fn invariants_fibrating(corpus: &Corpus, report: &mut SuiteReport) {
    for b in biprincipal(corpus) {
        let outcome = match fibrating_invariance_check(&b.value) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!(
                "fibrating {} vs {}",
                b.value.left_groupoid().is_fibrating(),
                b.value.right_groupoid().is_fibrating()
            )),
            Err(e) => Err(e.to_string()),
        };
        report.record(&b.name, "fibrating-invariance", outcome);
    }
}

fn left_actions<'a>(corpus: &'a Corpus, g: &'a Arc<FiniteGroupoid>) -> impl Iterator<Item = &'a Named<Action>> + 'a {
    corpus.actions.iter().filter(move |a| a.value.side() == Side::Left && same(a.value.groupoid(), g))
}

fn invariants_actions(corpus: &Corpus, report: &mut SuiteReport) {
    let mut squares = 0usize;
    for b in biprincipal(corpus) {
        let v = &b.value;
        let ys: Vec<&Named<Action>> = left_actions(corpus, v.right_groupoid()).collect();
        let trips: Vec<Option<RoundTrip>> = ys
            .iter()
            .map(|y| {
                let instance = format!("{} ⊗ {}", b.name, y.name);
                let rt = roundtrip_natural_iso(v, &y.value);
                let outcome = err_string(rt.clone()).and_then(|rt| {
                    let mut seen = vec![false; y.value.len()];
                    for &p in &rt.mu {
                        if std::mem::replace(&mut seen[p], true) {
                            return Err("μ_Y is not injective".into());
                        }
                    }
                    for c in rt.outer.action.points() {
                        for &g in rt.outer.action.arrows_at(rt.outer.action.moment(c)) {
                            let gc = rt.outer.action.apply(g, c).unwrap();
                            if y.value.apply(g, rt.mu[c]) != Some(rt.mu[gc]) {
                                return Err(format!("μ_Y is not equivariant on class {c}"));
                            }
                        }
                    }
                    Ok(())
                });
                report.record(&instance, "mu-equivariant-bijection", outcome);
                rt.ok()
            })
            .collect();
        for (i, y) in ys.iter().enumerate() {
            for (j, z) in ys.iter().enumerate() {
                let (Some(ry), Some(rz)) = (&trips[i], &trips[j]) else {
                    continue;
                };
                for phi in equivariant_maps(&y.value, &z.value) {
                    squares += 1;
                    let outcome = transport_map(&ry.inner, &rz.inner, &phi)
                        .and_then(|inner| transport_map(&ry.outer, &rz.outer, &inner))
                        .map_err(|e| e.to_string())
                        .and_then(|outer| {
                            match ry.outer.tensor.classes().find(|&c| phi[ry.mu[c]] != rz.mu[outer[c]]) {
                                Some(c) => Err(format!("square fails on class {c} for φ = {phi:?}")),
                                None => Ok(()),
                            }
                        });
                    report.record(&format!("{} ⊗ {} → {}", b.name, y.name, z.name), "naturality", outcome);
                }
            }
        }
    }
    report.notes.push(format!("{squares} naturality squares"));
}

fn equivalence(corpus: &Corpus, report: &mut SuiteReport) {
    let groupoids: Vec<_> = corpus.groupoids.iter().map(|g| g.value.clone()).collect();
    let bibundles: Vec<_> = corpus.bibundles.iter().map(|b| b.value.clone()).collect();
    let r = morita_equivalence_relation_checks(&groupoids, &bibundles);
    for _ in 0..r.checked.saturating_sub(r.failures.len()) {
        report.record("corpus", "equivalence-relation", Ok(()));
    }
    for f in r.failures {
        report.record("corpus", "equivalence-relation", Err(f));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_corpus, CorpusSpec};

    fn tiny() -> Corpus {
        generate_corpus(&CorpusSpec {
            max_objects: 2,
            max_arrows: 2,
            max_carrier: 2,
            max_bibundle_carrier: Some(2),
            seed: 0,
        })
        .unwrap()
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite(&tiny(), "nope"), Err(SuiteError::UnknownSuite(_))));
    }

    #[test]
    fn every_suite_passes_on_a_tiny_corpus() {
        let corpus = tiny();
        for name in SUITES {
            let r = run_suite(&corpus, name).unwrap();
            assert!(r.passed(), "{name}: {:?}", &r.failures[..r.failures.len().min(3)]);
            assert!(r.total() > 0, "{name} checked nothing");
        }
    }

    #[test]
    fn injected_corruption_is_pinpointed() {
        let mut corpus = tiny();
        let g = &corpus.groupoids[0].value;
        let mut bad = g.to_data();
        bad.unit.clear();
        corpus.injected.push(Named { name: "broken".into(), value: Mutant::Groupoid(bad) });
        let r = run_suite(&corpus, "axioms").unwrap();
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].instance, "broken");
        assert_eq!(r.failures[0].check, "groupoid-validates");
    }
}
