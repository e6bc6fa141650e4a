//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::ops::ControlFlow;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use morita_core::enumerate::{for_each_bibundle, SearchOptions};
use morita_core::{
    decide_morita, group_as_groupoid, is_biprincipal, pair_groupoid, unit_groupoid, verify_certificate,
    weak_inverse_witness, GroupTable,
};
use morita_toolkit::corpus::{generate_corpus, Corpus, CorpusSpec};
use morita_toolkit::format::{load, save, Object};
use morita_toolkit::mutations::all_targets;
use morita_toolkit::suite::{run_suite, SuiteReport};

fn spec(max_objects: usize, max_arrows: usize, max_carrier: usize, bibundle_carrier: usize) -> CorpusSpec {
    CorpusSpec { max_objects, max_arrows, max_carrier, max_bibundle_carrier: Some(bibundle_carrier), seed: 0 }
}

fn corpus(s: CorpusSpec) -> Corpus {
    generate_corpus(&s).expect("bounds are small")
}

fn suite(c: &Corpus, name: &str) -> SuiteReport {
    run_suite(c, name).expect("known suite")
}

fn failures(r: &SuiteReport) -> String {
    r.failures
        .iter()
        .take(3)
        .map(|f| format!("{} [{}]: {}", f.instance, f.check, f.witness))
        .collect::<Vec<_>>()
        .join("; ")
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn within(limit: Duration, started: Instant, mut v: Verdict) -> Verdict {
    let took = started.elapsed();
    v.detail = format!("{}; {:.2}s (limit {}s)", v.detail, took.as_secs_f64(), limit.as_secs());
    v.ok &= took <= limit;
    v
}

fn axioms() -> Verdict {
    let t = Instant::now();
    let c = corpus(spec(3, 6, 3, 2));
    let r = suite(&c, "axioms");
    let missing: Vec<String> =
        all_targets().into_iter().map(|t| format!("{t:?}")).filter(|k| !r.coverage.contains_key(k)).collect();
    let mutants: usize = r.coverage.values().sum();
    let v = verdict(
        r.passed() && missing.is_empty() && r.count("mutation-detected").passed == mutants,
        format!(
            "{} groupoids, {} actions, {} checks, {mutants} mutants detected; uncovered {missing:?} {}",
            c.groupoids.len(),
            c.actions.len(),
            r.total(),
            failures(&r)
        ),
    );
    within(Duration::from_secs(10), t, v)
}

fn division() -> Verdict {
    let t = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [spec(3, 6, 5, 3), spec(2, 4, 5, 5)] {
        let c = corpus(s);
        let r = suite(&c, "division");
        let laws = r.count("division-laws").passed;
        let both = r.count("left-division-right-invariant").passed + r.count("right-division-left-invariant").passed;
        ok &= r.passed() && laws > 0 && both > 0;
        detail.push(format!("{s}: {laws} pre-principal bundles, {both} bibundle sides {}", failures(&r)));
    }
    within(Duration::from_secs(30), t, verdict(ok, detail.join("; ")))
}

fn coherence(r: &SuiteReport) -> Verdict {
    let (l, rr, a) = (r.count("left-unitor"), r.count("right-unitor"), r.count("associator"));
    let ok = r.count("left-unitor").failed + r.count("right-unitor").failed + a.failed == 0
        && l.passed > 0
        && rr.passed > 0
        && a.passed > 0;
    verdict(ok, format!("{} unitor pairs, {} triples {}", l.passed, a.passed, failures(r)))
}

fn psi_inverse(r: &SuiteReport) -> Verdict {
    let p = r.count("tensor-action-inverse");
    let c = r.count("free-cancellation");
    verdict(
        p.failed == 0 && c.failed == 0 && p.passed > 0,
        format!("{} left pre-principal pairs, {} cancellation pairs", p.passed, c.passed),
    )
}

fn forward(c: &Corpus) -> Verdict {
    let r = suite(c, "morita-forward");
    let biprincipal = c.bibundles.iter().filter(|b| is_biprincipal(&b.value)).count();
    let verified = r.count("certificate-verifies").passed;
    verdict(
        r.passed() && verified == biprincipal && biprincipal > 0,
        format!("{verified} of {biprincipal} biprincipal bibundles certified {}", failures(&r)),
    )
}

fn converse() -> Verdict {
    let t = Instant::now();
    let c = corpus(spec(2, 4, 4, 4));
    let r = suite(&c, "morita-converse");
    let found = r.count("certificate-verifies").passed;
    let v = verdict(
        r.passed() && found > 0,
        format!("{found} certificates found, {} {}", r.notes.join(", "), failures(&r)),
    );
    within(Duration::from_secs(300), t, v)
}

fn negative() -> Verdict {
    let z2 = Arc::new(group_as_groupoid(&GroupTable::cyclic(2)));
    let trivial = Arc::new(group_as_groupoid(&GroupTable::trivial()));
    let none = decide_morita(&z2, &trivial, 3);
    let mut unpruned = 0;
    let mut principal = 0;
    for k in 0..=3 {
        let _ = for_each_bibundle(&z2, &trivial, k, SearchOptions::default(), &mut |b| {
            unpruned += 1;
            principal += usize::from(is_biprincipal(&b));
            ControlFlow::Continue(())
        });
    }
    let pair = decide_morita(&Arc::new(pair_groupoid(2)), &Arc::new(unit_groupoid(1)), 2);
    let found = pair.certificate.as_ref().is_some_and(verify_certificate);
    verdict(
        none.certificate.is_none() && principal == 0 && unpruned > 0 && found,
        format!(
            "Z/2 vs trivial: absent after {} pruned candidates, {principal} of {unpruned} unpruned biprincipal; \
             pair(2) vs point: verified {found}",
            none.searched
        ),
    )
}

fn invariants(c: &Corpus) -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["invariants-orbit", "invariants-fibrating", "invariants-actions"] {
        let r = suite(c, name);
        ok &= r.passed() && r.total() > 0;
        detail.push(format!("{name} {} checks {}", r.total(), failures(&r)));
    }
    let r = suite(c, "invariants-actions");
    ok &= r.count("naturality").passed > 0;
    verdict(ok, detail.join("; "))
}

fn equivalence(c: &Corpus) -> Verdict {
    let r = suite(c, "equivalence");
    verdict(r.passed() && r.total() > 0, format!("{} instances {}", r.total(), failures(&r)))
}

fn format_round_trip(c: &Corpus) -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut objects: Vec<Object> = Vec::new();
    objects.extend(c.groupoids.iter().take(20).map(|g| Object::Groupoid(g.value.clone())));
    objects.extend(c.actions.iter().step_by(40).take(20).map(|a| Object::Action(a.value.clone())));
    objects.extend(c.bundles.iter().step_by(997).take(20).map(|b| Object::Bundle(b.value.clone())));
    let principal: Vec<_> = c.bibundles.iter().filter(|b| is_biprincipal(&b.value)).collect();
    objects.extend(principal.iter().take(10).map(|b| Object::Bibundle(b.value.clone())));
    objects.extend(
        principal.iter().take(10).map(|b| Object::Certificate(Box::new(weak_inverse_witness(&b.value).unwrap()))),
    );
    let rest = 100 - objects.len();
    objects.extend(c.bibundles.iter().step_by(509).take(rest).map(|b| Object::Bibundle(b.value.clone())));
    let mut same = 0;
    for (i, o) in objects.iter().enumerate() {
        let path = dir.path().join(format!("o{i}.json"));
        if save(o, &path).is_ok() && load(&path).ok().as_ref() == Some(o) {
            same += 1;
        }
    }
    let again = corpus(c.spec) == *c;
    verdict(
        same == objects.len() && objects.len() == 100 && again,
        format!("{same}/{} objects round-trip; regeneration identical: {again}", objects.len()),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    results.push((1, "axiom suite and mutation detection", axioms()));
    results.push((2, "division-map laws", division()));
    let small = corpus(spec(2, 3, 2, 2));
    let coh = suite(&small, "coherence");
    results.push((3, "unitors and associator", coherence(&coh)));
    results.push((4, "tensor action map inverse", psi_inverse(&coh)));
    let main_corpus = corpus(spec(3, 6, 3, 3));
    results.push((5, "biprincipal bibundles are weakly invertible", forward(&main_corpus)));
    results.push((6, "weakly invertible bibundles are biprincipal", converse()));
    results.push((7, "bounded Morita decisions", negative()));
    results.push((8, "Morita invariants", invariants(&main_corpus)));
    results.push((9, "equivalence relation", equivalence(&main_corpus)));
    results.push((10, "file round trip and determinism", format_round_trip(&main_corpus)));
    let mut all = true;
    for (n, name, v) in &results {
        println!("{} criterion {n:>2} {name}: {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        all &= v.ok;
    }
    println!("acceptance finished in {:.1}s", started.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
