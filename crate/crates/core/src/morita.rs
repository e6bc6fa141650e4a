//! Biprincipality, weak inverses with certificates, the bounded Morita search
//! and the invariants carried by biprincipal bibundles.

use std::ops::ControlFlow;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{is_bijection, is_equivariant, Action};
use crate::bibundle::{check_bibundle, identity_bibundle, is_biequivariant_iso, Bibundle, RawBibundle};
use crate::enumerate::{for_each_bibundle, SearchOptions};
use crate::error::CalculusError;
use crate::groupoid::{ArrowId, FiniteGroupoid};
use crate::partition::OrbitPartition;
use crate::tensor::{compose_bibundles, induced_left_action, BalancedTensor, Composite};

pub fn is_biprincipal(b: &Bibundle) -> bool {
    b.principality().biprincipal()
}

/// The left action map `Φ(g, c) = (g·c, c)` of a composite bibundle and its
/// inverse `Ψ` built from the two division maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorActionInverse {
    pub composite: Composite,
    /// Pairs `(g, c)` with `src(g) = L(c)`.
    pub domain: Vec<(ArrowId, usize)>,
    /// Pairs `(c₁, c₂)` in a common fibre of `R`.
    pub codomain: Vec<(usize, usize)>,
    /// `phi[i]` indexes `codomain`.
    pub phi: Vec<usize>,
    /// `psi[j]` indexes `domain`.
    pub psi: Vec<usize>,
}

impl TensorActionInverse {
    pub fn psi_after_phi_is_identity(&self) -> bool {
        self.phi.iter().enumerate().all(|(i, &j)| self.psi[j] == i)
    }

    pub fn phi_after_psi_is_identity(&self) -> bool {
        self.psi.iter().enumerate().all(|(j, &i)| self.phi[i] == j)
    }
}

/// `Ψ(x₁⊗y₁, x₂⊗y₂) = (⟨x₁·⟨y₁,y₂⟩, x₂⟩, x₂⊗y₂)`, checked on every pair of
/// representatives.
pub fn tensor_action_inverse(x: &Bibundle, y: &Bibundle) -> Result<TensorActionInverse, CalculusError> {
    let composite = compose_bibundles(x, y)?;
    let dx = x.left_bundle().division_map()?;
    let dy = y.left_bundle().division_map()?;
    let bundle = composite.bibundle.left_bundle();
    let map = bundle.action_map();
    let index: std::collections::HashMap<(ArrowId, usize), usize> =
        map.domain.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let t = &composite.tensor;
    let mut psi = Vec::with_capacity(map.codomain.len());
    for &(c1, c2) in &map.codomain {
        let mut value = None;
        for (x1, y1) in t.members(c1) {
            for (x2, y2) in t.members(c2) {
                let h = dy.divide(y1, y2)?;
                let x1h = x.act_right(x1, h).ok_or_else(|| CalculusError::DomainMismatch("x₁·h".into()))?;
                let g = dx.divide(x1h, x2)?;
                if value.is_some_and(|v| v != g) {
                    return Err(CalculusError::IllDefined(format!("Ψ at classes ({c1}, {c2})")));
                }
                value = Some(g);
            }
        }
        let g = value.expect("classes are nonempty");
        let i =
            index.get(&(g, c2)).ok_or_else(|| CalculusError::DomainMismatch("Ψ leaves the action domain".into()))?;
        psi.push(*i);
    }
    Ok(TensorActionInverse { composite, domain: map.domain, codomain: map.codomain, phi: map.values, psi })
}

/// A bibundle, a proposed inverse, and arrow-valued maps on the classes of
/// both composites. Constituents are kept as raw tables so that a certificate
/// read from elsewhere can be re-checked from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoritaCertificate {
    pub bibundle: RawBibundle,
    pub inverse: RawBibundle,
    /// Class `c` of `B ⊗_H C` goes to arrow `iso_g[c]` of `G`.
    pub iso_g: Vec<ArrowId>,
    /// Class `c` of `C ⊗_G B` goes to arrow `iso_h[c]` of `H`.
    pub iso_h: Vec<ArrowId>,
}

/// Why a certificate fails; `None` from [`certificate_failure`] means it
/// verifies.
pub fn certificate_failure(cert: &MoritaCertificate) -> Option<CalculusError> {
    let run = || -> Result<(), CalculusError> {
        for raw in [&cert.bibundle, &cert.inverse] {
            let report = check_bibundle(raw);
            if !report.is_ok() {
                return Err(CalculusError::Invalid(report));
            }
        }
        let b = Bibundle::from_raw(cert.bibundle.clone())?;
        let c = Bibundle::from_raw(cert.inverse.clone())?;
        if b.left_groupoid() != c.right_groupoid() || b.right_groupoid() != c.left_groupoid() {
            return Err(CalculusError::GroupoidMismatch("inverse runs between other groupoids".into()));
        }
        for (first, second, iso) in [(&b, &c, &cert.iso_g), (&c, &b, &cert.iso_h)] {
            let composite = compose_bibundles(first, second)?;
            let map: Vec<usize> = iso.iter().map(|a| a.0).collect();
            if !is_biequivariant_iso(&map, &composite.bibundle, &identity_bibundle(first.left_groupoid())) {
                return Err(CalculusError::WitnessFailed("map is not a biequivariant bijection".into()));
            }
        }
        Ok(())
    };
    run().err()
}

pub fn verify_certificate(cert: &MoritaCertificate) -> bool {
    certificate_failure(cert).is_none()
}

/// `φ_G(x₁⊗x₂) = ⟨x₁, x₂⟩` on `X ⊗_H X̄`.
pub fn phi_g(b: &Bibundle, composite: &Composite) -> Result<Vec<ArrowId>, CalculusError> {
    let d = b.left_bundle().division_map()?;
    let values = composite.tensor.descend(|x1, x2| d.get(x1, x2))?;
    values.into_iter().map(|v| v.ok_or_else(|| CalculusError::DomainMismatch("⟨x₁, x₂⟩ undefined".into()))).collect()
}

/// `φ_H(x₁⊗x₂)` on `X̄ ⊗_G X`: the unique `h` with `x₁·h = x₂`.
pub fn phi_h(b: &Bibundle, composite: &Composite) -> Result<Vec<ArrowId>, CalculusError> {
    let d = b.right_bundle().division_map()?;
    let values = composite.tensor.descend(|x1, x2| d.get(x2, x1))?;
    values.into_iter().map(|v| v.ok_or_else(|| CalculusError::DomainMismatch("division undefined".into()))).collect()
}

/// The opposite bibundle with both division-map isomorphisms.
pub fn weak_inverse_witness(b: &Bibundle) -> Result<MoritaCertificate, CalculusError> {
    if !is_biprincipal(b) {
        return Err(CalculusError::NotBiprincipal);
    }
    let c = b.opposite();
    let bc = compose_bibundles(b, &c)?;
    let cb = compose_bibundles(&c, b)?;
    let cert =
        MoritaCertificate { bibundle: b.to_raw(), inverse: c.to_raw(), iso_g: phi_g(b, &bc)?, iso_h: phi_h(b, &cb)? };
    match certificate_failure(&cert) {
        None => Ok(cert),
        Some(e) => Err(CalculusError::WitnessFailed(e.to_string())),
    }
}

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoritaSearch {
    pub certificate: Option<MoritaCertificate>,
    /// Candidate bibundles examined.
    pub searched: usize,
    pub budget: usize,
}

/// Searches carriers of size `0..=budget` in enumeration order and returns a
/// certificate for the first biprincipal bibundle.
pub fn decide_morita(g: &Arc<FiniteGroupoid>, h: &Arc<FiniteGroupoid>, budget: usize) -> MoritaSearch {
    let options = SearchOptions { free_only: true, surjective_moments: true };
    let mut searched = 0;
    let mut found = None;
    for k in 0..=budget {
        let flow = for_each_bibundle(g, h, k, options, &mut |b| {
            searched += 1;
            if is_biprincipal(&b) {
                found = Some(weak_inverse_witness(&b).expect("biprincipal bibundles have witnesses"));
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if flow.is_break() {
            break;
        }
    }
    MoritaSearch { certificate: found, searched, budget }
}

/// Failures found while checking that Morita equivalence is reflexive,
/// symmetric and transitive on a collection of instances.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn morita_equivalence_relation_checks(
    groupoids: &[Arc<FiniteGroupoid>],
    bibundles: &[Bibundle],
) -> EquivalenceReport {
    let mut report = EquivalenceReport::default();
    for (i, g) in groupoids.iter().enumerate() {
        report.checked += 1;
        let id = identity_bibundle(g);
        if !is_biprincipal(&id) || !verify_witness(&id) {
            report.failures.push(format!("reflexivity fails for groupoid {i}"));
        }
    }
    let principal: Vec<&Bibundle> = bibundles.iter().filter(|b| is_biprincipal(b)).collect();
    for (i, b) in principal.iter().enumerate() {
        report.checked += 1;
        let op = b.opposite();
        if !is_biprincipal(&op) || !verify_witness(&op) {
            report.failures.push(format!("symmetry fails for bibundle {i}"));
        }
    }
    for (i, b1) in principal.iter().enumerate() {
        for (j, b2) in principal.iter().enumerate() {
            if b1.right_groupoid() != b2.left_groupoid() {
                continue;
            }
            report.checked += 1;
            match compose_bibundles(b1, b2) {
                Ok(c) if is_biprincipal(&c.bibundle) && verify_witness(&c.bibundle) => {}
                _ => report.failures.push(format!("transitivity fails for bibundles {i}, {j}")),
            }
        }
    }
    report
}

fn verify_witness(b: &Bibundle) -> bool {
    weak_inverse_witness(b).map(|c| verify_certificate(&c)).unwrap_or(false)
}

/// Mutually inverse maps between the orbit spaces of `G` and `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBijection {
    pub g_orbits: OrbitPartition,
    pub h_orbits: OrbitPartition,
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

/// Sends the orbit of `a` to the orbit of `r(x)` for any `x` over `a`; the
/// answer is compared across every object of the orbit and every point over
/// it.
pub fn orbit_bijection(b: &Bibundle) -> Result<OrbitBijection, CalculusError> {
    if !is_biprincipal(b) {
        return Err(CalculusError::NotBiprincipal);
    }
    let g_orbits = b.left_groupoid().orbit_space();
    let h_orbits = b.right_groupoid().orbit_space();
    let along = |from: &OrbitPartition,
                 to: &OrbitPartition,
                 here: &dyn Fn(usize) -> usize,
                 there: &dyn Fn(usize) -> usize|
     -> Result<Vec<usize>, CalculusError> {
        (0..from.num_classes())
            .map(|c| {
                let mut image = None;
                for x in b.points().filter(|&x| from.class_of(here(x)) == c) {
                    let d = to.class_of(there(x));
                    if image.is_some_and(|e| e != d) {
                        return Err(CalculusError::IllDefined(format!("orbit {c} has two images")));
                    }
                    image = Some(d);
                }
                image.ok_or(CalculusError::NotBiprincipal)
            })
            .collect()
    };
    let forward = along(&g_orbits, &h_orbits, &|x| b.l(x).0, &|x| b.r(x).0)?;
    let backward = along(&h_orbits, &g_orbits, &|x| b.r(x).0, &|x| b.l(x).0)?;
    let inverse = forward.iter().enumerate().all(|(c, &d)| backward.get(d) == Some(&c))
        && backward.iter().enumerate().all(|(d, &c)| forward.get(c) == Some(&d));
    if !inverse {
        return Err(CalculusError::WitnessFailed("orbit maps are not mutually inverse".into()));
    }
    Ok(OrbitBijection { g_orbits, h_orbits, forward, backward })
}

/// Whether `G` and `H` are both fibrating or both not.
pub fn fibrating_invariance_check(b: &Bibundle) -> Result<bool, CalculusError> {
    if !is_biprincipal(b) {
        return Err(CalculusError::NotBiprincipal);
    }
    Ok(b.left_groupoid().is_fibrating() == b.right_groupoid().is_fibrating())
}

/// A left `H`-action carried to a left `G`-action on `X ⊗_H Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transported {
    pub tensor: BalancedTensor,
    pub action: Action,
}

pub fn transport_action(b: &Bibundle, y: &Action) -> Result<Transported, CalculusError> {
    let (tensor, action) = induced_left_action(b, y)?;
    Ok(Transported { tensor, action })
}

/// `id_X ⊗ φ` between two transported actions.
pub fn transport_map(source: &Transported, target: &Transported, phi: &[usize]) -> Result<Vec<usize>, CalculusError> {
    let map = source.tensor.map_into(&target.tensor, |x| x, |y| phi[y])?;
    if !is_equivariant(&map, &source.action, &target.action) {
        return Err(CalculusError::WitnessFailed("id ⊗ φ is not equivariant".into()));
    }
    Ok(map)
}

/// `μ_Y : X̄ ⊗_G (X ⊗_H Y) → Y` as the composite of the associator,
/// `φ_H ⊗ id` and the action map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub inner: Transported,
    pub outer: Transported,
    pub mu: Vec<usize>,
}

pub fn roundtrip_natural_iso(b: &Bibundle, y: &Action) -> Result<RoundTrip, CalculusError> {
    if !is_biprincipal(b) {
        return Err(CalculusError::NotBiprincipal);
    }
    let h = b.right_groupoid();
    let op = b.opposite();
    let inner = transport_action(b, y)?;
    let outer = transport_action(&op, &inner.action)?;
    let cb = compose_bibundles(&op, b)?;
    let (nested, _) = induced_left_action(&cb.bibundle, y)?;
    // A_Y: [x₁, [x₂, y]] ↦ [[x₁, x₂], y]
    let mut assoc = Vec::with_capacity(outer.tensor.num_classes());
    for c in outer.tensor.classes() {
        let mut image = None;
        for (x1, inner_class) in outer.tensor.members(c) {
            for (x2, yy) in inner.tensor.members(inner_class) {
                let c12 = cb.tensor.class_of(x1, x2).ok_or_else(|| CalculusError::DomainMismatch("x₁⊗x₂".into()))?;
                let d = nested.class_of(c12, yy).ok_or_else(|| CalculusError::DomainMismatch("(x₁⊗x₂)⊗y".into()))?;
                if image.is_some_and(|e| e != d) {
                    return Err(CalculusError::IllDefined(format!("A_Y on class {c}")));
                }
                image = Some(d);
            }
        }
        assoc.push(image.expect("classes are nonempty"));
    }
    let phi = phi_h(b, &cb)?;
    let (hy, _) = induced_left_action(&identity_bibundle(h), y)?;
    let phi_id = nested.map_into(&hy, |c| phi[c].0, |yy| yy)?;
    let act = hy.descend(|a, yy| y.apply(ArrowId(a), yy).expect("src(a) = l(y)"))?;
    let mu: Vec<usize> = assoc.iter().map(|&c| act[phi_id[c]]).collect();
    if !is_bijection(&mu, y.len()) || !is_equivariant(&mu, &outer.action, y) {
        return Err(CalculusError::WitnessFailed("μ_Y is not an equivariant bijection".into()));
    }
    Ok(RoundTrip { inner, outer, mu })
}

/// `φ ∘ μ_Y = μ_Z ∘ (id ⊗ (id ⊗ φ))` on every class.
pub fn naturality_holds(b: &Bibundle, y: &Action, z: &Action, phi: &[usize]) -> Result<bool, CalculusError> {
    if !is_equivariant(phi, y, z) {
        return Err(CalculusError::DomainMismatch("φ is not equivariant".into()));
    }
    let ry = roundtrip_natural_iso(b, y)?;
    let rz = roundtrip_natural_iso(b, z)?;
    let inner = transport_map(&ry.inner, &rz.inner, phi)?;
    let outer = transport_map(&ry.outer, &rz.outer, &inner)?;
    Ok(ry.outer.tensor.classes().all(|c| phi[ry.mu[c]] == rz.mu[outer[c]]))
}

/// Serializable form of a certificate; the maps list `[x₁, x₂, arrow]` for a
/// representative of every class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateData {
    pub bibundle: crate::bibundle::BibundleData,
    pub inverse: crate::bibundle::BibundleData,
    pub iso_g: Vec<[String; 3]>,
    pub iso_h: Vec<[String; 3]>,
}

impl MoritaCertificate {
    pub fn to_data(&self) -> Result<CertificateData, CalculusError> {
        let b = Bibundle::from_raw(self.bibundle.clone())?;
        let c = Bibundle::from_raw(self.inverse.clone())?;
        let entries =
            |first: &Bibundle, second: &Bibundle, iso: &[ArrowId]| -> Result<Vec<[String; 3]>, CalculusError> {
                let composite = compose_bibundles(first, second)?;
                let g = first.left_groupoid();
                Ok(composite
                    .tensor
                    .classes()
                    .map(|k| {
                        let (x1, x2) = composite.tensor.representative(k);
                        [first.label(x1).to_string(), second.label(x2).to_string(), g.arrow_label(iso[k]).to_string()]
                    })
                    .collect())
            };
        Ok(CertificateData {
            bibundle: b.to_data(),
            inverse: c.to_data(),
            iso_g: entries(&b, &c, &self.iso_g)?,
            iso_h: entries(&c, &b, &self.iso_h)?,
        })
    }

    pub fn from_data(
        g: &Arc<FiniteGroupoid>,
        h: &Arc<FiniteGroupoid>,
        data: &CertificateData,
    ) -> Result<MoritaCertificate, CalculusError> {
        let b = crate::bibundle::validate_bibundle(g, h, &data.bibundle)?;
        let c = crate::bibundle::validate_bibundle(h, g, &data.inverse)?;
        let read = |first: &Bibundle, second: &Bibundle, rows: &[[String; 3]]| -> Result<Vec<ArrowId>, CalculusError> {
            let composite = compose_bibundles(first, second)?;
            let grp = first.left_groupoid();
            let mut out = vec![None; composite.tensor.num_classes()];
            for [x1, x2, a] in rows {
                let missing = |s: &str| CalculusError::DomainMismatch(format!("unknown identifier {s:?}"));
                let p1 = first.left().point_by_label(x1).ok_or_else(|| missing(x1))?;
                let p2 = second.left().point_by_label(x2).ok_or_else(|| missing(x2))?;
                let arrow = grp.arrow_by_label(a).ok_or_else(|| missing(a))?;
                let k = composite.tensor.class_of(p1, p2).ok_or_else(|| missing(&format!("{x1}⊗{x2}")))?;
                out[k] = Some(arrow);
            }
            out.into_iter()
                .enumerate()
                .map(|(k, a)| a.ok_or_else(|| CalculusError::DomainMismatch(format!("class {k} has no image"))))
                .collect()
        };
        Ok(MoritaCertificate {
            iso_g: read(&b, &c, &data.iso_g)?,
            iso_h: read(&c, &b, &data.iso_h)?,
            bibundle: b.to_raw(),
            inverse: c.to_raw(),
        })
    }
}
