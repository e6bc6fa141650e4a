//! Finite groupoids, their actions and bibundles, balanced tensor products,
//! and Morita equivalence with explicit, re-checkable witnesses.
//!
//! Every construction works on finite sets given by explicit tables. Maps are
//! arbitrary functions, "subductions" are surjections and "diffeomorphisms"
//! are bijections.

pub mod action;
pub mod bibundle;
pub mod bundle;
pub mod coherence;
pub mod enumerate;
pub mod error;
pub mod groupoid;
pub mod morita;
pub mod partition;
pub mod tensor;

pub use action::{
    is_bijection, is_equivariant, is_injection, is_surjection, validate_action, Action, ActionData, RawAction, Side,
};
pub use bibundle::{
    bibundle_principality, check_bibundle, identity_bibundle, is_biequivariant_iso, opposite_bibundle,
    validate_bibundle, Bibundle, BibundleData, Principality, RawBibundle,
};
pub use bundle::{is_bundle_morphism, validate_bundle, ActionMap, Bundle, BundleData, DivisionMap};
pub use coherence::{associator, find_biequivariant_iso, left_unitor, right_unitor, Associator, CoherenceWitness};
pub use error::{ActionCondition, BibundleLaw, CalculusError, GroupoidLaw, ValidationReport, Violation};
pub use groupoid::{
    group_as_groupoid, pair_groupoid, relation_groupoid, unit_groupoid, validate_groupoid, validate_groupoid_with,
    ArrowDecl, ArrowId, FiniteGroupoid, GroupTable, GroupoidData, ObjId, ValidationLimits,
};
pub use morita::{
    certificate_failure, decide_morita, fibrating_invariance_check, is_biprincipal, morita_equivalence_relation_checks,
    naturality_holds, orbit_bijection, roundtrip_natural_iso, tensor_action_inverse, transport_action, transport_map,
    verify_certificate, weak_inverse_witness, CertificateData, EquivalenceReport, MoritaCertificate, MoritaSearch,
    OrbitBijection, RoundTrip, TensorActionInverse, Transported,
};
pub use partition::OrbitPartition;
pub use tensor::{compose_bibundles, induced_left_action, induced_right_action, BalancedTensor, Composite};
