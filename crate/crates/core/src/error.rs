use std::fmt;

/// Law that a candidate groupoid table can break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupoidLaw {
    /// `comp(g, h)` must be defined exactly when `src(g) = tgt(h)`.
    CompositionDomain,
    /// The table lists two different results for one pair.
    CompositionFunctional,
    /// `src(g∘h) = src(h)` and `tgt(g∘h) = tgt(g)`.
    CompositionEndpoints,
    Associativity,
    /// `src(unit(x)) = tgt(unit(x)) = x`.
    UnitEndpoints,
    /// `unit(x)` is a two-sided identity.
    UnitLaw,
    /// `inv(g)` runs from `tgt(g)` to `src(g)`.
    InverseEndpoints,
    /// `inv(g)∘g` and `g∘inv(g)` are units.
    InverseLaw,
    InverseInvolution,
}

/// The three conditions of a groupoid action, plus table well-formedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionCondition {
    /// The moment of `g·x` is the far end of `g`.
    Moment,
    /// Units act trivially.
    Unit,
    /// Acting twice equals acting by the composite.
    Composition,
    /// An allowed pair is missing, or listed twice with different results.
    Totality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BibundleLaw {
    /// `l_X(x·h) = l_X(x)`.
    LeftMomentInvariance,
    /// `r_X(g·x) = r_X(x)`.
    RightMomentInvariance,
    /// `(g·x)·h = g·(x·h)`.
    Commutation,
    /// The two actions do not live on the same carrier, or the side is wrong.
    Shape,
}

/// One failed check, with the offending identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    DanglingIdentifier {
        field: String,
        id: String,
    },
    DuplicateIdentifier {
        field: String,
        id: String,
    },
    MissingEntry {
        field: String,
        id: String,
    },
    Axiom {
        law: GroupoidLaw,
        witness: Vec<String>,
    },
    Action {
        condition: ActionCondition,
        witness: Vec<String>,
    },
    /// The action table defines a value on a pair whose moments do not match.
    DomainMismatch {
        witness: Vec<String>,
    },
    /// A bundle projection is not constant on orbits.
    BundleInvariance {
        witness: Vec<String>,
    },
    Bibundle {
        law: BibundleLaw,
        witness: Vec<String>,
    },
    TooLarge {
        composable_pairs: usize,
        limit: usize,
    },
    UnsupportedVersion {
        found: u32,
        supported: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingIdentifier { field, id } => {
                write!(f, "dangling identifier {id:?} in {field}")
            }
            Violation::DuplicateIdentifier { field, id } => {
                write!(f, "duplicate identifier {id:?} in {field}")
            }
            Violation::MissingEntry { field, id } => write!(f, "{field} has no entry for {id:?}"),
            Violation::Axiom { law, witness } => write!(f, "axiom {law:?} fails at {witness:?}"),
            Violation::Action { condition, witness } => {
                write!(f, "action condition {condition:?} fails at {witness:?}")
            }
            Violation::DomainMismatch { witness } => {
                write!(f, "action defined outside its domain at {witness:?}")
            }
            Violation::BundleInvariance { witness } => {
                write!(f, "projection not invariant at {witness:?}")
            }
            Violation::Bibundle { law, witness } => {
                write!(f, "bibundle law {law:?} fails at {witness:?}")
            }
            Violation::TooLarge { composable_pairs, limit } => {
                write!(f, "{composable_pairs} composable pairs exceed the limit of {limit}")
            }
            Violation::UnsupportedVersion { found, supported } => {
                write!(f, "format version {found} is newer than {supported}")
            }
        }
    }
}

/// Every violation found while checking one candidate structure.
#[derive(Debug, Clone, Default, PartialEq, Eq, thiserror::Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub(crate) fn into_result(self) -> Result<(), ValidationReport> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(self)
        }
    }

    pub fn has_axiom(&self, law: GroupoidLaw) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Axiom { law: l, .. } if *l == law))
    }

    pub fn has_action(&self, condition: ActionCondition) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Action { condition: c, .. } if *c == condition))
    }

    pub fn has_bibundle(&self, law: BibundleLaw) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::Bibundle { law: l, .. } if *l == law))
    }

    pub fn has_domain_mismatch(&self) -> bool {
        self.violations.iter().any(|v| matches!(v, Violation::DomainMismatch { .. }))
    }
}

/// Errors raised by the constructions on already validated structures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("unknown object {0}")]
    UnknownObject(usize),
    #[error("relation is not an equivalence: {0}")]
    NotAnEquivalence(String),
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("groupoids do not match: {0}")]
    GroupoidMismatch(String),
    #[error("bundle is not pre-principal")]
    NotPrePrincipal,
    #[error("bibundle is not biprincipal")]
    NotBiprincipal,
    #[error("lookup outside the domain of a partial map: {0}")]
    DomainMismatch(String),
    #[error("construction is not well defined on classes: {0}")]
    IllDefined(String),
    #[error("witness failed its own check: {0}")]
    WitnessFailed(String),
    #[error("invalid structure: {0}")]
    Invalid(#[from] ValidationReport),
}
