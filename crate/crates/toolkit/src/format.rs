//! JSON object files.
//!
//! One object per file. Actions, bundles, bibundles and certificates refer to
//! their groupoids through `references`, whose values are paths relative to
//! the referring file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use morita_core::bundle::validate_bundle;
use morita_core::{
    validate_action, validate_bibundle, validate_groupoid, Action, ActionData, Bibundle, BibundleData, Bundle,
    BundleData, CalculusError, CertificateData, FiniteGroupoid, GroupoidData, MoritaCertificate, ValidationReport,
    Violation,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Groupoid,
    Action,
    Bundle,
    Bibundle,
    Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectFile {
    pub format_version: u32,
    pub kind: Kind,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub references: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
    kind: Kind,
    #[serde(default)]
    references: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Typed<T> {
    payload: T,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Object {
    Groupoid(Arc<FiniteGroupoid>),
    Action(Action),
    Bundle(Bundle),
    Bibundle(Bibundle),
    Certificate(Box<MoritaCertificate>),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::Groupoid(_) => Kind::Groupoid,
            Object::Action(_) => Kind::Action,
            Object::Bundle(_) => Kind::Bundle,
            Object::Bibundle(_) => Kind::Bibundle,
            Object::Certificate(_) => Kind::Certificate,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("parse error at line {0}: {1}")]
    ParseError(usize, String),
    #[error("validation failed: {0}")]
    ValidationFailed(ValidationReport),
    #[error("unresolved reference {0:?}")]
    UnresolvedReference(String),
    #[error(transparent)]
    Invalid(CalculusError),
}

impl From<ValidationReport> for FormatError {
    fn from(r: ValidationReport) -> Self {
        FormatError::ValidationFailed(r)
    }
}

impl From<CalculusError> for FormatError {
    fn from(e: CalculusError) -> Self {
        match e {
            CalculusError::Invalid(r) => FormatError::ValidationFailed(r),
            e => FormatError::Invalid(e),
        }
    }
}

fn parse_error(e: serde_json::Error) -> FormatError {
    FormatError::ParseError(e.line(), e.to_string())
}

fn io_error(path: &Path, e: std::io::Error) -> FormatError {
    FormatError::Io { path: path.to_path_buf(), message: e.to_string() }
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str::<Typed<T>>(text).map(|t| t.payload).map_err(parse_error)
}

pub fn load(path: &Path) -> Result<Object, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let header: Header = serde_json::from_str(&text).map_err(parse_error)?;
    if header.format_version > FORMAT_VERSION {
        let mut report = ValidationReport::default();
        report.push(Violation::UnsupportedVersion { found: header.format_version, supported: FORMAT_VERSION });
        return Err(FormatError::ValidationFailed(report));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let groupoid = |name: &str| -> Result<Arc<FiniteGroupoid>, FormatError> {
        let file = header.references.get(name).ok_or_else(|| FormatError::UnresolvedReference(name.to_string()))?;
        let target = dir.join(file);
        if !target.is_file() {
            return Err(FormatError::UnresolvedReference(file.clone()));
        }
        match load(&target)? {
            Object::Groupoid(g) => Ok(g),
            _ => Err(FormatError::UnresolvedReference(format!("{file} is not a groupoid"))),
        }
    };
    Ok(match header.kind {
        Kind::Groupoid => Object::Groupoid(Arc::new(validate_groupoid(&typed::<GroupoidData>(&text)?)?)),
        Kind::Action => Object::Action(validate_action(&groupoid("groupoid")?, &typed::<ActionData>(&text)?)?),
        Kind::Bundle => Object::Bundle(validate_bundle(&groupoid("groupoid")?, &typed::<BundleData>(&text)?)?),
        Kind::Bibundle => {
            let data = typed::<BibundleData>(&text)?;
            Object::Bibundle(validate_bibundle(&groupoid("left")?, &groupoid("right")?, &data)?)
        }
        Kind::Certificate => {
            let data = typed::<CertificateData>(&text)?;
            Object::Certificate(Box::new(MoritaCertificate::from_data(&groupoid("left")?, &groupoid("right")?, &data)?))
        }
    })
}

fn sibling(path: &Path, role: &str) -> (PathBuf, String) {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("object");
    let name = format!("{stem}.{role}.json");
    (path.with_file_name(&name), name)
}

fn write(path: &Path, file: &ObjectFile) -> Result<(), FormatError> {
    let text = serde_json::to_string_pretty(file).expect("object files serialize");
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

fn payload<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("payloads serialize")
}

/// Writes `object` to `path`, and each groupoid it refers to next to it as
/// `<stem>.<role>.json`.
pub fn save(object: &Object, path: &Path) -> Result<ObjectFile, FormatError> {
    let mut references = BTreeMap::new();
    let mut refer = |role: &str, g: &FiniteGroupoid| -> Result<(), FormatError> {
        let (target, name) = sibling(path, role);
        write(&target, &groupoid_file(g))?;
        references.insert(role.to_string(), name);
        Ok(())
    };
    let payload = match object {
        Object::Groupoid(g) => payload(&g.to_data()),
        Object::Action(a) => {
            refer("groupoid", a.groupoid())?;
            payload(&a.to_data())
        }
        Object::Bundle(b) => {
            refer("groupoid", b.action().groupoid())?;
            payload(&b.to_data())
        }
        Object::Bibundle(b) => {
            refer("left", b.left_groupoid())?;
            refer("right", b.right_groupoid())?;
            payload(&b.to_data())
        }
        Object::Certificate(c) => {
            refer("left", &c.bibundle.left_groupoid)?;
            refer("right", &c.bibundle.right_groupoid)?;
            payload(&c.to_data()?)
        }
    };
    let file = ObjectFile { format_version: FORMAT_VERSION, kind: object.kind(), payload, references };
    write(path, &file)?;
    Ok(file)
}

fn groupoid_file(g: &FiniteGroupoid) -> ObjectFile {
    ObjectFile {
        format_version: FORMAT_VERSION,
        kind: Kind::Groupoid,
        payload: payload(&g.to_data()),
        references: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use morita_core::{identity_bibundle, pair_groupoid};

    #[test]
    fn groupoid_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p2.json");
        let g = Arc::new(pair_groupoid(2));
        save(&Object::Groupoid(g.clone()), &path).unwrap();
        assert_eq!(load(&path).unwrap(), Object::Groupoid(g));
    }

    #[test]
    fn bibundle_references_two_groupoids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("id.json");
        let b = identity_bibundle(&Arc::new(pair_groupoid(2)));
        let file = save(&Object::Bibundle(b.clone()), &path).unwrap();
        assert_eq!(file.references.len(), 2);
        assert!(dir.path().join("id.left.json").is_file());
        assert_eq!(load(&path).unwrap(), Object::Bibundle(b));
        fs::remove_file(dir.path().join("id.right.json")).unwrap();
        assert!(matches!(load(&path), Err(FormatError::UnresolvedReference(_))));
    }

    #[test]
    fn newer_versions_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let mut file = groupoid_file(&pair_groupoid(1));
        file.format_version = 2;
        write(&path, &file).unwrap();
        assert!(matches!(load(&path), Err(FormatError::ValidationFailed(_))));
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "{\n  \"format_version\": 1,\n  \"kind\": \n}").unwrap();
        match load(&path) {
            Err(FormatError::ParseError(line, _)) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_comp_entry() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let mut data = pair_groupoid(2).to_data();
        data.comp[0][2] = "nowhere".into();
        let file = ObjectFile {
            format_version: 1,
            kind: Kind::Groupoid,
            payload: payload(&data),
            references: BTreeMap::new(),
        };
        write(&path, &file).unwrap();
        match load(&path) {
            Err(FormatError::ValidationFailed(r)) => {
                assert!(r.violations.iter().any(|v| matches!(v, Violation::DanglingIdentifier { .. })))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
