use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use morita_core::{
    bibundle_principality, compose_bibundles, decide_morita, is_biprincipal, verify_certificate, Bibundle,
    FiniteGroupoid,
};
use morita_toolkit::corpus::{generate_corpus, CorpusSpec};
use morita_toolkit::format::{load, save, FormatError, Object};
use morita_toolkit::suite::run_suite;
use serde_json::{json, Value};

/// Finite groupoids, bibundles and Morita equivalence.
#[derive(Parser)]
#[command(name = "morita", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate an object file.
    Validate { file: PathBuf },
    /// Describe an object: sizes, orbits, isotropy, principality.
    Info { file: PathBuf },
    /// Compose two bibundles over their shared middle groupoid.
    Compose {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Report the principality flags of a bibundle; fails unless biprincipal.
    Check { file: PathBuf },
    /// Search for a biprincipal bibundle between two groupoids.
    Morita {
        left: PathBuf,
        right: PathBuf,
        /// Largest carrier to try.
        #[arg(long, default_value_t = 3)]
        budget: usize,
        /// Where to write the certificate.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a law suite over a generated corpus.
    Suite {
        name: String,
        /// Corpus bounds, as `key=value` pairs, JSON, or a file holding either.
        #[arg(long, default_value = "")]
        corpus: String,
    },
}

struct Outcome {
    ok: bool,
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).unwrap());
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "ok": false, "error": e }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}

fn load_groupoid(path: &Path) -> Result<Arc<FiniteGroupoid>, String> {
    match load(path).map_err(describe)? {
        Object::Groupoid(g) => Ok(g),
        other => Err(format!("{}: expected a groupoid, found {:?}", path.display(), other.kind())),
    }
}

fn load_bibundle(path: &Path) -> Result<Bibundle, String> {
    match load(path).map_err(describe)? {
        Object::Bibundle(b) => Ok(b),
        other => Err(format!("{}: expected a bibundle, found {:?}", path.display(), other.kind())),
    }
}

fn describe(e: FormatError) -> String {
    match e {
        FormatError::ValidationFailed(r) => {
            let mut s = format!("validation failed with {} violation(s)", r.violations.len());
            for v in &r.violations {
                s.push_str(&format!("\n  {v}"));
            }
            s
        }
        e => e.to_string(),
    }
}

fn run(command: Command) -> Result<Outcome, String> {
    match command {
        Command::Validate { file } => match load(&file) {
            Ok(obj) => Ok(Outcome {
                ok: true,
                text: format!("ok: valid {:?}\n", obj.kind()).to_lowercase(),
                json: json!({ "ok": true, "kind": obj.kind() }),
            }),
            Err(e) => {
                let violations: Vec<String> = match &e {
                    FormatError::ValidationFailed(r) => r.violations.iter().map(|v| v.to_string()).collect(),
                    _ => Vec::new(),
                };
                Ok(Outcome {
                    ok: false,
                    text: format!("invalid: {}\n", describe(e)),
                    json: json!({ "ok": false, "violations": violations }),
                })
            }
        },
        Command::Info { file } => info(&load(&file).map_err(describe)?),
        Command::Compose { first, second, output } => {
            let (a, b) = (load_bibundle(&first)?, load_bibundle(&second)?);
            let c = compose_bibundles(&a, &b).map_err(|e| e.to_string())?;
            save(&Object::Bibundle(c.bibundle.clone()), &output).map_err(describe)?;
            let n = c.bibundle.len();
            Ok(Outcome {
                ok: true,
                text: format!("wrote {} ({n} points)\n", output.display()),
                json: json!({ "ok": true, "output": output, "points": n }),
            })
        }
        Command::Check { file } => {
            let b = load_bibundle(&file)?;
            let p = bibundle_principality(&b);
            let flags = [
                ("left subductive", p.left_subductive),
                ("right subductive", p.right_subductive),
                ("left pre-principal", p.left_pre_principal),
                ("right pre-principal", p.right_pre_principal),
                ("biprincipal", p.biprincipal()),
            ];
            let text = flags.iter().map(|(k, v)| format!("{k}: {v}\n")).collect();
            Ok(Outcome {
                ok: p.biprincipal(),
                text,
                json: json!({
                    "left_subductive": p.left_subductive,
                    "right_subductive": p.right_subductive,
                    "left_pre_principal": p.left_pre_principal,
                    "right_pre_principal": p.right_pre_principal,
                    "biprincipal": p.biprincipal(),
                }),
            })
        }
        Command::Morita { left, right, budget, output } => {
            let (g, h) = (load_groupoid(&left)?, load_groupoid(&right)?);
            let search = decide_morita(&g, &h, budget);
            let Some(cert) = search.certificate else {
                return Ok(Outcome {
                    ok: false,
                    text: format!(
                        "no biprincipal bibundle with at most {budget} points ({} candidates searched)\n",
                        search.searched
                    ),
                    json: json!({ "equivalent": null, "budget": budget, "searched": search.searched }),
                });
            };
            let verified = verify_certificate(&cert);
            let points = cert.bibundle.left.labels.len();
            if let Some(out) = &output {
                save(&Object::Certificate(Box::new(cert)), out).map_err(describe)?;
            }
            Ok(Outcome {
                ok: verified,
                text: format!(
                    "Morita equivalent: bibundle with {points} points, certificate {}\n",
                    if verified { "verified" } else { "FAILED" }
                ),
                json: json!({
                    "equivalent": true,
                    "points": points,
                    "verified": verified,
                    "searched": search.searched,
                    "output": output,
                }),
            })
        }
        Command::Suite { name, corpus } => {
            let spec = corpus_spec(&corpus)?;
            let corpus = generate_corpus(&spec).map_err(|e| e.to_string())?;
            let report = run_suite(&corpus, &name).map_err(|e| e.to_string())?;
            let mut text = format!("suite {name} on {spec}\n");
            for (check, c) in &report.checks {
                text.push_str(&format!("  {check}: {} passed, {} failed\n", c.passed, c.failed));
            }
            for note in &report.notes {
                text.push_str(&format!("  note: {note}\n"));
            }
            for f in &report.failures {
                text.push_str(&format!("FAIL {} [{}]: {}\n", f.instance, f.check, f.witness));
            }
            text.push_str(if report.passed() { "PASS\n" } else { "FAIL\n" });
            Ok(Outcome { ok: report.passed(), text, json: serde_json::to_value(&report).unwrap() })
        }
    }
}

fn corpus_spec(arg: &str) -> Result<CorpusSpec, String> {
    let path = Path::new(arg);
    let text = if !arg.is_empty() && path.is_file() {
        std::fs::read_to_string(path).map_err(|e| format!("{arg}: {e}"))?
    } else {
        arg.to_string()
    };
    if text.trim().is_empty() {
        return Ok(CorpusSpec::default());
    }
    text.parse().map_err(|e: morita_toolkit::corpus::CorpusError| e.to_string())
}

fn info(obj: &Object) -> Result<Outcome, String> {
    let (text, json) = match obj {
        Object::Groupoid(g) => {
            let orbits = g.orbit_space();
            let mut text = format!(
                "groupoid: {} objects, {} arrows, {} orbits, fibrating: {}\n",
                g.num_objects(),
                g.num_arrows(),
                orbits.num_classes(),
                g.is_fibrating()
            );
            let mut rows = Vec::new();
            for class in orbits.classes() {
                let rep = morita_core::ObjId(class[0]);
                let order = g.isotropy_group(rep).map_err(|e| e.to_string())?.len();
                let labels: Vec<&str> = class.iter().map(|&o| g.object_label(morita_core::ObjId(o))).collect();
                text.push_str(&format!("  orbit {{{}}}: isotropy of order {order}\n", labels.join(", ")));
                rows.push(json!({ "objects": labels, "isotropy_order": order }));
            }
            let json = json!({
                "kind": "groupoid",
                "objects": g.num_objects(),
                "arrows": g.num_arrows(),
                "orbits": rows,
                "fibrating": g.is_fibrating(),
            });
            (text, json)
        }
        Object::Action(a) => {
            let orbits = a.orbit_space().num_classes();
            let text = format!("{:?} action: {} points, {orbits} orbits, free: {}\n", a.side(), a.len(), a.is_free())
                .to_lowercase();
            (
                text,
                json!({ "kind": "action", "side": a.side(), "points": a.len(), "orbits": orbits, "free": a.is_free() }),
            )
        }
        Object::Bundle(b) => {
            let text = format!(
                "bundle: {} points over {} base points, subductive: {}, pre-principal: {}, principal: {}\n",
                b.action().len(),
                b.base_len(),
                b.is_subductive(),
                b.is_pre_principal(),
                b.is_principal()
            );
            let json = json!({
                "kind": "bundle",
                "points": b.action().len(),
                "base": b.base_len(),
                "subductive": b.is_subductive(),
                "pre_principal": b.is_pre_principal(),
                "principal": b.is_principal(),
            });
            (text, json)
        }
        Object::Bibundle(b) => {
            let p = bibundle_principality(b);
            let text = format!(
                "bibundle: {} points, left principal: {}, right principal: {}, biprincipal: {}\n",
                b.len(),
                p.left_principal(),
                p.right_principal(),
                is_biprincipal(b)
            );
            let json = json!({
                "kind": "bibundle",
                "points": b.len(),
                "left_principal": p.left_principal(),
                "right_principal": p.right_principal(),
                "biprincipal": is_biprincipal(b),
            });
            (text, json)
        }
        Object::Certificate(c) => {
            let ok = verify_certificate(c);
            let text = format!("certificate: bibundle with {} points, verifies: {ok}\n", c.bibundle.left.labels.len());
            (text, json!({ "kind": "certificate", "points": c.bibundle.left.labels.len(), "verifies": ok }))
        }
    };
    Ok(Outcome { ok: true, text, json })
}
