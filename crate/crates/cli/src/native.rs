//! The native `.pbi` instance format: line-oriented, rational literals,
//! canonical emission. `parse(emit(i))` reproduces `i` exactly and
//! `emit(parse(d))` is the identity on canonical documents.
//!
//! ```text
//! pbi 1
//! budget 100
//! project p1 65
//! project p2 13/2
//! voter p1,p2
//! voter -
//! ```

use std::fmt;

use pb_core::model::{validate_instance, Instance, Project, RawInstance, ValidationMode};
use pb_core::rational::{format_rational, parse_rational};

/// Native-format failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NativeError {
    BadHeader,
    BadLine { lineno: usize, message: String },
    MissingBudget,
    Validation(String),
    /// Ids may not contain whitespace, commas, or semicolons.
    BadProjectId(String),
}

impl fmt::Display for NativeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NativeError::BadHeader => write!(f, "expected \"pbi 1\" header line"),
            NativeError::BadLine { lineno, message } => write!(f, "line {lineno}: {message}"),
            NativeError::MissingBudget => write!(f, "missing budget line"),
            NativeError::Validation(msg) => write!(f, "{msg}"),
            NativeError::BadProjectId(id) => {
                write!(f, "project id {id:?} contains whitespace, a comma, or a semicolon")
            }
        }
    }
}

impl std::error::Error for NativeError {}

fn id_ok(id: &str) -> bool {
    !id.is_empty() && !id.contains([' ', '\t', ',', ';'])
}

/// Parses a native document under the given validation mode.
pub fn parse_native(
    text: &str,
    mode: ValidationMode,
) -> Result<(Instance, Vec<String>), NativeError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == "pbi 1" => {}
        _ => return Err(NativeError::BadHeader),
    }
    let mut raw = RawInstance::default();
    let mut have_budget = false;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let bad = |message: &str| NativeError::BadLine { lineno, message: message.into() };
        let (keyword, rest) = line.split_once(' ').ok_or_else(|| bad("expected a keyword and arguments"))?;
        match keyword {
            "budget" => {
                raw.budget =
                    parse_rational(rest.trim()).map_err(|e| bad(&e.to_string()))?;
                have_budget = true;
            }
            "project" => {
                let (id, cost) =
                    rest.split_once(' ').ok_or_else(|| bad("expected project <id> <cost>"))?;
                if !id_ok(id) {
                    return Err(NativeError::BadProjectId(id.into()));
                }
                let cost = parse_rational(cost.trim()).map_err(|e| bad(&e.to_string()))?;
                raw.projects.push(Project { id: id.into(), cost });
            }
            "voter" => {
                let ballot = rest.trim();
                let approvals = if ballot == "-" {
                    Vec::new()
                } else {
                    ballot.split(',').map(String::from).collect()
                };
                raw.approvals.push(approvals);
            }
            other => return Err(bad(&format!("unknown keyword {other:?}"))),
        }
    }
    if !have_budget {
        return Err(NativeError::MissingBudget);
    }
    validate_instance(&raw, mode).map_err(|e| NativeError::Validation(e.to_string()))
}

/// Emits the canonical document for an instance.
pub fn emit_native(instance: &Instance) -> String {
    let raw = instance.to_raw();
    let mut out = String::from("pbi 1\n");
    out.push_str("budget ");
    out.push_str(&format_rational(&raw.budget));
    out.push('\n');
    for project in &raw.projects {
        out.push_str("project ");
        out.push_str(&project.id);
        out.push(' ');
        out.push_str(&format_rational(&project.cost));
        out.push('\n');
    }
    for ballot in &raw.approvals {
        out.push_str("voter ");
        if ballot.is_empty() {
            out.push('-');
        } else {
            out.push_str(&ballot.join(","));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pb_core::rational::rat;

    const DOC: &str = "pbi 1\nbudget 13/2\nproject a 2\nproject b 13/4\nvoter a,b\nvoter -\nvoter b\n";

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let (instance, warnings) = parse_native(DOC, ValidationMode::Strict).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(emit_native(&instance), DOC);
    }

    #[test]
    fn parse_of_emit_reproduces_the_instance() {
        let (instance, _) = parse_native(DOC, ValidationMode::Strict).unwrap();
        let (again, _) = parse_native(&emit_native(&instance), ValidationMode::Strict).unwrap();
        assert_eq!(instance, again);
    }

    #[test]
    fn rational_literals_parse_exactly() {
        let (instance, _) = parse_native(DOC, ValidationMode::Strict).unwrap();
        assert_eq!(instance.budget(), &rat(13, 2));
        assert_eq!(instance.projects()[1].cost, rat(13, 4));
    }

    #[test]
    fn non_canonical_literals_normalize_on_emit() {
        let doc = "pbi 1\nbudget 6.5\nproject a 2.0\nvoter a\n";
        let (instance, _) = parse_native(doc, ValidationMode::Strict).unwrap();
        assert_eq!(emit_native(&instance), "pbi 1\nbudget 13/2\nproject a 2\nvoter a\n");
    }

    #[test]
    fn referential_integrity_is_enforced() {
        let doc = "pbi 1\nbudget 10\nproject a 2\nvoter a,zz\n";
        assert!(matches!(
            parse_native(doc, ValidationMode::Strict),
            Err(NativeError::Validation(_))
        ));
        let (instance, warnings) = parse_native(doc, ValidationMode::Lenient).unwrap();
        assert_eq!(instance.projects().len(), 1);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(parse_native("", ValidationMode::Strict), Err(NativeError::BadHeader)));
        assert!(matches!(
            parse_native("pbi 1\nproject a 2\nvoter a\n", ValidationMode::Strict),
            Err(NativeError::MissingBudget)
        ));
        assert!(matches!(
            parse_native("pbi 1\nbudget x\nvoter -\n", ValidationMode::Strict),
            Err(NativeError::BadLine { .. })
        ));
        assert!(matches!(
            parse_native("pbi 1\nbudget 10\nproject a,b 2\nvoter -\n", ValidationMode::Strict),
            Err(NativeError::BadProjectId(_))
        ));
    }
}
