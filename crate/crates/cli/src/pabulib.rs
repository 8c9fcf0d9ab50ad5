//! Pabulib `.pb` ingestion: META / PROJECTS / VOTES sections with
//! semicolon-separated rows, converted leniently into a validated
//! instance. Every dropped entity leaves a warning; nothing mutates
//! silently.

use std::collections::BTreeMap;
use std::fmt;

use pb_core::model::{validate_instance, Instance, Project, RawInstance, ValidationMode};
use pb_core::rational::parse_rational;

/// Pabulib parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PabulibError {
    MissingSection(&'static str),
    MissingColumn { section: &'static str, column: &'static str },
    UnsupportedVoteType(String),
    BadBudget(String),
    BadCost { project: String, literal: String },
    Validation(String),
}

impl fmt::Display for PabulibError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PabulibError::MissingSection(s) => write!(f, "missing {s} section"),
            PabulibError::MissingColumn { section, column } => {
                write!(f, "{section} section lacks a {column:?} column")
            }
            PabulibError::UnsupportedVoteType(t) => {
                write!(f, "vote_type {t:?} is not supported (only \"approval\")")
            }
            PabulibError::BadBudget(b) => write!(f, "unparseable budget {b:?}"),
            PabulibError::BadCost { project, literal } => {
                write!(f, "project {project:?} has unparseable cost {literal:?}")
            }
            PabulibError::Validation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for PabulibError {}

/// The raw sections of a `.pb` file, before conversion.
#[derive(Debug, Clone, Default)]
pub struct PabulibDocument {
    pub meta: BTreeMap<String, String>,
    /// (project id, cost literal, remaining columns).
    pub projects: Vec<(String, String, BTreeMap<String, String>)>,
    /// (voter id, approved project ids).
    pub votes: Vec<(String, Vec<String>)>,
}

/// A converted Pabulib instance with its metadata and conversion warnings.
#[derive(Debug, Clone)]
pub struct PabulibImport {
    pub instance: Instance,
    pub meta: BTreeMap<String, String>,
    /// Per-project pass-through columns (category, target, ...).
    pub project_extras: BTreeMap<String, BTreeMap<String, String>>,
    pub warnings: Vec<String>,
}

fn split_row(line: &str) -> Vec<&str> {
    line.split(';').map(str::trim).collect()
}

/// Splits the text into the three sections.
pub fn parse_pabulib_document(text: &str) -> Result<PabulibDocument, PabulibError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Meta,
        Projects,
        Votes,
    }
    let mut document = PabulibDocument::default();
    let mut section = Section::None;
    let mut header: Vec<String> = Vec::new();
    let mut seen = (false, false, false);
    for raw_line in text.lines() {
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        match line.trim() {
            "META" => {
                section = Section::Meta;
                seen.0 = true;
                header.clear();
                continue;
            }
            "PROJECTS" => {
                section = Section::Projects;
                seen.1 = true;
                header.clear();
                continue;
            }
            "VOTES" => {
                section = Section::Votes;
                seen.2 = true;
                header.clear();
                continue;
            }
            _ => {}
        }
        match section {
            Section::None => continue,
            Section::Meta => {
                if header.is_empty() {
                    header = split_row(line).into_iter().map(String::from).collect();
                    continue;
                }
                let row = split_row(line);
                if let (Some(key), Some(value)) = (row.first(), row.get(1)) {
                    document.meta.insert((*key).into(), (*value).into());
                }
            }
            Section::Projects => {
                if header.is_empty() {
                    header = split_row(line).into_iter().map(String::from).collect();
                    continue;
                }
                let row = split_row(line);
                let mut id = None;
                let mut cost = None;
                let mut extra = BTreeMap::new();
                for (column, value) in header.iter().zip(&row) {
                    match column.as_str() {
                        "project_id" => id = Some((*value).to_string()),
                        "cost" => cost = Some((*value).to_string()),
                        _ => {
                            extra.insert(column.clone(), (*value).to_string());
                        }
                    }
                }
                let id = id.ok_or(PabulibError::MissingColumn {
                    section: "PROJECTS",
                    column: "project_id",
                })?;
                let cost = cost.ok_or(PabulibError::MissingColumn {
                    section: "PROJECTS",
                    column: "cost",
                })?;
                document.projects.push((id, cost, extra));
            }
            Section::Votes => {
                if header.is_empty() {
                    header = split_row(line).into_iter().map(String::from).collect();
                    continue;
                }
                let row = split_row(line);
                let mut voter = None;
                let mut vote = None;
                for (column, value) in header.iter().zip(&row) {
                    match column.as_str() {
                        "voter_id" => voter = Some((*value).to_string()),
                        "vote" => vote = Some((*value).to_string()),
                        _ => {}
                    }
                }
                let voter = voter.ok_or(PabulibError::MissingColumn {
                    section: "VOTES",
                    column: "voter_id",
                })?;
                let vote = vote.ok_or(PabulibError::MissingColumn {
                    section: "VOTES",
                    column: "vote",
                })?;
                let approvals: Vec<String> = if vote.is_empty() {
                    Vec::new()
                } else {
                    vote.split(',').map(|id| id.trim().to_string()).collect()
                };
                document.votes.push((voter, approvals));
            }
        }
    }
    if !seen.0 {
        return Err(PabulibError::MissingSection("META"));
    }
    if !seen.1 {
        return Err(PabulibError::MissingSection("PROJECTS"));
    }
    if !seen.2 {
        return Err(PabulibError::MissingSection("VOTES"));
    }
    if !document.projects.is_empty() && !document.meta.contains_key("budget") {
        return Err(PabulibError::BadBudget(String::new()));
    }
    Ok(document)
}

/// Parses and leniently converts a `.pb` file: over-budget projects and
/// dangling vote references are dropped with warnings; empty vote fields
/// become empty ballots (the voter still counts toward n).
pub fn parse_pabulib(text: &str) -> Result<PabulibImport, PabulibError> {
    let document = parse_pabulib_document(text)?;
    match document.meta.get("vote_type").map(String::as_str) {
        Some("approval") => {}
        other => {
            return Err(PabulibError::UnsupportedVoteType(other.unwrap_or("<missing>").into()))
        }
    }
    let budget_literal = document
        .meta
        .get("budget")
        .ok_or_else(|| PabulibError::BadBudget("<missing>".into()))?;
    let budget = parse_rational(budget_literal)
        .map_err(|_| PabulibError::BadBudget(budget_literal.clone()))?;
    let mut projects = Vec::new();
    let mut project_extras = BTreeMap::new();
    for (id, cost_literal, extra) in &document.projects {
        let cost = parse_rational(cost_literal).map_err(|_| PabulibError::BadCost {
            project: id.clone(),
            literal: cost_literal.clone(),
        })?;
        projects.push(Project { id: id.clone(), cost });
        if !extra.is_empty() {
            project_extras.insert(id.clone(), extra.clone());
        }
    }
    let approvals: Vec<Vec<String>> =
        document.votes.iter().map(|(_, ballot)| ballot.clone()).collect();
    let raw = RawInstance { budget, projects, approvals };
    let (instance, warnings) = validate_instance(&raw, ValidationMode::Lenient)
        .map_err(|e| PabulibError::Validation(e.to_string()))?;
    Ok(PabulibImport { instance, meta: document.meta, project_extras, warnings })
}
