//! Satisfaction functions as named on the command line: `cost`, `card`,
//! `sqrt`, or `table:<path>` where the file holds `cost;satisfaction`
//! records with rational literals.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use pb_core::model::Instance;
use pb_core::rational::parse_rational;
use pb_core::satisfaction::SatisfactionFunction;

/// Default denominator for the rounded square-root satisfaction.
pub const DEFAULT_SQRT_PRECISION: u64 = 1_000_000;

/// A satisfaction-function choice, before binding to an instance.
///
/// Binding matters for `sqrt` (the rounding is re-checked against the
/// instance's costs) and for `table` (totality over the instance's costs
/// surfaces at evaluation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatChoice {
    Cost,
    Cardinality,
    Sqrt { precision: u64 },
    Table { entries: BTreeMap<pb_core::Rational, pb_core::Rational>, label: String },
}

impl SatChoice {
    /// Parses a CLI name; `table:` paths are loaded eagerly.
    pub fn parse(spec: &str, sqrt_precision: u64) -> Result<Self> {
        match spec {
            "cost" => Ok(SatChoice::Cost),
            "card" => Ok(SatChoice::Cardinality),
            "sqrt" => Ok(SatChoice::Sqrt { precision: sqrt_precision }),
            other => match other.strip_prefix("table:") {
                Some(path) => Self::load_table(Path::new(path)),
                None => bail!(
                    "unknown satisfaction function {spec:?}; expected cost, card, sqrt, or table:<path>"
                ),
            },
        }
    }

    /// Loads a `cost;satisfaction` table file.
    pub fn load_table(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading satisfaction table {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (cost, sat) = line
                .split_once(';')
                .with_context(|| format!("{}:{}: expected cost;satisfaction", path.display(), lineno + 1))?;
            let cost = parse_rational(cost.trim())
                .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), lineno + 1))?;
            let sat = parse_rational(sat.trim())
                .map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), lineno + 1))?;
            if entries.insert(cost, sat).is_some() {
                bail!("{}:{}: duplicate cost entry", path.display(), lineno + 1);
            }
        }
        let label = PathBuf::from(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "table".into());
        // Positivity is validated by the core constructor.
        let function = SatisfactionFunction::table(entries.clone())
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let SatisfactionFunction::Table(entries) = function else { unreachable!() };
        Ok(SatChoice::Table { entries, label })
    }

    /// Binds the choice to an instance, re-validating where needed.
    pub fn for_instance(&self, instance: &Instance) -> Result<SatisfactionFunction> {
        match self {
            SatChoice::Cost => Ok(SatisfactionFunction::Cost),
            SatChoice::Cardinality => Ok(SatisfactionFunction::Cardinality),
            SatChoice::Sqrt { precision } => {
                SatisfactionFunction::sqrt_cost_checked(*precision, instance)
                    .map_err(|e| anyhow::anyhow!("{e}"))
            }
            SatChoice::Table { entries, .. } => {
                // Totality over the instance's costs, up front.
                for project in instance.projects() {
                    if !entries.contains_key(&project.cost) {
                        bail!(
                            "satisfaction table has no entry for cost {} (project {})",
                            pb_core::rational::format_rational(&project.cost),
                            project.id
                        );
                    }
                }
                Ok(SatisfactionFunction::Table(entries.clone()))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            SatChoice::Cost => "cost".into(),
            SatChoice::Cardinality => "card".into(),
            SatChoice::Sqrt { .. } => "sqrt".into(),
            SatChoice::Table { label, .. } => format!("table:{label}"),
        }
    }
}

impl fmt::Display for SatChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
