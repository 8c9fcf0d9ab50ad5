//! Command-line construction specs: `kind:key=value:key=value`, where a
//! value may be a comma list or an inclusive integer range `a..b`; multiple
//! values per key expand into a cartesian grid.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};

use pb_core::generators::{Construction, RandomSpec};
use pb_core::rational::{parse_rational, Rational};

/// Known construction kind names.
pub const KIND_NAMES: &[&str] = &[
    "bounded_sat_worstcase",
    "vanishing_sat_worstcase",
    "non_dns_worstcase",
    "greedy_tight",
    "ejr1_tight",
    "mismatch_tight",
    "multiwinner",
    "random",
];

fn expand_values(raw: &str) -> Result<Vec<String>> {
    let mut values = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            bail!("empty value in {raw:?}");
        }
        if let Some((lo, hi)) = piece.split_once("..") {
            let lo: u64 = lo.parse().with_context(|| format!("bad range start in {piece:?}"))?;
            let hi: u64 = hi.parse().with_context(|| format!("bad range end in {piece:?}"))?;
            if lo > hi {
                bail!("empty range {piece:?}");
            }
            values.extend((lo..=hi).map(|v| v.to_string()));
        } else {
            values.push(piece.to_string());
        }
    }
    Ok(values)
}

struct Params<'a> {
    kind: &'a str,
    values: BTreeMap<String, String>,
}

impl Params<'_> {
    fn rational(&self, key: &str) -> Result<Rational> {
        let raw = self
            .values
            .get(key)
            .ok_or_else(|| anyhow!("{}: missing parameter {key}", self.kind))?;
        parse_rational(raw).map_err(|e| anyhow!("{}: parameter {key}: {e}", self.kind))
    }

    fn rational_or(&self, key: &str, default: Rational) -> Result<Rational> {
        match self.values.get(key) {
            Some(_) => self.rational(key),
            None => Ok(default),
        }
    }

    fn integer<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self
            .values
            .get(key)
            .ok_or_else(|| anyhow!("{}: missing parameter {key}", self.kind))?;
        raw.parse().map_err(|e| anyhow!("{}: parameter {key}: {e}", self.kind))
    }

    fn integer_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            Some(_) => self.integer(key),
            None => Ok(default),
        }
    }

    fn optional_integer<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            Some(_) => Ok(Some(self.integer(key)?)),
            None => Ok(None),
        }
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) {
                bail!("{}: unknown parameter {key:?} (allowed: {})", self.kind, allowed.join(", "));
            }
        }
        Ok(())
    }
}

fn build(kind: &str, values: BTreeMap<String, String>, default_seed: u64) -> Result<Construction> {
    let params = Params { kind, values };
    let hundred = Rational::from_integer(100.into());
    match kind {
        "bounded_sat_worstcase" => {
            params.reject_unknown(&["n", "b", "eps"])?;
            Ok(Construction::BoundedSatWorstcase {
                n: params.integer("n")?,
                budget: params.rational_or("b", hundred)?,
                eps: params.rational_or("eps", parse_rational("9/10").unwrap())?,
            })
        }
        "vanishing_sat_worstcase" => {
            params.reject_unknown(&["n", "b", "delta"])?;
            Ok(Construction::VanishingSatWorstcase {
                n: params.integer("n")?,
                budget: params.rational_or("b", hundred)?,
                delta: params.rational("delta")?,
            })
        }
        "non_dns_worstcase" => {
            params.reject_unknown(&["n", "b", "c_min", "c_max", "eps"])?;
            Ok(Construction::NonDnsWorstcase {
                n: params.integer("n")?,
                budget: params.rational_or("b", hundred)?,
                c_min: params.rational("c_min")?,
                c_max: params.rational("c_max")?,
                eps: params.rational("eps")?,
            })
        }
        "greedy_tight" => {
            params.reject_unknown(&["x", "n", "b", "eps"])?;
            Ok(Construction::GreedyTight {
                x: params.integer("x")?,
                n: params.integer("n")?,
                budget: params.rational_or("b", hundred)?,
                eps: params.rational("eps")?,
            })
        }
        "ejr1_tight" => {
            params.reject_unknown(&["b", "k1", "k2"])?;
            Ok(Construction::Ejr1Tight {
                budget: params.rational_or("b", hundred)?,
                k1: params.integer("k1")?,
                k2: params.integer("k2")?,
            })
        }
        "mismatch_tight" => {
            params.reject_unknown(&["b", "k1", "k2", "eps", "n"])?;
            Ok(Construction::MismatchTight {
                budget: params.rational_or("b", hundred)?,
                k1: params.integer("k1")?,
                k2: params.integer("k2")?,
                eps: params.rational("eps")?,
                n: params.optional_integer("n")?,
            })
        }
        "multiwinner" => {
            params.reject_unknown(&["k", "c", "n", "m", "seed"])?;
            let k: u32 = params.integer("k")?;
            Ok(Construction::Multiwinner {
                k,
                cost: params.rational_or("c", Rational::from_integer(1.into()))?,
                n: params.integer("n")?,
                num_projects: params.integer_or("m", k as usize)?,
                seed: params.optional_integer("seed")?,
            })
        }
        "random" => {
            params.reject_unknown(&["seed", "n_min", "n_max", "p_min", "p_max", "b", "denom"])?;
            let defaults = RandomSpec::default();
            Ok(Construction::Random(RandomSpec {
                seed: params.integer_or("seed", default_seed)?,
                n_range: (
                    params.integer_or("n_min", defaults.n_range.0)?,
                    params.integer_or("n_max", defaults.n_range.1)?,
                ),
                p_range: (
                    params.integer_or("p_min", defaults.p_range.0)?,
                    params.integer_or("p_max", defaults.p_range.1)?,
                ),
                budget: params.rational_or("b", defaults.budget)?,
                max_cost_denominator: params.integer_or("denom", defaults.max_cost_denominator)?,
            }))
        }
        other => bail!("unknown construction {other:?} (known: {})", KIND_NAMES.join(", ")),
    }
}

/// Parses one spec string, expanding value lists and ranges into the full
/// parameter grid in declaration order. `default_seed` fills in for
/// `random` specs without an explicit seed.
pub fn parse_construction_spec(spec: &str, default_seed: u64) -> Result<Vec<Construction>> {
    let mut parts = spec.split(':');
    let kind = parts.next().expect("split yields at least one part").trim();
    let mut keys: Vec<String> = Vec::new();
    let mut grids: Vec<Vec<String>> = Vec::new();
    for part in parts {
        let (key, raw) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("{kind}: expected key=value, got {part:?}"))?;
        let key = key.trim();
        if keys.iter().any(|k| k == key) {
            bail!("{kind}: duplicate parameter {key:?}");
        }
        keys.push(key.to_string());
        grids.push(expand_values(raw)?);
    }
    let mut combos: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for (key, values) in keys.iter().zip(&grids) {
        let mut next = Vec::with_capacity(combos.len() * values.len());
        for combo in &combos {
            for value in values {
                let mut extended = combo.clone();
                extended.insert(key.clone(), value.clone());
                next.push(extended);
            }
        }
        combos = next;
    }
    combos.into_iter().map(|values| build(kind, values, default_seed)).collect()
}
