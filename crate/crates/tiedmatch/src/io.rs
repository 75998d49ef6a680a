//! Canonical JSON formats for instances, matchings and distributions.
//!
//! Agents are 1-based on disk. Utilities and probabilities are exact: a
//! JSON number is read from its literal text, and strings may hold
//! `"p/q"` fractions or decimals.

use std::fs;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tiedmatch_core::scalar::{format_rational, parse_rational};
use tiedmatch_core::{MarketInstance, Matching, MatchingDistribution, Rational};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    /// Syntax or type error while reading JSON.
    #[error("{path}: {message} (line {line}, column {column})")]
    Syntax { path: String, line: usize, column: usize, message: String },
    /// Well-formed JSON whose content does not describe a valid object.
    #[error("{path}: {message}")]
    Content { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;

fn content(path: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Content { path: path.into(), message: message.to_string() }
}

/// An exact rational read from a JSON number or string.
#[derive(Debug, Clone, PartialEq)]
struct Exact(Rational);

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match Value::deserialize(d)? {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s,
            other => return Err(de::Error::custom(format!("expected a number or \"p/q\" string, found {other}"))),
        };
        parse_rational(&text).map(Exact).ok_or_else(|| de::Error::custom(format!("malformed number {text:?}")))
    }
}

/// Integers become JSON numbers, everything else a `"p/q"` string.
pub fn rational_value(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(n) = format_rational(r).parse::<i64>() {
            return Value::from(n);
        }
    }
    Value::String(format_rational(r))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let syntax = |path: String, err: serde_json::Error| FormatError::Syntax {
        path,
        line: err.line(),
        column: err.column(),
        message: strip_position(&err.to_string()),
    };
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        syntax(path, err.into_inner())
    })?;
    de.end().map_err(|err| syntax(String::new(), err))?;
    Ok(value)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(pos) => message[..pos].to_string(),
        None => message.to_string(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n_workers: usize,
    n_jobs: usize,
    utility: Vec<Vec<Exact>>,
    job_prefs: Vec<Vec<usize>>,
    #[serde(default)]
    meta: Option<Value>,
}

#[derive(Serialize)]
struct InstanceOut<'a> {
    n_workers: usize,
    n_jobs: usize,
    utility: Vec<Vec<Value>>,
    job_prefs: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a Value>,
}

/// An instance plus any free-form metadata stored next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub instance: MarketInstance,
    pub meta: Option<Value>,
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let raw: RawInstance = parse(text)?;
    if raw.utility.len() != raw.n_workers {
        return Err(content("utility", format!("{} rows for n_workers = {}", raw.utility.len(), raw.n_workers)));
    }
    for (w, row) in raw.utility.iter().enumerate() {
        if row.len() != raw.n_jobs {
            return Err(content(format!("utility[{w}]"), format!("{} entries for n_jobs = {}", row.len(), raw.n_jobs)));
        }
    }
    if raw.job_prefs.len() != raw.n_jobs {
        return Err(content("job_prefs", format!("{} lists for n_jobs = {}", raw.job_prefs.len(), raw.n_jobs)));
    }
    let mut prefs = Vec::with_capacity(raw.n_jobs);
    for (a, list) in raw.job_prefs.iter().enumerate() {
        let mut zero_based = Vec::with_capacity(list.len());
        for (i, &w) in list.iter().enumerate() {
            if w == 0 || w > raw.n_workers {
                return Err(content(
                    format!("job_prefs[{a}][{i}]"),
                    format!("worker {w} outside 1..={}", raw.n_workers),
                ));
            }
            zero_based.push(w - 1);
        }
        prefs.push(zero_based);
    }
    let rows = raw.utility.into_iter().map(|row| row.into_iter().map(|x| x.0).collect()).collect();
    let instance = MarketInstance::new(raw.n_workers, raw.n_jobs, rows, prefs).map_err(|e| content("", e))?;
    Ok(InstanceFile { instance, meta: raw.meta })
}

pub fn instance_to_value(inst: &MarketInstance, meta: Option<&Value>) -> Value {
    let out = InstanceOut {
        n_workers: inst.n_workers(),
        n_jobs: inst.n_jobs(),
        utility: inst.utility_rows().iter().map(|row| row.iter().map(rational_value).collect()).collect(),
        job_prefs: inst.job_prefs().iter().map(|l| l.iter().map(|w| w + 1).collect()).collect(),
        meta,
    };
    serde_json::to_value(out).expect("instance serializes")
}

pub fn serialize_instance(inst: &MarketInstance, meta: Option<&Value>) -> String {
    to_pretty(&instance_to_value(inst, meta))
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    parse_instance(&read(path)?).map_err(|e| with_file(path, e))
}

fn with_file(path: &Path, err: FormatError) -> FormatError {
    let file = path.display();
    match err {
        FormatError::Syntax { path: p, line, column, message } => {
            FormatError::Syntax { path: format!("{file}: {}", display_path(&p)), line, column, message }
        }
        FormatError::Content { path: p, message } => {
            FormatError::Content { path: format!("{file}: {}", display_path(&p)), message }
        }
        io => io,
    }
}

fn display_path(p: &str) -> &str {
    if p.is_empty() || p == "." {
        "<root>"
    } else {
        p
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatching {
    pairs: Vec<(usize, usize)>,
}

fn matching_from_raw(raw: &RawMatching, n_workers: usize, n_jobs: usize, at: &str) -> Result<Matching> {
    let mut mu = Matching::empty(n_workers, n_jobs);
    for (i, &(w, a)) in raw.pairs.iter().enumerate() {
        let here = format!("{at}pairs[{i}]");
        if w == 0 || w > n_workers {
            return Err(content(here, format!("worker {w} outside 1..={n_workers}")));
        }
        if a == 0 || a > n_jobs {
            return Err(content(here, format!("job {a} outside 1..={n_jobs}")));
        }
        mu.insert(w - 1, a - 1).map_err(|e| content(here, e))?;
    }
    Ok(mu)
}

/// Reads `{"pairs": [[w, a], …]}` for a market of the given size.
pub fn parse_matching(text: &str, n_workers: usize, n_jobs: usize) -> Result<Matching> {
    let raw: RawMatching = parse(text)?;
    matching_from_raw(&raw, n_workers, n_jobs, "")
}

pub fn load_matching(path: &Path, n_workers: usize, n_jobs: usize) -> Result<Matching> {
    parse_matching(&read(path)?, n_workers, n_jobs).map_err(|e| with_file(path, e))
}

pub fn matching_to_value(mu: &Matching) -> Value {
    let pairs: Vec<[usize; 2]> = mu.pairs().map(|(w, a)| [w + 1, a + 1]).collect();
    serde_json::json!({ "pairs": pairs })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    matching: RawMatching,
    prob: Exact,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    support: Vec<RawEntry>,
}

/// Reads `{"support": [{"matching": {...}, "prob": "1/2"}, …]}`.
pub fn parse_distribution(text: &str, n_workers: usize, n_jobs: usize) -> Result<MatchingDistribution> {
    let raw: RawDistribution = parse(text)?;
    let mut support = Vec::with_capacity(raw.support.len());
    for (i, entry) in raw.support.iter().enumerate() {
        let mu = matching_from_raw(&entry.matching, n_workers, n_jobs, &format!("support[{i}].matching."))?;
        support.push((mu, entry.prob.0.clone()));
    }
    MatchingDistribution::new(support).map_err(|e| content("support", e))
}

pub fn load_distribution(path: &Path, n_workers: usize, n_jobs: usize) -> Result<MatchingDistribution> {
    parse_distribution(&read(path)?, n_workers, n_jobs).map_err(|e| with_file(path, e))
}

pub fn distribution_to_value(dist: &MatchingDistribution) -> Value {
    let support: Vec<Value> = dist
        .support()
        .iter()
        .map(|(mu, p)| serde_json::json!({ "matching": matching_to_value(mu), "prob": rational_value(p) }))
        .collect();
    serde_json::json!({ "support": support })
}

pub fn to_pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiedmatch_core::gen;
    use tiedmatch_core::scalar::ratio;

    #[test]
    fn instance_round_trips() {
        for inst in [
            gen::example1(),
            gen::example2(),
            gen::appendix_h_nu(),
            MarketInstance::new(0, 0, vec![], vec![]).unwrap(),
        ] {
            let text = serialize_instance(&inst, None);
            assert_eq!(parse_instance(&text).unwrap().instance, inst);
        }
        let text = serialize_instance(&gen::appendix_h_nu(), None);
        assert!(text.contains("\"1/2\"") && text.contains("\"1/4\""));
    }

    #[test]
    fn decimals_are_exact() {
        let text = r#"{"n_workers": 1, "n_jobs": 3, "utility": [[0.1, "0.25", "2/3"]], "job_prefs": [[1], [1], [1]]}"#;
        let inst = parse_instance(text).unwrap().instance;
        assert_eq!(inst.utility_row(0), &[ratio(1, 10), ratio(1, 4), ratio(2, 3)]);
    }

    #[test]
    fn errors_name_the_element() {
        let text = "{\n  \"n_workers\": 1,\n  \"n_jobs\": 2,\n  \"utility\": [[1, \"x/2\"]],\n  \"job_prefs\": [[1], [1]]\n}";
        match parse_instance(text).unwrap_err() {
            FormatError::Syntax { path, line, .. } => {
                assert_eq!(path, "utility[0][1]");
                assert_eq!(line, 4);
            }
            other => panic!("{other}"),
        }
        let text = r#"{"n_workers": 2, "n_jobs": 1, "utility": [[1], [1]], "job_prefs": [[1, 3]]}"#;
        let err = parse_instance(text).unwrap_err().to_string();
        assert!(err.starts_with("job_prefs[0][1]"), "{err}");
        let text = r#"{"n_workers": 1, "n_jobs": 1, "utility": [[1]], "job_prefs": [[1]], "extra": 0}"#;
        assert!(matches!(parse_instance(text), Err(FormatError::Syntax { .. })));
    }

    #[test]
    fn matching_and_distribution_round_trip() {
        let mu = Matching::from_pairs(3, 2, [(0, 1), (1, 0)]).unwrap();
        let text = to_pretty(&matching_to_value(&mu));
        assert_eq!(parse_matching(&text, 3, 2).unwrap(), mu);
        let other = Matching::from_pairs(3, 2, [(2, 1)]).unwrap();
        let dist = MatchingDistribution::uniform(vec![mu, other]).unwrap();
        let text = to_pretty(&distribution_to_value(&dist));
        assert_eq!(parse_distribution(&text, 3, 2).unwrap(), dist);
        let bad = r#"{"support": [{"matching": {"pairs": [[1, 1], [2, 1]]}, "prob": 1}]}"#;
        let err = parse_distribution(bad, 3, 2).unwrap_err().to_string();
        assert!(err.starts_with("support[0].matching.pairs[1]"), "{err}");
    }
}
