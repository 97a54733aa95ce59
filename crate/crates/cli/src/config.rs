//! Run configuration: one TOML document with a `[study.<name>]` table (or an
//! array of tables) per study. Missing sections fall back to the defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use toml::{Table, Value};

use kglab::experiments::{
    ConjectureConfig, ConvergenceConfig, DecayConfig, GrowthConfig, LinearConfig, SimulateConfig, StudyConfig,
};

use crate::Failure;

pub const STUDY_NAMES: [&str; 6] = ["convergence", "linear", "growth", "decay", "conjecture", "simulate"];

/// Study name for a subcommand.
pub fn study_for(subcommand: &str) -> &'static str {
    match subcommand {
        "converge" => "convergence",
        "linear" => "linear",
        "growth" => "growth",
        "decay" => "decay",
        "conjecture" => "conjecture",
        _ => "simulate",
    }
}

pub fn read_document(path: Option<&Path>) -> Result<Table, Failure> {
    let Some(path) = path else {
        return Ok(Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

pub fn parse_document(text: &str) -> Result<Table, String> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
        let what = e.message().split_whitespace().collect::<Vec<_>>().join(" ");
        match line {
            Some(n) => format!("line {n}: {what}"),
            None => what,
        }
    })?;
    if let Some(key) = doc.keys().find(|k| *k != "study") {
        return Err(format!("unknown top-level key `{key}` (expected [study.<name>] sections)"));
    }
    if let Some(study) = doc.get("study") {
        let Value::Table(sections) = study else {
            return Err("`study` must be a table of sections".into());
        };
        if let Some(name) = sections.keys().find(|k| !STUDY_NAMES.contains(&k.as_str())) {
            return Err(format!("unknown study section [study.{name}] (known: {})", STUDY_NAMES.join(", ")));
        }
    }
    Ok(doc)
}

fn sections<T: DeserializeOwned>(doc: &Table, name: &str) -> Result<Option<Vec<T>>, String> {
    let Some(value) = doc.get("study").and_then(|s| s.get(name)) else {
        return Ok(None);
    };
    let items = match value {
        Value::Array(items) => items.clone(),
        other => vec![other.clone()],
    };
    items
        .into_iter()
        .map(|v| {
            v.try_into::<T>().map_err(|e| {
                format!("[study.{name}]: {}", e.message().split_whitespace().collect::<Vec<_>>().join(" "))
            })
        })
        .collect::<Result<Vec<T>, String>>()
        .map(Some)
}

/// Validated configurations for `study`, with defaults filled.
pub fn study_configs(doc: &Table, study: &str, include_d3: bool) -> Result<Vec<StudyConfig>, Failure> {
    let load = || -> Result<Vec<StudyConfig>, String> {
        Ok(match study {
            "convergence" => sections::<ConvergenceConfig>(doc, study)?
                .unwrap_or_else(|| vec![ConvergenceConfig::default(), ConvergenceConfig::planar()])
                .into_iter()
                .map(StudyConfig::Convergence)
                .collect(),
            "linear" => sections::<LinearConfig>(doc, study)?
                .unwrap_or_else(|| vec![Default::default()])
                .into_iter()
                .map(StudyConfig::Linear)
                .collect(),
            "growth" => sections::<GrowthConfig>(doc, study)?
                .unwrap_or_else(|| vec![Default::default()])
                .into_iter()
                .map(StudyConfig::Growth)
                .collect(),
            "decay" => sections::<DecayConfig>(doc, study)?
                .unwrap_or_else(|| vec![Default::default()])
                .into_iter()
                .map(|mut c| {
                    c.include_d3 |= include_d3;
                    StudyConfig::Decay(c)
                })
                .collect(),
            "conjecture" => sections::<ConjectureConfig>(doc, study)?
                .unwrap_or_else(|| vec![Default::default()])
                .into_iter()
                .map(StudyConfig::Conjecture)
                .collect(),
            _ => sections::<SimulateConfig>(doc, study)?
                .unwrap_or_else(|| vec![Default::default()])
                .into_iter()
                .map(StudyConfig::Simulate)
                .collect(),
        })
    };
    let configs = load().map_err(Failure::Validation)?;
    for c in &configs {
        c.validate().map_err(|e| Failure::Validation(format!("[study.{study}]: {e}")))?;
    }
    Ok(configs)
}
