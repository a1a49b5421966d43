//! RecipeQA-style recipe JSON.
//!
//! Accepts a JSON array of records, an object with a `data` array, or one
//! record per line. A record needs an id (`id` or `recipe_id`) and its steps,
//! either as `steps`/`instructions` string lists or as a `context` list of
//! objects with a `body`. Other fields are ignored.

use recipe_iot_core::corpus::RawRecipe;
use serde_json::Value;

use crate::error::{Error, Result};

/// A record that could not be read, by position in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub index: usize,
    pub message: String,
}

fn records(text: &str) -> Result<Vec<Result<Value, String>>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        if let Ok(v) = serde_json::from_str::<Value>(text) {
            return match v {
                Value::Array(items) => Ok(items.into_iter().map(Ok).collect()),
                Value::Object(mut map) => match map.remove("data") {
                    Some(Value::Array(items)) => Ok(items.into_iter().map(Ok).collect()),
                    Some(_) => Err(Error::parse(1, "`data` is not an array")),
                    None => Ok(vec![Ok(Value::Object(map))]),
                },
                _ => Err(Error::parse(1, "expected a JSON array or object")),
            };
        }
    }
    Ok(text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
        .collect())
}

fn string_list(v: &Value) -> Option<Vec<String>> {
    v.as_array()?
        .iter()
        .map(|s| s.as_str().map(str::to_string))
        .collect()
}

fn recipe(v: &Value) -> Result<RawRecipe, String> {
    let obj = v.as_object().ok_or("record is not an object")?;
    let id = ["id", "recipe_id"]
        .iter()
        .find_map(|k| match obj.get(*k)? {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        })
        .filter(|s| !s.is_empty())
        .ok_or("missing id")?;
    let title = obj.get("title").and_then(Value::as_str).unwrap_or_default().to_string();
    let instructions = if let Some(steps) = obj.get("steps").or_else(|| obj.get("instructions")) {
        string_list(steps).ok_or("steps must be a list of strings")?
    } else if let Some(ctx) = obj.get("context") {
        ctx.as_array()
            .ok_or("context must be a list")?
            .iter()
            .map(|c| c.get("body").and_then(Value::as_str).map(str::to_string))
            .collect::<Option<Vec<_>>>()
            .ok_or("context entries need a string body")?
    } else {
        return Err("missing steps".into());
    };
    Ok(RawRecipe {
        id,
        title,
        instructions,
    })
}

/// Reads every record; malformed ones are reported and skipped.
pub fn ingest_recipeqa(text: &str) -> Result<(Vec<RawRecipe>, Vec<RecordError>)> {
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    for (index, rec) in records(text)?.into_iter().enumerate() {
        match rec.and_then(|v| recipe(&v)) {
            Ok(r) => ok.push(r),
            Err(message) => errors.push(RecordError { index, message }),
        }
    }
    Ok((ok, errors))
}
