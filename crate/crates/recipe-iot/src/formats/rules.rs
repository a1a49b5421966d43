//! Slot-inference rules: `device<TAB>how_kind<TAB>what<TAB>why<TAB>priority`,
//! with `*` as the any-device wildcard.

use recipe_iot_core::command::{HowKind, InferenceRule};

use crate::error::{Error, Result};

pub fn parse_rules(text: &str) -> Result<Vec<InferenceRule>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 5 {
            return Err(Error::parse(i + 1, format!("expected 5 columns, found {}", cols.len())));
        }
        let kind: HowKind = cols[1]
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("unknown how kind `{}`", cols[1])))?;
        let priority: i32 = cols[4]
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("invalid priority `{}`", cols[4])))?;
        let device = (cols[0] != "*").then_some(cols[0]);
        out.push(InferenceRule::new(device, kind, cols[2], cols[3], priority));
    }
    Ok(out)
}

pub fn emit_rules(rules: &[InferenceRule]) -> String {
    rules
        .iter()
        .map(|r| {
            format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.device.as_deref().unwrap_or("*"),
                r.how_kind,
                r.what,
                r.why,
                r.priority
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use recipe_iot_core::command::default_rules;

    #[test]
    fn defaults_round_trip() {
        let text = emit_rules(&default_rules());
        assert_eq!(text, "oven\ttemperature\ttemperature\tincrease\t10\n*\tduration\ttimer\tset\t0\nfridge\tduration\ttimer\tset\t10\n");
        assert_eq!(parse_rules(&text).unwrap(), default_rules());
    }

    #[test]
    fn bad_lines() {
        assert!(matches!(parse_rules("# c\noven\theat\ta\tb\t1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_rules("oven\ttemperature\ta\tb\n").is_err());
        assert!(parse_rules("oven\ttemperature\ta\tb\thigh\n").is_err());
    }
}
