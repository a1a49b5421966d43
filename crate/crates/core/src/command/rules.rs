use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{HowKind, IoTCommand};

/// Fills What/Why for commands on `device` (any device when `None`) whose
/// How value has kind `how_kind`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceRule {
    pub device: Option<String>,
    pub how_kind: HowKind,
    pub what: String,
    pub why: String,
    pub priority: i32,
}

impl InferenceRule {
    pub fn new(device: Option<&str>, how_kind: HowKind, what: &str, why: &str, priority: i32) -> Self {
        Self {
            device: device.map(str::to_string),
            how_kind,
            what: what.to_string(),
            why: why.to_string(),
            priority,
        }
    }

    pub fn matches(&self, device: &str, kind: HowKind) -> bool {
        self.how_kind == kind && self.device.as_deref().is_none_or(|d| d == device)
    }
}

pub fn default_rules() -> Vec<InferenceRule> {
    vec![
        InferenceRule::new(Some("oven"), HowKind::Temperature, "temperature", "increase", 10),
        InferenceRule::new(None, HowKind::Duration, "timer", "set", 0),
        InferenceRule::new(Some("fridge"), HowKind::Duration, "timer", "set", 10),
    ]
}

/// The single rule that fires for `(device, kind)`: highest priority, then a
/// device-specific rule over a wildcard, then the earliest in the list.
pub fn select_rule<'a>(rules: &'a [InferenceRule], device: &str, kind: HowKind) -> Option<&'a InferenceRule> {
    let mut best: Option<&InferenceRule> = None;
    for r in rules.iter().filter(|r| r.matches(device, kind)) {
        let better = best.is_none_or(|b| {
            (r.priority, r.device.is_some()) > (b.priority, b.device.is_some())
        });
        if better {
            best = Some(r);
        }
    }
    best
}

/// Fills missing What/Why slots from the matching rule and records them in
/// `inferred`. Textual slots and `where_` are never changed; commands without
/// a device or a How value, or with no matching rule, come back unchanged.
pub fn infer_missing_slots(mut cmd: IoTCommand, rules: &[InferenceRule]) -> IoTCommand {
    if cmd.what.is_some() && cmd.why.is_some() {
        return cmd;
    }
    let (Some(device), Some(how)) = (cmd.where_.as_deref(), cmd.how.as_ref()) else {
        return cmd;
    };
    let Some(rule) = select_rule(rules, device, how.kind) else {
        return cmd;
    };
    let (what, why) = (rule.what.clone(), rule.why.clone());
    if cmd.what.is_none() {
        cmd.what = Some(what);
        cmd.inferred.insert("what".to_string());
    }
    if cmd.why.is_none() {
        cmd.why = Some(why);
        cmd.inferred.insert("why".to_string());
    }
    cmd.refresh();
    cmd
}
