use serde::{Deserialize, Serialize};

use super::diff::{Change, ChangeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Compatible,
    Breaking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ruling {
    Compatible,
    Breaking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuledChange {
    pub change: Change,
    pub ruling: Ruling,
    pub rule: String,
}

/// The gate's decision for one change set. Breaking iff at least one ruling
/// is breaking; this is what CI surfaces and what actualization enforces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rulings: Vec<RuledChange>,
}

impl Verdict {
    pub fn compatible_empty() -> Self {
        Self { outcome: Outcome::Compatible, rulings: Vec::new() }
    }

    pub fn is_breaking(&self) -> bool {
        self.outcome == Outcome::Breaking
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    /// Treat field removals as compatible. Off by default: existing
    /// consumers may depend on a removed dimension.
    pub allow_removals: bool,
}

/// Applies the rule table to every change. Deterministic; each change gets
/// exactly one ruling.
pub fn classify(changes: &[Change], options: ClassifyOptions) -> Verdict {
    let rulings: Vec<RuledChange> = changes
        .iter()
        .map(|change| {
            let (ruling, rule) = rule_for(change, options);
            RuledChange { change: change.clone(), ruling, rule: rule.to_string() }
        })
        .collect();
    let outcome = if rulings.iter().any(|r| r.ruling == Ruling::Breaking) {
        Outcome::Breaking
    } else {
        Outcome::Compatible
    };
    Verdict { outcome, rulings }
}

fn rule_for(change: &Change, options: ClassifyOptions) -> (Ruling, &'static str) {
    use ChangeKind::*;
    match change.kind {
        // Readers tolerate absent fields, so a fresh-id add never breaks
        // them; only a reused id would.
        AddField => (Ruling::Compatible, "add-field"),
        RemoveField if options.allow_removals => (Ruling::Compatible, "remove-field-allowed"),
        RemoveField => (Ruling::Breaking, "remove-field"),
        RenameField => (Ruling::Compatible, "rename-field"),
        ChangeFieldType => (Ruling::Breaking, "change-field-type"),
        ChangeOptionality => {
            if change.before.as_deref() == Some("required") {
                // Readers of optional fields already handle absence.
                (Ruling::Compatible, "optionality-relaxed")
            } else {
                (Ruling::Breaking, "optionality-tightened")
            }
        }
        ReuseFieldId => (Ruling::Breaking, "reuse-field-id"),
        AddEnumValue => (Ruling::Compatible, "add-enum-value"),
        RemoveEnumValue => (Ruling::Breaking, "remove-enum-value"),
        RenameEnumValue => (Ruling::Compatible, "rename-enum-value"),
        ChangeSemanticType => (Ruling::Breaking, "change-semantic-type"),
        ChangeUnit => (Ruling::Breaking, "change-unit"),
        ChangeValidation => {
            // Dropping @Validate widens; any other edit is conservatively
            // breaking since regex containment is not checked.
            if change.after.is_none() {
                (Ruling::Compatible, "validation-removed")
            } else {
                (Ruling::Breaking, "validation-changed")
            }
        }
        MetadataOnly => (Ruling::Compatible, "metadata-only"),
    }
}
