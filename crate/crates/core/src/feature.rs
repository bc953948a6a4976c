//! The eleven word-level features carried by every lexicon entry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const N_FEATURES: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureName {
    Valence,
    Arousal,
    Dominance,
    SemanticSize,
    Concreteness,
    Gender,
    Aoa,
    Familiarity,
    LogFrequency,
    Polysemy,
    Length,
}

impl FeatureName {
    /// Canonical column order used by every matrix and report.
    pub const ALL: [FeatureName; N_FEATURES] = [
        FeatureName::Valence,
        FeatureName::Arousal,
        FeatureName::Dominance,
        FeatureName::SemanticSize,
        FeatureName::Concreteness,
        FeatureName::Gender,
        FeatureName::Aoa,
        FeatureName::Familiarity,
        FeatureName::LogFrequency,
        FeatureName::Polysemy,
        FeatureName::Length,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureName::Valence => "valence",
            FeatureName::Arousal => "arousal",
            FeatureName::Dominance => "dominance",
            FeatureName::SemanticSize => "semantic_size",
            FeatureName::Concreteness => "concreteness",
            FeatureName::Gender => "gender",
            FeatureName::Aoa => "aoa",
            FeatureName::Familiarity => "familiarity",
            FeatureName::LogFrequency => "log_frequency",
            FeatureName::Polysemy => "polysemy",
            FeatureName::Length => "length",
        }
    }

    /// Every feature except `target`, in canonical order.
    pub fn predictors_for(target: FeatureName) -> Vec<FeatureName> {
        Self::ALL.iter().copied().filter(|&f| f != target).collect()
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        let f = match key.as_str() {
            "valence" | "val" => FeatureName::Valence,
            "arousal" | "arou" | "aro" => FeatureName::Arousal,
            "dominance" | "dom" => FeatureName::Dominance,
            "semantic_size" | "size" => FeatureName::SemanticSize,
            "concreteness" | "cnc" | "conc" => FeatureName::Concreteness,
            "gender" | "gend" => FeatureName::Gender,
            "aoa" | "age_of_acquisition" => FeatureName::Aoa,
            "familiarity" | "fam" => FeatureName::Familiarity,
            "log_frequency" | "logfreq" => FeatureName::LogFrequency,
            "polysemy" | "synsets" => FeatureName::Polysemy,
            "length" => FeatureName::Length,
            _ => {
                return Err(Error::UnknownVariant {
                    kind: "feature",
                    value: s.to_string(),
                })
            }
        };
        Ok(f)
    }
}
