//! The PDQI-9 instrument: nine criteria, the 5-point Likert scale, and the
//! perceived-origin categories.
//!
//! Everything here is immutable domain data. A [`Scores`] value can only be
//! built through [`validate_scores`] or [`Scores::from_values`], so every
//! [`Evaluation`] in the system carries exactly nine in-range ratings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Anchor text for the lowest point of the scale.
pub const ANCHOR_LOW: &str = "Not at all";
/// Anchor text for the highest point of the scale.
pub const ANCHOR_HIGH: &str = "Extremely";

pub const CRITERION_COUNT: usize = 9;

/// Stable identifier for one rubric criterion, in ordinal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKey {
    UpToDate,
    Accurate,
    Thorough,
    Useful,
    Organized,
    Comprehensible,
    Succinct,
    Synthesized,
    InternallyConsistent,
}

impl CriterionKey {
    pub const ALL: [CriterionKey; CRITERION_COUNT] = [
        CriterionKey::UpToDate,
        CriterionKey::Accurate,
        CriterionKey::Thorough,
        CriterionKey::Useful,
        CriterionKey::Organized,
        CriterionKey::Comprehensible,
        CriterionKey::Succinct,
        CriterionKey::Synthesized,
        CriterionKey::InternallyConsistent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionKey::UpToDate => "up_to_date",
            CriterionKey::Accurate => "accurate",
            CriterionKey::Thorough => "thorough",
            CriterionKey::Useful => "useful",
            CriterionKey::Organized => "organized",
            CriterionKey::Comprehensible => "comprehensible",
            CriterionKey::Succinct => "succinct",
            CriterionKey::Synthesized => "synthesized",
            CriterionKey::InternallyConsistent => "internally_consistent",
        }
    }

    /// Zero-based position in the rubric.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn ordinal(self) -> u8 {
        self as u8 + 1
    }

    pub fn criterion(self) -> &'static RubricCriterion {
        &RUBRIC[self.index()]
    }
}

impl fmt::Display for CriterionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown criterion key `{0}`")]
pub struct UnknownCriterion(pub String);

impl FromStr for CriterionKey {
    type Err = UnknownCriterion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CriterionKey::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownCriterion(s.to_string()))
    }
}

/// One item of the instrument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RubricCriterion {
    pub ordinal: u8,
    pub key: CriterionKey,
    pub display_label: &'static str,
    /// Wording shown on the rating form, when it differs from `display_label`.
    pub form_label: &'static str,
    pub description: &'static str,
}

static RUBRIC: [RubricCriterion; CRITERION_COUNT] = [
    RubricCriterion {
        ordinal: 1,
        key: CriterionKey::UpToDate,
        display_label: "Up-to-date",
        form_label: "Up-to-date",
        description: "Reflects the inclusion of the most recent patient information.",
    },
    RubricCriterion {
        ordinal: 2,
        key: CriterionKey::Accurate,
        display_label: "Accurate",
        form_label: "Accurate",
        description: "Assesses factual correctness and absence of errors.",
    },
    RubricCriterion {
        ordinal: 3,
        key: CriterionKey::Thorough,
        display_label: "Thorough",
        form_label: "Thorough",
        description:
            "Evaluates the completeness of the note in addressing relevant patient issues.",
    },
    RubricCriterion {
        ordinal: 4,
        key: CriterionKey::Useful,
        display_label: "Useful",
        form_label: "Useful",
        description:
            "Judges the relevance and value of the information for clinical decision-making.",
    },
    RubricCriterion {
        ordinal: 5,
        key: CriterionKey::Organized,
        display_label: "Organized",
        form_label: "Organized",
        description: "Measures the logical structure and arrangement of the note.",
    },
    RubricCriterion {
        ordinal: 6,
        key: CriterionKey::Comprehensible,
        display_label: "Comprehensible",
        form_label: "Comprehensible",
        description: "Assesses the clarity and ease of understanding.",
    },
    RubricCriterion {
        ordinal: 7,
        key: CriterionKey::Succinct,
        display_label: "Succinct",
        form_label: "Concise",
        description: "Evaluates conciseness and avoidance of redundancy.",
    },
    RubricCriterion {
        ordinal: 8,
        key: CriterionKey::Synthesized,
        display_label: "Synthesized",
        form_label: "Thoughtful",
        description: "Determines the integration of information and coherent assessment/plan.",
    },
    RubricCriterion {
        ordinal: 9,
        key: CriterionKey::InternallyConsistent,
        display_label: "Internally consistent",
        form_label: "Internally consistent",
        description: "Checks for contradictions within the note.",
    },
];

/// The nine criteria in ordinal order.
pub fn rubric() -> &'static [RubricCriterion; CRITERION_COUNT] {
    &RUBRIC
}

/// An integer rating on the 1..=5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "u8")]
pub struct LikertScore(u8);

impl LikertScore {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(value: i64) -> Option<Self> {
        (i64::from(Self::MIN)..=i64::from(Self::MAX))
            .contains(&value)
            .then_some(LikertScore(value as u8))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl From<LikertScore> for u8 {
    fn from(s: LikertScore) -> u8 {
        s.0
    }
}

impl fmt::Display for LikertScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An evaluator's judgment of who wrote the note.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Human,
    Ai,
    Unsure,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::Human, Origin::Ai, Origin::Unsure];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Human => "human",
            Origin::Ai => "ai",
            Origin::Unsure => "unsure",
        }
    }

    /// Option text as shown on the rating form.
    pub fn form_label(self) -> &'static str {
        match self {
            Origin::Human => "Human written note",
            Origin::Ai => "Generative AI note",
            Origin::Unsure => "I am not sure",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid origin `{0}` (expected human, ai or unsure)")]
pub struct InvalidOrigin(pub String);

impl FromStr for Origin {
    type Err = InvalidOrigin;

    /// Accepts the canonical keys and the form wordings, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase();
        match norm.as_str() {
            "human" | "human written note" => Ok(Origin::Human),
            "ai" | "generative ai note" => Ok(Origin::Ai),
            "unsure" | "i am not sure" | "unable to determine" | "undetermined" => {
                Ok(Origin::Unsure)
            }
            _ => Err(InvalidOrigin(s.to_string())),
        }
    }
}

/// Nine validated ratings indexed by criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scores([LikertScore; CRITERION_COUNT]);

impl Scores {
    /// Builds from nine values in ordinal order.
    pub fn from_values(values: [i64; CRITERION_COUNT]) -> Result<Self, ScoreErrors> {
        let raw = CriterionKey::ALL
            .iter()
            .zip(values)
            .map(|(k, v)| (k.as_str().to_string(), v))
            .collect();
        validate_scores(&raw)
    }

    pub fn get(&self, key: CriterionKey) -> LikertScore {
        self.0[key.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (CriterionKey, LikertScore)> + '_ {
        CriterionKey::ALL.into_iter().zip(self.0.iter().copied())
    }

    pub fn values(&self) -> [u8; CRITERION_COUNT] {
        self.0.map(LikertScore::get)
    }

    /// Sum of the nine ratings, always within 9..=45.
    pub fn total(&self) -> u32 {
        self.0.iter().map(|s| u32::from(s.get())).sum()
    }
}

impl Serialize for Scores {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(CRITERION_COUNT))?;
        for (k, v) in self.iter() {
            map.serialize_entry(k.as_str(), &v.get())?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreIssue {
    #[error("missing score for `{0}`")]
    MissingCriterion(CriterionKey),
    #[error("score for `{0}` is {1}, expected 1 to 5")]
    OutOfRange(CriterionKey, i64),
    #[error("unknown criterion key `{0}`")]
    UnknownKey(String),
}

impl ScoreIssue {
    pub fn code(&self) -> &'static str {
        match self {
            ScoreIssue::MissingCriterion(_) => "missing_criterion",
            ScoreIssue::OutOfRange(..) => "out_of_range",
            ScoreIssue::UnknownKey(_) => "unknown_criterion",
        }
    }

    pub fn field(&self) -> &str {
        match self {
            ScoreIssue::MissingCriterion(k) | ScoreIssue::OutOfRange(k, _) => k.as_str(),
            ScoreIssue::UnknownKey(k) => k,
        }
    }
}

/// Every problem found in a raw score map, in criterion order followed by
/// unknown keys.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scores: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ScoreErrors(pub Vec<ScoreIssue>);

/// Checks a raw key/value map against the rubric.
pub fn validate_scores(raw: &BTreeMap<String, i64>) -> Result<Scores, ScoreErrors> {
    let mut issues = Vec::new();
    let mut values = [LikertScore(LikertScore::MIN); CRITERION_COUNT];
    for key in CriterionKey::ALL {
        match raw.get(key.as_str()) {
            None => issues.push(ScoreIssue::MissingCriterion(key)),
            Some(&v) => match LikertScore::new(v) {
                Some(s) => values[key.index()] = s,
                None => issues.push(ScoreIssue::OutOfRange(key, v)),
            },
        }
    }
    issues.extend(
        raw.keys()
            .filter(|k| k.parse::<CriterionKey>().is_err())
            .map(|k| ScoreIssue::UnknownKey(k.clone())),
    );
    if issues.is_empty() {
        Ok(Scores(values))
    } else {
        Err(ScoreErrors(issues))
    }
}

/// One evaluator's ratings for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub document_id: String,
    pub evaluator_name: String,
    pub scores: Scores,
    pub origin: Origin,
    pub timestamp: DateTime<Utc>,
}

impl Evaluation {
    pub fn total_score(&self) -> u32 {
        self.scores.total()
    }
}

/// Sum of the nine ratings of an evaluation.
pub fn total_score(evaluation: &Evaluation) -> u32 {
    evaluation.total_score()
}
