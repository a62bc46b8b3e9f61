//! Emotion class labels and their fixed integer encoding.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of emotion classes, neutral included.
pub const NUM_CLASSES: usize = 7;

/// One of the six basic emotions plus neutral.
///
/// The integer codes are fixed: Anger=0, Happy=1, Surprise=2, Disgust=3,
/// Fear=4, Sad=5, Neutral=6. A missing vote is modelled as
/// `Option<EmotionLabel>::None` and written as `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EmotionLabel {
    Anger,
    Happy,
    Surprise,
    Disgust,
    Fear,
    Sad,
    Neutral,
}

/// The text used for an unavailable label in every file format.
pub const UNAVAILABLE: &str = "-";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("emotion code {0} is out of range 0..=6")]
    OutOfRange(i64),
    #[error("unrecognised emotion label {0:?}")]
    Unknown(String),
}

impl EmotionLabel {
    pub const ALL: [EmotionLabel; NUM_CLASSES] = [
        EmotionLabel::Anger,
        EmotionLabel::Happy,
        EmotionLabel::Surprise,
        EmotionLabel::Disgust,
        EmotionLabel::Fear,
        EmotionLabel::Sad,
        EmotionLabel::Neutral,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: i64) -> Result<Self, LabelError> {
        usize::try_from(code).ok().and_then(|i| Self::ALL.get(i).copied()).ok_or(LabelError::OutOfRange(code))
    }

    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Anger => "Anger",
            EmotionLabel::Happy => "Happy",
            EmotionLabel::Surprise => "Surprise",
            EmotionLabel::Disgust => "Disgust",
            EmotionLabel::Fear => "Fear",
            EmotionLabel::Sad => "Sad",
            EmotionLabel::Neutral => "Neutral",
        }
    }

    /// Parses a cell that may hold `-` for "unavailable".
    pub fn parse_optional(text: &str) -> Result<Option<Self>, LabelError> {
        let text = text.trim();
        if text == UNAVAILABLE {
            Ok(None)
        } else {
            text.parse().map(Some)
        }
    }

    pub fn format_optional(label: Option<Self>) -> String {
        match label {
            Some(l) => l.code().to_string(),
            None => UNAVAILABLE.to_string(),
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts integer codes and English names, including the adjective and
/// noun variants that appear in annotation sheets ("Angry", "Happiness").
impl FromStr for EmotionLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(code) = s.parse::<i64>() {
            return Self::from_code(code);
        }
        let label = match s.to_ascii_lowercase().as_str() {
            "anger" | "angry" => EmotionLabel::Anger,
            "happy" | "happiness" | "joy" => EmotionLabel::Happy,
            "surprise" | "surprised" => EmotionLabel::Surprise,
            "disgust" | "disgusted" => EmotionLabel::Disgust,
            "fear" | "afraid" | "fearful" => EmotionLabel::Fear,
            "sad" | "sadness" => EmotionLabel::Sad,
            "neutral" => EmotionLabel::Neutral,
            _ => return Err(LabelError::Unknown(s.to_string())),
        };
        Ok(label)
    }
}

impl Serialize for EmotionLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.code())
    }
}

impl<'de> Deserialize<'de> for EmotionLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = i64::deserialize(deserializer)?;
        EmotionLabel::from_code(code).map_err(serde::de::Error::custom)
    }
}
