//! Parity-oblivious random exclusion and retrieval codes over `Z_m^n`:
//! classical bounds, qubit constructions and a see-saw optimizer for the
//! quantum value.

pub mod classical;
pub mod cli;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod seesaw;
pub mod zmod;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which outcome counts as a win for output `b` against the queried digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Win when `b ≠ x_y`.
    Exclusion,
    /// Win when `b = x_y`.
    Retrieval,
}

impl Task {
    pub fn succeeds(self, b: u32, target: u32) -> bool {
        match self {
            Task::Exclusion => b != target,
            Task::Retrieval => b == target,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::Exclusion => "exclusion",
            Task::Retrieval => "retrieval",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exclusion" | "porec" | "rec" => Ok(Task::Exclusion),
            "retrieval" | "porac" | "rac" => Ok(Task::Retrieval),
            other => Err(format!("unknown task '{other}'")),
        }
    }
}
