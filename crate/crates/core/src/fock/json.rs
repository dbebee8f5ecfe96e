//! On-disk state format:
//! `{ "modes": int, "statistics": "boson"|"fermion", "terms": [ { "occ": [..], "re": f, "im": f } ] }`

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{FockState, Statistics};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub occ: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub modes: usize,
    pub statistics: Statistics,
    pub terms: Vec<TermRecord>,
}

impl From<&FockState> for StateFile {
    fn from(state: &FockState) -> Self {
        Self {
            modes: state.modes(),
            statistics: state.statistics(),
            terms: state
                .terms()
                .map(|(occ, amp)| TermRecord {
                    occ: occ.as_slice().to_vec(),
                    re: amp.re,
                    im: amp.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<StateFile> for FockState {
    type Error = crate::error::Error;

    fn try_from(file: StateFile) -> Result<Self> {
        FockState::from_terms(
            file.modes,
            file.statistics,
            file.terms.into_iter().map(|t| (t.occ, C64::new(t.re, t.im))),
        )
    }
}

impl FockState {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StateFile::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(s)?;
        file.try_into()
    }
}
