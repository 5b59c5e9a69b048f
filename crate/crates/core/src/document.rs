//! The JSON input document shared by every command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::branchdyn::{BranchValuationRecord, PolynomialValuationProfile};
use crate::error::{Error, Result};
use crate::exactval::Extended;
use crate::ExtendedRational;

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub p: u64,
    pub r: u32,
    pub v_p: u64,
    #[serde(default = "one")]
    pub e_ke: u64,
    pub coeff_valuations: BTreeMap<u64, ExtendedRational>,
    pub base_valuation: ExtendedRational,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branch_valuations: Vec<ExtendedRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leading_zeros: Option<usize>,
    /// Slope choices for predicted steps with several candidates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<usize>,
}

fn field(name: &str, e: Error) -> Error {
    match e {
        Error::InvalidInput(msg) | Error::InconsistentRecord(msg) if !msg.starts_with(name) => {
            Error::InvalidInput(format!("{name}: {msg}"))
        }
        other => other,
    }
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("input document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn profile(&self) -> Result<PolynomialValuationProfile> {
        PolynomialValuationProfile::new(self.p, self.r, self.v_p, &self.coeff_valuations, self.e_ke)
            .map_err(|e| match e {
                Error::Overflow(m) => Error::InvalidInput(m),
                other => other,
            })
    }

    /// The recorded branch: `branch_valuations` if present (its first entry
    /// must equal `base_valuation`), else the base alone.
    pub fn branch(&self) -> Result<Vec<ExtendedRational>> {
        let vals = if self.branch_valuations.is_empty() {
            vec![self.base_valuation.clone()]
        } else {
            if self.branch_valuations[0] != self.base_valuation {
                return Err(Error::InvalidInput(format!(
                    "branch_valuations[0] = {} differs from base_valuation = {}",
                    self.branch_valuations[0], self.base_valuation
                )));
            }
            self.branch_valuations.clone()
        };
        let zeros = vals.iter().take_while(|v| v.is_infinite()).count();
        if let Some(lz) = self.leading_zeros {
            if lz != zeros {
                return Err(Error::InvalidInput(format!(
                    "leading_zeros = {lz} but the branch starts with {zeros} zero entries"
                )));
            }
        }
        Ok(vals)
    }

    pub fn record(&self, profile: &PolynomialValuationProfile) -> Result<BranchValuationRecord> {
        let vals = self.branch()?;
        BranchValuationRecord::new(profile, vals).map_err(|e| field("branch_valuations", e))
    }

    /// Profile and record together, both validated.
    pub fn parse(&self) -> Result<(PolynomialValuationProfile, BranchValuationRecord)> {
        if let Some(d) = self.d {
            if d == 0 {
                return Err(Error::InvalidInput("d: must be nonzero".into()));
            }
        }
        let profile = self.profile()?;
        let record = self.record(&profile)?;
        if let (Some(d), Some(sign)) = (self.d, record.sign()) {
            if d.signum() != i64::from(sign) {
                return Err(Error::InvalidInput(format!(
                    "d: {d} must have the sign of the branch valuations"
                )));
            }
        }
        Ok((profile, record))
    }

    pub fn base_is_zero(&self) -> bool {
        matches!(self.base_valuation, Extended::Infinity)
    }
}
