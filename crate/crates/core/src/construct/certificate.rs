//! Shared pieces of the emitted certificates: trust levels, ledgers, period
//! and index records, and re-verification by recomputation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Certificate format version.
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trust {
    MachineChecked,
    TheoremSupplied,
    TrustedExternal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub claim: String,
    pub trust: Trust,
    pub detail: String,
}

impl LedgerEntry {
    pub fn new(trust: Trust, claim: impl Into<String>, detail: impl Into<String>) -> Self {
        LedgerEntry { claim: claim.into(), trust, detail: detail.into() }
    }

    pub fn checked(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(Trust::MachineChecked, claim, detail)
    }

    pub fn theorem(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(Trust::TheoremSupplied, claim, detail)
    }

    pub fn external(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Self::new(Trust::TrustedExternal, claim, detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub value: u32,
    pub premises: Vec<LedgerEntry>,
}

/// The claimed index with the bounds it rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub value: u32,
    pub lower_bound: u32,
    pub upper_bound: u32,
    pub ledger: Vec<LedgerEntry>,
}

impl Index {
    /// P | I | P², a nonempty ledger, and bounds that pin the value.
    pub fn check(&self, p: u32) -> Result<()> {
        let i = self.value;
        if !i.is_multiple_of(p) || !(p * p).is_multiple_of(i) {
            return Err(Error::Verification(format!("index {i} violates P | I | P^2 for P = {p}")));
        }
        if self.ledger.is_empty() {
            return Err(Error::Verification("empty index ledger".into()));
        }
        if self.lower_bound != i || self.upper_bound != i {
            return Err(Error::Verification(format!(
                "bounds {}..{} do not pin the index {i}",
                self.lower_bound, self.upper_bound
            )));
        }
        Ok(())
    }
}

/// Compares a certificate with its recomputation and names the first
/// top-level field that differs.
pub fn compare<T: Serialize>(given: &T, rebuilt: &T) -> Result<()> {
    let a = serde_json::to_value(given).map_err(|e| Error::Invalid(e.to_string()))?;
    let b = serde_json::to_value(rebuilt).map_err(|e| Error::Invalid(e.to_string()))?;
    if a == b {
        return Ok(());
    }
    let field = match (&a, &b) {
        (serde_json::Value::Object(x), serde_json::Value::Object(y)) => x
            .iter()
            .find(|(k, v)| y.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .unwrap_or_else(|| "<extra field>".into()),
        _ => "<root>".into(),
    };
    Err(Error::Verification(format!("field {field:?} does not match its recomputation")))
}
