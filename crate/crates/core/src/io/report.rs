//! Versioned JSON envelope shared by every report.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// SHA-256 of raw input bytes, hex.
pub fn fingerprint_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub tool: String,
    pub version: String,
    pub module: String,
    pub operation: String,
    /// Unit of every quantity in the payload.
    pub units: BTreeMap<String, String>,
    /// Input name → content fingerprint.
    pub inputs: BTreeMap<String, String>,
    pub payload: serde_json::Value,
}

impl ReportEnvelope {
    pub fn new(module: &str, operation: &str, payload: impl Serialize) -> Result<Self, serde_json::Error> {
        Ok(ReportEnvelope {
            tool: "colorcenter".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            module: module.into(),
            operation: operation.into(),
            units: BTreeMap::new(),
            inputs: BTreeMap::new(),
            payload: serde_json::to_value(payload)?,
        })
    }

    pub fn unit(mut self, quantity: &str, unit: &str) -> Self {
        self.units.insert(quantity.into(), unit.into());
        self
    }

    pub fn input(mut self, name: &str, bytes: &[u8]) -> Self {
        self.inputs.insert(name.into(), fingerprint_bytes(bytes));
        self
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        // serde_json's default map is ordered, so a round trip through
        // Value sorts nested payload keys too.
        let v = serde_json::to_value(self).unwrap_or(serde_json::Value::Null);
        let mut s = serde_json::to_string_pretty(&v).unwrap_or_default();
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct P {
        zeta: f64,
        alpha: u32,
    }

    #[test]
    fn keys_are_sorted_and_stable() {
        let r = ReportEnvelope::new("corr", "mm", P { zeta: 0.25, alpha: 1 }).unwrap().unit("energy", "eV").input("x", b"abc");
        let j = r.to_json();
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
        assert!(j.find("\"inputs\"").unwrap() < j.find("\"module\"").unwrap());
        assert_eq!(j, r.to_json());
        assert_eq!(r.inputs["x"], "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
