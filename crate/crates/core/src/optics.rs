//! Oscillator strengths, radiative lifetimes and VEE bookkeeping.
//!
//! Inputs: excitation energies in eV, transition dipoles in debye. Work is
//! done in atomic units. The reported `f_total` carries the g_j/g_i factor;
//! the lifetime always uses the per-state value, so the degeneracy ratio
//! cancels between the two.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{debye_to_au, ev_to_hartree, AU_TIME_NS, C_AU};

pub const DEFAULT_REFRACTIVE_INDEX: f64 = 2.42;
/// Roots closer than this (eV) are treated as one degenerate level.
pub const DEGENERACY_TOL_EV: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("transition {0}: {1}")]
    InvalidRecord(String, String),
    #[error("state index {0} out of range")]
    BadGroundIndex(usize),
    #[error("state {label} lies {vee} eV below its reference; the ground state is mislabelled")]
    NegativeVee { label: String, vee: f64 },
    #[error("non-finite energy for state {0}")]
    NonFinite(String),
}

/// Transition dipole given either as Cartesian components or a magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dipole {
    Components([f64; 3]),
    Magnitude(f64),
}

impl Dipole {
    pub fn magnitude(&self) -> f64 {
        match self {
            Dipole::Components(c) => mu_magnitude(c),
            Dipole::Magnitude(m) => *m,
        }
    }

    pub fn polarization(&self) -> Option<[f64; 3]> {
        match self {
            Dipole::Components(c) => {
                let m = mu_magnitude(c);
                (m > 0.0).then(|| [c[0] / m, c[1] / m, c[2] / m])
            }
            Dipole::Magnitude(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub label_i: String,
    pub label_j: String,
    /// eV
    pub vee: f64,
    /// debye
    pub mu: Dipole,
    pub g_i: u32,
    pub g_j: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_r: Option<f64>,
}

impl TransitionRecord {
    pub fn validate(&self) -> Result<(), OpticsError> {
        let bad = |m: &str| Err(OpticsError::InvalidRecord(format!("{}→{}", self.label_i, self.label_j), m.into()));
        if !(self.vee.is_finite() && self.vee > 0.0) {
            return bad("vee must be positive");
        }
        if self.g_i == 0 || self.g_j == 0 {
            return bad("degeneracies must be >= 1");
        }
        let ok_mu = match self.mu {
            Dipole::Components(c) => c.iter().all(|x| x.is_finite()),
            Dipole::Magnitude(m) => m.is_finite() && m >= 0.0,
        };
        if !ok_mu {
            return bad("dipole must be finite and non-negative");
        }
        if let Some(n) = self.n_r {
            if !(n.is_finite() && n > 0.0) {
                return bad("refractive index must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lifetime {
    Radiative { tau_ns: f64, einstein_a_per_ns: f64 },
    /// Zero oscillator strength: no radiative decay channel.
    Dark,
}

impl Lifetime {
    pub fn tau_ns(&self) -> Option<f64> {
        match self {
            Lifetime::Radiative { tau_ns, .. } => Some(*tau_ns),
            Lifetime::Dark => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpticalResult {
    pub label_i: String,
    pub label_j: String,
    pub vee_ev: f64,
    pub mu_debye: f64,
    pub n_r: f64,
    pub f_total: f64,
    pub f_per_state: f64,
    pub lifetime: Lifetime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polarization: Option<[f64; 3]>,
}

pub fn mu_magnitude(c: &[f64; 3]) -> f64 {
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

/// (f_total, f_per_state).
pub fn oscillator_strength(t: &TransitionRecord) -> Result<(f64, f64), OpticsError> {
    t.validate()?;
    let mu = debye_to_au(t.mu.magnitude());
    let per_state = 2.0 / 3.0 * ev_to_hartree(t.vee) * mu * mu;
    let total = per_state * t.g_j as f64 / t.g_i as f64;
    Ok((total, per_state))
}

/// Radiative lifetime from the per-state oscillator strength.
pub fn lifetime(vee_ev: f64, f_per_state: f64, n_r: f64) -> Lifetime {
    if f_per_state <= 0.0 {
        return Lifetime::Dark;
    }
    let e = ev_to_hartree(vee_ev);
    let tau = AU_TIME_NS * C_AU.powi(3) / (2.0 * n_r * e * e * f_per_state);
    Lifetime::Radiative { tau_ns: tau, einstein_a_per_ns: 1.0 / tau }
}

pub fn evaluate(t: &TransitionRecord, default_n_r: f64) -> Result<OpticalResult, OpticsError> {
    let (f_total, f_per_state) = oscillator_strength(t)?;
    let n_r = t.n_r.unwrap_or(default_n_r);
    if !(n_r.is_finite() && n_r > 0.0) {
        return Err(OpticsError::InvalidRecord(t.label_j.clone(), "refractive index must be positive".into()));
    }
    Ok(OpticalResult {
        label_i: t.label_i.clone(),
        label_j: t.label_j.clone(),
        vee_ev: t.vee,
        mu_debye: t.mu.magnitude(),
        n_r,
        f_total,
        f_per_state,
        lifetime: lifetime(t.vee, f_per_state, n_r),
        polarization: t.mu.polarization(),
    })
}

/// Collapse the roots of one degenerate level into a single (VEE, μ) pair
/// whose per-state oscillator strength is the mean over the roots.
pub fn average_roots(roots: &[(f64, f64)]) -> Option<(f64, f64)> {
    if roots.is_empty() {
        return None;
    }
    let n = roots.len() as f64;
    let vee = roots.iter().map(|r| r.0).sum::<f64>() / n;
    let f_mean = roots.iter().map(|r| r.0 * r.1 * r.1).sum::<f64>() / n;
    Some((vee, (f_mean / vee).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEnergy {
    pub label: String,
    pub multiplicity: u32,
    /// Total energy, eV.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VeeEntry {
    pub labels: Vec<String>,
    pub multiplicity: u32,
    pub vee_ev: f64,
    pub degeneracy: usize,
}

/// VEEs referenced to the ground state. Each multiplicity is referenced to
/// its own lowest root; multiplicities other than the ground one are then
/// shifted by their splitting from the ground state (`splittings`, eV),
/// or — if none is given — by the raw energy difference of the lowest roots.
/// Roots within [`DEGENERACY_TOL_EV`] are merged and averaged.
pub fn vee_ledger(
    states: &[StateEnergy],
    ground: usize,
    splittings: &[(u32, f64)],
) -> Result<Vec<VeeEntry>, OpticsError> {
    let g = states.get(ground).ok_or(OpticsError::BadGroundIndex(ground))?;
    if let Some(s) = states.iter().find(|s| !s.energy.is_finite()) {
        return Err(OpticsError::NonFinite(s.label.clone()));
    }
    let mut mults: Vec<u32> = states.iter().map(|s| s.multiplicity).collect();
    mults.sort_unstable();
    mults.dedup();
    // Ground multiplicity first, then ascending.
    mults.sort_by_key(|&m| (m != g.multiplicity, m));
    let mut out = Vec::new();
    for m in mults {
        let mut members: Vec<&StateEnergy> = states.iter().filter(|s| s.multiplicity == m).collect();
        members.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let (reference, shift) = if m == g.multiplicity {
            (g.energy, 0.0)
        } else {
            let low = members[0].energy;
            let shift = splittings.iter().find(|(k, _)| *k == m).map_or(low - g.energy, |(_, d)| *d);
            (low, shift)
        };
        let mut k = 0;
        while k < members.len() {
            let mut end = k + 1;
            while end < members.len() && members[end].energy - members[end - 1].energy <= DEGENERACY_TOL_EV {
                end += 1;
            }
            let block = &members[k..end];
            let mean = block.iter().map(|s| s.energy).sum::<f64>() / block.len() as f64;
            let vee = mean - reference + shift;
            if vee < -DEGENERACY_TOL_EV {
                return Err(OpticsError::NegativeVee { label: block[0].label.clone(), vee });
            }
            out.push(VeeEntry {
                labels: block.iter().map(|s| s.label.clone()).collect(),
                multiplicity: m,
                vee_ev: vee.max(0.0),
                degeneracy: block.len(),
            });
            k = end;
        }
    }
    Ok(out)
}
