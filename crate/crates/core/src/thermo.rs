//! Reaction energies over a ledger of supercell totals, the
//! vacancy-anchored ionization ladder and gap-complement level diagrams.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::element::Element;

/// (IE + ε_CBM) of V_C⁻/V_C, eV.
pub const DEFAULT_LADDER_ANCHOR: f64 = 3.09;
/// Band gap of diamond, eV.
pub const DEFAULT_GAP: f64 = 5.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error("duplicate ledger label '{0}'")]
    DuplicateLabel(String),
    #[error("ledger entry '{0}' has a non-finite energy")]
    NonFinite(String),
    #[error("unknown species '{0}'")]
    UnknownLabel(String),
    #[error("reaction side is empty")]
    EmptySide,
    #[error("coefficient of '{0}' must be positive")]
    ZeroCoefficient(String),
    #[error("element {element} is unbalanced: {lhs} on the left, {rhs} on the right")]
    ElementImbalance { element: String, lhs: i64, rhs: i64 },
    #[error("charge is unbalanced: {lhs} on the left, {rhs} on the right")]
    ChargeImbalance { lhs: i64, rhs: i64 },
    #[error("stoichiometry overflows")]
    Overflow,
    #[error("level '{0}': give exactly one of delta_e_ct or level")]
    AmbiguousLevel(String),
    #[error("level '{0}' is not finite")]
    BadLevel(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntry {
    pub label: String,
    pub composition: BTreeMap<Element, u32>,
    #[serde(default)]
    pub charge: i32,
    /// Total energy, eV.
    pub energy: f64,
    /// Whether finite-size corrections are already included.
    #[serde(default)]
    pub corrected: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EnergyLedger {
    entries: Vec<LedgerEntry>,
}

impl EnergyLedger {
    pub fn new(entries: Vec<LedgerEntry>) -> Result<Self, ThermoError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.label.as_str()) {
                return Err(ThermoError::DuplicateLabel(e.label.clone()));
            }
            if !e.energy.is_finite() {
                return Err(ThermoError::NonFinite(e.label.clone()));
            }
        }
        Ok(EnergyLedger { entries })
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: &str) -> Result<&LedgerEntry, ThermoError> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| ThermoError::UnknownLabel(label.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub species: String,
    pub coefficient: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub lhs: Vec<Term>,
    pub rhs: Vec<Term>,
}

type Tally = (BTreeMap<Element, i64>, i64);

fn tally(ledger: &EnergyLedger, side: &[Term]) -> Result<Tally, ThermoError> {
    if side.is_empty() {
        return Err(ThermoError::EmptySide);
    }
    let mut atoms: BTreeMap<Element, i64> = BTreeMap::new();
    let mut charge = 0i64;
    for t in side {
        if t.coefficient == 0 {
            return Err(ThermoError::ZeroCoefficient(t.species.clone()));
        }
        let e = ledger.get(&t.species)?;
        let c = t.coefficient as i64;
        for (el, &n) in &e.composition {
            let add = c.checked_mul(n as i64).ok_or(ThermoError::Overflow)?;
            let slot = atoms.entry(*el).or_insert(0);
            *slot = slot.checked_add(add).ok_or(ThermoError::Overflow)?;
        }
        charge = c
            .checked_mul(e.charge as i64)
            .and_then(|q| charge.checked_add(q))
            .ok_or(ThermoError::Overflow)?;
    }
    atoms.retain(|_, n| *n != 0);
    Ok((atoms, charge))
}

impl Reaction {
    /// Validated against `ledger`: every label resolves, every element and
    /// the total charge balance exactly.
    pub fn new(lhs: Vec<Term>, rhs: Vec<Term>, ledger: &EnergyLedger) -> Result<Self, ThermoError> {
        let r = Reaction { lhs, rhs };
        r.check(ledger)?;
        Ok(r)
    }

    pub fn check(&self, ledger: &EnergyLedger) -> Result<(), ThermoError> {
        let (la, lq) = tally(ledger, &self.lhs)?;
        let (ra, rq) = tally(ledger, &self.rhs)?;
        let elements: BTreeSet<Element> = la.keys().chain(ra.keys()).copied().collect();
        for el in elements {
            let (l, r) = (la.get(&el).copied().unwrap_or(0), ra.get(&el).copied().unwrap_or(0));
            if l != r {
                return Err(ThermoError::ElementImbalance { element: el.symbol().to_string(), lhs: l, rhs: r });
            }
        }
        if lq != rq {
            return Err(ThermoError::ChargeImbalance { lhs: lq, rhs: rq });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionEnergy {
    pub delta_e: f64,
    /// Some species carry corrections and others do not.
    pub mixed_corrections: bool,
}

/// Σ rhs − Σ lhs, rejecting unbalanced reactions.
pub fn reaction_energy(ledger: &EnergyLedger, rxn: &Reaction) -> Result<ReactionEnergy, ThermoError> {
    rxn.check(ledger)?;
    let side = |terms: &[Term]| -> Result<f64, ThermoError> {
        let mut s = 0.0;
        for t in terms {
            s += t.coefficient as f64 * ledger.get(&t.species)?.energy;
        }
        Ok(s)
    };
    let flags: BTreeSet<bool> = rxn
        .lhs
        .iter()
        .chain(&rxn.rhs)
        .map(|t| ledger.get(&t.species).map(|e| e.corrected))
        .collect::<Result<_, _>>()?;
    Ok(ReactionEnergy { delta_e: side(&rxn.rhs)? - side(&rxn.lhs)?, mixed_corrections: flags.len() > 1 })
}

/// (IE + ε_CBM) = ΔE_CT + anchor.
pub fn ie_ladder(delta_e_ct: f64, anchor: f64) -> f64 {
    delta_e_ct + anchor
}

/// (EA − ε_VBM) = E_gap − (IE + ε_CBM).
pub fn ea_complement(ie_plus_cbm: f64, gap: f64) -> f64 {
    gap - ie_plus_cbm
}

/// Levels are held in integer nano-eV so that level + complement = gap
/// holds exactly.
const NANO: f64 = 1e9;

fn to_nev(x: f64) -> i64 {
    (x * NANO).round() as i64
}

fn from_nev(x: i64) -> f64 {
    x as f64 / NANO
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelInput {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_e_ct: Option<f64>,
    /// (IE + ε_CBM) given directly, eV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub label: String,
    pub ie_plus_cbm: f64,
    pub ea_minus_vbm: f64,
    pub ie_plus_cbm_nev: i64,
    pub ea_minus_vbm_nev: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DonorAcceptorPair {
    pub donor: String,
    pub acceptor: String,
    /// Acceptor level minus donor level, eV (> 0).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDiagram {
    pub gap: f64,
    pub gap_nev: i64,
    pub anchor: f64,
    /// Ascending in (IE + ε_CBM).
    pub levels: Vec<Level>,
    pub pairs: Vec<DonorAcceptorPair>,
}

impl LevelDiagram {
    /// level + complement == gap for every entry, in integer arithmetic.
    pub fn sum_rule_holds(&self) -> bool {
        self.levels.iter().all(|l| l.ie_plus_cbm_nev + l.ea_minus_vbm_nev == self.gap_nev)
    }
}

/// Sort levels and list every (donor, acceptor) pair whose acceptor level
/// lies strictly deeper than the donor level.
pub fn build_level_diagram(inputs: &[LevelInput], anchor: f64, gap: f64) -> Result<LevelDiagram, ThermoError> {
    if !anchor.is_finite() {
        return Err(ThermoError::BadLevel("anchor".into()));
    }
    if !gap.is_finite() {
        return Err(ThermoError::BadLevel("gap".into()));
    }
    let gap_nev = to_nev(gap);
    let mut levels = Vec::with_capacity(inputs.len());
    for inp in inputs {
        let v = match (inp.delta_e_ct, inp.level) {
            (Some(d), None) => ie_ladder(d, anchor),
            (None, Some(l)) => l,
            _ => return Err(ThermoError::AmbiguousLevel(inp.label.clone())),
        };
        if !v.is_finite() || v.abs() > 1e9 {
            return Err(ThermoError::BadLevel(inp.label.clone()));
        }
        let v_nev = to_nev(v);
        let c_nev = gap_nev - v_nev;
        levels.push(Level {
            label: inp.label.clone(),
            ie_plus_cbm: from_nev(v_nev),
            ea_minus_vbm: from_nev(c_nev),
            ie_plus_cbm_nev: v_nev,
            ea_minus_vbm_nev: c_nev,
        });
    }
    levels.sort_by(|a, b| a.ie_plus_cbm_nev.cmp(&b.ie_plus_cbm_nev).then(a.label.cmp(&b.label)));
    let mut pairs = Vec::new();
    for d in &levels {
        for a in &levels {
            if d.ie_plus_cbm_nev < a.ie_plus_cbm_nev {
                pairs.push(DonorAcceptorPair {
                    donor: d.label.clone(),
                    acceptor: a.label.clone(),
                    margin: from_nev(a.ie_plus_cbm_nev - d.ie_plus_cbm_nev),
                });
            }
        }
    }
    Ok(LevelDiagram { gap: from_nev(gap_nev), gap_nev, anchor, levels, pairs })
}
