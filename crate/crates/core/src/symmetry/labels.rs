//! Direct products and Mulliken state labels from orbital occupations.

use serde::{Deserialize, Serialize};

use super::group::PointGroup;
use super::tables::{state_label, Decomposition};
use super::SymmetryError;

pub fn irrep_product(a: &str, b: &str, g: &PointGroup) -> Result<Decomposition, SymmetryError> {
    g.table.product(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbital {
    /// Free-form label such as `3a1` or `2e`; components of one degenerate
    /// level share the label.
    pub label: String,
    pub irrep: String,
    /// Component tag (`x`, `y`, ...) required for degenerate irreps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElectronConfiguration {
    pub orbitals: Vec<Orbital>,
    pub occupations: Vec<u8>,
    /// Total spin S (0, 1/2, 1, ...).
    pub spin: f64,
}

impl ElectronConfiguration {
    pub fn electron_count(&self) -> usize {
        self.occupations.iter().map(|&o| o as usize).sum()
    }

    pub fn open_shells(&self) -> usize {
        self.occupations.iter().filter(|&&o| o == 1).count()
    }

    /// 2S as an integer, validated against the open-shell count.
    pub fn two_s(&self) -> Result<usize, SymmetryError> {
        if self.orbitals.len() != self.occupations.len() {
            return Err(SymmetryError::Configuration(format!(
                "{} orbitals but {} occupations",
                self.orbitals.len(),
                self.occupations.len()
            )));
        }
        if let Some(i) = self.occupations.iter().position(|&o| o > 2) {
            return Err(SymmetryError::Configuration(format!("orbital {} has occupation > 2", self.orbitals[i].label)));
        }
        let t = 2.0 * self.spin;
        if !(t >= 0.0) || (t - t.round()).abs() > 1e-9 {
            return Err(SymmetryError::Configuration(format!("spin {} is not a non-negative half-integer", self.spin)));
        }
        let t = t.round() as usize;
        let open = self.open_shells();
        if t > open || !(open - t).is_multiple_of(2) {
            return Err(SymmetryError::InconsistentSpin { spin: self.spin, open_shells: open });
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLabel {
    pub multiplicity: usize,
    pub spatial: Decomposition,
    pub label: String,
}

/// Spatial symmetry of the configuration: product over singly occupied
/// orbitals (closed shells contribute the identity). Two singly occupied
/// components of one degenerate level enter as the antisymmetric square
/// when all open shells are parallel (high spin) and as the symmetric
/// square otherwise; a reducible result is returned as its decomposition.
pub fn assign_state_irrep(cfg: &ElectronConfiguration, g: &PointGroup) -> Result<StateLabel, SymmetryError> {
    let two_s = cfg.two_s()?;
    let high_spin = two_s == cfg.open_shells();
    let nclass = g.table.classes.len();
    let squares = g.square_classes();
    let mut chars = vec![1.0; nclass];
    // Degenerate levels: label -> (irrep index, singly occupied components).
    let mut levels: Vec<(String, usize, Vec<String>)> = Vec::new();
    for (orb, &occ) in cfg.orbitals.iter().zip(&cfg.occupations) {
        let idx = g
            .table
            .irrep_index(&orb.irrep)
            .ok_or_else(|| SymmetryError::UnknownIrrep { irrep: orb.irrep.clone(), group: g.name.clone() })?;
        let irrep = &g.table.irreps[idx];
        if irrep.dimension() > 1 {
            let comp = orb
                .component
                .clone()
                .ok_or_else(|| SymmetryError::MissingComponent(orb.label.clone()))?;
            let slot = match levels.iter().position(|(l, _, _)| *l == orb.label) {
                Some(k) => k,
                None => {
                    levels.push((orb.label.clone(), idx, Vec::new()));
                    levels.len() - 1
                }
            };
            if levels[slot].1 != idx {
                return Err(SymmetryError::Configuration(format!("level {} mixes irreps", orb.label)));
            }
            if levels[slot].2.contains(&comp) && occ == 1 {
                return Err(SymmetryError::Configuration(format!("component {comp} of {} repeated", orb.label)));
            }
            if occ == 1 {
                levels[slot].2.push(comp);
            }
        } else if occ == 1 {
            for (c, x) in chars.iter_mut().zip(&irrep.characters) {
                *c *= x;
            }
        }
    }
    for (label, idx, open) in &levels {
        let chi = &g.table.irreps[*idx].characters;
        let factor: Vec<f64> = match open.len() {
            0 => continue,
            1 => chi.clone(),
            2 => (0..nclass)
                .map(|c| {
                    let sq = chi[c] * chi[c];
                    let g2 = chi[squares[c]];
                    if high_spin {
                        0.5 * (sq - g2)
                    } else {
                        0.5 * (sq + g2)
                    }
                })
                .collect(),
            k => {
                return Err(SymmetryError::Configuration(format!(
                    "{k} open components in level {label} are not supported"
                )))
            }
        };
        for (c, x) in chars.iter_mut().zip(&factor) {
            *c *= x;
        }
    }
    let spatial = g.table.decompose(&chars)?;
    let multiplicity = two_s + 1;
    let label = match &spatial {
        Decomposition::Irreducible { irrep } => state_label(multiplicity, irrep),
        d => format!("{}({})", state_label(multiplicity, ""), d),
    };
    Ok(StateLabel { multiplicity, spatial, label })
}
