use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::structure::Structure;
use super::LatticeError;
use crate::element::Element;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DefectEdit {
    Substitute { site_id: usize, species: Element },
    Remove { site_id: usize },
}

impl DefectEdit {
    pub fn site_id(&self) -> usize {
        match self {
            DefectEdit::Substitute { site_id, .. } | DefectEdit::Remove { site_id } => *site_id,
        }
    }
}

/// A set of point-defect edits plus the total charge of the defect.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DefectSpec {
    pub edits: Vec<DefectEdit>,
    #[serde(default)]
    pub charge: i32,
}

/// Apply substitutions and removals. Surviving sites keep their ids and
/// relative order.
pub fn apply_defects(s: &Structure, d: &DefectSpec) -> Result<Structure, LatticeError> {
    let mut seen = BTreeSet::new();
    for e in &d.edits {
        let id = e.site_id();
        if !seen.insert(id) {
            return Err(LatticeError::DuplicateEdit(id));
        }
        if s.index_of(id).is_none() {
            return Err(LatticeError::UnknownSite(id));
        }
    }
    let mut sites = Vec::with_capacity(s.len());
    for site in s.sites() {
        match d.edits.iter().find(|e| e.site_id() == site.id) {
            Some(DefectEdit::Remove { .. }) => {}
            Some(DefectEdit::Substitute { species, .. }) => {
                let mut t = site.clone();
                t.species = *species;
                sites.push(t);
            }
            None => sites.push(site.clone()),
        }
    }
    Structure::new_unchecked_separation(s.cell().clone(), sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build::{build_primitive_supercell, DEFAULT_A0};

    fn nearest_pair(s: &Structure) -> (usize, usize) {
        let nl = s.neighbor_lists(1.8);
        (s.sites()[0].id, s.sites()[nl[0][0].index].id)
    }

    #[test]
    fn oxygen_vacancy_pair_composition() {
        let s = build_primitive_supercell([4, 4, 4], DEFAULT_A0).unwrap();
        let (i, j) = nearest_pair(&s);
        let d = DefectSpec {
            edits: vec![
                DefectEdit::Substitute { site_id: i, species: Element::O },
                DefectEdit::Remove { site_id: j },
            ],
            charge: 2,
        };
        let out = apply_defects(&s, &d).unwrap();
        assert_eq!(out.formula(), "C126O");
        assert!(out.index_of(j).is_none());
        assert_eq!(out.sites()[out.index_of(i).unwrap()].species, Element::O);
    }

    #[test]
    fn empty_edit_list_is_identity() {
        let s = build_primitive_supercell([2, 2, 2], DEFAULT_A0).unwrap();
        assert_eq!(apply_defects(&s, &DefectSpec::default()).unwrap(), s);
    }

    #[test]
    fn rejects_duplicate_and_unknown() {
        let s = build_primitive_supercell([2, 2, 2], DEFAULT_A0).unwrap();
        let dup = DefectSpec {
            edits: vec![DefectEdit::Remove { site_id: 1 }, DefectEdit::Substitute { site_id: 1, species: Element::N }],
            charge: 0,
        };
        assert!(matches!(apply_defects(&s, &dup), Err(LatticeError::DuplicateEdit(1))));
        let unk = DefectSpec { edits: vec![DefectEdit::Remove { site_id: 999 }], charge: 0 };
        assert!(matches!(apply_defects(&s, &unk), Err(LatticeError::UnknownSite(999))));
    }
}
