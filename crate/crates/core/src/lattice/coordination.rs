use serde::{Deserialize, Serialize};

use super::structure::Structure;
use crate::element::Element;

/// Bond cutoff, Å. Diamond bonds are 1.545 Å and second neighbours 2.52 Å.
pub const DEFAULT_BOND_CUTOFF: f64 = 1.80;
/// Cutoff for "C[3c] neighbours of a C[3c]": the three-fold carbons around
/// a vacancy sit at the second-neighbour distance (2.52 Å ideal), well
/// inside the third shell at 2.96 Å.
pub const DEFAULT_SECOND_SHELL_CUTOFF: f64 = 2.80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteClass {
    /// Fully coordinated, not bonded to any dopant.
    FourFold,
    /// Three-fold carbon with exactly two C[3c] partners.
    ThreeFoldTypeI,
    /// Three-fold carbon with three C[3c] partners.
    ThreeFoldTypeII,
    /// Three-fold carbon with fewer than two C[3c] partners.
    ThreeFoldOther,
    /// Carbon bonded to a non-carbon atom (C[nX]).
    DopantNeighbor,
    /// Non-carbon sites and any other coordination.
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteCoordination {
    pub id: usize,
    pub species: Element,
    pub count: usize,
    pub class: SiteClass,
    /// Number of other C[3c] sites within the second-shell cutoff (only
    /// meaningful for three-fold carbons).
    pub c3c_partners: usize,
    /// Species of the dopant for `DopantNeighbor` sites.
    pub dopant: Option<Element>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinationReport {
    pub bond_cutoff: f64,
    pub sites: Vec<SiteCoordination>,
}

impl CoordinationReport {
    pub fn count(&self, class: SiteClass) -> usize {
        self.sites.iter().filter(|s| s.class == class).count()
    }

    /// All three-fold coordinated carbons regardless of type.
    pub fn three_fold_carbons(&self) -> Vec<usize> {
        self.sites
            .iter()
            .filter(|s| {
                matches!(
                    s.class,
                    SiteClass::ThreeFoldTypeI | SiteClass::ThreeFoldTypeII | SiteClass::ThreeFoldOther
                )
            })
            .map(|s| s.id)
            .collect()
    }

    pub fn dopant_neighbors(&self, dopant: Element) -> usize {
        self.sites
            .iter()
            .filter(|s| s.class == SiteClass::DopantNeighbor && s.dopant == Some(dopant))
            .count()
    }
}

pub fn coordination(s: &Structure, bond_cutoff: f64) -> CoordinationReport {
    coordination_with(s, bond_cutoff, DEFAULT_SECOND_SHELL_CUTOFF)
}

pub fn coordination_with(s: &Structure, bond_cutoff: f64, second_shell_cutoff: f64) -> CoordinationReport {
    let bonds = s.neighbor_lists(bond_cutoff);
    let sites = s.sites();
    let is_c3c: Vec<bool> = sites
        .iter()
        .zip(&bonds)
        .map(|(site, nb)| site.species == Element::C && nb.len() == 3)
        .collect();
    let second = s.neighbor_lists(second_shell_cutoff.max(bond_cutoff));

    let mut out = Vec::with_capacity(sites.len());
    for (i, site) in sites.iter().enumerate() {
        let count = bonds[i].len();
        let dopant = bonds[i]
            .iter()
            .map(|nb| sites[nb.index].species)
            .find(|&e| e != Element::C);
        let partners = if is_c3c[i] {
            second[i]
                .iter()
                .filter(|nb| nb.index != i && nb.distance > bond_cutoff && is_c3c[nb.index])
                .count()
        } else {
            0
        };
        let class = if site.species != Element::C {
            SiteClass::Other
        } else if dopant.is_some() {
            SiteClass::DopantNeighbor
        } else if count == 4 {
            SiteClass::FourFold
        } else if count == 3 {
            match partners {
                2 => SiteClass::ThreeFoldTypeI,
                3 => SiteClass::ThreeFoldTypeII,
                _ => SiteClass::ThreeFoldOther,
            }
        } else {
            SiteClass::Other
        };
        out.push(SiteCoordination {
            id: site.id,
            species: site.species,
            count,
            class,
            c3c_partners: partners,
            dopant: if class == SiteClass::DopantNeighbor { dopant } else { None },
        });
    }
    CoordinationReport { bond_cutoff, sites: out }
}
