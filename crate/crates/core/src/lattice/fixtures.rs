//! The two oxygen–vacancy complexes used throughout the crate, built on
//! unrelaxed lattice positions.

use super::build::{build_primitive_supercell, DEFAULT_A0};
use super::defect::{apply_defects, DefectEdit, DefectSpec};
use super::structure::{Structure, Vec3};
use super::LatticeError;
use crate::element::Element;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectKind {
    /// Substitutional O next to one vacancy (C3v).
    OxygenVacancy,
    /// Substitutional O between two vacancies (C2v).
    VacancyOxygenVacancy,
}

impl DefectKind {
    pub fn name(self) -> &'static str {
        match self {
            DefectKind::OxygenVacancy => "OCVC",
            DefectKind::VacancyOxygenVacancy => "VCOCVC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "ocvc" | "ov" => Some(DefectKind::OxygenVacancy),
            "vcocvc" | "vov" => Some(DefectKind::VacancyOxygenVacancy),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DefectFixture {
    pub kind: DefectKind,
    /// Defected supercell (host built from primitive cells).
    pub structure: Structure,
    pub dopant_id: usize,
    pub vacancy_ids: Vec<usize>,
    /// Cartesian position of the dopant in the pristine cell, Å.
    pub center: Vec3,
    /// Right-handed symmetry frame as rows x, y, z.
    pub axes: [Vec3; 3],
    pub point_group: &'static str,
}

/// Host multiples: 128 atoms for the single vacancy, 250 for the pair.
pub fn host_multiples(kind: DefectKind) -> [usize; 3] {
    match kind {
        DefectKind::OxygenVacancy => [4, 4, 4],
        DefectKind::VacancyOxygenVacancy => [5, 5, 5],
    }
}

pub fn defect_fixture(kind: DefectKind) -> Result<DefectFixture, LatticeError> {
    defect_fixture_with(kind, DEFAULT_A0)
}

pub fn defect_fixture_with(kind: DefectKind, a0: f64) -> Result<DefectFixture, LatticeError> {
    let host = build_primitive_supercell(host_multiples(kind), a0)?;
    // Site 0 is the A-sublattice atom at the origin.
    let dopant_id = host.sites()[0].id;
    let center = host.cartesian(0);
    let q = a0 / 4.0;
    let (vac_dirs, axes, group): (Vec<Vec3>, [Vec3; 3], &'static str) = match kind {
        DefectKind::OxygenVacancy => (
            vec![Vec3::new(1.0, 1.0, 1.0)],
            [
                Vec3::new(1.0, 1.0, -2.0) / 6f64.sqrt(),
                Vec3::new(-1.0, 1.0, 0.0) / 2f64.sqrt(),
                Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt(),
            ],
            "C3v",
        ),
        DefectKind::VacancyOxygenVacancy => (
            vec![Vec3::new(1.0, 1.0, 1.0), Vec3::new(-1.0, -1.0, 1.0)],
            [
                Vec3::new(1.0, -1.0, 0.0) / 2f64.sqrt(),
                Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt(),
                Vec3::new(0.0, 0.0, 1.0),
            ],
            "C2v",
        ),
    };
    let mut vacancy_ids = Vec::new();
    for d in vac_dirs {
        let r = center + d * q;
        let idx = host
            .site_near(&r, 0.1)
            .ok_or_else(|| LatticeError::InvalidArgument(format!("no lattice site near {r:?}")))?;
        vacancy_ids.push(host.sites()[idx].id);
    }
    let mut edits = vec![DefectEdit::Substitute { site_id: dopant_id, species: Element::O }];
    edits.extend(vacancy_ids.iter().map(|&id| DefectEdit::Remove { site_id: id }));
    let structure = apply_defects(&host, &DefectSpec { edits, charge: 0 })?;
    Ok(DefectFixture { kind, structure, dopant_id, vacancy_ids, center, axes, point_group: group })
}
