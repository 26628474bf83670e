//! Diamond supercells, point defects, coordination analysis and capped
//! cluster carving.

mod build;
mod cluster;
mod coordination;
mod defect;
mod fixtures;
mod structure;

use thiserror::Error;

pub use build::{build_diamond_supercell, build_primitive_supercell, DEFAULT_A0};
pub use cluster::{
    cap_cluster, carve_cluster, defect_cluster_selection, BoundaryBond, Cap, CapAnchor, CapKind, CappedCluster,
    CappingRegistry, CappingScheme, CarvedCluster, ClusterAtom, ClusterSide, EnvironmentSide, ExternalSite,
};
pub use coordination::{
    coordination, coordination_with, CoordinationReport, SiteClass, SiteCoordination, DEFAULT_BOND_CUTOFF,
    DEFAULT_SECOND_SHELL_CUTOFF,
};
pub use defect::{apply_defects, DefectEdit, DefectSpec};
pub use fixtures::{defect_fixture, defect_fixture_with, host_multiples, DefectFixture, DefectKind};
pub use structure::{wrap_unit, Mat3, Neighbor, Site, Structure, UnitCell, Vec3, MIN_PLANE_SPACING, MIN_SITE_SEPARATION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("invalid site {0}: {1}")]
    InvalidSite(usize, String),
    #[error("duplicate site id {0}")]
    DuplicateSiteId(usize),
    #[error("sites {0} and {1} are closer than the minimum separation")]
    SitesTooClose(usize, usize),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("site {0} is edited more than once")]
    DuplicateEdit(usize),
    #[error("no site with id {0}")]
    UnknownSite(usize),
    #[error("empty cluster selection")]
    EmptySelection,
    #[error("boundary site {site} has {bonds} bonds to the capped fragment; caps exist for 1-3")]
    InconsistentBoundary { site: usize, bonds: usize },
    #[error("cluster wraps onto its own periodic image (site {0})")]
    ClusterTooLarge(usize),
    #[error("unknown capping scheme '{0}'")]
    UnknownScheme(String),
}
