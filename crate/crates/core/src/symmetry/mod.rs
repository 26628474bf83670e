//! Point groups, continuous symmetry measure, irrep algebra and state
//! labelling.

mod classify;
mod csm;
mod detect;
mod group;
mod labels;
mod ops;
mod tables;

use thiserror::Error;

pub use classify::{classify_field, classify_grid_function, classify_sampled, FnField, IrrepWeights, ScalarField};
pub use csm::{csm, CsmResult};
pub use detect::{detect_point_group, CandidateScore, DetectOptions, Detection, DEFAULT_THRESHOLD};
pub use group::{canonical_group_name, GroupCatalog, PointGroup, GROUP_NAMES};
pub use labels::{assign_state_irrep, irrep_product, ElectronConfiguration, Orbital, StateLabel};
pub use ops::{improper, inversion, reflection, rotation, SymOp};
pub use tables::{
    mulliken, normalize_irrep_name, parse_character_tables, state_label, CharacterTable, ClassInfo, Decomposition,
    Irrep,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("unknown point group '{0}'")]
    UnknownGroup(String),
    #[error("irrep '{irrep}' is not in {group}")]
    UnknownIrrep { irrep: String, group: String },
    #[error("character table for {group}: {message}")]
    InvalidTable { group: String, message: String },
    #[error("line {line}: {message}")]
    TableParse { line: usize, message: String },
    #[error("characters do not form a representation (multiplicity {0})")]
    NotARepresentation(String),
    #[error("frame axes must be orthonormal and right-handed")]
    InvalidFrame,
    #[error("{species} species labels for {positions} positions")]
    LengthMismatch { species: usize, positions: usize },
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("all points coincide")]
    Degenerate,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("no candidate groups")]
    NoCandidates,
    #[error("{0}")]
    Configuration(String),
    #[error("spin {spin} is inconsistent with {open_shells} singly occupied orbitals")]
    InconsistentSpin { spin: f64, open_shells: usize },
    #[error("orbital {0} belongs to a degenerate irrep and needs a component label")]
    MissingComponent(String),
    #[error("function has zero norm")]
    ZeroNorm,
}
