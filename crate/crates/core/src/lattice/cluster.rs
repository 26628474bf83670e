//! Cluster carving and valence-complementary capping.
//!
//! A carved cluster is described by its core atoms and the bonds that cross
//! its boundary. Capping schemes turn those boundary bonds into cap atoms
//! placed on lattice positions: the cluster side caps the removed external
//! sites, the environment side caps the removed cluster sites. Both use the
//! same valence table (1 → F, 2 → O, 3 → B), so the union of the two cap
//! sets always holds an even number of electrons.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::coordination::coordination_with;
use super::structure::{formula_from_counts, Structure, Vec3};
use super::LatticeError;
use crate::element::Element;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAtom {
    pub id: usize,
    pub species: Element,
    /// Cartesian position, Å, unwrapped around the cluster reference site.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBond {
    pub core_id: usize,
    pub external_id: usize,
}

/// A lattice site outside the selection bonded to at least one core atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalSite {
    pub id: usize,
    pub species: Element,
    pub position: [f64; 3],
    /// Core atoms bonded to this site, ascending id.
    pub core_bonds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarvedCluster {
    pub bond_cutoff: f64,
    pub core: Vec<ClusterAtom>,
    pub bonds: Vec<BoundaryBond>,
    pub external: Vec<ExternalSite>,
    /// Sites of the source structure that are not in the core, with
    /// positions in the source cell (used for environment-side capping).
    pub environment: Vec<ClusterAtom>,
}

impl CarvedCluster {
    pub fn core_formula(&self) -> String {
        formula_from_counts(&count_species(self.core.iter().map(|a| a.species)))
    }

    /// External sites grouped by number of core bonds.
    pub fn multiplicity_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in &self.external {
            *h.entry(e.core_bonds.len()).or_insert(0) += 1;
        }
        h
    }
}

fn count_species(it: impl Iterator<Item = Element>) -> Vec<(Element, usize)> {
    let mut out: Vec<(Element, usize)> = Vec::new();
    for e in it {
        match out.iter_mut().find(|(x, _)| *x == e) {
            Some((_, n)) => *n += 1,
            None => out.push((e, 1)),
        }
    }
    out
}

/// Cut the selected sites out of `s`. Positions are unwrapped by minimum
/// image around the first selected site, so the cluster must be smaller
/// than half the cell.
pub fn carve_cluster(s: &Structure, selection: &[usize], bond_cutoff: f64) -> Result<CarvedCluster, LatticeError> {
    if selection.is_empty() {
        return Err(LatticeError::EmptySelection);
    }
    let mut sel_idx = Vec::with_capacity(selection.len());
    let mut seen = BTreeSet::new();
    for &id in selection {
        let idx = s.index_of(id).ok_or(LatticeError::UnknownSite(id))?;
        if seen.insert(id) {
            sel_idx.push(idx);
        }
    }
    let in_core: BTreeSet<usize> = sel_idx.iter().copied().collect();
    let cell = s.cell();
    let reference = Vec3::from(s.sites()[sel_idx[0]].frac);
    let ref_cart = cell.to_cartesian(&reference);
    let unwrap = |idx: usize| -> Vec3 {
        ref_cart + cell.min_image(&(Vec3::from(s.sites()[idx].frac) - reference))
    };

    let nl = s.neighbor_lists(bond_cutoff);
    let mut core = Vec::with_capacity(sel_idx.len());
    let mut external: BTreeMap<usize, ExternalSite> = BTreeMap::new();
    let mut bonds = Vec::new();
    let mut sorted_core = sel_idx.clone();
    sorted_core.sort_by_key(|&i| s.sites()[i].id);
    for &i in &sorted_core {
        let site = &s.sites()[i];
        let ri = unwrap(i);
        core.push(ClusterAtom { id: site.id, species: site.species, position: ri.into() });
        for nb in &nl[i] {
            if in_core.contains(&nb.index) {
                continue;
            }
            let ext = &s.sites()[nb.index];
            let pos = ri + nb.vector;
            bonds.push(BoundaryBond { core_id: site.id, external_id: ext.id });
            let entry = external.entry(ext.id).or_insert_with(|| ExternalSite {
                id: ext.id,
                species: ext.species,
                position: pos.into(),
                core_bonds: Vec::new(),
            });
            if (Vec3::from(entry.position) - pos).norm() > 1e-6 {
                return Err(LatticeError::ClusterTooLarge(ext.id));
            }
            entry.core_bonds.push(site.id);
        }
    }
    for e in external.values_mut() {
        e.core_bonds.sort_unstable();
    }
    let environment = s
        .sites()
        .iter()
        .enumerate()
        .filter(|(i, _)| !in_core.contains(i))
        .map(|(i, site)| ClusterAtom { id: site.id, species: site.species, position: s.cartesian(i).into() })
        .collect();
    Ok(CarvedCluster { bond_cutoff, core, bonds, external: external.into_values().collect(), environment })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapKind {
    Terminal,
    Bridging,
    Trivalent,
}

impl CapKind {
    pub fn from_valence(v: usize) -> Option<CapKind> {
        match v {
            1 => Some(CapKind::Terminal),
            2 => Some(CapKind::Bridging),
            3 => Some(CapKind::Trivalent),
            _ => None,
        }
    }

    pub fn valence(self) -> usize {
        match self {
            CapKind::Terminal => 1,
            CapKind::Bridging => 2,
            CapKind::Trivalent => 3,
        }
    }

    pub fn element(self) -> Element {
        match self {
            CapKind::Terminal => Element::F,
            CapKind::Bridging => Element::O,
            CapKind::Trivalent => Element::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub position: [f64; 3],
    pub element: Element,
    pub kind: CapKind,
    /// Lattice site whose position the cap occupies.
    pub site_id: usize,
    /// Atoms of the capped fragment the cap is bonded to.
    pub bonded: Vec<usize>,
}

/// Where a cap goes and how many fragment atoms it saturates.
#[derive(Debug, Clone, PartialEq)]
pub struct CapAnchor {
    pub site_id: usize,
    pub position: Vec3,
    pub bonded: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CappedCluster {
    pub scheme: String,
    /// Atoms of the capped fragment (the cluster core, or the environment).
    pub atoms: Vec<ClusterAtom>,
    pub caps: Vec<Cap>,
    /// Source site ids of `atoms`.
    pub provenance: Vec<usize>,
}

impl CappedCluster {
    /// Formula written as fragment then caps, e.g. `C15OF12O12`.
    pub fn formula(&self) -> String {
        let mut s = formula_from_counts(&count_species(self.atoms.iter().map(|a| a.species)));
        for kind in [CapKind::Terminal, CapKind::Bridging, CapKind::Trivalent] {
            let n = self.caps.iter().filter(|c| c.kind == kind).count();
            if n > 0 {
                s.push_str(kind.element().symbol());
                if n > 1 {
                    s.push_str(&n.to_string());
                }
            }
        }
        s
    }

    pub fn cap_count(&self, kind: CapKind) -> usize {
        self.caps.iter().filter(|c| c.kind == kind).count()
    }

    /// Number of electrons carried by the caps (neutral atoms).
    pub fn cap_electrons(&self) -> usize {
        self.caps.iter().map(|c| c.element.atomic_number() as usize).sum()
    }

    /// All atoms including caps as `(species, position)`.
    pub fn all_atoms(&self) -> Vec<(Element, Vec3)> {
        self.atoms
            .iter()
            .map(|a| (a.species, Vec3::from(a.position)))
            .chain(self.caps.iter().map(|c| (c.element, Vec3::from(c.position))))
            .collect()
    }
}

/// Strategy deciding which lattice positions receive caps.
pub trait CappingScheme: Send + Sync {
    fn name(&self) -> &'static str;
    fn anchors(&self, carved: &CarvedCluster) -> Vec<CapAnchor>;
    fn fragment(&self, carved: &CarvedCluster) -> Vec<ClusterAtom>;
}

/// Caps the external sites around a carved cluster.
pub struct ClusterSide;

impl CappingScheme for ClusterSide {
    fn name(&self) -> &'static str {
        "cluster"
    }

    fn anchors(&self, carved: &CarvedCluster) -> Vec<CapAnchor> {
        carved
            .external
            .iter()
            .map(|e| CapAnchor { site_id: e.id, position: Vec3::from(e.position), bonded: e.core_bonds.clone() })
            .collect()
    }

    fn fragment(&self, carved: &CarvedCluster) -> Vec<ClusterAtom> {
        carved.core.clone()
    }
}

/// Caps the environment left behind: a cap sits on every boundary core
/// atom, saturating its bonds to the environment.
pub struct EnvironmentSide;

impl CappingScheme for EnvironmentSide {
    fn name(&self) -> &'static str {
        "environment"
    }

    fn anchors(&self, carved: &CarvedCluster) -> Vec<CapAnchor> {
        let mut by_core: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for b in &carved.bonds {
            by_core.entry(b.core_id).or_default().push(b.external_id);
        }
        carved
            .core
            .iter()
            .filter_map(|a| {
                by_core.get(&a.id).map(|ext| {
                    let mut ext = ext.clone();
                    ext.sort_unstable();
                    CapAnchor { site_id: a.id, position: Vec3::from(a.position), bonded: ext }
                })
            })
            .collect()
    }

    fn fragment(&self, carved: &CarvedCluster) -> Vec<ClusterAtom> {
        carved.environment.clone()
    }
}

/// Name → capping scheme lookup.
pub struct CappingRegistry {
    schemes: Vec<Box<dyn CappingScheme>>,
}

impl Default for CappingRegistry {
    fn default() -> Self {
        let mut r = CappingRegistry { schemes: Vec::new() };
        r.register(Box::new(ClusterSide));
        r.register(Box::new(EnvironmentSide));
        r
    }
}

impl CappingRegistry {
    /// Registers a scheme, replacing any existing one of the same name.
    pub fn register(&mut self, scheme: Box<dyn CappingScheme>) {
        self.schemes.retain(|s| s.name() != scheme.name());
        self.schemes.push(scheme);
    }

    pub fn get(&self, name: &str) -> Option<&dyn CappingScheme> {
        self.schemes.iter().find(|s| s.name() == name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.iter().map(|s| s.name()).collect()
    }
}

/// Place caps with the given scheme. Caps sit exactly at lattice positions
/// (no relaxation).
pub fn cap_cluster(carved: &CarvedCluster, scheme: &dyn CappingScheme) -> Result<CappedCluster, LatticeError> {
    let mut caps = Vec::new();
    for a in scheme.anchors(carved) {
        let kind = CapKind::from_valence(a.bonded.len())
            .ok_or(LatticeError::InconsistentBoundary { site: a.site_id, bonds: a.bonded.len() })?;
        caps.push(Cap {
            position: a.position.into(),
            element: kind.element(),
            kind,
            site_id: a.site_id,
            bonded: a.bonded,
        });
    }
    let atoms = scheme.fragment(carved);
    let provenance = atoms.iter().map(|a| a.id).collect();
    Ok(CappedCluster { scheme: scheme.name().to_string(), atoms, caps, provenance })
}

/// Selection used for the shipped defect clusters: the dopant and every
/// three-fold carbon within the second shell of it, their bonded
/// neighbours, then any outside site that would bond three or more core
/// atoms is absorbed (repeated until none remain).
pub fn defect_cluster_selection(
    s: &Structure,
    dopant_id: usize,
    bond_cutoff: f64,
    second_shell_cutoff: f64,
) -> Result<Vec<usize>, LatticeError> {
    let d = s.index_of(dopant_id).ok_or(LatticeError::UnknownSite(dopant_id))?;
    let report = coordination_with(s, bond_cutoff, second_shell_cutoff);
    let three_fold: BTreeSet<usize> = report.three_fold_carbons().into_iter().collect();
    let nl = s.neighbor_lists(bond_cutoff);
    let far = s.neighbor_lists(second_shell_cutoff);

    let mut core: BTreeSet<usize> = BTreeSet::new();
    core.insert(d);
    for nb in &far[d] {
        if three_fold.contains(&s.sites()[nb.index].id) {
            core.insert(nb.index);
        }
    }
    let seeds: Vec<usize> = core.iter().copied().collect();
    for i in seeds {
        for nb in &nl[i] {
            core.insert(nb.index);
        }
    }
    loop {
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for &i in &core {
            for nb in &nl[i] {
                if !core.contains(&nb.index) {
                    *count.entry(nb.index).or_insert(0) += 1;
                }
            }
        }
        let add: Vec<usize> = count.into_iter().filter(|&(_, k)| k >= 3).map(|(i, _)| i).collect();
        if add.is_empty() {
            break;
        }
        core.extend(add);
    }
    let mut ids: Vec<usize> = core.into_iter().map(|i| s.sites()[i].id).collect();
    ids.sort_unstable();
    Ok(ids)
}
