//! Zero-field splitting: (D, E) extraction, the S = 1 spin Hamiltonian, and
//! a point-spin dipolar model.
//!
//! Convention: z is the principal direction with the largest |eigenvalue|,
//! x/y are ordered so that E ≥ 0, D = 3/2·D_zz and E = (D_xx − D_yy)/2.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Mat3, Vec3};
use crate::numeric::det_sum_n;
use crate::units::{BOHR_MAGNETON, G_ELECTRON, MU0, PLANCK};

/// Relative tolerance for symmetry, tracelessness and degeneracy checks.
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZfsError {
    #[error("tensor is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("non-finite tensor or parameter")]
    NonFinite,
    #[error("need 0 <= E <= |D|/3, got D = {d}, E = {e}")]
    ParameterRange { d: f64, e: f64 },
    #[error("axes are not orthonormal")]
    BadAxes,
    #[error("spin model: {0}")]
    InvalidModel(String),
    #[error("sites {0} and {1} coincide")]
    CoincidentSites(usize, usize),
}

/// Symmetric 3×3 interaction tensor, GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfsTensor {
    matrix: Mat3,
}

impl ZfsTensor {
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self, ZfsError> {
        let m = Mat3::from_fn(|r, c| rows[r][c]);
        if m.iter().any(|x| !x.is_finite()) {
            return Err(ZfsError::NonFinite);
        }
        let asym = (m - m.transpose()).abs().max();
        if asym > REL_TOL * m.abs().max().max(1.0) {
            return Err(ZfsError::NotSymmetric(asym));
        }
        Ok(ZfsTensor { matrix: m })
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.matrix[(r, c)]))
    }

    /// `Rᵀ·T·R`.
    pub fn rotated(&self, r: &Mat3) -> Self {
        ZfsTensor { matrix: r.transpose() * self.matrix * r }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZfsParams {
    pub d: f64,
    pub e: f64,
    /// Principal axes as rows x, y, z.
    pub axes: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalReport {
    pub params: ZfsParams,
    /// Principal values (D_xx, D_yy, D_zz) of the traceless tensor.
    pub principal_values: [f64; 3],
    /// All eigenvalues vanish: axes are arbitrary.
    pub isotropic: bool,
    /// Two eigenvalues tie for the largest magnitude: z is not unique.
    pub ambiguous_axis: bool,
}

fn axes_matrix(axes: &[[f64; 3]; 3]) -> Mat3 {
    Mat3::from_fn(|r, c| axes[r][c])
}

pub fn principal_params(t: &ZfsTensor) -> PrincipalReport {
    let m = 0.5 * (t.matrix + t.matrix.transpose());
    let m = m - Mat3::identity() * (m.trace() / 3.0);
    let eig = SymmetricEigen::new(m);
    let vals = eig.eigenvalues;
    let scale = vals.abs().max();
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| vals[b].abs().total_cmp(&vals[a].abs()));
    let zi = idx[0];
    let (mut xi, mut yi) = (idx[1], idx[2]);
    if vals[xi] < vals[yi] {
        std::mem::swap(&mut xi, &mut yi);
    }
    let z: Vec3 = eig.eigenvectors.column(zi).into_owned().normalize();
    let x: Vec3 = eig.eigenvectors.column(xi).into_owned().normalize();
    let y = z.cross(&x);
    let (dxx, dyy, dzz) = (vals[xi], vals[yi], vals[zi]);
    let isotropic = scale <= REL_TOL * t.matrix.abs().max().max(f64::MIN_POSITIVE);
    let ambiguous_axis = !isotropic && (vals[idx[0]].abs() - vals[idx[1]].abs()).abs() <= REL_TOL * scale;
    PrincipalReport {
        params: ZfsParams {
            d: 1.5 * dzz,
            e: 0.5 * (dxx - dyy),
            axes: [[x.x, x.y, x.z], [y.x, y.y, y.z], [z.x, z.y, z.z]],
        },
        principal_values: [dxx, dyy, dzz],
        isotropic,
        ambiguous_axis,
    }
}

pub fn tensor_from_params(p: &ZfsParams) -> Result<ZfsTensor, ZfsError> {
    if !(p.d.is_finite() && p.e.is_finite()) {
        return Err(ZfsError::NonFinite);
    }
    if p.e < 0.0 || p.e > p.d.abs() / 3.0 * (1.0 + REL_TOL) {
        return Err(ZfsError::ParameterRange { d: p.d, e: p.e });
    }
    let a = axes_matrix(&p.axes);
    if a.iter().any(|x| !x.is_finite()) || (a * a.transpose() - Mat3::identity()).abs().max() > 1e-10 {
        return Err(ZfsError::BadAxes);
    }
    let diag = Mat3::from_diagonal(&Vec3::new(-p.d / 3.0 + p.e, -p.d / 3.0 - p.e, 2.0 * p.d / 3.0));
    Ok(ZfsTensor { matrix: a.transpose() * diag * a })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripletLevels {
    /// Eigenvalues, ascending, GHz.
    pub levels: [f64; 3],
    /// Transitions from the m_s = 0-like level, ascending, GHz.
    pub transitions: [f64; 2],
}

/// S = 1 Hamiltonian D(S_z² − S²/3) + E(S_x² − S_y²) in the |+1, 0, −1⟩
/// basis.
pub fn triplet_hamiltonian(d: f64, e: f64) -> Mat3 {
    Mat3::new(d / 3.0, 0.0, e, 0.0, -2.0 * d / 3.0, 0.0, e, 0.0, d / 3.0)
}

pub fn triplet_levels(d: f64, e: f64) -> TripletLevels {
    let eig = SymmetricEigen::new(triplet_hamiltonian(d, e));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let levels = order.map(|k| eig.eigenvalues[k]);
    // The |0⟩ state does not mix with |±1⟩.
    let zero = (0..3)
        .max_by(|&a, &b| eig.eigenvectors[(1, a)].abs().total_cmp(&eig.eigenvectors[(1, b)].abs()))
        .expect("three eigenvectors");
    let e0 = eig.eigenvalues[zero];
    let mut tr: Vec<f64> = (0..3).filter(|&k| k != zero).map(|k| (eig.eigenvalues[k] - e0).abs()).collect();
    tr.sort_by(f64::total_cmp);
    TripletLevels { levels, transitions: [tr[0], tr[1]] }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSite {
    /// Å
    pub position: [f64; 3],
    pub population: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinSiteModel {
    pub sites: Vec<SpinSite>,
    #[serde(default = "default_g")]
    pub g_factor: f64,
}

fn default_g() -> f64 {
    G_ELECTRON
}

impl SpinSiteModel {
    pub fn validate(&self) -> Result<(), ZfsError> {
        let bad = |m: String| Err(ZfsError::InvalidModel(m));
        if !(self.g_factor.is_finite() && self.g_factor > 0.0) {
            return bad("g-factor must be positive".into());
        }
        for (i, s) in self.sites.iter().enumerate() {
            if !s.position.iter().all(|x| x.is_finite()) {
                return bad(format!("site {i} has a non-finite position"));
            }
            if !(s.population.is_finite() && s.population >= 0.0) {
                return bad(format!("site {i} has a negative or non-finite population"));
            }
        }
        if self.sites.iter().filter(|s| s.population > 0.0).count() < 2 {
            return bad("need at least two sites with non-zero population".into());
        }
        Ok(())
    }

    pub fn total_population(&self) -> f64 {
        self.sites.iter().map(|s| s.population).sum()
    }
}

/// μ₀ g² μ_B² / (4π h r³) at r = 1 Å, in GHz, for a given g.
pub fn dipolar_constant_ghz(g: f64) -> f64 {
    MU0 * g * g * BOHR_MAGNETON * BOHR_MAGNETON / (4.0 * std::f64::consts::PI * PLANCK) * 1e30 / 1e9
}

/// Point-spin dipolar tensor
/// D_ab = (C/2) Σ_{i<j} ρ_iρ_j (r²δ_ab − 3 r_a r_b)/r⁵ with
/// C = μ₀g²μ_B²/(4πh); the ½ projects the pair coupling onto total S = 1.
pub fn point_dipole_tensor(m: &SpinSiteModel) -> Result<ZfsTensor, ZfsError> {
    m.validate()?;
    let n = m.sites.len();
    let pos: Vec<Vec3> = m.sites.iter().map(|s| Vec3::from(s.position)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let w = m.sites[i].population * m.sites[j].population;
            if w > 0.0 && (pos[i] - pos[j]).norm() < 1e-8 {
                return Err(ZfsError::CoincidentSites(i, j));
            }
        }
    }
    let sums = det_sum_n::<6, _>(n, |i| {
        let mut acc = [0.0; 6];
        for j in i + 1..n {
            let w = m.sites[i].population * m.sites[j].population;
            if w == 0.0 {
                continue;
            }
            let r = pos[j] - pos[i];
            let r2 = r.norm_squared();
            let r5 = r2 * r2 * r2.sqrt();
            let t = [
                r2 - 3.0 * r.x * r.x,
                r2 - 3.0 * r.y * r.y,
                r2 - 3.0 * r.z * r.z,
                -3.0 * r.x * r.y,
                -3.0 * r.x * r.z,
                -3.0 * r.y * r.z,
            ];
            for (a, v) in acc.iter_mut().zip(t) {
                *a += w * v / r5;
            }
        }
        acc
    });
    let c = 0.5 * dipolar_constant_ghz(m.g_factor);
    let [xx, yy, zz, xy, xz, yz] = sums.map(|s| s * c);
    let mat = Mat3::new(xx, xy, xz, xy, yy, yz, xz, yz, zz);
    let mat = mat - Mat3::identity() * (mat.trace() / 3.0);
    Ok(ZfsTensor { matrix: mat })
}
