//! Makov–Payne finite-size corrections for cubic supercells and the grid
//! moments that feed them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridError, VolumetricGrid};
use crate::lattice::{UnitCell, Vec3};
use crate::numeric::det_sum_n;
use crate::units::FOUR_PI_EPS0;

pub const DEFAULT_EPS_R: f64 = 5.69;
/// Simple-cubic Madelung constant.
pub const MADELUNG_SC: f64 = 2.8373;
/// Relative tolerance on edge lengths and angles when testing for a cube.
pub const CUBIC_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorrectionError {
    #[error("relative permittivity must be >= 1, got {0}")]
    BadPermittivity(f64),
    #[error("cell edge must be positive, got {0}")]
    BadLength(f64),
    #[error("corrections need a cubic cell")]
    NonCubic,
    #[error("origin lies outside the cell (fractional {0:?})")]
    OriginOutside([f64; 3]),
    #[error("both charged (M-M/M-Q) and neutral (D-D) corrections were supplied")]
    MixedCorrections,
    #[error("{0}")]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricModel {
    pub eps_r: f64,
}

impl Default for DielectricModel {
    fn default() -> Self {
        DielectricModel { eps_r: DEFAULT_EPS_R }
    }
}

impl DielectricModel {
    pub fn new(eps_r: f64) -> Result<Self, CorrectionError> {
        if !(eps_r.is_finite() && eps_r >= 1.0) {
            return Err(CorrectionError::BadPermittivity(eps_r));
        }
        Ok(DielectricModel { eps_r })
    }

    /// ε = 4πε₀·ε_r in e² eV⁻¹ Å⁻¹.
    pub fn epsilon(&self) -> f64 {
        FOUR_PI_EPS0 * self.eps_r
    }
}

fn check_length(l: f64) -> Result<(), CorrectionError> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(CorrectionError::BadLength(l))
    }
}

/// Edge length of a cubic cell.
pub fn cubic_length(cell: &UnitCell) -> Result<f64, CorrectionError> {
    cell.cubic_edge(CUBIC_TOL).ok_or(CorrectionError::NonCubic)
}

/// E_M-M = q²α / (2Lε), eV.
pub fn madelung_mm(q: f64, l: f64, diel: &DielectricModel, alpha: f64) -> Result<f64, CorrectionError> {
    check_length(l)?;
    Ok(q * q * alpha / (2.0 * l * diel.epsilon()))
}

/// E_M-Q = 2πq(Q_q − Q_0) / (3L³ε), eV.
pub fn mq_correction(q: f64, q_q: f64, q_0: f64, l: f64, diel: &DielectricModel) -> Result<f64, CorrectionError> {
    check_length(l)?;
    Ok(2.0 * std::f64::consts::PI * q * (q_q - q_0) / (3.0 * l.powi(3) * diel.epsilon()))
}

/// E_D-D = 2π|μ|² / (3L³ε), eV.
pub fn dd_correction(mu: &[f64; 3], l: f64, diel: &DielectricModel) -> Result<f64, CorrectionError> {
    check_length(l)?;
    let m2 = mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2];
    Ok(2.0 * std::f64::consts::PI * m2 / (3.0 * l.powi(3) * diel.epsilon()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionPieces {
    pub e_mm: Option<f64>,
    pub e_mq: Option<f64>,
    pub e_dd: Option<f64>,
}

/// Charged cells add M-M and M-Q; neutral cells add D-D. Mixing is an error.
pub fn corrected_energy(e_raw: f64, p: &CorrectionPieces) -> Result<f64, CorrectionError> {
    let charged = p.e_mm.is_some() || p.e_mq.is_some();
    if charged && p.e_dd.is_some() {
        return Err(CorrectionError::MixedCorrections);
    }
    Ok(e_raw + p.e_mm.unwrap_or(0.0) + p.e_mq.unwrap_or(0.0) + p.e_dd.unwrap_or(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    /// ∫ρ dV, electrons.
    pub charge: f64,
    /// ∫ρ (r − r₀) dV, e·Å.
    pub dipole: [f64; 3],
    /// ∫ρ |r − r₀|² dV, e·Å².
    pub quadrupole: f64,
}

/// Wrap a fractional displacement into [−½, ½]; report whether it sits on
/// the ±½ boundary.
fn wrap_half(x: f64) -> (f64, bool) {
    let w = x - x.round();
    if (w.abs() - 0.5).abs() < 1e-12 {
        (0.5, true)
    } else {
        (w, false)
    }
}

/// Moments over the cell-shaped box centered on `origin`. Nodes on the box
/// boundary are shared equally between their images (so they add nothing
/// to the dipole along that axis).
pub fn grid_moments(g: &VolumetricGrid, origin: &Vec3) -> Result<Moments, CorrectionError> {
    let scale = g.density_scale()?;
    let cell = g.cell();
    let fo = cell.to_fractional(origin);
    if fo.iter().any(|x| !x.is_finite() || *x < -1e-9 || *x > 1.0 + 1e-9) {
        return Err(CorrectionError::OriginOutside([fo.x, fo.y, fo.z]));
    }
    let dv = g.voxel_volume();
    let vals = g.values();
    let sums = det_sum_n::<5, _>(g.len(), |k| {
        let rho = vals[k];
        if rho == 0.0 {
            return [0.0; 5];
        }
        let df = g.node_fractional(k) - fo;
        let mut f = [0.0; 3];
        let mut tie = [false; 3];
        for a in 0..3 {
            (f[a], tie[a]) = wrap_half(df[a]);
        }
        // Average over the 2^k boundary images.
        let nt = tie.iter().filter(|&&t| t).count();
        let combos = 1usize << nt;
        let mut d_acc = Vec3::zeros();
        let mut r2_acc = 0.0;
        for c in 0..combos {
            let mut bit = 0;
            let mut fc = Vec3::from(f);
            for a in 0..3 {
                if tie[a] {
                    if (c >> bit) & 1 == 1 {
                        fc[a] = -0.5;
                    }
                    bit += 1;
                }
            }
            let d = cell.to_cartesian(&fc);
            d_acc += d;
            r2_acc += d.norm_squared();
        }
        let inv = 1.0 / combos as f64;
        let d = d_acc * inv;
        [rho, rho * d.x, rho * d.y, rho * d.z, rho * r2_acc * inv]
    });
    let w = scale * dv;
    Ok(Moments {
        charge: sums[0] * w,
        dipole: [sums[1] * w, sums[2] * w, sums[3] * w],
        quadrupole: sums[4] * w,
    })
}

pub fn quadrupole_moment(g: &VolumetricGrid, origin: &Vec3) -> Result<f64, CorrectionError> {
    Ok(grid_moments(g, origin)?.quadrupole)
}

pub fn dipole_moment(g: &VolumetricGrid, origin: &Vec3) -> Result<[f64; 3], CorrectionError> {
    Ok(grid_moments(g, origin)?.dipole)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionReport {
    pub q: i32,
    pub l: f64,
    pub eps_r: f64,
    pub alpha: f64,
    pub e_mm: f64,
    pub e_mq: f64,
    pub e_dd: f64,
    pub total: f64,
}

/// All three terms for a cubic cell. `quadrupoles` is (Q_q, Q_0) and
/// `dipole` is μ; terms without inputs are zero.
pub fn correction_report(
    q: i32,
    l: f64,
    diel: &DielectricModel,
    alpha: f64,
    quadrupoles: Option<(f64, f64)>,
    dipole: Option<[f64; 3]>,
) -> Result<CorrectionReport, CorrectionError> {
    let qf = q as f64;
    let e_mm = madelung_mm(qf, l, diel, alpha)?;
    let e_mq = match quadrupoles {
        Some((qq, q0)) => mq_correction(qf, qq, q0, l, diel)?,
        None => 0.0,
    };
    let e_dd = match dipole {
        Some(mu) if q == 0 => dd_correction(&mu, l, diel)?,
        Some(_) => return Err(CorrectionError::MixedCorrections),
        None => 0.0,
    };
    Ok(CorrectionReport { q, l, eps_r: diel.eps_r, alpha, e_mm, e_mq, e_dd, total: e_mm + e_mq + e_dd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridConvention;

    const L: f64 = 14.2710;

    #[test]
    fn madelung_golden_values() {
        let d = DielectricModel::default();
        let e1 = madelung_mm(1.0, L, &d, MADELUNG_SC).unwrap();
        let e2 = madelung_mm(2.0, L, &d, MADELUNG_SC).unwrap();
        assert!((e1 - 0.252).abs() < 1e-3, "{e1}");
        assert!((e2 - 1.006).abs() < 1e-3, "{e2}");
        assert_eq!(madelung_mm(0.0, L, &d, MADELUNG_SC).unwrap(), 0.0);
        assert!(madelung_mm(1.0, 0.0, &d, MADELUNG_SC).is_err());
        assert!(DielectricModel::new(0.5).is_err());
    }

    #[test]
    fn mq_inversion_round_trip() {
        let d = DielectricModel::default();
        let target = -0.075;
        let dq = target * 3.0 * L.powi(3) * d.epsilon() / (2.0 * std::f64::consts::PI);
        let e = mq_correction(1.0, 10.0 + dq, 10.0, L, &d).unwrap();
        assert!((e - target).abs() < 1e-12 && e < 0.0);
        assert_eq!(mq_correction(0.0, 3.0, 1.0, L, &d).unwrap(), 0.0);
        assert_eq!(mq_correction(1.0, 3.0, 3.0, L, &d).unwrap(), 0.0);
    }

    #[test]
    fn dd_bound_and_mixing() {
        let d = DielectricModel::default();
        let mu_max = (0.01 * 3.0 * L.powi(3) * d.epsilon() / (2.0 * std::f64::consts::PI)).sqrt();
        let e = dd_correction(&[mu_max * 0.999, 0.0, 0.0], L, &d).unwrap();
        assert!((0.0..0.01).contains(&e));
        assert_eq!(dd_correction(&[0.0; 3], L, &d).unwrap(), 0.0);
        let both = CorrectionPieces { e_mm: Some(0.2), e_mq: None, e_dd: Some(0.001) };
        assert!(matches!(corrected_energy(1.0, &both), Err(CorrectionError::MixedCorrections)));
        assert_eq!(corrected_energy(-3.5, &CorrectionPieces::default()).unwrap(), -3.5);
    }

    #[test]
    fn uniform_density_moments() {
        let n = 8;
        let cell = UnitCell::cubic(L).unwrap();
        let g = VolumetricGrid::new(cell, [n; 3], vec![1.0; n * n * n], Some(GridConvention::Raw)).unwrap();
        let c = Vec3::new(L / 2.0, L / 2.0, L / 2.0);
        let m = grid_moments(&g, &c).unwrap();
        let nel = L.powi(3);
        assert!((m.charge - nel).abs() < 1e-9 * nel);
        let nf = n as f64;
        let q = nel * 3.0 * L * L * (1.0 / 12.0 + 1.0 / (6.0 * nf * nf));
        assert!((m.quadrupole - q).abs() < 1e-9 * q, "{} vs {q}", m.quadrupole);
        assert!(m.dipole.iter().all(|x| x.abs() < 1e-9));
        assert!(grid_moments(&g.clone().with_convention(None), &c).is_err());
        assert!(grid_moments(&g, &Vec3::new(-1.0, 0.0, 0.0)).is_err());
    }
}
