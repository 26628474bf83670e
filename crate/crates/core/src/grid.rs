//! Scalar fields sampled on a regular grid spanning a cell.
//!
//! Values are stored x-fastest (`i + n1·(j + n2·k)`), the CHGCAR order.
//! Node `(i, j, k)` sits at fractional `(i/n1, j/n2, k/n3)` and stands for
//! the voxel it anchors; quadrature weights are `volume / (n1·n2·n3)`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lattice::{UnitCell, Vec3};
use crate::numeric::det_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridConvention {
    /// Values are densities (per Å³).
    Raw,
    /// Values are density × cell volume (VASP CHGCAR style).
    Volume,
}

impl GridConvention {
    pub fn name(self) -> &'static str {
        match self {
            GridConvention::Raw => "raw",
            GridConvention::Volume => "volume",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "raw" => Some(GridConvention::Raw),
            "volume" => Some(GridConvention::Volume),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimensions must be >= 2 along every axis, got {0:?}")]
    InvalidDims([usize; 3]),
    #[error("expected {expected} grid values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("non-finite grid value at index {0}")]
    NonFinite(usize),
    #[error("grid has no declared density convention")]
    MissingConvention,
    #[error("grids differ in cell or dimensions")]
    ShapeMismatch,
    #[error("grid integrates to {found} electrons, expected {expected}")]
    ElectronCount { expected: f64, found: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricGrid {
    cell: UnitCell,
    dims: [usize; 3],
    values: Vec<f64>,
    convention: Option<GridConvention>,
}

impl VolumetricGrid {
    pub fn new(
        cell: UnitCell,
        dims: [usize; 3],
        values: Vec<f64>,
        convention: Option<GridConvention>,
    ) -> Result<Self, GridError> {
        if dims.iter().any(|&n| n < 2) {
            return Err(GridError::InvalidDims(dims));
        }
        let expected = dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or(GridError::InvalidDims(dims))?;
        if values.len() != expected {
            return Err(GridError::ValueCount { expected, got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(i));
        }
        Ok(VolumetricGrid { cell, dims, values, convention })
    }

    /// Grid filled by evaluating `f` at every node (Cartesian Å).
    pub fn from_fn(
        cell: UnitCell,
        dims: [usize; 3],
        convention: Option<GridConvention>,
        f: impl Fn(Vec3) -> f64,
    ) -> Result<Self, GridError> {
        if dims.iter().any(|&n| n < 2) {
            return Err(GridError::InvalidDims(dims));
        }
        let n = dims[0] * dims[1] * dims[2];
        let mut values = Vec::with_capacity(n);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let fr = Vec3::new(
                        i as f64 / dims[0] as f64,
                        j as f64 / dims[1] as f64,
                        k as f64 / dims[2] as f64,
                    );
                    values.push(f(cell.to_cartesian(&fr)));
                }
            }
        }
        Self::new(cell, dims, values, convention)
    }

    pub fn cell(&self) -> &UnitCell {
        &self.cell
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn convention(&self) -> Option<GridConvention> {
        self.convention
    }

    pub fn with_convention(mut self, c: Option<GridConvention>) -> Self {
        self.convention = c;
        self
    }

    pub fn voxel_volume(&self) -> f64 {
        self.cell.volume() / self.len() as f64
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn unindex(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let r = idx / self.dims[0];
        [i, r % self.dims[1], r / self.dims[1]]
    }

    pub fn node_fractional(&self, idx: usize) -> Vec3 {
        let [i, j, k] = self.unindex(idx);
        Vec3::new(
            i as f64 / self.dims[0] as f64,
            j as f64 / self.dims[1] as f64,
            k as f64 / self.dims[2] as f64,
        )
    }

    pub fn node_cartesian(&self, idx: usize) -> Vec3 {
        self.cell.to_cartesian(&self.node_fractional(idx))
    }

    /// Factor turning a stored value into a density per Å³.
    pub fn density_scale(&self) -> Result<f64, GridError> {
        match self.convention.ok_or(GridError::MissingConvention)? {
            GridConvention::Raw => Ok(1.0),
            GridConvention::Volume => Ok(1.0 / self.cell.volume()),
        }
    }

    /// ∫ρ dV in electrons (midpoint rule).
    pub fn integral(&self) -> Result<f64, GridError> {
        let w = self.density_scale()? * self.voxel_volume();
        Ok(det_sum(self.len(), |i| self.values[i]) * w)
    }

    /// Plain voxel-weighted sum of stored values, ignoring any convention.
    pub fn raw_integral(&self) -> f64 {
        det_sum(self.len(), |i| self.values[i]) * self.voxel_volume()
    }

    pub fn check_electrons(&self, expected: f64, tol: f64) -> Result<(), GridError> {
        let found = self.integral()?;
        if (found - expected).abs() > tol {
            return Err(GridError::ElectronCount { expected, found });
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &VolumetricGrid) -> bool {
        self.dims == other.dims && self.cell.vectors() == other.cell.vectors()
    }

    pub fn ensure_same_shape(&self, other: &VolumetricGrid) -> Result<(), GridError> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(GridError::ShapeMismatch)
        }
    }

    /// Periodic trilinear interpolation at a Cartesian point.
    pub fn interpolate(&self, r: &Vec3) -> f64 {
        let f = self.cell.to_fractional(r);
        let mut base = [0usize; 3];
        let mut t = [0.0; 3];
        for a in 0..3 {
            let x = f[a] * self.dims[a] as f64;
            let fl = x.floor();
            t[a] = x - fl;
            base[a] = (fl as i64).rem_euclid(self.dims[a] as i64) as usize;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let mut w = 1.0;
            let mut ijk = [0usize; 3];
            for a in 0..3 {
                let up = (corner >> a) & 1 == 1;
                w *= if up { t[a] } else { 1.0 - t[a] };
                ijk[a] = if up { (base[a] + 1) % self.dims[a] } else { base[a] };
            }
            if w != 0.0 {
                acc += w * self.values[self.index(ijk[0], ijk[1], ijk[2])];
            }
        }
        acc
    }

    /// Content hash of cell, dims, convention and values (bit patterns).
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for v in self.cell.vectors().iter().flatten() {
            h.update(v.to_bits().to_le_bytes());
        }
        for d in self.dims {
            h.update((d as u64).to_le_bytes());
        }
        h.update(self.convention.map_or("none", |c| c.name()).as_bytes());
        for v in &self.values {
            h.update(v.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}
