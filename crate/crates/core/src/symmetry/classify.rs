//! Irrep weights of a scalar field:
//! w_Γ = (d_Γ/|G|) Σ_g χ_Γ(g)·⟨f, f∘g⟩/⟨f, f⟩.

use serde::Serialize;

use super::group::PointGroup;
use super::SymmetryError;
use crate::grid::VolumetricGrid;
use crate::lattice::Vec3;
use crate::numeric::det_sum;

/// Anything that can be evaluated at a Cartesian point (Å).
pub trait ScalarField: Sync {
    fn value(&self, r: &Vec3) -> f64;
}

impl ScalarField for VolumetricGrid {
    fn value(&self, r: &Vec3) -> f64 {
        self.interpolate(r)
    }
}

/// Adapter for closures.
pub struct FnField<F>(pub F);

impl<F: Fn(&Vec3) -> f64 + Sync> ScalarField for FnField<F> {
    fn value(&self, r: &Vec3) -> f64 {
        (self.0)(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrrepWeights {
    pub group: String,
    pub weights: Vec<(String, f64)>,
    /// ⟨f, f∘g⟩/⟨f, f⟩ per operation.
    pub overlaps: Vec<f64>,
}

impl IrrepWeights {
    pub fn weight(&self, irrep: &str) -> Option<f64> {
        self.weights.iter().find(|(n, _)| n == irrep).map(|(_, w)| *w)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().map(|(_, w)| w).sum()
    }

    /// Irrep with the largest weight.
    pub fn dominant(&self) -> &str {
        self.weights
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(n, _)| n.as_str())
            .unwrap_or("")
    }
}

fn weights_from_overlaps(g: &PointGroup, overlaps: Vec<f64>) -> IrrepWeights {
    let order = g.order() as f64;
    let weights = g
        .table
        .irreps
        .iter()
        .map(|r| {
            let s: f64 = g.ops.iter().zip(&overlaps).map(|(op, o)| r.characters[op.class] * o).sum();
            (r.name.clone(), r.dimension() as f64 * s / order)
        })
        .collect();
    IrrepWeights { group: g.name.clone(), weights, overlaps }
}

/// Classify `field` sampled at `nodes` (equal weights), with `f∘g`
/// evaluated through the field itself.
pub fn classify_field<F: ScalarField + ?Sized>(
    field: &F,
    nodes: &[Vec3],
    g: &PointGroup,
    center: &Vec3,
) -> Result<IrrepWeights, SymmetryError> {
    let base: Vec<f64> = nodes.iter().map(|r| field.value(r)).collect();
    let norm = det_sum(nodes.len(), |k| base[k] * base[k]);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(SymmetryError::ZeroNorm);
    }
    let overlaps = g
        .ops
        .iter()
        .map(|op| {
            det_sum(nodes.len(), |k| {
                let r = center + op.matrix * (nodes[k] - center);
                base[k] * field.value(&r)
            }) / norm
        })
        .collect();
    Ok(weights_from_overlaps(g, overlaps))
}

/// Classify a grid about `center`, resampling f∘g by periodic trilinear
/// interpolation.
pub fn classify_grid_function(grid: &VolumetricGrid, g: &PointGroup, center: &Vec3) -> Result<IrrepWeights, SymmetryError> {
    let nodes: Vec<Vec3> = (0..grid.len()).map(|k| grid.node_cartesian(k)).collect();
    classify_field(grid, &nodes, g, center)
}

/// Classify an analytic function on an `n³` midpoint lattice filling the
/// cube of half-width `half` around `center`.
pub fn classify_sampled<F: Fn(&Vec3) -> f64 + Sync>(
    f: F,
    center: &Vec3,
    half: f64,
    n: usize,
    g: &PointGroup,
) -> Result<IrrepWeights, SymmetryError> {
    let h = 2.0 * half / n as f64;
    let mut nodes = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let off = |q: usize| -half + (q as f64 + 0.5) * h;
                nodes.push(center + Vec3::new(off(i), off(j), off(k)));
            }
        }
    }
    classify_field(&FnField(f), &nodes, g, center)
}
