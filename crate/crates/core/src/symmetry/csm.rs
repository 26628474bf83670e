//! Continuous symmetry measure with per-operation optimal assignment.
//!
//! Points are centered and scaled so the farthest lies on the unit sphere.
//! For every operation g the same-species permutation σ_g minimizing
//! Σ‖g·P_i − P_σ(i)‖² is found with the Hungarian method; the symmetrized
//! points are P̂_i = (1/|G|) Σ_g g⁻¹·P_σg(i) and S' is the mean squared
//! distance from P to P̂. For an involution g the optimal σ and σ⁻¹ tie;
//! if they differ both enter the fold with weight ½.

use rayon::prelude::*;
use serde::Serialize;

use super::group::PointGroup;
use super::SymmetryError;
use crate::element::Element;
use crate::lattice::{Mat3, Vec3};
use crate::numeric::{hungarian, pairwise_sum};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsmResult {
    pub group: String,
    pub s_prime: f64,
    /// max_i ‖g·P_i − P_σg(i)‖ per operation, in normalized units.
    pub per_op_max_displacement: Vec<f64>,
    /// Nearest symmetric points in normalized coordinates.
    #[serde(serialize_with = "ser_points")]
    pub symmetric_points: Vec<Vec3>,
    pub permutations: Vec<Vec<usize>>,
    #[serde(serialize_with = "ser_point")]
    pub center: Vec3,
    pub scale: f64,
}

fn ser_point<S: serde::Serializer>(p: &Vec3, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    [p.x, p.y, p.z].serialize(s)
}

fn ser_points<S: serde::Serializer>(p: &[Vec3], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    p.iter().map(|v| [v.x, v.y, v.z]).collect::<Vec<_>>().serialize(s)
}

impl CsmResult {
    pub fn max_displacement(&self) -> f64 {
        self.per_op_max_displacement.iter().copied().fold(0.0, f64::max)
    }

    /// Symmetrized points mapped back to input coordinates (Å).
    pub fn symmetric_points_cartesian(&self) -> Vec<Vec3> {
        self.symmetric_points.iter().map(|p| self.center + p * self.scale).collect()
    }
}

/// Centered, scaled copy of the input. Fails on empty, non-finite or
/// coincident input.
pub(crate) fn normalize(positions: &[Vec3], center: Option<Vec3>) -> Result<(Vec<Vec3>, Vec3, f64), SymmetryError> {
    if positions.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(SymmetryError::NonFinite);
    }
    let c = match center {
        Some(c) => c,
        None => positions.iter().fold(Vec3::zeros(), |a, p| a + p) / positions.len() as f64,
    };
    let scale = positions.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    if !(scale > 1e-12) {
        return Err(SymmetryError::Degenerate);
    }
    Ok((positions.iter().map(|p| (p - c) / scale).collect(), c, scale))
}

/// Same-species blocks as index lists, in first-appearance order.
pub(crate) fn species_blocks(species: &[Element]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<(Element, Vec<usize>)> = Vec::new();
    for (i, s) in species.iter().enumerate() {
        match blocks.iter_mut().find(|(e, _)| e == s) {
            Some((_, v)) => v.push(i),
            None => blocks.push((*s, vec![i])),
        }
    }
    blocks.into_iter().map(|(_, v)| v).collect()
}

/// Optimal permutation σ with g·P_i ≈ P_σ(i), species-respecting.
pub(crate) fn assign(op: &Mat3, pts: &[Vec3], blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut perm = vec![0usize; pts.len()];
    for b in blocks {
        let n = b.len();
        let moved: Vec<Vec3> = b.iter().map(|&i| op * pts[i]).collect();
        let mut cost = Vec::with_capacity(n * n);
        for m in &moved {
            for &j in b {
                cost.push((m - pts[j]).norm_squared());
            }
        }
        let (p, _) = hungarian(n, &cost);
        for (r, &c) in p.iter().enumerate() {
            perm[b[r]] = b[c];
        }
    }
    perm
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut back = vec![0; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        back[j] = i;
    }
    back
}

/// Evaluate S' for given normalized points and per-op permutations.
pub(crate) fn measure(pts: &[Vec3], group: &PointGroup, perms: &[Vec<usize>]) -> (f64, Vec<Vec3>, Vec<f64>) {
    let n = pts.len();
    let g = group.order() as f64;
    let mut sym = vec![Vec3::zeros(); n];
    // Fixed operation order keeps the result independent of scheduling.
    for (op, perm) in group.ops.iter().zip(perms) {
        let inv = op.matrix.transpose();
        // For an involution g, σ and σ⁻¹ have identical assignment cost;
        // when σ is not itself an involution the choice is arbitrary, so
        // both are folded in with equal weight.
        let involutive = (op.matrix * op.matrix - Mat3::identity()).abs().max() < 1e-9;
        let back = inverse(perm);
        if involutive && back != *perm {
            for i in 0..n {
                sym[i] += inv * (pts[perm[i]] + pts[back[i]]) * 0.5;
            }
        } else {
            for i in 0..n {
                sym[i] += inv * pts[perm[i]];
            }
        }
    }
    for p in &mut sym {
        *p /= g;
    }
    let d2: Vec<f64> = pts.iter().zip(&sym).map(|(p, q)| (p - q).norm_squared()).collect();
    let maxd = group
        .ops
        .iter()
        .zip(perms)
        .map(|(op, perm)| (0..n).map(|i| (op.matrix * pts[i] - pts[perm[i]]).norm()).fold(0.0, f64::max))
        .collect();
    (pairwise_sum(&d2) / n as f64, sym, maxd)
}

pub fn csm(
    species: &[Element],
    positions: &[Vec3],
    group: &PointGroup,
    center: Option<Vec3>,
) -> Result<CsmResult, SymmetryError> {
    if species.len() != positions.len() {
        return Err(SymmetryError::LengthMismatch { species: species.len(), positions: positions.len() });
    }
    if positions.len() < 2 {
        return Err(SymmetryError::TooFewPoints(positions.len()));
    }
    let (pts, c, scale) = normalize(positions, center)?;
    let blocks = species_blocks(species);
    let perms: Vec<Vec<usize>> = group.ops.par_iter().map(|op| assign(&op.matrix, &pts, &blocks)).collect();
    let (s, sym, maxd) = measure(&pts, group, &perms);
    Ok(CsmResult {
        group: group.name.clone(),
        s_prime: s,
        per_op_max_displacement: maxd,
        symmetric_points: sym,
        permutations: perms,
        center: c,
        scale,
    })
}
