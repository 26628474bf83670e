use serde::Serialize;

use crate::lattice::{Mat3, Vec3};

/// A point operation (orthogonal matrix) tagged with its conjugacy class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymOp {
    #[serde(serialize_with = "ser_mat")]
    pub matrix: Mat3,
    /// Index into the owning group's class list.
    pub class: usize,
    pub label: String,
}

fn ser_mat<S: serde::Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
    let rows: [[f64; 3]; 3] = std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]));
    rows.serialize(s)
}

impl SymOp {
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix * v
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn is_orthogonal(&self, tol: f64) -> bool {
        (self.matrix.transpose() * self.matrix - Mat3::identity()).abs().max() <= tol
    }
}

pub fn rotation(axis: &Vec3, angle: f64) -> Mat3 {
    let n = axis.normalize();
    let (s, c) = angle.sin_cos();
    let k = Mat3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0);
    Mat3::identity() + k * s + k * k * (1.0 - c)
}

pub fn reflection(normal: &Vec3) -> Mat3 {
    let n = normal.normalize();
    Mat3::identity() - 2.0 * n * n.transpose()
}

/// Rotation by `angle` about `axis` followed by reflection through the
/// perpendicular plane.
pub fn improper(axis: &Vec3, angle: f64) -> Mat3 {
    reflection(axis) * rotation(axis, angle)
}

pub fn inversion() -> Mat3 {
    -Mat3::identity()
}
