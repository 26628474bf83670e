use std::f64::consts::PI;

use serde::Serialize;

use super::ops::{improper, inversion, reflection, rotation, SymOp};
use super::tables::{embedded_tables, CharacterTable};
use super::SymmetryError;
use crate::lattice::{Mat3, Vec3};

/// Supported point groups, in ascending order.
pub const GROUP_NAMES: [&str; 7] = ["C1", "Cs", "C2", "C2v", "C3v", "D3d", "Td"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointGroup {
    pub name: String,
    pub ops: Vec<SymOp>,
    pub table: CharacterTable,
    /// Orientation frame, rows = x, y, z axes in lab coordinates. The
    /// principal axis is z; for C2v/C3v one mirror contains x; for D3d a C2'
    /// axis is x; for Td the frame is the cube frame.
    #[serde(skip)]
    pub frame: Mat3,
}

/// Canonical-frame matrices and class index for each operation.
fn canonical_ops(name: &str) -> Option<Vec<(Mat3, usize, &'static str)>> {
    let (x, y, z) = (Vec3::x(), Vec3::y(), Vec3::z());
    let e = Mat3::identity();
    let in_plane = |k: usize| rotation(&z, 2.0 * PI * k as f64 / 3.0) * x;
    Some(match name {
        "C1" => vec![(e, 0, "E")],
        "Cs" => vec![(e, 0, "E"), (reflection(&z), 1, "sh")],
        "C2" => vec![(e, 0, "E"), (rotation(&z, PI), 1, "C2")],
        "C2v" => vec![
            (e, 0, "E"),
            (rotation(&z, PI), 1, "C2"),
            (reflection(&y), 2, "sv(xz)"),
            (reflection(&x), 3, "sv(yz)"),
        ],
        "C3v" => {
            let mut v = vec![
                (e, 0, "E"),
                (rotation(&z, 2.0 * PI / 3.0), 1, "C3"),
                (rotation(&z, -2.0 * PI / 3.0), 1, "C3^2"),
            ];
            for k in 0..3 {
                // Mirror containing the in-plane direction k·120°.
                v.push((reflection(&z.cross(&in_plane(k))), 2, "sv"));
            }
            v
        }
        "D3d" => {
            let c3 = [rotation(&z, 2.0 * PI / 3.0), rotation(&z, -2.0 * PI / 3.0)];
            let c2: Vec<Mat3> = (0..3).map(|k| rotation(&in_plane(k), PI)).collect();
            let mut v = vec![(e, 0, "E")];
            v.extend(c3.iter().map(|m| (*m, 1, "C3")));
            v.extend(c2.iter().map(|m| (*m, 2, "C2'")));
            v.push((inversion(), 3, "i"));
            v.extend(c3.iter().map(|m| (inversion() * m, 4, "S6")));
            v.extend(c2.iter().map(|m| (inversion() * m, 5, "sd")));
            v
        }
        "Td" => {
            let mut v = vec![(e, 0, "E")];
            for s in [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]] {
                let a = Vec3::from(s);
                v.push((rotation(&a, 2.0 * PI / 3.0), 1, "C3"));
                v.push((rotation(&a, -2.0 * PI / 3.0), 1, "C3"));
            }
            for a in [x, y, z] {
                v.push((rotation(&a, PI), 2, "C2"));
            }
            for a in [x, y, z] {
                v.push((improper(&a, PI / 2.0), 3, "S4"));
                v.push((improper(&a, -PI / 2.0), 3, "S4"));
            }
            for n in [
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(1.0, -1.0, 0.0),
                Vec3::new(1.0, 0.0, 1.0),
                Vec3::new(1.0, 0.0, -1.0),
                Vec3::new(0.0, 1.0, 1.0),
                Vec3::new(0.0, 1.0, -1.0),
            ] {
                v.push((reflection(&n), 4, "sd"));
            }
            v
        }
        _ => return None,
    })
}

/// Accepts `C2v`, `c2v`, `C₂ᵥ`, `C2V`, ... and returns the canonical name.
pub fn canonical_group_name(s: &str) -> Option<&'static str> {
    let key: String = s
        .trim()
        .chars()
        .map(|c| match c {
            '₀'..='₉' => char::from(b'0' + (c as u32 - '₀' as u32) as u8),
            'ᵥ' => 'v',
            'ₛ' => 's',
            'ₕ' => 'h',
            c => c,
        })
        .flat_map(char::to_lowercase)
        .collect();
    GROUP_NAMES.iter().copied().find(|n| n.to_lowercase() == key)
}

fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
    (a - b).abs().max() <= tol
}

impl PointGroup {
    /// Group in its canonical frame with the embedded character table.
    pub fn new(name: &str) -> Result<Self, SymmetryError> {
        let canon = canonical_group_name(name).ok_or_else(|| SymmetryError::UnknownGroup(name.to_string()))?;
        let table = embedded_tables()
            .into_iter()
            .find(|t| t.group == canon)
            .ok_or_else(|| SymmetryError::UnknownGroup(name.to_string()))?;
        Self::with_table(canon, table)
    }

    /// Group with a caller-supplied table. Class sizes must match the
    /// operations.
    pub fn with_table(name: &str, table: CharacterTable) -> Result<Self, SymmetryError> {
        let canon = canonical_group_name(name).ok_or_else(|| SymmetryError::UnknownGroup(name.to_string()))?;
        let raw = canonical_ops(canon).ok_or_else(|| SymmetryError::UnknownGroup(name.to_string()))?;
        table.validate()?;
        let mut sizes = vec![0usize; table.classes.len()];
        for (_, c, _) in &raw {
            if *c >= sizes.len() {
                return Err(SymmetryError::InvalidTable {
                    group: canon.into(),
                    message: format!("table has {} classes", sizes.len()),
                });
            }
            sizes[*c] += 1;
        }
        for (c, want) in table.classes.iter().zip(&sizes) {
            if c.size != *want {
                return Err(SymmetryError::InvalidTable {
                    group: canon.into(),
                    message: format!("class {} has {} operations, table says {}", c.label, want, c.size),
                });
            }
        }
        let ops = raw
            .into_iter()
            .map(|(m, class, label)| SymOp { matrix: m, class, label: label.to_string() })
            .collect();
        Ok(PointGroup { name: canon.to_string(), ops, table, frame: Mat3::identity() })
    }

    pub fn order(&self) -> usize {
        self.ops.len()
    }

    /// Same group re-expressed in the frame whose rows (x, y, z) are `axes`.
    pub fn oriented(&self, axes: &[Vec3; 3]) -> Result<Self, SymmetryError> {
        let a = Mat3::from_rows(&[axes[0].transpose(), axes[1].transpose(), axes[2].transpose()]);
        if !close(&(a * a.transpose()), &Mat3::identity(), 1e-8) {
            return Err(SymmetryError::InvalidFrame);
        }
        // Orthonormalize to full precision.
        let svd = a.svd(true, true);
        let a = svd.u.unwrap() * svd.v_t.unwrap();
        if a.determinant() < 0.0 {
            return Err(SymmetryError::InvalidFrame);
        }
        self.in_frame(a)
    }

    pub(crate) fn in_frame(&self, a: Mat3) -> Result<Self, SymmetryError> {
        let base = PointGroup::with_table(&self.name, self.table.clone())?;
        let ops = base
            .ops
            .into_iter()
            .map(|op| SymOp { matrix: a.transpose() * op.matrix * a, ..op })
            .collect();
        Ok(PointGroup { ops, frame: a, ..base })
    }

    pub fn axes(&self) -> [Vec3; 3] {
        std::array::from_fn(|r| self.frame.row(r).transpose())
    }

    /// Index of the operation equal to `m`, if any.
    pub fn find_op(&self, m: &Mat3, tol: f64) -> Option<usize> {
        self.ops.iter().position(|o| close(&o.matrix, m, tol))
    }

    /// Class index of g² for a representative g of each class.
    pub fn square_classes(&self) -> Vec<usize> {
        self.table
            .classes
            .iter()
            .enumerate()
            .map(|(c, _)| {
                let g = self.ops.iter().find(|o| o.class == c).expect("every class has an op");
                let sq = g.matrix * g.matrix;
                let k = self.find_op(&sq, 1e-8).expect("group closed under squaring");
                self.ops[k].class
            })
            .collect()
    }

    /// Characters of an irrep indexed per operation.
    pub fn op_characters(&self, irrep: &str) -> Result<Vec<f64>, SymmetryError> {
        let r = self.table.irrep(irrep)?;
        Ok(self.ops.iter().map(|o| r.characters[o.class]).collect())
    }

    /// Structural checks: orthogonality, closure, inverses, and that the
    /// Cartesian (vector) representation has a class-constant trace.
    pub fn validate(&self) -> Result<(), SymmetryError> {
        let bad = |m: String| Err(SymmetryError::InvalidTable { group: self.name.clone(), message: m });
        for op in &self.ops {
            if !op.is_orthogonal(1e-10) || (op.det().abs() - 1.0).abs() > 1e-10 {
                return bad(format!("{} is not orthogonal", op.label));
            }
        }
        for a in &self.ops {
            for b in &self.ops {
                if self.find_op(&(a.matrix * b.matrix), 1e-9).is_none() {
                    return bad(format!("{}·{} not in group", a.label, b.label));
                }
            }
        }
        let mut trace: Vec<Option<f64>> = vec![None; self.table.classes.len()];
        for op in &self.ops {
            let t = op.matrix.trace();
            match trace[op.class] {
                None => trace[op.class] = Some(t),
                Some(u) if (u - t).abs() > 1e-9 => return bad(format!("class of {} is inconsistent", op.label)),
                _ => {}
            }
        }
        for (i, a) in self.ops.iter().enumerate() {
            for b in &self.ops {
                let conj = b.matrix * a.matrix * b.matrix.transpose();
                let k = self.find_op(&conj, 1e-9).expect("closure checked");
                if self.ops[k].class != a.class {
                    return bad(format!("op {i} ({}) conjugates out of its class", a.label));
                }
            }
        }
        Ok(())
    }
}

/// Named groups available for detection and lookup, with optional table
/// overrides.
#[derive(Debug, Clone)]
pub struct GroupCatalog {
    groups: Vec<PointGroup>,
}

impl Default for GroupCatalog {
    fn default() -> Self {
        GroupCatalog { groups: GROUP_NAMES.iter().map(|n| PointGroup::new(n).expect("built-in group")).collect() }
    }
}

impl GroupCatalog {
    pub fn get(&self, name: &str) -> Option<&PointGroup> {
        let canon = canonical_group_name(name)?;
        self.groups.iter().find(|g| g.name == canon)
    }

    pub fn names(&self) -> Vec<&str> {
        self.groups.iter().map(|g| g.name.as_str()).collect()
    }

    /// Replace the tables of the named groups with parsed overrides.
    pub fn override_tables(&mut self, tables: Vec<CharacterTable>) -> Result<(), SymmetryError> {
        for t in tables {
            let g = PointGroup::with_table(&t.group.clone(), t)?;
            match self.groups.iter_mut().find(|x| x.name == g.name) {
                Some(slot) => *slot = g,
                None => return Err(SymmetryError::UnknownGroup(g.name)),
            }
        }
        Ok(())
    }
}
