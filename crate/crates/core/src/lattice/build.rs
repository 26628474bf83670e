use super::structure::{Site, Structure, UnitCell};
use super::LatticeError;
use crate::element::Element;

/// Cubic lattice constant giving a 4×4×4 cell edge of 14.2710 Å.
pub const DEFAULT_A0: f64 = 3.56775;

const FCC: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];

fn check_args(n: [usize; 3], a0: f64) -> Result<(), LatticeError> {
    if n.contains(&0) {
        return Err(LatticeError::InvalidArgument(format!("supercell multiples must be >= 1, got {n:?}")));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(LatticeError::InvalidArgument(format!("lattice constant must be positive, got {a0}")));
    }
    Ok(())
}

/// Carbon diamond supercell built from `n[0] × n[1] × n[2]` conventional
/// cubic cells (8 atoms each). Sites are ordered cell by cell (x slowest),
/// fcc site, then the (¼,¼,¼) basis partner.
pub fn build_diamond_supercell(n: [usize; 3], a0: f64) -> Result<Structure, LatticeError> {
    check_args(n, a0)?;
    let cell = UnitCell::new(
        [
            [n[0] as f64 * a0, 0.0, 0.0],
            [0.0, n[1] as f64 * a0, 0.0],
            [0.0, 0.0, n[2] as f64 * a0],
        ],
        [true; 3],
    )?;
    let mut sites = Vec::with_capacity(8 * n[0] * n[1] * n[2]);
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                for f in FCC {
                    for shift in [0.0, 0.25] {
                        let frac = [
                            (i as f64 + f[0] + shift) / n[0] as f64,
                            (j as f64 + f[1] + shift) / n[1] as f64,
                            (k as f64 + f[2] + shift) / n[2] as f64,
                        ];
                        sites.push(Site { id: sites.len(), species: Element::C, frac });
                    }
                }
            }
        }
    }
    Structure::new_unchecked_separation(cell, sites)
}

/// Carbon diamond supercell of the two-atom fcc primitive cell, with
/// primitive vectors a0/2·(0,1,1), a0/2·(1,0,1), a0/2·(1,1,0). Gives the
/// 128-atom (4,4,4) and 250-atom (5,5,5) cells.
pub fn build_primitive_supercell(n: [usize; 3], a0: f64) -> Result<Structure, LatticeError> {
    check_args(n, a0)?;
    let h = a0 / 2.0;
    let prim = [[0.0, h, h], [h, 0.0, h], [h, h, 0.0]];
    let mut vectors = [[0.0; 3]; 3];
    for (r, row) in vectors.iter_mut().enumerate() {
        for c in 0..3 {
            row[c] = n[r] as f64 * prim[r][c];
        }
    }
    let cell = UnitCell::new(vectors, [true; 3])?;
    let mut sites = Vec::with_capacity(2 * n[0] * n[1] * n[2]);
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                for shift in [0.0, 0.25] {
                    let frac = [
                        (i as f64 + shift) / n[0] as f64,
                        (j as f64 + shift) / n[1] as f64,
                        (k as f64 + shift) / n[2] as f64,
                    ];
                    sites.push(Site { id: sites.len(), species: Element::C, frac });
                }
            }
        }
    }
    Structure::new_unchecked_separation(cell, sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_edges() {
        let s = build_diamond_supercell([4, 4, 4], DEFAULT_A0).unwrap();
        assert_eq!(s.len(), 512);
        assert!((s.cell().cubic_edge(1e-12).unwrap() - 14.2710).abs() < 1e-9);
        assert_eq!(build_primitive_supercell([4, 4, 4], DEFAULT_A0).unwrap().len(), 128);
        assert_eq!(build_primitive_supercell([5, 5, 5], DEFAULT_A0).unwrap().len(), 250);
    }

    #[test]
    fn unit_cell_is_fourfold_at_bond_length() {
        let a0 = DEFAULT_A0;
        let s = build_diamond_supercell([1, 1, 1], a0).unwrap();
        assert_eq!(s.len(), 8);
        let bond = a0 * 3f64.sqrt() / 4.0;
        for list in s.neighbor_lists(1.8) {
            assert_eq!(list.len(), 4);
            for nb in list {
                assert!((nb.distance - bond).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_diamond_supercell([0, 1, 1], 3.5).is_err());
        assert!(build_diamond_supercell([1, 1, 1], -3.5).is_err());
        assert!(build_primitive_supercell([1, 1, 1], f64::NAN).is_err());
    }
}
