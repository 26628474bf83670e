use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::LatticeError;
use crate::element::Element;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Minimum allowed separation between two sites, Å.
pub const MIN_SITE_SEPARATION: f64 = 0.5;

/// Smallest accepted spacing between lattice planes along a periodic axis,
/// Å. Thinner cells would make image searches unbounded.
pub const MIN_PLANE_SPACING: f64 = 0.1;

/// Periodic (or partially periodic) cell. Rows of `vectors` are the lattice
/// vectors in Å.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    matrix: Mat3,
    inverse: Mat3,
    periodic: [bool; 3],
}

impl UnitCell {
    pub fn new(vectors: [[f64; 3]; 3], periodic: [bool; 3]) -> Result<Self, LatticeError> {
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(LatticeError::InvalidCell("non-finite lattice vector".into()));
        }
        let matrix = Mat3::from_fn(|r, c| vectors[r][c]);
        let det = matrix.determinant();
        if det.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || det < 1e-12 {
            return Err(LatticeError::InvalidCell(format!(
                "cell volume must be positive (got {det})"
            )));
        }
        let inverse = matrix
            .try_inverse()
            .ok_or_else(|| LatticeError::InvalidCell("singular cell".into()))?;
        let cell = Self { matrix, inverse, periodic };
        for k in (0..3).filter(|&k| periodic[k]) {
            let d = cell.plane_spacing(k);
            if !(d >= MIN_PLANE_SPACING) {
                return Err(LatticeError::InvalidCell(format!("lattice planes along axis {k} are {d:.3e} Å apart")));
            }
        }
        Ok(cell)
    }

    pub fn cubic(edge: f64) -> Result<Self, LatticeError> {
        Self::new([[edge, 0.0, 0.0], [0.0, edge, 0.0], [0.0, 0.0, edge]], [true; 3])
    }

    pub fn vectors(&self) -> [[f64; 3]; 3] {
        let m = &self.matrix;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn vector(&self, i: usize) -> Vec3 {
        self.matrix.row(i).transpose()
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn periodic(&self) -> [bool; 3] {
        self.periodic
    }

    pub fn volume(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn to_cartesian(&self, frac: &Vec3) -> Vec3 {
        self.matrix.transpose() * frac
    }

    pub fn to_fractional(&self, cart: &Vec3) -> Vec3 {
        self.inverse.transpose() * cart
    }

    /// Distance between the two lattice planes spanned by the other two
    /// vectors, for axis `i`.
    pub fn plane_spacing(&self, i: usize) -> f64 {
        1.0 / self.inverse.column(i).norm()
    }

    /// Edge length if the cell is cubic (orthogonal, equal edges) within
    /// `rel_tol`.
    pub fn cubic_edge(&self, rel_tol: f64) -> Option<f64> {
        let a = self.vector(0);
        let b = self.vector(1);
        let c = self.vector(2);
        let l = a.norm();
        let ok_len = (b.norm() - l).abs() <= rel_tol * l && (c.norm() - l).abs() <= rel_tol * l;
        let ok_ang = a.dot(&b).abs() <= rel_tol * l * l
            && a.dot(&c).abs() <= rel_tol * l * l
            && b.dot(&c).abs() <= rel_tol * l * l;
        (ok_len && ok_ang).then(|| self.volume().cbrt())
    }

    /// Shortest Cartesian image of the fractional displacement `dfrac`.
    pub fn min_image(&self, dfrac: &Vec3) -> Vec3 {
        let mut d = *dfrac;
        for k in 0..3 {
            if self.periodic[k] {
                d[k] -= d[k].round();
            }
        }
        let mut best = self.to_cartesian(&d);
        let mut best_n2 = best.norm_squared();
        let range = |k: usize| if self.periodic[k] { -1..=1 } else { 0..=0 };
        for i in range(0) {
            for j in range(1) {
                for l in range(2) {
                    if i == 0 && j == 0 && l == 0 {
                        continue;
                    }
                    let v = self.to_cartesian(&(d + Vec3::new(i as f64, j as f64, l as f64)));
                    let n2 = v.norm_squared();
                    if n2 < best_n2 {
                        best = v;
                        best_n2 = n2;
                    }
                }
            }
        }
        best
    }

    /// All Cartesian images of `dfrac` with length `<= cutoff`.
    pub fn images_within(&self, dfrac: &Vec3, cutoff: f64) -> Vec<Vec3> {
        let mut d = *dfrac;
        let mut ranges = [(0i64, 0i64); 3];
        for k in 0..3 {
            if self.periodic[k] {
                d[k] -= d[k].round();
                let w = cutoff / self.plane_spacing(k);
                ranges[k] = ((-w - d[k]).ceil() as i64, (w - d[k]).floor() as i64);
            }
        }
        let mut out = Vec::new();
        let c2 = cutoff * cutoff;
        for i in ranges[0].0..=ranges[0].1 {
            for j in ranges[1].0..=ranges[1].1 {
                for l in ranges[2].0..=ranges[2].1 {
                    let v = self.to_cartesian(&(d + Vec3::new(i as f64, j as f64, l as f64)));
                    if v.norm_squared() <= c2 {
                        out.push(v);
                    }
                }
            }
        }
        out
    }
}

/// One atomic site. `frac` is kept wrapped into `[0, 1)` along periodic axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: usize,
    pub species: Element,
    pub frac: [f64; 3],
}

/// Wrap a fractional coordinate into `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index into `Structure::sites` (not the site id).
    pub index: usize,
    /// Cartesian displacement from the owning site to this image, Å.
    pub vector: Vec3,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    cell: UnitCell,
    sites: Vec<Site>,
}

impl Structure {
    /// Validates id uniqueness, coordinate ranges and the minimum-separation
    /// invariant.
    pub fn new(cell: UnitCell, sites: Vec<Site>) -> Result<Self, LatticeError> {
        let s = Self::new_unchecked_separation(cell, sites)?;
        s.check_separation()?;
        Ok(s)
    }

    pub(crate) fn new_unchecked_separation(
        cell: UnitCell,
        mut sites: Vec<Site>,
    ) -> Result<Self, LatticeError> {
        let mut ids: Vec<usize> = sites.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(LatticeError::DuplicateSiteId(w[0]));
        }
        let periodic = cell.periodic();
        for site in &mut sites {
            #[allow(clippy::needless_range_loop)]
            for k in 0..3 {
                let x = site.frac[k];
                if !x.is_finite() {
                    return Err(LatticeError::InvalidSite(site.id, "non-finite coordinate".into()));
                }
                if periodic[k] {
                    site.frac[k] = wrap_unit(x);
                } else if !(0.0..1.0).contains(&x) {
                    return Err(LatticeError::InvalidSite(
                        site.id,
                        format!("fractional coordinate {x} outside non-periodic axis {k}"),
                    ));
                }
            }
        }
        Ok(Self { cell, sites })
    }

    fn check_separation(&self) -> Result<(), LatticeError> {
        let n = self.sites.len();
        if n > 0 && self.cell.images_within(&Vec3::zeros(), MIN_SITE_SEPARATION).len() > 1 {
            return Err(LatticeError::SitesTooClose(self.sites[0].id, self.sites[0].id));
        }
        for i in 0..n {
            let fi = Vec3::from(self.sites[i].frac);
            for j in (i + 1)..n {
                let d = Vec3::from(self.sites[j].frac) - fi;
                if !self.cell.images_within(&d, MIN_SITE_SEPARATION).is_empty() {
                    return Err(LatticeError::SitesTooClose(self.sites[i].id, self.sites[j].id));
                }
            }
        }
        Ok(())
    }

    pub fn cell(&self) -> &UnitCell {
        &self.cell
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.sites.iter().position(|s| s.id == id)
    }

    pub fn cartesian(&self, index: usize) -> Vec3 {
        self.cell.to_cartesian(&Vec3::from(self.sites[index].frac))
    }

    /// Index of the site nearest to the Cartesian point `r` (periodic),
    /// if one lies within `tol` Å.
    pub fn site_near(&self, r: &Vec3, tol: f64) -> Option<usize> {
        let fr = self.cell.to_fractional(r);
        self.sites
            .iter()
            .enumerate()
            .map(|(i, s)| (i, self.cell.min_image(&(Vec3::from(s.frac) - fr)).norm()))
            .filter(|&(_, d)| d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    /// Per-site neighbor lists (all periodic images) within `cutoff` Å.
    pub fn neighbor_lists(&self, cutoff: f64) -> Vec<Vec<Neighbor>> {
        let n = self.sites.len();
        let mut out: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for i in 0..n {
            let fi = Vec3::from(self.sites[i].frac);
            for j in i..n {
                let d = Vec3::from(self.sites[j].frac) - fi;
                for v in self.cell.images_within(&d, cutoff) {
                    let dist = v.norm();
                    if dist < 1e-9 {
                        continue;
                    }
                    out[i].push(Neighbor { index: j, vector: v, distance: dist });
                    if i != j {
                        out[j].push(Neighbor { index: i, vector: -v, distance: dist });
                    }
                }
            }
        }
        for list in &mut out {
            list.sort_by(|a, b| {
                a.index.cmp(&b.index).then(a.distance.total_cmp(&b.distance))
            });
        }
        out
    }

    /// Species counts in first-appearance order.
    pub fn composition(&self) -> Vec<(Element, usize)> {
        let mut out: Vec<(Element, usize)> = Vec::new();
        for s in &self.sites {
            match out.iter_mut().find(|(e, _)| *e == s.species) {
                Some((_, n)) => *n += 1,
                None => out.push((s.species, 1)),
            }
        }
        out
    }

    /// Hill-style formula with carbon first, e.g. `C126O`.
    pub fn formula(&self) -> String {
        formula_from_counts(&self.composition())
    }
}

pub(crate) fn formula_from_counts(counts: &[(Element, usize)]) -> String {
    let mut c: Vec<(Element, usize)> = counts.to_vec();
    c.sort_by_key(|(e, _)| (*e != Element::C, e.symbol()));
    let mut s = String::new();
    for (e, n) in c {
        if n == 0 {
            continue;
        }
        s.push_str(e.symbol());
        if n > 1 {
            s.push_str(&n.to_string());
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_cell() {
        assert!(UnitCell::new([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 1.0]], [true; 3]).is_err());
        assert!(UnitCell::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]], [true; 3]).is_err());
        assert!(UnitCell::new([[f64::NAN, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [true; 3]).is_err());
    }

    #[test]
    fn fractional_round_trip() {
        let cell = UnitCell::new([[3.0, 0.1, 0.0], [0.5, 2.5, 0.0], [0.2, 0.3, 4.0]], [true; 3]).unwrap();
        let f = Vec3::new(0.1, 0.7, 0.35);
        let back = cell.to_fractional(&cell.to_cartesian(&f));
        assert!((back - f).norm() < 1e-14);
    }

    #[test]
    fn wraps_and_rejects_duplicates() {
        let cell = UnitCell::cubic(5.0).unwrap();
        let s = Structure::new(
            cell.clone(),
            vec![Site { id: 0, species: Element::C, frac: [-0.25, 1.5, 0.0] }],
        )
        .unwrap();
        assert_eq!(s.sites()[0].frac, [0.75, 0.5, 0.0]);
        let dup = Structure::new(
            cell.clone(),
            vec![
                Site { id: 3, species: Element::C, frac: [0.0; 3] },
                Site { id: 3, species: Element::C, frac: [0.5; 3] },
            ],
        );
        assert!(matches!(dup, Err(LatticeError::DuplicateSiteId(3))));
        let close = Structure::new(
            cell,
            vec![
                Site { id: 0, species: Element::C, frac: [0.01, 0.0, 0.0] },
                Site { id: 1, species: Element::C, frac: [0.99, 0.0, 0.0] },
            ],
        );
        assert!(matches!(close, Err(LatticeError::SitesTooClose(0, 1))));
    }

    #[test]
    fn formula_puts_carbon_first() {
        let f = formula_from_counts(&[(Element::O, 1), (Element::C, 126)]);
        assert_eq!(f, "C126O");
    }
}
