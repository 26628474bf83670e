//! Matrix elements ⟨φ_i|V|φ_j⟩ of a grid-sampled one-electron potential in
//! a contracted Cartesian Gaussian basis, plus the density-matching
//! diagnostics that go with it.
//!
//! Gaussian exponents are in bohr⁻²; centres and grid cells are in Å and
//! converted internally. Potentials are in hartree.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::element::Element;
use crate::grid::{GridConvention, GridError, VolumetricGrid};
use crate::lattice::{UnitCell, Vec3};
use crate::numeric::det_sum;
use crate::units::{BOHR_ANGSTROM, HARTREE_EV};

pub const MAX_L: u8 = 3;
/// Primitives are dropped beyond the radius where they fall below this.
pub const SCREEN_TOL: f64 = 1e-14;
/// Largest tolerated basis amplitude on the cell boundary without wrapping.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Default grid spacing, Å.
pub const DEFAULT_SPACING: f64 = 0.1;
pub const COMPONENT_CONVENTION: &str = "cartesian-6d";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("invalid shell: {0}")]
    InvalidShell(String),
    #[error("shell {shell} reaches the cell boundary with amplitude {amplitude:.3e}; enable wrapping or enlarge the cell")]
    SupportTruncated { shell: usize, amplitude: f64 },
    #[error("shell {shell} centre lies outside the grid cell")]
    CenterOutside { shell: usize },
    #[error("no basis for element {0}")]
    MissingElement(String),
    #[error("grids use different storage conventions")]
    ConventionMismatch,
    #[error("non-finite input: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn double_factorial(n: i32) -> f64 {
    let mut r = 1.0;
    let mut k = n;
    while k > 1 {
        r *= k as f64;
        k -= 2;
    }
    r
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// ∫ t^n exp(−p t²) dt over the real line.
fn gauss_moment(n: u32, p: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    double_factorial(n as i32 - 1) / (2.0 * p).powi(n as i32 / 2) * (std::f64::consts::PI / p).sqrt()
}

/// 1-D overlap of (x−A)^a e^{−α(x−A)²} with (x−B)^b e^{−β(x−B)²}.
fn overlap_1d(a: u32, b: u32, xa: f64, xb: f64, alpha: f64, beta: f64) -> f64 {
    let p = alpha + beta;
    let xp = (alpha * xa + beta * xb) / p;
    let pref = (-alpha * beta / p * (xa - xb).powi(2)).exp();
    let mut s = 0.0;
    for i in 0..=a {
        for j in 0..=b {
            s += binomial(a, i)
                * binomial(b, j)
                * (xp - xa).powi((a - i) as i32)
                * (xp - xb).powi((b - j) as i32)
                * gauss_moment(i + j, p);
        }
    }
    pref * s
}

/// Cartesian powers of angular momentum `l`, ordered xx, xy, xz, yy, yz, zz.
pub fn cartesian_components(l: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in (0..=l).rev() {
        for b in (0..=l - a).rev() {
            out.push([a, b, l - a - b]);
        }
    }
    out
}

pub fn component_label(p: [u8; 3]) -> String {
    let s: String = std::iter::repeat_n('x', p[0] as usize)
        .chain(std::iter::repeat_n('y', p[1] as usize))
        .chain(std::iter::repeat_n('z', p[2] as usize))
        .collect();
    if s.is_empty() { "s".into() } else { s }
}

/// Normalization of a primitive x^a y^b z^c e^{−αr²}.
fn primitive_norm(alpha: f64, p: [u8; 3]) -> f64 {
    let l = (p[0] + p[1] + p[2]) as i32;
    let df: f64 = p.iter().map(|&k| double_factorial(2 * k as i32 - 1)).product();
    (2.0 * alpha / std::f64::consts::PI).powf(0.75) * (4.0 * alpha).powf(l as f64 / 2.0) / df.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    /// bohr⁻².
    pub exponent: f64,
    pub coefficient: f64,
}

/// Contracted Cartesian shell.
#[derive(Debug, Clone, PartialEq)]
pub struct GtoShell {
    center: Vec3,
    l: u8,
    primitives: Vec<Primitive>,
    /// Contraction renormalization shared by all components.
    scale: f64,
}

impl GtoShell {
    pub fn new(center: Vec3, l: u8, primitives: Vec<Primitive>) -> Result<Self, EmbedError> {
        if l > MAX_L {
            return Err(EmbedError::InvalidShell(format!("l = {l} exceeds {MAX_L}")));
        }
        if primitives.is_empty() {
            return Err(EmbedError::InvalidShell("no primitives".into()));
        }
        if let Some(p) = primitives.iter().find(|p| !(p.exponent > 0.0 && p.exponent.is_finite())) {
            return Err(EmbedError::InvalidShell(format!("exponent {} must be positive", p.exponent)));
        }
        if primitives.iter().any(|p| !p.coefficient.is_finite()) || !center.iter().all(|x| x.is_finite()) {
            return Err(EmbedError::NonFinite("shell".into()));
        }
        let mut shell = GtoShell { center, l, primitives, scale: 1.0 };
        let p = [l, 0, 0];
        let s = shell.contracted_overlap(p, &shell, p);
        if !(s > 0.0 && s.is_finite()) {
            return Err(EmbedError::InvalidShell("contraction has zero norm".into()));
        }
        shell.scale = 1.0 / s.sqrt();
        Ok(shell)
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn l(&self) -> u8 {
        self.l
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn components(&self) -> Vec<[u8; 3]> {
        cartesian_components(self.l)
    }

    pub fn translated(&self, shift: Vec3) -> GtoShell {
        GtoShell { center: self.center + shift, ..self.clone() }
    }

    fn contracted_overlap(&self, p: [u8; 3], other: &GtoShell, q: [u8; 3]) -> f64 {
        let a = self.center / BOHR_ANGSTROM;
        let b = other.center / BOHR_ANGSTROM;
        let mut s = 0.0;
        for pi in &self.primitives {
            for pj in &other.primitives {
                let mut v = pi.coefficient
                    * pj.coefficient
                    * primitive_norm(pi.exponent, p)
                    * primitive_norm(pj.exponent, q);
                for k in 0..3 {
                    v *= overlap_1d(p[k] as u32, q[k] as u32, a[k], b[k], pi.exponent, pj.exponent);
                }
                s += v;
            }
        }
        s * self.scale * other.scale
    }

    /// Analytic ⟨φ_p|φ_q⟩ between component `p` of this shell and `q` of `other`.
    pub fn overlap(&self, p: [u8; 3], other: &GtoShell, q: [u8; 3]) -> f64 {
        self.contracted_overlap(p, other, q)
    }

    /// Value of component `p` at displacement `d` (bohr) from the centre.
    pub fn value_at(&self, p: [u8; 3], d: Vec3) -> f64 {
        let r2 = d.norm_squared();
        let poly = d.x.powi(p[0] as i32) * d.y.powi(p[1] as i32) * d.z.powi(p[2] as i32);
        let mut s = 0.0;
        for pr in &self.primitives {
            s += pr.coefficient * primitive_norm(pr.exponent, p) * (-pr.exponent * r2).exp();
        }
        self.scale * poly * s
    }

    /// Upper bound on |φ| of any component at distance `r` bohr.
    pub fn amplitude_bound(&self, r: f64) -> f64 {
        let l = self.l as i32;
        self.primitives
            .iter()
            .map(|pr| {
                let peak = (l as f64 / (2.0 * pr.exponent)).sqrt();
                let rr = r.max(peak);
                (self.scale * pr.coefficient * primitive_norm(pr.exponent, [self.l, 0, 0])).abs()
                    * double_factorial(2 * l - 1).sqrt()
                    * rr.powi(l)
                    * (-pr.exponent * rr * rr).exp()
            })
            .fold(0.0, f64::max)
    }

    /// Radius (bohr) beyond which every primitive is below [`SCREEN_TOL`].
    pub fn screening_radius(&self) -> f64 {
        let mut hi = 1.0;
        while self.amplitude_bound(hi) >= SCREEN_TOL {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.amplitude_bound(mid) >= SCREEN_TOL {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisShell {
    pub atom: usize,
    pub shell: GtoShell,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisFunction {
    pub shell: usize,
    pub atom: usize,
    pub powers: [u8; 3],
    pub label: String,
}

/// Shells ordered by atom, then ℓ (stable within equal keys), flattened to
/// one function per Cartesian component.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    shells: Vec<BasisShell>,
    functions: Vec<BasisFunction>,
    offsets: Vec<usize>,
}

impl BasisSet {
    pub fn new(mut shells: Vec<BasisShell>) -> Self {
        shells.sort_by_key(|s| (s.atom, s.shell.l));
        let mut functions = Vec::new();
        let mut offsets = Vec::with_capacity(shells.len());
        for (k, s) in shells.iter().enumerate() {
            offsets.push(functions.len());
            for p in s.shell.components() {
                functions.push(BasisFunction { shell: k, atom: s.atom, powers: p, label: component_label(p) });
            }
        }
        BasisSet { shells, functions, offsets }
    }

    pub fn shells(&self) -> &[BasisShell] {
        &self.shells
    }

    pub fn functions(&self) -> &[BasisFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Flat index of component `component` of shell `shell`.
    pub fn index_of(&self, shell: usize, component: usize) -> Option<usize> {
        let off = *self.offsets.get(shell)?;
        let n = self.shells[shell].shell.components().len();
        (component < n).then_some(off + component)
    }

    pub fn translated(&self, shift: Vec3) -> BasisSet {
        let shells = self
            .shells
            .iter()
            .map(|s| BasisShell { atom: s.atom, shell: s.shell.translated(shift) })
            .collect();
        BasisSet::new(shells)
    }

    /// Analytic overlap matrix, row-major.
    pub fn overlap_matrix(&self) -> Vec<f64> {
        let n = self.len();
        let mut s = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let (fi, fj) = (&self.functions[i], &self.functions[j]);
                let v = self.shells[fi.shell].shell.overlap(fi.powers, &self.shells[fj.shell].shell, fj.powers);
                s[i * n + j] = v;
                s[j * n + i] = v;
            }
        }
        s
    }

    /// Content hash including the component convention.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(COMPONENT_CONVENTION.as_bytes());
        for s in &self.shells {
            h.update((s.atom as u64).to_le_bytes());
            h.update([s.shell.l]);
            for x in s.shell.center.iter() {
                h.update(x.to_bits().to_le_bytes());
            }
            for p in &s.shell.primitives {
                h.update(p.exponent.to_bits().to_le_bytes());
                h.update(p.coefficient.to_bits().to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub l: u8,
    pub primitives: Vec<Primitive>,
}

/// Per-element shell definitions as read from a basis file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BasisLibrary {
    pub elements: BTreeMap<Element, Vec<ShellSpec>>,
}

impl BasisLibrary {
    pub fn build(&self, atoms: &[(Element, Vec3)]) -> Result<BasisSet, EmbedError> {
        let mut shells = Vec::new();
        for (k, (el, r)) in atoms.iter().enumerate() {
            let specs = self.elements.get(el).ok_or_else(|| EmbedError::MissingElement(el.symbol().into()))?;
            for sp in specs {
                shells.push(BasisShell { atom: k, shell: GtoShell::new(*r, sp.l, sp.primitives.clone())? });
            }
        }
        Ok(BasisSet::new(shells))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Fold displacements into the nearest periodic image instead of
    /// requiring the support to fit inside the cell.
    pub wrap: bool,
}

/// Grid dimensions giving spacing no coarser than `spacing` Å.
pub fn default_dims(cell: &UnitCell, spacing: f64) -> [usize; 3] {
    let mut d = [0; 3];
    for (k, dk) in d.iter_mut().enumerate() {
        *dk = ((cell.vector(k).norm() / spacing).ceil() as usize).max(2);
    }
    d
}

fn check_support(shell: &GtoShell, index: usize, cell: &UnitCell, opts: EvalOptions) -> Result<(), EmbedError> {
    if opts.wrap {
        return Ok(());
    }
    let f = cell.to_fractional(&shell.center);
    if f.iter().any(|&x| !(0.0..1.0).contains(&x)) {
        return Err(EmbedError::CenterOutside { shell: index });
    }
    let mut dmin = f64::INFINITY;
    for k in 0..3 {
        dmin = dmin.min(f[k].min(1.0 - f[k]) * cell.plane_spacing(k));
    }
    let amplitude = shell.amplitude_bound(dmin / BOHR_ANGSTROM);
    if amplitude > BOUNDARY_TOL {
        return Err(EmbedError::SupportTruncated { shell: index, amplitude });
    }
    Ok(())
}

/// Values of every Cartesian component of `shell` at the grid nodes,
/// one vector per component.
pub fn eval_shell_on_grid(shell: &GtoShell, grid: &VolumetricGrid, opts: EvalOptions) -> Result<Vec<Vec<f64>>, EmbedError> {
    check_support(shell, 0, grid.cell(), opts)?;
    Ok(eval_unchecked(shell, grid, opts))
}

fn eval_unchecked(shell: &GtoShell, grid: &VolumetricGrid, opts: EvalOptions) -> Vec<Vec<f64>> {
    let comps = shell.components();
    let rcut2 = shell.screening_radius().powi(2);
    let cell = grid.cell();
    let cf = cell.to_fractional(&shell.center);
    let n = grid.len();
    let vals: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let d = if opts.wrap {
                let mut df = grid.node_fractional(idx) - cf;
                df.apply(|x| *x -= x.round());
                cell.to_cartesian(&df)
            } else {
                grid.node_cartesian(idx) - shell.center
            } / BOHR_ANGSTROM;
            if d.norm_squared() > rcut2 {
                vec![0.0; comps.len()]
            } else {
                comps.iter().map(|&p| shell.value_at(p, d)).collect()
            }
        })
        .collect();
    (0..comps.len()).map(|c| vals.iter().map(|v| v[c]).collect()).collect()
}

/// Basis functions sampled on the grid, in basis order.
pub fn eval_basis_on_grid(basis: &BasisSet, grid: &VolumetricGrid, opts: EvalOptions) -> Result<Vec<Vec<f64>>, EmbedError> {
    for (k, s) in basis.shells.iter().enumerate() {
        check_support(&s.shell, k, grid.cell(), opts)?;
    }
    Ok(basis.shells.iter().flat_map(|s| eval_unchecked(&s.shell, grid, opts)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingMatrix {
    pub n: usize,
    /// Row-major, hartree.
    pub values: Vec<f64>,
    pub basis_fingerprint: String,
    pub grid_fingerprint: String,
    pub convention: String,
}

impl EmbeddingMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

fn bohr3_per_voxel(grid: &VolumetricGrid) -> f64 {
    grid.voxel_volume() / BOHR_ANGSTROM.powi(3)
}

/// M_ij = Σ φ_i φ_j v ΔV over the grid nodes. Stored values of `v` are
/// taken as hartree irrespective of any density convention flag.
pub fn project_potential(v: &VolumetricGrid, basis: &BasisSet, opts: EvalOptions) -> Result<EmbeddingMatrix, EmbedError> {
    let phi = eval_basis_on_grid(basis, v, opts)?;
    let n = basis.len();
    let w = bohr3_per_voxel(v);
    let vals = v.values();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let elems: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&phi[i], &phi[j]);
            det_sum(vals.len(), |k| a[k] * b[k] * vals[k]) * w
        })
        .collect();
    let mut m = vec![0.0; n * n];
    for (&(i, j), &x) in pairs.iter().zip(&elems) {
        m[i * n + j] = x;
        m[j * n + i] = x;
    }
    Ok(EmbeddingMatrix {
        n,
        values: m,
        basis_fingerprint: basis.fingerprint(),
        grid_fingerprint: v.fingerprint(),
        convention: COMPONENT_CONVENTION.into(),
    })
}

fn common_scale(grids: &[&VolumetricGrid]) -> Result<f64, EmbedError> {
    let c = grids[0].convention();
    for g in &grids[1..] {
        grids[0].ensure_same_shape(g)?;
        if g.convention() != c {
            return Err(EmbedError::ConventionMismatch);
        }
    }
    Ok(scale_of(grids[0]))
}

fn scale_of(g: &VolumetricGrid) -> f64 {
    g.density_scale().unwrap_or(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityResidual {
    /// ρ_cl + ρ_env − ρ_caps − ρ_full in the inputs' storage convention.
    /// Also the gradient direction of the density-matching functional with
    /// respect to the potential.
    #[serde(skip)]
    pub grid: VolumetricGrid,
    /// ∫|Δρ|, electrons.
    pub l1: f64,
    /// max |Δρ|, e/Å³.
    pub linf: f64,
    /// ∫Δρ, electrons.
    pub integrated: f64,
}

pub fn density_residual(
    rho_cl: &VolumetricGrid,
    rho_env: &VolumetricGrid,
    rho_caps: &VolumetricGrid,
    rho_full: &VolumetricGrid,
) -> Result<DensityResidual, EmbedError> {
    let s = common_scale(&[rho_cl, rho_env, rho_caps, rho_full])?;
    let (a, b, c, f) = (rho_cl.values(), rho_env.values(), rho_caps.values(), rho_full.values());
    let r: Vec<f64> = (0..a.len()).map(|i| a[i] + b[i] - c[i] - f[i]).collect();
    let w = s * rho_cl.voxel_volume();
    let l1 = det_sum(r.len(), |i| r[i].abs()) * w;
    let integrated = det_sum(r.len(), |i| r[i]) * w;
    let linf = r.iter().fold(0.0f64, |m, x| m.max(x.abs())) * s;
    let grid = VolumetricGrid::new(rho_cl.cell().clone(), rho_cl.dims(), r, rho_cl.convention())?;
    Ok(DensityResidual { grid, l1, linf, integrated })
}

/// W = E_cl + E_env − ∫V(ρ_full + ρ_caps) dr, eV. `v` in hartree, densities
/// in their own conventions.
pub fn wu_yang_value(
    e_cl: f64,
    e_env: f64,
    v: &VolumetricGrid,
    rho_full: &VolumetricGrid,
    rho_caps: &VolumetricGrid,
) -> Result<f64, EmbedError> {
    if !e_cl.is_finite() || !e_env.is_finite() {
        return Err(EmbedError::NonFinite("component energy".into()));
    }
    v.ensure_same_shape(rho_full)?;
    v.ensure_same_shape(rho_caps)?;
    let (sf, sc) = (scale_of(rho_full), scale_of(rho_caps));
    let (vv, f, c) = (v.values(), rho_full.values(), rho_caps.values());
    let integral = det_sum(vv.len(), |i| vv[i] * (f[i] * sf + c[i] * sc)) * v.voxel_volume();
    Ok(e_cl + e_env - HARTREE_EV * integral)
}

/// Convenience for tests and the CLI: a constant grid in raw convention.
pub fn constant_grid(cell: UnitCell, dims: [usize; 3], c: f64) -> Result<VolumetricGrid, GridError> {
    VolumetricGrid::new(cell, dims, vec![c; dims[0] * dims[1] * dims[2]], Some(GridConvention::Raw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prim(e: f64, c: f64) -> Primitive {
        Primitive { exponent: e, coefficient: c }
    }

    fn cube(l: f64) -> UnitCell {
        UnitCell::cubic(l).unwrap()
    }

    #[test]
    fn components_and_labels() {
        let d: Vec<String> = cartesian_components(2).into_iter().map(component_label).collect();
        assert_eq!(d, ["xx", "xy", "xz", "yy", "yz", "zz"]);
        assert_eq!(cartesian_components(3).len(), 10);
        assert_eq!(component_label([0, 0, 0]), "s");
    }

    #[test]
    fn analytic_self_overlap_is_one() {
        let prims = vec![prim(3.0, 0.2), prim(0.8, 0.5), prim(0.2, 0.4)];
        for l in 0..=3 {
            let s = GtoShell::new(Vec3::new(0.3, -0.1, 0.2), l, prims.clone()).unwrap();
            for p in s.components() {
                assert!((s.overlap(p, &s, p) - 1.0).abs() < 1e-10, "l={l} {p:?}");
            }
        }
    }

    #[test]
    fn s_value_at_center() {
        let a = 0.7;
        let s = GtoShell::new(Vec3::zeros(), 0, vec![prim(a, 1.0)]).unwrap();
        let expect = (2.0 * a / std::f64::consts::PI).powf(0.75);
        assert!((s.value_at([0, 0, 0], Vec3::zeros()) - expect).abs() < 1e-15);
    }

    #[test]
    fn gaussian_product_overlap() {
        let (a, b) = (0.9, 0.4);
        let ra = Vec3::new(0.0, 0.0, 0.0);
        let rb = Vec3::new(0.5, 0.3, -0.2);
        let sa = GtoShell::new(ra, 0, vec![prim(a, 1.0)]).unwrap();
        let sb = GtoShell::new(rb, 0, vec![prim(b, 1.0)]).unwrap();
        let d2 = ((ra - rb) / BOHR_ANGSTROM).norm_squared();
        let pi = std::f64::consts::PI;
        let norms = (2.0 * a / pi).powf(0.75) * (2.0 * b / pi).powf(0.75);
        let expect = (-a * b * d2 / (a + b)).exp() * (pi / (a + b)).powf(1.5) * norms;
        assert!((sa.overlap([0, 0, 0], &sb, [0, 0, 0]) - expect).abs() < 1e-14);
    }

    #[test]
    fn grid_self_overlap_at_default_spacing() {
        let cell = cube(8.0);
        let dims = default_dims(&cell, DEFAULT_SPACING);
        let ones = constant_grid(cell, dims, 1.0).unwrap();
        let s = GtoShell::new(Vec3::new(4.0, 4.0, 4.0), 1, vec![prim(1.2, 0.6), prim(0.6, 0.5)]).unwrap();
        let basis = BasisSet::new(vec![BasisShell { atom: 0, shell: s }]);
        let m = project_potential(&ones, &basis, EvalOptions::default()).unwrap();
        for i in 0..3 {
            assert!((m.get(i, i) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn truncated_support_is_an_error_unless_wrapped() {
        let cell = cube(4.0);
        let g = constant_grid(cell, [16, 16, 16], 1.0).unwrap();
        let s = GtoShell::new(Vec3::new(0.5, 2.0, 2.0), 0, vec![prim(0.3, 1.0)]).unwrap();
        assert!(matches!(eval_shell_on_grid(&s, &g, EvalOptions::default()), Err(EmbedError::SupportTruncated { .. })));
        assert!(eval_shell_on_grid(&s, &g, EvalOptions { wrap: true }).is_ok());
        let out = GtoShell::new(Vec3::new(-1.0, 2.0, 2.0), 0, vec![prim(5.0, 1.0)]).unwrap();
        assert!(matches!(eval_shell_on_grid(&out, &g, EvalOptions::default()), Err(EmbedError::CenterOutside { .. })));
    }

    #[test]
    fn invalid_shells() {
        assert!(GtoShell::new(Vec3::zeros(), 4, vec![prim(1.0, 1.0)]).is_err());
        assert!(GtoShell::new(Vec3::zeros(), 0, vec![]).is_err());
        assert!(GtoShell::new(Vec3::zeros(), 0, vec![prim(-1.0, 1.0)]).is_err());
        assert!(GtoShell::new(Vec3::zeros(), 0, vec![prim(1.0, 0.0)]).is_err());
    }

    #[test]
    fn basis_ordering_and_index_map() {
        let p = vec![prim(1.0, 1.0)];
        let mk = |atom, l| BasisShell { atom, shell: GtoShell::new(Vec3::new(atom as f64, 0.0, 0.0), l, p.clone()).unwrap() };
        let b = BasisSet::new(vec![mk(1, 0), mk(0, 2), mk(0, 0), mk(1, 1)]);
        let order: Vec<(usize, u8)> = b.shells().iter().map(|s| (s.atom, s.shell.l())).collect();
        assert_eq!(order, [(0, 0), (0, 2), (1, 0), (1, 1)]);
        assert_eq!(b.len(), 1 + 6 + 1 + 3);
        let mut seen = vec![false; b.len()];
        for (k, s) in b.shells().iter().enumerate() {
            for c in 0..s.shell.components().len() {
                let i = b.index_of(k, c).unwrap();
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(b.functions()[i].shell, k);
            }
        }
        assert!(seen.iter().all(|&x| x));
        assert_eq!(b.index_of(0, 1), None);
    }

    #[test]
    fn wu_yang_constant_potential() {
        let cell = cube(3.0);
        let dims = [6, 6, 6];
        let rho_f = constant_grid(cell.clone(), dims, 2.0 / 27.0).unwrap();
        let rho_c = constant_grid(cell.clone(), dims, 1.0 / 27.0).unwrap();
        let zero = constant_grid(cell.clone(), dims, 0.0).unwrap();
        assert_eq!(wu_yang_value(-3.0, -4.0, &zero, &rho_f, &rho_c).unwrap(), -7.0);
        let c = constant_grid(cell, dims, 0.1).unwrap();
        let w = wu_yang_value(-3.0, -4.0, &c, &rho_f, &rho_c).unwrap();
        assert!((w - (-7.0 - 0.1 * 3.0 * HARTREE_EV)).abs() < 1e-12);
    }

    #[test]
    fn residual_exact_zero_and_blob() {
        let cell = cube(4.0);
        let dims = [8, 8, 8];
        let f = |a: f64| move |r: Vec3| (-(r - Vec3::repeat(2.0)).norm_squared() * a).exp();
        let cl = VolumetricGrid::from_fn(cell.clone(), dims, Some(GridConvention::Raw), f(1.0)).unwrap();
        let env = VolumetricGrid::from_fn(cell.clone(), dims, Some(GridConvention::Raw), f(0.3)).unwrap();
        let caps = VolumetricGrid::from_fn(cell.clone(), dims, Some(GridConvention::Raw), f(2.0)).unwrap();
        let full: Vec<f64> = (0..cl.len()).map(|i| cl.values()[i] + env.values()[i] - caps.values()[i]).collect();
        let full = VolumetricGrid::new(cell.clone(), dims, full, Some(GridConvention::Raw)).unwrap();
        let r = density_residual(&cl, &env, &caps, &full).unwrap();
        assert_eq!((r.l1, r.linf, r.integrated), (0.0, 0.0, 0.0));
        let vol = VolumetricGrid::new(cell, dims, cl.values().to_vec(), Some(GridConvention::Volume)).unwrap();
        assert_eq!(density_residual(&vol, &env, &caps, &full).unwrap_err(), EmbedError::ConventionMismatch);
    }
}
