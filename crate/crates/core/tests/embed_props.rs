//! Grid projection of embedding potentials: analytic limits, linearity,
//! translation covariance and quadrature convergence.

use colorcenter::embed::*;
use colorcenter::grid::{GridConvention, VolumetricGrid};
use colorcenter::lattice::{UnitCell, Vec3};

const BOHR: f64 = 0.529177210903;

fn prim(exponent: f64, coefficient: f64) -> Primitive {
    Primitive { exponent, coefficient }
}

fn shell(c: Vec3, l: u8, p: &[(f64, f64)]) -> BasisShell {
    BasisShell { atom: 0, shell: GtoShell::new(c, l, p.iter().map(|&(e, w)| prim(e, w)).collect()).unwrap() }
}

/// ⟨s_a|s_b⟩ for normalized s primitives, distance in bohr.
fn ss_closed_form(a: f64, b: f64, r_bohr: f64) -> f64 {
    (2.0 * (a * b).sqrt() / (a + b)).powf(1.5) * (-a * b / (a + b) * r_bohr * r_bohr).exp()
}

fn cell(l: f64) -> UnitCell {
    UnitCell::cubic(l).unwrap()
}

#[test]
fn constant_potential_gives_scaled_overlap_at_default_spacing() {
    let c = cell(8.0);
    let dims = default_dims(&c, DEFAULT_SPACING);
    let basis = BasisSet::new(vec![
        shell(Vec3::new(3.4, 4.0, 4.0), 0, &[(1.2, 0.6), (0.8, 0.5)]),
        shell(Vec3::new(3.4, 4.0, 4.0), 1, &[(1.0, 1.0)]),
        shell(Vec3::new(4.6, 4.1, 3.9), 0, &[(1.5, 1.0)]),
        shell(Vec3::new(4.6, 4.1, 3.9), 2, &[(1.3, 1.0)]),
    ]);
    let v = 0.37;
    let m = project_potential(&constant_grid(c, dims, v).unwrap(), &basis, EvalOptions::default()).unwrap();
    let s = basis.overlap_matrix();
    let n = basis.len();
    let scale = s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for i in 0..n {
        for j in 0..n {
            let want = v * s[i * n + j];
            assert!((m.get(i, j) - want).abs() <= 1e-8 * v * scale, "({i},{j}) {} vs {want}", m.get(i, j));
        }
    }
}

#[test]
fn two_centre_s_overlap_matches_gaussian_product() {
    let c = cell(8.0);
    let dims = default_dims(&c, DEFAULT_SPACING);
    let (a, b) = (1.1, 0.7);
    let (ra, rb) = (Vec3::new(3.3, 4.0, 4.0), Vec3::new(4.5, 4.3, 3.8));
    let basis = BasisSet::new(vec![shell(ra, 0, &[(a, 1.0)]), shell(rb, 0, &[(b, 1.0)])]);
    let m = project_potential(&constant_grid(c, dims, 1.0).unwrap(), &basis, EvalOptions::default()).unwrap();
    let want = ss_closed_form(a, b, (ra - rb).norm() / BOHR);
    assert!((m.get(0, 1) - want).abs() <= 1e-6, "{} vs {want}", m.get(0, 1));
    assert!((basis.overlap_matrix()[1] - want).abs() <= 1e-12);
}

#[test]
fn quadrature_error_decays_at_least_quadratically() {
    let c = cell(8.0);
    let (ra, rb) = (Vec3::new(3.7, 4.0, 4.0), Vec3::new(4.3, 4.0, 4.0));
    let basis = BasisSet::new(vec![shell(ra, 0, &[(1.0, 1.0)]), shell(rb, 0, &[(1.0, 1.0)])]);
    let want = ss_closed_form(1.0, 1.0, (ra - rb).norm() / BOHR);
    let err: Vec<(f64, f64)> = [16usize, 20, 24]
        .iter()
        .map(|&n| {
            let m = project_potential(&constant_grid(c.clone(), [n; 3], 1.0).unwrap(), &basis, EvalOptions::default()).unwrap();
            (n as f64, (m.get(0, 1) - want).abs())
        })
        .collect();
    for w in err.windows(2) {
        let ((n1, e1), (n2, e2)) = (w[0], w[1]);
        assert!(e1 > 0.0);
        assert!(e1 / e2.max(f64::MIN_POSITIVE) >= (n2 / n1).powi(2), "{err:?}");
    }
}

#[test]
fn projection_is_linear_in_the_potential() {
    let c = cell(6.0);
    let dims = [30; 3];
    let basis = BasisSet::new(vec![
        shell(Vec3::new(2.8, 3.0, 3.1), 0, &[(1.4, 1.0)]),
        shell(Vec3::new(3.3, 2.9, 3.0), 1, &[(1.2, 1.0)]),
    ]);
    let f1 = |r: Vec3| (r.x * 1.3).sin() + 0.2 * r.z;
    let f2 = |r: Vec3| (-(r - Vec3::new(3.0, 3.0, 3.0)).norm_squared()).exp();
    let g = |f: &dyn Fn(Vec3) -> f64| VolumetricGrid::from_fn(c.clone(), dims, Some(GridConvention::Raw), f).unwrap();
    let (a, b) = (0.7, -2.3);
    let m1 = project_potential(&g(&f1), &basis, EvalOptions::default()).unwrap();
    let m2 = project_potential(&g(&f2), &basis, EvalOptions::default()).unwrap();
    let m12 = project_potential(&g(&|r| a * f1(r) + b * f2(r)), &basis, EvalOptions::default()).unwrap();
    for k in 0..m1.values.len() {
        let want = a * m1.values[k] + b * m2.values[k];
        assert!((m12.values[k] - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }
    for i in 0..m1.n {
        for j in 0..m1.n {
            assert_eq!(m1.get(i, j), m1.get(j, i));
        }
    }
}

#[test]
fn wrapped_projection_is_translation_covariant_on_grid_steps() {
    let c = cell(6.0);
    let n = 24;
    let h = 6.0 / n as f64;
    let basis = BasisSet::new(vec![
        shell(Vec3::new(0.4, 5.8, 3.0), 0, &[(1.0, 1.0)]),
        shell(Vec3::new(1.0, 0.2, 3.2), 1, &[(1.3, 1.0)]),
    ]);
    let pot = |r: Vec3| {
        let t = 2.0 * std::f64::consts::PI / 6.0;
        (t * r.x).cos() + 0.5 * (t * r.y).sin() * (t * r.z).cos()
    };
    let wrap = EvalOptions { wrap: true };
    let g0 = VolumetricGrid::from_fn(c.clone(), [n; 3], Some(GridConvention::Raw), pot).unwrap();
    let m0 = project_potential(&g0, &basis, wrap).unwrap();
    for steps in [[1i32, 0, 0], [3, -2, 5], [-7, 4, 1]] {
        let shift = Vec3::new(steps[0] as f64 * h, steps[1] as f64 * h, steps[2] as f64 * h);
        let moved = basis.translated(shift);
        let g1 = VolumetricGrid::from_fn(c.clone(), [n; 3], Some(GridConvention::Raw), |r| pot(r - shift)).unwrap();
        let m1 = project_potential(&g1, &moved, wrap).unwrap();
        for k in 0..m0.values.len() {
            assert!((m0.values[k] - m1.values[k]).abs() <= 1e-10, "{steps:?}: {} vs {}", m0.values[k], m1.values[k]);
        }
    }
}

#[test]
fn residual_of_a_consistent_partition_is_exactly_zero() {
    let c = cell(5.0);
    let dims = [20; 3];
    let g = |f: &dyn Fn(Vec3) -> f64| VolumetricGrid::from_fn(c.clone(), dims, Some(GridConvention::Raw), f).unwrap();
    let cl = g(&|r| (-(r - Vec3::new(2.0, 2.5, 2.5)).norm_squared()).exp());
    let env = g(&|r| 0.3 * (-(r - Vec3::new(3.2, 2.5, 2.5)).norm_squared() * 0.5).exp());
    let caps = g(&|r| 0.05 * (-(r - Vec3::new(2.6, 2.5, 2.5)).norm_squared() * 2.0).exp());
    let full_vals: Vec<f64> = (0..cl.len()).map(|i| cl.values()[i] + env.values()[i] - caps.values()[i]).collect();
    let full = VolumetricGrid::new(c.clone(), dims, full_vals, Some(GridConvention::Raw)).unwrap();
    let r = density_residual(&cl, &env, &caps, &full).unwrap();
    assert_eq!((r.l1, r.linf, r.integrated), (0.0, 0.0, 0.0));
    let off = constant_grid(c.clone(), [21; 3], 0.0).unwrap();
    assert!(density_residual(&cl, &env, &caps, &off).is_err());
}
