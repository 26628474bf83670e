//! Charged-cell corrections: scaling of the image terms and multipole
//! moments of gridded densities.

use colorcenter::corrections::*;
use colorcenter::grid::{GridConvention, VolumetricGrid};
use colorcenter::lattice::{UnitCell, Vec3};
use proptest::prelude::*;

/// Normalized Gaussian blob of total charge `q` and width `s` (Å), including
/// the nearest periodic images.
fn blob(l: f64, n: usize, c: Vec3, s: f64, q: f64, conv: GridConvention) -> VolumetricGrid {
    let norm = q / (2.0 * std::f64::consts::PI * s * s).powf(1.5);
    let cell = UnitCell::cubic(l).unwrap();
    let vol = cell.volume();
    VolumetricGrid::from_fn(cell, [n; 3], Some(conv), |r| {
        let mut v = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                for k in -1..=1 {
                    let d = r - c - Vec3::new(i as f64, j as f64, k as f64) * l;
                    v += (-d.norm_squared() / (2.0 * s * s)).exp();
                }
            }
        }
        let rho = norm * v;
        if conv == GridConvention::Volume { rho * vol } else { rho }
    })
    .unwrap()
}

#[test]
fn moments_converge_to_the_analytic_blob() {
    let (l, s, q) = (10.0, 0.8, 2.0);
    let c = Vec3::new(5.3, 4.6, 5.1);
    let origin = Vec3::new(5.0, 5.0, 5.0);
    let mut prev = f64::INFINITY;
    for n in [16, 24, 32] {
        let m = grid_moments(&blob(l, n, c, s, q, GridConvention::Raw), &origin).unwrap();
        let err = (m.charge - q).abs();
        assert!(err <= prev + 1e-12);
        prev = err;
        if n == 32 {
            assert!(err < 1e-9, "{m:?}");
            let d = c - origin;
            for a in 0..3 {
                assert!((m.dipole[a] - q * d[a]).abs() < 1e-6, "{m:?}");
            }
            // ∫ρ|r − o|² = Q(3s² + |c − o|²)
            assert!((m.quadrupole - q * (3.0 * s * s + d.norm_squared())).abs() < 1e-5);
        }
    }
}

#[test]
fn storage_convention_does_not_change_moments() {
    let c = Vec3::new(2.0, 3.0, 4.0);
    let o = Vec3::new(3.0, 3.0, 3.0);
    let a = grid_moments(&blob(6.0, 20, c, 0.7, 1.0, GridConvention::Raw), &o).unwrap();
    let b = grid_moments(&blob(6.0, 20, c, 0.7, 1.0, GridConvention::Volume), &o).unwrap();
    assert!((a.charge - b.charge).abs() < 1e-12);
    assert!((a.quadrupole - b.quadrupole).abs() < 1e-10);
}

#[test]
fn symmetric_density_has_no_dipole_about_its_centre() {
    // The box edge falls on grid nodes; those are shared between images.
    let o = Vec3::new(3.0, 3.0, 3.0);
    let m = grid_moments(&blob(6.0, 12, o, 1.2, 1.0, GridConvention::Raw), &o).unwrap();
    assert!(m.dipole.iter().all(|x| x.abs() < 1e-12), "{m:?}");
    let missing = VolumetricGrid::new(UnitCell::cubic(6.0).unwrap(), [2; 3], vec![0.0; 8], None).unwrap();
    assert!(grid_moments(&missing, &o).is_err());
    assert!(grid_moments(&blob(6.0, 8, o, 1.0, 1.0, GridConvention::Raw), &Vec3::new(7.0, 0.0, 0.0)).is_err());
}

proptest! {
    #[test]
    fn image_terms_scale_with_charge_length_and_screening(q in -3i32..=3, l in 5.0f64..30.0, eps in 1.0f64..20.0, k in 0.2f64..5.0) {
        let d = DielectricModel::new(eps).unwrap();
        let qf = q as f64;
        let e = madelung_mm(qf, l, &d, MADELUNG_SC).unwrap();
        // e²/(4πε₀) = 14.3996454784 eV·Å; the library's constant is rounded.
        let coulomb = 14.3996454784;
        prop_assert!((e - coulomb * qf * qf * MADELUNG_SC / (2.0 * l * eps)).abs() <= 1e-5 * e.abs());
        let ek = madelung_mm(qf, k * l, &DielectricModel::new(eps).unwrap(), MADELUNG_SC).unwrap();
        prop_assert!((ek * k - e).abs() <= 1e-12 * (1.0 + e.abs()));
        let mq = mq_correction(qf, 3.0, 1.0, l, &d).unwrap();
        let mq_k = mq_correction(qf, 3.0, 1.0, k * l, &d).unwrap();
        prop_assert!((mq_k * k.powi(3) - mq).abs() <= 1e-12 * (1.0 + mq.abs()));
        let dd = dd_correction(&[1.0, -2.0, 0.5], l, &d).unwrap();
        prop_assert!(dd >= 0.0);
        let mixed = CorrectionPieces { e_mm: Some(e), e_mq: None, e_dd: Some(dd) };
        prop_assert!(corrected_energy(1.0, &mixed).is_err());
    }

    #[test]
    fn dipole_tracks_the_blob_centre(x in 4.0f64..6.0, y in 4.0f64..6.0, z in 4.0f64..6.0) {
        let c = Vec3::new(x, y, z);
        let o = Vec3::new(5.0, 5.0, 5.0);
        let m = grid_moments(&blob(10.0, 32, c, 0.6, 1.5, GridConvention::Raw), &o).unwrap();
        for a in 0..3 {
            prop_assert!((m.dipole[a] - m.charge * (c - o)[a]).abs() < 1e-6, "{:?}", m);
        }
    }
}
