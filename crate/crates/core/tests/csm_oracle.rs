//! S'(G) against a brute-force assignment oracle, plus invariance and
//! monotonicity properties.

use colorcenter::element::Element;
use colorcenter::lattice::{Mat3, Vec3};
use colorcenter::symmetry::{csm, rotation, PointGroup};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every permutation of `items`.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Reference S': for each operation every species-respecting permutation
/// is scored by Σ|g·p_i − p_σ(i)|²; the optimal ones (ties within 1e-12
/// relative, averaged) give the folded configuration
/// p̃_i = (1/|G|) Σ_g g⁻¹ p_σg(i).
fn oracle(species: &[Element], pts: &[Vec3], g: &PointGroup, center: Vec3) -> f64 {
    let n = pts.len();
    let c = center;
    let scale = pts.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    let q: Vec<Vec3> = pts.iter().map(|p| (p - c) / scale).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, s) in species.iter().enumerate() {
        match blocks.iter_mut().find(|b| species[b[0]] == *s) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    let mut folded = vec![Vec3::zeros(); n];
    for op in &g.ops {
        let m = op.matrix;
        // Blocks are independent, so ties are averaged block by block.
        for b in &blocks {
            let scored: Vec<(f64, Vec<usize>)> = permutations(b)
                .into_iter()
                .map(|p| (b.iter().zip(&p).map(|(&i, &j)| (m * q[i] - q[j]).norm_squared()).sum(), p))
                .collect();
            let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let ties: Vec<&Vec<usize>> =
                scored.iter().filter(|s| s.0 <= best + 1e-12 * (1.0 + best)).map(|s| &s.1).collect();
            for p in &ties {
                for (&i, &j) in b.iter().zip(p.iter()) {
                    folded[i] += m.transpose() * q[j] / ties.len() as f64;
                }
            }
        }
    }
    let order = g.ops.len() as f64;
    q.iter().zip(&folded).map(|(p, f)| (p - f / order).norm_squared()).sum::<f64>() / n as f64
}

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<Element>, Vec<Vec3>, PointGroup) {
    let names = ["Cs", "C2", "C2v", "C3v", "D3d", "Td"];
    let g = PointGroup::new(names[rng.random_range(0..names.len())]).unwrap();
    let n = rng.random_range(2..=8);
    let species: Vec<Element> = (0..n).map(|_| if rng.random_bool(0.7) { Element::C } else { Element::O }).collect();
    let pts: Vec<Vec3> = (0..n)
        .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    (species, pts, g)
}

#[test]
fn hungarian_matches_brute_force_on_200_random_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (species, pts, g) = random_case(&mut rng);
        let center = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / pts.len() as f64;
        let r = csm(&species, &pts, &g, None).unwrap();
        let o = oracle(&species, &pts, &g, center);
        worst = worst.max((r.s_prime - o).abs());
        assert!((r.s_prime - o).abs() <= 1e-9, "{}: {} vs oracle {}", g.name, r.s_prime, o);
    }
    assert!(worst <= 1e-9);
}

/// For a group {E, g} the fold reduces to S' = (1/4n)·Σ|g·p_i − p̄_i|², where
/// p̄_i averages p_σ(i) over the tied optimal σ (σ and σ⁻¹ always tie).
#[test]
fn order_two_groups_have_a_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["Cs", "C2"] {
        let g = PointGroup::new(name).unwrap();
        let m = g.ops.iter().find(|o| (o.matrix - Mat3::identity()).abs().max() > 0.5).unwrap().matrix;
        for _ in 0..50 {
            let n = rng.random_range(2..=7);
            let pts: Vec<Vec3> =
                (0..n).map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let species = vec![Element::C; n];
            let r = csm(&species, &pts, &g, Some(Vec3::zeros())).unwrap();
            let scale = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
            let q: Vec<Vec3> = pts.iter().map(|p| p / scale).collect();
            let idx: Vec<usize> = (0..n).collect();
            let scored: Vec<(f64, Vec<usize>)> = permutations(&idx)
                .into_iter()
                .map(|p| ((0..n).map(|i| (m * q[i] - q[p[i]]).norm_squared()).sum::<f64>(), p))
                .collect();
            let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
            let ties: Vec<&Vec<usize>> = scored.iter().filter(|s| s.0 <= best + 1e-12 * (1.0 + best)).map(|s| &s.1).collect();
            let expect = (0..n)
                .map(|i| {
                    let bar = ties.iter().fold(Vec3::zeros(), |a, p| a + q[p[i]]) / ties.len() as f64;
                    (m * q[i] - bar).norm_squared()
                })
                .sum::<f64>()
                / (4.0 * n as f64);
            assert!((r.s_prime - expect).abs() < 1e-12, "{name}: {} vs {expect}", r.s_prime);
            assert!(r.s_prime <= best / (4.0 * n as f64) + 1e-12);
        }
    }
}

fn arb_points(max: usize) -> impl Strategy<Value = Vec<[f64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-2.0f64..2.0), 3..=max)
}

fn symmetric_orbit(seed: &[[f64; 3]], g: &PointGroup) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::new();
    for s in seed {
        for op in &g.ops {
            let p = op.matrix * Vec3::from(*s);
            if out.iter().all(|q| (q - p).norm() > 1e-6) {
                out.push(p);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rigid_motion_scale_and_relabelling_leave_s_unchanged(
        pts in arb_points(7),
        axis in prop::array::uniform3(-1.0f64..1.0),
        angle in 0.0f64..std::f64::consts::TAU,
        shift in prop::array::uniform3(-5.0f64..5.0),
        s in 0.1f64..10.0,
        gi in 0usize..4,
    ) {
        let axis = Vec3::from(axis);
        prop_assume!(axis.norm() > 0.1);
        let g = PointGroup::new(["Cs", "C2v", "C3v", "Td"][gi]).unwrap();
        let p: Vec<Vec3> = pts.iter().map(|x| Vec3::from(*x)).collect();
        let species = vec![Element::C; p.len()];
        let base = csm(&species, &p, &g, None).unwrap().s_prime;

        // Move the points and the frame together.
        let r = rotation(&axis.normalize(), angle);
        let moved: Vec<Vec3> = p.iter().map(|x| r * x * s + Vec3::from(shift)).collect();
        let frame = [r * Vec3::x(), r * Vec3::y(), r * Vec3::z()];
        let gr = g.oriented(&frame).unwrap();
        let after = csm(&species, &moved, &gr, None).unwrap().s_prime;
        prop_assert!((after - base).abs() <= 1e-9 * (1.0 + base), "{base} vs {after}");

        let mut rev = p.clone();
        rev.reverse();
        let relabelled = csm(&species, &rev, &g, None).unwrap().s_prime;
        prop_assert!((relabelled - base).abs() <= 1e-12 * (1.0 + base));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
    }

    #[test]
    fn symmetric_orbits_vanish_and_grow_with_distortion(
        seed in prop::collection::vec(prop::array::uniform3(0.3f64..1.5), 1..=2),
        dir in prop::collection::vec(prop::array::uniform3(-1.0f64..1.0), 48),
        gi in 0usize..3,
    ) {
        let g = PointGroup::new(["C2v", "C3v", "D3d"][gi]).unwrap();
        let orbit = symmetric_orbit(&seed, &g);
        prop_assume!(orbit.len() >= 2);
        // Orbit points must be well separated for the assignment to stay put.
        let sep = (0..orbit.len())
            .flat_map(|i| (i + 1..orbit.len()).map(move |j| (i, j)))
            .map(|(i, j)| (orbit[i] - orbit[j]).norm())
            .fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 0.05);
        let species = vec![Element::C; orbit.len()];
        let s0 = csm(&species, &orbit, &g, Some(Vec3::zeros())).unwrap().s_prime;
        prop_assert!(s0 < 1e-20, "{s0}");
        // Along a fixed distortion direction S' is non-decreasing for
        // small amplitudes.
        let d: Vec<Vec3> = orbit.iter().zip(&dir).map(|(_, v)| Vec3::from(*v)).collect();
        let mut prev = s0;
        for k in 1..=5 {
            let t = 1e-4 * k as f64 * sep;
            let p: Vec<Vec3> = orbit.iter().zip(&d).map(|(x, v)| x + v * t).collect();
            let s = csm(&species, &p, &g, Some(Vec3::zeros())).unwrap().s_prime;
            prop_assert!(s + 1e-18 >= prev, "t={t}: {s} < {prev}");
            prev = s;
        }
    }
}

