//! Point-group detection: orient each candidate group to minimize S' and
//! report the highest-order group below the symmetry threshold.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use serde::Serialize;

use super::csm::{assign, measure, normalize, species_blocks, CsmResult};
use super::group::PointGroup;
use super::ops::{improper, reflection, rotation};
use super::SymmetryError;
use crate::element::Element;
use crate::lattice::{Mat3, Vec3};

pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    pub threshold: f64,
    /// Principal-axis candidates carried into the secondary search.
    pub principal_keep: usize,
    /// Full frames carried into local refinement.
    pub frames_keep: usize,
    pub refine: bool,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions { threshold: DEFAULT_THRESHOLD, principal_keep: 6, frames_keep: 3, refine: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateScore {
    pub group: String,
    pub order: usize,
    pub s_prime: f64,
    /// Frame rows x, y, z.
    pub axes: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub group: String,
    pub axes: [[f64; 3]; 3],
    pub result: CsmResult,
    pub scores: Vec<CandidateScore>,
}

struct Prepared {
    pts: Vec<Vec3>,
    blocks: Vec<Vec<usize>>,
}

impl Prepared {
    fn op_cost(&self, m: &Mat3) -> f64 {
        let perm = assign(m, &self.pts, &self.blocks);
        self.pts.iter().enumerate().map(|(i, p)| (m * p - self.pts[perm[i]]).norm_squared()).sum::<f64>()
            / self.pts.len() as f64
    }

    fn full(&self, g: &PointGroup) -> (f64, Vec<Vec<usize>>) {
        let perms: Vec<Vec<usize>> = g.ops.iter().map(|op| assign(&op.matrix, &self.pts, &self.blocks)).collect();
        let (s, _, _) = measure(&self.pts, g, &perms);
        (s, perms)
    }
}

fn push_unique(dirs: &mut Vec<Vec3>, v: Vec3) {
    let n = v.norm();
    if !(n > 1e-6) {
        return;
    }
    let u = v / n;
    if dirs.iter().all(|d| d.dot(&u).abs() < 1.0 - 1e-9) {
        dirs.push(u);
    }
}

fn candidate_directions(p: &Prepared) -> Vec<Vec3> {
    let mut dirs = Vec::new();
    let mut inertia = Mat3::zeros();
    for x in &p.pts {
        inertia += Mat3::identity() * x.norm_squared() - x * x.transpose();
    }
    let eig = SymmetricEigen::new(inertia);
    for c in 0..3 {
        push_unique(&mut dirs, eig.eigenvectors.column(c).into_owned());
    }
    for x in [Vec3::x(), Vec3::y(), Vec3::z()] {
        push_unique(&mut dirs, x);
    }
    for x in &p.pts {
        push_unique(&mut dirs, *x);
    }
    for b in &p.blocks {
        for (k, &i) in b.iter().enumerate() {
            for &j in &b[k + 1..] {
                let (a, c) = (p.pts[i], p.pts[j]);
                if (a.norm() - c.norm()).abs() > 1e-2 {
                    continue;
                }
                push_unique(&mut dirs, a + c);
                push_unique(&mut dirs, a - c);
                push_unique(&mut dirs, a.cross(&c));
            }
        }
    }
    dirs
}

fn any_perpendicular(z: &Vec3) -> Vec3 {
    let t = if z.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (t - z * z.dot(&t)).normalize()
}

fn frame(x: &Vec3, z: &Vec3) -> Option<Mat3> {
    let z = z.normalize();
    let x = x - z * z.dot(x);
    if x.norm() < 1e-6 {
        return None;
    }
    let x = x.normalize();
    let y = z.cross(&x);
    Some(Mat3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]))
}

/// Operation used to rank principal axes (canonical frame, axis z).
fn principal_probe(name: &str, z: &Vec3) -> Option<Mat3> {
    Some(match name {
        "Cs" => reflection(z),
        "C2" | "C2v" => rotation(z, PI),
        "C3v" => rotation(z, 2.0 * PI / 3.0),
        "D3d" => improper(z, PI / 3.0),
        "Td" => improper(z, PI / 2.0),
        _ => return None,
    })
}

/// Operation used to rank the in-plane axis, given a full frame.
fn secondary_probe(name: &str, a: &Mat3) -> Option<Mat3> {
    let lab = |m: Mat3| a.transpose() * m * a;
    Some(match name {
        "C2v" | "C3v" => lab(reflection(&Vec3::y())),
        "D3d" => lab(rotation(&Vec3::x(), PI)),
        "Td" => lab(rotation(&Vec3::new(1.0, 1.0, 1.0), 2.0 * PI / 3.0)),
        _ => return None,
    })
}

fn small_rotation(axis: usize, h: f64) -> Mat3 {
    let mut v = Vec3::zeros();
    v[axis] = 1.0;
    rotation(&v, h)
}

fn refine(p: &Prepared, g: &PointGroup, a: Mat3, s0: f64) -> (Mat3, f64) {
    let (mut a, mut best) = (a, s0);
    let mut h = 0.02;
    let mut evals = 0;
    while h > 1e-8 && best > 1e-15 && evals < 600 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let trial = a * small_rotation(axis, sign * h);
                let gt = match g.in_frame(trial) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                evals += 1;
                let (s, _) = p.full(&gt);
                if s < best {
                    best = s;
                    a = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (a, best)
}

fn best_frame(p: &Prepared, g: &PointGroup, dirs: &[Vec3], opts: &DetectOptions) -> Result<(Mat3, f64), SymmetryError> {
    if g.order() == 1 {
        return Ok((Mat3::identity(), 0.0));
    }
    let mut principal: Vec<(f64, Vec3)> = dirs
        .iter()
        .filter_map(|d| principal_probe(&g.name, d).map(|m| (p.op_cost(&m), *d)))
        .collect();
    principal.sort_by(|a, b| a.0.total_cmp(&b.0));
    principal.truncate(opts.principal_keep.max(1));

    let mut frames: Vec<(f64, Mat3)> = Vec::new();
    for (_, z) in &principal {
        let mut xs: Vec<Vec3> = Vec::new();
        if secondary_probe(&g.name, &Mat3::identity()).is_some() {
            for d in dirs {
                push_unique(&mut xs, d - z * z.dot(d));
            }
        }
        if xs.is_empty() {
            xs.push(any_perpendicular(z));
        }
        let mut ranked: Vec<(f64, Mat3)> = xs
            .iter()
            .filter_map(|x| frame(x, z))
            .map(|a| (secondary_probe(&g.name, &a).map_or(0.0, |m| p.op_cost(&m)), a))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (_, a) in ranked.into_iter().take(opts.frames_keep.max(1)) {
            let (s, _) = p.full(&g.in_frame(a)?);
            frames.push((s, a));
        }
    }
    frames.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (s, a) = frames.first().copied().unwrap_or((f64::INFINITY, Mat3::identity()));
    if opts.refine && s > 1e-15 {
        let mut best = (a, s);
        for &(s0, a0) in frames.iter().take(opts.frames_keep.max(1)) {
            let r = refine(p, g, a0, s0);
            if r.1 < best.1 {
                best = r;
            }
        }
        return Ok(best);
    }
    Ok((a, s))
}

fn rows(a: &Mat3) -> [[f64; 3]; 3] {
    std::array::from_fn(|r| std::array::from_fn(|c| a[(r, c)]))
}

/// Try every candidate group; pick the highest order with S' ≤ threshold
/// (ties broken by lower S', then candidate order).
pub fn detect_point_group(
    species: &[Element],
    positions: &[Vec3],
    candidates: &[PointGroup],
    center: Option<Vec3>,
    opts: &DetectOptions,
) -> Result<Detection, SymmetryError> {
    if candidates.is_empty() {
        return Err(SymmetryError::NoCandidates);
    }
    if species.len() != positions.len() {
        return Err(SymmetryError::LengthMismatch { species: species.len(), positions: positions.len() });
    }
    if positions.is_empty() {
        return Err(SymmetryError::TooFewPoints(0));
    }
    let trivial = match normalize(positions, center) {
        Ok(_) => positions.len() == 1,
        Err(SymmetryError::Degenerate) => true,
        Err(e) => return Err(e),
    };
    if trivial {
        // A point (or coincident points) is invariant under everything.
        let c = center.unwrap_or(positions[0]);
        let best = candidates.iter().max_by_key(|g| g.order()).expect("non-empty");
        let scores = candidates
            .iter()
            .map(|g| CandidateScore { group: g.name.clone(), order: g.order(), s_prime: 0.0, axes: rows(&g.frame) })
            .collect();
        let result = CsmResult {
            group: best.name.clone(),
            s_prime: 0.0,
            per_op_max_displacement: vec![0.0; best.order()],
            symmetric_points: vec![Vec3::zeros(); positions.len()],
            permutations: vec![(0..positions.len()).collect(); best.order()],
            center: c,
            scale: 1.0,
        };
        return Ok(Detection { group: best.name.clone(), axes: rows(&best.frame), result, scores });
    }
    let (pts, c, scale) = normalize(positions, center)?;
    let prep = Prepared { blocks: species_blocks(species), pts };
    let dirs = candidate_directions(&prep);

    let mut scores = Vec::with_capacity(candidates.len());
    let mut oriented = Vec::with_capacity(candidates.len());
    for g in candidates {
        let (a, s) = best_frame(&prep, g, &dirs, opts)?;
        let og = g.in_frame(a)?;
        scores.push(CandidateScore { group: g.name.clone(), order: g.order(), s_prime: s, axes: rows(&a) });
        oriented.push(og);
    }
    let pick = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| s.s_prime <= opts.threshold)
        .max_by(|(i, a), (j, b)| a.order.cmp(&b.order).then(b.s_prime.total_cmp(&a.s_prime)).then(j.cmp(i)))
        .map(|(i, _)| i);
    let k = match pick {
        Some(k) => k,
        None => (0..scores.len()).min_by(|&i, &j| scores[i].s_prime.total_cmp(&scores[j].s_prime)).expect("non-empty"),
    };
    let g = &oriented[k];
    let (_, perms) = prep.full(g);
    let (s, sym, maxd) = measure(&prep.pts, g, &perms);
    let result = CsmResult {
        group: g.name.clone(),
        s_prime: s,
        per_op_max_displacement: maxd,
        symmetric_points: sym,
        permutations: perms,
        center: c,
        scale,
    };
    Ok(Detection { group: g.name.clone(), axes: scores[k].axes, result, scores })
}
