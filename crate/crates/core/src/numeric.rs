//! Small numerical kernels shared across modules: reproducible summation
//! and a dense rectangular-free assignment solver.

use rayon::prelude::*;

/// Fixed block length for chunked reductions. Partial sums are always formed
/// over the same index ranges, so the result does not depend on how many
/// worker threads rayon happens to use.
pub const REDUCE_CHUNK: usize = 4096;

/// Pairwise (cascade) summation in a fixed tree order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `f(i)` for `i in 0..n`, evaluated in parallel but reduced in a
/// fixed order: `REDUCE_CHUNK`-sized blocks are summed pairwise, then the
/// block partials are summed pairwise. Bit-identical for any thread count.
pub fn det_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let nchunks = n.div_ceil(REDUCE_CHUNK);
    let partials: Vec<f64> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(n);
            let block: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&block)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Vector-valued variant of [`det_sum`] for `K` simultaneous accumulators.
pub fn det_sum_n<const K: usize, F>(n: usize, f: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let nchunks = n.div_ceil(REDUCE_CHUNK);
    let partials: Vec<[f64; K]> = (0..nchunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(n);
            let block: Vec<[f64; K]> = (lo..hi).map(&f).collect();
            let mut out = [0.0; K];
            let mut col = Vec::with_capacity(block.len());
            for (k, o) in out.iter_mut().enumerate() {
                col.clear();
                col.extend(block.iter().map(|v| v[k]));
                *o = pairwise_sum(&col);
            }
            out
        })
        .collect();
    let mut out = [0.0; K];
    let mut col = Vec::with_capacity(partials.len());
    for (k, o) in out.iter_mut().enumerate() {
        col.clear();
        col.extend(partials.iter().map(|v| v[k]));
        *o = pairwise_sum(&col);
    }
    out
}

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// method with potentials, O(n³)). Returns `perm` with row `i` assigned to
/// column `perm[i]`, together with the total cost.
///
/// `cost` is row-major, `n × n`.
pub fn hungarian(n: usize, cost: &[f64]) -> (Vec<usize>, f64) {
    assert_eq!(cost.len(), n * n, "cost matrix must be n×n");
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based arrays, column 0 is the virtual start.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    let total = perm.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    (perm, total)
}
