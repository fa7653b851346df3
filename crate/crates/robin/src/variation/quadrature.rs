//! Volume and level-set quadrature on a uniform grid.

use crate::green::Grid;
use rayon::prelude::*;

/// Samples per axis used for cell fractions near the boundary.
pub const FRACTION_SAMPLES: usize = 4;

/// `ψ` at every node.
pub fn node_values(grid: &Grid, psi: &(dyn Fn(&[f64]) -> f64 + Send + Sync)) -> Vec<f64> {
    (0..grid.len())
        .into_par_iter()
        .with_min_len(4096)
        .map_init(|| vec![0.0; grid.dim], |x, id| {
            grid.point_into(id, x);
            psi(x)
        })
        .collect()
}

/// Fraction of each node's dual cell `x ± h/2` inside `{ψ < 0}`. Corners
/// of cells with a sign change are subsampled; other nodes get 0 or 1.
pub fn cell_fractions(grid: &Grid, values: &[f64], psi: &(dyn Fn(&[f64]) -> f64 + Send + Sync)) -> Vec<f64> {
    let d = grid.dim;
    let mut mixed = vec![false; grid.len()];
    for id in sign_change_cells(grid, values) {
        for c in 0..1usize << d {
            mixed[corner_id(grid, id, c)] = true;
        }
    }
    let m = FRACTION_SAMPLES;
    let total = m.pow(d as u32);
    (0..grid.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|id| {
            if !mixed[id] {
                return if values[id] < 0.0 { 1.0 } else { 0.0 };
            }
            let x = grid.point(id);
            let mut y = x.clone();
            let mut count = 0;
            for k in 0..total {
                let mut r = k;
                for a in 0..d {
                    let s = ((r % m) as f64 + 0.5) / m as f64 - 0.5;
                    r /= m;
                    y[a] = x[a] + s * grid.h;
                }
                if psi(&y) < 0.0 {
                    count += 1;
                }
            }
            count as f64 / total as f64
        })
        .collect()
}

fn corner_id(grid: &Grid, id: usize, mask: usize) -> usize {
    (0..grid.dim).filter(|a| mask >> a & 1 == 1).map(|a| grid.stride(a)).sum::<usize>() + id
}

/// Lower corners of cells whose corner values change sign.
fn sign_change_cells(grid: &Grid, values: &[f64]) -> Vec<usize> {
    let d = grid.dim;
    (0..grid.len())
        .into_par_iter()
        .with_min_len(4096)
        .filter(|&id| {
            let m = grid.multi(id);
            if m.iter().zip(&grid.counts).any(|(a, n)| a + 1 >= *n) {
                return false;
            }
            let (mut neg, mut pos) = (false, false);
            for c in 0..1usize << d {
                let v = values[corner_id(grid, id, c)];
                neg |= v < 0.0;
                pos |= v > 0.0;
            }
            neg && pos
        })
        .collect()
}

/// Normalized B-spline of degree `len − 2` on sorted knots, at `x`
/// (Cox–de Boor, `0/0 = 0`).
fn bspline(knots: &[f64], x: f64) -> f64 {
    let k = knots.len();
    let mut n: Vec<f64> = (0..k - 1)
        .map(|i| if knots[i] <= x && x < knots[i + 1] { 1.0 } else { 0.0 })
        .collect();
    for p in 1..k - 1 {
        for i in 0..k - 1 - p {
            let a = knots[i + p] - knots[i];
            let b = knots[i + p + 1] - knots[i + 1];
            let left = if a > 0.0 { (x - knots[i]) / a * n[i] } else { 0.0 };
            let right = if b > 0.0 { (knots[i + p + 1] - x) / b * n[i + 1] } else { 0.0 };
            n[i] = left + right;
        }
    }
    n[0]
}

/// Area of `{ψ_lin = 0}` for the linear interpolant of corner values on a
/// simplex of volume `vol` with gradient norm `grad`.
pub fn simplex_zero_area(values: &[f64], vol: f64, grad: f64) -> f64 {
    let d = values.len() - 1;
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let span = s[d] - s[0];
    if !(s[0] < 0.0 && s[d] > 0.0) || span <= 0.0 {
        return 0.0;
    }
    vol * grad * d as f64 * bspline(&s, 0.0) / span
}

/// A grid cell crossed by `{ψ = 0}`: lower-corner node and zero-set area of
/// the piecewise-linear (Kuhn) interpolant.
#[derive(Clone, Copy, Debug)]
pub struct CutCell {
    pub id: usize,
    pub area: f64,
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for k in 0..d {
            let mut q = p.clone();
            q.insert(k, d - 1);
            out.push(q);
        }
    }
    out
}

/// Cells with a sign change among their corners, with Kuhn-simplex areas.
pub fn cut_cells(grid: &Grid, values: &[f64]) -> Vec<CutCell> {
    let d = grid.dim;
    let perms = permutations(d);
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let vol = grid.h.powi(d as i32) / fact;
    sign_change_cells(grid, values)
        .into_par_iter()
        .map(|id| {
            let mut area = 0.0;
            let mut vals = vec![0.0; d + 1];
            for p in &perms {
                let mut mask = 0;
                vals[0] = values[id];
                let mut g2 = 0.0;
                for (k, &a) in p.iter().enumerate() {
                    mask |= 1 << a;
                    vals[k + 1] = values[corner_id(grid, id, mask)];
                    g2 += ((vals[k + 1] - vals[k]) / grid.h).powi(2);
                }
                area += simplex_zero_area(&vals, vol, g2.sqrt());
            }
            CutCell { id, area }
        })
        .collect()
}

/// Cell centre of a cut cell.
pub fn cell_center(grid: &Grid, id: usize) -> Vec<f64> {
    grid.point(id).iter().map(|v| v + 0.5 * grid.h).collect()
}
