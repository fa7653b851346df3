use super::GreenError;
use crate::geometry::DefiningFunction;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::collections::VecDeque;
use std::sync::Arc;

/// Extra node layers outside the requested box.
pub const PAD: usize = 4;

/// Uniform grid on a box in ℝ^d with spacing `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub counts: Vec<usize>,
    pub origin: Vec<f64>,
    pub h: f64,
    strides: Vec<usize>,
}

impl Grid {
    /// `nodes_per_axis` nodes across the longest side of `[lo, hi]`, plus `PAD`
    /// layers on every side.
    pub fn covering(lo: &[f64], hi: &[f64], nodes_per_axis: usize) -> Self {
        let dim = lo.len();
        let ext = lo.iter().zip(hi).map(|(a, b)| b - a).fold(0.0f64, f64::max);
        let h = ext / (nodes_per_axis - 1) as f64;
        let counts: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| ((b - a) / h - 1e-9).ceil() as usize + 1 + 2 * PAD)
            .collect();
        let origin = lo.iter().map(|a| a - PAD as f64 * h).collect();
        let mut strides = vec![1; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * counts[k + 1];
        }
        Grid { dim, counts, origin, h, strides }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn multi(&self, mut id: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim];
        for k in 0..self.dim {
            m[k] = id / self.strides[k];
            id %= self.strides[k];
        }
        m
    }

    pub fn id(&self, m: &[usize]) -> usize {
        m.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn point(&self, id: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.point_into(id, &mut x);
        x
    }

    pub fn point_into(&self, mut id: usize, x: &mut [f64]) {
        for k in 0..self.dim {
            let i = id / self.strides[k];
            id %= self.strides[k];
            x[k] = self.origin[k] + i as f64 * self.h;
        }
    }

    /// Neighbour across `dir`: axis `dir / 2`, sign `+` when `dir` is even.
    pub fn neighbor(&self, id: usize, dir: usize) -> Option<usize> {
        let k = dir / 2;
        let i = (id / self.strides[k]) % self.counts[k];
        if dir % 2 == 0 {
            (i + 1 < self.counts[k]).then(|| id + self.strides[k])
        } else {
            (i > 0).then(|| id - self.strides[k])
        }
    }

    /// Fractional grid coordinates of `x`.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.origin).map(|(v, o)| (v - o) / self.h).collect()
    }
}

/// Bounded domain `{ψ(t, ·) < 0}` on a grid, with a pole.
#[derive(Clone)]
pub struct GridDomain {
    pub n: usize,
    pub psi: Arc<dyn DefiningFunction>,
    pub t: C64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub nodes_per_axis: usize,
    pub pole: Vec<f64>,
}

impl GridDomain {
    /// Box taken from the defining function's bounds at `t`.
    pub fn new(psi: Arc<dyn DefiningFunction>, t: C64, nodes_per_axis: usize, pole: Vec<f64>) -> Self {
        let (lo, hi) = psi.bounds(t);
        GridDomain { n: psi.n(), psi, t, lo, hi, nodes_per_axis, pole }
    }

    pub fn with_box(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn grid(&self) -> Grid {
        Grid::covering(&self.lo, &self.hi, self.nodes_per_axis)
    }

    pub fn validate(&self) -> Result<(), GreenError> {
        let d = 2 * self.n;
        if !(1..=2).contains(&self.n) {
            return Err(GreenError::Invalid(format!("numeric solver supports n = 1, 2 (got {})", self.n)));
        }
        if self.lo.len() != d || self.hi.len() != d || self.pole.len() != d {
            return Err(GreenError::Invalid("box and pole need 2n real coordinates".into()));
        }
        if self.nodes_per_axis < 8 {
            return Err(GreenError::Invalid("need at least 8 nodes per axis".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| !(a < b)) {
            return Err(GreenError::Invalid("empty box".into()));
        }
        Ok(())
    }
}

/// Node classes.
pub const EXTERIOR: u8 = 0;
pub const INTERIOR: u8 = 1;

/// Connected component of `{ψ < 0}` containing the pole, as a node mask.
pub(crate) fn component(
    grid: &Grid,
    psi: &(dyn Fn(&[f64]) -> f64 + Send + Sync),
    pole: &[f64],
) -> Result<Vec<u8>, GreenError> {
    let inside: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .with_min_len(4096)
        .map_init(|| vec![0.0; grid.dim], |x, id| {
            grid.point_into(id, x);
            psi(x) < 0.0
        })
        .collect();
    let c = grid.coords(pole);
    let near: Vec<usize> = c.iter().map(|v| v.round().max(0.0) as usize).collect();
    if near.iter().zip(&grid.counts).any(|(a, n)| a >= n) {
        return Err(GreenError::PoleTooCloseToBoundary);
    }
    let start = grid.id(&near);
    if !inside[start] {
        return Err(GreenError::PoleTooCloseToBoundary);
    }
    let mut mask = vec![EXTERIOR; grid.len()];
    mask[start] = INTERIOR;
    let mut q = VecDeque::from([start]);
    while let Some(id) = q.pop_front() {
        for dir in 0..2 * grid.dim {
            if let Some(nb) = grid.neighbor(id, dir) {
                if inside[nb] && mask[nb] == EXTERIOR {
                    mask[nb] = INTERIOR;
                    q.push_back(nb);
                }
            }
        }
    }
    Ok(mask)
}

/// Lower corner of the `4^d` interpolation stencil around `x`, if it fits.
pub(crate) fn stencil_base(grid: &Grid, x: &[f64]) -> Option<Vec<usize>> {
    grid.coords(x)
        .iter()
        .zip(&grid.counts)
        .map(|(&c, &n)| {
            let b = c.floor() as i64 - 1;
            (b >= 0 && (b + 3) < n as i64).then_some(b as usize)
        })
        .collect()
}

/// Cubic Lagrange weights at fractional offset `s ∈ [0, 1)` from node 1 of
/// nodes `{0, 1, 2, 3}`.
pub(crate) fn cubic_weights(s: f64) -> [f64; 4] {
    let x = s + 1.0;
    [
        -(x - 1.0) * (x - 2.0) * (x - 3.0) / 6.0,
        x * (x - 2.0) * (x - 3.0) / 2.0,
        -x * (x - 1.0) * (x - 3.0) / 2.0,
        x * (x - 1.0) * (x - 2.0) / 6.0,
    ]
}

/// Tensor cubic interpolation of a node field; `None` if any stencil value
/// is missing.
pub(crate) fn interpolate_cubic(grid: &Grid, field: &[f64], x: &[f64]) -> Option<f64> {
    let base = stencil_base(grid, x)?;
    let c = grid.coords(x);
    let w: Vec<[f64; 4]> = c.iter().zip(&base).map(|(&v, &b)| cubic_weights(v - (b + 1) as f64)).collect();
    let d = grid.dim;
    let mut acc = 0.0;
    for k in 0..4usize.pow(d as u32) {
        let mut id = 0;
        let mut wt = 1.0;
        let mut r = k;
        for a in 0..d {
            let o = r % 4;
            r /= 4;
            id += (base[a] + o) * grid.stride(a);
            wt *= w[a][o];
        }
        let v = field[id];
        if !v.is_finite() {
            return None;
        }
        acc += wt * v;
    }
    Some(acc)
}

/// Multilinear interpolation; `None` if a corner value is missing.
pub(crate) fn interpolate_linear(grid: &Grid, field: &[f64], x: &[f64]) -> Option<f64> {
    let c = grid.coords(x);
    let d = grid.dim;
    let mut base = Vec::with_capacity(d);
    let mut frac = Vec::with_capacity(d);
    for (k, &v) in c.iter().enumerate() {
        let b = v.floor();
        if b < 0.0 || b as usize + 1 >= grid.counts[k] {
            return None;
        }
        base.push(b as usize);
        frac.push(v - b);
    }
    let mut acc = 0.0;
    for corner in 0..1usize << d {
        let mut id = 0;
        let mut wt = 1.0;
        for a in 0..d {
            let bit = corner >> a & 1;
            id += (base[a] + bit) * grid.stride(a);
            wt *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
        }
        if wt == 0.0 {
            continue;
        }
        let v = field[id];
        if !v.is_finite() {
            return None;
        }
        acc += wt * v;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let g = Grid::covering(&[-1.0, -1.0, -1.0], &[1.0, 2.0, 1.0], 11);
        assert_eq!(g.counts, vec![8 + 2 * PAD, 11 + 2 * PAD, 8 + 2 * PAD]);
        let id = g.id(&[3, 7, 2]);
        assert_eq!(g.multi(id), vec![3, 7, 2]);
        assert_eq!(g.neighbor(id, 2), Some(g.id(&[3, 8, 2])));
        assert_eq!(g.neighbor(g.id(&[0, 0, 0]), 1), None);
    }

    #[test]
    fn cubic_is_exact_on_cubics() {
        let g = Grid::covering(&[0.0, 0.0], &[1.0, 1.0], 11);
        let f = |x: &[f64]| x[0].powi(3) - 2.0 * x[0] * x[1] * x[1] + x[1];
        let field: Vec<f64> = (0..g.len()).map(|i| f(&g.point(i))).collect();
        let p = [0.437, 0.271];
        assert!((interpolate_cubic(&g, &field, &p).unwrap() - f(&p)).abs() < 1e-12);
        let lin: Vec<f64> = (0..g.len()).map(|i| {
            let x = g.point(i);
            2.0 * x[0] - x[1]
        }).collect();
        assert!((interpolate_linear(&g, &lin, &p).unwrap() - (2.0 * p[0] - p[1])).abs() < 1e-12);
    }
}
