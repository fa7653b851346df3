use super::grid::{component, interpolate_cubic, interpolate_linear, Grid, GridDomain, EXTERIOR, INTERIOR};
use super::GreenError;
use crate::geometry::RealPoly;
use rayon::prelude::*;
use std::collections::HashMap;

/// Smallest admissible cut fraction.
pub const THETA_MIN: f64 = 1e-6;
/// Relative residual target for conjugate gradients.
pub const REL_TOL: f64 = 1e-9;
/// Exterior layers filled by extrapolation.
pub const BAND: u8 = 6;
const NONE: u32 = u32::MAX;
const CHUNK: usize = 8192;

/// Nonnegative zeroth-order coefficient `c` of `Δg + cg = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum CField {
    Zero,
    Constant(f64),
    Poly(RealPoly),
}

impl CField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            CField::Zero => 0.0,
            CField::Constant(c) => *c,
            CField::Poly(p) => p.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CField::Zero) || matches!(self, CField::Constant(c) if *c == 0.0)
    }
}

/// Fundamental solution: `‖x − p‖^{2−2n}` for `n ≥ 2`, `−log‖x − p‖` for `n = 1`.
pub fn q0(n: usize, x: &[f64], pole: &[f64]) -> f64 {
    let r2: f64 = x.iter().zip(pole).map(|(a, b)| (a - b).powi(2)).sum();
    if n == 1 {
        -0.5 * r2.ln()
    } else {
        r2.powi(1 - n as i32)
    }
}

pub fn grad_q0(n: usize, x: &[f64], pole: &[f64]) -> Vec<f64> {
    let r2: f64 = x.iter().zip(pole).map(|(a, b)| (a - b).powi(2)).sum();
    let f = if n == 1 { -1.0 / r2 } else { (2.0 - 2.0 * n as f64) * r2.powi(-(n as i32)) };
    x.iter().zip(pole).map(|(a, b)| f * (a - b)).collect()
}

struct Cut {
    row: u32,
    dir: u8,
    theta: f64,
}

/// Discrete operator `2h²(½(−Δ_ℝ) + c)` on one domain, reusable across poles.
pub struct GreenSystem {
    pub grid: Grid,
    pub n: usize,
    pub nodes_per_axis: usize,
    mask: Vec<u8>,
    index: Vec<u32>,
    nodes: Vec<u32>,
    nbr: Vec<u32>,
    diag: Vec<f64>,
    c: Vec<f64>,
    cuts: Vec<Cut>,
    c_spec: CField,
}

/// Regular part `u = g − Q₀` of the c-Green function on the grid.
#[derive(Clone, Debug)]
pub struct GreenField {
    pub grid: Grid,
    pub n: usize,
    pub pole: Vec<f64>,
    /// `u` on the component and `BAND` extrapolated layers; NaN elsewhere.
    pub u: Vec<f64>,
    /// 1 on the component, `1 + k` on extrapolation layer `k`, 0 elsewhere.
    pub layer: Vec<u8>,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Minimum of `g = Q₀ + u` over interior nodes.
    pub min_g: f64,
    pub c: CField,
}

fn bisect(f: &dyn Fn(&[f64]) -> f64, a: &[f64], b: &[f64], tol: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x = a.to_vec();
    let len: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    while (hi - lo) * len > tol {
        let mid = 0.5 * (lo + hi);
        for k in 0..a.len() {
            x[k] = a[k] + mid * (b[k] - a[k]);
        }
        if f(&x) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

impl GreenSystem {
    pub fn assemble(domain: &GridDomain, c: &CField) -> Result<Self, GreenError> {
        domain.validate()?;
        let grid = domain.grid();
        let d = grid.dim;
        let psi = domain.psi.slice(domain.t);
        let mask = component(&grid, &*psi, &domain.pole)?;
        let mut index = vec![NONE; grid.len()];
        let mut nodes = Vec::new();
        for (id, &m) in mask.iter().enumerate() {
            if m == INTERIOR {
                index[id] = nodes.len() as u32;
                nodes.push(id as u32);
            }
        }
        let tol = 1e-10 * grid.h;
        let rows: Vec<(Vec<u32>, f64, f64, Vec<(u8, f64)>)> = nodes
            .par_iter()
            .map(|&id| {
                let id = id as usize;
                let x = grid.point(id);
                let mut nb = vec![NONE; 2 * d];
                let mut diag = 0.0;
                let mut cuts = Vec::new();
                for dir in 0..2 * d {
                    match grid.neighbor(id, dir) {
                        Some(j) if mask[j] == INTERIOR => {
                            nb[dir] = index[j];
                            diag += 1.0;
                        }
                        _ => {
                            let mut y = x.clone();
                            y[dir / 2] += if dir % 2 == 0 { grid.h } else { -grid.h };
                            let th = if psi(&y) >= 0.0 { bisect(&*psi, &x, &y, tol) } else { 1.0 };
                            let th = th.clamp(THETA_MIN, 1.0);
                            diag += 1.0 / th;
                            cuts.push((dir as u8, th));
                        }
                    }
                }
                let cv = c.eval(&x);
                (nb, diag, cv, cuts)
            })
            .collect();
        let mut nbr = Vec::with_capacity(nodes.len() * 2 * d);
        let mut diag = Vec::with_capacity(nodes.len());
        let mut cvals = Vec::with_capacity(nodes.len());
        let mut cuts = Vec::new();
        for (row, (nb, dg, cv, cs)) in rows.into_iter().enumerate() {
            if !(cv >= 0.0) {
                return Err(GreenError::NegativeC);
            }
            nbr.extend(nb);
            diag.push(dg);
            cvals.push(2.0 * grid.h * grid.h * cv);
            cuts.extend(cs.into_iter().map(|(dir, theta)| Cut { row: row as u32, dir, theta }));
        }
        Ok(GreenSystem {
            grid,
            n: domain.n,
            nodes_per_axis: domain.nodes_per_axis,
            mask,
            index,
            nodes,
            nbr,
            diag,
            c: cvals,
            cuts,
            c_spec: c.clone(),
        })
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn mask(&self) -> &[u8] {
        &self.mask
    }

    /// Unknown vector of a field solved on this system, for warm starts.
    pub fn restrict(&self, field: &GreenField) -> Vec<f64> {
        self.nodes.iter().map(|&id| field.u[id as usize]).collect()
    }

    /// Distance from `x` to the nearest cut point.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.cuts
            .iter()
            .map(|c| {
                self.cut_point(c).iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    fn cut_point(&self, cut: &Cut) -> Vec<f64> {
        let mut x = self.grid.point(self.nodes[cut.row as usize] as usize);
        let s = if cut.dir % 2 == 0 { 1.0 } else { -1.0 };
        x[cut.dir as usize / 2] += s * cut.theta * self.grid.h;
        x
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d2 = 2 * self.grid.dim;
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, ys)| {
            for (k, yi) in ys.iter_mut().enumerate() {
                let i = ci * CHUNK + k;
                let mut acc = (self.diag[i] + self.c[i]) * x[i];
                for &j in &self.nbr[i * d2..(i + 1) * d2] {
                    if j != NONE {
                        acc -= x[j as usize];
                    }
                }
                *yi = acc;
            }
        });
    }

    /// Checks that the `±3`-cell cube around the pole lies in the component.
    fn check_pole(&self, pole: &[f64]) -> Result<(), GreenError> {
        let g = &self.grid;
        let c = g.coords(pole);
        let d = g.dim;
        let base: Vec<i64> = c.iter().map(|v| v.floor() as i64).collect();
        for k in 0..8usize.pow(d as u32) {
            let mut r = k;
            let mut m = Vec::with_capacity(d);
            for a in 0..d {
                let v = base[a] - 3 + (r % 8) as i64;
                r /= 8;
                if v < 0 || v >= g.counts[a] as i64 {
                    return Err(GreenError::PoleTooCloseToBoundary);
                }
                m.push(v as usize);
            }
            if self.mask[g.id(&m)] != INTERIOR {
                return Err(GreenError::PoleTooCloseToBoundary);
            }
        }
        Ok(())
    }

    fn rhs(&self, pole: &[f64]) -> Vec<f64> {
        let n = self.n;
        let g = &self.grid;
        let mut b: Vec<f64> = if self.c_spec.is_zero() {
            vec![0.0; self.nodes.len()]
        } else {
            self.nodes
                .par_iter()
                .enumerate()
                .map(|(i, &id)| {
                    if self.c[i] == 0.0 {
                        return 0.0;
                    }
                    let x = g.point(id as usize);
                    let mut q = q0(n, &x, pole);
                    if !q.is_finite() {
                        // Cell average of the integrable singularity.
                        let d = g.dim;
                        q = (0..1usize << d)
                            .map(|s| {
                                let y: Vec<f64> = (0..d)
                                    .map(|a| x[a] + if s >> a & 1 == 1 { 0.25 } else { -0.25 } * g.h)
                                    .collect();
                                q0(n, &y, pole)
                            })
                            .sum::<f64>()
                            / (1usize << d) as f64;
                    }
                    -self.c[i] * q
                })
                .collect()
        };
        for cut in &self.cuts {
            b[cut.row as usize] -= q0(n, &self.cut_point(cut), pole) / cut.theta;
        }
        b
    }

    /// Solves for the pole; `warm` is a previous solution on this system.
    pub fn solve(&self, pole: &[f64], warm: Option<&[f64]>) -> Result<GreenField, GreenError> {
        if pole.len() != self.grid.dim {
            return Err(GreenError::Invalid("pole dimension".into()));
        }
        self.check_pole(pole)?;
        let b = self.rhs(pole);
        let (x, residual, iterations) = self.pcg(&b, warm)?;
        self.field(pole, x, residual, iterations)
    }

    fn pcg(&self, b: &[f64], warm: Option<&[f64]>) -> Result<(Vec<f64>, f64, usize), GreenError> {
        let m = self.nodes.len();
        let dinv: Vec<f64> = self.diag.iter().zip(&self.c).map(|(d, c)| 1.0 / (d + c)).collect();
        let mut x = match warm {
            Some(w) if w.len() == m => w.to_vec(),
            _ => vec![0.0; m],
        };
        let mut ax = vec![0.0; m];
        self.apply(&x, &mut ax);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let bnorm = dot(b, b).sqrt();
        if bnorm == 0.0 {
            return Ok((vec![0.0; m], 0.0, 0));
        }
        let cap = (50.0 * (self.grid.dim as f64).sqrt() * self.nodes_per_axis as f64) as usize;
        let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(a, d)| a * d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; m];
        let mut it = 0;
        let mut rnorm = dot(&r, &r).sqrt();
        while rnorm > REL_TOL * bnorm {
            if it >= cap {
                return Err(GreenError::NonconvergentSolver { iterations: it, residual: rnorm / bnorm });
            }
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.par_iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
            z.par_iter_mut().zip(&r).zip(&dinv).for_each(|((zi, ri), di)| *zi = ri * di);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
            rnorm = dot(&r, &r).sqrt();
            it += 1;
        }
        // True residual, not the recurrence.
        self.apply(&x, &mut ax);
        let res = b.iter().zip(&ax).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt() / bnorm;
        Ok((x, res, it))
    }

    fn field(&self, pole: &[f64], x: Vec<f64>, residual: f64, iterations: usize) -> Result<GreenField, GreenError> {
        let g = &self.grid;
        let n = self.n;
        let mut u = vec![f64::NAN; g.len()];
        let mut layer = vec![0u8; g.len()];
        for (i, &id) in self.nodes.iter().enumerate() {
            u[id as usize] = x[i];
            layer[id as usize] = 1;
        }
        let min_g = self
            .nodes
            .par_iter()
            .enumerate()
            .map(|(i, &id)| {
                let v = q0(n, &g.point(id as usize), pole) + x[i];
                if v.is_nan() { f64::INFINITY } else { v }
            })
            .reduce(|| f64::INFINITY, f64::min);
        self.extend(pole, &mut u, &mut layer);
        let lambda = interpolate_cubic(g, &u, pole).ok_or(GreenError::PoleTooCloseToBoundary)?;
        Ok(GreenField {
            grid: g.clone(),
            n,
            pole: pole.to_vec(),
            u,
            layer,
            lambda,
            residual,
            iterations,
            min_g,
            c: self.c_spec.clone(),
        })
    }

    /// Fills `BAND` exterior layers by polynomial extrapolation along grid
    /// lines, using `u = −Q₀` at the cut points.
    fn extend(&self, pole: &[f64], u: &mut [f64], layer: &mut [u8]) {
        let g = &self.grid;
        let d = g.dim;
        let cut_at: HashMap<(u32, u8), f64> = self.cuts.iter().map(|c| ((c.row, c.dir), c.theta)).collect();
        let mut frontier: Vec<usize> = self.nodes.iter().map(|&i| i as usize).collect();
        for l in 1..=BAND {
            let mut cand: Vec<usize> = frontier
                .iter()
                .flat_map(|&id| (0..2 * d).filter_map(move |dir| g.neighbor(id, dir)))
                .filter(|&j| layer[j] == 0)
                .collect();
            cand.sort_unstable();
            cand.dedup();
            let vals: Vec<(usize, f64)> = cand
                .par_iter()
                .filter_map(|&j| {
                    let mut acc = 0.0;
                    let mut cnt = 0;
                    for dir in 0..2 * d {
                        // `dir` points from j toward the known side.
                        let Some(p1) = g.neighbor(j, dir) else { continue };
                        if layer[p1] == 0 || layer[p1] > l {
                            continue;
                        }
                        let back = (dir ^ 1) as u8;
                        let p2 = g.neighbor(p1, dir).filter(|&k| layer[k] != 0 && layer[k] <= l);
                        let p3 = p2.and_then(|k| g.neighbor(k, dir)).filter(|&k| layer[k] != 0 && layer[k] <= l);
                        let est = if layer[p1] == 1 {
                            let th = self.index[p1] != NONE && self.mask[j] == EXTERIOR;
                            let theta = if th { cut_at.get(&(self.index[p1], back)).copied() } else { None };
                            match theta {
                                Some(theta) => {
                                    let mut xg = g.point(p1);
                                    xg[dir / 2] += if back % 2 == 0 { theta * g.h } else { -theta * g.h };
                                    let ug = -q0(self.n, &xg, pole);
                                    // Nodes on the line at offsets 0, −1, −2 from p1.
                                    let pts: Vec<(f64, f64)> = [(0.0, Some(p1)), (-1.0, p2), (-2.0, p3)]
                                        .into_iter()
                                        .filter(|&(s, _)| theta - s >= 0.5)
                                        .filter_map(|(s, k)| k.filter(|&k| layer[k] == 1).map(|k| (s, u[k])))
                                        .take(2)
                                        .collect();
                                    lagrange_at(1.0, &[&[(theta, ug)], &pts[..]].concat())
                                }
                                None => extrap(u, Some(p1), p2, p3),
                            }
                        } else {
                            extrap(u, Some(p1), p2, p3)
                        };
                        if let Some(e) = est {
                            acc += e;
                            cnt += 1;
                        }
                    }
                    (cnt > 0).then(|| (j, acc / cnt as f64))
                })
                .collect();
            frontier.clear();
            for (j, v) in vals {
                u[j] = v;
                layer[j] = l + 1;
                frontier.push(j);
            }
        }
    }
}

fn extrap(u: &[f64], p1: Option<usize>, p2: Option<usize>, p3: Option<usize>) -> Option<f64> {
    match (p1, p2, p3) {
        (Some(a), Some(b), Some(c)) => Some(3.0 * u[a] - 3.0 * u[b] + u[c]),
        (Some(a), Some(b), None) => Some(2.0 * u[a] - u[b]),
        (Some(a), None, _) => Some(u[a]),
        _ => None,
    }
}

/// Lagrange interpolant through `pts` evaluated at `s`.
fn lagrange_at(s: f64, pts: &[(f64, f64)]) -> Option<f64> {
    if pts.is_empty() {
        return None;
    }
    let mut acc = 0.0;
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        let mut w = 1.0;
        for (k, &(xk, _)) in pts.iter().enumerate() {
            if k != i {
                w *= (s - xk) / (xi - xk);
            }
        }
        acc += w * yi;
    }
    Some(acc)
}

impl GreenField {
    pub fn q0(&self, x: &[f64]) -> f64 {
        q0(self.n, x, &self.pole)
    }

    /// Regular part at an arbitrary point (cubic where the stencil is
    /// available, multilinear otherwise).
    pub fn u_at(&self, x: &[f64]) -> Option<f64> {
        interpolate_cubic(&self.grid, &self.u, x).or_else(|| interpolate_linear(&self.grid, &self.u, x))
    }

    pub fn g_at(&self, x: &[f64]) -> Option<f64> {
        Some(self.q0(x) + self.u_at(x)?)
    }

    /// Central-difference gradient of `u` at a node.
    pub fn grad_u_node(&self, id: usize) -> Option<Vec<f64>> {
        let g = &self.grid;
        (0..g.dim)
            .map(|k| {
                let a = g.neighbor(id, 2 * k)?;
                let b = g.neighbor(id, 2 * k + 1)?;
                let v = (self.u[a] - self.u[b]) / (2.0 * g.h);
                v.is_finite().then_some(v)
            })
            .collect()
    }

    /// Gradient of `g`: interpolated nodal gradients of `u` plus `∇Q₀`.
    pub fn grad_g(&self, x: &[f64]) -> Option<Vec<f64>> {
        let g = &self.grid;
        let d = g.dim;
        let c = g.coords(x);
        let mut base = Vec::with_capacity(d);
        let mut frac = Vec::with_capacity(d);
        for (k, &v) in c.iter().enumerate() {
            let b = v.floor();
            if b < 1.0 || b as usize + 2 >= g.counts[k] {
                return None;
            }
            base.push(b as usize);
            frac.push(v - b);
        }
        let mut acc = grad_q0(self.n, x, &self.pole);
        for corner in 0..1usize << d {
            let mut id = 0;
            let mut wt = 1.0;
            for a in 0..d {
                let bit = corner >> a & 1;
                id += (base[a] + bit) * g.stride(a);
                wt *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if wt == 0.0 {
                continue;
            }
            let gu = self.grad_u_node(id)?;
            for k in 0..d {
                acc[k] += wt * gu[k];
            }
        }
        Some(acc)
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.layer[id] == 1
    }
}

/// Assembles and solves in one step.
pub fn solve_green(domain: &GridDomain, c: &CField) -> Result<GreenField, GreenError> {
    GreenSystem::assemble(domain, c)?.solve(&domain.pole, None)
}

#[cfg(test)]
mod extension_tests {
    use super::*;
    use crate::geometry::PolyFamily;
    use num_complex::Complex64 as C64;
    use std::sync::Arc;

    #[test]
    fn band_covers_the_boundary() {
        let psi = Arc::new(PolyFamily::static_ball(2, &[C64::from(0.0); 2], 1.0));
        let d = GridDomain::new(psi, C64::from(0.0), 16, vec![0.0; 4]);
        let f = solve_green(&d, &CField::Zero).unwrap();
        for id in 0..f.grid.len() {
            let x = f.grid.point(id);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (r - 1.0).abs() < 0.5 * f.grid.h {
                assert!(f.grad_g(&x).is_some(), "no gradient at {x:?}");
            }
        }
        // g vanishes on the sphere and |∇g| = 2 there (image-charge formula).
        let x = [0.6, 0.0, 0.0, 0.8];
        assert!(f.g_at(&x).unwrap().abs() < 0.05, "{:?}", f.g_at(&x));
        let g = f.grad_g(&x).unwrap();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 2.0).abs() < 0.2, "{norm}");
    }
}
