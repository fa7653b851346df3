//! First and second variation of the Robin constant along a family `D(t)`,
//! with both sides of each formula evaluated numerically (Euclidean metric).

pub mod quadrature;

use crate::geometry::{levi_k1, levi_k2, DefiningFunction, DimensionalConstants, Euclidean, GeometryError};
use crate::green::{CField, GreenError, GreenField, GreenSystem, Grid, GridDomain};
use num_complex::Complex64 as C64;
use quadrature::{cell_center, cell_fractions, cut_cells, node_values};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum VariationError {
    #[error("t-samples disagree on the mask near the pole; refine h_t")]
    GridMismatch,
    #[error("family is not pseudoconvex at a sampled boundary point (k2 = {0:e})")]
    NotPseudoconvex(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Family `D(t) = {ψ(t, ·) < 0}` over the disk `|t − center| < rho`, with a
/// fixed pole.
#[derive(Clone)]
pub struct DomainFamily {
    pub psi: Arc<dyn DefiningFunction>,
    pub center: C64,
    pub rho: f64,
    pub pole: Vec<f64>,
    pub c: CField,
}

impl DomainFamily {
    pub fn new(psi: Arc<dyn DefiningFunction>, rho: f64, pole: Vec<f64>) -> Self {
        DomainFamily { psi, center: C64::new(0.0, 0.0), rho, pole, c: CField::Zero }
    }

    pub fn n(&self) -> usize {
        self.psi.n()
    }

    /// Default t-step `0.05 ρ`.
    pub fn default_ht(&self) -> f64 {
        0.05 * self.rho
    }

    fn check_t(&self, t: C64) -> Result<(), VariationError> {
        if (t - self.center).norm() > self.rho * (1.0 + 1e-12) {
            return Err(VariationError::Invalid(format!("t = {t} outside the parameter disk")));
        }
        Ok(())
    }
}

/// Both sides of the first and second variation formulas at one `t₀`.
#[derive(Clone, Debug, Serialize)]
pub struct VariationReport {
    pub t0: [f64; 2],
    pub h_t: f64,
    pub nodes_per_axis: usize,
    /// `(Re t, Im t, λ)` at `t₀`, `t₀ ± h_t`, `t₀ ± i h_t`.
    pub lambda_samples: Vec<[f64; 3]>,
    /// `∂²λ/∂t∂t̄ = ¼(D²_{t₁} + D²_{t₂})λ`.
    pub lhs: f64,
    /// `−c_n ∫ k₂ ‖∇_z g‖² dS`.
    pub rhs_boundary: f64,
    /// `−4c_n ∫ Σ_a |∂²g/∂t∂z̄_a|² dV`.
    pub rhs_volume: f64,
    /// The same term as `−(c_n/2^{n−2}) ‖∂̄ ∂g/∂t‖²` with the form norm.
    pub rhs_volume_forms: f64,
    /// `−(c_n/2^{n−1}) ∫ c |∂g/∂t|² dV`.
    pub rhs_volume_c: f64,
    /// Torsion cross terms; zero for the Euclidean metric.
    pub rhs_cross: f64,
    pub rhs: f64,
    pub mismatch: f64,
    /// `∂λ/∂t = ½(D_{t₁} − i D_{t₂})λ`.
    pub first_var_lhs: [f64; 2],
    /// `−c_n ∫ k₁ ‖∇_z g‖² dS`.
    pub first_var_rhs: [f64; 2],
    pub first_var_mismatch: f64,
    /// `∫ |∂g/∂t|² dV`.
    pub dgdt_norm2: f64,
    pub boundary_area: f64,
    pub boundary_cells: usize,
    /// Volume weight dropped because `∂g/∂t` was unavailable.
    pub dropped_volume: f64,
    pub residual: f64,
}

/// `λ(t)` on a grid fitted to `D(t)`.
pub fn lambda_of_t(family: &DomainFamily, t: C64, nodes_per_axis: usize) -> Result<f64, VariationError> {
    family.check_t(t)?;
    let d = GridDomain::new(family.psi.clone(), t, nodes_per_axis, family.pole.clone());
    Ok(GreenSystem::assemble(&d, &family.c)?.solve(&family.pole, None)?.lambda)
}

/// `t₀`, then `t₀ ± h`, `t₀ ± ih`, `t₀ ± 2h`, `t₀ ± 2ih`.
fn stencil_ts(t0: C64, h: f64) -> [C64; 9] {
    let (re, im) = (C64::new(h, 0.0), C64::new(0.0, h));
    [t0, t0 + re, t0 - re, t0 + im, t0 - im, t0 + 2.0 * re, t0 - 2.0 * re, t0 + 2.0 * im, t0 - 2.0 * im]
}

/// 4th-order `∂/∂t = ½(∂_{t₁} − i∂_{t₂})` from values ordered as `stencil_ts`.
fn d_t(v: &[f64], h: f64) -> C64 {
    let d = |p: usize, m: usize, pp: usize, mm: usize| (8.0 * (v[p] - v[m]) - (v[pp] - v[mm])) / (12.0 * h);
    C64::new(0.5 * d(1, 2, 5, 6), -0.5 * d(3, 4, 7, 8))
}

/// 4th-order `∂²/∂t∂t̄ = ¼(∂²_{t₁} + ∂²_{t₂})` from values ordered as `stencil_ts`.
fn d_tt(v: &[f64], h: f64) -> f64 {
    let d2 = |p: usize, m: usize, pp: usize, mm: usize| {
        (16.0 * (v[p] + v[m]) - (v[pp] + v[mm]) - 30.0 * v[0]) / (12.0 * h * h)
    };
    0.25 * (d2(1, 2, 5, 6) + d2(3, 4, 7, 8))
}

/// Green fields at the nine stencil points on one shared grid.
fn stencil_fields(
    family: &DomainFamily,
    t0: C64,
    h_t: f64,
    nodes_per_axis: usize,
) -> Result<(Grid, Vec<GreenField>), VariationError> {
    if family.n() != 2 {
        return Err(VariationError::Invalid("variation formulas are evaluated for n = 2".into()));
    }
    if !(h_t > 0.0) {
        return Err(VariationError::Invalid("h_t must be positive".into()));
    }
    let ts = stencil_ts(t0, h_t);
    for &t in &ts {
        family.check_t(t)?;
    }
    let (mut lo, mut hi) = family.psi.bounds(t0);
    for &t in &ts[1..] {
        let (l, h) = family.psi.bounds(t);
        for k in 0..lo.len() {
            lo[k] = lo[k].min(l[k]);
            hi[k] = hi[k].max(h[k]);
        }
    }
    let mut fields = Vec::with_capacity(ts.len());
    for &t in &ts {
        let d = GridDomain::new(family.psi.clone(), t, nodes_per_axis, family.pole.clone())
            .with_box(lo.clone(), hi.clone());
        let sys = GreenSystem::assemble(&d, &family.c)?;
        fields.push(sys.solve(&family.pole, None)?);
    }
    let grid = fields[0].grid.clone();
    // Mask of the cubic pole stencil must not depend on t.
    let base: Vec<usize> = grid.coords(&family.pole).iter().map(|v| v.floor() as usize - 1).collect();
    for k in 0..4usize.pow(grid.dim as u32) {
        let mut r = k;
        let mut id = 0;
        for (a, b) in base.iter().enumerate() {
            id += (b + r % 4) * grid.stride(a);
            r /= 4;
        }
        let l0 = fields[0].is_interior(id);
        if fields.iter().any(|f| f.is_interior(id) != l0) {
            return Err(VariationError::GridMismatch);
        }
    }
    Ok((grid, fields))
}

/// Newton projection onto `{ψ(t, ·) = 0}`.
fn project(psi: &dyn DefiningFunction, t: C64, x: &[f64]) -> Option<Vec<f64>> {
    let d = x.len();
    let mut y = x.to_vec();
    for _ in 0..50 {
        let j = psi.real_jet(t, &y);
        let g2: f64 = j.grad[..d].iter().map(|v| v * v).sum();
        if g2 == 0.0 {
            return None;
        }
        if j.value.abs() <= 1e-14 * g2.sqrt() {
            return Some(y);
        }
        for k in 0..d {
            y[k] -= j.value * j.grad[k] / g2;
        }
    }
    let j = psi.real_jet(t, &y);
    let g = j.grad[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    (j.value.abs() <= 1e-10 * g).then_some(y)
}

fn to_c(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Boundary integrals `(∫ k₂ ‖∇_z g‖² dS, ∫ k₁ ‖∇_z g‖² dS, area, cells)`.
fn boundary_integrals(
    family: &DomainFamily,
    t0: C64,
    field: &GreenField,
) -> Result<(f64, C64, f64, usize), VariationError> {
    let grid = &field.grid;
    let psi = family.psi.slice(t0);
    let vals = node_values(grid, &*psi);
    let cells = cut_cells(grid, &vals);
    let chart = Euclidean { n: family.n() };
    let parts: Result<Vec<(f64, C64, f64)>, VariationError> = cells
        .par_iter()
        .map(|cell| {
            let x = cell_center(grid, cell.id);
            let p = project(&*family.psi, t0, &x).ok_or(GeometryError::ZeroGradient)?;
            let grad = field.grad_g(&p).ok_or(GreenError::StencilOutOfRange)?;
            let gz2 = 0.25 * grad.iter().map(|v| v * v).sum::<f64>();
            let z = to_c(&p);
            let k2 = levi_k2(&chart, &*family.psi, t0, &z)?;
            let k1 = levi_k1(&chart, &*family.psi, t0, &z)?;
            Ok((cell.area * k2 * gz2, cell.area * k1 * gz2, cell.area))
        })
        .collect();
    let parts = parts?;
    let i2 = parts.iter().map(|p| p.0).sum();
    let i1 = parts.iter().map(|p| p.1).sum();
    let area = parts.iter().map(|p| p.2).sum();
    Ok((i2, i1, area, cells.len()))
}

/// `∫ Σ_a |∂_{z̄_a} ∂_t u|² dV`, `∫ c |∂_t u|² dV`, `∫ |∂_t u|² dV` and the
/// dropped weight.
fn volume_integrals(family: &DomainFamily, t0: C64, h_t: f64, fields: &[GreenField]) -> (f64, f64, f64, f64) {
    let grid = &fields[0].grid;
    let d = grid.dim;
    let psi = family.psi.slice(t0);
    let vals = node_values(grid, &*psi);
    let frac = cell_fractions(grid, &vals, &*psi);
    let dt = |id: usize| -> Option<C64> {
        let v: [f64; 9] = std::array::from_fn(|k| fields[k].u[id]);
        let w = d_t(&v, h_t);
        (w.re.is_finite() && w.im.is_finite()).then_some(w)
    };
    let dv = grid.h.powi(d as i32);
    let parts: Vec<[f64; 4]> = (0..grid.len())
        .into_par_iter()
        .with_min_len(4096)
        .filter(|&id| frac[id] > 0.0)
        .map(|id| {
            let wgt = frac[id] * dv;
            let Some(w) = dt(id) else { return [0.0, 0.0, 0.0, wgt] };
            let mut grad = vec![C64::new(0.0, 0.0); d];
            for (k, gk) in grad.iter_mut().enumerate() {
                let (Some(a), Some(b)) = (grid.neighbor(id, 2 * k), grid.neighbor(id, 2 * k + 1)) else {
                    return [0.0, 0.0, 0.0, wgt];
                };
                let (Some(wa), Some(wb)) = (dt(a), dt(b)) else { return [0.0, 0.0, 0.0, wgt] };
                *gk = (wa - wb) / (2.0 * grid.h);
            }
            let dbar: f64 = (0..d / 2)
                .map(|a| (0.5 * (grad[2 * a] + C64::new(0.0, 1.0) * grad[2 * a + 1])).norm_sqr())
                .sum();
            let c = family.c.eval(&grid.point(id));
            [wgt * dbar, wgt * c * w.norm_sqr(), wgt * w.norm_sqr(), 0.0]
        })
        .collect();
    let mut acc = [0.0; 4];
    for p in &parts {
        for k in 0..4 {
            acc[k] += p[k];
        }
    }
    (acc[0], acc[1], acc[2], acc[3])
}

fn rel_mismatch(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 { 0.0 } else { (a - b).abs() / m }
}

/// Evaluates both variation formulas at `t₀` from nine solves.
pub fn second_variation_check(
    family: &DomainFamily,
    t0: C64,
    h_t: f64,
    nodes_per_axis: usize,
) -> Result<VariationReport, VariationError> {
    let (_, fields) = stencil_fields(family, t0, h_t, nodes_per_axis)?;
    let n = family.n();
    let cn = DimensionalConstants::new(n).c_n;
    let lam: Vec<f64> = fields.iter().map(|f| f.lambda).collect();
    let lhs = d_tt(&lam, h_t);
    let first_lhs = d_t(&lam, h_t);

    let (i2, i1, area, ncells) = boundary_integrals(family, t0, &fields[0])?;
    let (dbar, cterm, dgdt, dropped) = volume_integrals(family, t0, h_t, &fields);
    let rhs_boundary = -cn * i2;
    let rhs_volume = -4.0 * cn * dbar;
    let form_norm = 2f64.powi(n as i32) * dbar;
    let rhs_volume_forms = -cn / 2f64.powi(n as i32 - 2) * form_norm;
    let rhs_volume_c = -cn / 2f64.powi(n as i32 - 1) * cterm;
    let rhs = rhs_boundary + rhs_volume + rhs_volume_c;
    let first_rhs = -cn * i1;
    let first_mis = {
        let m = first_lhs.norm().max(first_rhs.norm());
        if m == 0.0 { 0.0 } else { (first_lhs - first_rhs).norm() / m }
    };
    let ts = stencil_ts(t0, h_t);
    Ok(VariationReport {
        t0: [t0.re, t0.im],
        h_t,
        nodes_per_axis,
        lambda_samples: ts.iter().zip(&lam).map(|(t, l)| [t.re, t.im, *l]).collect(),
        lhs,
        rhs_boundary,
        rhs_volume,
        rhs_volume_forms,
        rhs_volume_c,
        rhs_cross: 0.0,
        rhs,
        mismatch: rel_mismatch(lhs, rhs),
        first_var_lhs: [first_lhs.re, first_lhs.im],
        first_var_rhs: [first_rhs.re, first_rhs.im],
        first_var_mismatch: first_mis,
        dgdt_norm2: dgdt,
        boundary_area: area,
        boundary_cells: ncells,
        dropped_volume: dropped,
        residual: fields.iter().map(|f| f.residual).fold(0.0, f64::max),
    })
}

/// `(∂λ/∂t, −c_n ∫ k₁ ‖∇_z g‖² dσ, relative mismatch)`.
pub fn first_variation_check(
    family: &DomainFamily,
    t0: C64,
    h_t: f64,
    nodes_per_axis: usize,
) -> Result<(C64, C64, f64), VariationError> {
    let (_, fields) = stencil_fields(family, t0, h_t, nodes_per_axis)?;
    let cn = DimensionalConstants::new(family.n()).c_n;
    let lam: Vec<f64> = fields.iter().map(|f| f.lambda).collect();
    let lhs = d_t(&lam, h_t);
    let (_, i1, _, _) = boundary_integrals(family, t0, &fields[0])?;
    let rhs = -cn * i1;
    let m = lhs.norm().max(rhs.norm());
    Ok((lhs, rhs, if m == 0.0 { 0.0 } else { (lhs - rhs).norm() / m }))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubharmonicityReport {
    /// `(Re t, Im t, ∂²(−λ)/∂t∂t̄)`.
    pub samples: Vec<[f64; 3]>,
    pub min: f64,
    pub tol_sub: f64,
    pub subharmonic: bool,
}

/// Minimum of `k₂` over `count` boundary points of `D(t)` found by bisection
/// along random rays from the pole.
pub fn sample_k2_min(family: &DomainFamily, t: C64, count: usize, seed: u64) -> Result<f64, VariationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = Euclidean { n: family.n() };
    let d = 2 * family.n();
    let reach = family.psi.diameter(t);
    let mut min = f64::INFINITY;
    for _ in 0..count {
        let mut dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        dir.iter_mut().for_each(|v| *v /= norm);
        let at = |s: f64| -> Vec<f64> { family.pole.iter().zip(&dir).map(|(p, v)| p + s * v).collect() };
        let (mut lo, mut hi) = (0.0, reach);
        if family.psi.value(t, &at(hi)) < 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if family.psi.value(t, &at(mid)) < 0.0 { lo = mid } else { hi = mid }
        }
        let p = project(&*family.psi, t, &at(0.5 * (lo + hi))).ok_or(GeometryError::ZeroGradient)?;
        min = min.min(levi_k2(&chart, &*family.psi, t, &to_c(&p))?);
    }
    Ok(min)
}

/// Finite-difference `∂²(−λ)/∂t∂t̄` at each lattice point. With
/// `pseudoconvex` set, the flag is first checked by sampling `k₂ ≥ 0`.
pub fn subharmonicity_scan(
    family: &DomainFamily,
    ts: &[C64],
    h_t: f64,
    nodes_per_axis: usize,
    pseudoconvex: bool,
) -> Result<SubharmonicityReport, VariationError> {
    if pseudoconvex {
        for (i, &t) in ts.iter().enumerate() {
            let k = sample_k2_min(family, t, 64, i as u64)?;
            if k < -1e-8 {
                return Err(VariationError::NotPseudoconvex(k));
            }
        }
    }
    let mut samples = Vec::with_capacity(ts.len());
    let mut tol: f64 = 0.0;
    for &t in ts {
        let lam = stencil_ts(t, h_t)
            .iter()
            .map(|&s| lambda_on_box(family, s, t, h_t, nodes_per_axis))
            .collect::<Result<Vec<_>, _>>()?;
        let lhs = d_tt(&lam, h_t);
        tol = tol.max(5e-3 * lhs.abs().max(1.0));
        samples.push([t.re, t.im, -lhs]);
    }
    let min = samples.iter().map(|s| s[2]).fold(f64::INFINITY, f64::min);
    Ok(SubharmonicityReport { min, tol_sub: tol, subharmonic: min >= -tol, samples })
}

/// `λ(s)` on the grid shared by the stencil around `t`.
fn lambda_on_box(family: &DomainFamily, s: C64, t: C64, h_t: f64, npa: usize) -> Result<f64, VariationError> {
    family.check_t(s)?;
    let ts = stencil_ts(t, h_t);
    let (mut lo, mut hi) = family.psi.bounds(ts[0]);
    for &r in &ts[1..] {
        let (l, h) = family.psi.bounds(r);
        for k in 0..lo.len() {
            lo[k] = lo[k].min(l[k]);
            hi[k] = hi[k].max(h[k]);
        }
    }
    let d = GridDomain::new(family.psi.clone(), s, npa, family.pole.clone()).with_box(lo, hi);
    Ok(GreenSystem::assemble(&d, &family.c)?.solve(&family.pole, None)?.lambda)
}
