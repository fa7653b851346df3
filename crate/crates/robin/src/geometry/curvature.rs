use super::chart::{derive, CMat, Derived, MetricChart, MetricJet};
use super::defining::{DefiningFunction, PsiJet};
use super::GeometryError;
use num_complex::Complex64 as C64;

/// Hermiticity tolerance for closed-form charts.
pub const HERM_TOL: f64 = 1e-12;
/// Minimum `‖∇_z ψ‖` for Levi curvatures.
pub const TOL_GRAD: f64 = 1e-10;

/// First and mixed second complex derivatives of a (possibly complex) function.
#[derive(Clone, Debug)]
pub struct ScalarJet {
    /// `u_{z_a}`.
    pub dz: Vec<C64>,
    /// `u_{z̄_a}`.
    pub dzb: Vec<C64>,
    /// `[a][b] = u_{z_a z̄_b}`.
    pub ddb: CMat,
}

impl ScalarJet {
    /// Jet of a real function from its complex derivatives.
    pub fn real(dz: Vec<C64>, ddb: CMat) -> Self {
        let dzb = dz.iter().map(|v| v.conj()).collect();
        ScalarJet { dz, dzb, ddb }
    }

    /// Fourth-order differences of `f` in the real coordinates at `z`.
    pub fn from_fn(f: impl Fn(&[f64]) -> C64, z: &[C64], h: f64) -> Result<Self, GeometryError> {
        let n = z.len();
        let x0: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
        let at = |s: &[(usize, f64)]| {
            let mut x = x0.clone();
            for &(i, k) in s {
                x[i] += k * h;
            }
            f(&x)
        };
        let w = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
        let d1: Vec<C64> = (0..2 * n)
            .map(|i| w.iter().map(|&(s, c)| at(&[(i, s)]) * c).sum::<C64>() / h)
            .collect();
        let mut d2 = vec![vec![C64::from(0.0); 2 * n]; 2 * n];
        for i in 0..2 * n {
            let c2 = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
            d2[i][i] = c2.iter().map(|&(s, c)| at(&[(i, s)]) * c).sum::<C64>() / (12.0 * h * h);
            for j in i + 1..2 * n {
                let mut v = C64::from(0.0);
                for &(si, wi) in &w {
                    for &(sj, wj) in &w {
                        v += at(&[(i, si), (j, sj)]) * (wi * wj);
                    }
                }
                d2[i][j] = v / (h * h);
                d2[j][i] = d2[i][j];
            }
        }
        if d1.iter().chain(d2.iter().flatten()).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GeometryError::DerivativeUnavailable);
        }
        let i = C64::i();
        let dz = (0..n).map(|c| (d1[2 * c] - i * d1[2 * c + 1]) * 0.5).collect();
        let dzb = (0..n).map(|c| (d1[2 * c] + i * d1[2 * c + 1]) * 0.5).collect();
        let ddb = CMat::from_fn(n, n, |a, b| {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            (d2[xa][xb] + d2[ya][yb] + i * (d2[xa][yb] - d2[ya][xb])) * 0.25
        });
        Ok(ScalarJet { dz, dzb, ddb })
    }
}

fn derived(chart: &dyn MetricChart, z: &[C64]) -> Result<(MetricJet, Derived), GeometryError> {
    if z.len() != chart.n() {
        return Err(GeometryError::DimensionMismatch);
    }
    let jet = chart.jet(z);
    let d = derive(&jet, HERM_TOL)?;
    Ok((jet, d))
}

fn hodge_from(d: &Derived) -> Vec<C64> {
    let n = d.n();
    (0..n)
        .map(|a| (0..n).map(|b| d.dh(b)[(a, b)]).sum())
        .collect()
}

/// `I_a = Σ_b ∂(G g^{āb})/∂z_b`; all zero iff `∂*ω = 0` at `z`.
pub fn hodge_condition_residual(chart: &dyn MetricChart, z: &[C64]) -> Result<Vec<C64>, GeometryError> {
    let (_, d) = derived(chart, z)?;
    Ok(hodge_from(&d))
}

/// Largest coefficient of `dω`: `max |∂g_{ab̄}/∂z_c − ∂g_{cb̄}/∂z_a|`.
pub fn domega_residual(chart: &dyn MetricChart, z: &[C64]) -> Result<f64, GeometryError> {
    if z.len() != chart.n() {
        return Err(GeometryError::DimensionMismatch);
    }
    let j = chart.jet(z);
    let n = j.n();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max((j.dz[c][(a, b)] - j.dz[a][(c, b)]).norm());
            }
        }
    }
    Ok(worst)
}

fn principal(m: &CMat, ddb: &CMat) -> C64 {
    let n = m.nrows();
    let mut p = C64::from(0.0);
    for a in 0..n {
        for b in 0..n {
            // g^{b̄a} u_{z̄_b z_a}
            p += m[(b, a)] * ddb[(a, b)];
        }
    }
    p
}

fn lap(d: &Derived, u: &ScalarJet) -> C64 {
    let i = hodge_from(d);
    let n = d.n();
    let mut r = C64::from(0.0);
    for b in 0..n {
        r += i[b] * u.dzb[b] + i[b].conj() * u.dz[b];
    }
    -2.0 * (principal(&d.m, &u.ddb) + r / (2.0 * d.det))
}

/// `Δu = −2[Pu + Ru]`; on the Euclidean chart this is `−½` the ℝ^{2n} Laplacian.
pub fn laplacian_apply(chart: &dyn MetricChart, u: &ScalarJet, z: &[C64]) -> Result<C64, GeometryError> {
    let (_, d) = derived(chart, z)?;
    if u.dz.len() != chart.n() {
        return Err(GeometryError::DimensionMismatch);
    }
    Ok(lap(&d, u))
}

/// Boundary data shared by the Levi curvatures.
struct LeviParts {
    norm: f64,
    dt: C64,
    dtt: f64,
    cross: C64,
    psi: PsiJet,
}

fn levi_parts(
    d: &Derived,
    df: &dyn DefiningFunction,
    t: C64,
    z: &[C64],
) -> Result<LeviParts, GeometryError> {
    let psi = df.jet(t, z);
    let n = d.n();
    let tol = 1e-8 * df.diameter(t);
    if psi.grad_norm <= TOL_GRAD {
        return Err(GeometryError::ZeroGradient);
    }
    if psi.value.abs() / psi.grad_norm > tol {
        return Err(GeometryError::NotOnBoundary(psi.value));
    }
    let mut norm = C64::from(0.0);
    let mut cross = C64::from(0.0);
    for a in 0..n {
        for b in 0..n {
            norm += d.m[(a, b)] * psi.dz[a].conj() * psi.dz[b];
            // ψ_{z_b t̄} = conj(ψ_{t z̄_b}) for real ψ.
            cross += d.m[(a, b)] * psi.dz[a].conj() * psi.dt_dzb[b].conj();
        }
    }
    if norm.re.sqrt() <= TOL_GRAD {
        return Err(GeometryError::ZeroGradient);
    }
    Ok(LeviParts { norm: norm.re, dt: psi.dt, dtt: psi.dtt, cross, psi })
}

/// `k₁ = [Σ g^{āb} ψ_{z̄_a} ψ_{z_b}]^{−1/2} ψ_t`.
pub fn levi_k1(chart: &dyn MetricChart, df: &dyn DefiningFunction, t: C64, z: &[C64]) -> Result<C64, GeometryError> {
    let (_, d) = derived(chart, z)?;
    let p = levi_parts(&d, df, t, z)?;
    Ok(p.dt / p.norm.sqrt())
}

/// Levi scalar curvature `k₂` with the full Laplacian of the metric.
pub fn levi_k2(chart: &dyn MetricChart, df: &dyn DefiningFunction, t: C64, z: &[C64]) -> Result<f64, GeometryError> {
    let (_, d) = derived(chart, z)?;
    let p = levi_parts(&d, df, t, z)?;
    let lap_psi = lap(&d, &ScalarJet::real(p.psi.dz.clone(), p.psi.ddb.clone())).re;
    let num = p.dtt * p.norm - 2.0 * (p.dt * p.cross).re - 0.5 * p.dt.norm_sqr() * lap_psi;
    Ok(num / p.norm.powf(1.5))
}

/// `K₂`: `k₂` with `−½Δψ` replaced by the principal part; equals `k₂` when
/// the Hodge residual vanishes.
pub fn levi_big_k2(chart: &dyn MetricChart, df: &dyn DefiningFunction, t: C64, z: &[C64]) -> Result<f64, GeometryError> {
    let (_, d) = derived(chart, z)?;
    let p = levi_parts(&d, df, t, z)?;
    let pp = principal(&d.m, &p.psi.ddb).re;
    let num = p.dtt * p.norm - 2.0 * (p.dt * p.cross).re + p.dt.norm_sqr() * pp;
    Ok(num / p.norm.powf(1.5))
}

/// `Γ^α_{λβ} = Σ_γ g^{γ̄α} ∂g_{βγ̄}/∂z_λ`, indexed `[α][λ][β]`.
pub fn christoffel(chart: &dyn MetricChart, z: &[C64]) -> Result<Vec<Vec<Vec<C64>>>, GeometryError> {
    let (j, d) = derived(chart, z)?;
    let n = d.n();
    Ok((0..n)
        .map(|al| {
            (0..n)
                .map(|la| (0..n).map(|be| (0..n).map(|ga| d.m[(ga, al)] * j.dz[la][(be, ga)]).sum()).collect())
                .collect()
        })
        .collect())
}

/// `T^γ_{λβ} = Γ^γ_{λβ} − Γ^γ_{βλ}`, indexed `[γ][λ][β]`.
pub fn torsion(chart: &dyn MetricChart, z: &[C64]) -> Result<Vec<Vec<Vec<C64>>>, GeometryError> {
    let g = christoffel(chart, z)?;
    let n = g.len();
    Ok((0..n)
        .map(|ga| (0..n).map(|la| (0..n).map(|be| g[ga][la][be] - g[ga][be][la]).collect()).collect())
        .collect())
}

/// Torsion trace `T_α = Σ_λ T^λ_{αλ}`.
pub fn torsion_trace(chart: &dyn MetricChart, z: &[C64]) -> Result<Vec<C64>, GeometryError> {
    let t = torsion(chart, z)?;
    let n = t.len();
    Ok((0..n).map(|al| (0..n).map(|la| t[la][al][la]).sum()).collect())
}

/// `W` from the torsion trace: `Σ g^{β̄α} ∂T_α/∂z̄_β`.
pub fn scalar_w_torsion(chart: &dyn MetricChart, z: &[C64]) -> Result<f64, GeometryError> {
    let (j, d) = derived(chart, z)?;
    let n = d.n();
    // ∂Γ^α_{λβ'}/∂z̄_β = Σ_γ [∂̄_β g^{γ̄α} ∂_λ g_{β'γ̄} + g^{γ̄α} ∂_λ∂̄_β g_{β'γ̄}]
    let dgamma = |be: usize, al: usize, la: usize, bp: usize| -> C64 {
        (0..n)
            .map(|ga| d.dbm[be][(ga, al)] * j.dz[la][(bp, ga)] + d.m[(ga, al)] * j.ddb[la][be][(bp, ga)])
            .sum()
    };
    let mut w = C64::from(0.0);
    for al in 0..n {
        for be in 0..n {
            let dt: C64 = (0..n)
                .map(|la| dgamma(be, la, al, la) - dgamma(be, la, la, al))
                .sum();
            w += d.m[(be, al)] * dt;
        }
    }
    Ok(w.re)
}

/// `W` from the second derivatives of `G g^{āb}`.
pub fn scalar_w_direct(chart: &dyn MetricChart, z: &[C64]) -> Result<f64, GeometryError> {
    let (j, d) = derived(chart, z)?;
    let n = d.n();
    let i = hodge_from(&d);
    let g = C64::from(d.det);
    let mut w = C64::from(0.0);
    for al in 0..n {
        for be in 0..n {
            w += d.ddbh(be, al)[(al, be)] - j.g[(al, be)] / g * i[al].conj() * i[be];
        }
    }
    Ok((w / g).re)
}

/// Scalar curvature `W`, cross-checked between the two routes.
pub fn scalar_w(chart: &dyn MetricChart, z: &[C64]) -> Result<f64, GeometryError> {
    let a = scalar_w_torsion(chart, z)?;
    let b = scalar_w_direct(chart, z)?;
    if (a - b).abs() > 1e-6 * a.abs().max(1.0) {
        return Err(GeometryError::RouteMismatch(a, b));
    }
    Ok(a)
}

