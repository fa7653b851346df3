use super::realpoly::RealPoly;
use super::GeometryError;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

pub(crate) fn to_real(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub(crate) fn to_complex(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

fn norm2(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

/// Metric coefficients `g[a][b] = g_{ab̄}` and their derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: CMat,
    /// `∂g/∂z_c`.
    pub dz: Vec<CMat>,
    /// `∂g/∂z̄_c`.
    pub dzb: Vec<CMat>,
    /// `[c][d] = ∂²g/∂z_c∂z̄_d`.
    pub ddb: Vec<Vec<CMat>>,
}

impl MetricJet {
    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// Jet of the conformal metric `φ·I` from the jet of `φ`.
    pub fn conformal(phi: f64, dphi: &[C64], ddphi: &CMat) -> Self {
        let n = dphi.len();
        let id = CMat::identity(n, n);
        MetricJet {
            g: &id * C64::from(phi),
            dz: dphi.iter().map(|d| &id * *d).collect(),
            dzb: dphi.iter().map(|d| &id * d.conj()).collect(),
            ddb: (0..n).map(|c| (0..n).map(|d| &id * ddphi[(c, d)]).collect()).collect(),
        }
    }
}

/// Hermitian metric on an open set of ℂⁿ.
pub trait MetricChart: Send + Sync {
    fn n(&self) -> usize;

    fn metric(&self, z: &[C64]) -> CMat;

    /// Closed-form jets override the finite-difference default.
    fn jet(&self, z: &[C64]) -> MetricJet {
        fd_metric_jet(|w| self.metric(w), z, FD_STEP)
    }

    fn name(&self) -> &str;
}

/// Relative step for metric finite differences.
pub const FD_STEP: f64 = 1e-4;

const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];

/// Fourth-order central differences in the real coordinates.
pub fn fd_metric_jet(f: impl Fn(&[C64]) -> CMat, z: &[C64], rel_step: f64) -> MetricJet {
    let n = z.len();
    let x0 = to_real(z);
    let scale = x0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let h = rel_step * scale;
    let at = |shifts: &[(usize, f64)]| {
        let mut x = x0.clone();
        for &(i, s) in shifts {
            x[i] += s * h;
        }
        f(&to_complex(&x))
    };
    let g = f(z);
    let (r, c) = g.shape();
    let zero = || CMat::zeros(r, c);
    // First real derivatives.
    let d1: Vec<CMat> = (0..2 * n)
        .map(|i| D1.iter().fold(zero(), |acc, &(s, w)| acc + at(&[(i, s)]) * C64::from(w / h)))
        .collect();
    // Second real derivatives.
    let mut d2 = vec![vec![zero(); 2 * n]; 2 * n];
    for i in 0..2 * n {
        let c = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
        d2[i][i] = c
            .iter()
            .fold(zero(), |acc, &(s, w)| acc + at(&[(i, s)]) * C64::from(w / (12.0 * h * h)));
        for j in i + 1..2 * n {
            let mut m = zero();
            for &(si, wi) in &D1 {
                for &(sj, wj) in &D1 {
                    m += at(&[(i, si), (j, sj)]) * C64::from(wi * wj / (h * h));
                }
            }
            d2[j][i] = m.clone();
            d2[i][j] = m;
        }
    }
    let i = C64::i();
    let half = C64::from(0.5);
    let dz: Vec<CMat> = (0..n).map(|c| (&d1[2 * c] - &d1[2 * c + 1] * i) * half).collect();
    let dzb: Vec<CMat> = (0..n).map(|c| (&d1[2 * c] + &d1[2 * c + 1] * i) * half).collect();
    let ddb = (0..n)
        .map(|c| {
            (0..n)
                .map(|d| {
                    let (xc, yc, xd, yd) = (2 * c, 2 * c + 1, 2 * d, 2 * d + 1);
                    (&d2[xc][xd] + &d2[yc][yd] + (&d2[xc][yd] - &d2[yc][xd]) * i) * C64::from(0.25)
                })
                .collect()
        })
        .collect();
    MetricJet { g, dz, dzb, ddb }
}

/// `|dz|²`.
#[derive(Clone, Debug)]
pub struct Euclidean {
    pub n: usize,
}

impl MetricChart for Euclidean {
    fn n(&self) -> usize {
        self.n
    }
    fn metric(&self, _: &[C64]) -> CMat {
        CMat::identity(self.n, self.n)
    }
    fn jet(&self, _: &[C64]) -> MetricJet {
        MetricJet::conformal(1.0, &vec![C64::from(0.0); self.n], &CMat::zeros(self.n, self.n))
    }
    fn name(&self) -> &str {
        "euclidean"
    }
}

/// Conformal factor `φ` with its jet `(φ, ∂φ/∂z_c, ∂²φ/∂z_c∂z̄_d)`.
pub trait ConformalFactor: Send + Sync {
    fn n(&self) -> usize;
    fn jet(&self, z: &[C64]) -> (f64, Vec<C64>, CMat);
    fn name(&self) -> &str;
}

/// `|dz|²/(1 − ‖z‖²)²` on the unit ball.
#[derive(Clone, Debug)]
pub struct BallFactor {
    pub n: usize,
}

impl ConformalFactor for BallFactor {
    fn n(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[C64]) -> (f64, Vec<C64>, CMat) {
        let r = 1.0 / (1.0 - norm2(z));
        let d = z.iter().map(|w| w.conj() * (2.0 * r.powi(3))).collect();
        let dd = CMat::from_fn(self.n, self.n, |c, e| {
            let delta = if c == e { 2.0 * r.powi(3) } else { 0.0 };
            C64::from(delta) + z[c].conj() * z[e] * (6.0 * r.powi(4))
        });
        (r * r, d, dd)
    }
    fn name(&self) -> &str {
        "ball"
    }
}

/// `|dz|²/‖z‖²` on ℂⁿ∖{0}.
#[derive(Clone, Debug)]
pub struct HopfFactor {
    pub n: usize,
}

impl ConformalFactor for HopfFactor {
    fn n(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[C64]) -> (f64, Vec<C64>, CMat) {
        let s = norm2(z);
        let d = z.iter().map(|w| -w.conj() / (s * s)).collect();
        let dd = CMat::from_fn(self.n, self.n, |c, e| {
            let delta = if c == e { -1.0 / (s * s) } else { 0.0 };
            C64::from(delta) + z[c].conj() * z[e] * (2.0 / s.powi(3))
        });
        (1.0 / s, d, dd)
    }
    fn name(&self) -> &str {
        "hopf"
    }
}

/// Polynomial in the real coordinates `x`, `z_k = x_{2k−1} + i x_{2k}`.
#[derive(Clone, Debug)]
pub struct PolyFactor {
    pub n: usize,
    pub poly: RealPoly,
}

/// Complex first and mixed second derivatives from a real gradient and Hessian.
pub(crate) fn complexify(grad: &[f64], hess: &[Vec<f64>], n: usize) -> (Vec<C64>, CMat) {
    let d = (0..n).map(|c| C64::new(grad[2 * c], -grad[2 * c + 1]) * 0.5).collect();
    let dd = CMat::from_fn(n, n, |c, e| {
        let (xc, yc, xe, ye) = (2 * c, 2 * c + 1, 2 * e, 2 * e + 1);
        C64::new(hess[xc][xe] + hess[yc][ye], hess[xc][ye] - hess[yc][xe]) * 0.25
    });
    (d, dd)
}

impl ConformalFactor for PolyFactor {
    fn n(&self) -> usize {
        self.n
    }
    fn jet(&self, z: &[C64]) -> (f64, Vec<C64>, CMat) {
        let (v, g, h) = self.poly.jet(&to_real(z));
        let (d, dd) = complexify(&g, &h, self.n);
        (v, d, dd)
    }
    fn name(&self) -> &str {
        "polynomial"
    }
}

/// `φ(z)|dz|²` with a closed-form jet.
#[derive(Clone, Debug)]
pub struct Conformal<F> {
    pub factor: F,
}

impl<F: ConformalFactor> MetricChart for Conformal<F> {
    fn n(&self) -> usize {
        self.factor.n()
    }
    fn metric(&self, z: &[C64]) -> CMat {
        let n = self.n();
        CMat::identity(n, n) * C64::from(self.factor.jet(z).0)
    }
    fn jet(&self, z: &[C64]) -> MetricJet {
        let (p, d, dd) = self.factor.jet(z);
        MetricJet::conformal(p, &d, &dd)
    }
    fn name(&self) -> &str {
        self.factor.name()
    }
}

pub fn ball_metric(n: usize) -> Conformal<BallFactor> {
    Conformal { factor: BallFactor { n } }
}

pub fn hopf_metric(n: usize) -> Conformal<HopfFactor> {
    Conformal { factor: HopfFactor { n } }
}

/// Kähler metric `∂∂̄ log 1/(1 − ‖z‖²)` on the unit ball:
/// `g_{ab̄} = r δ_ab + r² z̄_a z_b`, `r = 1/(1 − ‖z‖²)`.
#[derive(Clone, Debug)]
pub struct KahlerBall {
    pub n: usize,
}

impl MetricChart for KahlerBall {
    fn n(&self) -> usize {
        self.n
    }
    fn metric(&self, z: &[C64]) -> CMat {
        let r = 1.0 / (1.0 - norm2(z));
        CMat::from_fn(self.n, self.n, |a, b| {
            C64::from(if a == b { r } else { 0.0 }) + z[a].conj() * z[b] * (r * r)
        })
    }
    fn jet(&self, z: &[C64]) -> MetricJet {
        let n = self.n;
        let r = 1.0 / (1.0 - norm2(z));
        let (r2, r3, r4) = (r * r, r * r * r, r.powi(4));
        let dl = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let zb: Vec<C64> = z.iter().map(|w| w.conj()).collect();
        let dz: Vec<CMat> = (0..n)
            .map(|c| {
                CMat::from_fn(n, n, |a, b| {
                    zb[c] * (r2 * dl(a, b)) + zb[c] * zb[a] * z[b] * (2.0 * r3) + zb[a] * (r2 * dl(b, c))
                })
            })
            .collect();
        let dzb = dz.iter().map(|m| m.adjoint()).collect();
        let ddb = (0..n)
            .map(|c| {
                (0..n)
                    .map(|d| {
                        CMat::from_fn(n, n, |a, b| {
                            (z[d] * zb[c] * (2.0 * r3) + r2 * dl(c, d)) * dl(a, b)
                                + z[d] * zb[c] * zb[a] * z[b] * (6.0 * r4)
                                + (zb[a] * z[b] * dl(c, d) + zb[c] * z[b] * dl(a, d)) * (2.0 * r3)
                                + (z[d] * zb[a] * (2.0 * r3) + r2 * dl(a, d)) * dl(b, c)
                        })
                    })
                    .collect()
            })
            .collect();
        MetricJet { g: self.metric(z), dz, dzb, ddb }
    }
    fn name(&self) -> &str {
        "kahler-ball"
    }
}

/// Any coefficient map, differentiated numerically.
pub struct FdChart<F> {
    pub n: usize,
    pub coeff: F,
    pub rel_step: f64,
}

impl<F: Fn(&[C64]) -> CMat + Send + Sync> MetricChart for FdChart<F> {
    fn n(&self) -> usize {
        self.n
    }
    fn metric(&self, z: &[C64]) -> CMat {
        (self.coeff)(z)
    }
    fn jet(&self, z: &[C64]) -> MetricJet {
        fd_metric_jet(&self.coeff, z, self.rel_step)
    }
    fn name(&self) -> &str {
        "finite-difference"
    }
}

/// Inverse metric, determinant and their derivatives.
#[derive(Clone, Debug)]
pub struct Derived {
    /// `m[a][b] = g^{āb}`.
    pub m: CMat,
    pub det: f64,
    pub dm: Vec<CMat>,
    pub dbm: Vec<CMat>,
    /// `[c][d] = ∂²M/∂z_c∂z̄_d`.
    pub ddbm: Vec<Vec<CMat>>,
    pub ddet: Vec<C64>,
    pub dbdet: Vec<C64>,
    pub ddbdet: CMat,
}

/// Checks Hermiticity and positivity, then differentiates `g⁻¹` and `det g`.
pub fn derive(jet: &MetricJet, herm_tol: f64) -> Result<Derived, GeometryError> {
    let n = jet.n();
    let g = &jet.g;
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let asym = (g - g.adjoint()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if !(asym <= herm_tol * scale.max(1.0)) {
        return Err(GeometryError::NotHermitian(asym));
    }
    let herm = (g + g.adjoint()) * C64::from(0.5);
    let chol = herm.cholesky().ok_or(GeometryError::SingularMetric)?;
    // Complex square roots never fail, so positivity shows up on the diagonal.
    if chol.l_dirty().diagonal().iter().any(|d| !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re) {
        return Err(GeometryError::SingularMetric);
    }
    let m = chol.inverse();
    let det = chol.l().diagonal().iter().map(|d| d.norm_sqr()).product::<f64>();
    if !(det > 0.0) || !det.is_finite() {
        return Err(GeometryError::SingularMetric);
    }
    let tr = |a: &CMat| a.trace();
    let dm: Vec<CMat> = jet.dz.iter().map(|d| -(&m * d * &m)).collect();
    let dbm: Vec<CMat> = jet.dzb.iter().map(|d| -(&m * d * &m)).collect();
    let ddbm = (0..n)
        .map(|c| {
            (0..n)
                .map(|d| -(&dbm[d] * &jet.dz[c] * &m + &m * &jet.ddb[c][d] * &m + &m * &jet.dz[c] * &dbm[d]))
                .collect()
        })
        .collect();
    let detc = C64::from(det);
    let ddet: Vec<C64> = jet.dz.iter().map(|d| detc * tr(&(&m * d))).collect();
    let dbdet: Vec<C64> = jet.dzb.iter().map(|d| detc * tr(&(&m * d))).collect();
    let ddbdet = CMat::from_fn(n, n, |c, d| {
        dbdet[d] * tr(&(&m * &jet.dz[c])) + detc * tr(&(&dbm[d] * &jet.dz[c] + &m * &jet.ddb[c][d]))
    });
    Ok(Derived { m, det, dm, dbm, ddbm, ddet, dbdet, ddbdet })
}

impl Derived {
    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    /// `∂(G g⁻¹)/∂z_c`.
    pub fn dh(&self, c: usize) -> CMat {
        &self.m * self.ddet[c] + &self.dm[c] * C64::from(self.det)
    }

    /// `∂²(G g⁻¹)/∂z_c∂z̄_d`.
    pub fn ddbh(&self, c: usize, d: usize) -> CMat {
        &self.m * self.ddbdet[(c, d)]
            + &self.dbm[d] * self.ddet[c]
            + &self.dm[c] * self.dbdet[d]
            + &self.ddbm[c][d] * C64::from(self.det)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> Vec<C64> {
        vec![C64::new(0.21, -0.33), C64::new(-0.17, 0.25)]
    }

    fn close(a: &MetricJet, b: &MetricJet, tol: f64) {
        let n = a.n();
        assert!((&a.g - &b.g).norm() < tol);
        for c in 0..n {
            assert!((&a.dz[c] - &b.dz[c]).norm() < tol, "dz {c}");
            assert!((&a.dzb[c] - &b.dzb[c]).norm() < tol, "dzb {c}");
            for d in 0..n {
                assert!((&a.ddb[c][d] - &b.ddb[c][d]).norm() < tol, "ddb {c} {d}");
            }
        }
    }

    #[test]
    fn closed_forms_match_differences() {
        let z = pt();
        for chart in [&ball_metric(2) as &dyn MetricChart, &hopf_metric(2), &KahlerBall { n: 2 }] {
            close(&chart.jet(&z), &fd_metric_jet(|w| chart.metric(w), &z, FD_STEP), 1e-7);
        }
    }

    #[test]
    fn inverse_derivatives() {
        let z = pt();
        let k = KahlerBall { n: 2 };
        let d = derive(&k.jet(&z), 1e-12).unwrap();
        let inv = |w: &[C64]| k.metric(w).try_inverse().unwrap();
        let fd = fd_metric_jet(inv, &z, FD_STEP);
        for c in 0..2 {
            assert!((&d.dm[c] - &fd.dz[c]).norm() < 1e-7);
            for e in 0..2 {
                assert!((&d.ddbm[c][e] - &fd.ddb[c][e]).norm() < 1e-6);
            }
        }
        let det = |w: &[C64]| CMat::from_element(1, 1, k.metric(w).determinant());
        let fd = fd_metric_jet(det, &z, FD_STEP);
        for c in 0..2 {
            assert!((d.ddet[c] - fd.dz[c][(0, 0)]).norm() < 1e-7);
            for e in 0..2 {
                assert!((d.ddbdet[(c, e)] - fd.ddb[c][e][(0, 0)]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let j = MetricJet::conformal(-1.0, &[C64::from(0.0); 2], &CMat::zeros(2, 2));
        assert!(matches!(derive(&j, 1e-12), Err(GeometryError::SingularMetric)));
    }
}
