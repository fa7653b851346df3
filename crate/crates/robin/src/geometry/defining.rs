use super::chart::{complexify, CMat};
use super::realpoly::RealPoly;
use num_complex::Complex64 as C64;

/// Value, gradient and Hessian in the real variables `(x_1, …, x_{2n}, t_1, t_2)`.
#[derive(Clone, Debug)]
pub struct RealJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

/// Complex derivatives of a defining function at `(t, z)`.
#[derive(Clone, Debug)]
pub struct PsiJet {
    pub value: f64,
    /// `ψ_{z_a}`.
    pub dz: Vec<C64>,
    /// `ψ_{z_a z̄_b}`.
    pub ddb: CMat,
    pub dt: C64,
    /// `ψ_{t t̄}`.
    pub dtt: f64,
    /// `ψ_{t z̄_a}`.
    pub dt_dzb: Vec<C64>,
    /// Euclidean length of the real spatial gradient.
    pub grad_norm: f64,
}

impl PsiJet {
    pub fn from_real(j: &RealJet, n: usize) -> Self {
        let (dz, ddb) = complexify(&j.grad, &j.hess, n);
        let (t1, t2) = (2 * n, 2 * n + 1);
        let h = &j.hess;
        let dt = C64::new(j.grad[t1], -j.grad[t2]) * 0.5;
        let dtt = 0.25 * (h[t1][t1] + h[t2][t2]);
        let dt_dzb = (0..n)
            .map(|a| {
                let (x, y) = (2 * a, 2 * a + 1);
                C64::new(h[t1][x] + h[t2][y], h[t1][y] - h[t2][x]) * 0.25
            })
            .collect();
        let grad_norm = j.grad[..2 * n].iter().map(|v| v * v).sum::<f64>().sqrt();
        PsiJet { value: j.value, dz, ddb, dt, dtt, dt_dzb, grad_norm }
    }
}

/// Real function `ψ(t, x)` whose sublevel set `{ψ(t, ·) < 0}` is `D(t)`.
pub trait DefiningFunction: Send + Sync {
    fn n(&self) -> usize;

    fn value(&self, t: C64, x: &[f64]) -> f64;

    /// Derivatives; the default uses fourth-order central differences.
    fn real_jet(&self, t: C64, x: &[f64]) -> RealJet {
        fd_real_jet(|y| self.value(C64::new(y[y.len() - 2], y[y.len() - 1]), &y[..y.len() - 2]), t, x)
    }

    /// Axis-aligned box containing `D(t)`.
    fn bounds(&self, t: C64) -> (Vec<f64>, Vec<f64>);

    /// Spatial values at fixed `t`, possibly with a faster representation.
    fn slice(&self, t: C64) -> Box<dyn Fn(&[f64]) -> f64 + Send + Sync + '_> {
        Box::new(move |x| self.value(t, x))
    }

    fn jet(&self, t: C64, z: &[C64]) -> PsiJet {
        let x: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
        PsiJet::from_real(&self.real_jet(t, &x), self.n())
    }

    fn diameter(&self, t: C64) -> f64 {
        let (lo, hi) = self.bounds(t);
        lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
    }
}

fn fd_real_jet(f: impl Fn(&[f64]) -> f64, t: C64, x: &[f64]) -> RealJet {
    let mut y = x.to_vec();
    y.extend([t.re, t.im]);
    let m = y.len();
    let h = 1e-4 * y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let w = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
    let at = |s: &[(usize, f64)]| {
        let mut p = y.clone();
        for &(i, k) in s {
            p[i] += k * h;
        }
        f(&p)
    };
    let value = f(&y);
    let grad = (0..m).map(|i| w.iter().map(|&(s, c)| c * at(&[(i, s)])).sum::<f64>() / h).collect();
    let mut hess = vec![vec![0.0; m]; m];
    for i in 0..m {
        let c2 = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
        hess[i][i] = c2.iter().map(|&(s, c)| c * at(&[(i, s)])).sum::<f64>() / (12.0 * h * h);
        for j in i + 1..m {
            let mut v = 0.0;
            for &(si, wi) in &w {
                for &(sj, wj) in &w {
                    v += wi * wj * at(&[(i, si), (j, sj)]);
                }
            }
            hess[i][j] = v / (h * h);
            hess[j][i] = hess[i][j];
        }
    }
    RealJet { value, grad, hess }
}

/// Polynomial defining function in `(x, t_1, t_2)`.
#[derive(Clone, Debug)]
pub struct PolyFamily {
    n: usize,
    poly: RealPoly,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Components of `a` in `D(t) = D(0) − a t`; `None` for non-translating families.
    shift: Option<Vec<C64>>,
}

impl PolyFamily {
    /// `poly` has `2n + 2` variables; `lo..hi` bounds `D(0)`.
    pub fn new(n: usize, poly: RealPoly, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(poly.nvars(), 2 * n + 2);
        PolyFamily { n, poly, lo, hi, shift: None }
    }

    pub fn poly(&self) -> &RealPoly {
        &self.poly
    }

    /// Real coordinates of `z − t a` as polynomials.
    fn shifted_coords(n: usize, a: &[C64]) -> Vec<RealPoly> {
        let m = 2 * n + 2;
        let (t1, t2) = (RealPoly::var(m, 2 * n), RealPoly::var(m, 2 * n + 1));
        (0..n)
            .flat_map(|k| {
                // t a = (t1 + i t2)(ar + i ai)
                let re = &(&RealPoly::var(m, 2 * k) - &t1.scale(a[k].re)) + &t2.scale(a[k].im);
                let im = &(&RealPoly::var(m, 2 * k + 1) - &t1.scale(a[k].im)) - &t2.scale(a[k].re);
                [re, im]
            })
            .collect()
    }

    fn ball_box(n: usize, r: f64, a: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let c: Vec<f64> = a.iter().flat_map(|v| [v.re, v.im]).collect();
        debug_assert_eq!(c.len(), 2 * n);
        (c.iter().map(|v| v - r).collect(), c.iter().map(|v| v + r).collect())
    }

    /// `‖z − c‖² − R²` with no `t` dependence.
    pub fn static_ball(n: usize, center: &[C64], radius: f64) -> Self {
        let m = 2 * n + 2;
        let coords = Self::shifted_coords(n, &vec![C64::from(0.0); n]);
        let c: Vec<f64> = center.iter().flat_map(|v| [v.re, v.im]).collect();
        let mut p = RealPoly::constant(m, -radius * radius);
        for (x, ci) in coords.iter().zip(&c) {
            let d = x - &RealPoly::constant(m, *ci);
            p = &p + &(&d * &d);
        }
        let (lo, hi) = Self::ball_box(n, radius, center);
        PolyFamily { n, poly: p, lo, hi, shift: Some(vec![C64::from(0.0); n]) }
    }

    /// `‖z − a t‖² − R²`: the ball of radius `R` moved by `a t`.
    pub fn translation(n: usize, a: &[C64], radius: f64) -> Self {
        let m = 2 * n + 2;
        let coords = Self::shifted_coords(n, a);
        let p = coords
            .iter()
            .fold(RealPoly::constant(m, -radius * radius), |acc, x| &acc + &(x * x));
        let (lo, hi) = Self::ball_box(n, radius, &vec![C64::from(0.0); n]);
        PolyFamily { n, poly: p, lo, hi, shift: Some(a.to_vec()) }
    }

    /// `‖z‖² − (R + Re t)²`.
    pub fn radial(n: usize, radius: f64) -> Self {
        let m = 2 * n + 2;
        let s = (0..2 * n).fold(RealPoly::zero(m), |acc, i| {
            let x = RealPoly::var(m, i);
            &acc + &(&x * &x)
        });
        let r = &RealPoly::constant(m, radius) + &RealPoly::var(m, 2 * n);
        let p = &s - &(&r * &r);
        let (lo, hi) = Self::ball_box(n, radius, &vec![C64::from(0.0); n]);
        PolyFamily { n, poly: p, lo, hi, shift: None }
    }

    /// `‖z − a t‖⁴ + (Re(z_1 − a_1 t))⁴ − 1`, a smooth strictly convex domain.
    pub fn quartic(n: usize, a: &[C64]) -> Self {
        let m = 2 * n + 2;
        let coords = Self::shifted_coords(n, a);
        let s = coords.iter().fold(RealPoly::zero(m), |acc, x| &acc + &(x * x));
        let p = &(&(&s * &s) + &coords[0].powi(4)) - &RealPoly::constant(m, 1.0);
        let (lo, hi) = Self::ball_box(n, 1.0, &vec![C64::from(0.0); n]);
        PolyFamily { n, poly: p, lo, hi, shift: Some(a.to_vec()) }
    }

    /// Spatial polynomial (2n variables) with no `t` dependence.
    pub fn static_poly(n: usize, p: &RealPoly, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        PolyFamily { n, poly: p.extend_vars(2), lo, hi, shift: Some(vec![C64::from(0.0); n]) }
    }
}

impl DefiningFunction for PolyFamily {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, t: C64, x: &[f64]) -> f64 {
        let mut y = x.to_vec();
        y.extend([t.re, t.im]);
        self.poly.eval(&y)
    }

    fn real_jet(&self, t: C64, x: &[f64]) -> RealJet {
        let mut y = x.to_vec();
        y.extend([t.re, t.im]);
        let (value, grad, hess) = self.poly.jet(&y);
        RealJet { value, grad, hess }
    }

    fn bounds(&self, t: C64) -> (Vec<f64>, Vec<f64>) {
        match &self.shift {
            Some(a) => {
                let off: Vec<f64> = a.iter().flat_map(|v| {
                    let w = *v * t;
                    [w.re, w.im]
                }).collect();
                (
                    self.lo.iter().zip(&off).map(|(l, o)| l + o).collect(),
                    self.hi.iter().zip(&off).map(|(h, o)| h + o).collect(),
                )
            }
            None => {
                // Radial-type families: pad by the largest |t| we expect.
                let pad = t.norm();
                (
                    self.lo.iter().map(|l| l - pad).collect(),
                    self.hi.iter().map(|h| h + pad).collect(),
                )
            }
        }
    }

    fn slice(&self, t: C64) -> Box<dyn Fn(&[f64]) -> f64 + Send + Sync + '_> {
        let p = self.poly.substitute_tail(2 * self.n, &[t.re, t.im]);
        Box::new(move |x| p.eval(x))
    }
}

/// `e^{x_1} ψ`: another defining function for the same family.
pub struct Rescaled<D> {
    pub inner: D,
}

impl<D: DefiningFunction> DefiningFunction for Rescaled<D> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn value(&self, t: C64, x: &[f64]) -> f64 {
        x[0].exp() * self.inner.value(t, x)
    }

    fn real_jet(&self, t: C64, x: &[f64]) -> RealJet {
        let j = self.inner.real_jet(t, x);
        let m = j.grad.len();
        let e = x[0].exp();
        // φ = e^{x_1}: ∇φ = φ e_0, ∇²φ = φ e_0 e_0ᵀ.
        let mut grad: Vec<f64> = j.grad.iter().map(|g| e * g).collect();
        grad[0] += e * j.value;
        let mut hess = vec![vec![0.0; m]; m];
        for i in 0..m {
            for k in 0..m {
                let mut v = e * j.hess[i][k];
                if i == 0 {
                    v += e * j.grad[k];
                }
                if k == 0 {
                    v += e * j.grad[i];
                }
                if i == 0 && k == 0 {
                    v += e * j.value;
                }
                hess[i][k] = v;
            }
        }
        RealJet { value: e * j.value, grad, hess }
    }

    fn bounds(&self, t: C64) -> (Vec<f64>, Vec<f64>) {
        self.inner.bounds(t)
    }
}
