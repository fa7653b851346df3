use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Sparse real polynomial in a fixed number of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
    max_deg: Vec<u32>,
}

impl RealPoly {
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut acc: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "monomial length");
            *acc.entry(e).or_insert(0.0) += c;
        }
        let terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let mut max_deg = vec![0; nvars];
        for (e, _) in &terms {
            for (m, &k) in max_deg.iter_mut().zip(e) {
                *m = (*m).max(k);
            }
        }
        RealPoly { nvars, terms, max_deg }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_terms(nvars, [])
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, [(e, 1.0)])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, 1.0), |acc, _| &acc * self)
    }

    fn powers(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .zip(&self.max_deg)
            .map(|(&xi, &d)| {
                let mut p = Vec::with_capacity(d as usize + 1);
                let mut v = 1.0;
                for _ in 0..=d {
                    p.push(v);
                    v *= xi;
                }
                p
            })
            .collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let pw = self.powers(x);
        self.terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(*c, |acc, (i, &k)| acc * pw[i][k as usize]))
            .sum()
    }

    /// Value, gradient and Hessian.
    pub fn jet(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
        let m = self.nvars;
        let pw = self.powers(x);
        let p = |i: usize, k: i64| if k < 0 { 0.0 } else { pw[i][k as usize] };
        let mut v = 0.0;
        let mut g = vec![0.0; m];
        let mut h = vec![vec![0.0; m]; m];
        for (e, c) in &self.terms {
            let base: Vec<f64> = (0..m).map(|i| p(i, e[i] as i64)).collect();
            let prod_except = |skip: &[usize]| -> f64 {
                (0..m).filter(|i| !skip.contains(i)).map(|i| base[i]).product()
            };
            v += c * prod_except(&[]);
            for i in 0..m {
                let ei = e[i] as i64;
                if ei == 0 {
                    continue;
                }
                let rest = prod_except(&[i]);
                g[i] += c * ei as f64 * p(i, ei - 1) * rest;
                h[i][i] += c * (ei * (ei - 1)) as f64 * p(i, ei - 2) * rest;
                for j in i + 1..m {
                    let ej = e[j] as i64;
                    if ej == 0 {
                        continue;
                    }
                    let t = c * (ei * ej) as f64 * p(i, ei - 1) * p(j, ej - 1) * prod_except(&[i, j]);
                    h[i][j] += t;
                    h[j][i] += t;
                }
            }
        }
        (v, g, h)
    }

    /// Substitute fixed values for the variables `from..`, keeping the first `from`.
    pub fn substitute_tail(&self, from: usize, vals: &[f64]) -> RealPoly {
        assert_eq!(from + vals.len(), self.nvars);
        let terms = self.terms.iter().map(|(e, c)| {
            let f: f64 = e[from..].iter().zip(vals).map(|(&k, &v)| v.powi(k as i32)).product();
            (e[..from].to_vec(), c * f)
        });
        RealPoly::from_terms(from, terms)
    }

    /// Append `k` unused variables.
    pub fn extend_vars(&self, k: usize) -> RealPoly {
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e = e.clone();
            e.extend(std::iter::repeat_n(0, k));
            (e, *c)
        });
        RealPoly::from_terms(self.nvars + k, terms)
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, o: &RealPoly) -> RealPoly {
        assert_eq!(self.nvars, o.nvars);
        RealPoly::from_terms(self.nvars, self.terms.iter().chain(&o.terms).cloned())
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, o: &RealPoly) -> RealPoly {
        self + &(-o)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, o: &RealPoly) -> RealPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                terms.push((a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb));
            }
        }
        RealPoly::from_terms(self.nvars, terms)
    }
}
