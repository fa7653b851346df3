//! JSON descriptions of metrics, domains and domain families.
//!
//! ```json
//! {"kind": "euclidean" | "ball" | "hopf" | "polynomial", "n": 2,
//!  "terms": [{"coeff": 1.0, "monomial": [2, 0, 0, 0]}]}
//! ```
//!
//! For metrics, `polynomial` is a conformal factor `φ(x)`. For domains it is
//! `ψ(x)` and needs a bounding `box`. Families add the kinds `static`,
//! `translation`, `radial` and `quartic`; their polynomial monomials have
//! `2n + 2` exponents, the last two for `t_1, t_2`.

use super::chart::{ball_metric, hopf_metric, Conformal, Euclidean, MetricChart, PolyFactor};
use super::defining::{DefiningFunction, PolyFamily, Rescaled};
use super::realpoly::RealPoly;
use super::GeometryError;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub monomial: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Spec {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub terms: Vec<Term>,
    /// Ball radius.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Ball center in real coordinates.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    /// Translation direction `a` in real coordinates.
    #[serde(default)]
    pub direction: Option<Vec<f64>>,
    /// `[lo, hi]` corners in real coordinates.
    #[serde(rename = "box", default)]
    pub bbox: Option<[Vec<f64>; 2]>,
    /// Multiply the defining function by `e^{x_1}`.
    #[serde(default)]
    pub rescale: bool,
}

fn err(s: impl Into<String>) -> GeometryError {
    GeometryError::Schema(s.into())
}

impl Spec {
    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let s: Spec = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
        if s.n == 0 {
            return Err(err("n must be positive"));
        }
        Ok(s)
    }

    fn poly(&self, nvars: usize) -> Result<RealPoly, GeometryError> {
        if self.terms.is_empty() {
            return Err(err("polynomial kind needs terms"));
        }
        for t in &self.terms {
            if t.monomial.len() != nvars {
                return Err(err(format!("monomial must have {nvars} exponents")));
            }
            if !t.coeff.is_finite() {
                return Err(err("non-finite coefficient"));
            }
        }
        Ok(RealPoly::from_terms(nvars, self.terms.iter().map(|t| (t.monomial.clone(), t.coeff))))
    }

    fn reals(&self, v: &Option<Vec<f64>>, what: &str) -> Result<Vec<C64>, GeometryError> {
        match v {
            None => Ok(vec![C64::from(0.0); self.n]),
            Some(v) if v.len() == 2 * self.n => Ok(v.chunks(2).map(|p| C64::new(p[0], p[1])).collect()),
            Some(_) => Err(err(format!("{what} must have 2n real entries"))),
        }
    }

    fn radius(&self) -> Result<f64, GeometryError> {
        match self.radius {
            None => Ok(1.0),
            Some(r) if r > 0.0 && r.is_finite() => Ok(r),
            Some(_) => Err(err("radius must be positive")),
        }
    }

    fn bbox(&self) -> Result<(Vec<f64>, Vec<f64>), GeometryError> {
        let [lo, hi] = self.bbox.clone().ok_or_else(|| err("polynomial domain needs a box"))?;
        if lo.len() != 2 * self.n || hi.len() != 2 * self.n || lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(err("box must be [lo, hi] with 2n entries and lo < hi"));
        }
        Ok((lo, hi))
    }

    pub fn metric(&self) -> Result<Box<dyn MetricChart>, GeometryError> {
        Ok(match self.kind.as_str() {
            "euclidean" => Box::new(Euclidean { n: self.n }),
            "ball" => Box::new(ball_metric(self.n)),
            "hopf" => Box::new(hopf_metric(self.n)),
            "polynomial" => Box::new(Conformal { factor: PolyFactor { n: self.n, poly: self.poly(2 * self.n)? } }),
            k => return Err(err(format!("unknown metric kind {k:?}"))),
        })
    }

    /// A family of domains; static kinds ignore `t`.
    pub fn family(&self) -> Result<Box<dyn DefiningFunction>, GeometryError> {
        let n = self.n;
        let f = match self.kind.as_str() {
            "ball" | "static" => PolyFamily::static_ball(n, &self.reals(&self.center, "center")?, self.radius()?),
            "translation" => {
                if self.direction.is_none() {
                    return Err(err("translation needs a direction"));
                }
                PolyFamily::translation(n, &self.reals(&self.direction, "direction")?, self.radius()?)
            }
            "radial" => PolyFamily::radial(n, self.radius()?),
            "quartic" => PolyFamily::quartic(n, &self.reals(&self.direction, "direction")?),
            "polynomial" => {
                let (lo, hi) = self.bbox()?;
                let nv = self.terms.first().map_or(0, |t| t.monomial.len());
                if nv == 2 * n {
                    PolyFamily::static_poly(n, &self.poly(2 * n)?, lo, hi)
                } else {
                    PolyFamily::new(n, self.poly(2 * n + 2)?, lo, hi)
                }
            }
            k => return Err(err(format!("unknown domain kind {k:?}"))),
        };
        Ok(if self.rescale { Box::new(Rescaled { inner: f }) } else { Box::new(f) })
    }
}
