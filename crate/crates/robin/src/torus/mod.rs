//! Exact model of the Grauert torus `T = (R²/Z²) × (R²/[(1,0),(ξ,1)])` and of the
//! foliations cut out by complex lines `w = (a + ib) z`.
//!
//! Real coordinates are `(x1, x2)` on the first factor and `(x3, x4)` on the
//! second, `z = x1 + i x3`, `w = x2 + i x4`. The number ξ is a formal
//! transcendental, so every scalar lives in ℚ(ξ).

mod curve;

pub use curve::autc_integral_curve;

use crate::poly::{Poly, RatFunc};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Element of ℚ(ξ).
pub type AlgebraicScalar = RatFunc<BigRational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("gcd condition violated: {0}")]
    GcdViolation(String),
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("no six-tuple of height <= {0} reproduces the direction")]
    SearchExhausted(u32),
    #[error("direction is not of the six-integer form: {0}")]
    NotRepresentable(String),
    #[error("degenerate vector field: alpha = beta = 0")]
    Degenerate,
    #[error("exact identity failed: {0}")]
    Contract(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// The formal irrational ξ.
pub fn xi() -> AlgebraicScalar {
    AlgebraicScalar::x()
}

pub fn scalar(n: i64, d: i64) -> AlgebraicScalar {
    AlgebraicScalar::constant(rat(n, d))
}

fn sc(q: BigRational) -> AlgebraicScalar {
    AlgebraicScalar::constant(q)
}

/// `c0 + c1 ξ`.
fn linear(c0: BigRational, c1: BigRational) -> AlgebraicScalar {
    AlgebraicScalar::from_poly(Poly::new(vec![c0, c1]))
}

/// Integers `(m, n, m', n', p, q)` parameterizing a direction with `b ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SixTuple {
    pub m: BigInt,
    pub n: BigInt,
    pub mp: BigInt,
    pub np: BigInt,
    pub p: BigInt,
    pub q: BigInt,
}

impl SixTuple {
    pub fn new(m: i64, n: i64, mp: i64, np: i64, p: i64, q: i64) -> Result<Self, TorusError> {
        Self::from_big([m, n, mp, np, p, q].map(BigInt::from))
    }

    pub fn from_big([m, n, mp, np, p, q]: [BigInt; 6]) -> Result<Self, TorusError> {
        if !np.is_positive() || !p.is_positive() || !q.is_positive() {
            return Err(TorusError::InvalidTuple("n', p, q must be positive".into()));
        }
        if n.is_zero() {
            return Err(TorusError::InvalidTuple(
                "n = 0 leaves the translate (1/n, 0) undefined".into(),
            ));
        }
        for (x, y, name) in [(&m, &n, "(m,n)"), (&mp, &np, "(m',n')"), (&p, &q, "(p,q)")] {
            if !x.gcd(y).is_one() {
                return Err(TorusError::GcdViolation(format!("{name} = ({x},{y})")));
            }
        }
        Ok(SixTuple { m, n, mp, np, p, q })
    }

    pub fn as_array(&self) -> [BigInt; 6] {
        [
            self.m.clone(),
            self.n.clone(),
            self.mp.clone(),
            self.np.clone(),
            self.p.clone(),
            self.q.clone(),
        ]
    }

    /// `M' = m' + n' ξ`.
    pub fn m_prime(&self) -> AlgebraicScalar {
        linear(int(&self.mp), int(&self.np))
    }

    /// `(p1, p2, q1, q2) = (M'p, n'p, mq, nq)`.
    fn pq_parts(&self) -> [AlgebraicScalar; 4] {
        let p = sc(int(&self.p));
        let q = sc(int(&self.q));
        [
            &self.m_prime() * &p,
            sc(int(&(&self.np * &self.p))),
            &sc(int(&self.m)) * &q,
            sc(int(&(&self.n * &self.q))),
        ]
    }
}

impl fmt::Display for SixTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            self.m, self.n, self.mp, self.np, self.p, self.q
        )
    }
}

/// Slope data `(a, b)` of the line `w = (a + ib) z`.
pub fn direction_from_tuple(t: &SixTuple) -> (AlgebraicScalar, AlgebraicScalar) {
    let [p1, p2, q1, q2] = t.pq_parts();
    let den = &(&p1 * &p1) + &(&q1 * &q1);
    let a = &(&(&p1 * &p2) + &(&q1 * &q2)) / &den;
    let b = &(&(&p2 * &q1) - &(&p1 * &q2)) / &den;
    (a, b)
}

/// A real vector field `Σ c_k ∂/∂x_k` with constant coefficients.
pub type VectorField = [AlgebraicScalar; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct FoliationData {
    pub tuple: SixTuple,
    pub a: AlgebraicScalar,
    pub b: AlgebraicScalar,
    pub big_a: AlgebraicScalar,
    pub big_b: AlgebraicScalar,
    pub big_c: AlgebraicScalar,
    /// Direction `(m, n)` of the closed curve `l1` in the first factor.
    pub l1_dir: (BigInt, BigInt),
    /// Direction `(M', n')` of `l2` in the second factor.
    pub l2_dir: (AlgebraicScalar, BigInt),
    pub generators: [VectorField; 3],
    pub d: AlgebraicScalar,
    pub eta: AlgebraicScalar,
}

pub fn foliation_data(t: &SixTuple) -> Result<FoliationData, TorusError> {
    let (a, b) = direction_from_tuple(t);
    if b.is_zero() {
        return Err(TorusError::Contract("b vanished for a valid tuple".into()));
    }
    let big_a = &a / &b;
    let big_b = -&b.inv();
    let big_c = &(&(&a * &a) + &(&b * &b)) / &b;
    let jac = &(-&(&big_a * &big_a)) - &(&big_b * &big_c);
    if jac != AlgebraicScalar::one() {
        return Err(TorusError::Contract(format!("-A^2 - BC = {jac}")));
    }
    let [p1, p2, q1, q2] = t.pq_parts();
    let delta = &(&p2 * &q1) - &(&p1 * &q2);
    let z = AlgebraicScalar::zero();
    let generators = [
        [q1.clone(), q2.clone(), z.clone(), z.clone()],
        [z.clone(), z.clone(), p1.clone(), p2.clone()],
        [
            delta.clone(),
            z.clone(),
            &(&p1 * &p2) + &(&q1 * &q2),
            &(&p2 * &p2) + &(&q2 * &q2),
        ],
    ];
    let p = sc(int(&t.p));
    let nn = sc(int(&(&t.n * &t.np)));
    let eta = &(&(&p / &nn) * &(&(&p2 * &p2) + &(&q2 * &q2))) / &delta;
    let d = sc(BigRational::new(BigInt::one(), &t.p * &t.np));
    Ok(FoliationData {
        tuple: t.clone(),
        a,
        b,
        big_a,
        big_b,
        big_c,
        l1_dir: (t.m.clone(), t.n.clone()),
        l2_dir: (t.m_prime(), t.np.clone()),
        generators,
        d,
        eta,
    })
}

impl FoliationData {
    /// `F(x1, x2) = (A x1 + B x2, C x1 − A x2)`.
    pub fn f_apply(
        &self,
        x1: &AlgebraicScalar,
        x2: &AlgebraicScalar,
    ) -> (AlgebraicScalar, AlgebraicScalar) {
        (
            &(&self.big_a * x1) + &(&self.big_b * x2),
            &(&self.big_c * x1) - &(&self.big_a * x2),
        )
    }

    /// `F⁻¹(x3, x4) = (−A x3 − B x4, −C x3 + A x4)`.
    pub fn f_inverse(
        &self,
        x3: &AlgebraicScalar,
        x4: &AlgebraicScalar,
    ) -> (AlgebraicScalar, AlgebraicScalar) {
        (
            &(-&(&self.big_a * x3)) - &(&self.big_b * x4),
            &(&self.big_a * x4) - &(&self.big_c * x3),
        )
    }

    /// Whether `x` lies on the plane `S` through the origin.
    pub fn on_plane(&self, x: &[AlgebraicScalar; 4]) -> bool {
        let (x3, x4) = self.f_apply(&x[0], &x[1]);
        x3 == x[2] && x4 == x[3]
    }

    /// The two marked points of `S`:
    /// `(q(m,n), p(M',n'))` and `(p(1/n,0), q(1/n',0) + η(M',n'))`.
    pub fn marked_points(&self) -> [[AlgebraicScalar; 4]; 2] {
        let t = &self.tuple;
        let (p, q) = (sc(int(&t.p)), sc(int(&t.q)));
        let (m, n) = (sc(int(&t.m)), sc(int(&t.n)));
        let mp = t.m_prime();
        let np = sc(int(&t.np));
        [
            [&q * &m, &q * &n, &p * &mp, &p * &np],
            [
                &p / &n,
                AlgebraicScalar::zero(),
                &(&q / &np) + &(&self.eta * &mp),
                &self.eta * &np,
            ],
        ]
    }

    /// Leaf invariant `X(x) = q n (x1 − x2 m/n) − p n' (x3 − x4 M'/n')`.
    ///
    /// A point lies in `Σ(t)` iff `X(x) − q n t` is an integer: the first factor
    /// forces `n·int1 − p s ∈ Z`, the second `n'·int2 − q s ∈ Z`, and the two are
    /// compatible for some `s` iff the combination above is integral.
    pub fn leaf_invariant(&self, x: &[AlgebraicScalar; 4]) -> AlgebraicScalar {
        let t = &self.tuple;
        let (m, n) = (sc(int(&t.m)), sc(int(&t.n)));
        let np = sc(int(&t.np));
        let int1 = &x[0] - &(&(&x[1] * &m) / &n);
        let int2 = &x[2] - &(&(&x[3] * &t.m_prime()) / &np);
        let qn = sc(int(&(&t.q * &t.n)));
        let pnp = sc(int(&(&t.p * &t.np)));
        &(&qn * &int1) - &(&pnp * &int2)
    }

    /// Whether `x` lies on the leaf `Σ(t) = (t,0;0,0) + Σ`.
    pub fn in_leaf(&self, x: &[AlgebraicScalar; 4], t: &BigRational) -> bool {
        let shifted = [
            &x[0] - &sc(t.clone()),
            x[1].clone(),
            x[2].clone(),
            x[3].clone(),
        ];
        self.leaf_invariant(&shifted)
            .as_constant()
            .is_some_and(|c| c.is_integer())
    }

    /// Whether `Σ(t)` and `Σ(t')` are the same leaf, tested by membership of a
    /// representative of `Σ(t')` in `Σ(t)`. Distinct cosets are disjoint.
    pub fn same_leaf(&self, t: &BigRational, t2: &BigRational) -> bool {
        let rep = [
            sc(t2.clone()),
            AlgebraicScalar::zero(),
            AlgebraicScalar::zero(),
            AlgebraicScalar::zero(),
        ];
        self.in_leaf(&rep, t)
    }
}

/// `Σ(t) ∩ Σ(t') = ∅`, decided by the leaf-membership test.
pub fn sigma_t_disjoint(fd: &FoliationData, t: &BigRational, t2: &BigRational) -> bool {
    !fd.same_leaf(t, t2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectionCase {
    /// `α = 0`: the field is a pure `w`-translation.
    AlphaZero,
    /// `β = 0`.
    BetaZero,
    /// `b = 0`, `a = q/p` rational, `p > 0`, `gcd(p, q) = 1`.
    RationalSlope { p: BigInt, q: BigInt },
    /// `b = 0`, `a` irrational with `1/a − ξ = p/q`, `q > 0`.
    XiRationalSlope { p: BigInt, q: BigInt },
    /// `b = 0` and `1/a − ξ` irrational: no such non-Stein domain exists.
    CannotOccur,
    /// `b ≠ 0`, with the recovered six-tuple.
    BNonzero(SixTuple),
}

impl DirectionCase {
    pub fn tag(&self) -> &'static str {
        match self {
            DirectionCase::AlphaZero => "alpha_zero",
            DirectionCase::BetaZero => "beta_zero",
            DirectionCase::RationalSlope { .. } => "b_zero_rational",
            DirectionCase::XiRationalSlope { .. } => "b_zero_xi_rational",
            DirectionCase::CannotOccur => "b_zero_cannot_occur",
            DirectionCase::BNonzero(_) => "b_nonzero",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusDirection {
    pub a: AlgebraicScalar,
    pub b: AlgebraicScalar,
    pub case: DirectionCase,
}

pub const DEFAULT_HEIGHT: u32 = 50;

/// Classify `w = (a + ib) z`; tuple recovery searches `|m|, |n| ≤ height`.
pub fn classify_direction(
    a: &AlgebraicScalar,
    b: &AlgebraicScalar,
    height: u32,
) -> Result<TorusDirection, TorusError> {
    let case = if b.is_zero() {
        classify_b_zero(a)
    } else {
        DirectionCase::BNonzero(recover_tuple(a, b, height)?)
    };
    Ok(TorusDirection {
        a: a.clone(),
        b: b.clone(),
        case,
    })
}

/// Classify the field `α ∂/∂z + β ∂/∂w` given as complex pairs `(re, im)`.
pub fn classify_field(
    alpha: (&AlgebraicScalar, &AlgebraicScalar),
    beta: (&AlgebraicScalar, &AlgebraicScalar),
    height: u32,
) -> Result<TorusDirection, TorusError> {
    let a_zero = alpha.0.is_zero() && alpha.1.is_zero();
    let b_zero = beta.0.is_zero() && beta.1.is_zero();
    match (a_zero, b_zero) {
        (true, true) => Err(TorusError::Degenerate),
        (true, false) => Ok(TorusDirection {
            a: AlgebraicScalar::zero(),
            b: AlgebraicScalar::zero(),
            case: DirectionCase::AlphaZero,
        }),
        _ => {
            // β/α = (β_r + iβ_i)(α_r − iα_i)/|α|²
            let norm = &(alpha.0 * alpha.0) + &(alpha.1 * alpha.1);
            let re = &(&(beta.0 * alpha.0) + &(beta.1 * alpha.1)) / &norm;
            let im = &(&(beta.1 * alpha.0) - &(beta.0 * alpha.1)) / &norm;
            classify_direction(&re, &im, height)
        }
    }
}

fn classify_b_zero(a: &AlgebraicScalar) -> DirectionCase {
    if a.is_zero() {
        return DirectionCase::BetaZero;
    }
    if let Some(c) = a.as_constant() {
        let (q, p) = (c.numer().clone(), c.denom().clone());
        return DirectionCase::RationalSlope { p, q };
    }
    match (&a.inv() - &xi()).as_constant() {
        Some(r) => DirectionCase::XiRationalSlope {
            p: r.numer().clone(),
            q: r.denom().clone(),
        },
        None => DirectionCase::CannotOccur,
    }
}

/// `Some((c0, c1))` when `x = c0 + c1 ξ`.
fn as_linear(x: &AlgebraicScalar) -> Option<(BigRational, BigRational)> {
    let p = x.as_poly()?;
    (p.degree().unwrap_or(0) <= 1).then(|| (p.coeff(0), p.coeff(1)))
}

fn rational_gcd(x: &BigRational, y: &BigRational) -> BigRational {
    let num = (x.numer() * y.denom()).gcd(&(y.numer() * x.denom()));
    BigRational::new(num, x.denom() * y.denom())
}

fn recover_tuple(
    a: &AlgebraicScalar,
    b: &AlgebraicScalar,
    height: u32,
) -> Result<SixTuple, TorusError> {
    let big_a = a / b;
    let big_b = -&b.inv();
    let big_c = &(&(a * a) + &(b * b)) / b;
    // For a valid tuple both 1/C and A/C are degree-one polynomials in ξ.
    for (name, v) in [("1/C", big_c.inv()), ("A/C", &big_a / &big_c)] {
        match as_linear(&v) {
            Some((_, c1)) if !c1.is_zero() => {}
            _ => return Err(TorusError::NotRepresentable(format!("{name} = {v}"))),
        }
    }
    let h = height as i64;
    for mag in 1..=h {
        for m in -mag..=mag {
            for n in -mag..=mag {
                if n == 0 || m.abs().max(n.abs()) != mag || m.gcd(&n) != 1 {
                    continue;
                }
                let (mq, nq) = (scalar(m, 1), scalar(n, 1));
                let y3 = &(&big_a * &mq) + &(&big_b * &nq);
                let y4 = &(&big_c * &mq) - &(&big_a * &nq);
                let (Some((c0, c1)), Some(y4)) = (as_linear(&y3), y4.as_constant()) else {
                    continue;
                };
                if !y4.is_positive() || c1 != y4 {
                    continue;
                }
                // F(m,n) = r (M', n') with r = p/q, gcd(m', n') = 1, n' > 0.
                let r = if c0.is_zero() { y4.clone() } else { rational_gcd(&c0, &y4) };
                let mp = &c0 / &r;
                let np = &y4 / &r;
                if !mp.is_integer() || !np.is_integer() {
                    continue;
                }
                let cand = SixTuple::from_big([
                    BigInt::from(m),
                    BigInt::from(n),
                    mp.to_integer(),
                    np.to_integer(),
                    r.numer().clone(),
                    r.denom().clone(),
                ]);
                let Ok(cand) = cand else { continue };
                let in_height = cand
                    .as_array()
                    .iter()
                    .all(|x| x.abs() <= BigInt::from(height));
                if in_height && direction_from_tuple(&cand) == (a.clone(), b.clone()) {
                    return Ok(cand);
                }
            }
        }
    }
    Err(TorusError::SearchExhausted(height))
}

/// Serialize as `num:[c0,c1,...];den:[d0,d1,...]`, coefficients lowest degree first.
pub fn to_coeff_string(x: &AlgebraicScalar) -> String {
    let list = |p: &Poly<BigRational>| {
        let v: Vec<String> = if p.is_zero() {
            vec!["0".into()]
        } else {
            p.coeffs().iter().map(|c| c.to_string()).collect()
        };
        v.join(",")
    };
    format!("num:[{}];den:[{}]", list(x.num()), list(x.den()))
}

pub fn parse_coeff_string(s: &str) -> Result<AlgebraicScalar, TorusError> {
    let err = || TorusError::Parse(format!("expected num:[..];den:[..], got {s:?}"));
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = s.split_once(';').ok_or_else(err)?;
    let list = |part: &str, key: &str| -> Result<Poly<BigRational>, TorusError> {
        let inner = part
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('['))
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        let coeffs = inner
            .split(',')
            .filter(|c| !c.is_empty())
            .map(|c| c.parse::<BigRational>().map_err(|e| TorusError::Parse(format!("{c}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    };
    let (num, den) = (list(num, "num:")?, list(den, "den:")?);
    if den.is_zero() {
        return Err(TorusError::Parse("zero denominator".into()));
    }
    Ok(AlgebraicScalar::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SixTuple {
        SixTuple::new(1, 1, 0, 1, 1, 1).unwrap()
    }

    fn lin(c0: i64, c1: i64) -> AlgebraicScalar {
        linear(rat(c0, 1), rat(c1, 1))
    }

    #[test]
    fn sample_tuple_slopes() {
        let (a, b) = direction_from_tuple(&sample());
        let den = AlgebraicScalar::from_poly(Poly::new(vec![rat(1, 1), rat(0, 1), rat(1, 1)]));
        assert_eq!(a, &lin(1, 1) / &den);
        assert_eq!(b, &lin(1, -1) / &den);
        let fd = foliation_data(&sample()).unwrap();
        assert_eq!(fd.big_a, &lin(1, 1) / &lin(1, -1));
        assert_eq!(fd.big_c, &scalar(2, 1) / &lin(1, -1));
        assert_eq!(fd.eta, &scalar(2, 1) / &lin(1, -1));
        assert_eq!(fd.d, scalar(1, 1));
    }

    #[test]
    fn f_maps_lattice_direction() {
        let fd = foliation_data(&sample()).unwrap();
        let one = scalar(1, 1);
        assert_eq!(fd.f_apply(&one, &one), (xi(), one.clone()));
        let z = AlgebraicScalar::zero();
        assert_eq!(fd.f_apply(&z, &z), (z.clone(), z));
    }

    #[test]
    fn tuple_validation() {
        assert!(matches!(
            SixTuple::new(2, 4, 0, 1, 1, 1),
            Err(TorusError::GcdViolation(_))
        ));
        assert!(matches!(
            SixTuple::new(1, 1, 0, 0, 1, 1),
            Err(TorusError::InvalidTuple(_))
        ));
        assert!(SixTuple::new(1, 0, 0, 1, 1, 1).is_err());
    }

    #[test]
    fn classify_b_zero_cases() {
        let d = classify_direction(&scalar(1, 2), &AlgebraicScalar::zero(), 10).unwrap();
        assert_eq!(
            d.case,
            DirectionCase::RationalSlope {
                p: 2.into(),
                q: 1.into()
            }
        );
        let d = classify_direction(&xi(), &AlgebraicScalar::zero(), 10).unwrap();
        assert_eq!(d.case, DirectionCase::CannotOccur);
        // 1/a − ξ = 3/2
        let a = (&xi() + &scalar(3, 2)).inv();
        let d = classify_direction(&a, &AlgebraicScalar::zero(), 10).unwrap();
        assert_eq!(
            d.case,
            DirectionCase::XiRationalSlope {
                p: 3.into(),
                q: 2.into()
            }
        );
    }

    #[test]
    fn classify_rejects_non_tuple_directions() {
        let r = classify_direction(&xi(), &scalar(1, 1), 10);
        assert!(matches!(r, Err(TorusError::NotRepresentable(_))));
    }

    #[test]
    fn field_classification() {
        let z = AlgebraicScalar::zero();
        let one = scalar(1, 1);
        assert_eq!(
            classify_field((&z, &z), (&one, &z), 5).unwrap().case,
            DirectionCase::AlphaZero
        );
        assert_eq!(
            classify_field((&one, &z), (&z, &z), 5).unwrap().case,
            DirectionCase::BetaZero
        );
        assert_eq!(classify_field((&z, &z), (&z, &z), 5), Err(TorusError::Degenerate));
    }

    #[test]
    fn coeff_string_round_trip() {
        let (a, _) = direction_from_tuple(&sample());
        let s = to_coeff_string(&a);
        assert_eq!(s, "num:[1,1];den:[1,0,1]");
        assert_eq!(parse_coeff_string(&s).unwrap(), a);
        assert!(parse_coeff_string("num:[1];den:[0]").is_err());
    }
}
