//! Parsing of command-line values and deterministic JSON emission.

use super::CliError;
use crate::lie::{qi_rat, Qi, SquareMatrix};
use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::Value;
use std::fmt::Write;

/// JSON text with keys in map order and floats at 17 significant digits.
pub fn emit(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, 0);
    s.push('\n');
    s
}

fn write_value(s: &mut String, v: &Value, indent: usize) {
    let pad = |s: &mut String, k: usize| s.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => s.push_str("null"),
        Value::Bool(b) => s.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                s.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                s.push_str(&n.to_string());
            }
        }
        Value::String(t) => s.push_str(&Value::String(t.clone()).to_string()),
        Value::Array(a) => {
            if inline(v) {
                s.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    write_value(s, x, indent);
                }
                s.push(']');
                return;
            }
            s.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(s, indent + 1);
                write_value(s, x, indent + 1);
                s.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(s, indent);
            s.push(']');
        }
        Value::Object(m) => {
            s.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(s, indent + 1);
                let _ = write!(s, "{}: ", Value::String(k.clone()));
                write_value(s, x, indent + 1);
                s.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(s, indent);
            s.push('}');
        }
    }
}

/// Object-free arrays short enough for one line.
fn inline(v: &Value) -> bool {
    fn scan(v: &Value, len: &mut usize) -> bool {
        match v {
            Value::Object(_) => false,
            Value::Array(a) => {
                *len += 2 * a.len() + 2;
                a.iter().all(|x| scan(x, len))
            }
            Value::Number(_) => {
                *len += 24;
                true
            }
            Value::String(t) => {
                *len += t.len() + 2;
                true
            }
            _ => {
                *len += 5;
                true
            }
        }
    }
    let mut len = 0;
    scan(v, &mut len) && (len <= 100 || v.as_array().is_some_and(|a| a.iter().all(|x| !x.is_array())))
}

/// 17 significant digits; non-finite values become `null`.
pub fn float(x: f64) -> String {
    if x == 0.0 {
        // No negative zero.
        format!("{:.16e}", 0.0)
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

pub fn parse_reals(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Validation(format!("{what}: cannot parse {p:?}")))
        })
        .collect()
}

pub fn parse_complex(s: &str, what: &str) -> Result<C64, CliError> {
    match parse_reals(s, what)?.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(CliError::Validation(format!("{what}: expected re or re,im"))),
    }
}

/// `"x1,x2,…;y1,y2,…"`.
pub fn parse_points(s: &str, what: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| parse_reals(p, what)).collect()
}

pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| CliError::Validation(format!("bad rational {s:?}")))?;
        let b: BigInt = b.trim().parse().map_err(|_| CliError::Validation(format!("bad rational {s:?}")))?;
        if b == BigInt::from(0) {
            return Err(CliError::Validation(format!("zero denominator in {s:?}")));
        }
        Ok(BigRational::new(a, b))
    } else {
        let a: BigInt = s.parse().map_err(|_| CliError::Validation(format!("bad rational {s:?}")))?;
        Ok(BigRational::from_integer(a))
    }
}

fn rational_value(v: &Value) -> Result<BigRational, CliError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap_or(0).into())),
        _ => Err(CliError::Validation(format!("expected a rational string, got {v}"))),
    }
}

/// An entry is a rational (string or integer), or a `[re, im]` pair of them.
fn entry(v: &Value) -> Result<Qi, CliError> {
    match v {
        Value::Array(p) if p.len() == 2 => Ok(qi_rat(rational_value(&p[0])?, rational_value(&p[1])?)),
        _ => Ok(qi_rat(rational_value(v)?, BigRational::from_integer(0.into()))),
    }
}

pub fn matrix_from_json(v: &Value, n: Option<usize>) -> Result<SquareMatrix, CliError> {
    let rows = v.as_array().ok_or_else(|| CliError::Validation("matrix must be an array of rows".into()))?;
    let size = rows.len();
    if n.is_some_and(|n| n != size) || size == 0 {
        return Err(CliError::Validation(format!("matrix has {size} rows, expected {n:?}")));
    }
    let mut m = SquareMatrix::zeros(size, size);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == size).ok_or_else(|| {
            CliError::Validation(format!("row {i} must have {size} entries"))
        })?;
        for (j, e) in r.iter().enumerate() {
            m[(i, j)] = entry(e)?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &SquareMatrix) -> Value {
    let n = m.n();
    Value::Array(
        (0..n)
            .map(|i| Value::Array((0..n).map(|j| qi_to_json(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn qi_to_json(x: &Qi) -> Value {
    Value::Array(vec![Value::String(x.re.to_string()), Value::String(x.im.to_string())])
}

pub fn bigint_json(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(float(-1.0), "-1.0000000000000000e0");
        assert_eq!(float(f64::NAN), "null");
        let v: Value = serde_json::from_str(&float(0.1)).unwrap();
        assert_eq!(v.as_f64(), Some(0.1));
    }

    #[test]
    fn matrix_round_trip() {
        let v: Value = serde_json::from_str(r#"[[1, ["1/2", "-3"]], ["0", 2]]"#).unwrap();
        let m = matrix_from_json(&v, Some(2)).unwrap();
        assert_eq!(matrix_from_json(&matrix_to_json(&m), None).unwrap(), m);
        assert!(matrix_from_json(&v, Some(3)).is_err());
    }
}
