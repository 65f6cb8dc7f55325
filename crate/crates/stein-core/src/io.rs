//! JSON encodings. Rationals are "p/q" strings (plain integers are accepted
//! on input), vectors are arrays, apartments are arrays of vectors.

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::barcplx::BarElement;
use crate::poly::{zero_mono, Mono, Poly};
use crate::qlinalg::{fmt_q, int_to_q, parse_q, QVector, Q};
use crate::st2::St2Element;
use crate::steinberg::SteinbergElement;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational: {0}")]
    Rational(String),
    #[error("inconsistent dimensions: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("empty input: cannot infer the ambient dimension")]
    Empty,
    #[error("{0}")]
    Invalid(String),
}

pub fn q_from_value(v: &Value) -> Result<Q, IoError> {
    match v {
        Value::String(s) => parse_q(s).map_err(|_| IoError::Rational(s.clone())),
        Value::Number(n) => {
            let s = n.to_string();
            parse_q(&s).map_err(|_| IoError::Rational(s))
        }
        other => Err(IoError::Rational(other.to_string())),
    }
}

pub fn vector_from_value(v: &Value) -> Result<QVector, IoError> {
    match v {
        Value::Array(xs) => xs.iter().map(q_from_value).collect(),
        other => Err(IoError::Invalid(format!("expected an array, found {other}"))),
    }
}

pub fn vectors_from_value(v: &Value) -> Result<Vec<QVector>, IoError> {
    match v {
        Value::Array(xs) => xs.iter().map(vector_from_value).collect(),
        other => Err(IoError::Invalid(format!("expected an array of vectors, found {other}"))),
    }
}

pub fn vector_to_value(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn check_dims(vs: &[QVector], d: &mut Option<usize>) -> Result<(), IoError> {
    for v in vs {
        match d {
            None => *d = Some(v.len()),
            Some(e) if *e != v.len() => return Err(IoError::Dimension { expected: *e, found: v.len() }),
            _ => {}
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ApartmentTerm {
    coeff: Value,
    apartment: Value,
}

/// `[{coeff, apartment}]` or a bare apartment `[[..], ..]`.
pub fn parse_steinberg(json: &str) -> Result<SteinbergElement, IoError> {
    let v: Value = serde_json::from_str(json)?;
    let items: Vec<(Q, Vec<QVector>)> = match &v {
        Value::Array(xs) if xs.iter().all(|x| x.is_object()) && !xs.is_empty() => xs
            .iter()
            .map(|x| {
                let t: ApartmentTerm = serde_json::from_value(x.clone())?;
                Ok((q_from_value(&t.coeff)?, vectors_from_value(&t.apartment)?))
            })
            .collect::<Result<_, IoError>>()?,
        Value::Array(_) => vec![(Q::one(), vectors_from_value(&v)?)],
        _ => return Err(IoError::Invalid("expected an array".into())),
    };
    let mut d = None;
    for (_, vs) in &items {
        check_dims(vs, &mut d)?;
    }
    let mut out = SteinbergElement::zero(d.ok_or(IoError::Empty)?);
    for (c, vs) in items {
        out.add_apartment(&vs, c);
    }
    Ok(out)
}

pub fn steinberg_to_value(x: &SteinbergElement) -> Value {
    Value::Array(
        x.terms()
            .iter()
            .map(|(a, c)| {
                serde_json::json!({
                    "coeff": fmt_q(c),
                    "apartment": a.points().iter().map(|p| vector_to_value(&int_to_q(p))).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn poly_to_value(m: &Mono) -> Value {
    serde_json::json!(m)
}

pub fn bar_to_value(x: &BarElement) -> Value {
    Value::Array(
        x.lines()
            .iter()
            .map(|((w, m), c)| {
                serde_json::json!({
                    "coeff": fmt_q(c),
                    "word": w.iter().map(|p| vector_to_value(&int_to_q(p))).collect::<Vec<_>>(),
                    "mono": poly_to_value(m),
                })
            })
            .collect(),
    )
}

/// `[{coeff, word, mono?}]`; `mono` is an exponent vector, defaulting to 1.
pub fn parse_bar(json: &str) -> Result<BarElement, IoError> {
    let v: Vec<Value> = serde_json::from_str(json)?;
    let mut d = None;
    let mut items = Vec::new();
    for t in &v {
        let c = q_from_value(t.get("coeff").ok_or_else(|| IoError::Invalid("missing coeff".into()))?)?;
        let w = vectors_from_value(t.get("word").ok_or_else(|| IoError::Invalid("missing word".into()))?)?;
        check_dims(&w, &mut d)?;
        let m: Option<Mono> = t.get("mono").map(|m| serde_json::from_value(m.clone())).transpose()?;
        items.push((c, w, m));
    }
    let d = d.ok_or(IoError::Empty)?;
    let mut out = BarElement::zero(d);
    for (c, w, m) in items {
        out.add_vectors(&w, m.unwrap_or_else(|| zero_mono(d)), c);
    }
    Ok(out)
}

pub fn st2_to_value(x: &St2Element) -> Value {
    Value::Array(
        x.terms()
            .iter()
            .map(|((a, b, m), c)| {
                serde_json::json!({
                    "coeff": fmt_q(c),
                    "apartmentA": a.points().iter().map(|p| vector_to_value(&int_to_q(p))).collect::<Vec<_>>(),
                    "apartmentB": b.points().iter().map(|p| vector_to_value(&int_to_q(p))).collect::<Vec<_>>(),
                    "sympoly": [{"coeff": "1", "mono": m}],
                })
            })
            .collect(),
    )
}

/// `[{coeff, apartmentA, apartmentB, sympoly?}]` with `sympoly` a list of
/// `{coeff, mono}`; absent means the constant 1.
pub fn parse_st2(json: &str) -> Result<St2Element, IoError> {
    let v: Vec<Value> = serde_json::from_str(json)?;
    let mut d = None;
    let mut items = Vec::new();
    for t in &v {
        let field = |k: &str| t.get(k).ok_or_else(|| IoError::Invalid(format!("missing {k}")));
        let c = q_from_value(field("coeff")?)?;
        let a = vectors_from_value(field("apartmentA")?)?;
        let b = vectors_from_value(field("apartmentB")?)?;
        check_dims(&a, &mut d)?;
        check_dims(&b, &mut d)?;
        let sp = t.get("sympoly").cloned();
        items.push((c, a, b, sp));
    }
    let d = d.ok_or(IoError::Empty)?;
    let mut out = St2Element::zero(d);
    for (c, a, b, sp) in items {
        let mut p = Poly::new();
        match sp {
            None => p = crate::poly::one(d),
            Some(Value::Array(terms)) => {
                for t in terms {
                    let pc = q_from_value(t.get("coeff").ok_or_else(|| IoError::Invalid("missing coeff".into()))?)?;
                    let m: Mono = serde_json::from_value(t.get("mono").cloned().unwrap_or(Value::Null))?;
                    if m.len() != d {
                        return Err(IoError::Dimension { expected: d, found: m.len() });
                    }
                    p.add_term(m, pc);
                }
            }
            Some(other) => return Err(IoError::Invalid(format!("bad sympoly {other}"))),
        }
        out.add_pair(&a, &b, &p, &c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::qvec;
    use crate::steinberg::normal_form;

    #[test]
    fn steinberg_roundtrip() {
        let x = parse_steinberg(r#"[{"coeff": "2", "apartment": [[1, 0], [1, 1]]}, {"coeff": -1, "apartment": [["1/2", 0], [0, 1]]}]"#).unwrap();
        let back = parse_steinberg(&steinberg_to_value(&x).to_string()).unwrap();
        assert_eq!(back, x);
        let bare = parse_steinberg("[[0, 1], [1, 1]]").unwrap();
        assert_eq!(bare.len(), 1);
        assert!(parse_steinberg("[[0, 1], [1, 1, 2]]").is_err());
        assert!(parse_steinberg("{").is_err());
        assert!(normal_form(&x).len() <= 4);
    }

    #[test]
    fn st2_and_bar_roundtrip() {
        let x = parse_st2(
            r#"[{"coeff": "1/2", "apartmentA": [[1, 0], [1, 1]], "apartmentB": [[0, 1], [1, 0]],
                 "sympoly": [{"coeff": "3", "mono": [1, 0]}]}]"#,
        )
        .unwrap();
        let back = parse_st2(&st2_to_value(&x).to_string()).unwrap();
        assert_eq!(back, x);
        let mut b = BarElement::zero(2);
        b.add_vectors(&[qvec(&[1, 1]), qvec(&[0, 1])], vec![1, 0], Q::one());
        assert_eq!(parse_bar(&bar_to_value(&b).to_string()).unwrap(), b);
    }
}
