//! Polynomials in e₁..e_d with rational coefficients, for symmetric-power parts.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lin::Lin;
use crate::qlinalg::{QMatrix, Q};

/// Exponent vector of a monomial in e₁..e_d.
pub type Mono = Vec<u32>;

pub type Poly = Lin<Mono>;

pub fn zero_mono(d: usize) -> Mono {
    vec![0; d]
}

pub fn one(d: usize) -> Poly {
    Poly::single(zero_mono(d), Q::one())
}

pub fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn mono_degree(m: &Mono) -> u32 {
    m.iter().sum()
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            out.add_term(mono_mul(ma, mb), ca * cb);
        }
    }
    out
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// The linear form Σ v_j e_j.
pub fn linear(v: &[Q]) -> Poly {
    let d = v.len();
    let mut out = Poly::new();
    for (j, c) in v.iter().enumerate() {
        let mut m = zero_mono(d);
        m[j] = 1;
        out.add_term(m, c.clone());
    }
    out
}

pub fn pow(p: &Poly, n: u32, d: usize) -> Poly {
    (0..n).fold(one(d), |acc, _| mul(&acc, p))
}

/// v^m / m! for the linear form v.
pub fn divided_power(v: &[Q], m: u32) -> Poly {
    pow(&linear(v), m, v.len()).scaled(&Q::new(BigInt::one(), factorial(m)))
}

/// ∏ v_i^{n_i−1}/(n_i−1)!.
pub fn divided_power_product(vs: &[Vec<Q>], ns: &[u32], d: usize) -> Poly {
    vs.iter().zip(ns).fold(one(d), |acc, (v, &n)| mul(&acc, &divided_power(v, n - 1)))
}

/// Substitution e_j ↦ A e_j (the j-th column of A).
pub fn act(a: &QMatrix, p: &Poly) -> Poly {
    let d = a.nrows();
    let cols: Vec<Poly> = a.to_cols().iter().map(|c| linear(c)).collect();
    let mut out = Poly::new();
    for (m, c) in p.iter() {
        let mut term = one(d);
        for (j, &e) in m.iter().enumerate() {
            term = mul(&term, &pow(&cols[j], e, d));
        }
        out.add_scaled(&term, c);
    }
    out
}

/// Block embedding of monomials in d₁ and d₂ variables into d₁ + d₂ variables.
pub fn concat_mono(a: &Mono, b: &Mono) -> Mono {
    a.iter().chain(b).cloned().collect()
}

pub fn fmt_mono(m: &Mono) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("e{}", i + 1) } else { format!("e{}^{}", i + 1, e) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}
