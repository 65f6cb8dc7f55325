//! Formal multiple polylogarithms on tori.
//!
//! Arguments are monomials ζ·x^a with ζ a root of unity, stored as a phase in
//! ℚ/ℤ, and a ∈ ℚ^d. Everything is computed modulo the ideal generated by
//! logarithms, so depth-one pieces reduce to a normal form under the
//! distribution and inversion relations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcplx::BarElement;
use crate::lin::Lin;
use crate::poly::{self, binomial, zero_mono, Mono};
use crate::qlinalg::{
    canonical_int, clear_denominators, det, fmt_q, gcd_all, int_to_q, is_independent, parse_q, saturation_index,
    unit_vector, vec_add, vec_neg, vec_scale, QMatrix, QVector, Q,
};
use crate::st2::{is_zero_st_infty_seeded, make_l, s_inverse, St2Element, St2Error};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MplError {
    #[error("exponent vectors are linearly dependent")]
    RankDeficient,
    #[error("operation needs depth at least {0}")]
    DepthTooSmall(usize),
    #[error("operation is implemented for depth {0} only")]
    UnsupportedDepth(usize),
    #[error("iterated integral has more than one nonzero middle argument")]
    MultipleNonzero,
    #[error("iterated integrals have different endpoints")]
    EndpointMismatch,
    #[error("terms have mixed weights")]
    MixedWeights,
    #[error("matrix is singular or not square")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("depth {depth} is below the ambient dimension {ambient}")]
    NotTopDepth { depth: usize, ambient: usize },
    #[error("indices must be positive and match the arguments")]
    BadIndices,
    #[error("iterated integral needs two endpoints")]
    Malformed,
    #[error(transparent)]
    St2(#[from] St2Error),
    #[error("parse error: {0}")]
    Parse(String),
}

fn reduce_phase(q: &Q) -> Q {
    q - q.floor()
}

fn qpow(x: &Q, e: i64) -> Q {
    let mut out = Q::one();
    for _ in 0..e.unsigned_abs() {
        out *= x;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

fn sign_pow(n: u32) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// ζ·x^a with ζ = e^{2πi·phase}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "MonomialJson", into = "MonomialJson")]
pub struct Monomial {
    phase: Q,
    exp: QVector,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonomialJson {
    pub phase: String,
    pub exp: Vec<String>,
}

impl TryFrom<MonomialJson> for Monomial {
    type Error = MplError;
    fn try_from(j: MonomialJson) -> Result<Self, MplError> {
        let phase = parse_q(&j.phase).map_err(|e| MplError::Parse(e.to_string()))?;
        let exp = j
            .exp
            .iter()
            .map(|s| parse_q(s).map_err(|e| MplError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Monomial::new(phase, exp))
    }
}

impl From<Monomial> for MonomialJson {
    fn from(m: Monomial) -> Self {
        MonomialJson { phase: fmt_q(&m.phase), exp: m.exp.iter().map(fmt_q).collect() }
    }
}

impl Monomial {
    pub fn new(phase: Q, exp: QVector) -> Self {
        Monomial { phase: reduce_phase(&phase), exp }
    }

    pub fn from_exp(exp: QVector) -> Self {
        Monomial { phase: Q::zero(), exp }
    }

    pub fn one(d: usize) -> Self {
        Monomial::from_exp(vec![Q::zero(); d])
    }

    pub fn var(d: usize, i: usize) -> Self {
        Monomial::from_exp(unit_vector(d, i))
    }

    pub fn root_of_unity(d: usize, phase: Q) -> Self {
        Monomial::new(phase, vec![Q::zero(); d])
    }

    pub fn phase(&self) -> &Q {
        &self.phase
    }

    pub fn exp(&self) -> &QVector {
        &self.exp
    }

    pub fn ambient(&self) -> usize {
        self.exp.len()
    }

    /// True for pure roots of unity.
    pub fn is_constant(&self) -> bool {
        self.exp.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial::new(&self.phase + &o.phase, vec_add(&self.exp, &o.exp))
    }

    pub fn inv(&self) -> Monomial {
        Monomial::new(-&self.phase, vec_neg(&self.exp))
    }

    pub fn div(&self, o: &Monomial) -> Monomial {
        self.mul(&o.inv())
    }

    /// Value at a point with positive real coordinates, principal branches.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let arg = 2.0 * std::f64::consts::PI * self.phase.to_f64().unwrap_or(0.0);
        let modulus: f64 = self.exp.iter().zip(x).map(|(a, xi)| xi.powf(a.to_f64().unwrap_or(0.0))).product();
        Complex64::from_polar(modulus, arg)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.phase.is_zero() {
            parts.push(format!("ζ^{}", fmt_q(&self.phase)));
        }
        for (i, a) in self.exp.iter().enumerate() {
            if a.is_one() {
                parts.push(format!("x{}", i + 1));
            } else if !a.is_zero() {
                parts.push(format!("x{}^{}", i + 1, fmt_q(a)));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// Li_{n₁..n_k}(m₁..m_k) with independent exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiGen {
    ns: Vec<u32>,
    args: Vec<Monomial>,
}

impl LiGen {
    pub fn new(ns: Vec<u32>, args: Vec<Monomial>) -> Result<LiGen, MplError> {
        if ns.is_empty() || ns.len() != args.len() || ns.iter().any(|&n| n == 0) {
            return Err(MplError::BadIndices);
        }
        let d = args[0].ambient();
        if let Some(m) = args.iter().find(|m| m.ambient() != d) {
            return Err(MplError::DimensionMismatch { expected: d, found: m.ambient() });
        }
        let vs: Vec<QVector> = args.iter().map(|m| m.exp.clone()).collect();
        if !is_independent(&vs) {
            return Err(MplError::RankDeficient);
        }
        Ok(LiGen { ns, args })
    }

    /// Li_{n₁..n_k}(x₁..x_k) on the k-dimensional torus.
    pub fn standard(ns: &[u32]) -> Result<LiGen, MplError> {
        let k = ns.len();
        LiGen::new(ns.to_vec(), (0..k).map(|i| Monomial::var(k, i)).collect())
    }

    pub fn ns(&self) -> &[u32] {
        &self.ns
    }

    pub fn args(&self) -> &[Monomial] {
        &self.args
    }

    pub fn depth(&self) -> usize {
        self.ns.len()
    }

    pub fn weight(&self) -> u32 {
        self.ns.iter().sum()
    }

    pub fn ambient(&self) -> usize {
        self.args[0].ambient()
    }

    pub fn exponent_vectors(&self) -> Vec<QVector> {
        self.args.iter().map(|m| m.exp.clone()).collect()
    }

    /// Truncated power series Σ_{0<m₁<…<m_k≤M} ∏ z_j^{m_j}/m_j^{n_j}.
    pub fn eval_series(&self, x: &[f64], terms: usize) -> Complex64 {
        let z: Vec<Complex64> = self.args.iter().map(|m| m.eval(x)).collect();
        li_series(&self.ns, &z, terms)
    }
}

impl std::fmt::Display for LiGen {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ns: Vec<String> = self.ns.iter().map(|n| n.to_string()).collect();
        let args: Vec<String> = self.args.iter().map(|m| m.to_string()).collect();
        write!(f, "Li_{{{}}}({})", ns.join(","), args.join(", "))
    }
}

/// Nested-sum evaluation of the multiple polylogarithm series.
pub fn li_series(ns: &[u32], z: &[Complex64], terms: usize) -> Complex64 {
    let k = ns.len();
    let mut partial = vec![Complex64::zero(); k + 1];
    partial[0] = Complex64::one();
    let mut powers = vec![Complex64::one(); k];
    for m in 1..=terms {
        for j in 0..k {
            powers[j] *= z[j];
        }
        for j in (1..=k).rev() {
            let w = powers[j - 1] / (m as f64).powi(ns[j - 1] as i32);
            let prev = partial[j - 1];
            partial[j] += prev * w;
        }
    }
    partial[k]
}

/// Normal form of a weight-n combination of Li_n(ζ x^a).
///
/// Exponents are stored as primitive lex-positive integer vectors p, standing
/// for p/level. Pure roots of unity are kept aside in `constants`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DepthOneNF {
    weight: u32,
    level: BigInt,
    terms: Lin<(Q, Vec<BigInt>)>,
    constants: Lin<Q>,
}

impl DepthOneNF {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> &BigInt {
        &self.level
    }

    pub fn terms(&self) -> &Lin<(Q, Vec<BigInt>)> {
        &self.terms
    }

    pub fn constants(&self) -> &Lin<Q> {
        &self.constants
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constants.is_empty()
    }

    /// Re-expresses the same element at a covering level that is a multiple of the current one.
    pub fn at_level(&self, w: &BigInt) -> Option<DepthOneNF> {
        if !w.is_positive() || !(w % &self.level).is_zero() {
            return None;
        }
        let f = w / &self.level;
        let mut terms = Lin::new();
        for ((q, p), c) in self.terms.iter() {
            expand_multiple(&mut terms, self.weight, q, p, &f, c);
        }
        Some(DepthOneNF { weight: self.weight, level: w.clone(), terms, constants: self.constants.clone() })
    }

    /// Equality after passing to a common covering level.
    pub fn equivalent(&self, other: &DepthOneNF) -> bool {
        if self.weight != other.weight && !(self.is_zero() && other.is_zero()) {
            return false;
        }
        let w = self.level.lcm(&other.level);
        self.at_level(&w) == other.at_level(&w)
    }

    /// Back to a formal sum of Li_n(ζ x^a).
    pub fn to_sum(&self, ambient: usize) -> Lin<Monomial> {
        let mut out = Lin::new();
        let lv = Q::from_integer(self.level.clone());
        for ((q, p), c) in self.terms.iter() {
            let exp: QVector = int_to_q(p).iter().map(|x| x / &lv).collect();
            out.add_term(Monomial::new(q.clone(), exp), c.clone());
        }
        for (q, c) in self.constants.iter() {
            out.add_term(Monomial::root_of_unity(ambient, q.clone()), c.clone());
        }
        out
    }
}

/// [ζ, m·p] = m^{n−1} Σ_{ν^m=1} [νξ, p] with ξ the root of phase q/m.
fn expand_multiple(out: &mut Lin<(Q, Vec<BigInt>)>, n: u32, q: &Q, p: &[BigInt], m: &BigInt, c: &Q) {
    let mq = Q::from_integer(m.clone());
    let coeff = c * qpow(&mq, n as i64 - 1);
    let mut j = BigInt::zero();
    while &j < m {
        let phase = reduce_phase(&((q + Q::from_integer(j.clone())) / &mq));
        out.add_term((phase, p.to_vec()), coeff.clone());
        j += 1;
    }
}

/// Reduces Σ c·Li_n(m) to the basis of primitive lex-positive exponents at
/// the common covering level.
pub fn depth1_nf(n: u32, sum: &Lin<Monomial>) -> DepthOneNF {
    let mut level = BigInt::one();
    for m in sum.keys() {
        let (_, l) = clear_denominators(&m.exp);
        level = level.lcm(&l);
    }
    let lv = Q::from_integer(level.clone());
    let mut terms = Lin::new();
    let mut constants = Lin::new();
    for (m, c) in sum.iter() {
        if m.is_constant() {
            constants.add_term(m.phase.clone(), c.clone());
            continue;
        }
        let b: Vec<BigInt> = m.exp.iter().map(|a| (a * &lv).to_integer()).collect();
        let p = canonical_int(&b).expect("nonzero exponent");
        let g = gcd_all(&b);
        let positive = b.iter().zip(&p).all(|(x, y)| x * y >= BigInt::zero());
        let (phase, coeff) = if positive { (m.phase.clone(), c.clone()) } else { (reduce_phase(&-&m.phase), c * sign_pow(n - 1)) };
        expand_multiple(&mut terms, n, &phase, &p, &g, &coeff);
    }
    DepthOneNF { weight: n, level, terms, constants }
}

/// Each depth-k−1 left factor with its depth-one right factor.
pub type TopTerm = (LiGen, DepthOneNF);

/// The (k−1,1) part of the reduced coproduct, modulo logarithms.
pub fn delta_top(g: &LiGen) -> Result<Vec<TopTerm>, MplError> {
    let k = g.depth();
    if k < 2 {
        return Err(MplError::DepthTooSmall(2));
    }
    let d = g.ambient();
    let ns = &g.ns;
    let args = &g.args;
    let mut raw: BTreeMap<LiGen, Lin<Monomial>> = BTreeMap::new();
    let mut push = |left_ns: Vec<u32>, left_args: Vec<Monomial>, right: &Monomial, c: Q| -> Result<(), MplError> {
        let left = LiGen::new(left_ns, left_args)?;
        raw.entry(left).or_default().add_term(right.clone(), c);
        Ok(())
    };
    push(ns[1..].to_vec(), args[1..].to_vec(), &args[0], Q::one())?;
    for i in 0..k - 1 {
        let mut merged = args[..i].to_vec();
        merged.push(args[i].mul(&args[i + 1]));
        merged.extend_from_slice(&args[i + 2..]);
        let with = |a: u32| -> Vec<u32> {
            let mut v = ns[..i].to_vec();
            v.push(a);
            v.extend_from_slice(&ns[i + 2..]);
            v
        };
        for j in 0..ns[i] {
            let c = Q::from_integer(binomial(ns[i + 1] + j - 1, j)) * sign_pow(j);
            push(with(ns[i] - j), merged.clone(), &args[i + 1], c)?;
        }
        for j in 0..ns[i + 1] {
            let c = -Q::from_integer(binomial(ns[i] + j - 1, j)) * sign_pow(j);
            push(with(ns[i + 1] - j), merged.clone(), &args[i], c)?;
        }
    }
    let n = g.weight();
    let _ = d;
    Ok(raw
        .into_iter()
        .map(|(left, sum)| {
            let w = n - left.weight();
            (left, depth1_nf(w, &sum))
        })
        .filter(|(_, nf)| !nf.is_zero())
        .collect())
}

/// A letter Li_n(m) of a tensor of depth-one elements.
pub type Letter = (u32, Monomial);

/// Δ̄^{[k−1]} into k depth-one slots, iterating delta_top on the left factor.
pub fn iterated_top_coproduct(g: &LiGen) -> Result<Lin<Vec<Letter>>, MplError> {
    let d = g.ambient();
    if g.depth() == 1 {
        let nf = depth1_nf(g.weight(), &Lin::single(g.args[0].clone(), Q::one()));
        return Ok(nf.to_sum(d).into_iter().map(|(m, c)| (vec![(g.weight(), m)], c)).collect());
    }
    let mut out = Lin::new();
    for (left, right) in delta_top(g)? {
        let sub = iterated_top_coproduct(&left)?;
        let r = right.to_sum(d);
        for (w, c) in sub.iter() {
            for (m, c2) in r.iter() {
                let mut word = w.clone();
                word.push((right.weight, m.clone()));
                out.add_term(word, c * c2);
            }
        }
    }
    Ok(out)
}

/// Σ on a single tensor of letters: |ω(v)|·[v₁|…|v_k]⊗∏ v_i^{n_i−1}/(n_i−1)!.
/// Phases are forgotten; constants and dependent tuples give 0.
pub fn sigma_word(word: &[Letter], ambient: usize) -> BarElement {
    let mut out = BarElement::zero(ambient);
    if word.iter().any(|(_, m)| m.is_constant()) {
        return out;
    }
    let vs: Vec<QVector> = word.iter().map(|(_, m)| m.exp.clone()).collect();
    let omega = match saturation_index(&vs) {
        Ok(w) => w,
        Err(_) => return out,
    };
    let ns: Vec<u32> = word.iter().map(|(n, _)| *n).collect();
    let p = poly::divided_power_product(&vs, &ns, ambient);
    for (mono, c) in p.iter() {
        out.add_vectors(&vs, mono.clone(), c * &omega);
    }
    out
}

/// σ on a tensor of depth-one normal forms.
pub fn sigma(factors: &[DepthOneNF], ambient: usize) -> BarElement {
    let mut words: Lin<Vec<Letter>> = Lin::single(Vec::new(), Q::one());
    for f in factors {
        let s = f.to_sum(ambient);
        let mut next = Lin::new();
        for (w, c) in words.iter() {
            for (m, c2) in s.iter() {
                let mut w2 = w.clone();
                w2.push((f.weight, m.clone()));
                next.add_term(w2, c * c2);
            }
        }
        words = next;
    }
    sigma_sum(&words, ambient)
}

pub fn sigma_sum(words: &Lin<Vec<Letter>>, ambient: usize) -> BarElement {
    let mut out = BarElement::zero(ambient);
    for (w, c) in words.iter() {
        out.add_scaled(&sigma_word(w, ambient), c);
    }
    out
}

/// σ∘Δ̄^{[k−1]} as a bar element.
pub fn top_coproduct_bar(g: &LiGen) -> Result<BarElement, MplError> {
    Ok(sigma_sum(&iterated_top_coproduct(g)?, g.ambient()))
}

/// L[e₁..e_k] ⊗ ∏ e_i^{n_i−1}/(n_i−1)! on the k-dimensional space.
pub fn truncated_symbol_closed(ns: &[u32]) -> St2Element {
    let k = ns.len();
    let es: Vec<QVector> = (0..k).map(|i| unit_vector(k, i)).collect();
    let l = make_l(&es).expect("standard basis");
    l.mul_poly(&poly::divided_power_product(&es, ns, k))
}

/// s^{−1}∘σ∘Δ̄^{[k−1]}; requires depth equal to the ambient dimension.
pub fn truncated_symbol_recursive(g: &LiGen) -> Result<St2Element, MplError> {
    top_depth(g.depth(), g.ambient())?;
    let bar = top_coproduct_bar(g)?;
    Ok(s_inverse(&bar)?)
}

fn top_depth(depth: usize, ambient: usize) -> Result<(), MplError> {
    if depth != ambient {
        return Err(MplError::NotTopDepth { depth, ambient });
    }
    Ok(())
}

/// Closed form for a generator with exponent matrix V: |det V|·V·ST(Li).
pub fn truncated_symbol(g: &LiGen) -> Result<St2Element, MplError> {
    top_depth(g.depth(), g.ambient())?;
    let v = QMatrix::from_cols(&g.exponent_vectors());
    let scale = det(&v).abs();
    Ok(truncated_symbol_closed(&g.ns).act(&v).scaled(&scale))
}

/// coeff·A·Li_{n₁..n_k}, with A stored as a primitive integral matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushedLi {
    coeff: Q,
    matrix: QMatrix,
    ns: Vec<u32>,
}

impl PushedLi {
    /// Normalizes (λP)·Li = λ^{n−d}·P·Li for λ > 0 and P primitive integral.
    pub fn new(coeff: Q, matrix: QMatrix, ns: Vec<u32>) -> Result<PushedLi, MplError> {
        let d = matrix.nrows();
        if matrix.ncols() != d || det(&matrix).is_zero() {
            return Err(MplError::Singular);
        }
        if ns.is_empty() || ns.len() > d || ns.iter().any(|&n| n == 0) {
            return Err(MplError::BadIndices);
        }
        let entries: Vec<Q> = matrix.to_rows().concat();
        let (ints, l) = clear_denominators(&entries);
        let g = gcd_all(&ints);
        let lambda = Q::new(g, l);
        let p = matrix.scale(&lambda.recip());
        let n: u32 = ns.iter().sum();
        let coeff = coeff * qpow(&lambda, n as i64 - d as i64);
        Ok(PushedLi { coeff, matrix: p, ns })
    }

    pub fn standard(ns: &[u32]) -> PushedLi {
        PushedLi { coeff: Q::one(), matrix: QMatrix::identity(ns.len()), ns: ns.to_vec() }
    }

    pub fn coeff(&self) -> &Q {
        &self.coeff
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn ns(&self) -> &[u32] {
        &self.ns
    }

    pub fn ambient(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn depth(&self) -> usize {
        self.ns.len()
    }

    pub fn weight(&self) -> u32 {
        self.ns.iter().sum()
    }

    pub fn scaled(&self, c: &Q) -> PushedLi {
        PushedLi { coeff: &self.coeff * c, ..self.clone() }
    }

    /// N^{n−d−1} Σ_{y^N=x} Li(∏ y^{A cols}) as explicit generators with rational exponents.
    pub fn expand(&self) -> Vec<(Q, LiGen)> {
        let d = self.ambient();
        let k = self.depth();
        let n = self.weight();
        let nn = det(&self.matrix).abs().to_integer();
        let nq = Q::from_integer(nn.clone());
        let cols = self.matrix.to_cols();
        let c = &self.coeff * qpow(&nq, n as i64 - d as i64 - 1);
        let size = nn.to_usize().expect("small determinant");
        let mut out = Vec::new();
        let total = size.pow(d as u32);
        for idx in 0..total {
            let mut js = Vec::with_capacity(d);
            let mut r = idx;
            for _ in 0..d {
                js.push(r % size);
                r /= size;
            }
            let args: Vec<Monomial> = cols[..k]
                .iter()
                .map(|col| {
                    let phase: Q = col.iter().zip(&js).map(|(a, &j)| a * Q::from_integer(BigInt::from(j))).sum::<Q>() / &nq;
                    Monomial::new(phase, vec_scale(col, &nq.recip()))
                })
                .collect();
            out.push((c.clone(), LiGen::new(self.ns.clone(), args).expect("independent columns")));
        }
        out
    }

    /// Closed form coeff·A·ST(Li).
    pub fn truncated_symbol(&self) -> Result<St2Element, MplError> {
        top_depth(self.depth(), self.ambient())?;
        Ok(truncated_symbol_closed(&self.ns).act(&self.matrix).scaled(&self.coeff))
    }

    /// Recursion route applied to every generator of the expansion.
    pub fn truncated_symbol_recursive(&self) -> Result<St2Element, MplError> {
        top_depth(self.depth(), self.ambient())?;
        let mut bar = BarElement::zero(self.ambient());
        for (c, g) in self.expand() {
            bar.add_scaled(&top_coproduct_bar(&g)?, &c);
        }
        Ok(s_inverse(&bar)?)
    }

    pub fn eval_series(&self, x: &[f64], terms: usize) -> Complex64 {
        let mut out = Complex64::zero();
        for (c, g) in self.expand() {
            out += g.eval_series(x, terms) * c.to_f64().unwrap_or(f64::NAN);
        }
        out
    }
}

/// A·x for A ∈ GL_d(ℚ).
pub fn gl_act(a: &QMatrix, x: &PushedLi) -> Result<PushedLi, MplError> {
    if a.nrows() != x.ambient() || a.ncols() != x.ambient() {
        return Err(MplError::DimensionMismatch { expected: x.ambient(), found: a.nrows() });
    }
    PushedLi::new(x.coeff.clone(), a.mul(&x.matrix), x.ns.clone())
}

/// A middle or boundary argument of an iterated integral: 0 or a monomial.
pub type IIArg = Option<Monomial>;

/// I(z₀; z₁, …, z_n; z_{n+1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalII {
    args: Vec<IIArg>,
}

impl FormalII {
    pub fn new(args: Vec<IIArg>) -> Result<FormalII, MplError> {
        if args.len() < 2 {
            return Err(MplError::Malformed);
        }
        Ok(FormalII { args })
    }

    pub fn args(&self) -> &[IIArg] {
        &self.args
    }

    pub fn start(&self) -> &IIArg {
        &self.args[0]
    }

    pub fn end(&self) -> &IIArg {
        &self.args[self.args.len() - 1]
    }

    pub fn middle(&self) -> &[IIArg] {
        &self.args[1..self.args.len() - 1]
    }

    pub fn weight(&self) -> usize {
        self.args.len() - 2
    }

    pub fn nonzero_middles(&self) -> usize {
        self.middle().iter().filter(|a| a.is_some()).count()
    }
}

impl std::fmt::Display for FormalII {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = |a: &IIArg| a.as_ref().map_or("0".to_string(), |m| m.to_string());
        let mid: Vec<String> = self.middle().iter().map(s).collect();
        write!(f, "I({}; {}; {})", s(self.start()), mid.join(", "), s(self.end()))
    }
}

/// Li_{n₁..n_k}(a₁..a_k) = (−1)^k I(0; 1, 0^{n₁−1}, a₁, 0^{n₂−1}, a₁a₂, …, 0^{n_k−1}; a₁⋯a_k).
pub fn li_to_ii(g: &LiGen) -> (Q, FormalII) {
    let d = g.ambient();
    let mut args: Vec<IIArg> = vec![None, Some(Monomial::one(d))];
    let mut prod = Monomial::one(d);
    for (i, (n, a)) in g.ns.iter().zip(&g.args).enumerate() {
        args.extend(std::iter::repeat(None).take(*n as usize - 1));
        prod = prod.mul(a);
        if i + 1 < g.depth() {
            args.push(Some(prod.clone()));
        }
    }
    args.push(Some(prod));
    (sign_pow(g.depth() as u32), FormalII { args })
}

/// I(a; x; b)·I(a; y; b) = Σ_{shuffles} I(a; w; b).
pub fn ii_shuffle(x: &FormalII, y: &FormalII) -> Result<Lin<FormalII>, MplError> {
    if x.start() != y.start() || x.end() != y.end() {
        return Err(MplError::EndpointMismatch);
    }
    let mut out = Lin::new();
    for w in crate::lin::shuffles(x.middle(), y.middle()) {
        let mut args = vec![x.start().clone()];
        args.extend(w);
        args.push(x.end().clone());
        out.add_term(FormalII { args }, Q::one());
    }
    Ok(out)
}

/// I(x₀; x₁..x_n; x_{n+1}) = Σ_k I(x₀; x₁..x_k; y)·I(y; x_{k+1}..x_n; x_{n+1}).
pub fn ii_path_compose(x: &FormalII, y: &IIArg) -> Vec<(FormalII, FormalII)> {
    let n = x.weight();
    (0..=n)
        .map(|k| {
            let mut a = x.args[..=k].to_vec();
            a.push(y.clone());
            let mut b = vec![y.clone()];
            b.extend_from_slice(&x.args[k + 1..]);
            (FormalII { args: a }, FormalII { args: b })
        })
        .collect()
}

/// I(x₀; x₁..x_n; x_{n+1}) = (−1)^n I(x_{n+1}; x_n..x₁; x₀).
pub fn ii_reverse(x: &FormalII) -> (Q, FormalII) {
    let mut args = x.args.clone();
    args.reverse();
    (sign_pow(x.weight() as u32), FormalII { args })
}

/// I(z₁; 0^k, z₂, 0^l; z₃) = (−1)^{k+1} C(k+l,k) (Li_{k+l+1}(z₃/z₂) − Li_{k+l+1}(z₁/z₂))
/// modulo logarithms. Returns the weight and the formal sum of Li arguments.
pub fn divergent_reduce(x: &FormalII) -> Result<(u32, Lin<Monomial>), MplError> {
    let w = x.weight() as u32;
    let nz: Vec<usize> = x.middle().iter().enumerate().filter(|(_, a)| a.is_some()).map(|(i, _)| i).collect();
    match nz.len() {
        0 => Ok((w, Lin::new())),
        1 => {
            let k = nz[0] as u32;
            let l = w - 1 - k;
            let z2 = x.middle()[nz[0]].as_ref().expect("nonzero");
            let c = sign_pow(k + 1) * Q::from_integer(binomial(k + l, k));
            let mut out = Lin::new();
            if let Some(z3) = x.end() {
                out.add_term(z3.div(z2), c.clone());
            }
            if let Some(z1) = x.start() {
                out.add_term(z1.div(z2), -c);
            }
            Ok((w, out))
        }
        _ => Err(MplError::MultipleNonzero),
    }
}

/// Full coproduct Σ I(z_{i₀}; z_{i₁}..z_{i_r}; z_{i_{r+1}}) ⊗ ∏_p I(z_{i_p}; …; z_{i_{p+1}}),
/// one entry per subset of middle indices, trivial factors included.
pub fn goncharov_coproduct(x: &FormalII) -> Vec<(FormalII, Vec<FormalII>)> {
    let n = x.weight();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut idx = vec![0usize];
        idx.extend((1..=n).filter(|i| mask >> (i - 1) & 1 == 1));
        idx.push(n + 1);
        let left = FormalII { args: idx.iter().map(|&i| x.args[i].clone()).collect() };
        let rights = idx.windows(2).map(|w| FormalII { args: x.args[w[0]..=w[1]].to_vec() }).collect();
        out.push((left, rights));
    }
    out
}

/// A commutative product of iterated integrals with weight-zero factors dropped.
pub type IIProduct = Vec<FormalII>;

fn normalize_product(mut p: Vec<FormalII>) -> IIProduct {
    p.retain(|f| f.weight() > 0);
    p.sort();
    p
}

/// The coproduct with products normalized, extended multiplicatively to products.
pub fn coproduct_product(p: &IIProduct) -> Lin<(IIProduct, IIProduct)> {
    let mut acc: Lin<(IIProduct, IIProduct)> = Lin::single((Vec::new(), Vec::new()), Q::one());
    for f in p {
        let mut next = Lin::new();
        let terms: Vec<(IIProduct, IIProduct)> = goncharov_coproduct(f)
            .into_iter()
            .map(|(l, r)| (normalize_product(vec![l]), normalize_product(r)))
            .collect();
        for ((a, b), c) in acc.iter() {
            for (l, r) in &terms {
                let mut a2 = a.clone();
                a2.extend(l.iter().cloned());
                let mut b2 = b.clone();
                b2.extend(r.iter().cloned());
                next.add_term((normalize_product(a2), normalize_product(b2)), c.clone());
            }
        }
        acc = next;
    }
    acc
}

/// σ of the (1,1) part of the Goncharov coproduct of a depth-two generator.
pub fn goncharov_top_bar(g: &LiGen) -> Result<BarElement, MplError> {
    if g.depth() != 2 {
        return Err(MplError::UnsupportedDepth(2));
    }
    let d = g.ambient();
    let (sign, ii) = li_to_ii(g);
    let mut words: Lin<Vec<Letter>> = Lin::new();
    for (left, rights) in goncharov_coproduct(&ii) {
        let nontrivial: Vec<&FormalII> = rights.iter().filter(|r| r.weight() > 0).collect();
        if nontrivial.len() != 1 || left.weight() == 0 {
            continue;
        }
        let right = nontrivial[0];
        if left.nonzero_middles() != 1 || right.nonzero_middles() != 1 {
            continue;
        }
        let (wl, sl) = divergent_reduce(&left)?;
        let (wr, sr) = divergent_reduce(right)?;
        let sl = depth1_nf(wl, &sl).to_sum(d);
        let sr = depth1_nf(wr, &sr).to_sum(d);
        for (a, ca) in sl.iter() {
            for (b, cb) in sr.iter() {
                words.add_term(vec![(wl, a.clone()), (wr, b.clone())], &sign * ca * cb);
            }
        }
    }
    Ok(sigma_sum(&words, d))
}

/// One factor of a term in an identity: a pushforward A·Li (square A) or a
/// plain substitution Li(x^{v₁}, …, x^{v_k}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiFactor {
    Pushed(PushedLi),
    Plain(LiGen),
}

impl LiFactor {
    pub fn weight(&self) -> u32 {
        match self {
            LiFactor::Pushed(p) => p.weight(),
            LiFactor::Plain(g) => g.weight(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LiFactor::Pushed(p) => p.depth(),
            LiFactor::Plain(g) => g.depth(),
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            LiFactor::Pushed(p) => p.ambient(),
            LiFactor::Plain(g) => g.ambient(),
        }
    }

    pub fn truncated_symbol(&self) -> Result<St2Element, MplError> {
        match self {
            LiFactor::Pushed(p) => p.truncated_symbol(),
            LiFactor::Plain(g) => truncated_symbol(g),
        }
    }

    pub fn eval_series(&self, x: &[f64], terms: usize) -> Complex64 {
        match self {
            LiFactor::Pushed(p) => p.eval_series(x, terms),
            LiFactor::Plain(g) => g.eval_series(x, terms),
        }
    }
}

/// coeff·∏ factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityTerm {
    pub coeff: Q,
    pub factors: Vec<LiFactor>,
}

impl IdentityTerm {
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.weight()).sum()
    }
}

/// Evaluation point and truncation for the series check.
#[derive(Clone, Debug)]
pub struct NumericCheck {
    pub point: Vec<f64>,
    pub terms: usize,
    pub tolerance: f64,
}

impl NumericCheck {
    pub fn default_for(d: usize) -> NumericCheck {
        let point = (0..d).map(|i| 0.3 + 0.1 * i as f64).collect();
        NumericCheck { point, terms: 400, tolerance: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub ambient: usize,
    pub weight: u32,
    /// Σ c·ST over the depth-d single-factor terms.
    pub residual: St2Element,
    pub st_infty_zero: bool,
    /// |Σ c·value| and Σ|c·value| at the evaluation point.
    pub numeric: Option<(f64, f64)>,
    pub numeric_ok: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.st_infty_zero && self.numeric_ok
    }
}

/// Vanishing in St^∞⊗𝕊, tested separately for each monomial of the symmetric part.
pub fn is_zero_st_infty_sym(x: &St2Element, seed: u64) -> Result<bool, MplError> {
    let d = x.ambient();
    let mut groups: BTreeMap<Mono, Lin<crate::st2::St2Key>> = BTreeMap::new();
    for ((a, b, m), c) in x.terms().iter() {
        groups.entry(m.clone()).or_default().add_term((a.clone(), b.clone(), zero_mono(d)), c.clone());
    }
    for (_, terms) in groups {
        if !is_zero_st_infty_seeded(&St2Element::from_terms(d, terms), seed)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks Σ c·term = 0: exactly in St^∞⊗𝕊 through the truncated symbol, where
/// products and lower-depth terms vanish, and optionally by power series.
pub fn verify_li_identity(ambient: usize, terms: &[IdentityTerm], numeric: Option<&NumericCheck>) -> Result<IdentityReport, MplError> {
    let mut weight = None;
    for t in terms {
        for f in &t.factors {
            if f.ambient() != ambient {
                return Err(MplError::DimensionMismatch { expected: ambient, found: f.ambient() });
            }
        }
        match weight {
            None => weight = Some(t.weight()),
            Some(w) if w != t.weight() => return Err(MplError::MixedWeights),
            _ => {}
        }
    }
    let mut residual = St2Element::zero(ambient);
    for t in terms {
        if t.factors.len() == 1 && t.factors[0].depth() == ambient {
            residual.add_scaled(&t.factors[0].truncated_symbol()?, &t.coeff);
        }
    }
    let residual = residual.normal_form();
    let st_infty_zero = is_zero_st_infty_sym(&residual, 0x5eed)?;
    let (numeric, numeric_ok) = match numeric {
        None => (None, true),
        Some(cfg) => {
            let mut total = Complex64::zero();
            let mut scale = 0.0;
            for t in terms {
                let mut v = Complex64::one() * t.coeff.to_f64().unwrap_or(f64::NAN);
                for f in &t.factors {
                    v *= f.eval_series(&cfg.point, cfg.terms);
                }
                total += v;
                scale += v.norm();
            }
            let err = total.norm();
            (Some((err, scale)), err <= cfg.tolerance * (1.0 + scale))
        }
    };
    Ok(IdentityReport { ambient, weight: weight.unwrap_or(0), residual, st_infty_zero, numeric, numeric_ok })
}

/// A factor in an identity file; `matrix` is given by rows, column j is the
/// exponent vector of argument j.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorJson {
    pub matrix: Vec<Vec<String>>,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<FactorJson>>,
}

fn parse_err<E: std::fmt::Display>(e: E) -> MplError {
    MplError::Parse(e.to_string())
}

fn factor_from_json(matrix: &[Vec<String>], exponents: &[u32]) -> Result<LiFactor, MplError> {
    let rows = matrix
        .iter()
        .map(|r| r.iter().map(|s| parse_q(s).map_err(parse_err)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(MplError::Parse("ragged matrix".into()));
    }
    let m = QMatrix::from_rows(&rows);
    if m.ncols() == m.nrows() {
        Ok(LiFactor::Pushed(PushedLi::new(Q::one(), m, exponents.to_vec())?))
    } else {
        let args = m.to_cols().into_iter().map(Monomial::from_exp).collect();
        Ok(LiFactor::Plain(LiGen::new(exponents.to_vec(), args)?))
    }
}

fn factor_to_json(f: &LiFactor) -> (Q, FactorJson) {
    let (c, m, ns) = match f {
        LiFactor::Pushed(p) => (p.coeff.clone(), p.matrix.clone(), p.ns.clone()),
        LiFactor::Plain(g) => (Q::one(), QMatrix::from_cols(&g.exponent_vectors()), g.ns.clone()),
    };
    let matrix = m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect();
    (c, FactorJson { matrix, exponents: ns })
}

/// Parses an identity file: a JSON array of {coeff, matrix, exponents} or
/// {coeff, product: [{matrix, exponents}, …]}. Returns the ambient dimension.
pub fn parse_identity(json: &str) -> Result<(usize, Vec<IdentityTerm>), MplError> {
    let raw: Vec<TermJson> = serde_json::from_str(json).map_err(parse_err)?;
    let mut out = Vec::new();
    let mut ambient = None;
    for t in raw {
        let coeff = parse_q(&t.coeff).map_err(parse_err)?;
        let factors = match (&t.matrix, &t.exponents, &t.product) {
            (Some(m), Some(e), None) => vec![factor_from_json(m, e)?],
            (None, None, Some(p)) => p.iter().map(|f| factor_from_json(&f.matrix, &f.exponents)).collect::<Result<_, _>>()?,
            _ => return Err(MplError::Parse("term needs matrix and exponents, or product".into())),
        };
        for f in &factors {
            match ambient {
                None => ambient = Some(f.ambient()),
                Some(a) if a != f.ambient() => return Err(MplError::DimensionMismatch { expected: a, found: f.ambient() }),
                _ => {}
            }
        }
        out.push(IdentityTerm { coeff, factors });
    }
    Ok((ambient.unwrap_or(0), out))
}

pub fn identity_to_json(terms: &[IdentityTerm]) -> String {
    let raw: Vec<TermJson> = terms
        .iter()
        .map(|t| {
            let mut coeff = t.coeff.clone();
            let fs: Vec<FactorJson> = t
                .factors
                .iter()
                .map(|f| {
                    let (c, j) = factor_to_json(f);
                    coeff *= c;
                    j
                })
                .collect();
            if fs.len() == 1 {
                let f = fs.into_iter().next().expect("one factor");
                TermJson { coeff: fmt_q(&coeff), matrix: Some(f.matrix), exponents: Some(f.exponents), product: None }
            } else {
                TermJson { coeff: fmt_q(&coeff), matrix: None, exponents: None, product: Some(fs) }
            }
        })
        .collect();
    serde_json::to_string_pretty(&raw).expect("serializable")
}

/// The weight-four depth-two identity expressing Li_{2,2} through Li_{3,1},
/// moved to one side.
pub const WEIGHT_FOUR_IDENTITY: &str = r#"[
  {"coeff": "1", "matrix": [["1", "0"], ["0", "1"]], "exponents": [2, 2]},
  {"coeff": "4", "matrix": [["1/2", "0"], ["-1/2", "1"]], "exponents": [3, 1]},
  {"coeff": "-4", "matrix": [["-1/2", "1"], ["1/2", "0"]], "exponents": [3, 1]},
  {"coeff": "-1", "matrix": [["1", "0"], ["0", "1"]], "exponents": [3, 1]},
  {"coeff": "1", "matrix": [["0", "1"], ["1", "0"]], "exponents": [3, 1]},
  {"coeff": "1", "matrix": [["-1", "1"], ["1", "0"]], "exponents": [3, 1]},
  {"coeff": "1/2", "matrix": [["1"], ["1"]], "exponents": [4]},
  {"coeff": "-1", "product": [
    {"matrix": [["1"], ["0"]], "exponents": [1]},
    {"matrix": [["0"], ["1"]], "exponents": [3]}
  ]}
]"#;
