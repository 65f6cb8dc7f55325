//! St²(V) = St(V) ⊗ St(V) and its embedding into the bar complex.
//!
//! Elements are combinations of apartment pairs A ⊗ B, both on the same
//! subspace W ⊆ V, tensored with a monomial in e₁..e_d. Keys are canonical
//! apartments; the per-factor flag normal form is computed on demand.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::barcplx::{p_h_project, random_functional, shuffle_span_reduce, BarElement, LineWord};
use crate::lin::{perm_sign, shuffles, Lin};
use crate::poly::{self, mono_mul, zero_mono, Mono, Poly};
use crate::qlinalg::{
    canonical_point, dot, dual_basis, fmt_q, int_to_q, is_independent, nullspace, qi, solve, vec_add, vec_neg,
    vec_scale, vec_sub, QMatrix, QVector, Subspace, Q,
};
use crate::steinberg::{normal_form, Apartment, Point, SteinbergElement};

pub type St2Key = (Apartment, Apartment, Mono);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum St2Error {
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a Coxeter pair: Q{0} does not lie on the line through P{prev} and P{0}", prev = .0 - 1)]
    NotCoxeter(usize),
    #[error("Coxeter pair is not generic: P{0} = Q{0}")]
    NotGeneric(usize),
    #[error("Coxeter pair must satisfy P1 = Q1")]
    FirstPointsDiffer,
    #[error("pair does not determine a basis")]
    Degenerate,
    #[error("coproduct requires a trivial symmetric part")]
    SymmetricPart,
    #[error("element is not in the image of s")]
    NotInImage,
    #[error("apartment is not full rank")]
    NotFullRank,
    #[error("no functional avoiding the occurring subspaces was found")]
    NoFunctional,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct St2Element {
    ambient: usize,
    terms: Lin<St2Key>,
}

impl St2Element {
    pub fn zero(ambient: usize) -> Self {
        St2Element { ambient, terms: Lin::new() }
    }

    /// The unit: the empty pair.
    pub fn unit(ambient: usize) -> Self {
        let e = Apartment::from_points(Vec::new()).unwrap().0;
        St2Element { ambient, terms: Lin::single((e.clone(), e, zero_mono(ambient)), Q::one()) }
    }

    pub fn from_terms(ambient: usize, terms: Lin<St2Key>) -> Self {
        St2Element { ambient, terms }
    }

    /// [a] ⊗ [b] ⊗ poly; zero when a or b is degenerate.
    pub fn pair(a: &[QVector], b: &[QVector], poly: &Poly) -> Self {
        let d = a.first().or(b.first()).map_or(0, |v| v.len());
        let mut x = St2Element::zero(d);
        x.add_pair(a, b, poly, &Q::one());
        x
    }

    pub fn pair_plain(a: &[QVector], b: &[QVector]) -> Self {
        let d = a.first().map_or(0, |v| v.len());
        Self::pair(a, b, &poly::one(d))
    }

    pub fn add_pair(&mut self, a: &[QVector], b: &[QVector], poly: &Poly, c: &Q) {
        let (Some((pa, sa)), Some((pb, sb))) = (Apartment::new(a), Apartment::new(b)) else { return };
        for (m, e) in poly.iter() {
            self.terms.add_term((pa.clone(), pb.clone(), m.clone()), c * e * qi((sa * sb) as i64));
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn terms(&self) -> &Lin<St2Key> {
        &self.terms
    }

    pub fn add_assign(&mut self, other: &St2Element) {
        self.terms.add_assign(&other.terms);
    }

    pub fn add_scaled(&mut self, other: &St2Element, c: &Q) {
        self.terms.add_scaled(&other.terms, c);
    }

    pub fn sub(&self, other: &St2Element) -> St2Element {
        let mut out = self.clone();
        out.terms.sub_assign(&other.terms);
        out
    }

    pub fn scaled(&self, c: &Q) -> St2Element {
        St2Element { ambient: self.ambient, terms: self.terms.scaled(c) }
    }

    pub fn mul_poly(&self, p: &Poly) -> St2Element {
        let mut out = St2Element::zero(self.ambient);
        for ((a, b, m), c) in self.terms.iter() {
            for (n, e) in p.iter() {
                out.terms.add_term((a.clone(), b.clone(), mono_mul(m, n)), c * e);
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Per-factor flag normal form.
    pub fn normal_form(&self) -> St2Element {
        let d = self.ambient;
        let mut cache: HashMap<Apartment, SteinbergElement> = HashMap::new();
        let mut nf = |a: &Apartment| -> SteinbergElement {
            cache
                .entry(a.clone())
                .or_insert_with(|| normal_form(&SteinbergElement::from_lin(d, Lin::single(a.clone(), Q::one()))))
                .clone()
        };
        let mut out = Lin::new();
        for ((a, b, m), c) in self.terms.iter() {
            let na = nf(a);
            let nb = nf(b);
            for (x, ca) in na.terms().iter() {
                for (y, cb) in nb.terms().iter() {
                    out.add_term((x.clone(), y.clone(), m.clone()), c * ca * cb);
                }
            }
        }
        St2Element { ambient: d, terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form().is_empty()
    }

    /// Apply a linear map to both apartment factors and the polynomial variables.
    pub fn act(&self, a: &QMatrix) -> St2Element {
        let mut out = St2Element::zero(a.nrows());
        for ((x, y, m), c) in self.terms.iter() {
            let xs: Vec<QVector> = x.vectors().iter().map(|v| a.mul_vec(v)).collect();
            let ys: Vec<QVector> = y.vectors().iter().map(|v| a.mul_vec(v)).collect();
            let p = poly::act(a, &Poly::single(m.clone(), Q::one()));
            out.add_pair(&xs, &ys, &p, c);
        }
        out
    }
}

impl std::fmt::Display for St2Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b, m), c)| format!("{}·{}⊗{}⊗{}", fmt_q(c), a, b, poly::fmt_mono(m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn is_zero_st2(x: &St2Element) -> bool {
    x.is_zero()
}

/// Line ⟨v_S⟩ ∩ ⟨w_T⟩ when the intersection is one-dimensional.
fn intersection_line(v: &[QVector], s: &[usize], w: &[QVector], t: &[usize]) -> Option<QVector> {
    let d = v[0].len();
    // Σ a_i v_i − Σ b_j w_j = 0
    let eqs: Vec<QVector> = (0..d)
        .map(|r| s.iter().map(|&i| v[i][r].clone()).chain(t.iter().map(|&j| -w[j][r].clone())).collect())
        .collect();
    let ns = nullspace(&eqs, s.len() + t.len());
    if ns.len() != 1 {
        return None;
    }
    let mut out = vec![Q::zero(); d];
    for (c, &i) in ns[0].iter().zip(s) {
        for (x, y) in out.iter_mut().zip(&v[i]) {
            *x += c * y;
        }
    }
    if out.iter().all(|x| x.is_zero()) {
        None
    } else {
        Some(out)
    }
}

fn mask_items(mask: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|i| mask >> i & 1 == 1).collect()
}

/// s([v]⊗[w]) = Σ_{σ,τ} (−1)^σ(−1)^τ [𝓕₁^σ∩𝓖_k^τ | … | 𝓕_k^σ∩𝓖₁^τ].
fn s_pair(v: &[QVector], w: &[QVector]) -> Lin<LineWord> {
    let k = v.len();
    let mut lines: HashMap<(usize, usize), Option<Point>> = HashMap::new();
    let mut line = |s: usize, t: usize| -> Option<Point> {
        lines
            .entry((s, t))
            .or_insert_with(|| {
                intersection_line(v, &mask_items(s, k), w, &mask_items(t, k)).map(|l| canonical_point(&l).unwrap())
            })
            .clone()
    };
    let mut out = Lin::new();
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    for sigma in &perms {
        let sg = perm_sign(sigma);
        'tau: for tau in &perms {
            let mut word = Vec::with_capacity(k);
            let mut fmask = 0usize;
            for i in 0..k {
                fmask |= 1 << sigma[i];
                // 𝓖_{k−i}^τ = ⟨w_{τ(i+1)},…,w_{τ(k)}⟩ (0-based: τ[i..])
                let gmask = tau[i..].iter().fold(0usize, |m, &j| m | 1 << j);
                match line(fmask, gmask) {
                    Some(p) => word.push(p),
                    None => continue 'tau,
                }
            }
            let mut sorted = word.clone();
            sorted.sort();
            if sorted.windows(2).any(|p| p[0] == p[1]) {
                continue;
            }
            if k > 2 && !is_independent(&word.iter().map(|p| int_to_q(p)).collect::<Vec<_>>()) {
                continue;
            }
            out.add_term(word, qi((sg * perm_sign(tau)) as i64));
        }
    }
    out
}

/// The embedding s: St² → B_•St.
pub fn embed_s(x: &St2Element) -> BarElement {
    let mut out = BarElement::zero(x.ambient);
    let mut cache: HashMap<(Apartment, Apartment), Lin<LineWord>> = HashMap::new();
    for ((a, b, m), c) in x.terms.iter() {
        let words = cache.entry((a.clone(), b.clone())).or_insert_with(|| {
            if a.is_empty() {
                Lin::single(Vec::new(), Q::one())
            } else {
                s_pair(&a.vectors(), &b.vectors())
            }
        });
        for (w, e) in words.iter() {
            out.add_line_word(w.clone(), m.clone(), c * e);
        }
    }
    out
}

/// Product m(a₁⊗b₁, a₂⊗b₂) = m(a₁,a₂) ⊗ m(b₁,b₂) for factors on
/// complementary subspaces of the same ambient space.
pub fn st2_product(x: &St2Element, y: &St2Element) -> St2Element {
    let mut out = St2Element::zero(x.ambient);
    for ((a1, b1, m1), c1) in x.terms.iter() {
        for ((a2, b2, m2), c2) in y.terms.iter() {
            let pa: Vec<Point> = a1.points().iter().chain(a2.points()).cloned().collect();
            let pb: Vec<Point> = b1.points().iter().chain(b2.points()).cloned().collect();
            let (Some((a, sa)), Some((b, sb))) = (Apartment::from_points(pa), Apartment::from_points(pb)) else {
                continue;
            };
            out.terms.add_term((a, b, mono_mul(m1, m2)), c1 * c2 * qi((sa * sb) as i64));
        }
    }
    out
}

/// Product for elements on ℚ^{d₁} and ℚ^{d₂}, embedded as coordinate blocks.
pub fn st2_product_blocks(x: &St2Element, y: &St2Element) -> St2Element {
    let (d1, d2) = (x.ambient, y.ambient);
    let embed = |e: &St2Element, left: bool| -> St2Element {
        let d = d1 + d2;
        let mut out = St2Element::zero(d);
        let pad = |v: &QVector| -> QVector {
            if left {
                v.iter().cloned().chain(std::iter::repeat(Q::zero()).take(d2)).collect()
            } else {
                std::iter::repeat(Q::zero()).take(d1).chain(v.iter().cloned()).collect()
            }
        };
        for ((a, b, m), c) in e.terms.iter() {
            let av: Vec<QVector> = a.vectors().iter().map(pad).collect();
            let bv: Vec<QVector> = b.vectors().iter().map(pad).collect();
            let mono = if left { poly::concat_mono(m, &zero_mono(d2)) } else { poly::concat_mono(&zero_mono(d1), m) };
            if av.is_empty() {
                let e = Apartment::from_points(Vec::new()).unwrap().0;
                out.terms.add_term((e.clone(), e, mono), c.clone());
            } else {
                out.add_pair(&av, &bv, &Poly::single(mono, Q::one()), c);
            }
        }
        out
    };
    st2_product(&embed(x, true), &embed(y, false))
}

/// One summand of the coproduct of a generator.
#[derive(Clone, Debug)]
pub struct CoproductTerm {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub left: St2Element,
    pub right: St2Element,
}

fn sequence_sign(seq: &[usize]) -> i32 {
    perm_sign(seq)
}

/// Coproduct of a single generator A ⊗ B, summed over index sets I, J
/// with A_I ⊕ B_J equal to the span, |I| + |J| = dim.
pub fn coproduct_pair(a: &Apartment, b: &Apartment, ambient: usize) -> Vec<CoproductTerm> {
    let k = a.len();
    let v = a.vectors();
    let w = b.vectors();
    let mut out = Vec::new();
    for r in 0..=k {
        for i in (0..k).combinations(r) {
            let ibar: Vec<usize> = (0..k).filter(|x| !i.contains(x)).collect();
            for j in (0..k).combinations(k - r) {
                let jbar: Vec<usize> = (0..k).filter(|x| !j.contains(x)).collect();
                let mut basis: Vec<QVector> = i.iter().map(|&x| v[x].clone()).collect();
                basis.extend(j.iter().map(|&x| w[x].clone()));
                if !basis.is_empty() && !is_independent(&basis) {
                    continue;
                }
                let sign = sequence_sign(&[i.clone(), ibar.clone()].concat()) * sequence_sign(&[jbar.clone(), j.clone()].concat());
                // (A,B)_{I,J} = [v_I] ⊗ [A_I ∩ ⟨w_{j'}, B_J⟩]_{j' ∈ J̄}
                let mut lb = Vec::new();
                for &jp in &jbar {
                    let t: Vec<usize> = std::iter::once(jp).chain(j.iter().cloned()).collect();
                    match intersection_line(&v, &i, &w, &t) {
                        Some(l) => lb.push(l),
                        None => break,
                    }
                }
                // (A,B)^{I,J} = [B_J ∩ ⟨v_{i'}, A_I⟩]_{i' ∈ Ī} ⊗ [w_J]
                let mut ra = Vec::new();
                for &ip in &ibar {
                    let s: Vec<usize> = std::iter::once(ip).chain(i.iter().cloned()).collect();
                    match intersection_line(&w, &j, &v, &s) {
                        Some(l) => ra.push(l),
                        None => break,
                    }
                }
                if lb.len() != jbar.len() || ra.len() != ibar.len() {
                    continue;
                }
                let la: Vec<QVector> = i.iter().map(|&x| v[x].clone()).collect();
                let rb: Vec<QVector> = j.iter().map(|&x| w[x].clone()).collect();
                let left = pair_or_unit(&la, &lb, ambient);
                let right = pair_or_unit(&ra, &rb, ambient).scaled(&qi(sign as i64));
                if left.is_empty() || right.is_empty() {
                    continue;
                }
                out.push(CoproductTerm { i: i.clone(), j: j.clone(), left, right });
            }
        }
    }
    out
}

fn pair_or_unit(a: &[QVector], b: &[QVector], ambient: usize) -> St2Element {
    if a.is_empty() {
        St2Element::unit(ambient)
    } else {
        St2Element::pair(a, b, &poly::one(ambient))
    }
}

/// Tensor powers of St² with every factor in normal form.
pub type St2Tensor = Lin<Vec<St2Key>>;

fn nf_keys(x: &St2Element) -> Lin<St2Key> {
    x.normal_form().terms
}

/// Σ c · x₁ ⊗ … ⊗ x_n in normal form.
pub fn tensor_of(factors: &[&St2Element], c: &Q) -> St2Tensor {
    let mut acc: St2Tensor = Lin::single(Vec::new(), c.clone());
    for f in factors {
        let nf = nf_keys(f);
        let mut next = Lin::new();
        for (ks, a) in acc.iter() {
            for (k, b) in nf.iter() {
                let mut ks = ks.clone();
                ks.push(k.clone());
                next.add_term(ks, a * b);
            }
        }
        acc = next;
    }
    acc
}

/// Δ(x) in St² ⊗ St², normalized.
pub fn st2_coproduct(x: &St2Element) -> Result<St2Tensor, St2Error> {
    let mut out = Lin::new();
    for ((a, b, m), c) in x.terms.iter() {
        if m.iter().any(|&e| e > 0) {
            return Err(St2Error::SymmetricPart);
        }
        for t in coproduct_pair(a, b, x.ambient) {
            out.add_assign(&tensor_of(&[&t.left, &t.right], c));
        }
    }
    Ok(out)
}

/// Applies Δ to tensor slot `slot`.
pub fn coproduct_at(t: &St2Tensor, slot: usize, ambient: usize) -> Result<St2Tensor, St2Error> {
    let mut out = Lin::new();
    for (ks, c) in t.iter() {
        let x = St2Element::from_terms(ambient, Lin::single(ks[slot].clone(), Q::one()));
        let dx = st2_coproduct(&x)?;
        for (pair, e) in dx.iter() {
            let mut nk = ks[..slot].to_vec();
            nk.extend(pair.iter().cloned());
            nk.extend_from_slice(&ks[slot + 1..]);
            out.add_term(nk, c * e);
        }
    }
    Ok(out)
}

/// Product of two 2-fold tensors, slotwise.
pub fn tensor_product2(x: &St2Tensor, y: &St2Tensor, ambient: usize) -> St2Tensor {
    let mut out = Lin::new();
    for (kx, cx) in x.iter() {
        for (ky, cy) in y.iter() {
            let l = st2_product(
                &St2Element::from_terms(ambient, Lin::single(kx[0].clone(), Q::one())),
                &St2Element::from_terms(ambient, Lin::single(ky[0].clone(), Q::one())),
            );
            let r = st2_product(
                &St2Element::from_terms(ambient, Lin::single(kx[1].clone(), Q::one())),
                &St2Element::from_terms(ambient, Lin::single(ky[1].clone(), Q::one())),
            );
            out.add_assign(&tensor_of(&[&l, &r], &(cx * cy)));
        }
    }
    out
}

fn check_basis(v: &[QVector]) -> Result<usize, St2Error> {
    let d = v.first().map_or(0, |x| x.len());
    if v.iter().any(|x| x.len() != d) {
        return Err(St2Error::DimensionMismatch { expected: d, found: v.iter().map(|x| x.len()).find(|&l| l != d).unwrap() });
    }
    if !is_independent(v) {
        return Err(St2Error::Dependent);
    }
    Ok(d)
}

/// L[v₁..v_d] = [v_d, v_d+v_{d−1}, …, v_d+…+v₁] ⊗ [v_d, …, v₁].
pub fn make_l(v: &[QVector]) -> Result<St2Element, St2Error> {
    let d = check_basis(v)?;
    let mut a = Vec::new();
    let mut acc = vec![Q::zero(); d];
    for x in v.iter().rev() {
        acc = vec_add(&acc, x);
        a.push(acc.clone());
    }
    let b: Vec<QVector> = v.iter().rev().cloned().collect();
    Ok(St2Element::pair(&a, &b, &poly::one(d)))
}

/// I[v₁..v_d] = (−1)^d [v_d, …, v₁] ⊗ [v_d, v_{d−1}−v_d, …, v₁−v₂].
pub fn make_i(v: &[QVector]) -> Result<St2Element, St2Error> {
    let d = check_basis(v)?;
    let k = v.len();
    let a: Vec<QVector> = v.iter().rev().cloned().collect();
    let mut b = vec![v[k - 1].clone()];
    for i in (0..k - 1).rev() {
        b.push(vec_sub(&v[i], &v[i + 1]));
    }
    let sign = if k % 2 == 0 { Q::one() } else { -Q::one() };
    Ok(St2Element::pair(&a, &b, &poly::one(d)).scaled(&sign))
}

/// C^L[v₀..v_d] = L[v₁..v_d] for v₀ + … + v_d = 0.
pub fn make_corr(v: &[QVector]) -> Result<St2Element, St2Error> {
    let d = v[0].len();
    let total = v.iter().fold(vec![Q::zero(); d], |acc, x| vec_add(&acc, x));
    if total.iter().any(|x| !x.is_zero()) {
        return Err(St2Error::Degenerate);
    }
    make_l(&v[1..])
}

/// C^L[u₀:…:u_d] = C^L[u₀−u₁, …, u_d−u₀].
pub fn make_corr_colon(u: &[QVector]) -> Result<St2Element, St2Error> {
    let n = u.len();
    let v: Vec<QVector> = (0..n).map(|i| vec_sub(&u[i], &u[(i + 1) % n])).collect();
    make_corr(&v)
}

/// D([𝓟]⊗[𝓠]) = [𝓠^∨]⊗[𝓟^∨]; symmetric parts are carried along unchanged.
pub fn dualize(x: &St2Element) -> Result<St2Element, St2Error> {
    let d = x.ambient;
    let mut out = St2Element::zero(d);
    for ((a, b, m), c) in x.terms.iter() {
        if a.len() != d || b.len() != d {
            return Err(St2Error::NotFullRank);
        }
        let pa = dual_basis(&a.vectors()).map_err(|_| St2Error::Dependent)?;
        let qb = dual_basis(&b.vectors()).map_err(|_| St2Error::Dependent)?;
        out.add_pair(&qb, &pa, &Poly::single(m.clone(), Q::one()), c);
    }
    Ok(out)
}

/// Recursive expansion of s(L[v₁..v_d]).
pub fn symbol_l(v: &[QVector]) -> BarElement {
    let d = v[0].len();
    let mut out = BarElement::zero(d);
    if v.len() == 1 {
        out.add_vectors(v, zero_mono(d), Q::one());
        return out;
    }
    let pt = |x: &QVector| canonical_point(x).unwrap();
    out.add_assign(&symbol_l(&v[1..]).append_line(&pt(&v[0])));
    for i in 0..v.len() - 1 {
        let mut merged: Vec<QVector> = v[..i].to_vec();
        merged.push(vec_add(&v[i], &v[i + 1]));
        merged.extend_from_slice(&v[i + 2..]);
        let s = symbol_l(&merged);
        out.add_assign(&s.append_line(&pt(&v[i + 1])));
        out.add_scaled(&s.append_line(&pt(&v[i])), &-Q::one());
    }
    out
}

/// Recursive expansion of s(I[v₁..v_d]).
pub fn symbol_i(v: &[QVector]) -> BarElement {
    let d = v[0].len();
    let k = v.len();
    let mut out = BarElement::zero(d);
    if k == 1 {
        out.add_vectors(v, zero_mono(d), -Q::one());
        return out;
    }
    let pt = |x: &QVector| canonical_point(x).unwrap();
    out.add_scaled(&symbol_i(&v[..k - 1]).append_line(&pt(&v[k - 1])), &-Q::one());
    let omit = |j: usize| -> Vec<QVector> { v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, x)| x.clone()).collect() };
    for i in 0..k - 1 {
        let diff = pt(&vec_sub(&v[i + 1], &v[i]));
        let mut s = symbol_i(&omit(i + 1));
        s.add_scaled(&symbol_i(&omit(i)), &-Q::one());
        out.add_assign(&s.append_line(&diff));
    }
    out
}

/// Basis v with P_i = ⟨v₁+…+v_i⟩ and Q_i = ⟨v_i⟩, so that [𝓟]⊗[𝓠] = L[v_d,…,v₁].
pub fn coxeter_to_basis(p: &[QVector], q: &[QVector]) -> Result<Vec<QVector>, St2Error> {
    let d = p.len();
    if q.len() != d {
        return Err(St2Error::DimensionMismatch { expected: d, found: q.len() });
    }
    if canonical_point(&p[0]).ok() != canonical_point(&q[0]).ok() {
        return Err(St2Error::FirstPointsDiffer);
    }
    let mut v = vec![p[0].clone()];
    let mut s = p[0].clone();
    for i in 1..d {
        // q_i = α s + β p_i
        let m = QMatrix::from_cols(&[s.clone(), p[i].clone()]);
        let coef = solve(&m, &q[i]).ok_or(St2Error::NotCoxeter(i + 1))?;
        if coef[0].is_zero() {
            return Err(St2Error::NotGeneric(i + 1));
        }
        let vi = vec_scale(&q[i], &-coef[0].recip());
        s = vec_add(&s, &vi);
        v.push(vi);
    }
    if !is_independent(&v) {
        return Err(St2Error::Degenerate);
    }
    Ok(v)
}

/// Words of s(X) sharing a flag of partial spans come from a single
/// flag-basis apartment, which inverts s exactly.
pub fn s_inverse(x: &BarElement) -> Result<St2Element, St2Error> {
    let d = x.ambient();
    if !x.mixed().is_zero() {
        return Err(St2Error::NotInImage);
    }
    let std_flag: Vec<Subspace> = (1..=d).map(|i| Subspace::span(d, &(0..i).map(|j| crate::qlinalg::unit_vector(d, j)).collect::<Vec<_>>())).collect();
    let mut groups: BTreeMap<(Vec<Subspace>, Mono), Vec<(&LineWord, &Q)>> = BTreeMap::new();
    for ((w, m), c) in x.lines().iter() {
        if w.len() != d {
            return Err(St2Error::NotInImage);
        }
        let vs: Vec<QVector> = w.iter().map(|p| int_to_q(p)).collect();
        let flag: Vec<Subspace> = (1..=d).map(|i| Subspace::span(d, &vs[..i])).collect();
        groups.entry((flag, m.clone())).or_default().push((w, c));
    }
    let reversal = if (d * (d.saturating_sub(1)) / 2) % 2 == 0 { Q::one() } else { -Q::one() };
    let mut out = St2Element::zero(d);
    for ((flag, m), words) in groups {
        let mut pts = Vec::with_capacity(d);
        for i in 1..=d {
            let l = std_flag[i - 1].intersect(&flag[d - i]);
            if l.dim() != 1 {
                break;
            }
            pts.push(l.basis()[0].clone());
        }
        if pts.len() != d || !is_independent(&pts) {
            continue;
        }
        for (w, c) in words {
            let b: Vec<QVector> = w.iter().map(|p| int_to_q(p)).collect();
            out.add_pair(&pts, &b, &Poly::single(m.clone(), Q::one()), &(c * &reversal));
        }
    }
    if embed_s(&out) != *x {
        return Err(St2Error::NotInImage);
    }
    Ok(out)
}

/// Coefficients expressing the target in the span of the family, if possible.
pub fn span_solve(target: &St2Element, family: &[St2Element]) -> Option<Vec<Q>> {
    let t = target.normal_form();
    let fam: Vec<St2Element> = family.iter().map(|f| f.normal_form()).collect();
    let mut keys: BTreeMap<St2Key, usize> = BTreeMap::new();
    for k in t.terms.keys().chain(fam.iter().flat_map(|f| f.terms.keys())) {
        let n = keys.len();
        keys.entry(k.clone()).or_insert(n);
    }
    if keys.is_empty() {
        return Some(vec![Q::zero(); family.len()]);
    }
    let mut m = QMatrix::zeros(keys.len(), family.len());
    for (j, f) in fam.iter().enumerate() {
        for (k, c) in f.terms.iter() {
            m[(keys[k], j)] = c.clone();
        }
    }
    let mut b = vec![Q::zero(); keys.len()];
    for (k, c) in t.terms.iter() {
        b[keys[k]] = c.clone();
    }
    solve(&m, &b)
}

/// Subspaces spanned by the apartments of x.
fn occurring_spans(x: &St2Element) -> Vec<Subspace> {
    let mut spans: Vec<Subspace> = x.terms.keys().map(|(a, _, _)| a.span(x.ambient)).collect();
    spans.sort();
    spans.dedup();
    spans
}

fn functional_avoids(h: &[Q], spans: &[Subspace]) -> bool {
    spans.iter().all(|s| s.dim() == 0 || s.basis().iter().any(|b| !dot(h, b).is_zero()))
}

/// A seeded functional with entries in {1..97} not vanishing on any of the spans.
pub fn choose_functional(spans: &[Subspace], d: usize, seed: u64) -> Result<QVector, St2Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let h = random_functional(&mut rng, d);
        if functional_avoids(&h, spans) {
            return Ok(h);
        }
    }
    Err(St2Error::NoFunctional)
}

/// Image of x in the shuffle quotient after p_H ∘ s. Injective on St^∞.
pub fn st_infty_image(x: &St2Element, h: &[Q]) -> BarElement {
    let b = p_h_project(&embed_s(x), h).expect("line words");
    shuffle_span_reduce(&b).expect("line words")
}

/// Zero test in St^∞ = St² / (decomposables), with a functional drawn from `seed`.
pub fn is_zero_st_infty_seeded(x: &St2Element, seed: u64) -> Result<bool, St2Error> {
    let h = choose_functional(&occurring_spans(x), x.ambient, seed)?;
    Ok(st_infty_image(x, &h).is_zero())
}

pub fn is_zero_st_infty(x: &St2Element) -> bool {
    is_zero_st_infty_seeded(x, 0x5eed).expect("functional")
}

/// Formal sum of wedges a ∧ b of St^∞ representatives.
#[derive(Clone, Debug, Default)]
pub struct WedgeSum {
    pub terms: Vec<(Q, St2Element, St2Element)>,
}

impl WedgeSum {
    /// Σ c (φ(a)⊗φ(b) − φ(b)⊗φ(a)) with φ = shuffle quotient of p_H ∘ s.
    pub fn image(&self, h: &[Q]) -> Lin<(LineWord, Mono, LineWord, Mono)> {
        let mut out = Lin::new();
        let mut cache: HashMap<St2Element, BarElement> = HashMap::new();
        let mut phi = |x: &St2Element| cache.entry(x.clone()).or_insert_with(|| st_infty_image(x, h)).clone();
        for (c, a, b) in &self.terms {
            let pa = phi(a);
            let pb = phi(b);
            for ((wa, ma), ca) in pa.lines().iter() {
                for ((wb, mb), cb) in pb.lines().iter() {
                    out.add_term((wa.clone(), ma.clone(), wb.clone(), mb.clone()), c * ca * cb);
                    out.add_term((wb.clone(), mb.clone(), wa.clone(), ma.clone()), -(c * ca * cb));
                }
            }
        }
        out
    }

    pub fn spans(&self) -> Vec<Subspace> {
        let mut s: Vec<Subspace> = self.terms.iter().flat_map(|(_, a, b)| occurring_spans(a).into_iter().chain(occurring_spans(b))).collect();
        s.sort();
        s.dedup();
        s
    }
}

/// δL[v₁..v_d] = −Σ_{j=0}^{d} Σ_{i=1}^{d−1} L[v_{j+1}..v_{j+i}] ∧ L[v_{j+i+1}..v_{j+d}],
/// indices modulo d+1 and v₀ = −Σ v_i.
pub fn cobracket_l(v: &[QVector]) -> Result<WedgeSum, St2Error> {
    let d = check_basis(v)?;
    let n = v.len();
    let v0 = vec_neg(&v.iter().fold(vec![Q::zero(); d], |acc, x| vec_add(&acc, x)));
    let all: Vec<QVector> = std::iter::once(v0).chain(v.iter().cloned()).collect();
    let at = |i: usize| all[i % (n + 1)].clone();
    let mut out = WedgeSum::default();
    for j in 0..=n {
        for i in 1..n {
            let a: Vec<QVector> = (j + 1..=j + i).map(at).collect();
            let b: Vec<QVector> = (j + i + 1..=j + n).map(at).collect();
            out.terms.push((-Q::one(), make_l(&a)?, make_l(&b)?));
        }
    }
    Ok(out)
}

/// The antisymmetrized reduced coproduct Σ (x' ∧ x'') over the bidegrees (k, d−k), 0 < k < d.
pub fn cobracket_via_coproduct(x: &St2Element) -> Result<WedgeSum, St2Error> {
    let mut out = WedgeSum::default();
    for ((a, b, m), c) in x.terms.iter() {
        if m.iter().any(|&e| e > 0) {
            return Err(St2Error::SymmetricPart);
        }
        let k = a.len();
        for t in coproduct_pair(a, b, x.ambient) {
            if t.i.is_empty() || t.i.len() == k {
                continue;
            }
            out.terms.push((c.clone(), t.left, t.right));
        }
    }
    Ok(out)
}

/// Which family of generators a relation is stated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    L,
    I,
}

pub fn make_family(kind: Family, v: &[QVector]) -> Result<St2Element, St2Error> {
    match kind {
        Family::L => make_l(v),
        Family::I => make_i(v),
    }
}

/// X[v₁..v_{d₁}]·X[v_{d₁+1}..v_d] − Σ_{shuffles} X[v_σ] for X = L or I.
pub fn double_shuffle_defect(kind: Family, v: &[QVector], d1: usize) -> Result<St2Element, St2Error> {
    let d = check_basis(v)?;
    let mut out = st2_product(&make_family(kind, &v[..d1])?, &make_family(kind, &v[d1..])?);
    for w in shuffles(&v[..d1], &v[d1..]) {
        out.add_scaled(&make_family(kind, &w)?, &-Q::one());
    }
    debug_assert_eq!(out.ambient, d);
    Ok(out)
}

/// (−1)^n.
fn sign_pow(n: usize) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Defects of the dihedral relations, each zero in St^∞.
pub fn dihedral_defects(v: &[QVector]) -> Result<Vec<(&'static str, St2Element)>, St2Error> {
    let d = check_basis(v)?;
    let v0 = vec_neg(&v.iter().fold(vec![Q::zero(); d], |acc, x| vec_add(&acc, x)));
    let l = make_l(v)?;
    let rev: Vec<QVector> = v.iter().rev().cloned().collect();
    let rotated: Vec<QVector> = v[1..].iter().cloned().chain(std::iter::once(v0.clone())).collect();
    let negated: Vec<QVector> = v.iter().map(|x| vec_neg(x)).collect();
    let sign = sign_pow(d + 1);
    let i = make_i(v)?;
    let shifted_a: Vec<QVector> = v.iter().map(|x| vec_sub(x, &v0)).collect();
    let shifted_b: Vec<QVector> = v[1..].iter().chain(std::iter::once(&v0)).map(|x| vec_sub(x, &v[0])).collect();
    Ok(vec![
        ("L rotation", l.sub(&make_l(&rotated)?)),
        ("L negation", l.sub(&make_l(&negated)?)),
        ("L reversal", l.sub(&make_l(&rev)?.scaled(&sign))),
        ("I reversal", i.sub(&make_i(&rev)?.scaled(&sign))),
        ("I translation", make_i(&shifted_a)?.sub(&make_i(&shifted_b)?)),
    ])
}

/// Checks the incidences P₁ = Q₁ and Q_i ∈ ⟨P_{i−1}, P_i⟩.
pub fn is_coxeter_pair(p: &[QVector], q: &[QVector]) -> bool {
    if p.len() != q.len() || p.is_empty() || !is_independent(p) || !is_independent(q) {
        return false;
    }
    if canonical_point(&p[0]).ok() != canonical_point(&q[0]).ok() {
        return false;
    }
    (1..p.len()).all(|i| crate::qlinalg::rank(&[p[i - 1].clone(), p[i].clone(), q[i].clone()]) == 2)
}

/// The Coxeter pair (𝓟, 𝓠) of L[v₁..v_d] as ordered tuples.
pub fn coxeter_pair_of_l(v: &[QVector]) -> (Vec<QVector>, Vec<QVector>) {
    let d = v[0].len();
    let mut p = Vec::new();
    let mut acc = vec![Q::zero(); d];
    for x in v.iter().rev() {
        acc = vec_add(&acc, x);
        p.push(acc.clone());
    }
    (p, v.iter().rev().cloned().collect())
}

/// Image of an ordered Coxeter pair under duality, as ordered tuples:
/// the dual bases of 𝓠 and 𝓟, each read backwards.
pub fn dual_coxeter_pair(p: &[QVector], q: &[QVector]) -> Result<(Vec<QVector>, Vec<QVector>), St2Error> {
    let pd = dual_basis(p).map_err(|_| St2Error::Dependent)?;
    let qd = dual_basis(q).map_err(|_| St2Error::Dependent)?;
    Ok((qd.into_iter().rev().collect(), pd.into_iter().rev().collect()))
}

/// A Coxeter pair with Q_{k+1} = P_{k+1}, built from random integral data.
pub fn random_non_generic_pair<R: rand::Rng>(rng: &mut R, d: usize, k: usize) -> (Vec<QVector>, Vec<QVector>) {
    assert!(k >= 1 && k < d);
    loop {
        let p = crate::qlinalg::random_basis(rng, d, 4);
        let mut q = vec![p[0].clone()];
        for i in 1..d {
            if i == k {
                q.push(p[i].clone());
            } else {
                let a = qi(rng.gen_range(1..=4));
                let b = qi(rng.gen_range(-4..=4));
                q.push(vec_add(&vec_scale(&p[i - 1], &b), &vec_scale(&p[i], &a)));
            }
        }
        if is_independent(&q) {
            return (p, q);
        }
    }
}

/// C^L[v₀,…,v_d] − C^L[v₁,…,v_d,v₀] for v₀ = −Σ v_i.
pub fn correlator_cyclic_defect(v: &[QVector]) -> Result<St2Element, St2Error> {
    let d = check_basis(v)?;
    let v0 = vec_neg(&v.iter().fold(vec![Q::zero(); d], |acc, x| vec_add(&acc, x)));
    let all: Vec<QVector> = std::iter::once(v0).chain(v.iter().cloned()).collect();
    let rot: Vec<QVector> = all[1..].iter().cloned().chain(std::iter::once(all[0].clone())).collect();
    Ok(make_corr(&all)?.sub(&make_corr(&rot)?))
}

/// Σ_{σ ∈ Σ_{d₁,d₂}} C^L[v₀, v_σ(1), …] for v₀ = −Σ v_i.
pub fn correlator_shuffle_sum(v: &[QVector], d1: usize) -> Result<St2Element, St2Error> {
    let d = check_basis(v)?;
    let v0 = vec_neg(&v.iter().fold(vec![Q::zero(); d], |acc, x| vec_add(&acc, x)));
    let mut out = St2Element::zero(d);
    for w in shuffles(&v[..d1], &v[d1..]) {
        let all: Vec<QVector> = std::iter::once(v0.clone()).chain(w).collect();
        out.add_assign(&make_corr(&all)?);
    }
    Ok(out)
}

/// Σ_{σ ∈ Σ_{d₁,d₂}} C^L[u₀ : u_σ(1) : …] for affinely independent u₀..u_d.
pub fn correlator_colon_shuffle_sum(u: &[QVector], d1: usize) -> Result<St2Element, St2Error> {
    let d = u[0].len();
    let mut out = St2Element::zero(d);
    for w in shuffles(&u[1..=d1], &u[d1 + 1..]) {
        let all: Vec<QVector> = std::iter::once(u[0].clone()).chain(w).collect();
        out.add_assign(&make_corr_colon(&all)?);
    }
    Ok(out)
}

/// Number of terms in (formula − coproduct route) after projecting both
/// cobrackets of L[v₁..v_d] to St^∞ ⊗ St^∞; zero means agreement.
pub fn cobracket_residual(v: &[QVector], seed: u64) -> Result<usize, St2Error> {
    let f = cobracket_l(v)?;
    let c = cobracket_via_coproduct(&make_l(v)?)?;
    let mut spans = f.spans();
    spans.extend(c.spans());
    let h = choose_functional(&spans, v[0].len(), seed)?;
    let mut diff = f.image(&h);
    diff.sub_assign(&c.image(&h));
    Ok(diff.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcplx::bar_differential;
    use crate::qlinalg::{qvec, random_basis};

    fn bar(d: usize, terms: &[(i64, &[QVector])]) -> BarElement {
        let mut x = BarElement::zero(d);
        for (c, w) in terms {
            x.add_vectors(w, zero_mono(d), qi(*c));
        }
        x
    }

    #[test]
    fn s_of_l_and_i_in_dimension_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let v = random_basis(&mut rng, 2, 5);
            let (v1, v2) = (v[0].clone(), v[1].clone());
            let s12 = vec_add(&v1, &v2);
            let expect_l = bar(2, &[(1, &[v2.clone(), v1.clone()]), (-1, &[s12.clone(), v1.clone()]), (1, &[s12.clone(), v2.clone()])]);
            assert_eq!(embed_s(&make_l(&v).unwrap()), expect_l);
            assert_eq!(symbol_l(&v), expect_l);
            let d21 = vec_sub(&v2, &v1);
            let expect_i = bar(2, &[(1, &[v1.clone(), v2.clone()]), (-1, &[v1.clone(), d21.clone()]), (1, &[v2.clone(), d21.clone()])]);
            assert_eq!(embed_s(&make_i(&v).unwrap()), expect_i);
            assert_eq!(symbol_i(&v), expect_i);
        }
    }

    #[test]
    fn s_in_dimension_one() {
        let v = vec![qvec(&[3])];
        let x = St2Element::pair_plain(&v, &v);
        assert_eq!(embed_s(&x), bar(1, &[(1, &[qvec(&[1])])]));
    }

    #[test]
    fn symbols_match_s_and_are_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in 0..16 {
            let d = 2 + t % 3;
            let v = random_basis(&mut rng, d, 4);
            let sl = embed_s(&make_l(&v).unwrap());
            assert_eq!(symbol_l(&v), sl);
            assert_eq!(symbol_i(&v), embed_s(&make_i(&v).unwrap()));
            assert!(bar_differential(&sl).is_zero());
        }
    }

    #[test]
    fn i_via_l() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=4 {
            let v = random_basis(&mut rng, d, 4);
            let mut w: Vec<QVector> = (0..d - 1).map(|i| vec_sub(&v[i], &v[i + 1])).collect();
            w.push(v[d - 1].clone());
            let sign = if d % 2 == 0 { qi(1) } else { qi(-1) };
            assert!(make_i(&v).unwrap().sub(&make_l(&w).unwrap().scaled(&sign)).is_zero());
        }
    }

    #[test]
    fn product_examples() {
        let e1 = vec![qvec(&[1, 0])];
        let e2 = vec![qvec(&[0, 1])];
        let p = st2_product(&St2Element::pair_plain(&e1, &e1), &St2Element::pair_plain(&e2, &e2));
        let e12 = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        assert_eq!(p, St2Element::pair_plain(&e12, &e12));
        let x = make_l(&e12).unwrap();
        assert_eq!(st2_product(&x, &St2Element::unit(2)), x);
        let a = St2Element::pair_plain(&[qvec(&[1])], &[qvec(&[1])]);
        assert_eq!(st2_product_blocks(&a, &a), St2Element::pair_plain(&e12, &e12));
    }

    #[test]
    fn double_shuffle_in_dimension_two() {
        let v = vec![qvec(&[2, 1]), qvec(&[-1, 3])];
        let lhs = st2_product(&make_l(&v[..1]).unwrap(), &make_l(&v[1..]).unwrap());
        let rhs = {
            let mut r = make_l(&v).unwrap();
            r.add_assign(&make_l(&[v[1].clone(), v[0].clone()]).unwrap());
            r
        };
        assert!(lhs.sub(&rhs).is_zero());
        let coeffs = span_solve(&rhs, &[lhs.clone()]).unwrap();
        assert_eq!(coeffs, vec![qi(1)]);
        assert_eq!(span_solve(&lhs, &[lhs.clone(), rhs.clone()]).unwrap()[0], qi(1));
        assert_eq!(span_solve(&St2Element::zero(2), &[lhs]).unwrap(), vec![qi(0)]);
        assert!(span_solve(&make_l(&v).unwrap(), &[rhs]).is_none());
    }

    #[test]
    fn coproduct_dimension_one() {
        let v = vec![qvec(&[1, 2])];
        let x = St2Element::pair_plain(&v, &v);
        let terms = coproduct_pair(&x.terms.keys().next().unwrap().0, &x.terms.keys().next().unwrap().1, 2);
        assert_eq!(terms.len(), 2);
        let t = st2_coproduct(&x).unwrap();
        let unit = St2Element::unit(2);
        let mut expect = tensor_of(&[&x, &unit], &qi(1));
        expect.add_assign(&tensor_of(&[&unit, &x], &qi(1)));
        assert_eq!(t, expect);
    }

    #[test]
    fn coproduct_matches_deconcatenation() {
        // (s ⊗ s) ∘ Δ = deconcatenation ∘ s
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..=3 {
            let v = random_basis(&mut rng, d, 3);
            let x = make_l(&v).unwrap();
            let mut lhs = Lin::new();
            for (ks, c) in st2_coproduct(&x).unwrap().iter() {
                let l = embed_s(&St2Element::from_terms(d, Lin::single(ks[0].clone(), Q::one())));
                let r = embed_s(&St2Element::from_terms(d, Lin::single(ks[1].clone(), Q::one())));
                for ((wl, _), cl) in l.lines().iter() {
                    for ((wr, _), cr) in r.lines().iter() {
                        lhs.add_term((wl.clone(), wr.clone()), c * cl * cr);
                    }
                }
            }
            let mut rhs = Lin::new();
            for ((a, b, _), c) in crate::barcplx::deconcat_element(&embed_s(&x)).iter() {
                rhs.add_term((a.clone(), b.clone()), c.clone());
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn coproduct_is_coassociative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let v = random_basis(&mut rng, 3, 3);
            let w = random_basis(&mut rng, 3, 3);
            let x = St2Element::pair_plain(&v, &w);
            let dx = st2_coproduct(&x).unwrap();
            assert_eq!(coproduct_at(&dx, 0, 3).unwrap(), coproduct_at(&dx, 1, 3).unwrap());
        }
    }

    #[test]
    fn coproduct_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..3 {
            let v = random_basis(&mut rng, 3, 3);
            let a = make_l(&v[..1]).unwrap();
            let b = make_i(&v[1..]).unwrap();
            let lhs = st2_coproduct(&st2_product(&a, &b)).unwrap();
            let rhs = tensor_product2(&st2_coproduct(&a).unwrap(), &st2_coproduct(&b).unwrap(), 3);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=3 {
            let v = random_basis(&mut rng, d, 4);
            let dual = dual_basis(&v).unwrap();
            let rev: Vec<QVector> = dual.iter().rev().cloned().collect();
            let sign = if d % 2 == 0 { qi(1) } else { qi(-1) };
            let l = make_l(&v).unwrap();
            let dl = dualize(&l).unwrap();
            assert!(dl.sub(&make_i(&rev).unwrap().scaled(&sign)).is_zero());
            assert_eq!(dualize(&dl).unwrap(), l);
        }
    }

    #[test]
    fn coxeter_examples() {
        let p = vec![qvec(&[1, 0]), qvec(&[1, 1])];
        let q = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        let v = coxeter_to_basis(&p, &q).unwrap();
        let rev: Vec<QVector> = v.iter().rev().cloned().collect();
        assert!(make_l(&rev).unwrap().sub(&St2Element::pair_plain(&p, &q)).is_zero());
        let bad = vec![qvec(&[1, 0]), qvec(&[1, 1])];
        assert_eq!(coxeter_to_basis(&p, &bad), Err(St2Error::NotGeneric(2)));
        let p3 = vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1])];
        let q3 = vec![qvec(&[1, 0, 0]), qvec(&[1, 1, 0]), qvec(&[1, 1, 1])];
        assert_eq!(coxeter_to_basis(&p3, &q3), Err(St2Error::NotCoxeter(3)));
    }

    #[test]
    fn s_inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 1..=3 {
            let v = random_basis(&mut rng, d, 4);
            let w = random_basis(&mut rng, d, 4);
            let x = St2Element::pair_plain(&v, &w).mul_poly(&poly::linear(&v[0]));
            let y = s_inverse(&embed_s(&x)).unwrap();
            assert!(x.sub(&y).is_zero());
        }
        let junk = bar(2, &[(1, &[qvec(&[1, 0]), qvec(&[0, 1])])]);
        assert_eq!(s_inverse(&junk), Err(St2Error::NotInImage));
    }

    #[test]
    fn st_infty_detects_products() {
        let v = vec![qvec(&[1, 2]), qvec(&[3, -1])];
        let prod = st2_product(&make_l(&v[..1]).unwrap(), &make_l(&v[1..]).unwrap());
        assert!(is_zero_st_infty(&prod));
        assert!(!is_zero_st_infty(&make_l(&v).unwrap()));
    }

    #[test]
    fn cobracket_matches_coproduct() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(cobracket_l(&[qvec(&[2])]).unwrap().terms.is_empty());
        assert_eq!(cobracket_l(&random_basis(&mut rng, 2, 4)).unwrap().terms.len(), 3);
        for d in 2..=3 {
            let v = random_basis(&mut rng, d, 3);
            assert_eq!(cobracket_residual(&v, 1).unwrap(), 0);
        }
    }

    #[test]
    fn double_shuffle_all_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in 2..=4 {
            let v = random_basis(&mut rng, d, 4);
            for d1 in 1..d {
                for kind in [Family::L, Family::I] {
                    assert!(double_shuffle_defect(kind, &v, d1).unwrap().is_zero(), "{kind:?} {d1}+{}", d - d1);
                }
            }
        }
    }

    #[test]
    fn dihedral_and_non_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            let v = random_basis(&mut rng, d, 4);
            for (name, x) in dihedral_defects(&v).unwrap() {
                assert!(is_zero_st_infty(&x), "{name} d={d}");
            }
            if d >= 2 {
                let (p, q) = random_non_generic_pair(&mut rng, d, 1 + (d - 2));
                assert!(is_coxeter_pair(&p, &q));
                let x = St2Element::pair_plain(&p, &q);
                assert!(!x.is_zero());
                assert!(is_zero_st_infty(&x));
            }
        }
        let v = vec![qvec(&[1, 2]), qvec(&[3, -1])];
        let x = make_l(&v).unwrap().sub(&make_l(&[v[1].clone(), v[0].clone()]).unwrap());
        assert!(!is_zero_st_infty(&x));
    }

    #[test]
    fn correlators() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for d in 2..=3 {
            let v = random_basis(&mut rng, d, 4);
            assert!(is_zero_st_infty(&correlator_cyclic_defect(&v).unwrap()));
            let mut u = vec![vec![Q::zero(); d]];
            u.extend(v.iter().cloned());
            for d1 in 1..d {
                assert!(is_zero_st_infty(&correlator_shuffle_sum(&v, d1).unwrap()));
                assert!(is_zero_st_infty(&correlator_colon_shuffle_sum(&u, d1).unwrap()));
            }
        }
    }

    #[test]
    fn duality_preserves_coxeter_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in 1..=4 {
            let v = random_basis(&mut rng, d, 4);
            let (p, q) = coxeter_pair_of_l(&v);
            assert!(is_coxeter_pair(&p, &q));
            let (pd, qd) = dual_coxeter_pair(&p, &q).unwrap();
            assert!(is_coxeter_pair(&pd, &qd), "d={d}");
        }
    }
}
